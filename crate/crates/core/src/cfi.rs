//! Photon-number-counting outcome distributions in the three polarisation
//! bases, classical Fisher information matrices in the Euler frame, and the
//! trace transformation into the locally-independent frame, including the
//! product-state fast path tr(V W~^-1) / F_single.

use nalgebra::{DVector, Matrix3};
use num_complex::Complex64;
use serde::Serialize;

use crate::fock::FockState;
use crate::qfi::{FisherKind, FisherMatrix, Frame, InverseReport};
use crate::su2::{
    basis_conjugate, conjugation_jacobians_with_step, euler_to_matrix, jacobians_at, lift_su2,
    wigner_d_matrix, EulerAngles, MeasurementBasis, Su2Matrix,
};
use crate::{tol, Error, Result};

/// Detection-count distribution over m_d = -j..j for j = N/2; `probs[k]`
/// belongs to m_d = k - j, i.e. to seeing k photons in the first mode.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    two_j: u32,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of outcome m_d given as a doubled quantum number.
    pub fn prob(&self, two_md: i32) -> f64 {
        self.probs[((two_md + self.two_j as i32) / 2) as usize]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Amplitude vector `sum_m c_m exp(i(psi3 m + psi1 m_d)) d^j_{m_d,m}(psi2)`
/// at the given (already basis-resolved) Euler angles.
fn amplitude_vector(state: &FockState, e: &EulerAngles) -> DVector<Complex64> {
    let n = state.n() as usize;
    let j = state.n() as f64 / 2.0;
    let d = wigner_d_matrix(state.two_j(), e.psi2);
    let mut out = DVector::<Complex64>::zeros(n + 1);
    for md_idx in 0..=n {
        let md = md_idx as f64 - j;
        let mut acc = Complex64::new(0.0, 0.0);
        for m_idx in 0..=n {
            let m = m_idx as f64 - j;
            let phase = Complex64::from_polar(1.0, e.psi3 * m);
            acc += state.amp(m_idx as u32) * phase * d[(md_idx, m_idx)];
        }
        out[md_idx] = acc * Complex64::from_polar(1.0, e.psi1 * md);
    }
    out
}

/// Photon-counting distribution after the unitary, measured in `basis`.
/// DA and RL reduce to the HV formula at the conjugated angles.
pub fn outcome_distribution(
    state: &FockState,
    e: &EulerAngles,
    basis: MeasurementBasis,
) -> OutcomeDistribution {
    let eff = match basis {
        MeasurementBasis::Hv => *e,
        _ => basis_conjugate(e, basis),
    };
    let amps = amplitude_vector(state, &eff);
    OutcomeDistribution {
        two_j: state.two_j(),
        probs: amps.iter().map(|a| a.norm_sqr()).collect(),
    }
}

/// Direct evolution through the exact (N+1)-dimensional representation of
/// the conjugated matrix; the cross-check route for the amplitude formula.
pub fn outcome_distribution_direct(
    state: &FockState,
    e: &EulerAngles,
    basis: MeasurementBasis,
) -> OutcomeDistribution {
    let m = crate::su2::conjugated_matrix(&euler_to_matrix(e), basis);
    let evolved = evolve_direct(state, &m);
    OutcomeDistribution {
        two_j: state.two_j(),
        probs: evolved.iter().map(|a| a.norm_sqr()).collect(),
    }
}

/// Applies the lifted 2x2 matrix to the amplitude vector.
pub fn evolve_direct(state: &FockState, m: &Su2Matrix) -> DVector<Complex64> {
    lift_su2(m, state.n()) * DVector::from_column_slice(state.amps())
}

/// Classical Fisher matrix plus the count of excluded divergent outcomes
/// (probability under the floor with a non-negligible derivative).
#[derive(Debug, Clone)]
pub struct ClassicalFisher {
    pub fisher: FisherMatrix,
    pub divergent_outcomes: usize,
}

/// F_{ab} = sum_md dP_a dP_b / P by central differences on the Euler
/// angles, differentiating the distribution of `basis` directly.
pub fn fisher_euler(
    state: &FockState,
    e: &EulerAngles,
    basis: MeasurementBasis,
) -> ClassicalFisher {
    fisher_euler_with_step(state, e, basis, tol::FD_STEP)
}

pub fn fisher_euler_with_step(
    state: &FockState,
    e: &EulerAngles,
    basis: MeasurementBasis,
    step: f64,
) -> ClassicalFisher {
    let center = outcome_distribution(state, e, basis);
    let dim = state.n() as usize + 1;
    let mut deriv = vec![[0.0f64; 3]; dim];
    for k in 0..3 {
        let mut plus = e.as_array();
        let mut minus = e.as_array();
        plus[k] += step;
        minus[k] -= step;
        let pp = outcome_distribution(state, &EulerAngles::from_array(plus), basis);
        let pm = outcome_distribution(state, &EulerAngles::from_array(minus), basis);
        for i in 0..dim {
            deriv[i][k] = (pp.probs[i] - pm.probs[i]) / (2.0 * step);
        }
    }
    let mut m = Matrix3::<f64>::zeros();
    let mut divergent = 0usize;
    for i in 0..dim {
        let p = center.probs[i];
        if p < tol::P_FLOOR {
            let max_d = deriv[i].iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
            if max_d > tol::DERIV_FLOOR {
                divergent += 1;
            }
            continue;
        }
        for a in 0..3 {
            for b in 0..3 {
                m[(a, b)] += deriv[i][a] * deriv[i][b] / p;
            }
        }
    }
    ClassicalFisher {
        fisher: FisherMatrix::new(
            (m + m.transpose()) * 0.5,
            Frame::Euler,
            FisherKind::Classical,
        ),
        divergent_outcomes: divergent,
    }
}

/// Total Euler-frame Fisher matrix with per-basis breakdown.
#[derive(Debug, Clone)]
pub struct TotalFisher {
    pub fisher: FisherMatrix,
    pub divergent_outcomes: usize,
    /// Traces of the HV, DA, RL contributions after transformation.
    pub block_traces: [f64; 3],
}

/// Transform route: F = F_HV(psi) + W'^T F_HV(psi') W' + W''^T F_HV(psi'') W''.
pub fn total_fisher(state: &FockState, e: &EulerAngles) -> TotalFisher {
    let (wp, wpp) = conjugation_jacobians_with_step(e, tol::FD_STEP_CONJ);
    total_fisher_with(state, e, &wp, &wpp)
}

pub fn total_fisher_with(
    state: &FockState,
    e: &EulerAngles,
    wp: &Matrix3<f64>,
    wpp: &Matrix3<f64>,
) -> TotalFisher {
    let hv = fisher_euler(state, e, MeasurementBasis::Hv);
    let da = fisher_euler(
        state,
        &basis_conjugate(e, MeasurementBasis::Da),
        MeasurementBasis::Hv,
    );
    let rl = fisher_euler(
        state,
        &basis_conjugate(e, MeasurementBasis::Rl),
        MeasurementBasis::Hv,
    );
    let da_block = wp.transpose() * da.fisher.m * wp;
    let rl_block = wpp.transpose() * rl.fisher.m * wpp;
    let total = hv.fisher.m + da_block + rl_block;
    TotalFisher {
        fisher: FisherMatrix::new(
            (total + total.transpose()) * 0.5,
            Frame::Euler,
            FisherKind::Classical,
        ),
        divergent_outcomes: hv.divergent_outcomes + da.divergent_outcomes + rl.divergent_outcomes,
        block_traces: [hv.fisher.m.trace(), da_block.trace(), rl_block.trace()],
    }
}

/// Direct route: each basis distribution differentiated with respect to
/// the source angles themselves. Serves as the transform-route cross-check.
pub fn total_fisher_direct(state: &FockState, e: &EulerAngles) -> TotalFisher {
    let mut total = Matrix3::<f64>::zeros();
    let mut divergent = 0;
    let mut traces = [0.0f64; 3];
    for (i, basis) in MeasurementBasis::ALL.iter().enumerate() {
        let f = fisher_euler(state, e, *basis);
        total += f.fisher.m;
        divergent += f.divergent_outcomes;
        traces[i] = f.fisher.m.trace();
    }
    TotalFisher {
        fisher: FisherMatrix::new(total, Frame::Euler, FisherKind::Classical),
        divergent_outcomes: divergent,
        block_traces: traces,
    }
}

/// Status of a precision evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionFlag {
    Ok,
    SingularFrame,
    IllConditioned,
}

impl PrecisionFlag {
    pub fn label(&self) -> &'static str {
        match self {
            PrecisionFlag::Ok => "ok",
            PrecisionFlag::SingularFrame => "singular-frame",
            PrecisionFlag::IllConditioned => "ill-conditioned",
        }
    }
}

/// tr(V F^-1) in the locally-independent frame, or the flag explaining
/// why no finite value is reported.
#[derive(Debug, Clone, Serialize)]
pub struct PrecisionResult {
    pub tr_inv: Option<f64>,
    pub flag: PrecisionFlag,
    pub condition_number: Option<f64>,
    pub divergent_outcomes: usize,
    pub block_traces: Option<[f64; 3]>,
}

impl PrecisionResult {
    fn singular() -> Self {
        PrecisionResult {
            tr_inv: None,
            flag: PrecisionFlag::SingularFrame,
            condition_number: None,
            divergent_outcomes: 0,
            block_traces: None,
        }
    }
}

fn frame_is_singular(e: &EulerAngles) -> bool {
    e.psi2.sin().abs() < tol::SINGULAR_SIN
}

/// Full-route precision: total Fisher matrix, eigendecomposition, and
/// tr(V F^-1). Flags the singular Euler frame and refuses ill-conditioned
/// inversions instead of fabricating values.
pub fn tr_inv_precision(state: &FockState, e: &EulerAngles) -> PrecisionResult {
    if frame_is_singular(e) {
        return PrecisionResult::singular();
    }
    let jac = jacobians_at(e).expect("non-singular frame");
    let tf = total_fisher_with(state, e, &jac.wp, &jac.wpp);
    let inv = tf.fisher.weighted_tr_inverse(&jac.v);
    PrecisionResult {
        tr_inv: inv.value,
        flag: if inv.value.is_some() {
            PrecisionFlag::Ok
        } else {
            PrecisionFlag::IllConditioned
        },
        condition_number: Some(inv.condition_number),
        divergent_outcomes: tf.divergent_outcomes,
        block_traces: Some(tf.block_traces),
    }
}

/// Single-parameter Fisher information of the product state |M, N-M>
/// under photon counting: N + 2M(N-M).
pub fn f_single(m_occ: u32, n: u32) -> f64 {
    let m = m_occ as f64;
    let nf = n as f64;
    nf + 2.0 * m * (nf - m)
}

/// W~ from the second rows of W' and W'': the basis-geometry matrix of the
/// product-state precision formula.
pub fn w_tilde(wp: &Matrix3<f64>, wpp: &Matrix3<f64>) -> Matrix3<f64> {
    let mut m = Matrix3::<f64>::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut v = wp[(1, a)] * wp[(1, b)] + wpp[(1, a)] * wpp[(1, b)];
            if a == 1 && b == 1 {
                v += 1.0;
            }
            m[(a, b)] = v;
        }
    }
    m
}

/// tr(V W~^-1): the state-independent geometric factor of product-state
/// precision. Fails on the singular frame.
pub fn v_w_tilde_trace(e: &EulerAngles) -> Result<InverseReport> {
    if frame_is_singular(e) {
        return Err(Error::SingularFrame(e.psi2.sin().abs()));
    }
    let jac = jacobians_at(e)?;
    let wt = FisherMatrix::new(
        w_tilde(&jac.wp, &jac.wpp),
        Frame::Euler,
        FisherKind::Classical,
    );
    Ok(wt.weighted_tr_inverse(&jac.v))
}

/// Product-state fast path: tr(V W~^-1) / F_single for the probe |M, N-M>.
pub fn product_state_precision(m_occ: u32, n: u32, e: &EulerAngles) -> Result<PrecisionResult> {
    if m_occ > n {
        return Err(Error::FamilyConstraint(format!(
            "occupation M = {m_occ} exceeds n = {n}"
        )));
    }
    if frame_is_singular(e) {
        return Ok(PrecisionResult::singular());
    }
    let jac = jacobians_at(e)?;
    let fs = f_single(m_occ, n);
    let wt = w_tilde(&jac.wp, &jac.wpp);
    let inv =
        FisherMatrix::new(wt, Frame::Euler, FisherKind::Classical).weighted_tr_inverse(&jac.v);
    let wp_row: f64 = (0..3).map(|k| jac.wp[(1, k)] * jac.wp[(1, k)]).sum();
    let wpp_row: f64 = (0..3).map(|k| jac.wpp[(1, k)] * jac.wpp[(1, k)]).sum();
    Ok(PrecisionResult {
        tr_inv: inv.value.map(|v| v / fs),
        flag: if inv.value.is_some() {
            PrecisionFlag::Ok
        } else {
            PrecisionFlag::IllConditioned
        },
        condition_number: Some(inv.condition_number),
        divergent_outcomes: 0,
        block_traces: Some([fs, fs * wp_row, fs * wpp_row]),
    })
}

/// Relative drift between step-h and step-2h Fisher matrices; the
/// finite-difference hygiene measure.
pub fn fisher_richardson_drift(state: &FockState, e: &EulerAngles, basis: MeasurementBasis) -> f64 {
    let fine = fisher_euler_with_step(state, e, basis, tol::FD_STEP);
    let coarse = fisher_euler_with_step(state, e, basis, 2.0 * tol::FD_STEP);
    let scale = fine.fisher.m.abs().max().max(1e-12);
    (fine.fisher.m - coarse.fisher.m).abs().max() / scale
}
