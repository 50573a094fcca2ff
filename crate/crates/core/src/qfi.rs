//! Quantum Fisher information of the three-basis protocol, optimal
//! precision bounds for the protocol variants, 2-design verification, and
//! the uniqueness searches for the N=2,3 optimal states.
//!
//! The protocol-level QFI depends only on the one- and two-particle
//! reduced states of the probe, so `qfi_three_basis` is exact algebra on
//! those matrices. `qfi_oracle` recomputes the same matrix from evolved
//! (N+1)-dimensional state vectors by finite differences and serves as the
//! independent cross-check.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::fock::{check_optimality, make_state, rho1, rho2, FockState, StateFamily};
use crate::su2::{euler_to_matrix, lift_su2, paulis, EulerAngles, MeasurementBasis, Su2Matrix};
use crate::{tol, Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Parameter frame a Fisher matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Frame {
    Euler,
    LocallyIndependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FisherKind {
    Quantum,
    Classical,
}

/// 3x3 real symmetric information matrix tagged with its frame.
#[derive(Debug, Clone)]
pub struct FisherMatrix {
    pub m: Matrix3<f64>,
    pub frame: Frame,
    pub kind: FisherKind,
}

/// Inversion outcome: the weighted trace of the inverse, or nothing when
/// the matrix is numerically singular, plus the condition number seen.
#[derive(Debug, Clone, Copy)]
pub struct InverseReport {
    pub value: Option<f64>,
    pub condition_number: f64,
}

impl FisherMatrix {
    pub fn new(m: Matrix3<f64>, frame: Frame, kind: FisherKind) -> Self {
        Self { m, frame, kind }
    }

    pub fn symmetry_residual(&self) -> f64 {
        (self.m - self.m.transpose()).abs().max()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// tr(W F^-1) by eigendecomposition. Refuses matrices with
    /// non-positive spectrum or condition number beyond 1e12.
    pub fn weighted_tr_inverse(&self, weight: &Matrix3<f64>) -> InverseReport {
        let eig = self.m.symmetric_eigen();
        let mut lam_min = f64::INFINITY;
        let mut lam_max: f64 = 0.0;
        for l in eig.eigenvalues.iter() {
            lam_min = lam_min.min(l.abs());
            lam_max = lam_max.max(l.abs());
        }
        let cond = if lam_min > 0.0 {
            lam_max / lam_min
        } else {
            f64::INFINITY
        };
        let positive = eig.eigenvalues.iter().all(|l| *l > 0.0);
        if !positive || cond > tol::COND_LIMIT {
            return InverseReport {
                value: None,
                condition_number: cond,
            };
        }
        let mut total = 0.0;
        for k in 0..3 {
            let v = eig.eigenvectors.column(k);
            total += (v.transpose() * weight * v)[(0, 0)] / eig.eigenvalues[k];
        }
        InverseReport {
            value: Some(total),
            condition_number: cond,
        }
    }

    pub fn tr_inverse(&self) -> InverseReport {
        self.weighted_tr_inverse(&Matrix3::identity())
    }
}

/// The three single-run probes: the same Fock amplitudes interpreted in
/// the HV, DA and RL bases, i.e. rho_x = h rho_z h' and rho_y = hc rho_z hc'.
#[derive(Debug, Clone)]
pub struct ProbeTriple {
    source: FockState,
}

impl ProbeTriple {
    pub fn new(source: FockState) -> Self {
        Self { source }
    }

    pub fn source(&self) -> &FockState {
        &self.source
    }

    pub fn n(&self) -> u32 {
        self.source.n()
    }
}

fn conj_sandwich(h: &Su2Matrix, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let hd = DMatrix::<Complex64>::from_fn(2, 2, |i, j| h[(i, j)]);
    &hd * m * hd.adjoint()
}

fn conj_sandwich2(h: &Su2Matrix, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let hd = DMatrix::<Complex64>::from_fn(2, 2, |i, j| h[(i, j)]);
    let hh = hd.kronecker(&hd);
    &hh * m * hh.adjoint()
}

fn re_trace(m: &DMatrix<Complex64>) -> f64 {
    m.trace().re
}

/// QFI block of a single basis sub-protocol, from the reduced states alone.
pub fn qfi_single_basis(probe: &ProbeTriple, basis: MeasurementBasis) -> FisherMatrix {
    let n = probe.n();
    let nf = n as f64;
    let h = basis.conjugator();
    let r1 = conj_sandwich(&h, rho1(probe.source()).matrix());
    let r2 = (n >= 2).then(|| conj_sandwich2(&h, rho2(probe.source()).expect("n >= 2").matrix()));

    let pauli: Vec<DMatrix<Complex64>> = paulis()
        .iter()
        .map(|p| DMatrix::from_fn(2, 2, |i, j| p[(i, j)]))
        .collect();

    let mut m = Matrix3::<f64>::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut val = 2.0 * nf * re_trace(&(&r1 * &pauli[a] * &pauli[b]));
            if let Some(r2) = &r2 {
                let kron = pauli[a].kronecker(&pauli[b]);
                val += 2.0 * nf * (nf - 1.0) * re_trace(&(r2 * kron));
            }
            let ma = re_trace(&(&r1 * &pauli[a]));
            let mb = re_trace(&(&r1 * &pauli[b]));
            val -= 2.0 * nf * nf * ma * mb;
            m[(a, b)] = val;
        }
    }
    let m = (m + m.transpose()) * 0.5;
    FisherMatrix::new(m, Frame::LocallyIndependent, FisherKind::Quantum)
}

/// Protocol QFI matrix from the aggregated reduced states
/// rho1_tot and rho2_tot; indexed (x, y, z).
pub fn qfi_three_basis(probe: &ProbeTriple) -> FisherMatrix {
    let n = probe.n();
    let nf = n as f64;
    let r1z = rho1(probe.source());
    let r2z = (n >= 2).then(|| rho2(probe.source()).expect("n >= 2"));

    let mut r1_tot = DMatrix::<Complex64>::zeros(2, 2);
    let mut r2_tot = DMatrix::<Complex64>::zeros(4, 4);
    let mut r1_each = Vec::with_capacity(3);
    for basis in MeasurementBasis::ALL {
        let h = basis.conjugator();
        let r1 = conj_sandwich(&h, r1z.matrix());
        r1_tot += &r1;
        r1_each.push(r1);
        if let Some(r2) = &r2z {
            r2_tot += conj_sandwich2(&h, r2.matrix());
        }
    }
    // aggregate must stay a trace-3 positive operator
    crate::fock::ReducedDensity::new(1, r1_tot.clone(), 3.0).expect("rho1 aggregate invariant");
    if n >= 2 {
        crate::fock::ReducedDensity::new(2, r2_tot.clone(), 3.0).expect("rho2 aggregate invariant");
    }

    let pauli: Vec<DMatrix<Complex64>> = paulis()
        .iter()
        .map(|p| DMatrix::from_fn(2, 2, |i, j| p[(i, j)]))
        .collect();

    let mut m = Matrix3::<f64>::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut val = 2.0 * nf * re_trace(&(&r1_tot * &pauli[a] * &pauli[b]));
            if n >= 2 {
                let kron = pauli[a].kronecker(&pauli[b]);
                val += 2.0 * nf * (nf - 1.0) * re_trace(&(&r2_tot * kron));
            }
            for r1k in &r1_each {
                let ma = re_trace(&(r1k * &pauli[a]));
                let mb = re_trace(&(r1k * &pauli[b]));
                val -= 2.0 * nf * nf * ma * mb;
            }
            m[(a, b)] = val;
        }
    }
    let m = (m + m.transpose()) * 0.5;
    FisherMatrix::new(m, Frame::LocallyIndependent, FisherKind::Quantum)
}

/// exp(-i theta sigma_axis) closed form.
fn pauli_rotation(axis: usize, theta: f64) -> Su2Matrix {
    let p = paulis()[axis];
    let (s, c) = theta.sin_cos();
    Su2Matrix::identity() * Complex64::new(c, 0.0) - p * Complex64::new(0.0, s)
}

fn oracle_pass(u_e: &Su2Matrix, amps: &DVector<Complex64>, n: u32, delta: f64) -> Matrix3<f64> {
    let mut total = Matrix3::<f64>::zeros();
    for basis in MeasurementBasis::ALL {
        let g = basis.conjugator();
        let psi0 = lift_su2(&(u_e * g), n) * amps;
        let mut dpsi: Vec<DVector<Complex64>> = Vec::with_capacity(3);
        for axis in 0..3 {
            // locally-independent displacement: right-multiply by
            // exp(-i delta sigma/sqrt2) before the basis preparation
            let rot_p = pauli_rotation(axis, delta / 2.0f64.sqrt());
            let rot_m = pauli_rotation(axis, -delta / 2.0f64.sqrt());
            let psi_p = lift_su2(&(u_e * rot_p * g), n) * amps;
            let psi_m = lift_su2(&(u_e * rot_m * g), n) * amps;
            dpsi.push((psi_p - psi_m) / Complex64::new(2.0 * delta, 0.0));
        }
        for a in 0..3 {
            for b in 0..3 {
                let overlap = dpsi[a].dotc(&dpsi[b]);
                let proj = dpsi[a].dotc(&psi0) * psi0.dotc(&dpsi[b]);
                total[(a, b)] += 4.0 * (overlap - proj).re;
            }
        }
    }
    (total + total.transpose()) * 0.5
}

/// Finite-difference QFI from evolved spin-j states; the independent route
/// against `qfi_three_basis`. The result is expansion-point independent,
/// which makes `e` a free cross-check knob. A step-doubling drift above
/// 1e-4 relative is reported as an error.
pub fn qfi_oracle(probe: &ProbeTriple, e: &EulerAngles) -> Result<FisherMatrix> {
    let n = probe.n();
    if n > tol::ORACLE_MAX {
        return Err(Error::ScaleGuard {
            got: n,
            limit: tol::ORACLE_MAX,
        });
    }
    let amps = DVector::from_column_slice(probe.source().amps());
    let u_e = euler_to_matrix(e);
    let fine = oracle_pass(&u_e, &amps, n, tol::FD_STEP);
    let coarse = oracle_pass(&u_e, &amps, n, 2.0 * tol::FD_STEP);
    let scale = fine.abs().max().max(1e-12);
    let drift = (fine - coarse).abs().max() / scale;
    if drift > tol::RICHARDSON_DRIFT {
        return Err(Error::DriftExceeded(drift));
    }
    Ok(FisherMatrix::new(
        fine,
        Frame::LocallyIndependent,
        FisherKind::Quantum,
    ))
}

/// Estimation strategies with closed-form optimal precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// One run prepares the probe in each of the three bases.
    ThreeBasis,
    /// The same N-particle probe state reused for every measurement.
    RepeatedSingleProbe,
    /// One entangled probe over all 3N particles per run.
    #[serde(rename = "single-probe-3n-entangled")]
    SingleProbe3nEntangled,
    /// Fock state |N,0> reference.
    FockBaseline,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::ThreeBasis,
        Protocol::RepeatedSingleProbe,
        Protocol::SingleProbe3nEntangled,
        Protocol::FockBaseline,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Protocol::ThreeBasis => "three-basis",
            Protocol::RepeatedSingleProbe => "repeated-single-probe",
            Protocol::SingleProbe3nEntangled => "single-probe-3n-entangled",
            Protocol::FockBaseline => "fock-baseline",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        Protocol::ALL
            .iter()
            .copied()
            .find(|p| p.tag() == tag)
            .ok_or_else(|| Error::UnknownProtocol(tag.to_string()))
    }
}

/// Best attainable tr of the inverse QFI for a protocol at photon number n.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundReport {
    pub protocol: Protocol,
    pub n: u32,
    pub value: f64,
}

pub fn optimal_bound(protocol: Protocol, n: u32) -> Result<BoundReport> {
    if n < 1 {
        return Err(Error::Order {
            required: 1,
            got: n,
        });
    }
    let nf = n as f64;
    let value = match protocol {
        Protocol::ThreeBasis => 3.0 / (2.0 * nf * (nf + 2.0)),
        Protocol::RepeatedSingleProbe => 9.0 / (2.0 * nf * (nf + 2.0)),
        Protocol::SingleProbe3nEntangled => 3.0 / (2.0 * nf * (3.0 * nf + 2.0)),
        Protocol::FockBaseline => 3.0 / (4.0 * nf),
    };
    Ok(BoundReport { protocol, n, value })
}

/// Result of the 2-design defining-relation check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoDesignReport {
    pub is_two_design: bool,
    pub residual: f64,
}

/// True iff (1/B) sum |s><s|^(x2) equals 1/4 + (1/12) sum sigma x sigma.
pub fn check_two_design(states: &[DVector<Complex64>]) -> TwoDesignReport {
    let b = states.len() as f64;
    let mut avg = DMatrix::<Complex64>::zeros(4, 4);
    for s in states {
        let t = s.kronecker(s);
        avg += &t * t.adjoint();
    }
    avg /= Complex64::new(b, 0.0);

    let mut target = DMatrix::<Complex64>::identity(4, 4) * Complex64::new(0.25, 0.0);
    for p in paulis() {
        let pd = DMatrix::<Complex64>::from_fn(2, 2, |i, j| p[(i, j)]);
        target += pd.kronecker(&pd) * Complex64::new(1.0 / 12.0, 0.0);
    }
    let mut residual: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            residual = residual.max((avg[(i, j)] - target[(i, j)]).norm());
        }
    }
    TwoDesignReport {
        is_two_design: residual <= tol::CONDITION,
        residual,
    }
}

/// The six Pauli eigenstates.
pub fn pauli_eigenbasis() -> Vec<DVector<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]),
        DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]),
        DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]),
        DVector::from_column_slice(&[Complex64::new(s, 0.0), Complex64::new(0.0, -s)]),
        DVector::from_column_slice(&[ONE, Complex64::new(0.0, 0.0)]),
        DVector::from_column_slice(&[Complex64::new(0.0, 0.0), ONE]),
    ]
}

/// The four tetrahedral states.
pub fn tetrahedral_basis() -> Vec<DVector<Complex64>> {
    let r3 = 1.0 / 3.0f64.sqrt();
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r6 = 1.0 / 6.0f64.sqrt();
    vec![
        DVector::from_column_slice(&[ONE, Complex64::new(0.0, 0.0)]),
        DVector::from_column_slice(&[Complex64::new(r3, 0.0), Complex64::new(-r2, -r6)]),
        DVector::from_column_slice(&[Complex64::new(r3, 0.0), Complex64::new(r2, -r6)]),
        DVector::from_column_slice(&[
            Complex64::new(r3, 0.0),
            Complex64::new(0.0, (2.0f64 / 3.0).sqrt()),
        ]),
    ]
}

/// Complex-Gaussian amplitudes, normalized: uniform on the state sphere.
pub fn random_state<R: Rng + ?Sized>(n: u32, rng: &mut R) -> FockState {
    loop {
        let amps: Vec<Complex64> = (0..=n)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        if let Ok(s) = make_state(&StateFamily::Custom { amps }) {
            return s;
        }
    }
}

/// The two-particle reduced matrix of a three-photon state, written
/// directly from the amplitudes (the closed form used to prove N=3
/// uniqueness). Basis (uu, ud, du, dd).
pub fn b2_two_particle_matrix(amps: &[Complex64]) -> DMatrix<Complex64> {
    assert_eq!(amps.len(), 4, "three-photon state needs 4 amplitudes");
    let (c0, c1, c2, c3) = (amps[0], amps[1], amps[2], amps[3]);
    let r3 = 3.0f64.sqrt();
    let third = 1.0 / 3.0;

    let d_uu = c3 * c3.conj() + c2 * c2.conj() * third;
    let d_mid = (c1 * c1.conj() + c2 * c2.conj()) * third;
    let d_dd = c0 * c0.conj() + c1 * c1.conj() * third;
    // <uu|rho|ud>: pairs one step apart in excitation number
    let uu_ud = c3 * c2.conj() / r3 + c1.conj() * c2 * third;
    // <uu|rho|dd>: two steps apart
    let uu_dd = c3 * c1.conj() / r3 + c2 * c0.conj() / r3;
    // <ud|rho|dd>
    let ud_dd = c1 * c0.conj() / r3 + c1.conj() * c2 * third;

    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    m[(0, 0)] = d_uu;
    m[(1, 1)] = d_mid;
    m[(1, 2)] = d_mid;
    m[(2, 1)] = d_mid;
    m[(2, 2)] = d_mid;
    m[(3, 3)] = d_dd;
    for i in 1..=2 {
        m[(0, i)] = uu_ud;
        m[(i, 0)] = uu_ud.conj();
        m[(i, 3)] = ud_dd;
        m[(3, i)] = ud_dd.conj();
    }
    m[(0, 3)] = uu_dd;
    m[(3, 0)] = uu_dd.conj();
    m
}

/// Fits a 4x4 matrix to the optimal-state form
/// diag structure (1/4+czz, 1/4-czz block, 1/4+czz) and reports the
/// largest deviation.
pub fn b1_form_fit(m: &DMatrix<Complex64>) -> (f64, f64) {
    let czz = m[(0, 0)].re - 0.25;
    let lo = Complex64::new(0.25 - czz, 0.0);
    let hi = Complex64::new(0.25 + czz, 0.0);
    let mut target = DMatrix::<Complex64>::zeros(4, 4);
    target[(0, 0)] = hi;
    target[(3, 3)] = hi;
    for i in 1..=2 {
        for j in 1..=2 {
            target[(i, j)] = lo;
        }
    }
    let mut residual: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            residual = residual.max((m[(i, j)] - target[(i, j)]).norm());
        }
    }
    (residual, czz)
}

/// One state that passed the optimality check during a search.
#[derive(Debug, Clone, Serialize)]
pub struct HitRecord {
    /// Amplitudes as (re, im) pairs.
    pub amps: Vec<(f64, f64)>,
    pub matches_family: bool,
    pub b1_residual: f64,
}

/// Outcome of the random uniqueness search at N = 2 or 3.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub n: u32,
    pub trials: u64,
    pub seed: u64,
    /// Random states that satisfied the optimality conditions.
    pub hits: Vec<HitRecord>,
    /// Every random hit matched the known unique optimal state.
    pub hits_match_family: bool,
    /// Family members with randomized phases pass and are recognized.
    pub family_probes_pass: bool,
    /// Known suboptimal states are rejected.
    pub negative_probes_rejected: bool,
    /// Largest optimal-form residual over all verified probes.
    pub max_b1_residual: f64,
    pub passed: bool,
}

/// The known unique optimal state at this n, up to the stated phase freedom.
fn matches_unique_family(n: u32, amps: &[Complex64]) -> bool {
    let t = 1e-6;
    match n {
        // |1,1> up to global phase
        2 => (amps[1].norm() - 1.0).abs() < t && amps[0].norm() < t && amps[2].norm() < t,
        // NOON with independent phases on c_0, c_3
        3 => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            (amps[0].norm() - r).abs() < t
                && (amps[3].norm() - r).abs() < t
                && amps[1].norm() < t
                && amps[2].norm() < t
        }
        _ => false,
    }
}

/// Verifies one optimal candidate: family membership plus the reduced
/// two-particle matrix against the optimal closed form. For n=3 the
/// closed-form amplitude matrix is cross-checked against the
/// ladder-algebra route as well.
fn verify_hit(state: &FockState) -> Result<HitRecord> {
    let n = state.n();
    let r2 = rho2(state)?;
    let (mut b1_res, _czz) = b1_form_fit(r2.matrix());
    if n == 3 {
        let b2 = b2_two_particle_matrix(state.amps());
        let mut cross: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                cross = cross.max((b2[(i, j)] - r2.matrix()[(i, j)]).norm());
            }
        }
        b1_res = b1_res.max(cross);
    }
    Ok(HitRecord {
        amps: state.amps().iter().map(|c| (c.re, c.im)).collect(),
        matches_family: matches_unique_family(n, state.amps()),
        b1_residual: b1_res,
    })
}

/// Samples random normalized amplitude vectors and verifies that every
/// state passing the optimality conditions is the known unique optimal
/// state; deterministic family and counterexample probes run alongside.
pub fn uniqueness_search(n: u32, trials: u64, seed: u64) -> Result<UniquenessReport> {
    if n != 2 && n != 3 {
        return Err(Error::FamilyConstraint(format!(
            "uniqueness search covers n = 2 or 3, got {n}"
        )));
    }
    let mut hits = Vec::new();
    for trial in 0..trials {
        let mut rng = crate::trial_rng(seed, trial);
        let state = random_state(n, &mut rng);
        if check_optimality(&state)?.optimal {
            hits.push(verify_hit(&state)?);
        }
    }
    let hits_match_family = hits.iter().all(|h| h.matches_family);

    // family members dressed with random phases must pass and verify
    let mut family_probes_pass = true;
    let mut max_b1_residual: f64 = hits.iter().map(|h| h.b1_residual).fold(0.0, f64::max);
    let mut phase_rng = crate::trial_rng(seed, u64::MAX);
    for _ in 0..16 {
        let phase = |rng: &mut rand_chacha::ChaCha8Rng| {
            Complex64::from_polar(
                1.0,
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
        };
        let amps = match n {
            2 => vec![
                Complex64::new(0.0, 0.0),
                phase(&mut phase_rng),
                Complex64::new(0.0, 0.0),
            ],
            _ => {
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                vec![
                    r * phase(&mut phase_rng),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    r * phase(&mut phase_rng),
                ]
            }
        };
        let state = make_state(&StateFamily::Custom { amps })?;
        let ok = check_optimality(&state)?.optimal;
        if !ok {
            family_probes_pass = false;
            continue;
        }
        let rec = verify_hit(&state)?;
        max_b1_residual = max_b1_residual.max(rec.b1_residual);
        if !rec.matches_family || rec.b1_residual > tol::ORACLE {
            family_probes_pass = false;
        }
    }

    // known suboptimal states must be rejected
    let negatives: Vec<FockState> = match n {
        2 => vec![
            make_state(&StateFamily::Noon { n: 2 })?,
            make_state(&StateFamily::YurkeEven { n: 2 })?,
            make_state(&StateFamily::Fock { m: 2, n: 2 })?,
        ],
        _ => vec![
            make_state(&StateFamily::YurkeOdd { n: 3 })?,
            make_state(&StateFamily::Fock { m: 3, n: 3 })?,
            // slightly broken NOON: leaks amplitude into c_1
            make_state(&StateFamily::Custom {
                amps: vec![
                    Complex64::new(0.7, 0.0),
                    Complex64::new(1e-3, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new((1.0f64 - 0.49 - 1e-6).sqrt(), 0.0),
                ],
            })?,
        ],
    };
    let mut negative_probes_rejected = true;
    for s in &negatives {
        if check_optimality(s)?.optimal {
            negative_probes_rejected = false;
        }
    }

    let passed = hits_match_family && family_probes_pass && negative_probes_rejected;
    Ok(UniquenessReport {
        n,
        trials,
        seed,
        hits,
        hits_match_family,
        family_probes_pass,
        negative_probes_rejected,
        max_b1_residual,
        passed,
    })
}
