//! Two-mode N-photon pure states: ladder-operator expectations, one- and
//! two-particle reduced density matrices in the spin picture, and the
//! saturation / optimality condition checks.
//!
//! Amplitudes are indexed by the photon count M in the first mode, so
//! `amps[M]` multiplies |M, N-M>. The spin embedding sends |1,0> to up and
//! |0,1> to down; the two-spin basis is ordered (uu, ud, du, dd) and the
//! photonic |1,1> component populates the symmetric combination (ud+du)/sqrt2.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{tol, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normalized N-photon two-mode pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n: u32,
    amps: Vec<Complex64>,
}

impl FockState {
    /// `amps[M]` is the coefficient of |M, n-M>; must be length n+1 and
    /// normalized within 1e-12.
    pub fn new(n: u32, amps: Vec<Complex64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::FamilyConstraint("photon number must be >= 1".into()));
        }
        if amps.len() != n as usize + 1 {
            return Err(Error::FamilyConstraint(format!(
                "need {} amplitudes for n = {n}, got {}",
                n + 1,
                amps.len()
            )));
        }
        let norm_sq: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let dev = (norm_sq.sqrt() - 1.0).abs();
        if dev > tol::NORM {
            return Err(Error::Normalization(dev));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, m: u32) -> Complex64 {
        self.amps[m as usize]
    }

    /// Doubled spin quantum number 2j = n of the Schwinger image.
    pub fn two_j(&self) -> u32 {
        self.n
    }
}

/// Named probe families plus free-form amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    Noon { n: u32 },
    HollandBurnett { n: u32 },
    Fock { m: u32, n: u32 },
    YurkeOdd { n: u32 },
    YurkeEven { n: u32 },
    Custom { amps: Vec<Complex64> },
}

impl StateFamily {
    pub fn n(&self) -> u32 {
        match self {
            StateFamily::Noon { n }
            | StateFamily::HollandBurnett { n }
            | StateFamily::Fock { n, .. }
            | StateFamily::YurkeOdd { n }
            | StateFamily::YurkeEven { n } => *n,
            StateFamily::Custom { amps } => (amps.len() as u32).saturating_sub(1),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            StateFamily::Noon { n } => format!("noon:{n}"),
            StateFamily::HollandBurnett { n } => format!("hb:{n}"),
            StateFamily::Fock { m, n } => format!("fock:{m},{n}"),
            StateFamily::YurkeOdd { n } | StateFamily::YurkeEven { n } => {
                format!("yurke:{n}")
            }
            StateFamily::Custom { .. } => "custom".into(),
        }
    }

    /// Mode occupation (M, N) for |M, N-M> probes, where the product-state
    /// precision fast path applies.
    pub fn product_mode_occupation(&self) -> Option<(u32, u32)> {
        match self {
            StateFamily::Fock { m, n } => Some((*m, *n)),
            StateFamily::HollandBurnett { n } => Some((n / 2, *n)),
            _ => None,
        }
    }

    /// CLI grammar: `noon:N`, `hb:N`, `fock:M,N`, `yurke:N`,
    /// `custom:c0,c1,...,cN` with complex literals like `0.3-0.7j`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state spec `{spec}` missing `:`")))?;
        let parse_n = |s: &str| -> Result<u32> {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad photon number `{s}` in `{spec}`")))
        };
        match kind {
            "noon" => Ok(StateFamily::Noon { n: parse_n(rest)? }),
            "hb" => Ok(StateFamily::HollandBurnett { n: parse_n(rest)? }),
            "fock" => {
                let (m, n) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("fock spec needs `M,N` in `{spec}`")))?;
                Ok(StateFamily::Fock {
                    m: parse_n(m)?,
                    n: parse_n(n)?,
                })
            }
            "yurke" => {
                let n = parse_n(rest)?;
                if n % 2 == 1 {
                    Ok(StateFamily::YurkeOdd { n })
                } else {
                    Ok(StateFamily::YurkeEven { n })
                }
            }
            "custom" => {
                let amps = rest
                    .split(',')
                    .map(parse_complex)
                    .collect::<Result<Vec<_>>>()?;
                if amps.len() < 2 {
                    return Err(Error::Parse(format!(
                        "custom spec needs at least 2 amplitudes in `{spec}`"
                    )));
                }
                Ok(StateFamily::Custom { amps })
            }
            other => Err(Error::Parse(format!("unknown state family `{other}`"))),
        }
    }
}

/// Complex literal `re`, `imj`, or `re(+/-)imj`, e.g. `-0.3+0.2j`.
fn parse_complex(token: &str) -> Result<Complex64> {
    let t = token.trim();
    let bad = || Error::Parse(format!("bad complex literal `{token}`"));
    if let Some(body) = t.strip_suffix(['j', 'J']) {
        // split at the sign separating re from im, skipping a leading sign
        // and exponent signs
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'e'
                && bytes[i - 1] != b'E'
            {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                let im: f64 = match &body[i..] {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse().map_err(|_| bad())?,
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse().map_err(|_| bad())?,
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Builds the normalized amplitudes of a named family. Custom amplitudes
/// are normalized here as well.
pub fn make_state(family: &StateFamily) -> Result<FockState> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match family {
        StateFamily::Noon { n } => {
            let n = *n;
            if n < 1 {
                return Err(Error::FamilyConstraint("noon requires n >= 1".into()));
            }
            let mut amps = vec![ZERO; n as usize + 1];
            amps[0] = inv_sqrt2;
            amps[n as usize] = inv_sqrt2;
            FockState::new(n, amps)
        }
        StateFamily::HollandBurnett { n } => {
            let n = *n;
            if n < 2 || n % 2 != 0 {
                return Err(Error::FamilyConstraint(format!(
                    "holland-burnett requires even n >= 2, got {n}"
                )));
            }
            let mut amps = vec![ZERO; n as usize + 1];
            amps[n as usize / 2] = one;
            FockState::new(n, amps)
        }
        StateFamily::Fock { m, n } => {
            let (m, n) = (*m, *n);
            if m > n {
                return Err(Error::FamilyConstraint(format!(
                    "fock occupation M = {m} exceeds n = {n}"
                )));
            }
            let mut amps = vec![ZERO; n as usize + 1];
            amps[m as usize] = one;
            FockState::new(n, amps)
        }
        StateFamily::YurkeOdd { n } => {
            let n = *n;
            if n % 2 != 1 {
                return Err(Error::FamilyConstraint(format!(
                    "odd Yurke state requires odd n, got {n}"
                )));
            }
            let mut amps = vec![ZERO; n as usize + 1];
            amps[n as usize / 2 + 1] = inv_sqrt2;
            amps[(n as usize - 1) / 2] = inv_sqrt2;
            FockState::new(n, amps)
        }
        StateFamily::YurkeEven { n } => {
            let n = *n;
            if n < 2 || n % 2 != 0 {
                return Err(Error::FamilyConstraint(format!(
                    "even Yurke state requires even n >= 2, got {n}"
                )));
            }
            let mut amps = vec![ZERO; n as usize + 1];
            amps[n as usize / 2] = inv_sqrt2;
            amps[n as usize / 2 + 1] = inv_sqrt2;
            FockState::new(n, amps)
        }
        StateFamily::Custom { amps } => {
            let n = amps.len() as u32 - 1;
            let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-300 {
                return Err(Error::Normalization(1.0));
            }
            let scaled = amps.iter().map(|c| c / norm).collect();
            FockState::new(n, scaled)
        }
    }
}

/// Ladder-operator expectations entering the reduced density matrices and
/// the saturation / optimality conditions. All are exact sums over the
/// amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct ModeExpectations {
    /// <a'a>
    pub na: f64,
    /// <b'b>
    pub nb: f64,
    /// <a'b>
    pub ab: Complex64,
    /// <(a'a)^2>
    pub na_sq: f64,
    /// <(b'b)^2>
    pub nb_sq: f64,
    /// <a'a' b b>
    pub aabb: Complex64,
    /// <a'b (b'b - 1)>
    pub ab_nb: Complex64,
    /// <a'b a'a>
    pub ab_na: Complex64,
    /// <a'a (a'a - 1)>
    pub na_pair: f64,
    /// <b'b (b'b - 1)>
    pub nb_pair: f64,
    /// <a'a b'b>
    pub nanb: f64,
}

pub fn mode_expectations(state: &FockState) -> ModeExpectations {
    let n = state.n() as usize;
    let nf = state.n() as f64;
    let c = state.amps();

    let mut e = ModeExpectations {
        na: 0.0,
        nb: 0.0,
        ab: ZERO,
        na_sq: 0.0,
        nb_sq: 0.0,
        aabb: ZERO,
        ab_nb: ZERO,
        ab_na: ZERO,
        na_pair: 0.0,
        nb_pair: 0.0,
        nanb: 0.0,
    };

    for m in 0..=n {
        let p = c[m].norm_sqr();
        let mf = m as f64;
        let bf = nf - mf;
        e.na += p * mf;
        e.nb += p * bf;
        e.na_sq += p * mf * mf;
        e.nb_sq += p * bf * bf;
        e.na_pair += p * mf * (mf - 1.0);
        e.nb_pair += p * bf * (bf - 1.0);
        e.nanb += p * mf * bf;
    }
    // single-photon transfer terms couple c_M and c_{M+1}
    for m in 0..n {
        let mf = m as f64;
        let bf = nf - mf;
        let root = (bf * (mf + 1.0)).sqrt();
        let pair = c[m + 1].conj() * c[m];
        e.ab += pair * root;
        e.ab_nb += pair * root * (bf - 1.0);
        e.ab_na += pair * root * mf;
    }
    // two-photon transfer couples c_M and c_{M+2}
    for m in 0..n.saturating_sub(1) {
        let mf = m as f64;
        let bf = nf - mf;
        let root = (bf * (bf - 1.0) * (mf + 1.0) * (mf + 2.0)).sqrt();
        e.aabb += c[m + 2].conj() * c[m] * root;
    }
    e
}

/// One- or two-particle reduced density matrix in the spin picture.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    order: u8,
    matrix: DMatrix<Complex64>,
    trace_norm: f64,
}

impl ReducedDensity {
    /// Validates hermiticity, positivity, and the expected trace.
    pub fn new(order: u8, matrix: DMatrix<Complex64>, trace_norm: f64) -> Result<Self> {
        let dim = 1usize << order;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::FamilyConstraint(format!(
                "order-{order} reduced state must be {dim}x{dim}"
            )));
        }
        let herm = (&matrix - matrix.adjoint()).norm();
        if herm > tol::DENSITY * dim as f64 {
            return Err(Error::FamilyConstraint(format!(
                "not Hermitian: residual {herm:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - trace_norm).abs() > tol::DENSITY || tr.im.abs() > tol::DENSITY {
            return Err(Error::FamilyConstraint(format!(
                "trace {tr} differs from expected {trace_norm}"
            )));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol::PSD_SLACK {
            return Err(Error::FamilyConstraint(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            order,
            matrix,
            trace_norm,
        })
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace_norm(&self) -> f64 {
        self.trace_norm
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// One-particle reduced state: 1/N times the mode-occupation and
/// first-order-coherence block.
pub fn rho1(state: &FockState) -> ReducedDensity {
    let e = mode_expectations(state);
    let nf = state.n() as f64;
    let mut m = DMatrix::<Complex64>::zeros(2, 2);
    m[(0, 0)] = Complex64::new(e.na / nf, 0.0);
    m[(1, 1)] = Complex64::new(e.nb / nf, 0.0);
    // the |1,0><0,1| block carries <ab'> = conj(<a'b>)
    m[(0, 1)] = e.ab.conj() / nf;
    m[(1, 0)] = e.ab / nf;
    ReducedDensity::new(1, m, 1.0).expect("rho1 construction preserves invariants")
}

/// Two-particle reduced state, 4x4 in the ordered two-spin basis
/// (uu, ud, du, dd). The |1,1> weight splits evenly across the symmetric
/// cross block so the matrix is swap-symmetric.
pub fn rho2(state: &FockState) -> Result<ReducedDensity> {
    let n = state.n();
    if n < 2 {
        return Err(Error::Order {
            required: 2,
            got: n,
        });
    }
    let e = mode_expectations(state);
    let nf = n as f64;
    let denom = nf * (nf - 1.0);

    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    m[(0, 0)] = Complex64::new(e.na_pair / denom, 0.0);
    m[(3, 3)] = Complex64::new(e.nb_pair / denom, 0.0);
    for i in 1..=2 {
        for j in 1..=2 {
            m[(i, j)] = Complex64::new(e.nanb / denom, 0.0);
        }
    }
    // corner coherence |dd><uu| carries <a'a'bb>
    m[(3, 0)] = e.aabb / denom;
    m[(0, 3)] = e.aabb.conj() / denom;
    // |dd><ud~du| coherences carry <a'b(b'b-1)>
    for i in 1..=2 {
        m[(3, i)] = e.ab_nb / denom;
        m[(i, 3)] = e.ab_nb.conj() / denom;
    }
    // |ud~du><uu| coherences carry <a'b a'a>
    for i in 1..=2 {
        m[(i, 0)] = e.ab_na / denom;
        m[(0, i)] = e.ab_na.conj() / denom;
    }
    ReducedDensity::new(2, m, 1.0)
}

/// Residuals of the Cramer-Rao saturation conditions
/// <a'a> = N/2 and <a'b> = 0.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SaturationReport {
    pub saturates: bool,
    pub intensity_residual: f64,
    pub coherence_residual: f64,
}

pub fn check_saturation(state: &FockState) -> SaturationReport {
    let e = mode_expectations(state);
    let half_n = state.n() as f64 / 2.0;
    let intensity = (e.na - half_n).abs();
    let coherence = e.ab.norm();
    SaturationReport {
        saturates: intensity <= tol::CONDITION && coherence <= tol::CONDITION,
        intensity_residual: intensity,
        coherence_residual: coherence,
    }
}

/// Residuals of the five optimality condition groups; `optimal` is true
/// when all sit below 1e-10.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OptimalityReport {
    pub optimal: bool,
    /// max of |<a'a> - N/2| and |<b'b> - N/2|
    pub intensity_residual: f64,
    /// |<(a'a)^2> - <(b'b)^2>|
    pub second_moment_residual: f64,
    /// |<a'b>|
    pub coherence_residual: f64,
    /// |<a'a'ab>|
    pub raising_coherence_residual: f64,
    /// |<a'a'bb>|
    pub pair_coherence_residual: f64,
    /// |<a'b'bb>|
    pub lowering_coherence_residual: f64,
}

pub fn check_optimality(state: &FockState) -> Result<OptimalityReport> {
    let n = state.n();
    if n < 2 {
        return Err(Error::Order {
            required: 2,
            got: n,
        });
    }
    let e = mode_expectations(state);
    let half_n = n as f64 / 2.0;
    let report = OptimalityReport {
        optimal: false,
        intensity_residual: (e.na - half_n).abs().max((e.nb - half_n).abs()),
        second_moment_residual: (e.na_sq - e.nb_sq).abs(),
        coherence_residual: e.ab.norm(),
        raising_coherence_residual: e.ab_na.norm(),
        pair_coherence_residual: e.aabb.norm(),
        lowering_coherence_residual: e.ab_nb.norm(),
    };
    let optimal = [
        report.intensity_residual,
        report.second_moment_residual,
        report.coherence_residual,
        report.raising_coherence_residual,
        report.pair_coherence_residual,
        report.lowering_coherence_residual,
    ]
    .iter()
    .all(|r| *r <= tol::CONDITION);
    Ok(OptimalityReport { optimal, ..report })
}

/// Expands the state over the full 2^N computational spin basis. Bit i of
/// the index gives the spin of particle i, with 0 = up; a string with M
/// up spins carries c_M / sqrt(C(N,M)).
pub fn dicke_expand(state: &FockState) -> Result<Vec<Complex64>> {
    let n = state.n();
    if n > tol::DICKE_MAX {
        return Err(Error::ScaleGuard {
            got: n,
            limit: tol::DICKE_MAX,
        });
    }
    let nn = n as usize;
    let mut binom = vec![1.0f64; nn + 1];
    for k in 1..=nn {
        binom[k] = binom[k - 1] * (nn - k + 1) as f64 / k as f64;
    }
    let dim = 1usize << nn;
    let mut out = vec![ZERO; dim];
    for (idx, slot) in out.iter_mut().enumerate() {
        let ups = nn - idx.count_ones() as usize;
        *slot = state.amp(ups as u32) / Complex64::new(binom[ups].sqrt(), 0.0);
    }
    Ok(out)
}
