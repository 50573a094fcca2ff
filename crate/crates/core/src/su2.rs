//! SU(2) parameterizations and conversions, Wigner d-matrices, Haar-random
//! sampling, the polarisation-basis conjugation maps, and the Jacobian
//! machinery connecting Euler angles to locally-independent parameters.
//!
//! Conventions, fixed once and used everywhere:
//!   * Euler decomposition `U = exp(i psi1 Jz) exp(i psi2 Jy) exp(i psi3 Jz)`
//!     with the `+i` sign, so the 2x2 representation is
//!     `exp(i psi1 sz/2) exp(i psi2 sy/2) exp(i psi3 sz/2)`.
//!   * `d^j_{md,m}(beta) = <j,md| exp(+i beta Jy) |j,m>`.
//!   * Quaternion layout `[[a+ib, c+id], [-c+id, a-ib]]`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{tol, Error, Result};

pub type Su2Matrix = Matrix2<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Euler angles of the z-y-z decomposition, in radians.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EulerAngles {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
}

impl EulerAngles {
    pub fn new(psi1: f64, psi2: f64, psi3: f64) -> Self {
        Self { psi1, psi2, psi3 }
    }

    pub const IDENTITY: EulerAngles = EulerAngles {
        psi1: 0.0,
        psi2: 0.0,
        psi3: 0.0,
    };

    /// Canonical-range representative of the same group element:
    /// psi2 in [0, pi], psi1 and psi3 in (-2pi, 2pi].
    pub fn canonicalize(&self) -> Self {
        matrix_to_euler(&euler_to_matrix(self)).expect("round trip stays SU(2)")
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.psi1, self.psi2, self.psi3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// The {a,b,c,d} parameterization `[[a+ib, c+id], [-c+id, a-ib]]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuaternionParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl QuaternionParams {
    /// Accepts components already on the unit sphere.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let q = Self { a, b, c, d };
        let dev = (q.norm() - 1.0).abs();
        if dev > tol::NORM {
            return Err(Error::Normalization(dev));
        }
        Ok(q)
    }

    /// Projects arbitrary components onto the unit sphere.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let n = (a * a + b * b + c * c + d * d).sqrt();
        if n < 1e-300 {
            return Err(Error::Normalization(1.0));
        }
        Ok(Self {
            a: a / n,
            b: b / n,
            c: c / n,
            d: d / n,
        })
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn components(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Smallest |component|; zeros here locate precision divergences.
    pub fn min_abs_component(&self) -> f64 {
        self.components()
            .iter()
            .map(|x| x.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Unitary with the best product-state precision: a=b=c=d=1/2.
    pub const U_MIN: QuaternionParams = QuaternionParams {
        a: 0.5,
        b: 0.5,
        c: 0.5,
        d: 0.5,
    };
}

/// Detection bases of the three-basis protocol. HV maps to the spin z basis,
/// DA to x and RL to y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MeasurementBasis {
    Hv,
    Da,
    Rl,
}

impl MeasurementBasis {
    pub const ALL: [MeasurementBasis; 3] = [
        MeasurementBasis::Hv,
        MeasurementBasis::Da,
        MeasurementBasis::Rl,
    ];

    /// Single-particle map from the z basis into this basis; identity for HV.
    pub fn conjugator(&self) -> Su2Matrix {
        match self {
            MeasurementBasis::Hv => Su2Matrix::identity(),
            MeasurementBasis::Da => h_da(),
            MeasurementBasis::Rl => h_rl(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MeasurementBasis::Hv => "HV",
            MeasurementBasis::Da => "DA",
            MeasurementBasis::Rl => "RL",
        }
    }
}

pub fn pauli_x() -> Su2Matrix {
    Su2Matrix::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Su2Matrix {
    Su2Matrix::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Su2Matrix {
    Su2Matrix::new(ONE, ZERO, ZERO, -ONE)
}

pub fn paulis() -> [Su2Matrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `(1/sqrt2) [[1,1],[1,-1]]`: carries the z basis to the x (DA) basis.
pub fn h_da() -> Su2Matrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Su2Matrix::new(s, s, s, -s)
}

/// `(1/sqrt2) [[1,1],[i,-i]]`: carries the z basis to the y (RL) basis.
pub fn h_rl() -> Su2Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Su2Matrix::new(
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(0.0, s),
        Complex64::new(0.0, -s),
    )
}

/// exp(i psi sz / 2)
pub(crate) fn z_rotation(psi: f64) -> Su2Matrix {
    let half = 0.5 * psi;
    Su2Matrix::new(
        Complex64::from_polar(1.0, half),
        ZERO,
        ZERO,
        Complex64::from_polar(1.0, -half),
    )
}

/// exp(i psi sy / 2)
pub(crate) fn y_rotation(psi: f64) -> Su2Matrix {
    let (s, c) = (0.5 * psi).sin_cos();
    Su2Matrix::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    )
}

/// Product of the three Euler exponentials.
pub fn euler_to_matrix(e: &EulerAngles) -> Su2Matrix {
    z_rotation(e.psi1) * y_rotation(e.psi2) * z_rotation(e.psi3)
}

fn unitarity_residual(m: &Su2Matrix) -> f64 {
    let prod = m.adjoint() * m;
    let mut r: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expect = if i == j { ONE } else { ZERO };
            r = r.max((prod[(i, j)] - expect).norm());
        }
    }
    r
}

fn check_su2(m: &Su2Matrix) -> Result<()> {
    let ur = unitarity_residual(m);
    if ur > tol::SU2 {
        return Err(Error::NotSu2(format!("unitarity residual {ur:.3e}")));
    }
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let dr = (det - ONE).norm();
    if dr > tol::SU2 {
        return Err(Error::NotSu2(format!("det residual {dr:.3e}")));
    }
    Ok(())
}

/// Extracts canonical Euler angles. At gimbal points (psi2 near 0 or pi)
/// all phase goes to psi1 and psi3 = 0.
pub fn matrix_to_euler(m: &Su2Matrix) -> Result<EulerAngles> {
    check_su2(m)?;
    let m00 = m[(0, 0)];
    let m01 = m[(0, 1)];
    let c2 = m00.norm();
    let s2 = m01.norm();
    let psi2 = 2.0 * s2.atan2(c2);
    if s2 < tol::GIMBAL {
        return Ok(EulerAngles::new(2.0 * m00.arg(), psi2, 0.0));
    }
    if c2 < tol::GIMBAL {
        return Ok(EulerAngles::new(2.0 * m01.arg(), psi2, 0.0));
    }
    let sum = 2.0 * m00.arg();
    let diff = 2.0 * m01.arg();
    let mut psi1 = 0.5 * (sum + diff);
    let mut psi3 = 0.5 * (sum - diff);
    // (psi1, psi3) -> (psi1 - 4pi, psi3) leaves the matrix unchanged.
    if psi1 >= 2.0 * PI {
        psi1 -= 4.0 * PI;
    }
    if psi3 >= 2.0 * PI {
        psi3 -= 4.0 * PI;
    }
    Ok(EulerAngles::new(psi1, psi2, psi3))
}

pub fn quaternion_to_matrix(q: &QuaternionParams) -> Su2Matrix {
    Su2Matrix::new(
        Complex64::new(q.a, q.b),
        Complex64::new(q.c, q.d),
        Complex64::new(-q.c, q.d),
        Complex64::new(q.a, -q.b),
    )
}

pub fn matrix_to_quaternion(m: &Su2Matrix) -> Result<QuaternionParams> {
    check_su2(m)?;
    QuaternionParams::new(m[(0, 0)].re, m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im)
}

pub fn quaternion_to_euler(q: &QuaternionParams) -> EulerAngles {
    matrix_to_euler(&quaternion_to_matrix(q)).expect("unit quaternion is SU(2)")
}

/// Haar-uniform unit quaternion: four standard normals, normalized.
pub fn haar_random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> QuaternionParams {
    loop {
        let v: [f64; 4] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        if let Ok(q) = QuaternionParams::normalized(v[0], v[1], v[2], v[3]) {
            return q;
        }
    }
}

/// Haar-distributed SU(2) matrix; deterministic under a fixed-seed rng.
pub fn haar_random<R: Rng + ?Sized>(rng: &mut R) -> Su2Matrix {
    quaternion_to_matrix(&haar_random_quaternion(rng))
}

/// h^dag U h for the basis conjugator h; stays in SU(2) exactly.
pub fn conjugated_matrix(m: &Su2Matrix, basis: MeasurementBasis) -> Su2Matrix {
    let h = basis.conjugator();
    h.adjoint() * m * h
}

/// Euler angles psi' (DA) or psi'' (RL) with
/// `euler_to_matrix(psi') = h^dag U(psi) h`; HV returns the canonical form.
pub fn basis_conjugate(e: &EulerAngles, basis: MeasurementBasis) -> EulerAngles {
    let m = conjugated_matrix(&euler_to_matrix(e), basis);
    matrix_to_euler(&m).expect("conjugation preserves SU(2)")
}

/// Jy for spin j = two_j/2 in the ascending-m ladder basis.
pub fn jy_matrix(two_j: u32) -> DMatrix<Complex64> {
    let dim = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        // raising coefficient from m = k - j to m + 1
        let mm = k as f64 - j;
        let c = (j * (j + 1.0) - mm * (mm + 1.0)).sqrt();
        // Jy = (J+ - J-)/(2i)
        m[(k + 1, k)] = Complex64::new(0.0, -0.5 * c);
        m[(k, k + 1)] = Complex64::new(0.0, 0.5 * c);
    }
    m
}

type JyEigen = Arc<(DMatrix<Complex64>, DVector<f64>)>;

fn jy_eigen(two_j: u32) -> JyEigen {
    static CACHE: OnceLock<Mutex<HashMap<u32, JyEigen>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jy eigen cache poisoned");
    guard
        .entry(two_j)
        .or_insert_with(|| {
            let eig = jy_matrix(two_j).symmetric_eigen();
            Arc::new((eig.eigenvectors, eig.eigenvalues))
        })
        .clone()
}

/// Full d-matrix `exp(+i beta Jy)` for spin j = two_j/2, indexed by
/// ascending m (row = m_d + j, column = m + j). Real orthogonal.
pub fn wigner_d_matrix(two_j: u32, beta: f64) -> DMatrix<f64> {
    let eig = jy_eigen(two_j);
    let (vecs, vals) = (&eig.0, &eig.1);
    let dim = two_j as usize + 1;
    let mut scaled = vecs.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        let phase = Complex64::from_polar(1.0, beta * vals[k]);
        for x in col.iter_mut() {
            *x *= phase;
        }
    }
    let full = scaled * vecs.adjoint();
    DMatrix::from_fn(dim, dim, |r, c| full[(r, c)].re)
}

/// Single element d^j_{md,m}(beta); quantum numbers passed doubled so
/// half-integers stay exact.
pub fn wigner_d(two_j: u32, two_md: i32, two_m: i32, beta: f64) -> Result<f64> {
    let j = two_j as i32;
    for two_q in [two_md, two_m] {
        if two_q.abs() > j || (two_q - j).rem_euclid(2) != 0 {
            return Err(Error::Lattice(two_j));
        }
    }
    let d = wigner_d_matrix(two_j, beta);
    let row = ((two_md + j) / 2) as usize;
    let col = ((two_m + j) / 2) as usize;
    Ok(d[(row, col)])
}

/// Exact (n+1)-dimensional representation of a 2x2 matrix acting on n
/// photons across two modes, in the basis |M, n-M> with M ascending.
/// Columns are the images of the basis states.
pub fn lift_su2(m: &Su2Matrix, n: u32) -> DMatrix<Complex64> {
    assert!(
        n <= tol::LIFT_MAX,
        "lift_su2 capped at n = {}",
        tol::LIFT_MAX
    );
    let nn = n as usize;
    let dim = nn + 1;
    let alpha = m[(0, 0)];
    let beta = m[(1, 0)];
    let gamma = m[(0, 1)];
    let delta = m[(1, 1)];

    let mut fact = vec![1.0f64; dim];
    for k in 1..dim {
        fact[k] = fact[k - 1] * k as f64;
    }
    let binom = |n: usize, k: usize| fact[n] / (fact[k] * fact[n - k]);

    let pow_table = |base: Complex64| -> Vec<Complex64> {
        let mut t = vec![ONE; dim];
        for k in 1..dim {
            t[k] = t[k - 1] * base;
        }
        t
    };
    let ap = pow_table(alpha);
    let bp = pow_table(beta);
    let gp = pow_table(gamma);
    let dp = pow_table(delta);

    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for kk in 0..dim {
        // image of |K, n-K>: (alpha a' + beta b')^K (gamma a' + delta b')^{n-K}
        let rest = nn - kk;
        for p in 0..=kk {
            let cp = binom(kk, p);
            for q in 0..=rest {
                let r = p + q;
                let w = cp * binom(rest, q) / (fact[kk] * fact[rest]).sqrt()
                    * (fact[r] * fact[nn - r]).sqrt();
                out[(r, kk)] += ap[p] * bp[kk - p] * gp[q] * dp[rest - q] * Complex64::new(w, 0.0);
            }
        }
    }
    out
}

/// Jacobian bundle at one Euler point: J maps locally-independent
/// displacements to Euler displacements, V = (J^-1)^T J^-1, and W', W''
/// are the derivative matrices of the DA/RL conjugation maps.
#[derive(Debug, Clone)]
pub struct Jacobians {
    pub j: Matrix3<f64>,
    pub v: Matrix3<f64>,
    pub wp: Matrix3<f64>,
    pub wpp: Matrix3<f64>,
}

/// Closed form `V = 1/2 [[1,0,cos psi2],[0,1,0],[cos psi2,0,1]]`.
pub fn closed_form_v(psi2: f64) -> Matrix3<f64> {
    let c = psi2.cos();
    0.5 * Matrix3::new(1.0, 0.0, c, 0.0, 1.0, 0.0, c, 0.0, 1.0)
}

fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// W' and W'' by central differences of the conjugation maps; angle
/// differences are wrapped mod 2pi so branch re-selections cancel.
pub fn conjugation_jacobians(e: &EulerAngles) -> (Matrix3<f64>, Matrix3<f64>) {
    conjugation_jacobians_with_step(e, tol::FD_STEP_CONJ)
}

pub fn conjugation_jacobians_with_step(e: &EulerAngles, h: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let mut out = [Matrix3::zeros(), Matrix3::zeros()];
    for (slot, basis) in [MeasurementBasis::Da, MeasurementBasis::Rl]
        .iter()
        .enumerate()
    {
        for col in 0..3 {
            let mut plus = e.as_array();
            let mut minus = e.as_array();
            plus[col] += h;
            minus[col] -= h;
            let fp = basis_conjugate(&EulerAngles::from_array(plus), *basis).as_array();
            let fm = basis_conjugate(&EulerAngles::from_array(minus), *basis).as_array();
            for row in 0..3 {
                out[slot][(row, col)] = wrap_pi(fp[row] - fm[row]) / (2.0 * h);
            }
        }
    }
    (out[0], out[1])
}

/// Solves `sigma_alpha / sqrt2 = i U^dag sum_k dU/dpsi_k J_{k alpha}` with
/// analytic derivatives of the Euler product, then forms V and the
/// conjugation Jacobians. Fails on the singular frame |sin psi2| < 1e-8.
pub fn jacobians_at(e: &EulerAngles) -> Result<Jacobians> {
    let s2 = e.psi2.sin().abs();
    if s2 < tol::SINGULAR_SIN {
        return Err(Error::SingularFrame(s2));
    }
    let u = euler_to_matrix(e);
    let half_i = Complex64::new(0.0, 0.5);
    let du1 = pauli_z() * u * half_i;
    let du2 = z_rotation(e.psi1) * pauli_y() * y_rotation(e.psi2) * z_rotation(e.psi3) * half_i;
    let du3 = u * pauli_z() * half_i;

    let udag = u.adjoint();
    let pauli = paulis();
    // G[beta][k] = Pauli coefficients of g_k = i U^dag dU/dpsi_k
    let mut g = Matrix3::<f64>::zeros();
    for (k, du) in [du1, du2, du3].iter().enumerate() {
        let gk = udag * du * I;
        for beta in 0..3 {
            g[(beta, k)] = 0.5 * (pauli[beta] * gk).trace().re;
        }
    }
    let g_inv = g.try_inverse().ok_or(Error::SingularFrame(s2))?;
    let j = g_inv / 2.0f64.sqrt();
    let j_inv = 2.0f64.sqrt() * g;
    let v = j_inv.transpose() * j_inv;
    let (wp, wpp) = conjugation_jacobians(e);
    Ok(Jacobians { j, v, wp, wpp })
}

/// Parsed `--unitary` value plus an optional normalization warning.
#[derive(Debug, Clone)]
pub struct ParsedUnitary {
    pub matrix: Su2Matrix,
    pub warning: Option<String>,
}

/// Grammar: `euler:psi1,psi2,psi3` (radians) or `abcd:a,b,c,d`.
/// abcd input off the unit sphere by less than 1e-6 is renormalized with a
/// warning; larger deviations are rejected.
pub fn parse_unitary_spec(spec: &str) -> Result<ParsedUnitary> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected `euler:...` or `abcd:...`, got `{spec}`")))?;
    let fields: Vec<f64> = rest
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in `{spec}`")))
        })
        .collect::<Result<_>>()?;
    match kind {
        "euler" => {
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "euler spec needs 3 angles, got {}",
                    fields.len()
                )));
            }
            Ok(ParsedUnitary {
                matrix: euler_to_matrix(&EulerAngles::new(fields[0], fields[1], fields[2])),
                warning: None,
            })
        }
        "abcd" => {
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "abcd spec needs 4 components, got {}",
                    fields.len()
                )));
            }
            let norm = fields.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dev = (norm - 1.0).abs();
            if dev > 1e-6 {
                return Err(Error::Parse(format!(
                    "abcd components off the unit sphere by {dev:.3e}"
                )));
            }
            let q = QuaternionParams::normalized(fields[0], fields[1], fields[2], fields[3])?;
            let warning = if dev > tol::NORM {
                Some(format!("abcd renormalized; deviation was {dev:.3e}"))
            } else {
                None
            };
            Ok(ParsedUnitary {
                matrix: quaternion_to_matrix(&q),
                warning,
            })
        }
        other => Err(Error::Parse(format!("unknown unitary kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat_close(a: &Su2Matrix, b: &Su2Matrix, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[(i, j)] - b[(i, j)]).norm() <= tol))
    }

    /// Distance between the rays of two SU(2) elements: Frobenius norm
    /// after aligning the global phase.
    fn projective_distance(a: &Su2Matrix, b: &Su2Matrix) -> f64 {
        let tr = (a.adjoint() * b).trace();
        let phase = if tr.norm() > 1e-300 {
            tr / tr.norm()
        } else {
            ONE
        };
        (a * phase - b).norm()
    }

    #[test]
    fn euler_identity_and_quarter_turn() {
        let id = euler_to_matrix(&EulerAngles::IDENTITY);
        assert!(mat_close(&id, &Su2Matrix::identity(), 1e-15));

        let quarter = euler_to_matrix(&EulerAngles::new(0.0, PI, 0.0));
        let expect = Su2Matrix::new(ZERO, ONE, -ONE, ZERO);
        assert!(mat_close(&quarter, &expect, 1e-15));
    }

    #[test]
    fn euler_all_pi_halves_matches_quaternion_pattern() {
        let m = euler_to_matrix(&EulerAngles::new(PI / 2.0, PI / 2.0, PI / 2.0));
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[(i, j)].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
        // direct multiplication gives (a,b,c,d) = (0, 1/sqrt2, 1/sqrt2, 0),
        // sharing u_min's defining balance a^2+b^2 = c^2+d^2 = 1/2
        let q = matrix_to_quaternion(&m).unwrap();
        assert!(q.a.abs() < 1e-12 && q.d.abs() < 1e-12);
        assert!((q.b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((q.c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((q.a * q.a + q.b * q.b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quaternion_identity_and_u_min() {
        let id = quaternion_to_matrix(&QuaternionParams::new(1.0, 0.0, 0.0, 0.0).unwrap());
        assert!(mat_close(&id, &Su2Matrix::identity(), 1e-15));

        let e = quaternion_to_euler(&QuaternionParams::U_MIN);
        assert!((e.psi2.abs() - PI / 2.0).abs() < 1e-12, "psi2 = {}", e.psi2);
    }

    #[test]
    fn matrix_euler_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = haar_random(&mut rng);
            let e = matrix_to_euler(&m).unwrap();
            let back = euler_to_matrix(&e);
            assert!(mat_close(&m, &back, 1e-12));
        }
    }

    #[test]
    fn euler_roundtrip_on_canonical_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            // sums and differences stay inside (-2pi, 2pi], so the
            // decomposition is unique
            let e = EulerAngles::new(
                rng.random_range(-PI..=PI),
                rng.random_range(1e-5..PI - 1e-5),
                rng.random_range(-PI..=PI),
            );
            if e.psi2.sin().abs() < 1e-6 {
                continue;
            }
            let back = matrix_to_euler(&euler_to_matrix(&e)).unwrap();
            assert!((back.psi1 - e.psi1).abs() < tol::ROUNDTRIP);
            assert!((back.psi2 - e.psi2).abs() < tol::ROUNDTRIP);
            assert!((back.psi3 - e.psi3).abs() < tol::ROUNDTRIP);
        }
    }

    #[test]
    fn canonicalize_lands_in_declared_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let raw = EulerAngles::new(
                rng.random_range(-12.0..12.0),
                rng.random_range(-12.0..12.0),
                rng.random_range(-12.0..12.0),
            );
            let c = raw.canonicalize();
            assert!((0.0..=PI).contains(&c.psi2), "psi2 = {}", c.psi2);
            assert!((-2.0 * PI..2.0 * PI).contains(&c.psi1), "psi1 = {}", c.psi1);
            assert!((-2.0 * PI..2.0 * PI).contains(&c.psi3), "psi3 = {}", c.psi3);
            let d = projective_distance(&euler_to_matrix(&raw), &euler_to_matrix(&c));
            assert!(d < 1e-9, "canonical form moved the ray by {d:.3e}");
        }
    }

    #[test]
    fn gimbal_convention_puts_phase_on_psi1() {
        let m = euler_to_matrix(&EulerAngles::new(0.7, 0.0, 0.4));
        let e = matrix_to_euler(&m).unwrap();
        assert!((e.psi1 - 1.1).abs() < 1e-12);
        assert_eq!(e.psi3, 0.0);

        let m = euler_to_matrix(&EulerAngles::new(0.7, PI, 0.4));
        let e = matrix_to_euler(&m).unwrap();
        assert!((e.psi2 - PI).abs() < 1e-12);
        assert_eq!(e.psi3, 0.0);
        assert!((e.psi1 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = Su2Matrix::new(ONE, ONE, ZERO, ONE);
        assert!(matrix_to_euler(&m).is_err());
        assert!(matrix_to_quaternion(&m).is_err());
    }

    #[test]
    fn wigner_small_j_closed_forms() {
        for beta in [0.0, 0.3, 1.2, 2.9, -1.7] {
            // j = 1/2 block in ascending m: [[cos, -sin],[sin, cos]](beta/2)
            let d = wigner_d_matrix(1, beta);
            let (s, c) = (0.5 * beta).sin_cos();
            assert!((d[(1, 1)] - c).abs() < 1e-13);
            assert!((d[(0, 0)] - c).abs() < 1e-13);
            assert!((d[(1, 0)] - s).abs() < 1e-13);
            assert!((d[(0, 1)] + s).abs() < 1e-13);
            assert!((wigner_d(1, 1, 1, beta).unwrap() - c).abs() < 1e-13);

            // j = 1: exp(beta K) = 1 + sin(beta) K + (1-cos(beta)) K^2
            let k = DMatrix::<f64>::from_row_slice(
                3,
                3,
                &[
                    0.0,
                    -std::f64::consts::FRAC_1_SQRT_2,
                    0.0,
                    std::f64::consts::FRAC_1_SQRT_2,
                    0.0,
                    -std::f64::consts::FRAC_1_SQRT_2,
                    0.0,
                    std::f64::consts::FRAC_1_SQRT_2,
                    0.0,
                ],
            );
            let expect =
                DMatrix::<f64>::identity(3, 3) + &k * beta.sin() + (&k * &k) * (1.0 - beta.cos());
            let d1 = wigner_d_matrix(2, beta);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((d1[(i, j)] - expect[(i, j)]).abs() < 1e-12);
                }
            }
            assert!((wigner_d(2, 0, 0, beta).unwrap() - beta.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_identity_at_zero() {
        for two_j in [1, 2, 5, 9] {
            let d = wigner_d_matrix(two_j, 0.0);
            let dim = two_j as usize + 1;
            for i in 0..dim {
                for j in 0..dim {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((d[(i, j)] - expect).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn wigner_orthogonality_up_to_j5() {
        for two_j in 1..=10u32 {
            let d = wigner_d_matrix(two_j, 0.83);
            let dim = two_j as usize + 1;
            let prod = d.transpose() * &d;
            for i in 0..dim {
                for j in 0..dim {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (prod[(i, j)] - expect).abs() < 1e-10,
                        "two_j={two_j} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn wigner_lattice_mismatch_rejected() {
        assert!(wigner_d(1, 0, 1, 0.5).is_err());
        assert!(wigner_d(2, 1, 0, 0.5).is_err());
        assert!(wigner_d(2, 4, 0, 0.5).is_err());
    }

    #[test]
    fn wigner_matches_representation_lift() {
        // independent route: binomial expansion of the 2x2 y-rotation
        for n in 1..=6u32 {
            for beta in [0.4, 1.9, -2.3] {
                let d = wigner_d_matrix(n, beta);
                let lifted = lift_su2(&y_rotation(beta), n);
                let dim = n as usize + 1;
                for i in 0..dim {
                    for j in 0..dim {
                        assert!(
                            (lifted[(i, j)].re - d[(i, j)]).abs() < 1e-12
                                && lifted[(i, j)].im.abs() < 1e-12,
                            "n={n} beta={beta} ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lift_is_homomorphism_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1u32, 3, 5] {
            let (u, v) = (haar_random(&mut rng), haar_random(&mut rng));
            let lhs = lift_su2(&(u * v), n);
            let rhs = lift_su2(&u, n) * lift_su2(&v, n);
            let dim = n as usize + 1;
            let prod = lift_su2(&u, n).adjoint() * lift_su2(&u, n);
            for i in 0..dim {
                for j in 0..dim {
                    assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-12);
                    let expect = if i == j { ONE } else { ZERO };
                    assert!((prod[(i, j)] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn haar_fixed_seed_reproducible() {
        let a = haar_random(&mut ChaCha8Rng::seed_from_u64(42));
        let b = haar_random(&mut ChaCha8Rng::seed_from_u64(42));
        assert!(mat_close(&a, &b, 0.0));
    }

    #[test]
    fn haar_quaternion_second_moment() {
        // E[a^2] = 1/4 on S^3, Var(a^2) = 1/16
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000usize;
        let mean: f64 = (0..n)
            .map(|_| {
                let q = haar_random_quaternion(&mut rng);
                q.a * q.a
            })
            .sum::<f64>()
            / n as f64;
        let three_sigma = 3.0 * 0.25 / (n as f64).sqrt();
        assert!(
            (mean - 0.25).abs() < three_sigma,
            "mean {mean}, band {three_sigma}"
        );
    }

    #[test]
    fn haar_psi2_density_ks() {
        // CDF of psi2 under Haar is (1 - cos psi2)/2
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000usize;
        let mut samples: Vec<f64> = (0..n)
            .map(|_| matrix_to_euler(&haar_random(&mut rng)).unwrap().psi2)
            .collect();
        samples.sort_by(f64::total_cmp);
        let mut d_stat: f64 = 0.0;
        for (i, s) in samples.iter().enumerate() {
            let cdf = 0.5 * (1.0 - s.cos());
            let emp_hi = (i + 1) as f64 / n as f64;
            let emp_lo = i as f64 / n as f64;
            d_stat = d_stat.max((cdf - emp_lo).abs()).max((emp_hi - cdf).abs());
        }
        // K-S critical value at alpha = 0.01 is 1.628/sqrt(n)
        assert!(
            d_stat * (n as f64).sqrt() < 1.628,
            "KS statistic {d_stat:.4e}"
        );
    }

    #[test]
    fn conjugation_identity_angles() {
        let e = basis_conjugate(&EulerAngles::IDENTITY, MeasurementBasis::Da);
        let m = euler_to_matrix(&e);
        assert!(projective_distance(&m, &Su2Matrix::identity()) < 1e-12);
        assert_eq!(e.psi3, 0.0);
        assert!(e.psi1.abs() < 1e-12 && e.psi2.abs() < 1e-12);
    }

    #[test]
    fn conjugation_quarter_y_rotation() {
        // psi = (0, pi/2, 0): cos^2(psi'_2/2) = 1/2 so psi'_2 = pi/2
        let e = basis_conjugate(&EulerAngles::new(0.0, PI / 2.0, 0.0), MeasurementBasis::Da);
        assert!((e.psi2 - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn conjugation_matches_matrix_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let m = haar_random(&mut rng);
            let e = matrix_to_euler(&m).unwrap();
            for basis in [MeasurementBasis::Da, MeasurementBasis::Rl] {
                let ep = basis_conjugate(&e, basis);
                let direct = conjugated_matrix(&m, basis);
                assert!(
                    projective_distance(&euler_to_matrix(&ep), &direct) < 1e-9,
                    "basis {basis:?}"
                );
            }
        }
    }

    #[test]
    fn conjugation_cos_squared_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let e = EulerAngles::new(
                rng.random_range(-2.0 * PI..2.0 * PI),
                rng.random_range(0.0..PI),
                rng.random_range(-2.0 * PI..2.0 * PI),
            );
            let c2h = (0.5 * e.psi2).cos().powi(2);
            let s2h = (0.5 * e.psi2).sin().powi(2);
            let cp = (0.5 * (e.psi1 + e.psi3)).cos().powi(2);
            let sm = (0.5 * (e.psi1 - e.psi3)).sin().powi(2);
            let cm = (0.5 * (e.psi1 - e.psi3)).cos().powi(2);

            let ep = basis_conjugate(&e, MeasurementBasis::Da);
            let lhs = (0.5 * ep.psi2).cos().powi(2);
            assert!((lhs - (c2h * cp + s2h * sm)).abs() < 1e-9);

            let epp = basis_conjugate(&e, MeasurementBasis::Rl);
            let lhs2 = (0.5 * epp.psi2).cos().powi(2);
            assert!((lhs2 - (c2h * cp + s2h * cm)).abs() < 1e-9);
        }
    }

    #[test]
    fn v_closed_form_and_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let e = EulerAngles::new(
                rng.random_range(-PI..PI),
                rng.random_range(0.05..PI - 0.05),
                rng.random_range(-PI..PI),
            );
            if e.psi2.sin().abs() < 1e-4 {
                continue;
            }
            let jac = jacobians_at(&e).unwrap();
            let v_ref = closed_form_v(e.psi2);
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (jac.v[(i, j)] - v_ref[(i, j)]).abs() < 1e-8,
                        "V mismatch at ({i},{j}): {} vs {}",
                        jac.v[(i, j)],
                        v_ref[(i, j)]
                    );
                }
            }
            let det_expect = e.psi2.sin().powi(2) / 8.0;
            assert!((jac.v.determinant() - det_expect).abs() < 1e-9);
        }
    }

    #[test]
    fn v_is_half_identity_at_pi_half() {
        let jac = jacobians_at(&EulerAngles::new(0.4, PI / 2.0, -1.1)).unwrap();
        let expect = Matrix3::identity() * 0.5;
        for i in 0..3 {
            for j in 0..3 {
                assert!((jac.v[(i, j)] - expect[(i, j)]).abs() < 1e-10);
            }
        }
        // det V = sin^2(pi/3)/8 = 3/32 at psi2 = pi/3
        let jac = jacobians_at(&EulerAngles::new(0.0, PI / 3.0, 0.0)).unwrap();
        assert!((jac.v.determinant() - 3.0 / 32.0).abs() < 1e-9);
    }

    #[test]
    fn gimbal_raises_singular_frame() {
        match jacobians_at(&EulerAngles::new(0.3, 0.0, 0.2)) {
            Err(Error::SingularFrame(_)) => {}
            other => panic!("expected singular frame, got {other:?}"),
        }
        match jacobians_at(&EulerAngles::new(0.3, PI, 0.2)) {
            Err(Error::SingularFrame(_)) => {}
            other => panic!("expected singular frame, got {other:?}"),
        }
    }

    #[test]
    fn conjugation_jacobian_second_row_matches_analytic() {
        // d psi'_2 / d psi_beta from the cos^2 identity, against the
        // finite-difference W' row
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100 {
            let e = EulerAngles::new(
                rng.random_range(-PI..PI),
                rng.random_range(0.3..PI - 0.3),
                rng.random_range(-PI..PI),
            );
            let q = matrix_to_quaternion(&euler_to_matrix(&e)).unwrap();
            let (wp, wpp) = conjugation_jacobians(&e);

            let c2 = (0.5 * e.psi2).cos();
            let s2 = (0.5 * e.psi2).sin();
            let (sp, cp) = (0.5 * (e.psi1 + e.psi3)).sin_cos();
            let (sm, cm) = (0.5 * (e.psi1 - e.psi3)).sin_cos();
            let da = [-0.5 * c2 * sp, -0.5 * s2 * cp, -0.5 * c2 * sp];
            let dc = [-0.5 * s2 * sm, 0.5 * c2 * cm, 0.5 * s2 * sm];
            let dd = [0.5 * s2 * cm, 0.5 * c2 * sm, -0.5 * s2 * cm];

            for (w, uval, du) in [
                (
                    &wp,
                    q.a * q.a + q.d * q.d,
                    [0, 1, 2].map(|k| 2.0 * (q.a * da[k] + q.d * dd[k])),
                ),
                (
                    &wpp,
                    q.a * q.a + q.c * q.c,
                    [0, 1, 2].map(|k| 2.0 * (q.a * da[k] + q.c * dc[k])),
                ),
            ] {
                if !(1e-3..=1.0 - 1e-3).contains(&uval) {
                    continue;
                }
                let scale = -1.0 / (uval * (1.0 - uval)).sqrt();
                for k in 0..3 {
                    let analytic = scale * du[k];
                    assert!(
                        (w[(1, k)] - analytic).abs() < 1e-6,
                        "row-2 mismatch: fd {} vs analytic {analytic}",
                        w[(1, k)]
                    );
                }
            }
        }
    }

    #[test]
    fn parse_unitary_specs() {
        let p = parse_unitary_spec("euler:0,0,0").unwrap();
        assert!(mat_close(&p.matrix, &Su2Matrix::identity(), 1e-15));
        assert!(p.warning.is_none());

        let p = parse_unitary_spec("abcd:0.5,0.5,0.5,0.5").unwrap();
        assert!(p.warning.is_none());
        let q = matrix_to_quaternion(&p.matrix).unwrap();
        assert!((q.a - 0.5).abs() < 1e-15);

        let p = parse_unitary_spec("abcd:0.5000001,0.5,0.5,0.5").unwrap();
        assert!(p.warning.is_some());

        assert!(parse_unitary_spec("abcd:0.6,0.5,0.5,0.5").is_err());
        assert!(parse_unitary_spec("euler:1,2").is_err());
        assert!(parse_unitary_spec("spinor:1,2,3").is_err());
        assert!(parse_unitary_spec("euler:x,y,z").is_err());
    }
}
