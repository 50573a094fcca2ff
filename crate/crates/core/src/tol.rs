//! Numerical tolerances and guards used across the crate.
//!
//! All arithmetic here is exact combinatorics plus double-precision sums at
//! small photon number, so thresholds split into three bands: machine-level
//! checks on constructed data, condition checks on derived quantities, and
//! agreement bands for finite-difference results.

/// State normalization and quaternion unit-norm checks.
pub const NORM: f64 = 1e-12;

/// Hermiticity and trace checks on reduced density matrices.
pub const DENSITY: f64 = 1e-12;

/// Eigenvalue slack for positive semidefiniteness of density matrices.
pub const PSD_SLACK: f64 = 1e-10;

/// Saturation / optimality condition residual threshold.
pub const CONDITION: f64 = 1e-10;

/// Agreement band for ladder-algebra results against the Dicke-expansion
/// partial-trace route.
pub const ORACLE: f64 = 1e-10;

/// Unitarity and determinant checks on 2x2 matrices.
pub const SU2: f64 = 1e-10;

/// Conversions between SU(2) parameterizations must round-trip this tightly.
pub const ROUNDTRIP: f64 = 1e-10;

/// `|sin psi2|` below this marks the Euler frame singular.
pub const SINGULAR_SIN: f64 = 1e-8;

/// Near-gimbal threshold inside angle extraction; below this all phase is
/// assigned to psi1 and psi3 is set to zero.
pub const GIMBAL: f64 = 1e-9;

/// Central-difference step for probability and state derivatives.
pub const FD_STEP: f64 = 1e-5;

/// Central-difference step for the basis-conjugation angle maps.
pub const FD_STEP_CONJ: f64 = 1e-6;

/// Relative drift allowed between step-h and step-2h central differences.
pub const RICHARDSON_DRIFT: f64 = 1e-4;

/// Outcome probabilities below this floor are excluded from Fisher sums.
pub const P_FLOOR: f64 = 1e-12;

/// A derivative above this at a sub-floor outcome marks the outcome as
/// carrying divergent information.
pub const DERIV_FLOOR: f64 = 1e-6;

/// Condition number above which a Fisher matrix inversion is refused.
pub const COND_LIMIT: f64 = 1e12;

/// Quaternion components smaller than this count as exact zeros when
/// locating divergences along parameter paths.
pub const COMPONENT_ZERO: f64 = 1e-9;

/// Photon-number cap for the full 2^N Dicke expansion.
pub const DICKE_MAX: u32 = 12;

/// Photon-number cap for the finite-difference QFI oracle.
pub const ORACLE_MAX: u32 = 8;

/// Photon-number cap for exact (N+1)-dimensional representation lifts;
/// factorials stay exactly representable in f64 below this.
pub const LIFT_MAX: u32 = 16;
