//! Fisher-information analysis of two-mode N-photon probes for SU(2)
//! process estimation with photon-counting readout.
//!
//! The crate is organized around the photon/spin correspondence: `fock`
//! holds two-mode photon states and their reduced density matrices, `su2`
//! the group parameterizations and Wigner rotation machinery, `qfi` the
//! quantum Fisher information of the three-basis protocol and its optimal
//! bounds, and `cfi` the classical Fisher information of photon-counting
//! measurements.

pub mod cfi;
pub mod fock;
pub mod qfi;
pub mod su2;
pub mod tol;

pub use fock::{FockState, ReducedDensity, StateFamily};
pub use su2::{EulerAngles, MeasurementBasis, QuaternionParams};

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("state family constraint violated: {0}")]
    FamilyConstraint(String),
    #[error("amplitudes not normalized: |norm - 1| = {0:.3e}")]
    Normalization(f64),
    #[error("operation requires n >= {required}, got n = {got}")]
    Order { required: u32, got: u32 },
    #[error("scale guard: n = {got} exceeds limit {limit}")]
    ScaleGuard { got: u32, limit: u32 },
    #[error("quantum numbers off the spin-{0}/2 lattice")]
    Lattice(u32),
    #[error("matrix is not SU(2): {0}")]
    NotSu2(String),
    #[error("singular Euler frame: |sin psi2| = {0:.3e}")]
    SingularFrame(f64),
    #[error("finite-difference drift check failed: relative drift {0:.3e}")]
    DriftExceeded(f64),
    #[error("unknown protocol tag: {0}")]
    UnknownProtocol(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Deterministic per-trial stream so sweeps can be partitioned or
/// parallelized without changing results.
pub fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(
        seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17),
    )
}
