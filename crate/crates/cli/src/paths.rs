//! The five unitary families P_i(lambda) through the {a,b,c,d} parameter
//! space, anchored at u_min, used for precision sweeps.

use su2fisher::su2::QuaternionParams;
use su2fisher::{Error, Result};

/// One of the five scan paths P_i(lambda) = p_i(lambda)/|p_i(lambda)|.
#[derive(Debug, Clone, Copy)]
pub struct PathSpec {
    index: u8,
}

impl PathSpec {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=5).contains(&index) {
            Ok(Self { index })
        } else {
            Err(Error::Parse(format!(
                "path index must be 1..=5, got {index}"
            )))
        }
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    /// Component displacement subtracted from u_min before normalization.
    fn displacement(&self, lambda: f64) -> [f64; 4] {
        match self.index {
            1 => [lambda, 0.0, 0.0, 0.0],
            2 => [lambda, 0.0, lambda, 0.0],
            3 => [lambda, 0.7 * lambda, lambda, 0.0],
            4 => [0.7 * lambda, lambda, 0.7 * lambda, 0.0],
            5 => [lambda, lambda, lambda, 0.0],
            _ => unreachable!(),
        }
    }

    pub fn point(&self, lambda: f64) -> QuaternionParams {
        let u = QuaternionParams::U_MIN;
        let d = self.displacement(lambda);
        QuaternionParams::normalized(u.a - d[0], u.b - d[1], u.c - d[2], u.d - d[3])
            .expect("path points stay away from the origin")
    }
}

/// Divergence candidates: lambdas where some path component crosses zero.
pub const LAMBDA_HALF: f64 = 0.5;
pub const LAMBDA_HALF_OVER_07: f64 = 0.5 / 0.7;

/// Uniform grid over [0, 1] at `step`, refined with the exact divergence
/// candidates and +-1e-3 neighbors so sharp spikes are resolved.
pub fn lambda_grid(step: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = Vec::new();
    let mut k = 0u32;
    loop {
        let lambda = k as f64 * step;
        if lambda > 1.0 + 1e-12 {
            break;
        }
        grid.push(lambda.min(1.0));
        k += 1;
    }
    for center in [LAMBDA_HALF, LAMBDA_HALF_OVER_07] {
        for extra in [center - 1e-3, center, center + 1e-3] {
            if (0.0..=1.0).contains(&extra) {
                grid.push(extra);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}
