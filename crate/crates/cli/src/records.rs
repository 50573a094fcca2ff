//! Output records and their CSV/JSON encodings. Formatting is plain and
//! deterministic so identical inputs give byte-identical files.

use serde::Serialize;
use su2fisher::fock::{OptimalityReport, SaturationReport};
use su2fisher::qfi::BoundReport;

/// One sweep sample of a path scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub tr_inv: Option<f64>,
    pub flag: String,
    pub cond_number: Option<f64>,
    pub tr_f_hv: Option<f64>,
    pub tr_f_da: Option<f64>,
    pub tr_f_rl: Option<f64>,
}

fn opt_field(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(
        "lambda_or_angle,tr_inv,flag,cond_number,basis_breakdown_trF_HV,trF_DA,trF_RL\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.lambda,
            opt_field(&r.tr_inv),
            r.flag,
            opt_field(&r.cond_number),
            opt_field(&r.tr_f_hv),
            opt_field(&r.tr_f_da),
            opt_field(&r.tr_f_rl),
        ));
    }
    out
}

/// Result of a Haar-random minimization, with exclusions itemized so the
/// reported minimum is honest about sampling.
#[derive(Debug, Clone, Serialize)]
pub struct SearchRecord {
    pub state: String,
    pub trials: u64,
    pub seed: u64,
    pub min_tr_inv: Option<f64>,
    pub argmin_abcd: Option<[f64; 4]>,
    pub argmin_euler: Option<[f64; 3]>,
    pub excluded_singular_frame: u64,
    pub excluded_ill_conditioned: u64,
    pub evals_with_divergent_outcomes: u64,
}

/// State classification against the saturation/optimality conditions plus
/// the protocol bound table for its photon number.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyRecord {
    pub state: String,
    pub family: String,
    pub n: u32,
    pub saturates: bool,
    pub saturation: SaturationReport,
    /// None when n = 1, where the two-particle conditions are undefined.
    pub optimal: Option<bool>,
    pub optimality: Option<OptimalityReport>,
    pub tr_inv_qfi: Option<f64>,
    pub bounds: Vec<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_at: Option<PrecisionAt>,
}

/// Photon-counting precision of the state at one explicit unitary.
#[derive(Debug, Clone, Serialize)]
pub struct PrecisionAt {
    pub unitary: String,
    pub tr_inv: Option<f64>,
    pub flag: String,
    pub cond_number: Option<f64>,
}

pub fn bounds_csv(bounds: &[BoundReport]) -> String {
    let mut out = String::from("protocol,n,tr_inv_bound\n");
    for b in bounds {
        out.push_str(&format!("{},{},{}\n", b.protocol.tag(), b.n, b.value));
    }
    out
}

/// One named check inside a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub scope: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn from_checks(scope: &str, seed: u64, checks: Vec<CheckResult>) -> Self {
        let failures: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        VerifyReport {
            scope: scope.to_string(),
            seed,
            passed: failures.is_empty(),
            checks,
            failures,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}
