//! Library surface of the command-line driver: path definitions, sweep and
//! search runners, and the output record types.

pub mod commands;
pub mod paths;
pub mod records;

pub use commands::{run_bounds, run_classify, run_haar_search, run_path_scan, run_verify};
pub use paths::{lambda_grid, PathSpec, LAMBDA_HALF, LAMBDA_HALF_OVER_07};
pub use records::{
    bounds_csv, scan_csv, to_json, CheckResult, ClassifyRecord, PrecisionAt, ScanRow, SearchRecord,
    VerifyReport,
};
