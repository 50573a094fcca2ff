//! Command implementations shared by the binary and the test suites.

use su2fisher::cfi::{
    fisher_richardson_drift, outcome_distribution, outcome_distribution_direct,
    product_state_precision, total_fisher, total_fisher_direct, tr_inv_precision, PrecisionFlag,
    PrecisionResult,
};
use su2fisher::fock::{check_optimality, check_saturation, make_state, FockState, StateFamily};
use su2fisher::qfi::{
    check_two_design, optimal_bound, pauli_eigenbasis, qfi_oracle, qfi_three_basis, random_state,
    tetrahedral_basis, uniqueness_search, BoundReport, ProbeTriple, Protocol,
};
use su2fisher::su2::{
    conjugation_jacobians_with_step, haar_random_quaternion, matrix_to_euler, parse_unitary_spec,
    quaternion_to_euler, EulerAngles, MeasurementBasis,
};
use su2fisher::{tol, trial_rng, Error, Result};

use crate::paths::{lambda_grid, PathSpec};
use crate::records::{
    CheckResult, ClassifyRecord, PrecisionAt, ScanRow, SearchRecord, VerifyReport,
};

fn parsed_state(spec: &str) -> Result<(StateFamily, FockState)> {
    let family = StateFamily::parse(spec)?;
    let state = make_state(&family)?;
    Ok((family, state))
}

/// Precision at one unitary, taking the product-state fast path when the
/// probe is a pure |M, N-M> state.
fn precision_dispatch(
    family: &StateFamily,
    state: &FockState,
    e: &EulerAngles,
) -> Result<PrecisionResult> {
    match family.product_mode_occupation() {
        Some((m, n)) => product_state_precision(m, n, e),
        None => Ok(tr_inv_precision(state, e)),
    }
}

/// Sweeps tr(F^-1) along one path. Rows where a quaternion component
/// vanishes (outside the singular frame) are flagged as divergences.
pub fn run_path_scan(state_spec: &str, path_index: u8, grid_step: f64) -> Result<Vec<ScanRow>> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::Parse(format!(
            "grid step {grid_step} out of (0, 0.5]"
        )));
    }
    let (family, state) = parsed_state(state_spec)?;
    let path = PathSpec::new(path_index)?;
    let mut rows = Vec::new();
    for lambda in lambda_grid(grid_step) {
        let q = path.point(lambda);
        let e = quaternion_to_euler(&q);
        let pr = precision_dispatch(&family, &state, &e)?;
        let flag = if pr.flag == PrecisionFlag::SingularFrame {
            "singular-frame".to_string()
        } else if q.min_abs_component() < tol::COMPONENT_ZERO {
            "divergent".to_string()
        } else {
            pr.flag.label().to_string()
        };
        let traces = pr.block_traces;
        rows.push(ScanRow {
            lambda,
            tr_inv: pr.tr_inv,
            flag,
            cond_number: pr.condition_number,
            tr_f_hv: traces.map(|t| t[0]),
            tr_f_da: traces.map(|t| t[1]),
            tr_f_rl: traces.map(|t| t[2]),
        });
    }
    Ok(rows)
}

/// Minimizes tr(F^-1) over Haar-random unitaries with per-trial seeding.
pub fn run_haar_search(state_spec: &str, trials: u64, seed: u64) -> Result<SearchRecord> {
    if trials < 1 {
        return Err(Error::Parse("trials must be >= 1".into()));
    }
    let (family, state) = parsed_state(state_spec)?;
    let mut best: Option<(f64, [f64; 4], [f64; 3])> = None;
    let mut excluded_singular = 0u64;
    let mut excluded_ill = 0u64;
    let mut divergent_evals = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let q = haar_random_quaternion(&mut rng);
        let e = quaternion_to_euler(&q);
        let pr = precision_dispatch(&family, &state, &e)?;
        if pr.divergent_outcomes > 0 {
            divergent_evals += 1;
        }
        match (pr.flag, pr.tr_inv) {
            (PrecisionFlag::SingularFrame, _) => excluded_singular += 1,
            (PrecisionFlag::IllConditioned, _) => excluded_ill += 1,
            (PrecisionFlag::Ok, Some(v)) => {
                if best.is_none_or(|(b, _, _)| v < b) {
                    best = Some((v, q.components(), e.as_array()));
                }
            }
            (PrecisionFlag::Ok, None) => excluded_ill += 1,
        }
    }
    Ok(SearchRecord {
        state: state_spec.to_string(),
        trials,
        seed,
        min_tr_inv: best.map(|(v, _, _)| v),
        argmin_abcd: best.map(|(_, q, _)| q),
        argmin_euler: best.map(|(_, _, e)| e),
        excluded_singular_frame: excluded_singular,
        excluded_ill_conditioned: excluded_ill,
        evals_with_divergent_outcomes: divergent_evals,
    })
}

/// Saturation/optimality booleans with residuals, the protocol QFI, and
/// the bound table; optionally the photon-counting precision at one
/// explicit unitary.
pub fn run_classify(
    state_spec: &str,
    unitary_spec: Option<&str>,
) -> Result<(ClassifyRecord, Option<String>)> {
    let (family, state) = parsed_state(state_spec)?;
    let n = state.n();
    let saturation = check_saturation(&state);
    let optimality = if n >= 2 {
        Some(check_optimality(&state)?)
    } else {
        None
    };
    let tr_inv_qfi = qfi_three_basis(&ProbeTriple::new(state.clone()))
        .tr_inverse()
        .value;
    let bounds = Protocol::ALL
        .iter()
        .map(|p| optimal_bound(*p, n))
        .collect::<Result<Vec<_>>>()?;

    let mut warning = None;
    let precision_at = match unitary_spec {
        Some(spec) => {
            let parsed = parse_unitary_spec(spec)?;
            warning = parsed.warning;
            let e = matrix_to_euler(&parsed.matrix)?;
            let pr = precision_dispatch(&family, &state, &e)?;
            Some(PrecisionAt {
                unitary: spec.to_string(),
                tr_inv: pr.tr_inv,
                flag: pr.flag.label().to_string(),
                cond_number: pr.condition_number,
            })
        }
        None => None,
    };

    Ok((
        ClassifyRecord {
            state: state_spec.to_string(),
            family: family.tag(),
            n,
            saturates: saturation.saturates,
            saturation,
            optimal: optimality.map(|o| o.optimal),
            optimality,
            tr_inv_qfi,
            bounds,
            precision_at,
        },
        warning,
    ))
}

pub fn run_bounds(n: u32) -> Result<Vec<BoundReport>> {
    Protocol::ALL.iter().map(|p| optimal_bound(*p, n)).collect()
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn verify_family_list(max_n: u32) -> Vec<StateFamily> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(StateFamily::Noon { n });
        for m in 0..=n {
            out.push(StateFamily::Fock { m, n });
        }
        if n % 2 == 0 {
            out.push(StateFamily::HollandBurnett { n });
            if n >= 2 {
                out.push(StateFamily::YurkeEven { n });
            }
        } else {
            out.push(StateFamily::YurkeOdd { n });
        }
    }
    out
}

fn oracle_suite(seed: u64) -> Vec<CheckResult> {
    let mut rng = trial_rng(seed, 1);
    let mut worst: f64 = 0.0;
    let mut worst_tag = String::new();
    let mut failures = 0usize;
    for family in verify_family_list(6) {
        let state = make_state(&family).expect("verify families are valid");
        let probe = ProbeTriple::new(state);
        let algebraic = qfi_three_basis(&probe);
        let e = matrix_to_euler(&su2fisher::su2::haar_random(&mut rng)).expect("haar");
        match qfi_oracle(&probe, &e) {
            Ok(fd) => {
                let diff = (algebraic.m - fd.m).abs().max();
                if diff > worst {
                    worst = diff;
                    worst_tag = family.tag();
                }
                if diff > 1e-6 {
                    failures += 1;
                }
            }
            Err(err) => {
                failures += 1;
                worst_tag = format!("{} ({err})", family.tag());
            }
        }
    }
    vec![check(
        "qfi-oracle-equivalence",
        failures == 0,
        format!("worst entrywise gap {worst:.3e} at {worst_tag}"),
    )]
}

fn two_design_suite() -> Vec<CheckResult> {
    let pauli = check_two_design(&pauli_eigenbasis());
    let tetra = check_two_design(&tetrahedral_basis());
    // the z eigenstates alone form a 1-design that is not a 2-design
    let z_pair = check_two_design(&pauli_eigenbasis()[4..6]);
    vec![
        check(
            "two-design-pauli",
            pauli.is_two_design,
            format!("residual {:.3e}", pauli.residual),
        ),
        check(
            "two-design-tetrahedral",
            tetra.is_two_design,
            format!("residual {:.3e}", tetra.residual),
        ),
        check(
            "two-design-rejects-z-pair",
            !z_pair.is_two_design,
            format!("residual {:.3e}", z_pair.residual),
        ),
    ]
}

fn uniqueness_suite(seed: u64, trials: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [2u32, 3] {
        match uniqueness_search(n, trials, seed) {
            Ok(report) => out.push(check(
                &format!("uniqueness-n{n}"),
                report.passed,
                format!(
                    "{} random hits, family probes {}, negatives {}, max residual {:.3e}",
                    report.hits.len(),
                    if report.family_probes_pass {
                        "pass"
                    } else {
                        "fail"
                    },
                    if report.negative_probes_rejected {
                        "rejected"
                    } else {
                        "accepted"
                    },
                    report.max_b1_residual
                ),
            )),
            Err(err) => out.push(check(&format!("uniqueness-n{n}"), false, err.to_string())),
        }
    }
    out
}

fn random_probe_points(seed: u64, count: usize, max_n: u32) -> Vec<(FockState, EulerAngles)> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0u64;
    while out.len() < count {
        let mut rng = trial_rng(seed, 1000 + k);
        k += 1;
        let n = 1 + (k % max_n as u64) as u32;
        let state = random_state(n, &mut rng);
        let e = matrix_to_euler(&su2fisher::su2::haar_random(&mut rng)).expect("haar");
        if e.psi2.sin().abs() < 0.05 {
            continue;
        }
        out.push((state, e));
    }
    out
}

fn transform_suite(seed: u64) -> Vec<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut skipped = 0usize;
    for (state, e) in random_probe_points(seed, 24, 4) {
        let a = total_fisher(&state, &e);
        let b = total_fisher_direct(&state, &e);
        if a.divergent_outcomes + b.divergent_outcomes > 0 {
            skipped += 1;
            continue;
        }
        let scale = a.fisher.m.abs().max().max(1.0);
        worst = worst.max((a.fisher.m - b.fisher.m).abs().max() / scale);
    }
    let transform_ok = worst < 1e-6;

    // product fast path against the general route
    let mut worst_fast: f64 = 0.0;
    let mut rng = trial_rng(seed, 2000);
    for _ in 0..12 {
        let e = matrix_to_euler(&su2fisher::su2::haar_random(&mut rng)).expect("haar");
        if e.psi2.sin().abs() < 0.05 {
            continue;
        }
        for (m, n) in [(1u32, 2u32), (2, 4), (0, 3)] {
            let fast = product_state_precision(m, n, &e).expect("valid occupation");
            let state = make_state(&StateFamily::Fock { m, n }).expect("valid");
            let general = tr_inv_precision(&state, &e);
            if let (Some(a), Some(b)) = (fast.tr_inv, general.tr_inv) {
                worst_fast = worst_fast.max((a - b).abs() / a.abs().max(1.0));
            }
        }
    }
    let fast_ok = worst_fast < 1e-6;

    // amplitude formula against direct representation evolution
    let mut worst_dist: f64 = 0.0;
    for (state, e) in random_probe_points(seed.wrapping_add(5), 16, 5) {
        for basis in MeasurementBasis::ALL {
            let p1 = outcome_distribution(&state, &e, basis);
            let p2 = outcome_distribution_direct(&state, &e, basis);
            for (a, b) in p1.probs().iter().zip(p2.probs()) {
                worst_dist = worst_dist.max((a - b).abs());
            }
        }
    }
    let dist_ok = worst_dist < 1e-9;

    vec![
        check(
            "transform-route-consistency",
            transform_ok,
            format!("worst relative gap {worst:.3e}, skipped {skipped} flagged points"),
        ),
        check(
            "product-fast-path",
            fast_ok,
            format!("worst relative gap {worst_fast:.3e}"),
        ),
        check(
            "distribution-unitarity",
            dist_ok,
            format!("worst probability gap {worst_dist:.3e}"),
        ),
    ]
}

fn drift_suite(seed: u64) -> Vec<CheckResult> {
    let mut worst_fisher: f64 = 0.0;
    let mut worst_conj: f64 = 0.0;
    let mut oracle_failures = 0usize;
    let points = random_probe_points(seed.wrapping_add(9), 100, 4);
    for (state, e) in &points {
        worst_fisher = worst_fisher.max(fisher_richardson_drift(state, e, MeasurementBasis::Hv));

        let (wp1, wpp1) = conjugation_jacobians_with_step(e, tol::FD_STEP_CONJ);
        let (wp2, wpp2) = conjugation_jacobians_with_step(e, 2.0 * tol::FD_STEP_CONJ);
        let scale = wp1.abs().max().max(1.0);
        let drift = f64::max(
            (wp1 - wp2).abs().max() / scale,
            (wpp1 - wpp2).abs().max() / scale,
        );
        worst_conj = worst_conj.max(drift);
    }
    for (state, e) in points.iter().take(20) {
        if state.n() <= tol::ORACLE_MAX {
            // qfi_oracle runs its own step-doubling check internally
            if qfi_oracle(&ProbeTriple::new(state.clone()), e).is_err() {
                oracle_failures += 1;
            }
        }
    }
    vec![
        check(
            "drift-fisher",
            worst_fisher < tol::RICHARDSON_DRIFT,
            format!("worst relative drift {worst_fisher:.3e}"),
        ),
        check(
            "drift-conjugation-jacobians",
            worst_conj < tol::RICHARDSON_DRIFT,
            format!("worst relative drift {worst_conj:.3e}"),
        ),
        check(
            "drift-qfi-oracle",
            oracle_failures == 0,
            format!("{oracle_failures} oracle evaluations exceeded the drift bound"),
        ),
    ]
}

/// Runs one verification scope; `uniqueness_trials` controls the random
/// search depth (the acceptance setting is 1e5).
pub fn run_verify(scope: &str, seed: u64, uniqueness_trials: u64) -> Result<VerifyReport> {
    let checks = match scope {
        "oracle" => oracle_suite(seed),
        "two-design" => two_design_suite(),
        "uniqueness" => uniqueness_suite(seed, uniqueness_trials),
        "transform" => transform_suite(seed),
        "drift" => drift_suite(seed),
        "all" => {
            let mut all = Vec::new();
            all.extend(oracle_suite(seed));
            all.extend(two_design_suite());
            all.extend(uniqueness_suite(seed, uniqueness_trials));
            all.extend(transform_suite(seed));
            all.extend(drift_suite(seed));
            all
        }
        other => return Err(Error::Parse(format!(
            "unknown verify scope `{other}` (use oracle|two-design|uniqueness|transform|drift|all)"
        ))),
    };
    Ok(VerifyReport::from_checks(scope, seed, checks))
}
