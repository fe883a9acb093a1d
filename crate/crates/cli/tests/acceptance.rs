//! Acceptance suite: each test is one release gate, prints a PASS line
//! with its runtime, and enforces the runtime budget it was given.
//!
//! Run with `cargo test -p sparse-bellman-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use sparse_bellman_core::closedform::{
    bellman_m, omega_seq, power_mean_constant, region_formula, weak_norm_constant, RegionLabel,
};
use sparse_bellman_core::oracle::{
    dp_compare, dp_value_iteration, enumerate_lower_bound, replay_vertex_extremizer,
    standard_checkpoints, AscentOptions, GridSpec,
};
use sparse_bellman_core::supersolution::{
    check_operator_identities, check_r_ordering, check_supersolution_suite, Candidate, SampleSpec,
};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparse-bellman"))
}

fn gate(name: &str, budget: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    body();
    let elapsed = start.elapsed();
    println!("ACCEPT {name}: PASS in {elapsed:.2?} (budget {budget:.0?})");
    assert!(
        elapsed <= budget,
        "{name} exceeded its runtime budget: {elapsed:.2?} > {budget:.0?}"
    );
}

fn parse_json(stdout: &[u8]) -> serde_json::Value {
    let text = String::from_utf8_lossy(stdout);
    serde_json::from_str(text.lines().next().expect("one line of output"))
        .unwrap_or_else(|e| panic!("bad JSON {text:?}: {e}"))
}

#[test]
fn criterion_1_sharp_constant_r1() {
    gate(
        "criterion 1 (sharp constant, r = 1)",
        Duration::from_secs(1),
        || {
            let out = binary()
                .args(["constants", "--r", "1", "--omega-n", "6"])
                .output()
                .unwrap();
            assert!(out.status.success());
            let json = parse_json(&out.stdout);
            let c = json["C"].as_f64().unwrap();
            assert_eq!(c, 3.0, "C(1) must be exactly 3");

            let omega_n = json["omega_n"].as_array().unwrap();
            let mut prev = 0.0;
            for (n, w) in omega_n.iter().enumerate() {
                let ratio = 2f64.powi(-(n as i32)) / w.as_f64().unwrap();
                assert!(
                    ratio > prev,
                    "ratio sequence must increase strictly at n={n}"
                );
                assert!(ratio < 3.0);
                prev = ratio;
            }
            assert_eq!(omega_n.len(), 7);
            assert!(3.0 - prev <= 0.02, "C - ratio_6 = {} > 0.02", 3.0 - prev);
            // the first ratios are the exact dyadic values 2, 2.5, 2.75, ...
            for (n, want) in [2.0, 2.5, 2.75, 2.875].iter().enumerate() {
                let ratio = 2f64.powi(-(n as i32)) / omega_n[n].as_f64().unwrap();
                assert!((ratio - want).abs() < 1e-13);
            }
        },
    );
}

#[test]
fn criterion_2_power_mean_constant() {
    gate(
        "criterion 2 (power-mean constant)",
        Duration::from_secs(1),
        || {
            let c2 = power_mean_constant(2.0).unwrap();
            assert!((c2 - (3.0 + 2f64.sqrt())).abs() <= 1e-12, "C_Q(2) = {c2}");
            assert_eq!(power_mean_constant(1.0).unwrap(), 3.0);
            assert_eq!(weak_norm_constant(1.0).unwrap(), 3.0);
        },
    );
}

#[test]
fn criterion_3_supersolution_suite() {
    gate(
        "criterion 3 (supersolution suite + mutant refutation)",
        Duration::from_secs(30),
        || {
            let spec = SampleSpec::new(100_000, 7, 1e-9, 8.0);
            for r in [0.5, 0.8, 1.0, 2.0, 5.0] {
                let surface = Candidate::ClosedForm.surface(r);
                let reports = check_supersolution_suite(r, &spec, &*surface);
                assert_eq!(reports.len(), 5);
                for report in &reports {
                    assert!(
                        report.passed,
                        "r={r} {}: violation {} at {:?}",
                        report.property, report.max_violation, report.witness
                    );
                }
            }
            let mutant = Candidate::MutantMinSurface.surface(1.0);
            let reports = check_supersolution_suite(1.0, &spec, &*mutant);
            let jump = reports.iter().find(|p| p.property == "jump").unwrap();
            assert!(!jump.passed, "the mutant must fail the jump check");
            assert!(
                jump.max_violation >= 0.4,
                "jump violation {} < 0.4",
                jump.max_violation
            );
        },
    );
}

#[test]
fn criterion_4_extremizer_exactness() {
    gate(
        "criterion 4 (vertex extremizer exactness)",
        Duration::from_secs(1),
        || {
            for r in [0.5, 1.0, 2.0] {
                for n in 0..=6u32 {
                    let replay = replay_vertex_extremizer(r, n).unwrap();
                    assert_eq!(
                        replay.fraction,
                        2f64.powi(-(n as i32)),
                        "r={r} n={n}: fraction must be bitwise 2^-n"
                    );
                    assert_eq!(
                        replay.root_mass, 2.0,
                        "r={r} n={n}: root mass must be exactly 2"
                    );
                    assert!(replay.two_carleson);
                    let omega_n = omega_seq(r, n).unwrap();
                    assert!(
                        (replay.mean - omega_n).abs() <= 1e-12 * omega_n,
                        "r={r} n={n}: mean {} vs ω_n {}",
                        replay.mean,
                        omega_n
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_5_enumeration_oracle() {
    gate(
        "criterion 5 (enumeration oracle, depth ≤ 3)",
        Duration::from_secs(300),
        || {
            let opts = AscentOptions::default();
            // 50 grid points
            let omegas = [0.05, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 1.0, 1.25, 1.5];
            let masses = [0.4, 0.8, 1.2, 1.6, 2.0];
            let mut count = 0;
            for &omega in &omegas {
                for &a in &masses {
                    let value = enumerate_lower_bound(1.0, 3, omega, a, &opts).unwrap();
                    let m = bellman_m(1.0, omega, a).unwrap();
                    assert!(value <= m + 1e-9, "(ω,A)=({omega},{a}): {value} > M={m}");
                    count += 1;
                }
            }
            assert_eq!(count, 50);

            // exact recovery at the vertices
            let w0 = omega_seq(1.0, 0).unwrap();
            let w1 = omega_seq(1.0, 1).unwrap();
            for (omega, a, depth, target) in
                [(w0, 2.0, 2, 1.0), (w1, 2.0, 3, 0.5), (1.0, 1.0, 2, 1.0)]
            {
                let value = enumerate_lower_bound(1.0, depth, omega, a, &opts).unwrap();
                let m = bellman_m(1.0, omega, a).unwrap();
                assert!(
                    (value - target).abs() <= 1e-9,
                    "(ω,A)=({omega},{a}): value {value}"
                );
                assert!((value - m).abs() <= 1e-9, "gap at (ω,A)=({omega},{a})");
            }
        },
    );
}

#[test]
fn criterion_6_dp_oracle_reference_grid() {
    gate(
        "criterion 6 (DP oracle, 401×101, depth 12)",
        Duration::from_secs(600),
        || {
            let grid = GridSpec::reference(1.0).unwrap();
            assert_eq!(grid.omega_points().len(), 401);
            assert_eq!(grid.a_points().len(), 101);
            let table = dp_value_iteration(1.0, &grid).unwrap();
            assert!(
                table.max_iteration_decrease() <= 0.0,
                "W_k must be monotone in k, max decrease {}",
                table.max_iteration_decrease()
            );
            let report = dp_compare(&table, 1.0, &standard_checkpoints(1.0), 0.01, 0.03);
            assert!(
                report.max_excess <= 0.01,
                "W_12 ≤ M + 0.01 violated: excess {} at {:?}",
                report.max_excess,
                report.worst_cell
            );
            for gap in &report.checkpoints {
                assert!(
                    gap.gap <= 0.03,
                    "checkpoint (ω,A)=({},{}) gap {} > 0.03",
                    gap.omega,
                    gap.a,
                    gap.gap
                );
            }
            assert!(report.passed);
            // an interior Σ_1 point converges too (target M = 0.2)
            let sigma1 = dp_compare(&table, 1.0, &[(0.3, 0.2)], 0.01, 0.02);
            assert!(
                sigma1.passed,
                "Σ_1 checkpoint gap {:?}",
                sigma1.checkpoints[0]
            );
        },
    );
}

#[test]
fn criterion_7_operator_identities() {
    gate(
        "criterion 7 (operator identities + quotient bound)",
        Duration::from_secs(30),
        || {
            // 10^4 samples cover the 10^3 chain/identity triples and the 10^4
            // weak-quotient trials; chain and identity are held to 1e-10.
            let spec = SampleSpec::new(10_000, 7, 1e-10, 8.0);
            let report = check_operator_identities(&spec, 6);
            assert!(
                report.passed,
                "violation {} at witness {:?}",
                report.max_violation, report.witness
            );
        },
    );
}

#[test]
fn criterion_8_limit_surfaces() {
    gate(
        "criterion 8 (limit-surface sandwich)",
        Duration::from_secs(30),
        || {
            let spec = SampleSpec::new(10_000, 7, 1e-9, 8.0);
            let report = check_r_ordering(&spec, &[1e-2, 1e-1, 1.0, 1e1, 1e2]);
            assert!(
                report.passed,
                "violation {} at witness {:?}",
                report.max_violation, report.witness
            );
        },
    );
}

#[test]
fn criterion_9_surface_export_and_continuity() {
    gate(
        "criterion 9 (surface export + boundary continuity)",
        Duration::from_secs(10),
        || {
            let dir = tempfile::tempdir().unwrap();
            // the data behind the four figures: M_r, the envelope, both limits
            let jobs: [(&str, Option<&str>, usize); 4] = [
                ("M", Some("0.8"), 200 * 100),
                ("envelope", Some("0.8"), 0), // triangle ω ≤ A: count checked loosely
                ("limit0", None, 200 * 100),
                ("limitinf", None, 200 * 100),
            ];
            for (what, r, expected_rows) in jobs {
                let path = dir.path().join(format!("{what}.csv"));
                let mut cmd = binary();
                cmd.args(["surface", "--what", what, "--nx", "200", "--ny", "100"]);
                if let Some(r) = r {
                    cmd.args(["--r", r]);
                }
                cmd.arg("-o").arg(&path);
                let out = cmd.output().unwrap();
                assert!(out.status.success(), "surface --what {what} failed");
                let text = std::fs::read_to_string(&path).unwrap();
                let mut lines = text.lines();
                let header = lines.next().unwrap();
                assert!(header.starts_with("omega,A,"));
                let rows: Vec<&str> = lines.collect();
                if expected_rows > 0 {
                    assert_eq!(rows.len(), expected_rows, "--what {what}");
                } else {
                    assert!(!rows.is_empty());
                }
                // every row parses back to three finite floats
                for row in rows {
                    let fields: Vec<f64> = row
                        .split(',')
                        .map(|v| v.parse().expect("float field"))
                        .collect();
                    assert_eq!(fields.len(), 3);
                    assert!(fields.iter().all(|v| v.is_finite()));
                }
            }

            // continuity of adjacent region formulas across each boundary curve
            for r in [0.8, 1.0, 2.0] {
                let w0 = omega_seq(r, 0).unwrap();
                let samples = 334;
                for i in 1..=samples {
                    let t = i as f64 / (samples + 1) as f64;
                    // Σ_1 / Δ_0 along A = ω
                    let w = t;
                    let d = (region_formula(r, RegionLabel::Sigma1, w, w).unwrap()
                        - region_formula(r, RegionLabel::Delta0, w, w).unwrap())
                    .abs();
                    assert!(d <= 1e-12, "Σ1/Δ0 r={r} ω={w}: {d}");
                    // Δ / Δ_0 along A = 2ω/ω_0
                    let w = t * w0;
                    let a = 2.0 * w / w0;
                    let d = (region_formula(r, RegionLabel::Delta, w, a).unwrap()
                        - region_formula(r, RegionLabel::Delta0, w, a).unwrap())
                    .abs();
                    assert!(d <= 1e-12, "Δ/Δ0 r={r} ω={w}: {d}");
                    // Σ_0 / Δ_0 along A = 1 + (1-ω)/(1-ω_0)
                    let w = w0 + (1.0 - w0) * t;
                    let a = (1.0 + (1.0 - w) / (1.0 - w0)).min(2.0);
                    let d = (region_formula(r, RegionLabel::Sigma0, w, a).unwrap()
                        - region_formula(r, RegionLabel::Delta0, w, a).unwrap())
                    .abs();
                    assert!(d <= 1e-12, "Σ0/Δ0 r={r} ω={w}: {d}");
                }
            }
        },
    );
}
