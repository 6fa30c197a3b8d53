//! Acceptance gate: one test per certified property, each printing a
//! pass/fail line (run with `--nocapture` to see them all).
//!
//! Shared suites are computed once per binary and reused across criteria.

use std::sync::OnceLock;

use whittaker_core::verify::{
    cauchy_suite, inversion_suite, lfactor_suite, plancherel_suite, schur_suite, stade_suite,
    VerifyReport,
};

const SEED: u64 = 0;

fn line(criterion: u32, name: &str, passed: bool, detail: &str) {
    println!(
        "criterion {criterion} ({name}): {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

fn report_and_assert(criterion: u32, name: &str, report: &VerifyReport, filter: &str) {
    let selected: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.name.contains(filter))
        .collect();
    assert!(
        !selected.is_empty(),
        "no checks matched filter {filter:?} in suite {}",
        report.suite
    );
    let passed = selected.iter().all(|c| c.passed);
    let detail = selected
        .iter()
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect::<Vec<_>>()
        .join("; ");
    line(criterion, name, passed, &detail);
    assert!(passed, "{detail}");
}

fn inversion_report() -> &'static VerifyReport {
    static REPORT: OnceLock<VerifyReport> = OnceLock::new();
    REPORT.get_or_init(|| inversion_suite(SEED, 20).expect("inversion suite must run"))
}

fn lfactor_report() -> &'static VerifyReport {
    static REPORT: OnceLock<VerifyReport> = OnceLock::new();
    REPORT.get_or_init(|| lfactor_suite(SEED).expect("lfactor suite must run"))
}

#[test]
fn criterion_1_schur_triple_agreement() {
    let report = schur_suite(SEED, 100).expect("schur suite must run");
    report_and_assert(1, "Schur triple agreement + invariants", &report, "");
}

#[test]
fn criterion_2_cauchy_identity() {
    let report = cauchy_suite(SEED, 50, 60).expect("cauchy suite must run");
    report_and_assert(2, "Cauchy identity", &report, "");
}

#[test]
fn criterion_3_stade_product_formula() {
    let report = stade_suite(SEED, 50).expect("stade suite must run");
    report_and_assert(3, "product pairing vs closed form", &report, "");
}

#[test]
fn criterion_4_inversion_spectral() {
    report_and_assert(
        4,
        "(H^b)^# = H at torus points",
        inversion_report(),
        "spectral round trip",
    );
}

#[test]
fn criterion_5_inversion_geometric() {
    report_and_assert(
        5,
        "(h^#)^b = h coefficientwise",
        inversion_report(),
        "geometric round trip",
    );
}

#[test]
fn criterion_6_plancherel() {
    let report =
        plancherel_suite(SEED, 20, &[2, 3], 2, 4, 1e-10).expect("plancherel suite must run");
    report_and_assert(6, "Plancherel pairing equality", &report, "");
}

#[test]
fn criterion_7_lfactor_closed_forms() {
    report_and_assert(
        7,
        "flat closed forms vs quadrature oracle",
        lfactor_report(),
        "closed vs quadrature",
    );
    report_and_assert(
        7,
        "vanishing branches",
        lfactor_report(),
        "vanishing branches",
    );
}

#[test]
fn criterion_8_integral_representation() {
    report_and_assert(
        8,
        "L-factor integral representation",
        lfactor_report(),
        "integral representation",
    );
}

#[test]
fn criterion_9_quadrature_equals_constant_term() {
    report_and_assert(
        9,
        "inverse quadrature vs constant term",
        inversion_report(),
        "quadrature vs constant term",
    );
}
