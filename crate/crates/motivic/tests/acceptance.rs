//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one pass/fail line per criterion (visible with `--nocapture`, always
//! printed on failure).

use motivic::acceptance;

fn run(result: acceptance::CriterionResult) {
    println!("{}", result.status_line());
    assert!(
        result.passed,
        "criterion {} [{}] failed: {}",
        result.id, result.name, result.detail
    );
    assert!(
        result.within_limit(),
        "criterion {} [{}] exceeded its runtime budget: {:.3}s",
        result.id,
        result.name,
        result.elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_01_golden_integrals() {
    run(acceptance::criterion_1(false));
}

#[test]
fn criterion_02_convergence_dichotomy() {
    run(acceptance::criterion_2(false));
}

#[test]
fn criterion_03_g_h_agreement() {
    run(acceptance::criterion_3(false));
}

#[test]
fn criterion_04_series_oracle() {
    run(acceptance::criterion_4(false));
}

#[test]
fn criterion_05_cov_identity() {
    run(acceptance::criterion_5(false));
}

#[test]
fn criterion_06_s_f_identity() {
    run(acceptance::criterion_6(false));
}

#[test]
fn criterion_07_presentations() {
    run(acceptance::criterion_7(false));
}

#[test]
fn criterion_08_point_counts() {
    run(acceptance::criterion_8(false));
}

#[test]
fn criterion_09_representation_suite() {
    run(acceptance::criterion_9(false));
}

#[test]
fn criterion_10_measure_normalizations() {
    run(acceptance::criterion_10(false));
}

#[test]
fn negative_control_corrupted_sht_fails() {
    let result = acceptance::criterion_1_with_corrupted_sht();
    println!("{}", result.status_line());
    assert!(
        !result.passed,
        "an off-by-one shift corruption must break the golden checks"
    );
}
