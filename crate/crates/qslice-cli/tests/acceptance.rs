//! Runs the full verification suite at its shipped defaults and requires
//! every check to pass. One line is printed per check (visible with
//! `cargo test --test acceptance -- --nocapture`, or automatically on
//! failure).

use qslice_cli::config::SuiteConfig;
use qslice_cli::suite::run_suite;

#[test]
fn full_suite_passes_at_defaults() {
    let cfg = SuiteConfig::default();
    let report = run_suite(&cfg, &[]).expect("default suite runs");
    for check in &report.checks {
        println!(
            "{}  {:<18} residual {:>12.3e}  tol {:>8.1e}  {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.id,
            check.residual,
            check.tol,
            check.anchor
        );
        if let Some(note) = &check.note {
            println!("      {note}");
        }
    }
    assert_eq!(report.checks.len(), 22, "expected the full shipped check set");
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.id.as_str())
        .collect();
    assert!(report.pass, "failing checks: {failed:?}");
}
