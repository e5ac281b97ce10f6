//! Acceptance suite as a plain binary so the per-criterion lines always show.

use std::process::ExitCode;
use std::time::Instant;

use activation_robustness::verify::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let config = SuiteConfig::default();
    let start = Instant::now();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let t = Instant::now();
        let outcome = run_criterion(id, &config);
        println!("{outcome} [{:.2}s]", t.elapsed().as_secs_f64());
        if !outcome.passed {
            failed.push(id);
        }
    }
    println!("suite finished in {:.1}s", start.elapsed().as_secs_f64());
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
