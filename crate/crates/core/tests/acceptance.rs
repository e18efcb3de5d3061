//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! `JUNTA_LC_SEED` overrides the master seed (default 1).

use std::process::ExitCode;

use junta_lc::bench::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let seed = std::env::var("JUNTA_LC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let scratch = tempfile::tempdir().expect("temporary directory");
    println!("acceptance suite, seed {seed}");
    let mut failed = 0;
    for id in CRITERIA {
        match run_criterion(id, seed, scratch.path()) {
            Ok(outcome) => {
                failed += !outcome.passed as usize;
                println!("{outcome}");
            }
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  error: {e}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        CRITERIA.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
