//! Acceptance matrix: one PASS/FAIL line per criterion.
//!
//! `SMTKIT_ACCEPTANCE_ONLY=3,9` restricts the run to the listed criteria.

use std::process::ExitCode;

use smtkit::selftest::criterion;

fn main() -> ExitCode {
    let only: Option<Vec<u32>> = std::env::var("SMTKIT_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for id in 1..=10 {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let out = criterion(id, 0).expect("criterion id in range");
        println!("{}", out.line());
        failed += usize::from(!out.passed);
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
