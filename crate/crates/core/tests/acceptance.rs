//! The twelve acceptance criteria at their stated tolerances, one line
//! per criterion.

use std::time::Instant;

use focklab::verify::{run_criterion, VerifyConfig, CRITERIA};

const SEED: u64 = 7;

#[test]
fn acceptance() {
    let config = VerifyConfig::default();
    let mut failed = Vec::new();
    for id in 1..=CRITERIA.len() {
        let start = Instant::now();
        let outcome = run_criterion(id, SEED, &config);
        println!(
            "[{}] {:>2} {:<36} {} ({:.1}s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            id,
            outcome.name,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        if !outcome.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
