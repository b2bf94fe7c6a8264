//! Runs the complete validation suite and prints one line per criterion.
//!
//! Run with `--nocapture` to see the table as it is produced.

use fracwave_validation as validation;

#[test]
fn acceptance_criteria() {
    let outcomes = validation::run(&[], |o| println!("{}", o.line()));
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    println!(
        "{} of {} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
