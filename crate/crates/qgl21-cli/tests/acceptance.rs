//! Acceptance suite: one PASS/FAIL line per criterion, failing details
//! below. Exits nonzero when any criterion fails.

use qgl21::acceptance::run_library_criteria;
use qgl21::{Exec, Report};

fn main() {
    let exec = Exec::default();
    let mut outcomes = run_library_criteria(exec);
    outcomes.push(qgl21_cli::criterion_9(exec));

    for o in &outcomes {
        println!("{}", o.summary_line());
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed()).collect();
    for o in &failed {
        println!();
        println!("criterion {} failing checks:", o.number);
        let failures: Report = o.report.failures().into_iter().cloned().collect();
        print!("{failures}");
    }
    println!();
    println!(
        "acceptance: {} passed, {} failed",
        outcomes.len() - failed.len(),
        failed.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
