//! One PASS/FAIL line per acceptance criterion. `ACCEPTANCE=quick` runs the
//! fast subset; `ACCEPTANCE=1,5,9` runs the listed ids.

use grouplab::suite::{run_criterion, CRITERIA};

fn main() {
    let selection = std::env::var("ACCEPTANCE").unwrap_or_default();
    let ids: Vec<u8> = match selection.as_str() {
        "" | "all" => CRITERIA.iter().map(|c| c.id).collect(),
        "quick" => CRITERIA.iter().filter(|c| c.quick).map(|c| c.id).collect(),
        list => list.split(',').map(|s| s.trim().parse().expect("criterion id")).collect(),
    };
    let mut failed = 0;
    for id in ids {
        let result = run_criterion(id, true).expect("registered criterion");
        println!("{}", result.line());
        failed += !result.passed as usize;
    }
    println!("acceptance: {failed} criteria failed");
}
