use grouplab::report::{emit_plot, ExperimentReport, PlotOptions};
use grouplab::suite::{criterion, run_criterion, CRITERIA};

#[test]
fn registry_covers_ten_criteria() {
    let ids: Vec<u8> = CRITERIA.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=10).collect::<Vec<u8>>());
    assert!(criterion(11).is_err());
}

#[test]
fn quick_reports_are_reproducible() {
    for id in [6, 7] {
        let a = run_criterion(id, false).unwrap();
        let b = run_criterion(id, false).unwrap();
        assert!(a.passed, "{}", a.line());
        let json = a.report.to_json().unwrap();
        assert_eq!(json, b.report.to_json().unwrap());
        assert_eq!(ExperimentReport::from_json(&json).unwrap(), a.report);
    }
}

#[test]
fn suite_tables_plot() {
    let r = run_criterion(7, false).unwrap().report;
    let svg = emit_plot(&r, "slices", "n", &["entropy", "moment"], &PlotOptions::default()).unwrap();
    assert!(svg.contains("experiment=acceptance-7"));
    assert!(r.table("slices").unwrap().to_csv().unwrap().starts_with("p,card,n,entropy,moment\n"));
}
