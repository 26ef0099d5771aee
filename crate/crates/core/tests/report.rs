//! Report serialization, schema gating and summary rendering.

use thetacut::generators::{gen_cycle, gen_torus};
use thetacut::reference::find;
use thetacut::report::{
    compare, parse_report, render_summary, summary_rows, Format, ReportError, Verdict,
};
use thetacut::{compute_bounds, LoopConfig, Problem};

#[test]
fn reports_round_trip_through_json() {
    let g = gen_cycle(5).unwrap();
    let report = compute_bounds(&g, "C5", &LoopConfig::new(Problem::Stable)).unwrap();
    let back = parse_report(&report.to_json()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn foreign_schema_versions_are_rejected() {
    let g = gen_cycle(5).unwrap();
    let report = compute_bounds(&g, "C5", &LoopConfig::new(Problem::Coloring)).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    value["schema_version"] = serde_json::json!(99);
    match parse_report(&value.to_string()) {
        Err(ReportError::Schema { found, .. }) => assert_eq!(found, "99"),
        other => panic!("expected a schema error, got {other:?}"),
    }
    value.as_object_mut().unwrap().remove("schema_version");
    assert!(matches!(
        parse_report(&value.to_string()),
        Err(ReportError::Schema { .. })
    ));
}

#[test]
fn summary_is_sorted_and_renders_every_format() {
    let mut reports = Vec::new();
    for (id, len, problem) in [
        ("C7", 7, Problem::Coloring),
        ("C7", 7, Problem::Stable),
        ("C5", 5, Problem::Stable),
    ] {
        reports
            .push(compute_bounds(&gen_cycle(len).unwrap(), id, &LoopConfig::new(problem)).unwrap());
    }
    let rows = summary_rows(&reports);
    let order: Vec<(Problem, &str)> = rows.iter().map(|r| (r.problem, r.graph.as_str())).collect();
    assert_eq!(
        order,
        [
            (Problem::Stable, "C5"),
            (Problem::Stable, "C7"),
            (Problem::Coloring, "C7")
        ]
    );

    let csv = render_summary(&rows, Format::Csv).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(reader.headers().unwrap().len(), 11);
    let parsed: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(parsed.len(), 3);
    assert_eq!(&parsed[0][0], "C5");
    assert_eq!(&parsed[0][8], "2.000");

    let md = render_summary(&rows, Format::Md).unwrap();
    assert_eq!(md.lines().count(), 5);
    let json: serde_json::Value =
        serde_json::from_str(&render_summary(&rows, Format::Json).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
}

#[test]
fn generated_rows_are_gated_and_file_rows_are_not() {
    let report = compute_bounds(
        &gen_torus(5).unwrap(),
        "torus_5",
        &LoopConfig::new(Problem::Stable),
    )
    .unwrap();
    let torus = compare(find("torus_5").unwrap(), &report);
    assert_eq!(torus.verdict, Verdict::Pass, "{}", torus.note);
    assert_eq!(torus.integer_bound, 10);
    let file_row = compare(find("spin7").unwrap(), &report);
    assert_eq!(file_row.verdict, Verdict::Ungated);
}
