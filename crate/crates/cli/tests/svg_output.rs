use fcar_cli::svg::{emit_svg_lines, render_svg, Chart, Line};
use fcar_cli::CliError;

fn polylines(doc: &roxmltree::Document) -> Vec<(String, Option<String>)> {
    doc.descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .map(|n| (n.attribute("stroke").unwrap().to_string(), n.attribute("stroke-dasharray").map(str::to_string)))
        .collect()
}

#[test]
fn three_point_series_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.svg");
    let chart = Chart::new("demo <1> & more", "t", "x");
    emit_svg_lines(&[Line::indexed("x", vec![0.2, -1.0, 3.5])], &chart, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(polylines(&doc).len(), 1);
    assert!(doc.descendants().any(|n| n.text() == Some("demo <1> & more")));
    let points = doc.descendants().find(|n| n.has_tag_name("polyline")).unwrap().attribute("points").unwrap();
    assert_eq!(points.split(' ').count(), 3);
}

#[test]
fn identical_series_get_distinct_styles() {
    let y = vec![1.0, 2.0, 1.5, 0.5];
    let lines = [Line::indexed("first", y.clone()), Line::indexed("second", y)];
    let text = render_svg(&lines, &Chart::default()).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let styles = polylines(&doc);
    assert_eq!(styles.len(), 2);
    assert_ne!(styles[0], styles[1]);
    assert_ne!(styles[0].1, styles[1].1);
    let pts: Vec<&str> =
        doc.descendants().filter(|n| n.has_tag_name("polyline")).map(|n| n.attribute("points").unwrap()).collect();
    assert_eq!(pts[0], pts[1]);
}

#[test]
fn output_is_deterministic() {
    let lines = [Line::new("a", vec![0.0, 0.5, 2.0], vec![3.0, 1.0, 2.0]), Line::indexed("b", vec![1.0, 1.0])];
    let chart = Chart::new("t", "x", "y");
    assert_eq!(render_svg(&lines, &chart).unwrap(), render_svg(&lines, &chart).unwrap());
}

#[test]
fn empty_set_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.svg");
    assert!(matches!(emit_svg_lines(&[], &Chart::default(), &path), Err(CliError::EmptyPlot)));
    assert!(!path.exists());
}
