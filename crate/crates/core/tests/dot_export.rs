use vaspi::assessment::AdoptionState;
use vaspi::fixtures;
use vaspi::io::{export_dot, DotOptions};
use vaspi_testkit::dot;

#[test]
fn fixture_dot_parses() {
    let model = fixtures::deployment();
    for include_svm in [false, true] {
        let options = DotOptions {
            include_svm,
            color_by_adoption: Some(AdoptionState::adopted("deployment", ["continuous-integration"])),
        };
        let text = export_dot(&model, &options);
        let summary = dot::parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(summary.nodes.len(), 10);
        // Two dependency edges and nine realization edges.
        assert_eq!(summary.edges.len(), 11);
        assert!(summary
            .edges
            .contains(&("continuous_integration".to_string(), "b4_increase_productivity".to_string())));
        assert!(summary.edges.contains(&("automated_deployment".to_string(), "continuous_deployment".to_string())));
        assert_eq!(summary.subgraphs.is_empty(), !include_svm);
    }
}

#[test]
fn tokenizer_rejects_malformed_input() {
    assert!(dot::parse("digraph { a -> }").is_err());
    assert!(dot::parse("digraph { \"open }").is_err());
    assert!(dot::parse("graph { a }").is_err());
    assert!(dot::parse("digraph g { a [shape=box]; a -> b [style=dashed]; }").is_ok());
}
