use std::io::{Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use vaspi::assessment::{assess, plan, recommend_next, AdoptionState, AdoptionStatus, PlanTarget};
use vaspi::graph::{layering, trace_value};
use vaspi::io::{export_dot, export_report, json_document, serialize_model, DotOptions, PlanDocument, ReportFormat};
use vaspi::merge::{edge_confidence, match_models, merge_models, AliasTable, MergePolicy};
use vaspi::model::{parse_model, Benefit};
use vaspi::taxonomy::default_taxonomy;
use vaspi::{fixtures, AssessmentConfig, PlanMode, SvmPath};

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/deployment.bdn.json")
}

fn vaspi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vaspi"))
        .args(args)
        .env_remove("VASPI_TAXONOMY")
        .env("NO_COLOR", "1")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

struct Files {
    dir: tempfile::TempDir,
}

impl Files {
    fn new() -> Self {
        Files { dir: tempfile::tempdir().unwrap() }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let path = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_str().unwrap().to_string()
    }
}

#[test]
fn validate_fixture_is_clean() {
    let out = vaspi(&["validate", fixture_path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stderr(&out), "");
    assert_eq!(stdout(&out), "");
}

#[test]
fn validate_exit_codes() {
    let files = Files::new();
    let mut model = fixtures::deployment();
    model.add_benefit(Benefit::new("b9-orphan", "Orphan", vec![SvmPath::parse("Customer/Perceived value").unwrap()]));
    let warned = files.write("warned.json", &serialize_model(&model));
    let out = vaspi(&["validate", &warned]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("W-UNREALIZED-BENEFIT [b9-orphan]"));
    assert_eq!(vaspi(&["--strict", "validate", &warned]).status.code(), Some(1));

    let json = vaspi(&["validate", "--json", &warned]);
    let diags: Vec<vaspi::Diagnostic> = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(diags.len(), 1);

    let mut cyclic = fixtures::deployment();
    let ad = cyclic.practices.remove("automated-deployment").unwrap();
    cyclic.add_practice(ad.with_group(["continuous-deployment"]));
    let cyclic = files.write("cyclic.json", &serialize_model(&cyclic));
    let out = vaspi(&["validate", &cyclic]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("E-CYCLE"), "{}", stderr(&out));

    assert_eq!(vaspi(&["validate", &files.path("missing.json")]).status.code(), Some(2));
    assert_eq!(vaspi(&["validate", &warned, "--bogus"]).status.code(), Some(2));
    assert_eq!(vaspi(&["trace", &warned]).status.code(), Some(2));
}

#[test]
fn taxonomy_override_from_environment() {
    let files = Files::new();
    let mut taxonomy = default_taxonomy();
    taxonomy.perspectives.retain(|p| p.name != "Innovation and learning");
    let tax = files.write("taxonomy.json", &taxonomy.to_document());
    let out = Command::new(env!("CARGO_BIN_EXE_vaspi"))
        .args(["validate", fixture_path().to_str().unwrap()])
        .env("VASPI_TAXONOMY", &tax)
        .env("NO_COLOR", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("E-SVM-PATH"));
}

#[test]
fn read_commands_match_library() {
    let files = Files::new();
    let model = fixtures::deployment();
    let fixture = fixture_path();
    let fixture = fixture.to_str().unwrap();
    let mut adoption = AdoptionState::new("deployment");
    adoption.set("continuous-integration", AdoptionStatus::Adopted);
    adoption.set("automated-deployment", AdoptionStatus::InProgress);
    let adoption_file = files.write("adoption.json", &adoption.to_json());
    let empty = files.write("empty.json", "{}");

    let layers = vaspi(&["layers", fixture]);
    assert_eq!(stdout(&layers), json_document(&std::collections::BTreeMap::from([("layers", layering(&model))])));

    for value in ["Customer/Perceived value", "Internal Business Process", "Innovation and learning"] {
        let out = vaspi(&["trace", fixture, "--value", value]);
        assert_eq!(stdout(&out), json_document(&trace_value(&model, &SvmPath::parse(value).unwrap()).unwrap()));
    }

    for (format, fmt) in [("json", ReportFormat::Json), ("markdown", ReportFormat::Markdown)] {
        let out = vaspi(&["assess", fixture, "--adoption", &adoption_file, "--format", format]);
        let direct = assess(&model, &adoption, &AssessmentConfig::default()).unwrap();
        assert_eq!(stdout(&out), export_report(&direct, fmt));
    }
    let weighted = vaspi(&["assess", fixture, "--adoption", &adoption_file, "--partial-weight", "0.25"]);
    let direct = assess(&model, &adoption, &AssessmentConfig::with_partial_weight(0.25).unwrap()).unwrap();
    assert_eq!(stdout(&weighted), export_report(&direct, ReportFormat::Json));
    assert_eq!(
        vaspi(&["assess", fixture, "--adoption", &adoption_file, "--partial-weight", "2"]).status.code(),
        Some(1)
    );

    let out = vaspi(&["plan", fixture, "--adoption", &empty, "--target", "b2-cost-saving"]);
    let steps = plan(
        &model,
        &AdoptionState::default(),
        &PlanTarget::Benefit("b2-cost-saving".into()),
        &AssessmentConfig::default(),
    )
    .unwrap();
    let doc: PlanDocument = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc.steps.len(), 3);
    assert_eq!(doc.steps.last().unwrap().practice, "continuous-deployment");
    assert_eq!(doc.steps, steps);

    let full =
        vaspi(&["plan", fixture, "--adoption", &adoption_file, "--target", "Customer/Perceived value", "--full"]);
    let doc: PlanDocument = serde_json::from_str(&stdout(&full)).unwrap();
    assert_eq!(doc.mode, PlanMode::Full);
    assert_eq!(doc.target, "Customer/Perceived value");
    assert_eq!(vaspi(&["plan", fixture, "--adoption", &empty, "--target", "nope"]).status.code(), Some(1));

    let out = vaspi(&["recommend", fixture, "--adoption", &empty, "-k", "1"]);
    assert_eq!(stdout(&out), json_document(&recommend_next(&model, &AdoptionState::default(), 1).unwrap()));

    let out = vaspi(&["export", "dot", fixture, "--adoption", &adoption_file, "--svm-clusters"]);
    let options = DotOptions { include_svm: true, color_by_adoption: Some(adoption.clone()) };
    assert_eq!(stdout(&out), export_dot(&model, &options));
    let plain = stdout(&vaspi(&["export", "dot", fixture]));
    assert!(plain.contains("\"continuous_integration\" -> \"b4_increase_productivity\""));

    let unknown = files.write("unknown.json", r#"{"statuses": {"ghost": "adopted"}}"#);
    let out = vaspi(&["assess", fixture, "--adoption", &unknown]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("E-UNKNOWN-PRACTICE"));
}

#[test]
fn merge_writes_joint_model() {
    let files = Files::new();
    let left = fixtures::deployment();
    let mut right = fixtures::deployment();
    right.context = "case company".into();
    right.origin = vaspi::Origin::InPractice;
    let right_file = files.write("right.json", &serialize_model(&right));
    let aliases = files.write("aliases.json", r#"{"practices": {"CI": "continuous integration"}}"#);
    let out_file = files.path("joint.json");
    let out = vaspi(&["merge", fixture_path().to_str().unwrap(), &right_file, "--aliases", &aliases, "-o", &out_file]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = match_models(
        &left,
        &right,
        &AliasTable::from_json(r#"{"practices": {"CI": "continuous integration"}}"#).unwrap(),
    );
    assert_eq!(stdout(&out), json_document(&report));
    let joint = merge_models(&left, &right, &report, MergePolicy::UnionGroups).unwrap();
    assert_eq!(std::fs::read_to_string(&out_file).unwrap(), serialize_model(&joint));
}

#[test]
fn evidence_add_updates_confidence() {
    let files = Files::new();
    let mut current = fixture_path().to_str().unwrap().to_string();
    for (i, observed) in ["true", "true", "false", "true"].iter().enumerate() {
        let next = files.path(&format!("m{i}.json"));
        let out = vaspi(&[
            "evidence",
            "add",
            &current,
            "--practice",
            "continuous-integration",
            "--benefit",
            "b4-increase-productivity",
            "--case",
            &format!("case-{i}"),
            "--observed",
            observed,
            "--date",
            "2024-03-01",
            "-o",
            &next,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        current = next;
    }
    let model = parse_model(&std::fs::read_to_string(&current).unwrap()).unwrap();
    let edge = model.edge("continuous-integration", "b4-increase-productivity").unwrap();
    assert!((edge_confidence(edge) - 2.0 / 3.0).abs() < 1e-12);

    let bad_date = vaspi(&[
        "evidence",
        "add",
        &current,
        "--practice",
        "continuous-integration",
        "--benefit",
        "b4-increase-productivity",
        "--case",
        "x",
        "--observed",
        "true",
        "--date",
        "yesterday",
        "-o",
        &files.path("x.json"),
    ]);
    assert_eq!(bad_date.status.code(), Some(1));
    let no_edge = vaspi(&[
        "evidence",
        "add",
        &current,
        "--practice",
        "automated-deployment",
        "--benefit",
        "b4-increase-productivity",
        "--case",
        "x",
        "--observed",
        "true",
        "--date",
        "2024-03-01",
        "-o",
        &files.path("x.json"),
    ]);
    assert_eq!(no_edge.status.code(), Some(1));
    assert!(stderr(&no_edge).contains("E-UNKNOWN-EDGE"));
}

#[test]
fn serve_answers_requests() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_vaspi"))
        .args(["serve", fixture_path().to_str().unwrap(), "--port", &port.to_string()])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let response = loop {
        if let Ok(mut stream) = TcpStream::connect(("127.0.0.1", port)) {
            stream.write_all(b"GET /api/layers HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
            let mut text = String::new();
            stream.read_to_string(&mut text).unwrap();
            break text;
        }
        assert!(Instant::now() < deadline, "server did not start");
        std::thread::sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("continuous-deployment"));
}
