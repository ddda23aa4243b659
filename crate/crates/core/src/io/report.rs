use std::collections::BTreeSet;
use std::fmt::Write;

use crate::assessment::{AssessmentReport, RealizationStatus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn export_report(report: &AssessmentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => super::json_document(report),
        ReportFormat::Markdown => markdown(report),
    }
}

pub fn parse_report_json(text: &str) -> Result<AssessmentReport> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

fn status_label(status: RealizationStatus) -> &'static str {
    match status {
        RealizationStatus::Unrealized => "unrealized",
        RealizationStatus::PartiallyRealized => "partially realized",
        RealizationStatus::FullyRealized => "fully realized",
    }
}

fn id_list(ids: &BTreeSet<String>) -> String {
    if ids.is_empty() {
        "-".to_string()
    } else {
        ids.iter().cloned().collect::<Vec<_>>().join(", ")
    }
}

fn bullets(out: &mut String, title: &str, ids: &BTreeSet<String>) {
    let _ = writeln!(out, "## {title}\n");
    if ids.is_empty() {
        out.push_str("_none_\n");
    }
    for id in ids {
        let _ = writeln!(out, "- {id}");
    }
    out.push('\n');
}

fn markdown(r: &AssessmentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Assessment: {}\n", r.context);
    if !r.generated_at.is_empty() {
        let _ = writeln!(out, "Generated at {}\n", r.generated_at);
    }
    bullets(&mut out, "Enabled", &r.enabled);
    if !r.inconsistent.is_empty() {
        bullets(&mut out, "Inconsistent (adopted, prerequisites not enabled)", &r.inconsistent);
    }
    if !r.in_progress.is_empty() {
        bullets(&mut out, "In Progress", &r.in_progress);
    }
    bullets(&mut out, "Frontier", &r.frontier);

    out.push_str("## Benefits\n\n");
    out.push_str("| Benefit | Status | Active realizers | Inactive realizers |\n");
    out.push_str("|---|---|---|---|\n");
    for b in &r.benefit_statuses {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            b.benefit,
            status_label(b.status),
            id_list(&b.active_realizers),
            id_list(&b.inactive_realizers)
        );
    }

    out.push_str("\n## Value Attainment\n\n");
    out.push_str("| SVM node | Score |\n|---|---:|\n");
    for (node, score) in &r.value_attainment {
        let _ = writeln!(out, "| {node} | {score:.2} |");
    }

    out.push_str("\n## Layer Coverage\n\n");
    out.push_str("| Layer | Enabled | Practices | Coverage |\n|---:|---:|---:|---:|\n");
    for l in &r.layer_coverage {
        let _ = writeln!(out, "| {} | {} | {} | {:.2} |", l.layer, l.enabled, l.practices, l.fraction);
    }

    out.push_str("\n## Recommendations\n\n");
    if r.recommendations.is_empty() {
        out.push_str("_none_\n");
    }
    for (i, rec) in r.recommendations.iter().enumerate() {
        let plural = if rec.unlocks == 1 { "" } else { "s" };
        let _ = writeln!(out, "{}. {} (improves {} benefit{plural})", i + 1, rec.practice, rec.unlocks);
    }
    out
}
