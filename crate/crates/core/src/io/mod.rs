//! Canonical model documents, DOT export and report rendering.

mod dot;
mod json;
mod report;

pub use crate::model::serialize_model;
pub use dot::{export_dot, mangle_ids, DotOptions};
pub use json::{json_document, PlanDocument};
pub use report::{export_report, parse_report_json, ReportFormat};
