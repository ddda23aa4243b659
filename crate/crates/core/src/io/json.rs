use serde::{Deserialize, Serialize};

use crate::assessment::{PlanMode, PlanStep};

/// Pretty-printed JSON with a trailing newline.
pub fn json_document<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("document types always serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub target: String,
    pub mode: PlanMode,
    pub steps: Vec<PlanStep>,
}
