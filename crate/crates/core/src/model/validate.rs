use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::digraph::{dependency_digraph, detect_cycles};
use super::BdnModel;
use crate::merge::edge_confidence;

/// A validation finding. `E-*` codes make a model unusable downstream,
/// `W-*` codes are advisory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub subjects: Vec<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn new<I, S>(code: &str, message: impl Into<String>, subjects: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Diagnostic {
            code: code.to_string(),
            subjects: subjects.into_iter().map(Into::into).collect(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.code.starts_with("E-")
    }

    pub fn is_warning(&self) -> bool {
        self.code.starts_with("W-")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LintConfig {
    /// Edges whose smoothed confidence falls below this are flagged...
    pub low_confidence_threshold: f64,
    /// ...once they have at least this many observations.
    pub low_confidence_min_observations: usize,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig { low_confidence_threshold: 0.2, low_confidence_min_observations: 5 }
    }
}

pub fn validate(model: &BdnModel) -> Vec<Diagnostic> {
    validate_with(model, &LintConfig::default())
}

/// All diagnostics for `model`, sorted by code then subject ids.
pub fn validate_with(model: &BdnModel, lint: &LintConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_references(model, &mut out);

    for cycle in detect_cycles(&dependency_digraph(model)) {
        out.push(Diagnostic::new("E-CYCLE", format!("dependency cycle {}", cycle.join(" -> ")), cycle));
    }

    for b in model.benefits.values() {
        if b.svm_paths.is_empty() {
            out.push(Diagnostic::new("E-SVM-PATH", format!("benefit {:?} has no svm mapping", b.id), [&b.id]));
        }
        for path in &b.svm_paths {
            if path.depth() < 2 {
                out.push(Diagnostic::new(
                    "E-SVM-PATH",
                    format!("benefit {:?} maps to {path:?}; a value aspect or deeper is required", b.id),
                    [&b.id],
                ));
            } else if let Err(e) = model.taxonomy.resolve(path) {
                out.push(Diagnostic::new("E-SVM-PATH", format!("benefit {:?}: {e}", b.id), [&b.id]));
            }
        }
    }

    let realized: BTreeSet<&str> = model.realization_edges.iter().map(|e| e.benefit_id.as_str()).collect();
    for id in model.benefits.keys() {
        if !realized.contains(id.as_str()) {
            out.push(Diagnostic::new(
                "W-UNREALIZED-BENEFIT",
                format!("benefit {id:?} has no realizing practice"),
                [id],
            ));
        }
    }

    let reaching = practices_reaching_benefits(model);
    for id in model.practices.keys() {
        if !reaching.contains(id.as_str()) {
            out.push(Diagnostic::new("W-ORPHAN-PRACTICE", format!("practice {id:?} leads to no benefit"), [id]));
        }
    }

    for e in &model.realization_edges {
        let n = e.evidence.len();
        if n >= lint.low_confidence_min_observations {
            let confidence = edge_confidence(e);
            if confidence < lint.low_confidence_threshold {
                out.push(Diagnostic::new(
                    "W-LOW-CONFIDENCE",
                    format!(
                        "edge {} -> {} has confidence {confidence:.3} over {n} observations",
                        e.practice_id, e.benefit_id
                    ),
                    [&e.practice_id, &e.benefit_id],
                ));
            }
        }
    }

    finish(out)
}

pub(super) fn finish(mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    diags.sort();
    diags.dedup();
    diags
}

fn check_references(model: &BdnModel, out: &mut Vec<Diagnostic>) {
    let dangling = |owner: &str, kind: &str, missing: &str| {
        Diagnostic::new("E-DANGLING-REF", format!("{owner:?} references unknown {kind} {missing:?}"), [owner, missing])
    };
    for p in model.practices.values() {
        for principle in &p.principle_ids {
            if !model.principles.contains_key(principle) {
                out.push(dangling(&p.id, "principle", principle));
            }
        }
        for g in &p.dependency_groups {
            for m in &g.members {
                if !model.practices.contains_key(m) {
                    out.push(dangling(&p.id, "practice", m));
                }
            }
        }
    }
    for e in &model.realization_edges {
        if !model.practices.contains_key(&e.practice_id) {
            out.push(dangling(&e.benefit_id, "practice", &e.practice_id));
        }
        if !model.benefits.contains_key(&e.benefit_id) {
            out.push(dangling(&e.practice_id, "benefit", &e.benefit_id));
        }
    }
}

/// Practices with a realization edge, plus everything some such practice
/// (transitively) depends on.
fn practices_reaching_benefits(model: &BdnModel) -> BTreeSet<&str> {
    let mut reaching: BTreeSet<&str> = model
        .realization_edges
        .iter()
        .filter(|e| model.practices.contains_key(&e.practice_id))
        .map(|e| e.practice_id.as_str())
        .collect();
    let mut stack: Vec<&str> = reaching.iter().copied().collect();
    while let Some(id) = stack.pop() {
        let Some(p) = model.practices.get(id) else { continue };
        for m in p.dependency_groups.iter().flat_map(|g| &g.members) {
            if model.practices.contains_key(m) && reaching.insert(m) {
                stack.push(m);
            }
        }
    }
    reaching
}
