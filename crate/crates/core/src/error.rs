use thiserror::Error;

use crate::model::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("svm path {path:?} not found (deepest matched prefix: {matched:?})")]
    PathNotFound { path: String, matched: String },
    #[error("invalid svm path {path:?}: {reason}")]
    InvalidPath { path: String, reason: String },
    #[error("taxonomy document: {0}")]
    TaxonomyParse(String),
    #[error("duplicate sibling {name:?} under {parent:?}")]
    DuplicateSibling { parent: String, name: String },
    #[error("taxonomy deeper than four levels at {0:?}")]
    DepthExceeded(String),
    #[error("unknown practice {0:?}")]
    UnknownPractice(String),
    #[error("unknown benefit {0:?}")]
    UnknownBenefit(String),
    #[error("target {0:?} is neither a benefit id nor a resolvable svm path")]
    UnknownTarget(String),
    #[error("target {0:?} has no realizing practice")]
    UnreachableTarget(String),
    #[error("no realization edge {practice:?} -> {benefit:?}")]
    UnknownEdge { practice: String, benefit: String },
    #[error("merged dependency graph is cyclic: {}", .0.join(" -> "))]
    MergeCycle(Vec<String>),
    #[error("taxonomies cannot be reconciled: {0}")]
    TaxonomyMismatch(String),
    #[error("alias table: {0}")]
    AliasTable(String),
    #[error("model has {} error diagnostic(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidModel(Vec<Diagnostic>),
    #[error("document: {0}")]
    Document(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable machine-readable code, in the same `E-*` family as diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PathNotFound { .. } => "E-PATH-NOT-FOUND",
            Error::InvalidPath { .. } => "E-SVM-PATH",
            Error::TaxonomyParse(_) => "E-PARSE",
            Error::DuplicateSibling { .. } => "E-DUPLICATE-SIBLING",
            Error::DepthExceeded(_) => "E-DEPTH-EXCEEDED",
            Error::UnknownPractice(_) => "E-UNKNOWN-PRACTICE",
            Error::UnknownBenefit(_) => "E-UNKNOWN-BENEFIT",
            Error::UnknownTarget(_) => "E-UNKNOWN-TARGET",
            Error::UnreachableTarget(_) => "E-UNREACHABLE-TARGET",
            Error::UnknownEdge { .. } => "E-UNKNOWN-EDGE",
            Error::MergeCycle(_) => "E-MERGE-CYCLE",
            Error::TaxonomyMismatch(_) => "E-TAXONOMY-MISMATCH",
            Error::AliasTable(_) => "E-ALIAS-TABLE",
            Error::InvalidModel(_) => "E-INVALID-MODEL",
            Error::Document(_) => "E-PARSE",
            Error::InvalidConfig(_) => "E-CONFIG",
        }
    }
}
