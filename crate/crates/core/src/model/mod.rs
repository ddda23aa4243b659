//! The benefits-dependency-network model and its validation diagnostics.

mod digraph;
mod document;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::taxonomy::{SvmPath, SvmTaxonomy};

pub use digraph::{dependency_digraph, detect_cycles, DependencyDigraph};
pub use document::{parse_model, parse_model_with, serialize_model, BUILTIN_TAXONOMY};
pub use validate::{validate, validate_with, Diagnostic, LintConfig};

pub type PracticeId = String;
pub type BenefitId = String;
pub type PrincipleId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Literature,
    InPractice,
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProvenanceKind {
    #[serde(rename = "literature")]
    LiteratureRef,
    #[serde(rename = "case")]
    CaseRef,
}

/// Where a model element came from: a citation key or a case id such as `c1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: ProvenanceKind,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Provenance {
    pub fn literature(label: impl Into<String>) -> Self {
        Provenance { kind: ProvenanceKind::LiteratureRef, label: label.into(), note: None }
    }

    pub fn case(label: impl Into<String>) -> Self {
        Provenance { kind: ProvenanceKind::CaseRef, label: label.into(), note: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Principle {
    pub id: PrincipleId,
    pub name: String,
    pub description: String,
    pub provenance: Vec<Provenance>,
}

/// One alternative way of satisfying a practice's prerequisites: every
/// member is required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGroup {
    pub members: BTreeSet<PracticeId>,
    pub provenance: Vec<Provenance>,
}

impl DependencyGroup {
    pub fn new<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        DependencyGroup { members: members.into_iter().map(Into::into).collect(), provenance: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Practice {
    pub id: PracticeId,
    pub name: String,
    pub description: String,
    pub principle_ids: BTreeSet<PrincipleId>,
    /// Alternatives; empty means no prerequisites.
    pub dependency_groups: Vec<DependencyGroup>,
    pub provenance: Vec<Provenance>,
}

impl Practice {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        Practice {
            id: id.into(),
            name: name.into(),
            description: String::new(),
            principle_ids: BTreeSet::new(),
            dependency_groups: vec![],
            provenance: vec![],
        }
    }

    pub fn with_group<I, S>(mut self, members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.dependency_groups.push(DependencyGroup::new(members));
        self
    }

    /// Satisfied when there are no groups or one group lies inside `have`.
    pub fn prerequisites_met(&self, have: impl Fn(&str) -> bool) -> bool {
        self.dependency_groups.is_empty() || self.dependency_groups.iter().any(|g| g.members.iter().all(|m| have(m)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Benefit {
    pub id: BenefitId,
    pub name: String,
    pub svm_paths: Vec<SvmPath>,
    /// The SVM mapping is a stand-in; the benefit is kept out of value
    /// tracing and attainment until it is classified.
    pub svm_placeholder: bool,
    pub provenance: Vec<Provenance>,
}

impl Benefit {
    pub fn new(id: impl Into<String>, name: impl Into<String>, svm_paths: Vec<SvmPath>) -> Self {
        Benefit { id: id.into(), name: name.into(), svm_paths, svm_placeholder: false, provenance: vec![] }
    }

    /// SVM paths that count for tracing and attainment.
    pub fn classified_paths(&self) -> &[SvmPath] {
        if self.svm_placeholder {
            &[]
        } else {
            &self.svm_paths
        }
    }
}

/// An observed outcome for one realization edge: after the practice was in
/// place, was the benefit observed?
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub case: String,
    pub observed: bool,
    pub date: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationEdge {
    pub practice_id: PracticeId,
    pub benefit_id: BenefitId,
    pub provenance: Vec<Provenance>,
    pub evidence: Vec<EvidenceRecord>,
}

impl RealizationEdge {
    pub fn new(practice: impl Into<String>, benefit: impl Into<String>) -> Self {
        RealizationEdge {
            practice_id: practice.into(),
            benefit_id: benefit.into(),
            provenance: vec![],
            evidence: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxonomySource {
    /// `{"builtin": "svm-default"}` in the document.
    Builtin,
    Inline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BdnModel {
    pub context: String,
    pub origin: Origin,
    pub taxonomy: SvmTaxonomy,
    pub taxonomy_source: TaxonomySource,
    pub principles: BTreeMap<PrincipleId, Principle>,
    pub practices: BTreeMap<PracticeId, Practice>,
    pub benefits: BTreeMap<BenefitId, Benefit>,
    /// Sorted by (practice, benefit).
    pub realization_edges: Vec<RealizationEdge>,
}

impl BdnModel {
    pub fn new(context: impl Into<String>, origin: Origin, taxonomy: SvmTaxonomy) -> Self {
        BdnModel {
            context: context.into(),
            origin,
            taxonomy,
            taxonomy_source: TaxonomySource::Inline,
            principles: BTreeMap::new(),
            practices: BTreeMap::new(),
            benefits: BTreeMap::new(),
            realization_edges: vec![],
        }
    }

    pub fn add_practice(&mut self, practice: Practice) {
        self.practices.insert(practice.id.clone(), practice);
    }

    pub fn add_benefit(&mut self, benefit: Benefit) {
        self.benefits.insert(benefit.id.clone(), benefit);
    }

    /// Inserts or replaces the edge for this pair, keeping edges sorted.
    pub fn add_edge(&mut self, edge: RealizationEdge) {
        match self.edge_position(&edge.practice_id, &edge.benefit_id) {
            Ok(i) => self.realization_edges[i] = edge,
            Err(i) => self.realization_edges.insert(i, edge),
        }
    }

    pub fn sort_edges(&mut self) {
        self.realization_edges.sort_by(|a, b| (&a.practice_id, &a.benefit_id).cmp(&(&b.practice_id, &b.benefit_id)));
    }

    fn edge_position(&self, practice: &str, benefit: &str) -> Result<usize, usize> {
        self.realization_edges
            .binary_search_by(|e| (e.practice_id.as_str(), e.benefit_id.as_str()).cmp(&(practice, benefit)))
    }

    pub fn edge(&self, practice: &str, benefit: &str) -> Option<&RealizationEdge> {
        self.edge_position(practice, benefit).ok().map(|i| &self.realization_edges[i])
    }

    pub(crate) fn edge_mut(&mut self, practice: &str, benefit: &str) -> Option<&mut RealizationEdge> {
        self.edge_position(practice, benefit).ok().map(move |i| &mut self.realization_edges[i])
    }

    /// Practices with a realization edge into `benefit`, sorted.
    pub fn realizers(&self, benefit: &str) -> BTreeSet<PracticeId> {
        self.realization_edges.iter().filter(|e| e.benefit_id == benefit).map(|e| e.practice_id.clone()).collect()
    }

    /// Benefits whose classified SVM paths are equal to or below `anchor`.
    pub fn benefits_under(&self, anchor: &SvmPath) -> BTreeSet<BenefitId> {
        self.benefits
            .values()
            .filter(|b| b.classified_paths().iter().any(|p| p.starts_with(anchor)))
            .map(|b| b.id.clone())
            .collect()
    }
}
