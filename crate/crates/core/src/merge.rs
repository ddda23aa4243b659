//! Matching and merging models of different origin, and evolving
//! realization edges with observed evidence.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::canonical_key;
use crate::model::{
    dependency_digraph, detect_cycles, validate, BdnModel, Benefit, DependencyGroup, Origin, Practice, Principle,
    RealizationEdge, TaxonomySource,
};

pub use crate::model::EvidenceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Principle,
    Practice,
    Benefit,
}

/// Alias → preferred name, per element kind, on canonical keys.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasTable {
    #[serde(default)]
    pub practices: BTreeMap<String, String>,
    #[serde(default)]
    pub benefits: BTreeMap<String, String>,
    #[serde(default)]
    pub principles: BTreeMap<String, String>,
}

impl AliasTable {
    /// Canonicalizes both sides of every entry and rejects alias chains.
    pub fn new(
        practices: BTreeMap<String, String>,
        benefits: BTreeMap<String, String>,
        principles: BTreeMap<String, String>,
    ) -> Result<Self> {
        fn normalize(kind: &str, raw: BTreeMap<String, String>) -> Result<BTreeMap<String, String>> {
            let map: BTreeMap<String, String> =
                raw.into_iter().map(|(a, p)| (canonical_key(&a), canonical_key(&p))).filter(|(a, p)| a != p).collect();
            if let Some(target) = map.values().find(|p| map.contains_key(*p)) {
                return Err(Error::AliasTable(format!("{kind} alias target {target:?} is itself an alias")));
            }
            Ok(map)
        }
        Ok(AliasTable {
            practices: normalize("practice", practices)?,
            benefits: normalize("benefit", benefits)?,
            principles: normalize("principle", principles)?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: AliasTable = serde_json::from_str(text).map_err(|e| Error::AliasTable(e.to_string()))?;
        AliasTable::new(raw.practices, raw.benefits, raw.principles)
    }

    /// Matching key for a name of the given kind.
    pub fn key(&self, kind: ElementKind, name: &str) -> String {
        let key = canonical_key(name);
        let table = match kind {
            ElementKind::Practice => &self.practices,
            ElementKind::Benefit => &self.benefits,
            ElementKind::Principle => &self.principles,
        };
        table.get(&key).cloned().unwrap_or(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchedPair {
    pub kind: ElementKind,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdsByKind {
    pub principles: Vec<String>,
    pub practices: Vec<String>,
    pub benefits: Vec<String>,
}

impl IdsByKind {
    fn get_mut(&mut self, kind: ElementKind) -> &mut Vec<String> {
        match kind {
            ElementKind::Principle => &mut self.principles,
            ElementKind::Practice => &mut self.practices,
            ElementKind::Benefit => &mut self.benefits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyConflict {
    pub practice_key: String,
    pub left_groups: Vec<Vec<String>>,
    pub right_groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SvmConflict {
    pub benefit_key: String,
    pub left_paths: Vec<String>,
    pub right_paths: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matched: Vec<MatchedPair>,
    pub left_only: IdsByKind,
    pub right_only: IdsByKind,
    pub dependency_conflicts: Vec<DependencyConflict>,
    pub svm_conflicts: Vec<SvmConflict>,
}

impl MatchReport {
    fn right_to_left(&self, kind: ElementKind) -> BTreeMap<&str, &str> {
        self.matched.iter().filter(|m| m.kind == kind).map(|m| (m.right.as_str(), m.left.as_str())).collect()
    }
}

fn names(model: &BdnModel, kind: ElementKind) -> Vec<(&str, &str)> {
    match kind {
        ElementKind::Principle => model.principles.values().map(|p| (p.id.as_str(), p.name.as_str())).collect(),
        ElementKind::Practice => model.practices.values().map(|p| (p.id.as_str(), p.name.as_str())).collect(),
        ElementKind::Benefit => model.benefits.values().map(|b| (b.id.as_str(), b.name.as_str())).collect(),
    }
}

/// Pairs elements of the same kind whose names share a key after alias
/// substitution, and records where matched elements disagree.
pub fn match_models(left: &BdnModel, right: &BdnModel, aliases: &AliasTable) -> MatchReport {
    let mut report = MatchReport::default();
    for kind in [ElementKind::Principle, ElementKind::Practice, ElementKind::Benefit] {
        let by_key = |model| {
            let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for (id, name) in names(model, kind) {
                map.entry(aliases.key(kind, name)).or_default().push(id.to_string());
            }
            map
        };
        let (l, r) = (by_key(left), by_key(right));
        let keys: BTreeSet<&String> = l.keys().chain(r.keys()).collect();
        for key in keys {
            let empty = Vec::new();
            let (lids, rids) = (l.get(key).unwrap_or(&empty), r.get(key).unwrap_or(&empty));
            for (a, b) in lids.iter().zip(rids) {
                report.matched.push(MatchedPair { kind, left: a.clone(), right: b.clone() });
            }
            report.left_only.get_mut(kind).extend(lids.iter().skip(rids.len()).cloned());
            report.right_only.get_mut(kind).extend(rids.iter().skip(lids.len()).cloned());
        }
        report.left_only.get_mut(kind).sort();
        report.right_only.get_mut(kind).sort();
    }
    report.matched.sort();

    let practice_key = |model: &BdnModel, id: &str| {
        model.practices.get(id).map_or_else(|| canonical_key(id), |p| aliases.key(ElementKind::Practice, &p.name))
    };
    for m in report.matched.iter().filter(|m| m.kind == ElementKind::Practice) {
        let (lp, rp) = (&left.practices[&m.left], &right.practices[&m.right]);
        let keyed = |model, p: &Practice| -> BTreeSet<BTreeSet<String>> {
            p.dependency_groups.iter().map(|g| g.members.iter().map(|id| practice_key(model, id)).collect()).collect()
        };
        if keyed(left, lp) != keyed(right, rp) {
            let raw = |p: &Practice| -> Vec<Vec<String>> {
                p.dependency_groups.iter().map(|g| g.members.iter().cloned().collect()).collect()
            };
            report.dependency_conflicts.push(DependencyConflict {
                practice_key: aliases.key(ElementKind::Practice, &lp.name),
                left_groups: raw(lp),
                right_groups: raw(rp),
            });
        }
    }
    for m in report.matched.iter().filter(|m| m.kind == ElementKind::Benefit) {
        let (lb, rb) = (&left.benefits[&m.left], &right.benefits[&m.right]);
        let keyed = |b: &Benefit| -> BTreeSet<Vec<String>> { b.svm_paths.iter().map(|p| p.key()).collect() };
        if keyed(lb) != keyed(rb) {
            let text = |b: &Benefit| b.svm_paths.iter().map(ToString::to_string).collect();
            report.svm_conflicts.push(SvmConflict {
                benefit_key: aliases.key(ElementKind::Benefit, &lb.name),
                left_paths: text(lb),
                right_paths: text(rb),
            });
        }
    }
    report
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MergePolicy {
    /// Matched practices keep every input group as an alternative.
    #[default]
    UnionGroups,
}

fn extend_dedup<T: PartialEq + Clone>(into: &mut Vec<T>, from: &[T]) {
    for item in from {
        if !into.contains(item) {
            into.push(item.clone());
        }
    }
}

fn dedup<T: PartialEq + Clone>(items: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(items.len());
    extend_dedup(&mut out, items);
    out
}

/// Assigns joint ids to right-hand elements: matched ones take the left id,
/// the rest keep theirs unless it is taken, then get a `-2`, `-3`... suffix.
fn joint_ids<'a>(
    matched: BTreeMap<&'a str, &'a str>,
    left_ids: impl Iterator<Item = &'a String>,
    right_ids: impl Iterator<Item = &'a String>,
) -> BTreeMap<String, String> {
    let mut used: BTreeSet<String> = left_ids.cloned().collect();
    let mut map = BTreeMap::new();
    for id in right_ids {
        if let Some(left) = matched.get(id.as_str()) {
            map.insert(id.clone(), left.to_string());
            continue;
        }
        let mut candidate = id.clone();
        let mut n = 2;
        while used.contains(&candidate) {
            candidate = format!("{id}-{n}");
            n += 1;
        }
        used.insert(candidate.clone());
        map.insert(id.clone(), candidate);
    }
    map
}

/// Builds the joint model: unions of all elements keyed by match, with
/// matched practices carrying both inputs' dependency groups as
/// alternatives.
pub fn merge_models(left: &BdnModel, right: &BdnModel, report: &MatchReport, policy: MergePolicy) -> Result<BdnModel> {
    let MergePolicy::UnionGroups = policy;
    for m in &report.matched {
        let known = match m.kind {
            ElementKind::Principle => left.principles.contains_key(&m.left) && right.principles.contains_key(&m.right),
            ElementKind::Practice => left.practices.contains_key(&m.left) && right.practices.contains_key(&m.right),
            ElementKind::Benefit => left.benefits.contains_key(&m.left) && right.benefits.contains_key(&m.right),
        };
        if !known {
            return Err(Error::Document(format!(
                "match report pairs {:?} with {:?}, which these models do not contain",
                m.left, m.right
            )));
        }
    }

    let (taxonomy, taxonomy_source) = reconcile_taxonomies(left, right)?;
    let principle_ids =
        joint_ids(report.right_to_left(ElementKind::Principle), left.principles.keys(), right.principles.keys());
    let practice_ids =
        joint_ids(report.right_to_left(ElementKind::Practice), left.practices.keys(), right.practices.keys());
    let benefit_ids =
        joint_ids(report.right_to_left(ElementKind::Benefit), left.benefits.keys(), right.benefits.keys());
    let map = |table: &BTreeMap<String, String>, id: &str| table.get(id).cloned().unwrap_or_else(|| id.to_string());

    let context = if canonical_key(&left.context) == canonical_key(&right.context) {
        left.context.clone()
    } else {
        format!("{} + {}", left.context, right.context)
    };
    let mut joint = BdnModel::new(context, Origin::Joint, taxonomy);
    joint.taxonomy_source = taxonomy_source;

    for p in left.principles.values() {
        joint.principles.insert(p.id.clone(), Principle { provenance: dedup(&p.provenance), ..p.clone() });
    }
    for p in right.principles.values() {
        let id = map(&principle_ids, &p.id);
        match joint.principles.get_mut(&id) {
            Some(existing) => {
                extend_dedup(&mut existing.provenance, &p.provenance);
                if existing.description.is_empty() {
                    existing.description = p.description.clone();
                }
            }
            None => {
                joint.principles.insert(id.clone(), Principle { id, provenance: dedup(&p.provenance), ..p.clone() });
            }
        }
    }

    for p in left.practices.values() {
        let mut practice = Practice { provenance: dedup(&p.provenance), dependency_groups: vec![], ..p.clone() };
        union_groups(&mut practice.dependency_groups, &p.dependency_groups);
        joint.add_practice(practice);
    }
    for p in right.practices.values() {
        let id = map(&practice_ids, &p.id);
        let groups: Vec<DependencyGroup> = p
            .dependency_groups
            .iter()
            .map(|g| DependencyGroup {
                members: g.members.iter().map(|m| map(&practice_ids, m)).collect(),
                provenance: g.provenance.clone(),
            })
            .collect();
        let principles: BTreeSet<String> = p.principle_ids.iter().map(|x| map(&principle_ids, x)).collect();
        match joint.practices.get_mut(&id) {
            Some(existing) => {
                union_groups(&mut existing.dependency_groups, &groups);
                existing.principle_ids.extend(principles);
                extend_dedup(&mut existing.provenance, &p.provenance);
                if existing.description.is_empty() {
                    existing.description = p.description.clone();
                }
            }
            None => {
                let mut practice = Practice {
                    id,
                    principle_ids: principles,
                    dependency_groups: vec![],
                    provenance: dedup(&p.provenance),
                    ..p.clone()
                };
                union_groups(&mut practice.dependency_groups, &groups);
                joint.add_practice(practice);
            }
        }
    }

    for b in left.benefits.values() {
        joint.add_benefit(Benefit {
            provenance: dedup(&b.provenance),
            svm_paths: dedup_paths(&b.svm_paths),
            ..b.clone()
        });
    }
    for b in right.benefits.values() {
        let id = map(&benefit_ids, &b.id);
        match joint.benefits.get_mut(&id) {
            Some(existing) => {
                match (existing.svm_placeholder, b.svm_placeholder) {
                    (true, false) => {
                        existing.svm_paths = dedup_paths(&b.svm_paths);
                        existing.svm_placeholder = false;
                    }
                    (false, true) => {}
                    _ => {
                        let mut paths = existing.svm_paths.clone();
                        paths.extend(b.svm_paths.iter().cloned());
                        existing.svm_paths = dedup_paths(&paths);
                    }
                }
                extend_dedup(&mut existing.provenance, &b.provenance);
            }
            None => joint.add_benefit(Benefit {
                id,
                provenance: dedup(&b.provenance),
                svm_paths: dedup_paths(&b.svm_paths),
                ..b.clone()
            }),
        }
    }

    for e in &left.realization_edges {
        joint.add_edge(RealizationEdge { provenance: dedup(&e.provenance), evidence: dedup(&e.evidence), ..e.clone() });
    }
    for e in &right.realization_edges {
        let (p, b) = (map(&practice_ids, &e.practice_id), map(&benefit_ids, &e.benefit_id));
        match joint.edge_mut(&p, &b) {
            Some(existing) => {
                extend_dedup(&mut existing.provenance, &e.provenance);
                extend_dedup(&mut existing.evidence, &e.evidence);
            }
            None => joint.add_edge(RealizationEdge {
                practice_id: p,
                benefit_id: b,
                provenance: dedup(&e.provenance),
                evidence: dedup(&e.evidence),
            }),
        }
    }

    if let Some(cycle) = detect_cycles(&dependency_digraph(&joint)).into_iter().next() {
        return Err(Error::MergeCycle(cycle));
    }
    let diags = validate(&joint);
    if diags.iter().any(|d| d.is_error()) {
        return Err(Error::InvalidModel(diags));
    }
    Ok(joint)
}

/// Appends groups not already present (by member set), merging provenance of
/// equal ones.
fn union_groups(into: &mut Vec<DependencyGroup>, from: &[DependencyGroup]) {
    for g in from {
        match into.iter_mut().find(|x| x.members == g.members) {
            Some(existing) => extend_dedup(&mut existing.provenance, &g.provenance),
            None => into.push(DependencyGroup { members: g.members.clone(), provenance: dedup(&g.provenance) }),
        }
    }
}

fn dedup_paths(paths: &[crate::taxonomy::SvmPath]) -> Vec<crate::taxonomy::SvmPath> {
    let mut seen = BTreeSet::new();
    paths.iter().filter(|p| seen.insert(p.key())).cloned().collect()
}

/// Equal taxonomies are kept; otherwise the trees are unioned when they share
/// a version label or one contains the other.
fn reconcile_taxonomies(left: &BdnModel, right: &BdnModel) -> Result<(crate::taxonomy::SvmTaxonomy, TaxonomySource)> {
    let (a, b) = (&left.taxonomy, &right.taxonomy);
    if a == b {
        let source =
            if left.taxonomy_source == TaxonomySource::Builtin && right.taxonomy_source == TaxonomySource::Builtin {
                TaxonomySource::Builtin
            } else {
                TaxonomySource::Inline
            };
        return Ok((a.clone(), source));
    }
    if a.contains(b) {
        return Ok((a.clone(), TaxonomySource::Inline));
    }
    if b.contains(a) {
        return Ok((b.clone(), TaxonomySource::Inline));
    }
    if a.version == b.version {
        return Ok((a.union(b)?, TaxonomySource::Inline));
    }
    Err(Error::TaxonomyMismatch(format!(
        "versions {:?} and {:?} differ and neither taxonomy contains the other",
        a.version, b.version
    )))
}

/// Returns a new model with `record` appended to the edge's evidence.
pub fn add_evidence(model: &BdnModel, practice: &str, benefit: &str, record: EvidenceRecord) -> Result<BdnModel> {
    let mut next = model.clone();
    let edge = next
        .edge_mut(practice, benefit)
        .ok_or_else(|| Error::UnknownEdge { practice: practice.to_string(), benefit: benefit.to_string() })?;
    edge.evidence.push(record);
    Ok(next)
}

/// Laplace rule of succession over the edge's observations: `(s + 1) / (n + 2)`.
pub fn edge_confidence(edge: &RealizationEdge) -> f64 {
    let positive = edge.evidence.iter().filter(|r| r.observed).count();
    confidence(positive, edge.evidence.len())
}

pub fn confidence(positive: usize, total: usize) -> f64 {
    debug_assert!(positive <= total);
    (positive as f64 + 1.0) / (total as f64 + 2.0)
}
