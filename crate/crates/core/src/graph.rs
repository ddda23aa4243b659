//! Graph algorithms over a model: enabled sets, layering, minimal
//! prerequisite closures and value tracing.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::assessment::{AdoptionState, AdoptionStatus};
use crate::error::{Error, Result};
use crate::index::NetworkIndex;
use crate::model::{BdnModel, BenefitId, PracticeId};
use crate::taxonomy::SvmPath;

/// Practices that are adopted and have their prerequisites enabled, as the
/// least fixed point over the dependency groups.
pub fn enabled_set(model: &BdnModel, adoption: &AdoptionState) -> Result<BTreeSet<PracticeId>> {
    adoption.check_against(model)?;
    Ok(enabled_where(model, |id| adoption.status(id) == AdoptionStatus::Adopted))
}

pub(crate) fn enabled_where(model: &BdnModel, adopted: impl Fn(&str) -> bool) -> BTreeSet<PracticeId> {
    let index = NetworkIndex::new(model);
    let mask = index.mask(adopted);
    index.to_set(&index.enabled(&mask).on)
}

/// Layer index per practice: 0 without prerequisites, otherwise one more than
/// the deepest member of any group.
pub fn layer_index(model: &BdnModel) -> BTreeMap<PracticeId, usize> {
    fn visit<'a>(
        model: &'a BdnModel,
        id: &'a str,
        done: &mut BTreeMap<&'a str, usize>,
        active: &mut HashSet<&'a str>,
    ) -> usize {
        if let Some(&layer) = done.get(id) {
            return layer;
        }
        let Some(p) = model.practices.get(id) else { return 0 };
        if !active.insert(id) {
            // Cycle; only reachable on invalid models.
            return 0;
        }
        let layer = p
            .dependency_groups
            .iter()
            .flat_map(|g| &g.members)
            .filter(|m| model.practices.contains_key(*m))
            .map(|m| visit(model, m, done, active) + 1)
            .max()
            .unwrap_or(0);
        active.remove(id);
        done.insert(id, layer);
        layer
    }

    let mut done = BTreeMap::new();
    let mut active = HashSet::new();
    for id in model.practices.keys() {
        visit(model, id, &mut done, &mut active);
    }
    done.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Practices grouped by layer, ascending; ids sorted within a layer.
pub fn layering(model: &BdnModel) -> Vec<Vec<PracticeId>> {
    let mut layers: Vec<Vec<PracticeId>> = Vec::new();
    for (id, layer) in layer_index(model) {
        if layers.len() <= layer {
            layers.resize_with(layer + 1, Vec::new);
        }
        layers[layer].push(id);
    }
    layers
}

/// Smallest self-sufficient practice set containing `targets`: every member
/// has no groups or one group fully inside the set. Ties go to the
/// lexicographically smallest sorted id sequence.
pub fn minimal_closure(model: &BdnModel, targets: &BTreeSet<PracticeId>) -> Result<BTreeSet<PracticeId>> {
    minimal_closure_over(model, targets, &BTreeSet::new()).map(|c| c.practices)
}

/// Result of a closure search where some practices cost nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub practices: BTreeSet<PracticeId>,
    /// Members of `practices` that were not free.
    pub cost: usize,
}

/// Closure minimizing the number of non-`free` members, then total size,
/// then the sorted id sequence. With `free` empty this is
/// [`minimal_closure`].
pub fn minimal_closure_over(
    model: &BdnModel,
    targets: &BTreeSet<PracticeId>,
    free: &BTreeSet<PracticeId>,
) -> Result<Closure> {
    if let Some(unknown) = targets.iter().find(|t| !model.practices.contains_key(*t)) {
        return Err(Error::UnknownPractice(unknown.clone()));
    }
    let search = ClosureSearch::new(model, free);
    let start: BTreeSet<usize> = targets.iter().map(|t| search.index[t.as_str()]).collect();
    let best = search
        .run(start)
        .ok_or_else(|| Error::UnreachableTarget(targets.iter().cloned().collect::<Vec<_>>().join(",")))?;
    Ok(Closure { practices: best.members.iter().map(|&i| search.ids[i].to_string()).collect(), cost: best.cost })
}

struct ClosureSearch<'a> {
    ids: Vec<&'a str>,
    index: BTreeMap<&'a str, usize>,
    /// Per practice, its groups as index lists. Groups naming unknown
    /// practices are dropped, they can never be satisfied.
    groups: Vec<Vec<Vec<usize>>>,
    requires: Vec<bool>,
    free: Vec<bool>,
}

#[derive(Clone)]
struct Candidate {
    cost: usize,
    members: Vec<usize>,
}

impl Candidate {
    fn rank(&self) -> (usize, usize, &[usize]) {
        (self.cost, self.members.len(), &self.members)
    }
}

impl<'a> ClosureSearch<'a> {
    fn new(model: &'a BdnModel, free: &BTreeSet<PracticeId>) -> Self {
        let ids: Vec<&str> = model.practices.keys().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let groups = model
            .practices
            .values()
            .map(|p| {
                p.dependency_groups
                    .iter()
                    .filter_map(|g| g.members.iter().map(|m| index.get(m.as_str()).copied()).collect())
                    .collect()
            })
            .collect();
        let requires = model.practices.values().map(|p| !p.dependency_groups.is_empty()).collect();
        let free = ids.iter().map(|id| free.contains(*id)).collect();
        ClosureSearch { ids, index, groups, requires, free }
    }

    fn satisfied(&self, i: usize, set: &BTreeSet<usize>) -> bool {
        !self.requires[i] || self.groups[i].iter().any(|g| g.iter().all(|m| set.contains(m)))
    }

    fn added_cost(&self, group: &[usize], set: &BTreeSet<usize>) -> usize {
        group.iter().filter(|m| !set.contains(m) && !self.free[**m]).count()
    }

    /// `None` only when some target can never be satisfied, which needs
    /// dangling group members.
    fn run(&self, start: BTreeSet<usize>) -> Option<Candidate> {
        let cost = start.iter().filter(|&&i| !self.free[i]).count();
        let mut best: Option<Candidate> = None;
        let mut seen = HashSet::new();
        self.dfs(start, cost, &mut best, &mut seen);
        best
    }

    fn dfs(&self, set: BTreeSet<usize>, cost: usize, best: &mut Option<Candidate>, seen: &mut HashSet<Vec<usize>>) {
        if best.as_ref().is_some_and(|b| cost > b.cost) {
            return;
        }
        let members: Vec<usize> = set.iter().copied().collect();
        if !seen.insert(members.clone()) {
            return;
        }
        // Branch on the unsatisfied member with the fewest alternatives.
        let pick = set.iter().copied().filter(|&i| !self.satisfied(i, &set)).min_by_key(|&i| (self.groups[i].len(), i));
        let Some(u) = pick else {
            let candidate = Candidate { cost, members };
            if best.as_ref().is_none_or(|b| candidate.rank() < b.rank()) {
                *best = Some(candidate);
            }
            return;
        };
        let lower = self.groups[u].iter().map(|g| self.added_cost(g, &set)).min();
        let Some(lower) = lower else {
            // Every group names an unknown practice: dead end.
            return;
        };
        if best.as_ref().is_some_and(|b| cost + lower > b.cost) {
            return;
        }
        for group in &self.groups[u] {
            let extra = self.added_cost(group, &set);
            let mut next = set.clone();
            next.extend(group.iter().copied());
            self.dfs(next, cost + extra, best, seen);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceAnchor {
    Svm(SvmPath),
    Benefit(BenefitId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub practice: PracticeId,
    pub benefit: BenefitId,
}

/// The part of a model that delivers one value or benefit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSlice {
    pub anchor: SliceAnchor,
    pub benefits: BTreeSet<BenefitId>,
    pub realizing_practices: BTreeSet<PracticeId>,
    /// Realizing practices plus one minimal prerequisite completion.
    pub closure_practices: BTreeSet<PracticeId>,
    pub realization_edges: Vec<EdgeRef>,
}

/// Benefits classified at or below `anchor`, their realizers and the
/// prerequisite closure of those realizers.
pub fn trace_value(model: &BdnModel, anchor: &SvmPath) -> Result<ValueSlice> {
    let anchor = model.taxonomy.canonicalize(anchor)?;
    let benefits = model.benefits_under(&anchor);
    slice(model, SliceAnchor::Svm(anchor), benefits)
}

pub fn trace_benefit(model: &BdnModel, benefit: &str) -> Result<ValueSlice> {
    if !model.benefits.contains_key(benefit) {
        return Err(Error::UnknownBenefit(benefit.to_string()));
    }
    slice(model, SliceAnchor::Benefit(benefit.to_string()), BTreeSet::from([benefit.to_string()]))
}

fn slice(model: &BdnModel, anchor: SliceAnchor, benefits: BTreeSet<BenefitId>) -> Result<ValueSlice> {
    let realization_edges: Vec<EdgeRef> = model
        .realization_edges
        .iter()
        .filter(|e| benefits.contains(&e.benefit_id))
        .map(|e| EdgeRef { practice: e.practice_id.clone(), benefit: e.benefit_id.clone() })
        .collect();
    let realizing_practices: BTreeSet<PracticeId> = realization_edges.iter().map(|e| e.practice.clone()).collect();
    let closure_practices = minimal_closure(model, &realizing_practices)?;
    Ok(ValueSlice { anchor, benefits, realizing_practices, closure_practices, realization_edges })
}
