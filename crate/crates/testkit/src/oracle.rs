//! Exhaustive reference implementations, written from the definitions.

use std::collections::{BTreeMap, BTreeSet};

use vaspi::assessment::{AdoptionState, AdoptionStatus, RealizationStatus};
use vaspi::model::BdnModel;

fn practice_ids(model: &BdnModel) -> Vec<String> {
    model.practices.keys().cloned().collect()
}

fn members(mask: u32, ids: &[String]) -> BTreeSet<String> {
    ids.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, id)| id.clone()).collect()
}

/// Every member has no groups or a group fully inside the set.
pub fn is_closed(model: &BdnModel, set: &BTreeSet<String>) -> bool {
    set.iter().all(|id| {
        let p = &model.practices[id];
        p.dependency_groups.is_empty() || p.dependency_groups.iter().any(|g| g.members.is_subset(set))
    })
}

/// Minimum closed superset of `targets` by enumerating all 2^n subsets;
/// ties go to the lexicographically smallest sorted id sequence.
pub fn brute_force_closure(model: &BdnModel, targets: &BTreeSet<String>) -> BTreeSet<String> {
    let ids = practice_ids(model);
    assert!(ids.len() <= 20, "oracle is exponential");
    let mut best: Option<BTreeSet<String>> = None;
    for mask in 0u32..(1 << ids.len()) {
        let set = members(mask, &ids);
        if !targets.is_subset(&set) || !is_closed(model, &set) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => (set.len(), set.iter().collect::<Vec<_>>()) < (b.len(), b.iter().collect::<Vec<_>>()),
        };
        if better {
            best = Some(set);
        }
    }
    best.expect("the full set is closed on acyclic models")
}

/// Enabled practices by naive iteration from the definition.
pub fn enabled(model: &BdnModel, adopted: &BTreeSet<String>) -> BTreeSet<String> {
    let mut on = BTreeSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for id in adopted {
            if on.contains(id) {
                continue;
            }
            let p = &model.practices[id];
            if p.dependency_groups.is_empty() || p.dependency_groups.iter().any(|g| g.members.is_subset(&on)) {
                on.insert(id.clone());
                changed = true;
            }
        }
    }
    on
}

pub fn adopted_set(state: &AdoptionState) -> BTreeSet<String> {
    state.statuses.iter().filter(|(_, s)| **s == AdoptionStatus::Adopted).map(|(id, _)| id.clone()).collect()
}

pub fn benefit_statuses(model: &BdnModel, adopted: &BTreeSet<String>) -> BTreeMap<String, RealizationStatus> {
    let on = enabled(model, adopted);
    model
        .benefits
        .keys()
        .map(|b| {
            let realizers: Vec<&String> =
                model.realization_edges.iter().filter(|e| &e.benefit_id == b).map(|e| &e.practice_id).collect();
            let active = realizers.iter().filter(|r| on.contains(**r)).count();
            let status = if active == 0 {
                RealizationStatus::Unrealized
            } else if active == realizers.len() {
                RealizationStatus::FullyRealized
            } else {
                RealizationStatus::PartiallyRealized
            };
            (b.clone(), status)
        })
        .collect()
}

/// Fewest additional practices (beyond those already adopted) whose adoption
/// brings `benefit` to at least `required`.
pub fn min_additional_adoptions(
    model: &BdnModel,
    state: &AdoptionState,
    benefit: &str,
    required: RealizationStatus,
) -> Option<usize> {
    let adopted = adopted_set(state);
    let candidates: Vec<String> = model.practices.keys().filter(|p| !adopted.contains(*p)).cloned().collect();
    assert!(candidates.len() <= 20, "oracle is exponential");
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << candidates.len()) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let mut all = adopted.clone();
        all.extend(members(mask, &candidates));
        if benefit_statuses(model, &all)[benefit] >= required {
            best = Some(size);
        }
    }
    best
}
