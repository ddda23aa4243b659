//! Integer-indexed view of a model for the enabled-set and what-if loops.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::assessment::RealizationStatus;
use crate::model::{BdnModel, PracticeId};

pub(crate) struct NetworkIndex<'a> {
    ids: Vec<&'a str>,
    position: HashMap<&'a str, usize>,
    /// Members per group; unknown ids count but are never met.
    group_sizes: Vec<Vec<usize>>,
    /// member -> (dependent practice, group)
    dependents: Vec<Vec<(usize, usize)>>,
    /// practice -> benefits it realizes
    realizes: Vec<Vec<usize>>,
    /// benefit -> number of realizers, known or not
    realizer_count: Vec<usize>,
}

/// An enabled set plus the unmet-member counters that produced it.
#[derive(Clone)]
pub(crate) struct Enabled {
    pub on: Vec<bool>,
    remaining: Vec<Vec<usize>>,
}

pub(crate) fn status(active: usize, total: usize) -> RealizationStatus {
    if active == 0 {
        RealizationStatus::Unrealized
    } else if active == total {
        RealizationStatus::FullyRealized
    } else {
        RealizationStatus::PartiallyRealized
    }
}

impl<'a> NetworkIndex<'a> {
    pub fn new(model: &'a BdnModel) -> Self {
        let ids: Vec<&str> = model.practices.keys().map(String::as_str).collect();
        let position: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut dependents = vec![Vec::new(); ids.len()];
        let mut group_sizes = Vec::with_capacity(ids.len());
        for (q, p) in model.practices.values().enumerate() {
            let mut sizes = Vec::with_capacity(p.dependency_groups.len());
            for (g, group) in p.dependency_groups.iter().enumerate() {
                for m in &group.members {
                    if let Some(&i) = position.get(m.as_str()) {
                        dependents[i].push((q, g));
                    }
                }
                sizes.push(group.members.len());
            }
            group_sizes.push(sizes);
        }
        let benefit_pos: HashMap<&str, usize> =
            model.benefits.keys().enumerate().map(|(i, b)| (b.as_str(), i)).collect();
        let mut realizes = vec![Vec::new(); ids.len()];
        let mut realizer_count = vec![0; benefit_pos.len()];
        for e in &model.realization_edges {
            let Some(&b) = benefit_pos.get(e.benefit_id.as_str()) else { continue };
            realizer_count[b] += 1;
            if let Some(&p) = position.get(e.practice_id.as_str()) {
                realizes[p].push(b);
            }
        }
        NetworkIndex { ids, position, group_sizes, dependents, realizes, realizer_count }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.position.get(id).copied()
    }

    pub fn mask(&self, adopted: impl Fn(&str) -> bool) -> Vec<bool> {
        self.ids.iter().map(|id| adopted(id)).collect()
    }

    pub fn to_set(&self, on: &[bool]) -> BTreeSet<PracticeId> {
        self.ids.iter().zip(on).filter(|(_, on)| **on).map(|(id, _)| id.to_string()).collect()
    }

    fn ready(&self, remaining: &[Vec<usize>], p: usize) -> bool {
        self.group_sizes[p].is_empty() || remaining[p].contains(&0)
    }

    /// Least fixed point, by counting down unmet members per group.
    pub fn enabled(&self, adopted: &[bool]) -> Enabled {
        let mut state = Enabled { on: vec![false; self.len()], remaining: self.group_sizes.clone() };
        let seeds: Vec<usize> = (0..self.len()).filter(|&p| adopted[p] && self.group_sizes[p].is_empty()).collect();
        self.propagate(&mut state, adopted, seeds);
        state
    }

    fn propagate(&self, state: &mut Enabled, adopted: &[bool], mut queue: Vec<usize>) -> Vec<usize> {
        let mut newly = Vec::new();
        while let Some(p) = queue.pop() {
            if state.on[p] {
                continue;
            }
            state.on[p] = true;
            newly.push(p);
            for &(q, g) in &self.dependents[p] {
                state.remaining[q][g] -= 1;
                if state.remaining[q][g] == 0 && adopted[q] && !state.on[q] {
                    queue.push(q);
                }
            }
        }
        newly
    }

    /// Marks `p` adopted and returns every practice that becomes enabled.
    pub fn adopt(&self, state: &mut Enabled, adopted: &mut [bool], p: usize) -> Vec<usize> {
        adopted[p] = true;
        if state.on[p] || !self.ready(&state.remaining, p) {
            return Vec::new();
        }
        self.propagate(state, adopted, vec![p])
    }

    /// What [`adopt`](Self::adopt) would enable, without touching `state`.
    pub fn cascade(&self, state: &Enabled, adopted: &[bool], p: usize) -> Vec<usize> {
        if state.on[p] || !self.ready(&state.remaining, p) {
            return Vec::new();
        }
        let mut newly = vec![p];
        let mut on: HashSet<usize> = HashSet::from([p]);
        let mut met: HashMap<(usize, usize), usize> = HashMap::new();
        let mut i = 0;
        while i < newly.len() {
            let x = newly[i];
            i += 1;
            for &(q, g) in &self.dependents[x] {
                if state.on[q] || !adopted[q] || on.contains(&q) {
                    continue;
                }
                let count = met.entry((q, g)).or_insert(0);
                *count += 1;
                if *count == state.remaining[q][g] {
                    on.insert(q);
                    newly.push(q);
                }
            }
        }
        newly
    }

    pub fn active_counts(&self, on: &[bool]) -> Vec<usize> {
        let mut active = vec![0; self.realizer_count.len()];
        for p in (0..self.len()).filter(|&p| on[p]) {
            for &b in &self.realizes[p] {
                active[b] += 1;
            }
        }
        active
    }

    /// Benefits (ascending) whose status improves once `newly` are enabled.
    pub fn improved(&self, active: &[usize], newly: &[usize]) -> Vec<usize> {
        let mut gained: HashMap<usize, usize> = HashMap::new();
        for &p in newly {
            for &b in &self.realizes[p] {
                *gained.entry(b).or_insert(0) += 1;
            }
        }
        let total = &self.realizer_count;
        let mut out: Vec<usize> = gained
            .into_iter()
            .filter(|&(b, d)| status(active[b] + d, total[b]) > status(active[b], total[b]))
            .map(|(b, _)| b)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn apply(&self, active: &mut [usize], newly: &[usize]) {
        for &p in newly {
            for &b in &self.realizes[p] {
                active[b] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::deployment;

    #[test]
    fn cascade_reaches_inconsistent_practices() {
        let model = deployment();
        let index = NetworkIndex::new(&model);
        let adopted = index.mask(|id| id == "continuous-integration" || id == "continuous-deployment");
        let state = index.enabled(&adopted);
        assert_eq!(index.to_set(&state.on), BTreeSet::from(["continuous-integration".to_string()]));

        let ad = index.position("automated-deployment").unwrap();
        let newly = index.cascade(&state, &adopted, ad);
        assert_eq!(newly.len(), 2);

        let mut applied = state.clone();
        let mut mask = adopted.clone();
        let mut direct = index.adopt(&mut applied, &mut mask, ad);
        let mut predicted = newly;
        direct.sort_unstable();
        predicted.sort_unstable();
        assert_eq!(direct, predicted);
        assert_eq!(applied.on, index.enabled(&mask).on);
    }
}
