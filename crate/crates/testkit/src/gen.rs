use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use vaspi::assessment::{AdoptionState, AdoptionStatus};
use vaspi::model::{BdnModel, Benefit, Origin, Practice, Provenance, RealizationEdge};
use vaspi::taxonomy::{default_taxonomy, SvmPath};

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_practices: usize,
    pub max_groups: usize,
    pub max_group_size: usize,
    pub max_benefits: usize,
    pub max_realizers: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_practices: 12, max_groups: 3, max_group_size: 3, max_benefits: 8, max_realizers: 3 }
    }
}

/// Name pool; shared between models so that matching finds overlaps.
pub const PRACTICE_NAMES: &[&str] = &[
    "Continuous integration",
    "Automated deployment",
    "Continuous deployment",
    "Iterative development",
    "Iteration review",
    "Pair programming",
    "Code review",
    "Test automation",
    "Trunk based development",
    "Feature toggles",
    "Infrastructure as code",
    "Monitoring",
    "Blue green deployment",
    "Release planning",
];

pub const BENEFIT_NAMES: &[&str] = &[
    "Fast & frequent releases",
    "Cost saving",
    "Quick responses",
    "Increase productivity",
    "Repeatability",
    "Predictability",
    "Collaboration",
    "Fewer defects",
    "Shorter lead time",
    "Team morale",
];

/// Every default-taxonomy path at aspect depth or deeper.
pub fn mappable_paths() -> Vec<SvmPath> {
    let tax = default_taxonomy();
    let mut out = BTreeSet::new();
    for c in tax.all_components() {
        for p in c.prefixes().filter(|p| p.depth() >= 2) {
            out.insert(p);
        }
    }
    out.into_iter().collect()
}

/// A valid (acyclic, no dangling ids) model with random AND-OR groups.
/// Practices may only depend on practices earlier in a random order.
pub fn random_model(rng: &mut impl Rng, config: &GenConfig) -> BdnModel {
    let n = rng.random_range(1..=config.max_practices.min(PRACTICE_NAMES.len()));
    let mut model = BdnModel::new("random", Origin::Literature, default_taxonomy());

    let mut names: Vec<&str> = PRACTICE_NAMES.to_vec();
    names.shuffle(rng);
    let ids: Vec<String> = (0..n).map(|i| format!("p{i:02}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    for (pos, &i) in order.iter().enumerate() {
        let mut practice = Practice::new(ids[i].clone(), names[i]);
        if pos > 0 {
            let earlier: Vec<&String> = order[..pos].iter().map(|&j| &ids[j]).collect();
            let groups = rng.random_range(0..=config.max_groups);
            for _ in 0..groups {
                let size = rng.random_range(1..=config.max_group_size.min(earlier.len()));
                let members: BTreeSet<String> = earlier.choose_multiple(rng, size).map(|s| (*s).clone()).collect();
                if practice.dependency_groups.iter().all(|g| g.members != members) {
                    practice = practice.with_group(members);
                }
            }
        }
        if rng.random_bool(0.3) {
            practice.provenance.push(Provenance::literature(format!("ref{}", rng.random_range(0..5))));
        }
        model.add_practice(practice);
    }

    let paths = mappable_paths();
    let mut benefit_names: Vec<&str> = BENEFIT_NAMES.to_vec();
    benefit_names.shuffle(rng);
    let m = rng.random_range(1..=config.max_benefits.min(benefit_names.len()));
    for (b, name) in benefit_names.iter().take(m).enumerate() {
        let id = format!("b{b:02}");
        let count = rng.random_range(1..=2);
        let svm: Vec<SvmPath> = paths.choose_multiple(rng, count).cloned().collect();
        model.add_benefit(Benefit::new(id.clone(), *name, svm));
        let realizers = rng.random_range(0..=config.max_realizers.min(n));
        for p in ids.choose_multiple(rng, realizers) {
            let mut edge = RealizationEdge::new(p.clone(), id.clone());
            if rng.random_bool(0.3) {
                edge.provenance.push(Provenance::case(format!("c{}", rng.random_range(1..=3))));
            }
            model.add_edge(edge);
        }
    }
    model
}

pub fn random_adoption(rng: &mut impl Rng, model: &BdnModel) -> AdoptionState {
    let mut state = AdoptionState::new(model.context.clone());
    for id in model.practices.keys() {
        let status = match rng.random_range(0..10) {
            0..=4 => continue,
            5 => AdoptionStatus::InProgress,
            _ => AdoptionStatus::Adopted,
        };
        state.set(id.clone(), status);
    }
    state
}

/// Raises some statuses (never lowers any).
pub fn upgrade(rng: &mut impl Rng, model: &BdnModel, state: &AdoptionState) -> AdoptionState {
    let mut next = state.clone();
    for id in model.practices.keys() {
        if rng.random_bool(0.4) {
            let current = state.status(id);
            let raised = match current {
                AdoptionStatus::NotAdopted => {
                    if rng.random_bool(0.5) {
                        AdoptionStatus::InProgress
                    } else {
                        AdoptionStatus::Adopted
                    }
                }
                _ => AdoptionStatus::Adopted,
            };
            next.set(id.clone(), raised);
        }
    }
    next
}
