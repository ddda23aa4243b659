//! Assessment of an adoption state against a model: benefit realization,
//! value attainment, improvement plans and next-step recommendations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::graph::{enabled_where, layer_index, layering, minimal_closure_over};
use crate::index::NetworkIndex;
use crate::model::{BdnModel, BenefitId, PracticeId};
use crate::taxonomy::SvmPath;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdoptionStatus {
    #[default]
    NotAdopted,
    InProgress,
    Adopted,
}

impl std::str::FromStr for AdoptionStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "not_adopted" => Ok(AdoptionStatus::NotAdopted),
            "in_progress" => Ok(AdoptionStatus::InProgress),
            "adopted" => Ok(AdoptionStatus::Adopted),
            other => Err(Error::Document(format!("unknown adoption status {other:?}"))),
        }
    }
}

/// Per-practice adoption for one organization or case. Absent practices are
/// not adopted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionState {
    #[serde(rename = "context", default)]
    pub model_context: String,
    #[serde(default)]
    pub timestamp: String,
    #[serde(default)]
    pub statuses: BTreeMap<PracticeId, AdoptionStatus>,
    #[serde(default)]
    pub notes: BTreeMap<PracticeId, String>,
}

impl AdoptionState {
    pub fn new(context: impl Into<String>) -> Self {
        AdoptionState { model_context: context.into(), ..Default::default() }
    }

    /// Shorthand for tests and what-if overlays.
    pub fn adopted<I, S>(context: &str, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut state = AdoptionState::new(context);
        for id in ids {
            state.statuses.insert(id.into(), AdoptionStatus::Adopted);
        }
        state
    }

    pub fn status(&self, practice: &str) -> AdoptionStatus {
        self.statuses.get(practice).copied().unwrap_or_default()
    }

    pub fn set(&mut self, practice: impl Into<String>, status: AdoptionStatus) {
        self.statuses.insert(practice.into(), status);
    }

    pub fn with(&self, practice: &str, status: AdoptionStatus) -> Self {
        let mut next = self.clone();
        next.set(practice, status);
        next
    }

    pub fn check_against(&self, model: &BdnModel) -> Result<()> {
        match self.statuses.keys().chain(self.notes.keys()).find(|id| !model.practices.contains_key(*id)) {
            Some(id) => Err(Error::UnknownPractice(id.clone())),
            None => Ok(()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }

    fn adopted_set(&self) -> BTreeSet<PracticeId> {
        self.statuses.iter().filter(|(_, s)| **s == AdoptionStatus::Adopted).map(|(id, _)| id.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizationStatus {
    Unrealized,
    PartiallyRealized,
    FullyRealized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenefitStatus {
    pub benefit: BenefitId,
    pub status: RealizationStatus,
    pub active_realizers: BTreeSet<PracticeId>,
    pub inactive_realizers: BTreeSet<PracticeId>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    /// Some realizer of each target benefit enabled.
    #[default]
    Partial,
    /// Every realizer of each target benefit enabled.
    Full,
}

impl PlanMode {
    fn reached(self, status: RealizationStatus) -> bool {
        match self {
            PlanMode::Partial => status >= RealizationStatus::PartiallyRealized,
            PlanMode::Full => status == RealizationStatus::FullyRealized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssessmentConfig {
    /// Weight of a partially realized benefit in value attainment.
    pub partial_weight: f64,
    pub plan_target_mode: PlanMode,
}

impl Default for AssessmentConfig {
    fn default() -> Self {
        AssessmentConfig { partial_weight: 0.5, plan_target_mode: PlanMode::Partial }
    }
}

impl AssessmentConfig {
    pub fn with_partial_weight(partial_weight: f64) -> Result<Self> {
        let config = AssessmentConfig { partial_weight, ..Default::default() };
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.partial_weight) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("partial_weight {} outside [0, 1]", self.partial_weight)))
        }
    }

    fn weight(&self, status: RealizationStatus) -> f64 {
        match status {
            RealizationStatus::Unrealized => 0.0,
            RealizationStatus::PartiallyRealized => self.partial_weight,
            RealizationStatus::FullyRealized => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCoverage {
    pub layer: usize,
    pub practices: usize,
    pub enabled: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub practice: PracticeId,
    /// Benefits whose status would strictly improve.
    pub unlocks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub context: String,
    pub enabled: BTreeSet<PracticeId>,
    /// Adopted, but no dependency group is enabled.
    pub inconsistent: BTreeSet<PracticeId>,
    /// Not adopted, prerequisites already enabled.
    pub frontier: BTreeSet<PracticeId>,
    pub in_progress: BTreeSet<PracticeId>,
    pub benefit_statuses: Vec<BenefitStatus>,
    pub value_attainment: BTreeMap<String, f64>,
    pub layer_coverage: Vec<LayerCoverage>,
    pub recommendations: Vec<Recommendation>,
    pub generated_at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub order: usize,
    pub practice: PracticeId,
    /// Benefits whose status improves once this step is adopted.
    pub unlocks: Vec<BenefitId>,
}

/// Benefit statuses for a given enabled set, sorted by benefit id.
fn statuses_for(model: &BdnModel, enabled: &BTreeSet<PracticeId>) -> Vec<BenefitStatus> {
    let mut realizers: BTreeMap<&str, BTreeSet<PracticeId>> =
        model.benefits.keys().map(|b| (b.as_str(), BTreeSet::new())).collect();
    for e in &model.realization_edges {
        if let Some(set) = realizers.get_mut(e.benefit_id.as_str()) {
            set.insert(e.practice_id.clone());
        }
    }
    realizers
        .into_iter()
        .map(|(benefit, all)| {
            let (active, inactive): (BTreeSet<_>, BTreeSet<_>) = all.into_iter().partition(|p| enabled.contains(p));
            let status = if active.is_empty() {
                RealizationStatus::Unrealized
            } else if inactive.is_empty() {
                RealizationStatus::FullyRealized
            } else {
                RealizationStatus::PartiallyRealized
            };
            BenefitStatus {
                benefit: benefit.to_string(),
                status,
                active_realizers: active,
                inactive_realizers: inactive,
            }
        })
        .collect()
}

fn enabled_for(model: &BdnModel, adoption: &AdoptionState) -> BTreeSet<PracticeId> {
    enabled_where(model, |id| adoption.status(id) == AdoptionStatus::Adopted)
}

pub fn benefit_status(model: &BdnModel, adoption: &AdoptionState, benefit: &str) -> Result<BenefitStatus> {
    if !model.benefits.contains_key(benefit) {
        return Err(Error::UnknownBenefit(benefit.to_string()));
    }
    adoption.check_against(model)?;
    let enabled = enabled_for(model, adoption);
    Ok(statuses_for(model, &enabled).into_iter().find(|s| s.benefit == benefit).expect("every benefit has a status"))
}

pub fn benefit_statuses(model: &BdnModel, adoption: &AdoptionState) -> Result<Vec<BenefitStatus>> {
    adoption.check_against(model)?;
    Ok(statuses_for(model, &enabled_for(model, adoption)))
}

/// Mean benefit weight under every SVM node that has at least one classified
/// benefit at or below it, keyed by the node's path text.
pub fn value_attainment(
    model: &BdnModel,
    adoption: &AdoptionState,
    config: &AssessmentConfig,
) -> Result<BTreeMap<String, f64>> {
    config.check()?;
    let statuses = benefit_statuses(model, adoption)?;
    Ok(attainment_from(model, &statuses, config))
}

fn attainment_from(model: &BdnModel, statuses: &[BenefitStatus], config: &AssessmentConfig) -> BTreeMap<String, f64> {
    let mut under: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for b in model.benefits.values() {
        for path in b.classified_paths() {
            let Ok(spelled) = model.taxonomy.canonicalize(path) else { continue };
            for prefix in spelled.prefixes() {
                under.entry(prefix.to_string()).or_default().insert(&b.id);
            }
        }
    }
    let weight: BTreeMap<&str, f64> = statuses.iter().map(|s| (s.benefit.as_str(), config.weight(s.status))).collect();
    under
        .into_iter()
        .map(|(node, benefits)| {
            let total: f64 = benefits.iter().map(|b| weight.get(b).copied().unwrap_or(0.0)).sum();
            (node, total / benefits.len() as f64)
        })
        .collect()
}

pub fn assess(model: &BdnModel, adoption: &AdoptionState, config: &AssessmentConfig) -> Result<AssessmentReport> {
    assess_with(Strategy::default(), model, adoption, config)
}

pub fn assess_with(
    strategy: Strategy,
    model: &BdnModel,
    adoption: &AdoptionState,
    config: &AssessmentConfig,
) -> Result<AssessmentReport> {
    config.check()?;
    adoption.check_against(model)?;
    let enabled = enabled_for(model, adoption);
    let mut inconsistent = BTreeSet::new();
    let mut frontier = BTreeSet::new();
    let mut in_progress = BTreeSet::new();
    for p in model.practices.values() {
        match adoption.status(&p.id) {
            AdoptionStatus::Adopted if !enabled.contains(&p.id) => {
                inconsistent.insert(p.id.clone());
            }
            AdoptionStatus::NotAdopted if p.prerequisites_met(|m| enabled.contains(m)) => {
                frontier.insert(p.id.clone());
            }
            AdoptionStatus::InProgress => {
                in_progress.insert(p.id.clone());
            }
            _ => {}
        }
    }
    let benefit_statuses = statuses_for(model, &enabled);
    let value_attainment = attainment_from(model, &benefit_statuses, config);
    let layer_coverage = layering(model)
        .into_iter()
        .enumerate()
        .map(|(layer, ids)| {
            let on = ids.iter().filter(|id| enabled.contains(*id)).count();
            LayerCoverage { layer, practices: ids.len(), enabled: on, fraction: on as f64 / ids.len() as f64 }
        })
        .collect();
    let recommendations = rank_frontier(strategy, model, adoption, &frontier, usize::MAX);
    Ok(AssessmentReport {
        context: model.context.clone(),
        enabled,
        inconsistent,
        frontier,
        in_progress,
        benefit_statuses,
        value_attainment,
        layer_coverage,
        recommendations,
        generated_at: adoption.timestamp.clone(),
    })
}

/// Assesses many adoption states of one model.
pub fn assess_batch_with(
    strategy: Strategy,
    model: &BdnModel,
    adoptions: &[AdoptionState],
    config: &AssessmentConfig,
) -> Vec<Result<AssessmentReport>> {
    // Parallelism is across states; each report is built sequentially.
    exec::map(strategy, adoptions, |a| assess_with(Strategy::Sequential, model, a, config))
}

/// Frontier practices ranked by how many benefit statuses adopting each one
/// alone would strictly improve; ties by id; at most `k` entries.
pub fn recommend_next(model: &BdnModel, adoption: &AdoptionState, k: usize) -> Result<Vec<Recommendation>> {
    recommend_next_with(Strategy::default(), model, adoption, k)
}

pub fn recommend_next_with(
    strategy: Strategy,
    model: &BdnModel,
    adoption: &AdoptionState,
    k: usize,
) -> Result<Vec<Recommendation>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    adoption.check_against(model)?;
    let enabled = enabled_for(model, adoption);
    let frontier: BTreeSet<PracticeId> = model
        .practices
        .values()
        .filter(|p| {
            adoption.status(&p.id) == AdoptionStatus::NotAdopted && p.prerequisites_met(|m| enabled.contains(m))
        })
        .map(|p| p.id.clone())
        .collect();
    Ok(rank_frontier(strategy, model, adoption, &frontier, k))
}

fn rank_frontier(
    strategy: Strategy,
    model: &BdnModel,
    adoption: &AdoptionState,
    frontier: &BTreeSet<PracticeId>,
    k: usize,
) -> Vec<Recommendation> {
    let index = NetworkIndex::new(model);
    let adopted = index.mask(|id| adoption.status(id) == AdoptionStatus::Adopted);
    let enabled = index.enabled(&adopted);
    let active = index.active_counts(&enabled.on);
    let candidates: Vec<(usize, &PracticeId)> =
        frontier.iter().filter_map(|id| index.position(id).map(|p| (p, id))).collect();
    let mut ranked = exec::map(strategy, &candidates, |(p, id)| {
        let newly = index.cascade(&enabled, &adopted, *p);
        Recommendation { practice: (*id).clone(), unlocks: index.improved(&active, &newly).len() }
    });
    ranked.sort_by(|a, b| b.unlocks.cmp(&a.unlocks).then_with(|| a.practice.cmp(&b.practice)));
    ranked.truncate(k);
    ranked
}

/// What a plan should achieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanTarget {
    Benefit(BenefitId),
    Value(SvmPath),
}

impl PlanTarget {
    /// A benefit id if one matches, otherwise an SVM path in the model's
    /// taxonomy.
    pub fn resolve(model: &BdnModel, target: &str) -> Result<Self> {
        if model.benefits.contains_key(target) {
            return Ok(PlanTarget::Benefit(target.to_string()));
        }
        let unknown = || Error::UnknownTarget(target.to_string());
        let path = SvmPath::parse(target).map_err(|_| unknown())?;
        let spelled = model.taxonomy.canonicalize(&path).map_err(|_| unknown())?;
        Ok(PlanTarget::Value(spelled))
    }

    fn benefits(&self, model: &BdnModel) -> BTreeSet<BenefitId> {
        match self {
            PlanTarget::Benefit(b) => BTreeSet::from([b.clone()]),
            PlanTarget::Value(path) => model.benefits_under(path),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PlanTarget::Benefit(b) => b.clone(),
            PlanTarget::Value(p) => p.to_string(),
        }
    }
}

/// Ordered practices to adopt so the target reaches the configured status.
///
/// Already adopted practices cost nothing and never appear as steps, even
/// when they are currently inconsistent; they become enabled once their
/// prerequisites are adopted. Steps are ordered by layer, then id.
pub fn plan(
    model: &BdnModel,
    adoption: &AdoptionState,
    target: &PlanTarget,
    config: &AssessmentConfig,
) -> Result<Vec<PlanStep>> {
    adoption.check_against(model)?;
    let mode = config.plan_target_mode;
    let targets = target.benefits(model);
    if targets.is_empty() {
        return Err(Error::UnreachableTarget(target.label()));
    }
    let realizers: BTreeMap<&str, BTreeSet<PracticeId>> =
        targets.iter().map(|b| (b.as_str(), model.realizers(b))).collect();
    if let Some((b, _)) = realizers.iter().find(|(_, r)| r.is_empty()) {
        return Err(Error::UnreachableTarget(b.to_string()));
    }

    let enabled = enabled_for(model, adoption);
    let current = statuses_for(model, &enabled);
    let pending: Vec<&str> = current
        .iter()
        .filter(|s| targets.contains(&s.benefit) && !mode.reached(s.status))
        .map(|s| s.benefit.as_str())
        .collect();
    if pending.is_empty() {
        return Ok(vec![]);
    }

    let free = adoption.adopted_set();
    let mut selected = BTreeSet::new();
    for b in pending {
        match mode {
            PlanMode::Full => selected.extend(realizers[b].iter().cloned()),
            PlanMode::Partial => {
                let mut best: Option<(usize, &PracticeId)> = None;
                for r in &realizers[b] {
                    let Ok(c) = minimal_closure_over(model, &BTreeSet::from([r.clone()]), &free) else {
                        continue;
                    };
                    if best.is_none_or(|(cost, _)| c.cost < cost) {
                        best = Some((c.cost, r));
                    }
                }
                let (_, r) = best.ok_or_else(|| Error::UnreachableTarget(b.to_string()))?;
                selected.insert(r.clone());
            }
        }
    }

    let closure = minimal_closure_over(model, &selected, &free)?;
    let layers = layer_index(model);
    let mut todo: Vec<&PracticeId> = closure.practices.iter().filter(|p| !free.contains(*p)).collect();
    todo.sort_by_key(|p| (layers[*p], *p));

    let index = NetworkIndex::new(model);
    let benefit_ids: Vec<&BenefitId> = model.benefits.keys().collect();
    let mut adopted = index.mask(|id| adoption.status(id) == AdoptionStatus::Adopted);
    let mut state = index.enabled(&adopted);
    let mut active = index.active_counts(&state.on);
    let mut steps = Vec::with_capacity(todo.len());
    for (i, practice) in todo.into_iter().enumerate() {
        let p = index.position(practice).expect("closure members are known practices");
        let newly = index.adopt(&mut state, &mut adopted, p);
        let unlocks = index.improved(&active, &newly).into_iter().map(|b| benefit_ids[b].clone()).collect();
        index.apply(&mut active, &newly);
        steps.push(PlanStep { order: i + 1, practice: practice.clone(), unlocks });
    }
    Ok(steps)
}
