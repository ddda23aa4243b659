//! Library results checked against exhaustive oracles, plus the fixture
//! values those oracles produce.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vaspi::assessment::{assess, plan, recommend_next, AdoptionState, AdoptionStatus, PlanTarget};
use vaspi::fixtures;
use vaspi::graph::{layering, minimal_closure, trace_benefit};
use vaspi::{AssessmentConfig, PlanMode, RealizationStatus};
use vaspi_testkit::{oracle, random_adoption, random_model, GenConfig};

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

#[test]
fn fixture_closure_matches_oracle() {
    let model = fixtures::deployment();
    let targets = set(&["continuous-deployment"]);
    let expected = set(&["automated-deployment", "continuous-deployment", "continuous-integration"]);
    assert_eq!(oracle::brute_force_closure(&model, &targets), expected);
    assert_eq!(minimal_closure(&model, &targets).unwrap(), expected);
}

#[test]
fn alternative_groups_pick_the_smaller_one() {
    use vaspi::model::Practice;
    let mut model = vaspi::BdnModel::new("t", vaspi::Origin::Literature, vaspi::taxonomy::default_taxonomy());
    for id in ["a", "b", "c"] {
        model.add_practice(Practice::new(id, id));
    }
    model.add_practice(Practice::new("x", "x").with_group(["a", "b"]).with_group(["c"]));
    let targets = set(&["x"]);
    assert_eq!(oracle::brute_force_closure(&model, &targets), set(&["c", "x"]));
    assert_eq!(minimal_closure(&model, &targets).unwrap(), set(&["c", "x"]));
}

#[test]
fn fixture_layers_and_slices() {
    let model = fixtures::deployment();
    assert_eq!(
        layering(&model),
        vec![
            vec!["automated-deployment".to_string(), "continuous-integration".to_string()],
            vec!["continuous-deployment".to_string()]
        ]
    );
    let slice = trace_benefit(&model, "b1-fast-frequent-releases").unwrap();
    assert_eq!(slice.realizing_practices, set(&["continuous-deployment", "continuous-integration"]));
    assert_eq!(slice.closure_practices.len(), 3);
}

#[test]
fn fixture_plan_and_recommendations() {
    let model = fixtures::deployment();
    let empty = AdoptionState::new("deployment");
    let steps =
        plan(&model, &empty, &PlanTarget::Benefit("b2-cost-saving".into()), &AssessmentConfig::default()).unwrap();
    let ids: Vec<&str> = steps.iter().map(|s| s.practice.as_str()).collect();
    assert_eq!(ids, ["automated-deployment", "continuous-integration", "continuous-deployment"]);
    assert_eq!(
        oracle::min_additional_adoptions(&model, &empty, "b2-cost-saving", RealizationStatus::PartiallyRealized),
        Some(3)
    );

    let ranked = recommend_next(&model, &empty, 5).unwrap();
    assert_eq!(ranked[0].practice, "continuous-integration");
    assert_eq!(ranked[0].unlocks, 5);
    assert_eq!(ranked[1].practice, "automated-deployment");
    assert_eq!(ranked[1].unlocks, 2);
}

#[test]
fn fixture_adoption_scenarios() {
    let model = fixtures::deployment();
    let cd_only = AdoptionState::adopted("deployment", ["continuous-deployment"]);
    let report = assess(&model, &cd_only, &AssessmentConfig::default()).unwrap();
    assert_eq!(report.inconsistent, set(&["continuous-deployment"]));
    assert!(report.enabled.is_empty());

    let ci = AdoptionState::adopted("deployment", ["continuous-integration"]);
    let oracle_statuses = oracle::benefit_statuses(&model, &oracle::adopted_set(&ci));
    let report = assess(&model, &ci, &AssessmentConfig::default()).unwrap();
    for s in &report.benefit_statuses {
        assert_eq!(oracle_statuses[&s.benefit], s.status, "{}", s.benefit);
    }
    assert_eq!(oracle_statuses["b4-increase-productivity"], RealizationStatus::FullyRealized);
    assert_eq!(oracle_statuses["b6-predictability"], RealizationStatus::PartiallyRealized);
    let perceived = report.value_attainment["Customer/Perceived value"];
    // b1 partial, b2 unrealized, b3 full
    assert!((perceived - 0.5).abs() < 1e-12);
}

#[test]
fn random_closures_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let config = GenConfig::default();
    for _ in 0..150 {
        let model = random_model(&mut rng, &config);
        let ids: Vec<&String> = model.practices.keys().collect();
        let pick = rand::seq::index::sample(&mut rng, ids.len(), ids.len().min(2));
        let targets: BTreeSet<String> = pick.iter().map(|i| ids[i].clone()).collect();
        assert_eq!(minimal_closure(&model, &targets).unwrap(), oracle::brute_force_closure(&model, &targets));
    }
}

#[test]
fn random_statuses_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let config = GenConfig::default();
    for _ in 0..150 {
        let model = random_model(&mut rng, &config);
        let adoption = random_adoption(&mut rng, &model);
        let report = assess(&model, &adoption, &AssessmentConfig::default()).unwrap();
        let adopted = oracle::adopted_set(&adoption);
        assert_eq!(report.enabled, oracle::enabled(&model, &adopted));
        let expected = oracle::benefit_statuses(&model, &adopted);
        for s in &report.benefit_statuses {
            assert_eq!(expected[&s.benefit], s.status);
        }
    }
}

#[test]
fn random_recommendations_match_what_if_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let config = GenConfig::default();
    for _ in 0..100 {
        let model = random_model(&mut rng, &config);
        let adoption = random_adoption(&mut rng, &model);
        let adopted = oracle::adopted_set(&adoption);
        let on = oracle::enabled(&model, &adopted);
        let base = oracle::benefit_statuses(&model, &adopted);
        let mut expected: Vec<(usize, String)> = model
            .practices
            .values()
            .filter(|p| adoption.status(&p.id) == AdoptionStatus::NotAdopted)
            .filter(|p| p.dependency_groups.is_empty() || p.dependency_groups.iter().any(|g| g.members.is_subset(&on)))
            .map(|p| {
                let mut with = adopted.clone();
                with.insert(p.id.clone());
                let after = oracle::benefit_statuses(&model, &with);
                let gained = after.iter().filter(|(b, s)| **s > base[*b]).count();
                (gained, p.id.clone())
            })
            .collect();
        expected.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        let got: Vec<(usize, String)> =
            recommend_next(&model, &adoption, 100).unwrap().into_iter().map(|r| (r.unlocks, r.practice)).collect();
        assert_eq!(got, expected);
    }
}

#[test]
fn random_plans_are_sound_and_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let gen = GenConfig::default();
    let mut checked = 0;
    while checked < 100 {
        let model = random_model(&mut rng, &gen);
        let adoption = random_adoption(&mut rng, &model);
        let Some(target) = model.benefits.keys().find(|b| !model.realizers(b).is_empty()).cloned() else {
            continue;
        };
        for mode in [PlanMode::Partial, PlanMode::Full] {
            let config = AssessmentConfig { plan_target_mode: mode, ..AssessmentConfig::default() };
            let steps = plan(&model, &adoption, &PlanTarget::Benefit(target.clone()), &config).unwrap();
            let mut after = oracle::adopted_set(&adoption);
            for s in &steps {
                assert!(after.insert(s.practice.clone()), "step repeats an adopted practice");
            }
            let required = match mode {
                PlanMode::Partial => RealizationStatus::PartiallyRealized,
                PlanMode::Full => RealizationStatus::FullyRealized,
            };
            assert!(oracle::benefit_statuses(&model, &after)[&target] >= required);
            if mode == PlanMode::Partial {
                let best = oracle::min_additional_adoptions(&model, &adoption, &target, required).unwrap();
                assert_eq!(steps.len(), best);
            }
        }
        checked += 1;
    }
}
