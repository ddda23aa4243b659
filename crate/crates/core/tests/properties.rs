use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vaspi::assessment::{assess, AdoptionStatus};
use vaspi::graph::{enabled_set, layer_index, minimal_closure, trace_value};
use vaspi::io::{export_dot, DotOptions};
use vaspi::merge::{confidence, match_models, merge_models, AliasTable, MergePolicy};
use vaspi::model::{dependency_digraph, parse_model, serialize_model, validate};
use vaspi::taxonomy::default_taxonomy;
use vaspi::AssessmentConfig;
use vaspi_testkit::{gen::mappable_paths, oracle, random_adoption, random_model, upgrade, GenConfig};

fn model_from(seed: u64) -> vaspi::BdnModel {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn enabled_and_attainment_are_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(&mut rng, &GenConfig::default());
        let before = random_adoption(&mut rng, &model);
        let after = upgrade(&mut rng, &model, &before);
        let config = AssessmentConfig::default();
        let (a, b) = (assess(&model, &before, &config).unwrap(), assess(&model, &after, &config).unwrap());
        prop_assert!(a.enabled.is_subset(&b.enabled));
        for (node, score) in &a.value_attainment {
            prop_assert!(b.value_attainment[node] >= *score);
        }
    }

    #[test]
    fn enabled_practices_are_adopted_and_satisfied(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(&mut rng, &GenConfig::default());
        let adoption = random_adoption(&mut rng, &model);
        let on = enabled_set(&model, &adoption).unwrap();
        for id in &on {
            prop_assert_eq!(adoption.status(id), AdoptionStatus::Adopted);
            prop_assert!(model.practices[id].prerequisites_met(|m| on.contains(m)));
        }
        prop_assert_eq!(on, oracle::enabled(&model, &oracle::adopted_set(&adoption)));
    }

    #[test]
    fn layers_increase_along_dependencies(seed in any::<u64>()) {
        let model = model_from(seed);
        let layers = layer_index(&model);
        for (dependent, prerequisite) in dependency_digraph(&model).edges() {
            prop_assert!(layers[dependent] > layers[prerequisite]);
        }
    }

    #[test]
    fn closure_is_closed_and_contains_targets(seed in any::<u64>(), pick in any::<u64>()) {
        let model = model_from(seed);
        let ids: Vec<&String> = model.practices.keys().collect();
        let targets: BTreeSet<String> = [ids[pick as usize % ids.len()].clone()].into();
        let closure = minimal_closure(&model, &targets).unwrap();
        prop_assert!(targets.is_subset(&closure));
        prop_assert!(oracle::is_closed(&model, &closure));
        // Removing any non-target member breaks closure.
        for id in closure.difference(&targets) {
            let mut smaller = closure.clone();
            smaller.remove(id);
            prop_assert!(!oracle::is_closed(&model, &smaller));
        }
    }

    #[test]
    fn trace_partitions_benefits_by_perspective(seed in any::<u64>()) {
        let model = model_from(seed);
        let tax = default_taxonomy();
        let mut seen = BTreeSet::new();
        for p in &tax.perspectives {
            let path = vaspi::SvmPath::parse(&p.name).unwrap();
            let slice = trace_value(&model, &path).unwrap();
            for b in &slice.benefits {
                prop_assert!(model.benefits[b].classified_paths().iter().any(|s| s.perspective() == p.name));
            }
            seen.extend(slice.benefits);
        }
        let classified: BTreeSet<String> = model.benefits.values()
            .filter(|b| !b.classified_paths().is_empty()).map(|b| b.id.clone()).collect();
        prop_assert_eq!(seen, classified);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let model = model_from(seed);
        let text = serialize_model(&model);
        let parsed = parse_model(&text).unwrap();
        prop_assert_eq!(&parsed, &model);
        prop_assert_eq!(serialize_model(&parsed), text);
        let dot = export_dot(&model, &DotOptions::default());
        prop_assert!(vaspi_testkit::dot::parse(&dot).is_ok());
    }

    #[test]
    fn matching_is_symmetric(l in any::<u64>(), r in any::<u64>()) {
        let (left, right) = (model_from(l), model_from(r));
        let aliases = AliasTable::default();
        let lr = match_models(&left, &right, &aliases);
        let rl = match_models(&right, &left, &aliases);
        let mut transposed: Vec<_> = rl.matched.iter().map(|m| (m.kind, m.right.clone(), m.left.clone())).collect();
        transposed.sort();
        let mut direct: Vec<_> = lr.matched.iter().map(|m| (m.kind, m.left.clone(), m.right.clone())).collect();
        direct.sort();
        prop_assert_eq!(direct, transposed);
        prop_assert_eq!(lr.left_only, rl.right_only);
        prop_assert_eq!(lr.right_only, rl.left_only);
    }

    #[test]
    fn self_merge_is_identity_up_to_origin(seed in any::<u64>()) {
        let model = model_from(seed);
        let report = match_models(&model, &model, &AliasTable::default());
        let mut merged = merge_models(&model, &model, &report, MergePolicy::UnionGroups).unwrap();
        prop_assert_eq!(merged.origin, vaspi::Origin::Joint);
        merged.origin = model.origin;
        prop_assert_eq!(merged, model);
    }

    #[test]
    fn confidence_is_monotone(s in 0usize..200, extra in 0usize..200) {
        let n = s + extra;
        let c = confidence(s, n);
        prop_assert!(c > 0.0 && c < 1.0);
        prop_assert!(confidence(s + 1, n + 1) > c);
        prop_assert!(confidence(s, n + 1) < c);
    }

    #[test]
    fn injected_cycles_are_reported(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = random_model(&mut rng, &GenConfig::default());
        let layers = layer_index(&model);
        // Make the deepest practice a prerequisite of one of its own
        // prerequisites, or of itself when it has none.
        let (deep, _) = layers.iter().max_by_key(|(id, l)| (**l, std::cmp::Reverse((*id).clone()))).unwrap();
        let deep = deep.clone();
        let victim = model.practices[&deep].dependency_groups.first()
            .and_then(|g| g.members.iter().next().cloned())
            .unwrap_or_else(|| deep.clone());
        let practice = model.practices.remove(&victim).unwrap();
        model.add_practice(practice.with_group([deep.clone()]));
        let cycles: Vec<_> = validate(&model).into_iter().filter(|d| d.code == "E-CYCLE").collect();
        prop_assert!(!cycles.is_empty());
        for d in &cycles {
            prop_assert!(d.subjects.len() >= 2);
            prop_assert_eq!(d.subjects.first(), d.subjects.last());
            let graph = dependency_digraph(&model);
            for w in d.subjects.windows(2) {
                prop_assert!(graph.successors(&w[0]).any(|s| s == w[1]));
            }
        }
    }

    #[test]
    fn injected_dangling_refs_are_reported(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = random_model(&mut rng, &GenConfig::default());
        let ids: Vec<String> = model.practices.keys().cloned().collect();
        let victim = ids[rng.random_range(0..ids.len())].clone();
        let practice = model.practices.remove(&victim).unwrap();
        model.add_practice(practice.with_group(["ghost"]));
        let diags = validate(&model);
        prop_assert!(diags.iter().any(|d| d.code == "E-DANGLING-REF" && d.subjects.contains(&"ghost".to_string())));
    }

    #[test]
    fn unresolvable_svm_paths_are_reported(seed in any::<u64>()) {
        let mut model = model_from(seed);
        let id = model.benefits.keys().next().unwrap().clone();
        let mut b = model.benefits[&id].clone();
        b.svm_paths.push(vaspi::SvmPath::parse("Customer/No such aspect").unwrap());
        model.add_benefit(b);
        prop_assert!(validate(&model).iter().any(|d| d.code == "E-SVM-PATH" && d.subjects.contains(&id)));
    }
}

#[test]
fn generated_models_are_valid() {
    let paths = mappable_paths();
    assert!(paths.len() > 10);
    for seed in 0..200 {
        let model = model_from(seed);
        let errors: Vec<_> = validate(&model).into_iter().filter(|d| d.is_error()).collect();
        assert!(errors.is_empty(), "seed {seed}: {errors:?}");
    }
}
