use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::assessment::{AdoptionState, AdoptionStatus};
use crate::graph::enabled_where;
use crate::model::BdnModel;

type Cluster<'a> = (String, Vec<(&'a str, &'a str)>);

#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    /// Group benefits into one cluster per SVM perspective.
    pub include_svm: bool,
    pub color_by_adoption: Option<AdoptionState>,
}

/// Maps ids to DOT node names: every non-alphanumeric character becomes `_`;
/// a name already taken gets `_2`, `_3`, ... in input order.
pub fn mangle_ids<'a>(ids: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, String> {
    let mut used = BTreeSet::new();
    let mut out = BTreeMap::new();
    for id in ids {
        if out.contains_key(id) {
            continue;
        }
        let base: String = id.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
        let mut name = base.clone();
        let mut n = 2;
        while !used.insert(name.clone()) {
            name = format!("{base}_{n}");
            n += 1;
        }
        out.insert(id.to_string(), name);
    }
    out
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// DOT text for the model: practices as boxes, benefits as ellipses,
/// dependencies as solid edges from prerequisite to dependent, realization
/// edges dashed. Statements are sorted by id.
pub fn export_dot(model: &BdnModel, options: &DotOptions) -> String {
    let names = mangle_ids(model.practices.keys().chain(model.benefits.keys()).map(String::as_str));
    let node = |id: &str| quote(&names[id]);

    let mut out = String::new();
    out.push_str("digraph bdn {\n");
    out.push_str("  rankdir=LR;\n");
    let _ = writeln!(out, "  label={};", quote(&model.context));
    out.push_str("  node [fontname=\"Helvetica\"];\n");

    let coloring = options.color_by_adoption.as_ref().map(|adoption| {
        let enabled = enabled_where(model, |id| adoption.status(id) == AdoptionStatus::Adopted);
        (adoption, enabled)
    });
    for p in model.practices.values() {
        let mut attrs = vec![format!("label={}", quote(&p.name)), "shape=box".to_string()];
        if let Some((adoption, enabled)) = &coloring {
            let status = adoption.status(&p.id);
            if enabled.contains(&p.id) {
                attrs.extend(["style=filled".into(), "fillcolor=green".into()]);
            } else if status == AdoptionStatus::Adopted {
                attrs.extend(["style=filled".into(), "fillcolor=orange".into()]);
            } else if status == AdoptionStatus::NotAdopted && p.prerequisites_met(|m| enabled.contains(m)) {
                attrs.extend(["color=blue".into(), "penwidth=2".into()]);
            } else {
                attrs.extend(["color=gray".into(), "fontcolor=gray".into()]);
            }
        }
        let _ = writeln!(out, "  {} [{}];", node(&p.id), attrs.join(", "));
    }

    let benefit_line = |out: &mut String, indent: &str, id: &str, name: &str| {
        let _ = writeln!(out, "{indent}{} [label={}, shape=ellipse];", node(id), quote(name));
    };
    if options.include_svm {
        // canonical perspective key -> (label, [(id, name)])
        let mut clusters: BTreeMap<String, Cluster> = BTreeMap::new();
        let mut loose = Vec::new();
        for b in model.benefits.values() {
            let perspective = b
                .svm_paths
                .iter()
                .filter_map(|p| model.taxonomy.canonicalize(p).ok())
                .map(|p| p.perspective().to_string())
                .min();
            match perspective {
                Some(name) => clusters
                    .entry(crate::key::canonical_key(&name))
                    .or_insert_with(|| (name, vec![]))
                    .1
                    .push((&b.id, &b.name)),
                None => loose.push((b.id.as_str(), b.name.as_str())),
            }
        }
        let cluster_names = mangle_ids(clusters.keys().map(String::as_str));
        for (key, (label, members)) in &clusters {
            let _ = writeln!(out, "  subgraph cluster_{} {{", cluster_names[key]);
            let _ = writeln!(out, "    label={};", quote(label));
            for (id, name) in members {
                benefit_line(&mut out, "    ", id, name);
            }
            out.push_str("  }\n");
        }
        for (id, name) in loose {
            benefit_line(&mut out, "  ", id, name);
        }
    } else {
        for b in model.benefits.values() {
            benefit_line(&mut out, "  ", &b.id, &b.name);
        }
    }

    let mut dependency_edges = BTreeSet::new();
    for p in model.practices.values() {
        for m in p.dependency_groups.iter().flat_map(|g| &g.members) {
            if names.contains_key(m.as_str()) {
                dependency_edges.insert((m.as_str(), p.id.as_str()));
            }
        }
    }
    for (from, to) in dependency_edges {
        let _ = writeln!(out, "  {} -> {};", node(from), node(to));
    }
    for e in &model.realization_edges {
        if names.contains_key(&e.practice_id) && names.contains_key(&e.benefit_id) {
            let _ = writeln!(out, "  {} -> {} [style=dashed];", node(&e.practice_id), node(&e.benefit_id));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::deployment;
    use crate::model::Origin;
    use crate::taxonomy::default_taxonomy;

    #[test]
    fn fixture_realization_edge() {
        let dot = export_dot(&deployment(), &DotOptions::default());
        assert!(dot.contains("\"continuous_integration\" -> \"b4_increase_productivity\" [style=dashed];"));
        assert!(dot.contains("\"automated_deployment\" -> \"continuous_deployment\";"));
        assert!(dot.contains("rankdir=LR;"));
        assert!(dot.contains("\"continuous_integration\" [label=\"Continuous integration\", shape=box];"));
        assert!(dot.contains("\"b2_cost_saving\" [label=\"Cost saving\", shape=ellipse];"));
        assert!(!dot.contains("subgraph"));
    }

    #[test]
    fn empty_model() {
        let dot = export_dot(&BdnModel::new("empty", Origin::Joint, default_taxonomy()), &DotOptions::default());
        assert!(dot.starts_with("digraph bdn {\n") && dot.ends_with("}\n"));
        assert!(!dot.contains("->") && !dot.contains("shape"));
    }

    #[test]
    fn clusters_by_perspective() {
        let options = DotOptions { include_svm: true, ..Default::default() };
        let dot = export_dot(&deployment(), &options);
        assert!(dot.contains("subgraph cluster_customer {"));
        assert!(dot.contains("subgraph cluster_internal_business_process {"));
        assert!(dot.contains("subgraph cluster_innovation_and_learning {"));
        assert_eq!(dot.matches("subgraph").count(), 3);
    }

    #[test]
    fn adoption_colors() {
        let adoption = AdoptionState::adopted("deployment", ["continuous-deployment", "automated-deployment"]);
        let options = DotOptions { color_by_adoption: Some(adoption), ..Default::default() };
        let dot = export_dot(&deployment(), &options);
        let line = |id: &str| dot.lines().find(|l| l.trim_start().starts_with(&format!("\"{id}\" ["))).unwrap();
        assert!(line("automated_deployment").contains("fillcolor=green"));
        assert!(line("continuous_deployment").contains("fillcolor=orange"));
        assert!(line("continuous_integration").contains("color=blue"));

        let mut progress = AdoptionState::new("deployment");
        progress.set("continuous-integration", AdoptionStatus::InProgress);
        let options = DotOptions { color_by_adoption: Some(progress), ..Default::default() };
        let dot = export_dot(&deployment(), &options);
        assert!(dot.contains("\"continuous_integration\" [label=\"Continuous integration\", shape=box, color=gray"));
    }

    #[test]
    fn mangling_is_injective() {
        let names = mangle_ids(["a-b", "a_b", "a.b", "c"]);
        assert_eq!(names["a-b"], "a_b");
        assert_eq!(names["a_b"], "a_b_2");
        assert_eq!(names["a.b"], "a_b_3");
        assert_eq!(names["c"], "c");
    }

    #[test]
    fn labels_are_escaped() {
        let mut model = deployment();
        model.practices.get_mut("continuous-integration").unwrap().name = "say \"hi\" \\ there".into();
        let dot = export_dot(&model, &DotOptions::default());
        assert!(dot.contains(r#"label="say \"hi\" \\ there""#));
    }
}
