//! Model document (JSON) reading and canonical writing.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::validate::{validate, Diagnostic};
use super::*;
use crate::error::{Error, Result};
use crate::taxonomy::{default_taxonomy, SvmPath, SvmTaxonomy};

pub const BUILTIN_TAXONOMY: &str = "svm-default";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    #[serde(default)]
    benefits: Vec<BenefitDoc>,
    context: String,
    origin: Origin,
    #[serde(default)]
    practices: Vec<PracticeDoc>,
    #[serde(default)]
    principles: Vec<PrincipleDoc>,
    #[serde(default)]
    realizes: Vec<EdgeDoc>,
    taxonomy: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrincipleDoc {
    #[serde(default)]
    description: String,
    id: String,
    name: String,
    #[serde(default)]
    provenance: Vec<Provenance>,
}

/// A group is written as a bare id list unless it carries provenance.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum GroupDoc {
    Members(Vec<String>),
    Annotated { members: Vec<String>, provenance: Vec<Provenance> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PracticeDoc {
    #[serde(default)]
    depends: Vec<GroupDoc>,
    #[serde(default)]
    description: String,
    id: String,
    name: String,
    #[serde(default)]
    principles: Vec<String>,
    #[serde(default)]
    provenance: Vec<Provenance>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenefitDoc {
    id: String,
    name: String,
    #[serde(default)]
    provenance: Vec<Provenance>,
    svm: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    svm_placeholder: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    benefit: String,
    #[serde(default)]
    evidence: Vec<EvidenceRecord>,
    practice: String,
    #[serde(default)]
    provenance: Vec<Provenance>,
}

/// Parses a model document against the built-in taxonomy.
///
/// Returns the model, or every diagnostic found (warnings included) when at
/// least one of them is an error.
pub fn parse_model(text: &str) -> Result<BdnModel, Vec<Diagnostic>> {
    parse_model_with(text, &default_taxonomy())
}

/// Like [`parse_model`], resolving `{"builtin": "svm-default"}` to `builtin`.
pub fn parse_model_with(text: &str, builtin: &SvmTaxonomy) -> Result<BdnModel, Vec<Diagnostic>> {
    let parse_error = |msg: String| vec![Diagnostic::new("E-PARSE", msg, Vec::<String>::new())];
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;

    let mut diags = Vec::new();
    let (taxonomy, taxonomy_source) = match read_taxonomy(&doc.taxonomy, builtin) {
        Ok(t) => t,
        Err(e) => return Err(parse_error(format!("taxonomy: {e}"))),
    };
    let mut model = BdnModel::new(doc.context, doc.origin, taxonomy);
    model.taxonomy_source = taxonomy_source;

    for p in doc.principles {
        check_provenance(&p.id, &p.provenance, &mut diags);
        if check_id("principle", &p.id, model.principles.contains_key(&p.id), &mut diags) {
            model.principles.insert(
                p.id.clone(),
                Principle { id: p.id, name: p.name, description: p.description, provenance: p.provenance },
            );
        }
    }

    for p in doc.practices {
        check_provenance(&p.id, &p.provenance, &mut diags);
        let mut groups = Vec::with_capacity(p.depends.len());
        for g in p.depends {
            let (members, provenance) = match g {
                GroupDoc::Members(m) => (m, vec![]),
                GroupDoc::Annotated { members, provenance } => (members, provenance),
            };
            check_provenance(&p.id, &provenance, &mut diags);
            if members.is_empty() {
                diags.push(Diagnostic::new(
                    "E-PARSE",
                    format!("practice {:?} has an empty dependency group", p.id),
                    [p.id.clone()],
                ));
                continue;
            }
            groups.push(DependencyGroup { members: members.into_iter().collect(), provenance });
        }
        if check_id("practice", &p.id, model.practices.contains_key(&p.id), &mut diags) {
            model.practices.insert(
                p.id.clone(),
                Practice {
                    id: p.id,
                    name: p.name,
                    description: p.description,
                    principle_ids: p.principles.into_iter().collect(),
                    dependency_groups: groups,
                    provenance: p.provenance,
                },
            );
        }
    }

    for b in doc.benefits {
        check_provenance(&b.id, &b.provenance, &mut diags);
        let mut paths = Vec::with_capacity(b.svm.len());
        for text in &b.svm {
            match SvmPath::parse(text) {
                Ok(p) => paths.push(p),
                Err(e) => diags.push(Diagnostic::new("E-SVM-PATH", format!("benefit {:?}: {e}", b.id), [b.id.clone()])),
            }
        }
        if check_id("benefit", &b.id, model.benefits.contains_key(&b.id), &mut diags) {
            model.benefits.insert(
                b.id.clone(),
                Benefit {
                    id: b.id,
                    name: b.name,
                    svm_paths: paths,
                    svm_placeholder: b.svm_placeholder,
                    provenance: b.provenance,
                },
            );
        }
    }

    let mut seen_edges = BTreeSet::new();
    for e in doc.realizes {
        check_provenance(&e.practice, &e.provenance, &mut diags);
        if !seen_edges.insert((e.practice.clone(), e.benefit.clone())) {
            diags.push(Diagnostic::new(
                "E-DUPLICATE-ID",
                format!("duplicate realization edge {} -> {}", e.practice, e.benefit),
                [e.practice.clone(), e.benefit.clone()],
            ));
            continue;
        }
        model.realization_edges.push(RealizationEdge {
            practice_id: e.practice,
            benefit_id: e.benefit,
            provenance: e.provenance,
            evidence: e.evidence,
        });
    }
    model.sort_edges();

    diags.extend(validate(&model));
    if diags.iter().any(Diagnostic::is_error) {
        Err(validate::finish(diags))
    } else {
        Ok(model)
    }
}

fn read_taxonomy(value: &Value, builtin: &SvmTaxonomy) -> Result<(SvmTaxonomy, TaxonomySource)> {
    if let Some(name) = value.get("builtin") {
        return match name.as_str() {
            Some(BUILTIN_TAXONOMY) if value.as_object().is_some_and(|o| o.len() == 1) => {
                Ok((builtin.clone(), TaxonomySource::Builtin))
            }
            _ => Err(Error::TaxonomyParse(format!("unknown builtin taxonomy {name}"))),
        };
    }
    Ok((SvmTaxonomy::from_value(value)?, TaxonomySource::Inline))
}

/// Records an id problem; returns whether the element should be kept.
fn check_id(kind: &str, id: &str, duplicate: bool, diags: &mut Vec<Diagnostic>) -> bool {
    if id.trim().is_empty() {
        diags.push(Diagnostic::new("E-PARSE", format!("{kind} with empty id"), Vec::<String>::new()));
        return false;
    }
    if duplicate {
        diags.push(Diagnostic::new("E-DUPLICATE-ID", format!("duplicate {kind} id {id:?}"), [id]));
        return false;
    }
    true
}

fn check_provenance(owner: &str, provenance: &[Provenance], diags: &mut Vec<Diagnostic>) {
    if provenance.iter().any(|p| p.label.trim().is_empty()) {
        diags.push(Diagnostic::new(
            "E-PARSE",
            format!("{owner:?} has a provenance entry with an empty label"),
            [owner],
        ));
    }
}

/// Canonical model document: sorted keys, id-ordered arrays, 2-space indent,
/// trailing newline.
pub fn serialize_model(model: &BdnModel) -> String {
    let taxonomy = match model.taxonomy_source {
        TaxonomySource::Builtin => {
            let mut m = serde_json::Map::new();
            m.insert("builtin".into(), Value::String(BUILTIN_TAXONOMY.into()));
            Value::Object(m)
        }
        TaxonomySource::Inline => model.taxonomy.to_value(),
    };
    let doc = ModelDoc {
        benefits: model
            .benefits
            .values()
            .map(|b| BenefitDoc {
                id: b.id.clone(),
                name: b.name.clone(),
                provenance: b.provenance.clone(),
                svm: b.svm_paths.iter().map(ToString::to_string).collect(),
                svm_placeholder: b.svm_placeholder,
            })
            .collect(),
        context: model.context.clone(),
        origin: model.origin,
        practices: model
            .practices
            .values()
            .map(|p| PracticeDoc {
                depends: p
                    .dependency_groups
                    .iter()
                    .map(|g| {
                        let members = g.members.iter().cloned().collect();
                        if g.provenance.is_empty() {
                            GroupDoc::Members(members)
                        } else {
                            GroupDoc::Annotated { members, provenance: g.provenance.clone() }
                        }
                    })
                    .collect(),
                description: p.description.clone(),
                id: p.id.clone(),
                name: p.name.clone(),
                principles: p.principle_ids.iter().cloned().collect(),
                provenance: p.provenance.clone(),
            })
            .collect(),
        principles: model
            .principles
            .values()
            .map(|p| PrincipleDoc {
                description: p.description.clone(),
                id: p.id.clone(),
                name: p.name.clone(),
                provenance: p.provenance.clone(),
            })
            .collect(),
        realizes: model
            .realization_edges
            .iter()
            .map(|e| EdgeDoc {
                benefit: e.benefit_id.clone(),
                evidence: e.evidence.clone(),
                practice: e.practice_id.clone(),
                provenance: e.provenance.clone(),
            })
            .collect(),
        taxonomy,
    };
    // Round-trip through Value so every object, nested ones included, has
    // sorted keys.
    let value = serde_json::to_value(&doc).expect("model documents always serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    text
}
