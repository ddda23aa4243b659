//! Software Value Map taxonomy: perspective → value aspect → sub-aspect →
//! value component.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::key::canonical_key;

pub const MAX_DEPTH: usize = 4;
pub const DEFAULT_VERSION: &str = "svm-default";

/// A `/`-separated path of one to four taxonomy names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SvmPath {
    segments: Vec<String>,
}

impl SvmPath {
    pub fn new<I, S>(segments: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(|s| s.into().trim().to_string()).collect();
        let text = segments.join("/");
        if segments.is_empty() {
            return Err(Error::InvalidPath { path: text, reason: "empty path".into() });
        }
        if segments.len() > MAX_DEPTH {
            return Err(Error::InvalidPath {
                path: text,
                reason: format!("{} segments, at most {MAX_DEPTH} allowed", segments.len()),
            });
        }
        if segments.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidPath { path: text, reason: "empty segment".into() });
        }
        Ok(SvmPath { segments })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split('/'))
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn depth(&self) -> usize {
        self.segments.len()
    }

    pub fn perspective(&self) -> &str {
        &self.segments[0]
    }

    /// Segment-wise canonical keys.
    pub fn key(&self) -> Vec<String> {
        self.segments.iter().map(|s| canonical_key(s)).collect()
    }

    /// True when `prefix` is equal to or an ancestor of `self`, comparing
    /// canonical keys.
    pub fn starts_with(&self, prefix: &SvmPath) -> bool {
        prefix.depth() <= self.depth()
            && prefix.segments.iter().zip(&self.segments).all(|(a, b)| canonical_key(a) == canonical_key(b))
    }

    /// All ancestors including `self`, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = SvmPath> + '_ {
        (1..=self.depth()).map(|n| SvmPath { segments: self.segments[..n].to_vec() })
    }

    fn child(&self, name: &str) -> SvmPath {
        let mut segments = self.segments.clone();
        segments.push(name.to_string());
        SvmPath { segments }
    }
}

impl fmt::Display for SvmPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("/"))
    }
}

impl std::str::FromStr for SvmPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SvmPath::parse(s)
    }
}

impl Serialize for SvmPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SvmPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        SvmPath::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Perspective,
    Aspect,
    SubAspect,
    Component,
}

impl Level {
    /// Level of a node at `depth` (1-based). Leaves at depth three or four
    /// are value components; value maps often list components directly under
    /// an aspect.
    fn for_node(depth: usize, is_leaf: bool) -> Level {
        match depth {
            1 => Level::Perspective,
            2 => Level::Aspect,
            3 if !is_leaf => Level::SubAspect,
            _ => Level::Component,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvmNode {
    pub name: String,
    pub level: Level,
    pub children: Vec<SvmNode>,
}

impl SvmNode {
    pub fn child(&self, segment: &str) -> Option<&SvmNode> {
        let key = canonical_key(segment);
        self.children.iter().find(|c| canonical_key(&c.name) == key)
    }

    fn collect_components(&self, path: &SvmPath, out: &mut Vec<SvmPath>) {
        if self.level == Level::Component {
            out.push(path.clone());
        }
        for child in &self.children {
            child.collect_components(&path.child(&child.name), out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvmTaxonomy {
    pub version: String,
    pub perspectives: Vec<SvmNode>,
}

#[derive(Serialize, Deserialize)]
struct TaxonomyDoc {
    perspectives: Vec<NodeDoc>,
    version: String,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    #[serde(default)]
    children: Vec<NodeDoc>,
    name: String,
}

impl SvmTaxonomy {
    pub fn perspective(&self, segment: &str) -> Option<&SvmNode> {
        let key = canonical_key(segment);
        self.perspectives.iter().find(|p| canonical_key(&p.name) == key)
    }

    /// Finds the node addressed by `path`, matching segments by canonical key.
    pub fn resolve(&self, path: &SvmPath) -> Result<&SvmNode> {
        self.walk(path).map(|(node, _)| node)
    }

    /// Like [`resolve`](Self::resolve) but returns the path spelled with the
    /// taxonomy's own names.
    pub fn canonicalize(&self, path: &SvmPath) -> Result<SvmPath> {
        self.walk(path).map(|(_, spelled)| spelled)
    }

    fn walk(&self, path: &SvmPath) -> Result<(&SvmNode, SvmPath)> {
        let not_found = |matched: &[String]| Error::PathNotFound { path: path.to_string(), matched: matched.join("/") };
        let mut segments = path.segments().iter();
        let first = segments.next().expect("paths are non-empty");
        let mut node = self.perspective(first).ok_or_else(|| not_found(&[]))?;
        let mut spelled = vec![node.name.clone()];
        for segment in segments {
            node = node.child(segment).ok_or_else(|| not_found(&spelled))?;
            spelled.push(node.name.clone());
        }
        Ok((node, SvmPath { segments: spelled }))
    }

    /// Component-level descendants of `prefix` (itself included), sorted by
    /// text form.
    pub fn list_components(&self, prefix: &SvmPath) -> Result<Vec<SvmPath>> {
        let (node, spelled) = self.walk(prefix)?;
        let mut out = Vec::new();
        node.collect_components(&spelled, &mut out);
        out.sort_by_key(|p| p.to_string());
        Ok(out)
    }

    /// Every component path in the taxonomy.
    pub fn all_components(&self) -> Vec<SvmPath> {
        let mut out = Vec::new();
        for p in &self.perspectives {
            p.collect_components(&SvmPath { segments: vec![p.name.clone()] }, &mut out);
        }
        out.sort_by_key(|p| p.to_string());
        out
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::TaxonomyParse(e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &serde_json::Value) -> Result<Self> {
        let doc = TaxonomyDoc::deserialize(value).map_err(|e| Error::TaxonomyParse(e.to_string()))?;
        let perspectives = build_level(&doc.perspectives, &[])?;
        Ok(SvmTaxonomy { version: doc.version, perspectives })
    }

    pub fn to_value(&self) -> serde_json::Value {
        fn node(n: &SvmNode) -> NodeDoc {
            NodeDoc { children: n.children.iter().map(node).collect(), name: n.name.clone() }
        }
        let doc =
            TaxonomyDoc { perspectives: self.perspectives.iter().map(node).collect(), version: self.version.clone() };
        serde_json::to_value(doc).expect("taxonomy documents always serialize")
    }

    /// Taxonomy document text: sorted keys, 2-space indent, trailing newline.
    pub fn to_document(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        text.push('\n');
        text
    }

    /// Whether every node of `other` also exists here (by canonical key).
    pub fn contains(&self, other: &SvmTaxonomy) -> bool {
        fn covers(mine: &[SvmNode], theirs: &[SvmNode]) -> bool {
            theirs.iter().all(|t| {
                let key = canonical_key(&t.name);
                mine.iter().find(|m| canonical_key(&m.name) == key).is_some_and(|m| covers(&m.children, &t.children))
            })
        }
        covers(&self.perspectives, &other.perspectives)
    }

    /// Node-wise union, keeping this taxonomy's spelling and order and
    /// appending nodes only present in `other`.
    pub fn union(&self, other: &SvmTaxonomy) -> Result<SvmTaxonomy> {
        fn merge(mine: &[SvmNode], theirs: &[SvmNode]) -> Vec<SvmNode> {
            let mut out: Vec<SvmNode> = mine.to_vec();
            for t in theirs {
                let key = canonical_key(&t.name);
                match out.iter_mut().find(|m| canonical_key(&m.name) == key) {
                    Some(m) => m.children = merge(&m.children, &t.children),
                    None => out.push(t.clone()),
                }
            }
            out
        }
        let merged = merge(&self.perspectives, &other.perspectives);
        // Re-derive levels: a former leaf may have gained children.
        let doc = SvmTaxonomy { version: self.version.clone(), perspectives: merged };
        SvmTaxonomy::from_value(&doc.to_value())
    }
}

fn build_level(docs: &[NodeDoc], parent: &[String]) -> Result<Vec<SvmNode>> {
    let depth = parent.len() + 1;
    let mut seen = std::collections::BTreeSet::new();
    let mut nodes = Vec::with_capacity(docs.len());
    for doc in docs {
        let name = doc.name.trim().to_string();
        if name.is_empty() {
            return Err(Error::TaxonomyParse(format!("empty node name under {:?}", parent.join("/"))));
        }
        if name.contains('/') {
            return Err(Error::TaxonomyParse(format!("node name {name:?} contains '/'")));
        }
        if !seen.insert(canonical_key(&name)) {
            return Err(Error::DuplicateSibling { parent: parent.join("/"), name });
        }
        let mut path = parent.to_vec();
        path.push(name.clone());
        if depth == MAX_DEPTH && !doc.children.is_empty() {
            return Err(Error::DepthExceeded(path.join("/")));
        }
        let children = build_level(&doc.children, &path)?;
        let level = Level::for_node(depth, children.is_empty());
        nodes.push(SvmNode { name, level, children });
    }
    Ok(nodes)
}

/// The built-in Software Value Map: the four value perspectives, populated
/// only with the aspects and components the deployment example relies on.
pub fn default_taxonomy() -> SvmTaxonomy {
    fn n(name: &str, children: Vec<NodeDoc>) -> NodeDoc {
        NodeDoc { children, name: name.to_string() }
    }
    fn leaves(names: &[&str]) -> Vec<NodeDoc> {
        names.iter().map(|name| n(name, vec![])).collect()
    }
    let doc = TaxonomyDoc {
        perspectives: vec![
            n("Financial", vec![]),
            n(
                "Customer",
                vec![
                    n(
                        "Perceived value",
                        vec![
                            n("Intrinsic value", leaves(&["functionality", "reliability", "usability"])),
                            n("Delivery process value", leaves(&["process w.r.t. time"])),
                        ],
                    ),
                    n("Customer lifetime value", vec![n("Revenue", leaves(&["upselling revenue"]))]),
                ],
            ),
            n(
                "Internal Business Process",
                vec![n("production value", leaves(&["market requirement value", "physical value wrt. time"]))],
            ),
            n(
                "Innovation and learning",
                vec![n(
                    "value of technology",
                    leaves(&["human capital value", "customer capital value", "market value size"]),
                )],
            ),
        ],
        version: DEFAULT_VERSION.to_string(),
    };
    let perspectives = build_level(&doc.perspectives, &[]).expect("built-in taxonomy is valid");
    SvmTaxonomy { version: doc.version, perspectives }
}
