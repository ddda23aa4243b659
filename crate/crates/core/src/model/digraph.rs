use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{BdnModel, PracticeId};

/// Conservative dependency graph: `p -> q` whenever `q` is a member of any
/// of `p`'s groups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyDigraph {
    adjacency: BTreeMap<PracticeId, BTreeSet<PracticeId>>,
}

impl DependencyDigraph {
    pub fn add_node(&mut self, id: impl Into<String>) {
        self.adjacency.entry(id.into()).or_default();
    }

    pub fn add_edge(&mut self, from: impl Into<String>, to: impl Into<String>) {
        let to = to.into();
        self.add_node(to.clone());
        self.adjacency.entry(from.into()).or_default().insert(to);
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.adjacency.keys().map(String::as_str)
    }

    pub fn successors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.adjacency.get(id).into_iter().flatten().map(String::as_str)
    }

    /// Edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.adjacency.iter().flat_map(|(from, tos)| tos.iter().map(move |to| (from.as_str(), to.as_str())))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum()
    }
}

pub fn dependency_digraph(model: &BdnModel) -> DependencyDigraph {
    let mut graph = DependencyDigraph::default();
    for p in model.practices.values() {
        graph.add_node(p.id.clone());
        for m in p.dependency_groups.iter().flat_map(|g| &g.members) {
            graph.add_edge(p.id.clone(), m.clone());
        }
    }
    graph
}

/// One cycle per strongly connected component that has one, as a closed walk
/// `[a, ..., a]` starting at the component's smallest id. Empty iff acyclic.
pub fn detect_cycles(graph: &DependencyDigraph) -> Vec<Vec<PracticeId>> {
    let mut g = DiGraph::<&str, ()>::new();
    let index: BTreeMap<&str, NodeIndex> = graph.nodes().map(|n| (n, g.add_node(n))).collect();
    for (from, to) in graph.edges() {
        g.add_edge(index[from], index[to], ());
    }

    let mut cycles = Vec::new();
    for component in tarjan_scc(&g) {
        let members: BTreeSet<&str> = component.iter().map(|&i| g[i]).collect();
        let start = *members.first().expect("components are non-empty");
        if members.len() == 1 && !graph.successors(start).any(|s| s == start) {
            continue;
        }
        cycles.push(shortest_cycle_through(graph, start, &members));
    }
    cycles.sort();
    cycles
}

fn shortest_cycle_through(graph: &DependencyDigraph, start: &str, within: &BTreeSet<&str>) -> Vec<PracticeId> {
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        for next in graph.successors(node).filter(|n| within.contains(n)) {
            if next == start {
                let mut interior = Vec::new();
                let mut cur = node;
                while cur != start {
                    interior.push(cur.to_string());
                    cur = parent[cur];
                }
                interior.reverse();
                let mut walk = vec![start.to_string()];
                walk.extend(interior);
                walk.push(start.to_string());
                return walk;
            }
            if !parent.contains_key(next) && next != start {
                parent.insert(next, node);
                queue.push_back(next);
            }
        }
    }
    unreachable!("a strongly connected component with a cycle has one through every member")
}
