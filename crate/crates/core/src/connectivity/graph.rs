//! Flip graphs over enumerated hypertriangulations.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flips::{apply_unchecked, FlipType, Mesh};
use crate::model::PointConfig;
use crate::triangulation::Hypertriangulation;

use super::enumerate::enumerate_all;

#[derive(Clone, Debug)]
pub struct FlipGraph {
    pub nodes: Vec<Hypertriangulation>,
    pub index: HashMap<String, usize>,
    /// `(i, j, type)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize, FlipType)>,
}

impl FlipGraph {
    /// Builds the graph over `nodes`, checking that every flip lands on a
    /// node and can be undone from there.
    pub fn from_nodes(nodes: Vec<Hypertriangulation>) -> Result<FlipGraph> {
        let index: HashMap<String, usize> =
            nodes.iter().enumerate().map(|(i, t)| (t.canonical_key(), i)).collect();
        let per_node: Vec<Result<Vec<(usize, usize, FlipType)>>> = nodes
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let mut out = Vec::new();
                for f in Mesh::new(t).enumerate() {
                    let u = apply_unchecked(t, &f);
                    let j = *index.get(&u.canonical_key()).ok_or_else(|| {
                        Error::Internal(format!("flip {f} leaves the enumerated set"))
                    })?;
                    if Mesh::new(&u).redetect(&f.reversed()).is_none() {
                        return Err(Error::Internal(format!("flip {f} is not reversible")));
                    }
                    out.push((i.min(j), i.max(j), f.kind()));
                }
                Ok(out)
            })
            .collect();
        let mut edges = BTreeSet::new();
        for list in per_node {
            edges.extend(list?);
        }
        Ok(FlipGraph { nodes, index, edges: edges.into_iter().collect() })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_types(&self) -> BTreeSet<FlipType> {
        self.edges.iter().map(|e| e.2).collect()
    }

    /// Connected components using only edges of the given types and only
    /// nodes accepted by `keep`; each component is a sorted node list.
    pub fn components_filtered(&self, types: &[FlipType], keep: &[bool]) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for &(i, j, t) in &self.edges {
            if types.contains(&t) && keep[i] && keep[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in (0..self.len()).filter(|&i| keep[i]) {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_filtered(&FlipType::ALL, &vec![true; self.len()])
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Shortest flip-count distances from `start` (`usize::MAX` if unreachable).
    pub fn bfs(&self, start: usize) -> Vec<usize> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = std::collections::VecDeque::from([start]);
        dist[start] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Summary like `2 hypertriangulations, 1 edge (III)`.
    pub fn summary(&self, types: &[FlipType]) -> String {
        let edges: Vec<_> = self.edges.iter().filter(|e| types.contains(&e.2)).collect();
        let kinds: BTreeSet<FlipType> = edges.iter().map(|e| e.2).collect();
        let kinds: Vec<String> = kinds.iter().map(|t| t.to_string()).collect();
        let plural = |n: usize, word: &str| if n == 1 { format!("{n} {word}") } else { format!("{n} {word}s") };
        let mut s = format!("{}, {}", plural(self.len(), "hypertriangulation"), plural(edges.len(), "edge"));
        if !kinds.is_empty() {
            s.push_str(&format!(" ({})", kinds.join(",")));
        }
        s
    }
}

pub fn flip_graph(base: &PointConfig, k: usize, budget: usize) -> Result<FlipGraph> {
    FlipGraph::from_nodes(enumerate_all(base, k, budget)?)
}
