//! Exhaustive backtracking over partial tilings.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ccw_triangles_overlap;
use crate::model::{k_fold_sums, KFoldConfig, PointConfig};
use crate::triangulation::{Hypertriangulation, LabeledTriangle};

pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

struct Search<'a> {
    cfg: &'a KFoldConfig,
    budget: usize,
    nodes: &'a AtomicUsize,
}

#[derive(Clone)]
struct State {
    /// Placed triangles as counterclockwise point indices.
    placed: Vec<[usize; 3]>,
    /// Directed edges whose left side is still uncovered, keyed by labels so
    /// that the smallest is chosen deterministically.
    open: BTreeSet<(usize, usize)>,
}

impl Search<'_> {
    fn tick(&self) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::BudgetExceeded { what: "enumeration node", limit: self.budget });
        }
        Ok(())
    }

    /// Triangles that can be placed on the left of `a -> b`.
    fn candidates(&self, state: &State, a: usize, b: usize) -> Vec<usize> {
        let cfg = self.cfg;
        let (la, lb) = (cfg.label(a), cfg.label(b));
        if la.common(lb) + 1 != cfg.k() {
            return Vec::new();
        }
        let orient = |x: usize, y: usize, z: usize| cfg.orient(x, y, z);
        (0..cfg.len())
            .filter(|&c| {
                cfg.orient(a, b, c) > 0
                    && LabeledTriangle::new(la, lb, cfg.label(c)).is_ok()
                    && !state.placed.iter().any(|&t| ccw_triangles_overlap(t, [a, b, c], orient))
            })
            .collect()
    }

    fn place(state: &State, a: usize, b: usize, c: usize) -> State {
        let mut next = state.clone();
        next.open.remove(&(a, b));
        for (p, q) in [(b, c), (c, a)] {
            if !next.open.remove(&(p, q)) {
                next.open.insert((q, p));
            }
        }
        next.placed.push([a, b, c]);
        next
    }

    fn run(&self, state: State, out: &mut Vec<Vec<[usize; 3]>>) -> Result<()> {
        self.tick()?;
        let Some(&(a, b)) = state.open.iter().next() else {
            out.push(state.placed);
            return Ok(());
        };
        for c in self.candidates(&state, a, b) {
            self.run(Self::place(&state, a, b, c), out)?;
        }
        Ok(())
    }
}

/// Every valid hypertriangulation of `A^(k)`, sorted by canonical key.
///
/// At each step the smallest directed edge with uncovered left side is
/// closed by every compatible triangle. The tilings found are distinct
/// because the branches differ on the triangle placed at that edge.
pub fn enumerate_all(base: &PointConfig, k: usize, budget: usize) -> Result<Vec<Hypertriangulation>> {
    let cfg = k_fold_sums(base, k)?;
    cfg.require_strongly_generic()?;
    enumerate_config(&cfg, budget)
}

pub(crate) fn enumerate_config(cfg: &Arc<KFoldConfig>, budget: usize) -> Result<Vec<Hypertriangulation>> {
    let hull = cfg.hull_cycle();
    let open: BTreeSet<(usize, usize)> =
        (0..hull.len()).map(|i| (hull[i], hull[(i + 1) % hull.len()])).collect();
    let nodes = AtomicUsize::new(0);
    let search = Search { cfg, budget, nodes: &nodes };
    let root = State { placed: Vec::new(), open };
    search.tick()?;
    let &(a, b) = root.open.iter().next().expect("hull has edges");
    // Split the first branching level across threads.
    let branches: Vec<Result<Vec<Vec<[usize; 3]>>>> = search
        .candidates(&root, a, b)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            search.run(Search::place(&root, a, b, c), &mut out)?;
            Ok(out)
        })
        .collect();
    let mut found = BTreeMap::new();
    for branch in branches {
        for placed in branch? {
            let tris = placed.iter().map(|t| {
                LabeledTriangle::new(cfg.label(t[0]), cfg.label(t[1]), cfg.label(t[2])).expect("classified")
            });
            let h = Hypertriangulation::from_triangles_unchecked(cfg.clone(), tris);
            found.insert(h.canonical_key(), h);
        }
    }
    Ok(found.into_values().collect())
}
