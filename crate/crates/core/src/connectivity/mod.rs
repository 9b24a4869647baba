//! Enumeration, flip graphs and constructive flip paths.

mod connect;
mod enumerate;
mod graph;
mod paths;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use connect::connect_level2;
pub use enumerate::{enumerate_all, DEFAULT_NODE_BUDGET};
pub use graph::{flip_graph, FlipGraph};
pub use paths::{level1_path, polygon_path};

use crate::aging::aging_overlap;
use crate::coherent::{coherent_subdivision, is_coherent, Coherence};
use crate::error::{Error, Result};
use crate::flips::FlipType;
use crate::model::PointConfig;
use crate::triangulation::{Hypertriangulation, LabeledTriangle};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
}

impl ConnectivityReport {
    pub fn connected(&self) -> bool {
        self.components <= 1
    }
}

/// Connectivity of the flip graph restricted to Type I and III edges for a
/// configuration in convex position.
pub fn convex_position_check(base: &PointConfig, k: usize, budget: usize) -> Result<ConnectivityReport> {
    if !base.is_convex_position() {
        return Err(Error::NotConvexPosition);
    }
    let g = flip_graph(base, k, budget)?;
    let types = [FlipType::I, FlipType::III];
    Ok(ConnectivityReport {
        nodes: g.len(),
        edges: g.edges.iter().filter(|e| types.contains(&e.2)).count(),
        components: g.components_filtered(&types, &vec![true; g.len()]).len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentSubgraphReport {
    pub nodes: usize,
    pub coherent: usize,
    pub edges: usize,
    pub components: usize,
    /// Every coherence witness regenerates its hypertriangulation.
    pub witnesses_reproduce: bool,
}

impl CoherentSubgraphReport {
    pub fn connected(&self) -> bool {
        self.components <= 1
    }
}

/// Connectivity of the flip graph induced on coherent hypertriangulations.
pub fn coherent_subgraph_check(base: &PointConfig, k: usize, budget: usize) -> Result<CoherentSubgraphReport> {
    let g = flip_graph(base, k, budget)?;
    let mut keep = vec![false; g.len()];
    let mut reproduce = true;
    for (i, t) in g.nodes.iter().enumerate() {
        if let Coherence::Coherent(h) = is_coherent(t)? {
            keep[i] = true;
            let back = coherent_subdivision(base, k, &h)?.triangulation();
            reproduce &= back.as_ref() == Some(t);
        }
    }
    Ok(CoherentSubgraphReport {
        nodes: g.len(),
        coherent: keep.iter().filter(|&&b| b).count(),
        edges: g.edges.iter().filter(|e| keep[e.0] && keep[e.1]).count(),
        components: g.components_filtered(&FlipType::ALL, &keep).len(),
        witnesses_reproduce: reproduce,
    })
}

#[derive(Clone, Debug)]
pub struct OverlapWitness {
    pub trial: usize,
    pub config: PointConfig,
    pub hypertriangulation: Hypertriangulation,
    pub pairs: Vec<(LabeledTriangle, LabeledTriangle)>,
}

/// Searches random configurations for a level-2 hypertriangulation whose
/// aged white triangles overlap.
pub fn overlap_search(n: usize, trials: usize, seed: u64, budget: usize) -> Result<Option<OverlapWitness>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let config = crate::random::random_config(n, &mut rng);
        for t in enumerate_all(&config, 2, budget)? {
            let pairs = aging_overlap(&t)?;
            if !pairs.is_empty() {
                return Ok(Some(OverlapWitness { trial, config, hypertriangulation: t, pairs }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flips::{apply_flip, Flip};
    use rand::SeedableRng;

    const Q4: [(i64, i64); 4] = [(0, 0), (6, 0), (7, 5), (1, 6)];
    const T4: [(i64, i64); 4] = [(0, 0), (8, 0), (3, 7), (3, 2)];

    fn check_path(from: &Hypertriangulation, to: &Hypertriangulation, path: &[Flip]) {
        let mut cur = from.clone();
        for f in path {
            cur = apply_flip(&cur, f).unwrap();
            assert!(cur.validate().is_ok());
        }
        assert_eq!(&cur, to);
    }

    #[test]
    fn four_point_census() {
        let expect = [
            (Q4, [FlipType::I, FlipType::III, FlipType::I]),
            (T4, [FlipType::II, FlipType::IV, FlipType::II]),
        ];
        for (pts, kinds) in expect {
            let base = PointConfig::from_ints(&pts).unwrap();
            for k in 1..=3 {
                let g = flip_graph(&base, k, DEFAULT_NODE_BUDGET).unwrap();
                assert_eq!(g.len(), 2);
                assert_eq!(g.edges.len(), 1);
                assert_eq!(g.edges[0].2, kinds[k - 1]);
            }
        }
    }

    #[test]
    fn connect_four_points() {
        for (pts, kind) in [(Q4, FlipType::III), (T4, FlipType::IV)] {
            let base = PointConfig::from_ints(&pts).unwrap();
            let nodes = enumerate_all(&base, 2, DEFAULT_NODE_BUDGET).unwrap();
            let path = connect_level2(&nodes[0], &nodes[1]).unwrap();
            assert_eq!(path.iter().map(|f| f.kind()).collect::<Vec<_>>(), vec![kind]);
            check_path(&nodes[0], &nodes[1], &path);
            assert!(connect_level2(&nodes[0], &nodes[0]).unwrap().is_empty());
        }
    }

    #[test]
    fn connect_all_pairs_five_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2 {
            let base = crate::random::random_with_interior_point(5, &mut rng);
            let nodes = enumerate_all(&base, 2, DEFAULT_NODE_BUDGET).unwrap();
            for a in &nodes {
                for b in &nodes {
                    let path = connect_level2(a, b).unwrap();
                    check_path(a, b, &path);
                }
            }
        }
    }

    #[test]
    fn level1_and_polygon_paths() {
        let base = PointConfig::from_ints(&[(0, 0), (10, 1), (14, 9), (4, 14), (-3, 7)]).unwrap();
        let nodes = enumerate_all(&base, 1, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(nodes.len(), 5);
        for a in &nodes {
            for b in &nodes {
                check_path(a, b, &level1_path(a, b).unwrap());
                let from: Vec<_> = a.iter().copied().collect();
                let to: Vec<_> = b.iter().copied().collect();
                check_path(a, b, &polygon_path(a, &from, &to).unwrap());
            }
        }
    }

    #[test]
    fn convex_and_coherent_reports() {
        let base = PointConfig::from_ints(&[(0, 0), (10, 1), (14, 9), (4, 14), (-3, 7)]).unwrap();
        let r = convex_position_check(&base, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert!(r.connected() && r.nodes > 1);
        let c = coherent_subgraph_check(&base, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert!(c.connected() && c.witnesses_reproduce && c.coherent >= 1);
        let t4 = PointConfig::from_ints(&T4).unwrap();
        assert!(matches!(convex_position_check(&t4, 2, 10), Err(Error::NotConvexPosition)));
    }
}
