//! Exact-arithmetic engine for level-k hypertriangulations of planar point
//! sets.

pub mod aging;
pub mod coherent;
pub mod connectivity;
pub mod error;
pub mod flips;
pub mod lp;
pub mod geometry;
pub mod model;
pub mod random;
pub mod triangulation;

pub use error::{Error, Result};
pub use geometry::{rat, ratio, rational_to_f64, Point2, Rational, SimplePolygon};
pub use model::{k_fold_sums, Genericity, KFoldConfig, Label, PointConfig};
pub use triangulation::{classify, Color, Hypertriangulation, LabeledTriangle, ValidityReport, Violation};
pub use flips::{apply_flip, enumerate_flips, Direction, Flip, FlipType};
pub use aging::{age_triangle, aging_overlap, build_level2, collapse_level2, star_convexity_witness, unage_triangle};
pub use coherent::{coherent_aging_check, coherent_subdivision, gkz, is_coherent, AgingCheck, Coherence, CoherentOutcome, GkzVector, HeightFunction, NonTriangularReport};
pub use connectivity::{
    coherent_subgraph_check, connect_level2, convex_position_check, enumerate_all, flip_graph, level1_path,
    overlap_search, polygon_path, FlipGraph,
};
