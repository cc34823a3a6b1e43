//! Adaptive (presortedness-sensitive) sorting, Pareto front, and planar convex
//! hull with witness-certified output, together with the universe machinery
//! (entropies, region sets, recursion trees, downdrafts, counting checks) and
//! generators/benchmarks that tie it all together.

pub mod entropy;
pub mod geom;
pub mod harness;
pub mod hull;
pub mod io;
pub mod meter;
pub mod oracles;
pub mod pareto;
pub mod rank;
pub mod region;
pub mod select;
pub mod sort;
pub mod universe;

pub use entropy::{
    multiset_entropy, quicksort_entropy, size_vector_entropy, timsort_entropy,
    universe_lower_bound, EntropyError, EntropyReport, SizeVector,
};
pub use geom::{
    dominates, general_position_check, orientation, signed_area2, strictly_inside_triangle,
    GeomError, Instance, Orientation, Point, COORD_LIMIT,
};
pub use hull::{
    build_quadrangle_tree, build_quadrangle_tree_grouped, convex_hull, find_bridge,
    quadrangle_depth_cost, quadrangle_kappa_precedes, quadrangle_order, quadrangle_order_grouped,
    verify_hull, HullCertError, HullError, HullList, HullWitnessList, QuadrangleOrder,
    QuadrangleTree,
};
pub use harness::{
    bench, run_one, scaling_report, to_csv, Algorithm, BenchRecord, Family, Generated,
    GeneratorSpec, HarnessError, ScalingRow,
};
pub use io::IoError;
pub use meter::CostMeter;
pub use pareto::{
    build_quadrant_tree, depth_cost, pareto_front, verify_pareto, FrontList, ParetoCertError,
    ParetoError, ParetoWitnessList, QuadrantTree,
};
pub use region::{
    observed_compass, respects, AxisOrder, CompassFunction, PointGroups, Rect, Region, RegionError,
    RegionKind, RegionSet, Triangle,
};
pub use rank::{rank_profile, RankProfile};
pub use sort::truncated_quicksort;
pub use universe::{
    check_counting_bounds, enumerate_ond, enumerate_ond_grouped, enumerate_universe, linear_order_l,
    linear_order_l_grouped, phi_map, refine_regions, witness_classes, BoundsReport, OndReport,
    PhiImage, Problem, UniverseCensus, UniverseError,
};
