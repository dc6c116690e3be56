//! Realisation counting for rigid graphs.
//!
//! Computes the Euclidean realisation number `c_d(G)` and the spherical
//! realisation number `c*_d(G)` of a rigid graph by solving pinned
//! polynomial systems with total-degree homotopy continuation, together
//! with the combinatorial machinery around them: graph codes, rigidity
//! tests, the (2,3) pebble game, enumeration of small minimally rigid
//! graphs, derived-count combinators and ratio statistics.

pub mod codec;
pub mod counting;
pub mod error;
pub mod graph;
pub mod homotopy;
pub mod linalg;
pub mod polysys;
pub mod rigidity;
pub mod stats;

pub use codec::{canonical_form, decode_graph, encode_graph, GraphCode};
pub use counting::{
    c1, check_identities, count_by_solve, derived_count_cone, derived_count_glue,
    derived_count_zero_ext, realisation_count, CountOptions, CountResult, CountValue,
};
pub use error::{CountError, GraphError, RigidityError, SolveError, StatsError, SystemError};
pub use graph::Graph;
pub use homotopy::{solve, SolveResult, TrackerConfig};
pub use polysys::{
    cone_at_infinity_system, euclidean_system, sample_instance, spherical_system, InstanceSpec,
    Model, PolySystem,
};
pub use rigidity::{
    enumerate_min_rigid, generic_rank, is_d_independent, is_d_rigid, is_minimally_d_rigid,
    pebble_game_2_3, rigidity_matrix, rigidity_matrix_rational,
    spherical_jacobian_stack_rational, RankReport, RealisationReal, Sparsity,
};
pub use stats::{
    alpha_bounds_report, alpha_lower_bound, batch_count, pair_distribution, ratio_stats,
    BatchOptions, CountRecord, RatioSummary,
};
