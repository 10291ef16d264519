//! C6-free layer subgraphs of the hypercube built from random vectors over
//! F_2, independent freeness detectors, and exact density reports against
//! c/2, c/4 and c/12 where `c = prod_{k>=1} (1 - 2^-k)`.

pub mod bounds;
pub mod construction;
pub mod cube;
pub mod detector;
pub mod error;
pub mod gf2;
pub mod io;

pub use bounds::{
    c10_pipeline, density_report_suite, search_coloring_small_n, verify_coloring, BoundName,
    ColoringCertificate, DensityReport, PipelineOutcome, Scope, Suite,
};
pub use construction::{
    build_layer_graph, constant_c, edge_count, edge_probability_closed_form, exact_expected_edges,
    find_good_assignment, member_lower, member_upper, multiset_of, sample_assignment,
    union_odd_layers, GoodAssignment, LayerSubgraph, UnionGraph, VectorAssignment,
};
pub use cube::{are_adjacent, cube_edge_count, layer_edge_count, layer_vertices, LayerId, QnGraph, Side, SubsetMask};
pub use detector::{
    explain_c6_impossibility, find_c6_minus, find_c6_structured, find_cycle_generic, CycleWitness,
    PathWitness, SubcubePattern,
};
pub use error::{Error, Result};
pub use gf2::{in_span, is_basis, quotient_image, rank, sample_nonzero, GF2Vec};
