//! Dirichlet-to-Neumann spectra, Cheeger-type constants, capacities and
//! recurrence diagnostics on weighted graphs.

pub mod cheeger;
pub mod dtn;
pub mod error;
pub mod exhaustion;
pub mod graph;
pub mod harmonic;
pub mod io;
pub mod numerics;
pub mod random;
pub mod suite;

pub use cheeger::{
    cheeger_auto, cheeger_enumerate, cheeger_parametric_cut, higher_order_constants, verify_inequalities,
    CheegerResult, Method, Ratio,
};
pub use dtn::{assemble_dtn, blowup_convergence, dirichlet_laplacian_spectrum, dtn_spectrum, DtnForm};
pub use error::{Error, Result};
pub use exhaustion::{ExhaustionConfig, ExhaustionTable, FamilySpec, GraphFamily, Status, Verdict};
pub use graph::{build_domain, make_window, relative_edge_boundary, Domain, GraphBuilder, Role, VertexId, WeightedGraph, Window};
pub use harmonic::{capacity, harmonic_extension, BoundaryData};
