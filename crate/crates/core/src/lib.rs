//! Covariate adjustment in DAGs, CPDAGs, MAGs and PAGs.
//!
//! The crate decides and enumerates adjustment sets with the generalized
//! adjustment criterion, and ships the machinery needed to check the
//! criterion against the graphs it summarizes: Markov equivalence class
//! enumeration, latent projection, and a linear-Gaussian structural
//! equation oracle.
//!
//! ```
//! use causal_adjust::io::parse_graph;
//! use causal_adjust::criteria::satisfies_gac;
//!
//! let doc = parse_graph("graph dag { C -> X  C -> Y  X -> Y }").unwrap();
//! let g = &doc.graph;
//! let x = g.node_set(&["X"]).unwrap();
//! let y = g.node_set(&["Y"]).unwrap();
//! let z = g.node_set(&["C"]).unwrap();
//! assert!(satisfies_gac(g, x, y, z).unwrap().passed);
//! ```

pub mod cli;
pub mod criteria;
pub mod error;
pub mod graph;
pub mod io;
pub mod mec;
pub mod oracle;
pub mod paths;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, GraphBuilder, GraphClass, Mark, NodeId, NodeSet};

/// Caps on the exponential procedures. Exceeding a cap is reported as
/// [`Error::SizeCapExceeded`]; nothing is silently truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest graph on which paths are enumerated.
    pub max_path_nodes: usize,
    /// Largest number of paths a single enumeration may produce.
    pub max_paths: usize,
    /// Most undirected edges a CPDAG may have when enumerating its DAGs.
    pub max_dag_circle_edges: usize,
    /// Most circle marks a PAG may have when enumerating its MAGs.
    pub max_mag_circle_marks: usize,
    /// Largest graph for which separation fingerprints are computed.
    pub max_fingerprint_nodes: usize,
    /// Most candidate nodes whose subset lattice is searched for adjustment sets.
    pub max_candidate_nodes: usize,
    /// Step budget for the backtracking searches over equivalence classes.
    pub max_search_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_path_nodes: 15,
            max_paths: 1_000_000,
            max_dag_circle_edges: 20,
            max_mag_circle_marks: 16,
            max_fingerprint_nodes: 12,
            max_candidate_nodes: 20,
            max_search_steps: 5_000_000,
        }
    }
}
