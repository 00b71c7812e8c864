//! Hierarchical tile decompositions ("toasts") of finite lattice graphs, the
//! constructions they certify — one-ended spanning forests, balanced
//! orientations of even-degree graphs, perfect matchings of regular bipartite
//! graphs — and independent brute-force oracles for all of it.

pub mod error;
pub mod folner;
pub mod graph;
pub mod levels;
pub mod matching;
pub mod oracles;
pub mod orientation;
pub mod ratio;
pub mod render;
pub mod report;
pub mod toast;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{edge, BoundaryMode, Edge, EdgeSet, Graph, Topology, VertexSet};
pub use ratio::Ratio;
pub use report::{Check, Report};
pub use toast::{Tile, Toast, ToastFlags};
