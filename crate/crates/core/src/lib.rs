//! Combinatorial machinery for two-colored separated Bratteli diagrams:
//! finite truncations of l-diagrams and h-diagrams, generalized finite shift
//! graphs with their canonical resolutions, the truncated shift dynamics on
//! blue path spaces, and the exact symbolic corner algebras with their
//! Steinberg-algebra bisection model.

pub mod algebra;
pub mod config;
pub mod diagram;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod resolution;
pub mod steinberg;
pub mod symbolic;

pub use diagram::{ContractionSequence, LDiagramTrunc, Romb};
pub use dynamics::{BluePrefix, PrefixSet, SigmaCylinderDecomposition};
pub use error::{Error, Result};
pub use graph::{
    gfs_from_digraph, validate_gfs, validate_layer, Color, Digraph, GfsGraph, Report,
    SeparatedBipartiteLayer,
};
pub use matrix::IntMatrix;
pub use symbolic::SymbolicSystem;
