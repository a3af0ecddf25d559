//! Quantum walks on clique complexes, simulated at desk scale.
//!
//! The crate builds weighted clique complexes, their boundary operators and
//! Hodge Laplacians, the classical walks whose transition matrices encode
//! those Laplacians, and unitary dilations of the walks (both an oracle-level
//! Szegedy dilation and the explicit bit-level circuits). On top of the block
//! encodings it synthesizes spectral projectors with rectangle polynomials and
//! runs the Betti, persistent Betti and verifier applications.

pub mod apps;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod hodge;
pub mod linalg;
pub mod markov;
pub mod qsvt;
pub mod quantum;

pub use complex::{CliqueComplex, OrientedSimplex, OrientedSimplexLabel, VertexSet, VertexWeightedGraph, WalkState};
pub use error::{Error, Result};
