//! Exact tools for graphs whose Laplacians are diagonalised by complex
//! Hadamard matrices: cyclotomic arithmetic, Butson matrices, graph
//! constructions, certification, Cheeger constants and quantum walks.

pub mod cyclotomic;
pub mod diagonalise;
pub mod graphs;
pub mod hadamard;
pub mod linalg;
pub mod spectral;
pub mod walks;

pub use cyclotomic::CyclotomicInt;
pub use graphs::WeightedGraph;
pub use hadamard::ButsonMatrix;
