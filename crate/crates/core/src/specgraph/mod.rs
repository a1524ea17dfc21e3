//! Digraphs of representation matrices, joint diagonalization of WW† and
//! W†W, and decomposition into irreducible blocks.

mod decompose;
mod digraph;
mod simdiag;

pub use decompose::{decompose, Block, DecompositionReport, COMMUTATOR_TOL, DEFAULT_DECOMPOSE_TOL};
pub use digraph::{classify, digraph_of, strongly_connected, transmitters_receivers, ComponentKind, Digraph};
pub use simdiag::{joint_diagonalize, simultaneous_diagonalize};
