//! Exact combinatorics for triangular alternation limit algebras `T(r_k, s_k)`.
//!
//! The crate works entirely in exact arithmetic. It covers:
//!
//! * [`supernat`]: eventually periodic multiplicity sequences and the
//!   supernatural numbers they generate;
//! * [`cantor`]: the two-sided coordinate space `X(r_k, s_k)`, the
//!   lexicographic relation `R`, gap pairs, the valuation `nu`, the cocycle and
//!   invariant measures;
//! * [`matrixalg`]: formal upper-triangular matrix-unit algebras with the
//!   refinement and standard embeddings;
//! * [`autgroup`]: the automorphism group `Z^d`, the zig-zag generators, the
//!   density search and the diagonal-fixing witnesses.

pub mod autgroup;
pub mod cantor;
mod error;
pub mod linsys;
pub mod matrixalg;
pub mod rational;
pub mod sampling;
pub mod supernat;

pub use error::{Error, Result};
pub use rational::Q;
