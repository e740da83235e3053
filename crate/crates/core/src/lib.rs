//! Computer algebra for finite Gamma-rings.
//!
//! A Gamma-ring is a pair of finite abelian groups `(M, Gamma)` with a triple
//! product `M x Gamma x M -> M`. This crate builds such rings as dense index
//! tables, checks their axioms, constructs Peirce decompositions relative to
//! idempotents, and searches for n-multiplicative isomorphisms and derivations
//! in order to verify, exhaustively, that they are additive whenever the ring
//! satisfies the structural conditions (i)-(iv) on an idempotent family.

pub mod axioms;
pub mod error;
pub mod format;
pub mod group;
pub mod ideal;
pub mod maps;
pub mod peirce;
pub mod ring;
pub mod search;
pub mod theorem;

pub use error::{GammaError, Result};
pub use group::{FiniteAbelianGroup, GroupElement, InvariantFactors};
pub use ring::GammaRing;
