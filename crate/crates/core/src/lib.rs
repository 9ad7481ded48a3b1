//! Numerical irreducible decomposition of affine algebraic varieties.
//!
//! Given a polynomial system `F` in `N` complex variables, the library
//! computes, for each dimension `i`, a witness point set `W_i` on the pure
//! i-dimensional part of `V(F)` and partitions it into irreducible witness
//! sets whose cardinalities are the degrees of the irreducible components.
//! The pipeline runs in three stages: a slack-variable cascade produces
//! witness point supersets, homotopy membership tests remove junk points,
//! and a trace linearity test (with optional monodromy pre-grouping)
//! certifies the final partition.

pub mod budget;
pub mod cascade;
pub mod cli;
pub mod decompose;
pub mod exactalg;
pub mod junkfilter;
pub mod parse;
pub mod polysys;
pub mod report;
pub mod rngutil;
pub mod tracker;
