//! Proof kernel and bounded backward proof search for a first-order
//! indistinguishability logic with IND-CCA2 axioms.

pub mod cca;
pub mod fixtures;
pub mod format;
pub mod gen;
pub mod length;
pub mod proof;
pub mod rewrite;
pub mod search;
pub mod sequent;
pub mod term;
