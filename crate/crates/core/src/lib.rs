//! Hurwitz trees for order-p automorphisms of p-adic formal disks and annuli.
//!
//! The crate is split into:
//! * [`valued_field`]: exact arithmetic in `Q(ζ_p)(π)`, `π^N = ζ - 1`, truncated boundary series
//!   and the boundary normal forms of order-p automorphisms.
//! * [`char_p_diff`]: rational functions and differential forms on the projective line over `F_{p^n}`.
//! * [`hurwitz_tree`]: the decorated tree, its axioms and the différente law.
//! * [`realizability`]: residue vectors, adapted partitions, point search and vertex certificates.
//! * [`theorems`]: disk and annulus condition checkers and the small-conductor classifier.
//! * [`document`]: the JSON tree file format.

pub mod arith;
pub mod char_p_diff;
pub mod document;
pub mod hurwitz_tree;
pub mod realizability;
pub mod theorems;
pub mod valued_field;
