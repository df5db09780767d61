//! Exact computation of fixed subgroups of standard-form endomorphisms of
//! `F_g x Z^k` and `pi_1(Sigma_g) x Z^k`, plus the classification of which
//! subgroups arise as `Fix phi` for an automorphism `phi`.
//!
//! The crate is organised bottom-up:
//!
//! - [`words`]: freely reduced words, abelianization, substitution maps
//! - [`intlat`]: exact integer linear algebra (Smith normal form, kernels,
//!   cokernels, integer solvability)
//! - [`stallings`]: folded subgroup graphs of free groups and Schreier coset
//!   graphs over finite abelian quotients
//! - [`surface`]: Dehn's algorithm for the genus-g surface relator
//! - [`classify`]: canonical isomorphism types and the aut-fixed decision
//!   procedures for all six ambient families
//! - [`fatf`]: ambient groups, group elements, standard-form endomorphisms
//! - [`fixpipe`]: the fixed-subgroup pipeline and its brute-force oracle
//! - [`constructions`]: the catalog of explicit endomorphisms with known
//!   fixed subgroups

#![forbid(unsafe_code)]

pub mod classify;
pub mod constructions;
pub mod fatf;
pub mod fixpipe;
pub mod intlat;
pub mod stallings;
pub mod surface;
pub mod words;

pub use num_bigint::BigInt;
