//! Computational engine and verification harness for a finitely
//! L-presented group: the subgroup of automorphisms of a free group
//! acting trivially on its abelianization.
//!
//! The crate provides:
//!
//! * exact free-group words and endomorphisms ([`words`], [`endo`]);
//! * the two-sorted generator alphabet and its evaluation ([`alphabet`]);
//! * the defining relation families and an instance enumerator
//!   ([`relations`]);
//! * the substitution endomorphisms that carry relations to relations
//!   under conjugation by ambient automorphisms ([`theta`]);
//! * certificate-checked rewriting of words to the identity ([`rewrite`]);
//! * the degree-2 Magnus expansion and the induced abelianized Johnson
//!   homomorphism ([`johnson`]);
//! * exact integer matrices, Hermite normal form, and kernel lattices
//!   ([`matrix`]);
//! * homology-linearization bookkeeping: exponent vectors, the
//!   relator-exponent kernel computation, and the coinvariant elimination
//!   replay ([`homlin`]);
//! * the verification suites behind the command-line interface
//!   ([`harness`]).

pub mod alphabet;
pub mod certs;
pub mod coinv;
pub mod endo;
pub mod harness;
pub mod homlin;
pub mod johnson;
pub mod matrix;
pub mod relations;
pub mod rewrite;
pub mod theta;
pub mod words;
