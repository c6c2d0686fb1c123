//! Isogeny classes of principally polarized abelian surfaces with real
//! multiplication, modelled exactly on rank-4 lattices.
//!
//! A surface is a lattice in F^2 (F a real quadratic field or Q x Q)
//! carrying a unimodular alternating polarization form; isogenies are
//! lattice inclusions; Galois rationality is simulated by a matrix group
//! acting on the ambient plane. On top of this model the crate provides
//! the kernel type theory for such isogenies (cyclic, torsion and inert
//! types, with the factorization procedures that separate them) and an
//! enumeration driver that walks an entire isogeny class within explicit
//! guard bounds, validated against a brute-force search.
//!
//! See the `book/` directory for a guided tour; the `rmisog` binary
//! exposes the same functionality on the command line.

pub mod enumerate;
pub mod galois;
pub mod kernels;
pub mod lattice;
pub mod matz;
pub mod symplectic;
pub mod num_util;
pub mod rqfield;

pub use num_util::{Int, Rat};
pub use rqfield::{FieldContext, FieldElement, FieldError, FieldKind, Ideal, PrimeSplitting};
