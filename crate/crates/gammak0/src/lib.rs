//! Exact computation of K0 for graph algebras, and a construction turning a
//! finite abelian group into a graph whose algebra has that K0 — with every
//! group automorphism lifting to a graph automorphism that induces it back.
//!
//! Modules:
//!
//! * [`intlin`] — dense arbitrary-precision integer matrices, Smith normal
//!   form, cokernels, kernels, and integral solving.
//! * [`abelian`] — finitely generated abelian groups in invariant-factor
//!   form, elements, homomorphisms, automorphism enumeration, and the
//!   group-spec parser.
//! * [`graph`] — tagged row-finite directed graphs with loop counts and
//!   declared tail gadgets; validation, JSON, and DOT export.
//! * [`ktheory`] — the boundary map, K0 as its cokernel, truncation, and
//!   automorphisms induced on K0.
//! * [`gamma`] — the group-to-graph construction, functoriality, lifting,
//!   and verification reports.

pub mod abelian;
pub mod gamma;
pub mod graph;
pub mod intlin;
pub mod ktheory;
