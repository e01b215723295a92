//! Exact computer algebra for restricted Lie-Rinehart algebras over prime fields.
//!
//! Everything is structure-constant based and exact over GF(p):
//!
//! - [`gfp`] — prime field scalars, dense matrices, row reduction, canonical
//!   subspaces (the solver substrate).
//! - [`algebra`] — presentations of commutative algebras, restricted Lie
//!   algebras, module actions and anchors, with exhaustive axiom checkers,
//!   the `s_i` expansion and unique p-map extension from basis data.
//! - [`cochain`] — restricted cochains `(phi, omega)` in characteristic 2,
//!   the morphism complex, the Lie-Rinehart sub-complex and all differentials.
//! - [`cohomology`] — coordinate charts, constraint systems, `Z^2`/`B^2`/`H^2`
//!   in characteristic 2 and the pointwise 2-cocycle verifier for p >= 3.
//! - [`deformation`] — truncated formal power series, deformation-equation
//!   checking in both characteristics, obstruction cochains, the order-(n+1)
//!   extension solver, equivalence transport and triviality tests.
//! - [`registry`] — the built-in catalogue of small algebras used as fixtures.

pub mod algebra;
pub mod cochain;
pub mod cohomology;
pub mod deformation;
pub mod gfp;
pub mod registry;
pub mod report;

pub use gfp::{Fp, GfpError, MatGfp, Prime, Subspace};
pub use report::{CheckReport, Verdict};
