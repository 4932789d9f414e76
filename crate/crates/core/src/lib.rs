//! Inhomogeneous lattice walks: models whose step set switches with a
//! residue class of the current position and time. The crate covers model
//! definition and canonicalization, series counting, the half-space
//! functional-equation system, finite-field equation guessing, the model
//! dimension invariant, orbit-sum checks, and a classification pipeline.

pub mod enumerate;
pub mod funceq;
pub mod guess;
pub mod linalg;
pub mod model;
pub mod dimension;
pub mod orbit;
pub mod pipeline;
pub mod ring;
