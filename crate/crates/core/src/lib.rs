//! Discretization kernel for single-phase Darcy flow in a fractured porous
//! medium where fractures are planar interfaces carrying their own flow and
//! pressure may jump across them.
//!
//! Three schemes are provided: VAG with conforming (FE) or lumped (CV)
//! matrix-fracture coupling, and HFV. All of them are written in finite
//! volume form, cell unknowns are eliminated without fill-in, and the reduced
//! system is solved by ILUT-preconditioned GMRes.

#![allow(clippy::needless_range_loop)]
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod hfv;
pub mod mesh;
pub mod model;
pub mod norms;
pub mod quadrature;
pub mod scheme;
pub mod solver;
pub mod study;
pub mod vag;

pub use error::{Error, Result};
