//! Planarity conditions for four points and the angle-coordinate equations
//! for planar central configurations of the Newtonian four-body problem.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: distances, edge vectors, areas and angles;
//! - [`planarity`]: five independent planarity certificates and the Ptolemy defect;
//! - [`cc`]: potential, moment of inertia and the central configuration equations
//!   in position space, in angle form, and in co-circular form;
//! - [`solver`]: damped Newton solvers in position and distance space;
//! - [`classify`]: shape classification and the symmetric-mass propositions;
//! - [`suites`]: seeded randomized property suites.

pub mod cc;
pub mod classify;
mod error;
pub mod geometry;
pub mod newton;
pub mod planarity;
pub mod sampling;
pub mod solver;
pub mod suites;
pub mod tolerance;

pub use error::{Error, Result};
pub use geometry::{
    AngleSet, AreaSet, Configuration, DistanceSextuple, EdgeVectors, Masses, Pair, Vec3,
};
