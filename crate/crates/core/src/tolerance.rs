//! Numerical thresholds used across the crate.
//!
//! Every threshold is relative to the natural length scale `L` of its input
//! (the largest mutual distance) raised to the degree of the quantity being
//! tested, so that all predicates are scale invariant.

/// Relative floor below which a Heron or Bretschneider radicand is treated
/// as rounding noise and clamped to zero (multiplies `L^4`).
pub const RADICAND_EPS: f64 = 1e-12;

/// Areas below `DEGENERATE_AREA * L^2` flag a degenerate triangle or quadrilateral.
pub const DEGENERATE_AREA: f64 = 1e-10;

/// Distances below `COINCIDENT * L` flag coincident bodies.
pub const COINCIDENT: f64 = 1e-10;

/// Area identities (Conditions 3 and 4) hold when they agree within `AREA_IDENTITY * L^2`.
pub const AREA_IDENTITY: f64 = 1e-9;

/// Cayley–Menger determinant below `CAYLEY_MENGER * L^6` counts as coplanar.
pub const CAYLEY_MENGER: f64 = 1e-8;

/// Singular values below `SVD_RANK * sigma_max` are treated as zero.
pub const SVD_RANK: f64 = 1e-10;

/// The angle-form planarity residual vanishes when below `CONDITION5 * L^4`.
pub const CONDITION5: f64 = 1e-9;

/// Shape classification: distances are equal when within `SHAPE_REL * L`.
pub const SHAPE_REL: f64 = 1e-7;

/// Ptolemy-defect bound used as a precondition of the gradient-equality check (times `L^2`).
pub const PTOLEMY_ZERO: f64 = 1e-8;
