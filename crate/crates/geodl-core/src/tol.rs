//! Centralized numeric thresholds used across the crate.

/// Orthonormality of stored bases: `BᵀB = I` must hold per entry.
pub const ORTHONORMAL: f64 = 1e-10;

/// A column whose residual after projection falls below this fraction of its
/// original norm carries no new direction.
pub const RANK_REL: f64 = 1e-10;

/// Residual threshold when completing a basis to the full space.
pub const COMPLEMENT_RESIDUAL: f64 = 1e-8;

/// Principal angles with `sin ω` below this cannot support a stable
/// recovery of the complement rotation; those columns are zeroed.
pub const SIGMA_MIN: f64 = 1e-8;

/// Below this angle the closed-form coefficient ratios switch to their
/// Taylor expansions.
pub const SMALL_ANGLE: f64 = 1e-6;

/// Cosines this close to zero leave the rotation pair orientation free; the
/// sign is then fixed from the recovered complement rotation.
pub const GAMMA_DEGENERATE: f64 = 1e-12;

/// Denominator guard for normalized ratios.
pub const EPS_GUARD: f64 = 1e-12;
