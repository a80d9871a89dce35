//! Physical constants (SI).
//!
//! `MU_0` is derived from `EPSILON_0` and `C` so that `EPSILON_0 * MU_0 * C^2 == 1`
//! holds to rounding.

/// Speed of light in vacuum [m/s] (exact).
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity [F/m].
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Vacuum permeability [H/m], `1 / (EPSILON_0 C^2)`.
pub const MU_0: f64 = 1.0 / (EPSILON_0 * C * C);
