//! Physical constants (CODATA 2018 exact / recommended values, SI units).
//!
//! Every module takes its constants from here.

/// Reduced Planck constant ħ (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Elementary charge e (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Vacuum permittivity ε₀ (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Atomic mass constant u (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Electron mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Electron volt (J), exact.
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

/// Atomic mass of neutral ⁴⁰Ca in u (AME2020, 39.962 590 85 u).
pub const CA40_ATOMIC_MASS_U: f64 = 39.962_590_85;

/// ⁴⁰Ca⁺ ion mass: neutral atomic mass minus one electron (binding energy neglected).
pub const CA40_ION_MASS: f64 = CA40_ATOMIC_MASS_U * ATOMIC_MASS_UNIT - ELECTRON_MASS;
