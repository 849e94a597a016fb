//! Physical constants, ion species, and closed-form trap quantities.

pub mod constants;
mod coulomb;
mod micromotion;

pub use coulomb::{coulomb_coupling_coefficient, ion_separation};
pub use micromotion::{micromotion_coefficients, MicromotionCoefficients, TrapContext};

use crate::error::{ensure, Result};
use crate::scalar::{lit, Real};
use constants::{CA40_ION_MASS, ELEMENTARY_CHARGE, HBAR};

/// A trapped ion species.
#[derive(Debug, Clone, PartialEq)]
pub struct IonSpecies<T: Real = f64> {
    /// Mass in kg.
    pub mass: T,
    /// Charge in C.
    pub charge: T,
    pub label: String,
}

impl<T: Real> IonSpecies<T> {
    pub fn new(mass: T, charge: T, label: impl Into<String>) -> Result<Self> {
        ensure!(mass > T::zero() && mass.is_finite(), Domain, "ion mass must be positive, got {mass}");
        ensure!(charge != T::zero() && charge.is_finite(), Domain, "ion charge must be non-zero");
        Ok(Self { mass, charge, label: label.into() })
    }

    /// Singly charged ⁴⁰Ca⁺.
    pub fn calcium40() -> Self {
        Self { mass: lit(CA40_ION_MASS), charge: lit(ELEMENTARY_CHARGE), label: "40Ca+".into() }
    }

    /// Looks up a built-in preset by name (`ca40`, `40Ca+`).
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ca40" | "40ca+" | "ca40+" | "40ca" => Some(Self::calcium40()),
            _ => None,
        }
    }
}

/// Electric-field noise seen by the ion, either as a spectral density or
/// directly as a ground-state heating rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel<T: Real = f64> {
    /// S_E(ω) in (V/m)²/Hz, evaluated at the secular frequency.
    FieldSpectralDensity(T),
    /// Γ₀→₁ in quanta/s.
    HeatingRate(T),
}

impl<T: Real> NoiseModel<T> {
    /// Heating rate Γ₀→₁ implied by this noise model.
    pub fn heating_rate(&self, species: &IonSpecies<T>, omega: T) -> Result<T> {
        match *self {
            NoiseModel::FieldSpectralDensity(s) => heating_rate(species, omega, s),
            NoiseModel::HeatingRate(g) => {
                ensure!(g >= T::zero(), Domain, "heating rate must be non-negative");
                Ok(g)
            }
        }
    }

    /// Field spectral density implied by this noise model.
    pub fn spectral_density(&self, species: &IonSpecies<T>, omega: T) -> Result<T> {
        match *self {
            NoiseModel::FieldSpectralDensity(s) => {
                ensure!(s >= T::zero(), Domain, "spectral density must be non-negative");
                Ok(s)
            }
            NoiseModel::HeatingRate(g) => spectral_density_for_heating_rate(species, omega, g),
        }
    }
}

fn check_omega<T: Real>(omega: T) -> Result<()> {
    ensure!(omega > T::zero() && omega.is_finite(), Domain, "angular frequency must be positive, got {omega}");
    Ok(())
}

/// r.m.s. extent of the harmonic ground state, a₀ = √(ħ / 2mω).
pub fn ground_state_extent<T: Real>(species: &IonSpecies<T>, omega: T) -> Result<T> {
    check_omega(omega)?;
    Ok((lit::<T>(HBAR) / species.mass / (lit::<T>(2.0) * omega)).sqrt())
}

/// Coherent-state parameter of a well displaced by `z0`, α₀ = −z₀/a₀.
///
/// This is the bare `z0 / a0` ratio. A displacement `z0` of a coherent state
/// corresponds to a displacement-operator amplitude `z0 / (2 a0)`, so α₀ here
/// is twice the physical amplitude; α₀ = 4450 for 50 µm at 1 MHz while the
/// energy ħω|α|² of the displaced packet implies |α| ≈ 2230.
pub fn coherent_amplitude<T: Real>(z0: T, species: &IonSpecies<T>, omega: T) -> Result<T> {
    let a0 = ground_state_extent(species, omega)?;
    Ok(-z0 / a0)
}

/// Ground-to-first-excited heating rate Γ = q² S_E / (4 m ω ħ), in quanta/s.
pub fn heating_rate<T: Real>(species: &IonSpecies<T>, omega: T, spectral_density: T) -> Result<T> {
    check_omega(omega)?;
    ensure!(spectral_density >= T::zero(), Domain, "spectral density must be non-negative");
    // ordered to stay inside f32 range
    let q_over_hbar = species.charge / lit(HBAR);
    let q_over_m = species.charge / species.mass;
    Ok(q_over_hbar * q_over_m * spectral_density / (lit::<T>(4.0) * omega))
}

/// Field spectral density that produces heating rate `rate` (inverse of [`heating_rate`]).
pub fn spectral_density_for_heating_rate<T: Real>(species: &IonSpecies<T>, omega: T, rate: T) -> Result<T> {
    check_omega(omega)?;
    ensure!(rate >= T::zero(), Domain, "heating rate must be non-negative");
    let q_over_hbar = species.charge / lit(HBAR);
    let q_over_m = species.charge / species.mass;
    Ok(rate * lit::<T>(4.0) * omega / (q_over_hbar * q_over_m))
}
