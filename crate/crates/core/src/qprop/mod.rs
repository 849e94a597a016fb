//! Split-operator propagation of the 1-D Schrödinger equation for a single
//! ion, with state constructors and Fock-basis analysis.
//!
//! Internally the grid uses oscillator units of a reference frequency ω_ref:
//! lengths in a₀ = √(ħ/2mω_ref), times in 1/ω_ref, energies in ħω_ref. In
//! these units H = k² + V(x). Conversions happen only at the API boundary.

mod analysis;
mod io;
mod lattice;
mod propagate;
mod states;

pub use analysis::{fock_overlap, harmonic_reference_fidelity, FidelitySeries, Observables};
pub use io::{read_snapshot, write_snapshot, write_trace_csv, write_wavefunction_csv, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use lattice::{GridSpec, Lattice, OscillatorUnits};
pub use propagate::{propagate, Drive, PropagationResult, TracePoint};
pub use states::{make_coherent_state, make_ground_state, make_squeezed_state};

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{ensure, Result};
use crate::scalar::{lit, Real};

/// Minimum distance between a state's center and the grid edge, in units of
/// its r.m.s. extent.
pub const EDGE_MARGIN_WIDTHS: f64 = 5.0;

/// Accepted drift of Σ|ψ|²Δz from 1 for `f64`; `f32` runs use a
/// precision-scaled bound.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-8;

pub(crate) fn norm_tolerance<T: Real>() -> f64 {
    NORM_DRIFT_TOLERANCE.max(1e3 * T::epsilon().to_f64_lossy())
}

/// A state on a [`Lattice`]. Amplitudes are normalized so that Σ|ψ|²Δx = 1 in
/// lattice units.
#[derive(Debug, Clone)]
pub struct Wavefunction<T: Real = f64> {
    lattice: Arc<Lattice<T>>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> Wavefunction<T> {
    /// Wraps raw amplitudes (lattice units) and normalizes them.
    pub fn from_amplitudes(lattice: Arc<Lattice<T>>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        ensure!(amplitudes.len() == lattice.len(), Input, "amplitude count does not match the grid");
        ensure!(amplitudes.iter().all(|c| c.re.is_finite() && c.im.is_finite()), Input, "non-finite amplitude");
        let mut psi = Self { lattice, amplitudes };
        let n = psi.norm();
        ensure!(n > 0.0, Input, "wavefunction has zero norm");
        psi.scale(lit(1.0 / n.sqrt()));
        Ok(psi)
    }

    pub fn lattice(&self) -> &Arc<Lattice<T>> {
        &self.lattice
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    /// Amplitude in SI normalization (Σ|ψ|²Δz = 1 with Δz in m).
    pub fn amplitude_si(&self, j: usize) -> Complex<T> {
        self.amplitudes[j] / self.lattice.units().length.sqrt()
    }

    /// Σ|ψ|²Δx, accumulated in f64.
    pub fn norm(&self) -> f64 {
        let dx = self.lattice.dx().to_f64_lossy();
        self.amplitudes.iter().map(|c| c.norm_sqr().to_f64_lossy()).sum::<f64>() * dx
    }

    pub(crate) fn scale(&mut self, s: T) {
        for c in &mut self.amplitudes {
            *c = *c * s;
        }
    }

    /// ⟨self|other⟩ (both on the same lattice).
    pub fn inner(&self, other: &Self) -> Result<Complex<f64>> {
        ensure!(Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice.same_geometry(&other.lattice), Input, "states live on different grids");
        let dx = self.lattice.dx().to_f64_lossy();
        let mut acc = Complex::new(0.0, 0.0);
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            let p = a.conj() * b;
            acc += Complex::new(p.re.to_f64_lossy(), p.im.to_f64_lossy());
        }
        Ok(acc * dx)
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Probability within the outer `fraction` of the grid on each side.
    pub fn edge_probability(&self, fraction: f64) -> f64 {
        let n = self.amplitudes.len();
        let w = ((n as f64 * fraction).ceil() as usize).clamp(1, n / 2);
        let dx = self.lattice.dx().to_f64_lossy();
        self.amplitudes[..w].iter().chain(&self.amplitudes[n - w..]).map(|c| c.norm_sqr().to_f64_lossy()).sum::<f64>() * dx
    }
}

#[cfg(test)]
mod tests;
