use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{ensure, Result};
use crate::physcore::constants::HBAR;
use crate::physcore::IonSpecies;
use crate::potential::PotentialSpec;
use crate::scalar::{lit, Real};

/// Spatial grid and nominal time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T: Real = f64> {
    /// m
    pub z_min: T,
    /// m
    pub z_max: T,
    /// Power of two, at least 16.
    pub points: usize,
    /// s
    pub dt: T,
    pub steps: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(z_min: T, z_max: T, points: usize, dt: T, steps: usize) -> Result<Self> {
        ensure!(z_min.is_finite() && z_max.is_finite() && z_max > z_min, Geometry, "grid requires z_max > z_min");
        ensure!(points >= 16 && points.is_power_of_two(), Geometry, "grid points must be a power of two ≥ 16, got {points}");
        ensure!(dt > T::zero() && dt.is_finite(), Input, "time step must be positive");
        Ok(Self { z_min, z_max, points, dt, steps })
    }

    /// Δz = (z_max − z_min)/points, m.
    pub fn dz(&self) -> T {
        (self.z_max - self.z_min) / T::count(self.points)
    }

    /// Position of sample `j`, m.
    pub fn z(&self, j: usize) -> T {
        self.z_min + self.dz() * T::count(j)
    }

    /// Grid with the same extent and `points` samples.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.z_min, self.z_max, points, self.dt, self.steps)
    }
}

/// Oscillator units of a reference frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorUnits<T: Real = f64> {
    /// a₀ = √(ħ/2mω_ref), m.
    pub length: T,
    /// ω_ref, rad/s.
    pub omega: T,
    /// Ion mass, kg.
    pub mass: T,
}

impl<T: Real> OscillatorUnits<T> {
    pub fn new(species: &IonSpecies<T>, omega: T) -> Result<Self> {
        ensure!(omega > T::zero() && omega.is_finite(), Domain, "reference frequency must be positive");
        let a0 = (HBAR / (2.0 * species.mass.to_f64_lossy() * omega.to_f64_lossy())).sqrt();
        Ok(Self { length: lit(a0), omega, mass: species.mass })
    }

    /// ħω_ref in J.
    pub fn energy(&self) -> f64 {
        HBAR * self.omega.to_f64_lossy()
    }

    /// ħ/a₀, momentum unit in kg·m/s.
    pub fn momentum(&self) -> f64 {
        HBAR / self.length.to_f64_lossy()
    }
}

/// Potential in lattice units, evaluated in f64 so that large phases keep
/// full precision whatever the storage type.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledWell {
    ratio_sq: f64,
    center: f64,
    cubic: f64,
    quartic: f64,
}

impl ScaledWell {
    pub(crate) fn new<T: Real>(well: &PotentialSpec<T>, units: &OscillatorUnits<T>) -> Self {
        let a0 = units.length.to_f64_lossy();
        let r = well.angular_frequency().to_f64_lossy() / units.omega.to_f64_lossy();
        Self {
            ratio_sq: r * r,
            center: well.center.to_f64_lossy() / a0,
            cubic: well.cubic.inverse().to_f64_lossy() * a0,
            quartic: well.quartic.signed_inverse_square().to_f64_lossy() * a0 * a0,
        }
    }

    #[inline]
    pub(crate) fn value(&self, x: f64) -> f64 {
        let u = x - self.center;
        0.25 * self.ratio_sq * u * u * (1.0 + self.cubic * u + self.quartic * u * u)
    }
}

/// Discretized grid with wavenumbers and FFT plans, shared between states.
pub struct Lattice<T: Real = f64> {
    grid: GridSpec<T>,
    units: OscillatorUnits<T>,
    x: Vec<f64>,
    k: Vec<f64>,
    dx: T,
    pub(crate) forward: Arc<dyn Fft<T>>,
    pub(crate) inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for Lattice<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice").field("grid", &self.grid).field("units", &self.units).finish_non_exhaustive()
    }
}

impl<T: Real> Lattice<T> {
    pub fn new(grid: GridSpec<T>, species: &IonSpecies<T>, omega_ref: T) -> Result<Arc<Self>> {
        let units = OscillatorUnits::new(species, omega_ref)?;
        Self::with_units(grid, units)
    }

    pub fn with_units(grid: GridSpec<T>, units: OscillatorUnits<T>) -> Result<Arc<Self>> {
        let grid = GridSpec::new(grid.z_min, grid.z_max, grid.points, grid.dt, grid.steps)?;
        let n = grid.points;
        let a0 = units.length.to_f64_lossy();
        let z_min = grid.z_min.to_f64_lossy();
        let dz = (grid.z_max.to_f64_lossy() - z_min) / n as f64;
        let dx = dz / a0;
        let x: Vec<f64> = (0..n).map(|j| (z_min + dz * j as f64) / a0).collect();
        let dk = 2.0 * std::f64::consts::PI / (n as f64 * dx);
        let k: Vec<f64> = (0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Self { grid, units, x, k, dx: lit(dx), forward, inverse }))
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn units(&self) -> &OscillatorUnits<T> {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Δx in lattice units.
    pub fn dx(&self) -> T {
        self.dx
    }

    /// Positions in lattice units.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Wavenumbers in lattice units (FFT order).
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    /// Nyquist wavenumber π/Δx.
    pub fn k_nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dx.to_f64_lossy()
    }

    pub(crate) fn same_geometry(&self, other: &Self) -> bool {
        self.grid == other.grid && self.units == other.units
    }

    /// Index of the grid point nearest to `x` (lattice units).
    pub(crate) fn nearest_index(&self, x: f64) -> isize {
        ((x - self.x[0]) / self.dx.to_f64_lossy()).round() as isize
    }

    /// Checks that a packet centered at `z` with r.m.s. width `width` (both m)
    /// keeps the edge margin.
    pub(crate) fn check_margin(&self, z: T, width: T, what: &str) -> Result<()> {
        let m = width * lit(super::EDGE_MARGIN_WIDTHS);
        ensure!(
            z - m >= self.grid.z_min && z + m <= self.grid.z_max,
            Geometry,
            "{what} at {z} m with width {width} m is within {} widths of the grid edge [{}, {}]",
            super::EDGE_MARGIN_WIDTHS,
            self.grid.z_min,
            self.grid.z_max
        );
        Ok(())
    }
}
