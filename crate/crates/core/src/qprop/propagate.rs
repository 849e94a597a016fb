use std::sync::Arc;

use num_complex::Complex;

use super::analysis::Observables;
use super::lattice::{Lattice, ScaledWell};
use super::{norm_tolerance, Wavefunction};
use crate::error::{ensure, Error, Result};
use crate::potential::{PotentialSpec, TransportProtocol};
use crate::scalar::{lit, Real};

/// Probability allowed above half the Nyquist wavenumber before the grid is
/// declared under-resolved.
pub const HIGH_K_TOLERANCE: f64 = 1e-8;
/// Probability allowed in the outer 1/32 of the grid on each side.
pub const EDGE_LEAK_TOLERANCE: f64 = 1e-8;
const MONITOR_EVERY: usize = 16;

/// What drives the evolution.
#[derive(Debug, Clone, Copy)]
pub enum Drive<'a, T: Real = f64> {
    /// Fixed well for `grid.steps` steps of `grid.dt`.
    Static(&'a PotentialSpec<T>),
    /// Throw-catch protocol over its full duration, steps of at most `grid.dt`.
    Transport(&'a TransportProtocol<T>),
}

/// Observables sampled during a run (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub mean_position: f64,
    pub mean_momentum: f64,
    pub var_position: f64,
    pub var_momentum: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct PropagationResult<T: Real = f64> {
    pub final_state: Wavefunction<T>,
    pub trace: Vec<TracePoint>,
    /// Largest |Σ|ψ|²Δz − 1| seen at segment ends.
    pub norm_drift: f64,
    /// Largest probability seen above half the Nyquist wavenumber.
    pub high_k_fraction: f64,
    /// Largest probability seen in the edge zones.
    pub edge_probability: f64,
    pub steps_taken: usize,
}

/// One Strang step: half potential kick, exact kinetic phase in Fourier space,
/// half potential kick.
pub(crate) struct Kernel<T: Real> {
    lattice: Arc<Lattice<T>>,
    kinetic: Vec<Complex<T>>,
    half_v: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
    dt: f64,
    imaginary: bool,
}

impl<T: Real> Kernel<T> {
    /// Real-time kernel for a step `dt` in lattice units.
    pub(crate) fn new(lattice: Arc<Lattice<T>>, dt: f64) -> Self {
        Self::build(lattice, dt, false)
    }

    /// Imaginary-time kernel (t → −iτ) for a step `dtau` in lattice units.
    pub(crate) fn imaginary(lattice: Arc<Lattice<T>>, dtau: f64) -> Self {
        Self::build(lattice, dtau, true)
    }

    fn build(lattice: Arc<Lattice<T>>, dt: f64, imaginary: bool) -> Self {
        let n = lattice.len();
        let inv_n = 1.0 / n as f64;
        let kinetic = lattice.k().iter().map(|&k| phase(k * k * dt, imaginary) * lit::<T>(inv_n)).collect();
        let scratch_len = lattice.forward.get_inplace_scratch_len().max(lattice.inverse.get_inplace_scratch_len());
        Self {
            half_v: vec![Complex::new(T::one(), T::zero()); n],
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
            kinetic,
            lattice,
            dt,
            imaginary,
        }
    }

    pub(crate) fn set_well(&mut self, well: &ScaledWell) {
        let h = 0.5 * self.dt;
        for (p, &x) in self.half_v.iter_mut().zip(self.lattice.x()) {
            *p = phase(well.value(x) * h, self.imaginary);
        }
    }

    /// Advances `psi` by one step. Returns the probability above k_nyq/2 when
    /// `monitor` is set.
    pub(crate) fn step(&mut self, psi: &mut [Complex<T>], monitor: bool) -> Option<f64> {
        for (a, p) in psi.iter_mut().zip(&self.half_v) {
            *a = *a * p;
        }
        self.lattice.forward.process_with_scratch(psi, &mut self.scratch);
        let high = monitor.then(|| high_k_fraction(psi, self.lattice.k(), self.lattice.k_nyquist()));
        for (a, p) in psi.iter_mut().zip(&self.kinetic) {
            *a = *a * p;
        }
        self.lattice.inverse.process_with_scratch(psi, &mut self.scratch);
        for (a, p) in psi.iter_mut().zip(&self.half_v) {
            *a = *a * p;
        }
        high
    }
}

#[inline]
fn phase<T: Real>(angle: f64, imaginary: bool) -> Complex<T> {
    if imaginary {
        Complex::new(lit((-angle).exp()), T::zero())
    } else {
        let (s, c) = angle.sin_cos();
        Complex::new(lit(c), lit(-s))
    }
}

pub(crate) fn high_k_fraction<T: Real>(spectrum: &[Complex<T>], k: &[f64], k_nyq: f64) -> f64 {
    let (mut hi, mut all) = (0.0, 0.0);
    for (c, &kk) in spectrum.iter().zip(k) {
        let p = c.norm_sqr().to_f64_lossy();
        all += p;
        if kk.abs() > 0.5 * k_nyq {
            hi += p;
        }
    }
    if all > 0.0 {
        hi / all
    } else {
        0.0
    }
}

struct Segment<T: Real> {
    start: T,
    end: T,
    fixed: Option<PotentialSpec<T>>,
}

fn segments<T: Real>(drive: &Drive<'_, T>, dt: T, steps: usize) -> Result<Vec<Segment<T>>> {
    match drive {
        Drive::Static(well) => Ok(vec![Segment { start: T::zero(), end: dt * T::count(steps), fixed: Some(**well) }]),
        Drive::Transport(p) => {
            let total = p.total_duration();
            ensure!(
                dt * T::count(steps) >= total * (T::one() - lit(1e-9)),
                Input,
                "{steps} steps of {dt} s do not cover the protocol duration {total} s"
            );
            let bps = p.breakpoints();
            let mut out = Vec::new();
            for w in bps.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let probe = |f: f64| p.well_at(a + (b - a) * lit(f));
                let (w1, w2, w3) = (probe(0.25)?, probe(0.5)?, probe(0.75)?);
                let fixed = (w1 == w2 && w2 == w3).then_some(w2);
                out.push(Segment { start: a, end: b, fixed });
            }
            Ok(out)
        }
    }
}

fn well_at<T: Real>(drive: &Drive<'_, T>, t: T) -> Result<PotentialSpec<T>> {
    match drive {
        Drive::Static(w) => Ok(**w),
        Drive::Transport(p) => p.well_at(t.min(p.total_duration())),
    }
}

/// Propagates `psi` under `drive` with second-order Strang splitting. Moving
/// wells are evaluated at the midpoint time of each step, and the protocol is
/// cut into segments at every switching time.
///
/// `trace_every` samples observables every that many steps (and at the end).
pub fn propagate<T: Real>(psi: &Wavefunction<T>, drive: Drive<'_, T>, trace_every: Option<usize>) -> Result<PropagationResult<T>> {
    let lattice = psi.lattice().clone();
    let grid = *lattice.grid();
    let omega = lattice.units().omega.to_f64_lossy();
    let units = *lattice.units();
    let segs = segments(&drive, grid.dt, grid.steps)?;
    let tol = norm_tolerance::<T>();

    let mut state = psi.clone();
    let mut trace = Vec::new();
    let mut norm_drift: f64 = (state.norm() - 1.0).abs();
    let mut high_k: f64 = 0.0;
    let mut edge: f64 = state.edge_probability(1.0 / 32.0);
    let mut steps_taken = 0usize;
    let mut kernel: Option<Kernel<T>> = None;

    if let Some(every) = trace_every {
        ensure!(every > 0, Input, "trace interval must be positive");
        trace.push(sample(&state, &well_at(&drive, T::zero())?, 0.0)?);
    }

    for seg in &segs {
        let span = (seg.end - seg.start).to_f64_lossy();
        let n = ((span / grid.dt.to_f64_lossy()) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let needs_new = kernel.as_ref().map_or(true, |k| (k.dt - h * omega).abs() > 1e-14 * k.dt);
        if needs_new {
            kernel = Some(Kernel::new(lattice.clone(), h * omega));
        }
        let kern = kernel.as_mut().expect("kernel");
        if let Some(w) = &seg.fixed {
            kern.set_well(&ScaledWell::new(w, &units));
        }
        for j in 0..n {
            if seg.fixed.is_none() {
                let tm = seg.start.to_f64_lossy() + (j as f64 + 0.5) * h;
                let w = well_at(&drive, lit(tm))?;
                kern.set_well(&ScaledWell::new(&w, &units));
            }
            steps_taken += 1;
            let monitor = steps_taken % MONITOR_EVERY == 0 || j + 1 == n;
            if let Some(f) = kern.step(state.amplitudes_mut(), monitor) {
                high_k = high_k.max(f);
                ensure!(
                    f <= HIGH_K_TOLERANCE,
                    Resolution,
                    "grid under-resolves momentum: probability {f:e} above half the Nyquist wavenumber (dz = {} m)",
                    grid.dz()
                );
                let e = state.edge_probability(1.0 / 32.0);
                edge = edge.max(e);
                ensure!(e <= EDGE_LEAK_TOLERANCE, Geometry, "wavepacket reached the grid edge (edge probability {e:e})");
            }
            if let Some(every) = trace_every {
                if steps_taken % every == 0 || j + 1 == n {
                    let t = seg.start.to_f64_lossy() + (j as f64 + 1.0) * h;
                    trace.push(sample(&state, &well_at(&drive, lit(t))?, t)?);
                }
            }
        }
        let drift = (state.norm() - 1.0).abs();
        norm_drift = norm_drift.max(drift);
        if drift > tol {
            return Err(Error::Instability(format!("norm drifted by {drift:e} (limit {tol:e})")));
        }
    }
    if trace_every.is_some() {
        trace.dedup_by(|a, b| (a.t - b.t).abs() <= 1e-15 * a.t.abs().max(1e-300));
    }
    Ok(PropagationResult { final_state: state, trace, norm_drift, high_k_fraction: high_k, edge_probability: edge, steps_taken })
}

fn sample<T: Real>(psi: &Wavefunction<T>, well: &PotentialSpec<T>, t: f64) -> Result<TracePoint> {
    let o = Observables::of(psi, Some(well));
    Ok(TracePoint {
        t,
        mean_position: o.mean_position,
        mean_momentum: o.mean_momentum,
        var_position: o.var_position,
        var_momentum: o.var_momentum,
        energy: o.energy.unwrap_or(f64::NAN),
    })
}
