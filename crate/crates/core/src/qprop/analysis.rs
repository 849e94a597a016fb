use std::sync::Arc;

use num_complex::Complex;

use super::lattice::ScaledWell;
use super::propagate::{high_k_fraction, Kernel, HIGH_K_TOLERANCE};
use super::{norm_tolerance, Wavefunction};
use crate::error::{ensure, Error, Result};
use crate::physcore::{ground_state_extent, IonSpecies};
use crate::potential::PotentialSpec;
use crate::scalar::Real;

/// Expectation values in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// m
    pub mean_position: f64,
    /// kg·m/s
    pub mean_momentum: f64,
    /// m²
    pub var_position: f64,
    /// (kg·m/s)²
    pub var_momentum: f64,
    /// J, when a well is supplied.
    pub energy: Option<f64>,
}

impl Observables {
    pub fn of<T: Real>(psi: &Wavefunction<T>, well: Option<&PotentialSpec<T>>) -> Self {
        let lat = psi.lattice();
        let units = *lat.units();
        let a0 = units.length.to_f64_lossy();
        let (mut n, mut sx, mut sxx) = (0.0, 0.0, 0.0);
        for (c, &x) in psi.amplitudes().iter().zip(lat.x()) {
            let p = c.norm_sqr().to_f64_lossy();
            n += p;
            sx += p * x;
            sxx += p * x * x;
        }
        let mx = sx / n;
        let vx = (sxx / n - mx * mx).max(0.0);
        let mut spec = psi.amplitudes().to_vec();
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); lat.forward.get_inplace_scratch_len()];
        lat.forward.process_with_scratch(&mut spec, &mut scratch);
        let (mut m, mut sk, mut skk) = (0.0, 0.0, 0.0);
        for (c, &k) in spec.iter().zip(lat.k()) {
            let p = c.norm_sqr().to_f64_lossy();
            m += p;
            sk += p * k;
            skk += p * k * k;
        }
        let mk = sk / m;
        let vk = (skk / m - mk * mk).max(0.0);
        let energy = well.map(|w| {
            let sw = ScaledWell::new(w, &units);
            let pot: f64 = psi.amplitudes().iter().zip(lat.x()).map(|(c, &x)| c.norm_sqr().to_f64_lossy() * sw.value(x)).sum::<f64>() / n;
            (skk / m + pot) * units.energy()
        });
        let pu = units.momentum();
        Self {
            mean_position: mx * a0,
            mean_momentum: mk * pu,
            var_position: vx * a0 * a0,
            var_momentum: vk * pu * pu,
            energy,
        }
    }
}

/// Normalized Hermite functions φ_n(ξ) for n = 0..=n_max at one ξ, by the
/// three-term recurrence.
fn hermite_functions(xi: f64, n_max: usize, out: &mut Vec<f64>) {
    out.clear();
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(p0);
    if n_max == 0 {
        return;
    }
    out.push(std::f64::consts::SQRT_2 * xi * p0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
}

/// |⟨n|ψ⟩|² for the eigenstates of the harmonic reference well (its f_z and
/// center; L3 and L4 are ignored), for n = 0..=n_max.
pub fn fock_overlap<T: Real>(psi: &Wavefunction<T>, well: &PotentialSpec<T>, species: &IonSpecies<T>, n_max: usize) -> Result<Vec<f64>> {
    let lat = psi.lattice();
    let a0_ref = lat.units().length.to_f64_lossy();
    let a0_w = ground_state_extent(species, well.angular_frequency())?.to_f64_lossy();
    let dx = lat.dx().to_f64_lossy();
    // ξ = u/(√2 a₀_w); lattice x is in a₀_ref
    let dxi_dx = a0_ref / (std::f64::consts::SQRT_2 * a0_w);
    let turning = (2.0 * n_max as f64 + 1.0).sqrt();
    ensure!(
        turning * dxi_dx * dx <= std::f64::consts::FRAC_PI_4,
        Resolution,
        "Fock state n = {n_max} is not resolved by the grid spacing"
    );
    let center = well.center.to_f64_lossy() / a0_ref;
    let xs = lat.x();
    let reach = (turning + 8.0) / dxi_dx;
    ensure!(
        center - reach >= xs[0] && center + reach <= xs[xs.len() - 1],
        Resolution,
        "Fock state n = {n_max} extends beyond the grid"
    );
    let mut acc = vec![Complex::new(0.0, 0.0); n_max + 1];
    let mut phi = Vec::with_capacity(n_max + 1);
    let lo = lat.nearest_index(center - reach).max(0) as usize;
    let hi = (lat.nearest_index(center + reach).max(0) as usize).min(xs.len() - 1);
    for j in lo..=hi {
        let xi = (xs[j] - center) * dxi_dx;
        hermite_functions(xi, n_max, &mut phi);
        let c = psi.amplitudes()[j];
        let c = Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy());
        for (a, &f) in acc.iter_mut().zip(&phi) {
            *a += c * f;
        }
    }
    let scale = dx * dxi_dx.sqrt();
    Ok(acc.iter().map(|a| (a * scale).norm_sqr()).collect())
}

/// P_O(t) = |⟨Ψ_anharm(t)|Ψ_harm(t)⟩|² sampled along two lockstep propagations.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    /// s
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// First sampled time with P_O below the threshold, linearly interpolated.
    pub lifetime: Option<f64>,
    pub threshold: f64,
}

/// Evolves `psi0` in both wells with the grid's time step up to `t_max`,
/// sampling every `sample_every` steps. Stops early once the threshold is
/// crossed if `stop_at_threshold` is set.
#[allow(clippy::too_many_arguments)]
pub fn harmonic_reference_fidelity<T: Real>(
    psi0: &Wavefunction<T>,
    well_harm: &PotentialSpec<T>,
    well_anharm: &PotentialSpec<T>,
    t_max: T,
    sample_every: usize,
    threshold: f64,
    stop_at_threshold: bool,
) -> Result<FidelitySeries> {
    ensure!(sample_every > 0, Input, "sample interval must be positive");
    ensure!(t_max > T::zero(), Input, "t_max must be positive");
    ensure!(threshold > 0.0 && threshold < 1.0, Input, "threshold must lie in (0, 1)");
    let lat: Arc<_> = psi0.lattice().clone();
    let units = *lat.units();
    let dt = lat.grid().dt.to_f64_lossy();
    let steps = (t_max.to_f64_lossy() / dt).ceil() as usize;
    let mut kh = Kernel::new(lat.clone(), dt * units.omega.to_f64_lossy());
    let mut ka = Kernel::new(lat.clone(), dt * units.omega.to_f64_lossy());
    kh.set_well(&ScaledWell::new(well_harm, &units));
    ka.set_well(&ScaledWell::new(well_anharm, &units));
    let mut h = psi0.clone();
    let mut a = psi0.clone();
    let mut times = vec![0.0];
    let mut fid = vec![h.fidelity(&a)?];
    let mut lifetime = None;
    let tol = norm_tolerance::<T>();
    for s in 1..=steps {
        let mon = s % 64 == 0;
        let fh = kh.step(h.amplitudes_mut(), mon);
        let fa = ka.step(a.amplitudes_mut(), mon);
        for f in [fh, fa].into_iter().flatten() {
            ensure!(f <= HIGH_K_TOLERANCE, Resolution, "grid under-resolves momentum during fidelity run ({f:e})");
        }
        if s % sample_every == 0 || s == steps {
            for st in [&h, &a] {
                let d = (st.norm() - 1.0).abs();
                if d > tol {
                    return Err(Error::Instability(format!("norm drifted by {d:e}")));
                }
            }
            let t = s as f64 * dt;
            let p = h.fidelity(&a)?;
            if lifetime.is_none() && p < threshold {
                let (t0, p0) = (*times.last().expect("non-empty"), *fid.last().expect("non-empty"));
                lifetime = Some(t0 + (t - t0) * (p0 - threshold) / (p0 - p));
            }
            times.push(t);
            fid.push(p);
            if stop_at_threshold && lifetime.is_some() {
                break;
            }
        }
    }
    Ok(FidelitySeries { times, fidelity: fid, lifetime, threshold })
}

pub(crate) fn spectrum_high_k<T: Real>(psi: &Wavefunction<T>) -> f64 {
    let lat = psi.lattice();
    let mut spec = psi.amplitudes().to_vec();
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); lat.forward.get_inplace_scratch_len()];
    lat.forward.process_with_scratch(&mut spec, &mut scratch);
    high_k_fraction(&spec, lat.k(), lat.k_nyquist())
}
