use std::sync::Arc;

use num_complex::Complex;

use super::analysis::{spectrum_high_k, Observables};
use super::lattice::{GridSpec, Lattice, ScaledWell};
use super::propagate::{Kernel, HIGH_K_TOLERANCE};
use super::Wavefunction;
use crate::error::{ensure, Error, Result};
use crate::physcore::{ground_state_extent, IonSpecies};
use crate::potential::PotentialSpec;
use crate::scalar::{lit, Real};

/// Ground state of `well` on `lattice`: the analytic Gaussian for a harmonic
/// well, otherwise imaginary-time relaxation on a window around the center.
pub fn make_ground_state<T: Real>(lattice: &Arc<Lattice<T>>, well: &PotentialSpec<T>, species: &IonSpecies<T>) -> Result<Wavefunction<T>> {
    let a0_w = ground_state_extent(species, well.angular_frequency())?;
    lattice.check_margin(well.center, a0_w, "ground state")?;
    if well.is_harmonic() {
        return gaussian(lattice, well, species, Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
    }
    relax(lattice, well, species, a0_w)
}

/// Coherent state |α⟩ of the harmonic reference of `well`:
/// ⟨z⟩ = center + 2a₀ Re α, ⟨p⟩ = (ħ/a₀) Im α.
pub fn make_coherent_state<T: Real>(
    lattice: &Arc<Lattice<T>>,
    well: &PotentialSpec<T>,
    species: &IonSpecies<T>,
    alpha: Complex<T>,
) -> Result<Wavefunction<T>> {
    let a0_w = ground_state_extent(species, well.angular_frequency())?;
    lattice.check_margin(well.center + lit::<T>(2.0) * a0_w * alpha.re, a0_w, "coherent state")?;
    gaussian(lattice, well, species, alpha, Complex::new(T::one(), T::zero()))
}

/// Squeezed vacuum S(r e^{iΦ})|0⟩ of the harmonic reference of `well`; Φ = 0
/// gives position variance a₀²e^{−2r}.
pub fn make_squeezed_state<T: Real>(
    lattice: &Arc<Lattice<T>>,
    well: &PotentialSpec<T>,
    species: &IonSpecies<T>,
    r: T,
    phi: T,
) -> Result<Wavefunction<T>> {
    ensure!(r.is_finite() && phi.is_finite(), Domain, "squeezing parameters must be finite");
    let a0_w = ground_state_extent(species, well.angular_frequency())?;
    lattice.check_margin(well.center, a0_w * r.abs().exp(), "squeezed state")?;
    let (rf, pf) = (r.to_f64_lossy(), phi.to_f64_lossy());
    let e = Complex::from_polar(1.0, pf);
    let ratio = (rf.cosh() + e * rf.sinh()) / (rf.cosh() - e * rf.sinh());
    gaussian(lattice, well, species, Complex::new(T::zero(), T::zero()), Complex::new(lit(ratio.re), lit(ratio.im)))
}

/// ψ ∝ exp(−A(x−x̄)² + ik₀(x−x̄)) with A = shape/(4a₀_w²) in lattice units.
fn gaussian<T: Real>(
    lattice: &Arc<Lattice<T>>,
    well: &PotentialSpec<T>,
    species: &IonSpecies<T>,
    alpha: Complex<T>,
    shape: Complex<T>,
) -> Result<Wavefunction<T>> {
    let a0_ref = lattice.units().length.to_f64_lossy();
    let a0_w = ground_state_extent(species, well.angular_frequency())?.to_f64_lossy();
    let s = a0_ref / a0_w;
    let a = Complex::new(shape.re.to_f64_lossy(), shape.im.to_f64_lossy()) * (s * s / 4.0);
    let xbar = (well.center.to_f64_lossy() + 2.0 * a0_w * alpha.re.to_f64_lossy()) / a0_ref;
    let k0 = alpha.im.to_f64_lossy() * s;
    let amps: Vec<Complex<T>> = lattice
        .x()
        .iter()
        .map(|&x| {
            let u = x - xbar;
            let v = (-a * u * u + Complex::new(0.0, k0 * u)).exp();
            Complex::new(lit(v.re), lit(v.im))
        })
        .collect();
    let psi = Wavefunction::from_amplitudes(lattice.clone(), amps)?;
    check_resolved(&psi)?;
    Ok(psi)
}

fn check_resolved<T: Real>(psi: &Wavefunction<T>) -> Result<()> {
    let f = spectrum_high_k(psi);
    ensure!(f <= HIGH_K_TOLERANCE, Resolution, "state is not resolved by the grid ({f:e} above half Nyquist)");
    Ok(())
}

/// Imaginary-time relaxation on a power-of-two window sharing the lattice's
/// sample positions, embedded into the full grid afterwards.
fn relax<T: Real>(lattice: &Arc<Lattice<T>>, well: &PotentialSpec<T>, species: &IonSpecies<T>, a0_w: T) -> Result<Wavefunction<T>> {
    let n = lattice.len();
    let grid = *lattice.grid();
    let units = *lattice.units();
    let dx = lattice.dx().to_f64_lossy();
    let width = a0_w.to_f64_lossy() / units.length.to_f64_lossy();
    let want = ((24.0 * width / dx).ceil() as usize).next_power_of_two().max(64);
    let (sub, i0) = if want >= n {
        (lattice.clone(), 0usize)
    } else {
        let c = lattice.nearest_index(well.center.to_f64_lossy() / units.length.to_f64_lossy());
        let i0 = (c - want as isize / 2).clamp(0, (n - want) as isize) as usize;
        let z_min = grid.z(i0);
        let g = GridSpec::new(z_min, z_min + grid.dz() * T::count(want), want, grid.dt, grid.steps)?;
        (Lattice::with_units(g, units)?, i0)
    };
    let mut psi = gaussian(&sub, well, species, Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()))?;
    let sw = ScaledWell::new(well, &units);
    let ratio = well.angular_frequency().to_f64_lossy() / units.omega.to_f64_lossy();
    let tol = 1e-12f64.max(10.0 * T::epsilon().to_f64_lossy());
    const CHECK: usize = 10;
    const MAX_STEPS: usize = 400_000;
    for stage in [0.05, 0.01, 0.0025] {
        let mut kern = Kernel::imaginary(sub.clone(), stage / ratio);
        kern.set_well(&sw);
        let mut e_prev = energy(&psi, well);
        let mut converged = false;
        let mut taken = 0;
        while taken < MAX_STEPS {
            for _ in 0..CHECK {
                kern.step(psi.amplitudes_mut(), false);
                let nrm = psi.norm();
                ensure!(nrm.is_finite() && nrm > 0.0, Instability, "imaginary-time relaxation lost the state");
                psi.scale(lit(1.0 / nrm.sqrt()));
            }
            taken += CHECK;
            let e = energy(&psi, well);
            if ((e - e_prev) / e).abs() / (CHECK as f64) < tol {
                converged = true;
                break;
            }
            e_prev = e;
        }
        if !converged {
            return Err(Error::Instability(format!("imaginary-time relaxation did not converge within {MAX_STEPS} steps")));
        }
    }
    let psi = if i0 == 0 && sub.len() == n {
        psi
    } else {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); n];
        amps[i0..i0 + sub.len()].copy_from_slice(psi.amplitudes());
        Wavefunction::from_amplitudes(lattice.clone(), amps)?
    };
    check_resolved(&psi)?;
    Ok(psi)
}

fn energy<T: Real>(psi: &Wavefunction<T>, well: &PotentialSpec<T>) -> f64 {
    Observables::of(psi, Some(well)).energy.unwrap_or(f64::NAN)
}
