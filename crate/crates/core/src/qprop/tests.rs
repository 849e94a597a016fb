use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use proptest::prelude::*;

use super::*;
use crate::physcore::constants::HBAR;
use crate::physcore::{ground_state_extent, IonSpecies};
use crate::potential::{PotentialSpec, TransitionShape, TransportProtocol};

const F: f64 = 1e6;

fn ca() -> IonSpecies {
    IonSpecies::calcium40()
}

fn omega() -> f64 {
    2.0 * PI * F
}

fn lattice(half_span: f64, points: usize, dt: f64, steps: usize) -> Arc<Lattice> {
    Lattice::new(GridSpec::new(-half_span, half_span, points, dt, steps).unwrap(), &ca(), omega()).unwrap()
}

fn a0() -> f64 {
    ground_state_extent(&ca(), omega()).unwrap()
}

#[test]
fn harmonic_ground_state_moments() {
    let lat = lattice(0.6e-6, 1024, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.05e-6).unwrap();
    let psi = make_ground_state(&lat, &w, &ca()).unwrap();
    let o = Observables::of(&psi, Some(&w));
    assert!((o.var_position / (a0() * a0()) - 1.0).abs() < 1e-8);
    assert!((o.energy.unwrap() / (0.5 * HBAR * omega()) - 1.0).abs() < 1e-8);
    assert!((o.mean_position - 0.05e-6).abs() < 1e-8 * a0());
    assert!((psi.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn geometry_errors() {
    let lat = lattice(0.2e-6, 256, 1e-9, 10);
    let near_edge = PotentialSpec::harmonic(F, 0.17e-6).unwrap();
    assert!(matches!(make_ground_state(&lat, &near_edge, &ca()), Err(crate::Error::Geometry(_))));
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    assert!(matches!(make_coherent_state(&lat, &w, &ca(), Complex::new(8.0, 0.0)), Err(crate::Error::Geometry(_))));
    assert!(matches!(make_squeezed_state(&lat, &w, &ca(), 1.5, 0.0), Err(crate::Error::Geometry(_))));
    assert!(GridSpec::new(0.0, 1.0, 100, 1.0, 1).is_err());
    assert!(GridSpec::new(0.0, 1.0, 8, 1.0, 1).is_err());
    assert!(GridSpec::new(1.0, 0.0, 64, 1.0, 1).is_err());
}

#[test]
fn coarse_grid_is_rejected() {
    let lat = lattice(0.6e-6, 64, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    assert!(matches!(make_ground_state(&lat, &w, &ca()), Err(crate::Error::Resolution(_))));
}

#[test]
fn coherent_state_conventions() {
    let lat = lattice(0.8e-6, 2048, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let g = make_ground_state(&lat, &w, &ca()).unwrap();
    let c0 = make_coherent_state(&lat, &w, &ca(), Complex::new(0.0, 0.0)).unwrap();
    assert!((g.fidelity(&c0).unwrap() - 1.0).abs() < 1e-14);
    let alpha = Complex::new(2.5, -1.5);
    let c = make_coherent_state(&lat, &w, &ca(), alpha).unwrap();
    let o = Observables::of(&c, None);
    assert!((o.mean_position - 2.0 * a0() * 2.5).abs() < 1e-9 * a0());
    assert!((o.mean_momentum - HBAR / a0() * -1.5).abs() < 1e-9 * HBAR / a0());
    assert!((o.var_position / (a0() * a0()) - 1.0).abs() < 1e-8);
}

#[test]
fn coherent_state_returns_after_one_period() {
    let steps = 2000;
    let lat = lattice(0.8e-6, 1024, 2.0 * PI / omega() / steps as f64, steps);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let c = make_coherent_state(&lat, &w, &ca(), Complex::new(3.0, 1.0)).unwrap();
    let r = propagate(&c, Drive::Static(&w), None).unwrap();
    assert!((r.final_state.fidelity(&c).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn squeezed_state_conventions() {
    let lat = lattice(0.8e-6, 2048, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let g = make_ground_state(&lat, &w, &ca()).unwrap();
    let s0 = make_squeezed_state(&lat, &w, &ca(), 0.0, 0.7).unwrap();
    assert!((g.fidelity(&s0).unwrap() - 1.0).abs() < 1e-14);
    let r = 0.8;
    let s = make_squeezed_state(&lat, &w, &ca(), r, 0.0).unwrap();
    let o = Observables::of(&s, None);
    assert!((o.var_position / (a0() * a0()) - (-2.0 * r).exp()).abs() < 1e-8);
    assert!((o.var_position * o.var_momentum / (HBAR * HBAR / 4.0) - 1.0).abs() < 1e-8);
    // Φ = π squeezes momentum
    let sp = make_squeezed_state(&lat, &w, &ca(), r, PI).unwrap();
    let op = Observables::of(&sp, None);
    assert!((op.var_position / (a0() * a0()) - (2.0 * r).exp()).abs() < 1e-8);
}

#[test]
fn fock_overlaps() {
    let lat = lattice(0.8e-6, 2048, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let g = make_ground_state(&lat, &w, &ca()).unwrap();
    let p = fock_overlap(&g, &w, &ca(), 1).unwrap();
    assert!((p[0] - 1.0).abs() < 1e-8 && p[1] < 1e-8);
    for alpha in [Complex::new(0.3, 0.0), Complex::new(1.0, 1.0), Complex::new(-2.0, 0.5), Complex::new(0.0, 3.0)] {
        let c = make_coherent_state(&lat, &w, &ca(), alpha).unwrap();
        let p = fock_overlap(&c, &w, &ca(), 25).unwrap();
        let m: f64 = alpha.norm_sqr();
        let mut poisson = (-m).exp();
        for (n, pn) in p.iter().enumerate() {
            if n > 0 {
                poisson *= m / n as f64;
            }
            assert!((pn - poisson).abs() < 1e-6, "α = {alpha}, n = {n}: {pn} vs {poisson}");
        }
    }
    let s = make_squeezed_state(&lat, &w, &ca(), 0.6, 0.3).unwrap();
    let p = fock_overlap(&s, &w, &ca(), 9).unwrap();
    for n in (1..10).step_by(2) {
        assert!(p[n] < 1e-10);
    }
    // closed form for squeezed vacuum: P(0) = 1/cosh r
    assert!((p[0] - 1.0 / 0.6f64.cosh()).abs() < 1e-8);
}

#[test]
fn fock_resolution_error() {
    let lat = lattice(0.6e-6, 256, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let g = make_ground_state(&lat, &w, &ca()).unwrap();
    assert!(matches!(fock_overlap(&g, &w, &ca(), 400), Err(crate::Error::Resolution(_))));
}

#[test]
fn static_ground_state_is_stationary() {
    let steps = 1400;
    let lat = lattice(0.6e-6, 1024, 0.36e-9, steps);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let g = make_ground_state(&lat, &w, &ca()).unwrap();
    let r = propagate(&g, Drive::Static(&w), Some(100)).unwrap();
    let first = r.trace[0];
    for p in &r.trace {
        // the Strang map's stationary Gaussian differs from the continuum one by O((ω dt)²)
        let breathing = (omega() * 0.36e-9).powi(2) / 4.0;
        assert!((p.var_position / first.var_position - 1.0).abs() < breathing);
        assert!((p.var_momentum / first.var_momentum - 1.0).abs() < breathing);
        assert!((p.energy / first.energy - 1.0).abs() < 1e-8);
        assert!(p.mean_position.abs() < 1e-8 * a0());
    }
    assert!(r.norm_drift < 1e-10);
    assert_eq!(r.steps_taken, steps);
}

#[test]
fn norm_is_conserved_per_step() {
    let lat = lattice(0.8e-6, 1024, 1e-9, 1);
    let w = PotentialSpec::from_lengths(F, 0.3e-6, -1e-6, 0.0).unwrap();
    let mut psi = make_coherent_state(&lat, &w, &ca(), Complex::new(2.0, 1.0)).unwrap();
    for _ in 0..200 {
        psi = propagate(&psi, Drive::Static(&w), None).unwrap().final_state;
        assert!((psi.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn harmonic_throw_catch_returns_to_ground_state() {
    let z0 = 0.5e-6;
    let t = PI / omega();
    let steps = 1400;
    let lat = lattice(1.0e-6, 4096, t / steps as f64, steps);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let p = TransportProtocol::symmetric(w, w, z0, TransitionShape::Instantaneous, t, TransitionShape::Instantaneous).unwrap();
    let g = make_ground_state(&lat, &p.initial_well, &ca()).unwrap();
    let r = propagate(&g, Drive::Transport(&p), None).unwrap();
    let target = make_ground_state(&lat, &p.final_well, &ca()).unwrap();
    assert!(r.final_state.fidelity(&target).unwrap() > 1.0 - 1e-6);
    assert!(r.norm_drift < 1e-10);
}

#[test]
fn ehrenfest_and_energy_in_harmonic_well() {
    let dt = 0.36e-9;
    let steps = 1400;
    let lat = lattice(0.8e-6, 2048, dt, steps);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let amp = 20.0 * a0();
    let c = make_coherent_state(&lat, &w, &ca(), Complex::new(10.0, 0.0)).unwrap();
    let r = propagate(&c, Drive::Static(&w), Some(7)).unwrap();
    let e0 = r.trace[0].energy;
    for p in &r.trace {
        let classical = amp * (omega() * p.t).cos();
        assert!((p.mean_position - classical).abs() < 1e-5 * amp, "t = {}", p.t);
        // bounded splitting oscillation of ⟨H⟩ from the leapfrog invariant
        assert!((p.energy / e0 - 1.0).abs() < (omega() * dt).powi(2) / 4.0);
    }
    let end = r.trace.last().unwrap().energy;
    assert!((end / e0 - 1.0).abs() < 1e-6);
}

#[test]
fn parity_is_preserved_in_even_well() {
    let lat = lattice(0.8e-6, 1024, 2e-9, 500);
    let w = PotentialSpec::from_lengths(F, f64::INFINITY, -0.6e-6, 0.0).unwrap();
    let s = make_squeezed_state(&lat, &w, &ca(), 0.7, 0.0).unwrap();
    let r = propagate(&s, Drive::Static(&w), Some(50)).unwrap();
    for p in &r.trace {
        assert!(p.mean_position.abs() < 1e-10 * a0());
    }
}

#[test]
fn grid_doubling_leaves_observables_unchanged() {
    let run = |points: usize| {
        let lat = lattice(0.8e-6, points, 1e-9, 300);
        let w = PotentialSpec::from_lengths(F, 0.4e-6, -0.8e-6, 0.0).unwrap();
        let c = make_coherent_state(&lat, &w, &ca(), Complex::new(3.0, 0.0)).unwrap();
        let r = propagate(&c, Drive::Static(&w), Some(300)).unwrap();
        *r.trace.last().unwrap()
    };
    let (a, b) = (run(1024), run(2048));
    assert!((a.mean_position - b.mean_position).abs() < 1e-6 * a0());
    assert!((a.var_position / b.var_position - 1.0).abs() < 1e-6);
    assert!((a.energy / b.energy - 1.0).abs() < 1e-6);
}

fn dense_ground_energy(lat: &Lattice, well: &PotentialSpec) -> f64 {
    let n = lat.len();
    let x = lat.x();
    let k = lat.k();
    let a0_ref = lat.units().length;
    let r = well.angular_frequency() / lat.units().omega;
    let c = well.center / a0_ref;
    let c4 = well.quartic.signed_inverse_square() * a0_ref * a0_ref;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let t: f64 = k.iter().map(|&kk| kk * kk * (kk * (x[j] - x[l])).cos()).sum::<f64>() / n as f64;
            h[(j, l)] = t;
        }
        let u = x[j] - c;
        h[(j, j)] += 0.25 * r * r * u * u * (1.0 + c4 * u * u);
    }
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn relaxed_ground_state_matches_dense_diagonalization() {
    let lat = lattice(0.3e-6, 256, 1e-9, 10);
    let harm = PotentialSpec::harmonic(F, 0.0).unwrap();
    let e_unit = HBAR * omega();
    let e_h = dense_ground_energy(&lat, &harm);
    for l4 in [0.25e-6, -1e-6] {
        let w = PotentialSpec::from_lengths(F, f64::INFINITY, l4, 0.0).unwrap();
        let psi = make_ground_state(&lat, &w, &ca()).unwrap();
        let e = Observables::of(&psi, Some(&w)).energy.unwrap() / e_unit;
        let e_dense = dense_ground_energy(&lat, &w);
        assert!(((e - 0.5) - (e_dense - e_h)).abs() < 1e-8, "L4 = {l4}: {} vs {}", e - 0.5, e_dense - e_h);
        assert!(e >= e_dense - 1e-12);
    }
}

#[test]
fn softened_quartic_ground_energy_below_harmonic() {
    let lat = lattice(0.6e-6, 1024, 1e-9, 10);
    let w = PotentialSpec::from_lengths(F, f64::INFINITY, -120e-6, 0.0).unwrap();
    let psi = make_ground_state(&lat, &w, &ca()).unwrap();
    let e = Observables::of(&psi, Some(&w)).energy.unwrap() / (HBAR * omega());
    // first-order shift −⟨x⁴⟩/(4L²) = −3/(4L²) with L = |L4|/a₀
    let l = 120e-6 / a0();
    let shift = -3.0 / (4.0 * l * l);
    assert!(e < 0.5);
    assert!(((e - 0.5) / shift - 1.0).abs() < 0.05, "{} vs {shift}", e - 0.5);
}

#[test]
fn identical_wells_give_unit_fidelity() {
    let lat = lattice(0.6e-6, 512, 2e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let s = make_squeezed_state(&lat, &w, &ca(), 0.5, 0.0).unwrap();
    let f = harmonic_reference_fidelity(&s, &w, &w, 2e-6, 50, 0.5, false).unwrap();
    assert!(f.fidelity.iter().all(|p| (p - 1.0).abs() < 1e-8));
    assert!(f.lifetime.is_none());
}

#[test]
fn fidelity_detects_anharmonic_dephasing() {
    let lat = lattice(0.8e-6, 1024, 2e-9, 10);
    let h = PotentialSpec::harmonic(F, 0.0).unwrap();
    let a = PotentialSpec::from_lengths(F, f64::INFINITY, -0.5e-6, 0.0).unwrap();
    let s = make_squeezed_state(&lat, &h, &ca(), 1.0, 0.0).unwrap();
    let f = harmonic_reference_fidelity(&s, &h, &a, 20e-6, 10, 0.9, true).unwrap();
    let t = f.lifetime.expect("fidelity should drop");
    assert!(t > 0.0 && t < 20e-6);
    assert!(*f.fidelity.last().unwrap() < 0.9);
}

#[test]
fn snapshot_and_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lat = lattice(0.5e-6, 256, 1e-9, 10);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let c = make_coherent_state(&lat, &w, &ca(), Complex::new(1.0, -0.5)).unwrap();
    let p = dir.path().join("psi.bin");
    write_snapshot(&c, &p).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    assert_eq!(&bytes[..4], SNAPSHOT_MAGIC);
    assert_eq!(bytes.len(), 4 + 4 + 8 + 24 + 8 + 16 + 16 * 256);
    let back: Wavefunction = read_snapshot(&p).unwrap();
    assert!((back.fidelity(&c).unwrap() - 1.0).abs() < 1e-14);
    let csvp = dir.path().join("psi.csv");
    write_wavefunction_csv(&c, &csvp).unwrap();
    let text = std::fs::read_to_string(&csvp).unwrap();
    assert!(text.starts_with("# points: 256"));
    assert_eq!(text.lines().count(), 3 + 2 + 256);
}

#[test]
fn single_precision_propagation_agrees() {
    let species32: IonSpecies<f32> = IonSpecies::calcium40();
    let steps = 200;
    let g32 = GridSpec::new(-0.6e-6f32, 0.6e-6, 512, 1e-9, steps).unwrap();
    let lat32 = Lattice::new(g32, &species32, (2.0 * PI * F) as f32).unwrap();
    let w32 = PotentialSpec::<f32>::harmonic(1e6, 0.0).unwrap();
    let c32 = make_coherent_state(&lat32, &w32, &species32, Complex::new(2.0f32, 0.0)).unwrap();
    let r32 = propagate(&c32, Drive::Static(&w32), Some(steps)).unwrap();
    let lat = lattice(0.6e-6, 512, 1e-9, steps);
    let w = PotentialSpec::harmonic(F, 0.0).unwrap();
    let c = make_coherent_state(&lat, &w, &ca(), Complex::new(2.0, 0.0)).unwrap();
    let r = propagate(&c, Drive::Static(&w), Some(steps)).unwrap();
    let (a, b) = (r32.trace.last().unwrap(), r.trace.last().unwrap());
    assert!((a.mean_position - b.mean_position).abs() < 1e-3 * 4.0 * a0());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn coherent_fock_distribution_is_poisson(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re * re + im * im <= 9.0);
        let lat = lattice(0.8e-6, 2048, 1e-9, 10);
        let w = PotentialSpec::harmonic(F, 0.0).unwrap();
        let c = make_coherent_state(&lat, &w, &ca(), Complex::new(re, im)).unwrap();
        let p = fock_overlap(&c, &w, &ca(), 30).unwrap();
        let m = re * re + im * im;
        let mut poisson = (-m).exp();
        for (n, pn) in p.iter().enumerate() {
            if n > 0 { poisson *= m / n as f64; }
            prop_assert!((pn - poisson).abs() < 1e-6);
        }
    }
}

#[test]
fn ground_state_outlives_squeezed_state_in_anharmonic_well() {
    let lat = lattice(0.8e-6, 1024, 2e-9, 10);
    let h = PotentialSpec::harmonic(F, 0.0).unwrap();
    let a = PotentialSpec::from_lengths(F, f64::INFINITY, -0.5e-6, 0.0).unwrap();
    let run = |r: f64, t_max: f64| {
        let s = make_squeezed_state(&lat, &h, &ca(), r, 0.0).unwrap();
        harmonic_reference_fidelity(&s, &h, &a, t_max, 10, 0.9, true).unwrap()
    };
    // frozen from a first run: 3.2625e-6 s for r = 1; the ground state keeps
    // P_O > 0.99999 for more than 100 squeezed lifetimes
    let squeezed = run(1.0, 20e-6).lifetime.unwrap();
    assert!((squeezed / 3.2625e-6 - 1.0).abs() < 1e-3, "{squeezed}");
    let ground = run(0.0, 100.0 * squeezed);
    assert!(ground.lifetime.is_none());
    assert!(ground.fidelity.iter().all(|p| *p > 0.99999));
}
