use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::report::{num, Check, Rule, ScenarioOutput, Table};
use super::transport::{auto_grid, run_transport, CatchTiming, TransportSetup};
use crate::error::Result;
use crate::gaussian::{evolve_covariance, run_squeeze_protocol, GaussianState, Mat2, SqueezeProtocol};
use crate::physcore::ground_state_extent;
use crate::potential::PotentialSpec;
use crate::qprop::{fock_overlap, make_coherent_state, propagate, Drive, GridSpec, Lattice};

const F: f64 = 1e6;

fn record(out: &mut ScenarioOutput, name: &str, r: Result<f64>, rule: Rule) {
    out.check(match r {
        Ok(v) => Check::new(name, Some(9), v, rule),
        Err(e) => Check::errored(name, Some(9), rule, &e),
    });
}

pub fn properties(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let start = Instant::now();
    let mut out = ScenarioOutput::default();
    record(&mut out, "norm_change_per_step", norm_per_step(cfg), Rule::AtMost { limit: 1e-10 });
    match energy_and_ehrenfest(cfg) {
        Ok((drift, ehrenfest)) => {
            out.check(Check::new("static_energy_drift_1400_steps", Some(9), drift, Rule::AtMost { limit: 1e-6 }));
            out.check(Check::new("ehrenfest_trajectory_error", Some(9), ehrenfest, Rule::AtMost { limit: 1e-5 }));
        }
        Err(e) => {
            out.check(Check::errored("static_energy_drift_1400_steps", Some(9), Rule::AtMost { limit: 1e-6 }, &e));
            out.check(Check::errored("ehrenfest_trajectory_error", Some(9), Rule::AtMost { limit: 1e-5 }, &e));
        }
    }
    let ratio = dt_halving_ratio(cfg, &mut out);
    record(&mut out, "dt_halving_ratio", ratio, Rule::Band { lo: 3.5, hi: 4.5 });
    record(&mut out, "coherent_poisson_max_diff", poisson_mismatch(cfg), Rule::AtMost { limit: 1e-6 });
    let (det_change, min_det) = covariance_invariants(cfg.seed)?;
    out.check(Check::new("covariance_det_invariance", Some(9), det_change, Rule::AtMost { limit: 1e-12 }));
    out.check(Check::new("heisenberg_min_det", Some(9), min_det, Rule::AtLeast { limit: 0.25 - 1e-12 }));
    out.check(Check::new("property_suite_runtime_s", Some(9), start.elapsed().as_secs_f64(), Rule::AtMost { limit: 30.0 }));
    Ok(out)
}

/// Largest single-step change of the norm for a displaced state in an
/// anharmonic, asymmetric well.
fn norm_per_step(cfg: &ScenarioConfig) -> Result<f64> {
    let omega = 2.0 * PI * F;
    let lat = Lattice::new(GridSpec::new(-0.8e-6, 0.8e-6, 1024, 1e-9, 1)?, &cfg.species, omega)?;
    let w = PotentialSpec::from_lengths(F, 0.3e-6, -1e-6, 0.0)?;
    let mut psi = make_coherent_state(&lat, &w, &cfg.species, Complex::new(2.0, 1.0))?;
    let mut worst = 0.0f64;
    let mut last = psi.norm();
    for _ in 0..200 {
        psi = propagate(&psi, Drive::Static(&w), None)?.final_state;
        let n = psi.norm();
        worst = worst.max((n - last).abs());
        last = n;
    }
    Ok(worst)
}

/// Relative ⟨H⟩ drift over 1400 steps of 360 ps and the largest deviation of
/// ⟨z⟩ from the classical orbit, both for |α| = 10 in a harmonic well.
fn energy_and_ehrenfest(cfg: &ScenarioConfig) -> Result<(f64, f64)> {
    let omega = 2.0 * PI * F;
    let lat = Lattice::new(GridSpec::new(-0.8e-6, 0.8e-6, 2048, 0.36e-9, 1400)?, &cfg.species, omega)?;
    let w = PotentialSpec::harmonic(F, 0.0)?;
    let amp = 20.0 * ground_state_extent(&cfg.species, omega)?;
    let c = make_coherent_state(&lat, &w, &cfg.species, Complex::new(10.0, 0.0))?;
    let r = propagate(&c, Drive::Static(&w), Some(7))?;
    let e0 = r.trace[0].energy;
    let end = r.trace.last().map(|p| p.energy).unwrap_or(f64::NAN);
    let ehrenfest = r.trace.iter().map(|p| (p.mean_position - amp * (omega * p.t).cos()).abs() / amp).fold(0.0, f64::max);
    Ok(((end / e0 - 1.0).abs(), ehrenfest))
}

/// ‖ψ(dt) − ψ(dt/2)‖ / ‖ψ(dt/2) − ψ(dt/4)‖ for a reduced anharmonic transport
/// (z0 = 1 µm, lengths co-scaled from the L4 = −120 µm case).
fn dt_halving_ratio(cfg: &ScenarioConfig, out: &mut ScenarioOutput) -> Result<f64> {
    let factor = 1e-6 / 50e-6;
    let base = TransportSetup {
        species: cfg.species.clone(),
        transport_frequency: F,
        end_frequency: F,
        z0: 50e-6,
        end_l3: 140e-6,
        end_l4: -200e-6,
        transport_l4: -120e-6,
        dt: 0.36e-9,
        catch: CatchTiming::HalfPeriod,
        points: None,
    }
    .scaled(factor);
    let (_, points) = auto_grid(&base)?;
    let t = base.catch_time()?;
    let n0 = (t / base.dt).ceil();
    let runs = [1.0, 2.0, 4.0]
        .iter()
        .map(|m| {
            // nudged so ceil(T/dt) lands exactly on n0·m
            let dt = t / (n0 * m) * (1.0 + 1e-12);
            run_transport(&TransportSetup { dt, points: Some(points), ..base.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let dist = |a: usize, b: usize| -> f64 {
        let (x, y) = (runs[a].final_state.amplitudes(), runs[b].final_state.amplitudes());
        x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt() / x.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt()
    };
    let (d1, d2) = (dist(0, 1), dist(1, 2));
    let mut t = Table::new("dt_halving", &[("steps", "1"), ("p0", "1"), ("p2", "1")]);
    for r in &runs {
        t.push(vec![r.steps.to_string(), num(r.fock[0]), num(r.fock[2])]);
    }
    out.tables.push(t);
    out.info("dt_halving_differences", format!("{} {}", num(d1), num(d2)));
    Ok(d1 / d2)
}

fn poisson_mismatch(cfg: &ScenarioConfig) -> Result<f64> {
    let omega = 2.0 * PI * F;
    let lat = Lattice::new(GridSpec::new(-0.8e-6, 0.8e-6, 2048, 1e-9, 1)?, &cfg.species, omega)?;
    let w = PotentialSpec::harmonic(F, 0.0)?;
    let mut worst = 0.0f64;
    for alpha in [Complex::new(0.5, 0.0), Complex::from_polar(1.5, 0.7), Complex::new(0.0, 3.0), Complex::from_polar(3.0, -2.2)] {
        let psi = make_coherent_state(&lat, &w, &cfg.species, alpha)?;
        let p = fock_overlap(&psi, &w, &cfg.species, 40)?;
        let m = alpha.norm_sqr();
        let mut poisson = (-m).exp();
        for (n, pn) in p.iter().enumerate() {
            if n > 0 {
                poisson *= m / n as f64;
            }
            worst = worst.max((pn - poisson).abs());
        }
    }
    Ok(worst)
}

/// Largest |det σ(t) − det σ(0)| over random symplectic evolutions, and the
/// smallest det σ met along random squeezing sequences.
fn covariance_invariants(seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = 2.0 * PI * F;
    let mut worst = 0.0f64;
    let mut min_det = f64::INFINITY;
    for _ in 0..500 {
        let (a, d, b) = (rng.gen_range(0.6..3.0), rng.gen_range(0.6..3.0), rng.gen_range(-0.3..0.3));
        let s = GaussianState::new([0.0; 2], Mat2::new(a, b, b, d))?;
        let lambda = rng.gen_range(1.0 / 3.0..3.0);
        let t = rng.gen_range(0.0..2e-6);
        let e = evolve_covariance(&s, lambda, omega, t)?;
        worst = worst.max((e.det() - s.det()).abs());
        min_det = min_det.min(e.det());
    }
    for _ in 0..100 {
        let l2: f64 = rng.gen_range(0.1..0.9);
        let cycles = rng.gen_range(1..3);
        let p = SqueezeProtocol::new(omega, l2.sqrt() * omega, cycles)?;
        let start = GaussianState::squeezed_vacuum(rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI));
        let (_, rec) = run_squeeze_protocol(&p, &start)?;
        for c in rec {
            min_det = min_det.min(c.state.det());
        }
    }
    Ok((worst, min_det))
}
