use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::physcore::constants::HBAR;
use crate::physcore::{ground_state_extent, IonSpecies};
use crate::scalar::{lit, Real};

/// τ = 2/(Γ cosh 2r).
pub fn squeezed_lifetime<T: Real>(heating_rate: T, r: T) -> Result<T> {
    ensure!(heating_rate > T::zero() && heating_rate.is_finite(), Domain, "heating rate must be positive");
    Ok(lit::<T>(2.0) / (heating_rate * (r + r).cosh()))
}

/// τ for a state squeezed by λ² in variance, e^{2r} = 1/λ².
pub fn squeezed_lifetime_from_lambda<T: Real>(heating_rate: T, lambda: T) -> Result<T> {
    ensure!(lambda > T::zero(), Domain, "λ must be positive");
    squeezed_lifetime(heating_rate, -lambda.ln())
}

/// P_O(t) = exp(−t/τ) with τ from [`squeezed_lifetime`]; the oscillating α²
/// terms are dropped as averaging to zero.
pub fn displacement_noise_overlap<T: Real>(heating_rate: T, r: T, t: T) -> Result<T> {
    ensure!(t >= T::zero(), Domain, "time must be non-negative");
    Ok((-t / squeezed_lifetime(heating_rate, r)?).exp())
}

/// |⟨ξ|D(α)|ξ⟩|² for ξ = r e^{iΦ} (Φ = 0 squeezes position):
/// exp(−|α|² cosh 2r − Re(α² e^{−iΦ}) sinh 2r).
pub fn squeezed_displacement_overlap(alpha: Complex<f64>, r: f64, phi: f64) -> f64 {
    let cross = (alpha * alpha * Complex::from_polar(1.0, -phi)).re;
    (-(alpha.norm_sqr() * (2.0 * r).cosh() + cross * (2.0 * r).sinh())).exp()
}

/// The overlap exponent as printed alongside the lifetime formula:
/// exp{−|α|² cosh(2r)/2 − (α²e^{iΦ} + c.c.) sinh(2r)/2}. It exceeds 1 for
/// some α when r > 0 and is kept only for comparison.
pub fn printed_displacement_overlap(alpha: Complex<f64>, r: f64, phi: f64) -> f64 {
    let cross = (alpha * alpha * Complex::from_polar(1.0, phi)).re;
    (-(alpha.norm_sqr() * (2.0 * r).cosh() / 2.0 + cross * (2.0 * r).sinh())).exp()
}

/// Ensemble average of [`squeezed_displacement_overlap`] for a circular
/// complex Gaussian α with ⟨|α|²⟩ = Γt: 1/√((1 + e^{2r}Γt)(1 + e^{−2r}Γt)).
pub fn ensemble_average_overlap(heating_rate: f64, r: f64, t: f64) -> f64 {
    let s = heating_rate * t;
    1.0 / ((1.0 + (2.0 * r).exp() * s) * (1.0 + (-2.0 * r).exp() * s)).sqrt()
}

/// Stochastic-field Monte-Carlo parameters.
#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub realizations: usize,
    /// Field samples per secular period (piecewise-constant field).
    pub steps_per_period: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self { realizations: 10_000, steps_per_period: 4, seed: 0x10_71DE }
    }
}

/// Ensemble statistics at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloPoint {
    /// s
    pub t: f64,
    pub mean_overlap: f64,
    pub std_error: f64,
    /// ⟨|α_E|²⟩
    pub mean_abs_alpha_sq: f64,
    /// ⟨α_E²⟩
    pub mean_alpha_sq: Complex<f64>,
}

/// Simulates a stationary white field E(t), piecewise constant over steps of
/// Δt, with one-sided spectral density S_E. Each realization accumulates
/// α_E = −(i q a₀/ħ)∫E e^{iωt}dt with exact per-step integrals and evaluates
/// the exact squeezed-state overlap at the requested times.
///
/// Realization `i` draws from ChaCha stream `i` of `config.seed`, so results
/// do not depend on the thread count.
pub fn monte_carlo_overlap(
    species: &IonSpecies<f64>,
    omega: f64,
    spectral_density: f64,
    r: f64,
    phi: f64,
    times: &[f64],
    config: &MonteCarloConfig,
) -> Result<Vec<MonteCarloPoint>> {
    ensure!(config.realizations >= 2, Input, "need at least two realizations");
    ensure!(config.steps_per_period >= 3, Input, "need at least three field samples per period");
    ensure!(spectral_density >= 0.0, Domain, "spectral density must be non-negative");
    ensure!(times.iter().all(|t| *t >= 0.0 && t.is_finite()), Domain, "times must be non-negative");
    let a0 = ground_state_extent(species, omega)?;
    let kappa = species.charge * a0 / HBAR;
    let dt = 2.0 * std::f64::consts::PI / omega / config.steps_per_period as f64;
    // exact ∫ e^{iωt} over one step has modulus 2 sin(ωΔt/2)/ω
    let step_mod = 2.0 * (omega * dt / 2.0).sin() / omega;
    let sigma = (spectral_density * dt / (2.0 * step_mod * step_mod)).sqrt();
    let step_integral = |j: usize| {
        let t0 = j as f64 * dt;
        let e0 = Complex::from_polar(1.0, omega * t0);
        let e1 = Complex::from_polar(1.0, omega * (t0 + dt));
        (e1 - e0) / Complex::new(0.0, omega)
    };
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let checkpoints: Vec<usize> = order.iter().map(|&i| (times[i] / dt).round() as usize).collect();
    let total = checkpoints.last().copied().unwrap_or(0);
    let per_period: Vec<Complex<f64>> = (0..config.steps_per_period).map(step_integral).collect();
    let pref = Complex::new(0.0, -kappa * sigma);

    let samples: Vec<Vec<Complex<f64>>> = (0..config.realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let mut alpha = Complex::new(0.0, 0.0);
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next = 0;
            for j in 0..=total {
                while next < checkpoints.len() && checkpoints[next] == j {
                    out.push(alpha);
                    next += 1;
                }
                if j == total {
                    break;
                }
                let xi: f64 = StandardNormal.sample(&mut rng);
                alpha += pref * per_period[j % config.steps_per_period] * xi;
            }
            out
        })
        .collect();

    let n = config.realizations as f64;
    let mut result = vec![
        MonteCarloPoint { t: 0.0, mean_overlap: 0.0, std_error: 0.0, mean_abs_alpha_sq: 0.0, mean_alpha_sq: Complex::new(0.0, 0.0) };
        times.len()
    ];
    for (slot, &orig) in order.iter().enumerate() {
        let (mut s, mut s2, mut a2, mut aa) = (0.0, 0.0, 0.0, Complex::new(0.0, 0.0));
        for row in &samples {
            let al = row[slot];
            let p = squeezed_displacement_overlap(al, r, phi);
            s += p;
            s2 += p * p;
            a2 += al.norm_sqr();
            aa += al * al;
        }
        let mean = s / n;
        let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
        result[orig] = MonteCarloPoint {
            t: checkpoints[slot] as f64 * dt,
            mean_overlap: mean,
            std_error: (var / n).sqrt(),
            mean_abs_alpha_sq: a2 / n,
            mean_alpha_sq: aa / n,
        };
    }
    Ok(result)
}
