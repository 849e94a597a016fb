//! Error budgets for throw-catch transport: switch-timing tolerance and the
//! residual coherent excitation left by finite switching times.
//!
//! Amplitudes follow α(t) = −√(mω/2ħ) e^{−iωt} ∫ ṡ(t′) e^{iωt′} dt′, evaluated
//! at the end of the catch ramp. Note √(mω/2ħ)·z₀ = z₀/(2a₀), half the
//! amplitude returned by [`coherent_amplitude`](crate::physcore::coherent_amplitude).

use num_complex::Complex;

use crate::error::{ensure, Error, Result};
use crate::numerics::integrate_complex;
use crate::physcore::constants::HBAR;
use crate::physcore::IonSpecies;
use crate::potential::{TransitionShape, TransportProtocol};
use crate::scalar::{lit, Real};

/// Relative tolerance of the general quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Overlap budget for a catch that is late by δt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingBudget<T: Real = f64> {
    pub alpha0: T,
    /// rad/s
    pub omega: T,
    /// s
    pub dt: T,
    pub overlap: T,
    /// False when |ωδt| is not small and the quadratic form is unreliable.
    pub small_angle: bool,
}

impl<T: Real> TimingBudget<T> {
    pub fn new(alpha0: T, omega: T, dt: T) -> Self {
        Self { alpha0, omega, dt, overlap: timing_overlap(alpha0, omega, dt), small_angle: (omega * dt).abs() < lit(0.1) }
    }
}

/// Final coherent amplitude in the catch frame and its ground-state overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualExcitation<T: Real = f64> {
    pub alpha: Complex<T>,
    /// Hold that minimizes |α| for the same ramps, s.
    pub t_min: T,
    /// exp(−|α|²)
    pub overlap: T,
}

impl<T: Real> ResidualExcitation<T> {
    fn new(alpha: Complex<T>, t_min: T) -> Self {
        Self { alpha, t_min, overlap: (-alpha.norm_sqr()).exp() }
    }
}

/// P_O = exp{−(α₀ωδt)²}.
pub fn timing_overlap<T: Real>(alpha0: T, omega: T, dt: T) -> T {
    let x = alpha0 * omega * dt;
    (-x * x).exp()
}

/// δt = √(−ln P_O)/(|α₀|ω), the inverse of [`timing_overlap`].
pub fn timing_tolerance<T: Real>(alpha0: T, omega: T, overlap: T) -> Result<T> {
    ensure!(overlap > T::zero() && overlap < T::one(), Domain, "overlap must lie in (0, 1), got {overlap}");
    ensure!(alpha0 != T::zero() && omega > T::zero(), Domain, "α₀ and ω must be non-zero");
    Ok((-overlap.ln()).sqrt() / (alpha0.abs() * omega))
}

/// √(mω/2ħ), 1/m.
fn inverse_length<T: Real>(species: &IonSpecies<T>, omega: T) -> Result<T> {
    ensure!(omega > T::zero() && omega.is_finite(), Domain, "ω must be positive");
    Ok(lit::<T>((species.mass.to_f64_lossy() * omega.to_f64_lossy() / (2.0 * HBAR)).sqrt()))
}

fn cis<T: Real>(x: T) -> Complex<T> {
    Complex::new(x.cos(), x.sin())
}

/// ∫ ṡ e^{iωt} dt over one ramp starting at `t0` that moves the well by `span`.
fn ramp_integral<T: Real>(shape: &TransitionShape<T>, t0: T, span: T, omega: T) -> Result<Complex<T>> {
    if shape.is_instantaneous() {
        return Ok(cis(omega * t0) * span);
    }
    let knots = shape.knots();
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut bad = false;
    for w in knots.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let q = integrate_complex(
            |u: T| {
                let r = shape.rate(u);
                if !r.is_finite() {
                    bad = true;
                }
                cis(omega * (t0 + u)) * (span * r)
            },
            w[0],
            w[1],
            QUADRATURE_REL_TOL,
            0.0,
        );
        if !q.converged {
            return Err(Error::Instability(format!("ramp quadrature did not converge (error {:e})", q.error)));
        }
        acc = acc + q.value;
    }
    ensure!(!bad, Input, "ramp velocity is not finite");
    Ok(acc)
}

/// α at the end of the catch for an arbitrary protocol, by adaptive quadrature
/// over each ramp (instantaneous switches contribute Δs·e^{iωt}).
pub fn residual_alpha_general<T: Real>(protocol: &TransportProtocol<T>, species: &IonSpecies<T>, omega: T) -> Result<Complex<T>> {
    let k = inverse_length(species, omega)?;
    let (ci, ct, cf) = (protocol.initial_well.center, protocol.transport_well.center, protocol.final_well.center);
    let throw = ramp_integral(&protocol.throw, T::zero(), ct - ci, omega)?;
    let catch = ramp_integral(&protocol.catch, protocol.catch_time, cf - ct, omega)?;
    Ok(-(throw + catch) * cis(-omega * protocol.total_duration()) * k)
}

fn check_ramp<T: Real>(tau: T, name: &str) -> Result<()> {
    ensure!(tau > T::zero() && tau.is_finite(), Domain, "{name} must be positive");
    Ok(())
}

/// Exact f^lin(T) = e^{−iωT}(e^{iωτ} − 1) + (τ/τ′)(e^{iωτ′} − 1).
pub fn f_linear<T: Real>(omega: T, tau: T, tau_p: T, hold: T) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    cis(-omega * hold) * (cis(omega * tau) - one) + (cis(omega * tau_p) - one) * (tau / tau_p)
}

/// Small-ωτ form ωτ[e^{−iωT}(i − ωτ/2) + i − ωτ′/2].
pub fn f_linear_approx<T: Real>(omega: T, tau: T, tau_p: T, hold: T) -> Complex<T> {
    let two: T = lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    (cis(-omega * hold) * (i - omega * tau / two) + i - omega * tau_p / two) * (omega * tau)
}

/// Linear throw of duration τ and catch of duration τ′ starting at T.
pub fn residual_alpha_linear<T: Real>(z0: T, omega: T, tau: T, tau_p: T, hold: T, species: &IonSpecies<T>) -> Result<ResidualExcitation<T>> {
    check_ramp(tau, "τ")?;
    check_ramp(tau_p, "τ′")?;
    let k = inverse_length(species, omega)?;
    let i = Complex::new(T::zero(), T::one());
    let alpha = i * cis(-omega * tau_p) * f_linear(omega, tau, tau_p, hold) * (k / omega * z0 / tau);
    Ok(ResidualExcitation::new(alpha, optimal_hold_linear(omega, tau, tau_p)?))
}

fn antiparallel_hold<T: Real>(omega: T, a: Complex<T>, b: Complex<T>) -> T {
    let period = lit::<T>(2.0) * T::PI() / omega;
    let t = (a.arg() - b.arg() - T::PI()) / omega;
    let r = t % period;
    if r < T::zero() {
        r + period
    } else {
        r
    }
}

/// Hold T in [0, 2π/ω) minimizing |f^lin(T)|.
pub fn optimal_hold_linear<T: Real>(omega: T, tau: T, tau_p: T) -> Result<T> {
    check_ramp(tau, "τ")?;
    check_ramp(tau_p, "τ′")?;
    ensure!(omega > T::zero(), Domain, "ω must be positive");
    let one = Complex::new(T::one(), T::zero());
    Ok(antiparallel_hold(omega, cis(omega * tau) - one, (cis(omega * tau_p) - one) * (tau / tau_p)))
}

/// (1 + e^{iωτ})/(π² − (ωτ)²) for a cosine ramp.
fn cosine_kernel<T: Real>(omega: T, tau: T) -> Result<Complex<T>> {
    let x = omega * tau;
    let d = T::PI() * T::PI() - x * x;
    ensure!(d.abs() > lit::<T>(1e-9) * T::PI() * T::PI(), Singularity, "ωτ = π makes the cosine-ramp denominator vanish");
    Ok((cis(x) + T::one()) / d)
}

/// Small-ωτ form of f^cos.
pub fn f_sinusoidal_approx<T: Real>(omega: T, tau: T, tau_p: T, hold: T) -> Complex<T> {
    let term = |t: T| {
        let x = omega * t;
        Complex::new(lit::<T>(2.0) - x * x / lit(2.0), x) / (T::PI() * T::PI() - x * x)
    };
    term(tau) * cis(-omega * hold) + term(tau_p)
}

/// Cosine throw s = −(z₀/2)(1 + cos(πt/τ)) and mirrored cosine catch.
pub fn residual_alpha_sinusoidal<T: Real>(z0: T, omega: T, tau: T, tau_p: T, hold: T, species: &IonSpecies<T>) -> Result<ResidualExcitation<T>> {
    check_ramp(tau, "τ")?;
    check_ramp(tau_p, "τ′")?;
    let k = inverse_length(species, omega)?;
    let (c, cp) = (cosine_kernel(omega, tau)?, cosine_kernel(omega, tau_p)?);
    let f = c * cis(-omega * hold) + cp;
    let alpha = -cis(-omega * tau_p) * f * (k * z0 * T::PI() * T::PI() / lit(2.0));
    Ok(ResidualExcitation::new(alpha, antiparallel_hold(omega, c, cp)))
}

/// Hold minimizing |α^cos|.
pub fn optimal_hold_sinusoidal<T: Real>(omega: T, tau: T, tau_p: T) -> Result<T> {
    check_ramp(tau, "τ")?;
    check_ramp(tau_p, "τ′")?;
    Ok(antiparallel_hold(omega, cosine_kernel(omega, tau)?, cosine_kernel(omega, tau_p)?))
}
