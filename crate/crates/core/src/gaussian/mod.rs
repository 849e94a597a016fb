//! Single-mode Gaussian states: squeezing by sudden frequency switches and
//! heating-induced loss of overlap.
//!
//! Quadratures are normalized to the ω₁ well with ħ = 1, so the vacuum
//! covariance is diag(1/2, 1/2).

mod heating;
mod matrix;

pub use heating::{
    displacement_noise_overlap, ensemble_average_overlap, monte_carlo_overlap, printed_displacement_overlap, squeezed_displacement_overlap,
    squeezed_lifetime, squeezed_lifetime_from_lambda, MonteCarloConfig, MonteCarloPoint,
};
pub use matrix::Mat2;

use crate::error::{ensure, Error, Result};
use crate::scalar::{lit, Real};

/// Mean and covariance of the normalized quadratures (x, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState<T: Real = f64> {
    pub mean: [T; 2],
    pub cov: Mat2<T>,
}

impl<T: Real> GaussianState<T> {
    pub fn vacuum() -> Self {
        let h = lit::<T>(0.5);
        Self { mean: [T::zero(); 2], cov: Mat2::new(h, T::zero(), T::zero(), h) }
    }

    /// Squeezed vacuum with variances e^{∓2r}/2 along axes rotated by Φ/2;
    /// Φ = 0 squeezes x.
    pub fn squeezed_vacuum(r: T, phi: T) -> Self {
        let h = lit::<T>(0.5);
        let d = Mat2::new(h * (-(r + r)).exp(), T::zero(), T::zero(), h * (r + r).exp());
        let rot = Mat2::rotation(phi / lit(2.0));
        Self { mean: [T::zero(); 2], cov: rot.mul(&d).mul(&rot.transpose()) }
    }

    pub fn new(mean: [T; 2], cov: Mat2<T>) -> Result<Self> {
        let s = Self { mean, cov };
        s.validate()?;
        Ok(s)
    }

    pub fn det(&self) -> T {
        self.cov.det()
    }

    /// Symmetric, positive definite and obeying det σ ≥ 1/4 up to roundoff.
    pub fn validate(&self) -> Result<()> {
        let c = &self.cov;
        let scale = c.a.abs().max(c.d.abs()).max(T::one());
        let tol = lit::<T>(1e3) * T::epsilon() * scale * scale;
        ensure!((c.b - c.c).abs() <= tol, Input, "covariance is not symmetric");
        ensure!(c.a > T::zero() && self.det() > T::zero(), Instability, "covariance lost positive definiteness");
        if self.det() < lit::<T>(0.25) - tol {
            return Err(Error::Instability(format!("uncertainty bound violated: det σ = {}", self.det())));
        }
        Ok(())
    }
}

/// S(t) = [[cos(λωt), λ sin(λωt)], [−sin(λωt)/λ, cos(λωt)]]: free evolution in
/// a well of frequency λω in quadratures normalized to ω.
pub fn symplectic_rotation<T: Real>(lambda: T, omega: T, t: T) -> Result<Mat2<T>> {
    ensure!(lambda > T::zero() && lambda.is_finite(), Domain, "λ must be positive");
    let th = lambda * omega * t;
    let (s, c) = th.sin_cos();
    Ok(Mat2::new(c, lambda * s, -s / lambda, c))
}

/// σ ← SσSᵀ and mean ← S·mean.
pub fn evolve_covariance<T: Real>(state: &GaussianState<T>, lambda: T, omega: T, t: T) -> Result<GaussianState<T>> {
    let s = symplectic_rotation(lambda, omega, t)?;
    let out = GaussianState { mean: s.apply(state.mean), cov: s.mul(&state.cov).mul(&s.transpose()).symmetrized() };
    out.validate()?;
    Ok(out)
}

/// Repeated ω₁ → ω₂ → ω₁ switching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeProtocol<T: Real = f64> {
    /// rad/s
    pub omega1: T,
    /// rad/s
    pub omega2: T,
    pub cycles: usize,
}

impl<T: Real> SqueezeProtocol<T> {
    pub fn new(omega1: T, omega2: T, cycles: usize) -> Result<Self> {
        ensure!(omega1 > T::zero() && omega2 > T::zero(), Domain, "frequencies must be positive");
        ensure!(cycles >= 1, Domain, "at least one cycle is required");
        Ok(Self { omega1, omega2, cycles })
    }

    /// λ = ω₂/ω₁.
    pub fn lambda(&self) -> T {
        self.omega2 / self.omega1
    }

    /// Quarter period of the ω₂ well, π/(2λω₁).
    pub fn hold(&self) -> T {
        T::PI() / (lit::<T>(2.0) * self.omega2)
    }

    /// Hold plus the π/(2ω₁) free interval: (1 + 1/λ)π/(2ω₁).
    pub fn cycle_period(&self) -> T {
        (T::one() + T::one() / self.lambda()) * T::PI() / (lit::<T>(2.0) * self.omega1)
    }
}

/// State after each cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord<T: Real = f64> {
    pub cycle: usize,
    pub state: GaussianState<T>,
    pub metric: SqueezingMetric<T>,
}

/// Runs the protocol: hold at ω₂, switch back, and a free π/(2ω₁) interval
/// between consecutive cycles (not after the last).
pub fn run_squeeze_protocol<T: Real>(protocol: &SqueezeProtocol<T>, initial: &GaussianState<T>) -> Result<(GaussianState<T>, Vec<CycleRecord<T>>)> {
    initial.validate()?;
    let lambda = protocol.lambda();
    let mut state = *initial;
    let mut records = Vec::with_capacity(protocol.cycles);
    for cycle in 1..=protocol.cycles {
        if cycle > 1 {
            state = evolve_covariance(&state, T::one(), protocol.omega1, T::PI() / (lit::<T>(2.0) * protocol.omega1))?;
        }
        state = evolve_covariance(&state, lambda, protocol.omega1, protocol.hold())?;
        records.push(CycleRecord { cycle, state, metric: squeezing_metric(&state) });
    }
    Ok((state, records))
}

/// Smallest-eigenvalue squeezing measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingMetric<T: Real = f64> {
    /// Smallest eigenvalue ν of σ.
    pub smallest_eigenvalue: T,
    pub largest_eigenvalue: T,
    /// r = −½ ln(2ν)
    pub r: T,
    /// 10 log₁₀(2ν); negative when squeezed.
    pub db: T,
    /// Anti-squeezed variance in vacuum units, 2·(largest eigenvalue).
    pub enhancement: T,
}

pub fn squeezing_metric<T: Real>(state: &GaussianState<T>) -> SqueezingMetric<T> {
    let (lo, hi) = state.cov.symmetric_eigenvalues();
    let two = lit::<T>(2.0);
    SqueezingMetric {
        smallest_eigenvalue: lo,
        largest_eigenvalue: hi,
        r: -(two * lo).ln() / two,
        db: lit::<T>(10.0) * (two * lo).log10(),
        enhancement: two * hi,
    }
}

/// r from a dB value (inverse of [`SqueezingMetric::db`]).
pub fn r_from_db<T: Real>(db: T) -> T {
    -(db / lit(10.0) * lit::<T>(10.0).ln()) / lit(2.0)
}

/// Maximum r.m.s. extent a₀·√(2·largest eigenvalue).
pub fn max_extent<T: Real>(state: &GaussianState<T>, a0: T) -> T {
    a0 * (lit::<T>(2.0) * squeezing_metric(state).largest_eigenvalue).sqrt()
}

#[cfg(test)]
mod tests;
