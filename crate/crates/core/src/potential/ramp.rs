use std::path::Path;

use crate::error::{ensure, Error, Result};
use crate::scalar::{lit, Real};

/// Time profile of a well displacement. The normalized progress g runs from 0
/// at the start of the ramp to 1 at its end.
#[derive(Debug, Clone, PartialEq)]
pub enum TransitionShape<T: Real = f64> {
    /// Step at the start of the ramp.
    Instantaneous,
    /// g = t/τ.
    Linear { duration: T },
    /// g = (1 − cos(π t/τ))/2.
    Sinusoidal { duration: T },
    /// Measured waveform, interpolated with a monotone cubic.
    Sampled(SampledRamp<T>),
}

impl<T: Real> TransitionShape<T> {
    pub fn linear(duration: T) -> Result<Self> {
        ensure!(duration > T::zero() && duration.is_finite(), Domain, "ramp duration must be positive");
        Ok(Self::Linear { duration })
    }

    pub fn sinusoidal(duration: T) -> Result<Self> {
        ensure!(duration > T::zero() && duration.is_finite(), Domain, "ramp duration must be positive");
        Ok(Self::Sinusoidal { duration })
    }

    /// Ramp duration τ (zero for an instantaneous switch).
    pub fn duration(&self) -> T {
        match self {
            Self::Instantaneous => T::zero(),
            Self::Linear { duration } | Self::Sinusoidal { duration } => *duration,
            Self::Sampled(s) => s.duration(),
        }
    }

    pub fn is_instantaneous(&self) -> bool {
        matches!(self, Self::Instantaneous)
    }

    /// Progress g at time `t` after the ramp starts (clamped outside [0, τ]).
    pub fn progress(&self, t: T) -> T {
        let tau = self.duration();
        if t <= T::zero() {
            return T::zero();
        }
        if t >= tau {
            return T::one();
        }
        match self {
            Self::Instantaneous => T::one(),
            Self::Linear { .. } => t / tau,
            Self::Sinusoidal { .. } => (T::one() - (T::PI() * t / tau).cos()) / lit(2.0),
            Self::Sampled(s) => s.eval(t),
        }
    }

    /// dg/dt at time `t` after the ramp starts, 1/s. Zero outside the ramp and
    /// for an instantaneous switch (whose derivative is a delta).
    pub fn rate(&self, t: T) -> T {
        let tau = self.duration();
        if t < T::zero() || t > tau || self.is_instantaneous() {
            return T::zero();
        }
        match self {
            Self::Instantaneous => T::zero(),
            Self::Linear { .. } => T::one() / tau,
            Self::Sinusoidal { .. } => T::PI() / (lit::<T>(2.0) * tau) * (T::PI() * t / tau).sin(),
            Self::Sampled(s) => s.derivative(t),
        }
    }

    /// Times inside the ramp where the rate is not smooth.
    pub fn knots(&self) -> Vec<T> {
        match self {
            Self::Sampled(s) => s.times.clone(),
            _ => vec![T::zero(), self.duration()],
        }
    }
}

/// Sampled ramp profile with Fritsch–Carlson monotone cubic interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRamp<T: Real = f64> {
    times: Vec<T>,
    values: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> SampledRamp<T> {
    /// From progress samples g(t_k). Times must be strictly increasing and are
    /// shifted to start at zero; g must start at 0 and end at 1.
    pub fn from_progress(times: &[T], progress: &[T]) -> Result<Self> {
        ensure!(times.len() == progress.len(), Input, "time and value columns differ in length");
        ensure!(times.len() >= 2, Input, "sampled ramp needs at least two samples");
        ensure!(
            times.iter().chain(progress).all(|v| v.is_finite()),
            Input,
            "sampled ramp contains non-finite values"
        );
        for w in times.windows(2) {
            ensure!(w[1] > w[0], Input, "sample times must be strictly increasing");
        }
        let tol: T = lit(1e-9);
        ensure!(progress[0].abs() <= tol, Input, "ramp must start at the initial position");
        ensure!((progress[progress.len() - 1] - T::one()).abs() <= tol, Input, "ramp must end at the final position");
        let t0 = times[0];
        let times: Vec<T> = times.iter().map(|&t| t - t0).collect();
        let mut values = progress.to_vec();
        values[0] = T::zero();
        *values.last_mut().expect("non-empty") = T::one();
        let slopes = pchip_slopes(&times, &values);
        Ok(Self { times, values, slopes })
    }

    /// From absolute well positions z(t_k), normalized against `start` and `end`.
    pub fn from_positions(times: &[T], positions: &[T], start: T, end: T) -> Result<Self> {
        let span = end - start;
        ensure!(span != T::zero(), Input, "ramp start and end positions coincide");
        let g: Vec<T> = positions.iter().map(|&z| (z - start) / span).collect();
        let tol: T = lit(1e-6);
        ensure!(
            g.first().is_some_and(|v| v.abs() <= tol) && g.last().is_some_and(|v| (*v - T::one()).abs() <= tol),
            Input,
            "sampled positions must run from {start} to {end}"
        );
        let mut g = g;
        g[0] = T::zero();
        *g.last_mut().expect("non-empty") = T::one();
        Self::from_progress(times, &g)
    }

    /// Reads a two-column CSV of time (s) and position (m). Lines starting with
    /// `#` and a non-numeric header row are skipped.
    pub fn from_csv(path: &Path, start: T, end: T) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let (mut ts, mut zs) = (Vec::new(), Vec::new());
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            ensure!(rec.len() >= 2, Input, "{}: row {} has fewer than two columns", path.display(), line + 1);
            let (a, b) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match (a, b) {
                (Ok(t), Ok(z)) => {
                    ts.push(lit(t));
                    zs.push(lit(z));
                }
                _ if ts.is_empty() => continue,
                _ => return Err(Error::Input(format!("{}: row {} is not numeric", path.display(), line + 1))),
            }
        }
        Self::from_positions(&ts, &zs, start, end)
    }

    pub fn duration(&self) -> T {
        *self.times.last().expect("non-empty")
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    fn segment(&self, t: T) -> usize {
        let n = self.times.len();
        match self.times.binary_search_by(|x| x.partial_cmp(&t).expect("finite")) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Interpolated progress at `t` (clamped to the sampled range).
    pub fn eval(&self, t: T) -> T {
        let t = t.max(T::zero()).min(self.duration());
        let k = self.segment(t);
        let h = self.times[k + 1] - self.times[k];
        let s = (t - self.times[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let two: T = lit(2.0);
        let three: T = lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.values[k] + h10 * h * self.slopes[k] + h01 * self.values[k + 1] + h11 * h * self.slopes[k + 1]
    }

    /// d(progress)/dt at `t`.
    pub fn derivative(&self, t: T) -> T {
        let t = t.max(T::zero()).min(self.duration());
        let k = self.segment(t);
        let h = self.times[k + 1] - self.times[k];
        let s = (t - self.times[k]) / h;
        let s2 = s * s;
        let six: T = lit(6.0);
        let d00 = six * s2 - six * s;
        let d10 = lit::<T>(3.0) * s2 - lit::<T>(4.0) * s + T::one();
        let d01 = six * s - six * s2;
        let d11 = lit::<T>(3.0) * s2 - lit::<T>(2.0) * s;
        (d00 * self.values[k] + d01 * self.values[k + 1]) / h + d10 * self.slopes[k] + d11 * self.slopes[k + 1]
    }
}

fn pchip_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<T> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![d[0], d[0]];
    }
    let mut m = vec![T::zero(); n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > T::zero() {
            let w1 = lit::<T>(2.0) * h[k] + h[k - 1];
            let w2 = h[k] + lit::<T>(2.0) * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m[0] = edge_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

fn edge_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let m = ((lit::<T>(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() || d0 == T::zero() {
        T::zero()
    } else if d0.signum() != d1.signum() && m.abs() > lit::<T>(3.0) * d0.abs() {
        lit::<T>(3.0) * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn analytic_profiles() {
        let lin = TransitionShape::<f64>::linear(2.0).unwrap();
        assert_eq!(lin.progress(0.5), 0.25);
        assert_eq!(lin.rate(1.0), 0.5);
        let sin = TransitionShape::<f64>::sinusoidal(2.0).unwrap();
        assert!((sin.progress(1.0) - 0.5).abs() < 1e-15);
        assert!((sin.rate(1.0) - std::f64::consts::PI / 4.0).abs() < 1e-15);
        assert_eq!(sin.rate(3.0), 0.0);
        let step = TransitionShape::<f64>::Instantaneous;
        assert_eq!(step.progress(0.0), 0.0);
        assert_eq!(step.progress(1e-30), 1.0);
        assert!(TransitionShape::linear(0.0).is_err());
    }

    #[test]
    fn sampled_validation() {
        assert!(SampledRamp::from_progress(&[0.0, 1.0, 1.0], &[0.0, 0.5, 1.0]).is_err());
        assert!(SampledRamp::from_progress(&[0.0, 1.0], &[0.1, 1.0]).is_err());
        assert!(SampledRamp::from_progress(&[0.0], &[0.0]).is_err());
        let r = SampledRamp::<f64>::from_positions(&[5.0, 6.0, 7.0], &[-2.0, 0.0, 2.0], -2.0, 2.0).unwrap();
        assert_eq!(r.duration(), 2.0);
        assert!((r.eval(1.0) - 0.5).abs() < 1e-15);
        assert!(SampledRamp::from_positions(&[0.0, 1.0], &[-2.0, 1.0], -2.0, 2.0).is_err());
    }

    #[test]
    fn sampled_reproduces_linear_ramp() {
        let t: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        let r = SampledRamp::from_progress(&t, &t).unwrap();
        for k in 0..100 {
            let x = k as f64 / 99.0;
            assert!((r.eval(x) - x).abs() < 1e-14);
            assert!((r.derivative(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_tracks_sinusoid() {
        let n = 200;
        let t: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let g: Vec<f64> = t.iter().map(|&x| (1.0 - (std::f64::consts::PI * x).cos()) / 2.0).collect();
        let shape = TransitionShape::Sampled(SampledRamp::from_progress(&t, &g).unwrap());
        let exact = TransitionShape::sinusoidal(1.0).unwrap();
        for k in 0..357 {
            let x = k as f64 / 356.0;
            assert!((shape.progress(x) - exact.progress(x)).abs() < 2e-5, "{x} {}", shape.progress(x) - exact.progress(x));
            assert!((shape.rate(x) - exact.rate(x)).abs() < 5e-3);
        }
    }

    #[test]
    fn csv_import() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ramp.csv");
        std::fs::write(&p, "# scope capture\ntime_s,position_m\n0,-2e-6\n1e-7,0\n2e-7,2e-6\n").unwrap();
        let r = SampledRamp::<f64>::from_csv(&p, -2e-6, 2e-6).unwrap();
        assert!((r.duration() - 2e-7).abs() < 1e-20);
        std::fs::write(&p, "0,-2e-6\nx,0\n2e-7,2e-6\n").unwrap();
        assert!(SampledRamp::<f64>::from_csv(&p, -2e-6, 2e-6).is_err());
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(steps in proptest::collection::vec((0.01f64..1.0, 0.0f64..1.0), 2..12)) {
            let mut t = vec![0.0];
            let mut g = vec![0.0];
            for (dt, dg) in &steps {
                t.push(t.last().unwrap() + dt);
                g.push(g.last().unwrap() + dg);
            }
            let total = *g.last().unwrap();
            prop_assume!(total > 1e-3);
            let g: Vec<f64> = g.iter().map(|v| v / total).collect();
            let r = SampledRamp::from_progress(&t, &g).unwrap();
            let tau = r.duration();
            let mut prev = r.eval(0.0);
            for k in 1..=400 {
                let v = r.eval(tau * k as f64 / 400.0);
                prop_assert!(v >= prev - 1e-12);
                prop_assert!(v <= 1.0 + 1e-12 && v >= -1e-12);
                prev = v;
            }
            for (ti, gi) in t.iter().zip(&g) {
                prop_assert!((r.eval(*ti) - gi).abs() < 1e-12);
            }
        }
    }
}
