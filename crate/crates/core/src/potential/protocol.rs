use super::{require_time_in, PotentialSpec, TransitionShape};
use crate::error::{ensure, Result};
use crate::scalar::{lit, Real};

/// Throw-catch transport: the well jumps (or ramps) from the initial well to
/// the transport well at t = 0, and to the final well starting at the catch
/// time T. The total duration is T + τ′.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportProtocol<T: Real = f64> {
    pub initial_well: PotentialSpec<T>,
    pub transport_well: PotentialSpec<T>,
    pub final_well: PotentialSpec<T>,
    pub throw: TransitionShape<T>,
    /// Start of the catch ramp, measured from the start of the throw.
    pub catch_time: T,
    pub catch: TransitionShape<T>,
}

impl<T: Real> TransportProtocol<T> {
    pub fn new(
        initial_well: PotentialSpec<T>,
        transport_well: PotentialSpec<T>,
        final_well: PotentialSpec<T>,
        throw: TransitionShape<T>,
        catch_time: T,
        catch: TransitionShape<T>,
    ) -> Result<Self> {
        ensure!(catch_time.is_finite(), Domain, "catch time must be finite");
        ensure!(
            catch_time >= throw.duration(),
            Domain,
            "catch time {catch_time} precedes the end of the throw ramp {}",
            throw.duration()
        );
        Ok(Self { initial_well, transport_well, final_well, throw, catch_time, catch })
    }

    /// Transport over ±z0: `end_well` placed at −z0 and +z0, `transport_well` at 0.
    pub fn symmetric(
        end_well: PotentialSpec<T>,
        transport_well: PotentialSpec<T>,
        z0: T,
        throw: TransitionShape<T>,
        catch_time: T,
        catch: TransitionShape<T>,
    ) -> Result<Self> {
        ensure!(z0 > T::zero(), Domain, "transport distance must be positive");
        Self::new(
            end_well.with_center(-z0),
            transport_well.with_center(T::zero()),
            end_well.with_center(z0),
            throw,
            catch_time,
            catch,
        )
    }

    pub fn total_duration(&self) -> T {
        self.catch_time + self.catch.duration()
    }

    /// Interior hold between the end of the throw and the start of the catch.
    pub fn hold_duration(&self) -> T {
        self.catch_time - self.throw.duration()
    }

    /// Well center s(t). An instantaneous throw leaves s(0) at the initial
    /// center; an instantaneous catch puts s(T) at the final center.
    pub fn center(&self, t: T) -> Result<T> {
        require_time_in(t, self.total_duration())?;
        let (ci, ct, cf) = (self.initial_well.center, self.transport_well.center, self.final_well.center);
        if self.catch.is_instantaneous() && t >= self.catch_time {
            return Ok(cf);
        }
        if t >= self.catch_time {
            return Ok(ct + (cf - ct) * self.catch.progress(t - self.catch_time));
        }
        if t <= T::zero() {
            return Ok(ci);
        }
        Ok(ci + (ct - ci) * self.throw.progress(t))
    }

    /// ds/dt, m/s (delta contributions of instantaneous switches are omitted).
    pub fn velocity(&self, t: T) -> Result<T> {
        require_time_in(t, self.total_duration())?;
        let (ci, ct, cf) = (self.initial_well.center, self.transport_well.center, self.final_well.center);
        if t >= self.catch_time {
            Ok((cf - ct) * self.catch.rate(t - self.catch_time))
        } else {
            Ok((ct - ci) * self.throw.rate(t))
        }
    }

    /// Instantaneous well: before the catch the transport shape at s(t), from
    /// the catch on the final shape at s(t).
    pub fn well_at(&self, t: T) -> Result<PotentialSpec<T>> {
        let s = self.center(t)?;
        if t >= self.catch_time {
            return Ok(self.final_well.with_center(s));
        }
        if t <= T::zero() && self.throw.is_instantaneous() {
            return Ok(self.initial_well);
        }
        Ok(self.transport_well.with_center(s))
    }

    /// Sorted times where the drive changes character (ramp starts and ends,
    /// sampled-ramp knots).
    pub fn breakpoints(&self) -> Vec<T> {
        let mut v: Vec<T> = self.throw.knots();
        v.extend(self.catch.knots().into_iter().map(|k| k + self.catch_time));
        v.push(T::zero());
        v.push(self.total_duration());
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let tol = lit::<T>(1e-12) * self.total_duration().max(T::min_positive_value());
        v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wells() -> (PotentialSpec, PotentialSpec) {
        (PotentialSpec::harmonic(1e6, 0.0).unwrap(), PotentialSpec::from_lengths(1e6, f64::INFINITY, -120e-6, 0.0).unwrap())
    }

    fn protocol(throw: TransitionShape, catch_time: f64, catch: TransitionShape) -> TransportProtocol {
        let (e, t) = wells();
        TransportProtocol::symmetric(e, t, 50e-6, throw, catch_time, catch).unwrap()
    }

    #[test]
    fn instantaneous_hold_is_centered() {
        let p = protocol(TransitionShape::Instantaneous, 0.5e-6, TransitionShape::Instantaneous);
        assert_eq!(p.center(0.0).unwrap(), -50e-6);
        assert_eq!(p.center(0.25e-6).unwrap(), 0.0);
        assert_eq!(p.center(0.5e-6).unwrap(), 50e-6);
        assert!(p.center(0.6e-6).is_err());
        assert!(p.center(-1e-9).is_err());
        assert_eq!(p.well_at(0.25e-6).unwrap(), wells().1);
        assert_eq!(p.well_at(0.5e-6).unwrap().center, 50e-6);
    }

    #[test]
    fn ramp_midpoints() {
        let tau = 0.1e-6;
        let p = protocol(TransitionShape::sinusoidal(tau).unwrap(), 0.5e-6, TransitionShape::linear(tau).unwrap());
        assert!((p.center(tau / 2.0).unwrap() + 25e-6).abs() < 1e-18);
        assert!((p.center(0.5e-6 + tau / 2.0).unwrap() - 25e-6).abs() < 1e-18);
        assert!((p.velocity(0.5e-6 + tau / 2.0).unwrap() - 50e-6 / tau).abs() < 1e-6);
        assert_eq!(p.total_duration(), 0.6e-6);
        assert!((p.hold_duration() - 0.4e-6).abs() < 1e-20);
        assert_eq!(p.breakpoints().len(), 4);
    }

    #[test]
    fn catch_before_throw_end_rejected() {
        let (e, t) = wells();
        assert!(TransportProtocol::symmetric(e, t, 50e-6, TransitionShape::linear(1e-6).unwrap(), 0.5e-6, TransitionShape::Instantaneous).is_err());
    }

    #[test]
    fn continuity_under_refinement() {
        let tau = 0.1e-6;
        let p = protocol(TransitionShape::linear(tau).unwrap(), 0.5e-6, TransitionShape::sinusoidal(tau).unwrap());
        let mut last = f64::INFINITY;
        for n in [100usize, 1000, 10000] {
            let dt = p.total_duration() / n as f64;
            let jump = (0..n)
                .map(|k| (p.center((k + 1) as f64 * dt).unwrap() - p.center(k as f64 * dt).unwrap()).abs())
                .fold(0.0, f64::max);
            assert!(jump < last);
            last = jump;
        }
        assert!(last < 1e-7);
    }

    #[test]
    fn symmetric_protocol_is_odd_about_midpoint() {
        let tau = 0.08e-6;
        for shape in [TransitionShape::linear(tau).unwrap(), TransitionShape::sinusoidal(tau).unwrap()] {
            let p = protocol(shape.clone(), 0.5e-6, shape);
            let total = p.total_duration();
            for k in 0..=50 {
                let t = total * k as f64 / 50.0;
                let a = p.center(t).unwrap();
                let b = p.center(total - t).unwrap();
                assert!((a + b).abs() < 1e-15, "t = {t}: {a} vs {b}");
            }
        }
    }
}
