use super::PotentialSpec;
use crate::error::{ensure, Error, Result};
use crate::numerics::{bisect, integrate};
use crate::physcore::IonSpecies;
use crate::scalar::{lit, Real};

/// Time for a particle released at rest at `release` to reach its opposite
/// turning point in `well`.
///
/// Errors if the release point is at the center or the particle is not bound
/// (the far side never climbs back to the release energy).
pub fn classical_half_period<T: Real>(well: &PotentialSpec<T>, species: &IonSpecies<T>, release: T) -> Result<T> {
    let c = well.center;
    let d = c - release;
    ensure!(d != T::zero(), Domain, "release point coincides with the well center");
    let energy = well.value(species, release);
    ensure!(
        well.force_gradient(species, release) * (release - c) > T::zero(),
        Domain,
        "release point lies outside the confining region"
    );
    let gap = |z: T| well.value(species, z) - energy;
    // outward scan on the far side for the point where V climbs back to E
    let steps = 256;
    let mut lo = c;
    let mut prev_v = well.value(species, c);
    let mut far = None;
    for k in 1..=steps {
        let z = c + d * lit::<T>(4.0) * T::count(k) / T::count(steps);
        let v = well.value(species, z);
        if v >= energy {
            far = Some((lo, z));
            break;
        }
        if v < prev_v {
            return Err(Error::Domain("motion is unbound: the well turns over before the turning point".into()));
        }
        prev_v = v;
        lo = z;
    }
    let (a, b) = far.ok_or_else(|| Error::Domain("no opposite turning point within 4 release distances".into()))?;
    let tol = d.abs() * lit::<T>(1e3) * T::epsilon();
    let turn = bisect(gap, a, b, tol)?;
    let (zl, zr) = if release < turn { (release, turn) } else { (turn, release) };
    let mid = (zl + zr) / lit(2.0);
    let half = (zr - zl) / lit(2.0);
    let two_over_m = lit::<T>(2.0) / species.mass;
    // z = mid + half·sin θ removes the inverse-square-root endpoint singularities
    let integrand = |theta: T| {
        let z = mid + half * theta.sin();
        let ke = (energy - well.value(species, z)).max(T::zero());
        let speed = (two_over_m * ke).sqrt();
        if speed > T::zero() {
            half * theta.cos() / speed
        } else {
            T::zero()
        }
    };
    let hp = T::FRAC_PI_2();
    let q = integrate(integrand, -hp, hp, 1e-11, 0.0);
    ensure!(q.converged, Instability, "half-period quadrature did not converge (error {:e})", q.error);
    Ok(q.value)
}
