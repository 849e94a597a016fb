use super::constants::EPSILON_0;
use super::IonSpecies;
use crate::error::{ensure, Result};
use crate::scalar::{lit, Real};

/// Equilibrium separation of two identical ions in one harmonic well,
/// d = (q² / (2π m ε₀ ω_z²))^{1/3}.
pub fn ion_separation<T: Real>(species: &IonSpecies<T>, omega_z: T) -> Result<T> {
    ensure!(omega_z > T::zero(), Domain, "axial frequency must be positive");
    let q = species.charge;
    let num = (q / species.mass) * (q / lit::<T>(EPSILON_0));
    Ok((num / (lit::<T>(2.0) * T::PI() * omega_z * omega_z)).cbrt())
}

/// Magnitude of the bilinear ξ₁ξ₂ coupling coefficient q²χ/(4πε₀d³), J/m².
///
/// χ = 2 when the excursions are along the inter-ion axis, 1 otherwise. The
/// physical cross term is negative for the aligned case and positive for the
/// transverse one; only the magnitude is returned.
pub fn coulomb_coupling_coefficient<T: Real>(species: &IonSpecies<T>, d: T, aligned: bool) -> Result<T> {
    ensure!(d > T::zero(), Domain, "ion separation must be positive");
    let chi: T = if aligned { lit(2.0) } else { T::one() };
    let q = species.charge;
    Ok(q * (q / lit::<T>(EPSILON_0)) * chi / (lit::<T>(4.0) * T::PI() * d * d * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bisect;
    use std::f64::consts::PI;

    const MHZ: f64 = 2.0 * PI * 1e6;

    fn coulomb_k(sp: &IonSpecies) -> f64 {
        sp.charge * sp.charge / (4.0 * PI * EPSILON_0)
    }

    #[test]
    fn separation_matches_force_balance() {
        let ca: IonSpecies = IonSpecies::calcium40();
        let k = coulomb_k(&ca);
        // symmetric pair at ±ξ: V(ξ) = m ω² ξ² + k / (2ξ)
        let dv = |xi: f64| 2.0 * ca.mass * MHZ * MHZ * xi - k / (2.0 * xi * xi);
        let xi = bisect(dv, 1e-7, 1e-3, 1e-18).unwrap();
        let d = ion_separation(&ca, MHZ).unwrap();
        assert!((2.0 * xi - d).abs() < 1e-10 * d, "{} vs {}", 2.0 * xi, d);
    }

    #[test]
    fn separation_scalings() {
        let ca: IonSpecies = IonSpecies::calcium40();
        let d = ion_separation(&ca, MHZ).unwrap();
        let d4 = ion_separation(&ca, 4.0 * MHZ).unwrap();
        assert!((d / d4 - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
        let heavy = IonSpecies::new(2.0 * ca.mass, ca.charge, "x").unwrap();
        let dh = ion_separation(&heavy, MHZ).unwrap();
        assert!((dh - d / 2f64.cbrt()).abs() < 1e-12 * d);
        assert!(ion_separation(&ca, 0.0).is_err());
    }

    #[test]
    fn coupling_ratio_and_scaling() {
        let ca: IonSpecies = IonSpecies::calcium40();
        let a = coulomb_coupling_coefficient(&ca, 5e-6, true).unwrap();
        let t = coulomb_coupling_coefficient(&ca, 5e-6, false).unwrap();
        assert!((a / t - 2.0).abs() < 1e-15);
        let a2 = coulomb_coupling_coefficient(&ca, 10e-6, true).unwrap();
        assert!((a / a2 - 8.0).abs() < 1e-12);
        assert!(coulomb_coupling_coefficient(&ca, 0.0, true).is_err());
    }

    #[test]
    fn coupling_matches_mixed_finite_difference() {
        let ca: IonSpecies = IonSpecies::calcium40();
        let k = coulomb_k(&ca);
        let d = ion_separation(&ca, MHZ).unwrap();
        let h = 1e-4 * d;
        let aligned = |x1: f64, x2: f64| k / (d + x1 - x2).abs();
        let transverse = |x1: f64, x2: f64| k / (d * d + (x1 - x2).powi(2)).sqrt();
        let mixed = |u: &dyn Fn(f64, f64) -> f64| {
            (u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4.0 * h * h)
        };
        let fa = mixed(&aligned);
        let ft = mixed(&transverse);
        let ca_ = coulomb_coupling_coefficient(&ca, d, true).unwrap();
        let ct = coulomb_coupling_coefficient(&ca, d, false).unwrap();
        assert!(fa < 0.0 && ft > 0.0);
        assert!((fa.abs() - ca_).abs() < 1e-6 * ca_, "{fa} vs {ca_}");
        assert!((ft.abs() - ct).abs() < 1e-6 * ct, "{ft} vs {ct}");
    }
}
