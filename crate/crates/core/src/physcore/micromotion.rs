use super::IonSpecies;
use crate::error::{ensure, Error, Result};
use crate::scalar::{lit, Real};

/// Secular/drive frequencies and axial field curvatures of an rf trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapContext<T: Real = f64> {
    /// ω, rad/s.
    pub secular_angular_frequency: T,
    /// Ω, rad/s.
    pub drive_angular_frequency: T,
    /// c₂, second-order dc coefficient of the axial potential, V/m².
    pub dc_axial_curvature: T,
    /// d₂, second-order rf coefficient of the axial potential, V/m².
    pub rf_axial_curvature: T,
}

impl<T: Real> TrapContext<T> {
    pub fn new(omega: T, drive: T, c2: T, d2: T) -> Result<Self> {
        ensure!(omega > T::zero(), Domain, "secular frequency must be positive");
        ensure!(drive > omega, Domain, "drive frequency must exceed the secular frequency");
        Ok(Self {
            secular_angular_frequency: omega,
            drive_angular_frequency: drive,
            dc_axial_curvature: c2,
            rf_axial_curvature: d2,
        })
    }
}

/// Mathieu parameters and sideband amplitudes of axial micromotion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicromotionCoefficients<T: Real = f64> {
    pub a_z: T,
    pub q_z: T,
    pub beta_z: T,
    /// Secular amplitude C₀, m.
    pub c0: T,
    /// Amplitude of the Ω + ω sideband, m.
    pub c_plus2: T,
    /// Amplitude of the Ω − ω sideband, m.
    pub c_minus2: T,
    /// Residual homogeneous rf-field amplitude D₂, m. Caller supplied; never derived.
    pub d2: Option<T>,
}

impl<T: Real> MicromotionCoefficients<T> {
    pub fn with_residual_amplitude(mut self, d2: T) -> Self {
        self.d2 = Some(d2);
        self
    }
}

/// a_z, q_z, β_z (lowest order) and C_±2 for secular amplitude `c0`.
pub fn micromotion_coefficients<T: Real>(
    ctx: &TrapContext<T>,
    species: &IonSpecies<T>,
    c0: T,
) -> Result<MicromotionCoefficients<T>> {
    let drive = ctx.drive_angular_frequency;
    ensure!(drive > T::zero(), Domain, "drive frequency must be positive");
    let q_over_m_drive2 = species.charge / species.mass / (drive * drive);
    let a_z = lit::<T>(8.0) * q_over_m_drive2 * ctx.dc_axial_curvature;
    let q_z = lit::<T>(4.0) * q_over_m_drive2 * ctx.rf_axial_curvature;
    let beta_sq = a_z + q_z * q_z / lit(2.0);
    ensure!(beta_sq >= T::zero(), Domain, "a_z + q_z²/2 is negative: axially unstable");
    let beta_z = beta_sq.sqrt();
    let sideband = |sign: T| -> Result<T> {
        let shift = sign * lit(2.0) + beta_z;
        let den = a_z - shift * shift;
        if den.abs() <= T::epsilon() * lit(16.0) * (a_z.abs() + shift * shift) {
            return Err(Error::Resonance(format!(
                "a_z - ({}2 + β_z)² vanishes",
                if sign > T::zero() { "+" } else { "-" }
            )));
        }
        Ok(-c0 * q_z / den)
    };
    Ok(MicromotionCoefficients {
        a_z,
        q_z,
        beta_z,
        c0,
        c_plus2: sideband(T::one())?,
        c_minus2: sideband(-T::one())?,
        d2: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quoted_trap() -> TrapContext {
        TrapContext::new(2.0 * PI * 1e6, 2.0 * PI * 100e6, 8e-6, 4.0).unwrap()
    }

    #[test]
    fn quoted_sideband_amplitude() {
        let m = micromotion_coefficients(&quoted_trap(), &IonSpecies::calcium40(), 100e-6).unwrap();
        for c in [m.c_plus2, m.c_minus2] {
            assert!((c - 2.5e-15).abs() < 0.15 * 2.5e-15, "{c}");
        }
        assert!(m.c_plus2.abs() < 1e-9 * m.c0);
        assert!(m.d2.is_none());
    }

    #[test]
    fn beta_self_consistency() {
        let m = micromotion_coefficients(&quoted_trap(), &IonSpecies::calcium40(), 100e-6).unwrap();
        let beta = (m.a_z + m.q_z * m.q_z / 2.0).sqrt();
        assert!((beta - m.beta_z).abs() <= 1e-12 * m.beta_z);
    }

    #[test]
    fn no_rf_curvature_no_sidebands() {
        let mut ctx = quoted_trap();
        ctx.rf_axial_curvature = 0.0;
        let m = micromotion_coefficients(&ctx, &IonSpecies::calcium40(), 100e-6).unwrap();
        assert_eq!(m.q_z, 0.0);
        assert_eq!(m.c_plus2, 0.0);
        assert_eq!(m.c_minus2, 0.0);
    }

    #[test]
    fn linear_in_secular_amplitude() {
        let ca = IonSpecies::calcium40();
        let m1 = micromotion_coefficients(&quoted_trap(), &ca, 100e-6).unwrap();
        let m2 = micromotion_coefficients(&quoted_trap(), &ca, 200e-6).unwrap();
        assert!((m2.c_plus2 - 2.0 * m1.c_plus2).abs() < 1e-14 * m1.c_plus2.abs());
        assert!((m2.c_minus2 - 2.0 * m1.c_minus2).abs() < 1e-14 * m1.c_minus2.abs());
    }

    #[test]
    fn small_parameter_limit() {
        // with a_z, q_z → 0 the sidebands approach C0 q_z / 4
        let ca = IonSpecies::calcium40();
        for d2 in [1e-2, 1.0, 1e2] {
            let ctx = TrapContext::new(2.0 * PI * 1e6, 2.0 * PI * 100e6, 1e-9, d2).unwrap();
            let m = micromotion_coefficients(&ctx, &ca, 1e-4).unwrap();
            let lead = m.c0 * m.q_z / 4.0;
            assert!((m.c_plus2 - lead).abs() < 2.0 * m.q_z * lead.abs() + 1e-6 * lead.abs());
        }
    }

    #[test]
    fn resonance_is_reported() {
        // β = 1.5 with a_z = (β − 2)² puts the Ω − ω sideband exactly on resonance
        let ca = IonSpecies::calcium40();
        let drive = 2.0 * PI * 100e6;
        let k = ca.charge / ca.mass / (drive * drive);
        let beta: f64 = 1.5;
        let a_z = (beta - 2.0).powi(2);
        let q_z = (2.0 * (beta * beta - a_z)).sqrt();
        let ctx = TrapContext::new(2.0 * PI * 1e6, drive, a_z / (8.0 * k), q_z / (4.0 * k)).unwrap();
        let r = micromotion_coefficients(&ctx, &ca, 1e-4);
        assert!(matches!(r, Err(Error::Resonance(_))), "{r:?}");
    }

    #[test]
    fn trap_context_validation() {
        assert!(TrapContext::new(2.0 * PI * 1e6, 2.0 * PI * 0.5e6, 0.0, 0.0).is_err());
        assert!(TrapContext::new(0.0, 1.0, 0.0, 0.0).is_err());
    }
}
