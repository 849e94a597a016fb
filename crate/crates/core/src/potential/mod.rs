//! Axial trapping potential (quadratic + cubic + quartic expansion), its local
//! curvature, and time programs of the well position.

mod classical;
mod protocol;
mod ramp;

pub use classical::classical_half_period;
pub use protocol::TransportProtocol;
pub use ramp::{SampledRamp, TransitionShape};

use crate::error::{ensure, Error, Result};
use crate::physcore::IonSpecies;
use crate::scalar::{lit, Real};

/// Lengths beyond this magnitude (1 m) are treated as an absent expansion term.
pub const EFFECTIVELY_INFINITE_LENGTH: f64 = 1.0;

/// Length scale of a cubic or quartic term; `Infinite` drops the term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthScale<T: Real = f64> {
    Infinite,
    Finite(T),
}

impl<T: Real> LengthScale<T> {
    /// Signed length in m; magnitudes above [`EFFECTIVELY_INFINITE_LENGTH`] and
    /// infinities map to `Infinite`.
    pub fn from_length(length: T) -> Result<Self> {
        ensure!(!length.is_nan(), Domain, "length scale is NaN");
        ensure!(length != T::zero(), Domain, "finite length scale must be non-zero");
        if length.is_infinite() || length.abs() > lit(EFFECTIVELY_INFINITE_LENGTH) {
            Ok(Self::Infinite)
        } else {
            Ok(Self::Finite(length))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// 1/L, zero for an absent term.
    pub fn inverse(&self) -> T {
        match *self {
            Self::Infinite => T::zero(),
            Self::Finite(l) => T::one() / l,
        }
    }

    /// sgn(L)/L², zero for an absent term.
    pub fn signed_inverse_square(&self) -> T {
        match *self {
            Self::Infinite => T::zero(),
            Self::Finite(l) => l.signum() / (l * l),
        }
    }

    /// Scales a finite length by `factor` (used to co-scale geometries).
    pub fn scaled(&self, factor: T) -> Self {
        match *self {
            Self::Infinite => Self::Infinite,
            Self::Finite(l) => Self::Finite(l * factor),
        }
    }
}

/// Axial well V(z) = 2π² m f_z² u² (1 + u/L3 + sgn(L4) u²/L4²), u = z − center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec<T: Real = f64> {
    /// Curvature-defined oscillation frequency f_z, Hz.
    pub frequency: T,
    pub cubic: LengthScale<T>,
    pub quartic: LengthScale<T>,
    /// Well center, m.
    pub center: T,
}

/// Sign of the local curvature returned by [`PotentialSpec::local_frequency`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCurvature<T: Real = f64> {
    /// ω²(z), rad²/s². Negative where the well is anti-confining.
    pub omega_squared: T,
}

impl<T: Real> LocalCurvature<T> {
    pub fn is_anticonfining(&self) -> bool {
        self.omega_squared < T::zero()
    }

    /// ω(z) when the curvature is non-negative.
    pub fn omega(&self) -> Option<T> {
        (self.omega_squared >= T::zero()).then(|| self.omega_squared.sqrt())
    }
}

/// Outcome of [`PotentialSpec::anticonfining_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Confinement<T: Real = f64> {
    AlwaysConfining,
    /// `curvature_sign_change` = |L4|/√6, `force_sign_change` = |L4|/√2 (distances from center).
    Bounded { curvature_sign_change: T, force_sign_change: T },
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(frequency: T, cubic: LengthScale<T>, quartic: LengthScale<T>, center: T) -> Result<Self> {
        ensure!(frequency > T::zero() && frequency.is_finite(), Domain, "well frequency must be positive");
        ensure!(center.is_finite(), Domain, "well center must be finite");
        Ok(Self { frequency, cubic, quartic, center })
    }

    /// Pure harmonic well.
    pub fn harmonic(frequency: T, center: T) -> Result<Self> {
        Self::new(frequency, LengthScale::Infinite, LengthScale::Infinite, center)
    }

    /// From signed lengths in m (|L| > 1 m counts as infinite).
    pub fn from_lengths(frequency: T, l3: T, l4: T, center: T) -> Result<Self> {
        Self::new(frequency, LengthScale::from_length(l3)?, LengthScale::from_length(l4)?, center)
    }

    pub fn with_center(mut self, center: T) -> Self {
        self.center = center;
        self
    }

    pub fn without_cubic(mut self) -> Self {
        self.cubic = LengthScale::Infinite;
        self
    }

    pub fn is_harmonic(&self) -> bool {
        self.cubic.is_infinite() && self.quartic.is_infinite()
    }

    /// ω = 2π f_z.
    pub fn angular_frequency(&self) -> T {
        lit::<T>(2.0) * T::PI() * self.frequency
    }

    /// 1 + u/L3 + sgn(L4) u²/L4².
    pub fn anharmonic_factor(&self, u: T) -> T {
        T::one() + u * self.cubic.inverse() + u * u * self.quartic.signed_inverse_square()
    }

    /// Potential energy in J at position `z` (m).
    pub fn value(&self, species: &IonSpecies<T>, z: T) -> T {
        let u = z - self.center;
        let w = self.angular_frequency();
        lit::<T>(0.5) * species.mass * w * w * u * u * self.anharmonic_factor(u)
    }

    /// dV/dz in N.
    pub fn force_gradient(&self, species: &IonSpecies<T>, z: T) -> T {
        let u = z - self.center;
        let w = self.angular_frequency();
        let c3 = self.cubic.inverse();
        let c4 = self.quartic.signed_inverse_square();
        lit::<T>(0.5) * species.mass * w * w * (lit::<T>(2.0) * u + lit::<T>(3.0) * c3 * u * u + lit::<T>(4.0) * c4 * u * u * u)
    }

    /// ω²(z) = ω²(0)(1 + 6 sgn(L4) u²/L4²). The cubic term is ignored.
    pub fn local_frequency(&self, z: T) -> LocalCurvature<T> {
        let u = z - self.center;
        let w = self.angular_frequency();
        LocalCurvature {
            omega_squared: w * w * (T::one() + lit::<T>(6.0) * self.quartic.signed_inverse_square() * u * u),
        }
    }

    /// Distances from center where the curvature (|L4|/√6) and the restoring
    /// force (|L4|/√2) change sign, for a softening quartic term.
    pub fn anticonfining_threshold(&self) -> Confinement<T> {
        match self.quartic {
            LengthScale::Finite(l4) if l4 < T::zero() => Confinement::Bounded {
                curvature_sign_change: l4.abs() / lit::<T>(6.0).sqrt(),
                force_sign_change: l4.abs() / lit::<T>(2.0).sqrt(),
            },
            _ => Confinement::AlwaysConfining,
        }
    }

    /// Same well shape scaled in space by `factor` (center and L3, L4 multiply).
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            frequency: self.frequency,
            cubic: self.cubic.scaled(factor),
            quartic: self.quartic.scaled(factor),
            center: self.center * factor,
        }
    }
}

pub(crate) fn require_time_in<T: Real>(t: T, total: T) -> Result<()> {
    let slack = lit::<T>(1e-12) * total.max(T::min_positive_value());
    if !(t >= -slack && t <= total + slack) {
        return Err(Error::Domain(format!("time {t} outside protocol [0, {total}]")));
    }
    Ok(())
}
