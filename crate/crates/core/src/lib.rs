//! Simulation of fast ion transport and trap-frequency switching.

mod error;
pub mod numerics;
pub mod physcore;
pub mod potential;
pub mod gaussian;
pub mod qprop;
pub mod scenarios;
pub mod switchcal;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type IonSpeciesF64 = physcore::IonSpecies<f64>;
pub type IonSpeciesF32 = physcore::IonSpecies<f32>;
pub type PotentialSpecF64 = potential::PotentialSpec<f64>;
pub type PotentialSpecF32 = potential::PotentialSpec<f32>;
pub type TransportProtocolF64 = potential::TransportProtocol<f64>;
pub type TransportProtocolF32 = potential::TransportProtocol<f32>;
pub type WavefunctionF64 = qprop::Wavefunction<f64>;
pub type WavefunctionF32 = qprop::Wavefunction<f32>;
pub type GaussianStateF64 = gaussian::GaussianState<f64>;
pub type GaussianStateF32 = gaussian::GaussianState<f32>;
pub type TimingBudgetF64 = switchcal::TimingBudget<f64>;
