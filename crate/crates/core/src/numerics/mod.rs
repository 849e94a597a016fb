//! Small numerical kernels: adaptive quadrature, bracketed root finding and
//! golden-section minimisation.

mod optimize;
mod quad;

pub use optimize::{bisect, golden_section_min};
pub use quad::{integrate, integrate_complex, Quadrature};
