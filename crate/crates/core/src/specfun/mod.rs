//! Special-function kernels: Gamma, hypergeometric series, Bessel functions
//! and the quadrature rules used for oscillatory moment integrals.

pub mod bessel;
pub mod gamma;
pub mod hypergeom;
pub mod quadrature;

pub use bessel::{bessel_j, bessel_j_phased, bessel_j_over_pow, bessel_moment, bessel_moment_panels};
pub use gamma::{digamma, gamma, rgamma};
pub use hypergeom::{bessel_moment_series, hyp1f1_safe, hyp2f1_safe, pfq, SeriesResult};
pub use quadrature::GaussRule;
