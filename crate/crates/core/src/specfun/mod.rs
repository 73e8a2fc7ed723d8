//! Special functions: gamma, normalized Bessel functions, the Harish-Chandra
//! c-function and spherical functions.

pub mod bessel;
pub mod cfunction;
pub mod gamma;
pub mod spherical;

pub use bessel::{bessel_j, bessel_j_norm, bessel_j_norm_deriv, spherical_bessel_seq};
pub use cfunction::{anker_coefficient_bound, harish_chandra_c, plancherel_density};
pub use gamma::{gamma_real, ln_gamma, ln_gamma_real};
pub use spherical::{
    bessel_series, phi_anker_h3, phi_bessel_series, phi_closed_h3, phi_ode, phi_ode_with_derivative,
    spherical_function, AnkerDecomposition, BesselSeries, PhiTable, Route, SphericalEval, DEFAULT_R0,
};
