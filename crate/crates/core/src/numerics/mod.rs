//! Deterministic numerical kernels.

pub mod fit;
pub mod montecarlo;
pub mod quadrature;
pub mod search;

pub use fit::{fit_loglog_slope, SlopeFit};
pub use montecarlo::{monte_carlo_volume, BoundingBox, VolumeEstimate};
pub use quadrature::{gauss_legendre, integrate, integrate_semi_infinite, QuadratureConfig};
pub use search::{minimize_1d, minimize_nelder_mead, NelderMeadResult, SearchConfig};
