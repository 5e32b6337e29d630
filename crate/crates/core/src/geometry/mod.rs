//! Convex bodies, quermassintegrals and metric inequalities.

pub mod body;
pub mod metrics;
pub mod steiner;

pub use body::{binomial, ellipsoid_distance, gamma_half_integer, unit_ball_volume, BodyKind, ConvexBody};
pub use metrics::{metric_inequality_slacks, metrics_of, BodyMetrics, InequalitySlack};
pub use steiner::{ellipsoid_quermassintegrals, ellipsoid_quermassintegrals_surface, steiner_of, AfSlack, SteinerMethod, SteinerPolynomial};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{monte_carlo_volume, BoundingBox};

/// Polynomial value of `|K_t|` against a Monte Carlo estimate of the same volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinerCheck {
    pub poly_value: f64,
    pub mc_estimate: f64,
    pub std_err: f64,
    pub z_score: f64,
}

/// Samples the parallel body `{x : dist(x, K) ≤ t}` and compares its volume
/// with the Steiner polynomial.
pub fn mc_validate_steiner(body: &ConvexBody, t: f64, n_samples: usize, seed: u64) -> Result<SteinerCheck> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("parallel distance t must be >= 0, got {t}")));
    }
    let poly_value = steiner_of(body)?.steiner_volume(t)?;
    let half: Vec<f64> = body.half_widths().iter().map(|h| h + t).collect();
    let bbox = BoundingBox::symmetric(&half)?;
    let est = monte_carlo_volume(|x| body.distance(x) <= t, &bbox, n_samples, seed)?;
    Ok(SteinerCheck {
        poly_value,
        mc_estimate: est.estimate,
        std_err: est.std_err,
        z_score: (est.estimate - poly_value) / est.std_err,
    })
}

/// A body together with its Steiner polynomial and metrics, computed once.
///
/// Ellipsoid quermassintegrals come from numerical quadrature, so callers that
/// evaluate several bounds on the same body should go through this type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedBody {
    pub body: ConvexBody,
    pub steiner: SteinerPolynomial,
    pub metrics: BodyMetrics,
}

impl PreparedBody {
    pub fn new(body: &ConvexBody) -> Result<Self> {
        let steiner = steiner_of(body)?;
        let metrics = BodyMetrics::from_parts(body, &steiner);
        Ok(Self { body: body.clone(), steiner, metrics })
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }
}
