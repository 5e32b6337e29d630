//! Seeded hit-or-miss volume estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// Box symmetric about the origin with the given half-widths.
    pub fn symmetric(half: &[f64]) -> Result<Self> {
        Self::new(half.iter().map(|h| -h).collect(), half.to_vec())
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    fn validate(&self) -> Result<()> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(Error::InvalidInput("bounding box corners must have equal, non-zero length".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && h > l)) {
            return Err(Error::InvalidInput("degenerate bounding box".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_err: f64,
}

pub const MIN_SAMPLES: usize = 1000;

/// Estimates the volume of `{x : indicator(x)}` inside `bbox`.
///
/// The ChaCha stream is keyed only by `seed`, so identical inputs give
/// bit-identical estimates.
pub fn monte_carlo_volume<F>(indicator: F, bbox: &BoundingBox, n_samples: usize, seed: u64) -> Result<VolumeEstimate>
where
    F: Fn(&[f64]) -> bool,
{
    bbox.validate()?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("monte_carlo_volume needs >= {MIN_SAMPLES} samples")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = bbox.lo.len();
    let mut x = vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = rng.gen_range(bbox.lo[i]..bbox.hi[i]);
        }
        if indicator(&x) {
            hits += 1;
        }
    }
    let frac = hits as f64 / n_samples as f64;
    let vol = bbox.volume();
    Ok(VolumeEstimate {
        estimate: vol * frac,
        std_err: vol * (frac * (1.0 - frac) / n_samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_volume() {
        let bbox = BoundingBox::symmetric(&[1.0; 3]).unwrap();
        let est = monte_carlo_volume(|x| x.iter().map(|v| v * v).sum::<f64>() <= 1.0, &bbox, 1_000_000, 7).unwrap();
        let truth = 4.0 * PI / 3.0;
        assert!((est.estimate - truth).abs() <= 4.0 * est.std_err, "{est:?}");
    }

    #[test]
    fn reproducible_per_seed() {
        let bbox = BoundingBox::symmetric(&[1.0, 1.0]).unwrap();
        let disc = |x: &[f64]| x[0] * x[0] + x[1] * x[1] <= 1.0;
        let a = monte_carlo_volume(disc, &bbox, 5000, 11).unwrap();
        let b = monte_carlo_volume(disc, &bbox, 5000, 11).unwrap();
        let c = monte_carlo_volume(disc, &bbox, 5000, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(BoundingBox::new(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        let bbox = BoundingBox::symmetric(&[1.0]).unwrap();
        assert!(monte_carlo_volume(|_| true, &bbox, 10, 0).is_err());
    }
}
