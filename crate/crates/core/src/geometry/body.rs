use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lengths below this are treated as degenerate and rejected.
pub const MIN_LENGTH: f64 = 1e-12;

/// Volume of the unit ball in `R^d` (`ω_0 = 1`, `ω_1 = 2`).
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// `Γ(m/2)` for integer `m ≥ 1`.
pub fn gamma_half_integer(m: usize) -> f64 {
    match m {
        0 => f64::INFINITY,
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_half_integer(m - 2),
    }
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Elementary symmetric polynomials `e_0..=e_n` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (m, &v) in values.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyKind {
    Ball { radius: f64 },
    Ellipsoid { semi_axes: Vec<f64> },
    Cuboid { edge_lengths: Vec<f64> },
}

/// A centred convex body: ball, axis-aligned ellipsoid or axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexBody {
    kind: BodyKind,
    dim: usize,
}

fn check_lengths(what: &str, v: &[f64]) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::InvalidInput(format!("{what} needs dimension d >= 2, got {}", v.len())));
    }
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= MIN_LENGTH)) {
        return Err(Error::InvalidInput(format!("{what} lengths must be finite and >= {MIN_LENGTH:e}, got {x}")));
    }
    Ok(())
}

impl ConvexBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("ball needs dimension d >= 2, got {dim}")));
        }
        if !(radius.is_finite() && radius >= MIN_LENGTH) {
            return Err(Error::InvalidInput(format!("ball radius must be finite and positive, got {radius}")));
        }
        Ok(Self { kind: BodyKind::Ball { radius }, dim })
    }

    pub fn ellipsoid(semi_axes: Vec<f64>) -> Result<Self> {
        check_lengths("ellipsoid", &semi_axes)?;
        let dim = semi_axes.len();
        Ok(Self { kind: BodyKind::Ellipsoid { semi_axes }, dim })
    }

    pub fn cuboid(edge_lengths: Vec<f64>) -> Result<Self> {
        check_lengths("cuboid", &edge_lengths)?;
        let dim = edge_lengths.len();
        Ok(Self { kind: BodyKind::Cuboid { edge_lengths }, dim })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(dim, 1.0)
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `true` when the boundary is C² (balls and ellipsoids).
    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, BodyKind::Cuboid { .. })
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.kind, BodyKind::Ball { .. })
    }

    /// Homothetic copy `t·K`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidInput(format!("scale factor must be positive, got {t}")));
        }
        match &self.kind {
            BodyKind::Ball { radius } => Self::ball(self.dim, radius * t),
            BodyKind::Ellipsoid { semi_axes } => Self::ellipsoid(semi_axes.iter().map(|a| a * t).collect()),
            BodyKind::Cuboid { edge_lengths } => Self::cuboid(edge_lengths.iter().map(|a| a * t).collect()),
        }
    }

    pub fn volume(&self) -> f64 {
        let d = self.dim;
        match &self.kind {
            BodyKind::Ball { radius } => unit_ball_volume(d) * radius.powi(d as i32),
            BodyKind::Ellipsoid { semi_axes } => unit_ball_volume(d) * semi_axes.iter().product::<f64>(),
            BodyKind::Cuboid { edge_lengths } => edge_lengths.iter().product(),
        }
    }

    pub fn inradius(&self) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => *radius,
            BodyKind::Ellipsoid { semi_axes } => semi_axes.iter().copied().fold(f64::INFINITY, f64::min),
            BodyKind::Cuboid { edge_lengths } => 0.5 * edge_lengths.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => 2.0 * radius,
            BodyKind::Ellipsoid { semi_axes } => 2.0 * semi_axes.iter().copied().fold(0.0, f64::max),
            BodyKind::Cuboid { edge_lengths } => edge_lengths.iter().map(|l| l * l).sum::<f64>().sqrt(),
        }
    }

    /// Half-widths of the smallest centred box containing the body.
    pub fn half_widths(&self) -> Vec<f64> {
        match &self.kind {
            BodyKind::Ball { radius } => vec![*radius; self.dim],
            BodyKind::Ellipsoid { semi_axes } => semi_axes.clone(),
            BodyKind::Cuboid { edge_lengths } => edge_lengths.iter().map(|l| 0.5 * l).collect(),
        }
    }

    /// Euclidean distance from `x` to the body (zero inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            BodyKind::Ball { radius } => (x.iter().map(|v| v * v).sum::<f64>().sqrt() - radius).max(0.0),
            BodyKind::Ellipsoid { semi_axes } => ellipsoid_distance(semi_axes, x),
            BodyKind::Cuboid { edge_lengths } => x
                .iter()
                .zip(edge_lengths)
                .map(|(v, l)| (v.abs() - 0.5 * l).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Distance from `x` to the ellipsoid `Σ x_i²/a_i² ≤ 1`.
///
/// The nearest boundary point is `y_i = a_i² x_i / (a_i² + λ)` where `λ ≥ 0`
/// solves `Σ a_i² x_i² / (a_i² + λ)² = 1`. That function is convex and
/// decreasing in `λ`, so Newton started left of the root climbs to it
/// monotonically.
pub fn ellipsoid_distance(semi_axes: &[f64], x: &[f64]) -> f64 {
    let level: f64 = x.iter().zip(semi_axes).map(|(v, a)| (v / a).powi(2)).sum();
    if level <= 1.0 {
        return 0.0;
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a_min = semi_axes.iter().copied().fold(f64::INFINITY, f64::min);
    let a_max = semi_axes.iter().copied().fold(0.0, f64::max);
    let mut lambda = (a_min * norm - a_max * a_max).max(0.0);
    for _ in 0..200 {
        let mut f = -1.0;
        let mut df = 0.0;
        for (v, a) in x.iter().zip(semi_axes) {
            let a2 = a * a;
            let q = a2 + lambda;
            let term = a2 * v * v / (q * q);
            f += term;
            df -= 2.0 * term / q;
        }
        if f <= 0.0 || df == 0.0 {
            break;
        }
        let step = f / df;
        lambda -= step;
        if step.abs() <= 1e-15 * lambda.max(1e-300) {
            break;
        }
    }
    x.iter()
        .zip(semi_axes)
        .map(|(v, a)| {
            let q = a * a + lambda;
            (lambda * v / q).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BodyKind::Ball { radius } => write!(f, "ball:d={},r={}", self.dim, radius),
            BodyKind::Ellipsoid { semi_axes } => write!(f, "ellipsoid:{}", join(semi_axes)),
            BodyKind::Cuboid { edge_lengths } => write!(f, "cuboid:{}", join(edge_lengths)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn elementary_symmetric_of_three() {
        let e = elementary_symmetric(&[1.0, 2.0, 3.0]);
        assert_eq!(e, vec![1.0, 6.0, 11.0, 6.0]);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn constructors_validate() {
        assert!(ConvexBody::ball(1, 1.0).is_err());
        assert!(ConvexBody::ball(3, 0.0).is_err());
        assert!(ConvexBody::ellipsoid(vec![1.0]).is_err());
        assert!(ConvexBody::ellipsoid(vec![1.0, 1e-13]).is_err());
        assert!(ConvexBody::cuboid(vec![1.0, f64::NAN]).is_err());
        assert!(ConvexBody::cuboid(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn cuboid_metrics() {
        let c = ConvexBody::cuboid(vec![4.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.inradius(), 0.5);
        assert!((c.diameter() - 18f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.volume(), 4.0);
    }

    #[test]
    fn distances() {
        let b = ConvexBody::ball(3, 1.0).unwrap();
        assert!((b.distance(&[3.0, 0.0, 0.0]) - 2.0).abs() < 1e-15);
        let c = ConvexBody::cuboid(vec![2.0, 2.0]).unwrap();
        assert!((c.distance(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.distance(&[0.5, -0.5]), 0.0);
        // on an axis the nearest point of an ellipsoid is the vertex when the curvature allows
        let e = ConvexBody::ellipsoid(vec![2.0, 1.0, 1.0]).unwrap();
        assert!((e.distance(&[5.0, 0.0, 0.0]) - 3.0).abs() < 1e-12);
        assert!((e.distance(&[0.0, 4.0, 0.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn display_grammar() {
        assert_eq!(ConvexBody::ball(3, 2.0).unwrap().to_string(), "ball:d=3,r=2");
        assert_eq!(ConvexBody::ellipsoid(vec![2.0, 1.0, 1.0]).unwrap().to_string(), "ellipsoid:2,1,1");
        assert_eq!(ConvexBody::cuboid(vec![4.0, 1.5]).unwrap().to_string(), "cuboid:4,1.5");
    }

    proptest! {
        // brute-force check: the Newton foot point is no farther than any sampled boundary point
        #[test]
        fn ellipsoid_distance_is_minimal(a in 0.3f64..3.0, b in 0.3f64..3.0, px in -5.0f64..5.0, py in -5.0f64..5.0) {
            let d = ellipsoid_distance(&[a, b], &[px, py]);
            let brute = (0..20000)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / 20000.0;
                    ((px - a * th.cos()).powi(2) + (py - b * th.sin()).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            let inside = (px / a).powi(2) + (py / b).powi(2) <= 1.0;
            if inside {
                prop_assert_eq!(d, 0.0);
            } else {
                prop_assert!(d <= brute + 1e-9);
                prop_assert!(d >= brute - 1e-3 * (a.max(b)));
            }
        }
    }
}
