use serde::{Deserialize, Serialize};

use super::body::{unit_ball_volume, ConvexBody};
use super::steiner::{steiner_of, SteinerPolynomial};
use crate::error::Result;

/// Metric data of a convex body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyMetrics {
    pub dim: usize,
    pub volume: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub diameter: f64,
    pub isoperimetric_ratio: f64,
    pub mean_curvature_integral: f64,
}

impl BodyMetrics {
    pub fn from_parts(body: &ConvexBody, steiner: &SteinerPolynomial) -> Self {
        let d = body.dim();
        let volume = steiner.volume();
        let perimeter = steiner.perimeter();
        Self {
            dim: d,
            volume,
            perimeter,
            inradius: body.inradius(),
            diameter: body.diameter(),
            isoperimetric_ratio: isoperimetric_ratio(d, volume, perimeter),
            mean_curvature_integral: steiner.mean_curvature_integral(),
        }
    }
}

/// `I = ω_d d^d |K|^{d-1} / P^d`, evaluated in log space.
pub fn isoperimetric_ratio(d: usize, volume: f64, perimeter: f64) -> f64 {
    let df = d as f64;
    (unit_ball_volume(d).ln() + df * df.ln() + (df - 1.0) * volume.ln() - df * perimeter.ln()).exp()
}

pub fn metrics_of(body: &ConvexBody) -> Result<BodyMetrics> {
    let s = steiner_of(body)?;
    Ok(BodyMetrics::from_parts(body, &s))
}

/// One inequality between metric quantities, stored as `rhs/lhs − 1` (≥ 0 when it holds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalitySlack {
    pub name: &'static str,
    pub slack: f64,
}

/// Slacks of the inradius/perimeter, John-ellipsoid and isodiametric
/// inequalities that every convex body satisfies.
pub fn metric_inequality_slacks(m: &BodyMetrics) -> Vec<InequalitySlack> {
    let d = m.dim as f64;
    let omega = unit_ball_volume(m.dim);
    let p_over_v = m.perimeter / m.volume;
    let ratio = 2.0 * m.inradius / m.diameter;
    let shape = m.volume.powf((d - 1.0) / d) / m.perimeter;
    let le = |name, lhs: f64, rhs: f64| InequalitySlack { name, slack: rhs / lhs - 1.0 };
    vec![
        le("inradius_lower", 1.0 / m.inradius, p_over_v),
        le("inradius_upper", p_over_v, d / m.inradius),
        le("inball_in_diameter", 2.0 * m.inradius, m.diameter),
        le("isoperimetric", m.isoperimetric_ratio, 1.0),
        le(
            "shape_upper_by_ratio",
            shape,
            d.powf((d - 1.0) / d) / omega.powf(1.0 / d) * ratio.powf(1.0 / d),
        ),
        le("shape_lower_by_ratio", ratio / (d * omega.powf(1.0 / d)), shape),
        le(
            "diameter_by_perimeter",
            m.diameter,
            2.0 * d.powf(d - 1.0) / omega * m.perimeter.powf(d - 1.0) / m.volume.powf(d - 2.0),
        ),
        le("isodiametric", m.volume, omega * (m.diameter / 2.0).powf(d)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_metrics() {
        let m = metrics_of(&ConvexBody::unit_ball(3).unwrap()).unwrap();
        assert!((m.volume - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((m.perimeter - 4.0 * PI).abs() < 1e-14);
        assert_eq!(m.inradius, 1.0);
        assert_eq!(m.diameter, 2.0);
        assert!((m.isoperimetric_ratio - 1.0).abs() < 1e-12);
        assert!((m.mean_curvature_integral - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn cube_and_box_metrics() {
        let m = metrics_of(&ConvexBody::cuboid(vec![1.0; 3]).unwrap()).unwrap();
        assert!((m.isoperimetric_ratio - PI / 6.0).abs() < 1e-14);
        let m = metrics_of(&ConvexBody::cuboid(vec![4.0, 1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(m.inradius, 0.5);
        assert!((m.diameter - 18f64.sqrt()).abs() < 1e-14);
        assert!((m.perimeter - 18.0).abs() < 1e-13);
        assert!((m.volume - 4.0).abs() < 1e-14);
    }

    #[test]
    fn inequalities_hold_and_are_tight_where_expected() {
        let ball = metrics_of(&ConvexBody::ball(4, 2.0).unwrap()).unwrap();
        let slacks = metric_inequality_slacks(&ball);
        assert!(slacks.iter().all(|s| s.slack >= -1e-12), "{slacks:?}");
        let upper = slacks.iter().find(|s| s.name == "inradius_upper").unwrap();
        assert!(upper.slack.abs() < 1e-12);
        let cube = metrics_of(&ConvexBody::cuboid(vec![1.0, 3.0, 0.2]).unwrap()).unwrap();
        assert!(metric_inequality_slacks(&cube).iter().all(|s| s.slack >= 0.0));
    }
}
