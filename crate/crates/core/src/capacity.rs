//! Upper and lower bounds for the p-capacity of convex bodies.
//!
//! Every upper bound here is an explicit test-function estimate: a profile
//! that depends only on the distance to the body, integrated against the
//! Steiner perimeter `P(K_t)`, or a closed-form consequence of it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{binomial, gamma_half_integer, unit_ball_volume, BodyKind, ConvexBody, PreparedBody};
use crate::numerics::{integrate, integrate_semi_infinite, minimize_1d, QuadratureConfig, SearchConfig};

/// Dimension and exponent of the capacity, `1 < p < d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapParams {
    d: usize,
    p: f64,
}

impl CapParams {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("capacity needs d >= 2, got {d}")));
        }
        if !(p > 1.0 && p < d as f64) {
            return Err(Error::InvalidInput(format!("capacity needs 1 < p < d, got p = {p}, d = {d}")));
        }
        Ok(Self { d, p })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn df(&self) -> f64 {
        self.d as f64
    }

    /// `p = d − 1` up to rounding.
    pub fn is_p_d_minus_one(&self) -> bool {
        (self.p - (self.df() - 1.0)).abs() < 1e-12
    }
}

fn check_dim(body: &ConvexBody, cp: &CapParams) -> Result<()> {
    if body.dim() != cp.d {
        return Err(Error::InvalidInput(format!(
            "body dimension {} does not match capacity dimension {}",
            body.dim(),
            cp.d
        )));
    }
    Ok(())
}

/// `cap_p` of the closed ball of radius `radius`.
pub fn cap_ball_exact(cp: &CapParams, radius: f64) -> f64 {
    let (d, p) = (cp.df(), cp.p);
    d * unit_ball_volume(cp.d) * ((d - p) / (p - 1.0)).powf(p - 1.0) * radius.powf(d - p)
}

/// `(∫_0^∞ P(K_t)^{-1/(p-1)} dt)^{1-p}` for a caller-supplied perimeter profile.
///
/// A profile whose integral diverges at `t ↓ 0` (a point, a segment when
/// `p ≤ 2` in `d = 3`, …) has zero capacity; this is detected by tail
/// integrals `∫_s^∞` exceeding `1/abs_tol` as `s` shrinks.
pub fn cap_upper_profile_fn<F>(profile: F, cp: &CapParams, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let expo = -1.0 / (cp.p - 1.0);
    let negative = std::cell::Cell::new(None);
    let integrand = |t: f64| {
        let per = profile(t);
        if per < 0.0 {
            negative.set(Some(t));
            return 0.0;
        }
        per.powf(expo)
    };
    let ceiling = 1.0 / cfg.abs_tol;
    let full = integrate_semi_infinite(integrand, cfg);
    if let Some(t) = negative.get() {
        return Err(Error::InvalidInput(format!("negative perimeter profile at t = {t:e}")));
    }
    match full {
        Ok(v) if v.is_finite() && v <= ceiling => Ok(v.powf(1.0 - cp.p)),
        Ok(_) => Ok(0.0),
        Err(err) => {
            for k in 1..=15 {
                let s = 10f64.powi(-k);
                let tail = integrate_semi_infinite(|t| integrand(t + s), cfg)?;
                if tail > ceiling {
                    return Ok(0.0);
                }
            }
            Err(err)
        }
    }
}

/// Distance-profile bound built from the Steiner perimeter of `K_t`; exact on balls.
pub fn cap_upper_steiner_profile(body: &ConvexBody, cp: &CapParams, cfg: &QuadratureConfig) -> Result<f64> {
    check_dim(body, cp)?;
    steiner_profile_prepared(&PreparedBody::new(body)?, cp, cfg)
}

pub fn steiner_profile_prepared(pb: &PreparedBody, cp: &CapParams, cfg: &QuadratureConfig) -> Result<f64> {
    let d = cp.d;
    let w = pb.steiner.w();
    // P(K_t) = Σ_n c_n t^n with c_n = (n+1) C(d, n+1) W_{n+1}
    let c: Vec<f64> = (0..d).map(|n| (n + 1) as f64 * binomial(d, n + 1) * w[n + 1]).collect();
    let top = c[d - 1];
    let ln_profile = |ln_t: f64| -> f64 {
        if ln_t < 40.0 {
            let t = ln_t.exp();
            c.iter().rev().fold(0.0, |acc, cn| acc * t + cn).ln()
        } else {
            let inv = (-ln_t).exp();
            let rest = c[..d - 1].iter().fold(0.0, |acc, cn| acc * inv + cn / top) * inv;
            top.ln() + (d - 1) as f64 * ln_t + rest.ln_1p()
        }
    };
    // the integrand decays like t^{-κ}; t = w^{-μ} - 1 with μ = 1/(κ-1) makes it bounded at w = 0
    let gamma = 1.0 / (cp.p - 1.0);
    let kappa = (d - 1) as f64 * gamma;
    let mu = 1.0 / (kappa - 1.0);
    let integrand = |wv: f64| {
        let lw = wv.ln();
        let ln_t = (-mu * lw).exp_m1().ln();
        (-gamma * ln_profile(ln_t) + mu.ln() - (mu + 1.0) * lw).exp()
    };
    let v = integrate(integrand, 0.0, 1.0, cfg)?;
    Ok((v.ln() * (1.0 - cp.p)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighbourhoodBound {
    pub bound: f64,
    pub argmin_a: f64,
}

/// `inf_{a>0} |K_a| / a^p`, minimised over `log a`.
pub fn cap_upper_neighbourhood_volume(body: &ConvexBody, cp: &CapParams, cfg: &SearchConfig) -> Result<NeighbourhoodBound> {
    check_dim(body, cp)?;
    neighbourhood_prepared(&PreparedBody::new(body)?, cp, cfg)
}

pub fn neighbourhood_prepared(pb: &PreparedBody, cp: &CapParams, cfg: &SearchConfig) -> Result<NeighbourhoodBound> {
    let s = &pb.steiner;
    // log|K_a| - p log a is convex in log a, so golden section on log a is safe
    let objective = |u: f64| {
        let a = u.exp();
        s.steiner_volume(a).map(|v| v.ln() - cp.p * u).unwrap_or(f64::NAN)
    };
    let lo = pb.metrics.inradius.ln() - 15.0;
    let hi = pb.metrics.diameter.ln() + 15.0;
    let (u, val) = minimize_1d(objective, lo, hi, cfg)?;
    Ok(NeighbourhoodBound { bound: val.exp(), argmin_a: u.exp() })
}

/// Mean-curvature bound `((d−p)/(p−1))^{p−1} M^{p−1} / P^{p−2}`; needs a C² boundary.
pub fn cap_upper_mean_curvature(body: &ConvexBody, cp: &CapParams) -> Result<f64> {
    check_dim(body, cp)?;
    if !body.is_smooth() {
        return Err(smoothness_error());
    }
    mean_curvature_prepared(&PreparedBody::new(body)?, cp)
}

fn smoothness_error() -> Error {
    Error::UnsupportedBody("C² boundary required (mean-curvature bound)".into())
}

pub fn mean_curvature_prepared(pb: &PreparedBody, cp: &CapParams) -> Result<f64> {
    if !pb.body.is_smooth() {
        return Err(smoothness_error());
    }
    let (d, p) = (cp.df(), cp.p);
    let m = pb.metrics.mean_curvature_integral;
    let per = pb.metrics.perimeter;
    Ok((((d - p) / (p - 1.0)).ln() * (p - 1.0) + (p - 1.0) * m.ln() - (p - 2.0) * per.ln()).exp())
}

/// Perimeter–volume bound `((d−p)/(d(p−1)))^{p−1} P^p / |K|^{p−1}`.
pub fn cap_upper_perimeter_measure(body: &ConvexBody, cp: &CapParams) -> Result<f64> {
    check_dim(body, cp)?;
    let per = crate::geometry::steiner_of(body)?.perimeter();
    Ok(perimeter_measure_value(cp, per, body.volume()))
}

pub fn perimeter_measure_value(cp: &CapParams, perimeter: f64, volume: f64) -> f64 {
    let (d, p) = (cp.df(), cp.p);
    ((p - 1.0) * ((d - p) / (d * (p - 1.0))).ln() + p * perimeter.ln() - (p - 1.0) * volume.ln()).exp()
}

/// Logarithmic bound for `p = d − 1`, `d ≥ 3`:
/// `d^{2−d}(d−1)2^{d−2} P^{d−1}/|K|^{d−2} · (log I^{−1})^{2−d}`.
pub fn cap_upper_log_pd1(body: &ConvexBody, d: usize) -> Result<f64> {
    if body.dim() != d {
        return Err(Error::InvalidInput(format!("body dimension {} != {d}", body.dim())));
    }
    log_pd1_prepared(&PreparedBody::new(body)?)
}

pub fn log_pd1_prepared(pb: &PreparedBody) -> Result<f64> {
    let d = pb.dim();
    if d < 3 {
        return Err(Error::HypothesisNotMet(format!("logarithmic bound needs d >= 3, got {d}")));
    }
    let m = &pb.metrics;
    let log_inv_i = -m.isoperimetric_ratio.ln();
    if !(log_inv_i > 1e-12) {
        return Err(Error::Degenerate("logarithmic bound degenerate at the ball".into()));
    }
    let df = d as f64;
    let log_val = (2.0 - df) * df.ln()
        + (df - 1.0).ln()
        + (df - 2.0) * 2f64.ln()
        + (df - 1.0) * m.perimeter.ln()
        - (df - 2.0) * m.volume.ln()
        + (2.0 - df) * log_inv_i.ln();
    Ok(log_val.exp())
}

/// Perimeter lower bound `dω_d (d(d−p)/(p(d−1)))^{p−1} (P/(dω_d))^{(d−p)/(d−1)}`.
pub fn cap_lower_perimeter(body: &ConvexBody, cp: &CapParams) -> Result<f64> {
    check_dim(body, cp)?;
    let per = crate::geometry::steiner_of(body)?.perimeter();
    Ok(lower_perimeter_value(cp, per))
}

pub fn lower_perimeter_value(cp: &CapParams, perimeter: f64) -> f64 {
    let (d, p) = (cp.df(), cp.p);
    let s = d * unit_ball_volume(cp.d);
    s * ((d * (d - p)) / (p * (d - 1.0))).powf(p - 1.0) * (perimeter / s).powf((d - p) / (d - 1.0))
}

/// Newtonian capacity of the ellipsoid with semi-axes `(a, b, c)` in `R^3`
/// (`cap_2(B_R) = 4πR`), from the classical elliptic integral.
pub fn cap2_ellipsoid_oracle(semi_axes: [f64; 3], cfg: &QuadratureConfig) -> Result<f64> {
    if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::InvalidInput(format!("oracle needs positive semi-axes, got {semi_axes:?}")));
    }
    let scale = semi_axes.iter().copied().fold(0.0, f64::max);
    let [a, b, c] = semi_axes.map(|x| (x / scale).powi(2));
    let integral = integrate_semi_infinite(|s| 1.0 / ((a + s) * (b + s) * (c + s)).sqrt(), cfg)?;
    Ok(8.0 * PI * scale / integral)
}

/// Leading-order 2-capacity of the needle ellipsoid with semi-axes `(1, ε, …, ε)`.
pub fn cap2_thin_ellipsoid_asymptotic(d: usize, eps: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("needle asymptotics need d >= 3, got {d}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("needle asymptotics need 0 < ε < 1, got {eps}")));
    }
    if d == 3 {
        return Ok(4.0 * PI / (1.0 / eps).ln());
    }
    let df = d as f64;
    Ok(2.0 * PI.powf(df / 2.0) * (df - 3.0) / gamma_half_integer(d) * eps.powf(df - 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperMethod {
    SteinerProfile,
    NeighbourhoodVolume,
    MeanCurvature,
    PerimeterMeasure,
    LogPd1,
}

impl UpperMethod {
    pub const ALL: [UpperMethod; 5] = [
        UpperMethod::SteinerProfile,
        UpperMethod::NeighbourhoodVolume,
        UpperMethod::MeanCurvature,
        UpperMethod::PerimeterMeasure,
        UpperMethod::LogPd1,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            UpperMethod::SteinerProfile => "steiner_profile",
            UpperMethod::NeighbourhoodVolume => "neighbourhood_volume",
            UpperMethod::MeanCurvature => "mean_curvature",
            UpperMethod::PerimeterMeasure => "perimeter_measure",
            UpperMethod::LogPd1 => "log_pd1",
        }
    }
}

/// All applicable capacity bounds for one body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapBoundReport {
    pub d: usize,
    pub p: f64,
    pub lower: f64,
    pub uppers: BTreeMap<UpperMethod, f64>,
    /// Methods that did not apply, with the reason.
    pub absent: BTreeMap<UpperMethod, String>,
    pub oracle: Option<f64>,
    /// Breaches of `lower ≤ oracle ≤ upper` beyond the 1e-9 relative tolerance.
    pub violations: Vec<String>,
}

/// Relative tolerance of the report ordering checks.
pub const REPORT_RTOL: f64 = 1e-9;

impl CapBoundReport {
    /// Smallest upper bound and the method that produced it.
    pub fn min_upper(&self) -> Option<(UpperMethod, f64)> {
        self.uppers
            .iter()
            .map(|(m, v)| (*m, *v))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Evaluates every applicable bound. Per-method failures become `absent`
/// entries; only a failure to prepare the body itself is an error.
pub fn cap_report(body: &ConvexBody, cp: &CapParams) -> Result<CapBoundReport> {
    check_dim(body, cp)?;
    let pb = PreparedBody::new(body)?;
    Ok(cap_report_prepared(&pb, cp, &QuadratureConfig::default(), &SearchConfig::default()))
}

pub fn cap_report_prepared(pb: &PreparedBody, cp: &CapParams, qcfg: &QuadratureConfig, scfg: &SearchConfig) -> CapBoundReport {
    let m = &pb.metrics;
    let mut uppers = BTreeMap::new();
    let mut absent = BTreeMap::new();
    let mut record = |method: UpperMethod, value: Result<f64>| match value {
        Ok(v) => {
            uppers.insert(method, v);
        }
        Err(e) => {
            absent.insert(method, e.to_string());
        }
    };
    record(UpperMethod::SteinerProfile, steiner_profile_prepared(pb, cp, qcfg));
    record(UpperMethod::NeighbourhoodVolume, neighbourhood_prepared(pb, cp, scfg).map(|b| b.bound));
    record(UpperMethod::MeanCurvature, mean_curvature_prepared(pb, cp));
    record(UpperMethod::PerimeterMeasure, Ok(perimeter_measure_value(cp, m.perimeter, m.volume)));
    if cp.is_p_d_minus_one() {
        record(UpperMethod::LogPd1, log_pd1_prepared(pb));
    } else {
        absent.insert(UpperMethod::LogPd1, format!("requires p = d - 1 (p = {}, d = {})", cp.p, cp.d));
    }
    let lower = lower_perimeter_value(cp, m.perimeter);

    let oracle = if cp.d == 3 && (cp.p - 2.0).abs() < 1e-15 {
        match pb.body.kind() {
            BodyKind::Ball { radius } => cap2_ellipsoid_oracle([*radius; 3], qcfg).ok(),
            BodyKind::Ellipsoid { semi_axes } => {
                cap2_ellipsoid_oracle([semi_axes[0], semi_axes[1], semi_axes[2]], qcfg).ok()
            }
            BodyKind::Cuboid { .. } => None,
        }
    } else {
        None
    };

    let mut violations = Vec::new();
    let below = |a: f64, b: f64| a <= b * (1.0 + REPORT_RTOL);
    for (method, v) in &uppers {
        if !below(lower, *v) {
            violations.push(format!("lower {lower} exceeds {} {v}", method.tag()));
        }
        if let Some(o) = oracle {
            if !below(o, *v) {
                violations.push(format!("oracle {o} exceeds {} {v}", method.tag()));
            }
        }
    }
    if let Some(o) = oracle {
        if !below(lower, o) {
            violations.push(format!("lower {lower} exceeds oracle {o}"));
        }
    }

    CapBoundReport { d: cp.d, p: cp.p, lower, uppers, absent, oracle, violations }
}

/// One row of the prolate/oblate comparison between the perimeter–volume bound
/// and the bound from the enclosing ball of radius `diam`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub shape_param: f64,
    pub perimeter_measure: f64,
    pub enclosing_ball: f64,
    pub mean_curvature: f64,
    pub oracle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpheroidFamily {
    /// semi-axes `(L, 1, 1)`
    Prolate,
    /// semi-axes `(1, 1, ε)`
    Oblate,
}

/// Tabulates the competing upper bounds along a spheroid family in `d = 3`.
pub fn bound_comparison_table(family: SpheroidFamily, params: &[f64], p: f64) -> Result<Vec<ComparisonRow>> {
    let cp = CapParams::new(3, p)?;
    let qcfg = QuadratureConfig::default();
    params
        .iter()
        .map(|&s| {
            let axes = match family {
                SpheroidFamily::Prolate => [s, 1.0, 1.0],
                SpheroidFamily::Oblate => [1.0, 1.0, s],
            };
            let body = ConvexBody::ellipsoid(axes.to_vec())?;
            let pb = PreparedBody::new(&body)?;
            Ok(ComparisonRow {
                shape_param: s,
                perimeter_measure: perimeter_measure_value(&cp, pb.metrics.perimeter, pb.metrics.volume),
                enclosing_ball: cap_ball_exact(&cp, pb.metrics.diameter),
                mean_curvature: mean_curvature_prepared(&pb, &cp)?,
                oracle: if (p - 2.0).abs() < 1e-15 { Some(cap2_ellipsoid_oracle(axes, &qcfg)?) } else { None },
            })
        })
        .collect()
}
