//! Body families along which `G` degenerates or blows up, and shape searches
//! over ellipsoids and boxes.
//!
//! Sweep rows are bound proxies (closed-form chains of the capacity and
//! torsion estimates), never true values of `G`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{self, cap_ball_exact};
use crate::error::{Error, Result};
use crate::functional::{self, g_ball_exact, GParams};
use crate::geometry::{unit_ball_volume, ConvexBody, PreparedBody};
use crate::numerics::{fit_loglog_slope, minimize_nelder_mead, QuadratureConfig, SearchConfig, SlopeFit};
use crate::torsion::{self, torsion_ball_exact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ThinEc,
    ElongatedEa,
    DisconnectedOmega,
    EllipsoidAspect,
    CuboidAspect,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::ThinEc,
        Family::ElongatedEa,
        Family::DisconnectedOmega,
        Family::EllipsoidAspect,
        Family::CuboidAspect,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::ThinEc => "thin_Ec",
            Family::ElongatedEa => "elongated_Ea",
            Family::DisconnectedOmega => "disconnected_Omega",
            Family::EllipsoidAspect => "ellipsoid_aspect",
            Family::CuboidAspect => "cuboid_aspect",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowLabel {
    Proxy,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub g_lo: Option<f64>,
    pub g_hi: Option<f64>,
    pub label: RowLabel,
    pub aux: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySweep {
    pub family: Family,
    pub eps_grid: Vec<f64>,
    pub params: GParams,
    pub rows: Vec<SweepRow>,
}

/// `{10^{-1}, 10^{-1.5}, …, 10^{-4}}`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect()
}

pub fn validate_eps_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput("ε grid needs at least two points".into()));
    }
    if grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::InvalidInput(format!("ε grid entries must lie in (0, 1): {grid:?}")));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(format!("ε grid must be strictly decreasing: {grid:?}")));
    }
    Ok(())
}

/// `ln P` of the box `Π[−a_i, a_i]` given `ln a_i`.
fn ln_box_perimeter(ln_half: &[f64]) -> f64 {
    let d = ln_half.len();
    let total: f64 = ln_half.iter().sum();
    let terms: Vec<f64> = ln_half.iter().map(|l| total - l + (d as f64) * 2f64.ln()).collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn slope_of(rows: &[SweepRow], value: impl Fn(&SweepRow) -> f64) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, value(r))).collect();
    fit_loglog_slope(&pts)
}

/// Decay exponent of the thin family: `q'r − (d−p)/(d−1) + β`.
pub fn thin_exponent(gp: &GParams) -> f64 {
    let d = gp.d() as f64;
    gp.qr() - (d - gp.p()) / (d - 1.0) + gp.beta()
}

/// Thin ellipsoids with `d−1` semi-axes `ε^{−1/(d−1)}` and one semi-axis `ε`
/// (volume `ω_d`, inradius `ε`). `g_hi` is the closed-form upper proxy; the
/// fitted slope is over `g_hi`.
pub fn sweep_thin_ellipsoid(gp: &GParams, eps_grid: &[f64]) -> Result<(FamilySweep, SlopeFit)> {
    validate_eps_grid(eps_grid)?;
    let d = gp.d();
    let df = d as f64;
    let w = unit_ball_volume(d);
    let cp = gp.cap();
    let tp = gp.torsion();
    let (c1, c2) = torsion::constants_c1_c2(d, &tp);
    let rows: Vec<SweepRow> = eps_grid
        .par_iter()
        .map(|&eps| {
            let le = eps.ln();
            let ln_big = -le / (df - 1.0);
            let ln_hi = c2.ln()
                + (gp.r() - gp.alpha() - gp.beta()) * w.ln()
                + cap_ball_exact(&cp, 1.0).ln()
                + (df - cp.p()) * ln_big
                + (gp.qr() + gp.beta()) * le;

            let mut ln_half = vec![ln_big; d - 1];
            ln_half.push(le);
            let ln_p_hi = ln_box_perimeter(&ln_half);
            let ln_p_lo = w.ln() - le;
            let ln_cap_lo = capacity::lower_perimeter_value(&cp, 1.0).ln() + (df - cp.p()) / (df - 1.0) * ln_p_lo;
            let t = torsion::inradius_interval_from(d, w, eps, &tp);
            let ln_t_pow = gp.r() * if gp.r() >= 0.0 { t.lo } else { t.hi }.ln();
            let ln_lo = ln_cap_lo + ln_t_pow - gp.alpha() * w.ln() - gp.beta() * ln_p_hi;

            let mut aux = BTreeMap::new();
            aux.insert("c1".into(), c1);
            aux.insert("ln_g_hi".into(), ln_hi);
            aux.insert("perimeter_upper".into(), ln_p_hi.exp());
            SweepRow { eps, g_lo: Some(ln_lo.exp()), g_hi: Some(ln_hi.exp()), label: RowLabel::Proxy, aux }
        })
        .collect();
    let fit = slope_of(&rows, |r| r.aux["ln_g_hi"].exp())?;
    Ok((FamilySweep { family: Family::ThinEc, eps_grid: eps_grid.to_vec(), params: *gp, rows }, fit))
}

/// Growth exponent of the elongated family: `(q'r + β − 2)/d`.
pub fn elongated_exponent(gp: &GParams) -> f64 {
    (gp.qr() + gp.beta() - 2.0) / gp.d() as f64
}

/// Elongated ellipsoids `(1, ε, …, ε)` at `p = 2`: lower proxy from the needle
/// capacity asymptotics and the inradius torsion bound. For `d = 3` the slope
/// is fitted after multiplying by `log(1/ε)`.
pub fn sweep_elongated_ellipsoid(gp: &GParams, eps_grid: &[f64]) -> Result<(FamilySweep, SlopeFit)> {
    validate_eps_grid(eps_grid)?;
    let d = gp.d();
    if d < 3 || (gp.p() - 2.0).abs() > 1e-15 {
        return Err(Error::InvalidInput(format!(
            "elongated family needs d >= 3 and p = 2 (d = {d}, p = {})",
            gp.p()
        )));
    }
    let df = d as f64;
    let w = unit_ball_volume(d);
    let tp = gp.torsion();
    let cp = gp.cap();
    let rows: Vec<SweepRow> = eps_grid
        .par_iter()
        .map(|&eps| -> Result<SweepRow> {
            let le = eps.ln();
            let cap = capacity::cap2_thin_ellipsoid_asymptotic(d, eps)?;
            let ln_vol = w.ln() + (df - 1.0) * le;
            let mut ln_half = vec![le; d];
            ln_half[0] = 0.0;
            let ln_p_box = ln_box_perimeter(&ln_half);
            let t = torsion::inradius_interval_from(d, ln_vol.exp(), eps, &tp);
            let ln_t_pow = gp.r() * if gp.r() >= 0.0 { t.lo } else { t.hi }.ln();
            let ln_lo = cap.ln() + ln_t_pow - gp.alpha() * ln_vol - gp.beta() * ln_p_box;
            let log_correction = if d == 3 { (1.0 / eps).ln() } else { 1.0 };

            let mut aux = BTreeMap::new();
            aux.insert("cap_asymptotic".into(), cap);
            aux.insert("log_correction".into(), log_correction);
            aux.insert("corrected".into(), (ln_lo + log_correction.ln()).exp());
            // volume over inradius is a lower bound for the perimeter
            aux.insert(
                "cap_lower_perimeter".into(),
                capacity::lower_perimeter_value(&cp, (ln_vol - le).exp()),
            );
            aux.insert("conjectured_rate".into(), eps.powf(df - cp.p() - 1.0));
            Ok(SweepRow { eps, g_lo: Some(ln_lo.exp()), g_hi: None, label: RowLabel::Proxy, aux })
        })
        .collect::<Result<_>>()?;
    let fit = slope_of(&rows, |r| r.aux["corrected"])?;
    Ok((FamilySweep { family: Family::ElongatedEa, eps_grid: eps_grid.to_vec(), params: *gp, rows }, fit))
}

/// Semi-axes and centre of the ellipsoid paired with the unit ball in the
/// disconnected family.
pub fn disconnected_component(d: usize, eps: f64) -> (Vec<f64>, Vec<f64>) {
    let mut axes = vec![1.0 / eps; d];
    axes[d - 1] = eps.powi(d as i32);
    (axes, vec![eps.powi(-3); d])
}

/// Unit ball together with a far-away flat ellipsoid of volume `ω_d ε`.
/// The lower proxy diverges as `ε ↓ 0` when `d − p > β(d−1)`.
pub fn sweep_disconnected(gp: &GParams, eps_grid: &[f64]) -> Result<FamilySweep> {
    validate_eps_grid(eps_grid)?;
    let d = gp.d();
    let df = d as f64;
    if !(df - gp.p() > gp.beta() * (df - 1.0)) {
        return Err(Error::HypothesisNotMet(format!(
            "disconnected family needs d − p > β(d−1) (d = {d}, p = {}, β = {})",
            gp.p(),
            gp.beta()
        )));
    }
    if eps_grid[0] >= 0.5 {
        return Err(Error::InvalidInput("disconnected family needs ε < 1/2".into()));
    }
    let w = unit_ball_volume(d);
    let s = df * w;
    let cp = gp.cap();
    let tp = gp.torsion();
    let vol_hi = 1.5 * w;
    // torsion is monotone under inclusion; for r < 0 use the Saint-Venant bound at the volume cap
    let ln_t_pow = if gp.r() >= 0.0 {
        gp.r() * torsion_ball_exact(d, &tp, 1.0).ln()
    } else {
        gp.r() * torsion::saint_venant_from(d, vol_hi, &tp).ln()
    };
    let rows: Vec<SweepRow> = eps_grid
        .par_iter()
        .map(|&eps| -> Result<SweepRow> {
            let (axes, centre) = disconnected_component(d, eps);
            let gap = centre
                .iter()
                .zip(&axes)
                .map(|(c, a)| (c - a).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt()
                - 1.0;
            if !(gap > 0.0) {
                return Err(Error::InvariantViolated(format!("ball and ellipsoid overlap at ε = {eps}")));
            }
            let ln_pb = w.ln() + (1.0 - df) * eps.ln();
            let ln_cap = capacity::lower_perimeter_value(&cp, 1.0).ln() + (df - cp.p()) / (df - 1.0) * ln_pb;
            let ln_ptot = s.ln() + (ln_pb - s.ln()).exp().ln_1p();
            let ln_lo = ln_cap + ln_t_pow - gp.alpha() * vol_hi.ln() - gp.beta() * ln_ptot;
            let mut aux = BTreeMap::new();
            aux.insert("perimeter_lower".into(), ln_pb.exp());
            aux.insert("separation".into(), gap);
            aux.insert("volume".into(), w * (1.0 + eps));
            Ok(SweepRow { eps, g_lo: Some(ln_lo.exp()), g_hi: None, label: RowLabel::Proxy, aux })
        })
        .collect::<Result<_>>()?;
    if rows.windows(2).any(|w| !(w[1].g_lo > w[0].g_lo)) {
        return Err(Error::InvariantViolated("disconnected proxy is not increasing as ε decreases".into()));
    }
    Ok(FamilySweep { family: Family::DisconnectedOmega, eps_grid: eps_grid.to_vec(), params: *gp, rows })
}

/// Bodies `(1, …, 1, ε)` from the ellipsoid or box family, with the certified
/// interval per row (and the oracle interval where available).
pub fn sweep_aspect(gp: &GParams, family: Family, eps_grid: &[f64]) -> Result<FamilySweep> {
    validate_eps_grid(eps_grid)?;
    let d = gp.d();
    let qcfg = QuadratureConfig::default();
    let scfg = SearchConfig::default();
    let rows: Vec<SweepRow> = eps_grid
        .par_iter()
        .map(|&eps| -> Result<SweepRow> {
            let mut axes = vec![1.0; d];
            axes[d - 1] = eps;
            let body = aspect_body(family, axes)?;
            let pb = PreparedBody::new(&body)?;
            let gi = functional::g_interval_prepared(&pb, gp, &qcfg, &scfg)?;
            let mut aux = BTreeMap::new();
            aux.insert("ratio".into(), aspect_ratio(&pb));
            aux.insert("isoperimetric_ratio".into(), pb.metrics.isoperimetric_ratio);
            let label = if let Some(o) = gi.oracle {
                aux.insert("oracle_lo".into(), o.lo);
                aux.insert("oracle_hi".into(), o.hi);
                aux.insert("oracle_capacity".into(), o.capacity);
                RowLabel::Oracle
            } else {
                RowLabel::Proxy
            };
            Ok(SweepRow { eps, g_lo: Some(gi.lo), g_hi: Some(gi.hi), label, aux })
        })
        .collect::<Result<_>>()?;
    Ok(FamilySweep { family, eps_grid: eps_grid.to_vec(), params: *gp, rows })
}

fn aspect_body(family: Family, axes: Vec<f64>) -> Result<ConvexBody> {
    match family {
        Family::EllipsoidAspect => ConvexBody::ellipsoid(axes),
        Family::CuboidAspect => ConvexBody::cuboid(axes),
        other => Err(Error::InvalidInput(format!(
            "shape family must be ellipsoid_aspect or cuboid_aspect, got {}",
            other.tag()
        ))),
    }
}

/// `2ρ/diam`.
pub fn aspect_ratio(pb: &PreparedBody) -> f64 {
    2.0 * pb.metrics.inradius / pb.metrics.diameter
}

/// Largest allowed `|log semi-axis|` before the penalty applies.
pub const SEARCH_BOX: f64 = 8.0;
/// Results with some `|log semi-axis|` at least this large are flagged as drifting to the boundary.
pub const DRIFT_THRESHOLD: f64 = 6.0;
const PENALTY: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// The best value does not beat the ball, so no ratio bound is asserted.
    BallConsistent,
    RatioSatisfied,
    RatioViolated,
    /// The value beats the ball but no ratio bound applies to these parameters.
    NoRatioBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSearchResult {
    pub body: ConvexBody,
    pub value: f64,
    pub ball_value: f64,
    pub ratio: f64,
    pub ratio_bound: Option<f64>,
    pub status: SearchStatus,
    pub converged: bool,
    pub boundary_drift: bool,
    pub iterations: usize,
}

fn body_from_logs(family: Family, d: usize, x: &[f64]) -> Result<ConvexBody> {
    let mut axes = vec![1.0];
    axes.extend(x.iter().map(|v| v.exp()));
    debug_assert_eq!(axes.len(), d);
    aspect_body(family, axes)
}

fn search_start(d: usize) -> Vec<f64> {
    (1..d).map(|i| if i % 2 == 1 { 0.4 } else { -0.3 }).collect()
}

fn run_search<F>(gp: &GParams, family: Family, cfg: &SearchConfig, objective: F) -> Result<(ConvexBody, PreparedBody, bool, bool, usize)>
where
    F: Fn(&PreparedBody) -> Result<f64> + Sync,
{
    let d = gp.d();
    aspect_body(family, vec![1.0; d])?;
    let f = |x: &[f64]| {
        let excess: f64 = x.iter().map(|v| (v.abs() - SEARCH_BOX).max(0.0)).sum();
        if excess > 0.0 {
            return PENALTY * (1.0 + excess);
        }
        let v = body_from_logs(family, d, x).and_then(|b| PreparedBody::new(&b)).and_then(|pb| objective(&pb));
        match v {
            Ok(v) if v.is_finite() => v,
            _ => PENALTY,
        }
    };
    let res = minimize_nelder_mead(f, &search_start(d), cfg)?;
    let body = body_from_logs(family, d, &res.argmin)?;
    let pb = PreparedBody::new(&body)?;
    let drift = res.argmin.iter().any(|v| v.abs() >= DRIFT_THRESHOLD);
    Ok((body, pb, res.converged, drift, res.iterations))
}

/// Maximises the certified lower bound `G_lo` over the shape family.
pub fn shape_search_max(gp: &GParams, family: Family, cfg: &SearchConfig) -> Result<ShapeSearchResult> {
    let qcfg = QuadratureConfig::default();
    let lo = |pb: &PreparedBody| functional::g_interval_prepared(pb, gp, &qcfg, cfg).map(|g| g.lo);
    let (body, pb, converged, drift, iterations) = run_search(gp, family, cfg, |pb| lo(pb).map(|v| -v.ln()))?;
    let value = lo(&pb)?;
    let ball_value = g_ball_exact(gp);
    let ratio = aspect_ratio(&pb);
    let mut ratio_bound = functional::maximiser_ratio_lower(gp).ok();
    if let Ok(v) = functional::maximiser_ratio_lower_pd1(gp) {
        ratio_bound = Some(ratio_bound.map_or(v, |b| b.max(v)));
    }
    let status = if value <= ball_value {
        SearchStatus::BallConsistent
    } else {
        match ratio_bound {
            Some(b) if ratio >= b => SearchStatus::RatioSatisfied,
            Some(_) => SearchStatus::RatioViolated,
            None => SearchStatus::NoRatioBound,
        }
    };
    Ok(ShapeSearchResult { body, value, ball_value, ratio, ratio_bound, status, converged, boundary_drift: drift, iterations })
}

/// Minimises the certified upper bound `G_hi` over the shape family.
pub fn shape_search_min(gp: &GParams, family: Family, cfg: &SearchConfig) -> Result<ShapeSearchResult> {
    let qcfg = QuadratureConfig::default();
    let hi = |pb: &PreparedBody| functional::g_interval_prepared(pb, gp, &qcfg, cfg).map(|g| g.hi);
    let (body, pb, converged, drift, iterations) = run_search(gp, family, cfg, |pb| hi(pb).map(|v| v.ln()))?;
    let value = hi(&pb)?;
    let ball_value = g_ball_exact(gp);
    let ratio = aspect_ratio(&pb);
    let ratio_bound = functional::minimiser_ratio_lower(gp).ok();
    let status = if value >= ball_value {
        SearchStatus::BallConsistent
    } else {
        match ratio_bound {
            Some(b) if ratio >= b => SearchStatus::RatioSatisfied,
            Some(_) => SearchStatus::RatioViolated,
            None => SearchStatus::NoRatioBound,
        }
    };
    Ok(ShapeSearchResult { body, value, ball_value, ratio, ratio_bound, status, converged, boundary_drift: drift, iterations })
}

/// Semi-axis ratio `min/max` of an ellipsoid or box, 1 for balls.
pub fn axis_ratio(body: &ConvexBody) -> f64 {
    use crate::geometry::BodyKind;
    let axes: &[f64] = match body.kind() {
        BodyKind::Ball { .. } => return 1.0,
        BodyKind::Ellipsoid { semi_axes } => semi_axes,
        BodyKind::Cuboid { edge_lengths } => edge_lengths,
    };
    let lo = axes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = axes.iter().copied().fold(0.0, f64::max);
    lo / hi
}
