//! The scale-invariant functional `G = cap_p(Ω̄) T_q(Ω)^r / (|Ω|^α P(Ω)^β)`,
//! its closed form on balls, certified enclosures, and the right-hand sides of
//! the extremal bounds.

use serde::{Deserialize, Serialize};

use crate::capacity::{self, CapParams};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, BodyKind, ConvexBody, PreparedBody};
use crate::numerics::{QuadratureConfig, SearchConfig};
use crate::torsion::{self, TorsionParams};

/// Tolerance on `dα + (d−1)β = d − p + (d+q')r`.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GParams {
    d: usize,
    p: f64,
    q: f64,
    q_prime: f64,
    r: f64,
    alpha: f64,
    beta: f64,
}

fn rhs_of_constraint(d: usize, p: f64, q_prime: f64, r: f64) -> f64 {
    let df = d as f64;
    df - p + (df + q_prime) * r
}

/// Builds parameters from `β`, deriving `α`.
pub fn make_params(d: usize, p: f64, q: f64, r: f64, beta: f64) -> Result<GParams> {
    let cp = CapParams::new(d, p)?;
    let tp = TorsionParams::new(q, r)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("β must be finite and >= 0, got {beta}")));
    }
    let df = d as f64;
    let alpha = (rhs_of_constraint(d, p, tp.q_prime, r) - (df - 1.0) * beta) / df;
    if alpha < -CONSTRAINT_TOL {
        return Err(Error::InvalidInput(format!(
            "constraint dα + (d−1)β = d − p + (d+q')r gives negative α = {alpha}"
        )));
    }
    Ok(GParams { d: cp.d(), p, q, q_prime: tp.q_prime, r, alpha: alpha.max(0.0), beta })
}

/// Like [`make_params`] but accepts a negative `α`.
///
/// The ball-minimality statement for `r < 0` only uses scale invariance, so it
/// can be exercised at parameters such as `(d, p, q, r) = (3, 2, 2, −0.5)`
/// where the constraint forces `α < 0`.
pub fn make_params_signed_alpha(d: usize, p: f64, q: f64, r: f64, beta: f64) -> Result<GParams> {
    let cp = CapParams::new(d, p)?;
    let tp = TorsionParams::new(q, r)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!("β must be finite and >= 0, got {beta}")));
    }
    let df = d as f64;
    let alpha = (rhs_of_constraint(d, p, tp.q_prime, r) - (df - 1.0) * beta) / df;
    Ok(GParams { d: cp.d(), p, q, q_prime: tp.q_prime, r, alpha, beta })
}

/// Builds parameters from `α`, deriving `β`.
pub fn make_params_from_alpha(d: usize, p: f64, q: f64, r: f64, alpha: f64) -> Result<GParams> {
    CapParams::new(d, p)?;
    let tp = TorsionParams::new(q, r)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("α must be finite and >= 0, got {alpha}")));
    }
    let df = d as f64;
    let beta = (rhs_of_constraint(d, p, tp.q_prime, r) - df * alpha) / (df - 1.0);
    if beta < -CONSTRAINT_TOL {
        return Err(Error::InvalidInput(format!(
            "constraint dα + (d−1)β = d − p + (d+q')r gives negative β = {beta}"
        )));
    }
    make_params(d, p, q, r, beta.max(0.0))
}

/// Builds parameters when both `α` and `β` are supplied, checking the constraint.
pub fn make_params_checked(d: usize, p: f64, q: f64, r: f64, alpha: f64, beta: f64) -> Result<GParams> {
    let gp = make_params(d, p, q, r, beta)?;
    if (gp.alpha - alpha).abs() > CONSTRAINT_TOL * gp.alpha.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "α = {alpha} and β = {beta} violate dα + (d−1)β = d − p + (d+q')r (expected α = {})",
            gp.alpha
        )));
    }
    Ok(gp)
}

impl GParams {
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn q_prime(&self) -> f64 {
        self.q_prime
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cap(&self) -> CapParams {
        CapParams::new(self.d, self.p).expect("validated at construction")
    }

    pub fn torsion(&self) -> TorsionParams {
        TorsionParams::new(self.q, self.r).expect("validated at construction")
    }

    /// `α` when the perimeter term is absent.
    pub fn alpha_star(&self) -> f64 {
        rhs_of_constraint(self.d, self.p, self.q_prime, self.r) / self.d as f64
    }

    pub fn is_alpha_star(&self) -> bool {
        self.beta.abs() < CONSTRAINT_TOL
    }

    fn df(&self) -> f64 {
        self.d as f64
    }

    /// `q'r`.
    pub fn qr(&self) -> f64 {
        self.q_prime * self.r
    }
}

/// Exponents and thresholds that appear in the extremal bounds, one function each.
pub mod exponents {
    use super::GParams;

    /// Exponent of `d` in the first supremum branch: `(2 − 1/d)(q'r + β − p) − r`.
    pub fn sup_branch1_d(gp: &GParams) -> f64 {
        let d = gp.df();
        (2.0 - 1.0 / d) * (gp.qr() + gp.beta - gp.p) - gp.r
    }

    /// Exponent of `d` in the second supremum branch:
    /// `2q'r + 2β + d − p − r − (q'r + β + d − p)/d`.
    pub fn sup_branch2_d(gp: &GParams) -> f64 {
        let d = gp.df();
        2.0 * gp.qr() + 2.0 * gp.beta + d - gp.p - gp.r - (gp.qr() + gp.beta + d - gp.p) / d
    }

    /// Threshold of the first supremum branch: `p − β`.
    pub fn sup_branch1_threshold(gp: &GParams) -> f64 {
        gp.p - gp.beta
    }

    /// Threshold of the second supremum branch: `(d−1)(d−p) − β`.
    pub fn sup_branch2_threshold(gp: &GParams) -> f64 {
        let d = gp.df();
        (d - 1.0) * (d - gp.p) - gp.beta
    }

    /// `q'r + β − p`.
    pub fn maximiser_branch1_gap(gp: &GParams) -> f64 {
        gp.qr() + gp.beta - gp.p
    }

    /// `q'r + β − (d−p)(d−1)`.
    pub fn maximiser_branch2_gap(gp: &GParams) -> f64 {
        let d = gp.df();
        gp.qr() + gp.beta - (d - gp.p) * (d - 1.0)
    }

    /// Threshold of the infimum bound: `(d−p)/(d−1) − β`.
    pub fn inf_threshold(gp: &GParams) -> f64 {
        let d = gp.df();
        (d - gp.p) / (d - 1.0) - gp.beta
    }

    /// Exponent of `d` in the infimum bound:
    /// `d(p−1)/(d−1) + p/d + (2 − 1/d)(q'r + β) − r − 2`.
    pub fn inf_d(gp: &GParams) -> f64 {
        let d = gp.df();
        d * (gp.p - 1.0) / (d - 1.0) + gp.p / d + (2.0 - 1.0 / d) * (gp.qr() + gp.beta) - gp.r - 2.0
    }

    /// Power of `2ρ/diam` in the minimiser bound: `(d − p − (d−1)(q'r+β))/(d(d−1))`.
    pub fn minimiser_ratio_power(gp: &GParams) -> f64 {
        let d = gp.df();
        (d - gp.p - (d - 1.0) * (gp.qr() + gp.beta)) / (d * (d - 1.0))
    }

    /// Exponent of `ω_d` in the ball value: `(p − q'r − β)/d`.
    pub fn ball_omega(gp: &GParams) -> f64 {
        (gp.p - gp.qr() - gp.beta) / gp.df()
    }

    /// Exponent of `d` in the ball value: `1 + r − q'r − β`.
    pub fn ball_d(gp: &GParams) -> f64 {
        1.0 + gp.r - gp.qr() - gp.beta
    }
}

/// `G(B_1) = ((d−p)/(p−1))^{p−1} d^{1+r−q'r−β} (d+q')^{−r} ω_d^{(p−q'r−β)/d}`.
pub fn g_ball_exact(gp: &GParams) -> f64 {
    let (d, p) = (gp.df(), gp.p);
    let ln = (p - 1.0) * ((d - p) / (p - 1.0)).ln() + exponents::ball_d(gp) * d.ln()
        - gp.r * (d + gp.q_prime).ln()
        + exponents::ball_omega(gp) * unit_ball_volume(gp.d).ln();
    ln.exp()
}

/// `ln(|Ω|^α P^β)`.
fn ln_denominator(gp: &GParams, volume: f64, perimeter: f64) -> f64 {
    gp.alpha * volume.ln() + gp.beta * perimeter.ln()
}

/// `G` evaluated with the given capacity and torsion values.
pub fn g_from_parts(gp: &GParams, cap: f64, torsion: f64, volume: f64, perimeter: f64) -> f64 {
    (cap.ln() + gp.r * torsion.ln() - ln_denominator(gp, volume, perimeter)).exp()
}

/// Enclosure of `G` from the elliptic-integral capacity and the torsion enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleInterval {
    pub capacity: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GInterval {
    pub lo: f64,
    pub hi: f64,
    pub method_lo: String,
    pub method_hi: String,
    pub oracle: Option<OracleInterval>,
}

/// Certified interval `[lo, hi] ∋ G(body)`.
pub fn g_interval(body: &ConvexBody, gp: &GParams) -> Result<GInterval> {
    if body.dim() != gp.d {
        return Err(Error::InvalidInput(format!("body dimension {} != d = {}", body.dim(), gp.d)));
    }
    let pb = PreparedBody::new(body)?;
    g_interval_prepared(&pb, gp, &QuadratureConfig::default(), &SearchConfig::default())
}

pub fn g_interval_prepared(pb: &PreparedBody, gp: &GParams, qcfg: &QuadratureConfig, scfg: &SearchConfig) -> Result<GInterval> {
    let cp = gp.cap();
    let tp = gp.torsion();
    let m = &pb.metrics;
    let den = ln_denominator(gp, m.volume, m.perimeter);
    let (t_lo, t_hi) = torsion::power_interval_perimeter_ln(gp.d, m.volume, m.perimeter, &tp);

    let lower = capacity::lower_perimeter_value(&cp, m.perimeter);
    let report = capacity::cap_report_prepared(pb, &cp, qcfg, scfg);
    let (method, upper) = report
        .min_upper()
        .ok_or_else(|| Error::InvariantViolated("no capacity upper bound applies".into()))?;

    let oracle = oracle_interval_prepared(pb, gp, qcfg)?;
    let out = GInterval {
        lo: (lower.ln() + t_lo - den).exp(),
        hi: (upper.ln() + t_hi - den).exp(),
        method_lo: "cap_lower_perimeter*torsion_c1".into(),
        method_hi: format!("cap_upper_{}*torsion_c2", method.tag()),
        oracle,
    };
    if !(out.lo > 0.0 && out.lo <= out.hi * (1.0 + 1e-12) && out.hi.is_finite()) {
        return Err(Error::InvariantViolated(format!("G interval out of order: [{}, {}]", out.lo, out.hi)));
    }
    Ok(out)
}

/// Oracle-based enclosure, available for `d = 3`, `p = 2` and smooth bodies.
pub fn oracle_interval_prepared(pb: &PreparedBody, gp: &GParams, qcfg: &QuadratureConfig) -> Result<Option<OracleInterval>> {
    if gp.d != 3 || (gp.p - 2.0).abs() > 1e-15 {
        return Ok(None);
    }
    let axes = match pb.body.kind() {
        BodyKind::Ball { radius } => [*radius; 3],
        BodyKind::Ellipsoid { semi_axes } => [semi_axes[0], semi_axes[1], semi_axes[2]],
        BodyKind::Cuboid { .. } => return Ok(None),
    };
    let cap = capacity::cap2_ellipsoid_oracle(axes, qcfg)?;
    let enc = torsion::torsion_enclosure(pb, &gp.torsion());
    let m = &pb.metrics;
    let a = g_from_parts(gp, cap, enc.lo, m.volume, m.perimeter);
    let b = g_from_parts(gp, cap, enc.hi, m.volume, m.perimeter);
    Ok(Some(OracleInterval { capacity: cap, lo: a.min(b), hi: a.max(b) }))
}

/// Right-hand side of the supremum bound with both branch values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupBound {
    pub value: f64,
    pub branch1: Option<f64>,
    pub branch2: Option<f64>,
}

/// Upper bound for `sup G` over convex bodies; the minimum of the branches whose
/// hypotheses hold.
pub fn sup_bound_rhs(gp: &GParams) -> Result<SupBound> {
    let (_, c2) = torsion::constants_c1_c2(gp.d, &gp.torsion());
    let d = gp.df();
    let base = c2 * (d + gp.q_prime).powf(gp.r) * g_ball_exact(gp);
    let qr = gp.qr();
    let branch1 = (qr >= exponents::sup_branch1_threshold(gp)).then(|| base * d.powf(exponents::sup_branch1_d(gp)));
    let branch2 = (qr >= exponents::sup_branch2_threshold(gp)).then(|| base * d.powf(exponents::sup_branch2_d(gp)));
    let value = match (branch1, branch2) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::HypothesisNotMet(format!(
                "supremum bound needs q'r >= p − β or q'r >= (d−1)(d−p) − β (q'r = {qr})"
            )))
        }
    };
    Ok(SupBound { value, branch1, branch2 })
}

fn ratio_in_unit_interval(v: f64, what: &str) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::NonFiniteObjective(format!("{what} evaluated to {v}")));
    }
    if v > 1.0 {
        return Err(Error::Degenerate(format!(
            "{what} = {v} exceeds 1, so no maximiser with G > G(B_1) exists"
        )));
    }
    Ok(v)
}

/// Lower bound on `2ρ/diam` of a maximiser, from the strict supremum hypotheses.
pub fn maximiser_ratio_lower(gp: &GParams) -> Result<f64> {
    let (_, c2) = torsion::constants_c1_c2(gp.d, &gp.torsion());
    let d = gp.df();
    let ln_k = c2.ln() + gp.r * (d + gp.q_prime).ln();
    let e1 = exponents::maximiser_branch1_gap(gp);
    let e2 = exponents::maximiser_branch2_gap(gp);
    let b1 = (e1 > 0.0).then(|| ((1.0 - 2.0 * d + d * gp.r / e1) * d.ln() - d / e1 * ln_k).exp());
    let b2 = (e2 > 0.0).then(|| {
        ((1.0 + d * (gp.r - 2.0 * gp.qr() - 2.0 * gp.beta) / e2) * d.ln() - d / e2 * ln_k).exp()
    });
    let v = match (b1, b2) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => {
            return Err(Error::HypothesisNotMet(format!(
                "maximiser bound needs q'r > p − β or q'r > (d−1)(d−p) − β (q'r = {})",
                gp.qr()
            )))
        }
    };
    ratio_in_unit_interval(v, "maximiser ratio bound")
}

/// Lower bound on `2ρ/diam` of a maximiser when `q'r = p = d − 1` and `α = α*`.
pub fn maximiser_ratio_lower_pd1(gp: &GParams) -> Result<f64> {
    let d = gp.df();
    if gp.d < 3
        || (gp.qr() - gp.p).abs() > 1e-12
        || (gp.p - (d - 1.0)).abs() > 1e-12
        || !gp.is_alpha_star()
    {
        return Err(Error::HypothesisNotMet(format!(
            "needs q'r = p = d − 1, α = α*, d >= 3 (d = {}, p = {}, q'r = {}, β = {})",
            gp.d,
            gp.p,
            gp.qr(),
            gp.beta
        )));
    }
    let inner = 2.0
        * (d - 2.0)
        * d.powf((d - 1.0 - gp.r) / (d - 2.0))
        * (d - 1.0).powf(1.0 / (d - 2.0))
        * ((gp.q_prime + d) / (gp.q_prime + 1.0)).powf(gp.r / (d - 2.0));
    ratio_in_unit_interval(((1.0 - 2.0 * d) * d.ln() - inner).exp(), "maximiser ratio bound")
}

/// `ln` of the factor multiplying `G(B_1)` in the infimum bound.
fn ln_inf_factor(gp: &GParams) -> f64 {
    let (c1, _) = torsion::constants_c1_c2(gp.d, &gp.torsion());
    let (d, p) = (gp.df(), gp.p);
    c1.ln() + (p - 1.0) * ((p - 1.0) / (p * (d - 1.0))).ln() + exponents::inf_d(gp) * d.ln()
        + gp.r * (d + gp.q_prime).ln()
}

/// Lower bound for `inf G` over convex bodies, valid when `q'r ≤ (d−p)/(d−1) − β`.
pub fn inf_bound_rhs(gp: &GParams) -> Result<f64> {
    if !(gp.qr() <= exponents::inf_threshold(gp)) {
        return Err(Error::HypothesisNotMet(format!(
            "infimum bound needs q'r <= (d−p)/(d−1) − β (q'r = {}, threshold {}); the infimum is 0",
            gp.qr(),
            exponents::inf_threshold(gp)
        )));
    }
    Ok((ln_inf_factor(gp)).exp() * g_ball_exact(gp))
}

/// Lower bound on `2ρ/diam` of a minimiser, valid when `q'r < (d−p)/(d−1) − β`.
pub fn minimiser_ratio_lower(gp: &GParams) -> Result<f64> {
    if !(gp.qr() < exponents::inf_threshold(gp)) {
        return Err(Error::HypothesisNotMet(format!(
            "minimiser bound needs q'r < (d−p)/(d−1) − β (q'r = {}, threshold {})",
            gp.qr(),
            exponents::inf_threshold(gp)
        )));
    }
    let power = exponents::minimiser_ratio_power(gp);
    let v = (ln_inf_factor(gp) / power).exp();
    if !(v > 0.0 && v <= 1.0 + 1e-12) {
        return Err(Error::InvariantViolated(format!("minimiser ratio bound {v} outside (0, 1]")));
    }
    Ok(v.min(1.0))
}
