//! Bounds for the q-torsional rigidity `T_q`.
//!
//! `T_q` is never computed directly; it enters only through the ball closed
//! form and the inradius, perimeter and Saint-Venant bounds below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, ConvexBody, PreparedBody};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionParams {
    pub q: f64,
    pub q_prime: f64,
    pub r: f64,
}

impl TorsionParams {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidInput(format!("torsion needs q > 1, got {q}")));
        }
        if !r.is_finite() {
            return Err(Error::InvalidInput(format!("torsion power r must be finite, got {r}")));
        }
        Ok(Self { q, q_prime: q / (q - 1.0), r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionInterval {
    pub lo: f64,
    pub hi: f64,
}

impl TorsionInterval {
    pub fn contains(&self, x: f64, rtol: f64) -> bool {
        x >= self.lo * (1.0 - rtol) && x <= self.hi * (1.0 + rtol)
    }
}

/// `T_q(B_R) = ω_d R^{d+q'} / (d^{q'−1}(q'+d))`.
pub fn torsion_ball_exact(d: usize, tp: &TorsionParams, radius: f64) -> f64 {
    let (df, qp) = (d as f64, tp.q_prime);
    unit_ball_volume(d) * radius.powf(df + qp) / (df.powf(qp - 1.0) * (qp + df))
}

/// Inradius bounds `|Ω|ρ^{q'}/(d^{q'−1}(d+q')) ≤ T_q ≤ |Ω|ρ^{q'}/(q'+1)`; the lower one is attained by balls.
pub fn torsion_interval_inradius(body: &ConvexBody, tp: &TorsionParams) -> TorsionInterval {
    inradius_interval_from(body.dim(), body.volume(), body.inradius(), tp)
}

pub fn inradius_interval_from(d: usize, volume: f64, inradius: f64, tp: &TorsionParams) -> TorsionInterval {
    let (df, qp) = (d as f64, tp.q_prime);
    let base = volume * inradius.powf(qp);
    TorsionInterval {
        lo: base / (df.powf(qp - 1.0) * (df + qp)),
        hi: base / (qp + 1.0),
    }
}

/// Saint-Venant: `T_q(Ω) ≤ T_q(B_1)(|Ω|/ω_d)^{q'/d+1}`.
pub fn torsion_upper_saint_venant(body: &ConvexBody, tp: &TorsionParams) -> f64 {
    saint_venant_from(body.dim(), body.volume(), tp)
}

pub fn saint_venant_from(d: usize, volume: f64, tp: &TorsionParams) -> f64 {
    let df = d as f64;
    let ln = torsion_ball_exact(d, tp, 1.0).ln() + (tp.q_prime / df + 1.0) * (volume / unit_ball_volume(d)).ln();
    ln.exp()
}

/// The constants `(C₁, C₂)` with `C₁ X ≤ T_q^r ≤ C₂ X`, `X = |Ω|^{(1+q')r}/P^{q'r}`.
///
/// For `r ≤ 0` the lower constant is `d^{q'r}/(q'+1)^r`, which is what the
/// inradius bounds together with `|Ω|/P ≤ ρ ≤ d|Ω|/P` give once the power
/// reverses the order. The alternative `1/(q'+1)^r` is too large: it
/// overshoots the exact ball value (see the tests).
pub fn constants_c1_c2(d: usize, tp: &TorsionParams) -> (f64, f64) {
    let (df, qp, r) = (d as f64, tp.q_prime, tp.r);
    let small = 1.0 / (df.powf(r * (qp - 1.0)) * (df + qp).powf(r));
    let large = df.powf(qp * r) / (qp + 1.0).powf(r);
    if r > 0.0 {
        (small, large)
    } else {
        (large, small)
    }
}

/// `(ln lo, ln hi)` of the perimeter interval for `T_q^r`.
pub fn power_interval_perimeter_ln(d: usize, volume: f64, perimeter: f64, tp: &TorsionParams) -> (f64, f64) {
    let (c1, c2) = constants_c1_c2(d, tp);
    let (qp, r) = (tp.q_prime, tp.r);
    let ln_x = (1.0 + qp) * r * volume.ln() - qp * r * perimeter.ln();
    (c1.ln() + ln_x, c2.ln() + ln_x)
}

/// `[C₁ X, C₂ X]` enclosing `T_q(Ω)^r`.
pub fn torsion_power_interval_perimeter(body: &ConvexBody, tp: &TorsionParams) -> Result<TorsionInterval> {
    let pb = PreparedBody::new(body)?;
    Ok(power_interval_perimeter_prepared(&pb, tp))
}

pub fn power_interval_perimeter_prepared(pb: &PreparedBody, tp: &TorsionParams) -> TorsionInterval {
    let (lo, hi) = power_interval_perimeter_ln(pb.dim(), pb.metrics.volume, pb.metrics.perimeter, tp);
    TorsionInterval { lo: lo.exp(), hi: hi.exp() }
}

/// Tightest available enclosure of `T_q` from the inradius and Saint-Venant bounds.
pub fn torsion_enclosure(pb: &PreparedBody, tp: &TorsionParams) -> TorsionInterval {
    let m = &pb.metrics;
    let inr = inradius_interval_from(pb.dim(), m.volume, m.inradius, tp);
    TorsionInterval { lo: inr.lo, hi: inr.hi.min(saint_venant_from(pb.dim(), m.volume, tp)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn tp(q: f64, r: f64) -> TorsionParams {
        TorsionParams::new(q, r).unwrap()
    }

    #[test]
    fn params() {
        assert!(TorsionParams::new(1.0, 1.0).is_err());
        assert!(TorsionParams::new(2.0, f64::NAN).is_err());
        assert_eq!(tp(3.0, 0.0).q_prime, 1.5);
    }

    #[test]
    fn ball_values() {
        assert!(rel(torsion_ball_exact(3, &tp(2.0, 1.0), 1.0), 4.0 * PI / 45.0) < 1e-15);
        assert!(rel(torsion_ball_exact(2, &tp(2.0, 1.0), 1.0), PI / 8.0) < 1e-15);
        let t = tp(2.0, 1.0);
        assert!(rel(torsion_ball_exact(3, &t, 2.0), 32.0 * torsion_ball_exact(3, &t, 1.0)) < 1e-15);
        // classical torsion function (1 - |x|^2)/(2d) integrated over B_1
        for d in 2..=6 {
            let classical = unit_ball_volume(d) / (d * (d + 2)) as f64;
            assert!(rel(torsion_ball_exact(d, &t, 1.0), classical) < 1e-14);
        }
    }

    #[test]
    fn inradius_interval_cases() {
        let t = tp(2.0, 1.0);
        let ball = ConvexBody::unit_ball(3).unwrap();
        let i = torsion_interval_inradius(&ball, &t);
        assert!(rel(i.lo, 4.0 * PI / 45.0) < 1e-15);
        assert!(rel(i.hi, 4.0 * PI / 9.0) < 1e-15);
        let cube = torsion_interval_inradius(&ConvexBody::cuboid(vec![1.0; 3]).unwrap(), &tp(3.0, 1.0));
        assert!(0.0 < cube.lo && cube.lo < cube.hi);
    }

    #[test]
    fn rectangle_strip_limit_is_below_upper_constant() {
        // series for the L x 1 rectangle torsion, normalised by L (1/2)^2
        let t = tp(2.0, 1.0);
        let mut prev = 0.0;
        for l in [2.0, 8.0, 32.0, 128.0] {
            let mut s = 0.0;
            for k in (1..200).step_by(2) {
                let kf = k as f64;
                s += (kf * PI * l / 2.0).tanh() / kf.powi(5);
            }
            let torsion = l / 12.0 - 16.0 / PI.powi(5) * s;
            let ratio = torsion / (l * 0.25);
            let body = ConvexBody::cuboid(vec![l, 1.0]).unwrap();
            let i = torsion_interval_inradius(&body, &t);
            assert!(i.lo <= torsion && torsion <= i.hi, "{l}: {i:?} {torsion}");
            assert!(ratio > prev && ratio < 1.0 / 3.0);
            prev = ratio;
        }
        assert!(1.0 / 3.0 - prev < 0.01);
    }

    #[test]
    fn saint_venant_cases() {
        let t = tp(2.0, 1.0);
        let ball = ConvexBody::unit_ball(3).unwrap();
        assert!(rel(torsion_upper_saint_venant(&ball, &t), 4.0 * PI / 45.0) < 1e-14);
        let cube = ConvexBody::cuboid(vec![1.0; 3]).unwrap();
        let sv = torsion_upper_saint_venant(&cube, &t);
        assert!(rel(sv, 4.0 * PI / 45.0 * (3.0 / (4.0 * PI)).powf(5.0 / 3.0)) < 1e-14);
        assert!(sv > torsion_interval_inradius(&cube, &t).lo);
        let e = ConvexBody::ellipsoid(vec![2.0, 1.0, 1.0]).unwrap();
        assert!(rel(torsion_upper_saint_venant(&e, &t), 4.0 * PI / 45.0 * 2f64.powf(5.0 / 3.0)) < 1e-14);
    }

    #[test]
    fn constants() {
        let (c1, c2) = constants_c1_c2(3, &tp(2.0, 1.0));
        assert!(rel(c1, 1.0 / 15.0) < 1e-15 && rel(c2, 3.0) < 1e-15);
        assert_eq!(constants_c1_c2(3, &tp(2.0, 0.0)), (1.0, 1.0));
        let (c1, c2) = constants_c1_c2(4, &tp(3.0, 2.0));
        assert!(rel(c1, 1.0 / 121.0) < 1e-15 && rel(c2, 10.24) < 1e-14);
        let (c1, c2) = constants_c1_c2(3, &tp(2.0, -1.0));
        assert!(rel(c1, 1.0 / 3.0) < 1e-15 && rel(c2, 15.0) < 1e-14);
    }

    #[test]
    fn uncorrected_negative_power_constant_fails_on_the_ball() {
        let t = tp(2.0, -1.0);
        let ball = ConvexBody::unit_ball(3).unwrap();
        let x = power_interval_perimeter_ln(3, ball.volume(), 4.0 * PI, &t).0 - constants_c1_c2(3, &t).0.ln();
        let exact = torsion_ball_exact(3, &t, 1.0).powf(-1.0);
        let printed = 1.0 / (t.q_prime + 1.0).powf(t.r);
        assert!(printed * x.exp() > exact * 1.5);
        let i = torsion_power_interval_perimeter(&ball, &t).unwrap();
        assert!(i.contains(exact, 1e-12), "{i:?} {exact}");
    }

    #[test]
    fn power_interval_contains_ball_value() {
        for d in 2..=5 {
            for q in [1.5, 2.0, 3.0, 6.0] {
                for r in [-2.0, -0.5, 0.0, 0.3, 1.0, 2.5] {
                    let t = tp(q, r);
                    let ball = ConvexBody::unit_ball(d).unwrap();
                    let i = torsion_power_interval_perimeter(&ball, &t).unwrap();
                    let exact = torsion_ball_exact(d, &t, 1.0).powf(r);
                    assert!(i.contains(exact, 1e-12), "d={d} q={q} r={r}: {i:?} {exact}");
                    let (c1, c2) = constants_c1_c2(d, &t);
                    assert!(c1 <= c2);
                }
            }
        }
    }

    #[test]
    fn extreme_powers_stay_finite_in_log_space() {
        let t = tp(2.0, 40.0);
        let (lo, hi) = power_interval_perimeter_ln(3, 1e-12, 1e3, &t);
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi);
    }

    proptest! {
        #[test]
        fn scaling_laws(a in 0.3f64..3.0, b in 0.3f64..3.0, t in 0.2f64..5.0, q in 1.2f64..5.0, r in -2.0f64..2.0) {
            let tpar = tp(q, r);
            let body = ConvexBody::cuboid(vec![a, b, 1.0]).unwrap();
            let scaled = body.scaled(t).unwrap();
            let k = t.powf(3.0 + tpar.q_prime);
            let (i1, i2) = (torsion_interval_inradius(&body, &tpar), torsion_interval_inradius(&scaled, &tpar));
            prop_assert!(rel(i2.lo, k * i1.lo) < 1e-12 && rel(i2.hi, k * i1.hi) < 1e-12);
            let sv = torsion_upper_saint_venant(&body, &tpar);
            prop_assert!(rel(torsion_upper_saint_venant(&scaled, &tpar), k * sv) < 1e-12);
            prop_assert!(sv >= i1.lo * (1.0 - 1e-12));
            let (p1, p2) = (
                torsion_power_interval_perimeter(&body, &tpar).unwrap(),
                torsion_power_interval_perimeter(&scaled, &tpar).unwrap(),
            );
            let kr = k.powf(r);
            prop_assert!(rel(p2.lo, kr * p1.lo) < 1e-12 && rel(p2.hi, kr * p1.hi) < 1e-12);
        }
    }
}
