//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! Semi-infinite integrals are mapped onto `(0, 1)` with `t = s / (1 - s)`.
//! The upper half of that interval is carried in the complementary variable
//! `w = 1 - s` so that subintervals next to `s = 1` keep full precision; this
//! is what lets the bisection chase algebraic tails such as `t^{-4/3}`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidInput(format!(
                "quadrature config needs rel_tol > 0, abs_tol > 0, max_subdivisions >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    // which half of the compactified interval this segment lives on
    tail: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod_panel<F>(g: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [0.0_f64; 15];
    fv[7] = g(center)?;
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[j] = g(center - dx)?;
        fv[14 - j] = g(center + dx)?;
    }

    let mut kronrod = WGK[7] * fv[7];
    let mut gauss = WG[3] * fv[7];
    let mut abs_sum = WGK[7] * fv[7].abs();
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        kronrod += WGK[j] * pair;
        abs_sum += WGK[j] * (fv[j].abs() + fv[14 - j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fv[7] - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

fn converged(total: f64, err: f64, cfg: &QuadratureConfig) -> bool {
    err <= cfg.abs_tol.max(cfg.rel_tol * total.abs())
}

/// Adaptive integration of `g` over the finite interval `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidInput(format!("integrate needs finite a < b, got [{a}, {b}]")));
    }
    let g = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteIntegrand(x))
        }
    };
    adaptive(&[(a, b, false)], &g, &g, cfg)
}

/// Integrates `f` over `(0, ∞)` through the map `t = s / (1 - s)`.
pub fn integrate_semi_infinite<F>(f: F, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    // s in (0, 1/2]: t = s / (1 - s), dt = ds / (1 - s)^2
    let head = |s: f64| {
        let one_minus = 1.0 - s;
        let t = s / one_minus;
        let y = f(t);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand(t));
        }
        Ok(y / (one_minus * one_minus))
    };
    // w = 1 - s in (0, 1/2]: t = 1/w - 1, dt = dw / w^2
    let tail = |w: f64| {
        let t = (1.0 - w) / w;
        let y = f(t);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand(t));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let v = y / (w * w);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand(t))
        }
    };
    adaptive(&[(0.0, 0.5, false), (0.0, 0.5, true)], &head, &tail, cfg)
}

fn adaptive<H, T>(
    initial: &[(f64, f64, bool)],
    head: &H,
    tail: &T,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
    T: Fn(f64) -> Result<f64>,
{
    let panel = |lo: f64, hi: f64, is_tail: bool| {
        if is_tail {
            kronrod_panel(tail, lo, hi)
        } else {
            kronrod_panel(head, lo, hi)
        }
    };

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for &(lo, hi, is_tail) in initial {
        let (value, error) = panel(lo, hi, is_tail)?;
        total += value;
        total_err += error;
        heap.push(Segment { lo, hi, value, error, tail: is_tail });
    }

    let mut subdivisions = 0usize;
    while !converged(total, total_err, cfg) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureBudget {
                subdivisions,
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval can no longer be split in floating point
            return Err(Error::QuadratureBudget {
                subdivisions,
                estimate: total,
                error: total_err,
            });
        }
        let (v1, e1) = panel(worst.lo, mid, worst.tail)?;
        let (v2, e2) = panel(mid, worst.hi, worst.tail)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { lo: worst.lo, hi: mid, value: v1, error: e1, tail: worst.tail });
        heap.push(Segment { lo: mid, hi: worst.hi, value: v2, error: e2, tail: worst.tail });
        subdivisions += 1;

        // the running sums drift after many updates; resum periodically
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(heap.iter().map(|s| s.value).sum())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
