//! Derivative-free minimisation: golden-section search on an interval and
//! Nelder–Mead on `R^k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 500,
            seed: 42,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iters < 1 {
            return Err(Error::InvalidInput(format!(
                "search config needs tol > 0 and max_iters >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Number of coarse samples used to bracket the minimum before refining.
const BRACKET_SAMPLES: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn eval_1d<G: Fn(f64) -> f64>(g: &G, x: f64) -> Result<f64> {
    let y = g(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteObjective(format!("x = {x:e}")))
    }
}

/// Golden-section minimisation of `g` on `[lo, hi]`.
///
/// A coarse scan over [`BRACKET_SAMPLES`] points picks the bracket first, so a
/// mildly non-unimodal objective still lands in the basin of the smallest
/// sample.
pub fn minimize_1d<G>(g: G, lo: f64, hi: f64, cfg: &SearchConfig) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("minimize_1d needs lo < hi, got [{lo}, {hi}]")));
    }
    let step = (hi - lo) / BRACKET_SAMPLES as f64;
    let mut best_i = 0;
    let mut best_y = f64::INFINITY;
    for i in 0..=BRACKET_SAMPLES {
        let x = if i == BRACKET_SAMPLES { hi } else { lo + step * i as f64 };
        let y = eval_1d(&g, x)?;
        if y < best_y {
            best_y = y;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = if best_i + 1 >= BRACKET_SAMPLES { hi } else { lo + step * (best_i + 1) as f64 };

    let target = cfg.tol * (hi - lo);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval_1d(&g, c)?;
    let mut fd = eval_1d(&g, d)?;
    let mut iters = 0;
    while (b - a) > target && iters < 10 * cfg.max_iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval_1d(&g, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval_1d(&g, d)?;
        }
        iters += 1;
    }
    let mut x = 0.5 * (a + b);
    let mut y = eval_1d(&g, x)?;
    // never return worse than the best sample seen
    for (cx, cy) in [(c, fc), (d, fd)] {
        if cy < y {
            x = cx;
            y = cy;
        }
    }
    Ok((x, y))
}

/// Outcome of a Nelder–Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub argmin: Vec<f64>,
    pub min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex search started from `x0`.
///
/// Converges when the simplex diameter drops below `cfg.tol`; the search is
/// restarted once from the best vertex to guard against a collapsed simplex.
/// Non-finite objective values away from `x0` are treated as `+∞`.
pub fn minimize_nelder_mead<G>(g: G, x0: &[f64], cfg: &SearchConfig) -> Result<NelderMeadResult>
where
    G: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    if x0.is_empty() {
        return Err(Error::InvalidInput("Nelder-Mead needs k >= 1".into()));
    }
    let f0 = g(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective(format!("x0 = {x0:?}")));
    }
    let safe = |x: &[f64]| {
        let y = g(x);
        if y.is_nan() {
            f64::INFINITY
        } else {
            y
        }
    };

    let mut total_iters = 0;
    let mut start = x0.to_vec();
    let mut start_val = f0;
    let mut converged = false;
    for _restart in 0..2 {
        let budget = cfg.max_iters.saturating_sub(total_iters);
        if budget == 0 {
            break;
        }
        let (x, y, it, ok) = nelder_mead_once(&safe, &start, start_val, cfg.tol, budget);
        total_iters += it;
        let improved = y < start_val;
        start = x;
        start_val = y;
        converged = ok;
        if ok && !improved {
            break;
        }
    }
    Ok(NelderMeadResult {
        argmin: start,
        min: start_val,
        iterations: total_iters,
        converged,
    })
}

fn nelder_mead_once<G>(g: &G, x0: &[f64], f0: f64, tol: f64, budget: usize) -> (Vec<f64>, f64, usize, bool)
where
    G: Fn(&[f64]) -> f64,
{
    let k = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(k + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..k {
        let mut x = x0.to_vec();
        let step = if x[i].abs() > 1e-8 { 0.1 * x[i].abs().max(0.5) } else { 0.1 };
        x[i] += step;
        let y = g(&x);
        simplex.push((x, y));
    }

    let mut iters = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < tol {
            return (best, simplex[0].1, iters, true);
        }
        if iters >= budget {
            return (best, simplex[0].1, iters, false);
        }
        iters += 1;

        let mut centroid = vec![0.0; k];
        for (x, _) in &simplex[..k] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / k as f64;
            }
        }
        let worst = simplex[k].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (w - c)).collect()
        };

        let xr = along(-alpha);
        let fr = g(&xr);
        if fr < simplex[0].1 {
            let xe = along(-gamma);
            let fe = g(&xe);
            simplex[k] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[k - 1].1 {
            simplex[k] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(-rho);
            let fc = g(&xc);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = g(&xc);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[k] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let b = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = b.iter().zip(&v.0).map(|(b, x)| b + sigma * (x - b)).collect();
            let y = g(&x);
            *v = (x, y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quadratic_bowl() {
        let (x, y) = minimize_1d(|a| (a - 2.0).powi(2), 0.0, 10.0, &SearchConfig::default()).unwrap();
        assert!((x - 2.0).abs() <= 1e-8, "{x}");
        assert!(y < 1e-15);
    }

    #[test]
    fn am_gm() {
        let (x, y) = minimize_1d(|a| a + 1.0 / a, 0.01, 100.0, &SearchConfig::default()).unwrap();
        // the minimum is flat to second order, so the argmin is only resolvable to ~sqrt(eps)
        assert!((x - 1.0).abs() < 1e-6, "{x}");
        assert!((y - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ball_neighbourhood_ratio() {
        let omega3 = 4.0 * PI / 3.0;
        let (x, y) = minimize_1d(|a| omega3 * (1.0 + a).powi(3) / (a * a), 0.05, 20.0, &SearchConfig::default())
            .unwrap();
        assert!((x - 2.0).abs() < 1e-6, "{x}");
        assert!((y - 27.0 * omega3 / 4.0).abs() < 1e-12 * y);
    }

    #[test]
    fn bracket_scan_escapes_shallow_local_minimum() {
        // local minimum near 1, global near 8
        let g = |x: f64| (x - 8.0).powi(2) * (x - 1.0).powi(2) * 0.01 - (-((x - 8.0).powi(2))).exp();
        let (x, _) = minimize_1d(g, 0.0, 10.0, &SearchConfig::default()).unwrap();
        assert!((x - 8.0).abs() < 1e-3, "{x}");
    }

    #[test]
    fn rejects_bad_interval_and_nan() {
        let cfg = SearchConfig::default();
        assert!(minimize_1d(|x| x, 1.0, 1.0, &cfg).is_err());
        assert!(matches!(
            minimize_1d(|x| if x > 5.0 { f64::NAN } else { x }, 0.0, 10.0, &cfg),
            Err(Error::NonFiniteObjective(_))
        ));
    }

    #[test]
    fn nelder_mead_bowl() {
        let r = minimize_nelder_mead(|x| x[0] * x[0] + x[1] * x[1], &[1.0, 1.0], &SearchConfig::default()).unwrap();
        assert!(r.argmin.iter().all(|v| v.abs() < 1e-8), "{:?}", r.argmin);
        assert!(r.converged);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize_nelder_mead(rosen, &[-1.2, 1.0], &SearchConfig::default()).unwrap();
        assert!((r.argmin[0] - 1.0).abs() < 1e-5 && (r.argmin[1] - 1.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn nelder_mead_one_dimensional() {
        let r = minimize_nelder_mead(|x| (x[0] - 3.0).powi(2), &[0.0], &SearchConfig::default()).unwrap();
        assert!((r.argmin[0] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn nelder_mead_rejects_nonfinite_start() {
        assert!(minimize_nelder_mead(|_| f64::INFINITY, &[0.0], &SearchConfig::default()).is_err());
        assert!(minimize_nelder_mead(|_| 0.0, &[], &SearchConfig::default()).is_err());
    }
}
