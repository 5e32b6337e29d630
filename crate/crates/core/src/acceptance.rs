//! The acceptance suite: ten end-to-end checks with tolerances and runtime budgets.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::capacity::{self, cap_ball_exact, CapParams};
use crate::error::Result;
use crate::experiments::{self, axis_ratio, Family};
use crate::functional::{self, g_ball_exact, make_params, GParams};
use crate::geometry::{metric_inequality_slacks, mc_validate_steiner, unit_ball_volume, ConvexBody, PreparedBody};
use crate::numerics::{QuadratureConfig, SearchConfig};
use crate::torsion::{self, torsion_ball_exact};

/// Seed of every random body suite in the acceptance run.
pub const SUITE_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub budget_s: f64,
}

impl CriterionResult {
    /// One line: `PASS AC3 oracle sandwich [0.41s/5s] detail`.
    pub fn line(&self) -> String {
        format!(
            "{} AC{} {} [{:.3}s/{}s] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_s,
            self.budget_s,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

const CRITERIA: [(u8, &str, f64, Check); 10] = [
    (1, "ball equality chain", 1.0, ac1_ball_chain),
    (2, "ball value identity", 1.0, ac2_ball_identity),
    (3, "oracle sandwich", 5.0, ac3_oracle_sandwich),
    (4, "quermassintegral inequality suites", 10.0, ac4_inequality_suites),
    (5, "scaling laws", 5.0, ac5_scaling),
    (6, "thin-ellipsoid decay", 5.0, ac6_thin_decay),
    (7, "elongated-family growth", 5.0, ac7_elongated),
    (8, "extremality of the ball", 30.0, ac8_ball_extremality),
    (9, "supremum bound consistency", 5.0, ac9_sup_bound),
    (10, "Monte Carlo cross-validation", 30.0, ac10_monte_carlo),
];

pub fn criterion_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs one criterion; an error inside the check counts as a failure.
pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let (id, name, budget, check) = *CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed().as_secs_f64();
    let (ok, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_budget = elapsed <= budget;
    let detail = if in_budget { detail } else { format!("{detail}; over runtime budget") };
    Some(CriterionResult { id, name: name.into(), passed: ok && in_budget, detail, elapsed_s: elapsed, budget_s: budget })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Seeded random ellipsoids with semi-axes log-uniform in `[1/3, 3]`.
pub fn random_ellipsoids(d: usize, n: usize, seed: u64) -> Vec<ConvexBody> {
    random_axes(d, n, seed).into_iter().map(|a| ConvexBody::ellipsoid(a).expect("positive axes")).collect()
}

/// Seeded random boxes with edge lengths log-uniform in `[1/3, 3]`.
pub fn random_cuboids(d: usize, n: usize, seed: u64) -> Vec<ConvexBody> {
    random_axes(d, n, seed).into_iter().map(|a| ConvexBody::cuboid(a).expect("positive edges")).collect()
}

fn random_axes(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = 3f64.ln();
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-span..span).exp()).collect()).collect()
}

/// `(d, p, q, r, β)` grid with at least 30 admissible entries.
pub fn parameter_grid() -> Vec<GParams> {
    let mut out = Vec::new();
    for d in 2..=5 {
        let df = d as f64;
        for p in [1.5, 0.5 * (1.0 + df), df - 0.3] {
            for q in [1.5, 2.0, 4.0] {
                for r in [-0.3, 0.0, 0.5, 1.0, 2.0] {
                    for beta in [0.0, 0.5, 2.0] {
                        if let Ok(g) = make_params(d, p, q, r, beta) {
                            out.push(g);
                        }
                    }
                }
            }
        }
    }
    out
}

fn ac1_ball_chain() -> Result<(bool, String)> {
    let qcfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for (d, p) in [(3, 2.0), (3, 2.5), (4, 2.0), (4, 3.0), (5, 2.0), (5, 3.5)] {
        let cp = CapParams::new(d, p)?;
        let ball = ConvexBody::unit_ball(d)?;
        let exact = cap_ball_exact(&cp, 1.0);
        for v in [
            capacity::cap_upper_steiner_profile(&ball, &cp, &qcfg)?,
            capacity::cap_upper_mean_curvature(&ball, &cp)?,
            capacity::cap_upper_perimeter_measure(&ball, &cp)?,
        ] {
            worst = worst.max(rel(v, exact));
        }
    }
    Ok((worst <= 1e-8, format!("max rel deviation {worst:.2e} over 6 (d,p) pairs")))
}

fn ac2_ball_identity() -> Result<(bool, String)> {
    let g = make_params(3, 2.0, 2.0, 1.0, 0.0)?;
    let value = g_ball_exact(&g);
    let w = unit_ball_volume(3);
    let composed = cap_ball_exact(&g.cap(), 1.0) * torsion_ball_exact(3, &g.torsion(), 1.0) / (w * w);
    let mut ok = rel(value, 0.2) <= 1e-12 && rel(value, composed) <= 1e-12;
    let grid = parameter_grid();
    let mut worst: f64 = 0.0;
    for g in &grid {
        let d = g.d();
        let w = unit_ball_volume(d);
        let c = functional::g_from_parts(
            g,
            cap_ball_exact(&g.cap(), 1.0),
            torsion_ball_exact(d, &g.torsion(), 1.0),
            w,
            d as f64 * w,
        );
        worst = worst.max(rel(g_ball_exact(g), c));
    }
    ok &= worst <= 1e-12 && grid.len() >= 30;
    Ok((ok, format!("G(B1) = {value:.15}; grid of {} max rel deviation {worst:.2e}", grid.len())))
}

fn ac3_oracle_sandwich() -> Result<(bool, String)> {
    let cp = CapParams::new(3, 2.0)?;
    let qcfg = QuadratureConfig::default();
    let scfg = SearchConfig::default();
    let mut min_margin = f64::INFINITY;
    for body in random_ellipsoids(3, 20, SUITE_SEED) {
        let pb = PreparedBody::new(&body)?;
        let rep = capacity::cap_report_prepared(&pb, &cp, &qcfg, &scfg);
        let oracle = rep.oracle.ok_or_else(|| crate::Error::InvariantViolated("oracle missing".into()))?;
        min_margin = min_margin.min(oracle / rep.lower - 1.0);
        for v in rep.uppers.values() {
            min_margin = min_margin.min(v / oracle - 1.0);
        }
    }
    let closed = 4.0 * PI * 3f64.sqrt() / (2.0 + 3f64.sqrt()).ln();
    let prolate = capacity::cap2_ellipsoid_oracle([2.0, 1.0, 1.0], &qcfg)?;
    let ok = min_margin >= -1e-9 && rel(prolate, closed) <= 1e-8;
    Ok((ok, format!("min relative margin {min_margin:.3e}; prolate oracle {prolate:.10} (rel err {:.1e})", rel(prolate, closed))))
}

fn ac4_inequality_suites() -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    let mut where_ = String::new();
    let mut count = 0;
    for d in 2..=5 {
        let mut bodies = vec![ConvexBody::unit_ball(d)?, ConvexBody::cuboid(vec![1.0; d])?];
        bodies.extend(random_ellipsoids(d, 20, SUITE_SEED + d as u64));
        bodies.extend(random_cuboids(d, 20, SUITE_SEED + 100 + d as u64));
        for body in bodies {
            let pb = PreparedBody::new(&body)?;
            count += 1;
            for s in pb.steiner.aleksandrov_fenchel_slacks() {
                if s.slack < worst {
                    worst = s.slack;
                    where_ = format!("AF({},{},{}) on {body}", s.i, s.j, s.k);
                }
            }
            for s in metric_inequality_slacks(&pb.metrics) {
                if s.slack < worst {
                    worst = s.slack;
                    where_ = format!("{} on {body}", s.name);
                }
            }
        }
    }
    Ok((worst >= -1e-7, format!("{count} bodies; min slack {worst:.3e} ({where_})")))
}

fn ac5_scaling() -> Result<(bool, String)> {
    let qcfg = QuadratureConfig::default();
    let scfg = SearchConfig::default();
    let mut worst: f64 = 0.0;
    let mut bodies = 0;
    for d in 2..=5 {
        let df = d as f64;
        let g = make_params(d, 0.5 * (1.0 + df), 2.0, 1.0, 0.5)?;
        let cp = g.cap();
        let tp = g.torsion();
        let mut suite = random_ellipsoids(d, 3, SUITE_SEED + 200 + d as u64);
        suite.extend(random_cuboids(d, 3, SUITE_SEED + 300 + d as u64));
        for body in suite {
            bodies += 1;
            let pb = PreparedBody::new(&body)?;
            let rep = capacity::cap_report_prepared(&pb, &cp, &qcfg, &scfg);
            let gi = functional::g_interval_prepared(&pb, &g, &qcfg, &scfg)?;
            let ti = torsion::torsion_interval_inradius(&body, &tp);
            let sv = torsion::torsion_upper_saint_venant(&body, &tp);
            for t in [0.5, 3.0] {
                let sb = body.scaled(t)?;
                let spb = PreparedBody::new(&sb)?;
                let srep = capacity::cap_report_prepared(&spb, &cp, &qcfg, &scfg);
                let kc = t.powf(df - g.p());
                worst = worst.max(rel(srep.lower, kc * rep.lower));
                for (m, v) in &rep.uppers {
                    worst = worst.max(rel(srep.uppers[m], kc * v));
                }
                let kt = t.powf(df + tp.q_prime);
                let sti = torsion::torsion_interval_inradius(&sb, &tp);
                worst = worst.max(rel(sti.lo, kt * ti.lo)).max(rel(sti.hi, kt * ti.hi));
                worst = worst.max(rel(torsion::torsion_upper_saint_venant(&sb, &tp), kt * sv));
                let sgi = functional::g_interval_prepared(&spb, &g, &qcfg, &scfg)?;
                worst = worst.max(rel(sgi.lo, gi.lo)).max(rel(sgi.hi, gi.hi));
            }
        }
    }
    Ok((worst <= 1e-9, format!("{bodies} bodies x 2 scales; max rel deviation {worst:.2e}")))
}

fn ac6_thin_decay() -> Result<(bool, String)> {
    let sets = [
        make_params(3, 2.0, 2.0, 1.0, 0.0)?,
        make_params(3, 2.0, 2.0, 0.1, 0.0)?,
        make_params(4, 2.5, 3.0, 0.5, 0.3)?,
        make_params(5, 3.0, 2.0, 2.0, 1.0)?,
        make_params(4, 2.0, 1.5, 0.2, 0.0)?,
    ];
    let grid = experiments::default_eps_grid();
    let mut worst: f64 = 0.0;
    for g in &sets {
        let (_, fit) = experiments::sweep_thin_ellipsoid(g, &grid)?;
        let e = experiments::thin_exponent(g);
        worst = worst.max((fit.slope - e).abs() / e.abs());
    }
    Ok((worst <= 0.02, format!("5 parameter sets, ε to {:.0e}; max rel slope error {worst:.2e}", grid[grid.len() - 1])))
}

fn ac7_elongated() -> Result<(bool, String)> {
    let g = make_params(4, 2.0, 2.0, 0.0, 0.0)?;
    let (_, fit) = experiments::sweep_elongated_ellipsoid(&g, &experiments::default_eps_grid())?;
    let slope_err = (fit.slope + 0.5).abs() / 0.5;
    let eps = 1e-4;
    let qcfg = QuadratureConfig::default();
    let oracle = capacity::cap2_ellipsoid_oracle([1.0, eps, eps], &qcfg)?;
    let log_inv = (1.0 / eps).ln();
    let asym = capacity::cap2_thin_ellipsoid_asymptotic(3, eps)? * log_inv / (4.0 * PI);
    let oracle_ratio = oracle * log_inv / (4.0 * PI);
    let ok = slope_err <= 0.05 && (asym - 1.0).abs() <= 0.15 && (oracle_ratio - 1.0).abs() <= 0.15;
    Ok((ok, format!("d=4 slope {:.4} (target -0.5); d=3 oracle·log(1/ε)/(4π) = {oracle_ratio:.4} at ε=1e-4", fit.slope)))
}

fn ac8_ball_extremality() -> Result<(bool, String)> {
    let qcfg = QuadratureConfig::default();
    let scfg = SearchConfig::default();
    let suite = random_ellipsoids(3, 50, SUITE_SEED + 8);

    let g_max = make_params(3, 2.0, 2.0, 1.0, 2.0)?;
    let ball_max = g_ball_exact(&g_max);
    // r < 0 forces α < 0 at (d, p, q) = (3, 2, 2); see make_params_signed_alpha
    let g_min = functional::make_params_signed_alpha(3, 2.0, 2.0, -0.5, 0.0)?;
    let ball_min = g_ball_exact(&g_min);
    let mut max_ratio: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for body in &suite {
        let pb = PreparedBody::new(body)?;
        let hi = functional::oracle_interval_prepared(&pb, &g_max, &qcfg)?.map(|o| o.hi).unwrap_or(f64::NAN);
        let lo = functional::oracle_interval_prepared(&pb, &g_min, &qcfg)?.map(|o| o.lo).unwrap_or(f64::NAN);
        max_ratio = max_ratio.max(hi / ball_max);
        min_ratio = min_ratio.min(lo / ball_min);
    }
    let smax = experiments::shape_search_max(&g_max, Family::EllipsoidAspect, &scfg)?;
    let smin = experiments::shape_search_min(&g_min, Family::EllipsoidAspect, &scfg)?;
    let (amax, amin) = (axis_ratio(&smax.body), axis_ratio(&smin.body));
    let ok = max_ratio <= 1.0 + 1e-9
        && min_ratio >= 1.0 - 1e-9
        && (amax - 1.0).abs() <= 1e-2
        && (amin - 1.0).abs() <= 1e-2;
    Ok((
        ok,
        format!(
            "max oracle G/G(B1) {max_ratio:.6} (r=1, β=2); min oracle G/G(B1) {min_ratio:.6} (r=-0.5); search aspect ratios {amax:.5}, {amin:.5}"
        ),
    ))
}

fn ac9_sup_bound() -> Result<(bool, String)> {
    let g = make_params(3, 2.0, 2.0, 1.0, 0.0)?;
    let s = functional::sup_bound_rhs(&g)?;
    let ball = g_ball_exact(&g);
    let b1_factor = s.branch1.unwrap_or(f64::NAN) / ball;
    let qcfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for body in random_ellipsoids(3, 50, SUITE_SEED + 8) {
        let pb = PreparedBody::new(&body)?;
        if let Some(o) = functional::oracle_interval_prepared(&pb, &g, &qcfg)? {
            worst = worst.max(o.hi / s.value);
        }
    }
    let ok = rel(s.value, 1.0) <= 1e-12 && rel(b1_factor, 5.0) <= 1e-12 && worst <= 1.0;
    Ok((ok, format!("RHS {:.15} (branch-1 factor {b1_factor:.12}); max oracle G / RHS {worst:.4}", s.value)))
}

fn ac10_monte_carlo() -> Result<(bool, String)> {
    let cases = [
        (ConvexBody::cuboid(vec![1.0, 1.0, 1.0])?, 0.5),
        (ConvexBody::unit_ball(3)?, 0.3),
        (ConvexBody::ellipsoid(vec![2.0, 1.0, 0.5])?, 0.4),
    ];
    let mut worst: f64 = 0.0;
    for (i, (body, t)) in cases.iter().enumerate() {
        let c = mc_validate_steiner(body, *t, 1_000_000, SUITE_SEED + i as u64)?;
        worst = worst.max(c.z_score.abs());
    }
    Ok((worst <= 4.0, format!("3 neighbourhoods, 1e6 samples each; max |z| {worst:.3}")))
}
