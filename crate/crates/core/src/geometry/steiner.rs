//! Quermassintegrals and the Steiner polynomial `|K_t| = Σ C(d,n) W_n t^n`.

use serde::{Deserialize, Serialize};

use super::body::{binomial, elementary_symmetric, gamma_half_integer, unit_ball_volume, BodyKind, ConvexBody};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, integrate, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteinerMethod {
    Exact,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerPolynomial {
    dim: usize,
    w: Vec<f64>,
    method: SteinerMethod,
}

impl SteinerPolynomial {
    /// Builds a polynomial from quermassintegrals `W_0..=W_d`.
    pub fn new(w: Vec<f64>, method: SteinerMethod) -> Result<Self> {
        if w.len() < 3 {
            return Err(Error::InvalidInput("Steiner polynomial needs d >= 2".into()));
        }
        if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidInput(format!("quermassintegrals must be positive, got {w:?}")));
        }
        let dim = w.len() - 1;
        let omega = unit_ball_volume(dim);
        if ((w[dim] - omega) / omega).abs() > 1e-8 {
            return Err(Error::InvalidInput(format!("W_d must equal ω_d = {omega}, got {}", w[dim])));
        }
        Ok(Self { dim, w, method })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Quermassintegrals `W_0..=W_d`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn method(&self) -> SteinerMethod {
        self.method
    }

    pub fn volume(&self) -> f64 {
        self.w[0]
    }

    pub fn perimeter(&self) -> f64 {
        self.dim as f64 * self.w[1]
    }

    /// Integral of the mean curvature, `d·W_2`.
    pub fn mean_curvature_integral(&self) -> f64 {
        self.dim as f64 * self.w[2]
    }

    /// `|K_t|`; the caller guarantees `t ≥ 0`.
    fn volume_at(&self, t: f64) -> f64 {
        let d = self.dim;
        (0..=d).rev().fold(0.0, |acc, n| acc * t + binomial(d, n) * self.w[n])
    }

    fn perimeter_at(&self, t: f64) -> f64 {
        let d = self.dim;
        (1..=d)
            .rev()
            .fold(0.0, |acc, n| acc * t + n as f64 * binomial(d, n) * self.w[n])
    }

    /// Volume of the outer parallel body `K_t`.
    pub fn steiner_volume(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.volume_at(t))
    }

    /// Perimeter of `K_t`, the `t`-derivative of [`Self::steiner_volume`].
    pub fn steiner_perimeter(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.perimeter_at(t))
    }

    /// Infallible profile `t ↦ P(K_t)` for quadrature callers (negative `t` clamps to 0).
    pub fn perimeter_profile(&self) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.perimeter_at(t.max(0.0))
    }

    /// Slack of every Aleksandrov–Fenchel inequality
    /// `W_j^{k-i} ≥ W_i^{k-j} W_k^{j-i}`, `0 ≤ i < j < k ≤ d`.
    pub fn aleksandrov_fenchel_slacks(&self) -> Vec<AfSlack> {
        let d = self.dim;
        let lw: Vec<f64> = self.w.iter().map(|x| x.ln()).collect();
        let mut out = Vec::new();
        for i in 0..=d {
            for j in i + 1..=d {
                for k in j + 1..=d {
                    let log_ratio = (k - i) as f64 * lw[j] - (k - j) as f64 * lw[i] - (j - i) as f64 * lw[k];
                    out.push(AfSlack { i, j, k, slack: log_ratio.exp_m1() });
                }
            }
        }
        out
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("parallel distance t must be >= 0, got {t}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfSlack {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub slack: f64,
}

/// Computes the quermassintegrals of `body`.
pub fn steiner_of(body: &ConvexBody) -> Result<SteinerPolynomial> {
    let d = body.dim();
    match body.kind() {
        BodyKind::Ball { radius } => {
            let omega = unit_ball_volume(d);
            let w = (0..=d).map(|n| omega * radius.powi((d - n) as i32)).collect();
            SteinerPolynomial::new(w, SteinerMethod::Exact)
        }
        BodyKind::Cuboid { edge_lengths } => {
            // C(d,n) W_n = ω_n e_{d-n}(L)
            let e = elementary_symmetric(edge_lengths);
            let w = (0..=d)
                .map(|n| unit_ball_volume(n) * e[d - n] / binomial(d, n))
                .collect();
            SteinerPolynomial::new(w, SteinerMethod::Exact)
        }
        BodyKind::Ellipsoid { semi_axes } => {
            let mut w = ellipsoid_quermassintegrals(semi_axes)?;
            w[0] = body.volume();
            w[d] = unit_ball_volume(d);
            SteinerPolynomial::new(w, SteinerMethod::Quadrature)
        }
    }
}

/// Agreement required between successive product rules.
const SURFACE_RTOL: f64 = 1e-8;
/// Upper bound on the number of product-rule nodes per orthant.
const MAX_SURFACE_NODES: f64 = 16_777_216.0;

fn surface_rule_sizes(d: usize) -> (usize, usize) {
    let start = match d {
        2 | 3 => 64,
        4 => 24,
        5 => 16,
        _ => 8,
    };
    let by_budget = MAX_SURFACE_NODES.powf(1.0 / (d - 1) as f64).floor() as usize;
    let cap = if d == 3 { 512 } else { by_budget.min(4096) };
    (start, cap.max(start))
}

/// Quermassintegrals `W_0..=W_d` of the ellipsoid with the given semi-axes.
///
/// Uses the Gauss-map form of the curvature integrals:
/// `W_n = (d·C(d-1,n-1))^{-1} ∫_{S^{d-1}} e_{d-n}(R(u)) dσ(u)` for `1 ≤ n ≤ d`,
/// where `R(u)` are the principal radii of curvature at the boundary point
/// with outer normal `u`. With `h(u) = |Au|`,
/// `e_k(R) = e_k(a²)/h^k − Σ_i a_i⁴ u_i² e_{k−1}(a²_{−i})/h^{k+2}`.
///
/// Both terms are homogeneous in `u`, so integrating against `e^{−|x|²}` and
/// writing `h^{−s} = Γ(s/2)^{−1} ∫ t^{s/2−1} e^{−t h²} dt` reduces each sphere
/// integral to
/// `(c_k/k) ∫_0^∞ t^{k/2−1} Π_j (1+t a_j²)^{−1/2} Σ_i a_i² e_{k−1}(a²_{−i})/(1+t a_i²) dt`
/// with `c_k = 2π^{d/2}/(Γ((d−k)/2)Γ(k/2))`, integrated in `log t`.
pub fn ellipsoid_quermassintegrals(semi_axes: &[f64]) -> Result<Vec<f64>> {
    let d = semi_axes.len();
    if d < 2 {
        return Err(Error::InvalidInput("ellipsoid needs d >= 2".into()));
    }
    let scale = semi_axes.iter().copied().fold(0.0, f64::max);
    let a2: Vec<f64> = semi_axes.iter().map(|a| (a / scale).powi(2)).collect();
    let a2_min = a2.iter().copied().fold(f64::INFINITY, f64::min);
    let e_without: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let rest: Vec<f64> = a2.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            elementary_symmetric(&rest)
        })
        .collect();
    let cfg = QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-300, max_subdivisions: 4000 };
    let (v_lo, v_hi) = (-90.0, -a2_min.ln() + 90.0);
    let pi_half_d = std::f64::consts::PI.powf(d as f64 / 2.0);

    let mut w = vec![0.0; d + 1];
    w[0] = unit_ball_volume(d) * semi_axes.iter().product::<f64>();
    w[d] = unit_ball_volume(d);
    for n in 1..d {
        let k = d - n;
        let kf = k as f64;
        let f = |v: f64| {
            let t = v.exp();
            let ln_prod: f64 = a2.iter().map(|a| (t * a).ln_1p()).sum::<f64>();
            let sum: f64 = (0..d).map(|i| a2[i] * e_without[i][k - 1] / (1.0 + t * a2[i])).sum();
            (0.5 * kf * v - 0.5 * ln_prod).exp() * sum
        };
        let integral = integrate(f, v_lo, v_hi, &cfg)?;
        let c = 2.0 * pi_half_d / (gamma_half_integer(d - k) * gamma_half_integer(k));
        let sphere = c / kf * integral;
        w[n] = sphere / (d as f64 * binomial(d - 1, n - 1)) * scale.powi(k as i32);
    }
    Ok(w)
}

/// Same quantities from a Gauss–Legendre product rule on the sphere, doubled
/// until successive rules agree to `1e-8`. Slow beyond `d = 4`; kept as an
/// independent check of [`ellipsoid_quermassintegrals`].
pub fn ellipsoid_quermassintegrals_surface(semi_axes: &[f64]) -> Result<Vec<f64>> {
    let d = semi_axes.len();
    if d < 2 {
        return Err(Error::InvalidInput("ellipsoid needs d >= 2".into()));
    }
    let (mut n, cap) = surface_rule_sizes(d);
    let mut prev = sphere_curvature_integrals(semi_axes, n);
    loop {
        let next_n = 2 * n;
        if next_n > cap {
            return Err(Error::SurfaceQuadrature(format!(
                "ellipsoid {semi_axes:?}: no agreement to {SURFACE_RTOL:e} with {n} nodes per angle"
            )));
        }
        let next = sphere_curvature_integrals(semi_axes, next_n);
        let agree = prev
            .iter()
            .zip(&next)
            .all(|(a, b)| (a - b).abs() <= SURFACE_RTOL * b.abs());
        n = next_n;
        prev = next;
        if agree {
            break;
        }
    }
    let mut w = vec![0.0; d + 1];
    w[0] = unit_ball_volume(d) * semi_axes.iter().product::<f64>();
    for nn in 1..=d {
        w[nn] = prev[d - nn] / (d as f64 * binomial(d - 1, nn - 1));
    }
    Ok(w)
}

/// `∫_{S^{d-1}} e_k(R(u)) dσ(u)` for `k = 0..d-1` with an `n`-point rule per angle.
fn sphere_curvature_integrals(semi_axes: &[f64], n: usize) -> Vec<f64> {
    let d = semi_axes.len();
    let a2: Vec<f64> = semi_axes.iter().map(|a| a * a).collect();
    let e_all = elementary_symmetric(&a2);
    // e_j of a² with index i removed
    let e_without: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let rest: Vec<f64> = a2.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            elementary_symmetric(&rest)
        })
        .collect();

    let (x, wts) = gauss_legendre(n);
    let quarter = std::f64::consts::FRAC_PI_4;
    let angles: Vec<(f64, f64, f64)> = x
        .iter()
        .zip(&wts)
        .map(|(xi, wi)| {
            let th = quarter * (xi + 1.0);
            (th.cos(), th.sin(), quarter * wi)
        })
        .collect();

    let n_angles = d - 1;
    let mut idx = vec![0usize; n_angles];
    let mut acc = vec![0.0; d];
    let mut u = vec![0.0; d];
    loop {
        let mut weight = 1.0;
        let mut sin_prod = 1.0;
        for (m, &ix) in idx.iter().enumerate() {
            let (c, s, w) = angles[ix];
            u[m] = sin_prod * c;
            // Jacobian factor sin^{d-2-m}(θ_m)
            weight *= w * s.powi((n_angles - 1 - m) as i32);
            sin_prod *= s;
        }
        u[d - 1] = sin_prod;

        let h2: f64 = u.iter().zip(&a2).map(|(ui, ai)| ai * ui * ui).sum();
        let h = h2.sqrt();
        let mut h_pow = 1.0;
        for k in 0..d {
            let mut val = e_all[k];
            if k >= 1 {
                for i in 0..d {
                    let c = a2[i] * a2[i] * u[i] * u[i] / h2;
                    val -= c * e_without[i][k - 1];
                }
            }
            acc[k] += weight * val / h_pow;
            h_pow *= h;
        }

        // odometer over the angle indices
        let mut m = 0;
        loop {
            if m == n_angles {
                let orthants = (1u64 << d) as f64;
                return acc.into_iter().map(|v| v * orthants).collect();
            }
            idx[m] += 1;
            if idx[m] < n {
                break;
            }
            idx[m] = 0;
            m += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn one_dimensional_reduction_matches_surface_rule() {
        for axes in [
            vec![2.0, 1.0, 0.5],
            vec![3.0, 0.4, 1.1],
            vec![1.0, 1.0, 0.1],
            vec![2.0, 1.0, 0.5, 1.3],
            vec![0.6, 1.5, 2.2, 0.9],
            vec![4.0, 0.3],
        ] {
            let fast = ellipsoid_quermassintegrals(&axes).unwrap();
            let slow = ellipsoid_quermassintegrals_surface(&axes).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!(rel(*a, *b) < 1e-7, "{axes:?}: {fast:?} vs {slow:?}");
            }
        }
    }

    #[test]
    fn needle_and_pancake_stay_accurate() {
        // thin spheroids (1, ε, ε) and (1, 1, ε): closed-form surface areas
        for eps in [1e-2_f64, 1e-4] {
            let e = (1.0 - eps * eps).sqrt();
            let prolate = 2.0 * PI * (eps * eps + eps * e.asin() / e);
            let w = ellipsoid_quermassintegrals(&[1.0, eps, eps]).unwrap();
            assert!(rel(3.0 * w[1], prolate) < 1e-9, "{eps}");
            let oblate = 2.0 * PI * (1.0 + eps * eps / e * ((1.0 + e) / eps).ln());
            let w = ellipsoid_quermassintegrals(&[1.0, 1.0, eps]).unwrap();
            assert!(rel(3.0 * w[1], oblate) < 1e-9, "{eps}");
        }
    }

    #[test]
    fn unit_ball_d3() {
        let s = steiner_of(&ConvexBody::unit_ball(3).unwrap()).unwrap();
        for w in s.w() {
            assert!(rel(*w, 4.0 * PI / 3.0) < 1e-15);
        }
        assert_eq!(s.method(), SteinerMethod::Exact);
    }

    #[test]
    fn unit_cube_d3() {
        let s = steiner_of(&ConvexBody::cuboid(vec![1.0; 3]).unwrap()).unwrap();
        let expect = [1.0, 2.0, PI, 4.0 * PI / 3.0];
        for (w, e) in s.w().iter().zip(expect) {
            assert!(rel(*w, e) < 1e-15, "{w} vs {e}");
        }
        assert!((s.perimeter() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn prolate_spheroid_perimeter_matches_closed_form() {
        let (a, b) = (2.0_f64, 1.0_f64);
        let e = (1.0 - b * b / (a * a)).sqrt();
        let oracle = 2.0 * PI * (b * b + a * b * e.asin() / e);
        assert!((oracle - 21.478_8).abs() < 1e-3, "{oracle}");
        let s = steiner_of(&ConvexBody::ellipsoid(vec![a, b, b]).unwrap()).unwrap();
        assert!(rel(s.perimeter(), oracle) < 1e-6, "{} vs {oracle}", s.perimeter());
        assert!(rel(s.volume(), 8.0 * PI / 3.0) < 1e-15);
    }

    #[test]
    fn ellipse_perimeter_matches_elliptic_series() {
        // Ramanujan-II is accurate to ~1e-10 at this eccentricity; use a fine trapezoid instead
        let (a, b) = (3.0_f64, 1.0_f64);
        let m = 200_000;
        let per: f64 = (0..m)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64;
        let s = steiner_of(&ConvexBody::ellipsoid(vec![a, b]).unwrap()).unwrap();
        assert!(rel(s.perimeter(), per) < 1e-9, "{} vs {per}", s.perimeter());
    }

    #[test]
    fn ellipsoid_given_as_ball_matches_exact() {
        for d in 2..=5 {
            let s = steiner_of(&ConvexBody::ellipsoid(vec![1.5; d]).unwrap()).unwrap();
            let b = steiner_of(&ConvexBody::ball(d, 1.5).unwrap()).unwrap();
            for (x, y) in s.w().iter().zip(b.w()) {
                assert!(rel(*x, *y) < 1e-10, "d={d}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn gauss_curvature_integral_is_sphere_area() {
        // unforced W_d must come out as ω_d from the quadrature itself
        let w = ellipsoid_quermassintegrals(&[2.0, 1.0, 0.5, 1.3]).unwrap();
        assert!(rel(w[4], unit_ball_volume(4)) < 1e-9);
    }

    #[test]
    fn steiner_values() {
        let ball = steiner_of(&ConvexBody::unit_ball(3).unwrap()).unwrap();
        assert!(rel(ball.steiner_volume(1.0).unwrap(), 32.0 * PI / 3.0) < 1e-14);
        assert!(rel(ball.steiner_perimeter(1.0).unwrap(), 16.0 * PI) < 1e-14);
        let cube = steiner_of(&ConvexBody::cuboid(vec![1.0; 3]).unwrap()).unwrap();
        let expect = 1.0 + 3.0 + 3.0 * PI * 0.25 + 4.0 * PI / 3.0 * 0.125;
        assert!(rel(cube.steiner_volume(0.5).unwrap(), expect) < 1e-14);
        assert!((expect - 6.8797).abs() < 1e-4);
        assert_eq!(cube.steiner_volume(0.0).unwrap(), 1.0);
        assert_eq!(cube.steiner_perimeter(0.0).unwrap(), 6.0);
        assert!(cube.steiner_volume(-0.1).is_err());
        assert!(cube.steiner_perimeter(f64::NAN).is_err());
    }

    #[test]
    fn perimeter_is_derivative_of_volume() {
        let bodies = [
            ConvexBody::ellipsoid(vec![2.0, 1.0, 1.0]).unwrap(),
            ConvexBody::cuboid(vec![1.0, 2.0, 3.0, 0.5]).unwrap(),
            ConvexBody::ball(5, 0.7).unwrap(),
        ];
        for body in &bodies {
            let s = steiner_of(body).unwrap();
            for t in [0.1_f64, 0.7, 1.0, 10.0] {
                let h = 1e-6 * t.max(1.0);
                let fd = (s.steiner_volume(t + h).unwrap() - s.steiner_volume(t - h).unwrap()) / (2.0 * h);
                assert!(rel(s.steiner_perimeter(t).unwrap(), fd) < 1e-6, "{body} t={t}");
            }
        }
    }

    #[test]
    fn af_slacks() {
        let ball = steiner_of(&ConvexBody::unit_ball(4).unwrap()).unwrap();
        assert!(ball.aleksandrov_fenchel_slacks().iter().all(|s| s.slack.abs() < 1e-14));
        let cube = steiner_of(&ConvexBody::cuboid(vec![1.0; 3]).unwrap()).unwrap();
        let s = cube
            .aleksandrov_fenchel_slacks()
            .into_iter()
            .find(|s| (s.i, s.j, s.k) == (0, 1, 2))
            .unwrap();
        assert!((s.slack - (4.0 / PI - 1.0)).abs() < 1e-14);
        let ell = steiner_of(&ConvexBody::ellipsoid(vec![2.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(ell.aleksandrov_fenchel_slacks().iter().all(|s| s.slack >= -1e-7));
    }

    #[test]
    fn scaling_of_quermassintegrals() {
        let e = ConvexBody::ellipsoid(vec![1.7, 0.9, 1.2]).unwrap();
        let s1 = steiner_of(&e).unwrap();
        let s3 = steiner_of(&e.scaled(3.0).unwrap()).unwrap();
        for n in 0..=3 {
            assert!(rel(s3.w()[n], 3f64.powi(3 - n as i32) * s1.w()[n]) < 1e-9);
        }
    }

    #[test]
    fn rejects_invalid_polynomial() {
        assert!(SteinerPolynomial::new(vec![1.0, 1.0, 1.0], SteinerMethod::Exact).is_err());
        assert!(SteinerPolynomial::new(vec![1.0, -1.0, PI], SteinerMethod::Exact).is_err());
    }
}
