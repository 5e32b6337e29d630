use capq_core::acceptance::{parameter_grid, random_cuboids, random_ellipsoids};
use capq_core::capacity::{self, CapParams};
use capq_core::functional::{self, g_ball_exact};
use capq_core::geometry::{ellipsoid_quermassintegrals, steiner_of};
use capq_core::torsion::{self, constants_c1_c2, TorsionParams};
use capq_core::{ConvexBody, PreparedBody, QuadratureConfig, SearchConfig};
use proptest::prelude::*;

fn suite(seed: u64) -> Vec<ConvexBody> {
    let mut out = Vec::new();
    for d in 2..=5 {
        out.push(ConvexBody::unit_ball(d).unwrap());
        out.extend(random_ellipsoids(d, 6, seed + d as u64));
        out.extend(random_cuboids(d, 6, seed + 10 + d as u64));
    }
    out
}

#[test]
fn capacity_reports_are_ordered_on_random_bodies() {
    let qcfg = QuadratureConfig::default();
    let scfg = SearchConfig::default();
    for body in suite(1) {
        let d = body.dim();
        let pb = PreparedBody::new(&body).unwrap();
        for p in [1.3, 0.5 * (d as f64 + 1.0), d as f64 - 0.2] {
            let cp = CapParams::new(d, p).unwrap();
            let rep = capacity::cap_report_prepared(&pb, &cp, &qcfg, &scfg);
            assert!(rep.violations.is_empty(), "{body} p={p}: {:?}", rep.violations);
            assert!(!rep.uppers.is_empty());
            // the profile bound is never worse than the perimeter-volume bound it implies
            let prof = rep.uppers[&capacity::UpperMethod::SteinerProfile];
            let pm = rep.uppers[&capacity::UpperMethod::PerimeterMeasure];
            assert!(prof <= pm * (1.0 + 1e-9), "{body} p={p}: {prof} > {pm}");
        }
    }
}

#[test]
fn torsion_bounds_are_ordered_on_random_bodies() {
    for body in suite(2) {
        for q in [1.5, 2.0, 5.0] {
            let tp = TorsionParams::new(q, 1.0).unwrap();
            let i = torsion::torsion_interval_inradius(&body, &tp);
            assert!(0.0 < i.lo && i.lo <= i.hi);
            assert!(torsion::torsion_upper_saint_venant(&body, &tp) >= i.lo * (1.0 - 1e-12));
        }
    }
}

#[test]
fn constants_are_ordered_on_a_grid() {
    for d in 2..=6 {
        for q in [1.1, 1.5, 2.0, 3.0, 10.0] {
            for r in [-3.0, -1.0, -0.2, 0.0, 0.2, 1.0, 3.0] {
                let (c1, c2) = constants_c1_c2(d, &TorsionParams::new(q, r).unwrap());
                assert!(0.0 < c1 && c1 <= c2, "d={d} q={q} r={r}");
            }
        }
    }
}

#[test]
fn g_intervals_are_ordered_and_contain_the_ball() {
    for g in parameter_grid().into_iter().step_by(7) {
        let d = g.d();
        let ball = functional::g_interval(&ConvexBody::unit_ball(d).unwrap(), &g).unwrap();
        let exact = g_ball_exact(&g);
        assert!(ball.lo <= exact * (1.0 + 1e-9) && exact <= ball.hi * (1.0 + 1e-9));
        for body in random_ellipsoids(d, 2, 3).into_iter().chain(random_cuboids(d, 2, 4)) {
            let gi = functional::g_interval(&body, &g).unwrap();
            assert!(0.0 < gi.lo && gi.lo <= gi.hi && gi.hi.is_finite(), "{body} {gi:?}");
        }
    }
}

#[test]
fn oracle_based_g_respects_the_infimum_bound() {
    let qcfg = QuadratureConfig::default();
    for (r, beta) in [(0.0, 0.0), (0.1, 0.0), (0.2, 0.0), (0.05, 0.3)] {
        let g = functional::make_params(3, 2.0, 2.0, r, beta).unwrap();
        let rhs = functional::inf_bound_rhs(&g).unwrap();
        for body in random_ellipsoids(3, 20, 5) {
            let pb = PreparedBody::new(&body).unwrap();
            let o = functional::oracle_interval_prepared(&pb, &g, &qcfg).unwrap().unwrap();
            assert!(o.lo >= rhs, "{body} r={r}: {} < {rhs}", o.lo);
        }
    }
}

#[test]
fn ellipsoid_quermassintegrals_agree_with_boxes_bracketing_them() {
    // W_n is monotone under inclusion: inscribed box ⊂ E ⊂ circumscribed box
    for body in random_ellipsoids(4, 5, 6) {
        let axes = body.half_widths();
        let w = steiner_of(&body).unwrap();
        let outer = steiner_of(&ConvexBody::cuboid(axes.iter().map(|a| 2.0 * a).collect()).unwrap()).unwrap();
        let s = 2.0 / (axes.len() as f64).sqrt();
        let inner = steiner_of(&ConvexBody::cuboid(axes.iter().map(|a| s * a).collect()).unwrap()).unwrap();
        for n in 0..=4 {
            assert!(inner.w()[n] <= w.w()[n] && w.w()[n] <= outer.w()[n]);
        }
    }
}

proptest! {
    #[test]
    fn ellipsoid_quermassintegrals_scale_and_are_symmetric(
        a in 0.2f64..5.0, b in 0.2f64..5.0, c in 0.2f64..5.0, t in 0.1f64..10.0,
    ) {
        let w = ellipsoid_quermassintegrals(&[a, b, c]).unwrap();
        let ws = ellipsoid_quermassintegrals(&[t * a, t * b, t * c]).unwrap();
        let wp = ellipsoid_quermassintegrals(&[c, a, b]).unwrap();
        for n in 0..=3 {
            let k = t.powi(3 - n as i32);
            prop_assert!(((ws[n] - k * w[n]) / (k * w[n])).abs() < 1e-10);
            prop_assert!(((wp[n] - w[n]) / w[n]).abs() < 1e-10);
        }
    }

    #[test]
    fn capacity_bounds_are_monotone_under_inclusion(a in 0.3f64..3.0, b in 0.3f64..3.0, grow in 1.0f64..2.0) {
        let cp = CapParams::new(3, 2.0).unwrap();
        let qcfg = QuadratureConfig::default();
        let small = ConvexBody::ellipsoid(vec![a, b, 1.0]).unwrap();
        let large = ConvexBody::ellipsoid(vec![a * grow, b, 1.0]).unwrap();
        let o1 = capacity::cap2_ellipsoid_oracle([a, b, 1.0], &qcfg).unwrap();
        let o2 = capacity::cap2_ellipsoid_oracle([a * grow, b, 1.0], &qcfg).unwrap();
        prop_assert!(o1 <= o2 * (1.0 + 1e-12));
        let u1 = capacity::cap_upper_steiner_profile(&small, &cp, &qcfg).unwrap();
        let u2 = capacity::cap_upper_steiner_profile(&large, &cp, &qcfg).unwrap();
        prop_assert!(u1 <= u2 * (1.0 + 1e-9));
        prop_assert!(o1 <= u1 * (1.0 + 1e-9));
    }
}
