use std::f64::consts::PI;

use hullcurve::bodies::{circumscribed_polygon, ConvexBody, SphereQuadrature};
use hullcurve::grassmann::plane_at;
use hullcurve::linalg::{norm, scale};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

fn cloud(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(point(n), 3..12)
}

fn direction(n: usize) -> impl Strategy<Value = Vec<f64>> {
    point(n).prop_filter("nonzero", |u| norm(u) > 1e-3)
}

fn bodies(n: usize) -> impl Strategy<Value = ConvexBody> {
    let poly = cloud(n).prop_map(|v| ConvexBody::polytope(v).unwrap());
    let ball = (point(n), 0.1..2.0f64).prop_map(|(c, r)| ConvexBody::ball(c, r).unwrap());
    prop_oneof![poly, ball]
}

fn planar_bodies() -> impl Strategy<Value = ConvexBody> {
    let reuleaux = (prop::sample::select(vec![3usize, 5, 7]), 0.3..2.0f64, -PI..PI)
        .prop_map(|(m, w, rot)| ConvexBody::reuleaux_polygon_at(m, w, [0.5, -0.25], rot).unwrap());
    prop_oneof![bodies(2), reuleaux]
}

fn quad() -> SphereQuadrature {
    SphereQuadrature::antithetic(20_000, 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_is_positively_homogeneous(k in bodies(3), u in direction(3), t in 0.01..50.0f64) {
        let lhs = k.support(&scale(&u, t)).unwrap();
        let rhs = t * k.support(&u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) * t.max(1.0));
    }

    #[test]
    fn support_is_subadditive(k in bodies(4), u in direction(4), v in direction(4)) {
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        prop_assume!(norm(&w) > 1e-6);
        let excess = k.support(&w).unwrap() - k.support(&u).unwrap() - k.support(&v).unwrap();
        prop_assert!(excess <= 1e-12 * (1.0 + norm(&u) + norm(&v)) * 10.0);
    }

    #[test]
    fn oracle_bodies_pass_sublinearity(m in prop::sample::select(vec![3usize, 5, 9]), w in 0.2..3.0f64) {
        let k = ConvexBody::reuleaux_polygon(m, w).unwrap();
        prop_assert!(k.sublinearity_certificate(200, 1).is_ok());
        let k3 = ConvexBody::revolved_reuleaux(w).unwrap();
        prop_assert!(k3.sublinearity_certificate(200, 1).is_ok());
    }

    #[test]
    fn width_is_even(k in bodies(3), u in direction(3)) {
        let u = scale(&u, 1.0 / norm(&u));
        let minus: Vec<f64> = u.iter().map(|x| -x).collect();
        prop_assert!((k.width(&u).unwrap() - k.width(&minus).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn planar_norm_is_perimeter(k in planar_bodies()) {
        let est = k.norm(&quad()).unwrap();
        let per = k.perimeter().unwrap();
        prop_assert!(
            (est.estimate - per).abs() <= 4.0 * est.std_error + 1e-9 * (1.0 + per),
            "N = {} ± {}, perimeter {}", est.estimate, est.std_error, per
        );
    }

    #[test]
    fn norm_is_translation_invariant(k in bodies(3), v in point(3)) {
        // same directions, so the estimates agree to rounding
        let a = k.norm(&quad()).unwrap().estimate;
        let b = k.translated(&v).unwrap().norm(&quad()).unwrap().estimate;
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn norm_is_homogeneous(k in bodies(3), t in 0.1..10.0f64) {
        let a = k.norm(&quad()).unwrap().estimate;
        let b = k.scaled(t).unwrap().norm(&quad()).unwrap().estimate;
        prop_assert!((t * a - b).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn projection_support_is_lifted_support(k in bodies(4), idx in 0u64..1000, a in -PI..PI) {
        let frame = plane_at(4, 11, idx).unwrap();
        let kp = k.project(&frame).unwrap();
        let u2 = [a.cos(), a.sin()];
        let lifted = frame.lift(&u2);
        let lhs = kp.support(&u2).unwrap();
        let rhs = k.support(&lifted).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn projection_never_increases_diameter(pts in cloud(5), idx in 0u64..1000) {
        let k = ConvexBody::polytope(pts).unwrap();
        let frame = plane_at(5, 12, idx).unwrap();
        let kp = k.project(&frame).unwrap();
        prop_assert!(kp.diameter() <= k.diameter() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn circumscribed_polygon_contains_body(k in planar_bodies(), m in 3usize..40, phase in 0.0..1.0f64) {
        let poly = circumscribed_polygon(&k, m, phase);
        let outer = ConvexBody::polytope(poly).unwrap();
        for t in 0..64 {
            let a = 2.0 * PI * t as f64 / 64.0;
            let u = [a.cos(), a.sin()];
            prop_assert!(outer.support(&u).unwrap() >= k.support(&u).unwrap() - 1e-9);
        }
    }
}

#[test]
fn ball_norms() {
    // N(B^n) = σ_{n-1}
    for n in 2..=6 {
        let b = ConvexBody::unit_ball(n).unwrap();
        let est = b.norm(&quad()).unwrap();
        let area = hullcurve::constants::sphere_area(n).unwrap();
        assert!((est.estimate - area).abs() < 1e-12 * area);
        assert_eq!(est.std_error, 0.0);
    }
}

#[test]
fn segment_mean_width_matches_closed_form() {
    // width of a unit segment is |<u, e1>|, whose mean is Γ(n/2)/(√π·Γ((n+1)/2))
    for (n, exact) in [(2usize, 2.0 / PI), (3, 0.5), (4, 4.0 / (3.0 * PI))] {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        let k = ConvexBody::segment(vec![0.0; n], e).unwrap();
        let est = k.mean_width(&SphereQuadrature::antithetic(200_000, 9).unwrap()).unwrap();
        assert!(
            (est.estimate - exact).abs() <= 4.0 * est.std_error,
            "n={n}: {} ± {} vs {exact}",
            est.estimate,
            est.std_error
        );
    }
}

#[test]
fn cube_mean_width_matches_closed_form() {
    // unit cube in R^3: mean width = 3/2
    let k = ConvexBody::unit_cube(3).unwrap();
    let est = k.mean_width(&SphereQuadrature::antithetic(200_000, 4).unwrap()).unwrap();
    assert!((est.estimate - 1.5).abs() <= 4.0 * est.std_error);
}

#[test]
fn reuleaux_has_constant_width_and_stated_diameter() {
    for m in [3, 5, 7, 11] {
        let k = ConvexBody::reuleaux_polygon(m, 1.25).unwrap();
        assert!(k.constant_width_certificate(5_000, 2).unwrap() < 1e-9);
        assert!((k.diameter() - 1.25).abs() < 1e-9);
        assert!((k.perimeter().unwrap() - 1.25 * PI).abs() < 1e-12);
    }
    let k = ConvexBody::revolved_reuleaux(0.75).unwrap();
    assert!(k.constant_width_certificate(5_000, 2).unwrap() < 1e-9);
}

#[test]
fn rejects_bad_directions_and_bodies() {
    let k = ConvexBody::unit_cube(3).unwrap();
    assert!(k.support(&[0.0, 0.0, 0.0]).is_err());
    assert!(k.support(&[1.0, 0.0]).is_err());
    assert!(k.width(&[2.0, 0.0, 0.0]).is_err());
    assert!(ConvexBody::polytope(vec![]).is_err());
    assert!(ConvexBody::polytope(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
    assert!(ConvexBody::ball(vec![0.0, 0.0], -1.0).is_err());
    assert!(ConvexBody::reuleaux_polygon(4, 1.0).is_err());
    assert!(ConvexBody::polytope(vec![vec![f64::NAN, 0.0]]).is_err());
}

#[test]
fn support_of_polytope_is_vertex_max() {
    let k = ConvexBody::unit_cube(4).unwrap();
    let u: [f64; 4] = [0.3, -0.2, 0.5, 0.1];
    let expect: f64 = u.iter().map(|x| x.max(0.0)).sum();
    assert!((k.support(&u).unwrap() - expect).abs() < 1e-15);
}
