mod common;

use std::f64::consts::PI;

use common::{angles, apply, cloud, rotation};
use hullcurve::bodies::{ConvexBody, SphereQuadrature};
use hullcurve::curves::Polyline;
use hullcurve::grassmann::{
    grassmann_total_mass, kubota_length_factor, mean_projected_length, plane_at, verify_kubota_length,
    verify_projection_norm, PlaneFrame,
};
use hullcurve::linalg::{dot, norm};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_frames_are_orthonormal(n in 2usize..12, seed in any::<u64>(), idx in any::<u64>()) {
        let f = plane_at(n, seed, idx).unwrap();
        let (e, g) = f.basis();
        prop_assert!((norm(e) - 1.0).abs() < 1e-12);
        prop_assert!((norm(g) - 1.0).abs() < 1e-12);
        prop_assert!(dot(e, g).abs() < 1e-12);
    }

    #[test]
    fn kubota_estimate_is_rotation_invariant(pts in cloud(3, 2, 8), a in angles()) {
        let c = Polyline::new(pts.clone()).unwrap();
        prop_assume!(c.length() > 1e-3);
        let r = rotation(3, &a);
        let zero = [0.0; 3];
        let rc = Polyline::new(pts.iter().map(|p| apply(&r, p, &zero)).collect()).unwrap();
        let x = mean_projected_length(&c, 4_000, 5).unwrap();
        let y = mean_projected_length(&rc, 4_000, 6).unwrap();
        let se = x.std_error.hypot(y.std_error);
        prop_assert!((x.estimate - y.estimate).abs() <= 4.5 * se + 1e-9, "{:?} vs {:?}", x, y);
    }

    #[test]
    fn projected_length_scales_linearly(pts in cloud(4, 2, 8), t in 0.1..10.0f64) {
        let c = Polyline::new(pts).unwrap();
        let a = mean_projected_length(&c, 500, 1).unwrap().estimate;
        let b = mean_projected_length(&c.similar(t, &[1.0, 2.0, 3.0, 4.0]), 500, 1).unwrap().estimate;
        prop_assert!((t * a - b).abs() <= 1e-9 * (1.0 + b));
    }
}

#[test]
fn kubota_on_random_curves() {
    for (n, seed) in [(3usize, 1u64), (4, 2), (6, 3)] {
        let pts = hullcurve::inequalities::random_points(n, 9, seed, 0);
        let c = Polyline::new(pts).unwrap();
        let r = verify_kubota_length(&c, 20_000, seed).unwrap();
        assert!(r.pass, "n={n}: {r:?}");
    }
    let planar = Polyline::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let r = verify_kubota_length(&planar, 1, 0).unwrap();
    assert_eq!(r.lhs, 2f64.sqrt());
    assert_eq!(r.stat_error, 0.0);
}

#[test]
fn length_factor_closed_forms() {
    // σ_nσ_1/(σ_2σ_{n-1}): 1 in the plane, π/4 in space
    assert!((kubota_length_factor(2).unwrap() - 1.0).abs() < 1e-15);
    assert!((kubota_length_factor(3).unwrap() - PI / 4.0).abs() < 1e-15);
    assert!((kubota_length_factor(4).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!(kubota_length_factor(1).is_err());
}

#[test]
fn grassmann_masses() {
    assert!((grassmann_total_mass(2, 1).unwrap() - PI).abs() < 1e-12);
    assert!((grassmann_total_mass(3, 1).unwrap() - 2.0 * PI).abs() < 1e-12);
    for n in 2..12 {
        for k in 1..n {
            let a = grassmann_total_mass(n, k).unwrap();
            let b = grassmann_total_mass(n, n - k).unwrap();
            assert!((a - b).abs() < 1e-12 * a, "n={n} k={k}");
        }
    }
    assert!(grassmann_total_mass(3, 0).is_err());
    assert!(grassmann_total_mass(3, 3).is_err());
}

#[test]
fn projection_norm_on_polytopes_and_balls() {
    let q = SphereQuadrature::antithetic(200_000, 8).unwrap();
    let simplex = ConvexBody::polytope(vec![
        vec![0.0, 0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .unwrap();
    let r = verify_projection_norm(&simplex, 20_000, 3, &q).unwrap();
    assert!(r.pass, "{r:?}");
    let ball = ConvexBody::ball(vec![1.0, 2.0, 3.0], 0.5).unwrap();
    let r = verify_projection_norm(&ball, 50, 3, &q).unwrap();
    // every projection is a disk of radius 0.5
    assert!((r.lhs - PI).abs() < 1e-12);
    assert!(r.pass, "{r:?}");
}

#[test]
fn frame_errors() {
    assert!(PlaneFrame::new(vec![1.0, 0.0], vec![0.0, 1.0, 0.0]).is_err());
    assert!(PlaneFrame::new(vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.0]).is_err());
    assert!(plane_at(1, 0, 0).is_err());
}
