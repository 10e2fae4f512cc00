mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphsep::convexity::project_body;
use sphsep::geometry::{dot, norm, orthonormal_frame};
use sphsep::{SphericalBody, TangentFrame, UnitPoint};

fn nonzero_vec() -> impl Strategy<Value = Vec<f64>> {
    (2usize..7)
        .prop_flat_map(|d| proptest::collection::vec(-10.0f64..10.0, d))
        .prop_filter("norm away from zero", |v| norm(v) > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn normalize_is_idempotent(v in nonzero_vec()) {
        let p = UnitPoint::normalize(&v, 1e-12).unwrap();
        let q = UnitPoint::normalize(p.coords(), 1e-12).unwrap();
        prop_assert!(max_abs_diff(p.coords(), q.coords()) <= 4e-16);
        prop_assert!((norm(p.coords()) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn normalize_ignores_positive_scale(v in nonzero_vec(), s in 1e-3f64..1e3) {
        let p = UnitPoint::normalize(&v, 1e-12).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
        let q = UnitPoint::normalize(&scaled, 1e-12).unwrap();
        prop_assert!(max_abs_diff(p.coords(), q.coords()) <= 1e-15);
    }

    #[test]
    fn frames_are_orthonormal(b in nonzero_vec()) {
        let base = UnitPoint::normalize(&b, 1e-12).unwrap();
        let frame = TangentFrame::orthonormal(&base);
        prop_assert_eq!(frame.dim(), base.ambient_dim() - 1);
        for (i, u) in frame.basis().iter().enumerate() {
            prop_assert!(dot(u, base.coords()).abs() < 1e-14);
            for (j, w) in frame.basis().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot(u, w) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unproject_then_project(b in nonzero_vec(), seed in any::<u64>()) {
        let base = UnitPoint::normalize(&b, 1e-12).unwrap();
        let frame = orthonormal_frame(&base);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = gaussian(&mut rng, frame.dim()).iter().map(|v| v * 3.0).collect();
        let q = frame.central_unproject(&x).unwrap();
        prop_assert!(base.dot(q.coords()) > 0.0);
        let y = frame.central_project(&q, 1e-12).unwrap();
        let scale = 1.0 + norm(&x);
        prop_assert!(max_abs_diff(&x, &y) <= 1e-13 * scale * scale);
    }
}

#[test]
fn projection_round_trip_over_hemisphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let d = 2 + i % 5;
        let base = random_unit(&mut rng, d);
        let frame = orthonormal_frame(&base);
        let q = hemisphere_point(&mut rng, &base);
        let x = frame.central_project(&q, 0.0).unwrap();
        let back = frame.central_unproject(&x).unwrap();
        worst = worst.max(max_abs_diff(back.coords(), q.coords()));
    }
    assert!(worst < 1e-12, "worst round-trip error {worst:e}");
}

#[test]
fn points_off_the_hemisphere_are_rejected() {
    let base = UnitPoint::normalize(&[0.0, 0.0, 1.0], 1e-12).unwrap();
    let frame = orthonormal_frame(&base);
    let equator = UnitPoint::normalize(&[1.0, 0.0, 0.0], 1e-12).unwrap();
    assert!(frame.central_project(&equator, 1e-9).is_err());
    assert!(frame.central_project(&base.antipode(), 1e-9).is_err());
}

#[test]
fn fattening_keeps_vertices_interior() {
    let cfg = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..100 {
        let ambient = 2 + i % 4;
        let center = random_unit(&mut rng, ambient);
        let k = 1 + i % 5;
        let body = SphericalBody::new(cap(&mut rng, &center, k, 0.4), &cfg).unwrap();
        let frame = orthonormal_frame(&body.witness().pole);
        let poly = project_body(&body, &frame, &cfg).unwrap();
        let fat = poly.fatten(0.1).unwrap();
        for v in poly.vertices() {
            let m = fat.interior_margin(v, &cfg).unwrap().expect("vertex inside fattened hull");
            assert!(m >= 0.1 - 1e-9, "polytope {i}: interior margin {m}");
        }
    }
}
