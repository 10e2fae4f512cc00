#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sphsep::geometry::{axpy, dot, norm, scale};
use sphsep::{ToleranceConfig, UnitPoint};

pub fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn gaussian<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_unit<R: Rng>(rng: &mut R, d: usize) -> UnitPoint {
    loop {
        if let Ok(p) = UnitPoint::normalize(&gaussian(rng, d), 1e-6) {
            return p;
        }
    }
}

/// Uniform point of the open hemisphere around `base`.
pub fn hemisphere_point<R: Rng>(rng: &mut R, base: &UnitPoint) -> UnitPoint {
    loop {
        let q = random_unit(rng, base.ambient_dim());
        let s = base.dot(q.coords());
        if s.abs() > 1e-9 {
            return if s > 0.0 { q } else { q.antipode() };
        }
    }
}

/// Point at angle `theta` from `center` in a uniformly random direction.
pub fn at_angle<R: Rng>(rng: &mut R, center: &UnitPoint, theta: f64) -> UnitPoint {
    let c = center.coords();
    loop {
        let g = gaussian(rng, c.len());
        let t = axpy(&g, -dot(&g, c), c);
        let len = norm(&t);
        if len < 1e-6 {
            continue;
        }
        let dir = scale(&t, 1.0 / len);
        let p = axpy(&scale(c, theta.cos()), theta.sin(), &dir);
        return UnitPoint::normalize(&p, 1e-12).unwrap();
    }
}

/// `k` points within angle `spread` of `center`.
pub fn cap<R: Rng>(rng: &mut R, center: &UnitPoint, k: usize, spread: f64) -> Vec<UnitPoint> {
    (0..k)
        .map(|_| {
            let theta = spread * rng.random::<f64>();
            at_angle(rng, center, theta)
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
