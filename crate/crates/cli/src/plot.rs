//! Scene export for bodies on `S^2`.
//!
//! A scene lists each body's generators, samples of the great-circle arcs
//! bounding its spherical hull, and, when the bodies are disjoint, the
//! witness pole with samples of its boundary circle `{x : P·x = 0}`. The
//! number of points is
//! `|W1| + |W2| + ARC_SAMPLES * arcs + (1 + CIRCLE_SAMPLES if disjoint)`.

use serde::Serialize;
use sphsep::convexity::project_body;
use sphsep::geometry::{dot, orthonormal_frame};
use sphsep::{SphericalBody, ToleranceConfig, UnitPoint};

pub const ARC_SAMPLES: usize = 32;
pub const CIRCLE_SAMPLES: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BodyScene {
    pub generators: Vec<Vec<f64>>,
    /// Each arc is `ARC_SAMPLES` points from one hull vertex to the next.
    pub arcs: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scene {
    pub bodies: Vec<BodyScene>,
    pub witness: Option<Vec<f64>>,
    pub boundary: Vec<Vec<f64>>,
}

impl Scene {
    pub fn point_count(&self) -> usize {
        let body: usize = self
            .bodies
            .iter()
            .map(|b| b.generators.len() + b.arcs.iter().map(Vec::len).sum::<usize>())
            .sum();
        body + self.witness.iter().count() + self.boundary.len()
    }
}

pub fn scene(b1: &SphericalBody, b2: &SphericalBody, witness: Option<&UnitPoint>, cfg: &ToleranceConfig) -> sphsep::Result<Scene> {
    Ok(Scene {
        bodies: vec![body_scene(b1, cfg)?, body_scene(b2, cfg)?],
        witness: witness.map(|p| p.coords().to_vec()),
        boundary: witness.map(boundary_circle).unwrap_or_default(),
    })
}

fn body_scene(body: &SphericalBody, cfg: &ToleranceConfig) -> sphsep::Result<BodyScene> {
    let frame = orthonormal_frame(&body.witness().pole);
    let poly = project_body(body, &frame, cfg)?;
    let hull = planar_hull(poly.vertices());
    let gens = body.generators();
    let arcs = match hull.len() {
        0 | 1 => Vec::new(),
        2 => vec![arc(&gens[hull[0]], &gens[hull[1]])],
        h => (0..h).map(|i| arc(&gens[hull[i]], &gens[hull[(i + 1) % h]])).collect(),
    };
    Ok(BodyScene {
        generators: gens.iter().map(|g| g.coords().to_vec()).collect(),
        arcs,
    })
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the counter-clockwise convex hull (monotone chain), collinear
/// points dropped.
fn planar_hull(points: &[Vec<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points[i][0].total_cmp(&points[j][0]).then(points[i][1].total_cmp(&points[j][1])));
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let order: Vec<usize> = if pass == 0 { idx.clone() } else { idx.iter().rev().copied().collect() };
        for i in order {
            while hull.len() >= start + 2
                && cross(&points[hull[hull.len() - 2]], &points[hull[hull.len() - 1]], &points[i]) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// `ARC_SAMPLES` points of the minor great-circle arc from `a` to `b`.
fn arc(a: &UnitPoint, b: &UnitPoint) -> Vec<Vec<f64>> {
    let theta = dot(a.coords(), b.coords()).clamp(-1.0, 1.0).acos();
    let s = theta.sin();
    (0..ARC_SAMPLES)
        .map(|i| {
            let t = i as f64 / (ARC_SAMPLES - 1) as f64;
            let (wa, wb) = ((1.0 - t) * theta, t * theta);
            a.coords()
                .iter()
                .zip(b.coords())
                .map(|(x, y)| (wa.sin() * x + wb.sin() * y) / s)
                .collect()
        })
        .collect()
}

fn boundary_circle(p: &UnitPoint) -> Vec<Vec<f64>> {
    let frame = orthonormal_frame(p);
    let (u, v) = (&frame.basis()[0], &frame.basis()[1]);
    (0..CIRCLE_SAMPLES)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / CIRCLE_SAMPLES as f64;
            u.iter().zip(v).map(|(x, y)| phi.cos() * x + phi.sin() * y).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(rows: &[[f64; 3]]) -> SphericalBody {
        SphericalBody::from_coords(rows, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn singletons_give_points_witness_and_circle() {
        let cfg = ToleranceConfig::default();
        let p = UnitPoint::normalize(&[1.0, 0.0, 0.0], 1e-12).unwrap();
        let s = scene(&body(&[[1.0, 0.0, 0.0]]), &body(&[[-1.0, 0.0, 0.0]]), Some(&p), &cfg).unwrap();
        assert!(s.bodies.iter().all(|b| b.generators.len() == 1 && b.arcs.is_empty()));
        assert_eq!(s.boundary.len(), CIRCLE_SAMPLES);
        assert_eq!(s.point_count(), 2 + 1 + CIRCLE_SAMPLES);
    }

    #[test]
    fn triangle_has_three_arcs_and_interior_points_are_skipped() {
        let cfg = ToleranceConfig::default();
        let b = body(&[[1.0, 0.3, 0.0], [1.0, -0.2, 0.3], [1.0, -0.2, -0.3], [1.0, 0.0, 0.0]]);
        let s = body_scene(&b, &cfg).unwrap();
        assert_eq!(s.arcs.len(), 3);
        for a in &s.arcs {
            assert_eq!(a.len(), ARC_SAMPLES);
            for x in a {
                assert!((dot(x, x).sqrt() - 1.0).abs() < 1e-12);
            }
        }
        let two = body_scene(&body(&[[1.0, 0.3, 0.0], [1.0, -0.2, 0.3]]), &cfg).unwrap();
        assert_eq!(two.arcs.len(), 1);
    }

    #[test]
    fn arcs_stay_on_their_great_circle() {
        let a = UnitPoint::normalize(&[1.0, 0.2, 0.1], 1e-12).unwrap();
        let b = UnitPoint::normalize(&[0.1, 1.0, -0.3], 1e-12).unwrap();
        let n = [
            a.coords()[1] * b.coords()[2] - a.coords()[2] * b.coords()[1],
            a.coords()[2] * b.coords()[0] - a.coords()[0] * b.coords()[2],
            a.coords()[0] * b.coords()[1] - a.coords()[1] * b.coords()[0],
        ];
        let samples = arc(&a, &b);
        assert!(samples.iter().all(|x| dot(x, &n).abs() < 1e-12));
        assert!(samples[0].iter().zip(a.coords()).all(|(x, y)| (x - y).abs() < 1e-15));
        assert!(samples[ARC_SAMPLES - 1].iter().zip(b.coords()).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn boundary_samples_are_orthogonal_to_the_pole() {
        let p = UnitPoint::normalize(&[0.3, -0.5, 0.8], 1e-12).unwrap();
        for x in boundary_circle(&p) {
            assert!(p.dot(&x).abs() < 1e-9);
            assert!((dot(&x, &x) - 1.0).abs() < 1e-12);
        }
    }
}
