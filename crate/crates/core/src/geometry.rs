//! Points on `S^n`, tangent frames and the central projection.
//!
//! The central projection at a base point `P` sends `Q` (with `P·Q > 0`) to
//! `Q / (P·Q)` on the tangent affine plane `P + T_P(S^n)`. A [`TangentFrame`]
//! fixes an orthonormal basis of `T_P(S^n)` so projected points carry plain
//! `R^n` coordinates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// A unit vector of `R^{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitPoint(Vec<f64>);

impl UnitPoint {
    /// Scales `v` onto the sphere. Fails when `‖v‖ ≤ tol`.
    pub fn normalize(v: &[f64], tol: f64) -> Result<Self> {
        let len = norm(v);
        if !(len > tol) || !len.is_finite() {
            return Err(Error::ZeroVector(len));
        }
        Ok(Self(v.iter().map(|x| x / len).collect()))
    }

    /// Wraps coordinates that are already unit length within `tol`.
    pub fn from_unit(v: Vec<f64>, tol: f64) -> Result<Self> {
        let len = norm(&v);
        if !((len - 1.0).abs() <= tol) {
            return Err(Error::NotUnit(len));
        }
        Ok(Self(v))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Ambient dimension `n + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn antipode(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub(crate) fn from_raw(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl AsRef<[f64]> for UnitPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Normalizes `v`; the free-function form of [`UnitPoint::normalize`].
pub fn normalize(v: &[f64], tol: f64) -> Result<UnitPoint> {
    UnitPoint::normalize(v, tol)
}

/// An orthonormal basis of the tangent space at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    base: UnitPoint,
    basis: Vec<Vec<f64>>,
}

impl TangentFrame {
    /// Gram–Schmidt over the standard basis, skipping the axis most parallel
    /// to `base` (lowest index on ties). Deterministic.
    pub fn orthonormal(base: &UnitPoint) -> Self {
        let dim = base.ambient_dim();
        let b = base.coords();
        let skip = (0..dim)
            .fold((0, f64::NEG_INFINITY), |(best, best_abs), i| {
                if b[i].abs() > best_abs {
                    (i, b[i].abs())
                } else {
                    (best, best_abs)
                }
            })
            .0;

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
        for axis in (0..dim).filter(|&i| i != skip) {
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            // Two passes of modified Gram–Schmidt keep orthogonality near machine precision.
            for _ in 0..2 {
                let c = dot(&v, b);
                v = axpy(&v, -c, b);
                for u in &basis {
                    let c = dot(&v, u);
                    v = axpy(&v, -c, u);
                }
            }
            let len = norm(&v);
            basis.push(scale(&v, 1.0 / len));
        }
        Self {
            base: base.clone(),
            basis,
        }
    }

    pub fn base(&self) -> &UnitPoint {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Intrinsic dimension `n` of the tangent space.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The tangent vector `Σ x_k basis_k` in ambient coordinates.
    pub fn tangent_vector(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        let mut v = vec![0.0; self.base.ambient_dim()];
        for (xk, e) in x.iter().zip(&self.basis) {
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi += xk * ei;
            }
        }
        v
    }

    /// Frame coordinates of `q / (base·q) − base`.
    pub fn central_project(&self, q: &UnitPoint, margin_tol: f64) -> Result<Vec<f64>> {
        self.check_dim(q.ambient_dim())?;
        let d = self.base.dot(q.coords());
        if !(d > margin_tol) {
            return Err(Error::OutsideOpenHemisphere { dot: d, tol: margin_tol });
        }
        Ok(self.basis.iter().map(|e| dot(e, q.coords()) / d).collect())
    }

    /// Inverse of [`central_project`](Self::central_project): `normalize(base + Σ x_k basis_k)`.
    pub fn central_unproject(&self, x: &[f64]) -> Result<UnitPoint> {
        self.check_dim(x.len() + 1)?;
        let v = axpy(self.base.coords(), 1.0, &self.tangent_vector(x));
        // ‖base + t‖ ≥ 1 for tangent t, so this never degenerates.
        let len = norm(&v);
        Ok(UnitPoint::from_raw(scale(&v, 1.0 / len)))
    }

    fn check_dim(&self, ambient: usize) -> Result<()> {
        if ambient != self.base.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.base.ambient_dim(),
                found: ambient,
            });
        }
        Ok(())
    }
}

pub fn orthonormal_frame(base: &UnitPoint) -> TangentFrame {
    TangentFrame::orthonormal(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const TOL: f64 = 1e-12;

    fn random_vec(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn normalize_examples() {
        let p = normalize(&[0.0, 3.0, 4.0], TOL).unwrap();
        assert_eq!(p.coords(), &[0.0, 0.6, 0.8]);
        let p = normalize(&[1.0, 0.0, 0.0], TOL).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0, 0.0]);
        assert!(matches!(normalize(&[0.0, 0.0], TOL), Err(Error::ZeroVector(_))));
        assert!(matches!(normalize(&[1e-13, 0.0], TOL), Err(Error::ZeroVector(_))));
    }

    #[test]
    fn normalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let dim = rng.random_range(2..7);
            let p = normalize(&random_vec(&mut rng, dim), TOL).unwrap();
            let q = normalize(p.coords(), TOL).unwrap();
            for (a, b) in p.coords().iter().zip(q.coords()) {
                assert!((a - b).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn axis_aligned_frame() {
        let base = UnitPoint::from_unit(vec![0.0, 0.0, 1.0], TOL).unwrap();
        let frame = orthonormal_frame(&base);
        assert_eq!(frame.basis(), &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
    }

    #[test]
    fn frames_are_orthonormal_and_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let dim = rng.random_range(2..8);
            let base = normalize(&random_vec(&mut rng, dim), TOL).unwrap();
            let frame = orthonormal_frame(&base);
            assert_eq!(frame.dim(), dim - 1);
            for (i, u) in frame.basis().iter().enumerate() {
                assert!(base.dot(u).abs() < 1e-12);
                for (j, v) in frame.basis().iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(u, v) - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn projection_examples() {
        let frame = orthonormal_frame(&UnitPoint::from_unit(vec![0.0, 0.0, 1.0], TOL).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = UnitPoint::from_unit(vec![0.0, h, h], TOL).unwrap();
        let x = frame.central_project(&q, 1e-9).unwrap();
        assert!((x[0] - 0.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);

        let back = frame.central_unproject(&[0.0, 1.0]).unwrap();
        assert!((back.coords()[1] - h).abs() < 1e-15 && (back.coords()[2] - h).abs() < 1e-15);

        let origin = frame.central_project(frame.base(), 1e-9).unwrap();
        assert_eq!(origin, vec![0.0, 0.0]);
        assert_eq!(frame.central_unproject(&[0.0, 0.0]).unwrap(), *frame.base());
    }

    #[test]
    fn projection_rejects_far_hemisphere() {
        let frame = orthonormal_frame(&UnitPoint::from_unit(vec![0.0, 0.0, 1.0], TOL).unwrap());
        let equator = UnitPoint::from_unit(vec![1.0, 0.0, 0.0], TOL).unwrap();
        assert!(matches!(
            frame.central_project(&equator, 1e-9),
            Err(Error::OutsideOpenHemisphere { .. })
        ));
        let south = UnitPoint::from_unit(vec![0.0, 0.0, -1.0], TOL).unwrap();
        assert!(frame.central_project(&south, 1e-9).is_err());
        assert!(matches!(
            frame.central_unproject(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unprojection_stays_in_open_hemisphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let dim = rng.random_range(2..6);
            let frame = orthonormal_frame(&normalize(&random_vec(&mut rng, dim), TOL).unwrap());
            let x: Vec<f64> = random_vec(&mut rng, dim - 1).iter().map(|v| v * 50.0).collect();
            let q = frame.central_unproject(&x).unwrap();
            assert!(frame.base().dot(q.coords()) > 0.0);
            let back = frame.central_project(&q, 0.0).unwrap();
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
