//! Spherical bodies and their images in tangent space.
//!
//! A [`SphericalBody`] is a finite generator set standing for its closed
//! spherical hull, i.e. the normalized cone of its generators. Projecting the
//! generators centrally from a hemisphericity witness turns that hull into an
//! ordinary polytope ([`TangentPolytope`]), which can be fattened by a small
//! cross-polytope and pulled back to the sphere. [`EuclideanHullBody`] holds
//! the chordal hull in `R^{n+1}` used by the hyperplane route.

use crate::config::ToleranceConfig;
use crate::geometry::{dot, norm, TangentFrame, UnitPoint};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::{Error, Result};

/// A pole `P` with `P·Q ≥ margin` for every generator `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct HemisphereWitness {
    pub pole: UnitPoint,
    pub margin: f64,
}

/// Outcome of a membership query together with a signed slack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalBody {
    generators: Vec<UnitPoint>,
    witness: HemisphereWitness,
}

impl SphericalBody {
    /// Validates the generators and computes a hemisphericity witness by LP.
    pub fn new(generators: Vec<UnitPoint>, cfg: &ToleranceConfig) -> Result<Self> {
        check_generators(&generators, cfg)?;
        let witness = hemisphericity_witness(&generators, cfg)?;
        Ok(Self { generators, witness })
    }

    /// Normalizes raw coordinate rows and builds the body.
    pub fn from_coords<V: AsRef<[f64]>>(rows: &[V], cfg: &ToleranceConfig) -> Result<Self> {
        let generators = rows
            .iter()
            .map(|r| UnitPoint::normalize(r.as_ref(), cfg.unit_tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(generators, cfg)
    }

    /// Builds a body whose hemisphericity is certified by `pole` directly.
    pub fn with_pole(generators: Vec<UnitPoint>, pole: UnitPoint, cfg: &ToleranceConfig) -> Result<Self> {
        check_generators(&generators, cfg)?;
        if pole.ambient_dim() != generators[0].ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: generators[0].ambient_dim(),
                found: pole.ambient_dim(),
            });
        }
        let margin = min_dot(&pole, &generators);
        if !(margin > cfg.margin_tol) {
            return Err(Error::NotHemispherical(margin));
        }
        Ok(Self {
            generators,
            witness: HemisphereWitness { pole, margin },
        })
    }

    pub fn generators(&self) -> &[UnitPoint] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Intrinsic dimension `n` of the sphere `S^n` the body lives on.
    pub fn dim(&self) -> usize {
        self.ambient_dim() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.generators[0].ambient_dim()
    }

    pub fn witness(&self) -> &HemisphereWitness {
        &self.witness
    }

    /// Central projection of every generator in `frame`.
    pub fn project(&self, frame: &TangentFrame, cfg: &ToleranceConfig) -> Result<TangentPolytope> {
        project_body(self, frame, cfg)
    }

    /// Membership of `q` in the closed spherical hull.
    pub fn contains(&self, q: &UnitPoint, cfg: &ToleranceConfig) -> Result<Membership> {
        spherical_hull_member(self, q, cfg)
    }
}

fn check_generators(generators: &[UnitPoint], cfg: &ToleranceConfig) -> Result<()> {
    let first = generators.first().ok_or(Error::EmptyBody)?;
    let d = first.ambient_dim();
    if d < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: d });
    }
    for g in generators {
        if g.ambient_dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.ambient_dim(),
            });
        }
        let len = norm(g.coords());
        if !((len - 1.0).abs() <= cfg.unit_tol.max(4.0 * f64::EPSILON)) {
            return Err(Error::NotUnit(len));
        }
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            let dist = generators[i]
                .coords()
                .iter()
                .zip(generators[j].coords())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist <= cfg.unit_tol {
                return Err(Error::DuplicateGenerator(i, j));
            }
        }
    }
    Ok(())
}

pub(crate) fn min_dot(p: &UnitPoint, points: &[UnitPoint]) -> f64 {
    points
        .iter()
        .map(|q| p.dot(q.coords()))
        .fold(f64::INFINITY, f64::min)
}

/// Finds `P` maximizing `min_j P·Q_j` over the box `‖P‖_∞ ≤ 1`, then
/// normalizes it. Fails when the optimum does not clear `margin_tol`.
pub fn hemisphericity_witness(generators: &[UnitPoint], cfg: &ToleranceConfig) -> Result<HemisphereWitness> {
    let first = generators.first().ok_or(Error::EmptyBody)?;
    let d = first.ambient_dim();
    // Variables: P_0..P_{d-1}, t.
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for m in 0..d {
        lp.set_bounds(m, -1.0, 1.0);
    }
    // P = 0, t = 0 is feasible, so the bound on t never binds.
    lp.set_bounds(d, -1.0, f64::INFINITY);
    for q in generators {
        let mut row = q.coords().to_vec();
        row.push(-1.0);
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    let (solution, t) = match lp::solve(&lp, &cfg.solver_options())? {
        LpOutcome::Optimal { solution, objective } => (solution, objective),
        // The box keeps this program bounded and P = 0, t = 0 is feasible.
        other => unreachable!("hemisphericity LP returned {other:?}"),
    };
    if !(t > cfg.margin_tol) {
        return Err(Error::NotHemispherical(t));
    }
    let pole = UnitPoint::normalize(&solution[..d], cfg.unit_tol)?;
    let margin = min_dot(&pole, generators);
    if !(margin > cfg.margin_tol) {
        return Err(Error::NotHemispherical(margin));
    }
    Ok(HemisphereWitness { pole, margin })
}

/// A finite vertex set in the coordinates of a tangent frame.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPolytope {
    frame: TangentFrame,
    vertices: Vec<Vec<f64>>,
}

impl TangentPolytope {
    pub fn new(frame: TangentFrame, vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyBody);
        }
        for v in &vertices {
            if v.len() != frame.dim() {
                return Err(Error::DimensionMismatch {
                    expected: frame.dim(),
                    found: v.len(),
                });
            }
        }
        Ok(Self { frame, vertices })
    }

    pub fn frame(&self) -> &TangentFrame {
        &self.frame
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Minkowski sum with the cross-polytope `{±ε e_k}`; `ε = 0` is the identity.
    pub fn fatten(&self, eps: f64) -> Result<TangentPolytope> {
        if !(eps >= 0.0) {
            return Err(Error::NegativeEpsilon(eps));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        let n = self.frame.dim();
        let mut vertices = Vec::with_capacity(self.vertices.len() * 2 * n);
        for v in &self.vertices {
            for k in 0..n {
                for s in [eps, -eps] {
                    let mut w = v.clone();
                    w[k] += s;
                    vertices.push(w);
                }
            }
        }
        Ok(Self {
            frame: self.frame.clone(),
            vertices,
        })
    }

    /// Unprojects every vertex. The frame base certifies hemisphericity since
    /// `base·unproject(x) = 1/√(1 + ‖x‖²) > 0`. Coinciding images are merged.
    pub fn pullback(&self, cfg: &ToleranceConfig) -> Result<SphericalBody> {
        let mut generators: Vec<UnitPoint> = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let g = self.frame.central_unproject(v)?;
            let dup = generators.iter().any(|h| {
                h.coords()
                    .iter()
                    .zip(g.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
                    <= cfg.unit_tol
            });
            if !dup {
                generators.push(g);
            }
        }
        SphericalBody::with_pole(generators, self.frame.base().clone(), cfg)
    }

    /// Whether `x` lies in the convex hull of the vertices.
    pub fn contains(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<bool> {
        Ok(convex_combination(&self.vertices, x, cfg)?.is_some())
    }

    /// Largest `ρ ≥ 0` such that every `x ± ρ e_k` lies in the hull, or `None`
    /// when `x` itself is outside. Positive values certify interior points.
    pub fn interior_margin(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<Option<f64>> {
        let n = self.frame.dim();
        let m = self.vertices.len();
        let dirs = 2 * n;
        // Variables: one weight block per direction, then ρ.
        let nvars = dirs * m + 1;
        let mut objective = vec![0.0; nvars];
        objective[nvars - 1] = 1.0;
        let mut lp = LinearProgram::maximize(objective);
        for d in 0..dirs {
            let (axis, sign) = (d / 2, if d % 2 == 0 { 1.0 } else { -1.0 });
            let mut sum = vec![0.0; nvars];
            sum[d * m..(d + 1) * m].iter_mut().for_each(|c| *c = 1.0);
            lp.add_constraint(sum, Relation::Eq, 1.0);
            for k in 0..n {
                let mut row = vec![0.0; nvars];
                for (j, v) in self.vertices.iter().enumerate() {
                    row[d * m + j] = v[k];
                }
                if k == axis {
                    row[nvars - 1] = -sign;
                }
                lp.add_constraint(row, Relation::Eq, x[k]);
            }
        }
        match lp::solve(&lp, &cfg.solver_options())? {
            LpOutcome::Optimal { objective, .. } => Ok(Some(objective)),
            LpOutcome::Infeasible { .. } => Ok(None),
            LpOutcome::Unbounded => unreachable!("bounded polytope"),
        }
    }
}

/// Weights `λ ≥ 0`, `Σλ = 1` with `Σλ_j v_j = x`, if any.
pub fn convex_combination(vertices: &[Vec<f64>], x: &[f64], cfg: &ToleranceConfig) -> Result<Option<Vec<f64>>> {
    let m = vertices.len();
    let dim = x.len();
    for v in vertices {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
    }
    let mut lp = LinearProgram::maximize(vec![0.0; m]);
    lp.add_constraint(vec![1.0; m], Relation::Eq, 1.0);
    for k in 0..dim {
        let row = vertices.iter().map(|v| v[k]).collect();
        lp.add_constraint(row, Relation::Eq, x[k]);
    }
    match lp::solve(&lp, &cfg.solver_options())? {
        LpOutcome::Optimal { solution, .. } => Ok(Some(solution)),
        _ => Ok(None),
    }
}

pub fn project_body(body: &SphericalBody, frame: &TangentFrame, cfg: &ToleranceConfig) -> Result<TangentPolytope> {
    let vertices = body
        .generators()
        .iter()
        .map(|g| frame.central_project(g, cfg.margin_tol))
        .collect::<Result<Vec<_>>>()?;
    TangentPolytope::new(frame.clone(), vertices)
}

pub fn fatten(poly: &TangentPolytope, eps: f64) -> Result<TangentPolytope> {
    poly.fatten(eps)
}

pub fn pullback(poly: &TangentPolytope, cfg: &ToleranceConfig) -> Result<SphericalBody> {
    poly.pullback(cfg)
}

/// Whether `q` lies in the closed spherical hull of `body`: `Σλ_j Q_j = s·q`
/// with `λ ≥ 0`, `s ≥ margin_tol`, normalized by `P₀·Σλ_j Q_j = 1` where `P₀`
/// is the body's witness pole. The margin is `s` for members and minus the
/// phase-1 residual otherwise.
pub fn spherical_hull_member(body: &SphericalBody, q: &UnitPoint, cfg: &ToleranceConfig) -> Result<Membership> {
    let d = body.ambient_dim();
    if q.ambient_dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: q.ambient_dim() });
    }
    let k = body.len();
    let pole = &body.witness().pole;
    // Variables: λ_0..λ_{k-1}, s.
    let mut lp = LinearProgram::maximize(vec![0.0; k + 1]);
    lp.set_bounds(k, cfg.margin_tol, f64::INFINITY);
    for m in 0..d {
        let mut row: Vec<f64> = body.generators().iter().map(|g| g.coords()[m]).collect();
        row.push(-q.coords()[m]);
        lp.add_constraint(row, Relation::Eq, 0.0);
    }
    let mut norm_row: Vec<f64> = body.generators().iter().map(|g| pole.dot(g.coords())).collect();
    norm_row.push(0.0);
    lp.add_constraint(norm_row, Relation::Eq, 1.0);
    match lp::solve(&lp, &cfg.solver_options())? {
        LpOutcome::Optimal { solution, .. } => Ok(Membership { member: true, margin: solution[k] }),
        LpOutcome::Infeasible { residual } => Ok(Membership { member: false, margin: -residual }),
        LpOutcome::Unbounded => unreachable!("feasibility program has a zero objective"),
    }
}

/// A finite vertex set in `R^{n+1}` standing for its convex hull.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanHullBody {
    vertices: Vec<Vec<f64>>,
}

impl EuclideanHullBody {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyBody)?;
        let d = first.len();
        if let Some(v) = vertices.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        Ok(Self { vertices })
    }

    pub fn from_body(body: &SphericalBody) -> Self {
        Self {
            vertices: body.generators().iter().map(|g| g.coords().to_vec()).collect(),
        }
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Vertices together with their images under `x ↦ δx`.
    pub fn scale_union_hull(&self, delta: f64) -> Result<EuclideanHullBody> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend(self.vertices.iter().map(|v| v.iter().map(|x| delta * x).collect::<Vec<_>>()));
        Ok(Self { vertices })
    }

    pub fn contains(&self, x: &[f64], cfg: &ToleranceConfig) -> Result<bool> {
        Ok(convex_combination(&self.vertices, x, cfg)?.is_some())
    }

    /// `min_v normal·v` and `max_v normal·v` over the vertices.
    pub fn support_range(&self, normal: &[f64]) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let s = dot(normal, v);
            (lo.min(s), hi.max(s))
        })
    }
}

pub fn scale_union_hull(body: &EuclideanHullBody, delta: f64) -> Result<EuclideanHullBody> {
    body.scale_union_hull(delta)
}
