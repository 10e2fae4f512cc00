//! Disjointness oracles and separating poles.
//!
//! Two closed spherical hulls `W₁`, `W₂` are disjoint exactly when the wedge
//! `V = {P : P·Q > 0 on W₁, P·R < 0 on W₂}` is nonempty. Three independent
//! routes are provided:
//!
//! - [`primal_intersect`] searches for a common ray of the two generator cones.
//! - [`dual_witness`] maximizes the separation margin of a pole directly.
//! - [`proof_path_witness`] projects both bodies, fattens them until their
//!   pullbacks are still disjoint, separates the chordal hulls by an affine
//!   hyperplane and contracts that hyperplane toward the origin; its normal
//!   is then a pole of `V`.
//!
//! Strict inequalities are realized as margins above `margin_tol`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::convexity::{min_dot, project_body, EuclideanHullBody, SphericalBody};
use crate::geometry::{axpy, norm, orthonormal_frame, scale, UnitPoint};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::{Error, Result};

/// The affine hyperplane `{x : normal·x = offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: UnitPoint,
    pub offset: f64,
}

/// A common point of two spherical hulls with its conic coefficients:
/// `common_point ∝ Σ λ_j Q_j = Σ μ_k R_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionCertificate {
    pub common_point: UnitPoint,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl IntersectionCertificate {
    /// `normalize(Σ λ_j Q_j)` and `normalize(Σ μ_k R_k)` recomputed from the coefficients.
    pub fn reconstruct(&self, b1: &SphericalBody, b2: &SphericalBody, tol: f64) -> Result<(UnitPoint, UnitPoint)> {
        Ok((combine(b1.generators(), &self.lambda, tol)?, combine(b2.generators(), &self.mu, tol)?))
    }
}

fn combine(points: &[UnitPoint], weights: &[f64], tol: f64) -> Result<UnitPoint> {
    let mut acc = vec![0.0; points[0].ambient_dim()];
    for (p, w) in points.iter().zip(weights) {
        acc = axpy(&acc, *w, p.coords());
    }
    UnitPoint::normalize(&acc, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrimalOutcome {
    Intersecting(IntersectionCertificate),
    ProvablyDisjoint,
}

impl PrimalOutcome {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, PrimalOutcome::ProvablyDisjoint)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeparationCertificate {
    /// `witness·Q ≥ margin` on the first body and `witness·R ≤ -margin` on the second.
    Disjoint { witness: UnitPoint, margin: f64 },
    Intersecting(IntersectionCertificate),
}

impl SeparationCertificate {
    pub fn witness(&self) -> Option<&UnitPoint> {
        match self {
            SeparationCertificate::Disjoint { witness, .. } => Some(witness),
            SeparationCertificate::Intersecting(_) => None,
        }
    }
}

/// Optimum of `max t` s.t. `P·Q ≥ t`, `P·R ≤ -t` with `‖P‖_∞ = 1`.
///
/// Positive exactly when the bodies are disjoint, negative when their hulls
/// overlap robustly, and zero when they touch or only weakly separate.
#[derive(Clone, Debug, PartialEq)]
pub struct DualMargin {
    pub value: f64,
    pub direction: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgeMembership {
    pub member: bool,
    pub margin: f64,
}

/// Record of the constructive route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofTrace {
    /// Fattening radius at which the pullbacks first became separable.
    pub epsilon0: f64,
    /// Separating hyperplanes in order; `|offset|` strictly decreases.
    pub hyperplanes: Vec<Hyperplane>,
    /// Contraction factor used to produce each hyperplane after the first.
    pub deltas: Vec<f64>,
    /// Number of contraction rounds.
    pub iterations: usize,
}

impl ProofTrace {
    pub fn offsets(&self) -> Vec<f64> {
        self.hyperplanes.iter().map(|h| h.offset.abs()).collect()
    }

    pub fn final_offset(&self) -> f64 {
        self.hyperplanes.last().map_or(f64::INFINITY, |h| h.offset.abs())
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.offsets().windows(2).all(|w| w[1] < w[0])
    }
}

fn check_pair(b1: &SphericalBody, b2: &SphericalBody) -> Result<()> {
    if b1.ambient_dim() != b2.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: b1.ambient_dim(),
            found: b2.ambient_dim(),
        });
    }
    Ok(())
}

/// Decides whether the closed spherical hulls share a point by looking for
/// `λ, μ ≥ 0` with `Σλ_j Q_j = Σμ_k R_k` and `P₁·Σλ_j Q_j = 1`, where `P₁` is
/// the first body's witness pole.
pub fn primal_intersect(b1: &SphericalBody, b2: &SphericalBody, cfg: &ToleranceConfig) -> Result<PrimalOutcome> {
    check_pair(b1, b2)?;
    let d = b1.ambient_dim();
    let (k1, k2) = (b1.len(), b2.len());
    let mut lp = LinearProgram::maximize(vec![0.0; k1 + k2]);
    for m in 0..d {
        let row = b1
            .generators()
            .iter()
            .map(|q| q.coords()[m])
            .chain(b2.generators().iter().map(|r| -r.coords()[m]))
            .collect();
        lp.add_constraint(row, Relation::Eq, 0.0);
    }
    let pole = &b1.witness().pole;
    let mut norm_row: Vec<f64> = b1.generators().iter().map(|q| pole.dot(q.coords())).collect();
    norm_row.resize(k1 + k2, 0.0);
    lp.add_constraint(norm_row, Relation::Eq, 1.0);

    match lp::solve(&lp, &cfg.solver_options())? {
        LpOutcome::Optimal { solution, .. } => {
            let lambda = solution[..k1].to_vec();
            let mu = solution[k1..].to_vec();
            let common_point = combine(b1.generators(), &lambda, cfg.unit_tol)?;
            Ok(PrimalOutcome::Intersecting(IntersectionCertificate { common_point, lambda, mu }))
        }
        LpOutcome::Infeasible { .. } => Ok(PrimalOutcome::ProvablyDisjoint),
        LpOutcome::Unbounded => unreachable!("feasibility program has a zero objective"),
    }
}

fn witness_program(b1: &SphericalBody, b2: &SphericalBody) -> LinearProgram {
    let d = b1.ambient_dim();
    // Variables: P_0..P_{d-1}, t.
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for m in 0..d {
        lp.set_bounds(m, -1.0, 1.0);
    }
    // On any face of the box, t >= -|P| >= -sqrt(d).
    lp.set_bounds(d, -(d as f64) - 1.0, f64::INFINITY);
    for q in b1.generators() {
        let mut row = q.coords().to_vec();
        row.push(-1.0);
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    for r in b2.generators() {
        let mut row = r.coords().to_vec();
        row.push(1.0);
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    lp
}

fn solve_witness(lp: &LinearProgram, cfg: &ToleranceConfig) -> Result<DualMargin> {
    match lp::solve(lp, &cfg.solver_options())? {
        LpOutcome::Optimal { mut solution, objective } => {
            solution.pop();
            Ok(DualMargin { value: objective, direction: solution })
        }
        other => unreachable!("witness LP is feasible and bounded, got {other:?}"),
    }
}

/// Signed optimum of the witness program.
///
/// The box program `‖P‖_∞ ≤ 1` is solved first; its optimum is never
/// negative because `P = 0` is feasible. When it does not clear
/// `margin_tol`, the optimum is re-taken over the faces `P_m = ±1` of the box,
/// which yields a negative value for overlapping bodies.
pub fn dual_margin(b1: &SphericalBody, b2: &SphericalBody, cfg: &ToleranceConfig) -> Result<DualMargin> {
    check_pair(b1, b2)?;
    let mut lp = witness_program(b1, b2);
    let boxed = solve_witness(&lp, cfg)?;
    if boxed.value > cfg.margin_tol {
        return Ok(boxed);
    }
    let d = b1.ambient_dim();
    let mut best: Option<DualMargin> = None;
    for m in 0..d {
        for s in [1.0, -1.0] {
            lp.set_bounds(m, s, s);
            let face = solve_witness(&lp, cfg)?;
            lp.set_bounds(m, -1.0, 1.0);
            if best.as_ref().is_none_or(|b| face.value > b.value) {
                best = Some(face);
            }
        }
    }
    Ok(best.expect("at least one face"))
}

/// Separating pole from the witness program, or an intersection certificate.
pub fn dual_witness(b1: &SphericalBody, b2: &SphericalBody, cfg: &ToleranceConfig) -> Result<SeparationCertificate> {
    let dm = dual_margin(b1, b2, cfg)?;
    if dm.value > cfg.margin_tol {
        let witness = UnitPoint::normalize(&dm.direction, cfg.unit_tol)?;
        let wm = wedge_membership(b1, b2, &witness, cfg);
        if wm.member {
            return Ok(SeparationCertificate::Disjoint {
                witness,
                margin: wm.margin,
            });
        }
        return Err(Error::NumericallyAmbiguous(wm.margin));
    }
    match primal_intersect(b1, b2, cfg)? {
        PrimalOutcome::Intersecting(cert) => Ok(SeparationCertificate::Intersecting(cert)),
        PrimalOutcome::ProvablyDisjoint if dm.value < -cfg.margin_tol => Err(Error::OracleDisagreement(dm.value)),
        PrimalOutcome::ProvablyDisjoint => Err(Error::NumericallyAmbiguous(dm.value)),
    }
}

/// Direct evaluation of `min_j p·Q_j > tol` and `max_k p·R_k < -tol`. The
/// generators suffice because the conditions are linear in the hull points.
pub fn wedge_membership(b1: &SphericalBody, b2: &SphericalBody, p: &UnitPoint, cfg: &ToleranceConfig) -> WedgeMembership {
    let pos = min_dot(p, b1.generators());
    let neg = -min_dot(&p.antipode(), b2.generators());
    let margin = pos.min(-neg);
    WedgeMembership {
        member: pos > cfg.margin_tol && neg < -cfg.margin_tol,
        margin,
    }
}

/// `normalize(t·p₁ + (1 - t)·p₂)`.
pub fn wedge_combination(p1: &UnitPoint, p2: &UnitPoint, t: f64, cfg: &ToleranceConfig) -> Result<UnitPoint> {
    let v = axpy(&scale(p1.coords(), t), 1.0 - t, p2.coords());
    UnitPoint::normalize(&v, cfg.unit_tol)
}

/// Max-margin affine separation of two vertex sets in `R^{n+1}`:
/// `max t` s.t. `P·y ≥ r + t` on `y1`, `P·y ≤ r - t` on `y2`, `P, r ∈ [-1, 1]`.
/// Returns the hyperplane with unit normal and the normalized margin, or
/// `None` if the margin does not clear `margin_tol`.
pub fn separating_hyperplane(
    y1: &EuclideanHullBody,
    y2: &EuclideanHullBody,
    cfg: &ToleranceConfig,
) -> Result<Option<(Hyperplane, f64)>> {
    let d = y1.vertices()[0].len();
    if y2.vertices()[0].len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: y2.vertices()[0].len(),
        });
    }
    // Variables: P_0..P_{d-1}, r / σ, t / σ. After contraction the optimal r
    // and t are about as small as the smallest vertex, so both are measured in
    // units of σ to keep the tableau well scaled.
    let sigma = y1
        .vertices()
        .iter()
        .chain(y2.vertices())
        .map(|y| norm(y))
        .fold(1.0f64, f64::min)
        .max(cfg.offset_tol * 1e-3);
    let (r, t) = (d, d + 1);
    let mut objective = vec![0.0; d + 2];
    objective[t] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for m in 0..d {
        lp.set_bounds(m, -1.0, 1.0);
    }
    lp.set_bounds(r, -1.0 / sigma, 1.0 / sigma);
    lp.set_bounds(t, -1.0 / sigma, f64::INFINITY);
    for y in y1.vertices() {
        let mut row = y.clone();
        row.extend([-sigma, -sigma]);
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    for y in y2.vertices() {
        let mut row = y.clone();
        row.extend([-sigma, sigma]);
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    let solution = match lp::solve(&lp, &cfg.solver_options())? {
        LpOutcome::Optimal { solution, .. } => solution,
        other => unreachable!("separation LP is feasible and bounded, got {other:?}"),
    };
    let len = norm(&solution[..d]);
    if !(solution[t] * sigma > cfg.margin_tol) || !(len > cfg.unit_tol) {
        return Ok(None);
    }
    let normal = UnitPoint::normalize(&solution[..d], cfg.unit_tol)?;
    // Margin and offset measured against the unit normal.
    let (lo, _) = y1.support_range(normal.coords());
    let (_, hi) = y2.support_range(normal.coords());
    let offset = solution[r] * sigma / len;
    let margin = (lo - offset).min(offset - hi);
    Ok(Some((Hyperplane { normal, offset }, margin)))
}

const EPSILON_INIT: f64 = 0.5;

/// Constructive separating pole.
///
/// 1. Project each body from its witness pole into tangent coordinates.
/// 2. Starting at `ε = 0.5`, halve `ε` until the pullbacks of the
///    `ε`-fattened projections are disjoint and strictly separable.
/// 3. Separate the chordal hulls of the pullbacks by an affine hyperplane.
/// 4. While the offset `|r|` is at least `offset_tol`, add the images of the
///    vertices under `x ↦ δx` with `δ = max(|r|, offset_tol / 10)` and separate
///    again; each new offset is strictly smaller than `δ`.
/// 5. The final normal is checked against the original generators.
pub fn proof_path_witness(
    b1: &SphericalBody,
    b2: &SphericalBody,
    cfg: &ToleranceConfig,
) -> Result<(SeparationCertificate, ProofTrace)> {
    check_pair(b1, b2)?;
    if !primal_intersect(b1, b2, cfg)?.is_disjoint() {
        return Err(Error::BodiesIntersect);
    }
    let frame1 = orthonormal_frame(&b1.witness().pole);
    let frame2 = orthonormal_frame(&b2.witness().pole);
    let w1 = project_body(b1, &frame1, cfg)?;
    let w2 = project_body(b2, &frame2, cfg)?;

    let mut eps = EPSILON_INIT;
    let mut found = None;
    for _ in 0..=cfg.max_iter {
        let x1 = w1.fatten(eps)?.pullback(cfg)?;
        let x2 = w2.fatten(eps)?.pullback(cfg)?;
        if primal_intersect(&x1, &x2, cfg)?.is_disjoint() {
            let y1 = EuclideanHullBody::from_body(&x1);
            let y2 = EuclideanHullBody::from_body(&x2);
            if let Some((h, _)) = separating_hyperplane(&y1, &y2, cfg)? {
                found = Some((y1, y2, h));
                break;
            }
        }
        eps /= 2.0;
    }
    let Some((y1, y2, first)) = found else {
        return Err(Error::EpsilonSearchFailed(cfg.max_iter));
    };

    let delta_floor = cfg.offset_tol / 10.0;
    let mut trace = ProofTrace {
        epsilon0: eps,
        hyperplanes: vec![first],
        deltas: Vec::new(),
        iterations: 0,
    };
    loop {
        let current = trace.final_offset();
        if current < cfg.offset_tol {
            break;
        }
        if trace.iterations >= cfg.max_iter {
            return Err(Error::ContractionStalled {
                offset: current,
                rounds: trace.iterations,
            });
        }
        let delta = current.max(delta_floor);
        let z1 = y1.scale_union_hull(delta)?;
        let z2 = y2.scale_union_hull(delta)?;
        let Some((h, _)) = separating_hyperplane(&z1, &z2, cfg)? else {
            return Err(Error::ContractionStalled {
                offset: current,
                rounds: trace.iterations,
            });
        };
        if !(h.offset.abs() < current * (1.0 - cfg.lp_tol)) {
            return Err(Error::ContractionStalled {
                offset: h.offset.abs(),
                rounds: trace.iterations,
            });
        }
        trace.hyperplanes.push(h);
        trace.deltas.push(delta);
        trace.iterations += 1;
    }

    let witness = trace.hyperplanes.last().expect("nonempty").normal.clone();
    let wm = wedge_membership(b1, b2, &witness, cfg);
    if !wm.member {
        return Err(Error::WitnessRejected(wm.margin));
    }
    Ok((
        SeparationCertificate::Disjoint {
            witness,
            margin: wm.margin,
        },
        trace,
    ))
}

/// Smallest wedge margin over `k` random tangent perturbations of `p` of
/// size `m/2`, where `m` is the wedge margin of `p`. Returns `+∞` for `k = 0`.
pub fn wedge_openness_probe<R: Rng + ?Sized>(
    b1: &SphericalBody,
    b2: &SphericalBody,
    p: &UnitPoint,
    k: usize,
    rng: &mut R,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    if k == 0 {
        return Ok(f64::INFINITY);
    }
    check_pair(b1, b2)?;
    let m = wedge_membership(b1, b2, p, cfg).margin;
    if !(m > 0.0) {
        return Ok(m);
    }
    let frame = orthonormal_frame(p);
    let mut worst = f64::INFINITY;
    for _ in 0..k {
        let u: Vec<f64> = (0..frame.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&u);
        if len == 0.0 {
            continue;
        }
        let step = frame.tangent_vector(&scale(&u, 0.5 * m / len));
        let q = UnitPoint::normalize(&axpy(p.coords(), 1.0, &step), cfg.unit_tol)?;
        worst = worst.min(wedge_membership(b1, b2, &q, cfg).margin);
    }
    Ok(worst)
}
