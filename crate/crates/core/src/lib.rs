//! Separation of closed spherical convex bodies on `S^n`.
//!
//! Bodies are given as finite generator sets and stand for their closed
//! spherical hulls. Two bodies are disjoint exactly when there is a pole `P`
//! with `P·Q > 0` on the first body and `P·R < 0` on the second. This crate
//! decides disjointness with a primal cone-intersection LP, computes such a
//! pole with a dual LP, and independently reconstructs a pole by projecting,
//! fattening, separating in `R^{n+1}` and contracting the separating
//! hyperplane toward the origin.
//!
//! Module map:
//! - [`geometry`]: unit points, tangent frames, central (gnomonic) projection.
//! - [`lp`]: dense two-phase simplex.
//! - [`convexity`]: bodies, tangent polytopes, fattening, pullback, hull membership.
//! - [`separation`]: disjointness oracles, witnesses, the witness wedge and the
//!   constructive hyperplane route.
//! - [`harness`]: seeded instance generation and verification campaigns.

pub mod config;
pub mod convexity;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod separation;

pub use config::ToleranceConfig;
pub use convexity::{EuclideanHullBody, HemisphereWitness, Membership, SphericalBody, TangentPolytope};
pub use geometry::{TangentFrame, UnitPoint};
pub use separation::{
    Hyperplane, IntersectionCertificate, PrimalOutcome, ProofTrace, SeparationCertificate,
    WedgeMembership,
};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("vector norm {0:e} is below the unit tolerance")]
    ZeroVector(f64),
    #[error("point has dot {dot:e} with the frame base; it must exceed {tol:e}")]
    OutsideOpenHemisphere { dot: f64, tol: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generators are not hemispherical (best margin {0:e})")]
    NotHemispherical(f64),
    #[error("body has no generators")]
    EmptyBody,
    #[error("generators {0} and {1} coincide")]
    DuplicateGenerator(usize, usize),
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("epsilon must be nonnegative, got {0}")]
    NegativeEpsilon(f64),
    #[error("delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("dual margin {0:e} lies inside the ambiguity band")]
    NumericallyAmbiguous(f64),
    #[error("no separating epsilon found after {0} halvings")]
    EpsilonSearchFailed(usize),
    #[error("hyperplane offset stalled at {offset:e} after {rounds} rounds")]
    ContractionStalled { offset: f64, rounds: usize },
    #[error("bodies intersect; no separating pole exists")]
    BodiesIntersect,
    #[error("primal and dual oracles disagree (dual margin {0:e})")]
    OracleDisagreement(f64),
    #[error("constructed witness fails wedge membership (margin {0:e})")]
    WitnessRejected(f64),
    #[error("instance generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
}

pub type Result<T> = std::result::Result<T, Error>;
