//! Seeded random instances and the cross-oracle verification campaign.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::convexity::SphericalBody;
use crate::geometry::{axpy, dot, norm, orthonormal_frame, scale, UnitPoint};
use crate::separation::{
    dual_margin, dual_witness, primal_intersect, proof_path_witness, wedge_combination, wedge_membership,
    wedge_openness_probe, PrimalOutcome, SeparationCertificate,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Unconstrained,
    /// Centers far enough apart that the two caps cannot meet.
    ForceDisjoint,
    /// The second body contains a generator from the relative interior of the first.
    ForceIntersecting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    /// Sphere dimension `n` (bodies live in `R^{n+1}`).
    pub dim: usize,
    pub sizes: (usize, usize),
    /// Maximum angle between a generator and its body's center.
    pub spread: f64,
    pub seed: u64,
    pub mode: Mode,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::GenerationFailed("dimension must be at least 1".into()));
        }
        if self.sizes.0 < 1 || self.sizes.1 < 1 {
            return Err(Error::GenerationFailed("generator counts must be at least 1".into()));
        }
        if !(self.spread > 0.0 && self.spread < FRAC_PI_2) {
            return Err(Error::GenerationFailed(format!("spread {} outside (0, pi/2)", self.spread)));
        }
        Ok(())
    }
}

const MAX_RETRIES: usize = 32;

fn random_unit<R: Rng + ?Sized>(rng: &mut R, ambient: usize) -> UnitPoint {
    loop {
        let v: Vec<f64> = (0..ambient).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(p) = UnitPoint::normalize(&v, 1e-6) {
            return p;
        }
    }
}

/// Point at angle `angle` from `center` in a uniformly random tangent direction.
fn offset_point<R: Rng + ?Sized>(rng: &mut R, center: &UnitPoint, angle: f64) -> UnitPoint {
    let frame = orthonormal_frame(center);
    let dir = random_unit(rng, frame.dim().max(1));
    let tangent = if frame.dim() == 0 { vec![0.0; center.ambient_dim()] } else { frame.tangent_vector(dir.coords()) };
    let v = axpy(&scale(center.coords(), angle.cos()), angle.sin(), &tangent);
    UnitPoint::normalize(&v, 1e-12).expect("unit combination")
}

fn cap_points<R: Rng + ?Sized>(rng: &mut R, center: &UnitPoint, count: usize, spread: f64) -> Vec<UnitPoint> {
    (0..count)
        .map(|_| {
            let angle = spread * rng.random::<f64>();
            offset_point(rng, center, angle)
        })
        .collect()
}

/// Deterministic pair of bodies for `spec`.
pub fn generate(spec: &InstanceSpec, cfg: &ToleranceConfig) -> Result<(SphericalBody, SphericalBody)> {
    spec.validate()?;
    let ambient = spec.dim + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut last_err = None;
    for _ in 0..MAX_RETRIES {
        let c1 = random_unit(&mut rng, ambient);
        let g1 = cap_points(&mut rng, &c1, spec.sizes.0, spec.spread);
        let g2 = match spec.mode {
            Mode::Unconstrained => {
                let c2 = random_unit(&mut rng, ambient);
                cap_points(&mut rng, &c2, spec.sizes.1, spec.spread)
            }
            Mode::ForceDisjoint => {
                let lo = 2.0 * spec.spread + 0.05 * (std::f64::consts::PI - 2.0 * spec.spread);
                let angle = lo + (std::f64::consts::PI - lo) * rng.random::<f64>();
                let c2 = offset_point(&mut rng, &c1, angle);
                cap_points(&mut rng, &c2, spec.sizes.1, spec.spread)
            }
            Mode::ForceIntersecting => {
                // Positive combination of all generators: relative interior of the first cone.
                let sum = g1.iter().fold(vec![0.0; ambient], |acc, g| axpy(&acc, 1.0, g.coords()));
                let shared = UnitPoint::normalize(&sum, 1e-12)?;
                let mut g2 = vec![shared.clone()];
                g2.extend(cap_points(&mut rng, &shared, spec.sizes.1 - 1, spec.spread));
                g2
            }
        };
        let bodies = SphericalBody::new(g1, cfg).and_then(|b1| Ok((b1, SphericalBody::new(g2, cfg)?)));
        let (b1, b2) = match bodies {
            Ok(pair) => pair,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let ok = match spec.mode {
            Mode::Unconstrained => true,
            Mode::ForceDisjoint => primal_intersect(&b1, &b2, cfg)?.is_disjoint(),
            Mode::ForceIntersecting => !primal_intersect(&b1, &b2, cfg)?.is_disjoint(),
        };
        if ok {
            return Ok((b1, b2));
        }
    }
    Err(Error::GenerationFailed(format!(
        "no valid instance after {MAX_RETRIES} attempts (seed {}, last error: {:?})",
        spec.seed, last_err
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub count: usize,
    pub dims: Vec<usize>,
    /// Inclusive range of generator counts per body.
    pub sizes: (usize, usize),
    pub seed: u64,
    pub spread: f64,
    pub probe_samples: usize,
    pub grid_steps: usize,
    /// Random poles tested against intersecting instances.
    pub wedge_samples: usize,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::GenerationFailed("dimensions must be a nonempty list of positive integers".into()));
        }
        let (lo, hi) = self.sizes;
        if lo < 1 || lo > hi {
            return Err(Error::GenerationFailed(format!("size range {lo}..{hi} is empty or starts at 0")));
        }
        if !(self.spread > 0.0 && self.spread < FRAC_PI_2) {
            return Err(Error::GenerationFailed(format!("spread {} outside (0, pi/2)", self.spread)));
        }
        Ok(())
    }
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            count: 1000,
            dims: vec![1, 2, 3, 5],
            sizes: (1, 12),
            seed: 42,
            spread: 0.4,
            probe_samples: 50,
            grid_steps: 10,
            wedge_samples: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCount {
    pub run: usize,
    pub failed: usize,
}

impl CheckCount {
    fn record(&mut self, ok: bool) {
        self.run += 1;
        if !ok {
            self.failed += 1;
        }
    }

    fn merge(&mut self, other: CheckCount) {
        self.run += other.run;
        self.failed += other.failed;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    /// Disjoint certificates satisfy their margin inequalities by direct dot products.
    pub witness_soundness: CheckCount,
    /// The constructive route succeeds with a monotone trace and a valid pole.
    pub proof_path: CheckCount,
    /// Normalized combinations of two independent poles stay in the wedge.
    pub wedge_convexity: CheckCount,
    /// Perturbations of a pole by half its margin stay in the wedge.
    pub openness_probe: CheckCount,
    /// Intersection certificates reconstruct one common point from both sides.
    pub intersection_certificate: CheckCount,
    /// No sampled pole is a wedge member for intersecting bodies.
    pub empty_wedge: CheckCount,
}

impl CheckSummary {
    fn merge(&mut self, o: &CheckSummary) {
        self.witness_soundness.merge(o.witness_soundness);
        self.proof_path.merge(o.proof_path);
        self.wedge_convexity.merge(o.wedge_convexity);
        self.openness_probe.merge(o.openness_probe);
        self.intersection_certificate.merge(o.intersection_certificate);
        self.empty_wedge.merge(o.empty_wedge);
    }

    pub fn total_failed(&self) -> usize {
        [
            self.witness_soundness,
            self.proof_path,
            self.wedge_convexity,
            self.openness_probe,
            self.intersection_certificate,
            self.empty_wedge,
        ]
        .iter()
        .map(|c| c.failed)
        .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureDetail {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub sizes: (usize, usize),
    pub mode: Mode,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Agreement,
    Ambiguous,
    Disagreement,
}

/// Per-instance record, kept so individual cases can be replayed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub sizes: (usize, usize),
    pub mode: Mode,
    pub verdict: Verdict,
    pub disjoint: Option<bool>,
    pub dual_margin: f64,
    pub witness_margin: Option<f64>,
    pub proof_final_offset: Option<f64>,
    pub proof_rounds: Option<usize>,
    pub probe_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub instances: usize,
    pub agreements: usize,
    pub ambiguous: usize,
    pub disagreements: usize,
    pub disjoint: usize,
    pub intersecting: usize,
    pub checks: CheckSummary,
    pub min_witness_margin: Option<f64>,
    pub max_final_offset: Option<f64>,
    pub max_contraction_rounds: Option<usize>,
    pub min_probe_margin: Option<f64>,
    pub failures: Vec<FailureDetail>,
    #[serde(skip)]
    pub records: Vec<InstanceRecord>,
    /// Excluded from the serialized report so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CampaignReport {
    pub fn ambiguous_fraction(&self) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            self.ambiguous as f64 / self.instances as f64
        }
    }

    pub fn success(&self) -> bool {
        self.disagreements == 0
    }
}

struct Outcome {
    record: InstanceRecord,
    checks: CheckSummary,
    failures: Vec<FailureDetail>,
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn max_opt<T: PartialOrd + Copy>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y > x { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Runs `config.count` seeded instances. For each: compares the primal and
/// dual oracles; on disjoint instances also checks the dual certificate by
/// direct dot products, runs the constructive route, walks the segment
/// between the two poles and probes openness; on intersecting instances
/// checks the certificate and samples poles for wedge emptiness. Any failed
/// check turns the instance into a disagreement.
pub fn run_equivalence_campaign(config: &CampaignConfig, cfg: &ToleranceConfig) -> CampaignReport {
    let start = Instant::now();
    let mut seeder = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.count).map(|_| seeder.random()).collect();

    let outcomes: Vec<Outcome> = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &seed)| run_instance(index, seed, config, cfg))
        .collect();

    let mut report = CampaignReport {
        config: config.clone(),
        instances: 0,
        agreements: 0,
        ambiguous: 0,
        disagreements: 0,
        disjoint: 0,
        intersecting: 0,
        checks: CheckSummary::default(),
        min_witness_margin: None,
        max_final_offset: None,
        max_contraction_rounds: None,
        min_probe_margin: None,
        failures: Vec::new(),
        records: Vec::with_capacity(outcomes.len()),
        wall_time: Duration::ZERO,
    };
    for o in outcomes {
        report.instances += 1;
        match o.record.verdict {
            Verdict::Agreement => report.agreements += 1,
            Verdict::Ambiguous => report.ambiguous += 1,
            Verdict::Disagreement => report.disagreements += 1,
        }
        match o.record.disjoint {
            Some(true) => report.disjoint += 1,
            Some(false) => report.intersecting += 1,
            None => {}
        }
        report.checks.merge(&o.checks);
        report.min_witness_margin = min_opt(report.min_witness_margin, o.record.witness_margin);
        report.max_final_offset = max_opt(report.max_final_offset, o.record.proof_final_offset);
        report.max_contraction_rounds = max_opt(report.max_contraction_rounds, o.record.proof_rounds);
        report.min_probe_margin = min_opt(report.min_probe_margin, o.record.probe_margin);
        report.failures.extend(o.failures);
        report.records.push(o.record);
    }
    report.wall_time = start.elapsed();
    report
}

fn run_instance(index: usize, seed: u64, config: &CampaignConfig, cfg: &ToleranceConfig) -> Outcome {
    if let Err(e) = config.validate() {
        return Outcome {
            record: InstanceRecord {
                index,
                seed,
                dim: 0,
                sizes: config.sizes,
                mode: Mode::Unconstrained,
                verdict: Verdict::Disagreement,
                disjoint: None,
                dual_margin: f64::NAN,
                witness_margin: None,
                proof_final_offset: None,
                proof_rounds: None,
                probe_margin: None,
            },
            checks: CheckSummary::default(),
            failures: vec![FailureDetail {
                index,
                seed,
                dim: 0,
                sizes: config.sizes,
                mode: Mode::Unconstrained,
                check: "config".into(),
                detail: e.to_string(),
            }],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = config.dims[rng.random_range(0..config.dims.len())];
    let (lo, hi) = config.sizes;
    let mut sizes = (rng.random_range(lo..=hi), rng.random_range(lo..=hi));
    let mode = match index % 3 {
        0 => Mode::Unconstrained,
        1 => Mode::ForceDisjoint,
        _ => Mode::ForceIntersecting,
    };
    if mode == Mode::ForceIntersecting {
        // A full-dimensional first cone makes the planted overlap robust.
        sizes.0 = sizes.0.max((dim + 1).min(hi));
    }
    let spec = InstanceSpec {
        dim,
        sizes,
        spread: config.spread,
        seed,
        mode,
    };
    let mut record = InstanceRecord {
        index,
        seed,
        dim,
        sizes,
        mode,
        verdict: Verdict::Agreement,
        disjoint: None,
        dual_margin: f64::NAN,
        witness_margin: None,
        proof_final_offset: None,
        proof_rounds: None,
        probe_margin: None,
    };
    let mut checks = CheckSummary::default();
    let mut failures = Vec::new();
    let mut fail = |check: &str, detail: String| {
        failures.push(FailureDetail {
            index,
            seed,
            dim,
            sizes,
            mode,
            check: check.to_string(),
            detail,
        });
    };

    let result = (|| -> Result<()> {
        let (b1, b2) = generate(&spec, cfg)?;
        let primal = primal_intersect(&b1, &b2, cfg)?;
        let dm = dual_margin(&b1, &b2, cfg)?;
        record.dual_margin = dm.value;
        let band = 10.0 * cfg.margin_tol;
        if dm.value.abs() <= band {
            record.verdict = Verdict::Ambiguous;
            return Ok(());
        }
        let dual_disjoint = dm.value > band;
        if dual_disjoint != primal.is_disjoint() {
            record.verdict = Verdict::Disagreement;
            fail(
                "equivalence",
                format!("primal disjoint = {}, dual margin = {:e}", primal.is_disjoint(), dm.value),
            );
            return Ok(());
        }
        record.disjoint = Some(dual_disjoint);

        if dual_disjoint {
            let witness = match dual_witness(&b1, &b2, cfg) {
                Ok(SeparationCertificate::Disjoint { witness, margin }) => {
                    let pos = b1.generators().iter().map(|q| dot(witness.coords(), q.coords())).fold(f64::INFINITY, f64::min);
                    let neg = b2.generators().iter().map(|r| dot(witness.coords(), r.coords())).fold(f64::NEG_INFINITY, f64::max);
                    let ok = margin > cfg.margin_tol && pos >= margin && neg <= -margin;
                    checks.witness_soundness.record(ok);
                    if !ok {
                        fail("witness_soundness", format!("margin {margin:e}, min P.Q {pos:e}, max P.R {neg:e}"));
                    }
                    record.witness_margin = Some(margin);
                    witness
                }
                other => {
                    checks.witness_soundness.record(false);
                    fail("witness_soundness", format!("dual witness returned {other:?}"));
                    return Ok(());
                }
            };

            let proof_pole = match proof_path_witness(&b1, &b2, cfg) {
                Ok((cert, trace)) => {
                    let pole = cert.witness().expect("disjoint certificate").clone();
                    let valid = wedge_membership(&b1, &b2, &pole, cfg).member;
                    let ok = valid
                        && trace.is_strictly_decreasing()
                        && trace.final_offset() < cfg.offset_tol
                        && trace.iterations <= cfg.max_iter;
                    checks.proof_path.record(ok);
                    if !ok {
                        fail(
                            "proof_path",
                            format!("member {valid}, offsets {:?}", trace.offsets()),
                        );
                    }
                    record.proof_final_offset = Some(trace.final_offset());
                    record.proof_rounds = Some(trace.iterations);
                    Some(pole)
                }
                Err(e) => {
                    checks.proof_path.record(false);
                    fail("proof_path", e.to_string());
                    None
                }
            };

            if let Some(other) = proof_pole {
                let mut ok = true;
                for i in 0..=config.grid_steps {
                    let t = i as f64 / config.grid_steps as f64;
                    let p = wedge_combination(&witness, &other, t, cfg)?;
                    let wm = wedge_membership(&b1, &b2, &p, cfg);
                    if !wm.member {
                        ok = false;
                        fail("wedge_convexity", format!("t = {t}, margin {:e}", wm.margin));
                        break;
                    }
                }
                checks.wedge_convexity.record(ok);
            }

            let probe = wedge_openness_probe(&b1, &b2, &witness, config.probe_samples, &mut rng, cfg)?;
            let ok = probe > 0.0;
            checks.openness_probe.record(ok);
            if !ok {
                fail("openness_probe", format!("min perturbed margin {probe:e}"));
            }
            if probe.is_finite() {
                record.probe_margin = Some(probe);
            }
        } else {
            let PrimalOutcome::Intersecting(cert) = primal else { unreachable!() };
            let (a, b) = cert.reconstruct(&b1, &b2, cfg.unit_tol)?;
            let gap = a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let nonneg = cert.lambda.iter().chain(&cert.mu).all(|&c| c >= -cfg.lp_tol);
            let ok = gap <= 10.0 * cfg.lp_tol && nonneg;
            checks.intersection_certificate.record(ok);
            if !ok {
                fail("intersection_certificate", format!("gap {gap:e}, nonnegative {nonneg}"));
            }

            let dual_ok = matches!(dual_witness(&b1, &b2, cfg), Ok(SeparationCertificate::Intersecting(_)));
            let mut members = 0;
            for _ in 0..config.wedge_samples {
                let v: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
                if norm(&v) < 1e-6 {
                    continue;
                }
                let p = UnitPoint::normalize(&v, cfg.unit_tol)?;
                if wedge_membership(&b1, &b2, &p, cfg).member {
                    members += 1;
                }
            }
            let ok = dual_ok && members == 0;
            checks.empty_wedge.record(ok);
            if !ok {
                fail("empty_wedge", format!("dual agrees {dual_ok}, sampled members {members}"));
            }
        }
        Ok(())
    })();

    if let Err(e) = result {
        fail("error", e.to_string());
    }
    if !failures.is_empty() {
        record.verdict = Verdict::Disagreement;
    }
    Outcome { record, checks, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn spec(mode: Mode, seed: u64) -> InstanceSpec {
        InstanceSpec {
            dim: 2,
            sizes: (4, 3),
            spread: 0.4,
            seed,
            mode,
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&spec(Mode::Unconstrained, 9), &cfg()).unwrap();
        let b = generate(&spec(Mode::Unconstrained, 9), &cfg()).unwrap();
        assert_eq!(a, b);
        let c = generate(&spec(Mode::Unconstrained, 10), &cfg()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_bodies_respect_spread() {
        for seed in 0..20 {
            let (b1, _) = generate(&spec(Mode::Unconstrained, seed), &cfg()).unwrap();
            assert_eq!(b1.len(), 4);
            assert_eq!(b1.dim(), 2);
            assert!(b1.witness().margin > 0.0);
        }
    }

    #[test]
    fn forced_modes() {
        for seed in 0..30 {
            let (b1, b2) = generate(&spec(Mode::ForceIntersecting, seed), &cfg()).unwrap();
            assert!(!primal_intersect(&b1, &b2, &cfg()).unwrap().is_disjoint());
            let (b1, b2) = generate(&spec(Mode::ForceDisjoint, seed), &cfg()).unwrap();
            assert!(primal_intersect(&b1, &b2, &cfg()).unwrap().is_disjoint());
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(Mode::Unconstrained, 0);
        s.spread = FRAC_PI_2;
        assert!(matches!(generate(&s, &cfg()), Err(Error::GenerationFailed(_))));
        let mut s = spec(Mode::Unconstrained, 0);
        s.sizes = (0, 2);
        assert!(generate(&s, &cfg()).is_err());
        let mut s = spec(Mode::Unconstrained, 0);
        s.dim = 0;
        assert!(generate(&s, &cfg()).is_err());
    }

    #[test]
    fn invalid_campaign_config_is_reported_not_panicked() {
        for config in [
            CampaignConfig { count: 3, dims: vec![], ..Default::default() },
            CampaignConfig { count: 3, sizes: (5, 2), ..Default::default() },
            CampaignConfig { count: 3, spread: 2.0, ..Default::default() },
        ] {
            assert!(config.validate().is_err());
            let report = run_equivalence_campaign(&config, &cfg());
            assert_eq!(report.disagreements, 3);
            assert!(report.failures.iter().all(|f| f.check == "config"));
        }
    }

    #[test]
    fn empty_campaign() {
        let config = CampaignConfig { count: 0, ..Default::default() };
        let report = run_equivalence_campaign(&config, &cfg());
        assert_eq!(report.instances, 0);
        assert!(report.success());
        assert_eq!(report.ambiguous_fraction(), 0.0);
    }

    #[test]
    fn small_campaign_is_clean_and_reproducible() {
        let config = CampaignConfig { count: 60, ..Default::default() };
        let a = run_equivalence_campaign(&config, &cfg());
        assert!(a.success(), "{:#?}", a.failures);
        assert_eq!(a.instances, a.agreements + a.ambiguous + a.disagreements);
        let b = run_equivalence_campaign(&config, &cfg());
        assert_eq!(a.records, b.records);
        assert_eq!(a.checks, b.checks);
    }
}
