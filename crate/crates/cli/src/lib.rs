//! `sphsep` command line.
//!
//! ```text
//! sphsep check <file>
//! sphsep witness <file> [--method lp|proof-path]
//! sphsep fuzz [--count N] [--dims 1,2,3,5] [--sizes 1..12] [--seed S] [--spread A]
//! sphsep plot <file> -o <out>
//! ```
//!
//! `--tol-margin` and `--tol-offset` override the instance file's
//! tolerances. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | disjoint (or a successful fuzz/plot run) |
//! | 1 | fuzz found a disagreement |
//! | 2 | intersecting |
//! | 3 | numerically ambiguous, or a well-formed but invalid instance |
//! | 4 | malformed input or usage |
//! | 5 | the constructive route failed to produce a witness |

pub mod io;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sphsep::harness::{run_equivalence_campaign, CampaignConfig, CampaignReport};
use sphsep::separation::{dual_witness, primal_intersect, proof_path_witness, wedge_membership};
use sphsep::{Error, PrimalOutcome, SeparationCertificate, SphericalBody, ToleranceConfig};

use crate::io::{parse_instance, Instance, ResultFile, TraceFile};

pub mod exit {
    pub const DISJOINT: i32 = 0;
    pub const DISAGREEMENT: i32 = 1;
    pub const INTERSECTING: i32 = 2;
    pub const AMBIGUOUS: i32 = 3;
    pub const MALFORMED: i32 = 4;
    pub const PROOF_FAILED: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "sphsep", version, about = "Separate convex bodies on the sphere")]
pub struct Cli {
    /// Override the margin tolerance standing in for strict inequalities.
    #[arg(long, global = true)]
    pub tol_margin: Option<f64>,
    /// Override the offset at which hyperplane contraction stops.
    #[arg(long, global = true)]
    pub tol_offset: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the two bodies of an instance intersect.
    Check { file: PathBuf },
    /// Compute a separating pole.
    Witness {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Lp)]
        method: Method,
    },
    /// Run a seeded equivalence campaign and print its report.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 5])]
        dims: Vec<usize>,
        /// Generator counts per body: `lo..hi` (inclusive), `lo..=hi`, a comma list, or one number.
        #[arg(long, default_value = "1..12", value_parser = parse_sizes)]
        sizes: (usize, usize),
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Maximum angle between a generator and its cap center.
        #[arg(long, default_value_t = 0.4)]
        spread: f64,
    },
    /// Write a plot scene for an instance on S^2.
    Plot {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lp,
    ProofPath,
}

pub fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("invalid size {t:?}: {e}"));
    let (lo, hi) = if let Some((a, b)) = s.split_once("..") {
        (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?)
    } else {
        let values = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        (*values.iter().min().unwrap(), *values.iter().max().unwrap())
    };
    if lo == 0 || lo > hi {
        return Err(format!("size range {lo}..{hi} is empty or starts at 0"));
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                exit::MALFORMED
            } else {
                let _ = write!(out, "{e}");
                0
            };
            return code;
        }
    };
    let mut ctx = Context { out, err, cli: &cli };
    match ctx.dispatch() {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(ctx.err, "sphsep: {msg}");
            code
        }
    }
}

/// An exit code with a diagnostic for standard error.
struct Failure(i32, String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(exit::MALFORMED, e.to_string())
    }
}

struct Context<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    cli: &'a Cli,
}

impl Context<'_> {
    fn dispatch(&mut self) -> Result<i32, Failure> {
        match &self.cli.command {
            Command::Check { file } => self.check(file),
            Command::Witness { file, method } => self.witness(file, *method),
            Command::Fuzz {
                count,
                dims,
                sizes,
                seed,
                spread,
            } => self.fuzz(CampaignConfig {
                count: *count,
                dims: dims.clone(),
                sizes: *sizes,
                seed: *seed,
                spread: *spread,
                ..CampaignConfig::default()
            }),
            Command::Plot { file, output } => self.plot(file, output),
        }
    }

    fn tolerances(&self, base: Option<ToleranceConfig>) -> Result<ToleranceConfig, Failure> {
        let mut cfg = base.unwrap_or_default();
        if let Some(m) = self.cli.tol_margin {
            cfg.margin_tol = m;
        }
        if let Some(o) = self.cli.tol_offset {
            cfg.offset_tol = o;
        }
        cfg.validate().map_err(|e| Failure(exit::MALFORMED, e.to_string()))?;
        Ok(cfg)
    }

    fn load(&mut self, path: &Path) -> Result<(SphericalBody, SphericalBody, ToleranceConfig), Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure(exit::MALFORMED, format!("{}: {e}", path.display())))?;
        let Instance {
            w1,
            w2,
            tolerances,
            warnings,
            ..
        } = parse_instance(&text).map_err(|e| Failure(exit::MALFORMED, format!("{}: {e}", path.display())))?;
        for w in warnings {
            writeln!(self.err, "warning: {w}")?;
        }
        let cfg = self.tolerances(tolerances)?;
        let b1 = SphericalBody::new(w1, &cfg).map_err(|e| invalid("w1", e))?;
        let b2 = SphericalBody::new(w2, &cfg).map_err(|e| invalid("w2", e))?;
        Ok((b1, b2, cfg))
    }

    fn emit(&mut self, result: &ResultFile) -> Result<(), Failure> {
        self.out.write_all(result.to_json().as_bytes())?;
        Ok(())
    }

    fn check(&mut self, file: &Path) -> Result<i32, Failure> {
        let (b1, b2, cfg) = self.load(file)?;
        match primal_intersect(&b1, &b2, &cfg).map_err(|e| invalid("instance", e))? {
            PrimalOutcome::Intersecting(cert) => {
                self.emit(&ResultFile::intersecting(&cert))?;
                Ok(exit::INTERSECTING)
            }
            PrimalOutcome::ProvablyDisjoint => self.lp_witness(&b1, &b2, &cfg),
        }
    }

    fn witness(&mut self, file: &Path, method: Method) -> Result<i32, Failure> {
        let (b1, b2, cfg) = self.load(file)?;
        match method {
            Method::Lp => self.lp_witness(&b1, &b2, &cfg),
            Method::ProofPath => {
                if let PrimalOutcome::Intersecting(cert) =
                    primal_intersect(&b1, &b2, &cfg).map_err(|e| invalid("instance", e))?
                {
                    self.emit(&ResultFile::intersecting(&cert))?;
                    return Ok(exit::INTERSECTING);
                }
                match proof_path_witness(&b1, &b2, &cfg) {
                    Ok((SeparationCertificate::Disjoint { witness, margin }, trace)) => {
                        let wm = wedge_membership(&b1, &b2, &witness, &cfg);
                        if !wm.member {
                            return Err(Failure(exit::PROOF_FAILED, format!("witness rejected (margin {:e})", wm.margin)));
                        }
                        self.emit(&ResultFile {
                            trace: Some(TraceFile::from(&trace)),
                            ..ResultFile::disjoint(&witness, margin)
                        })?;
                        Ok(exit::DISJOINT)
                    }
                    Ok((SeparationCertificate::Intersecting(cert), _)) => {
                        self.emit(&ResultFile::intersecting(&cert))?;
                        Ok(exit::INTERSECTING)
                    }
                    Err(
                        e @ (Error::ContractionStalled { .. } | Error::EpsilonSearchFailed(_) | Error::WitnessRejected(_)),
                    ) => Err(Failure(exit::PROOF_FAILED, e.to_string())),
                    Err(e) => Err(invalid("instance", e)),
                }
            }
        }
    }

    fn lp_witness(&mut self, b1: &SphericalBody, b2: &SphericalBody, cfg: &ToleranceConfig) -> Result<i32, Failure> {
        match dual_witness(b1, b2, cfg) {
            Ok(SeparationCertificate::Disjoint { witness, margin }) => {
                let wm = wedge_membership(b1, b2, &witness, cfg);
                if !wm.member {
                    writeln!(self.err, "warning: witness failed re-validation (margin {:e})", wm.margin)?;
                    self.emit(&ResultFile::ambiguous(Some(wm.margin)))?;
                    return Ok(exit::AMBIGUOUS);
                }
                self.emit(&ResultFile::disjoint(&witness, margin))?;
                Ok(exit::DISJOINT)
            }
            Ok(SeparationCertificate::Intersecting(cert)) => {
                self.emit(&ResultFile::intersecting(&cert))?;
                Ok(exit::INTERSECTING)
            }
            Err(e @ (Error::NumericallyAmbiguous(t) | Error::OracleDisagreement(t))) => {
                writeln!(self.err, "warning: {e}")?;
                self.emit(&ResultFile::ambiguous(Some(t)))?;
                Ok(exit::AMBIGUOUS)
            }
            Err(e) => Err(invalid("instance", e)),
        }
    }

    fn fuzz(&mut self, config: CampaignConfig) -> Result<i32, Failure> {
        config.validate().map_err(|e| Failure(exit::MALFORMED, e.to_string()))?;
        let cfg = self.tolerances(None)?;
        let report = run_equivalence_campaign(&config, &cfg);
        let doc = FuzzReport {
            ambiguous_fraction: report.ambiguous_fraction(),
            report: &report,
        };
        let mut json = serde_json::to_string_pretty(&doc).expect("report serializes");
        json.push('\n');
        self.out.write_all(json.as_bytes())?;
        writeln!(
            self.err,
            "{} instances: {} agreements, {} ambiguous, {} disagreements in {:.2} s",
            report.instances,
            report.agreements,
            report.ambiguous,
            report.disagreements,
            report.wall_time.as_secs_f64()
        )?;
        Ok(if report.success() { 0 } else { exit::DISAGREEMENT })
    }

    fn plot(&mut self, file: &Path, output: &Path) -> Result<i32, Failure> {
        let (b1, b2, cfg) = self.load(file)?;
        if b1.dim() != 2 {
            return Err(Failure(
                exit::AMBIGUOUS,
                format!("unsupported dimension: plot needs n = 2, found n = {}", b1.dim()),
            ));
        }
        let witness = match dual_witness(&b1, &b2, &cfg) {
            Ok(SeparationCertificate::Disjoint { witness, .. }) => Some(witness),
            _ => None,
        };
        let scene = plot::scene(&b1, &b2, witness.as_ref(), &cfg).map_err(|e| invalid("instance", e))?;
        let mut json = serde_json::to_string_pretty(&scene).expect("scene serializes");
        json.push('\n');
        std::fs::write(output, json).map_err(|e| Failure(exit::MALFORMED, format!("{}: {e}", output.display())))?;
        writeln!(self.err, "wrote {} points to {}", scene.point_count(), output.display())?;
        Ok(0)
    }
}

fn invalid(what: &str, e: Error) -> Failure {
    Failure(exit::AMBIGUOUS, format!("invalid {what}: {e}"))
}

#[derive(Serialize)]
struct FuzzReport<'a> {
    #[serde(flatten)]
    report: &'a CampaignReport,
    ambiguous_fraction: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("1..12"), Ok((1, 12)));
        assert_eq!(parse_sizes("2..=5"), Ok((2, 5)));
        assert_eq!(parse_sizes("3,1,7"), Ok((1, 7)));
        assert_eq!(parse_sizes("4"), Ok((4, 4)));
        assert!(parse_sizes("0..3").is_err());
        assert!(parse_sizes("5..2").is_err());
        assert!(parse_sizes("a..b").is_err());
    }

    #[test]
    fn usage_errors_exit_four() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["sphsep", "frobnicate"], &mut out, &mut err), exit::MALFORMED);
        assert_eq!(run(["sphsep", "fuzz", "--sizes", "0..2"], &mut out, &mut err), exit::MALFORMED);
        assert_eq!(run(["sphsep", "--help"], &mut out, &mut err), 0);
    }
}
