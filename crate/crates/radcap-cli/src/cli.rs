//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CheckOutput};
use crate::config::{parse_bound, GridSpec, RunConfig, WeightFlags};
use crate::error::CliError;
use crate::gallery;
use crate::output::emit;

#[derive(Debug, Parser)]
#[command(name = "radcap", version, about = "Capacities of annuli for radial weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CSV of (r, f, fprime) for the ball-measure profile.
    Measure,
    /// JSON estimates of the eight exponent sets and the density brackets.
    Exponents,
    /// CSV of annulus capacities; --R inf gives the whole-space capacity.
    Capacity,
    /// JSON reports of capacity bounds checked over a grid of annuli.
    Check,
    /// Runs the worked examples against their manifests.
    Gallery,
}

#[derive(Debug, Args)]
pub struct Flags {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// constant, power, powerlog0, powerlog-inf, shifted-log, ex1, ex-s-touch, abcd, oscillating, cantor.
    #[arg(long, global = true)]
    pub weight: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub shift: Option<f64>,
    /// Ladder depth, or Cantor resolution level.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    #[arg(long, global = true)]
    pub levels: Option<u32>,
    #[arg(long = "a", global = true)]
    pub a: Option<f64>,
    #[arg(long = "b", global = true)]
    pub b: Option<f64>,
    #[arg(long = "c", global = true)]
    pub c: Option<f64>,
    #[arg(long = "d", global = true)]
    pub d: Option<f64>,
    /// Output file (directory for gallery); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for pair subsampling in the exponent scans.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Evaluate bounds even where their hypotheses fail.
    #[arg(long, global = true)]
    pub audit: bool,
    /// Geometric radius grid lo:hi:N.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Sample at ladder marks with index up to K.
    #[arg(long = "grid-ladder", global = true)]
    pub grid_ladder: Option<i64>,
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Outer radius; "inf" for the whole space.
    #[arg(long = "R", global = true)]
    pub big_r: Option<String>,
    /// Bound id to check (repeatable).
    #[arg(long = "bound", global = true)]
    pub bounds: Vec<String>,
    /// small, large or all.
    #[arg(long, global = true)]
    pub regime: Option<String>,
    /// Largest capacity/bound discrepancy a consistent check may show.
    #[arg(long, global = true)]
    pub factor: Option<f64>,
    /// Interior-membership margin for exponent hypotheses.
    #[arg(long, global = true)]
    pub margin: Option<f64>,
}

impl Flags {
    /// File values overlaid by flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_toml(&std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?)?,
            None => RunConfig::default(),
        };
        let weight_flags = WeightFlags {
            name: self.weight.clone(),
            n: self.n,
            p: self.p,
            beta: self.beta,
            alpha: self.alpha,
            shift: self.shift,
            depth: self.depth,
            levels: self.levels,
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
        };
        weight_flags.apply(&mut cfg.weight)?;
        macro_rules! over {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    cfg.$field = Some(v);
                }
            };
        }
        over!(p, self.p);
        over!(out, self.out.clone());
        over!(tol, self.tol);
        over!(seed, self.seed);
        over!(grid, self.grid.as_deref().map(GridSpec::parse).transpose()?);
        over!(grid_ladder, self.grid_ladder);
        over!(r, self.r.as_deref().map(parse_bound).transpose()?);
        over!(big_r, self.big_r.as_deref().map(parse_bound).transpose()?);
        over!(factor, self.factor);
        over!(margin, self.margin);
        if self.audit {
            cfg.audit = Some(true);
        }
        if !self.bounds.is_empty() {
            cfg.bounds = Some(self.bounds.clone());
        }
        if let Some(regime) = &self.regime {
            cfg.regime = Some(serde_json::from_value(serde_json::Value::String(regime.clone())).map_err(|_| CliError::Config(format!("regime must be small, large or all, got {regime:?}")))?);
        }
        if cfg.grid.is_some() && cfg.grid_ladder.is_some() && self.grid.is_some() != self.grid_ladder.is_some() {
            // A flag for one grid form replaces the other form from the file.
            if self.grid.is_some() {
                cfg.grid_ladder = None;
            } else {
                cfg.grid = None;
            }
        }
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.flags.resolve()?;
    let out = cfg.out.as_deref();
    match cli.command {
        Command::Measure => emit(out, &commands::measure(&cfg)?),
        Command::Exponents => emit(out, &commands::exponents(&cfg)?),
        Command::Capacity => emit(out, &commands::capacity(&cfg)?),
        Command::Check => {
            let result = commands::check(&cfg)?;
            if let Some(path) = out {
                for rep in &result.reports {
                    emit(Some(&CheckOutput::csv_path(path, rep.bound_id)), &CheckOutput::csv(rep)?)?;
                }
            }
            emit(out, &result.json)
        }
        Command::Gallery => {
            let dir = out.map(PathBuf::from).unwrap_or_else(|| PathBuf::from("gallery-out"));
            let reports = gallery::run_gallery(Some(&dir), cfg.seed.unwrap_or(0))?;
            let mut failed = Vec::new();
            for rep in &reports {
                let passed = rep.checks.iter().filter(|c| c.pass).count();
                println!("{} {} ({passed}/{} checks)", if rep.pass { "PASS" } else { "FAIL" }, rep.item, rep.checks.len());
                for c in rep.checks.iter().filter(|c| !c.pass) {
                    println!("    {}: expected {}, observed {}", c.name, c.expected, c.observed);
                }
                if let Some(e) = &rep.error {
                    println!("    error: {e}");
                }
                if !rep.pass {
                    failed.push(rep.item.clone());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Gallery(failed))
            }
        }
    }
}
