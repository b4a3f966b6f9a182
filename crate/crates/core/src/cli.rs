//! Command-line front end: configuration in, CSV and JSON artifacts out.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{ConvertDirection, RunConfig, Suite};
use crate::dynamics::simulate_partial;
use crate::error::{Error, Result};
use crate::field::{field_map, read_field_map_csv, write_field_map_csv};
use crate::helium::{field_rows_to_film, film_rows_to_field, read_film_csv, write_film_csv};
use crate::ledger::write_ledger_csv;
use crate::validation::{run_suite, Report};

#[derive(Debug, Parser)]
#[command(name = "ed3", version, about = "Point-charge electrodynamics in 2+1 dimensions")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory; overrides [output] dir.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for fieldmap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Reserved. The core has no randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Integrate the equation of motion and write trace, ledger and manifest.
    Simulate,
    /// Evaluate the field of a worldline family on a grid.
    Fieldmap,
    /// Run built-in validation suites.
    Validate {
        /// static, uniform, hyperbolic, maxwell, ledger or all; overrides [validate] suite.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Translate between field maps and helium film rows.
    Convert,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        Error::Io(_) | Error::Csv(_) => EXIT_OTHER,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub outputs: Vec<String>,
    pub status: String,
    pub wall_time_s: f64,
}

/// Files written by a command.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
    pub report: Option<Report>,
}

fn load(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Err(Error::Config("--config is required for this command".into())),
    }
}

fn out_dir(cli_out: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    cli_out.map(Path::to_path_buf).or_else(|| cfg.output().dir).unwrap_or_else(|| PathBuf::from("."))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_manifest(path: &Path, m: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(m).map_err(|e| Error::invalid(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Simulate, write the trace, the ledger and the manifest.
///
/// Configuration is fully validated before anything is written. On a
/// numerical failure the trace up to the last accepted step is still written.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Artifacts> {
    let start = Instant::now();
    let sim = cfg.sim_config()?;
    let (taus, delta) = cfg.ledger_times(&sim)?;
    let names = cfg.output();
    let hash = cfg.hash();
    create_dir(out)?;
    let trace_path = out.join(names.trace_name());
    let ledger_path = out.join(names.ledger_name());
    let manifest_path = out.join(names.manifest_name());

    let (mut trace, failure) = simulate_partial(&sim);
    trace.config_hash = Some(hash.clone());
    trace.write_csv(&trace_path)?;
    let mut files = vec![trace_path];
    let outcome = match failure {
        Some(e) => Err(e),
        None => trace.balance_residuals(&taus, delta),
    };
    if let Ok(reports) = &outcome {
        write_ledger_csv(reports, &ledger_path)?;
        files.push(ledger_path);
    }
    let manifest = Manifest {
        command: "simulate",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: hash,
        outputs: files.iter().map(|p| file_name(p)).collect(),
        status: match &outcome {
            Ok(_) => "ok".into(),
            Err(e) => format!("failed: {e}"),
        },
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_manifest(&manifest_path, &manifest)?;
    files.push(manifest_path);
    outcome?;
    Ok(Artifacts { files, report: None })
}

/// Evaluate the configured field map on `threads` workers (all cores when `None`).
pub fn cmd_fieldmap(cfg: &RunConfig, out: &Path, threads: Option<usize>) -> Result<Artifacts> {
    let start = Instant::now();
    let fm = cfg.fieldmap.as_ref().ok_or_else(|| Error::Config("missing [fieldmap] section".into()))?;
    let grid = fm.grid()?;
    let w = fm.worldline()?;
    if threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let rows = pool.install(|| field_map(w.as_ref(), fm.charge, fm.direction.into(), &grid, fm.quad_tol));
    let names = cfg.output();
    create_dir(out)?;
    let path = out.join(names.fieldmap_name());
    write_field_map_csv(&rows, &path)?;
    let flagged = rows.iter().filter(|r| r.quad_error < 0.0).count();
    let manifest_path = out.join(names.manifest_name());
    write_manifest(
        &manifest_path,
        &Manifest {
            command: "fieldmap",
            version: env!("CARGO_PKG_VERSION"),
            config_hash: cfg.hash(),
            outputs: vec![file_name(&path)],
            status: if flagged == 0 { "ok".into() } else { format!("ok, {flagged} points flagged") },
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    )?;
    Ok(Artifacts { files: vec![path, manifest_path], report: None })
}

/// Run a validation suite and write `validation.json`. The report is returned
/// even when checks fail.
pub fn cmd_validate(suite: Suite, out: &Path) -> Result<Artifacts> {
    let report = run_suite(suite);
    create_dir(out)?;
    let path = out.join("validation.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::invalid(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(Artifacts { files: vec![path], report: Some(report) })
}

/// Convert a field map CSV to film rows or back, with the [film] parameters.
pub fn cmd_convert(cfg: &RunConfig, out: &Path) -> Result<Artifacts> {
    let conv = cfg.convert.as_ref().ok_or_else(|| Error::Config("missing [convert] section".into()))?;
    let p = cfg.film_parameters()?;
    if !conv.input.is_file() {
        return Err(Error::Config(format!("convert input {} does not exist", conv.input.display())));
    }
    let names = cfg.output();
    let path = match conv.direction {
        ConvertDirection::FieldToFilm => {
            let rows = field_rows_to_film(&read_field_map_csv(&conv.input)?, &p);
            create_dir(out)?;
            let path = out.join(names.film_name());
            write_film_csv(&rows, &path)?;
            path
        }
        ConvertDirection::FilmToField => {
            let rows = film_rows_to_field(&read_film_csv(&conv.input)?, &p);
            create_dir(out)?;
            let path = out.join(names.fieldmap_name());
            write_field_map_csv(&rows, &path)?;
            path
        }
    };
    Ok(Artifacts { files: vec![path], report: None })
}

fn dispatch(cli: &Cli) -> Result<Artifacts> {
    match &cli.command {
        Command::Simulate => {
            let cfg = load(cli.config.as_deref())?;
            cmd_simulate(&cfg, &out_dir(cli.out.as_deref(), &cfg))
        }
        Command::Fieldmap => {
            let cfg = load(cli.config.as_deref())?;
            cmd_fieldmap(&cfg, &out_dir(cli.out.as_deref(), &cfg), cli.threads)
        }
        Command::Validate { suite } => {
            let cfg = match &cli.config {
                Some(p) => Some(RunConfig::load(p)?),
                None => None,
            };
            let suite = match (suite, cfg.as_ref().and_then(|c| c.validate.as_ref())) {
                (Some(s), _) => s.parse()?,
                (None, Some(v)) => v.suite,
                (None, None) => Suite::All,
            };
            let out = match &cfg {
                Some(c) => out_dir(cli.out.as_deref(), c),
                None => cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
            };
            cmd_validate(suite, &out)
        }
        Command::Convert => {
            let cfg = load(cli.config.as_deref())?;
            cmd_convert(&cfg, &out_dir(cli.out.as_deref(), &cfg))
        }
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(art) => {
            if let Some(report) = &art.report {
                for c in &report.checks {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    println!("{mark} [{}] {}: measured {:e}, expected {:e}, tol {:e}", c.suite, c.name, c.measured, c.expected, c.tolerance);
                }
                if !report.passed {
                    eprintln!("validation failed: {} checks", report.failures().count());
                    return EXIT_OTHER;
                }
            }
            for f in &art.files {
                log::info!("wrote {}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
