//! Command-line front door: configuration parsing, experiment orchestration,
//! and bit-stable exports.
//!
//! Every command can read a single JSON configuration document (`--config`)
//! and/or individual flags; flags win. Artifacts are written under `--out`
//! with fixed names, or streamed to stdout in a fixed order when no output
//! directory is given. All floating-point numbers are serialized with 17
//! significant digits so that artifacts round-trip doubles exactly, and the
//! randomized pieces draw from a named, seeded generator that is recorded in
//! every report — identical configuration and seed produce byte-identical
//! bytes.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::algebra::{
    gibbs_functional, kms_battery, random_cylinder_function, relation_suite, uniqueness_probe,
    AlgebraContext, BatteryReport, RelationReport,
};
use crate::error::{Error, Result};
use crate::ff::{FfModel, FfParams};
use crate::gibbs::{equilibrium_state, CylinderMeasure};
use crate::shift::{Potential, ShiftSpace};
use crate::transfer::{leading_triple, DEFAULT_MAX_ITER, DEFAULT_POWER_TOL};

const GENERATOR_NAME: &str = "chacha8";
const DEFAULT_SEED: u64 = 0xA11CE;

/// Compute spectra, pressure curves, KMS verifications, and the renewal
/// model from the command line.
#[derive(Debug, Parser)]
#[command(name = "ruelle", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leading eigenvalue, eigenfunction, eigenmeasure, and pressure of the
    /// transfer operator for one potential at one inverse temperature
    Spectrum(SpectrumArgs),
    /// Pressure, eigenvalue, energy, and entropy along a β grid (CSV)
    PressureCurve(CurveArgs),
    /// Operator relations, the KMS battery, and the uniqueness probe
    KmsVerify(KmsArgs),
    /// The two-symbol renewal model: pressure curve and closed-form summary
    Ff(FfArgs),
    /// Re-emit a JSON artifact with canonical 17-digit number formatting
    Export(ExportArgs),
}

/// A β grid given as `start,stop,count`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count < 1 {
            return Err(Error::Config("beta grid needs count ≥ 1".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config("beta grid endpoints must be finite".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + step * i as f64).collect())
    }
}

fn parse_grid(text: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected start,stop,count — got {text:?}"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|e| format!("start: {e}"))?;
    let stop: f64 = parts[1].trim().parse().map_err(|e| format!("stop: {e}"))?;
    let count: usize = parts[2].trim().parse().map_err(|e| format!("count: {e}"))?;
    Ok(GridSpec { start, stop, count })
}

/// A potential in configuration: either a path to a serialized table or an
/// inline depth + value list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Path(PathBuf),
    Inline { depth: usize, values: Vec<f64> },
}

impl PotentialSpec {
    fn resolve(&self, space: ShiftSpace) -> Result<Potential> {
        match self {
            PotentialSpec::Inline { depth, values } => {
                Potential::from_values(space, *depth, values.clone())
            }
            PotentialSpec::Path(path) => {
                if !path.exists() {
                    return Err(Error::Config(format!(
                        "potential file {} does not exist",
                        path.display()
                    )));
                }
                let text = fs::read_to_string(path)?;
                let potential: Potential = serde_json::from_str(&text)?;
                if potential.space().symbol_count() != space.symbol_count() {
                    return Err(Error::SymbolMismatch(
                        potential.space().symbol_count(),
                        space.symbol_count(),
                    ));
                }
                Ok(potential)
            }
        }
    }
}

/// The single JSON configuration document shared by all commands.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// number of shift symbols
    pub k: Option<usize>,
    /// cylinder depth of the working basis
    pub depth: Option<usize>,
    /// the positive flow potential H
    pub hamiltonian: Option<PotentialSpec>,
    /// the normalized reference weight p (defaults to the coin-flip 1/k)
    pub jacobian: Option<PotentialSpec>,
    /// single inverse temperature
    pub beta: Option<f64>,
    /// inverse-temperature grid
    pub beta_grid: Option<GridSpec>,
    /// residual/solver tolerance
    pub tol: Option<f64>,
    /// power-iteration cap
    pub max_iter: Option<usize>,
    /// seed for the randomized batteries
    pub seed: Option<u64>,
    /// output directory for artifacts
    pub out: Option<PathBuf>,
    /// largest generator level in the KMS battery
    pub max_level: Option<usize>,
    /// renewal-model decay exponent
    pub gamma: Option<f64>,
    /// renewal-model truncation index
    pub k_max: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                if !p.exists() {
                    return Err(Error::Config(format!(
                        "config file {} does not exist",
                        p.display()
                    )));
                }
                let text = fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// JSON configuration document
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// directory for artifacts (stdout when omitted)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// number of shift symbols
    #[arg(long)]
    pub k: Option<usize>,
    /// cylinder depth of the working basis
    #[arg(long)]
    pub depth: Option<usize>,
    /// inverse temperature β (the operator weight is H^{-β})
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// power-iteration tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// path to a serialized potential table for H
    #[arg(long, value_name = "PATH")]
    pub hamiltonian: Option<PathBuf>,
    /// seed recorded in the report
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// JSON configuration document
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// directory for artifacts (stdout when omitted)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// number of shift symbols
    #[arg(long)]
    pub k: Option<usize>,
    /// cylinder depth of the working basis
    #[arg(long)]
    pub depth: Option<usize>,
    /// β grid as start,stop,count
    #[arg(long = "beta-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    pub beta_grid: Option<GridSpec>,
    /// power-iteration tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// path to a serialized potential table for H
    #[arg(long, value_name = "PATH")]
    pub hamiltonian: Option<PathBuf>,
    /// seed recorded in the report
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct KmsArgs {
    /// JSON configuration document
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// directory for artifacts (stdout when omitted)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// number of shift symbols
    #[arg(long)]
    pub k: Option<usize>,
    /// cylinder depth of the working basis
    #[arg(long)]
    pub depth: Option<usize>,
    /// inverse temperature β
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// residual tolerance; any residual above it fails the run (exit 1)
    #[arg(long)]
    pub tol: Option<f64>,
    /// largest generator level in the battery
    #[arg(long = "max-level")]
    pub max_level: Option<usize>,
    /// path to a serialized potential table for H
    #[arg(long, value_name = "PATH")]
    pub hamiltonian: Option<PathBuf>,
    /// seed for the randomized relation probes
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FfArgs {
    /// JSON configuration document
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// directory for artifacts (stdout when omitted)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// polynomial return-time exponent (> 2)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// β grid as start,stop,count
    #[arg(long = "beta-grid", value_parser = parse_grid, allow_hyphen_values = true)]
    pub beta_grid: Option<GridSpec>,
    /// atom truncation index
    #[arg(long = "kmax")]
    pub kmax: Option<usize>,
    /// admissible truncation tail
    #[arg(long)]
    pub tol: Option<f64>,
    /// seed recorded in the report
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// JSON artifact to canonicalize
    #[arg(value_name = "FILE")]
    pub input: PathBuf,
    /// directory for the re-serialized artifact (stdout when omitted)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// JSON formatter that prints every float with 17 significant digits
/// (scientific notation), so artifacts identify doubles exactly.
struct SciPretty<'a> {
    inner: PrettyFormatter<'a>,
}

impl SciPretty<'_> {
    fn new() -> Self {
        Self {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for SciPretty<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Serialize a JSON value with the canonical 17-digit float format.
pub fn to_canonical_json(value: &serde_json::Value) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciPretty::new());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Render a numeric CSV table with a header row, `{:.16e}` cells, and LF
/// line endings.
pub fn to_csv(header: &[&str], rows: &[Vec<f64>]) -> Vec<u8> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text.into_bytes()
}

/// A named output file.
pub struct Artifact {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

fn emit(out: Option<&Path>, artifacts: &[Artifact]) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for artifact in artifacts {
                fs::write(dir.join(artifact.name), &artifact.bytes)?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for artifact in artifacts {
                lock.write_all(&artifact.bytes)?;
            }
        }
    }
    Ok(())
}

struct Merged {
    k: usize,
    depth: usize,
    beta: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    max_level: usize,
    out: Option<PathBuf>,
    grid: GridSpec,
    hamiltonian: Option<PotentialSpec>,
    jacobian: Option<PotentialSpec>,
}

#[allow(clippy::too_many_arguments)]
fn merge(
    config: &RunConfig,
    k: Option<usize>,
    depth: Option<usize>,
    beta: Option<f64>,
    tol: Option<f64>,
    default_tol: f64,
    seed: Option<u64>,
    max_level: Option<usize>,
    out: Option<PathBuf>,
    grid: Option<GridSpec>,
    hamiltonian_path: Option<PathBuf>,
) -> Result<Merged> {
    let merged = Merged {
        k: k.or(config.k).unwrap_or(2),
        depth: depth.or(config.depth).unwrap_or(4),
        beta: beta.or(config.beta).unwrap_or(1.0),
        tol: tol.or(config.tol).unwrap_or(default_tol),
        max_iter: config.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        seed: seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        max_level: max_level.or(config.max_level).unwrap_or(3),
        out: out.or_else(|| config.out.clone()),
        grid: grid.or(config.beta_grid).unwrap_or(GridSpec {
            start: 0.0,
            stop: 2.0,
            count: 21,
        }),
        hamiltonian: hamiltonian_path
            .map(PotentialSpec::Path)
            .or_else(|| config.hamiltonian.clone()),
        jacobian: config.jacobian.clone(),
    };
    if !(merged.tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {}",
            merged.tol
        )));
    }
    Ok(merged)
}

/// The demo H when none is configured: depth-1 values (1, 2, …, k).
fn default_hamiltonian(space: ShiftSpace) -> Result<Potential> {
    let values = (1..=space.symbol_count()).map(|i| i as f64).collect();
    Potential::from_values(space, 1, values)
}

fn resolve_hamiltonian(spec: &Option<PotentialSpec>, space: ShiftSpace) -> Result<Potential> {
    match spec {
        Some(spec) => spec.resolve(space),
        None => default_hamiltonian(space),
    }
}

fn resolve_jacobian(spec: &Option<PotentialSpec>, space: ShiftSpace) -> Result<Potential> {
    match spec {
        Some(spec) => spec.resolve(space),
        None => Ok(Potential::uniform_jacobian(space)),
    }
}

fn run_block(seed: u64, tol: f64) -> serde_json::Value {
    json!({
        "generator": GENERATOR_NAME,
        "seed": seed,
        "tolerance": tol,
    })
}

fn spectrum(args: SpectrumArgs) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let m = merge(
        &config,
        args.k,
        args.depth,
        args.beta,
        args.tol,
        DEFAULT_POWER_TOL,
        args.seed,
        None,
        args.out,
        None,
        args.hamiltonian,
    )?;
    let space = ShiftSpace::new(m.k)?;
    let h = resolve_hamiltonian(&m.hamiltonian, space)?;
    let weight = h.pow(-m.beta)?;
    let triple = leading_triple(&weight, m.depth, m.tol, m.max_iter)?;
    let report = json!({
        "lambda": triple.eigenvalue,
        "pressure": triple.eigenvalue.ln(),
        "h": serde_json::to_value(&triple.eigenfunction)?,
        "nu": serde_json::to_value(&triple.eigenmeasure)?,
        "iterations": triple.iterations,
        "residual": triple.residual,
        "run": run_block(m.seed, m.tol),
    });
    emit(
        m.out.as_deref(),
        &[Artifact {
            name: "spectrum.json",
            bytes: to_canonical_json(&report)?,
        }],
    )
}

fn pressure_curve_cmd(args: CurveArgs) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let m = merge(
        &config,
        args.k,
        args.depth,
        None,
        args.tol,
        DEFAULT_POWER_TOL,
        args.seed,
        None,
        args.out,
        args.beta_grid,
        args.hamiltonian,
    )?;
    let space = ShiftSpace::new(m.k)?;
    let h = resolve_hamiltonian(&m.hamiltonian, space)?;
    let mut rows = Vec::new();
    for beta in m.grid.points()? {
        let state = equilibrium_state(&h, beta, m.depth, m.tol, m.max_iter)?;
        rows.push(vec![
            beta,
            state.pressure,
            state.lambda,
            state.energy,
            state.entropy,
        ]);
    }
    emit(
        m.out.as_deref(),
        &[Artifact {
            name: "pressure_curve.csv",
            bytes: to_csv(&["beta", "pressure", "lambda", "energy", "entropy"], &rows),
        }],
    )
}

fn battery_json(report: &BatteryReport) -> Result<serde_json::Value> {
    const MAX_LISTED: usize = 100;
    let listed: Vec<serde_json::Value> = report
        .failures
        .iter()
        .take(MAX_LISTED)
        .map(|f| {
            Ok(json!({
                "a": {
                    "f": serde_json::to_value(f.left_term.left_symbol())?,
                    "n": f.left_term.level(),
                    "g": serde_json::to_value(f.left_term.right_symbol())?,
                },
                "b": {
                    "f": serde_json::to_value(f.right_term.left_symbol())?,
                    "n": f.right_term.level(),
                    "g": serde_json::to_value(f.right_term.right_symbol())?,
                },
                "residual": f.residual,
            }))
        })
        .collect::<Result<_>>()?;
    let mut value = json!({
        "beta": report.beta,
        "battery_size": report.pairs,
        "max_residual": report.max_residual,
        "failures": listed,
    });
    if report.failures.len() > MAX_LISTED {
        value["failures_omitted"] = json!(report.failures.len() - MAX_LISTED);
    }
    Ok(value)
}

fn relations_json(report: &RelationReport) -> serde_json::Value {
    json!({
        "checks": report
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "residual": c.residual}))
            .collect::<Vec<_>>(),
        "max_residual": report.max_residual(),
    })
}

fn kms_verify(args: KmsArgs) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let m = merge(
        &config,
        args.k,
        args.depth,
        args.beta,
        args.tol,
        1e-8,
        args.seed,
        args.max_level,
        args.out,
        None,
        args.hamiltonian,
    )?;
    let space = ShiftSpace::new(m.k)?;
    let p = resolve_jacobian(&m.jacobian, space)?;
    let h = resolve_hamiltonian(&m.hamiltonian, space)?;
    let ctx = AlgebraContext::new(p.clone(), m.depth, DEFAULT_POWER_TOL, m.max_iter)?;
    let psi = gibbs_functional(&ctx, &h, m.beta, DEFAULT_POWER_TOL, m.max_iter)?;

    let battery = kms_battery(&ctx, &h, m.beta, &psi, m.max_level, m.tol)?;

    let mut rng = ChaCha8Rng::seed_from_u64(m.seed);
    let probe_depth = m.depth.min(2);
    let f = random_cylinder_function(space, probe_depth, &mut rng)?;
    let g = random_cylinder_function(space, probe_depth, &mut rng)?;
    let relation_level = 2.min(m.depth.saturating_sub(1)).min(m.max_level);
    let relations = relation_suite(&ctx, &f, &g, relation_level)?;

    let reach = p.depth().max(h.depth()).max(1);
    let probe_steps = (m.depth + 1 - reach).min(m.depth);
    let start = CylinderMeasure::uniform(space, m.depth)?;
    let probe = uniqueness_probe(&p, &h, m.beta, &start, probe_steps, DEFAULT_POWER_TOL, m.max_iter)?;
    let final_tv = probe.last().map(|s| s.tv_distance).unwrap_or(f64::INFINITY);

    let mut report = battery_json(&battery)?;
    report["relations"] = relations_json(&relations);
    report["uniqueness"] = json!({
        "steps": probe
            .iter()
            .map(|s| json!({
                "level": s.level,
                "tv_distance": s.tv_distance,
                "normalization": s.normalization,
            }))
            .collect::<Vec<_>>(),
    });
    report["run"] = run_block(m.seed, m.tol);

    emit(
        m.out.as_deref(),
        &[Artifact {
            name: "kms_verify.json",
            bytes: to_canonical_json(&report)?,
        }],
    )?;

    if !battery.failures.is_empty() {
        return Err(Error::Tolerance(format!(
            "{} of {} battery pairs exceed {:.3e} (max residual {:.3e})",
            battery.failures.len(),
            battery.pairs,
            m.tol,
            battery.max_residual
        )));
    }
    if relations.max_residual() > m.tol {
        return Err(Error::Tolerance(format!(
            "operator relations reach residual {:.3e} above {:.3e}",
            relations.max_residual(),
            m.tol
        )));
    }
    if final_tv > m.tol {
        return Err(Error::Tolerance(format!(
            "uniqueness probe stalls at total variation {final_tv:.3e} above {:.3e}",
            m.tol
        )));
    }
    Ok(())
}

fn ff_cmd(args: FfArgs) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let defaults = FfParams::default();
    let params = FfParams {
        gamma: args.gamma.or(config.gamma).unwrap_or(defaults.gamma),
        k_max: args.kmax.or(config.k_max).unwrap_or(defaults.k_max),
        tol: args.tol.or(config.tol).unwrap_or(defaults.tol),
    };
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let out = args.out.or(config.out);
    let grid = args.beta_grid.or(config.beta_grid).unwrap_or(GridSpec {
        start: 0.0,
        stop: 2.0,
        count: 41,
    });

    let model = FfModel::new(params)?;
    let rows: Vec<Vec<f64>> = model
        .pressure_curve(&grid.points()?)?
        .into_iter()
        .map(|(beta, pressure)| vec![beta, pressure])
        .collect();

    let masses: Vec<f64> = (0..20.min(params.k_max + 1))
        .map(|t| model.atom_mass(t))
        .collect::<Result<_>>()?;
    let summary = json!({
        "zeta_gamma": model.zeta_gamma(),
        "zeta_gamma_minus_1": model.zeta_gamma_minus_1(),
        "u": model.normalization(),
        "nu_masses": masses,
        "mass_deficit": model.mass_deficit(),
        "run": {
            "generator": GENERATOR_NAME,
            "seed": seed,
            "gamma": params.gamma,
            "k_max": params.k_max,
            "tolerance": params.tol,
        },
    });

    emit(
        out.as_deref(),
        &[
            Artifact {
                name: "ff_pressure.csv",
                bytes: to_csv(&["beta", "pressure"], &rows),
            },
            Artifact {
                name: "ff_summary.json",
                bytes: to_canonical_json(&summary)?,
            },
        ],
    )
}

fn export(args: ExportArgs) -> Result<()> {
    if !args.input.exists() {
        return Err(Error::Config(format!(
            "input file {} does not exist",
            args.input.display()
        )));
    }
    let text = fs::read_to_string(&args.input)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let bytes = to_canonical_json(&value)?;
    match args.out.as_deref() {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let stem = args
                .input
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("artifact");
            fs::write(dir.join(format!("{stem}.canonical.json")), &bytes)?;
            Ok(())
        }
        None => {
            io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

/// Execute a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(args) => spectrum(args),
        Command::PressureCurve(args) => pressure_curve_cmd(args),
        Command::KmsVerify(args) => kms_verify(args),
        Command::Ff(args) => ff_cmd(args),
        Command::Export(args) => export(args),
    }
}
