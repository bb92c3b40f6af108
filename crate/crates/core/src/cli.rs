//! Command-line front end: config parsing, command dispatch, and
//! deterministic serialization.
//!
//! Configs are JSON with unknown keys rejected; angles are given in
//! units of pi so special values stay exactly representable. Table
//! output is CSV by default (header `branch,root_index,k,epsilon,
//! re_root,im_root,residual` for root and spectrum tables) with
//! numbers printed to 17 significant digits, or JSON on request.
//! Output is byte-identical for identical config and seed.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::boundary::{build_s, numeric_roots, quartic_from_samples, CoefficientVector};
use crate::catalog::{closed_form_roots, root_entry_count};
use crate::checks::{self, CheckProfile};
use crate::error::{DomainError, InternalError};
use crate::modes::SlabMode;
use crate::params::{PhaseConfig, PhysicalParams, VariantId};
use crate::spectrum::{allowed_k, Parameterization, QuantizationProblem, DEFAULT_GRID};

/// Evaluates slab boundary problems from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "slabmodes", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when omitted and the config names none.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Table format override.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed override for randomized commands.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Draw-count override for randomized commands.
    #[arg(long)]
    pub draws: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Roots,
    OracleCheck,
    Spectrum,
    Mode,
    Sweep,
    Selftest,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub family: String,
    pub index: Option<u8>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParameterizationSpec {
    LandauLevel { n: u32 },
    FixedEpsilon { epsilon: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// "a_slab" or "field_b".
    pub parameter: String,
    pub values: Vec<f64>,
}

/// One run, fully described. Field applicability depends on `command`;
/// every present field is validated before any computation starts.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub variant: Option<VariantSpec>,
    /// Phase generators in units of pi.
    pub angles_pi: Option<Vec<f64>>,
    pub mass: Option<f64>,
    pub field: Option<f64>,
    pub parameterization: Option<ParameterizationSpec>,
    pub a_slab: Option<f64>,
    pub transverse_momentum: Option<f64>,
    /// Longitudinal momentum for the `roots` command.
    pub k: Option<f64>,
    /// Scan window (lo, hi]; lo may be 0.
    pub k_window: Option<[f64; 2]>,
    pub grid_points: Option<usize>,
    /// Catalog branch to scan; omitted means all branches merged.
    pub root_selector: Option<usize>,
    /// Row of the merged spectrum to expand into a mode grid.
    pub mode_index: Option<usize>,
    pub sweep: Option<SweepSpec>,
    pub output_path: Option<String>,
    pub output_format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub draws: Option<usize>,
}

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 2).
    Config(String),
    /// Physically inadmissible inputs (exit 3).
    Domain(DomainError),
    /// Internal consistency failure, including failed checks (exit 4).
    Internal(String),
    /// Output could not be written (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Domain(err) => write!(f, "domain: {err}"),
            CliError::Internal(msg) => write!(f, "internal: {msg}"),
            CliError::Io(msg) => write!(f, "output: {msg}"),
        }
    }
}

impl From<DomainError> for CliError {
    fn from(err: DomainError) -> Self {
        CliError::Domain(err)
    }
}

impl From<InternalError> for CliError {
    fn from(err: InternalError) -> Self {
        CliError::Internal(err.to_string())
    }
}

/// Full double round-trip precision: 17 significant digits.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

const TABLE_HEADER: &str = "branch,root_index,k,epsilon,re_root,im_root,residual";

fn require<T: Clone>(field: &Option<T>, name: &str) -> Result<T, CliError> {
    field
        .clone()
        .ok_or_else(|| CliError::Config(format!("missing required field `{name}`")))
}

fn parse_variant(spec: &VariantSpec) -> Result<VariantId, CliError> {
    let variant = match (spec.family.as_str(), spec.index) {
        ("one-phase", Some(i)) => VariantId::OnePhase(i),
        ("two-phase", Some(i)) => VariantId::TwoPhase(i),
        ("three-phase", Some(i)) => VariantId::ThreePhase(i),
        ("four-phase", None) => VariantId::FourPhase,
        ("four-phase", Some(_)) => {
            return Err(CliError::Config(
                "`variant.index` does not apply to the four-phase family".into(),
            ))
        }
        (family @ ("one-phase" | "two-phase" | "three-phase"), None) => {
            return Err(CliError::Config(format!(
                "`variant.index` is required for the {family} family"
            )))
        }
        (other, _) => {
            return Err(CliError::Config(format!(
                "unknown variant family `{other}`; expected one-phase, two-phase, three-phase, or four-phase"
            )))
        }
    };
    variant.validate()?;
    Ok(variant)
}

fn parse_phases(config: &RunConfig, variant: VariantId) -> Result<PhaseConfig, CliError> {
    let angles_pi = require(&config.angles_pi, "angles_pi")?;
    if angles_pi.len() != variant.generator_count() {
        return Err(CliError::Config(format!(
            "`angles_pi` needs {} entries for {variant}, got {}",
            variant.generator_count(),
            angles_pi.len()
        )));
    }
    let gens: Vec<f64> = angles_pi.iter().map(|a| a * std::f64::consts::PI).collect();
    Ok(PhaseConfig::from_generators(variant, &gens)?)
}

fn parse_parameterization(spec: ParameterizationSpec) -> Parameterization {
    match spec {
        ParameterizationSpec::LandauLevel { n } => Parameterization::LandauLevel(n),
        ParameterizationSpec::FixedEpsilon { epsilon } => Parameterization::FixedEpsilon(epsilon),
    }
}

/// Builds one scan problem per requested catalog branch.
fn build_problems(config: &RunConfig) -> Result<Vec<(usize, QuantizationProblem)>, CliError> {
    let variant = parse_variant(&require(&config.variant, "variant")?)?;
    let phases = parse_phases(config, variant)?;
    let mass = require(&config.mass, "mass")?;
    let field = require(&config.field, "field")?;
    let parameterization = parse_parameterization(require(&config.parameterization, "parameterization")?);
    let a_slab = require(&config.a_slab, "a_slab")?;
    let window = require(&config.k_window, "k_window")?;
    let selectors: Vec<usize> = match config.root_selector {
        Some(s) => vec![s],
        None => (0..root_entry_count(variant)).collect(),
    };
    let mut problems = Vec::new();
    for selector in selectors {
        let problem = QuantizationProblem::new(
            variant,
            phases,
            mass,
            field,
            parameterization,
            a_slab,
            (window[0], window[1]),
            selector,
        )?;
        problems.push((selector, problem));
    }
    Ok(problems)
}

struct TableRow {
    branch: i64,
    root_index: usize,
    k: f64,
    epsilon: f64,
    root: Complex64,
    residual: f64,
}

fn render_table(rows: &[TableRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(TABLE_HEADER);
            out.push('\n');
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.branch,
                    r.root_index,
                    fmt_f(r.k),
                    fmt_f(r.epsilon),
                    fmt_f(r.root.re),
                    fmt_f(r.root.im),
                    fmt_f(r.residual)
                );
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "branch": r.branch,
                        "root_index": r.root_index,
                        "k": r.k,
                        "epsilon": r.epsilon,
                        "re_root": r.root.re,
                        "im_root": r.root.im,
                        "residual": r.residual,
                    })
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&items).expect("plain data serializes");
            out.push('\n');
            out
        }
    }
}

/// Catalog and oracle roots side by side at one physical point.
fn run_roots(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let variant = parse_variant(&require(&config.variant, "variant")?)?;
    let phases = parse_phases(config, variant)?;
    let mass = require(&config.mass, "mass")?;
    let field = require(&config.field, "field")?;
    let k = require(&config.k, "k")?;
    let p_x = config.transverse_momentum.unwrap_or(0.0);
    let a_slab = config.a_slab.unwrap_or(1.0);
    let energy = match parse_parameterization(require(&config.parameterization, "parameterization")?)
    {
        Parameterization::FixedEpsilon(e) => e,
        Parameterization::LandauLevel(n) => {
            (mass * mass + k * k + 2.0 * f64::from(n) * field).sqrt()
        }
    };
    let params = PhysicalParams::new(mass, energy, p_x, field, a_slab, k)?;

    let catalog: Vec<Complex64> = {
        let mut r = closed_form_roots(variant, &params, &phases)?.expanded_k_roots();
        r.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite roots"));
        r
    };
    let oracle = numeric_roots(&quartic_from_samples(&params, &phases)?)?;

    let mut rows = Vec::new();
    for (branch, roots) in [(0i64, &catalog), (1i64, &oracle)] {
        for (i, root) in roots.iter().enumerate() {
            let matrix = build_s(&params, &phases, *root);
            let residual = matrix.det().norm() / matrix.hadamard_scale();
            rows.push(TableRow {
                branch,
                root_index: i,
                k,
                epsilon: energy,
                root: *root,
                residual,
            });
        }
    }
    Ok(render_table(&rows, format))
}

/// Randomized catalog cross-check; exceeding a tolerance is an
/// internal-consistency failure.
fn run_oracle_check(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let draws = config.draws.unwrap_or(1000);
    let seed = config.seed.unwrap_or(0);
    if draws == 0 {
        return Err(CliError::Config("`draws` must be at least 1".into()));
    }
    let variants: Vec<VariantId> = match &config.variant {
        Some(spec) => vec![parse_variant(spec)?],
        None => VariantId::all(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_root_dev: f64 = 0.0;
    let mut max_modulus_dev: f64 = 0.0;
    let mut max_det_ratio: f64 = 0.0;
    let mut failure: Option<String> = None;
    for &variant in &variants {
        let tol = checks::per_variant_tol(variant);
        for _ in 0..draws {
            let params = checks::draw_params(&mut rng);
            let phases = checks::draw_phases(&mut rng, variant);
            let set = closed_form_roots(variant, &params, &phases)?;
            let expanded = set.expanded_k_roots();
            let numeric = numeric_roots(&quartic_from_samples(&params, &phases)?)?;
            let dist = checks::multiset_distance(&expanded, &numeric)
                .ok_or_else(|| CliError::Internal("oracle root count mismatch".into()))?;
            max_root_dev = max_root_dev.max(dist);
            if dist >= tol && failure.is_none() {
                failure = Some(format!("{variant}: root deviation {dist:e} at tol {tol:e}"));
            }
            for root in &expanded {
                let dev = (root.norm() - 1.0).abs();
                max_modulus_dev = max_modulus_dev.max(dev);
                if dev >= 1e-10 && failure.is_none() {
                    failure = Some(format!("{variant}: modulus deviation {dev:e}"));
                }
                let matrix = build_s(&params, &phases, *root);
                let ratio = matrix.det().norm() / matrix.hadamard_scale();
                max_det_ratio = max_det_ratio.max(ratio);
                if ratio >= 1e-8 && failure.is_none() {
                    failure = Some(format!("{variant}: determinant ratio {ratio:e}"));
                }
            }
        }
    }
    let out = match format {
        OutputFormat::Csv => {
            let mut out = String::from("metric,value\n");
            let _ = writeln!(out, "variants,{}", variants.len());
            let _ = writeln!(out, "draws_per_variant,{draws}");
            let _ = writeln!(out, "max_root_deviation,{}", fmt_f(max_root_dev));
            let _ = writeln!(out, "max_modulus_deviation,{}", fmt_f(max_modulus_dev));
            let _ = writeln!(out, "max_det_ratio,{}", fmt_f(max_det_ratio));
            out
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(&serde_json::json!({
                "variants": variants.len(),
                "draws_per_variant": draws,
                "max_root_deviation": max_root_dev,
                "max_modulus_deviation": max_modulus_dev,
                "max_det_ratio": max_det_ratio,
            }))
            .expect("plain data serializes");
            out.push('\n');
            out
        }
    };
    match failure {
        Some(msg) => Err(CliError::Internal(msg)),
        None => Ok(out),
    }
}

/// Scans the requested branches and merges rows sorted by momentum.
fn merged_spectrum(config: &RunConfig) -> Result<Vec<TableRow>, CliError> {
    let grid = config.grid_points.unwrap_or(DEFAULT_GRID);
    let mut rows = Vec::new();
    for (selector, problem) in build_problems(config)? {
        let table = allowed_k(&problem, grid)?;
        for row in &table.rows {
            rows.push(TableRow {
                branch: row.branch_index,
                root_index: selector,
                k: row.k,
                epsilon: row.epsilon,
                root: row.root_value,
                residual: row.residual,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.k, a.root_index)
            .partial_cmp(&(b.k, b.root_index))
            .expect("finite momenta")
    });
    Ok(rows)
}

fn run_spectrum(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let rows = merged_spectrum(config)?;
    Ok(render_table(&rows, format))
}

/// Expands one spectrum row into wave-function components on a (y, z)
/// grid.
fn run_mode(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let level = match require(&config.parameterization, "parameterization")? {
        ParameterizationSpec::LandauLevel { n } => n,
        ParameterizationSpec::FixedEpsilon { .. } => {
            return Err(CliError::Config(
                "the mode command needs a landau_level parameterization so the transverse profile is determined".into(),
            ))
        }
    };
    let mass = require(&config.mass, "mass")?;
    let field = require(&config.field, "field")?;
    let a_slab = require(&config.a_slab, "a_slab")?;
    let p_x = config.transverse_momentum.unwrap_or(0.0);
    let variant = parse_variant(&require(&config.variant, "variant")?)?;
    let phases = parse_phases(config, variant)?;

    let rows = merged_spectrum(config)?;
    let index = config.mode_index.unwrap_or(0);
    if index >= rows.len() {
        return Err(CliError::Domain(DomainError::ModeIndex {
            index,
            count: rows.len(),
        }));
    }
    let picked = &rows[index];
    let k = picked.k;
    let params = PhysicalParams::new(mass, picked.epsilon, p_x, field, a_slab, k)?;
    let root = Complex64::from_polar(1.0, 2.0 * k * a_slab);
    let matrix = build_s(&params, &phases, root);
    let basis = matrix.null_basis();
    let first = basis.first().ok_or_else(|| {
        CliError::Internal("no null direction at a certified root".into())
    })?;
    let coeffs = CoefficientVector::from_components(*first)?;
    let mode = SlabMode::certified(params, phases, root, coeffs, level)?;

    let y_grid = mode.default_y_grid();
    let z_grid: Vec<f64> = (0..11)
        .map(|i| -a_slab + 2.0 * a_slab * (i as f64) / 10.0)
        .collect();

    match format {
        OutputFormat::Csv => {
            let mut out = String::from(
                "y,z,re_phi1,im_phi1,re_phi2,im_phi2,re_phi3,im_phi3,re_phi4,im_phi4,jz\n",
            );
            for &y in &y_grid {
                for &z in &z_grid {
                    let phi = mode.assemble_phi(y, z)?;
                    let jz = mode.current_jz(y, z)?;
                    let _ = write!(out, "{},{}", fmt_f(y), fmt_f(z));
                    for c in &phi {
                        let _ = write!(out, ",{},{}", fmt_f(c.re), fmt_f(c.im));
                    }
                    let _ = writeln!(out, ",{}", fmt_f(jz));
                }
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let mut grid = Vec::new();
            for &y in &y_grid {
                for &z in &z_grid {
                    let phi = mode.assemble_phi(y, z)?;
                    let jz = mode.current_jz(y, z)?;
                    let components: Vec<serde_json::Value> = phi
                        .iter()
                        .map(|c| serde_json::json!([c.re, c.im]))
                        .collect();
                    grid.push(serde_json::json!({
                        "y": y, "z": z, "phi": components, "jz": jz,
                    }));
                }
            }
            let coeff_json: Vec<serde_json::Value> = coeffs
                .components()
                .iter()
                .map(|c| serde_json::json!([c.re, c.im]))
                .collect();
            let mut out = serde_json::to_string_pretty(&serde_json::json!({
                "k": k,
                "epsilon": picked.epsilon,
                "level": level,
                "root": [root.re, root.im],
                "coefficients": coeff_json,
                "grid": grid,
            }))
            .expect("plain data serializes");
            out.push('\n');
            Ok(out)
        }
    }
}

/// Batches spectra over slab widths or field strengths. Points that
/// fail domain validation are reported in place without aborting the
/// batch.
fn run_sweep(config: &RunConfig, format: OutputFormat) -> Result<String, CliError> {
    let spec = require(&config.sweep, "sweep")?;
    let grid = config.grid_points.unwrap_or(DEFAULT_GRID);
    enum Axis {
        HalfWidth,
        Field,
    }
    let axis = match spec.parameter.as_str() {
        "a_slab" => Axis::HalfWidth,
        "field_b" => Axis::Field,
        other => {
            return Err(CliError::Config(format!(
                "unknown sweep parameter `{other}`; expected a_slab or field_b"
            )))
        }
    };
    let base = build_problems(config)?;

    let mut csv = String::new();
    let mut json_points = Vec::new();
    for &value in &spec.values {
        let mut point_rows: Vec<TableRow> = Vec::new();
        let mut point_err: Option<DomainError> = None;
        for (selector, problem) in &base {
            let moved = match axis {
                Axis::HalfWidth => problem.with_half_width(value),
                Axis::Field => problem.with_field(value),
            };
            let table = match moved.and_then(|p| allowed_k(&p, grid)) {
                Ok(t) => t,
                Err(e) => {
                    point_err = Some(e);
                    break;
                }
            };
            for row in &table.rows {
                point_rows.push(TableRow {
                    branch: row.branch_index,
                    root_index: *selector,
                    k: row.k,
                    epsilon: row.epsilon,
                    root: row.root_value,
                    residual: row.residual,
                });
            }
        }
        point_rows.sort_by(|a, b| {
            (a.k, a.root_index)
                .partial_cmp(&(b.k, b.root_index))
                .expect("finite momenta")
        });

        match format {
            OutputFormat::Csv => {
                let _ = writeln!(csv, "# sweep {}={}", spec.parameter, fmt_f(value));
                match &point_err {
                    Some(e) => {
                        let _ = writeln!(csv, "# error: {e}");
                    }
                    None => csv.push_str(&render_table(&point_rows, OutputFormat::Csv)),
                }
            }
            OutputFormat::Json => {
                let entry = match &point_err {
                    Some(e) => serde_json::json!({
                        "parameter": spec.parameter,
                        "value": value,
                        "error": e.to_string(),
                    }),
                    None => {
                        let rows: Vec<serde_json::Value> = point_rows
                            .iter()
                            .map(|r| {
                                serde_json::json!({
                                    "branch": r.branch,
                                    "root_index": r.root_index,
                                    "k": r.k,
                                    "epsilon": r.epsilon,
                                    "re_root": r.root.re,
                                    "im_root": r.root.im,
                                    "residual": r.residual,
                                })
                            })
                            .collect();
                        serde_json::json!({
                            "parameter": spec.parameter,
                            "value": value,
                            "rows": rows,
                        })
                    }
                };
                json_points.push(entry);
            }
        }
    }
    match format {
        OutputFormat::Csv => Ok(csv),
        OutputFormat::Json => {
            let mut out =
                serde_json::to_string_pretty(&json_points).expect("plain data serializes");
            out.push('\n');
            Ok(out)
        }
    }
}

/// Runs the property battery; any failing check is an internal error.
fn run_selftest(config: &RunConfig, format: Option<OutputFormat>) -> Result<String, CliError> {
    let seed = config.seed.unwrap_or(0);
    let mut profile = CheckProfile::full(seed);
    if let Some(draws) = config.draws {
        if draws == 0 {
            return Err(CliError::Config("`draws` must be at least 1".into()));
        }
        profile.catalog_draws = draws;
    }
    let outcomes = checks::run_all(&profile);
    let out = match format {
        Some(OutputFormat::Json) => {
            let items: Vec<serde_json::Value> = outcomes
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "check": o.name, "passed": o.passed, "detail": o.detail,
                    })
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&items).expect("plain data serializes");
            out.push('\n');
            out
        }
        Some(OutputFormat::Csv) => {
            let mut out = String::from("check,passed,detail\n");
            for o in &outcomes {
                let _ = writeln!(
                    out,
                    "{},{},\"{}\"",
                    o.name,
                    o.passed,
                    o.detail.replace('"', "\"\"")
                );
            }
            out
        }
        None => {
            let mut out = String::new();
            for o in &outcomes {
                let verdict = if o.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "check {}: {} ({})", o.name, verdict, o.detail);
            }
            out
        }
    };
    if let Some(bad) = outcomes.iter().find(|o| !o.passed) {
        // still emit the report so the failure is inspectable
        print_or_ignore(&out);
        return Err(CliError::Internal(format!(
            "check `{}` failed: {}",
            bad.name, bad.detail
        )));
    }
    Ok(out)
}

fn print_or_ignore(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

/// Parses the config file, applies flag overrides, and dispatches.
pub fn run_cli(cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))?;

    if let Some(format) = cli.format {
        config.output_format = Some(format);
    }
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(draws) = cli.draws {
        config.draws = Some(draws);
    }
    let output_path: Option<PathBuf> = cli
        .output
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from));

    let format = config.output_format.unwrap_or(OutputFormat::Csv);
    let rendered = match config.command {
        CommandKind::Roots => run_roots(&config, format)?,
        CommandKind::OracleCheck => run_oracle_check(&config, format)?,
        CommandKind::Spectrum => run_spectrum(&config, format)?,
        CommandKind::Mode => run_mode(&config, format)?,
        CommandKind::Sweep => run_sweep(&config, format)?,
        CommandKind::Selftest => run_selftest(&config, config.output_format)?,
    };

    match output_path {
        Some(path) => std::fs::write(&path, rendered.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print_or_ignore(&rendered);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spectrum_config() -> RunConfig {
        serde_json::from_str(
            r#"{
                "command": "spectrum",
                "variant": {"family": "one-phase", "index": 1},
                "angles_pi": [0.3],
                "mass": 1.0,
                "field": 1.0,
                "parameterization": {"type": "landau_level", "n": 0},
                "a_slab": 1.0,
                "k_window": [0.0, 10.0]
            }"#,
        )
        .expect("valid config")
    }

    #[test]
    fn merged_spectrum_interleaves_both_boundary_branches() {
        let config = base_spectrum_config();
        let rows = merged_spectrum(&config).expect("scan succeeds");
        // k = pi/2 n for n = 1..6 below 10, alternating selectors
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert_eq!(rows.len(), 6);
        for (i, row) in rows.iter().enumerate() {
            let want = half_pi * (i as f64 + 1.0);
            assert!(
                (row.k - want).abs() < 1e-9,
                "row {i}: k = {} vs {want}",
                row.k
            );
            // odd multiples of pi/2 sit on the K = -1 branch
            assert_eq!(row.root_index, 1 - i % 2);
        }
    }

    #[test]
    fn selector_restriction_keeps_one_branch() {
        let mut config = base_spectrum_config();
        config.root_selector = Some(0);
        let rows = merged_spectrum(&config).expect("scan succeeds");
        assert_eq!(rows.len(), 3);
        for (i, row) in rows.iter().enumerate() {
            let want = std::f64::consts::PI * (i as f64 + 1.0);
            assert!((row.k - want).abs() < 1e-9);
            assert_eq!(row.root_index, 0);
        }
    }

    #[test]
    fn csv_rows_carry_full_precision() {
        let config = base_spectrum_config();
        let out = run_spectrum(&config, OutputFormat::Csv).expect("renders");
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(TABLE_HEADER));
        let first = lines.next().expect("one row");
        let k_field: f64 = first.split(',').nth(2).expect("k column").parse().expect("parses");
        assert!((k_field - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        // 17 significant digits survive the round trip
        assert!(first.contains("e0") || first.contains("e-") || first.contains("e1"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(
            r#"{"command": "spectrum", "surprise": 1}"#,
        )
        .expect_err("unknown key");
        assert!(err.to_string().contains("surprise"));
    }

    #[test]
    fn unknown_family_is_a_config_error() {
        let spec = VariantSpec {
            family: "five-phase".into(),
            index: Some(1),
        };
        let err = parse_variant(&spec).expect_err("rejected");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn angle_count_mismatch_is_a_config_error() {
        let mut config = base_spectrum_config();
        config.angles_pi = Some(vec![0.1, 0.2]);
        let err = run_spectrum(&config, OutputFormat::Csv).expect_err("rejected");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unphysical_window_is_a_domain_error() {
        let mut config = base_spectrum_config();
        config.k_window = Some([3.0, 2.0]);
        let err = run_spectrum(&config, OutputFormat::Csv).expect_err("rejected");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn roots_command_reports_catalog_and_oracle_branches() {
        let config: RunConfig = serde_json::from_str(
            r#"{
                "command": "roots",
                "variant": {"family": "three-phase", "index": 5},
                "angles_pi": [0.25, 0.6, 1.1],
                "mass": 1.0,
                "field": 1.0,
                "parameterization": {"type": "fixed_epsilon", "epsilon": 2.0},
                "k": 1.1
            }"#,
        )
        .expect("valid config");
        let out = run_roots(&config, OutputFormat::Csv).expect("runs");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 9);
        let catalog: Vec<&str> = lines[1..5].to_vec();
        let oracle: Vec<&str> = lines[5..9].to_vec();
        for (c, o) in catalog.iter().zip(oracle.iter()) {
            assert!(c.starts_with('0'));
            assert!(o.starts_with('1'));
            let cr: f64 = c.split(',').nth(4).expect("re").parse().expect("parses");
            let or: f64 = o.split(',').nth(4).expect("re").parse().expect("parses");
            assert!((cr - or).abs() < 1e-7, "catalog {cr} vs oracle {or}");
        }
    }

    #[test]
    fn mode_command_grid_is_current_silent_at_walls() {
        let config: RunConfig = serde_json::from_str(
            r#"{
                "command": "mode",
                "variant": {"family": "one-phase", "index": 1},
                "angles_pi": [0.0],
                "mass": 1.0,
                "field": 1.0,
                "parameterization": {"type": "landau_level", "n": 1},
                "a_slab": 1.0,
                "k_window": [0.0, 7.0],
                "mode_index": 1
            }"#,
        )
        .expect("valid config");
        let out = run_mode(&config, OutputFormat::Csv).expect("runs");
        let mut lines = out.lines();
        let header = lines.next().expect("header");
        assert!(header.starts_with("y,z,re_phi1"));
        let mut interior_max: f64 = 0.0;
        let mut wall_max: f64 = 0.0;
        let mut rows = 0;
        for line in lines {
            rows += 1;
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().expect("parses")).collect();
            let (z, jz) = (cols[1], cols[10]);
            if (z.abs() - 1.0).abs() < 1e-12 {
                wall_max = wall_max.max(jz.abs());
            } else {
                interior_max = interior_max.max(jz.abs());
            }
        }
        assert_eq!(rows, 41 * 11);
        assert!(wall_max < 1e-8 * interior_max.max(1e-300));
        assert!(interior_max > 0.0);
    }

    #[test]
    fn fixed_epsilon_mode_is_rejected() {
        let mut config = base_spectrum_config();
        config.command = CommandKind::Mode;
        config.parameterization = Some(ParameterizationSpec::FixedEpsilon { epsilon: 2.0 });
        let err = run_mode(&config, OutputFormat::Csv).expect_err("rejected");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn mode_index_beyond_spectrum_is_a_domain_error() {
        let config: RunConfig = serde_json::from_str(
            r#"{
                "command": "mode",
                "variant": {"family": "one-phase", "index": 1},
                "angles_pi": [0.0],
                "mass": 1.0,
                "field": 1.0,
                "parameterization": {"type": "landau_level", "n": 0},
                "a_slab": 1.0,
                "k_window": [0.0, 4.0],
                "mode_index": 50
            }"#,
        )
        .expect("valid config");
        let err = run_mode(&config, OutputFormat::Csv).expect_err("rejected");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn sweep_emits_sections_and_survives_bad_points() {
        let config: RunConfig = serde_json::from_str(
            r#"{
                "command": "sweep",
                "variant": {"family": "one-phase", "index": 1},
                "angles_pi": [0.0],
                "mass": 1.0,
                "field": 1.0,
                "parameterization": {"type": "landau_level", "n": 0},
                "a_slab": 1.0,
                "k_window": [0.0, 7.0],
                "root_selector": 0,
                "sweep": {"parameter": "a_slab", "values": [1.0, -2.0, 2.0]}
            }"#,
        )
        .expect("valid config");
        let out = run_sweep(&config, OutputFormat::Csv).expect("runs");
        assert_eq!(out.matches("# sweep a_slab=").count(), 3);
        assert_eq!(out.matches("# error:").count(), 1);
        // doubling the width doubles the mode count in a fixed window
        let sections: Vec<&str> = out.split("# sweep a_slab=").collect();
        // data rows start with a digit and carry the 7 csv columns;
        // the split leaves the bare sweep value as a comma-free line
        let count_rows = |s: &str| {
            s.lines()
                .filter(|l| l.contains(',') && l.chars().next().is_some_and(|c| c.is_ascii_digit()))
                .count()
        };
        assert_eq!(count_rows(sections[1]), 2);
        assert_eq!(count_rows(sections[3]), 4);
    }

    #[test]
    fn oracle_check_is_deterministic_and_green() {
        let config: RunConfig = serde_json::from_str(
            r#"{
                "command": "oracle-check",
                "variant": {"family": "two-phase", "index": 4},
                "seed": 7,
                "draws": 40
            }"#,
        )
        .expect("valid config");
        let a = run_oracle_check(&config, OutputFormat::Csv).expect("passes");
        let b = run_oracle_check(&config, OutputFormat::Csv).expect("passes");
        assert_eq!(a, b);
        assert!(a.starts_with("metric,value\n"));
        assert!(a.contains("max_root_deviation"));
    }

    #[test]
    fn json_spectrum_matches_csv_values() {
        let config = base_spectrum_config();
        let json = run_spectrum(&config, OutputFormat::Json).expect("renders");
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&json).expect("valid JSON");
        assert_eq!(parsed.len(), 6);
        let k0 = parsed[0]["k"].as_f64().expect("k present");
        assert!((k0 - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }
}
