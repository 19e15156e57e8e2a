//! Scenario execution: build domain and operator from config, solve, verify,
//! and write artifacts.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use serde::Serialize;

use dpp_core::barriers;
use dpp_core::domain::DiscreteDomain;
use dpp_core::operators::OperatorSpec;
use dpp_core::parabolic::{
    column_is_decreasing, consistency_table, write_consistency_csv, ConsistencyRow, Nonlinearity,
    TestFunction,
};
use dpp_core::solver::{self, SolveOptions, SolveReport};
use dpp_core::verify::{self, VerificationReport};
use dpp_core::{Error as CoreError, ScalarField};

use crate::config::{ScenarioConfig, ScenarioKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(CoreError::MaxIterations { .. }) => EXIT_NO_CONVERGENCE,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_CONFIG,
        }
    }
}

pub struct RunContext {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub snapshot_every: Option<usize>,
}

impl RunContext {
    fn seed(&self, config: &ScenarioConfig) -> u64 {
        self.seed_override.unwrap_or(config.verify.seed)
    }
}

fn build_domain(config: &ScenarioConfig) -> Result<DiscreteDomain, CliError> {
    let dc = config
        .domain
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [domain] block".into()))?;
    let shape = dc.shape.to_shape().map_err(CliError::Config)?;
    Ok(dpp_core::build_grid(shape, dc.h, dc.epsilon, dc.collar)?)
}

fn build_boundary_field(
    config: &ScenarioConfig,
    domain: &DiscreteDomain,
    seed: u64,
) -> Result<ScalarField, CliError> {
    let oc = config.operator.as_ref().unwrap();
    let bc = &oc.boundary;
    match bc.kind.as_str() {
        "zero" => Ok(ScalarField::zeros(domain.len())),
        "constant" => {
            let v = bc.value;
            Ok(domain.extend_boundary_values(|_| v)?)
        }
        "affine" => {
            let c = bc.coefficients;
            let off = bc.offset;
            Ok(domain.extend_boundary_values(|p| c[0] * p[0] + c[1] * p[1] + off)?)
        }
        "random" => {
            // Independent uniform values per boundary point, seeded.
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let amp = bc.amplitude;
            Ok(ScalarField::from_fn(domain.len(), |i| {
                if domain.is_interior(i) {
                    0.0
                } else {
                    rng.gen_range(-amp..amp)
                }
            }))
        }
        other => Err(CliError::Config(format!("unknown boundary kind '{other}'"))),
    }
}

fn build_payoff(config: &ScenarioConfig, domain: &DiscreteDomain) -> Result<Option<ScalarField>, CliError> {
    let oc = config.operator.as_ref().unwrap();
    match oc.payoff.kind.as_str() {
        "none" => Ok(None),
        "constant" => Ok(Some(ScalarField::constant(domain.len(), oc.payoff.value))),
        other => Err(CliError::Config(format!("unknown payoff kind '{other}'"))),
    }
}

fn build_spec(
    config: &ScenarioConfig,
    domain: &DiscreteDomain,
    seed: u64,
) -> Result<OperatorSpec, CliError> {
    let oc = config
        .operator
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [operator] block".into()))?;
    let g = build_boundary_field(config, domain, seed)?;
    let payoff = build_payoff(config, domain)?;
    let spec = match oc.kind.as_str() {
        "tug-of-war" => OperatorSpec::tug_of_war(g),
        "biased-tug-of-war" => OperatorSpec::biased_tug_of_war(g, payoff, oc.drift),
        "eikonal" => {
            if oc.boundary.kind != "zero" {
                return Err(CliError::Config(
                    "the eikonal operator carries zero boundary data; use boundary-shift".into(),
                ));
            }
            let f = payoff.ok_or_else(|| {
                CliError::Config("eikonal operator needs [operator.payoff]".into())
            })?;
            OperatorSpec::eikonal(f)
        }
        "mean-curvature" => OperatorSpec::mean_curvature(g, oc.direction_samples),
        "mean-value" => OperatorSpec::mean_value(g, oc.exponent),
        "peres-sheffield" => OperatorSpec::peres_sheffield(g, oc.exponent),
        other => return Err(CliError::Config(format!("unknown operator kind '{other}'"))),
    };
    let spec =
        if oc.boundary_shift != 0.0 { spec.with_shift(domain, oc.boundary_shift)? } else { spec };
    spec.validate(domain)?;
    Ok(spec)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path)?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    Ok(())
}

fn write_field(
    out: &Path,
    stem: &str,
    field: &ScalarField,
    format: &str,
) -> Result<(), CliError> {
    if format == "csv" || format == "both" {
        let file = File::create(out.join(format!("{stem}.csv")))?;
        field.write_csv(BufWriter::new(file))?;
    }
    if format == "json" || format == "both" {
        write_json(&out.join(format!("{stem}.json")), field)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveArtifact<'a> {
    report: &'a SolveReport,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct VerifyArtifact<'a> {
    report: &'a VerificationReport,
    config: &'a ScenarioConfig,
}

#[derive(Serialize)]
struct ConsistencyArtifact<'a> {
    rows: &'a [ConsistencyRow],
    decreasing: bool,
    doubled_rows: Option<&'a [ConsistencyRow]>,
    doubling_max_relative_change: Option<f64>,
    config: &'a ScenarioConfig,
}

fn parse_barrier_kind(name: &str) -> Result<barriers::BarrierKind, CliError> {
    use barriers::BarrierKind::*;
    Ok(match name {
        "constant-sub" => ConstantSub,
        "constant-super" => ConstantSuper,
        "biased-tow-exp" => BiasedTowExp,
        "mcf-annular" => McfAnnular,
        "eikonal-layer" => EikonalLayer,
        other => return Err(CliError::Config(format!("unknown seed barrier '{other}'"))),
    })
}

#[allow(clippy::too_many_arguments)]
fn solve_one(
    config: &ScenarioConfig,
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    options: SolveOptions,
    from_below: bool,
    ctx: &RunContext,
    out: &Path,
    format: &str,
) -> Result<(ScalarField, SolveReport), CliError> {
    let label = if from_below { "from_below" } else { "from_above" };
    let every = ctx.snapshot_every.unwrap_or(0);
    let mut snapshot_error = None;
    let observer = |iteration: usize, field: &ScalarField| {
        if every > 0 && iteration.is_multiple_of(every) {
            let path = out.join(format!("iterate_{label}_{iteration}.csv"));
            if let Err(e) = File::create(&path)
                .map_err(CoreError::from)
                .and_then(|f| field.write_csv(BufWriter::new(f)))
            {
                snapshot_error = Some(e);
            }
        }
    };
    // The solver validates the seed's sub/supersolution side either way.
    let seed = match &config.solve.seed_barrier {
        Some(name) => parse_barrier_kind(name)?.build(domain, spec)?,
        None if from_below => barriers::default_subsolution(domain, spec)?,
        None => barriers::default_supersolution(domain, spec)?,
    };
    let (solution, report) = if from_below {
        solver::perron_solve_from_below_with(domain, spec, &seed, options, observer)?
    } else {
        solver::perron_solve_from_above_with(domain, spec, &seed, options, observer)?
    };
    if let Some(e) = snapshot_error {
        return Err(e.into());
    }
    write_field(out, &format!("solution_{label}"), &solution, format)?;
    Ok((solution, report))
}

fn run_checks(
    config: &ScenarioConfig,
    domain: &DiscreteDomain,
    spec: &OperatorSpec,
    seed: u64,
) -> Result<Option<VerificationReport>, CliError> {
    let vc = &config.verify;
    if vc.checks.is_empty() {
        return Ok(None);
    }
    let full = verify::standard_matrix(
        domain,
        spec,
        vc.trials,
        seed,
        &vc.translation_shifts,
        vc.lambda,
    )?;
    if vc.checks.iter().any(|c| c == "standard") {
        return Ok(Some(full));
    }
    let known = ["monotonicity", "translation", "comparison", "scaling", "two-sided", "max-principle"];
    for name in &vc.checks {
        if !known.contains(&name.as_str()) {
            return Err(CliError::Config(format!("unknown check '{name}'")));
        }
    }
    let mut filtered = VerificationReport::default();
    for record in full.checks {
        if vc.checks.iter().any(|want| {
            record.name.starts_with(want.as_str())
                || (want == "two-sided" && record.name.starts_with("two-sided-gap"))
        }) {
            filtered.push(record);
        }
    }
    Ok(Some(filtered))
}

/// Runs one scenario end to end. Returns the process exit code.
pub fn run(config: &ScenarioConfig, ctx: &RunContext) -> Result<i32, CliError> {
    fs::create_dir_all(&ctx.out_dir)?;
    let resolved = toml::to_string_pretty(config)
        .map_err(|e| CliError::Config(format!("config serialization: {e}")))?;
    fs::write(ctx.out_dir.join("resolved_config.toml"), resolved)?;
    match config.kind {
        ScenarioKind::Stationary => run_stationary(config, ctx),
        ScenarioKind::ParabolicConsistency => run_consistency(config, ctx),
    }
}

fn run_stationary(config: &ScenarioConfig, ctx: &RunContext) -> Result<i32, CliError> {
    let seed = ctx.seed(config);
    let domain = build_domain(config)?;
    let spec = build_spec(config, &domain, seed)?;
    let out = &ctx.out_dir;
    let format = config.output.fields.as_str();

    if config.output.dump_domain {
        dump_domain_file(&domain, out)?;
    }

    let options = SolveOptions {
        tolerance: config.solve.tolerance,
        max_iterations: config.solve.max_iterations,
    };
    let directions: Vec<bool> = match config.solve.direction.as_str() {
        "from-below" => vec![true],
        "from-above" => vec![false],
        "both" => vec![true, false],
        other => return Err(CliError::Config(format!("unknown solve direction '{other}'"))),
    };
    let mut solutions = Vec::new();
    for from_below in directions {
        let (solution, report) =
            solve_one(config, &domain, &spec, options, from_below, ctx, out, format)?;
        let label = if from_below { "from_below" } else { "from_above" };
        write_json(
            &out.join(format!("solve_report_{label}.json")),
            &SolveArtifact { report: &report, config },
        )?;
        solutions.push(solution);
    }
    if solutions.len() == 2 {
        let gap = solutions[0].sup_distance(&solutions[1]);
        println!("two-sided gap: {gap:.6e}");
    }

    let mut exit = EXIT_OK;
    if let Some(report) = run_checks(config, &domain, &spec, seed)? {
        for check in &report.checks {
            let status = if check.passed { "pass" } else { "FAIL" };
            println!("{status}  {} (worst slack {:.3e})", check.name, check.worst_slack);
        }
        write_json(
            &out.join("verification_report.json"),
            &VerifyArtifact { report: &report, config },
        )?;
        if !report.passed() {
            exit = EXIT_CHECK_FAILED;
        }
    }
    Ok(exit)
}

fn build_test_function(config: &ScenarioConfig) -> Result<(TestFunction, Nonlinearity), CliError> {
    let cc = config
        .consistency
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [consistency] block".into()))?;
    let phi = match cc.phi.as_str() {
        "half-square" => TestFunction::half_square(),
        "linear" => TestFunction::linear(cc.slope),
        "zero" => TestFunction::zero(),
        other => return Err(CliError::Config(format!("unknown phi '{other}'"))),
    };
    let f = match cc.nonlinearity.as_str() {
        "heat" => Nonlinearity::heat(1),
        "gradient-norm" => Nonlinearity::gradient_norm(),
        "zero" => Nonlinearity::zero(),
        other => return Err(CliError::Config(format!("unknown nonlinearity '{other}'"))),
    };
    Ok((phi, f))
}

fn run_consistency(config: &ScenarioConfig, ctx: &RunContext) -> Result<i32, CliError> {
    let cc = config.consistency.as_ref().unwrap();
    let (phi, f) = build_test_function(config)?;
    let rows = consistency_table(&phi, &f, &cc.ladder, cc.resolution_scale)?;
    let decreasing = column_is_decreasing(&rows);

    let (doubled, max_change) = if cc.check_doubling {
        let doubled = consistency_table(&phi, &f, &cc.ladder, 2 * cc.resolution_scale)?;
        let change = rows
            .iter()
            .zip(&doubled)
            .map(|(a, b)| (a.max_error - b.max_error).abs() / (a.max_error + 1e-300))
            .fold(0.0, f64::max);
        (Some(doubled), Some(change))
    } else {
        (None, None)
    };

    let file = File::create(ctx.out_dir.join("consistency.csv"))?;
    write_consistency_csv(&rows, BufWriter::new(file))?;
    write_json(
        &ctx.out_dir.join("consistency_report.json"),
        &ConsistencyArtifact {
            rows: &rows,
            decreasing,
            doubled_rows: doubled.as_deref(),
            doubling_max_relative_change: max_change,
            config,
        },
    )?;

    for r in &rows {
        println!("epsilon {:>6}: max error {:.6e}", r.epsilon, r.max_error);
    }
    let mut ok = decreasing;
    if let Some(change) = max_change {
        println!("doubling max relative change: {change:.3}");
        ok &= change < 0.1;
    }
    if !decreasing {
        println!("consistency failure: error column is not decreasing");
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn dump_domain_file(domain: &DiscreteDomain, out: &Path) -> Result<(), CliError> {
    let layers = domain.layer_partition().ok();
    let annuli = domain.annular_partition().ok();
    let file = File::create(out.join("domain.csv"))?;
    domain.write_csv(BufWriter::new(file), layers.as_ref(), annuli.as_ref())?;
    Ok(())
}

/// `dump-domain` subcommand.
pub fn dump_domain(config: &ScenarioConfig, ctx: &RunContext) -> Result<i32, CliError> {
    fs::create_dir_all(&ctx.out_dir)?;
    let domain = build_domain(config)?;
    dump_domain_file(&domain, &ctx.out_dir)?;
    println!("{} points ({} interior)", domain.len(), domain.interior_indices().len());
    Ok(EXIT_OK)
}

/// `verify` subcommand: the full applicable matrix regardless of the
/// configured check list.
pub fn verify_only(config: &ScenarioConfig, ctx: &RunContext) -> Result<i32, CliError> {
    fs::create_dir_all(&ctx.out_dir)?;
    let seed = ctx.seed(config);
    let domain = build_domain(config)?;
    let spec = build_spec(config, &domain, seed)?;
    let report = verify::standard_matrix(
        &domain,
        &spec,
        config.verify.trials,
        seed,
        &config.verify.translation_shifts,
        config.verify.lambda,
    )?;
    for check in &report.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        println!("{status}  {} (worst slack {:.3e})", check.name, check.worst_slack);
    }
    write_json(
        &ctx.out_dir.join("verification_report.json"),
        &VerifyArtifact { report: &report, config },
    )?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct SweepArtifact<'a> {
    parameter: &'a str,
    rows: &'a [(f64, f64)],
    config: &'a ScenarioConfig,
}

/// `sweep` subcommand: rerun the scenario for each parameter value and
/// collect one metric per run.
pub fn sweep(
    config: &ScenarioConfig,
    parameter: &str,
    values: &[f64],
    ctx: &RunContext,
) -> Result<i32, CliError> {
    fs::create_dir_all(&ctx.out_dir)?;
    let seed = ctx.seed(config);
    let mut rows: Vec<(f64, f64)> = Vec::new();
    match parameter {
        // Consistency error along an epsilon ladder.
        "epsilon" => {
            if config.kind != ScenarioKind::ParabolicConsistency {
                return Err(CliError::Config(
                    "epsilon sweeps apply to parabolic-consistency scenarios".into(),
                ));
            }
            let cc = config.consistency.as_ref().unwrap();
            let (phi, f) = build_test_function(config)?;
            let table = consistency_table(&phi, &f, values, cc.resolution_scale)?;
            for r in table {
                rows.push((r.epsilon, r.max_error));
            }
        }
        // Orthogonal-sphere exponent: gap to plain tug-of-war on one apply.
        "exponent" => {
            let domain = build_domain(config)?;
            let oc = config.operator.as_ref().ok_or_else(|| {
                CliError::Config("missing [operator] block".into())
            })?;
            if oc.kind != "peres-sheffield" {
                return Err(CliError::Config(
                    "exponent sweeps apply to the peres-sheffield operator".into(),
                ));
            }
            let g = build_boundary_field(config, &domain, seed)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let u = verify::random_field(domain.len(), 1.0, &mut rng);
            let tow = OperatorSpec::tug_of_war(g.clone()).apply(&domain, &u)?;
            for &p in values {
                let ps = OperatorSpec::peres_sheffield(g.clone(), p).apply(&domain, &u)?;
                rows.push((p, ps.sup_distance(&tow)));
            }
        }
        // Scaling margin as a function of lambda.
        "lambda" => {
            let domain = build_domain(config)?;
            let spec = build_spec(config, &domain, seed)?;
            let min_g = domain
                .boundary_indices()
                .iter()
                .map(|&b| spec.boundary_data[b as usize])
                .fold(f64::INFINITY, f64::min);
            let shifted = spec.with_shift(&domain, (1.0 - min_g).max(0.0))?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let u = ScalarField::from_fn(domain.len(), |_| rng.gen_range(0.0..1.0));
            for &lambda in values {
                let record = verify::check_scaling(&domain, &shifted, &u, lambda)?;
                rows.push((lambda, record.worst_slack));
            }
        }
        // Drift constant: two-sided gap per value.
        "drift" => {
            let domain = build_domain(config)?;
            for &drift in values {
                let mut modified = config.clone();
                if let Some(oc) = modified.operator.as_mut() {
                    oc.drift = drift;
                }
                let spec = build_spec(&modified, &domain, seed)?;
                let (gap, _) = verify::check_two_sided_gap(&domain, &spec, 1e-12)?;
                rows.push((drift, gap));
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown sweep parameter '{other}' (epsilon, exponent, lambda, drift)"
            )))
        }
    }

    let mut csv = String::from("value,metric\n");
    for (v, m) in &rows {
        csv.push_str(&format!("{v},{m}\n"));
        println!("{parameter} = {v}: {m:.6e}");
    }
    fs::write(ctx.out_dir.join("sweep.csv"), csv)?;
    write_json(
        &ctx.out_dir.join("sweep_report.json"),
        &SweepArtifact { parameter, rows: &rows, config },
    )?;
    Ok(EXIT_OK)
}
