//! `ncq-thermo`: heat-cycle thermodynamics of the non-commutative harmonic
//! oscillator from the command line.
//!
//! Exit codes: 0 success, 2 input/validation error, 1 computation error
//! (degenerate cycles, divergence, failed oracle checks, I/O).

mod config;

use clap::{Args, Parser, Subcommand};
use config::{resolve_f64, ConfigFile};
use ncq_core::cycles::{self, CycleMode, CycleSpec, ScalingMode};
use ncq_core::spectra::SubstanceParams;
use ncq_core::statmech::{self, ThermalState, DEFAULT_REL_TOL};
use ncq_core::sweep::{
    emit_csv, emit_svg, run_sweep_parallel, PlotConfig, SweepSpec, SweptParameter,
};
use ncq_core::validation;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

const DEFAULT_T_HOT: f64 = 20.0;
const DEFAULT_T_COLD: f64 = 10.0;
const DEFAULT_OMEGA_HIGH: f64 = 2.0;
const DEFAULT_OMEGA_LOW: f64 = 1.0;

#[derive(Parser)]
#[command(
    name = "ncq-thermo",
    version,
    about = "Quantum heat cycles with a non-commutative harmonic oscillator working substance",
    after_help = "All physics parameters can also come from a flat key=value config file \
                  (--config); explicit flags win."
)]
struct Cli {
    /// Flat key=value file providing defaults for the physics flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print energy levels and eigenstate-correction amplitudes.
    Levels(LevelsArgs),
    /// Certified partition sum (plus the erfc closed form when gamma > 0).
    Partition(StateArgs),
    /// Partition function, internal energy, entropy and free energy.
    Thermo(StateArgs),
    /// Evaluate one cycle: stroke heats, net work and figure of merit.
    Cycle(CycleArgs),
    /// Sweep one parameter across a grid; emit CSV and optionally SVG.
    Sweep(SweepArgs),
    /// Run the oracle cross-check suite; exit 1 if any check fails.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct LevelsArgs {
    /// Oscillator frequency.
    #[arg(long)]
    omega: Option<f64>,
    /// Non-commutativity parameter.
    #[arg(long)]
    gamma: Option<f64>,
    /// Highest level to print.
    #[arg(long, default_value_t = 10)]
    max_level: u64,
}

#[derive(Args)]
struct StateArgs {
    /// Oscillator frequency.
    #[arg(long)]
    omega: Option<f64>,
    /// Non-commutativity parameter.
    #[arg(long)]
    gamma: Option<f64>,
    /// Bath temperature (energy units; k_B = 1). Mutually exclusive with --beta.
    #[arg(long, conflicts_with = "beta")]
    temperature: Option<f64>,
    /// Inverse temperature.
    #[arg(long)]
    beta: Option<f64>,
    /// Relative tail tolerance of the partition sum.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args)]
struct CycleParams {
    /// Hot bath temperature.
    #[arg(long)]
    t_hot: Option<f64>,
    /// Cold bath temperature.
    #[arg(long)]
    t_cold: Option<f64>,
    /// Upper stroke frequency.
    #[arg(long)]
    omega_high: Option<f64>,
    /// Lower stroke frequency.
    #[arg(long)]
    omega_low: Option<f64>,
    /// Non-commutativity parameter, defined at omega-high.
    #[arg(long)]
    gamma: Option<f64>,
    /// fixed-gamma | fixed-gamma-tilde
    #[arg(long)]
    scaling_mode: Option<String>,
    /// Relative tail tolerance of the partition sums.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args)]
struct CycleArgs {
    /// stirling-engine | stirling-fridge | otto-fridge
    mode: String,

    #[command(flatten)]
    params: CycleParams,
}

#[derive(Args)]
struct SweepArgs {
    /// stirling-engine | stirling-fridge | otto-fridge
    #[arg(long)]
    cycle: String,

    /// Swept parameter: gamma | t-hot | t-cold | omega-high | omega-low
    #[arg(long, default_value = "gamma")]
    param: String,

    /// First grid value.
    #[arg(long)]
    start: f64,

    /// Last grid value (inclusive).
    #[arg(long)]
    stop: f64,

    /// Number of grid points (>= 2).
    #[arg(long, default_value_t = 40)]
    steps: usize,

    /// Skip the gamma = 0 harmonic-oscillator baseline column.
    #[arg(long)]
    no_ho_baseline: bool,

    /// CSV destination path, or '-' for stdout.
    #[arg(long, default_value = "-")]
    csv: String,

    /// Optional SVG plot destination.
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Plot title (defaults to "CYCLE vs PARAM").
    #[arg(long)]
    title: Option<String>,

    #[command(flatten)]
    params: CycleParams,
}

#[derive(Args)]
struct ValidateArgs {
    /// Relative tail tolerance handed to the checks.
    #[arg(long)]
    rel_tol: Option<f64>,
}

enum CliError {
    /// bad input: exit 2
    Validation(String),
    /// the computation itself failed: exit 1
    Computation(String),
}

impl From<ncq_core::Error> for CliError {
    fn from(e: ncq_core::Error) -> Self {
        use ncq_core::Error::*;
        let mut message = e.to_string();
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            message.push_str(&format!(": {s}"));
            source = s.source();
        }
        match e {
            InvalidParams(_) | InvalidState(_) | InvalidTolerance(_) | InvalidStep(_)
            | InvalidCycleSpec(_) | InvalidSweep(_) | MalformedCsv(_) => {
                CliError::Validation(message)
            }
            Divergence { .. }
            | ClosedFormRequiresNoncommutative
            | DegenerateCycle { .. }
            | NotARefrigerator { .. }
            | EmptyPlot(_)
            | Io { .. } => CliError::Computation(message),
        }
    }
}

fn validation(message: impl Into<String>) -> CliError {
    CliError::Validation(message.into())
}

fn validation_msg(m: String) -> CliError {
    CliError::Validation(m)
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(CliError::Validation(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(CliError::Computation(m)) => {
            eprintln!("error: {m}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(validation_msg)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Levels(args) => cmd_levels(args, &config),
        Command::Partition(args) => cmd_partition(args, &config),
        Command::Thermo(args) => cmd_thermo(args, &config),
        Command::Cycle(args) => cmd_cycle(args, &config),
        Command::Sweep(args) => cmd_sweep(args, &config),
        Command::Validate(args) => cmd_validate(args, &config),
    }
}

fn warn_if_perturbative(gamma: f64) {
    if gamma > ncq_core::spectra::PERTURBATIVE_GAMMA_LIMIT {
        eprintln!(
            "warning: gamma = {gamma} exceeds the first-order perturbative range \
             (gamma <= 0.5); results are extrapolations"
        );
    }
}

fn substance(
    args_omega: Option<f64>,
    args_gamma: Option<f64>,
    config: &ConfigFile,
) -> Result<SubstanceParams, CliError> {
    let omega =
        resolve_f64(args_omega, config, "omega", DEFAULT_OMEGA_LOW).map_err(validation_msg)?;
    let gamma = resolve_f64(args_gamma, config, "gamma", 0.0).map_err(validation_msg)?;
    warn_if_perturbative(gamma);
    Ok(SubstanceParams::new(omega, gamma)?)
}

fn thermal_state(args: &StateArgs, config: &ConfigFile) -> Result<(ThermalState, f64), CliError> {
    let params = substance(args.omega, args.gamma, config)?;
    let beta = match (args.beta, args.temperature) {
        (Some(b), _) => b,
        (None, Some(t)) => {
            if t <= 0.0 {
                return Err(validation(format!("temperature must be positive, got {t}")));
            }
            1.0 / t
        }
        (None, None) => match config.get_f64("beta").map_err(validation_msg)? {
            Some(b) => b,
            None => {
                let t = config
                    .get_f64("temperature")
                    .map_err(validation_msg)?
                    .unwrap_or(DEFAULT_T_COLD);
                if t <= 0.0 {
                    return Err(validation(format!("temperature must be positive, got {t}")));
                }
                1.0 / t
            }
        },
    };
    let rel_tol =
        resolve_f64(args.rel_tol, config, "rel-tol", DEFAULT_REL_TOL).map_err(validation_msg)?;
    Ok((ThermalState::new(params, beta)?, rel_tol))
}

fn cycle_spec(params: &CycleParams, config: &ConfigFile) -> Result<(CycleSpec, f64), CliError> {
    let t_hot =
        resolve_f64(params.t_hot, config, "t-hot", DEFAULT_T_HOT).map_err(validation_msg)?;
    let t_cold =
        resolve_f64(params.t_cold, config, "t-cold", DEFAULT_T_COLD).map_err(validation_msg)?;
    let omega_high = resolve_f64(params.omega_high, config, "omega-high", DEFAULT_OMEGA_HIGH)
        .map_err(validation_msg)?;
    let omega_low = resolve_f64(params.omega_low, config, "omega-low", DEFAULT_OMEGA_LOW)
        .map_err(validation_msg)?;
    let gamma = resolve_f64(params.gamma, config, "gamma", 0.0).map_err(validation_msg)?;
    let mode_text = params
        .scaling_mode
        .as_deref()
        .or_else(|| config.get_str("scaling-mode"))
        .unwrap_or("fixed-gamma-tilde");
    let scaling_mode = ScalingMode::from_str(mode_text).map_err(validation_msg)?;
    let rel_tol =
        resolve_f64(params.rel_tol, config, "rel-tol", DEFAULT_REL_TOL).map_err(validation_msg)?;
    warn_if_perturbative(gamma);
    Ok((
        CycleSpec::new(t_hot, t_cold, omega_high, omega_low, gamma, scaling_mode)?,
        rel_tol,
    ))
}

fn cmd_levels(args: LevelsArgs, config: &ConfigFile) -> Result<i32, CliError> {
    let params = substance(args.omega, args.gamma, config)?;
    let (a, b) = params.spectrum_coefficients();
    println!(
        "# omega = {}, gamma = {} (A = {a}, B = {b})",
        params.omega(),
        params.gamma()
    );
    println!(
        "{:>6}  {:>24}  {:>24}  {:>24}",
        "n", "energy", "c_minus4", "c_plus4"
    );
    for n in 0..=args.max_level {
        let c = params.eigenstate_correction(n);
        println!(
            "{n:>6}  {:>24.16e}  {:>24.16e}  {:>24.16e}",
            params.energy_level(n),
            c.c_minus4,
            c.c_plus4
        );
    }
    Ok(0)
}

fn cmd_partition(args: StateArgs, config: &ConfigFile) -> Result<i32, CliError> {
    let (state, rel_tol) = thermal_state(&args, config)?;
    let r = statmech::partition_sum(&state, rel_tol)?;
    println!("beta        = {:.16e}", state.beta());
    println!("Z           = {:.16e}", r.value);
    println!("ln Z        = {:.16e}", r.ln_value());
    println!("levels_used = {}", r.levels_used);
    println!(
        "tail_bound  = {:.3e} (rel_tol = {rel_tol:.1e})",
        r.tail_bound
    );
    if state.params().gamma() > 0.0 {
        let cf = statmech::partition_closed_form(&state)?;
        println!("closed form = {cf:.16e} (integral bound; Z - Z_cf in [0, 1])");
    }
    Ok(0)
}

fn cmd_thermo(args: StateArgs, config: &ConfigFile) -> Result<i32, CliError> {
    let (state, rel_tol) = thermal_state(&args, config)?;
    let t = statmech::thermo_point(&state, rel_tol)?;
    println!("beta            = {:.16e}", state.beta());
    println!("Z               = {:.16e}", t.partition);
    println!("ln Z            = {:.16e}", t.ln_partition);
    println!("internal energy = {:.16e}", t.internal_energy);
    println!("entropy         = {:.16e}", t.entropy);
    println!("free energy     = {:.16e}", t.free_energy);
    println!("levels_used     = {}", t.levels_used);
    Ok(0)
}

fn cmd_cycle(args: CycleArgs, config: &ConfigFile) -> Result<i32, CliError> {
    let mode = CycleMode::from_str(&args.mode).map_err(validation_msg)?;
    let (spec, rel_tol) = cycle_spec(&args.params, config)?;
    let r = cycles::evaluate(mode, &spec, rel_tol)?;
    println!("cycle        = {mode} (scaling: {})", spec.scaling_mode());
    println!("corners (T, omega, gamma_eff):");
    for (label, c) in ["A", "B", "C", "D"].iter().zip(r.corners.iter()) {
        println!(
            "  {label}: ({}, {}, {})",
            c.temperature, c.omega, c.gamma_effective
        );
    }
    let names = match mode {
        CycleMode::OttoFridge => ["Q_cold", "Q_adiabat1", "Q_hot", "Q_adiabat2"],
        _ => ["Q_AB", "Q_BC", "Q_CD", "Q_DA"],
    };
    for (name, q) in names.iter().zip(r.heats.iter()) {
        println!("{name:<12} = {q:.16e}");
    }
    println!("W_total      = {:.16e}", r.w_total);
    let merit_name = match mode {
        CycleMode::StirlingEngine => "efficiency",
        _ => "COP",
    };
    println!("{merit_name:<12} = {:.16e}", r.merit);
    Ok(0)
}

fn cmd_sweep(args: SweepArgs, config: &ConfigFile) -> Result<i32, CliError> {
    let cycle_mode = CycleMode::from_str(&args.cycle).map_err(validation_msg)?;
    let swept = SweptParameter::from_str(&args.param).map_err(validation_msg)?;
    let (base, rel_tol) = cycle_spec(&args.params, config)?;
    if swept == SweptParameter::Gamma {
        warn_if_perturbative(args.stop);
    }
    let sweep = SweepSpec {
        cycle_mode,
        base,
        swept,
        start: args.start,
        stop: args.stop,
        steps: args.steps,
        include_ho_baseline: !args.no_ho_baseline,
    };

    let max_threads =
        match std::env::var("NCQ_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|e| {
                validation(format!("NCQ_THREADS = '{v}' is not a thread count: {e}"))
            })?),
            Err(_) => None,
        };
    let rows = run_sweep_parallel(&sweep, rel_tol, max_threads)?;

    if args.csv == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        emit_csv(&rows, &mut lock)?;
    } else {
        write_file(&args.csv, |w| emit_csv(&rows, w))?;
        eprintln!("wrote {}", args.csv);
    }

    if let Some(svg_path) = &args.svg {
        let plot = PlotConfig {
            title: args
                .title
                .clone()
                .unwrap_or_else(|| format!("{cycle_mode} vs {swept}")),
            x_label: swept.to_string(),
            y_label: match cycle_mode {
                CycleMode::StirlingEngine => "efficiency".into(),
                _ => "COP".into(),
            },
            ..PlotConfig::default()
        };
        let path = svg_path.display().to_string();
        write_file(&path, |w| emit_svg(&rows, &plot, w))?;
        eprintln!("wrote {path}");
    }
    Ok(0)
}

fn write_file(
    path: &str,
    emit: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> ncq_core::Result<()>,
) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Computation(format!("failed writing {path}: {e}")))?;
    let mut writer = std::io::BufWriter::new(file);
    emit(&mut writer).map_err(|e| match e {
        // re-anchor the generic writer error onto the actual path
        ncq_core::Error::Io { source, .. } => {
            CliError::Computation(format!("failed writing {path}: {source}"))
        }
        other => CliError::from(other),
    })?;
    writer
        .flush()
        .map_err(|e| CliError::Computation(format!("failed writing {path}: {e}")))
}

fn cmd_validate(args: ValidateArgs, config: &ConfigFile) -> Result<i32, CliError> {
    let rel_tol =
        resolve_f64(args.rel_tol, config, "rel-tol", DEFAULT_REL_TOL).map_err(validation_msg)?;
    let reports = validation::run_validation_suite(rel_tol)?;
    let mut passed = 0usize;
    println!("oracle cross-checks (rel_tol = {rel_tol:.1e})");
    for r in &reports {
        println!(
            "  {}  {:<62} primary={:<24.16e} oracle={:<24.16e} diff={:.3e} tol={:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.quantity,
            r.primary_value,
            r.oracle_value,
            r.rel_diff,
            r.tolerance_used
        );
        if r.pass {
            passed += 1;
        }
    }
    println!("result: {passed}/{} passed", reports.len());
    Ok(if passed == reports.len() { 0 } else { 1 })
}
