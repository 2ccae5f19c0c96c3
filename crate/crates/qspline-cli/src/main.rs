//! Command-line driver: `fit` runs one activation through a chosen
//! strategy, `table` reproduces the four-activation metrics table, and
//! `complexity` emits solver cost curves with the HHL crossover.
//!
//! Exit codes: 0 success, 2 invalid usage or parameters, 3 numerical
//! failure (the failing interval is named on stderr), 1 I/O trouble.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qspline::activations::Activation;
use qspline::complexity::{crossover, emit_curves, standard_models, Algorithm, CostModel};
use qspline::hhl::{HhlBackend, HhlConfig};
use qspline::pipeline::{
    reproduce_table, run_pipeline, Mode, NormRecovery, PipelineConfig, PipelineReport,
};
use qspline::spline::SplineConfig;

#[derive(Parser)]
#[command(
    name = "qspline",
    version,
    about = "Piecewise-linear spline fits of activation functions via a simulated HHL solver"
)]
struct Cli {
    /// Seed for the optional shot-sampling mode.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one activation and write curve CSV + metrics JSON + manifest.
    Fit(FitArgs),
    /// Run all four activations end to end and write the metrics table.
    Table(TableArgs),
    /// Emit the five solver cost curves and the HHL-vs-CG crossover.
    Complexity(ComplexityArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ActivationArg {
    Sigmoid,
    Tanh,
    Relu,
    Elu,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Classical,
    Hybrid,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(mode: ModeArg) -> Mode {
        match mode {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Hybrid => Mode::Hybrid,
            ModeArg::Full => Mode::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BackendArg {
    Circuit,
    Ideal,
}

impl From<BackendArg> for HhlBackend {
    fn from(backend: BackendArg) -> HhlBackend {
        match backend {
            BackendArg::Circuit => HhlBackend::Circuit,
            BackendArg::Ideal => HhlBackend::Ideal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NormRecoveryArg {
    Anchor,
    SuccessProbability,
}

impl From<NormRecoveryArg> for NormRecovery {
    fn from(value: NormRecoveryArg) -> NormRecovery {
        match value {
            NormRecoveryArg::Anchor => NormRecovery::Anchor,
            NormRecoveryArg::SuccessProbability => NormRecovery::SuccessProbability,
        }
    }
}

#[derive(Args, Serialize)]
struct SplineFlags {
    /// Number of equally spaced knots over the domain.
    #[arg(long, default_value_t = 20)]
    knots: usize,
    /// Knot span endpoints a b; the default places a knot at 0.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true,
          default_values_t = [-1.0, 0.9])]
    domain: Vec<f64>,
    /// Evaluation grid size for the RSS metrics.
    #[arg(long, default_value_t = 100)]
    grid_points: usize,
}

impl SplineFlags {
    fn build(&self) -> Result<SplineConfig<f64>, CliError> {
        if self.domain.len() != 2 || self.domain[0] >= self.domain[1] {
            return Err(CliError::usage("--domain needs two increasing endpoints"));
        }
        if self.grid_points < 2 {
            return Err(CliError::usage("--grid-points must be at least 2"));
        }
        SplineConfig::equally_spaced(self.domain[0], self.domain[1], self.knots)
            .map_err(|err| CliError::usage(&err.to_string()))
    }
}

#[derive(Args, Serialize)]
struct HhlFlags {
    /// Clock register width (phase-estimation precision).
    #[arg(long, default_value_t = 5)]
    clock_qubits: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Circuit)]
    backend: BackendArg,
    /// Explicit Hamiltonian evolution time (default: derived per block).
    #[arg(long)]
    evolution_time: Option<f64>,
    /// Explicit rotation constant C (default: derived per block).
    #[arg(long)]
    rotation_constant: Option<f64>,
}

impl HhlFlags {
    fn build(&self) -> Result<HhlConfig<f64>, CliError> {
        if !(1..=9).contains(&self.clock_qubits) {
            return Err(CliError::usage("--clock-qubits must lie in 1..=9"));
        }
        if self.evolution_time.is_some_and(|t| t <= 0.0) {
            return Err(CliError::usage("--evolution-time must be positive"));
        }
        if self.rotation_constant.is_some_and(|c| c <= 0.0) {
            return Err(CliError::usage("--rotation-constant must be positive"));
        }
        Ok(HhlConfig {
            clock_qubits: self.clock_qubits,
            evolution_time: self.evolution_time,
            rotation_constant: self.rotation_constant,
            backend: self.backend.into(),
        })
    }
}

#[derive(Args, Serialize)]
struct FitArgs {
    /// Target activation function.
    #[arg(long, value_enum)]
    activation: ActivationArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Classical)]
    mode: ModeArg,
    /// Alpha parameter of the elu activation.
    #[arg(long, default_value_t = 1.0)]
    elu_alpha: f64,
    #[command(flatten)]
    spline: SplineFlags,
    #[command(flatten)]
    hhl: HhlFlags,
    /// Ancilla shots per swap test; omit for exact probabilities.
    #[arg(long)]
    shots: Option<u64>,
    /// Repair full-quantum estimate signs from the hybrid sign.
    #[arg(long, default_value_t = false)]
    sign_repair: bool,
    #[arg(long, value_enum, default_value_t = NormRecoveryArg::Anchor)]
    norm_recovery: NormRecoveryArg,
    /// Output prefix; writes <out>.curve.csv, <out>.metrics.json and
    /// <out>.manifest.json.
    #[arg(long, default_value = "qspline_fit")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct TableArgs {
    #[command(flatten)]
    spline: SplineFlags,
    #[command(flatten)]
    hhl: HhlFlags,
    #[arg(long)]
    shots: Option<u64>,
    /// Output prefix; writes <out>.table.json, <out>.table.txt and
    /// <out>.manifest.json.
    #[arg(long, default_value = "qspline_table")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ComplexityArgs {
    /// Matrix sparsity (max nonzeros per row/column).
    #[arg(long, default_value_t = 3.0)]
    s: f64,
    /// Condition number.
    #[arg(long, default_value_t = 2.0)]
    kappa: f64,
    /// Error tolerance in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Largest system size to tabulate and scan.
    #[arg(long, default_value_t = 1000)]
    n_max: u64,
    /// Sparsity band lo hi for the shaded HHL region.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1.0, 10.0])]
    band: Vec<f64>,
    /// Output prefix; writes <out>.curves.csv, <out>.crossover.json and
    /// <out>.manifest.json.
    #[arg(long, default_value = "qspline_complexity")]
    out: PathBuf,
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: &str) -> Self {
        CliError {
            message: message.to_owned(),
            code: 2,
        }
    }

    fn numerical(message: String) -> Self {
        CliError { message, code: 3 }
    }

    fn io(err: std::io::Error) -> Self {
        CliError {
            message: err.to_string(),
            code: 1,
        }
    }
}

#[derive(Serialize)]
struct Manifest {
    artifact: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: serde_json::Value,
    outputs: Vec<String>,
}

fn write_manifest(
    out: &Path,
    command: &'static str,
    seed: u64,
    config: serde_json::Value,
    outputs: &[PathBuf],
) -> Result<(), CliError> {
    let manifest = Manifest {
        artifact: "qspline",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        config,
        outputs: outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
    };
    let path = suffixed(out, ".manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    std::fs::write(&path, body + "\n").map_err(CliError::io)
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn opt_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn run_fit(seed: u64, args: &FitArgs) -> Result<(), CliError> {
    let activation = match args.activation {
        ActivationArg::Sigmoid => Activation::Sigmoid,
        ActivationArg::Tanh => Activation::Tanh,
        ActivationArg::Relu => Activation::Relu,
        ActivationArg::Elu => Activation::Elu {
            alpha: args.elu_alpha,
        },
    };
    let config = PipelineConfig {
        spline: args.spline.build()?,
        hhl: args.hhl.build()?,
        grid_points: args.spline.grid_points,
        shots: args.shots,
        seed,
        sign_repair: args.sign_repair,
        norm_recovery: args.norm_recovery.into(),
    };
    let report = run_pipeline(activation, &config, args.mode.into())
        .map_err(|err| CliError::numerical(err.to_string()))?;

    let curve_path = suffixed(&args.out, ".curve.csv");
    let mut csv = String::from("x,f_true,f_classic,f_hybrid,f_full,interval_fidelity\n");
    for s in &report.curve_samples {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.x,
            s.f_true,
            s.f_classic,
            opt_cell(s.f_hybrid),
            opt_cell(s.f_full),
            opt_cell(s.interval_fidelity),
        );
    }
    std::fs::write(&curve_path, csv).map_err(CliError::io)?;

    #[derive(Serialize)]
    struct Metrics<'a> {
        activation: &'a str,
        mode: ModeArg,
        rss_classic: f64,
        rss_hybrid: Option<f64>,
        rss_full: Option<f64>,
        average_fidelity: Option<f64>,
    }
    let metrics_path = suffixed(&args.out, ".metrics.json");
    let metrics = Metrics {
        activation: &report.activation,
        mode: args.mode,
        rss_classic: report.rss_classic,
        rss_hybrid: report.rss_hybrid,
        rss_full: report.rss_full,
        average_fidelity: report.average_fidelity,
    };
    let body = serde_json::to_string_pretty(&metrics).expect("metrics serialization");
    std::fs::write(&metrics_path, body + "\n").map_err(CliError::io)?;

    let config_snapshot = serde_json::json!({
        "fit": args,
        "pipeline": config,
    });
    write_manifest(
        &args.out,
        "fit",
        seed,
        config_snapshot,
        &[curve_path.clone(), metrics_path.clone()],
    )?;
    println!(
        "fit {} ({}): rss_classic = {:e}{}{}",
        report.activation,
        serde_json::to_string(&args.mode).unwrap().trim_matches('"'),
        report.rss_classic,
        report
            .rss_hybrid
            .map(|v| format!(", rss_hybrid = {v:e}"))
            .unwrap_or_default(),
        report
            .rss_full
            .map(|v| format!(", rss_full = {v:e}"))
            .unwrap_or_default(),
    );
    Ok(())
}

fn table_text(reports: &[PipelineReport<f64>]) -> String {
    let mut text = format!(
        "{:<12} {:>14} {:>14} {:>14} {:>10}\n",
        "activation", "rss_classic", "rss_hybrid", "rss_full", "fidelity"
    );
    for report in reports {
        let _ = writeln!(
            text,
            "{:<12} {:>14.6e} {:>14.6e} {:>14.6e} {:>10.4}",
            report.activation,
            report.rss_classic,
            report.rss_hybrid.unwrap_or(f64::NAN),
            report.rss_full.unwrap_or(f64::NAN),
            report.average_fidelity.unwrap_or(f64::NAN),
        );
    }
    text
}

fn run_table(seed: u64, args: &TableArgs) -> Result<(), CliError> {
    let config = PipelineConfig {
        spline: args.spline.build()?,
        hhl: args.hhl.build()?,
        grid_points: args.spline.grid_points,
        shots: args.shots,
        seed,
        sign_repair: false,
        norm_recovery: NormRecovery::Anchor,
    };
    let reports = reproduce_table(&config).map_err(|err| CliError::numerical(err.to_string()))?;

    #[derive(Serialize)]
    struct Row<'a> {
        activation: &'a str,
        rss_classic: f64,
        rss_hybrid: Option<f64>,
        rss_full: Option<f64>,
        average_fidelity: Option<f64>,
    }
    let rows: Vec<Row> = reports
        .iter()
        .map(|r| Row {
            activation: &r.activation,
            rss_classic: r.rss_classic,
            rss_hybrid: r.rss_hybrid,
            rss_full: r.rss_full,
            average_fidelity: r.average_fidelity,
        })
        .collect();
    let json_path = suffixed(&args.out, ".table.json");
    let body = serde_json::to_string_pretty(&rows).expect("table serialization");
    std::fs::write(&json_path, body + "\n").map_err(CliError::io)?;

    let text = table_text(&reports);
    let text_path = suffixed(&args.out, ".table.txt");
    std::fs::write(&text_path, &text).map_err(CliError::io)?;
    print!("{text}");

    let config_snapshot = serde_json::json!({
        "table": args,
        "pipeline": config,
    });
    write_manifest(
        &args.out,
        "table",
        seed,
        config_snapshot,
        &[json_path.clone(), text_path.clone()],
    )
}

fn run_complexity(seed: u64, args: &ComplexityArgs) -> Result<(), CliError> {
    if args.band.len() != 2 {
        return Err(CliError::usage("--band needs two values"));
    }
    let models = standard_models(args.s, args.kappa, args.eps)
        .map_err(|err| CliError::usage(&err.to_string()))?;
    let band = Some((args.band[0], args.band[1]));
    let rows = emit_curves(&models, args.n_max, band)
        .map_err(|err| CliError::usage(&err.to_string()))?;

    let csv_path = suffixed(&args.out, ".curves.csv");
    let mut csv = String::from("n,algorithm,cost,band_min,band_max\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            row.n,
            row.algorithm.name(),
            row.cost,
            opt_cell(row.band_min),
            opt_cell(row.band_max),
        );
    }
    std::fs::write(&csv_path, csv).map_err(CliError::io)?;

    let hhl = CostModel::new(Algorithm::Hhl, args.s, args.kappa, args.eps)
        .map_err(|err| CliError::usage(&err.to_string()))?;
    let cg = CostModel::new(Algorithm::ConjugateGradient, args.s, args.kappa, args.eps)
        .map_err(|err| CliError::usage(&err.to_string()))?;
    let scan_max = args.n_max.max(10_000);
    let cross = crossover(&hhl, &cg, scan_max)
        .map_err(|err| CliError::usage(&err.to_string()))?;
    match cross {
        Some(n) => println!("HHL vs conjugate-gradient crossover: n = {n}"),
        None => println!("HHL vs conjugate-gradient crossover: none up to n = {scan_max}"),
    }

    #[derive(Serialize)]
    struct Crossover {
        s: f64,
        kappa: f64,
        eps: f64,
        scan_max: u64,
        hhl_vs_conjugate_gradient: Option<u64>,
    }
    let crossover_path = suffixed(&args.out, ".crossover.json");
    let body = serde_json::to_string_pretty(&Crossover {
        s: args.s,
        kappa: args.kappa,
        eps: args.eps,
        scan_max,
        hhl_vs_conjugate_gradient: cross,
    })
    .expect("crossover serialization");
    std::fs::write(&crossover_path, body + "\n").map_err(CliError::io)?;

    let config_snapshot = serde_json::json!({ "complexity": args });
    write_manifest(
        &args.out,
        "complexity",
        seed,
        config_snapshot,
        &[csv_path.clone(), crossover_path.clone()],
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fit(args) => run_fit(cli.seed, args),
        Command::Table(args) => run_table(cli.seed, args),
        Command::Complexity(args) => run_complexity(cli.seed, args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
