//! Batch command-line driver: optimize circuit files and verify outputs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use retune::circuit::{rebase, set_entangler, Circuit, Format};
use retune::error::Error;
use retune::gates::GateKind;
use retune::merit::{ErrorShape, NoiseModel};
use retune::metrics::{entangling_count, entangling_depth, idealized_fidelity};
use retune::optimizer::OptimizerConfig;
use retune::passes::{optimize_circuit, PassConfig};

const EXIT_BELOW_TOLERANCE: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_UNSUPPORTED_GATE: u8 = 4;
const EXIT_OPTIMIZER: u8 = 5;
const EXIT_IO: u8 = 6;
const EXIT_NOT_VERIFIABLE: u8 = 7;

#[derive(Parser)]
#[command(name = "retune", version, about = "Noise-aware re-tuning of quantum circuit rotation angles", propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-tune a circuit's angles and delete zero-angle gates.
    Optimize(OptimizeArgs),
    /// Compare two circuit files by idealized fidelity.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Auto,
    Json,
    Qasm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Quadratic,
    Linear,
    Sin2,
}

impl From<ShapeArg> for ErrorShape {
    fn from(value: ShapeArg) -> Self {
        match value {
            ShapeArg::Quadratic => ErrorShape::Quadratic,
            ShapeArg::Linear => ErrorShape::Linear,
            ShapeArg::Sin2 => ErrorShape::SinSquared,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EntanglerArg {
    Rzz,
    Fecr,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Input circuit file.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,

    /// Input format; auto picks by extension (.json, else qasm).
    #[arg(long, value_enum, default_value = "auto")]
    in_format: FileFormat,

    /// Output circuit file; `-` writes to stdout.
    #[arg(long = "out", value_name = "PATH", default_value = "-")]
    output: String,

    /// Output format; auto picks by extension, json on stdout.
    #[arg(long, value_enum, default_value = "auto")]
    out_format: FileFormat,

    /// Default two-qubit error rate E in [0, 1).
    #[arg(long, default_value_t = 0.01)]
    error_rate: f64,

    /// Angle-to-error-weight shape.
    #[arg(long, value_enum, default_value = "quadratic")]
    error_shape: ShapeArg,

    /// Maximum window qubit count (2..=5).
    #[arg(long, default_value_t = 4)]
    window_size: usize,

    /// Angles at or below this magnitude are snapped to zero and deleted.
    #[arg(long, default_value_t = 1e-4)]
    elimination_threshold: f64,

    /// Minimum acceptable per-window idealized fidelity.
    #[arg(long, default_value_t = 0.0)]
    fidelity_floor: f64,

    /// Extra perturbed optimizer starts per window.
    #[arg(long, default_value_t = 2)]
    restarts: usize,

    /// Seed for the restart perturbations.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Convert all entanglers to this kind before optimizing.
    #[arg(long, value_enum)]
    entangler: Option<EntanglerArg>,

    /// Report destination: a path, or `-` for stdout.
    #[arg(long, value_name = "PATH")]
    report: Option<String>,

    /// Report fidelities under the squared convention |tr|²/d².
    #[arg(long)]
    squared_fidelity: bool,

    /// Worker threads for independent windows.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Print a human-readable summary to stderr.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Original circuit file.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,

    /// Optimized circuit file.
    #[arg(long = "out", value_name = "PATH")]
    output: PathBuf,

    /// Accept when idealized fidelity >= 1 - tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,

    #[arg(long, value_enum, default_value = "auto")]
    in_format: FileFormat,

    #[arg(long, value_enum, default_value = "auto")]
    out_format: FileFormat,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::UnsupportedGate { .. } | Error::NonNativeGate { .. } => EXIT_UNSUPPORTED_GATE,
        Error::NonFiniteObjective { .. } => EXIT_OPTIMIZER,
        Error::Window { source, .. } => exit_code_for(source),
        Error::TooManyQubits { .. } => EXIT_NOT_VERIFIABLE,
        _ => EXIT_PARSE,
    }
}

fn from_core(error: Error) -> Failure {
    Failure::new(exit_code_for(&error), error.to_string())
}

fn detect_format(path: &Path, requested: FileFormat) -> Format {
    match requested {
        FileFormat::Json => Format::Json,
        FileFormat::Qasm => Format::Qasm,
        FileFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Qasm,
        },
    }
}

fn read_circuit(path: &Path, requested: FileFormat) -> Result<(Circuit, Format), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let format = detect_format(path, requested);
    let circuit = Circuit::parse(&text, format).map_err(from_core)?;
    Ok((circuit, format))
}

fn format_name(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Qasm => "qasm",
    }
}

fn run_optimize(args: &OptimizeArgs) -> Result<(), Failure> {
    if args.jobs == 0 {
        return Err(Failure::new(EXIT_PARSE, "--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build_global()
        .ok();

    let clock = Instant::now();
    let (parsed, in_format) = read_circuit(&args.input, args.in_format)?;
    let mut native = rebase(&parsed).map_err(from_core)?;
    if let Some(entangler) = args.entangler {
        let kind = match entangler {
            EntanglerArg::Rzz => GateKind::Rzz,
            EntanglerArg::Fecr => GateKind::Fecr,
        };
        native = set_entangler(&native, kind).map_err(from_core)?;
    }

    let noise = NoiseModel::new(args.error_rate, args.error_shape.into()).map_err(from_core)?;
    let config = PassConfig {
        window_size: args.window_size,
        elimination_threshold: args.elimination_threshold,
        fidelity_floor: args.fidelity_floor,
        noise,
        optimizer: OptimizerConfig {
            restarts: args.restarts,
            seed: args.seed,
            ..OptimizerConfig::default()
        },
    };

    let (optimized, mut report) = optimize_circuit(&native, &config).map_err(from_core)?;
    if args.squared_fidelity {
        report = report.squared();
    }

    let out_format = if args.output == "-" {
        match args.out_format {
            FileFormat::Qasm => Format::Qasm,
            _ => Format::Json,
        }
    } else {
        detect_format(Path::new(&args.output), args.out_format)
    };
    let out_text = optimized.serialize(out_format);
    if args.output == "-" {
        print!("{out_text}");
    } else {
        std::fs::write(&args.output, &out_text)
            .map_err(|e| Failure::new(EXIT_IO, format!("cannot write {}: {e}", args.output)))?;
    }

    if let Some(destination) = &args.report {
        let document = json!({
            "schema": 1,
            "version": env!("CARGO_PKG_VERSION"),
            "command": "optimize",
            "config": {
                "input": args.input.display().to_string(),
                "input_format": format_name(in_format),
                "output": args.output,
                "output_format": format_name(out_format),
                "error_rate": args.error_rate,
                "error_shape": ErrorShape::from(args.error_shape).name(),
                "window_size": args.window_size,
                "elimination_threshold": args.elimination_threshold,
                "fidelity_floor": args.fidelity_floor,
                "restarts": args.restarts,
                "seed": args.seed,
                "entangler": args.entangler.map(|e| match e {
                    EntanglerArg::Rzz => "rzz",
                    EntanglerArg::Fecr => "fecr",
                }),
                "squared_fidelity": args.squared_fidelity,
                "jobs": args.jobs,
                "optimizer": {
                    "memory_pairs": config.optimizer.memory_pairs,
                    "max_iterations": config.optimizer.max_iterations,
                    "gradient_tolerance": config.optimizer.gradient_tolerance,
                    "merit_tolerance": config.optimizer.merit_tolerance,
                },
            },
            "input": {
                "n_qubits": parsed.n_qubits,
                "gates": parsed.gates.len(),
                "entangling_count": entangling_count(&parsed),
                "entangling_depth": entangling_depth(&parsed),
            },
            "output": {
                "n_qubits": optimized.n_qubits,
                "gates": optimized.gates.len(),
                "entangling_count": entangling_count(&optimized),
                "entangling_depth": entangling_depth(&optimized),
            },
            "report": report,
            "total_wall_time_seconds": clock.elapsed().as_secs_f64(),
        });
        let text = format!("{}\n", serde_json::to_string_pretty(&document).unwrap());
        if destination == "-" {
            print!("{text}");
        } else {
            std::fs::write(destination, &text)
                .map_err(|e| Failure::new(EXIT_IO, format!("cannot write {destination}: {e}")))?;
        }
    }

    if args.verbose {
        eprintln!(
            "entangling gates: {} -> {}   depth: {} -> {}",
            report.input_entangling_count,
            report.output_entangling_count,
            report.input_entangling_depth,
            report.output_entangling_depth
        );
        match report.idealized_fidelity {
            Some(f) => eprintln!("idealized fidelity: {f:.6}"),
            None => eprintln!("idealized fidelity: not computable at this size"),
        }
        eprintln!(
            "estimated fidelity: {:.4}   windows: {}   wall time: {:.3}s",
            report.estimated_fidelity,
            report.windows.len(),
            report.wall_time_seconds
        );
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let (input, _) = read_circuit(&args.input, args.in_format)?;
    let (output, _) = read_circuit(&args.output, args.out_format)?;
    if input.n_qubits != output.n_qubits {
        return Err(Failure::new(
            EXIT_PARSE,
            format!(
                "register sizes differ: {} vs {} qubits",
                input.n_qubits, output.n_qubits
            ),
        ));
    }
    if input.n_qubits > retune::MAX_QUBITS {
        println!(
            "not verifiable at this scale: {} qubits exceeds the {}-qubit simulation limit",
            input.n_qubits,
            retune::MAX_QUBITS
        );
        return Err(Failure::new(EXIT_NOT_VERIFIABLE, String::new()));
    }
    let fidelity = idealized_fidelity(
        &input.unitary().map_err(from_core)?,
        &output.unitary().map_err(from_core)?,
    )
    .map_err(from_core)?;
    println!("idealized fidelity: {fidelity:.12}");
    if fidelity >= 1.0 - args.tolerance {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_BELOW_TOLERANCE,
            format!(
                "fidelity {fidelity:.12} below threshold {:.12}",
                1.0 - args.tolerance
            ),
        ))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Optimize(args) => run_optimize(args),
        Command::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}
