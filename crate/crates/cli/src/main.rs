use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gf2class_core::classify::{all_passed, census, classify, verify_report, ClassificationReport, ClassifyConfig, ClassifyError};
use gf2class_core::families::{make_family, FamilySpec};
use gf2class_core::gf2::text::{format_matrices, parse_matrices};
use gf2class_core::group::DEFAULT_CLOSURE_CAP;
use gf2class_core::BitMatrix;

/// Exit code for invalid input, invariant violations and failed verification.
const EXIT_INVALID: u8 = 3;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("seed index {index} out of range for {count} matrices")]
    SeedIndex { index: usize, count: usize },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Family(#[from] gf2class_core::families::FamilyError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Classify(e) => e.exit_code() as u8,
            _ => EXIT_INVALID,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "gf2class", version, about = "Classify groups over GF(2) generated by a class of order-3 elements with 2-dimensional commutator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Generator file: matrices in the text format, separated by blank lines.
    generators: PathBuf,
    /// Which matrix of the file seeds the class D.
    #[arg(long, default_value_t = 0)]
    seed_index: usize,
    /// Largest group closure to enumerate.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
    max_closure: usize,
    /// Largest class orbit to build; exceeding it exits with code 2.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
    max_class: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Write generators for a family, seed first. Families: transvection:N, frobenius73,
    /// alt7, symplectic:N, orthogonal:N:plus|minus, alternating:N[:quotient],
    /// f4-reflection:M, f4-unitary:M, and the controls fixed-block:A:N, partial-dual:N,
    /// degenerate-symplectic:N, reducible-blocks:B.
    Make {
        family: FamilySpec,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the classification and print the report.
    Classify {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the JSON report here.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Re-check a JSON report against the generator file it was made from.
    Verify {
        report: PathBuf,
        generators: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Geometry and spread statistics only.
    Census {
        #[command(flatten)]
        run: RunArgs,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_generators(path: &Path) -> Result<Vec<BitMatrix>, CliError> {
    parse_matrices(&read(path)?).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_run(run: &RunArgs) -> Result<(Vec<BitMatrix>, BitMatrix, ClassifyConfig), CliError> {
    let generators = load_generators(&run.generators)?;
    let seed = generators.get(run.seed_index).cloned().ok_or(CliError::SeedIndex {
        index: run.seed_index,
        count: generators.len(),
    })?;
    let config = ClassifyConfig {
        max_closure: run.max_closure,
        max_class: run.max_class,
    };
    Ok((generators, seed, config))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Make { family, output } => {
            let family = make_family(family)?;
            let mut matrices = vec![family.seed];
            matrices.extend(family.generators);
            let text = format_matrices(&matrices);
            match output {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Classify { run, report_out } => {
            let (generators, seed, config) = load_run(&run)?;
            let report = classify(&generators, &seed, config)?;
            if let Some(path) = report_out {
                write(&path, &report.to_json())?;
            }
            match run.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => print!("{}", report.to_json()),
            }
            Ok(report.exit_code() as u8)
        }
        Command::Verify { report, generators, format } => {
            let text = read(&report)?;
            let parsed = ClassificationReport::from_json(&text).map_err(|e| CliError::Parse {
                path: report.clone(),
                message: e.to_string(),
            })?;
            let findings = verify_report(&parsed, &load_generators(&generators)?);
            match format {
                Format::Text => {
                    for f in &findings {
                        println!("{} {:<24} {}", if f.passed { "ok  " } else { "FAIL" }, f.check, f.detail);
                    }
                }
                Format::Json => print!("{}", json(&findings)),
            }
            Ok(if all_passed(&findings) { 0 } else { EXIT_INVALID })
        }
        Command::Census { run } => {
            let (generators, seed, config) = load_run(&run)?;
            let report = census(&generators, &seed, config)?;
            match run.format {
                Format::Json => print!("{}", json(&report)),
                Format::Text => {
                    println!("dimension   {}", report.dimension);
                    println!("group order {}", report.group_order.map_or("not enumerated".into(), |o| o.to_string()));
                    println!("class size  {}", report.class_size);
                    println!("hypotheses  {}", if report.hypotheses.all_hold() { "hold" } else { "fail" });
                    if let Some(g) = &report.geometry {
                        println!("points      {}", g.points);
                        println!("lines       {}", g.lines);
                        println!("planes      {} projective, {} dual affine", g.projective_planes, g.dual_affine_planes);
                        println!("components  {} (diameter {})", g.components, g.diameter);
                    }
                    if let Some(s) = &report.spreads {
                        println!("spreads     {} full, {} tangent, {} hyperbolic, {} singular", s.full, s.tangent, s.hyperbolic, s.singular);
                        println!("singular    {} lines", s.singular_lines);
                    }
                    for w in &report.warnings {
                        println!("warning     {w}");
                    }
                }
            }
            Ok(if report.hypotheses.all_hold() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
