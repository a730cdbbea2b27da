use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confmap::{Noise, NoiseSpec};
use confmap_cli::batch::run_batch;
use confmap_cli::run::{run_fusion, run_harness, run_map, run_perturb, run_translation};
use confmap_cli::{CliError, Settings, StatsRecord};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "confmap",
    version,
    about = "Information-transfer confidence maps for fused and translated images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Odd patch size W
    #[arg(short = 'W', long = "patch", default_value_t = 7)]
    patch: usize,
    /// Number of intensity bins
    #[arg(short = 'B', long = "bins", default_value_t = 16)]
    bins: usize,
    /// Overlay color intensity
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Seed for noise perturbations
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Binary mask restricting summary statistics (nonzero = selected)
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Min-max normalize every input image
    #[arg(long)]
    normalize: bool,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            patch: self.patch,
            bins: self.bins,
            alpha: self.alpha,
            seed: self.seed,
            normalize: self.normalize,
            mask: self.mask.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Confidence map of a target image against a source image
    Map {
        source: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fusion evaluation: maps against both sources and the RGB overlay
    FusionEval {
        mri: PathBuf,
        pet: PathBuf,
        fused: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Translation evaluation: maps against source and reference and the RGB overlay
    TranslationEval {
        source: PathBuf,
        reference: PathBuf,
        predicted: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Perturb the fused image and re-evaluate both maps
    Perturb {
        mri: PathBuf,
        pet: PathBuf,
        fused: PathBuf,
        /// `kind[:key=value,...]`, repeatable; `all` adds the five standard perturbations
        #[arg(long = "noise")]
        noise: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the cases listed in a batch file
    Batch {
        config: PathBuf,
        /// Output directory (overrides the file's `out`)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write synthetic fixture images and a sample batch file
    Harness {
        #[arg(long, default_value_t = 64)]
        width: usize,
        #[arg(long, default_value_t = 64)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
    /// Print the effective configuration as TOML
    ConfigDump {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Serialize)]
struct Dump {
    version: u32,
    defaults: Settings,
    noise: Vec<Noise>,
}

fn parse_noises(raw: &[String], seed: u64) -> Result<Vec<NoiseSpec>, CliError> {
    let mut out = Vec::new();
    for s in raw {
        if s == "all" {
            out.extend(
                Noise::standard_set()
                    .into_iter()
                    .map(|n| NoiseSpec::new(n, seed)),
            );
        } else {
            let noise = s
                .parse::<Noise>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            out.push(NoiseSpec::new(noise, seed));
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("give at least one --noise".into()));
    }
    Ok(out)
}

fn print_records(records: &[StatsRecord]) {
    print!("{}", confmap_cli::table::render(records));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Map {
            source,
            target,
            common,
        } => print_records(&run_map(
            "-",
            &source,
            &target,
            &common.settings(),
            &common.out,
        )?),
        Command::FusionEval {
            mri,
            pet,
            fused,
            common,
        } => print_records(&run_fusion(
            "-",
            &mri,
            &pet,
            &fused,
            &common.settings(),
            &common.out,
        )?),
        Command::TranslationEval {
            source,
            reference,
            predicted,
            common,
        } => print_records(&run_translation(
            "-",
            &source,
            &reference,
            &predicted,
            &common.settings(),
            &common.out,
        )?),
        Command::Perturb {
            mri,
            pet,
            fused,
            noise,
            common,
        } => {
            let specs = parse_noises(&noise, common.seed)?;
            print_records(&run_perturb(
                "-",
                &mri,
                &pet,
                &fused,
                &specs,
                &common.settings(),
                &common.out,
            )?)
        }
        Command::Batch { config, out } => {
            let report = run_batch(&config, out.as_deref())?;
            print_records(&report.records);
            if report.failed > 0 {
                for r in report
                    .records
                    .iter()
                    .filter(|r| r.status == confmap_cli::Status::Failed)
                {
                    eprintln!("case {} failed: {}", r.case, r.detail);
                }
                return Err(CliError::PartialBatch {
                    failed: report.failed,
                    total: report.total,
                });
            }
        }
        Command::Harness {
            width,
            height,
            seed,
            out,
        } => {
            let batch = run_harness(width, height, seed, &out)?;
            println!("{}", batch.display());
        }
        Command::ConfigDump { common } => {
            let settings = common.settings();
            settings.validate()?;
            let dump = Dump {
                version: confmap_cli::batch::SCHEMA_VERSION,
                defaults: settings,
                noise: Noise::standard_set(),
            };
            print!("{}", toml::to_string(&dump).expect("plain data serializes"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
