//! `cptkit` command line: generate design variations, evaluate corpora,
//! and check judge agreement against human ratings.
//!
//! Exit codes: 0 on success, 2 on input/usage errors, 3 on remote
//! endpoint failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cptkit::pipeline::{self, PipelineError, RunConfig, RunConfigPatch};

#[derive(Parser)]
#[command(name = "cptkit", version, about = "Generate editable variations of design templates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mask, predict, infill, render and score variations of one design
    Generate(Box<GenerateArgs>),
    /// Score every .cml in a corpus and aggregate per-label chosen rates
    Evaluate {
        /// Directory of .cml files
        #[arg(long)]
        corpus: PathBuf,
        /// CSV of file,label rows
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Where to write the CSV report
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the confusion matrix of a verdict log against human thumbs
    JudgeEval {
        /// JSON-lines verdict log
        #[arg(long)]
        log: PathBuf,
        /// One up/down rating per line
        #[arg(long)]
        human: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input .cml design
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mask classes, comma separated: color,font,fontsize,leading,
    /// tracking,top,left,width,height,effect (or layout for all bounds)
    #[arg(long, value_delimiter = ',')]
    classes: Option<Vec<String>>,
    /// Association mode: none, local or global
    #[arg(long)]
    mode: Option<String>,
    /// Number of variations to generate
    #[arg(long = "n")]
    variations: Option<u32>,
    /// Upper bound on --n
    #[arg(long)]
    max_n: Option<u32>,
    /// Creativity knob in [0, 2]; 0 keeps baselines at identity
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// baseline (auto), palette, font or remote
    #[arg(long)]
    predictor: Option<String>,
    /// Brand kit JSON ({"colors": [...], "fonts": [...]})
    #[arg(long)]
    brand: Option<PathBuf>,
    /// Judge renders through the remote vision endpoint
    #[arg(long)]
    judge: bool,
    /// Judge prompt generation: v1 or v2
    #[arg(long)]
    prompt_version: Option<String>,
    /// Minimum mean color distance for the diversity filter
    #[arg(long)]
    diversity_color: Option<f64>,
    /// Minimum font-set dissimilarity for the diversity filter
    #[arg(long)]
    diversity_font: Option<f64>,
    /// Reject fonts outside the known-font list
    #[arg(long)]
    strict_fonts: bool,
    /// Parallel variation workers
    #[arg(long)]
    workers: Option<usize>,
}

impl GenerateArgs {
    fn build_config(&self) -> Result<RunConfig, PipelineError> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                input_error(format!("{}: {e}", path.display()))
            })?;
            RunConfigPatch::from_json(&text)?.apply(&mut config)?;
        }
        let flags = RunConfigPatch {
            input: self.input.clone(),
            out_dir: self.out.clone(),
            classes: self.classes.clone(),
            mode: self.mode.clone(),
            variations: self.variations,
            max_variations: self.max_n,
            temperature: self.temperature,
            seed: self.seed,
            predictor: self.predictor.clone(),
            brand_path: self.brand.clone(),
            min_color_distance: self.diversity_color,
            min_font_dissimilarity: self.diversity_font,
            judge: self.judge.then_some(true),
            prompt_version: self.prompt_version.clone(),
            strict_fonts: self.strict_fonts.then_some(true),
            workers: self.workers,
        };
        flags.apply(&mut config)?;
        if config.input.as_os_str().is_empty() {
            return Err(input_error("--input is required (flag or config file)"));
        }
        if config.out_dir.as_os_str().is_empty() {
            return Err(input_error("--out is required (flag or config file)"));
        }
        Ok(config)
    }
}

fn input_error(message: impl Into<String>) -> PipelineError {
    PipelineError::input(message.into())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input() {
                ExitCode::from(2)
            } else if e.is_endpoint() {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Generate(args) => {
            let config = args.build_config()?;
            let outcome = pipeline::generate(&config)?;
            for v in &outcome.variations {
                let status = if v.kept {
                    format!("kept (rank {})", v.rank.unwrap())
                } else if !v.heuristic_gate {
                    "filtered: heuristic regression".to_string()
                } else if !v.diverse {
                    "filtered: not diverse enough".to_string()
                } else {
                    "filtered: judge".to_string()
                };
                println!(
                    "variation_{}: {} edits, overall_chosen={}, {}",
                    v.index,
                    v.edits.len(),
                    v.heuristics.overall_chosen(),
                    status
                );
            }
            for f in &outcome.failures {
                println!("variation_{}: failed at {}: {}", f.index, f.stage, f.error);
            }
            println!(
                "kept {} of {} variation(s); manifest at {}",
                outcome.kept.len(),
                config.variations,
                outcome.report_path.display()
            );
            if outcome.endpoint_failures > 0 {
                return Err(PipelineError::endpoint_failure(format!(
                    "{} endpoint failure(s) during the run",
                    outcome.endpoint_failures
                )));
            }
            Ok(())
        }
        Command::Evaluate { corpus, labels, out } => {
            let table = pipeline::evaluate(&corpus, labels.as_deref(), out.as_deref())?;
            print!("{table}");
            if let Some(path) = out {
                println!("csv written to {}", path.display());
            }
            Ok(())
        }
        Command::JudgeEval { log, human } => {
            let (matrix, up_rate) = pipeline::judge_eval(&log, &human)?;
            print!("{matrix}");
            println!(
                "total {} | human thumbs-up rate {:.1}%",
                matrix.total(),
                up_rate
            );
            Ok(())
        }
    }
}
