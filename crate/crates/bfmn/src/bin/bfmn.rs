//! Command-line front end; every subcommand is a thin wrapper over
//! `bfmn::pipeline`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bfmn::pipeline::{
    cmd_analyze, cmd_concreteness, cmd_emotions, cmd_features, cmd_ingest, cmd_jaccard,
    cmd_render, cmd_simulate, GroupKey, RunConfig,
};
use bfmn::twin::Education;

#[derive(Parser)]
#[command(
    name = "bfmn",
    version,
    about = "Behavioural forma mentis networks: build, analyze, simulate, render"
)]
struct Cli {
    /// run configuration file (TOML)
    #[arg(short, long, global = true, default_value = "bfmn.toml")]
    config: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, clean and subgroup the configured dataset
    Ingest,
    /// Full analysis bundle for one group and a set of target words
    Analyze {
        #[arg(long)]
        group: String,
        /// comma-separated target words
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        /// seed for all resampling (required for reproducibility)
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate digital-twin participants via the configured endpoint
    Simulate {
        /// number of twins to generate
        #[arg(long)]
        n: usize,
        /// education target: highschool, psychology or physics
        #[arg(long)]
        education: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVGs from an analysis bundle
    Render {
        #[arg(long)]
        bundle: PathBuf,
        /// log-scale the Jaccard bar chart
        #[arg(long)]
        log_scale: bool,
    },
    /// Whole-network features for one group (JSON to stdout)
    Features {
        #[arg(long)]
        group: String,
    },
    /// Pairwise frame overlap for target words (TSV to stdout)
    Jaccard {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
    },
    /// Frame concreteness report (TSV to stdout)
    Concreteness {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        #[arg(long)]
        seed: u64,
    },
    /// Frame emotion profiles (JSON to stdout)
    Emotions {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',')]
        targets: Vec<String>,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
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

fn run(cli: Cli) -> bfmn::Result<()> {
    let config = RunConfig::load(&cli.config)?;
    match cli.command {
        Command::Ingest => {
            let report = cmd_ingest(&config)?;
            for (tag, sample) in &report.samples {
                let sub = sample
                    .subgroups
                    .as_ref()
                    .map(|s| format!(" (low {}, high {}, excluded {})", s.low, s.high, s.excluded))
                    .unwrap_or_default();
                println!(
                    "{tag}: {} participants kept, {} dropped{sub}",
                    sample.participants_kept, sample.participants_dropped
                );
            }
            println!(
                "{} row diagnostics; report written to {}",
                report.diagnostics.len(),
                config.paths.output_dir.join("ingest_report.json").display()
            );
        }
        Command::Analyze {
            group,
            targets,
            seed,
            out_dir,
        } => {
            let group: GroupKey = group.parse()?;
            let outcome = cmd_analyze(&config, &group, &targets, seed, out_dir)?;
            for t in &outcome.skipped {
                eprintln!("notice: target `{t}` not in group vocabulary, skipped");
            }
            println!(
                "analyzed {} targets into {}",
                outcome.analyzed.len(),
                outcome.bundle_dir.display()
            );
        }
        Command::Simulate {
            n,
            education,
            seed,
            out,
        } => {
            let education: Education = education.parse()?;
            let outcome = cmd_simulate(&config, n, education, seed, out)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{} participants written to {}",
                outcome.participants,
                outcome.csv_path.display()
            );
            if let Some(mas) = &outcome.mas_csv_path {
                println!("questionnaire written to {}", mas.display());
            }
        }
        Command::Render { bundle, log_scale } => {
            let outcome = cmd_render(&config, &bundle, log_scale)?;
            println!(
                "{} figures written to {}",
                outcome.files.len(),
                outcome.svg_dir.display()
            );
        }
        Command::Features { group } => {
            let features = cmd_features(&config, &group.parse()?)?;
            println!("{}", serde_json::to_string_pretty(&features)?);
        }
        Command::Jaccard { group, targets } => {
            let overlaps = cmd_jaccard(&config, &group.parse()?, &targets)?;
            println!("target_a\ttarget_b\tjaccard");
            for ((a, b), j) in overlaps {
                println!("{a}\t{b}\t{j}");
            }
        }
        Command::Concreteness {
            group,
            targets,
            seed,
        } => {
            let rows = cmd_concreteness(&config, &group.parse()?, &targets, seed)?;
            print!("{}", bfmn::concreteness::concreteness_report(&rows));
        }
        Command::Emotions {
            group,
            targets,
            seed,
        } => {
            let profiles = cmd_emotions(&config, &group.parse()?, &targets, seed)?;
            let mut map = serde_json::Map::new();
            for (target, profile) in profiles {
                map.insert(target, profile.to_json());
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(map))?
            );
        }
    }
    Ok(())
}
