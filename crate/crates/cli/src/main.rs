use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mmvnmf_cli::{
    cmd_compare, cmd_metrics, cmd_run, cmd_synth, error_line, group_views, parse_view_flag, CompareArgs, RunArgs,
    SynthArgs,
};

/// Multi-modal multi-view collaborative NMF clustering.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the local phase and collaboration, then report per-view purity
    /// and silhouette before and after.
    Run {
        /// Experiment manifest (TOML).
        manifest: PathBuf,
        /// Overrides the manifest's solver seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path (JSON). The metrics CSV is written next to it.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// Re-optimize collaboration weights after every round.
        #[arg(long)]
        refresh_weights: bool,
        /// Also write per-view 2-D PCA projections with final cluster ids.
        #[arg(long)]
        projections: bool,
    },
    /// Compare local-only, multi-view-only and full multi-modal
    /// collaboration on the same data and seeds.
    Compare {
        /// Experiment manifest (TOML) with at least two modalities.
        manifest: PathBuf,
        /// Overrides the manifest's solver seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Comparison path (JSON). A side-by-side CSV is written next to it.
        #[arg(long, default_value = "comparison.json")]
        out: PathBuf,
    },
    /// Generate a seeded synthetic multi-modal dataset and its manifest.
    Synth {
        /// Number of objects N.
        #[arg(long)]
        objects: usize,
        /// Number of clusters K.
        #[arg(long)]
        clusters: usize,
        /// One view as MODALITY:VIEW:DIM:DISPERSION[:NOISE]; repeat for
        /// each view. Views sharing MODALITY form one modality.
        #[arg(long = "view", required = true, value_parser = parse_view_arg)]
        views: Vec<(String, mmvnmf::data::ViewSpec)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Purity and silhouette of an existing assignment, printed as JSON.
    Metrics {
        /// Data matrix CSV, one object per column.
        matrix: PathBuf,
        /// Cluster id per object, one per line.
        clusters: PathBuf,
        /// Ground-truth class per object, one per line.
        labels: PathBuf,
    },
}

fn parse_view_arg(s: &str) -> Result<(String, mmvnmf::data::ViewSpec), String> {
    parse_view_flag(s).map_err(|e| e.to_string())
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn execute(cli: Cli) -> mmvnmf::Result<()> {
    match cli.command {
        Command::Run {
            manifest,
            seed,
            out,
            refresh_weights,
            projections,
        } => {
            let (_, written) = cmd_run(&RunArgs {
                manifest,
                seed,
                out,
                refresh_weights,
                projections,
            })?;
            print_written(&written);
        }
        Command::Compare { manifest, seed, out } => {
            let (_, written) = cmd_compare(&CompareArgs { manifest, seed, out })?;
            print_written(&written);
        }
        Command::Synth {
            objects,
            clusters,
            views,
            seed,
            out_dir,
        } => {
            let written = cmd_synth(&SynthArgs {
                n_objects: objects,
                k: clusters,
                modalities: group_views(views),
                seed,
                out_dir,
            })?;
            print_written(&written);
        }
        Command::Metrics {
            matrix,
            clusters,
            labels,
        } => {
            let report = cmd_metrics(&matrix, &clusters, &labels)?;
            println!("{}", serde_json::to_string(&report).expect("metrics serialize"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
