//! Experiment runner behind the `mmvnmf` binary: `run`, `compare`, `synth`
//! and `metrics`. Every command is a plain function so tests can drive
//! them without spawning processes.

pub mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mmvnmf::collab::{
    collaborate, local_phase, CollaborationMode, CollaborationOptions, ComponentTrace, ModalityTree, ViewId,
};
use mmvnmf::data::{
    load_labels, read_matrix, save_labels, save_matrix, synth_multimodal, write_atomic, CollaborationSection,
    ExperimentManifest, LoadedExperiment, ModalityEntry, ModalitySpec, Pca, Preprocess, SolverSection, ViewEntry,
    ViewSpec,
};
use mmvnmf::metrics::{purity, LabeledAssignment};
use mmvnmf::nmf::hard_assign;
use mmvnmf::{Error, Result};
use serde::Serialize;

use report::{
    qualified_name, silhouette_or_reason, weight_rows, ComparisonReport, ComparisonRow, ComponentReport, ConfigEcho,
    ExperimentReport, ViewMetrics, ViewReport, WeightReport,
};

/// Short machine-readable category for an error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ShapeMismatch { .. } | Error::DataLength { .. } => "shape",
        Error::NonFinite { .. } => "non_finite",
        Error::Config(_) => "config",
        Error::Validation(_) => "validation",
        Error::Parse { .. } => "parse",
        Error::MissingWeight { .. } => "missing_weight",
        Error::UndefinedSilhouette(_) => "undefined_silhouette",
        Error::Io { .. } => "io",
    }
}

/// The single JSON line printed on failure.
pub fn error_line(e: &Error) -> String {
    serde_json::json!({ "error": { "kind": error_kind(e), "message": e.to_string() } }).to_string()
}

fn require_labels(exp: &LoadedExperiment) -> Result<&[usize]> {
    exp.labels.as_deref().ok_or_else(|| {
        Error::Validation("manifest has no labels_path; purity needs ground-truth labels".into())
    })
}

/// Where each view sits inside the sub-tree of the component it belongs to.
fn component_positions(tree: &ModalityTree, traces: &[ComponentTrace]) -> BTreeMap<ViewId, (usize, usize)> {
    let mut out = BTreeMap::new();
    for (c, trace) in traces.iter().enumerate() {
        let mut pos = 0;
        for &p in &trace.modalities {
            for v in 0..tree.modalities()[p].views.len() {
                out.insert(ViewId::new(p, v), (c, pos));
                pos += 1;
            }
        }
    }
    out
}

/// Local phase, collaboration and per-view metrics for a loaded experiment.
pub fn run_experiment(exp: &LoadedExperiment, refresh_weights: bool) -> Result<ExperimentReport> {
    execute(exp, refresh_weights).map(|(report, _)| report)
}

fn execute(exp: &LoadedExperiment, refresh_weights: bool) -> Result<(ExperimentReport, ModalityTree)> {
    let started = Instant::now();
    let labels = require_labels(exp)?;
    let refresh = refresh_weights || exp.manifest.collaboration.refresh_weights;
    let mode = if exp.manifest.collaboration.enabled {
        CollaborationMode::Full
    } else {
        CollaborationMode::Disabled
    };
    let cfg = &exp.config;
    let (local_tree, fits) = local_phase(&exp.data, cfg)?;
    let (tree, traces, initial, last) =
        collaborate(&local_tree, cfg, &CollaborationOptions::new(mode).with_refresh(refresh))?;

    let positions = component_positions(&tree, &traces);
    let mut views = Vec::new();
    for (id, fit) in tree.view_ids().into_iter().zip(&fits) {
        let collaboration_trace = match positions.get(&id) {
            Some(&(c, pos)) => traces[c].rounds.iter().map(|r| r.local_objectives[pos]).collect(),
            None => Vec::new(),
        };
        views.push(ViewReport {
            id,
            modality: tree.modalities()[id.modality].name.clone(),
            view: tree.view(id).name.clone(),
            local: ViewMetrics::of_view(&local_tree, id, labels)?,
            post: ViewMetrics::of_view(&tree, id, labels)?,
            local_trace: fit.trace.clone(),
            local_converged: fit.converged,
            local_restart: fit.restart,
            collaboration_trace,
        });
    }
    let report = ExperimentReport {
        name: exp.manifest.name.clone(),
        seed: cfg.seed,
        mode,
        config: ConfigEcho {
            manifest: exp.manifest.clone(),
            solver: cfg.clone(),
            refresh_weights: refresh,
        },
        views,
        components: traces.iter().map(|t| ComponentReport::new(t, &tree)).collect(),
        weights: WeightReport {
            initial: weight_rows(&initial, &tree),
            last: weight_rows(&last, &tree),
        },
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((report, tree))
}

/// Local-only, multi-view-only and full collaboration from one shared
/// local phase.
pub fn compare_experiment(exp: &LoadedExperiment) -> Result<ComparisonReport> {
    let started = Instant::now();
    if exp.data.modalities.len() < 2 {
        return Err(Error::Config(format!(
            "compare needs at least 2 modalities, manifest has {}",
            exp.data.modalities.len()
        )));
    }
    let labels = require_labels(exp)?;
    let refresh = exp.manifest.collaboration.refresh_weights;
    let cfg = &exp.config;
    let (local_tree, _) = local_phase(&exp.data, cfg)?;
    let (mv_tree, mv_traces, _, _) = collaborate(
        &local_tree,
        cfg,
        &CollaborationOptions::new(CollaborationMode::MultiViewOnly).with_refresh(refresh),
    )?;
    let (full_tree, full_traces, _, _) = collaborate(
        &local_tree,
        cfg,
        &CollaborationOptions::new(CollaborationMode::Full).with_refresh(refresh),
    )?;

    let views = local_tree
        .view_ids()
        .into_iter()
        .map(|id| {
            Ok(ComparisonRow {
                id,
                modality: local_tree.modalities()[id.modality].name.clone(),
                view: local_tree.view(id).name.clone(),
                local: ViewMetrics::of_view(&local_tree, id, labels)?,
                multi_view: ViewMetrics::of_view(&mv_tree, id, labels)?,
                full: ViewMetrics::of_view(&full_tree, id, labels)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        name: exp.manifest.name.clone(),
        seed: cfg.seed,
        config: ConfigEcho {
            manifest: exp.manifest.clone(),
            solver: cfg.clone(),
            refresh_weights: refresh,
        },
        views,
        multi_view_components: mv_traces.iter().map(|t| ComponentReport::new(t, &mv_tree)).collect(),
        full_components: full_traces.iter().map(|t| ComponentReport::new(t, &full_tree)).collect(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// `report.json` → `report.csv`, `report.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Files written by a command, in write order.
pub type Written = Vec<PathBuf>;

#[derive(Debug, Clone)]
pub struct RunArgs {
    pub manifest: PathBuf,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub refresh_weights: bool,
    pub projections: bool,
}

pub fn cmd_run(args: &RunArgs) -> Result<(ExperimentReport, Written)> {
    let exp = LoadedExperiment::load(&args.manifest, args.seed)?;
    let (report, tree) = execute(&exp, args.refresh_weights)?;
    let mut written = Vec::new();
    write_atomic(&args.out, report.to_json().as_bytes())?;
    written.push(args.out.clone());
    let csv = sibling(&args.out, "csv");
    write_atomic(&csv, report.to_csv().as_bytes())?;
    written.push(csv);
    if args.projections {
        written.extend(write_projections(&tree, &args.out)?);
    }
    Ok((report, written))
}

/// First two principal components of each view plus its post-collaboration
/// cluster, one CSV per view.
fn write_projections(tree: &ModalityTree, out: &Path) -> Result<Written> {
    let mut written = Vec::new();
    for id in tree.view_ids() {
        let view = tree.view(id);
        let (m, n) = view.x.shape();
        let dims = 2.min(m).min(n);
        let scores = Pca::fit(&view.x, dims)?.project(&view.x)?;
        let clusters = hard_assign(&view.factors.g);
        let mut text = String::from("pc1,pc2,cluster\n");
        for (j, cluster) in clusters.iter().enumerate() {
            let pc2 = if dims > 1 { scores.get(1, j) } else { 0.0 };
            text.push_str(&format!("{},{},{}\n", scores.get(0, j), pc2, cluster));
        }
        let name = qualified_name(tree, id).replace('/', ".");
        let path = sibling(out, &format!("{name}.projection.csv"));
        write_atomic(&path, text.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct CompareArgs {
    pub manifest: PathBuf,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(ComparisonReport, Written)> {
    let exp = LoadedExperiment::load(&args.manifest, args.seed)?;
    let report = compare_experiment(&exp)?;
    write_atomic(&args.out, report.to_json().as_bytes())?;
    let csv = sibling(&args.out, "csv");
    write_atomic(&csv, report.to_csv().as_bytes())?;
    Ok((report, vec![args.out.clone(), csv]))
}

/// Parses `MODALITY:VIEW:DIM:DISPERSION[:NOISE]`.
pub fn parse_view_flag(s: &str) -> Result<(String, ViewSpec)> {
    let bad = |why: &str| Error::Config(format!("invalid view spec '{s}': {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(bad("expected MODALITY:VIEW:DIM:DISPERSION[:NOISE]"));
    }
    for name in &parts[..2] {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(bad("names may only use letters, digits, '_' and '-'"));
        }
    }
    let dim: usize = parts[2].parse().map_err(|_| bad("DIM must be a positive integer"))?;
    let dispersion: f64 = parts[3].parse().map_err(|_| bad("DISPERSION must be a number"))?;
    let mut view = ViewSpec::new(parts[1], dim, dispersion);
    if let Some(noise) = parts.get(4) {
        view = view.with_noise(noise.parse().map_err(|_| bad("NOISE must be a number"))?);
    }
    Ok((parts[0].to_string(), view))
}

/// Groups views by modality, keeping first-appearance order.
pub fn group_views(views: Vec<(String, ViewSpec)>) -> Vec<ModalitySpec> {
    let mut out: Vec<ModalitySpec> = Vec::new();
    for (modality, view) in views {
        match out.iter_mut().find(|m| m.name == modality) {
            Some(m) => m.views.push(view),
            None => out.push(ModalitySpec::new(modality, vec![view])),
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SynthArgs {
    pub n_objects: usize,
    pub k: usize,
    pub modalities: Vec<ModalitySpec>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

pub const SYNTH_MANIFEST: &str = "manifest.toml";
pub const SYNTH_LABELS: &str = "labels.txt";

/// Generates a dataset and a manifest that runs it. Returns the manifest
/// path first.
pub fn cmd_synth(args: &SynthArgs) -> Result<Written> {
    let mut seen = std::collections::BTreeSet::new();
    for m in &args.modalities {
        for v in &m.views {
            if !seen.insert((m.name.as_str(), v.name.as_str())) {
                return Err(Error::Config(format!("duplicate view '{}/{}'", m.name, v.name)));
            }
        }
    }
    let ds = synth_multimodal(args.n_objects, args.k, &args.modalities, args.seed)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::Io {
        path: args.out_dir.clone(),
        source: e,
    })?;

    let mut written = Vec::new();
    let mut modalities = Vec::new();
    for (p, m) in args.modalities.iter().enumerate() {
        let mut views = Vec::new();
        for (v, spec) in m.views.iter().enumerate() {
            let file = format!("{}-{}.csv", m.name, spec.name);
            let path = args.out_dir.join(&file);
            save_matrix(&path, &ds.data.view(ViewId::new(p, v)).x)?;
            written.push(path);
            views.push(ViewEntry {
                name: spec.name.clone(),
                matrix_path: file.into(),
                preprocess: Preprocess::None,
                noise: None,
                seed: None,
            });
        }
        modalities.push(ModalityEntry {
            name: m.name.clone(),
            views,
        });
    }
    let labels = args.out_dir.join(SYNTH_LABELS);
    save_labels(&labels, &ds.labels)?;
    written.push(labels);

    let manifest = ExperimentManifest {
        name: "synthetic".into(),
        k: args.k,
        modalities,
        labels_path: Some(SYNTH_LABELS.into()),
        solver: SolverSection {
            seed: args.seed,
            ..SolverSection::default()
        },
        collaboration: CollaborationSection::default(),
    };
    let path = args.out_dir.join(SYNTH_MANIFEST);
    write_atomic(&path, manifest.to_toml().as_bytes())?;
    written.insert(0, path);
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n_objects: usize,
    pub purity: f64,
    pub silhouette: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub silhouette_error: Option<String>,
}

/// Purity and silhouette of an externally produced assignment. The matrix
/// holds one object per column.
pub fn cmd_metrics(matrix: &Path, clusters: &Path, labels: &Path) -> Result<MetricsReport> {
    let x = read_matrix(matrix)?;
    let clusters = load_labels(clusters)?;
    let labels = load_labels(labels)?;
    if clusters.len() != x.cols() || labels.len() != x.cols() {
        return Err(Error::Validation(format!(
            "length mismatch: matrix has {} objects, clusters {}, labels {}",
            x.cols(),
            clusters.len(),
            labels.len()
        )));
    }
    let (silhouette, silhouette_error) = silhouette_or_reason(&x, &clusters)?;
    Ok(MetricsReport {
        n_objects: x.cols(),
        purity: purity(&LabeledAssignment::new(labels, clusters)?)?,
        silhouette,
        silhouette_error,
    })
}
