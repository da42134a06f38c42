//! The four subcommands behind the `flexion` binary.
//!
//! Each command loads and validates its inputs (exit 1 on failure), computes
//! everything up front, and only then starts writing — so a failed run never
//! leaves partial outputs behind. The JSON record carrying the full resolved
//! configuration is written unconditionally; [`Format`] selects the optional
//! CSV views and per-variant detail files around it.

use std::path::PathBuf;

use flexion_core::accel::AcceleratorSpec;
use flexion_core::cost::Objective;
use flexion_core::dse::{assemble, CellTask, SearchSettings, DEFAULT_SEARCH_CAP};
use flexion_core::ga::GaConfig;
use flexion_core::mapspace::{stats, venn_report, VennReport, DEFAULT_COUNT_CAP};
use flexion_core::overhead::overhead;

use crate::driver::{resolve_jobs, run_cells};
use crate::error::CliError;
use crate::load::{self, default_cost_table, load_accel, load_experiment, load_model};
use crate::output::{ensure_dir, write_atomic, write_json};
use crate::records::{
    ExperimentFile, FlexionRecord, LayerFlexion, MatricesFile, MseRecord, ResultFile, RunTotals,
    VariantFile, SCHEMA_VERSION,
};
use crate::tables;

/// Which artifact families a command writes. The JSON record carrying the
/// resolved configuration is always written; this selects the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// JSON records and detail files, no CSV views.
    Json,
    /// JSON record plus CSV views, no per-variant detail files.
    Csv,
    /// Everything.
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn detail_json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Replaces characters that could not appear in a file name.
fn safe_name(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '@') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Inputs of the `flexion` counting command.
#[derive(Debug, Clone)]
pub struct FlexionArgs {
    pub model: PathBuf,
    pub accel: PathBuf,
    pub out: PathBuf,
    pub format: Format,
}

/// Counts workload, supported and potential mapping choices per layer and
/// writes `flexion.json` (plus `flexion.csv` and `venn.csv`).
pub fn cmd_flexion(args: &FlexionArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let accel = load_accel(&args.accel)?;
    let layers: Vec<LayerFlexion> = model
        .layers
        .iter()
        .map(|layer| LayerFlexion {
            layer: layer.name.clone(),
            stats: stats(layer, &accel, DEFAULT_COUNT_CAP),
            venn: venn_report(layer, &accel),
        })
        .collect();
    let record = FlexionRecord {
        schema_version: SCHEMA_VERSION,
        model,
        accel,
        layers,
    };
    ensure_dir(&args.out)?;
    write_json(&args.out.join("flexion.json"), &record)?;
    if args.format.csv() {
        write_atomic(&args.out.join("flexion.csv"), &tables::flexion_csv(&record))?;
        let venn_rows: Vec<(String, String, String, VennReport)> = record
            .layers
            .iter()
            .map(|lf| {
                (
                    record.accel.name.clone(),
                    record.model.name.clone(),
                    lf.layer.clone(),
                    lf.venn,
                )
            })
            .collect();
        write_atomic(&args.out.join("venn.csv"), &tables::venn_csv(&venn_rows))?;
    }
    Ok(())
}

/// Inputs of the `mse` search command.
#[derive(Debug, Clone)]
pub struct MseArgs {
    pub model: PathBuf,
    pub accel: PathBuf,
    pub objective: Objective,
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
    pub format: Format,
}

/// Searches the best mapping of every layer of one model on one accelerator
/// and writes `mse.json` (plus `mse.csv`).
pub fn cmd_mse(args: &MseArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let accel = load_accel(&args.accel)?;
    let settings = SearchSettings {
        objective: args.objective,
        energy: Default::default(),
        ga: GaConfig::default(),
        exhaustive_cap: DEFAULT_SEARCH_CAP,
        seed: args.seed,
        cost_table: default_cost_table()?,
    };
    // One cell per layer; the stream index mirrors the experiment driver's
    // task numbering so seeds derive the same way everywhere.
    let tasks: Vec<CellTask> = model
        .layers
        .iter()
        .enumerate()
        .map(|(i, layer)| CellTask {
            accel: accel.clone(),
            model: model.name.clone(),
            layer: layer.clone(),
            sweep: None,
            stream: i as u64,
        })
        .collect();
    let cells = run_cells(&tasks, &settings, resolve_jobs(args.jobs));
    let record = MseRecord {
        schema_version: SCHEMA_VERSION,
        overhead: overhead(&accel, &settings.cost_table),
        totals: RunTotals::from_cells(&cells),
        model,
        accel,
        settings,
        cells,
    };
    ensure_dir(&args.out)?;
    write_json(&args.out.join("mse.json"), &record)?;
    if args.format.csv() {
        write_atomic(&args.out.join("mse.csv"), &tables::cells_csv(&record.cells))?;
    }
    Ok(())
}

/// Inputs of the `dse` experiment command.
#[derive(Debug, Clone)]
pub struct DseArgs {
    pub experiment: PathBuf,
    /// Overrides the experiment's objective when given.
    pub objective: Option<Objective>,
    /// Overrides the experiment's seed when given.
    pub seed: Option<u64>,
    pub jobs: usize,
    /// Result directory; defaults to `<experiment name>-results`.
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn variant_specs(tasks: &[CellTask]) -> Vec<&AcceleratorSpec> {
    let mut out: Vec<&AcceleratorSpec> = Vec::new();
    for t in tasks {
        if !out.iter().any(|a| a.name == t.accel.name) {
            out.push(&t.accel);
        }
    }
    out
}

/// Runs an experiment file and fills a result directory: `experiment.json`
/// and `result.json` always, per-variant JSON files and the CSV views
/// (`cells.csv`, `totals.csv`, `summaries.csv`, `venn.csv`) per [`Format`].
pub fn cmd_dse(args: &DseArgs) -> Result<(), CliError> {
    let mut exp = load_experiment(&args.experiment)?;
    if let Some(seed) = args.seed {
        exp.seed = seed;
    }
    if let Some(objective) = args.objective {
        exp.objective = objective;
    }
    let prepared = exp
        .prepare()
        .map_err(|e| CliError::Invalid(format!("{}: {e}", args.experiment.display())))?;
    let cells = run_cells(&prepared.tasks, &prepared.settings, resolve_jobs(args.jobs));
    let result = assemble(&exp, prepared.design.clone(), cells);

    let out = match &args.out {
        Some(dir) => dir.clone(),
        None => PathBuf::from(format!("{}-results", safe_name(&exp.name))),
    };
    ensure_dir(&out)?;
    write_json(
        &out.join("experiment.json"),
        &ExperimentFile {
            schema_version: SCHEMA_VERSION,
            experiment: exp.clone(),
        },
    )?;
    write_json(
        &out.join("result.json"),
        &ResultFile {
            schema_version: SCHEMA_VERSION,
            result: result.clone(),
        },
    )?;

    if args.format.detail_json() {
        let dir = out.join("variants");
        ensure_dir(&dir)?;
        for spec in variant_specs(&prepared.tasks) {
            let file = VariantFile {
                schema_version: SCHEMA_VERSION,
                overhead: overhead(spec, &exp.cost_table),
                cells: result
                    .cells
                    .iter()
                    .filter(|c| c.accel == spec.name)
                    .cloned()
                    .collect(),
                totals: result
                    .totals
                    .iter()
                    .filter(|t| t.accel == spec.name)
                    .cloned()
                    .collect(),
                accel: spec.clone(),
            };
            write_json(&dir.join(format!("{}.json", safe_name(&spec.name))), &file)?;
        }
    }
    if args.format.csv() {
        write_atomic(&out.join("cells.csv"), &tables::cells_csv(&result.cells))?;
        write_atomic(&out.join("totals.csv"), &tables::totals_csv(&result.totals))?;
        write_atomic(
            &out.join("summaries.csv"),
            &tables::summaries_csv(&result.summaries),
        )?;
        let venn_rows: Vec<(String, String, String, VennReport)> = prepared
            .tasks
            .iter()
            .map(|t| {
                (
                    t.accel.name.clone(),
                    t.model.clone(),
                    t.layer.name.clone(),
                    venn_report(&t.layer, &t.accel),
                )
            })
            .collect();
        write_atomic(&out.join("venn.csv"), &tables::venn_csv(&venn_rows))?;
    }
    Ok(())
}

/// Inputs of the `report` rendering command.
#[derive(Debug, Clone)]
pub struct ReportArgs {
    /// A result directory previously written by `dse`.
    pub result_dir: PathBuf,
    /// Output directory; defaults to the result directory itself.
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Re-reads a result directory and renders the normalized model-by-variant
/// matrices, one CSV per metric with a geometric-mean row appended.
pub fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let path = args.result_dir.join("result.json");
    let file: ResultFile = load::parse(&path, &load::read(&path)?)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Invalid(format!(
            "{}: written with schema v{}, this binary reads v{}",
            path.display(),
            file.schema_version,
            SCHEMA_VERSION
        )));
    }
    let matrices = tables::normalized_matrices(&file.result);
    let out = args.out.clone().unwrap_or_else(|| args.result_dir.clone());
    ensure_dir(&out)?;
    if args.format.detail_json() {
        write_json(
            &out.join("matrices.json"),
            &MatricesFile {
                schema_version: SCHEMA_VERSION,
                experiment: file.result.name.clone(),
                matrices: matrices.clone(),
            },
        )?;
    }
    if args.format.csv() {
        for matrix in &matrices {
            write_atomic(
                &out.join(format!("{}_matrix.csv", matrix.metric)),
                &tables::matrix_csv(matrix),
            )?;
        }
    }
    Ok(())
}
