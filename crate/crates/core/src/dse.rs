//! Experiments over accelerators and workloads.
//!
//! An [`Experiment`] is pure data: workloads, accelerator variants, an
//! objective, a search budget, and a kind that says how variants are derived
//! (given directly, swept over buffer sizes or array sizes, generated from
//! flexibility classes, or designed first and then confronted with future
//! workloads). [`Experiment::prepare`] expands it into independent
//! per-(accelerator, layer) [`CellTask`]s so hosts can fan cells out across
//! threads; [`run`] is the sequential driver with identical results.
//!
//! Per cell, the search runs exhaustively whenever the feasible space is at
//! most `exhaustive_cap` points and falls back to the genetic search above
//! that, recording which mode produced each number. Every random decision
//! derives from the experiment seed, so reruns reproduce results exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::accel::{AccelError, AcceleratorSpec, FlexClass};
use crate::cost::{evaluate, CostReport, EnergyParams, Objective};
use crate::ga::{ga_best, run_integer_ga, GaConfig, GaConfigError};
use crate::mapping::{clamp_to_layer, footprint, is_legal, Mapping};
use crate::mapspace::{
    all_orders, canonical_shapes, ordered_pairs, stats, MapSpaceStats, SearchDomains,
    DEFAULT_COUNT_CAP,
};
use crate::oracle::exhaustive_best;
use crate::overhead::{overhead, FeatureCostTable, OverheadReport};
use crate::seed;
use crate::workload::{divisors, Dim, DimVals, Layer, Model, ModelError};

/// Feasible-space size up to which cells are searched exhaustively.
pub const DEFAULT_SEARCH_CAP: u64 = 100_000;

/// Seed stream reserved for the design-time search, distinct from every
/// cell's stream (cells use their task index).
const DESIGN_STREAM: u64 = u64::MAX;

fn default_search_cap() -> u64 {
    DEFAULT_SEARCH_CAP
}

/// How an experiment derives the accelerator variants it compares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentKind {
    /// Compare the given accelerators as-is. The first is the rigid
    /// reference; all must share resources so differences isolate
    /// configurability.
    AxisIsolation,
    /// One accelerator, re-instantiated at each buffer size.
    BufferSweep { sizes: Vec<u64> },
    /// One accelerator, re-instantiated at each PE count with a re-derived
    /// (near-square) baseline array shape.
    ArraySweep { pe_counts: Vec<u64> },
    /// One accelerator, re-instantiated in each flexibility class.
    ClassSweep { classes: Vec<FlexClass> },
    /// Design the baseline configuration against `design_model` first, then
    /// evaluate one variant per class — the first class is the reference —
    /// on the experiment's (future) models.
    FutureProof {
        design_model: Model,
        classes: Vec<FlexClass>,
    },
}

impl ExperimentKind {
    /// Stable lower-case tag for file names and reports.
    pub fn tag(&self) -> &'static str {
        match self {
            ExperimentKind::AxisIsolation => "axis_isolation",
            ExperimentKind::BufferSweep { .. } => "buffer_sweep",
            ExperimentKind::ArraySweep { .. } => "array_sweep",
            ExperimentKind::ClassSweep { .. } => "class_sweep",
            ExperimentKind::FutureProof { .. } => "future_proof",
        }
    }
}

/// A complete experiment description; see [`ExperimentKind`] for semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub kind: ExperimentKind,
    /// Workloads to map (for `future_proof`: the future workloads).
    pub models: Vec<Model>,
    /// Accelerators under test (one entry for every kind except
    /// `axis_isolation`, which lists the whole family).
    pub accels: Vec<AcceleratorSpec>,
    pub objective: Objective,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ga: GaConfig,
    /// Feasible-space size up to which cells run exhaustively.
    #[serde(default = "default_search_cap")]
    pub exhaustive_cap: u64,
    #[serde(default)]
    pub energy: EnergyParams,
    /// Prices for configurability features. Every cell's energy folds in the
    /// variant's per-access adder, so flexible machines pay for their muxes.
    #[serde(default)]
    pub cost_table: FeatureCostTable,
}

/// Why an [`Experiment`] cannot run.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    EmptyName,
    NoModels,
    NoAccels,
    DuplicateModel { name: String },
    DuplicateAccel { name: String },
    BadModel { name: String, source: ModelError },
    BadAccel { name: String, source: AccelError },
    BadGa(GaConfigError),
    BadEnergy,
    BadCostTable,
    ZeroCap,
    /// `axis_isolation` needs at least a reference and one variant.
    NeedsFamily,
    /// The first `axis_isolation` accelerator must have every axis fixed.
    ReferenceNotRigid,
    /// All `axis_isolation` accelerators must share resources.
    MixedResources { name: String },
    /// Sweeps and class/future kinds take exactly one accelerator.
    SingleAccelRequired,
    /// A sweep grid must be nonempty and strictly increasing.
    BadGrid,
    /// A class list must be nonempty and free of duplicates.
    BadClasses,
    /// A derived variant failed validation.
    BadVariant { name: String, source: AccelError },
}

impl core::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExperimentError::EmptyName => f.write_str("experiment name must not be empty"),
            ExperimentError::NoModels => f.write_str("experiment needs at least one model"),
            ExperimentError::NoAccels => f.write_str("experiment needs at least one accelerator"),
            ExperimentError::DuplicateModel { name } => write!(f, "duplicate model name {name:?}"),
            ExperimentError::DuplicateAccel { name } => {
                write!(f, "duplicate accelerator name {name:?}")
            }
            ExperimentError::BadModel { name, source } => write!(f, "model {name:?}: {source}"),
            ExperimentError::BadAccel { name, source } => {
                write!(f, "accelerator {name:?}: {source}")
            }
            ExperimentError::BadGa(e) => write!(f, "search parameters: {e}"),
            ExperimentError::BadEnergy => f.write_str("energy parameters must be finite and non-negative"),
            ExperimentError::BadCostTable => {
                f.write_str("feature costs must be finite and non-negative")
            }
            ExperimentError::ZeroCap => f.write_str("exhaustive_cap must be at least 1"),
            ExperimentError::NeedsFamily => {
                f.write_str("axis_isolation needs a reference and at least one variant")
            }
            ExperimentError::ReferenceNotRigid => {
                f.write_str("the first axis_isolation accelerator must have every axis fixed")
            }
            ExperimentError::MixedResources { name } => {
                write!(f, "accelerator {name:?} does not share the reference's resources")
            }
            ExperimentError::SingleAccelRequired => {
                f.write_str("this experiment kind takes exactly one accelerator")
            }
            ExperimentError::BadGrid => {
                f.write_str("sweep grid must be nonempty and strictly increasing")
            }
            ExperimentError::BadClasses => {
                f.write_str("class list must be nonempty and free of duplicates")
            }
            ExperimentError::BadVariant { name, source } => {
                write!(f, "derived variant {name:?}: {source}")
            }
        }
    }
}

/// Search configuration shared by every cell of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub objective: Objective,
    /// Base energy prices; each cell adds its variant's per-access adder.
    pub energy: EnergyParams,
    pub ga: GaConfig,
    pub exhaustive_cap: u64,
    pub seed: u64,
    pub cost_table: FeatureCostTable,
}

impl SearchSettings {
    /// Energy prices for one variant: the base prices plus that machine's
    /// configurability adder on every buffer access.
    pub fn energy_for(&self, accel: &AcceleratorSpec) -> EnergyParams {
        self.energy
            .with_access_adder(overhead(accel, &self.cost_table).energy_adder_per_access)
    }
}

/// Which search produced a cell's numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Genetic,
}

/// One independent unit of work: find the best mapping of one layer on one
/// accelerator variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTask {
    pub accel: AcceleratorSpec,
    pub model: String,
    pub layer: Layer,
    /// The swept quantity (buffer size or PE count) for sweep kinds.
    pub sweep: Option<u64>,
    /// Seed stream for this cell, stable across runs.
    pub stream: u64,
}

/// The best mapping found in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub mapping: Mapping,
    pub value: f64,
    pub report: CostReport,
    pub evaluations: u64,
}

/// One evaluated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub accel: String,
    pub model: String,
    pub layer: String,
    pub sweep: Option<u64>,
    pub mode: SearchMode,
    /// Exact size of the feasible search space.
    pub feasible_points: u128,
    /// Map-space and flexibility counts for this (layer, accelerator) pair.
    pub stats: MapSpaceStats,
    /// Priced configurability of the variant; its energy adder is already
    /// folded into `best`'s energy and EDP.
    pub overhead: OverheadReport,
    /// `None` when no tile tuple fits the buffer (a stranded configuration).
    pub best: Option<BestCell>,
}

/// The design-time baseline chosen by a `future_proof` experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    /// The configuration burned into every variant's baseline.
    pub baseline: Mapping,
    /// Geometric-mean objective over the design model's layers.
    pub fitness: f64,
    /// Fitness evaluations spent designing.
    pub evaluations: u64,
    /// Best design fitness after each generation (log-scale sum, decreasing).
    pub history: Vec<f64>,
}

/// An experiment expanded into runnable pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub tasks: Vec<CellTask>,
    pub design: Option<DesignOutcome>,
    pub settings: SearchSettings,
}

/// Whole-model totals for one (accelerator, model) pair. Sums run over the
/// model's layers; a stranded cell makes the affected totals infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTotals {
    pub accel: String,
    pub model: String,
    /// Sum of best-mapping runtimes, in cycles.
    pub runtime_cycles: f64,
    /// Sum of best-mapping energies (configurability adders included).
    pub energy: f64,
    /// Model-level energy-delay product: total energy times total runtime.
    pub edp: f64,
    /// This variant's total divided by the first accelerator's total for the
    /// same model; 1.0 on the reference itself, below 1.0 is better.
    pub relative_runtime: f64,
    pub relative_energy: f64,
    pub relative_edp: f64,
}

/// Per-accelerator aggregate across its cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelSummary {
    pub accel: String,
    /// Geometric mean of the best objective values (infinite if any cell is
    /// stranded).
    pub geomean_value: f64,
    /// Geometric mean of (reference value / this value) over matching cells;
    /// above 1 means this variant beats the first accelerator.
    pub advantage_vs_reference: f64,
}

/// Everything an experiment produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub kind: String,
    pub objective: Objective,
    pub seed: u64,
    pub design: Option<DesignOutcome>,
    pub cells: Vec<CellResult>,
    pub totals: Vec<ModelTotals>,
    pub summaries: Vec<AccelSummary>,
}

fn geomean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let log_sum: f64 = values.iter().map(|&v| libm::log(v)).sum();
    libm::exp(log_sum / values.len() as f64)
}

fn unique_names<'a>(names: impl Iterator<Item = &'a str>) -> Option<String> {
    let mut seen: Vec<&str> = Vec::new();
    for n in names {
        if seen.contains(&n) {
            return Some(n.into());
        }
        seen.push(n);
    }
    None
}

impl Experiment {
    /// The per-cell search configuration this experiment implies.
    pub fn settings(&self) -> SearchSettings {
        SearchSettings {
            objective: self.objective,
            energy: self.energy,
            ga: self.ga,
            exhaustive_cap: self.exhaustive_cap,
            seed: self.seed,
            cost_table: self.cost_table,
        }
    }

    /// Checks the experiment is well-formed (variant derivation may still
    /// fail later; see [`ExperimentError::BadVariant`]).
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.name.is_empty() {
            return Err(ExperimentError::EmptyName);
        }
        if self.models.is_empty() {
            return Err(ExperimentError::NoModels);
        }
        if self.accels.is_empty() {
            return Err(ExperimentError::NoAccels);
        }
        if let Some(name) = unique_names(self.models.iter().map(|m| m.name.as_str())) {
            return Err(ExperimentError::DuplicateModel { name });
        }
        if let Some(name) = unique_names(self.accels.iter().map(|a| a.name.as_str())) {
            return Err(ExperimentError::DuplicateAccel { name });
        }
        for model in &self.models {
            model.validate().map_err(|source| ExperimentError::BadModel {
                name: model.name.clone(),
                source,
            })?;
        }
        for accel in &self.accels {
            accel.validate().map_err(|source| ExperimentError::BadAccel {
                name: accel.name.clone(),
                source,
            })?;
        }
        self.ga.validate().map_err(ExperimentError::BadGa)?;
        self.energy
            .validate()
            .map_err(|_| ExperimentError::BadEnergy)?;
        self.cost_table
            .validate()
            .map_err(|_| ExperimentError::BadCostTable)?;
        if self.exhaustive_cap == 0 {
            return Err(ExperimentError::ZeroCap);
        }
        match &self.kind {
            ExperimentKind::AxisIsolation => {
                if self.accels.len() < 2 {
                    return Err(ExperimentError::NeedsFamily);
                }
                if self.accels[0].flex_class != FlexClass::FIXED {
                    return Err(ExperimentError::ReferenceNotRigid);
                }
                for accel in &self.accels[1..] {
                    if !accel.same_resources(&self.accels[0]) {
                        return Err(ExperimentError::MixedResources {
                            name: accel.name.clone(),
                        });
                    }
                }
            }
            ExperimentKind::BufferSweep { sizes } => {
                require_single(self)?;
                require_grid(sizes)?;
            }
            ExperimentKind::ArraySweep { pe_counts } => {
                require_single(self)?;
                require_grid(pe_counts)?;
            }
            ExperimentKind::ClassSweep { classes } => {
                require_single(self)?;
                require_classes(classes)?;
            }
            ExperimentKind::FutureProof {
                design_model,
                classes,
            } => {
                require_single(self)?;
                require_classes(classes)?;
                design_model
                    .validate()
                    .map_err(|source| ExperimentError::BadModel {
                        name: design_model.name.clone(),
                        source,
                    })?;
            }
        }
        Ok(())
    }

    /// Expands the experiment into cell tasks (running the design search
    /// first for `future_proof`).
    pub fn prepare(&self) -> Result<Prepared, ExperimentError> {
        self.validate()?;
        let settings = self.settings();
        let mut design = None;
        let variants: Vec<(AcceleratorSpec, Option<u64>)> = match &self.kind {
            ExperimentKind::AxisIsolation => {
                self.accels.iter().map(|a| (a.clone(), None)).collect()
            }
            ExperimentKind::BufferSweep { sizes } => {
                let mut out = Vec::with_capacity(sizes.len());
                for &size in sizes {
                    let mut v = self.accels[0].clone();
                    v.name = format!("{}@{}", v.name, size);
                    v.buffer.size = size;
                    check_variant(&v)?;
                    out.push((v, Some(size)));
                }
                out
            }
            ExperimentKind::ArraySweep { pe_counts } => {
                let mut out = Vec::with_capacity(pe_counts.len());
                for &n_pe in pe_counts {
                    let mut v = self.accels[0].clone();
                    v.name = format!("{}@pe{}", v.name, n_pe);
                    v.n_pe = n_pe;
                    // Re-derive a near-square baseline shape; everything else
                    // about the configuration carries over.
                    let h = isqrt(n_pe);
                    v.baseline.shape = (h, n_pe / h);
                    check_variant(&v)?;
                    out.push((v, Some(n_pe)));
                }
                out
            }
            ExperimentKind::ClassSweep { classes } => {
                let mut out = Vec::with_capacity(classes.len());
                for &class in classes {
                    let v = self.accels[0].with_class(class);
                    check_variant(&v)?;
                    out.push((v, None));
                }
                out
            }
            ExperimentKind::FutureProof {
                design_model,
                classes,
            } => {
                let outcome = design_baseline(&self.accels[0], design_model, &settings);
                let mut out = Vec::with_capacity(classes.len());
                for &class in classes {
                    let mut v = self.accels[0].with_class(class);
                    v.baseline = outcome.baseline;
                    check_variant(&v)?;
                    out.push((v, None));
                }
                design = Some(outcome);
                out
            }
        };

        let mut tasks = Vec::new();
        for (accel, sweep) in &variants {
            for model in &self.models {
                for layer in &model.layers {
                    tasks.push(CellTask {
                        accel: accel.clone(),
                        model: model.name.clone(),
                        layer: layer.clone(),
                        sweep: *sweep,
                        stream: tasks.len() as u64,
                    });
                }
            }
        }
        Ok(Prepared {
            tasks,
            design,
            settings,
        })
    }
}

fn require_single(exp: &Experiment) -> Result<(), ExperimentError> {
    if exp.accels.len() != 1 {
        return Err(ExperimentError::SingleAccelRequired);
    }
    Ok(())
}

fn require_grid(grid: &[u64]) -> Result<(), ExperimentError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::BadGrid);
    }
    Ok(())
}

fn require_classes(classes: &[FlexClass]) -> Result<(), ExperimentError> {
    if classes.is_empty() {
        return Err(ExperimentError::BadClasses);
    }
    for (i, a) in classes.iter().enumerate() {
        if classes[..i].contains(a) {
            return Err(ExperimentError::BadClasses);
        }
    }
    Ok(())
}

fn check_variant(v: &AcceleratorSpec) -> Result<(), ExperimentError> {
    v.validate().map_err(|source| ExperimentError::BadVariant {
        name: v.name.clone(),
        source,
    })
}

fn isqrt(n: u64) -> u64 {
    let mut h = libm::sqrt(n as f64) as u64;
    while h > 1 && h * h > n {
        h -= 1;
    }
    while (h + 1) * (h + 1) <= n {
        h += 1;
    }
    h.max(1)
}

/// Finds the best mapping of `layer` on `accel`: exhaustively when the
/// feasible space has at most `settings.exhaustive_cap` points, genetically
/// (seeded with `cell_seed`) otherwise.
pub fn best_mapping(
    layer: &Layer,
    accel: &AcceleratorSpec,
    settings: &SearchSettings,
    cell_seed: u64,
) -> (SearchMode, u128, Option<BestCell>) {
    let domains = SearchDomains::feasible(layer, accel);
    let points = domains.points(layer, accel);
    if points == 0 {
        return (SearchMode::Exhaustive, 0, None);
    }
    let energy = settings.energy_for(accel);
    if points <= settings.exhaustive_cap as u128 {
        let best = exhaustive_best(layer, accel, settings.objective, &energy).map(|o| {
            BestCell {
                mapping: o.best,
                value: o.best_value,
                report: o.report,
                evaluations: o.evaluated,
            }
        });
        (SearchMode::Exhaustive, points, best)
    } else {
        let best = ga_best(
            layer,
            accel,
            settings.objective,
            &energy,
            &settings.ga,
            cell_seed,
        )
        .map(|o| BestCell {
            mapping: o.best,
            value: o.best_value,
            report: o.report,
            evaluations: o.evaluations,
        });
        (SearchMode::Genetic, points, best)
    }
}

/// Runs one prepared cell.
pub fn run_cell(task: &CellTask, settings: &SearchSettings) -> CellResult {
    let cell_seed = seed::derive(settings.seed, task.stream);
    let (mode, feasible_points, best) = best_mapping(&task.layer, &task.accel, settings, cell_seed);
    CellResult {
        accel: task.accel.name.clone(),
        model: task.model.clone(),
        layer: task.layer.name.clone(),
        sweep: task.sweep,
        mode,
        feasible_points,
        stats: stats(&task.layer, &task.accel, DEFAULT_COUNT_CAP),
        overhead: overhead(&task.accel, &settings.cost_table),
        best,
    }
}

/// Combines cell results (in task order) into the final result, computing
/// per-accelerator summaries against the first accelerator.
pub fn assemble(
    exp: &Experiment,
    design: Option<DesignOutcome>,
    cells: Vec<CellResult>,
) -> ExperimentResult {
    let mut order: Vec<&str> = Vec::new();
    for cell in &cells {
        if !order.contains(&cell.accel.as_str()) {
            order.push(&cell.accel);
        }
    }
    let value_of = |c: &CellResult| c.best.as_ref().map_or(f64::INFINITY, |b| b.value);

    let mut models: Vec<&str> = Vec::new();
    for cell in &cells {
        if !models.contains(&cell.model.as_str()) {
            models.push(&cell.model);
        }
    }
    let sum_over = |accel: &str, model: &str, field: fn(&BestCell) -> f64| -> f64 {
        cells
            .iter()
            .filter(|c| c.accel == accel && c.model == model)
            .map(|c| c.best.as_ref().map_or(f64::INFINITY, field))
            .sum()
    };
    let mut totals = Vec::with_capacity(order.len() * models.len());
    for &accel in &order {
        for &model in &models {
            let runtime_cycles = sum_over(accel, model, |b| b.report.runtime_cycles as f64);
            let energy = sum_over(accel, model, |b| b.report.energy);
            let ref_runtime = sum_over(order[0], model, |b| b.report.runtime_cycles as f64);
            let ref_energy = sum_over(order[0], model, |b| b.report.energy);
            totals.push(ModelTotals {
                accel: accel.into(),
                model: model.into(),
                runtime_cycles,
                energy,
                edp: energy * runtime_cycles,
                relative_runtime: runtime_cycles / ref_runtime,
                relative_energy: energy / ref_energy,
                relative_edp: (energy * runtime_cycles) / (ref_energy * ref_runtime),
            });
        }
    }

    let summaries = order
        .iter()
        .map(|&accel| {
            let own: Vec<&CellResult> = cells.iter().filter(|c| c.accel == accel).collect();
            let values: Vec<f64> = own.iter().map(|c| value_of(c)).collect();
            let gains: Vec<f64> = own
                .iter()
                .filter_map(|c| {
                    cells
                        .iter()
                        .find(|r| {
                            r.accel == order[0] && r.model == c.model && r.layer == c.layer
                        })
                        .map(|r| value_of(r) / value_of(c))
                })
                .collect();
            AccelSummary {
                accel: accel.into(),
                geomean_value: geomean(&values),
                advantage_vs_reference: geomean(&gains),
            }
        })
        .collect();
    ExperimentResult {
        name: exp.name.clone(),
        kind: exp.kind.tag().into(),
        objective: exp.objective,
        seed: exp.seed,
        design,
        cells,
        totals,
        summaries,
    }
}

/// Prepares and runs every cell sequentially. Hosts that parallelize should
/// call [`Experiment::prepare`], fan out [`run_cell`], and [`assemble`] in
/// task order — the results are identical.
pub fn run(exp: &Experiment) -> Result<ExperimentResult, ExperimentError> {
    let prepared = exp.prepare()?;
    let cells = prepared
        .tasks
        .iter()
        .map(|t| run_cell(t, &prepared.settings))
        .collect();
    Ok(assemble(exp, prepared.design, cells))
}

/// Searches for the design-time baseline configuration: the single mapping
/// that, clamped into each design layer, minimizes the geometric-mean
/// objective on a rigid machine with the template's resources.
fn design_baseline(
    template: &AcceleratorSpec,
    design_model: &Model,
    settings: &SearchSettings,
) -> DesignOutcome {
    // Candidate tiles per dimension: every divisor of any design layer's
    // extent, so the designed configuration divides at least one real shape.
    let tile_lists: [Vec<u64>; 6] = Dim::ALL.map(|d| {
        let mut union: Vec<u64> = Vec::new();
        for layer in &design_model.layers {
            for v in divisors(layer.dims[d]) {
                if !union.contains(&v) {
                    union.push(v);
                }
            }
        }
        union.sort_unstable();
        union
    });
    let orders = all_orders();
    let pairs = ordered_pairs(template.native_dims.members());
    let shapes = canonical_shapes(template.n_pe);
    let sizes = [
        tile_lists[0].len(),
        tile_lists[1].len(),
        tile_lists[2].len(),
        tile_lists[3].len(),
        tile_lists[4].len(),
        tile_lists[5].len(),
        orders.len(),
        pairs.len(),
        shapes.len(),
    ];

    let decode = |genome: &[usize]| -> Mapping {
        let mut tiles = DimVals::splat(1);
        for (i, d) in Dim::ALL.into_iter().enumerate() {
            tiles[d] = tile_lists[i][genome[i]];
        }
        Mapping {
            tiles,
            order: orders[genome[6]],
            parallel: pairs[genome[7]],
            shape: shapes[genome[8]],
        }
    };

    // Baseline feasibility mirrors the accelerator validation rule: the tile
    // block itself (as a dense stride-1 working set) must fit the buffer.
    let probe_fits = |genome: &[usize]| -> bool {
        let mut tiles = DimVals::splat(1);
        for (i, d) in Dim::ALL.into_iter().enumerate() {
            tiles[d] = tile_lists[i][genome[i]];
        }
        let probe = Layer::conv2d("probe", tiles.0, 1);
        match footprint(&probe, &tiles) {
            Ok(fp) => fp.total() <= template.buffer.size,
            Err(_) => false,
        }
    };
    let repair = move |genome: &mut [usize], rng: &mut ChaCha12Rng| {
        if probe_fits(genome) {
            return;
        }
        let mut dims: [usize; 6] = [0, 1, 2, 3, 4, 5];
        dims.shuffle(rng);
        let mut cursor = 0;
        while !probe_fits(genome) {
            let mut stepped = false;
            for _ in 0..6 {
                let d = dims[cursor % 6];
                cursor += 1;
                if genome[d] > 0 {
                    genome[d] -= 1;
                    stepped = true;
                    break;
                }
            }
            if !stepped {
                return;
            }
        }
    };

    let mut rigid = template.with_class(FlexClass::FIXED);
    rigid.name = template.name.clone();
    let energy = settings.energy_for(&rigid);
    let layers = &design_model.layers;
    let mut fitness = |genome: &[usize]| -> f64 {
        let candidate = decode(genome);
        let mut machine = rigid.clone();
        machine.baseline = candidate;
        let mut log_sum = 0.0f64;
        for layer in layers {
            let m = clamp_to_layer(layer, &candidate);
            if is_legal(layer, &machine, &m).is_err() {
                return f64::INFINITY;
            }
            let report = evaluate(layer, &machine, &m, &energy);
            log_sum += libm::log(settings.objective.value(&report));
        }
        log_sum
    };

    let run = run_integer_ga(
        &sizes,
        &settings.ga,
        seed::derive(settings.seed, DESIGN_STREAM),
        &repair,
        &mut fitness,
    );
    DesignOutcome {
        baseline: decode(&run.best_genome),
        fitness: libm::exp(run.best_value / layers.len() as f64),
        evaluations: run.evaluations,
        history: run.history,
    }
}
