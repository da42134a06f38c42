//! On-disk JSON schemas.
//!
//! Every JSON artifact opens with a `schema_version` field and embeds the
//! full resolved configuration that produced it, so results can always be
//! traced back to their inputs and checked for compatibility before reuse.
//! Bumping [`SCHEMA_VERSION`] is a breaking change to every file format at
//! once; readers refuse files from other versions.

use serde::{Deserialize, Serialize};

use flexion_core::accel::AcceleratorSpec;
use flexion_core::dse::{CellResult, Experiment, ExperimentResult, ModelTotals, SearchSettings};
use flexion_core::mapspace::{MapSpaceStats, VennReport};
use flexion_core::overhead::OverheadReport;
use flexion_core::workload::Model;

/// Version stamped into every artifact this binary writes.
pub const SCHEMA_VERSION: u32 = 1;

/// `flexion.json`: per-layer counting results for one (model, accelerator)
/// pair. Pure counting — no search, no seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexionRecord {
    pub schema_version: u32,
    pub model: Model,
    pub accel: AcceleratorSpec,
    pub layers: Vec<LayerFlexion>,
}

/// Counting results for a single layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerFlexion {
    pub layer: String,
    pub stats: MapSpaceStats,
    pub venn: VennReport,
}

/// `mse.json`: the best mapping of every layer of one model on one machine,
/// plus whole-model totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRecord {
    pub schema_version: u32,
    pub model: Model,
    pub accel: AcceleratorSpec,
    /// The full search configuration, cost table included.
    pub settings: SearchSettings,
    pub overhead: OverheadReport,
    pub cells: Vec<CellResult>,
    pub totals: RunTotals,
}

/// Whole-model sums of per-layer bests; infinite when any layer is stranded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    pub runtime_cycles: f64,
    pub energy: f64,
    /// Model-level energy-delay product: total energy times total runtime.
    pub edp: f64,
}

impl RunTotals {
    /// Sums the best-mapping costs across `cells`.
    pub fn from_cells(cells: &[CellResult]) -> RunTotals {
        let sum = |field: fn(&flexion_core::dse::BestCell) -> f64| -> f64 {
            cells
                .iter()
                .map(|c| c.best.as_ref().map_or(f64::INFINITY, field))
                .sum()
        };
        let runtime_cycles = sum(|b| b.report.runtime_cycles as f64);
        let energy = sum(|b| b.report.energy);
        RunTotals {
            runtime_cycles,
            energy,
            edp: energy * runtime_cycles,
        }
    }
}

/// `experiment.json`: the resolved experiment a result directory came from,
/// command-line overrides already applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentFile {
    pub schema_version: u32,
    pub experiment: Experiment,
}

/// `result.json`: everything a `dse` run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema_version: u32,
    pub result: ExperimentResult,
}

/// `variants/<name>.json`: one variant's resolved spec, priced overhead,
/// and its slice of the cells and totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantFile {
    pub schema_version: u32,
    pub accel: AcceleratorSpec,
    pub overhead: OverheadReport,
    pub cells: Vec<CellResult>,
    pub totals: Vec<ModelTotals>,
}

/// `matrices.json`: the normalized model-by-variant matrices `report`
/// renders, one per metric, each with a per-variant geometric-mean row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatricesFile {
    pub schema_version: u32,
    pub experiment: String,
    pub matrices: Vec<MetricMatrix>,
}

/// One normalized matrix: `values[i][j]` is model `i` on variant `j`,
/// divided by the reference variant's total for the same model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    /// "runtime", "energy" or "edp".
    pub metric: String,
    pub variants: Vec<String>,
    pub models: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Geometric mean across models, one entry per variant.
    pub geomean: Vec<f64>,
}
