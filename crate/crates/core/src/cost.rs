//! Deterministic analytical cost model: DRAM traffic from inter-tile reuse,
//! compute cycles from the parallelization, and a roofline runtime.

use serde::{Deserialize, Serialize};

use crate::accel::AcceleratorSpec;
use crate::mapping::{footprint, Mapping, Tensor};
use crate::workload::{Dim, DimSet, DimVals, Layer, LayerKind};

/// Dimensions a tensor's layout depends on.
///
/// Depthwise layers index weights and inputs by the output channel instead of
/// a reduced input channel.
pub fn tensor_dims(kind: LayerKind, tensor: Tensor) -> DimSet {
    let dims: &[Dim] = match (kind, tensor) {
        (LayerKind::DwConv, Tensor::Weights) => &[Dim::K, Dim::R, Dim::S],
        (LayerKind::DwConv, Tensor::Inputs) => &[Dim::K, Dim::Y, Dim::X, Dim::R, Dim::S],
        (_, Tensor::Weights) => &[Dim::K, Dim::C, Dim::R, Dim::S],
        (_, Tensor::Inputs) => &[Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S],
        (_, Tensor::Outputs) => &[Dim::K, Dim::Y, Dim::X],
    };
    dims.iter().copied().collect()
}

/// Inter-tile trip counts `ceil(extent / tile)` per dimension.
pub fn trip_counts(layer: &Layer, tiles: &DimVals) -> DimVals {
    let mut n = DimVals::splat(1);
    for d in Dim::ALL {
        n[d] = layer.dims[d].div_ceil(tiles[d]);
    }
    n
}

/// How many times tensor `t` changes its resident tile across the whole nest.
///
/// The innermost maximal run of loops that cannot change the tensor's tile —
/// dimensions the tensor does not depend on, plus any dimension with a single
/// trip (it never advances, so it extends the run) — reuses the resident tile;
/// every combination of the remaining outer trips loads a fresh one.
pub fn tile_fetches(layer: &Layer, m: &Mapping, tensor: Tensor) -> u64 {
    let rel = tensor_dims(layer.kind, tensor);
    let trips = trip_counts(layer, &m.tiles);
    let mut innermost_reused = DimSet::EMPTY;
    for d in m.order.into_iter().rev() {
        if !rel.contains(d) || trips[d] == 1 {
            innermost_reused.insert(d);
        } else {
            break;
        }
    }
    Dim::ALL
        .into_iter()
        .filter(|d| !innermost_reused.contains(*d))
        .map(|d| trips[d])
        .product()
}

/// DRAM traffic of one layer under a mapping, split per tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficReport {
    /// Residency changes per tensor, indexed like [`Tensor::ALL`].
    pub fetches: [u64; 3],
    /// Elements moved per tensor, doubling already applied to outputs.
    pub per_tensor: [u64; 3],
    /// Whether output tiles are revisited and therefore spilled and reloaded.
    pub output_doubled: bool,
    /// Total elements moved.
    pub total: u64,
}

/// DRAM traffic of `layer` under mapping `m`.
///
/// Each residency change moves one full tile footprint. Outputs count twice
/// when some output tile is resident more than once (write-back plus reload
/// of partial sums).
pub fn dram_traffic(layer: &Layer, m: &Mapping) -> TrafficReport {
    let fp = footprint(layer, &m.tiles).expect("legal mappings have a footprint");
    let trips = trip_counts(layer, &m.tiles);
    let fetches = Tensor::ALL.map(|t| tile_fetches(layer, m, t));
    let output_visits: u64 = tensor_dims(layer.kind, Tensor::Outputs)
        .iter()
        .map(|d| trips[d])
        .product();
    let output_doubled = fetches[Tensor::Outputs.index()] > output_visits;
    let mut per_tensor = [0u64; 3];
    for t in Tensor::ALL {
        let mut elems = fp.per_tensor()[t.index()] * fetches[t.index()];
        if t == Tensor::Outputs && output_doubled {
            elems *= 2;
        }
        per_tensor[t.index()] = elems;
    }
    TrafficReport {
        fetches,
        per_tensor,
        output_doubled,
        total: per_tensor.iter().sum(),
    }
}

/// Cycles to compute every tile on the `h x w` array.
///
/// Per tile, the two parallel dimensions fold onto the array sides
/// (`ceil(t/h) * ceil(t/w)`) and every other computed dimension runs
/// serially; depthwise layers have no `C` loop to run.
pub fn compute_cycles(layer: &Layer, m: &Mapping) -> u64 {
    let (h, w) = m.shape;
    let (p1, p2) = m.parallel;
    let folds = m.tiles[p1].div_ceil(h) * m.tiles[p2].div_ceil(w);
    let serial: u64 = Dim::ALL
        .into_iter()
        .filter(|&d| d != p1 && d != p2)
        .filter(|&d| layer.kind.reduces_over_c() || d != Dim::C)
        .map(|d| m.tiles[d])
        .product();
    let trips = trip_counts(layer, &m.tiles);
    let trip_product: u64 = Dim::ALL.into_iter().map(|d| trips[d]).product();
    folds * serial * trip_product
}

/// Per-access energy in relative units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    /// Energy per DRAM element moved.
    pub e_dram: f64,
    /// Energy per on-chip buffer access.
    pub e_buf: f64,
    /// Energy per multiply-accumulate.
    pub e_mac: f64,
}

impl Default for EnergyParams {
    /// Shipped defaults; per-access costs fall steeply from DRAM to buffer to
    /// MAC, as in the usual technology breakdowns.
    fn default() -> EnergyParams {
        EnergyParams {
            e_dram: 160.0,
            e_buf: 6.0,
            e_mac: 1.0,
        }
    }
}

impl EnergyParams {
    /// These parameters with a per-buffer-access adder folded in (the price
    /// of configurable addressing hardware on the buffer path).
    pub fn with_access_adder(self, adder: f64) -> EnergyParams {
        EnergyParams {
            e_buf: self.e_buf + adder,
            ..self
        }
    }

    /// Checks that all terms are nonnegative and finite.
    pub fn validate(&self) -> Result<(), &'static str> {
        for v in [self.e_dram, self.e_buf, self.e_mac] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err("energy parameters must be nonnegative and finite");
            }
        }
        Ok(())
    }
}

/// What a search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Runtime,
    Energy,
    Edp,
}

impl Objective {
    /// The objective value of a report (lower is better).
    pub fn value(self, report: &CostReport) -> f64 {
        match self {
            Objective::Runtime => report.runtime_cycles as f64,
            Objective::Energy => report.energy,
            Objective::Edp => report.edp,
        }
    }

    /// Lower-case name used in flags and file keys.
    pub fn name(self) -> &'static str {
        match self {
            Objective::Runtime => "runtime",
            Objective::Energy => "energy",
            Objective::Edp => "edp",
        }
    }
}

/// Full cost breakdown of one layer under one mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Cycles the PE array is busy.
    pub compute_cycles: u64,
    /// Total DRAM elements moved.
    pub dram_traffic: u64,
    /// On-chip buffer accesses (three per MAC: two reads, one write).
    pub buffer_accesses: u64,
    /// Multiply-accumulates in the layer.
    pub macs: u64,
    /// Fraction of PE-cycles doing useful work, in `(0, 1]`.
    pub utilization: f64,
    /// Roofline runtime: compute and DRAM streams overlap perfectly.
    pub runtime_cycles: u64,
    /// Total energy in relative units.
    pub energy: f64,
    /// Energy-delay product (`energy * runtime_cycles`).
    pub edp: f64,
}

/// Evaluates `m` for `layer` on `accel`.
///
/// The mapping must already be legal (callers search only legal mappings);
/// this is checked in debug builds. Any per-access energy adder owed to the
/// accelerator's configurability must already be folded into `ep` via
/// [`EnergyParams::with_access_adder`].
pub fn evaluate(
    layer: &Layer,
    accel: &AcceleratorSpec,
    m: &Mapping,
    ep: &EnergyParams,
) -> CostReport {
    debug_assert_eq!(crate::mapping::is_legal(layer, accel, m), Ok(()));
    let traffic = dram_traffic(layer, m);
    let compute = compute_cycles(layer, m);
    let macs = layer.macs();
    let buffer_accesses = 3 * macs;
    // Perfect overlap of compute with a DRAM stream at `bandwidth` elements
    // per cycle. The memory term is clamped rather than wrapped for extreme
    // bandwidth/traffic combinations.
    let mem_cycles_f = libm::ceil(traffic.total as f64 / accel.bandwidth);
    let mem_cycles = if mem_cycles_f >= u64::MAX as f64 {
        u64::MAX
    } else {
        mem_cycles_f as u64
    };
    let runtime_cycles = compute.max(mem_cycles);
    let (h, w) = m.shape;
    let utilization = macs as f64 / (h * w * compute) as f64;
    let energy = ep.e_dram * traffic.total as f64
        + ep.e_buf * buffer_accesses as f64
        + ep.e_mac * macs as f64;
    let edp = energy * runtime_cycles as f64;
    CostReport {
        compute_cycles: compute,
        dram_traffic: traffic.total,
        buffer_accesses,
        macs,
        utilization,
        runtime_cycles,
        energy,
        edp,
    }
}
