//! Reference implementations that re-derive results the analytical paths
//! compute in closed form.
//!
//! [`simulate_fetches`] walks the tile loop nest literally, step by step,
//! tracking which tile of a tensor is resident — the ground truth that the
//! reuse-run rule in [`crate::cost::tile_fetches`] must reproduce exactly.
//! [`exhaustive_best`] scans a whole feasible map space, the ground truth for
//! any search heuristic.
//!
//! Both are deliberately slow and simple; cap parameters keep them inside
//! test-sized budgets.

use crate::accel::AcceleratorSpec;
use crate::cost::{evaluate, tensor_dims, trip_counts, CostReport, EnergyParams, Objective};
use crate::mapping::{Mapping, Tensor};
use crate::mapspace::SearchDomains;
use crate::workload::{Dim, Layer};

/// What a literal loop-nest walk observed for one tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStats {
    /// Tile loads issued (a load happens whenever the coordinates relevant
    /// to the tensor differ from the resident tile's).
    pub fetches: u64,
    /// Tiles displaced, always `fetches - 1`.
    pub evictions: u64,
    /// Loop steps taken: the product of all trip counts.
    pub steps: u64,
}

/// Walks the full tile loop nest for `mapping` and counts how often the
/// given tensor's tile must be (re)loaded.
///
/// Returns `None` if the nest has more than `step_cap` steps.
pub fn simulate_fetches(
    layer: &Layer,
    mapping: &Mapping,
    tensor: Tensor,
    step_cap: u64,
) -> Option<TraceStats> {
    let trips = trip_counts(layer, &mapping.tiles);
    let total: u128 = Dim::ALL.iter().map(|&d| trips[d] as u128).product();
    if total == 0 || total > step_cap as u128 {
        return None;
    }
    let total = total as u64;
    let rel = tensor_dims(layer.kind, tensor);

    // Mixed-radix decode of the step index: the last dimension in the order
    // is the innermost loop, so it varies fastest.
    let mut fetches = 0u64;
    let mut resident: Option<[u64; 6]> = None;
    for step in 0..total {
        let mut coords = [0u64; 6];
        let mut rest = step;
        for &d in mapping.order.iter().rev() {
            coords[d.index()] = rest % trips[d];
            rest /= trips[d];
        }
        let mut key = [0u64; 6];
        for d in rel.iter() {
            key[d.index()] = coords[d.index()];
        }
        if resident != Some(key) {
            fetches += 1;
            resident = Some(key);
        }
    }
    Some(TraceStats {
        fetches,
        evictions: fetches - 1,
        steps: total,
    })
}

/// Outcome of an exhaustive map-space scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    /// The best mapping found (ties broken by the mapping's canonical order,
    /// so the result is unique and reproducible).
    pub best: Mapping,
    /// The objective value of `best`.
    pub best_value: f64,
    /// The full cost report of `best`.
    pub report: CostReport,
    /// How many mappings were evaluated.
    pub evaluated: u64,
}

/// Evaluates every mapping in the feasible space of `layer` on `accel` and
/// returns the best under `objective`.
///
/// Returns `None` when the space is empty (no tile tuple fits the buffer).
/// Cost grows with the space size; gate callers on
/// [`SearchDomains::points`].
pub fn exhaustive_best(
    layer: &Layer,
    accel: &AcceleratorSpec,
    objective: Objective,
    energy: &EnergyParams,
) -> Option<SearchOutcome> {
    let domains = SearchDomains::feasible(layer, accel);
    let mut best: Option<SearchOutcome> = None;
    let mut evaluated = 0u64;
    domains.for_each_mapping(layer, accel, &mut |m| {
        let report = evaluate(layer, accel, m, energy);
        let value = objective.value(&report);
        evaluated += 1;
        let better = match &best {
            None => true,
            Some(b) => value < b.best_value || (value == b.best_value && *m < b.best),
        };
        if better {
            best = Some(SearchOutcome {
                best: *m,
                best_value: value,
                report,
                evaluated: 0,
            });
        }
    });
    best.map(|mut b| {
        b.evaluated = evaluated;
        b
    })
}
