//! Area and energy cost of configurability.
//!
//! Each open mapping axis needs extra hardware: registers and comparators for
//! runtime tile bounds, programmable address generators for loop orders,
//! steering muxes for parallelization choices, and a configurable
//! multicast/reduction network for array reshaping. This module prices those
//! features from a [`FeatureCostTable`] and reports the area overhead
//! relative to a rigid machine with the same PEs and buffer, plus a per-access
//! energy adder to fold into [`crate::cost::EnergyParams`].
//!
//! The shipped default table is calibrated so that a fully flexible 1024-PE,
//! 4096-element machine pays less than 1% area overhead — configurability is
//! cheap at realistic scale, which is the point the numbers make.

use serde::{Deserialize, Serialize};

use crate::accel::{AcceleratorSpec, Axis, Partitioning};

/// Silicon price of one feature: area in arbitrary gate-area units, plus the
/// extra energy its steering logic adds to every buffer access.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureCosts {
    /// Area in the same units as PE and buffer area.
    pub area: f64,
    /// Flat per-buffer-access energy adder.
    pub energy_adder: f64,
}

/// Per-feature prices, including the two baseline components every machine
/// pays (MAC datapath per PE, storage per buffer element).
///
/// Features marked *per PE* scale their area with the array size; all other
/// areas are flat. Energy adders are always flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureCostTable {
    /// One MAC datapath, registers included (per PE, baseline).
    pub pe_mac: FeatureCosts,
    /// One element of on-chip buffer storage (baseline).
    pub buffer_element: FeatureCosts,
    /// Runtime-programmable tile bound registers and comparators.
    pub tile_regs: FeatureCosts,
    /// Arbitration muxes that let tensors share one soft buffer.
    pub soft_partition_mux: FeatureCosts,
    /// Programmable address generators for arbitrary loop orders.
    pub order_addr_gens: FeatureCosts,
    /// Loop counter replica in each PE (per PE).
    pub order_pe_counter_reg: FeatureCosts,
    /// Extra address counters driving the parallel dimensions.
    pub parallel_addr_counters: FeatureCosts,
    /// Operand-select mux in each PE (per PE).
    pub parallel_pe_mux: FeatureCosts,
    /// Configurable multicast distribution network.
    pub shape_multicast_noc: FeatureCosts,
    /// Output-select demux in each PE (per PE).
    pub shape_pe_demux: FeatureCosts,
    /// Configurable reduction network for reshaped columns.
    pub reduction_noc: FeatureCosts,
}

const fn costs(area: f64, energy_adder: f64) -> FeatureCosts {
    FeatureCosts { area, energy_adder }
}

impl Default for FeatureCostTable {
    fn default() -> FeatureCostTable {
        FeatureCostTable {
            pe_mac: costs(100.0, 0.0),
            buffer_element: costs(10.0, 0.0),
            tile_regs: costs(40.0, 0.05),
            soft_partition_mux: costs(30.0, 0.05),
            order_addr_gens: costs(60.0, 0.1),
            order_pe_counter_reg: costs(0.25, 0.1),
            parallel_addr_counters: costs(50.0, 0.1),
            parallel_pe_mux: costs(0.25, 0.1),
            shape_multicast_noc: costs(120.0, 0.15),
            shape_pe_demux: costs(0.25, 0.1),
            reduction_noc: costs(150.0, 0.15),
        }
    }
}

/// Invalid [`FeatureCostTable`] contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverheadError {
    /// An area or energy adder is negative, NaN or infinite.
    BadValue,
}

impl core::fmt::Display for OverheadError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OverheadError::BadValue => {
                f.write_str("feature costs must be finite and non-negative")
            }
        }
    }
}

impl FeatureCostTable {
    fn entries(&self) -> [FeatureCosts; 11] {
        [
            self.pe_mac,
            self.buffer_element,
            self.tile_regs,
            self.soft_partition_mux,
            self.order_addr_gens,
            self.order_pe_counter_reg,
            self.parallel_addr_counters,
            self.parallel_pe_mux,
            self.shape_multicast_noc,
            self.shape_pe_demux,
            self.reduction_noc,
        ]
    }

    /// Checks all prices are finite and non-negative.
    pub fn validate(&self) -> Result<(), OverheadError> {
        for e in self.entries() {
            for v in [e.area, e.energy_adder] {
                if !v.is_finite() || v < 0.0 {
                    return Err(OverheadError::BadValue);
                }
            }
        }
        Ok(())
    }
}

/// Priced overhead of one accelerator's configurability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    /// Area of the rigid machine: PEs plus buffer storage.
    pub baseline_area: f64,
    /// Extra area across all enabled features.
    pub added_area: f64,
    /// Extra area per axis, indexed like [`Axis::ALL`].
    pub added_by_axis: [f64; 4],
    /// `added_area / baseline_area`.
    pub overhead_fraction: f64,
    /// Sum of the enabled features' per-access energy adders; feed it to
    /// [`crate::cost::EnergyParams::with_access_adder`].
    pub energy_adder_per_access: f64,
}

/// Prices the configurability of `accel` against `table`.
pub fn overhead(accel: &AcceleratorSpec, table: &FeatureCostTable) -> OverheadReport {
    let n_pe = accel.n_pe as f64;
    let baseline_area =
        n_pe * table.pe_mac.area + accel.buffer.size as f64 * table.buffer_element.area;
    let soft = matches!(accel.buffer.partitioning, Partitioning::Soft);

    let mut added_by_axis = [0.0f64; 4];
    let mut energy_adder = 0.0f64;
    let mut add = |slot: &mut f64, costs: FeatureCosts, per_pe: bool| {
        *slot += if per_pe { costs.area * n_pe } else { costs.area };
        energy_adder += costs.energy_adder;
    };
    for (i, axis) in Axis::ALL.into_iter().enumerate() {
        if !accel.flex_class.has(axis) {
            continue;
        }
        let slot = &mut added_by_axis[i];
        match axis {
            Axis::Tile => {
                add(slot, table.tile_regs, false);
                // Sharing one buffer among three tensors needs arbitration
                // only when the split is not baked into separate banks.
                if soft {
                    add(slot, table.soft_partition_mux, false);
                }
            }
            Axis::Order => {
                add(slot, table.order_addr_gens, false);
                add(slot, table.order_pe_counter_reg, true);
            }
            Axis::Parallel => {
                add(slot, table.parallel_addr_counters, false);
                add(slot, table.parallel_pe_mux, true);
            }
            Axis::Shape => {
                add(slot, table.shape_multicast_noc, false);
                add(slot, table.shape_pe_demux, true);
                add(slot, table.reduction_noc, false);
            }
        }
    }
    let added_area: f64 = added_by_axis.iter().sum();
    OverheadReport {
        baseline_area,
        added_area,
        added_by_axis,
        overhead_fraction: added_area / baseline_area,
        energy_adder_per_access: energy_adder,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rigid_machines_pay_nothing() {
        let report = overhead(&fixtures::base_accel_inflex(), &FeatureCostTable::default());
        assert_eq!(report.added_area, 0.0);
        assert_eq!(report.overhead_fraction, 0.0);
        assert_eq!(report.energy_adder_per_access, 0.0);
        assert!(report.baseline_area > 0.0);
    }

    #[test]
    fn full_flexibility_stays_under_one_percent_at_scale() {
        let report = overhead(&fixtures::base_accel_fullflex(), &FeatureCostTable::default());
        assert!(
            report.overhead_fraction < 0.01,
            "fraction {}",
            report.overhead_fraction
        );
        assert!(report.added_area > 0.0);
        assert!(report.energy_adder_per_access > 0.0);
    }

    #[test]
    fn more_open_axes_never_cost_less() {
        let table = FeatureCostTable::default();
        let base = fixtures::base_accel_inflex();
        let full = overhead(&base.with_class(crate::accel::FlexClass::FULL), &table);
        for class in crate::accel::FlexClass::all() {
            let report = overhead(&base.with_class(class), &table);
            if class.degree() == 0 {
                assert_eq!(report.added_area, 0.0);
            }
            assert!(report.added_area <= full.added_area);
            assert!(report.energy_adder_per_access <= full.energy_adder_per_access);
            // The per-axis breakdown sums to the total.
            let sum: f64 = report.added_by_axis.iter().sum();
            assert_eq!(sum, report.added_area);
        }
    }

    #[test]
    fn hard_split_buffers_skip_the_arbitration_mux() {
        let table = FeatureCostTable::default();
        let soft = overhead(&fixtures::tiny_accel_fullflex_tile(), &table);
        let hard = overhead(&fixtures::tiny_accel_partflex_tile_hard(), &table);
        assert_eq!(
            soft.added_area - hard.added_area,
            table.soft_partition_mux.area
        );
        assert!(hard.energy_adder_per_access < soft.energy_adder_per_access);
    }

    #[test]
    fn adders_feed_the_energy_model() {
        let report = overhead(&fixtures::base_accel_fullflex(), &FeatureCostTable::default());
        let ep = crate::cost::EnergyParams::default()
            .with_access_adder(report.energy_adder_per_access);
        assert!(ep.e_buf > crate::cost::EnergyParams::default().e_buf);
    }

    #[test]
    fn table_validation_rejects_negative_prices() {
        let mut table = FeatureCostTable::default();
        assert_eq!(table.validate(), Ok(()));
        table.reduction_noc.area = -1.0;
        assert_eq!(table.validate(), Err(OverheadError::BadValue));
    }
}
