//! Map-space construction and exact size counting.
//!
//! For one layer and one accelerator, three spaces matter per mapping axis:
//! the workload's meaningful choices (`w_count`), what the accelerator's
//! resources alone would admit (`c_count`), and what its configurability
//! actually supports (`a_count`). The two ratios derived from them —
//! `a/c` against resources, `a/w` against the workload — are the flexibility
//! measures everything downstream reports.
//!
//! All counts are exact integers. With extents bounded by
//! [`crate::workload::MAX_DIM`], every per-axis count fits comfortably in
//! `u128` (tile spaces stay below `2^48`, orders below `720`, parallel pairs
//! below `30`, shapes below `2^20`, so combined spaces stay below `2^82`).

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::accel::{
    AcceleratorSpec, Axis, OrderConstraint, ParallelConstraint, ShapeConstraint, TileConstraint,
};
use crate::mapping::{clamp_baseline, fits_buffer, footprint, Mapping};
use crate::workload::{divisors, Dim, DimVals, Layer};

/// Joint-space size below which combined counts are flagged as
/// enumeration-verified.
pub const DEFAULT_COUNT_CAP: u128 = 1_000_000;

/// `n!` for the tiny factorials used here.
pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All permutations of `items` in lexicographic order (by item position).
fn permutations_lex(items: &[Dim]) -> Vec<Vec<Dim>> {
    fn rec(items: &[Dim], used: &mut [bool], current: &mut Vec<Dim>, out: &mut Vec<Vec<Dim>>) {
        if current.len() == items.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..items.len() {
            if !used[i] {
                used[i] = true;
                current.push(items[i]);
                rec(items, used, current, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(
        items,
        &mut vec![false; items.len()],
        &mut Vec::with_capacity(items.len()),
        &mut out,
    );
    out
}

/// One loop order per distinct-behavior class, in a stable (lexicographic)
/// ordering.
///
/// Orders that differ only in the placement of single-trip dimensions cost
/// the same, so each class is represented by a permutation of the effective
/// dimensions with the unit dimensions appended innermost in canonical order.
pub fn order_representatives(layer: &Layer) -> Vec<[Dim; 6]> {
    let eff: Vec<Dim> = layer.effective_dims().iter().collect();
    let units: Vec<Dim> = Dim::ALL
        .into_iter()
        .filter(|d| !layer.effective_dims().contains(*d))
        .collect();
    permutations_lex(&eff)
        .into_iter()
        .map(|perm| {
            let mut order = [Dim::K; 6];
            for (slot, d) in order.iter_mut().zip(perm.iter().chain(units.iter())) {
                *slot = *d;
            }
            order
        })
        .collect()
}

/// All 720 six-dimension loop orders in a stable (lexicographic) ordering.
/// Used where no layer is fixed yet, e.g. when searching for a design-time
/// baseline configuration.
pub fn all_orders() -> Vec<[Dim; 6]> {
    permutations_lex(&Dim::ALL)
        .into_iter()
        .map(|perm| {
            let mut order = [Dim::K; 6];
            order.copy_from_slice(&perm);
            order
        })
        .collect()
}

/// The subsequence of `order` over the layer's effective dimensions; two
/// orders behave identically if and only if their projections agree.
pub fn project_order(order: &[Dim; 6], layer: &Layer) -> Vec<Dim> {
    let eff = layer.effective_dims();
    order.iter().copied().filter(|d| eff.contains(*d)).collect()
}

/// All ordered pairs of distinct dimensions from the given universe.
pub fn ordered_pairs(members: &[Dim]) -> Vec<(Dim, Dim)> {
    let mut out = Vec::with_capacity(members.len() * members.len().saturating_sub(1));
    for &a in members {
        for &b in members {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

/// The maximal-width shape for every row count: `(h, floor(n_pe / h))`.
///
/// At a fixed row count, widening the array never hurts any objective (the
/// column fold shrinks, energy does not depend on idle PEs), so one shape per
/// row count covers the whole axis.
pub fn canonical_shapes(n_pe: u64) -> Vec<(u64, u64)> {
    (1..=n_pe).map(|h| (h, n_pe / h)).collect()
}

/// Canonical shapes whose sides are multiples of `block`.
pub fn block_shapes(n_pe: u64, block: u64) -> Vec<(u64, u64)> {
    (1..=n_pe / (block * block))
        .map(|i| {
            let h = i * block;
            (h, block * (n_pe / (h * block)))
        })
        .collect()
}

/// Counts factor-tile tuples drawn from `lists` that satisfy `fits`.
///
/// The footprint grows monotonically in every tile size, so whole subtrees
/// collapse: if the largest completion fits, the subtree contributes the full
/// product; if the smallest one does not, it contributes nothing.
fn count_tuples_fitting(
    layer: &Layer,
    lists: &[Vec<u64>; 6],
    fits: &dyn Fn(&Layer, &DimVals) -> bool,
) -> u128 {
    fn rec(
        layer: &Layer,
        lists: &[Vec<u64>; 6],
        fits: &dyn Fn(&Layer, &DimVals) -> bool,
        depth: usize,
        tiles: &mut DimVals,
    ) -> u128 {
        let mut probe = *tiles;
        for i in depth..6 {
            probe[Dim::from_index(i)] = *lists[i].last().expect("nonempty candidate list");
        }
        if fits(layer, &probe) {
            return lists[depth..].iter().map(|l| l.len() as u128).product();
        }
        for i in depth..6 {
            probe[Dim::from_index(i)] = lists[i][0];
        }
        if !fits(layer, &probe) {
            return 0;
        }
        let d = Dim::from_index(depth);
        let mut total = 0;
        for &t in &lists[depth] {
            tiles[d] = t;
            total += rec(layer, lists, fits, depth + 1, tiles);
        }
        tiles[d] = lists[depth][0];
        total
    }
    debug_assert!(lists.iter().all(|l| !l.is_empty()));
    let mut tiles = DimVals::splat(1);
    rec(layer, lists, fits, 0, &mut tiles)
}

fn fits_soft(size: u64) -> impl Fn(&Layer, &DimVals) -> bool {
    move |layer, tiles| match footprint(layer, tiles) {
        Ok(fp) => fp.total() <= size,
        Err(_) => false,
    }
}

fn fits_accel(accel: &AcceleratorSpec) -> impl Fn(&Layer, &DimVals) -> bool + '_ {
    move |layer, tiles| match footprint(layer, tiles) {
        Ok(fp) => fits_buffer(fp, accel.buffer.size, &accel.buffer.partitioning).is_ok(),
        Err(_) => false,
    }
}

/// Per-axis candidate lists for searching one layer on one accelerator.
///
/// Every assembled mapping is legal by construction, and the lists cover one
/// representative of every distinct-cost choice the accelerator supports, so
/// exhausting them finds a true optimum. (Equivalent choices may appear more
/// than once — e.g. all native parallel pairs are kept under an `all`
/// constraint — which is harmless for search.)
#[derive(Debug, Clone)]
pub struct SearchDomains {
    /// Candidate tile sizes per dimension, ascending; buffer feasibility is
    /// applied per assembled tuple.
    pub tile_lists: [Vec<u64>; 6],
    /// Candidate loop orders.
    pub orders: Vec<[Dim; 6]>,
    /// Candidate parallel pairs.
    pub pairs: Vec<(Dim, Dim)>,
    /// Candidate array shapes.
    pub shapes: Vec<(u64, u64)>,
}

impl SearchDomains {
    /// Builds the domains for `layer` on `accel`.
    pub fn feasible(layer: &Layer, accel: &AcceleratorSpec) -> SearchDomains {
        let clamped = clamp_baseline(layer, accel);
        let tile_lists: [Vec<u64>; 6] = match accel.constraints.tile {
            TileConstraint::Fixed => Dim::ALL.map(|d| vec![clamped.tiles[d]]),
            TileConstraint::Flexible => Dim::ALL.map(|d| divisors(layer.dims[d])),
        };
        let orders = match &accel.constraints.order {
            OrderConstraint::Fixed => vec![accel.baseline.order],
            OrderConstraint::All => order_representatives(layer),
            OrderConstraint::Allowed(allowed) => {
                // Keep the first member of each behavior class, in the
                // configured order.
                let mut kept: Vec<[Dim; 6]> = Vec::new();
                for order in allowed {
                    if !kept
                        .iter()
                        .any(|k| project_order(k, layer) == project_order(order, layer))
                    {
                        kept.push(*order);
                    }
                }
                kept
            }
        };
        let pairs = match &accel.constraints.parallel {
            ParallelConstraint::Fixed => vec![accel.baseline.parallel],
            ParallelConstraint::Allowed(allowed) => allowed.clone(),
            ParallelConstraint::All => {
                let eff: Vec<Dim> = accel
                    .native_dims
                    .members()
                    .iter()
                    .copied()
                    .filter(|d| layer.effective_dims().contains(*d))
                    .collect();
                match eff.len() {
                    // Parallelizing more effective work never costs anything
                    // here, so pairs of effective dimensions dominate pairs
                    // that waste a side of the array.
                    2.. => ordered_pairs(&eff),
                    1 => {
                        let e = eff[0];
                        let other = accel
                            .native_dims
                            .members()
                            .iter()
                            .copied()
                            .find(|&d| d != e)
                            .expect("native universes have at least three dims");
                        vec![(e, other), (other, e)]
                    }
                    0 => {
                        let m = accel.native_dims.members();
                        vec![(m[0], m[1])]
                    }
                }
            }
        };
        let shapes = match accel.constraints.shape {
            ShapeConstraint::Fixed => vec![accel.baseline.shape],
            ShapeConstraint::All => canonical_shapes(accel.n_pe),
            ShapeConstraint::Blocks { block } => block_shapes(accel.n_pe, block),
        };
        SearchDomains {
            tile_lists,
            orders,
            pairs,
            shapes,
        }
    }

    /// Exact number of tile tuples from the lists that fit the buffer.
    pub fn tile_count(&self, layer: &Layer, accel: &AcceleratorSpec) -> u128 {
        count_tuples_fitting(layer, &self.tile_lists, &fits_accel(accel))
    }

    /// Exact number of search points these domains describe.
    pub fn points(&self, layer: &Layer, accel: &AcceleratorSpec) -> u128 {
        self.tile_count(layer, accel)
            * self.orders.len() as u128
            * self.pairs.len() as u128
            * self.shapes.len() as u128
    }

    /// Calls `f` for every buffer-feasible tile tuple, in lexicographic order
    /// of the candidate lists.
    pub fn for_each_tiles(
        &self,
        layer: &Layer,
        accel: &AcceleratorSpec,
        f: &mut dyn FnMut(&DimVals),
    ) {
        fn rec(
            lists: &[Vec<u64>; 6],
            layer: &Layer,
            fits: &dyn Fn(&Layer, &DimVals) -> bool,
            depth: usize,
            tiles: &mut DimVals,
            f: &mut dyn FnMut(&DimVals),
        ) {
            if depth == 6 {
                if fits(layer, tiles) {
                    f(tiles);
                }
                return;
            }
            // Prune: if even the smallest completion overflows, no descendant
            // can fit (footprints are monotone in every tile size).
            let mut probe = *tiles;
            for i in depth..6 {
                probe[Dim::from_index(i)] = lists[i][0];
            }
            if !fits(layer, &probe) {
                return;
            }
            let d = Dim::from_index(depth);
            for &t in &lists[depth] {
                tiles[d] = t;
                rec(lists, layer, fits, depth + 1, tiles, f);
            }
            tiles[d] = lists[depth][0];
        }
        let mut tiles = DimVals::splat(1);
        rec(
            &self.tile_lists,
            layer,
            &fits_accel(accel),
            0,
            &mut tiles,
            f,
        );
    }

    /// Calls `f` for every legal mapping these domains describe.
    pub fn for_each_mapping(
        &self,
        layer: &Layer,
        accel: &AcceleratorSpec,
        f: &mut dyn FnMut(&Mapping),
    ) {
        self.for_each_tiles(layer, accel, &mut |tiles| {
            for order in &self.orders {
                for &parallel in &self.pairs {
                    for &shape in &self.shapes {
                        f(&Mapping {
                            tiles: *tiles,
                            order: *order,
                            parallel,
                            shape,
                        });
                    }
                }
            }
        });
    }
}

/// Exact sizes of the three spaces on one axis, with the two ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisCounts {
    /// Which axis this row describes.
    pub axis: Axis,
    /// Distinct meaningful choices the workload exposes.
    pub w_count: u128,
    /// Choices the accelerator's configurability supports.
    pub a_count: u128,
    /// Choices the accelerator's raw resources would admit.
    pub c_count: u128,
    /// `a_count / c_count`: configurability relative to resources.
    pub hw_flexion: f64,
    /// `a_count / w_count`: support relative to the workload's needs.
    pub wl_flexion: f64,
}

fn ratio(num: u128, den: u128) -> f64 {
    num as f64 / den as f64
}

fn axis_counts(axis: Axis, w: u128, a: u128, c: u128) -> AxisCounts {
    AxisCounts {
        axis,
        w_count: w,
        a_count: a,
        c_count: c,
        hw_flexion: ratio(a, c),
        wl_flexion: ratio(a, w),
    }
}

/// Tile-axis counts: factor tilings of the layer, with the buffer filter.
///
/// `w_count` ignores the buffer, `c_count` applies the raw capacity as one
/// soft budget, and `a_count` applies the actual configuration — the clamped
/// baseline alone when tiles are fixed, otherwise the real partitioning.
pub fn count_tiles(layer: &Layer, accel: &AcceleratorSpec) -> AxisCounts {
    let all: [Vec<u64>; 6] = Dim::ALL.map(|d| divisors(layer.dims[d]));
    let w: u128 = all.iter().map(|l| l.len() as u128).product();
    let c = count_tuples_fitting(layer, &all, &fits_soft(accel.buffer.size));
    let a = match accel.constraints.tile {
        TileConstraint::Fixed => 1,
        TileConstraint::Flexible => count_tuples_fitting(layer, &all, &fits_accel(accel)),
    };
    axis_counts(Axis::Tile, w, a, c)
}

/// Order-axis counts over distinct-behavior classes (permutations of the
/// effective dimensions).
pub fn count_orders(layer: &Layer, accel: &AcceleratorSpec) -> AxisCounts {
    let m = layer.effective_dims().len();
    let w = factorial(m);
    let a = match &accel.constraints.order {
        OrderConstraint::Fixed => 1,
        OrderConstraint::All => w,
        OrderConstraint::Allowed(allowed) => {
            let mut seen: Vec<Vec<Dim>> = Vec::new();
            for order in allowed {
                let p = project_order(order, layer);
                if !seen.contains(&p) {
                    seen.push(p);
                }
            }
            seen.len() as u128
        }
    };
    axis_counts(Axis::Order, w, a, w)
}

/// Parallel-axis counts over ordered pairs of dimensions.
///
/// A layer with fewer than two effective dimensions has no real spatial
/// choice; that degenerate case counts as a single option, and every
/// constraint realizes it (running serial is always possible). An `all`
/// constraint supports every ordered pair of dimensions that are both
/// effective and native; an explicit allowed set is intersected with the
/// effective pairs as-is.
pub fn count_parallel(layer: &Layer, accel: &AcceleratorSpec) -> AxisCounts {
    let eff = layer.effective_dims();
    let pair_count = |n: u128| if n >= 2 { n * (n - 1) } else { 1 };
    let w = pair_count(eff.len() as u128);
    let native = accel.native_dims.members();
    let c = native.len() as u128 * (native.len() as u128 - 1);
    let a = match &accel.constraints.parallel {
        ParallelConstraint::Fixed => 1,
        ParallelConstraint::All => {
            let e = native.iter().filter(|d| eff.contains(**d)).count() as u128;
            pair_count(e)
        }
        ParallelConstraint::Allowed(_) if eff.len() < 2 => 1,
        ParallelConstraint::Allowed(allowed) => allowed
            .iter()
            .filter(|(a, b)| eff.contains(*a) && eff.contains(*b))
            .count() as u128,
    };
    axis_counts(Axis::Parallel, w, a, c)
}

/// Shape-axis counts over canonical (maximal-width) shapes, one per row
/// count. The axis is workload-independent: `w_count` equals the resource
/// count `n_pe`.
pub fn count_shapes(accel: &AcceleratorSpec) -> AxisCounts {
    let n = accel.n_pe as u128;
    let a = match accel.constraints.shape {
        ShapeConstraint::Fixed => 1,
        ShapeConstraint::All => n,
        ShapeConstraint::Blocks { block } => (accel.n_pe / (block * block)) as u128,
    };
    axis_counts(Axis::Shape, n, a, n)
}

/// Per-axis and combined space sizes for one layer on one accelerator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSpaceStats {
    /// Counts for the tile, order, parallel and shape axes.
    pub per_axis: [AxisCounts; 4],
    /// Size of the combined workload space (product over axes).
    pub combined_w: u128,
    /// Size of the combined supported space (product over axes; per-axis
    /// legality is independent, so the product is the joint count).
    pub combined_a: u128,
    /// Whether `combined_w` is within the enumeration cap, i.e. small enough
    /// that the joint count can be re-verified by direct enumeration.
    pub combined_verifiable: bool,
    /// `combined_a / combined_w`.
    pub combined_wl_flexion: f64,
}

/// Computes per-axis and combined counts. `cap` bounds the joint-space size
/// considered enumerable (see [`DEFAULT_COUNT_CAP`]).
pub fn stats(layer: &Layer, accel: &AcceleratorSpec, cap: u128) -> MapSpaceStats {
    let per_axis = [
        count_tiles(layer, accel),
        count_orders(layer, accel),
        count_parallel(layer, accel),
        count_shapes(accel),
    ];
    let combined_w: u128 = per_axis.iter().map(|c| c.w_count).product();
    let combined_a: u128 = per_axis.iter().map(|c| c.a_count).product();
    MapSpaceStats {
        per_axis,
        combined_w,
        combined_a,
        combined_verifiable: combined_w <= cap,
        combined_wl_flexion: ratio(combined_a, combined_w),
    }
}

/// Sizes of the workload space, its supported part, and its resource-feasible
/// part, for scaled set-diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VennCounts {
    /// `|W|`: the workload's meaningful choices.
    pub workload: u128,
    /// `|A ∩ W|`: those the accelerator supports.
    pub supported: u128,
    /// `|C ∩ W|`: those its raw resources would admit.
    pub potential: u128,
}

/// Per-axis and combined set sizes for one (layer, accelerator) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VennReport {
    pub per_axis: [(Axis, VennCounts); 4],
    pub combined: VennCounts,
}

/// Computes the set sizes backing a three-way diagram per axis.
///
/// Supported choices are a subset of the workload space by construction, so
/// `supported <= potential <= workload` holds on the tile axis, and
/// `supported <= workload` on all axes.
pub fn venn_report(layer: &Layer, accel: &AcceleratorSpec) -> VennReport {
    let tiles = count_tiles(layer, accel);
    let orders = count_orders(layer, accel);
    let parallel = count_parallel(layer, accel);
    let shapes = count_shapes(accel);
    let eff = layer.effective_dims();
    let native_effective = accel
        .native_dims
        .members()
        .iter()
        .filter(|d| eff.contains(**d))
        .count() as u128;
    let pair_count = |n: u128| if n >= 2 { n * (n - 1) } else { 1 };
    let per_axis = [
        (
            Axis::Tile,
            VennCounts {
                workload: tiles.w_count,
                supported: tiles.a_count,
                potential: tiles.c_count,
            },
        ),
        (
            Axis::Order,
            VennCounts {
                workload: orders.w_count,
                supported: orders.a_count,
                potential: orders.w_count,
            },
        ),
        (
            Axis::Parallel,
            VennCounts {
                workload: parallel.w_count,
                supported: parallel.a_count,
                potential: pair_count(native_effective),
            },
        ),
        (
            Axis::Shape,
            VennCounts {
                workload: shapes.w_count,
                supported: shapes.a_count,
                potential: shapes.w_count,
            },
        ),
    ];
    let fold = |get: fn(&VennCounts) -> u128| per_axis.iter().map(|(_, v)| get(v)).product();
    VennReport {
        per_axis,
        combined: VennCounts {
            workload: fold(|v| v.workload),
            supported: fold(|v| v.supported),
            potential: fold(|v| v.potential),
        },
    }
}

/// Number of ways to give three tensors positive budgets summing to at most
/// `size`: `C(size, 3)`.
pub fn soft_budget_splits(size: u64) -> u128 {
    let s = size as u128;
    s * (s - 1) * (s - 2) / 6
}

/// Number of positive per-tensor budgets dominated by a hard split of `size`
/// by `ratios`: the product of the three shares.
pub fn hard_budget_splits(size: u64, ratios: [u64; 3]) -> u128 {
    crate::accel::Partitioning::hard_shares(size, ratios)
        .iter()
        .map(|&s| s as u128)
        .product()
}

/// Limit of `hard_budget_splits / soft_budget_splits` as the buffer grows:
/// `3! * p_w * p_i * p_o` for the normalized split fractions.
pub fn hard_partition_tile_limit(ratios: [u64; 3]) -> f64 {
    let total: u64 = ratios.iter().sum();
    6.0 * ratios
        .iter()
        .map(|&r| r as f64 / total as f64)
        .product::<f64>()
}
