//! Mappings: how one layer is scheduled onto an accelerator, plus the
//! legality rules that decide whether a given accelerator supports a mapping.

use core::fmt;
use serde::{Deserialize, Serialize};

use crate::accel::{
    AcceleratorSpec, NativeDims, OrderConstraint, ParallelConstraint, Partitioning,
    ShapeConstraint, TileConstraint,
};
use crate::workload::{divisors, Dim, DimVals, Layer, LayerKind};

/// The three operand tensors of a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tensor {
    Weights,
    Inputs,
    Outputs,
}

impl Tensor {
    /// All tensors, in the order used for array-shaped per-tensor data.
    pub const ALL: [Tensor; 3] = [Tensor::Weights, Tensor::Inputs, Tensor::Outputs];

    /// Position in [`Tensor::ALL`].
    pub fn index(self) -> usize {
        match self {
            Tensor::Weights => 0,
            Tensor::Inputs => 1,
            Tensor::Outputs => 2,
        }
    }

    /// Lower-case tensor name.
    pub fn name(self) -> &'static str {
        match self {
            Tensor::Weights => "weights",
            Tensor::Inputs => "inputs",
            Tensor::Outputs => "outputs",
        }
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One point of the map space: tile sizes, loop order, the two parallelized
/// dimensions, and the physical PE-array shape.
///
/// `Ord` compares fields in declaration order (tiles in canonical dimension
/// order, then order, parallel pair, shape); all deterministic tie-breaking
/// uses this ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mapping {
    /// Per-dimension tile sizes held on chip at once.
    pub tiles: DimVals,
    /// Loop order over inter-tile trips, outermost first.
    pub order: [Dim; 6],
    /// Ordered pair of distinct dimensions mapped onto the PE array rows and
    /// columns respectively.
    pub parallel: (Dim, Dim),
    /// PE-array shape `(h, w)`; the mapping uses `h * w` of the available PEs.
    pub shape: (u64, u64),
}

impl Mapping {
    /// Returns whether `order` is a permutation of the six dimensions.
    pub fn order_is_permutation(&self) -> bool {
        let mut seen = [false; 6];
        for d in self.order {
            if seen[d.index()] {
                return false;
            }
            seen[d.index()] = true;
        }
        true
    }
}

/// On-chip element counts of one tile, per tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileFootprint {
    /// Weight elements resident for one tile.
    pub weights: u64,
    /// Input elements resident for one tile, including the stride/filter halo.
    pub inputs: u64,
    /// Output elements resident for one tile.
    pub outputs: u64,
}

impl TileFootprint {
    /// Total resident elements across the three tensors.
    pub fn total(self) -> u64 {
        self.weights + self.inputs + self.outputs
    }

    /// Per-tensor footprint, indexed like [`Tensor::ALL`].
    pub fn per_tensor(self) -> [u64; 3] {
        [self.weights, self.inputs, self.outputs]
    }
}

/// Why a tile footprint could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FootprintError {
    /// A tile size was zero.
    ZeroTile(Dim),
    /// A tile size exceeded the layer extent in that dimension.
    TileExceedsExtent { dim: Dim, tile: u64, extent: u64 },
}

impl fmt::Display for FootprintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FootprintError::ZeroTile(d) => write!(f, "zero tile in {d}"),
            FootprintError::TileExceedsExtent { dim, tile, extent } => {
                write!(f, "tile {tile} exceeds extent {extent} in {dim}")
            }
        }
    }
}

/// On-chip footprint of one tile of `layer` under `tiles`.
///
/// Inputs include the halo implied by stride and filter extents. Depthwise
/// layers keep one input/weight slice per output channel (`C` plays no role).
pub fn footprint(layer: &Layer, tiles: &DimVals) -> Result<TileFootprint, FootprintError> {
    for d in Dim::ALL {
        let t = tiles[d];
        if t == 0 {
            return Err(FootprintError::ZeroTile(d));
        }
        if t > layer.dims[d] {
            return Err(FootprintError::TileExceedsExtent {
                dim: d,
                tile: t,
                extent: layer.dims[d],
            });
        }
    }
    let (t_k, t_c) = (tiles[Dim::K], tiles[Dim::C]);
    let (t_y, t_x) = (tiles[Dim::Y], tiles[Dim::X]);
    let (t_r, t_s) = (tiles[Dim::R], tiles[Dim::S]);
    let halo_y = (t_y - 1) * layer.stride + t_r;
    let halo_x = (t_x - 1) * layer.stride + t_s;
    let fp = match layer.kind {
        LayerKind::DwConv => TileFootprint {
            weights: t_k * t_r * t_s,
            inputs: t_k * halo_y * halo_x,
            outputs: t_k * t_y * t_x,
        },
        _ => TileFootprint {
            weights: t_k * t_c * t_r * t_s,
            inputs: t_c * halo_y * halo_x,
            outputs: t_k * t_y * t_x,
        },
    };
    Ok(fp)
}

/// Checks a tile footprint against a buffer configuration.
///
/// Soft partitioning compares the summed footprint against the full capacity;
/// hard partitioning compares each tensor against its own share.
pub fn fits_buffer(
    fp: TileFootprint,
    size: u64,
    partitioning: &Partitioning,
) -> Result<(), IllegalReason> {
    match partitioning {
        Partitioning::Soft => {
            if fp.total() > size {
                return Err(IllegalReason::SoftBufferOverflow {
                    need: fp.total(),
                    size,
                });
            }
        }
        Partitioning::Hard { ratios } => {
            let shares = Partitioning::hard_shares(size, *ratios);
            for (tensor, (need, share)) in Tensor::ALL
                .into_iter()
                .zip(fp.per_tensor().into_iter().zip(shares))
            {
                if need > share {
                    return Err(IllegalReason::HardBufferOverflow { tensor, need, share });
                }
            }
        }
    }
    Ok(())
}

/// Why a mapping was rejected; the first failed check in clause order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IllegalReason {
    /// `order` repeats or omits a dimension.
    OrderNotPermutation,
    /// The two parallel dimensions coincide.
    ParallelNotDistinct,
    /// A shape side is zero.
    EmptyShape,
    /// A tile size is not a divisor of the layer extent (or is zero).
    NonFactorTile { dim: Dim },
    /// The summed footprint exceeds a soft-partitioned buffer.
    SoftBufferOverflow { need: u64, size: u64 },
    /// A tensor footprint exceeds its hard-partition share.
    HardBufferOverflow { tensor: Tensor, need: u64, share: u64 },
    /// `h * w` exceeds the PE count.
    ShapeExceedsArray { used: u64, n_pe: u64 },
    /// The tile axis is fixed and the tiles differ from the clamped baseline.
    TilePinned,
    /// The order axis is fixed and the order differs from the baseline.
    OrderPinned,
    /// The parallel axis is fixed and the pair differs from the baseline.
    ParallelPinned,
    /// The shape axis is fixed and the shape differs from the baseline.
    ShapePinned,
    /// The order is not in the accelerator's allowed set.
    OrderNotAllowed,
    /// The parallel pair is not in the accelerator's allowed set.
    ParallelNotAllowed,
    /// A shape side is not a multiple of the configuration block.
    ShapeNotBlockAligned { block: u64 },
    /// A parallel dimension is not addressable by the PE array.
    ParallelNotNative { dim: Dim },
}

impl fmt::Display for IllegalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IllegalReason::OrderNotPermutation => write!(f, "order not a permutation"),
            IllegalReason::ParallelNotDistinct => write!(f, "parallel dims not distinct"),
            IllegalReason::EmptyShape => write!(f, "empty shape"),
            IllegalReason::NonFactorTile { dim } => write!(f, "factor({dim})"),
            IllegalReason::SoftBufferOverflow { .. } => write!(f, "buffer(soft)"),
            IllegalReason::HardBufferOverflow { tensor, .. } => {
                write!(f, "buffer(hard:{tensor})")
            }
            IllegalReason::ShapeExceedsArray { .. } => write!(f, "shape exceeds PE array"),
            IllegalReason::TilePinned => write!(f, "tile fixed"),
            IllegalReason::OrderPinned => write!(f, "order fixed"),
            IllegalReason::ParallelPinned => write!(f, "parallel fixed"),
            IllegalReason::ShapePinned => write!(f, "shape fixed"),
            IllegalReason::OrderNotAllowed => write!(f, "order not allowed"),
            IllegalReason::ParallelNotAllowed => write!(f, "parallel not allowed"),
            IllegalReason::ShapeNotBlockAligned { block } => {
                write!(f, "shape not block-aligned({block})")
            }
            IllegalReason::ParallelNotNative { dim } => {
                write!(f, "parallel dim not native({dim})")
            }
        }
    }
}

/// A configured mapping with each tile size clamped into the layer.
///
/// Per dimension, the clamped tile is the largest divisor of the extent that
/// does not exceed the configured tile; order, parallel pair and shape are
/// kept as configured.
pub fn clamp_to_layer(layer: &Layer, configured: &Mapping) -> Mapping {
    let mut m = *configured;
    for d in Dim::ALL {
        let limit = m.tiles[d].min(layer.dims[d]);
        // 1 always divides, so the filtered list is never empty.
        m.tiles[d] = divisors(layer.dims[d])
            .into_iter()
            .filter(|&t| t <= limit)
            .next_back()
            .unwrap_or(1);
    }
    m
}

/// The accelerator's baseline mapping clamped into the layer
/// (see [`clamp_to_layer`]).
pub fn clamp_baseline(layer: &Layer, accel: &AcceleratorSpec) -> Mapping {
    clamp_to_layer(layer, &accel.baseline)
}

/// Decides whether `accel` supports mapping `m` for `layer`.
///
/// Checks run in a fixed clause order and the error reports the first failed
/// one: structural validity, factor tiles, buffer capacity, array size, fixed
/// axes against the (clamped) baseline, allowed sets, and native parallel
/// dimensions. Fixed-order comparison is exact over the full permutation.
pub fn is_legal(layer: &Layer, accel: &AcceleratorSpec, m: &Mapping) -> Result<(), IllegalReason> {
    // Structural validity of the mapping value itself.
    if !m.order_is_permutation() {
        return Err(IllegalReason::OrderNotPermutation);
    }
    if m.parallel.0 == m.parallel.1 {
        return Err(IllegalReason::ParallelNotDistinct);
    }
    if m.shape.0 == 0 || m.shape.1 == 0 {
        return Err(IllegalReason::EmptyShape);
    }
    // (1) Tiles must be positive factors of the layer extents.
    for d in Dim::ALL {
        let t = m.tiles[d];
        if t == 0 || layer.dims[d] % t != 0 {
            return Err(IllegalReason::NonFactorTile { dim: d });
        }
    }
    // (2) The tile must fit the buffer under the configured partitioning.
    let fp = footprint(layer, &m.tiles).expect("factor tiles always have a footprint");
    fits_buffer(fp, accel.buffer.size, &accel.buffer.partitioning)?;
    // (3) The shape must fit the physical array.
    let used = m.shape.0 * m.shape.1;
    if used > accel.n_pe {
        return Err(IllegalReason::ShapeExceedsArray {
            used,
            n_pe: accel.n_pe,
        });
    }
    // (4) Fixed axes must match the (clamped) baseline.
    if matches!(accel.constraints.tile, TileConstraint::Fixed)
        && m.tiles != clamp_baseline(layer, accel).tiles
    {
        return Err(IllegalReason::TilePinned);
    }
    if matches!(accel.constraints.order, OrderConstraint::Fixed) && m.order != accel.baseline.order
    {
        return Err(IllegalReason::OrderPinned);
    }
    if matches!(accel.constraints.parallel, ParallelConstraint::Fixed)
        && m.parallel != accel.baseline.parallel
    {
        return Err(IllegalReason::ParallelPinned);
    }
    if matches!(accel.constraints.shape, ShapeConstraint::Fixed) && m.shape != accel.baseline.shape
    {
        return Err(IllegalReason::ShapePinned);
    }
    // (5) Configurable axes must stay within their allowed sets.
    if let OrderConstraint::Allowed(orders) = &accel.constraints.order {
        if !orders.contains(&m.order) {
            return Err(IllegalReason::OrderNotAllowed);
        }
    }
    if let ParallelConstraint::Allowed(pairs) = &accel.constraints.parallel {
        if !pairs.contains(&m.parallel) {
            return Err(IllegalReason::ParallelNotAllowed);
        }
    }
    if let ShapeConstraint::Blocks { block } = accel.constraints.shape {
        if m.shape.0 % block != 0 || m.shape.1 % block != 0 {
            return Err(IllegalReason::ShapeNotBlockAligned { block });
        }
    }
    // (6) Parallel dimensions must be addressable by the PE array.
    if let NativeDims::Three = accel.native_dims {
        for dim in [m.parallel.0, m.parallel.1] {
            if !matches!(dim, Dim::K | Dim::C | Dim::Y) {
                return Err(IllegalReason::ParallelNotNative { dim });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use alloc::collections::BTreeSet;

    fn tiny_layer() -> Layer {
        Layer::conv2d("c", [4, 2, 6, 1, 3, 1], 1)
    }

    #[test]
    fn footprint_counts_input_halo() {
        let layer = Layer::conv2d("c", [4, 2, 6, 6, 3, 3], 1);
        let fp = footprint(&layer, &DimVals([2, 2, 2, 2, 3, 3])).unwrap();
        assert_eq!(fp.weights, 2 * 2 * 3 * 3);
        assert_eq!(fp.inputs, 2 * (1 + 3) * (1 + 3));
        assert_eq!(fp.outputs, 2 * 2 * 2);

        // Stride widens the halo.
        let strided = Layer::conv2d("c", [4, 2, 5, 5, 3, 3], 2);
        let fp = footprint(&strided, &DimVals([1, 1, 5, 5, 3, 3])).unwrap();
        assert_eq!(fp.inputs, ((5 - 1) * 2 + 3) * ((5 - 1) * 2 + 3));
    }

    #[test]
    fn footprint_enumeration_oracle() {
        // Count distinct touched input coordinates directly and compare with
        // the closed form, for a strided layer.
        let layer = Layer::conv2d("c", [2, 3, 4, 5, 3, 2], 2);
        let tiles = DimVals([2, 3, 2, 5, 3, 2]);
        let mut coords = BTreeSet::new();
        for c in 0..tiles[Dim::C] {
            for y in 0..tiles[Dim::Y] {
                for x in 0..tiles[Dim::X] {
                    for r in 0..tiles[Dim::R] {
                        for s in 0..tiles[Dim::S] {
                            coords.insert((c, y * layer.stride + r, x * layer.stride + s));
                        }
                    }
                }
            }
        }
        let fp = footprint(&layer, &tiles).unwrap();
        assert_eq!(fp.inputs, coords.len() as u64);
    }

    #[test]
    fn depthwise_footprint_replicates_per_channel() {
        let layer = Layer::dwconv("dw", 4, 6, 6, 3, 3, 1);
        let fp = footprint(&layer, &DimVals([2, 1, 2, 2, 3, 3])).unwrap();
        assert_eq!(fp.weights, 2 * 3 * 3);
        assert_eq!(fp.inputs, 2 * 4 * 4);
        assert_eq!(fp.outputs, 2 * 2 * 2);
    }

    #[test]
    fn legality_reports_first_failed_clause() {
        let layer = tiny_layer();
        let accel = fixtures::tiny_accel_inflex();
        let baseline = clamp_baseline(&layer, &accel);
        assert_eq!(is_legal(&layer, &accel, &baseline), Ok(()));

        // Non-factor tile trips clause 1 before any pin check.
        let mut m = baseline;
        m.tiles[Dim::Y] = 4;
        assert_eq!(
            is_legal(&layer, &accel, &m),
            Err(IllegalReason::NonFactorTile { dim: Dim::Y })
        );

        // A changed order on a fixed-order accelerator trips the pin.
        let mut m = baseline;
        m.order = [Dim::K, Dim::C, Dim::R, Dim::S, Dim::Y, Dim::X];
        assert_eq!(is_legal(&layer, &accel, &m), Err(IllegalReason::OrderPinned));
        assert_eq!(
            alloc::format!("{}", IllegalReason::OrderPinned),
            "order fixed"
        );
    }

    #[test]
    fn hard_partition_reports_offending_tensor() {
        let layer = tiny_layer();
        let accel = fixtures::tiny_accel_partflex_tile_hard();
        // Weights of a full tile: 4 * 2 * 3 = 24 > share 21 of a 64-element
        // buffer split 1:1:1.
        let m = Mapping {
            tiles: DimVals([4, 2, 6, 1, 3, 1]),
            ..accel.baseline
        };
        let err = is_legal(&layer, &accel, &m).unwrap_err();
        assert_eq!(
            err,
            IllegalReason::HardBufferOverflow {
                tensor: Tensor::Weights,
                need: 24,
                share: 21
            }
        );
        assert_eq!(alloc::format!("{err}"), "buffer(hard:weights)");
    }

    #[test]
    fn clamping_shrinks_to_largest_fitting_divisor() {
        let accel = fixtures::tiny_accel_inflex();
        // Baseline tiles are [2, 2, 2, 1, 3, 1]; a layer with Y = 3 cannot
        // hold a tile of 2 there, so the clamp drops it to 1.
        let layer = Layer::conv2d("c", [4, 2, 3, 1, 3, 1], 1);
        let clamped = clamp_baseline(&layer, &accel);
        assert_eq!(clamped.tiles, DimVals([2, 2, 1, 1, 3, 1]));
        assert_eq!(is_legal(&layer, &accel, &clamped), Ok(()));
    }

    #[test]
    fn mapping_ordering_follows_serialization_fields() {
        let a = Mapping {
            tiles: DimVals([1, 1, 1, 1, 1, 1]),
            order: [Dim::K, Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S],
            parallel: (Dim::K, Dim::C),
            shape: (1, 1),
        };
        let mut b = a;
        b.tiles[Dim::S] = 2;
        assert!(a < b);
        let mut c = a;
        c.shape = (1, 2);
        assert!(a < c && c < b);
    }
}
