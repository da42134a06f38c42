//! Accelerator descriptions: resources, flexibility class, per-axis mapping
//! constraints, and the baseline mapping the hardware ships with.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::mapping::{footprint, Mapping, TileFootprint};
use crate::workload::{Dim, Layer, LayerKind, MAX_DIM};

/// The four mapping axes an accelerator can be flexible on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Per-dimension tile sizes.
    Tile,
    /// Inter-tile loop order.
    Order,
    /// Which two dimensions are spatially parallelized.
    Parallel,
    /// Logical PE-array shape.
    Shape,
}

impl Axis {
    /// All axes in canonical (tile, order, parallel, shape) order.
    pub const ALL: [Axis; 4] = [Axis::Tile, Axis::Order, Axis::Parallel, Axis::Shape];

    /// Canonical one-letter tag used in reports.
    pub fn tag(self) -> &'static str {
        match self {
            Axis::Tile => "T",
            Axis::Order => "O",
            Axis::Parallel => "P",
            Axis::Shape => "S",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which of the four axes are configurable, written `"tops"` as a bit vector
/// (tile, order, parallel, shape), e.g. `"1010"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FlexClass {
    pub tile: bool,
    pub order: bool,
    pub parallel: bool,
    pub shape: bool,
}

impl FlexClass {
    /// The class with no configurable axis.
    pub const FIXED: FlexClass = FlexClass {
        tile: false,
        order: false,
        parallel: false,
        shape: false,
    };

    /// The class with every axis configurable.
    pub const FULL: FlexClass = FlexClass {
        tile: true,
        order: true,
        parallel: true,
        shape: true,
    };

    /// All 16 classes in ascending bit-vector order (`"0000"` to `"1111"`).
    pub fn all() -> [FlexClass; 16] {
        let mut out = [FlexClass::FIXED; 16];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = FlexClass {
                tile: i & 0b1000 != 0,
                order: i & 0b0100 != 0,
                parallel: i & 0b0010 != 0,
                shape: i & 0b0001 != 0,
            };
        }
        out
    }

    /// Whether the given axis is configurable in this class.
    pub fn has(self, axis: Axis) -> bool {
        match axis {
            Axis::Tile => self.tile,
            Axis::Order => self.order,
            Axis::Parallel => self.parallel,
            Axis::Shape => self.shape,
        }
    }

    /// Number of configurable axes.
    pub fn degree(self) -> usize {
        Axis::ALL.into_iter().filter(|&a| self.has(a)).count()
    }
}

impl fmt::Display for FlexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in [self.tile, self.order, self.parallel, self.shape] {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl TryFrom<String> for FlexClass {
    type Error = AccelError;

    fn try_from(s: String) -> Result<FlexClass, AccelError> {
        let b = s.as_bytes();
        if b.len() != 4 || b.iter().any(|c| *c != b'0' && *c != b'1') {
            return Err(AccelError::BadClass { text: s });
        }
        Ok(FlexClass {
            tile: b[0] == b'1',
            order: b[1] == b'1',
            parallel: b[2] == b'1',
            shape: b[3] == b'1',
        })
    }
}

impl From<FlexClass> for String {
    fn from(c: FlexClass) -> String {
        c.to_string()
    }
}

/// How the on-chip buffer is divided among the three tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partitioning {
    /// One shared capacity; any split among tensors is fine.
    Soft,
    /// Fixed per-tensor banks sized by the integer ratio
    /// `(weights : inputs : outputs)`.
    Hard { ratios: [u64; 3] },
}

impl Partitioning {
    /// Per-tensor capacities of a hard split: `floor(size * r / sum(r))`.
    pub fn hard_shares(size: u64, ratios: [u64; 3]) -> [u64; 3] {
        let total: u64 = ratios.iter().sum();
        ratios.map(|r| size / total * r + size % total * r / total)
    }
}

/// On-chip buffer configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BufferRepr", into = "BufferRepr")]
pub struct BufferConfig {
    /// Capacity in elements.
    pub size: u64,
    /// Bank organization.
    pub partitioning: Partitioning,
}

impl BufferConfig {
    /// A soft-partitioned buffer of `size` elements.
    pub fn soft(size: u64) -> BufferConfig {
        BufferConfig {
            size,
            partitioning: Partitioning::Soft,
        }
    }

    /// A hard-partitioned buffer of `size` elements with the given
    /// weights : inputs : outputs ratio.
    pub fn hard(size: u64, ratios: [u64; 3]) -> BufferConfig {
        BufferConfig {
            size,
            partitioning: Partitioning::Hard { ratios },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BufferRepr {
    size: u64,
    partitioning: PartitioningWord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratios: Option<[u64; 3]>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PartitioningWord {
    Soft,
    Hard,
}

impl TryFrom<BufferRepr> for BufferConfig {
    type Error = AccelError;

    fn try_from(r: BufferRepr) -> Result<BufferConfig, AccelError> {
        let partitioning = match (r.partitioning, r.ratios) {
            (PartitioningWord::Soft, None) => Partitioning::Soft,
            (PartitioningWord::Hard, Some(ratios)) => Partitioning::Hard { ratios },
            (PartitioningWord::Soft, Some(_)) => {
                return Err(AccelError::Inconsistent {
                    what: String::from("soft partitioning does not take ratios"),
                })
            }
            (PartitioningWord::Hard, None) => {
                return Err(AccelError::Inconsistent {
                    what: String::from("hard partitioning requires ratios"),
                })
            }
        };
        Ok(BufferConfig {
            size: r.size,
            partitioning,
        })
    }
}

impl From<BufferConfig> for BufferRepr {
    fn from(b: BufferConfig) -> BufferRepr {
        let (partitioning, ratios) = match b.partitioning {
            Partitioning::Soft => (PartitioningWord::Soft, None),
            Partitioning::Hard { ratios } => (PartitioningWord::Hard, Some(ratios)),
        };
        BufferRepr {
            size: b.size,
            partitioning,
            ratios,
        }
    }
}

/// Dimensions the PE array address logic can parallelize over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum NativeDims {
    /// All six loop dimensions.
    Six,
    /// Channel/spatial row dimensions only (`K`, `C`, `Y`).
    Three,
}

impl NativeDims {
    /// The dimensions members of this universe, in canonical order.
    pub fn members(self) -> &'static [Dim] {
        match self {
            NativeDims::Six => &Dim::ALL,
            NativeDims::Three => &[Dim::K, Dim::C, Dim::Y],
        }
    }
}

impl TryFrom<u8> for NativeDims {
    type Error = AccelError;

    fn try_from(v: u8) -> Result<NativeDims, AccelError> {
        match v {
            6 => Ok(NativeDims::Six),
            3 => Ok(NativeDims::Three),
            _ => Err(AccelError::Inconsistent {
                what: alloc::format!("native_dims must be 6 or 3, found {v}"),
            }),
        }
    }
}

impl From<NativeDims> for u8 {
    fn from(v: NativeDims) -> u8 {
        match v {
            NativeDims::Six => 6,
            NativeDims::Three => 3,
        }
    }
}

/// Tile-axis constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TileConstraint {
    /// Tiles are pinned to the (clamped) baseline.
    Fixed,
    /// Any factor tiling that fits the buffer.
    Flexible,
}

/// Order-axis constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrderRepr", into = "OrderRepr")]
pub enum OrderConstraint {
    /// Order is pinned to the baseline.
    Fixed,
    /// Order must be one of the listed permutations.
    Allowed(Vec<[Dim; 6]>),
    /// Any permutation.
    All,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OrderRepr {
    Word(ConstraintWord),
    Allowed { allowed: Vec<[Dim; 6]> },
}

/// Parallel-axis constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ParallelRepr", into = "ParallelRepr")]
pub enum ParallelConstraint {
    /// Pair is pinned to the baseline.
    Fixed,
    /// Pair must be one of the listed ordered pairs.
    Allowed(Vec<(Dim, Dim)>),
    /// Any ordered pair of distinct native dimensions.
    All,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ParallelRepr {
    Word(ConstraintWord),
    Allowed { allowed: Vec<(Dim, Dim)> },
}

/// Shape-axis constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShapeRepr", into = "ShapeRepr")]
pub enum ShapeConstraint {
    /// Shape is pinned to the baseline.
    Fixed,
    /// Both sides must be multiples of `block`.
    Blocks { block: u64 },
    /// Any shape that fits the array.
    All,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShapeRepr {
    Word(ConstraintWord),
    Blocks { block: u64 },
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum ConstraintWord {
    Fixed,
    All,
}

macro_rules! constraint_serde {
    ($ty:ident, $repr:ident, $allowed_pat:pat => $allowed_expr:expr, $to_allowed:expr) => {
        impl TryFrom<$repr> for $ty {
            type Error = AccelError;
            fn try_from(r: $repr) -> Result<$ty, AccelError> {
                Ok(match r {
                    $repr::Word(ConstraintWord::Fixed) => $ty::Fixed,
                    $repr::Word(ConstraintWord::All) => $ty::All,
                    $allowed_pat => $allowed_expr,
                })
            }
        }
        impl From<$ty> for $repr {
            fn from(c: $ty) -> $repr {
                match c {
                    $ty::Fixed => $repr::Word(ConstraintWord::Fixed),
                    $ty::All => $repr::Word(ConstraintWord::All),
                    other => $to_allowed(other),
                }
            }
        }
    };
}

constraint_serde!(
    OrderConstraint,
    OrderRepr,
    OrderRepr::Allowed { allowed } => OrderConstraint::Allowed(allowed),
    |c| match c {
        OrderConstraint::Allowed(allowed) => OrderRepr::Allowed { allowed },
        _ => unreachable!(),
    }
);

constraint_serde!(
    ParallelConstraint,
    ParallelRepr,
    ParallelRepr::Allowed { allowed } => ParallelConstraint::Allowed(allowed),
    |c| match c {
        ParallelConstraint::Allowed(allowed) => ParallelRepr::Allowed { allowed },
        _ => unreachable!(),
    }
);

constraint_serde!(
    ShapeConstraint,
    ShapeRepr,
    ShapeRepr::Blocks { block } => ShapeConstraint::Blocks { block },
    |c| match c {
        ShapeConstraint::Blocks { block } => ShapeRepr::Blocks { block },
        _ => unreachable!(),
    }
);

/// Per-axis mapping constraints; must agree bit-for-bit with the declared
/// [`FlexClass`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlexConstraints {
    pub tile: TileConstraint,
    pub order: OrderConstraint,
    pub parallel: ParallelConstraint,
    pub shape: ShapeConstraint,
}

impl FlexConstraints {
    /// Everything pinned to the baseline.
    pub fn all_fixed() -> FlexConstraints {
        FlexConstraints {
            tile: TileConstraint::Fixed,
            order: OrderConstraint::Fixed,
            parallel: ParallelConstraint::Fixed,
            shape: ShapeConstraint::Fixed,
        }
    }

    /// Fully open constraints on the axes enabled by `class`, everything else
    /// pinned.
    pub fn open_for(class: FlexClass) -> FlexConstraints {
        FlexConstraints {
            tile: if class.tile {
                TileConstraint::Flexible
            } else {
                TileConstraint::Fixed
            },
            order: if class.order {
                OrderConstraint::All
            } else {
                OrderConstraint::Fixed
            },
            parallel: if class.parallel {
                ParallelConstraint::All
            } else {
                ParallelConstraint::Fixed
            },
            shape: if class.shape {
                ShapeConstraint::All
            } else {
                ShapeConstraint::Fixed
            },
        }
    }

    /// The class these constraints imply (fixed = 0, anything else = 1).
    pub fn implied_class(&self) -> FlexClass {
        FlexClass {
            tile: !matches!(self.tile, TileConstraint::Fixed),
            order: !matches!(self.order, OrderConstraint::Fixed),
            parallel: !matches!(self.parallel, ParallelConstraint::Fixed),
            shape: !matches!(self.shape, ShapeConstraint::Fixed),
        }
    }
}

/// A complete accelerator description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceleratorSpec {
    /// Name used as a key in reports.
    pub name: String,
    /// Number of processing elements.
    pub n_pe: u64,
    /// On-chip buffer.
    pub buffer: BufferConfig,
    /// DRAM bandwidth in elements per cycle.
    pub bandwidth: f64,
    /// Dimensions the array address logic understands.
    pub native_dims: NativeDims,
    /// Declared flexibility class.
    pub flex_class: FlexClass,
    /// Per-axis constraints; must agree with `flex_class`.
    pub constraints: FlexConstraints,
    /// The mapping the hardware defaults to; fixed axes pin to it.
    pub baseline: Mapping,
}

impl AcceleratorSpec {
    /// A copy of this accelerator opened up (or pinned down) to `class`, with
    /// fully open constraints on the enabled axes and `-<class>` appended to
    /// the name. Resources and baseline are unchanged.
    pub fn with_class(&self, class: FlexClass) -> AcceleratorSpec {
        let mut out = self.clone();
        out.name = alloc::format!("{}-{}", self.name, class);
        out.flex_class = class;
        out.constraints = FlexConstraints::open_for(class);
        out
    }

    /// Returns whether two accelerators provision the same raw resources.
    pub fn same_resources(&self, other: &AcceleratorSpec) -> bool {
        self.n_pe == other.n_pe
            && self.buffer.size == other.buffer.size
            && self.bandwidth == other.bandwidth
            && self.native_dims == other.native_dims
    }

    /// Checks internal consistency. See the error variants for the rules.
    pub fn validate(&self) -> Result<(), AccelError> {
        if self.name.is_empty() {
            return Err(AccelError::EmptyName);
        }
        if self.n_pe == 0 || self.n_pe > MAX_DIM {
            return Err(AccelError::BadPeCount { n_pe: self.n_pe });
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(AccelError::BadBandwidth {
                bandwidth: self.bandwidth,
            });
        }
        if self.buffer.size < 3 {
            return Err(AccelError::BufferTooSmall {
                size: self.buffer.size,
            });
        }
        if let Partitioning::Hard { ratios } = self.buffer.partitioning {
            if ratios.iter().any(|&r| r == 0 || r > MAX_DIM) {
                return Err(AccelError::ZeroRatio);
            }
            let shares = Partitioning::hard_shares(self.buffer.size, ratios);
            if shares.iter().any(|&s| s == 0) {
                return Err(AccelError::EmptyShare { shares });
            }
        }
        if self.flex_class != self.constraints.implied_class() {
            return Err(AccelError::ClassMismatch {
                declared: self.flex_class,
                implied: self.constraints.implied_class(),
            });
        }
        self.validate_baseline()?;
        self.validate_allowed_sets()
    }

    fn validate_baseline(&self) -> Result<(), AccelError> {
        let b = &self.baseline;
        if !b.order_is_permutation() {
            return Err(AccelError::BaselineInvalid {
                what: String::from("order is not a permutation"),
            });
        }
        if b.parallel.0 == b.parallel.1 {
            return Err(AccelError::BaselineInvalid {
                what: String::from("parallel dims are not distinct"),
            });
        }
        for dim in [b.parallel.0, b.parallel.1] {
            if !self.native_dims.members().contains(&dim) {
                return Err(AccelError::BaselineInvalid {
                    what: alloc::format!("parallel dim {dim} is not native"),
                });
            }
        }
        if b.shape.0 == 0 || b.shape.1 == 0 || b.shape.0 * b.shape.1 > self.n_pe {
            return Err(AccelError::BaselineInvalid {
                what: alloc::format!(
                    "shape {}x{} does not fit {} PEs",
                    b.shape.0,
                    b.shape.1,
                    self.n_pe
                ),
            });
        }
        if b.tiles.0.iter().any(|&t| t == 0) {
            return Err(AccelError::BaselineInvalid {
                what: String::from("zero baseline tile"),
            });
        }
        // Resource feasibility of the baseline tiles is judged with dense
        // stride-1 semantics against the raw (soft) capacity; per-layer
        // clamping can only shrink the footprint from there.
        let probe = Layer {
            name: String::from("baseline-probe"),
            kind: LayerKind::Conv2d,
            dims: b.tiles,
            stride: 1,
        };
        let fp: TileFootprint =
            footprint(&probe, &b.tiles).expect("full-extent tiles always have a footprint");
        if fp.total() > self.buffer.size {
            return Err(AccelError::BaselineInvalid {
                what: alloc::format!(
                    "baseline tiles need {} of {} buffer elements",
                    fp.total(),
                    self.buffer.size
                ),
            });
        }
        Ok(())
    }

    fn validate_allowed_sets(&self) -> Result<(), AccelError> {
        if let OrderConstraint::Allowed(orders) = &self.constraints.order {
            if orders.len() < 2 {
                return Err(AccelError::AllowedSetTooSmall { axis: Axis::Order });
            }
            for order in orders {
                let m = Mapping {
                    order: *order,
                    ..self.baseline
                };
                if !m.order_is_permutation() {
                    return Err(AccelError::Inconsistent {
                        what: String::from("allowed order is not a permutation"),
                    });
                }
            }
            if !orders.contains(&self.baseline.order) {
                return Err(AccelError::BaselineOutsideAllowed { axis: Axis::Order });
            }
        }
        if let ParallelConstraint::Allowed(pairs) = &self.constraints.parallel {
            if pairs.len() < 2 {
                return Err(AccelError::AllowedSetTooSmall {
                    axis: Axis::Parallel,
                });
            }
            for (a, b) in pairs {
                if a == b {
                    return Err(AccelError::Inconsistent {
                        what: String::from("allowed parallel pair is not distinct"),
                    });
                }
                if !self.native_dims.members().contains(a)
                    || !self.native_dims.members().contains(b)
                {
                    return Err(AccelError::Inconsistent {
                        what: alloc::format!("allowed parallel pair ({a}, {b}) is not native"),
                    });
                }
            }
            if !pairs.contains(&self.baseline.parallel) {
                return Err(AccelError::BaselineOutsideAllowed {
                    axis: Axis::Parallel,
                });
            }
        }
        match self.constraints.shape {
            ShapeConstraint::Blocks { block } => {
                if block == 0 || block * block > self.n_pe {
                    return Err(AccelError::BadBlock {
                        block,
                        n_pe: self.n_pe,
                    });
                }
                if self.n_pe / (block * block) < 2 {
                    return Err(AccelError::AllowedSetTooSmall { axis: Axis::Shape });
                }
                if self.baseline.shape.0 % block != 0 || self.baseline.shape.1 % block != 0 {
                    return Err(AccelError::BaselineOutsideAllowed { axis: Axis::Shape });
                }
            }
            ShapeConstraint::All => {
                if self.n_pe < 2 {
                    return Err(AccelError::AllowedSetTooSmall { axis: Axis::Shape });
                }
            }
            ShapeConstraint::Fixed => {}
        }
        if matches!(self.constraints.parallel, ParallelConstraint::All) {
            let n = self.native_dims.members().len() as u64;
            if n * (n - 1) < 2 {
                return Err(AccelError::AllowedSetTooSmall {
                    axis: Axis::Parallel,
                });
            }
        }
        Ok(())
    }
}

/// Why an accelerator description was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum AccelError {
    /// The name was empty.
    EmptyName,
    /// PE count of zero or above [`MAX_DIM`].
    BadPeCount { n_pe: u64 },
    /// Bandwidth not a positive finite number.
    BadBandwidth { bandwidth: f64 },
    /// Buffer smaller than one element per tensor.
    BufferTooSmall { size: u64 },
    /// A hard-partition ratio of zero or above [`MAX_DIM`].
    ZeroRatio,
    /// A hard-partition share rounded down to zero elements.
    EmptyShare { shares: [u64; 3] },
    /// A flexibility-class string that is not four bits.
    BadClass { text: String },
    /// Declared class and constraints disagree.
    ClassMismatch {
        declared: FlexClass,
        implied: FlexClass,
    },
    /// The baseline mapping is malformed or does not fit the resources.
    BaselineInvalid { what: String },
    /// A configurable axis with fewer than two statically-known choices.
    AllowedSetTooSmall { axis: Axis },
    /// The baseline is outside an axis' allowed set.
    BaselineOutsideAllowed { axis: Axis },
    /// A block size of zero or larger than the array.
    BadBlock { block: u64, n_pe: u64 },
    /// Any other internal inconsistency.
    Inconsistent { what: String },
}

impl fmt::Display for AccelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccelError::EmptyName => write!(f, "empty accelerator name"),
            AccelError::BadPeCount { n_pe } => {
                write!(f, "PE count {n_pe} outside 1..={MAX_DIM}")
            }
            AccelError::BadBandwidth { bandwidth } => {
                write!(f, "bandwidth {bandwidth} is not positive and finite")
            }
            AccelError::BufferTooSmall { size } => {
                write!(f, "buffer of {size} elements cannot hold one element per tensor")
            }
            AccelError::ZeroRatio => {
                write!(f, "hard partition ratios must be in 1..={MAX_DIM}")
            }
            AccelError::EmptyShare { shares } => write!(
                f,
                "hard partition share of zero elements ({}:{}:{})",
                shares[0], shares[1], shares[2]
            ),
            AccelError::BadClass { text } => {
                write!(f, "flex class '{text}' is not a 4-bit vector like \"1010\"")
            }
            AccelError::ClassMismatch { declared, implied } => write!(
                f,
                "declared class {declared} but constraints imply {implied}"
            ),
            AccelError::BaselineInvalid { what } => write!(f, "baseline invalid: {what}"),
            AccelError::AllowedSetTooSmall { axis } => write!(
                f,
                "axis {axis} is declared configurable but has fewer than two choices"
            ),
            AccelError::BaselineOutsideAllowed { axis } => {
                write!(f, "baseline is outside the allowed set on axis {axis}")
            }
            AccelError::BadBlock { block, n_pe } => {
                write!(f, "shape block {block} does not fit a {n_pe}-PE array")
            }
            AccelError::Inconsistent { what } => write!(f, "{what}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::workload::DimVals;

    #[test]
    fn flex_class_parses_and_prints_bit_vectors() {
        let c = FlexClass::try_from(String::from("1010")).unwrap();
        assert!(c.tile && !c.order && c.parallel && !c.shape);
        assert_eq!(c.to_string(), "1010");
        assert!(FlexClass::try_from(String::from("10")).is_err());
        assert!(FlexClass::try_from(String::from("102x")).is_err());
        let all = FlexClass::all();
        assert_eq!(all[0], FlexClass::FIXED);
        assert_eq!(all[15], FlexClass::FULL);
        assert_eq!(all[0b1010].to_string(), "1010");
    }

    #[test]
    fn hard_shares_split_exactly_without_rounding_drift() {
        assert_eq!(Partitioning::hard_shares(90, [1, 1, 1]), [30, 30, 30]);
        assert_eq!(Partitioning::hard_shares(64, [1, 1, 1]), [21, 21, 21]);
        assert_eq!(Partitioning::hard_shares(100, [2, 1, 1]), [50, 25, 25]);
        // 100_000 * 1/3 floors to 33_333 for each tensor.
        assert_eq!(
            Partitioning::hard_shares(100_000, [1, 1, 1]),
            [33_333, 33_333, 33_333]
        );
    }

    #[test]
    fn validation_accepts_the_shipped_fixtures() {
        for accel in fixtures::all_accels() {
            accel
                .validate()
                .unwrap_or_else(|e| panic!("{} invalid: {e}", accel.name));
        }
    }

    #[test]
    fn validation_rejects_class_constraint_mismatch() {
        let mut accel = fixtures::tiny_accel_inflex();
        accel.flex_class = FlexClass::try_from(String::from("1000")).unwrap();
        assert!(matches!(
            accel.validate(),
            Err(AccelError::ClassMismatch { .. })
        ));
    }

    #[test]
    fn validation_rejects_oversized_baseline() {
        let mut accel = fixtures::tiny_accel_inflex();
        accel.baseline.shape = (4, 2); // 8 > 4 PEs
        assert!(matches!(
            accel.validate(),
            Err(AccelError::BaselineInvalid { .. })
        ));

        let mut accel = fixtures::tiny_accel_inflex();
        accel.baseline.tiles = DimVals([8, 8, 8, 8, 3, 3]); // far beyond 64 elements
        assert!(matches!(
            accel.validate(),
            Err(AccelError::BaselineInvalid { .. })
        ));
    }

    #[test]
    fn validation_requires_two_choices_on_open_axes() {
        let mut accel = fixtures::tiny_accel_partflex_order();
        if let OrderConstraint::Allowed(orders) = &mut accel.constraints.order {
            orders.truncate(1);
        }
        assert!(matches!(
            accel.validate(),
            Err(AccelError::AllowedSetTooSmall { axis: Axis::Order })
        ));
    }

    #[test]
    fn accel_json_round_trips() {
        for accel in fixtures::all_accels() {
            let json = serde_json::to_string_pretty(&accel).unwrap();
            let back: AcceleratorSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, accel, "{} must round-trip", accel.name);
        }
    }

    #[test]
    fn accel_json_rejects_unknown_fields_and_bad_forms() {
        let accel = fixtures::tiny_accel_inflex();
        let mut v: serde_json::Value = serde_json::to_value(&accel).unwrap();
        v["voltage"] = serde_json::json!(1.2);
        assert!(serde_json::from_value::<AcceleratorSpec>(v).is_err());

        // Soft partitioning with ratios is contradictory.
        let mut v: serde_json::Value = serde_json::to_value(&accel).unwrap();
        v["buffer"]["ratios"] = serde_json::json!([1, 1, 1]);
        assert!(serde_json::from_value::<AcceleratorSpec>(v).is_err());
    }
}
