//! Built-in accelerators and workloads used by tests, examples and the demo
//! experiments.
//!
//! Three accelerator families share resources and differ only in
//! configurability, so results isolate what flexibility buys:
//!
//! * `tiny_*` — 4 PEs, 64-element buffer. Small enough that whole map spaces
//!   can be enumerated and checked by hand.
//! * `tiny16_*` — 16 PEs, for array-shape experiments that need more than a
//!   couple of row counts.
//! * `base_*` — 1024 PEs, 4096-element buffer. The realistic scale used for
//!   headline numbers.
//!
//! Constructors return owned values; callers tweak fields freely. The same
//! definitions ship as JSON under `fixtures/` in the repository root, with a
//! parity test keeping both in sync.

use alloc::vec;
use alloc::vec::Vec;

use crate::accel::{
    AcceleratorSpec, BufferConfig, FlexClass, FlexConstraints, NativeDims, OrderConstraint,
    ParallelConstraint, ShapeConstraint, TileConstraint,
};
use crate::cost::{EnergyParams, Objective};
use crate::dse::{Experiment, ExperimentKind, DEFAULT_SEARCH_CAP};
use crate::ga::GaConfig;
use crate::mapping::Mapping;
use crate::overhead::FeatureCostTable;
use crate::workload::{Dim, DimVals, GemmEmbedding, Layer, Model};

/// Output-stationary loop order used by most baselines.
pub const ORDER_OUT_STATIONARY: [Dim; 6] = [Dim::Y, Dim::X, Dim::K, Dim::C, Dim::R, Dim::S];
/// Weight-stationary loop order.
pub const ORDER_WGT_STATIONARY: [Dim; 6] = [Dim::K, Dim::C, Dim::R, Dim::S, Dim::Y, Dim::X];
/// Input-stationary loop order.
pub const ORDER_IN_STATIONARY: [Dim; 6] = [Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S, Dim::K];
/// The canonical dimension order, used where an arbitrary but stable
/// permutation is needed.
pub const ORDER_CANONICAL: [Dim; 6] = [Dim::K, Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S];

fn accel(
    name: &str,
    n_pe: u64,
    buffer: BufferConfig,
    bandwidth: f64,
    native_dims: NativeDims,
    constraints: FlexConstraints,
    baseline: Mapping,
) -> AcceleratorSpec {
    let spec = AcceleratorSpec {
        name: name.into(),
        n_pe,
        buffer,
        bandwidth,
        native_dims,
        flex_class: constraints.implied_class(),
        constraints,
        baseline,
    };
    debug_assert_eq!(spec.validate(), Ok(()), "fixture {name} must validate");
    spec
}

fn fixed() -> FlexConstraints {
    FlexConstraints::all_fixed()
}

fn tiny_baseline() -> Mapping {
    Mapping {
        tiles: DimVals([2, 2, 2, 1, 3, 1]),
        order: ORDER_OUT_STATIONARY,
        parallel: (Dim::K, Dim::C),
        shape: (2, 2),
    }
}

fn tiny(name: &str, constraints: FlexConstraints) -> AcceleratorSpec {
    accel(
        name,
        4,
        BufferConfig::soft(64),
        4.0,
        NativeDims::Six,
        constraints,
        tiny_baseline(),
    )
}

/// 4-PE machine with everything pinned to its baseline configuration.
pub fn tiny_accel_inflex() -> AcceleratorSpec {
    tiny("tiny-inflex", fixed())
}

/// 4-PE machine with free tile sizes and a single shared buffer.
pub fn tiny_accel_fullflex_tile() -> AcceleratorSpec {
    tiny(
        "tiny-fullflex-tile",
        FlexConstraints {
            tile: TileConstraint::Flexible,
            ..fixed()
        },
    )
}

/// 4-PE machine with free tile sizes but a buffer hard-split 1:1:1 between
/// weights, inputs and outputs.
pub fn tiny_accel_partflex_tile_hard() -> AcceleratorSpec {
    accel(
        "tiny-partflex-tile-hard",
        4,
        BufferConfig::hard(64, [1, 1, 1]),
        4.0,
        NativeDims::Six,
        FlexConstraints {
            tile: TileConstraint::Flexible,
            ..fixed()
        },
        tiny_baseline(),
    )
}

/// 4-PE machine that can run any loop order.
pub fn tiny_accel_fullflex_order() -> AcceleratorSpec {
    tiny(
        "tiny-fullflex-order",
        FlexConstraints {
            order: OrderConstraint::All,
            ..fixed()
        },
    )
}

/// 4-PE machine limited to the three stationarity orders.
pub fn tiny_accel_partflex_order() -> AcceleratorSpec {
    tiny(
        "tiny-partflex-order",
        FlexConstraints {
            order: OrderConstraint::Allowed(vec![
                ORDER_OUT_STATIONARY,
                ORDER_WGT_STATIONARY,
                ORDER_IN_STATIONARY,
            ]),
            ..fixed()
        },
    )
}

/// 4-PE machine that can parallelize any pair of dimensions.
pub fn tiny_accel_fullflex_parallel() -> AcceleratorSpec {
    tiny(
        "tiny-fullflex-parallel",
        FlexConstraints {
            parallel: ParallelConstraint::All,
            ..fixed()
        },
    )
}

/// 4-PE machine limited to channel (K-C) or spatial (Y-X) parallelism.
pub fn tiny_accel_partflex_parallel() -> AcceleratorSpec {
    tiny(
        "tiny-partflex-parallel",
        FlexConstraints {
            parallel: ParallelConstraint::Allowed(vec![(Dim::K, Dim::C), (Dim::Y, Dim::X)]),
            ..fixed()
        },
    )
}

/// 4-PE machine with a reconfigurable array shape.
pub fn tiny_accel_fullflex_shape() -> AcceleratorSpec {
    tiny(
        "tiny-fullflex-shape",
        FlexConstraints {
            shape: ShapeConstraint::All,
            ..fixed()
        },
    )
}

/// 4-PE machine open on all four axes.
pub fn tiny_accel_fullflex() -> AcceleratorSpec {
    tiny(
        "tiny-fullflex",
        FlexConstraints {
            tile: TileConstraint::Flexible,
            order: OrderConstraint::All,
            parallel: ParallelConstraint::All,
            shape: ShapeConstraint::All,
        },
    )
}

fn tiny_yx_baseline() -> Mapping {
    Mapping {
        tiles: DimVals([8, 4, 1, 1, 1, 1]),
        order: ORDER_CANONICAL,
        parallel: (Dim::Y, Dim::X),
        shape: (2, 2),
    }
}

/// 4-PE machine pinned to spatial (Y-X) parallelism with matrix-style
/// baseline tiles. On workloads without spatial extent its array idles,
/// which is the mismatch the flexible variant below repairs.
pub fn tiny_accel_inflex_yx() -> AcceleratorSpec {
    accel(
        "tiny-inflex-yx",
        4,
        BufferConfig::soft(64),
        4.0,
        NativeDims::Six,
        fixed(),
        tiny_yx_baseline(),
    )
}

/// The spatial-parallel machine above with the parallel axis opened up.
pub fn tiny_accel_fullflex_parallel_yx() -> AcceleratorSpec {
    accel(
        "tiny-fullflex-parallel-yx",
        4,
        BufferConfig::soft(64),
        4.0,
        NativeDims::Six,
        FlexConstraints {
            parallel: ParallelConstraint::All,
            ..fixed()
        },
        tiny_yx_baseline(),
    )
}

fn tiny16_baseline() -> Mapping {
    Mapping {
        tiles: DimVals([2, 2, 2, 1, 3, 1]),
        order: ORDER_OUT_STATIONARY,
        parallel: (Dim::K, Dim::C),
        shape: (4, 4),
    }
}

fn tiny16(name: &str, constraints: FlexConstraints) -> AcceleratorSpec {
    accel(
        name,
        16,
        BufferConfig::soft(64),
        8.0,
        NativeDims::Six,
        constraints,
        tiny16_baseline(),
    )
}

/// 16-PE machine with everything pinned; rigid reference for the shape
/// bracket below.
pub fn tiny16_accel_inflex() -> AcceleratorSpec {
    tiny16("tiny16-inflex", fixed())
}

/// 16-PE machine with a freely reconfigurable array shape.
pub fn tiny16_accel_fullflex_shape() -> AcceleratorSpec {
    tiny16(
        "tiny16-fullflex-shape",
        FlexConstraints {
            shape: ShapeConstraint::All,
            ..fixed()
        },
    )
}

/// 16-PE machine whose array reconfigures in 2x2 blocks.
pub fn tiny16_accel_partflex_shape_b2() -> AcceleratorSpec {
    tiny16(
        "tiny16-partflex-shape-b2",
        FlexConstraints {
            shape: ShapeConstraint::Blocks { block: 2 },
            ..fixed()
        },
    )
}

fn base_baseline() -> Mapping {
    Mapping {
        tiles: DimVals([8, 8, 8, 8, 3, 3]),
        order: ORDER_OUT_STATIONARY,
        parallel: (Dim::K, Dim::C),
        shape: (32, 32),
    }
}

fn base(name: &str, buffer: BufferConfig, constraints: FlexConstraints) -> AcceleratorSpec {
    accel(
        name,
        1024,
        buffer,
        64.0,
        NativeDims::Six,
        constraints,
        base_baseline(),
    )
}

/// 1024-PE machine with everything pinned.
pub fn base_accel_inflex() -> AcceleratorSpec {
    base("base-inflex", BufferConfig::soft(4096), fixed())
}

/// 1024-PE machine with free tile sizes over one shared buffer.
pub fn base_accel_fullflex_tile() -> AcceleratorSpec {
    base(
        "base-fullflex-tile",
        BufferConfig::soft(4096),
        FlexConstraints {
            tile: TileConstraint::Flexible,
            ..fixed()
        },
    )
}

/// 1024-PE machine with free tile sizes over a 1:1:1 hard-split buffer.
pub fn base_accel_partflex_tile_hard() -> AcceleratorSpec {
    base(
        "base-partflex-tile-hard",
        BufferConfig::hard(4096, [1, 1, 1]),
        FlexConstraints {
            tile: TileConstraint::Flexible,
            ..fixed()
        },
    )
}

/// 1024-PE machine that can run any loop order.
pub fn base_accel_fullflex_order() -> AcceleratorSpec {
    base(
        "base-fullflex-order",
        BufferConfig::soft(4096),
        FlexConstraints {
            order: OrderConstraint::All,
            ..fixed()
        },
    )
}

/// 1024-PE machine limited to the three stationarity orders.
pub fn base_accel_partflex_order() -> AcceleratorSpec {
    base(
        "base-partflex-order",
        BufferConfig::soft(4096),
        FlexConstraints {
            order: OrderConstraint::Allowed(vec![
                ORDER_OUT_STATIONARY,
                ORDER_WGT_STATIONARY,
                ORDER_IN_STATIONARY,
            ]),
            ..fixed()
        },
    )
}

/// 1024-PE machine that can parallelize any pair of dimensions.
pub fn base_accel_fullflex_parallel() -> AcceleratorSpec {
    base(
        "base-fullflex-parallel",
        BufferConfig::soft(4096),
        FlexConstraints {
            parallel: ParallelConstraint::All,
            ..fixed()
        },
    )
}

/// 1024-PE machine limited to channel (K-C) or spatial (Y-X) parallelism.
pub fn base_accel_partflex_parallel() -> AcceleratorSpec {
    base(
        "base-partflex-parallel",
        BufferConfig::soft(4096),
        FlexConstraints {
            parallel: ParallelConstraint::Allowed(vec![(Dim::K, Dim::C), (Dim::Y, Dim::X)]),
            ..fixed()
        },
    )
}

/// 1024-PE machine with a freely reconfigurable array shape.
pub fn base_accel_fullflex_shape() -> AcceleratorSpec {
    base(
        "base-fullflex-shape",
        BufferConfig::soft(4096),
        FlexConstraints {
            shape: ShapeConstraint::All,
            ..fixed()
        },
    )
}

/// 1024-PE machine whose array reconfigures in 4x4 blocks.
pub fn base_accel_partflex_shape_b4() -> AcceleratorSpec {
    base(
        "base-partflex-shape-b4",
        BufferConfig::soft(4096),
        FlexConstraints {
            shape: ShapeConstraint::Blocks { block: 4 },
            ..fixed()
        },
    )
}

/// 1024-PE machine open on all four axes.
pub fn base_accel_fullflex() -> AcceleratorSpec {
    base(
        "base-fullflex",
        BufferConfig::soft(4096),
        FlexConstraints {
            tile: TileConstraint::Flexible,
            order: OrderConstraint::All,
            parallel: ParallelConstraint::All,
            shape: ShapeConstraint::All,
        },
    )
}

/// 16-PE matrix engine that only addresses the three contraction dimensions.
pub fn gemm_accel_native3() -> AcceleratorSpec {
    accel(
        "gemm-native3",
        16,
        BufferConfig::soft(256),
        8.0,
        NativeDims::Three,
        FlexConstraints {
            parallel: ParallelConstraint::All,
            ..fixed()
        },
        Mapping {
            tiles: DimVals([4, 4, 4, 1, 1, 1]),
            order: ORDER_CANONICAL,
            parallel: (Dim::K, Dim::C),
            shape: (4, 4),
        },
    )
}

/// 1024-PE machine with small baseline tiles, open on all axes; its baseline
/// stays legal across the whole buffer- and array-sweep ranges.
pub fn sweep_accel() -> AcceleratorSpec {
    accel(
        "sweep-base",
        1024,
        BufferConfig::soft(4096),
        64.0,
        NativeDims::Six,
        FlexConstraints {
            tile: TileConstraint::Flexible,
            order: OrderConstraint::All,
            parallel: ParallelConstraint::All,
            shape: ShapeConstraint::All,
        },
        Mapping {
            tiles: DimVals([2, 2, 2, 2, 1, 1]),
            order: ORDER_OUT_STATIONARY,
            parallel: (Dim::K, Dim::C),
            shape: (32, 32),
        },
    )
}

/// Every accelerator fixture.
pub fn all_accels() -> Vec<AcceleratorSpec> {
    vec![
        tiny_accel_inflex(),
        tiny_accel_fullflex_tile(),
        tiny_accel_partflex_tile_hard(),
        tiny_accel_fullflex_order(),
        tiny_accel_partflex_order(),
        tiny_accel_fullflex_parallel(),
        tiny_accel_partflex_parallel(),
        tiny_accel_fullflex_shape(),
        tiny_accel_fullflex(),
        tiny_accel_inflex_yx(),
        tiny_accel_fullflex_parallel_yx(),
        tiny16_accel_inflex(),
        tiny16_accel_fullflex_shape(),
        tiny16_accel_partflex_shape_b2(),
        base_accel_inflex(),
        base_accel_fullflex_tile(),
        base_accel_partflex_tile_hard(),
        base_accel_fullflex_order(),
        base_accel_partflex_order(),
        base_accel_fullflex_parallel(),
        base_accel_partflex_parallel(),
        base_accel_fullflex_shape(),
        base_accel_partflex_shape_b4(),
        base_accel_fullflex(),
        gemm_accel_native3(),
        sweep_accel(),
    ]
}

/// Five-layer network covering strided, depthwise, pointwise and
/// fully-connected shapes at hand-checkable sizes.
pub fn toy_cnn() -> Model {
    Model {
        name: "toy_cnn".into(),
        layers: vec![
            Layer::conv2d("conv1", [4, 2, 6, 1, 3, 1], 1),
            Layer::conv2d("conv2_s2", [2, 2, 5, 1, 3, 1], 2),
            Layer::dwconv("dw3", 4, 6, 1, 3, 1, 1),
            Layer::conv2d("pw4", [4, 4, 4, 1, 1, 1], 1),
            Layer::gemm("fc5", 8, 1, 4, GemmEmbedding::Contraction),
        ],
    }
}

/// Three matrix multiplies: square, tall-skinny, and a matrix-vector product
/// with no spatial output at all.
pub fn gemm_toys() -> Model {
    Model {
        name: "gemm_toys".into(),
        layers: vec![
            Layer::gemm("square", 6, 6, 6, GemmEmbedding::Contraction),
            Layer::gemm("tall", 12, 2, 4, GemmEmbedding::Contraction),
            Layer::gemm("matvec", 16, 1, 8, GemmEmbedding::Contraction),
        ],
    }
}

/// Two single-channel convolutions whose only parallelizable extents are a
/// 2x2 output plane. The one way to keep four PEs busy on them is to split
/// that plane across a 2x2 array with output tiles of two, so any machine
/// designed against this model burns those choices into its baseline — and
/// output-plane tiles collapse to one on matrix layers, which is exactly the
/// mismatch the future-proofing experiment measures.
pub fn spatial_convs() -> Model {
    Model {
        name: "spatial_convs".into(),
        layers: vec![
            Layer::conv2d("sconv1", [1, 1, 2, 2, 3, 3], 1),
            Layer::conv2d("sconv2", [1, 1, 2, 2, 1, 1], 1),
        ],
    }
}

/// One residual-network convolution at full size, the conventional
/// large-space stress case for search and counting.
pub fn resnet_conv2_1() -> Model {
    Model {
        name: "resnet_conv2_1".into(),
        layers: vec![Layer::conv2d("conv2_1", [64, 64, 56, 56, 3, 3], 1)],
    }
}

/// Every model fixture.
pub fn all_models() -> Vec<Model> {
    vec![toy_cnn(), gemm_toys(), spatial_convs(), resnet_conv2_1()]
}

fn experiment(
    name: &str,
    kind: ExperimentKind,
    models: Vec<Model>,
    accels: Vec<AcceleratorSpec>,
) -> Experiment {
    let exp = Experiment {
        name: name.into(),
        kind,
        models,
        accels,
        objective: Objective::Runtime,
        seed: 0,
        ga: GaConfig::default(),
        exhaustive_cap: DEFAULT_SEARCH_CAP,
        energy: EnergyParams::default(),
        cost_table: FeatureCostTable::default(),
    };
    debug_assert_eq!(exp.validate(), Ok(()), "fixture {name} must validate");
    exp
}

/// The 4-PE family side by side: rigid reference, one axis opened at a time
/// (with a partially-open step where the axis has one), and everything open.
/// Small enough that every cell is searched exhaustively.
pub fn tiny_isolation_experiment() -> Experiment {
    experiment(
        "tiny-axis-isolation",
        ExperimentKind::AxisIsolation,
        vec![toy_cnn(), gemm_toys()],
        vec![
            tiny_accel_inflex(),
            tiny_accel_fullflex_tile(),
            tiny_accel_partflex_tile_hard(),
            tiny_accel_fullflex_order(),
            tiny_accel_partflex_order(),
            tiny_accel_fullflex_parallel(),
            tiny_accel_partflex_parallel(),
            tiny_accel_fullflex_shape(),
            tiny_accel_fullflex(),
        ],
    )
}

/// Shape bracket on the 16-PE family: rigid, 2x2-block reconfigurable, and
/// freely reconfigurable arrays.
pub fn tiny16_isolation_experiment() -> Experiment {
    experiment(
        "tiny16-shape-isolation",
        ExperimentKind::AxisIsolation,
        vec![toy_cnn(), gemm_toys()],
        vec![
            tiny16_accel_inflex(),
            tiny16_accel_partflex_shape_b2(),
            tiny16_accel_fullflex_shape(),
        ],
    )
}

/// The 1024-PE family on the full-size convolution. The all-open variant's
/// map space is too large to enumerate, so this is the experiment that
/// exercises the genetic searcher alongside exhaustive cells.
pub fn base_isolation_experiment() -> Experiment {
    experiment(
        "base-axis-isolation",
        ExperimentKind::AxisIsolation,
        vec![resnet_conv2_1()],
        vec![
            base_accel_inflex(),
            base_accel_fullflex_tile(),
            base_accel_partflex_tile_hard(),
            base_accel_fullflex_order(),
            base_accel_partflex_order(),
            base_accel_fullflex_parallel(),
            base_accel_partflex_parallel(),
            base_accel_fullflex_shape(),
            base_accel_partflex_shape_b4(),
            base_accel_fullflex(),
        ],
    )
}

/// One tile-only machine re-instantiated across buffer sizes from cramped to
/// generous. Larger buffers admit strictly more tilings, so best runtime can
/// only improve down the grid.
pub fn buffer_sweep_experiment() -> Experiment {
    let tile_only = FlexClass {
        tile: true,
        order: false,
        parallel: false,
        shape: false,
    };
    experiment(
        "buffer-sweep",
        ExperimentKind::BufferSweep {
            sizes: vec![64, 128, 256, 512, 1024, 2048, 4096, 8192],
        },
        vec![toy_cnn(), resnet_conv2_1()],
        vec![sweep_accel().with_class(tile_only)],
    )
}

/// One tile-and-shape machine re-instantiated across array sizes. Once the
/// array outgrows every dimension of a small workload the extra rows fold to
/// nothing and runtime plateaus.
pub fn array_sweep_experiment() -> Experiment {
    let tile_and_shape = FlexClass {
        tile: true,
        order: false,
        parallel: false,
        shape: true,
    };
    experiment(
        "array-sweep",
        ExperimentKind::ArraySweep {
            pe_counts: vec![4, 16, 64, 256, 1024],
        },
        vec![toy_cnn(), gemm_toys()],
        vec![tiny_accel_fullflex().with_class(tile_and_shape)],
    )
}

/// The 4-PE machine re-instantiated in all sixteen flexibility classes, from
/// fully pinned to fully open.
pub fn class_sweep_experiment() -> Experiment {
    experiment(
        "class-sweep",
        ExperimentKind::ClassSweep {
            classes: FlexClass::all().to_vec(),
        },
        vec![toy_cnn(), gemm_toys()],
        vec![tiny_accel_inflex()],
    )
}

/// Designs a 4-PE baseline against the single-channel spatial convolutions,
/// then scores rigid, parallel-open and fully open variants of that design on
/// the matrix workloads it never saw. The deliberately skewed design model
/// makes the rigid variant age badly. The template machine carries twice the
/// tiny family's bandwidth so the comparison stays compute-bound and measures
/// array idling rather than the memory wall.
pub fn future_proof_experiment() -> Experiment {
    let parallel_only = FlexClass {
        tile: false,
        order: false,
        parallel: true,
        shape: false,
    };
    let template = accel(
        "future-base",
        4,
        BufferConfig::soft(64),
        8.0,
        NativeDims::Six,
        fixed(),
        tiny_baseline(),
    );
    experiment(
        "future-proof-toy",
        ExperimentKind::FutureProof {
            design_model: spatial_convs(),
            classes: vec![FlexClass::FIXED, parallel_only, FlexClass::FULL],
        },
        vec![gemm_toys()],
        vec![template],
    )
}

/// Every experiment fixture.
pub fn all_experiments() -> Vec<Experiment> {
    vec![
        tiny_isolation_experiment(),
        tiny16_isolation_experiment(),
        base_isolation_experiment(),
        buffer_sweep_experiment(),
        array_sweep_experiment(),
        class_sweep_experiment(),
        future_proof_experiment(),
    ]
}
