//! End-to-end acceptance checks, one per headline property of the
//! workspace. Each criterion prints exactly one PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`, or on failure), and the
//! test fails if any criterion does. Later criteria still run and report
//! when an earlier one fails.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use flexion_core::accel::{
    AcceleratorSpec, BufferConfig, FlexConstraints, NativeDims, TileConstraint,
};
use flexion_core::cost::{dram_traffic, tile_fetches, EnergyParams, Objective};
use flexion_core::dse::{self, Experiment, ExperimentKind, ExperimentResult, SearchMode,
    DEFAULT_SEARCH_CAP};
use flexion_core::fixtures::{
    base_accel_fullflex_parallel, base_accel_inflex, base_accel_partflex_parallel,
    base_accel_partflex_shape_b4, array_sweep_experiment, buffer_sweep_experiment,
    future_proof_experiment, gemm_toys, resnet_conv2_1, tiny16_isolation_experiment,
    tiny_accel_fullflex, tiny_accel_fullflex_tile, tiny_accel_inflex,
    tiny_isolation_experiment, toy_cnn, ORDER_CANONICAL,
};
use flexion_core::ga::{ga_best, random_mapping, GaConfig};
use flexion_core::mapping::{footprint, Mapping, Tensor};
use flexion_core::mapspace::{
    count_parallel, count_shapes, hard_budget_splits, hard_partition_tile_limit,
    soft_budget_splits, stats, SearchDomains, DEFAULT_COUNT_CAP,
};
use flexion_core::oracle::{exhaustive_best, simulate_fetches};
use flexion_core::overhead::FeatureCostTable;
use flexion_core::workload::{Dim, DimVals, Layer};

type Outcome = Result<String, String>;

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("tile-space counting identity", tile_counting_identity),
        ("parallel choice counts", parallel_choice_counts),
        ("block-shape hardware flexion", block_shape_hardware_flexion),
        ("hard-partition tile flexion limit", hard_partition_tile_flexion),
        ("analytic traffic equals loop-nest walk", traffic_matches_loop_nest_walk),
        ("flexibility never hurts best runtime", flexibility_never_hurts_runtime),
        ("genetic search recovers small-space optima", genetic_search_recovers_optima),
        ("buffer and array sweeps are monotone", sweeps_are_monotone),
        ("flexible designs age better", flexible_designs_age_better),
        ("flexibility pays its energy bill", flexibility_pays_its_energy_bill),
        ("reruns are byte-identical", reruns_are_byte_identical),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:2}: PASS — {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:2}: FAIL — {name}: {why}", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}

/// A tile-only machine whose buffer swallows the whole probe layer, so the
/// supported tile set equals the workload's.
fn counting_probe_accel() -> AcceleratorSpec {
    let constraints = FlexConstraints {
        tile: TileConstraint::Flexible,
        ..FlexConstraints::all_fixed()
    };
    let spec = AcceleratorSpec {
        name: "count-probe".into(),
        n_pe: 4,
        buffer: BufferConfig::soft(1 << 21),
        bandwidth: 4.0,
        native_dims: NativeDims::Six,
        flex_class: constraints.implied_class(),
        constraints,
        baseline: Mapping {
            tiles: DimVals([1, 1, 1, 1, 1, 1]),
            order: ORDER_CANONICAL,
            parallel: (Dim::K, Dim::C),
            shape: (2, 2),
        },
    };
    assert_eq!(spec.validate(), Ok(()));
    spec
}

/// The analytic tile count (product of per-dimension divisor counts) must
/// match a literal nested-loop enumeration, and both must say 6912 for the
/// [32, 3, 224, 224, 3, 3] convolution — in under a second.
fn tile_counting_identity() -> Outcome {
    let start = Instant::now();
    let layer = Layer::conv2d("probe", [32, 3, 224, 224, 3, 3], 1);
    let accel = counting_probe_accel();

    let lists: Vec<Vec<u64>> = [32u64, 3, 224, 224, 3, 3]
        .iter()
        .map(|&n| (1..=n).filter(|d| n % d == 0).collect())
        .collect();
    let mut brute: u128 = 0;
    for _ in &lists[0] {
        for _ in &lists[1] {
            for _ in &lists[2] {
                for _ in &lists[3] {
                    for _ in &lists[4] {
                        for _ in &lists[5] {
                            brute += 1;
                        }
                    }
                }
            }
        }
    }

    let counts = stats(&layer, &accel, DEFAULT_COUNT_CAP).per_axis[0];
    let enumerated = SearchDomains::feasible(&layer, &accel).tile_count(&layer, &accel);
    let elapsed = start.elapsed();

    if brute != 6912 || counts.w_count != 6912 || enumerated != 6912 {
        return Err(format!(
            "expected 6912 everywhere, got brute {brute}, analytic {}, enumerated {enumerated}",
            counts.w_count
        ));
    }
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("took {elapsed:?}, budget is 1s"));
    }
    Ok(format!("6912 three ways in {elapsed:?}"))
}

/// With all six dimensions effective, a fully parallel-flexible machine
/// supports all 6x5 = 30 ordered dimension pairs; the pinned machine
/// supports 1 and the two-pair machine 2. Exact equality.
fn parallel_choice_counts() -> Outcome {
    let layer = resnet_conv2_1().layers[0].clone();
    let full = count_parallel(&layer, &base_accel_fullflex_parallel());
    let pinned = count_parallel(&layer, &base_accel_inflex());
    let two = count_parallel(&layer, &base_accel_partflex_parallel());
    let got = (full.a_count, full.c_count, pinned.a_count, two.a_count);
    if got != (30, 30, 1, 2) {
        return Err(format!("(full a, full c, pinned a, two-pair a) = {got:?}, want (30, 30, 1, 2)"));
    }
    Ok("30 of 30 possible pairs supported; pinned 1, two-pair 2".into())
}

/// A 1024-PE array restricted to 4x4 blocks supports 64 of the 1024 possible
/// shapes: hardware flexion exactly 0.0625.
fn block_shape_hardware_flexion() -> Outcome {
    let counts = count_shapes(&base_accel_partflex_shape_b4());
    if counts.a_count != 64 || counts.c_count != 1024 || counts.hw_flexion != 0.0625 {
        return Err(format!(
            "a/c = {}/{} (flexion {}), want 64/1024 = 0.0625",
            counts.a_count, counts.c_count, counts.hw_flexion
        ));
    }
    Ok("64/1024 = 0.0625 exactly".into())
}

/// The counted ratio of hard-1:1:1 to soft budget splits converges to the
/// analytic limit 2/9; within 5% for every buffer size of at least 1000.
fn hard_partition_tile_flexion() -> Outcome {
    let target = hard_partition_tile_limit([1, 1, 1]);
    if (target - 2.0 / 9.0).abs() > 1e-12 {
        return Err(format!("analytic limit {target}, want 2/9"));
    }
    let mut worst: f64 = 0.0;
    for size in [1000u64, 2000, 5000] {
        let ratio = hard_budget_splits(size, [1, 1, 1]) as f64 / soft_budget_splits(size) as f64;
        let off = (ratio - target).abs() / target;
        worst = worst.max(off);
        if off > 0.05 {
            return Err(format!("size {size}: ratio {ratio:.6} is {:.1}% from 2/9", off * 100.0));
        }
    }
    Ok(format!("within {:.2}% of 2/9 for sizes 1000..5000", worst * 100.0))
}

/// On every toy layer, for over a hundred random legal mappings, the closed
/// form for per-tensor DRAM traffic must agree exactly with a literal walk
/// of the tile loop nest: same residency-change count, and traffic equal to
/// fetches times footprint (outputs doubled when revisited).
fn traffic_matches_loop_nest_walk() -> Outcome {
    let start = Instant::now();
    let accel = tiny_accel_fullflex();
    let model = toy_cnn();
    let mut mappings = 0u64;
    for layer in &model.layers {
        for seed in 0..120u64 {
            let m = random_mapping(layer, &accel, seed)
                .ok_or_else(|| format!("{}: empty map space", layer.name))?;
            let traffic = dram_traffic(layer, &m);
            let fp = footprint(layer, &m.tiles)
                .map_err(|e| format!("{}: illegal sample: {e:?}", layer.name))?;
            for t in Tensor::ALL {
                let sim = simulate_fetches(layer, &m, t, 10_000_000)
                    .ok_or_else(|| format!("{}: nest too deep to walk", layer.name))?;
                let analytic = tile_fetches(layer, &m, t);
                if analytic != sim.fetches {
                    return Err(format!(
                        "{} seed {seed} {t:?}: analytic {analytic} fetches, walk saw {}",
                        layer.name, sim.fetches
                    ));
                }
                let mut want = fp.per_tensor()[t.index()] * sim.fetches;
                if t == Tensor::Outputs && traffic.output_doubled {
                    want *= 2;
                }
                if traffic.per_tensor[t.index()] != want {
                    return Err(format!(
                        "{} seed {seed} {t:?}: traffic {} != fetches x footprint {want}",
                        layer.name,
                        traffic.per_tensor[t.index()]
                    ));
                }
            }
            mappings += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 30.0 {
        return Err(format!("took {elapsed:?}, budget is 30s"));
    }
    Ok(format!("{mappings} mappings x 3 tensors, exact, in {elapsed:?}"))
}

fn best_runtime(res: &ExperimentResult, accel: &str, model: &str, layer: &str) -> Result<u64, String> {
    let cell = res
        .cells
        .iter()
        .find(|c| c.accel == accel && c.model == model && c.layer == layer)
        .ok_or_else(|| format!("missing cell {accel}/{model}/{layer}"))?;
    let best = cell
        .best
        .as_ref()
        .ok_or_else(|| format!("stranded cell {accel}/{model}/{layer}"))?;
    Ok(best.report.runtime_cycles)
}

/// Exhaustive best runtimes must respect map-space containment on the small
/// families: everything-open at or below each single-open-axis variant, each
/// of those at or below the pinned machine, and each partially-open variant
/// between the pinned and fully-open ends of its axis. Zero violations.
fn flexibility_never_hurts_runtime() -> Outcome {
    let mut checks = 0u64;
    let mut violations: Vec<String> = Vec::new();

    let mut require = |label: String, lo: u64, hi: u64| {
        checks += 1;
        if lo > hi {
            violations.push(format!("{label}: {lo} > {hi}"));
        }
    };

    let tiny = dse::run(&tiny_isolation_experiment()).map_err(|e| e.to_string())?;
    for cell in &tiny.cells {
        if cell.mode != SearchMode::Exhaustive {
            return Err(format!("cell {}/{} not exhaustive", cell.accel, cell.layer));
        }
    }
    for model in tiny_isolation_experiment().models {
        for layer in &model.layers {
            let rt = |accel: &str| best_runtime(&tiny, accel, &model.name, &layer.name);
            let pinned = rt("tiny-inflex")?;
            let open = rt("tiny-fullflex")?;
            for single in [
                "tiny-fullflex-tile",
                "tiny-fullflex-order",
                "tiny-fullflex-parallel",
                "tiny-fullflex-shape",
            ] {
                let s = rt(single)?;
                require(format!("{}/{single} vs open", layer.name), open, s);
                require(format!("{}/{single} vs pinned", layer.name), s, pinned);
            }
            for (full_axis, part) in [
                ("tiny-fullflex-tile", "tiny-partflex-tile-hard"),
                ("tiny-fullflex-order", "tiny-partflex-order"),
                ("tiny-fullflex-parallel", "tiny-partflex-parallel"),
            ] {
                let f = rt(full_axis)?;
                let p = rt(part)?;
                require(format!("{}/{part} vs {full_axis}", layer.name), f, p);
                require(format!("{}/{part} vs pinned", layer.name), p, pinned);
            }
        }
    }

    let shape = dse::run(&tiny16_isolation_experiment()).map_err(|e| e.to_string())?;
    for model in tiny16_isolation_experiment().models {
        for layer in &model.layers {
            let rt = |accel: &str| best_runtime(&shape, accel, &model.name, &layer.name);
            let pinned = rt("tiny16-inflex")?;
            let blocks = rt("tiny16-partflex-shape-b2")?;
            let free = rt("tiny16-fullflex-shape")?;
            require(format!("{}/shape blocks vs free", layer.name), free, blocks);
            require(format!("{}/shape blocks vs pinned", layer.name), blocks, pinned);
        }
    }

    if !violations.is_empty() {
        return Err(format!("{} of {checks} orderings violated; first: {}", violations.len(), violations[0]));
    }
    Ok(format!("{checks} runtime orderings hold"))
}

/// On map spaces small enough to enumerate, the default genetic search must
/// land on the exhaustive optimum for at least 19 of 20 seeds per instance,
/// and its evaluation count must equal its configured budget, under 10000.
fn genetic_search_recovers_optima() -> Outcome {
    let energy = EnergyParams::default();
    let config = GaConfig::default();
    let budget = config.budget();
    if budget > 10_000 {
        return Err(format!("default budget {budget} exceeds 10000"));
    }

    let fc5 = toy_cnn().layers[4].clone();
    let conv1 = toy_cnn().layers[0].clone();
    let matvec = gemm_toys().layers[2].clone();
    let instances = [
        (fc5, tiny_accel_fullflex()),
        (matvec, tiny_accel_fullflex()),
        (conv1, tiny_accel_fullflex_tile()),
    ];

    let mut detail = Vec::new();
    for (layer, accel) in &instances {
        let points = SearchDomains::feasible(layer, accel).points(layer, accel);
        if points > 2000 {
            return Err(format!("{}/{}: {points} points, want <= 2000", accel.name, layer.name));
        }
        let exact = exhaustive_best(layer, accel, Objective::Runtime, &energy)
            .ok_or_else(|| format!("{}: empty space", layer.name))?;
        let mut hits = 0;
        for seed in 0..20u64 {
            let out = ga_best(layer, accel, Objective::Runtime, &energy, &config, seed)
                .ok_or_else(|| format!("{}: empty space", layer.name))?;
            if out.evaluations != budget {
                return Err(format!(
                    "{} seed {seed}: {} evaluations, budget says {budget}",
                    layer.name, out.evaluations
                ));
            }
            if out.best_value == exact.best_value {
                hits += 1;
            }
        }
        if hits < 19 {
            return Err(format!("{}: optimum hit {hits}/20 seeds, want >= 19", layer.name));
        }
        detail.push(format!("{} {hits}/20 over {points} points", layer.name));
    }
    Ok(format!("{}; budget {budget}", detail.join(", ")))
}

fn sweep_series(res: &ExperimentResult) -> Result<BTreeMap<(String, String), Vec<(u64, u64)>>, String> {
    let mut series: BTreeMap<(String, String), Vec<(u64, u64)>> = BTreeMap::new();
    for cell in &res.cells {
        let sweep = cell
            .sweep
            .ok_or_else(|| format!("cell {}/{} has no sweep point", cell.accel, cell.layer))?;
        let best = cell
            .best
            .as_ref()
            .ok_or_else(|| format!("stranded cell {}/{}", cell.accel, cell.layer))?;
        series
            .entry((cell.model.clone(), cell.layer.clone()))
            .or_default()
            .push((sweep, best.report.runtime_cycles));
    }
    for points in series.values_mut() {
        points.sort();
    }
    Ok(series)
}

/// Growing the buffer only admits more tilings, and growing the array only
/// shrinks compute, so per layer the best runtime must be non-increasing
/// along both sweeps — and the array sweep must visibly saturate once the
/// array outgrows every toy dimension.
fn sweeps_are_monotone() -> Outcome {
    let buffer = dse::run(&buffer_sweep_experiment()).map_err(|e| e.to_string())?;
    let mut checks = 0u64;
    for ((model, layer), points) in sweep_series(&buffer)? {
        for pair in points.windows(2) {
            checks += 1;
            if pair[1].1 > pair[0].1 {
                return Err(format!(
                    "buffer {model}/{layer}: runtime rises {} -> {} at size {}",
                    pair[0].1, pair[1].1, pair[1].0
                ));
            }
        }
    }

    let array = dse::run(&array_sweep_experiment()).map_err(|e| e.to_string())?;
    let mut plateaus = 0u64;
    for ((model, layer), points) in sweep_series(&array)? {
        for pair in points.windows(2) {
            checks += 1;
            if pair[1].1 > pair[0].1 {
                return Err(format!(
                    "array {model}/{layer}: runtime rises {} -> {} at {} PEs",
                    pair[0].1, pair[1].1, pair[1].0
                ));
            }
        }
        let at = |pes: u64| {
            points
                .iter()
                .find(|(s, _)| *s == pes)
                .map(|&(_, rt)| rt)
                .ok_or_else(|| format!("array {model}/{layer}: no point at {pes} PEs"))
        };
        if at(256)? != at(1024)? {
            return Err(format!("array {model}/{layer}: still improving from 256 to 1024 PEs"));
        }
        plateaus += 1;
    }
    Ok(format!("{checks} adjacent steps monotone, {plateaus} layers saturate by 256 PEs"))
}

/// A rigid machine designed against single-channel spatial convolutions must
/// age badly on matrix workloads: the fully flexible variant of the same
/// design wins on geomean, most of all on the matrix-vector layer.
fn flexible_designs_age_better() -> Outcome {
    let exp = future_proof_experiment();
    let res = dse::run(&exp).map_err(|e| e.to_string())?;
    let reference = "future-base-0000";
    let open = "future-base-1111";

    let summary = res
        .summaries
        .iter()
        .find(|s| s.accel == open)
        .ok_or_else(|| format!("no summary for {open}"))?;
    if !(summary.advantage_vs_reference > 1.0) {
        return Err(format!(
            "geomean advantage {} for {open}, want > 1",
            summary.advantage_vs_reference
        ));
    }

    let mut gains = Vec::new();
    for layer in &gemm_toys().layers {
        let rigid = best_runtime(&res, reference, "gemm_toys", &layer.name)? as f64;
        let flexible = best_runtime(&res, open, "gemm_toys", &layer.name)? as f64;
        gains.push((layer.name.clone(), rigid / flexible));
    }
    let best = gains
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three layers");
    if best.0 != "matvec" {
        return Err(format!("largest gain on {} ({:.2}x), want matvec; gains {gains:?}", best.0, best.1));
    }
    Ok(format!(
        "geomean {:.2}x, per-layer gains {}",
        summary.advantage_vs_reference,
        gains
            .iter()
            .map(|(n, g)| format!("{n} {g:.2}x"))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

/// With the default feature prices, opening every axis must still save total
/// energy on at least one toy layer: the flexible machine pays a real
/// per-access adder yet buys back more in DRAM traffic than it spends.
fn flexibility_pays_its_energy_bill() -> Outcome {
    let exp = Experiment {
        name: "energy-bill".into(),
        kind: ExperimentKind::AxisIsolation,
        models: vec![toy_cnn()],
        accels: vec![tiny_accel_inflex(), tiny_accel_fullflex()],
        objective: Objective::Energy,
        seed: 0,
        ga: GaConfig::default(),
        exhaustive_cap: DEFAULT_SEARCH_CAP,
        energy: EnergyParams::default(),
        cost_table: FeatureCostTable::default(),
    };
    let res = dse::run(&exp).map_err(|e| e.to_string())?;

    let adder = res
        .cells
        .iter()
        .find(|c| c.accel == "tiny-fullflex")
        .expect("flexible cells exist")
        .overhead
        .energy_adder_per_access;
    if !(adder > 0.0) {
        return Err(format!("flexible machine's access adder is {adder}, expected a real price"));
    }

    let mut wins = Vec::new();
    for layer in &toy_cnn().layers {
        let cell = |accel: &str| {
            res.cells
                .iter()
                .find(|c| c.accel == accel && c.layer == layer.name)
                .and_then(|c| c.best.as_ref())
                .map(|b| b.report.energy)
                .ok_or_else(|| format!("missing energy for {accel}/{}", layer.name))
        };
        let rigid = cell("tiny-inflex")?;
        let flexible = cell("tiny-fullflex")?;
        if flexible < rigid {
            wins.push(format!("{} {:.1} < {:.1}", layer.name, flexible, rigid));
        }
    }
    if wins.is_empty() {
        return Err("no layer where the flexible machine's total energy beats the rigid one".into());
    }
    Ok(format!("adder {adder:.2}/access; wins on {}", wins.join(", ")))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run_cli_suite(out_root: &Path) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_flexion");
    let root = workspace_root();
    let fixture = |rel: &str| root.join("fixtures").join(rel).display().to_string();
    let out = |sub: &str| out_root.join(sub).display().to_string();

    let runs: Vec<Vec<String>> = vec![
        vec![
            "flexion".into(),
            "--model".into(), fixture("models/gemm_toys.json"),
            "--accel".into(), fixture("accels/tiny-inflex-yx.json"),
            "--out".into(), out("flex"),
            "--format".into(), "both".into(),
        ],
        vec![
            "mse".into(),
            "--model".into(), fixture("models/toy_cnn.json"),
            "--accel".into(), fixture("accels/tiny-fullflex.json"),
            "--seed".into(), "7".into(),
            "--jobs".into(), "2".into(),
            "--out".into(), out("mse"),
            "--format".into(), "both".into(),
        ],
        vec![
            "dse".into(),
            "--experiment".into(), fixture("experiments/future-proof-toy.json"),
            "--jobs".into(), "2".into(),
            "--out".into(), out("dse"),
            "--format".into(), "both".into(),
        ],
        vec![
            "report".into(), out("dse"),
            "--out".into(), out("rep"),
            "--format".into(), "both".into(),
        ],
    ];
    for args in runs {
        let output = Command::new(bin)
            .args(&args)
            .env_remove(flexion_cli::load::COST_TABLE_ENV)
            .output()
            .map_err(|e| format!("spawning {bin}: {e}"))?;
        if !output.status.success() {
            return Err(format!(
                "`flexion {}` failed: {}",
                args.join(" "),
                String::from_utf8_lossy(&output.stderr)
            ));
        }
    }
    Ok(())
}

fn collect_files(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            let rel = path
                .strip_prefix(root)
                .expect("walk stays under root")
                .to_string_lossy()
                .into_owned();
            out.insert(rel, fs::read(&path)?);
        }
    }
    Ok(())
}

/// Every CLI command, rerun with identical inputs and seeds (including the
/// threaded paths and the seeded design search), must write byte-identical
/// files.
fn reruns_are_byte_identical() -> Outcome {
    let dir_a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir_b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_cli_suite(dir_a.path())?;
    run_cli_suite(dir_b.path())?;

    let mut files_a = BTreeMap::new();
    let mut files_b = BTreeMap::new();
    collect_files(dir_a.path(), dir_a.path(), &mut files_a).map_err(|e| e.to_string())?;
    collect_files(dir_b.path(), dir_b.path(), &mut files_b).map_err(|e| e.to_string())?;

    let names_a: Vec<&String> = files_a.keys().collect();
    let names_b: Vec<&String> = files_b.keys().collect();
    if names_a != names_b {
        return Err(format!("file sets differ: {names_a:?} vs {names_b:?}"));
    }
    if files_a.len() < 10 {
        return Err(format!("only {} files written, expected the full suite", files_a.len()));
    }
    for (name, bytes) in &files_a {
        if files_b[name] != *bytes {
            return Err(format!("{name} differs between reruns"));
        }
    }
    Ok(format!("{} files byte-identical across reruns", files_a.len()))
}
