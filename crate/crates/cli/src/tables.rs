//! CSV views of results.
//!
//! Every file begins with a `#`-prefixed version comment, then a header
//! row; the comment names the table and the schema version so downstream
//! scripts can check compatibility before parsing. Floating-point cells
//! print with six fixed decimals and counts print as plain integers, so
//! identical runs produce identical bytes.

use flexion_core::accel::Axis;
use flexion_core::dse::{
    AccelSummary, CellResult, ExperimentResult, ModelTotals, SearchMode,
};
use flexion_core::mapping::Mapping;
use flexion_core::mapspace::VennReport;

use crate::records::{FlexionRecord, MetricMatrix, SCHEMA_VERSION};

/// Fixed-precision rendering used for every floating-point cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.6}")
}

fn axis_label(axis: Axis) -> &'static str {
    match axis {
        Axis::Tile => "tile",
        Axis::Order => "order",
        Axis::Parallel => "parallel",
        Axis::Shape => "shape",
    }
}

fn mode_label(mode: SearchMode) -> &'static str {
    match mode {
        SearchMode::Exhaustive => "exhaustive",
        SearchMode::Genetic => "genetic",
    }
}

fn tiles_label(m: &Mapping) -> String {
    let t = m.tiles.0;
    format!("{}x{}x{}x{}x{}x{}", t[0], t[1], t[2], t[3], t[4], t[5])
}

fn order_label(m: &Mapping) -> String {
    m.order.iter().map(|d| d.name()).collect()
}

fn writer(kind: &str) -> csv::Writer<Vec<u8>> {
    let mut buf = Vec::new();
    buf.extend_from_slice(format!("# flexion {kind} schema v{SCHEMA_VERSION}\n").as_bytes());
    csv::Writer::from_writer(buf)
}

fn finish(mut w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    // Writing into a Vec cannot fail; flush only moves bytes out of the
    // csv writer's internal buffer.
    w.flush().expect("in-memory csv write");
    w.into_inner().expect("in-memory csv write")
}

type Record = Vec<String>;

fn s(v: impl ToString) -> String {
    v.to_string()
}

/// Per-layer, per-axis counting table for one (model, accelerator) pair.
pub fn flexion_csv(record: &FlexionRecord) -> Vec<u8> {
    let mut w = writer("per-layer counts");
    w.write_record([
        "model",
        "accel",
        "layer",
        "axis",
        "workload",
        "supported",
        "potential",
        "hw_flexion",
        "wl_flexion",
        "verifiable",
    ])
    .expect("in-memory csv write");
    for lf in &record.layers {
        for counts in &lf.stats.per_axis {
            let row: Record = vec![
                record.model.name.clone(),
                record.accel.name.clone(),
                lf.layer.clone(),
                axis_label(counts.axis).into(),
                s(counts.w_count),
                s(counts.a_count),
                s(counts.c_count),
                fmt_f64(counts.hw_flexion),
                fmt_f64(counts.wl_flexion),
                "true".into(),
            ];
            w.write_record(&row).expect("in-memory csv write");
        }
        let row: Record = vec![
            record.model.name.clone(),
            record.accel.name.clone(),
            lf.layer.clone(),
            "combined".into(),
            s(lf.stats.combined_w),
            s(lf.stats.combined_a),
            String::new(),
            String::new(),
            fmt_f64(lf.stats.combined_wl_flexion),
            s(lf.stats.combined_verifiable),
        ];
        w.write_record(&row).expect("in-memory csv write");
    }
    finish(w)
}

/// Set-size table backing scaled three-way diagrams: one row per axis plus
/// a combined row, for each listed (accel, model, layer) triple.
pub fn venn_csv(rows: &[(String, String, String, VennReport)]) -> Vec<u8> {
    let mut w = writer("venn counts");
    w.write_record([
        "accel",
        "model",
        "layer",
        "axis",
        "workload",
        "supported",
        "potential",
    ])
    .expect("in-memory csv write");
    for (accel, model, layer, venn) in rows {
        for (axis, counts) in &venn.per_axis {
            let row: Record = vec![
                accel.clone(),
                model.clone(),
                layer.clone(),
                axis_label(*axis).into(),
                s(counts.workload),
                s(counts.supported),
                s(counts.potential),
            ];
            w.write_record(&row).expect("in-memory csv write");
        }
        let row: Record = vec![
            accel.clone(),
            model.clone(),
            layer.clone(),
            "combined".into(),
            s(venn.combined.workload),
            s(venn.combined.supported),
            s(venn.combined.potential),
        ];
        w.write_record(&row).expect("in-memory csv write");
    }
    finish(w)
}

/// Full per-cell dump: search mode, space size, best mapping and its costs.
/// Stranded cells (no feasible mapping) leave the best-dependent columns
/// empty.
pub fn cells_csv(cells: &[CellResult]) -> Vec<u8> {
    let mut w = writer("cells");
    w.write_record([
        "accel",
        "model",
        "layer",
        "sweep",
        "mode",
        "feasible_points",
        "evaluations",
        "best_value",
        "runtime_cycles",
        "compute_cycles",
        "dram_traffic",
        "buffer_accesses",
        "macs",
        "utilization",
        "energy",
        "edp",
        "tiles",
        "order",
        "parallel",
        "shape",
    ])
    .expect("in-memory csv write");
    for cell in cells {
        let mut row: Record = vec![
            cell.accel.clone(),
            cell.model.clone(),
            cell.layer.clone(),
            cell.sweep.map_or(String::new(), s),
            mode_label(cell.mode).into(),
            s(cell.feasible_points),
        ];
        match &cell.best {
            Some(b) => {
                let m = &b.mapping;
                row.extend([
                    s(b.evaluations),
                    fmt_f64(b.value),
                    s(b.report.runtime_cycles),
                    s(b.report.compute_cycles),
                    s(b.report.dram_traffic),
                    s(b.report.buffer_accesses),
                    s(b.report.macs),
                    fmt_f64(b.report.utilization),
                    fmt_f64(b.report.energy),
                    fmt_f64(b.report.edp),
                    tiles_label(m),
                    order_label(m),
                    format!("{}-{}", m.parallel.0.name(), m.parallel.1.name()),
                    format!("{}x{}", m.shape.0, m.shape.1),
                ]);
            }
            None => row.extend(std::iter::repeat(String::new()).take(14)),
        }
        w.write_record(&row).expect("in-memory csv write");
    }
    finish(w)
}

/// Whole-model totals per variant, with ratios against the reference.
pub fn totals_csv(totals: &[ModelTotals]) -> Vec<u8> {
    let mut w = writer("model totals");
    w.write_record([
        "accel",
        "model",
        "runtime_cycles",
        "energy",
        "edp",
        "relative_runtime",
        "relative_energy",
        "relative_edp",
    ])
    .expect("in-memory csv write");
    for t in totals {
        let row: Record = vec![
            t.accel.clone(),
            t.model.clone(),
            fmt_f64(t.runtime_cycles),
            fmt_f64(t.energy),
            fmt_f64(t.edp),
            fmt_f64(t.relative_runtime),
            fmt_f64(t.relative_energy),
            fmt_f64(t.relative_edp),
        ];
        w.write_record(&row).expect("in-memory csv write");
    }
    finish(w)
}

/// Per-variant aggregates across every cell.
pub fn summaries_csv(summaries: &[AccelSummary]) -> Vec<u8> {
    let mut w = writer("summaries");
    w.write_record(["accel", "geomean_value", "advantage_vs_reference"])
        .expect("in-memory csv write");
    for sm in summaries {
        let row: Record = vec![
            sm.accel.clone(),
            fmt_f64(sm.geomean_value),
            fmt_f64(sm.advantage_vs_reference),
        ];
        w.write_record(&row).expect("in-memory csv write");
    }
    finish(w)
}

fn geomean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Builds the three normalized model-by-variant matrices from a result's
/// totals: every entry is the variant's total divided by the reference
/// variant's total for the same model, and each matrix carries a final
/// geometric-mean row across models.
pub fn normalized_matrices(result: &ExperimentResult) -> Vec<MetricMatrix> {
    let mut variants: Vec<&str> = Vec::new();
    let mut models: Vec<&str> = Vec::new();
    for t in &result.totals {
        if !variants.contains(&t.accel.as_str()) {
            variants.push(&t.accel);
        }
        if !models.contains(&t.model.as_str()) {
            models.push(&t.model);
        }
    }
    let metrics: [(&str, fn(&ModelTotals) -> f64); 3] = [
        ("runtime", |t| t.relative_runtime),
        ("energy", |t| t.relative_energy),
        ("edp", |t| t.relative_edp),
    ];
    metrics
        .iter()
        .map(|(metric, pick)| {
            let values: Vec<Vec<f64>> = models
                .iter()
                .map(|&model| {
                    variants
                        .iter()
                        .map(|&variant| {
                            result
                                .totals
                                .iter()
                                .find(|t| t.accel == variant && t.model == model)
                                .map_or(f64::NAN, pick)
                        })
                        .collect()
                })
                .collect();
            let geomean: Vec<f64> = (0..variants.len())
                .map(|j| {
                    let column: Vec<f64> = values.iter().map(|row| row[j]).collect();
                    self::geomean(&column)
                })
                .collect();
            MetricMatrix {
                metric: (*metric).into(),
                variants: variants.iter().map(|&v| v.into()).collect(),
                models: models.iter().map(|&m| m.into()).collect(),
                values,
                geomean,
            }
        })
        .collect()
}

/// Renders one normalized matrix as CSV: models as rows, variants as
/// columns, a geometric-mean row appended.
pub fn matrix_csv(matrix: &MetricMatrix) -> Vec<u8> {
    let mut w = writer(&format!("normalized {} matrix", matrix.metric));
    let mut header: Record = vec!["model".into()];
    header.extend(matrix.variants.iter().cloned());
    w.write_record(&header).expect("in-memory csv write");
    for (model, row) in matrix.models.iter().zip(&matrix.values) {
        let mut record: Record = vec![model.clone()];
        record.extend(row.iter().map(|&v| fmt_f64(v)));
        w.write_record(&record).expect("in-memory csv write");
    }
    let mut record: Record = vec!["geomean".into()];
    record.extend(matrix.geomean.iter().map(|&v| fmt_f64(v)));
    w.write_record(&record).expect("in-memory csv write");
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flexion_core::cost::Objective;
    use flexion_core::dse::{run, Experiment, ExperimentKind};
    use flexion_core::fixtures;
    use flexion_core::mapspace::{stats, venn_report, DEFAULT_COUNT_CAP};
    use flexion_core::workload::Dim;

    use crate::records::{FlexionRecord, LayerFlexion};

    fn tiny_result() -> ExperimentResult {
        let exp = Experiment {
            name: "table-test".into(),
            kind: ExperimentKind::AxisIsolation,
            models: vec![fixtures::gemm_toys()],
            accels: vec![
                fixtures::tiny_accel_inflex(),
                fixtures::tiny_accel_fullflex_parallel(),
            ],
            objective: Objective::Runtime,
            seed: 11,
            ga: Default::default(),
            exhaustive_cap: flexion_core::dse::DEFAULT_SEARCH_CAP,
            energy: Default::default(),
            cost_table: Default::default(),
        };
        run(&exp).unwrap()
    }

    #[test]
    fn every_table_is_versioned_and_rectangular() {
        let result = tiny_result();
        let model = fixtures::gemm_toys();
        let accel = fixtures::tiny_accel_inflex();
        let record = FlexionRecord {
            schema_version: SCHEMA_VERSION,
            layers: model
                .layers
                .iter()
                .map(|l| LayerFlexion {
                    layer: l.name.clone(),
                    stats: stats(l, &accel, DEFAULT_COUNT_CAP),
                    venn: venn_report(l, &accel),
                })
                .collect(),
            model,
            accel,
        };
        let venn_rows: Vec<(String, String, String, VennReport)> = record
            .layers
            .iter()
            .map(|lf| {
                (
                    record.accel.name.clone(),
                    record.model.name.clone(),
                    lf.layer.clone(),
                    lf.venn,
                )
            })
            .collect();

        let tables = [
            flexion_csv(&record),
            venn_csv(&venn_rows),
            cells_csv(&result.cells),
            totals_csv(&result.totals),
            summaries_csv(&result.summaries),
            matrix_csv(&normalized_matrices(&result)[0]),
        ];
        for bytes in &tables {
            let text = String::from_utf8(bytes.clone()).unwrap();
            let mut lines = text.lines();
            let comment = lines.next().unwrap();
            assert!(comment.starts_with("# flexion "), "{comment}");
            assert!(comment.ends_with(&format!("schema v{SCHEMA_VERSION}")), "{comment}");
            let width = lines.next().unwrap().split(',').count();
            for line in lines {
                assert_eq!(line.split(',').count(), width, "ragged row: {line}");
            }
        }
    }

    #[test]
    fn reference_column_of_normalized_matrices_is_all_ones() {
        let result = tiny_result();
        for matrix in normalized_matrices(&result) {
            for row in &matrix.values {
                assert!((row[0] - 1.0).abs() < 1e-12, "{}: {row:?}", matrix.metric);
            }
            assert!((matrix.geomean[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mapping_labels_are_compact_and_unambiguous() {
        let m = Mapping {
            tiles: flexion_core::workload::DimVals([4, 2, 6, 1, 3, 1]),
            order: [Dim::K, Dim::C, Dim::Y, Dim::X, Dim::R, Dim::S],
            parallel: (Dim::K, Dim::C),
            shape: (2, 2),
        };
        assert_eq!(tiles_label(&m), "4x2x6x1x3x1");
        assert_eq!(order_label(&m), "KCYXRS");
    }

    #[test]
    fn float_cells_use_six_fixed_decimals() {
        assert_eq!(fmt_f64(1.0), "1.000000");
        assert_eq!(fmt_f64(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    proptest::proptest! {
        /// Fixed-precision cells always carry exactly six fractional digits,
        /// parse back to within half a unit in the last printed place, and
        /// re-render identically — the stability the byte-for-byte output
        /// guarantee rests on.
        #[test]
        fn float_cells_round_trip_stably(v in -1.0e9f64..1.0e9) {
            let cell = fmt_f64(v);
            let (_, frac) = cell.split_once('.').expect("finite cells have a point");
            proptest::prop_assert_eq!(frac.len(), 6);
            let parsed: f64 = cell.parse().unwrap();
            proptest::prop_assert!((parsed - v).abs() <= 5.0e-7 + v.abs() * 1.0e-12);
            proptest::prop_assert_eq!(fmt_f64(parsed), cell);
        }
    }
}
