//! Keeps the JSON files shipped under `fixtures/` in lockstep with the
//! built-in constructors in `flexion_core::fixtures`.
//!
//! After editing a constructor, refresh the files with
//!
//! ```text
//! cargo test -p flexion-cli --test fixture_files -- --ignored regenerate
//! ```
//!
//! and commit the result. The always-on tests below then guarantee the
//! shipped files can never drift from what the test suite exercises.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use flexion_cli::load;
use flexion_core::fixtures::{all_accels, all_experiments, all_models};
use flexion_core::overhead::FeatureCostTable;
use serde::Serialize;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("fixtures serialize");
    text.push('\n');
    text
}

#[test]
#[ignore = "rewrites fixtures/ from the constructors; run after editing them"]
fn regenerate() {
    let root = fixtures_dir();
    let write = |sub: &str, name: &str, text: String| {
        let dir = root.join(sub);
        fs::create_dir_all(&dir).expect("create fixture dir");
        fs::write(dir.join(format!("{name}.json")), text).expect("write fixture file");
    };
    for model in all_models() {
        write("models", &model.name, pretty(&model));
    }
    for accel in all_accels() {
        write("accels", &accel.name, pretty(&accel));
    }
    for exp in all_experiments() {
        write("experiments", &exp.name, pretty(&exp));
    }
    write("cost", "default_cost_table", pretty(&FeatureCostTable::default()));
}

#[test]
fn shipped_files_match_the_constructors() {
    let root = fixtures_dir();
    for model in all_models() {
        let path = root.join("models").join(format!("{}.json", model.name));
        let loaded =
            load::load_model(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(loaded, model, "{}", path.display());
    }
    for accel in all_accels() {
        let path = root.join("accels").join(format!("{}.json", accel.name));
        let loaded =
            load::load_accel(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(loaded, accel, "{}", path.display());
    }
    for exp in all_experiments() {
        let path = root.join("experiments").join(format!("{}.json", exp.name));
        let loaded =
            load::load_experiment(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(loaded, exp, "{}", path.display());
    }
    let path = root.join("cost").join("default_cost_table.json");
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let loaded: FeatureCostTable = serde_json::from_str(&text).expect("cost table parses");
    assert_eq!(loaded, FeatureCostTable::default());
}

/// Every file on disk corresponds to a constructor, so renames cannot leave
/// stale copies behind.
#[test]
fn shipped_files_have_no_strays() {
    let root = fixtures_dir();
    let listed = |sub: &str| -> BTreeSet<String> {
        fs::read_dir(root.join(sub))
            .unwrap_or_else(|e| panic!("{sub}: {e}"))
            .map(|entry| entry.expect("fixture dir entry").file_name().into_string().unwrap())
            .collect()
    };
    let expected = |names: Vec<String>| -> BTreeSet<String> {
        names.into_iter().map(|n| format!("{n}.json")).collect()
    };

    let models = all_models().into_iter().map(|m| m.name).collect();
    assert_eq!(listed("models"), expected(models));
    let accels = all_accels().into_iter().map(|a| a.name).collect();
    assert_eq!(listed("accels"), expected(accels));
    let experiments = all_experiments().into_iter().map(|e| e.name).collect();
    assert_eq!(listed("experiments"), expected(experiments));
    assert_eq!(listed("cost"), expected(vec!["default_cost_table".into()]));
}
