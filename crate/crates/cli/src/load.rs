//! Input loading: JSON files to validated specifications.
//!
//! Every loader reads, parses and validates in one step, so a value that
//! makes it out of this module is ready to use. All failures here are
//! [`CliError::Invalid`] — they describe the inputs, not the run.

use std::env;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use flexion_core::accel::AcceleratorSpec;
use flexion_core::dse::Experiment;
use flexion_core::overhead::FeatureCostTable;
use flexion_core::workload::Model;

use crate::error::CliError;

/// Environment variable naming a JSON file with the default feature cost
/// table, used whenever a command or experiment does not carry one.
pub const COST_TABLE_ENV: &str = "FLEXION_COST_TABLE";

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn invalid(path: &Path, why: impl fmt::Display) -> CliError {
    CliError::Invalid(format!("{}: {why}", path.display()))
}

/// Loads and validates a workload model.
pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let model: Model = parse(path, &read(path)?)?;
    model.validate().map_err(|e| invalid(path, e))?;
    Ok(model)
}

/// Loads and validates an accelerator specification.
pub fn load_accel(path: &Path) -> Result<AcceleratorSpec, CliError> {
    let accel: AcceleratorSpec = parse(path, &read(path)?)?;
    accel.validate().map_err(|e| invalid(path, e))?;
    Ok(accel)
}

/// Resolves the ambient feature cost table: the file named by
/// [`COST_TABLE_ENV`] when set, the built-in defaults otherwise.
pub fn default_cost_table() -> Result<FeatureCostTable, CliError> {
    match env::var_os(COST_TABLE_ENV) {
        None => Ok(FeatureCostTable::default()),
        Some(os_path) => {
            let path = Path::new(&os_path);
            let table: FeatureCostTable = parse(path, &read(path)?)?;
            table.validate().map_err(|e| invalid(path, e))?;
            Ok(table)
        }
    }
}

/// Loads and validates an experiment. When the file omits `cost_table`, the
/// ambient table (see [`default_cost_table`]) fills the gap before
/// deserialization, so the resolved experiment records what it actually ran
/// with.
pub fn load_experiment(path: &Path) -> Result<Experiment, CliError> {
    let mut value: serde_json::Value = parse(path, &read(path)?)?;
    if let Some(map) = value.as_object_mut() {
        if !map.contains_key("cost_table") {
            let table = default_cost_table()?;
            let table = serde_json::to_value(table)
                .expect("a validated cost table always serializes");
            map.insert("cost_table".into(), table);
        }
    }
    let exp: Experiment = serde_json::from_value(value).map_err(|e| invalid(path, e))?;
    exp.validate().map_err(|e| invalid(path, e))?;
    Ok(exp)
}
