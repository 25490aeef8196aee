pub mod fit;
pub mod inequalities;
pub mod report;
pub mod run;
pub mod thresholds;
pub mod validate_model;

use crate::GlobalArgs;
use std::path::PathBuf;

/// Resolve an output path against `--out-dir` (creating the directory).
pub fn out_path(global: &GlobalArgs, name: &str) -> Result<PathBuf, String> {
    let dir = global.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    Ok(dir.join(name))
}
