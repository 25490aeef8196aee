//! Run manifests: a TOML sidecar recording what produced each data file.

use granular_core::dsmc::SimulationConfig;
use std::fmt::Write as _;
use std::path::Path;

pub struct ManifestBuilder {
    seed: u64,
    config_echo: String,
    started: String,
    outputs: Vec<String>,
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl ManifestBuilder {
    pub fn new(config: &SimulationConfig) -> ManifestBuilder {
        ManifestBuilder {
            seed: config.seed,
            config_echo: format!("{config:?}"),
            started: now_rfc3339(),
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Render the manifest; `finished` is stamped at render time.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "code_version = {:?}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "started = {:?}", self.started);
        let _ = writeln!(out, "finished = {:?}", now_rfc3339());
        let _ = writeln!(out, "config = {:?}", self.config_echo);
        let _ = writeln!(out, "outputs = [");
        for o in &self.outputs {
            let _ = writeln!(out, "  {o:?},");
        }
        let _ = writeln!(out, "]");
        out
    }
}
