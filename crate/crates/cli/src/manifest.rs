//! Run manifests: the fully resolved inputs of one CLI run, in the same
//! `key = value` format as simulation configs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use wsnsec_core::sim::parse_kv;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    pub subcommand: String,
    pub tool_version: String,
    pub master_seed: Option<u64>,
    /// `(role, path)`; roles are `output` and `plot`.
    pub outputs: Vec<(String, PathBuf)>,
    /// Resolved flags, written as `arg.<name>`.
    pub args: Vec<(String, String)>,
    /// Simulation config, written as `config.<key>`.
    pub config: Vec<(String, String)>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut s = format!("subcommand = {}\ntool_version = {}\n", self.subcommand, self.tool_version);
        if let Some(seed) = self.master_seed {
            s.push_str(&format!("master_seed = {seed}\n"));
        }
        for (role, p) in &self.outputs {
            s.push_str(&format!("{role} = {}\n", p.display()));
        }
        for (k, v) in &self.args {
            s.push_str(&format!("arg.{k} = {v}\n"));
        }
        for (k, v) in &self.config {
            s.push_str(&format!("config.{k} = {v}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let map = parse_kv(text).map_err(|e| CliError::Runtime(format!("manifest: {e}")))?;
        let mut m = Manifest::default();
        for (k, v) in map {
            if let Some(name) = k.strip_prefix("arg.") {
                m.args.push((name.to_string(), v));
            } else if let Some(name) = k.strip_prefix("config.") {
                m.config.push((name.to_string(), v));
            } else {
                match k.as_str() {
                    "subcommand" => m.subcommand = v,
                    "tool_version" => m.tool_version = v,
                    "master_seed" => {
                        m.master_seed = Some(
                            v.parse()
                                .map_err(|_| CliError::Runtime(format!("manifest: bad master_seed `{v}`")))?,
                        )
                    }
                    "output" | "plot" => m.outputs.push((k, PathBuf::from(v))),
                    other => return Err(CliError::Runtime(format!("manifest: unknown key `{other}`"))),
                }
            }
        }
        if m.subcommand.is_empty() {
            return Err(CliError::Runtime("manifest: missing subcommand".into()));
        }
        Ok(m)
    }

    pub fn output(&self, role: &str) -> Option<&Path> {
        self.outputs.iter().find(|(r, _)| r == role).map(|(_, p)| p.as_path())
    }

    pub fn arg_map(&self) -> BTreeMap<&str, &str> {
        self.args.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
    }
}

/// Where the manifest for an output file goes.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}
