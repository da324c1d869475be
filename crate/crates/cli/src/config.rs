// Copyright 2026 The tbldt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! `key=value` config files and run manifests.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::CommandFactory;
use serde::{Deserialize, Serialize};

use crate::{Cli, Command, Usage};

/// Reads `key = value` lines. `#` starts a comment; keys are flag names,
/// case-insensitive, with `_` and `-` interchangeable.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(Usage(format!("config line {}: expected key=value, got `{raw}`", n + 1)));
        };
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        if key.is_empty() {
            bail!(Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Result<Option<PathBuf>> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it.next().ok_or_else(|| Usage("--config needs a path".into()))?;
            return Ok(Some(PathBuf::from(p)));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

/// Splices the config file named by `--config` into `args` as flags placed
/// right after the subcommand, so flags given on the command line win.
/// Keys the chosen subcommand does not take are ignored; keys no
/// subcommand takes are an error.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    let entries = parse_config(&text)?;
    let root = Cli::command();
    let Some((pos, sub)) =
        args.iter().enumerate().skip(1).find_map(|(i, a)| root.find_subcommand(a).map(|s| (i, s.clone())))
    else {
        return Ok(args);
    };
    let takes = |cmd: &clap::Command, key: &str| cmd.get_arguments().any(|a| a.get_long() == Some(key));
    let mut flags = Vec::new();
    for (key, value) in entries {
        if matches!(key.as_str(), "config" | "workers" | "manifest") {
            if key == "workers" {
                flags.extend([format!("--{key}"), value]);
            }
            continue;
        }
        let known = root.get_subcommands().any(|s| takes(s, &key) || takes(s, &format!("no-{key}")));
        if !known {
            bail!(Usage(format!("{}: unknown key `{key}`", path.display())));
        }
        match value.as_str() {
            "true" | "false" => {
                let flag = if value == "true" { key.clone() } else { format!("no-{key}") };
                if takes(&sub, &flag) {
                    flags.push(format!("--{flag}"));
                } else if takes(&sub, &key) {
                    flags.extend([format!("--{key}"), value]);
                }
            }
            _ if takes(&sub, &key) => flags.extend([format!("--{key}"), value]),
            _ => {}
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, flags);
    Ok(out)
}

/// Everything needed to re-run a command. Paths are stored as given.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
}

impl Manifest {
    pub fn new(command: Command) -> Manifest {
        Manifest { tool: "tbldt".into(), version: env!("CARGO_PKG_VERSION").into(), command }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
    }
}

/// `model.rules` becomes `model.rules.manifest.json`.
pub fn default_manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
