//! Run manifests: the recorded command, every input file embedded in base64,
//! and a digest of every output. `rerun` restores the inputs into a scratch
//! directory, executes the command again and compares digests.

use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{Command, RerunArgs};
use crate::commands::{execute, read_json};
use crate::error::{CliError, CliResult};

pub const MANIFEST_FORMAT: &str = "lspde-manifest 1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    pub command: Command,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<OutputRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputRecord {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
    pub content_base64: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Execute `cmd` and, when it names a manifest path, record the run there.
pub fn run_recorded(mut cmd: Command) -> CliResult<String> {
    cmd.resolve_defaults();
    let mut inputs = Vec::new();
    for (role, path) in cmd.inputs_mut() {
        let bytes = read(path)?;
        inputs.push(InputRecord {
            role: role.to_string(),
            path: path.clone(),
            sha256: sha256_hex(&bytes),
            content_base64: B64.encode(&bytes),
        });
    }
    let stdout = execute(&cmd)?;
    let manifest_path = cmd.manifest_mut().and_then(|m| m.clone());
    if let Some(manifest_path) = manifest_path {
        let mut outputs = Vec::new();
        for path in cmd.outputs_mut() {
            outputs.push(OutputRecord {
                path: path.clone(),
                sha256: sha256_hex(&read(path)?),
            });
        }
        let manifest = Manifest {
            format: MANIFEST_FORMAT.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: cmd,
            inputs,
            outputs,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(&manifest_path, text + "\n").map_err(|e| CliError::io(&manifest_path, e))?;
    }
    Ok(stdout)
}

pub fn rerun(args: &RerunArgs) -> CliResult<String> {
    let manifest: Manifest = read_json(&args.manifest, "manifest")?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(CliError::Config(format!("unknown manifest format {:?}", manifest.format)));
    }
    let mut cmd = manifest.command;
    let scratch = tempfile::tempdir().map_err(|e| CliError::io(Path::new("scratch directory"), e))?;
    {
        let slots = cmd.inputs_mut();
        if slots.len() != manifest.inputs.len() {
            return Err(CliError::Config("manifest inputs do not match its command".into()));
        }
        for (i, ((role, path), rec)) in slots.into_iter().zip(&manifest.inputs).enumerate() {
            if role != rec.role {
                return Err(CliError::Config(format!("manifest input {i} has role {}, expected {role}", rec.role)));
            }
            let bytes = B64
                .decode(&rec.content_base64)
                .map_err(|e| CliError::Config(format!("input {role}: {e}")))?;
            if sha256_hex(&bytes) != rec.sha256 {
                return Err(CliError::Config(format!("input {role}: embedded content does not match its digest")));
            }
            let name = rec.path.file_name().map_or_else(|| role.into(), |n| n.to_os_string());
            let restored = scratch.path().join(format!("{i}-{}", name.to_string_lossy()));
            std::fs::write(&restored, &bytes).map_err(|e| CliError::io(&restored, e))?;
            *path = restored;
        }
    }
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for path in cmd.outputs_mut() {
            let name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
            *path = dir.join(name);
        }
    }
    if let Some(m) = cmd.manifest_mut() {
        *m = None;
    }
    let mut stdout = execute(&cmd)?;
    let mut mismatches = Vec::new();
    for (path, rec) in cmd.outputs_mut().into_iter().zip(&manifest.outputs) {
        let digest = sha256_hex(&read(path)?);
        if digest == rec.sha256 {
            stdout.push_str(&format!("reproduced {}\n", path.display()));
        } else {
            mismatches.push(path.display().to_string());
        }
    }
    if mismatches.is_empty() {
        Ok(stdout)
    } else {
        Err(CliError::Mismatch(mismatches.join(", ")))
    }
}
