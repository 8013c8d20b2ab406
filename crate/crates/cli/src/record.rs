//! Result records, config hashing, and the on-disk result cache.
//!
//! Every run emits exactly one NDJSON line: a [`ResultRecord`] echoing the
//! resolved configuration, a content hash of it, the outputs, and run
//! metadata. The hash covers the command name, the config echo, and the
//! tool version, so a cached record is reused only for a byte-identical
//! question asked of the same binary version. `serde_json` maps are
//! BTree-backed here (no `preserve_order` feature), which makes the
//! serialized form canonical: keys are always sorted.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// One completed run, serialized as a single JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    /// Fully resolved inputs: measure files and system files are inlined,
    /// so the record is self-describing and the hash is content-keyed.
    pub config: Value,
    /// Hex SHA-256 of `{command, config, tool_version}` in canonical JSON.
    pub config_hash: String,
    pub tool_version: String,
    pub outputs: Value,
    pub wall_clock_seconds: f64,
    /// Whether `outputs` was replayed from the cache.
    pub cache_hit: bool,
}

/// Content hash of a resolved configuration. Two invocations get the same
/// hash exactly when they would compute the same thing.
pub fn config_hash(command: &str, config: &Value, tool_version: &str) -> String {
    let canonical = json!({
        "command": command,
        "config": config,
        "tool_version": tool_version,
    });
    let bytes = serde_json::to_vec(&canonical).expect("config serialization cannot fail");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache directory precedence: `--cache-dir` flag, then the
/// `WALKLAB_CACHE_DIR` environment variable, then a fixed subdirectory of
/// the system temp dir.
pub fn cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os("WALKLAB_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    std::env::temp_dir().join("walklab-cache")
}

fn cache_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("{hash}.json"))
}

/// Loads a cached record for this hash, if one exists and is intact.
/// Any read or parse problem is treated as a miss, never an error.
pub fn cache_load(dir: &Path, hash: &str) -> Option<ResultRecord> {
    let bytes = fs::read(cache_path(dir, hash)).ok()?;
    let record: ResultRecord = serde_json::from_slice(&bytes).ok()?;
    if record.config_hash != hash {
        return None;
    }
    Some(record)
}

/// Stores a record under its hash, atomically: write a temp file in the
/// same directory, then rename over the final name. A concurrent reader
/// sees either no file or a complete one. Failure to cache is reported on
/// stderr but never fails the run.
pub fn cache_store(dir: &Path, record: &ResultRecord) {
    let attempt = (|| -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(
            "{}.json.tmp.{}",
            record.config_hash,
            std::process::id()
        ));
        fs::write(&tmp, serde_json::to_vec(record).expect("record serialization cannot fail"))?;
        fs::rename(&tmp, cache_path(dir, &record.config_hash))?;
        Ok(())
    })();
    if let Err(e) = attempt {
        eprintln!("warning: could not write cache entry: {e}");
    }
}

/// Emits the record as one JSON line: appended to `out` when given,
/// printed to stdout otherwise.
pub fn emit(record: &ResultRecord, out: Option<&Path>) -> Result<(), CliError> {
    let line = serde_json::to_string(record).expect("record serialization cannot fail");
    match out {
        Some(path) => {
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
            writeln!(file, "{line}").map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e,
            })
        }
        None => {
            println!("{line}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_key_order_independent() {
        let a = json!({"group": "free:2", "max_n": 8});
        let b = json!({"max_n": 8, "group": "free:2"});
        assert_eq!(config_hash("growth", &a, "0.1.0"), config_hash("growth", &b, "0.1.0"));
        assert_eq!(config_hash("growth", &a, "0.1.0").len(), 64);
    }

    #[test]
    fn hash_separates_command_config_and_version() {
        let cfg = json!({"group": "free:2"});
        let base = config_hash("growth", &cfg, "0.1.0");
        assert_ne!(base, config_hash("drift", &cfg, "0.1.0"));
        assert_ne!(base, config_hash("growth", &json!({"group": "free:3"}), "0.1.0"));
        assert_ne!(base, config_hash("growth", &cfg, "0.2.0"));
    }

    #[test]
    fn cache_round_trips_a_record() {
        let dir = std::env::temp_dir().join(format!("walklab-record-test-{}", std::process::id()));
        let record = ResultRecord {
            command: "growth".into(),
            config: json!({"group": "free:2"}),
            config_hash: config_hash("growth", &json!({"group": "free:2"}), "0.1.0"),
            tool_version: "0.1.0".into(),
            outputs: json!({"spheres": [1, 4]}),
            wall_clock_seconds: 0.5,
            cache_hit: false,
        };
        cache_store(&dir, &record);
        let loaded = cache_load(&dir, &record.config_hash).expect("entry should load");
        assert_eq!(loaded.outputs, record.outputs);
        assert!(cache_load(&dir, &"0".repeat(64)).is_none());
        std::fs::remove_dir_all(&dir).ok();
    }
}
