//! Parsers for the file-based inputs: step measures and candidate systems.
//!
//! Both formats are line oriented, with `#` starting a comment and blank
//! lines ignored. A measure file has one `letter weight` pair per line; a
//! systems file has one word per line in the same token syntax the library
//! uses (`z1 z2^-1 z1`). Parsed inputs are echoed into the config record,
//! so the config hash depends on file content, never on file paths.

use std::path::Path;

use serde_json::{json, Value};
use walklab::group::{Generator, GroupPresentation};
use walklab::inequality::SystemSpec;
use walklab::walks::{MeasureAdjustment, SymmetricMeasure};

use crate::error::CliError;

/// A step measure resolved from the `--measure` flag, together with the
/// adjustment applied (for file sourced measures) and a canonical config
/// echo of what was resolved.
#[derive(Debug)]
pub struct ResolvedMeasure {
    pub measure: SymmetricMeasure,
    pub adjustment: Option<MeasureAdjustment>,
    pub echo: Value,
}

/// Resolves `--measure`: the literal `uniform`, or a path to a weight
/// file. File weights are completed to a symmetric measure (each raw
/// entry names its inverse pair and the pair total is split equally) and
/// rescaled to total 1; what was adjusted is kept for the outputs.
pub fn resolve_measure(p: GroupPresentation, arg: &str) -> Result<ResolvedMeasure, CliError> {
    if arg == "uniform" {
        return Ok(ResolvedMeasure {
            measure: SymmetricMeasure::uniform(p),
            adjustment: None,
            echo: json!("uniform"),
        });
    }
    let raw = parse_measure_file(Path::new(arg))?;
    let (measure, adjustment) = SymmetricMeasure::from_raw_weights(p, &raw)?;
    let weights: Vec<Value> = measure
        .weights()
        .iter()
        .map(|(g, w)| json!([g.to_string(), w]))
        .collect();
    Ok(ResolvedMeasure {
        measure,
        adjustment: Some(adjustment),
        echo: json!({ "weights": weights }),
    })
}

fn parse_measure_file(path: &Path) -> Result<Vec<(Generator, f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (token, weight) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(w), None) => (t, w),
            _ => {
                return Err(CliError::Input(format!(
                    "{}:{}: expected 'letter weight', got {line:?}",
                    path.display(),
                    idx + 1
                )))
            }
        };
        let g: Generator = token.parse()?;
        let w: f64 = weight.parse().map_err(|_| {
            CliError::Input(format!(
                "{}:{}: weight {weight:?} is not a number",
                path.display(),
                idx + 1
            ))
        })?;
        raw.push((g, w));
    }
    if raw.is_empty() {
        return Err(CliError::Input(format!(
            "{}: measure file has no weight lines",
            path.display()
        )));
    }
    Ok(raw)
}

/// Loads one candidate system from a file: its label is the file stem and
/// each nonempty line is one generating word, validated against the
/// presentation's alphabet.
pub fn load_system(p: GroupPresentation, path: &Path) -> Result<SystemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut words = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let word = p.parse_word(line).map_err(|e| {
            CliError::Input(format!("{}:{}: {e}", path.display(), idx + 1))
        })?;
        words.push(word);
    }
    if words.is_empty() {
        return Err(CliError::Input(format!(
            "{}: system file has no words",
            path.display()
        )));
    }
    Ok(SystemSpec { label, words })
}

/// Config echo for a list of systems: labels plus the words as written.
pub fn systems_echo(systems: &[SystemSpec]) -> Value {
    let entries: Vec<Value> = systems
        .iter()
        .map(|s| {
            let words: Vec<String> = s.words.iter().map(|w| w.to_string()).collect();
            json!({ "label": s.label, "words": words })
        })
        .collect();
    Value::Array(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn temp_file(name: &str, content: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("walklab-input-{}-{name}", std::process::id()));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn uniform_measure_resolves_without_adjustment() {
        let p: GroupPresentation = "free:2".parse().unwrap();
        let r = resolve_measure(p, "uniform").unwrap();
        assert_eq!(r.echo, json!("uniform"));
        assert!(r.adjustment.is_none());
        assert_eq!(r.measure.support_size(), 4);
    }

    #[test]
    fn measure_file_is_parsed_completed_and_echoed() {
        let p: GroupPresentation = "free:2".parse().unwrap();
        let path = temp_file("measure.txt", "# heavier first letter\nz1 0.3\nz2 0.1\n");
        let r = resolve_measure(p, path.to_str().unwrap()).unwrap();
        let adj = r.adjustment.unwrap();
        assert!(adj.symmetrized && adj.renormalized);
        assert!((adj.original_total - 0.4).abs() < 1e-12);
        // Pair totals are split per side, then rescaled: z1 sides get
        // 0.15 / 0.4 each.
        assert!((r.measure.weight("z1".parse().unwrap()) - 0.375).abs() < 1e-12);
        let weights = r.echo.get("weights").unwrap().as_array().unwrap();
        assert_eq!(weights.len(), 4);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn malformed_measure_lines_are_rejected_with_position() {
        let p: GroupPresentation = "free:2".parse().unwrap();
        let path = temp_file("badmeasure.txt", "z1 0.3 extra\n");
        let err = resolve_measure(p, path.to_str().unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains(":1:"));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn system_file_takes_label_from_stem() {
        let p: GroupPresentation = "free:2".parse().unwrap();
        let path = temp_file("doubled.txt", "z1 z1\nz2\n");
        let spec = load_system(p, &path).unwrap();
        assert!(spec.label.starts_with("walklab-input-"));
        assert!(spec.label.ends_with("-doubled"));
        assert_eq!(spec.words.len(), 2);
        assert_eq!(spec.words[0].to_string(), "z1 z1");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn out_of_alphabet_words_are_rejected() {
        let p: GroupPresentation = "free:2".parse().unwrap();
        let path = temp_file("badsystem.txt", "z1 z7\n");
        let err = load_system(p, &path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        std::fs::remove_file(path).ok();
    }
}
