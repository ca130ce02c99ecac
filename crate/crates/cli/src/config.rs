//! Flat key=value config files mirroring the CLI flags.
//!
//! Lines are `key = value` (whitespace optional); `#` starts a comment.
//! Keys use the long flag names. Explicit CLI flags always win over file
//! values.

use std::collections::HashMap;
use std::path::Path;

const BASE_KEYS: [&str; 11] = [
    "family", "n", "n-max", "eta", "eta-steps", "shots", "w", "subsets", "seed", "out", "format",
];

/// Load and validate a config file. `extra_keys` lists subcommand-specific
/// flags (e.g. `input` for estimate).
pub fn load(path: &Path, extra_keys: &[&str]) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config {} line {}: expected key = value",
                path.display(),
                idx + 1
            ));
        };
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        let value = value.trim().to_string();
        if !BASE_KEYS.contains(&key.as_str()) && !extra_keys.contains(&key.as_str()) {
            return Err(format!(
                "config {} line {}: unknown key '{key}'",
                path.display(),
                idx + 1
            ));
        }
        if out.insert(key.clone(), value).is_some() {
            return Err(format!(
                "config {} line {}: duplicate key '{key}'",
                path.display(),
                idx + 1
            ));
        }
    }
    Ok(out)
}

/// Parse a config value into a flag slot, only if the CLI left it unset.
pub fn fill<T: std::str::FromStr>(
    slot: &mut Option<T>,
    values: &HashMap<String, String>,
    key: &str,
) -> Result<(), String> {
    if slot.is_some() {
        return Ok(());
    }
    if let Some(raw) = values.get(key) {
        let parsed = raw
            .parse()
            .map_err(|_| format!("config key '{key}': cannot parse '{raw}'"))?;
        *slot = Some(parsed);
    }
    Ok(())
}
