//! Plain-text key=value config files. Keys mirror flag names exactly
//! ("k", "t", "theta", "step", "alpha", "count", "vartheta", ...); blank
//! lines and '#' comments are ignored. Explicit flags override file entries.

use std::collections::BTreeMap;
use std::path::Path;

use zeta_moments::{Error, Result};

pub type ConfigMap = BTreeMap<String, String>;

pub fn load(path: &Path) -> Result<ConfigMap> {
    let text = std::fs::read_to_string(path)?;
    let mut map = ConfigMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::invalid(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Parse a config value; absent keys give None, bad values bubble up as a
/// parse failure at the use site.
pub fn get<T: std::str::FromStr>(map: &ConfigMap, key: &str) -> Option<T> {
    map.get(key).and_then(|v| v.parse().ok())
}

/// Flag value, else config value, else error.
pub fn require<T: Clone + std::str::FromStr>(
    flag: &Option<T>,
    map: &ConfigMap,
    key: &str,
) -> Result<T> {
    flag.clone()
        .or_else(|| get(map, key))
        .ok_or_else(|| Error::invalid(format!("missing required parameter --{key}")))
}

/// Flag value, else config value, else a default.
pub fn or_default<T: Clone + std::str::FromStr>(
    flag: &Option<T>,
    map: &ConfigMap,
    key: &str,
    default: T,
) -> T {
    flag.clone().or_else(|| get(map, key)).unwrap_or(default)
}
