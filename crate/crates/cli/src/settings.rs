//! Option values merged from a config file and command-line flags.
//!
//! Config files are flat `key = value` lines; keys are the long flag names.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Parses a config file body. Duplicate keys and lines without `=` are errors.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("config line {}: expected key = value, got {line:?}", n + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(CliError::input(format!("config line {}: invalid key {key:?}", n + 1)));
        }
        if out.insert(key.replace('_', "-"), value.to_string()).is_some() {
            return Err(CliError::input(format!("config line {}: duplicate key {key:?}", n + 1)));
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Resolved option values for one scenario, keyed by long flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(values: BTreeMap<String, String>) -> Self {
        Self { values }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str).filter(|s| !s.is_empty())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn required(&self, key: &str) -> CliResult<&str> {
        self.raw(key)
            .ok_or_else(|| CliError::input(format!("missing value for {key}")))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        parse_f64(key, self.required(key)?)
    }

    pub fn opt_f64(&self, key: &str) -> CliResult<Option<f64>> {
        self.raw(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn usize(&self, key: &str) -> CliResult<usize> {
        let v = self.required(key)?;
        v.parse()
            .map_err(|_| CliError::input(format!("{key}: expected a non-negative integer, got {v:?}")))
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.raw(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(CliError::input(format!("{key}: expected true or false, got {v:?}"))),
        }
    }

    /// Sweep values from `key`, falling back to the single value of `scalar`.
    pub fn sweep_or(&self, key: &str, scalar: &str) -> CliResult<Vec<f64>> {
        match self.raw(key) {
            Some(spec) => parse_sweep(key, spec, self.flag("log")?),
            None => Ok(vec![self.f64(scalar)?]),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::input(format!("{key}: expected a finite number, got {v:?}"))),
    }
}

/// `lo:hi:count` (inclusive, linear or geometric with `log`) or a comma list.
pub fn parse_sweep(key: &str, spec: &str, log: bool) -> CliResult<Vec<f64>> {
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::input(format!("{key}: expected lo:hi:count, got {spec:?}")));
        }
        let lo = parse_f64(key, parts[0].trim())?;
        let hi = parse_f64(key, parts[1].trim())?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("{key}: bad count in {spec:?}")))?;
        if count == 0 {
            return Err(CliError::input(format!("{key}: sweep must be non-empty")));
        }
        if log && (lo <= 0.0 || hi <= 0.0) {
            return Err(CliError::input(format!("{key}: log sweep needs positive bounds")));
        }
        (0..count)
            .map(|i| {
                if count == 1 {
                    return lo;
                }
                if i + 1 == count {
                    return hi;
                }
                let f = i as f64 / (count - 1) as f64;
                if log {
                    lo * (hi / lo).powf(f)
                } else {
                    lo + f * (hi - lo)
                }
            })
            .collect()
    } else {
        spec.split(',')
            .map(|s| parse_f64(key, s.trim()))
            .collect::<CliResult<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(CliError::input(format!("{key}: sweep must be non-empty")));
    }
    Ok(values)
}

/// Splits `path` into the file names for several outputs: `out.csv` with
/// suffix `reflected` becomes `out_reflected.csv`.
pub fn suffixed(path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let c = parse_config("# comment\n\ngamma = 1.5\nn0_sweep=0.5:50:20\n").unwrap();
        assert_eq!(c["gamma"], "1.5");
        assert_eq!(c["n0-sweep"], "0.5:50:20");
        assert!(parse_config("gamma 1").is_err());
        assert!(parse_config("gamma = 1\ngamma = 2").is_err());
        assert!(parse_config("ga mma = 1").is_err());
    }

    #[test]
    fn linear_and_log_sweeps() {
        assert_eq!(
            parse_sweep("s", "0:1:5", false).unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let g = parse_sweep("s", "1:100:3", true).unwrap();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(g[2], 100.0);
        assert_eq!(parse_sweep("s", "0.5, 2,3", false).unwrap(), vec![0.5, 2.0, 3.0]);
        assert!(parse_sweep("s", "1:2:0", false).is_err());
        assert!(parse_sweep("s", "0:2:3", true).is_err());
        assert!(parse_sweep("s", "1:2", false).is_err());
        assert!(parse_sweep("s", "1,x", false).is_err());
    }

    #[test]
    fn typed_access() {
        let mut m = BTreeMap::new();
        m.insert("gamma".into(), "2".into());
        m.insert("n".into(), "-3".into());
        m.insert("log".into(), "yes".into());
        m.insert("t-end".into(), "".into());
        let s = Settings::new(m);
        assert_eq!(s.f64("gamma").unwrap(), 2.0);
        assert!(s.usize("n").is_err());
        assert!(s.flag("log").is_err());
        assert_eq!(s.opt_f64("t-end").unwrap(), None);
        assert_eq!(s.sweep_or("gamma-sweep", "gamma").unwrap(), vec![2.0]);
    }

    #[test]
    fn output_suffixes() {
        assert_eq!(
            suffixed(Path::new("d/out.csv"), "reflected"),
            Path::new("d/out_reflected.csv")
        );
        assert_eq!(suffixed(Path::new("out"), "a"), Path::new("out_a"));
    }
}
