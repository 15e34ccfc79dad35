//! Flat `key = value` configuration with `[section]` headers.
//!
//! `#` and `;` start comments; keys before the first header belong to the
//! unnamed section `""`. Relative paths resolve against the config file's
//! directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::complex_text::{parse_complex, parse_complex_list, parse_f64};
use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
    pub base_dir: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Config(format!("line {}: unterminated section header", lineno + 1)))?;
                current = name.trim().to_ascii_lowercase();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", lineno + 1)));
            }
            let entry = sections.entry(current.clone()).or_default();
            if entry.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Config { sections, base_dir: PathBuf::new() })
    }

    /// Canonical text form; `parse(to_text())` reproduces the sections.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, entries) in &self.sections {
            if !name.is_empty() || !entries.is_empty() {
                if !name.is_empty() {
                    out.push_str(&format!("[{name}]\n"));
                }
                for (k, v) in entries {
                    out.push_str(&format!("{k} = {v}\n"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections.entry(section.to_string()).or_default().insert(key.to_string(), value.into());
    }

    fn key_error(section: &str, key: &str, e: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("[{section}] {key}: {e}"))
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(section, key) {
            Some(v) => parse_f64(v).map_err(|e| Self::key_error(section, key, e)),
            None => Ok(default),
        }
    }

    pub fn require_f64(&self, section: &str, key: &str) -> Result<f64, CliError> {
        let v = self.get(section, key).ok_or_else(|| Self::key_error(section, key, "missing"))?;
        parse_f64(v).map_err(|e| Self::key_error(section, key, e))
    }

    pub fn parsed_or<V: FromStr>(&self, section: &str, key: &str, default: V) -> Result<V, CliError>
    where
        V::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            Some(v) => v.parse::<V>().map_err(|e| Self::key_error(section, key, e)),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(section, key).map(str::to_ascii_lowercase).as_deref() {
            None => Ok(default),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(other) => Err(Self::key_error(section, key, format!("expected a boolean, got '{other}'"))),
        }
    }

    pub fn complex_or(&self, section: &str, key: &str, default: Complex64) -> Result<Complex64, CliError> {
        match self.get(section, key) {
            Some(v) => parse_complex(v).map_err(|e| Self::key_error(section, key, e)),
            None => Ok(default),
        }
    }

    pub fn complex_list(&self, section: &str, key: &str) -> Result<Option<Vec<Complex64>>, CliError> {
        self.get(section, key).map(|v| parse_complex_list(v).map_err(|e| Self::key_error(section, key, e))).transpose()
    }

    /// Resolved path of an input file, which must exist.
    pub fn input_path(&self, section: &str, key: &str) -> Result<Option<PathBuf>, CliError> {
        let Some(v) = self.get(section, key) else { return Ok(None) };
        let p = Path::new(v);
        let full = if p.is_absolute() { p.to_path_buf() } else { self.base_dir.join(p) };
        if !full.is_file() {
            return Err(Self::key_error(section, key, format!("file {} does not exist", full.display())));
        }
        Ok(Some(full))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let cfg = Config::parse("top = 1\n[Problem]\nk = 0.5 # shift\n; note\nfamily=3\n\n[sweep]\nn_radii = 10\n").unwrap();
        assert_eq!(cfg.get("", "top"), Some("1"));
        assert_eq!(cfg.get("problem", "k"), Some("0.5"));
        assert_eq!(cfg.parsed_or("problem", "family", 1usize).unwrap(), 3);
        assert_eq!(cfg.parsed_or("sweep", "n_radii", 0usize).unwrap(), 10);
        assert_eq!(cfg.f64_or("sweep", "r_min", 0.01).unwrap(), 0.01);
    }

    #[test]
    fn malformed_input() {
        assert!(Config::parse("[problem\n").is_err());
        assert!(Config::parse("[p]\njust words\n").is_err());
        assert!(Config::parse("[p]\nk = 1\nk = 2\n").is_err());
        let cfg = Config::parse("[p]\nk = one\nflag = maybe\n").unwrap();
        assert!(cfg.require_f64("p", "k").is_err());
        assert!(cfg.bool_or("p", "flag", false).is_err());
        assert!(cfg.require_f64("p", "missing").is_err());
    }

    #[test]
    fn text_round_trip() {
        let cfg = Config::parse("a = 1\n[problem]\nk = 0\nb = pi\n[evolve]\nscheme = contour\n").unwrap();
        assert_eq!(Config::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
