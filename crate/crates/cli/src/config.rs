//! Flat `key = value` configuration with command-line overrides.
//!
//! Every command declares the keys it accepts. Keys carry their unit as a
//! suffix (`_gamma`, `_mhz`, `_us`, `_deg`, `_u`); atomic frequencies may be
//! given either in units of Γ or in MHz, but not both.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
}

pub const fn key(name: &'static str, default: &'static str) -> Key {
    Key { name, default: Some(default) }
}

pub const fn optional(name: &'static str) -> Key {
    Key { name, default: None }
}

/// Parse `key = value` lines. `#` starts a comment.
pub fn parse_file_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{raw}`", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", n + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

pub fn read_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_file_text(&text)
}

/// `--key value` or `--key=value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(body) = a.strip_prefix("--") else {
            return Err(CliError::Config(format!("unexpected argument `{a}`; parameters are given as --key value")));
        };
        if let Some((k, v)) = body.split_once('=') {
            out.push((k.replace('-', "_"), v.to_string()));
        } else {
            let v = it.next().ok_or_else(|| CliError::Config(format!("missing value for --{body}")))?;
            out.push((body.replace('-', "_"), v.clone()));
        }
    }
    Ok(out)
}

/// Resolved parameters of one command.
#[derive(Debug, Clone)]
pub struct Params {
    values: BTreeMap<String, String>,
    explicit: BTreeSet<String>,
}

impl Params {
    /// Apply `layers` in order over the defaults of `keys`. Unknown keys are
    /// rejected.
    pub fn resolve(keys: &[Key], layers: &[Vec<(String, String)>]) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for k in keys {
            if let Some(d) = k.default {
                values.insert(k.name.to_string(), d.to_string());
            }
        }
        let mut explicit = BTreeSet::new();
        for layer in layers {
            for (k, v) in layer {
                if !keys.iter().any(|s| s.name == k) {
                    let known: Vec<&str> = keys.iter().map(|s| s.name).collect();
                    return Err(CliError::Config(format!("unknown key `{k}`; accepted keys: {}", known.join(", "))));
                }
                values.insert(k.clone(), v.clone());
                explicit.insert(k.clone());
            }
        }
        Ok(Params { values, explicit })
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn has(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn str(&self, name: &str) -> Result<&str, CliError> {
        self.values
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| CliError::Config(format!("missing required key `{name}`")))
    }

    pub fn f64(&self, name: &str) -> Result<f64, CliError> {
        let s = self.str(name)?;
        let v: f64 = s.parse().map_err(|_| CliError::Config(format!("`{name}`: `{s}` is not a number")))?;
        if !v.is_finite() {
            return Err(CliError::Config(format!("`{name}` must be finite")));
        }
        Ok(v)
    }

    pub fn opt_f64(&self, name: &str) -> Result<Option<f64>, CliError> {
        if self.has(name) {
            self.f64(name).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&self, name: &str) -> Result<usize, CliError> {
        let s = self.str(name)?;
        s.parse().map_err(|_| CliError::Config(format!("`{name}`: `{s}` is not a non-negative integer")))
    }

    pub fn bool(&self, name: &str) -> Result<bool, CliError> {
        match self.str(name)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            s => Err(CliError::Config(format!("`{name}`: `{s}` is not a boolean"))),
        }
    }

    /// Frequency in units of Γ from `<base>_gamma` or `<base>_mhz`; an
    /// explicit value beats a default.
    pub fn freq_gamma_opt(&self, base: &str, gamma_mhz: f64) -> Result<Option<f64>, CliError> {
        let g = format!("{base}_gamma");
        let m = format!("{base}_mhz");
        match (self.explicit.contains(&g), self.explicit.contains(&m)) {
            (true, true) => Err(CliError::Config(format!("give only one of `{g}` and `{m}`"))),
            (true, false) => self.f64(&g).map(Some),
            (false, true) => Ok(Some(self.f64(&m)? / gamma_mhz)),
            _ if self.has(&g) => self.f64(&g).map(Some),
            _ if self.has(&m) => Ok(Some(self.f64(&m)? / gamma_mhz)),
            _ => Ok(None),
        }
    }

    pub fn freq_gamma(&self, base: &str, gamma_mhz: f64) -> Result<f64, CliError> {
        self.freq_gamma_opt(base, gamma_mhz)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{base}_gamma` or `{base}_mhz`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: &[Key] = &[key("omega_1_gamma", "2.0"), optional("omega_1_mhz"), key("points", "11")];

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn file_syntax() {
        let p = parse_file_text("# comment\n omega_1_gamma = 2.5  # trailing\n\npoints=3\n").unwrap();
        assert_eq!(p, pairs(&[("omega_1_gamma", "2.5"), ("points", "3")]));
        assert!(parse_file_text("novalue\n").is_err());
    }

    #[test]
    fn overrides_both_forms() {
        let args: Vec<String> = ["--points", "5", "--omega-1-gamma=1.5"].iter().map(|s| s.to_string()).collect();
        assert_eq!(parse_overrides(&args).unwrap(), pairs(&[("points", "5"), ("omega_1_gamma", "1.5")]));
        assert!(parse_overrides(&["--points".to_string()]).is_err());
        assert!(parse_overrides(&["points".to_string()]).is_err());
    }

    #[test]
    fn later_layers_win_and_unknown_keys_fail() {
        let p = Params::resolve(KEYS, &[pairs(&[("points", "3")]), pairs(&[("points", "4")])]).unwrap();
        assert_eq!(p.usize("points").unwrap(), 4);
        assert!(Params::resolve(KEYS, &[pairs(&[("omega_2_gamma", "1")])]).is_err());
    }

    #[test]
    fn frequency_units() {
        let p = Params::resolve(KEYS, &[pairs(&[("omega_1_mhz", "39.2")])]).unwrap();
        assert_eq!(p.freq_gamma("omega_1", 19.6).unwrap(), 2.0);
        let p = Params::resolve(KEYS, &[]).unwrap();
        assert_eq!(p.freq_gamma("omega_1", 19.6).unwrap(), 2.0);
        let p = Params::resolve(KEYS, &[pairs(&[("omega_1_mhz", "39.2"), ("omega_1_gamma", "2")])]).unwrap();
        assert!(p.freq_gamma("omega_1", 19.6).is_err());
    }
}
