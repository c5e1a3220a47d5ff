//! Scenario configuration: flat `key = value` sections, expression-valued
//! entries quoted.

use crate::error::{Error, Result};
use crate::expr::parse;

/// Parameters shared by the verification suites.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    /// Selected suite names; empty means all.
    pub suites: Vec<String>,
    pub h: f64,
    pub h_prime: f64,
    pub c: f64,
    /// Half-width of the unwrapped s-range.
    pub big_c: f64,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub grid: usize,
    pub samples: u64,
    pub seed: u64,
    /// Allowed fiber growth factor for the squeeze containment check.
    pub target_factor: f64,
    /// User-defined named expressions, validated at load time.
    pub forms: Vec<(String, String)>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            suites: Vec::new(),
            h: 5.0,
            h_prime: 1.0,
            c: 1.0,
            big_c: 10.0,
            n: 1,
            epsilon: 0.1,
            delta: 0.5,
            grid: 1000,
            samples: 1000,
            seed: 42,
            target_factor: 7.0 / 6.0,
            forms: Vec::new(),
        }
    }
}

fn config_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::ConfigError { line, column, message: message.into() }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(line_no, raw.len(), "unterminated section header"))?;
                match name {
                    "suites" | "parameters" | "forms" => section = name.to_string(),
                    other => {
                        return Err(config_err(line_no, 1, format!("unknown section `{other}`")))
                    }
                }
                continue;
            }
            let eq = line
                .find('=')
                .ok_or_else(|| config_err(line_no, 1, "expected `key = value`"))?;
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            let column = raw.find('=').map(|c| c + 2).unwrap_or(1);
            if section.is_empty() {
                return Err(config_err(line_no, 1, "entry before any section header"));
            }
            match section.as_str() {
                "suites" => match key {
                    "run" => {
                        cfg.suites = value
                            .split(',')
                            .map(|s| s.trim().to_string())
                            .filter(|s| !s.is_empty())
                            .collect();
                    }
                    other => {
                        return Err(config_err(line_no, 1, format!("unknown suites key `{other}`")))
                    }
                },
                "parameters" => {
                    cfg.set_parameter(key, value, line_no, column)?;
                }
                "forms" => {
                    let expr = value
                        .strip_prefix('"')
                        .and_then(|v| v.strip_suffix('"'))
                        .ok_or_else(|| {
                            config_err(line_no, column, "expression values must be quoted")
                        })?;
                    parse(expr).map_err(|e| {
                        config_err(line_no, column, format!("bad expression: {e}"))
                    })?;
                    cfg.forms.push((key.to_string(), expr.to_string()));
                }
                _ => unreachable!(),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_parameter(&mut self, key: &str, value: &str, line: usize, column: usize) -> Result<()> {
        let as_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| config_err(line, column, format!("expected a number, got `{v}`")))
        };
        let as_usize = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| config_err(line, column, format!("expected an integer, got `{v}`")))
        };
        match key {
            "h" => self.h = as_f64(value)?,
            "h_prime" => self.h_prime = as_f64(value)?,
            "c" => self.c = as_f64(value)?,
            "C" => self.big_c = as_f64(value)?,
            "n" => self.n = as_usize(value)?,
            "epsilon" => self.epsilon = as_f64(value)?,
            "delta" => self.delta = as_f64(value)?,
            "grid" => self.grid = as_usize(value)?,
            "samples" => self.samples = as_usize(value)? as u64,
            "seed" => self.seed = as_usize(value)? as u64,
            "target_factor" => self.target_factor = as_f64(value)?,
            other => {
                return Err(config_err(line, 1, format!("unknown parameter `{other}`")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| config_err(0, 0, message);
        for (name, v) in [
            ("h", self.h),
            ("h_prime", self.h_prime),
            ("c", self.c),
            ("C", self.big_c),
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("target_factor", self.target_factor),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(bad(format!("parameter `{name}` must be positive, got {v}")));
            }
        }
        if self.h_prime > self.h {
            return Err(bad(format!("h' = {} must not exceed h = {}", self.h_prime, self.h)));
        }
        if self.n == 0 || self.n > 3 {
            return Err(bad(format!("n must lie in 1..=3, got {}", self.n)));
        }
        if self.grid < 100 {
            return Err(bad(format!("grid must be at least 100, got {}", self.grid)));
        }
        if self.samples == 0 {
            return Err(bad("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn roundtrip_basic() {
        let cfg = ScenarioConfig::parse(
            "[suites]\nrun = squeeze, constants\n\n[parameters]\nh = 2.5\nseed = 7\n\n[forms]\nf = \"0.3*sin(x)*cos(z)\"\n",
        )
        .unwrap();
        assert_eq!(cfg.suites, vec!["squeeze", "constants"]);
        assert_eq!(cfg.h, 2.5);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.forms.len(), 1);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ScenarioConfig::parse("[parameters]\nwidth = 3\n").unwrap_err();
        assert!(matches!(err, Error::ConfigError { line: 2, .. }));
    }

    #[test]
    fn negative_h_rejected() {
        let err = ScenarioConfig::parse("[parameters]\nh = -1\n").unwrap_err();
        assert!(matches!(err, Error::ConfigError { .. }));
    }

    #[test]
    fn bad_expression_rejected() {
        let err = ScenarioConfig::parse("[forms]\nf = \"sin(\"\n").unwrap_err();
        assert!(matches!(err, Error::ConfigError { line: 2, .. }));
    }

    #[test]
    fn unquoted_expression_rejected() {
        let err = ScenarioConfig::parse("[forms]\nf = sin(x)\n").unwrap_err();
        assert!(matches!(err, Error::ConfigError { .. }));
    }
}
