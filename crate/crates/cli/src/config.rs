use std::fmt;
use std::str::FromStr;

use bdlab_core::{format_rational, parse_rational, Rational, X0Params};
use num_bigint::BigUint;

use crate::CliError;

/// Injected faults used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// One entry of `i_{0,Q}` is changed after the build.
    ExtensionRow,
    /// A tuple violating `n ≤ (#Γ_0)²` is forced into the pool.
    InadmissibleTuple,
    /// One `d*` row handed to the duality checks is perturbed.
    BiorthogonalRow,
}

impl FromStr for Fault {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "extension-row" => Ok(Fault::ExtensionRow),
            "inadmissible-tuple" => Ok(Fault::InadmissibleTuple),
            "biorthogonal-row" => Ok(Fault::BiorthogonalRow),
            other => Err(CliError::Config(format!("unknown fault {other:?}"))),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fault::ExtensionRow => "extension-row",
            Fault::InadmissibleTuple => "inadmissible-tuple",
            Fault::BiorthogonalRow => "biorthogonal-row",
        })
    }
}

/// Run configuration, read from `key = value` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub n: u32,
    pub theta: Rational,
    /// Truncation level.
    pub q: u32,
    /// Largest level size that may be enumerated.
    pub enum_budget: BigUint,
    /// Largest pool a file may load.
    pub pool_cap: usize,
    pub fdd_samples: usize,
    pub avg_samples: usize,
    pub c0_samples: usize,
    pub seed: u64,
    /// Pair schedule; `None` selects the default schedule.
    pub eps: Option<Vec<Rational>>,
    pub fault: Option<Fault>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 3,
            theta: Rational::new(6.into(), 5.into()),
            q: 2,
            enum_budget: BigUint::from(100_000u32),
            pool_cap: 1_000_000,
            fdd_samples: 1000,
            avg_samples: 100,
            c0_samples: 100,
            seed: 0,
            eps: None,
            fault: None,
        }
    }
}

fn positive<T: FromStr + PartialEq + Default>(key: &str, value: &str) -> Result<T, CliError> {
    let v: T = value.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse {value:?}")))?;
    if v == T::default() {
        return Err(CliError::Config(format!("{key} must be positive")));
    }
    Ok(v)
}

impl Config {
    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Config(format!("{key}: {what}"));
        match key {
            "N" => self.n = value.parse().map_err(|_| bad("not an integer"))?,
            "theta" => self.theta = parse_rational(value).map_err(|e| bad(&e.to_string()))?,
            "Q" => self.q = value.parse().map_err(|_| bad("not an integer"))?,
            "enum_budget" => self.enum_budget = positive(key, value)?,
            "pool_cap" => self.pool_cap = positive(key, value)?,
            "fdd_samples" => self.fdd_samples = positive(key, value)?,
            "avg_samples" => self.avg_samples = positive(key, value)?,
            "c0_samples" => self.c0_samples = positive(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad("not a 64-bit integer"))?,
            "eps" => {
                let list = value
                    .split(',')
                    .map(|s| parse_rational(s.trim()).map_err(|e| bad(&e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                self.eps = Some(list);
            }
            "fault" => self.fault = if value == "none" { None } else { Some(value.parse()?) },
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn apply_overrides<'a>(&mut self, sets: impl IntoIterator<Item = &'a str>) -> Result<(), CliError> {
        for s in sets {
            let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config(format!("override {s:?} is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        Ok(())
    }

    pub fn params(&self) -> Result<X0Params, CliError> {
        X0Params::new(self.n, self.theta.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    /// `(key, value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("N", self.n.to_string()),
            ("theta", format_rational(&self.theta)),
            ("Q", self.q.to_string()),
            ("enum_budget", self.enum_budget.to_string()),
            ("pool_cap", self.pool_cap.to_string()),
            ("fdd_samples", self.fdd_samples.to_string()),
            ("avg_samples", self.avg_samples.to_string()),
            ("c0_samples", self.c0_samples.to_string()),
            ("seed", self.seed.to_string()),
        ];
        if let Some(eps) = &self.eps {
            out.push(("eps", eps.iter().map(format_rational).collect::<Vec<_>>().join(",")));
        }
        if let Some(f) = self.fault {
            out.push(("fault", f.to_string()));
        }
        out
    }

    /// `--set` arguments reproducing this configuration.
    pub fn as_overrides(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("--set {k}={v}")).collect::<Vec<_>>().join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let cfg = Config::parse("# defaults\nN = 3\ntheta = 6/5\nQ = 2\nseed = 7\n").unwrap();
        assert_eq!(cfg.seed, 7);
        let mut c2 = cfg.clone();
        c2.apply_overrides(["fault=extension-row", "Q=1"]).unwrap();
        assert_eq!(c2.fault, Some(Fault::ExtensionRow));
        assert_eq!(c2.q, 1);
        let round = Config::parse(
            &c2.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect::<String>(),
        )
        .unwrap();
        assert_eq!(round, c2);
    }

    #[test]
    fn rejections() {
        assert!(matches!(Config::parse("theta = 3/2"), Err(CliError::Config(_))));
        assert!(Config::parse("theta = 1.2").is_err());
        assert!(Config::parse("colour = blue").is_err());
        assert!(Config::parse("fdd_samples = 0").is_err());
        assert!(Config::parse("N 3").is_err());
    }
}
