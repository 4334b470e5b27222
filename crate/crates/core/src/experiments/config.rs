//! Experiment configuration.
//!
//! Config files are flat `key = value` text. Blank lines and lines starting
//! with `#` are ignored. Lists are comma separated, rationals are `u/v` or
//! integers. Recognized keys:
//!
//! ```text
//! experiment  random-ppc | kronecker-ppc | kronecker-non-ppc |
//!             discrepancy-decay | beer-sandwich | ppc-implies-ud
//! p           prime
//! K           digits per element (default: ceil(log_p max N) + 8)
//! alpha       u/v in [0, 1]
//! s           list of positive rationals
//! n-grid      ascending list of N
//! seeds       list of 64-bit seeds
//! sequence    random | integers | kronecker | file:<path>
//! a, b        Kronecker parameters (a defaults to a random unit per seed)
//! exact       true | false, exactness of Kronecker and file sequences
//! tolerance   bound on |F - 1| (rational)
//! bound       bound on N * D_N (discrepancy-decay) or on D_N (ppc-implies-ud)
//! out         CSV output path
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::padic::{PadicInt, Prime};
use crate::rational::{parse_ratio, parse_small_ratio};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    RandomPpc,
    KroneckerPpc,
    KroneckerNonPpc,
    DiscrepancyDecay,
    BeerSandwich,
    PpcImpliesUd,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::RandomPpc,
        Experiment::KroneckerPpc,
        Experiment::KroneckerNonPpc,
        Experiment::DiscrepancyDecay,
        Experiment::BeerSandwich,
        Experiment::PpcImpliesUd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::RandomPpc => "random-ppc",
            Experiment::KroneckerPpc => "kronecker-ppc",
            Experiment::KroneckerNonPpc => "kronecker-non-ppc",
            Experiment::DiscrepancyDecay => "discrepancy-decay",
            Experiment::BeerSandwich => "beer-sandwich",
            Experiment::PpcImpliesUd => "ppc-implies-ud",
        }
    }

    fn default_sequence(self) -> SequenceChoice {
        match self {
            Experiment::RandomPpc | Experiment::BeerSandwich | Experiment::PpcImpliesUd => {
                SequenceChoice::Random
            }
            _ => SequenceChoice::Kronecker,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::config("experiment", format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceChoice {
    Random,
    Integers,
    Kronecker,
    File(PathBuf),
}

impl FromStr for SequenceChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SequenceChoice::Random),
            "integers" => Ok(SequenceChoice::Integers),
            "kronecker" => Ok(SequenceChoice::Kronecker),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(SequenceChoice::File(PathBuf::from(path))),
                _ => Err(Error::config("sequence", format!("unknown sequence `{s}`"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub p: Prime,
    pub precision: u32,
    pub alpha: Ratio<u64>,
    pub s_values: Vec<Rational>,
    pub n_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    pub sequence: SequenceChoice,
    /// Fixed Kronecker multiplier; a random unit per seed when absent.
    pub a: Option<u64>,
    pub b: u64,
    pub exact: bool,
    pub tolerance: Rational,
    pub bound: Rational,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 14] = [
    "experiment", "p", "K", "alpha", "s", "n-grid", "seeds", "sequence", "a", "b", "exact",
    "tolerance", "bound", "out",
];

/// Raw key-value settings; later insertions win, so CLI flags are applied
/// after the file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let experiment: Experiment = self
            .get("experiment")
            .ok_or_else(|| Error::config("experiment", "missing"))?
            .parse()?;
        let defaults = Defaults::for_experiment(experiment);

        let p = match self.get("p") {
            Some(v) => {
                let n: u64 = v.parse().map_err(|_| Error::config("p", format!("`{v}` is not an integer")))?;
                Prime::new(n).map_err(|e| Error::config("p", e.to_string()))?
            }
            None => Prime::new(2)?,
        };
        let alpha = match self.get("alpha") {
            Some(v) => parse_small_ratio(v)
                .filter(|a| *a <= Ratio::from_integer(1))
                .ok_or_else(|| Error::config("alpha", format!("`{v}` is not a rational in [0, 1]")))?,
            None => defaults.alpha,
        };
        let s_values = match self.get("s") {
            Some(v) => parse_list(v, "s", |t| parse_ratio(t).filter(|r| r > &Rational::from_integer(0.into())))?,
            None => defaults.s.iter().map(|t| parse_ratio(t).expect("default")).collect(),
        };
        if s_values.is_empty() {
            return Err(Error::config("s", "empty list"));
        }
        let n_grid: Vec<usize> = match self.get("n-grid") {
            Some(v) => parse_list(v, "n-grid", |t| t.parse::<usize>().ok().filter(|&n| n >= 1))?,
            None => defaults.n_grid.to_vec(),
        };
        if n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n-grid", "must be strictly ascending"));
        }
        let seeds: Vec<u64> = match self.get("seeds") {
            Some(v) => parse_list(v, "seeds", |t| t.parse::<u64>().ok())?,
            None => defaults.seeds.clone(),
        };
        if seeds.is_empty() {
            return Err(Error::config("seeds", "empty list"));
        }
        let sequence = match self.get("sequence") {
            Some(v) => v.parse()?,
            None => experiment.default_sequence(),
        };
        let a = self
            .get("a")
            .map(|v| v.parse::<u64>().map_err(|_| Error::config("a", format!("`{v}` is not an integer"))))
            .transpose()?;
        let b = self
            .get("b")
            .map(|v| v.parse::<u64>().map_err(|_| Error::config("b", format!("`{v}` is not an integer"))))
            .transpose()?
            .unwrap_or(0);
        let exact = match self.get("exact") {
            Some("true") => true,
            Some("false") | None => false,
            Some(v) => return Err(Error::config("exact", format!("`{v}` is not a boolean"))),
        };
        let tolerance = match self.get("tolerance") {
            Some(v) => parse_ratio(v).ok_or_else(|| Error::config("tolerance", format!("`{v}` is not a rational")))?,
            None => parse_ratio(defaults.tolerance).expect("default"),
        };
        let bound = match self.get("bound") {
            Some(v) => parse_ratio(v).ok_or_else(|| Error::config("bound", format!("`{v}` is not a rational")))?,
            None => parse_ratio(defaults.bound).expect("default"),
        };
        let max_n = *n_grid.last().unwrap_or(&1) as u64;
        let min_precision = p.ceil_log(max_n) + 8;
        let precision = match self.get("K") {
            Some(v) => v.parse::<u32>().map_err(|_| Error::config("K", format!("`{v}` is not an integer")))?,
            None => min_precision,
        };
        PadicInt::zero(p, precision).map_err(|e| Error::config("K", e.to_string()))?;
        if sequence == SequenceChoice::Kronecker && precision < min_precision {
            return Err(Error::config(
                "K",
                format!("Kronecker experiments need K >= ceil(log_p max N) + 8 = {min_precision}"),
            ));
        }
        if let Some(a) = a {
            PadicInt::new(p, precision, a).map_err(|e| Error::config("a", e.to_string()))?;
        }
        PadicInt::new(p, precision, b).map_err(|e| Error::config("b", e.to_string()))?;

        let config = ExperimentConfig {
            experiment,
            p,
            precision,
            alpha,
            s_values,
            n_grid,
            seeds,
            sequence,
            a,
            b,
            exact,
            tolerance,
            bound,
            out: self.get("out").map(PathBuf::from),
        };
        config.validate_experiment()?;
        Ok(config)
    }
}

impl ExperimentConfig {
    fn validate_experiment(&self) -> Result<()> {
        let one = Rational::from_integer(1.into());
        match self.experiment {
            Experiment::KroneckerNonPpc => {
                if self.alpha != Ratio::from_integer(1) {
                    return Err(Error::config("alpha", "kronecker-non-ppc needs alpha = 1"));
                }
                if self.s_values.iter().any(|s| s >= &one) {
                    return Err(Error::config("s", "kronecker-non-ppc needs every s < 1"));
                }
            }
            Experiment::KroneckerPpc if self.alpha >= Ratio::from_integer(1) => {
                return Err(Error::config("alpha", "kronecker-ppc needs alpha < 1"));
            }
            Experiment::RandomPpc | Experiment::KroneckerPpc | Experiment::PpcImpliesUd
                if self.n_grid.first().is_some_and(|&n| n < 2) => {
                    return Err(Error::config("n-grid", "F needs N >= 2"));
                }
            _ => {}
        }
        Ok(())
    }
}

fn parse_list<T>(text: &str, field: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(t).ok_or_else(|| Error::config(field, format!("bad entry `{t}`"))))
        .collect()
}

struct Defaults {
    alpha: Ratio<u64>,
    s: &'static [&'static str],
    n_grid: &'static [usize],
    seeds: Vec<u64>,
    tolerance: &'static str,
    bound: &'static str,
}

impl Defaults {
    fn for_experiment(experiment: Experiment) -> Self {
        let one = Ratio::from_integer(1);
        match experiment {
            Experiment::RandomPpc => Defaults {
                alpha: one,
                s: &["1/2", "1", "2"],
                n_grid: &[100, 1000, 10_000],
                seeds: (1..=20).collect(),
                tolerance: "3/20",
                bound: "1",
            },
            Experiment::KroneckerPpc => Defaults {
                alpha: Ratio::new(1, 2),
                s: &["1"],
                n_grid: &[100, 10_000],
                seeds: vec![1],
                tolerance: "1/10",
                bound: "1",
            },
            Experiment::KroneckerNonPpc => Defaults {
                alpha: one,
                s: &["1/2", "9/10"],
                n_grid: &[10, 100, 1000, 10_000],
                seeds: vec![1],
                tolerance: "0",
                bound: "1",
            },
            Experiment::DiscrepancyDecay => Defaults {
                alpha: one,
                s: &["1"],
                n_grid: &[10, 100, 1000],
                seeds: vec![1],
                tolerance: "0",
                bound: "10",
            },
            Experiment::BeerSandwich => Defaults {
                alpha: one,
                s: &["1"],
                n_grid: &[5, 10, 20, 30],
                seeds: (1..=50).collect(),
                tolerance: "0",
                bound: "1",
            },
            Experiment::PpcImpliesUd => Defaults {
                alpha: one,
                s: &["1"],
                n_grid: &[100, 10_000],
                seeds: vec![1],
                tolerance: "3/20",
                bound: "1/20",
            },
        }
    }
}
