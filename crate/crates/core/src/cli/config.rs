//! Experiment configuration: what the command line parses into, and what a
//! `--config` file holds.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::output::Format;
use crate::bounds::X0Strategy;
use crate::error::{Error, Result};
use crate::spaces::{check_exponent, ScalarField};

/// `p` in `[1, ∞]`, written as a number or the string `"inf"`.
pub mod exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => super::parse_exponent(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Accepts decimals and `inf` / `infinity`.
pub fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    let v = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| format!("invalid exponent '{s}': {e}"))?,
    };
    check_exponent(v).map_err(|e| e.to_string())
}

/// Inclusive range of dimensions, stepped by one or by doubling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DRange {
    pub start: usize,
    pub end: usize,
    #[serde(default)]
    pub geometric: bool,
}

impl DRange {
    pub fn single(d: usize) -> Self {
        Self {
            start: d,
            end: d,
            geometric: false,
        }
    }

    pub fn values(&self) -> Vec<usize> {
        if self.geometric {
            std::iter::successors(Some(self.start), |&d| d.checked_mul(2))
                .take_while(|&d| d <= self.end)
                .collect()
        } else {
            (self.start..=self.end).collect()
        }
    }

    pub fn validate(&self, min: usize) -> Result<()> {
        if self.start > self.end {
            return Err(Error::InvalidArgument(format!("empty range {}..{}", self.start, self.end)));
        }
        if self.start < min {
            return Err(Error::InvalidDimension(self.start));
        }
        Ok(())
    }
}

impl FromStr for DRange {
    type Err = String;

    /// `A..B` or `A..=B` (both inclusive), or a single `A`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("invalid dimension '{t}': {e}"));
        match s.split_once("..") {
            Some((a, b)) => Ok(Self {
                start: parse(a)?,
                end: parse(b.trim_start_matches('='))?,
                geometric: false,
            }),
            None => Ok(Self::single(parse(s)?)),
        }
    }
}

/// Which sphere integral `integrals` estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralKind {
    /// `∫ log|⟨e_1, ψ⟩|` over the uniform or `q`-pushforward measure.
    LogPairing,
    PnormMoment,
    InfnormMoment,
    LogInversePnorm,
}

/// Measure for [`IntegralKind::LogPairing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    #[default]
    Uniform,
    Pushforward,
}

/// `x0` strategy names as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum X0Choice {
    #[default]
    WorstCase,
    E1,
    Random,
    BestOfRandom,
}

impl X0Choice {
    pub fn strategy(self, candidates: usize) -> X0Strategy {
        match self {
            X0Choice::WorstCase => X0Strategy::WorstCase,
            X0Choice::E1 => X0Strategy::E1,
            X0Choice::Random => X0Strategy::Random,
            X0Choice::BestOfRandom => X0Strategy::BestOfRandom(candidates),
        }
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    Hilbert {
        d: DRange,
        field: ScalarField,
    },
    Bounds {
        #[serde(with = "exponent")]
        p: f64,
        d: DRange,
        field: ScalarField,
        samples: usize,
        seed: u64,
        trunc_m: Option<f64>,
        x0: X0Choice,
        candidates: usize,
        starts: usize,
    },
    Rademacher {
        n: usize,
        d: usize,
        trials: usize,
        exhaustive: bool,
        net_n: Option<usize>,
        seed: u64,
        moment_trials: usize,
    },
    Integrals {
        kind: IntegralKind,
        #[serde(with = "exponent")]
        p: f64,
        d: DRange,
        field: ScalarField,
        samples: usize,
        seed: u64,
        trunc_m: Option<f64>,
        measure: MeasureKind,
    },
    QuadratureL {
        d: DRange,
        field: ScalarField,
    },
    GridNorm {
        #[serde(with = "exponent")]
        p: f64,
        field: ScalarField,
        rows: Vec<Vec<f64>>,
        resolution: usize,
    },
    SignMin {
        n: usize,
        d: usize,
        net_n: Option<usize>,
    },
}

/// An experiment plus where and how to write its records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    /// Checks every numeric parameter; nothing runs before this passes.
    pub fn validate(&self) -> Result<()> {
        let trunc = |m: Option<f64>| match m {
            Some(v) if v.is_nan() || v < 0.0 => Err(Error::InvalidArgument(format!("truncation level {v} must be ≥ 0"))),
            _ => Ok(()),
        };
        let samples_at_least = |s: usize, min: usize| {
            if s < min {
                Err(Error::InvalidArgument(format!("need at least {min} samples, got {s}")))
            } else {
                Ok(())
            }
        };
        match &self.experiment {
            Experiment::Hilbert { d, .. } | Experiment::QuadratureL { d, .. } => d.validate(2),
            Experiment::Bounds {
                p,
                d,
                samples,
                trunc_m,
                candidates,
                starts,
                x0,
                ..
            } => {
                check_exponent(*p)?;
                d.validate(1)?;
                samples_at_least(*samples, 10_000)?;
                trunc(*trunc_m)?;
                if *starts == 0 || (*x0 == X0Choice::BestOfRandom && *candidates == 0) {
                    return Err(Error::InvalidArgument("starts and candidates must be positive".into()));
                }
                Ok(())
            }
            Experiment::Rademacher {
                n,
                d,
                trials,
                moment_trials,
                ..
            } => {
                if *n == 0 || *d == 0 || *trials == 0 || *moment_trials < 2 {
                    return Err(Error::InvalidArgument(
                        "n, d and trials must be positive and moment trials at least 2".into(),
                    ));
                }
                Ok(())
            }
            Experiment::Integrals {
                kind,
                p,
                d,
                samples,
                trunc_m,
                ..
            } => {
                check_exponent(*p)?;
                if *kind == IntegralKind::PnormMoment && p.is_infinite() {
                    return Err(Error::InvalidExponent(*p));
                }
                d.validate(if *kind == IntegralKind::InfnormMoment { 2 } else { 1 })?;
                samples_at_least(*samples, 2)?;
                trunc(*trunc_m)
            }
            Experiment::GridNorm { p, rows, resolution, .. } => {
                check_exponent(*p)?;
                if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) || rows[0].is_empty() {
                    return Err(Error::InvalidArgument("rows must be nonempty and of equal length".into()));
                }
                if *resolution < 8 {
                    return Err(Error::InvalidArgument("grid resolution must be at least 8".into()));
                }
                Ok(())
            }
            Experiment::SignMin { n, d, .. } => {
                if *n == 0 || *d == 0 {
                    return Err(Error::InvalidArgument("n and d must be positive".into()));
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad config: {e}")))
    }
}

/// `"1,2;0,1"` → `[[1, 2], [0, 1]]`.
pub fn parse_rows(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| format!("invalid entry '{t}': {e}")))
                .collect()
        })
        .collect()
}
