use std::fs;
use std::path::{Path, PathBuf};

use billiard_core::frequency::{make_frequencies, ContinuedFraction, FrequencySpec, FrequencyVector};
use billiard_core::{Error, Precision, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Everything a run can be configured with. Fields left out of the JSON file
/// and the flags fall back to per-subcommand defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// `α_j/(2π)`: numbers, `"p/q"` or continued fractions `"3,3,[1]"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frequencies: Vec<FrequencySpec>,
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// State JSON for `fit`, scan CSV for `plot`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<FrequencySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PlotConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotConfig {
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub title: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// α/(2π) for n = 1: a decimal or p/q
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// α/(2π) for n = 1 as a continued fraction, e.g. 3,3,[1]
    #[arg(long = "alpha-cf", global = true)]
    pub alpha_cf: Option<String>,
    #[arg(long, global = true)]
    pub alpha1: Option<String>,
    #[arg(long, global = true)]
    pub alpha2: Option<String>,
    #[arg(long = "alpha1-cf", global = true)]
    pub alpha1_cf: Option<String>,
    #[arg(long = "alpha2-cf", global = true)]
    pub alpha2_cf: Option<String>,
    /// Target order
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub f0: Option<f64>,
    /// Comma-separated gauge constants
    #[arg(long = "gauge-a", global = true, value_delimiter = ',')]
    pub gauge_a: Option<Vec<f64>>,
    /// f64 or ext
    #[arg(long, global = true)]
    pub precision: Option<String>,
    #[arg(long = "divisor-floor", global = true)]
    pub divisor_floor: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Fit window as lo,hi
    #[arg(long, global = true, value_delimiter = ',')]
    pub window: Option<Vec<usize>>,
    /// Degree of the polynomial-equation check
    #[arg(long, global = true)]
    pub degree: Option<u32>,
}

fn spec(field: &str, s: &str) -> Result<FrequencySpec> {
    s.parse::<FrequencySpec>().map_err(|e| Error::invalid(field, e.to_string()))
}

fn cf(field: &str, s: &str) -> Result<FrequencySpec> {
    s.parse::<ContinuedFraction>()
        .map(FrequencySpec::Cf)
        .map_err(|e| Error::invalid(field, e.to_string()))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))
    }

    /// Config file (if any) with every given flag applied on top.
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let mut c = match &flags.config {
            Some(p) => Self::load(p)?,
            None => RunConfig::default(),
        };
        let one = match (&flags.alpha, &flags.alpha_cf) {
            (Some(_), Some(_)) => return Err(Error::invalid("alpha", "give --alpha or --alpha-cf, not both")),
            (Some(a), None) => Some(spec("alpha", a)?),
            (None, Some(a)) => Some(cf("alpha-cf", a)?),
            (None, None) => None,
        };
        let pick = |plain: &Option<String>, cfs: &Option<String>, name: &str| -> Result<Option<FrequencySpec>> {
            match (plain, cfs) {
                (Some(_), Some(_)) => Err(Error::invalid(name, "given both as a number and as a continued fraction")),
                (Some(a), None) => spec(name, a).map(Some),
                (None, Some(a)) => cf(&format!("{name}-cf"), a).map(Some),
                (None, None) => Ok(None),
            }
        };
        let a1 = pick(&flags.alpha1, &flags.alpha1_cf, "alpha1")?;
        let a2 = pick(&flags.alpha2, &flags.alpha2_cf, "alpha2")?;
        match (one, a1, a2) {
            (Some(a), None, None) => c.frequencies = vec![a],
            (None, Some(a), Some(b)) => c.frequencies = vec![a, b],
            (None, None, None) => {}
            (Some(_), _, _) => return Err(Error::invalid("alpha", "--alpha cannot be combined with --alpha1/--alpha2")),
            _ => return Err(Error::invalid("alpha2", "--alpha1 and --alpha2 must be given together")),
        }
        if flags.n.is_some() {
            c.n = flags.n;
        }
        if flags.k.is_some() {
            c.k = flags.k;
        }
        if flags.f0.is_some() {
            c.f0 = flags.f0;
        }
        if flags.gauge_a.is_some() {
            c.gauge_a = flags.gauge_a.clone();
        }
        if let Some(p) = &flags.precision {
            c.precision = Some(p.parse().map_err(|e: String| Error::invalid("precision", e))?);
        }
        if flags.divisor_floor.is_some() {
            c.divisor_floor = flags.divisor_floor;
        }
        if flags.seed.is_some() {
            c.seed = flags.seed;
        }
        if flags.workers.is_some() {
            c.workers = flags.workers;
        }
        if flags.out.is_some() {
            c.out = flags.out.clone();
        }
        if flags.input.is_some() {
            c.input = flags.input.clone();
        }
        if let Some(w) = &flags.window {
            let [lo, hi] = w[..] else {
                return Err(Error::invalid("window", "expected lo,hi"));
            };
            c.window = Some((lo, hi));
        }
        if flags.degree.is_some() {
            c.degree = flags.degree;
        }
        if c.workers == Some(0) {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        Ok(c)
    }

    /// Validated frequencies; `n` must agree with their count when both are set.
    pub fn frequency_vector(&self, k_for_scan: usize) -> Result<FrequencyVector> {
        if self.frequencies.is_empty() {
            return Err(Error::invalid(
                "frequencies",
                "no frequency given (use --alpha, --alpha-cf, --alpha1/--alpha2 or the config)",
            ));
        }
        if let Some(n) = self.n {
            if n != self.frequencies.len() {
                return Err(Error::invalid(
                    "n",
                    format!("n = {n} but {} frequencies were given", self.frequencies.len()),
                ));
            }
        }
        make_frequencies(&self.frequencies, (2 * k_for_scan as u32).clamp(3, 15))
    }

    pub fn require_k(&self) -> Result<usize> {
        self.k.ok_or_else(|| Error::invalid("K", "target order is required (--K)"))
    }
}
