//! Run configuration: command-line flags merged over an optional TOML
//! config file (flags win).

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fevt::extremes::BaseDistribution;
use fevt::measures::{EvtLaw, LawFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flat key-value configuration mirrored by the TOML config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub law: Option<String>,
    pub alpha: Option<f64>,
    pub base: Option<String>,
    pub t: Option<Vec<f64>>,
    pub t_grid: Option<String>,
    pub k: Option<Vec<f64>>,
    pub n: Option<Vec<u64>>,
    pub d: Option<Vec<u64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_file(path: &PathBuf) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("cannot parse config file {}", path.display()))
    }

    /// Overlay `self` (flag values) on top of `file` values.
    pub fn merged_over(self, file: RunConfig) -> RunConfig {
        RunConfig {
            law: self.law.or(file.law),
            alpha: self.alpha.or(file.alpha),
            base: self.base.or(file.base),
            t: self.t.or(file.t),
            t_grid: self.t_grid.or(file.t_grid),
            k: self.k.or(file.k),
            n: self.n.or(file.n),
            d: self.d.or(file.d),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            output: self.output.or(file.output),
            format: self.format.or(file.format),
        }
    }

    pub fn law(&self) -> Result<EvtLaw> {
        let name = self.law.as_deref().unwrap_or("frechet");
        let family = match name.to_ascii_lowercase().as_str() {
            "gumbel" | "type1" | "i" => LawFamily::Gumbel,
            "frechet" | "type2" | "ii" => LawFamily::Frechet,
            "weibull" | "type3" | "iii" => LawFamily::Weibull,
            other => bail!("unknown law family '{other}' (expected gumbel, frechet or weibull)"),
        };
        let alpha = self.alpha.unwrap_or(1.0);
        Ok(EvtLaw::new(family, alpha)?)
    }

    pub fn base(&self) -> Result<BaseDistribution> {
        let name = self.base.as_deref().unwrap_or("pareto");
        Ok(match name.to_ascii_lowercase().as_str() {
            "pareto" => BaseDistribution::pareto(self.alpha.unwrap_or(1.0))?,
            "exponential" | "exp" => BaseDistribution::exponential(),
            "uniform" | "uniform01" => BaseDistribution::uniform01(),
            other => bail!("unknown base distribution '{other}' (expected pareto, exponential or uniform)"),
        })
    }

    /// The evaluation grid: `--t-grid lo:hi:count` or an explicit `--t` list.
    pub fn t_values(&self) -> Result<Vec<f64>> {
        if let Some(spec) = &self.t_grid {
            return parse_grid(spec);
        }
        if let Some(ts) = &self.t {
            if ts.is_empty() {
                bail!("empty t list");
            }
            return Ok(ts.clone());
        }
        bail!("no evaluation points: pass --t or --t-grid lo:hi:count")
    }

    pub fn k_values(&self) -> Result<Vec<f64>> {
        let ks = self.k.clone().unwrap_or_else(|| vec![0.0]);
        if ks.is_empty() {
            bail!("empty k list");
        }
        if ks.iter().any(|&k| k < 0.0 || !k.is_finite()) {
            bail!("order indices k must be nonnegative");
        }
        Ok(ks)
    }

    pub fn n_values(&self) -> Result<Vec<u64>> {
        let ns = self.n.clone().unwrap_or_else(|| vec![4, 16, 64, 256]);
        if ns.is_empty() || ns.iter().any(|&n| n < 1) {
            bail!("sample sizes n must be >= 1");
        }
        Ok(ns)
    }

    pub fn d_values(&self) -> Result<Vec<u64>> {
        let ds = self.d.clone().unwrap_or_else(|| vec![128]);
        if ds.is_empty() || ds.iter().any(|&d| d < 2) {
            bail!("matrix dimensions d must be >= 2");
        }
        Ok(ds)
    }

    pub fn seed_required(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| anyhow::anyhow!("stochastic commands need --seed for reproducibility"))
    }
}

/// Parse `lo:hi:count` into an inclusive uniform grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec '{spec}' is not of the form lo:hi:count");
    }
    let lo: f64 = parts[0].parse().with_context(|| format!("bad grid bound '{}'", parts[0]))?;
    let hi: f64 = parts[1].parse().with_context(|| format!("bad grid bound '{}'", parts[1]))?;
    let count: usize = parts[2].parse().with_context(|| format!("bad grid count '{}'", parts[2]))?;
    if count < 2 || !hi.is_finite() || !lo.is_finite() || hi <= lo {
        bail!("grid spec '{spec}' needs hi > lo and count >= 2");
    }
    Ok((0..count)
        .map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64)
        .collect())
}
