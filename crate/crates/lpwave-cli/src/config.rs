//! Run configuration: a single TOML file with command-line overrides taking
//! precedence. Unknown keys are rejected so typos cannot silently fall back
//! to defaults.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Box length; the default resolution is sized so the largest packet
    /// frequency (~1500 at k = 5, n = 2) and its quadratic image (~3000)
    /// survive the 2/3 dealias cutoff (~4289 at xi_max ~ 6434).
    pub grid_l: f64,
    pub grid_n: usize,
    pub out_dir: Option<String>,
    pub format: OutputFormat,
    pub seed: u64,
    pub k: u32,
    pub sigma: f64,
    pub p: String,
    pub epsilon: f64,
    pub model: String,
    pub b: f64,
    pub n_list: Vec<u32>,
    pub j_list: Vec<u32>,
    pub n_max: Option<u32>,
    pub t_end: f64,
    pub t_list: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_l: 128.0,
            grid_n: 1 << 18,
            out_dir: None,
            format: OutputFormat::Both,
            seed: 0,
            k: 5,
            sigma: 4.0,
            p: "2".into(),
            epsilon: 0.05,
            model: "ch".into(),
            b: 3.0,
            n_list: vec![1, 2],
            j_list: vec![4, 5, 6, 7, 8],
            n_max: None,
            t_end: 0.01,
            t_list: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => bail!("unknown output format {other:?} (expected csv|json|both)"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&raw)
            .with_context(|| format!("cannot parse config file {}", path.display()))?;
        Ok(cfg)
    }

    pub fn model_kind(&self) -> anyhow::Result<lpwave::ModelKind> {
        match self.model.to_ascii_lowercase().as_str() {
            "ch" | "camassa-holm" | "camassaholm" => Ok(lpwave::ModelKind::CamassaHolm),
            "b" | "b-family" | "bfamily" => Ok(lpwave::ModelKind::BFamily { b: self.b }),
            "dp" | "degasperis-procesi" => Ok(lpwave::ModelKind::BFamily { b: 3.0 }),
            "novikov" | "nov" => Ok(lpwave::ModelKind::Novikov),
            other => bail!("unknown model {other:?} (expected ch|b|dp|novikov)"),
        }
    }

    pub fn lp(&self) -> anyhow::Result<lpwave::Lp> {
        self.p
            .parse::<lpwave::Lp>()
            .map_err(|e| anyhow::anyhow!("bad exponent --p {}: {e}", self.p))
    }

    pub fn grid(&self) -> anyhow::Result<lpwave::Grid> {
        Ok(lpwave::Grid::new(self.grid_l, self.grid_n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_is_lossless() {
        let cfg = RunConfig {
            t_list: Some(vec![1e-5, 1e-4]),
            out_dir: Some("reports".into()),
            ..RunConfig::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("grid_l = 64.0\nwhatever = 3\n");
        assert!(err.is_err());
    }
}
