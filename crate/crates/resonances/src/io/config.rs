use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Error, Result};

/// File-level settings; every field may be overridden by a flag.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub sds: SdsSection,
    #[serde(default)]
    pub funnel: FunnelSection,
    #[serde(default)]
    pub symbols: SymbolsSection,
    #[serde(default)]
    pub count: CountSection,
    #[serde(default)]
    pub lattice: LatticeSection,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdsSection {
    pub mass: Option<f64>,
    pub lambda: Option<f64>,
    pub lmin: Option<u32>,
    pub lmax: Option<u32>,
    pub n: Option<usize>,
    pub n_high: Option<usize>,
    pub k_max: Option<u32>,
    pub gamma: Option<f64>,
    pub warp: Option<f64>,
    pub drift_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunnelSection {
    pub circumference: Option<f64>,
    pub m_min: Option<i64>,
    pub m_max: Option<i64>,
    pub bc: Option<String>,
    pub n: Option<usize>,
    pub n_high: Option<usize>,
    pub gamma: Option<f64>,
    pub drift_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolsSection {
    pub model: Option<String>,
    pub mass: Option<f64>,
    pub lambda: Option<f64>,
    pub circumference: Option<f64>,
    pub tau: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSection {
    pub rmax: Option<f64>,
    pub gamma: Option<f64>,
    pub trust_gamma: Option<f64>,
    pub steps: Option<usize>,
    pub fit_min: Option<f64>,
    pub svg: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub c: Option<f64>,
    pub ell_max: Option<u32>,
    pub k_max: Option<u32>,
    pub independent_signs: Option<bool>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Flag value if given, else file value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_overrides() {
        let c = RunConfig::parse("threads = 2\n[sds]\nmass = 1.0\nlambda = 0.02\nlmax = 4\n").unwrap();
        assert_eq!(c.threads, Some(2));
        assert_eq!(pick(Some(0.04), c.sds.lambda, 0.0), 0.04);
        assert_eq!(pick(None, c.sds.lambda, 0.0), 0.02);
        assert_eq!(pick(None, c.sds.n, 64), 64);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(RunConfig::parse("[sds]\nmas = 1.0\n"), Err(Error::Config(_))));
    }
}
