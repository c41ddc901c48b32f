//! Flat TOML configuration with command-line overrides.
//!
//! Relative paths in the file resolve against the file's directory. The
//! output directory is not part of the config hash, so the same experiment
//! written to two places carries the same header.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use figas_core::fdr::FdrMethod;
use figas_realtime::{DesignSpec, RegressorSpec, Transform};
use figas_text::{Frequency, LocationPolicy};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub corpus: String,
    pub lexicon: String,
    /// Topic file; empty means the bundled topics.
    pub topics: String,
    pub vintages: String,
    /// Smoothed daily series read by the estimation stages; empty means
    /// `<out>/series_smoothed.csv`.
    pub series: String,
    pub out: String,
    pub seed: u64,

    /// Allowed locations; `None` is the US whitelist, an empty list accepts any.
    pub locations: Option<Vec<String>>,
    pub keep_unlocated: bool,
    pub smoothing: usize,

    pub targets: Vec<String>,
    /// Series names such as `economy_all`; empty means every `*_all` series.
    pub sentiments: Vec<String>,
    pub target_lags: Option<usize>,
    /// `VARIABLE:first:last`.
    pub regressors: Vec<String>,
    pub eval_release: usize,
    /// Number of weekly horizons; `None` uses the target-frequency default.
    pub horizons: Option<usize>,
    /// Explicit horizons in days; overrides `horizons`.
    pub horizon_list: Vec<i64>,

    /// `mean` or `quantile`.
    pub mode: String,
    pub taus: Vec<f64>,
    pub fdr_method: String,
    pub fdr_level: f64,

    /// `auto`, `rolling` or `recursive`.
    pub scheme: String,
    pub window: usize,
    pub min_train: usize,
    pub oos_start: Option<NaiveDate>,
    pub aspa_block: usize,
    pub aspa_reps: usize,
    pub fluctuation_window: Option<usize>,
    /// Horizons that get a fluctuation report; empty means the first.
    pub fluctuation_horizons: Vec<i64>,

    pub synth_start: NaiveDate,
    pub synth_end: NaiveDate,
    pub synth_history_start: NaiveDate,
    pub synth_eta: f64,
    pub synth_noise: f64,
    pub synth_economy_sentences: usize,
    pub synth_inflation_sentences: usize,

    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
        Self {
            corpus: "corpus.clu".into(),
            lexicon: "lexicon.tsv".into(),
            topics: String::new(),
            vintages: "vintages.csv".into(),
            series: String::new(),
            out: "out".into(),
            seed: 0,
            locations: None,
            keep_unlocated: true,
            smoothing: figas_text::indicators::DEFAULT_SMOOTHING,
            targets: vec!["INDPRO".into()],
            sentiments: Vec::new(),
            target_lags: None,
            regressors: vec!["CFNAI:0:3".into(), "NFCI:1:4".into(), "ADS:0:8".into()],
            eval_release: 1,
            horizons: None,
            horizon_list: Vec::new(),
            mode: "mean".into(),
            taus: vec![0.1, 0.5, 0.9],
            fdr_method: "adaptive_bh".into(),
            fdr_level: 0.10,
            scheme: "auto".into(),
            window: 60,
            min_train: 36,
            oos_start: None,
            aspa_block: 3,
            aspa_reps: 999,
            fluctuation_window: None,
            fluctuation_horizons: Vec::new(),
            synth_start: d(1980, 1, 1),
            synth_end: d(2019, 12, 31),
            synth_history_start: d(1978, 1, 1),
            synth_eta: 0.5,
            synth_noise: 0.1,
            synth_economy_sentences: 4,
            synth_inflation_sentences: 3,
            base_dir: PathBuf::from("."),
        }
    }
}

/// Parses `key=value`; the value is read as TOML and falls back to a bare string.
fn parse_override(kv: &str) -> Result<(String, toml::Value)> {
    let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("override {kv:?} is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {v}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

impl Config {
    /// Loads the file (if any), applies `key=value` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let (mut table, base_dir) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
                let table: toml::Table =
                    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                (table, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (toml::Table::new(), PathBuf::new()),
        };
        for kv in overrides {
            let (k, v) = parse_override(kv)?;
            table.insert(k, v);
        }
        let mut cfg: Config =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.base_dir = if base_dir.as_os_str().is_empty() { PathBuf::from(".") } else { base_dir };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.smoothing < 1 {
            return bad("smoothing must be at least 1".into());
        }
        if self.targets.is_empty() {
            return bad("targets must not be empty".into());
        }
        if self.horizon_list.iter().any(|&h| h < 0) || self.horizons == Some(0) {
            return bad("horizon grid must be nonempty and non-negative".into());
        }
        if !matches!(self.mode.as_str(), "mean" | "quantile") {
            return bad(format!("mode must be mean or quantile, got {:?}", self.mode));
        }
        if self.mode == "quantile" && self.taus.is_empty() {
            return bad("quantile mode needs at least one tau".into());
        }
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return bad(format!("quantile level {t} outside (0,1)"));
        }
        self.fdr()?;
        if !(self.fdr_level > 0.0 && self.fdr_level < 1.0) {
            return bad(format!("fdr_level {} outside (0,1)", self.fdr_level));
        }
        if !matches!(self.scheme.as_str(), "auto" | "rolling" | "recursive") {
            return bad(format!("unknown scheme {:?}", self.scheme));
        }
        if self.window < 2 || self.min_train < 2 {
            return bad("window and min_train must be at least 2".into());
        }
        if self.aspa_block < 1 || self.aspa_reps < 1 {
            return bad("aspa_block and aspa_reps must be positive".into());
        }
        self.regressor_specs()?;
        if self.synth_start > self.synth_end || self.synth_history_start > self.synth_start {
            return bad("synthetic dates must satisfy history_start <= start <= end".into());
        }
        Ok(())
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Resolves a configured input path and checks that it exists.
    pub fn input(&self, key: &str, p: &str) -> Result<PathBuf> {
        let path = self.resolve(p);
        if !path.is_file() {
            return Err(CliError::Config(format!("{key} path {} does not exist", path.display())));
        }
        Ok(path)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.out)
    }

    pub fn series_path(&self) -> PathBuf {
        if self.series.is_empty() {
            self.out_dir().join("series_smoothed.csv")
        } else {
            self.resolve(&self.series)
        }
    }

    pub fn fdr(&self) -> Result<FdrMethod> {
        match self.fdr_method.as_str() {
            "bh" => Ok(FdrMethod::Bh),
            "adaptive_bh" => Ok(FdrMethod::AdaptiveBh),
            other => Err(CliError::Config(format!("unknown fdr_method {other:?}"))),
        }
    }

    pub fn location_policy(&self) -> LocationPolicy {
        match &self.locations {
            None => {
                let mut p = LocationPolicy::default();
                p.keep_unlocated = self.keep_unlocated;
                p
            }
            Some(list) if list.is_empty() => LocationPolicy::permissive(),
            Some(list) => LocationPolicy::new(list, self.keep_unlocated),
        }
    }

    pub fn regressor_specs(&self) -> Result<Vec<RegressorSpec>> {
        self.regressors
            .iter()
            .map(|r| {
                let parts: Vec<&str> = r.split(':').collect();
                let parse = |s: &str| s.trim().parse::<usize>().ok();
                match parts.as_slice() {
                    [v, a, b] | [v, a, b, _] => {
                        let (Some(a), Some(b)) = (parse(a), parse(b)) else {
                            return Err(CliError::Config(format!("bad regressor {r:?}")));
                        };
                        if a > b {
                            return Err(CliError::Config(format!("regressor {r:?}: first lag after last")));
                        }
                        let mut spec = RegressorSpec::new(v.trim(), a, b);
                        if let [_, _, _, t] = parts.as_slice() {
                            spec.transform = Transform::parse(t.trim())
                                .ok_or_else(|| CliError::Config(format!("regressor {r:?}: unknown transform")))?;
                        }
                        Ok(spec)
                    }
                    _ => Err(CliError::Config(format!("regressor {r:?} is not VARIABLE:first:last[:transform]"))),
                }
            })
            .collect()
    }

    pub fn design_spec(&self, target: &str, freq: Frequency) -> Result<DesignSpec> {
        let mut spec = DesignSpec::standard(target, freq);
        if let Some(p) = self.target_lags {
            spec.target_lags = p;
        }
        spec.regressors = self.regressor_specs()?;
        spec.eval_release = self.eval_release;
        Ok(spec)
    }

    pub fn horizon_grid(&self, freq: Frequency) -> Vec<i64> {
        if !self.horizon_list.is_empty() {
            return self.horizon_list.clone();
        }
        figas_realtime::horizon_grid(self.horizons.unwrap_or_else(|| figas_realtime::default_horizon_count(freq)))
    }

    /// Rolling unless the target is quarterly, when `scheme = "auto"`.
    pub fn rolling(&self, freq: Frequency) -> bool {
        match self.scheme.as_str() {
            "rolling" => true,
            "recursive" => false,
            _ => freq != Frequency::Quarterly,
        }
    }

    /// First 12 hex digits of the SHA-256 of the canonical JSON form, without `out`.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = String::new();
        let json = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    /// First line of every tabular output.
    pub fn header(&self) -> String {
        format!("# figas/{VERSION} config:{} seed:{}", self.hash(), self.seed)
    }

    /// Flat TOML form of the config; used by `synth` to write a runnable config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_win_and_parse_as_toml() {
        let cfg = Config::load(None, &["seed=7".into(), "mode=quantile".into(), "taus=[0.25]".into()]).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.mode, "quantile");
        assert_eq!(cfg.taus, vec![0.25]);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        assert_eq!(Config::load(None, &["nonsense=1".into()]).unwrap_err().exit_code(), 1);
        assert_eq!(Config::load(None, &["taus=[1.5]".into()]).unwrap_err().exit_code(), 1);
        assert_eq!(Config::load(None, &["regressors=[\"CFNAI:3:1\"]".into()]).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn hash_ignores_out_but_not_seed() {
        let a = Config::default();
        let b = Config { out: "elsewhere".into(), ..Config::default() };
        let c = Config { seed: 1, ..Config::default() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 12);
    }

    #[test]
    fn toml_round_trip() {
        let a = Config { seed: 3, oos_start: NaiveDate::from_ymd_opt(2014, 1, 1), ..Config::default() };
        let b: Config = toml::from_str(&a.to_toml()).unwrap();
        assert_eq!(Config { base_dir: a.base_dir.clone(), ..b }, a);
    }
}
