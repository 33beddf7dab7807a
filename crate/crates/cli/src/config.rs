use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use plh_core::code::MAX_K;
use plh_core::decoders::{
    DecoderConfig, DecoderKind, NoiseVarSource, SimpleMode, DEFAULT_ESTIMATOR_WINDOW, MIN_ESTIMATOR_LEN,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DecoderName {
    Standard,
    Simple,
    Strategy1,
    Strategy2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SimpleModeName {
    OwnLength,
    ZeroPadded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NoiseVarName {
    Known,
    Estimated,
}

/// Every setting a command may read. Loaded from a TOML file, then
/// overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Monte Carlo master seed.
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codebook: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modcod_table: Option<PathBuf>,

    pub trials: u64,
    pub decoder: DecoderName,
    pub alpha: f64,
    pub beta: f64,
    pub simple_mode: SimpleModeName,
    pub noise_var: NoiseVarName,
    /// Samples per noise variance estimate.
    pub window: usize,

    /// ModCod for `simulate`.
    pub modcod: u32,
    /// ModCods for `sweep` and `gap`.
    pub modcods: Vec<u32>,
    pub esn0: Vec<f64>,
    /// Values of the decoder parameter for `sweep`.
    pub params: Vec<f64>,
    pub target_cer: f64,
    /// Trial cap per gap search point.
    pub max_trials: u64,
    pub deep: bool,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_dmin: Option<usize>,
    /// Bound target used to size each length class.
    pub design_cer: f64,
    pub design_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            threads: None,
            out: None,
            codebook: None,
            modcod_table: None,
            trials: 100_000,
            decoder: DecoderName::Strategy1,
            alpha: 0.5,
            beta: 0.2,
            simple_mode: SimpleModeName::OwnLength,
            noise_var: NoiseVarName::Known,
            window: DEFAULT_ESTIMATOR_WINDOW,
            modcod: 6,
            modcods: vec![1, 2, 3, 6],
            esn0: vec![0.0],
            params: vec![0.3, 0.5, 0.7, 1.0],
            target_cer: 1e-3,
            max_trials: 1_000_000,
            deep: false,
            k: None,
            target_dmin: None,
            design_cer: plh_core::codebook::DEFAULT_DESIGN_CER,
            design_seed: plh_core::codebook::DEFAULT_DESIGN_SEED,
        }
    }
}

/// Target CER and trial cap used by `gap --deep`.
pub const DEEP_TARGET_CER: f64 = 1e-5;
pub const DEEP_MAX_TRIALS: u64 = 100_000_000;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid config file")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn decoder_config(&self) -> DecoderConfig {
        let kind = match self.decoder {
            DecoderName::Standard => DecoderKind::Standard,
            DecoderName::Simple => DecoderKind::Simple {
                mode: match self.simple_mode {
                    SimpleModeName::OwnLength => SimpleMode::OwnLength,
                    SimpleModeName::ZeroPadded => SimpleMode::ZeroPadded,
                },
            },
            DecoderName::Strategy1 => DecoderKind::Strategy1 { alpha: self.alpha },
            DecoderName::Strategy2 => DecoderKind::Strategy2 { beta: self.beta },
        };
        DecoderConfig {
            kind,
            noise_var_source: match self.noise_var {
                NoiseVarName::Known => NoiseVarSource::Known,
                NoiseVarName::Estimated => NoiseVarSource::Estimated { window: self.window },
            },
        }
    }

    /// `(target CER, trial cap)` for gap searches.
    pub fn gap_schedule(&self) -> (f64, u64) {
        if self.deep {
            (DEEP_TARGET_CER, DEEP_MAX_TRIALS)
        } else {
            (self.target_cer, self.max_trials)
        }
    }

    /// Checks every numeric setting before any work starts.
    pub fn validate(&self) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be >= 1");
        ensure!(self.threads != Some(0), "threads must be >= 1");
        ensure!(
            self.alpha > 0.0 && self.alpha.is_finite(),
            "alpha must be > 0, got {}",
            self.alpha
        );
        ensure!(
            self.beta >= 0.0 && self.beta.is_finite(),
            "beta must be >= 0, got {}",
            self.beta
        );
        ensure!(
            self.window >= MIN_ESTIMATOR_LEN,
            "window must be >= {MIN_ESTIMATOR_LEN}, got {}",
            self.window
        );
        ensure!(self.modcod >= 1, "modcod ids start at 1");
        ensure!(!self.modcods.is_empty(), "modcods must be nonempty");
        ensure!(!self.esn0.is_empty(), "esn0 must be nonempty");
        ensure!(self.esn0.iter().all(|x| x.is_finite()), "esn0 values must be finite");
        ensure!(!self.params.is_empty(), "params must be nonempty");
        for &p in &self.params {
            match self.decoder {
                DecoderName::Strategy1 => ensure!(p > 0.0 && p.is_finite(), "alpha values must be > 0, got {p}"),
                DecoderName::Strategy2 => ensure!(p >= 0.0 && p.is_finite(), "beta values must be >= 0, got {p}"),
                _ => {}
            }
        }
        ensure!(
            self.target_cer > 0.0 && self.target_cer < 1.0,
            "target_cer must be in (0, 1), got {}",
            self.target_cer
        );
        ensure!(self.max_trials >= 1, "max_trials must be >= 1");
        ensure!(
            self.design_cer > 0.0 && self.design_cer < 1.0,
            "design_cer must be in (0, 1), got {}",
            self.design_cer
        );
        match (self.k, self.target_dmin) {
            (Some(k), Some(d)) => {
                ensure!((1..=MAX_K).contains(&k), "k must be in 1..={MAX_K}, got {k}");
                ensure!(d >= 1, "target_dmin must be >= 1");
            }
            (None, None) => {}
            _ => bail!("k and target_dmin must be given together"),
        }
        Ok(())
    }
}
