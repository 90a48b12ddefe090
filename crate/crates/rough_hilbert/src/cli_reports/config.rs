use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::convolution_lab::ConvolutionConfig;
use crate::error::{LabError, Result};
use crate::kernel_factory::{BumpCutoff, Variant};

/// Every parameter a run can depend on. Missing JSON fields take the
/// defaults below; unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    /// Lower scale exponent: `M^θ <= s <= M`.
    pub theta: f64,
    /// Counterexample and lemma-audit `δ`.
    pub delta: f64,
    /// Cut exponent of the autocorrelation decomposition.
    pub delta_l: f64,
    /// Grid exponent `δ₀` of the interval partition.
    pub delta0: f64,
    /// Exponent fixing the census targets `x ≈ 2·M^{α−1+δ_count}`.
    pub delta_count: f64,
    pub m: u64,
    pub m_grid: Vec<u64>,
    /// Scales `s` for single-block decompositions.
    pub s_grid: Vec<u64>,
    pub variant: Variant,
    pub cutoff_lo: f64,
    pub cutoff_hi: f64,
    /// Inclusive census range; `None` picks 20 targets near `2·M^{α−1+δ_count}`.
    pub x_range: Option<(u64, u64)>,
    /// Constant `C` in `H/C <= h <= CH` for the main term.
    pub c_range: f64,
    pub expsum_m: f64,
    pub expsum_h: (u64, u64),
    pub samples: usize,
    /// Resolvent `λ`; when both parts are absent `λ = 1 + 2iN`.
    pub lambda_re: Option<f64>,
    pub lambda_im: Option<f64>,
    pub terms: usize,
    /// Symmetric window `[−w, w]` for the resolvent kernel.
    pub window: Option<u64>,
    /// Identity-residual tolerance of the resolvent command.
    pub tolerance: f64,
    pub cz_y_max: u64,
    pub power_n_max: usize,
    pub c_kappa: f64,
    pub counterexample_m: Vec<u64>,
    pub precision_max_bits: u32,
    pub budget_mb: u64,
    pub seed: u64,
    /// Recorded in the manifest; all stages run sequentially.
    pub threads: usize,
    /// Also write the large intermediate kernels as CSV.
    pub write_kernels: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alpha: 1.5,
            theta: 0.6,
            delta: 0.15,
            delta_l: 0.2,
            delta0: 0.2,
            delta_count: 0.2,
            m: 1024,
            m_grid: vec![256, 1024, 4096],
            s_grid: vec![1024, 2048],
            variant: Variant::PhiOfMalphaOverS,
            cutoff_lo: 0.5,
            cutoff_hi: 2.0,
            x_range: None,
            c_range: 8.0,
            expsum_m: (1u64 << 30) as f64,
            expsum_h: (8, 16),
            samples: 200,
            lambda_re: None,
            lambda_im: None,
            terms: 40,
            window: None,
            tolerance: 1e-6,
            cz_y_max: 1024,
            power_n_max: 4,
            c_kappa: 0.1,
            counterexample_m: vec![1 << 12, 1 << 13, 1 << 14],
            precision_max_bits: 1024,
            budget_mb: 3072,
            seed: 0x5eed,
            threads: 1,
            write_kernels: false,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return bad(format!("alpha = {} outside (1, 2)", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta = {} outside [0, 1]", self.theta));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("delta_l", self.delta_l),
            ("delta0", self.delta0),
            ("delta_count", self.delta_count),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} outside (0, 1)"));
            }
        }
        if self.m < 2 || self.m_grid.iter().chain(&self.s_grid).chain(&self.counterexample_m).any(|&m| m < 2) {
            return bad("all scales must be >= 2".into());
        }
        if !(self.cutoff_lo >= 0.0 && self.cutoff_lo < self.cutoff_hi) {
            return bad(format!("cutoff support ({}, {}) is empty", self.cutoff_lo, self.cutoff_hi));
        }
        if self.budget_mb == 0 {
            return bad("budget must be positive".into());
        }
        if self.terms == 0 {
            return bad("need at least one Neumann term".into());
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance = {} must be positive", self.tolerance));
        }
        if !(self.c_kappa > 0.0 && self.c_kappa <= 1.0) {
            return bad(format!("c_kappa = {} outside (0, 1]", self.c_kappa));
        }
        if !(self.c_range >= 1.0) {
            return bad(format!("c_range = {} must be >= 1", self.c_range));
        }
        Ok(())
    }

    pub fn cutoff(&self) -> Result<BumpCutoff> {
        BumpCutoff::new(self.cutoff_lo, self.cutoff_hi)
    }

    pub fn budget_bytes(&self) -> usize {
        usize::try_from(self.budget_mb.saturating_mul(1 << 20)).unwrap_or(usize::MAX)
    }

    pub fn conv(&self) -> ConvolutionConfig {
        ConvolutionConfig { budget_bytes: self.budget_bytes(), seed: self.seed, ..ConvolutionConfig::default() }
    }
}
