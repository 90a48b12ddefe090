use serde::{Deserialize, Serialize};

use super::badsets::{bad_sets, default_j_window, default_p_len, witness_set, BadSets, Witness};
use super::blocks::{single_scale_blocks, TwoBlockTransform};
use crate::convolution_lab::{convolve_with, loglog_fit, lp_norm, ConvolutionConfig};
use crate::error::{LabError, Result};
use crate::kernel_factory::{block_kernel, Kernel, Variant};
use crate::power_lattice::PowerSequence;

/// Constant `C` in the `j` window `[M^{…}/C, C·M^{…}]`.
pub const DEFAULT_J_CONSTANT: f64 = 4.0;

/// `p = 1 + 1/ln M`.
pub fn default_p(m: u64) -> f64 {
    1.0 + 1.0 / (m as f64).ln()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossTermReport {
    pub m_top: u64,
    pub p: f64,
    pub cross_lp: f64,
    pub cross_l1: f64,
    pub j_lo: i64,
    pub j_hi: i64,
    pub p_len: f64,
    pub bad_nonempty: usize,
    pub bad_max: usize,
    /// `M^{α−1−1.9δ}`.
    pub bad_scale: f64,
    /// `max |A_j| / M^{α−1−1.9δ}`.
    pub bad_c_fit: f64,
    pub witness_count: usize,
    /// `(Σ_{±x} bound^p)^{1/p}` over witnesses and their mirror images.
    pub witness_bound: f64,
    /// Witnesses whose representation count is not exactly one.
    pub uniqueness_failures: usize,
    /// Witnesses with `|ℍ₊∗ℍ₋(x)|` below the bound.
    pub lower_bound_failures: usize,
    #[serde(skip)]
    pub witnesses: Vec<Witness>,
    #[serde(skip)]
    pub bad: Option<BadSets>,
}

impl CrossTermReport {
    pub fn witnesses_certified(&self) -> bool {
        self.uniqueness_failures == 0 && self.lower_bound_failures == 0
    }
}

/// `‖ℍ₊∗ℍ₋‖_{ℓ^p}` together with the unique-representation witnesses.
pub fn cross_term_report(tb: &TwoBlockTransform, p: f64, cfg: &ConvolutionConfig) -> Result<CrossTermReport> {
    let cross = convolve_with(&tb.h_plus, &tb.h_minus, cfg)?;
    let cross_lp = lp_norm(&cross, p)?;
    let p_len = default_p_len(tb);
    let (lo, hi) = default_j_window(tb, DEFAULT_J_CONSTANT);
    // One extra index on each side so that A_{j±1} is known for every witness j.
    let bad = bad_sets(tb, lo - 1, hi + 1, p_len)?;
    let witnesses = witness_set(tb, &bad);
    let mut uniqueness_failures = 0;
    let mut lower_bound_failures = 0;
    let mut acc = Vec::with_capacity(witnesses.len());
    for w in &witnesses {
        if tb.representations(w.x).len() != 1 {
            uniqueness_failures += 1;
        }
        let v = cross.get(w.x).abs();
        if v < w.bound * (1.0 - 1e-9) {
            lower_bound_failures += 1;
        }
        acc.push(w.bound);
    }
    let witness_bound = if acc.is_empty() {
        0.0
    } else {
        let mx = acc.iter().cloned().fold(0.0, f64::max);
        let s = crate::kernel_factory::compensated_sum(acc.iter().map(|b| 2.0 * (b / mx).powf(p)));
        mx * s.powf(1.0 / p)
    };
    let m = tb.m_top as f64;
    let bad_scale = m.powf(tb.alpha - 1.0 - 1.9 * tb.delta);
    Ok(CrossTermReport {
        m_top: tb.m_top,
        p,
        cross_lp,
        cross_l1: cross.l1_norm(),
        j_lo: lo,
        j_hi: hi,
        p_len,
        bad_nonempty: bad.nonempty(),
        bad_max: bad.max_size(),
        bad_scale,
        bad_c_fit: bad.max_size() as f64 / bad_scale,
        witness_count: witnesses.len(),
        witness_bound,
        uniqueness_failures,
        lower_bound_failures,
        witnesses,
        bad: Some(bad),
    })
}

/// `‖H_{s₁}∗H_{s₂}‖₂²` against `1/(s₁s₂) + s₁^{−α}`, `s₁ >= s₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub s1: u64,
    pub s2: u64,
    pub l2_sq: f64,
    pub rhs: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelfTermReport {
    pub m_top: u64,
    pub p: f64,
    pub plus_lp: f64,
    pub minus_lp: f64,
    pub witnesses_checked: usize,
    /// Witnesses at which `ℍ₋∗ℍ₋` is nonzero.
    pub minus_nonvanishing: usize,
    pub pairs: Vec<PairBound>,
    pub pair_constant: f64,
}

/// `ℓ^p` norms of `ℍ₊∗ℍ₊` and `ℍ₋∗ℍ₋`, vanishing of `ℍ₋∗ℍ₋` on the
/// witnesses, and the per-pair `ℓ²` bound over scales of `U₊`.
pub fn self_term_report(
    tb: &TwoBlockTransform,
    p: f64,
    witnesses: &[Witness],
    seq: &PowerSequence,
    cfg: &ConvolutionConfig,
) -> Result<SelfTermReport> {
    let pp = convolve_with(&tb.h_plus, &tb.h_plus, cfg)?;
    let plus_lp = lp_norm(&pp, p)?;
    let mm = convolve_with(&tb.h_minus, &tb.h_minus, cfg)?;
    let minus_lp = lp_norm(&mm, p)?;
    let minus_nonvanishing = witnesses.iter().filter(|w| mm.get(w.x) != 0.0).count();
    let cutoff = super::blocks::unit_bump();
    let blocks: Vec<(u64, Kernel)> = tb
        .u_plus
        .iter()
        .map(|&s| Ok((s, block_kernel(seq, s, &cutoff, Variant::PhiOfMOverS)?)))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (i, (s1, b1)) in blocks.iter().enumerate().rev() {
        for (s2, b2) in blocks[..=i].iter().rev() {
            let l2_sq = if blocks.len() == 1 { pp.l2_norm_sq() } else { convolve_with(b1, b2, cfg)?.l2_norm_sq() };
            let rhs = 1.0 / (*s1 as f64 * *s2 as f64) + (*s1 as f64).powf(-tb.alpha);
            pairs.push(PairBound { s1: *s1, s2: *s2, l2_sq, rhs, constant: l2_sq / rhs });
        }
    }
    let pair_constant = pairs.iter().map(|q| q.constant).fold(0.0, f64::max);
    Ok(SelfTermReport {
        m_top: tb.m_top,
        p,
        plus_lp,
        minus_lp,
        witnesses_checked: witnesses.len(),
        minus_nonvanishing,
        pairs,
        pair_constant,
    })
}

/// One row of the blow-up table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlowupRow {
    pub m_top: u64,
    pub p: f64,
    pub cross_lp: f64,
    pub self_lp: f64,
    pub witness_bound: f64,
    /// `‖ℍ₊∗ℍ₋‖_p / (ln M)²`.
    pub log_m_sq_ratio: f64,
    pub minus_self_lp: f64,
    pub witness_count: usize,
    pub uniqueness_failures: usize,
    pub lower_bound_failures: usize,
    pub minus_nonvanishing: usize,
    pub bad_max: usize,
    pub bad_c_fit: f64,
    pub pair_constant: f64,
    pub u_plus: Vec<u64>,
    pub u_minus: Vec<u64>,
    pub u_minus_snapped: bool,
}

impl BlowupRow {
    /// `‖ℍ₊∗ℍ₋‖_p > κ²·‖ℍ₊∗ℍ₊‖_p`.
    pub fn exceeds(&self, kappa: f64) -> bool {
        self.cross_lp > kappa * kappa * self.self_lp
    }

    pub fn certified(&self) -> bool {
        self.uniqueness_failures == 0 && self.lower_bound_failures == 0 && self.minus_nonvanishing == 0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlowupReport {
    pub alpha: f64,
    pub delta: f64,
    pub c_kappa: f64,
    pub kappa: f64,
    pub rows: Vec<BlowupRow>,
    /// Slope of `ln ‖ℍ₊∗ℍ₋‖_p` against `ln ln M`.
    pub cross_exponent: f64,
    pub self_exponent: f64,
    /// `min_M ‖ℍ₊∗ℍ₋‖_p/(ln M)²`.
    pub log_ratio_min: f64,
}

impl BlowupReport {
    pub fn all_pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.exceeds(self.kappa) && r.certified())
    }
}

/// Single-scale blocks at each `M`, cross and self terms at `p = 1 + 1/ln M`.
pub fn blowup_report(alpha: f64, delta: f64, c_kappa: f64, ms: &[u64], cfg: &ConvolutionConfig) -> Result<BlowupReport> {
    if ms.is_empty() {
        return Err(LabError::Config("blow-up report needs at least one M".into()));
    }
    let mut rows = Vec::new();
    for &m in ms {
        let tb = single_scale_blocks(alpha, delta, c_kappa, m)?;
        let seq = PowerSequence::new(alpha, 2 * m)?;
        let p = default_p(m);
        let cross = cross_term_report(&tb, p, cfg)?;
        let selft = self_term_report(&tb, p, &cross.witnesses, &seq, cfg)?;
        rows.push(BlowupRow {
            m_top: m,
            p,
            cross_lp: cross.cross_lp,
            self_lp: selft.plus_lp,
            witness_bound: cross.witness_bound,
            log_m_sq_ratio: cross.cross_lp / (m as f64).ln().powi(2),
            minus_self_lp: selft.minus_lp,
            witness_count: cross.witness_count,
            uniqueness_failures: cross.uniqueness_failures,
            lower_bound_failures: cross.lower_bound_failures,
            minus_nonvanishing: selft.minus_nonvanishing,
            bad_max: cross.bad_max,
            bad_c_fit: cross.bad_c_fit,
            pair_constant: selft.pair_constant,
            u_plus: tb.u_plus.clone(),
            u_minus: tb.u_minus.clone(),
            u_minus_snapped: tb.snapped.1,
        });
    }
    let fit = |f: &dyn Fn(&BlowupRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.m_top as f64).ln(), f(r))).collect();
        loglog_fit(&pts).0
    };
    let cross_exponent = fit(&|r| r.cross_lp);
    let self_exponent = fit(&|r| r.self_lp);
    let log_ratio_min = rows.iter().map(|r| r.log_m_sq_ratio).fold(f64::INFINITY, f64::min);
    Ok(BlowupReport {
        alpha,
        delta,
        c_kappa,
        kappa: c_kappa * delta,
        rows,
        cross_exponent,
        self_exponent,
        log_ratio_min,
    })
}
