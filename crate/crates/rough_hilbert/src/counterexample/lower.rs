use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::blocks::TwoBlockTransform;
use crate::convolution_lab::{convolve_with, loglog_fit, lp_norm, ConvolutionConfig};
use crate::error::{LabError, Result};
use crate::kernel_factory::{ComplexKernel, Kernel, KernelMeta};

/// Lower bound for the `ℓ^p` kernel norm of `(λ − H)^{−1} = Σ_k H^k/λ^{k+1}`.
///
/// The first three terms are summed exactly; the tail is bounded with
/// Young's inequality, `‖H^k‖_p <= ‖H‖₁^{k−1}‖H‖_p`. The kernel norm
/// `‖(λ−H)^{−1}δ₀‖_p` is itself a lower bound for the `ℓ^p → ℓ^p` norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventLowerRecord {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub p: f64,
    pub h_l1: f64,
    pub h_lp: f64,
    /// `‖H∗H‖_p`.
    pub h2_lp: f64,
    /// `1/|λ|`, `‖H‖_p/|λ|²`, `‖H∗H‖_p/|λ|³`.
    pub terms: [f64; 3],
    /// `‖H‖₁/|λ|`.
    pub ratio: f64,
    pub tail_bound: f64,
    /// `‖δ₀/λ + H/λ² + H∗H/λ³‖_p`.
    pub partial_lp: f64,
    /// `partial_lp − tail_bound`.
    pub witness: f64,
    /// `‖H∗H‖_p/|λ|³ − ‖H‖_p/|λ|² − 1/|λ| − tail_bound`.
    pub chain: f64,
}

/// Record for the kernel `h`. Requires `|λ| > ‖h‖₁`, which dominates the
/// spectral bound of `h`.
pub fn resolvent_lower_bound(h: &Kernel, lambda: Complex64, p: f64, cfg: &ConvolutionConfig) -> Result<ResolventLowerRecord> {
    let r = lambda.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(LabError::Domain(format!("lambda = {lambda} must be finite and nonzero")));
    }
    let h_l1 = h.l1_norm();
    let ratio = h_l1 / r;
    if ratio >= 1.0 {
        return Err(LabError::NonConvergence { ratio });
    }
    let h_lp = lp_norm(h, p)?;
    let h2 = convolve_with(h, h, cfg)?;
    let h2_lp = lp_norm(&h2, p)?;
    let inv = lambda.inv();
    let (inv2, inv3) = (inv * inv, inv * inv * inv);
    let partial = if h2.is_empty() {
        ComplexKernel::delta(0, inv)
    } else {
        let mut k = ComplexKernel::zeros(h2.support_min(), h2.support_max(), KernelMeta::labelled("partial resolvent"));
        for (x, v) in h2.iter() {
            k.add_at(x, inv3 * v);
        }
        for (x, v) in h.iter() {
            k.add_at(x, inv2 * v);
        }
        k.add_at(0, inv);
        k
    };
    let partial_lp = lp_norm(&partial, p)?;
    let tail_bound = h_lp * h_l1 * h_l1 / r.powi(4) / (1.0 - ratio);
    let terms = [1.0 / r, h_lp / (r * r), h2_lp / r.powi(3)];
    Ok(ResolventLowerRecord {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        p,
        h_l1,
        h_lp,
        h2_lp,
        terms,
        ratio,
        tail_bound,
        partial_lp,
        witness: partial_lp - tail_bound,
        chain: terms[2] - terms[1] - terms[0] - tail_bound,
    })
}

/// `resolvent_lower_bound` for `ℍ₊ + ℍ₋`.
pub fn resolvent_lower_demo(
    tb: &TwoBlockTransform,
    lambda: Complex64,
    p: f64,
    cfg: &ConvolutionConfig,
) -> Result<ResolventLowerRecord> {
    resolvent_lower_bound(&tb.total(), lambda, p, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventSweep {
    pub rows: Vec<ResolventLowerRecord>,
    /// Slope of `ln witness` against `ln(p − 1)`.
    pub exponent: f64,
}

/// The record over several `p`, with the log-log slope in `p − 1`.
pub fn resolvent_lower_sweep(h: &Kernel, lambda: Complex64, ps: &[f64], cfg: &ConvolutionConfig) -> Result<ResolventSweep> {
    let rows = ps.iter().map(|&p| resolvent_lower_bound(h, lambda, p, cfg)).collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.p - 1.0, r.witness)).collect();
    Ok(ResolventSweep { exponent: loglog_fit(&pts).0, rows })
}
