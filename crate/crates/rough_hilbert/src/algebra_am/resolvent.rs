use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::cz::cz_norm;
use crate::convolution_lab::{convolve_with, ConvolutionConfig};
use crate::error::{LabError, Result};
use crate::kernel_factory::{ComplexKernel, Kernel, KernelMeta};

/// Truncated Neumann resolvent of `λ·Id + H` and its decomposition
/// `λ_I δ₀ + β_I H + K`.
#[derive(Clone, Debug)]
pub struct ResolventReport {
    pub lambda_input: Complex64,
    pub neumann_terms: usize,
    /// Torus length used for the Fourier-side summation.
    pub torus: usize,
    pub kernel: ComplexKernel,
    pub lambda_i: Complex64,
    pub beta_i: Complex64,
    pub k_residual: ComplexKernel,
    pub cz_norm_value: f64,
    /// `‖(λδ₀ + H)∗R − δ₀‖₁`.
    pub identity_residual: f64,
    /// `ℓ²` norm of the last retained term.
    pub tail_l2: f64,
    /// Ratio of the `ℓ²` norms of the last two terms.
    pub term_ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventOptions {
    pub terms: usize,
    /// Inclusive window the kernel is restricted to; the full support by default.
    pub window: Option<(i64, i64)>,
    /// Shift range for the CZ norm of the residual kernel.
    pub cz_y_max: u64,
    pub conv: ConvolutionConfig,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        ResolventOptions { terms: 40, window: None, cz_y_max: 1024, conv: ConvolutionConfig::default() }
    }
}

/// Scalar summary of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventSummary {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub neumann_terms: usize,
    pub torus: usize,
    pub lambda_i_re: f64,
    pub lambda_i_im: f64,
    pub beta_i_re: f64,
    pub beta_i_im: f64,
    pub cz_norm: f64,
    pub identity_residual: f64,
    pub tail_l2: f64,
    pub term_ratio: f64,
    pub support_min: i64,
    pub support_max: i64,
}

impl ResolventReport {
    pub fn summary(&self) -> ResolventSummary {
        ResolventSummary {
            lambda_re: self.lambda_input.re,
            lambda_im: self.lambda_input.im,
            neumann_terms: self.neumann_terms,
            torus: self.torus,
            lambda_i_re: self.lambda_i.re,
            lambda_i_im: self.lambda_i.im,
            beta_i_re: self.beta_i.re,
            beta_i_im: self.beta_i.im,
            cz_norm: self.cz_norm_value,
            identity_residual: self.identity_residual,
            tail_l2: self.tail_l2,
            term_ratio: self.term_ratio,
            support_min: self.kernel.support_min(),
            support_max: self.kernel.support_max(),
        }
    }

    /// `|λ_I| + |β_I| + ‖K‖_CZ`.
    pub fn uniformity_proxy(&self) -> f64 {
        self.lambda_i.norm() + self.beta_i.norm() + self.cz_norm_value
    }
}

/// `R = Σ_{k=0}^{terms} (−1)^k H^{∗k} / λ^{k+1}`, summed on a torus long
/// enough that no power wraps around.
pub fn neumann_resolvent(lambda: Complex64, h: &Kernel, opts: &ResolventOptions) -> Result<ResolventReport> {
    if lambda.norm() == 0.0 {
        return Err(LabError::Domain("lambda must be nonzero".into()));
    }
    let terms = opts.terms;
    let one = Complex64::new(1.0, 0.0);
    let r = h.radius() as i64;
    let (kernel, torus, tail_l2, term_ratio) = if h.nnz() == 0 {
        (ComplexKernel::delta(0, one / lambda), 1, 0.0, 0.0)
    } else {
        let reach = (terms as i64 + 1) * r;
        let n = ((2 * reach + 1) as usize).next_power_of_two();
        let needed = 3 * n * 16;
        if needed > opts.conv.budget_bytes {
            return Err(LabError::Budget { needed, budget: opts.conv.budget_bytes });
        }
        let mut planner = FftPlanner::<f64>::new();
        let mut hat = vec![Complex64::new(0.0, 0.0); n];
        for (x, v) in h.iter() {
            hat[x.rem_euclid(n as i64) as usize] += v;
        }
        planner.plan_fft_forward(n).process(&mut hat);
        let mut term: Vec<Complex64> = vec![one / lambda; n];
        let mut acc = term.clone();
        let l2 = |t: &[Complex64]| (t.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64).sqrt();
        let mut prev = l2(&term);
        let mut last = prev;
        let mut ratio = 0.0;
        for _ in 0..terms {
            for (t, hh) in term.iter_mut().zip(&hat) {
                *t *= -*hh / lambda;
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            last = l2(&term);
            ratio = if prev > 0.0 { last / prev } else { 0.0 };
            prev = last;
        }
        if ratio > 1.0 - 1e-3 {
            return Err(LabError::NonConvergence { ratio });
        }
        planner.plan_fft_inverse(n).process(&mut acc);
        let span = terms as i64 * r;
        let mut k = ComplexKernel::zeros(-span, span, KernelMeta::labelled("resolvent"));
        for x in -span..=span {
            k.add_at(x, acc[x.rem_euclid(n as i64) as usize] / n as f64);
        }
        (k, n, last, ratio)
    };
    let kernel = match opts.window {
        Some((lo, hi)) => kernel.window(lo, hi),
        None => kernel,
    };
    let hc = h.to_complex();
    let op = hc.add(&ComplexKernel::delta(0, lambda));
    let prod = convolve_with(&op, &kernel, &opts.conv)?;
    let identity_residual = prod.sub(&ComplexKernel::delta(0, one)).l1_norm();
    let hh = h.l2_norm_sq();
    let beta_i = if hh > 0.0 { kernel.inner(&hc) / hh } else { Complex64::new(0.0, 0.0) };
    let lambda_i = kernel.get(0) - beta_i * h.get(0);
    let k_residual = kernel.add_scaled(&ComplexKernel::delta(0, one), -lambda_i).add_scaled(&hc, -beta_i);
    let cz_norm_value = cz_norm(&k_residual, opts.cz_y_max);
    Ok(ResolventReport {
        lambda_input: lambda,
        neumann_terms: terms,
        torus,
        kernel,
        lambda_i,
        beta_i,
        k_residual,
        cz_norm_value,
        identity_residual,
        tail_l2,
        term_ratio,
    })
}
