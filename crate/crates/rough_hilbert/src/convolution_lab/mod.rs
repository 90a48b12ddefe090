//! Convolution of integer-supported kernels, symbols and `ℓ^p` norms, the
//! autocorrelation split of a single block, and mollifier audits.

mod audit;
mod convolve;
mod decompose;
mod spectrum;

pub use audit::{lemma_audit, shifted_l2_sq, AuditRequest, AuditRow, AuditTarget};
pub use convolve::{convolve, convolve_with, fft_len, ConvolutionConfig, ConvolutionMode};
pub use decompose::{
    autocorrelation, autocorrelation_decompose, autocorrelation_decompose_with, default_shifts, loglog_fit, regularity_profile,
    DecompositionReport, RegularityProfile,
};
pub use spectrum::{default_grid, lp_norm, spectral_bound, symbol_at, symbol_profile, symbol_sup, SpectralBound, SpectrumProfile};
