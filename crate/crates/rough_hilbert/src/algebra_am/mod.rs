//! Representations `λ·Id + β·H_M + Σ K_s`, their block constants and
//! norms, canonical decomposition, CZ and weak-type measurements, Neumann
//! resolvents and product audits.

mod audits;
mod cz;
mod repr;
mod resolvent;

pub use crate::convolution_lab::{spectral_bound, SpectralBound};
pub use audits::{
    fit_epsilon, op_norm, power_decay_audit, product_representation, submultiplicativity_audit, trivial_schedule,
    PowerDecay, PowerRow, SubmultRecord,
};
pub use cz::{cz_norm, weak11_ratio};
pub use repr::{
    am_norm, block_conditions, canonical_decompose, default_probes, extract_lambda, AlgebraRepresentation,
    BlockReport, DecomposeTrace,
};
pub use resolvent::{neumann_resolvent, ResolventOptions, ResolventReport, ResolventSummary};

/// `γ₀ = δ/(4α)`.
pub fn default_gamma0(delta: f64, alpha: f64) -> f64 {
    delta / (4.0 * alpha)
}
