use serde::{Deserialize, Serialize};

use super::convolve::{convolve_with, ConvolutionConfig};
use super::spectrum::spectral_bound;
use crate::error::{LabError, Result};
use crate::kernel_factory::{block_kernel, mollifier_kernel, BumpCutoff, Kernel, MollifierKind, Variant};
use crate::power_lattice::PowerSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditTarget {
    /// `‖φ_{s₁}∗H_s‖²` against `1/s`.
    MollifiedBlock,
    /// `‖φ_{s₁}∗H_s∗𝕋_s‖²` against `‖𝕋_s‖²/s`.
    MollifiedBlockLower,
    /// `‖ψ_l∗H_s∗𝓗_{s₁}‖²` against `s^{−1−δ/2}`.
    BandPair,
    /// `‖H_s∗𝕋_s‖²` against `‖𝕋_s‖²/s`.
    BlockLower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRequest {
    pub which: AuditTarget,
    pub s: u64,
    pub s1: Option<u64>,
    pub l: Option<u64>,
    pub delta: f64,
    pub gamma: f64,
    /// Shifts `h` for the Hölder clauses.
    pub shifts: Vec<i64>,
}

/// One line of an audit table; `measured_constant = lhs / predicted_rate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub parameter: String,
    pub lhs: f64,
    pub predicted_rate: f64,
    pub measured_constant: f64,
}

fn row(parameter: String, lhs: f64, predicted_rate: f64) -> AuditRow {
    let measured_constant = if lhs == 0.0 { 0.0 } else { lhs / predicted_rate };
    AuditRow { parameter, lhs, predicted_rate, measured_constant }
}

/// `Σ_x |F(x+h) − F(x)|²`.
pub fn shifted_l2_sq(f: &Kernel, h: i64) -> f64 {
    if f.is_empty() {
        return 0.0;
    }
    let lo = f.support_min() - h.abs();
    let hi = f.support_max() + h.abs();
    let mut acc = 0.0;
    for x in lo..=hi {
        let d = f.get(x + h) - f.get(x);
        acc += d * d;
    }
    acc
}

fn in_window(name: &str, v: u64, lo: f64, hi: f64) -> Result<()> {
    if (v as f64) < lo * (1.0 - 1e-12) || (v as f64) > hi * (1.0 + 1e-12) {
        return Err(LabError::Range(format!("{name} = {v} outside [{lo:.3}, {hi:.3}]")));
    }
    Ok(())
}

/// `𝕋_s = Σ 𝓗_{s'}` over dyadic `s^{α−1+δ} <= s' < s`.
fn lower_sum(seq: &PowerSequence, s: u64, delta: f64, cutoff: &BumpCutoff) -> Result<Kernel> {
    let lo = (s as f64).powf(seq.alpha - 1.0 + delta);
    let mut t = Kernel::zero();
    let mut sp = 1u64;
    while sp < s {
        if sp as f64 >= lo {
            t = t.add(&block_kernel(seq, sp, cutoff, Variant::PhiOfMalphaOverS)?);
        }
        sp *= 2;
    }
    Ok(t)
}

fn op_norm_sq(k: &Kernel) -> Result<f64> {
    if k.nnz() == 0 {
        return Ok(0.0);
    }
    let b = spectral_bound(k)?;
    Ok(b.n * b.n)
}

/// Measured constants for the mollifier lemmas. `H_s` uses weights
/// `φ(m/s)`, the `𝓗` blocks use `φ(m^α/s)`.
pub fn lemma_audit(
    seq: &PowerSequence,
    req: &AuditRequest,
    cutoff: &BumpCutoff,
    cfg: &ConvolutionConfig,
) -> Result<Vec<AuditRow>> {
    let alpha = seq.alpha;
    let s = req.s;
    let sf = s as f64;
    let hs = block_kernel(seq, s, cutoff, Variant::PhiOfMOverS)?;
    let need = |v: Option<u64>, name: &str| v.ok_or_else(|| LabError::Config(format!("{name} is required")));
    let (f, rate, param) = match req.which {
        AuditTarget::MollifiedBlock | AuditTarget::MollifiedBlockLower => {
            let s1 = need(req.s1, "s1")?;
            in_window("s1", s1, sf.powf((alpha - 1.0 + req.delta) / alpha), sf)?;
            let phi = mollifier_kernel(s1, MollifierKind::Phi)?;
            let mut f = convolve_with(&phi, &hs, cfg)?;
            let mut rate = 1.0 / sf;
            if req.which == AuditTarget::MollifiedBlockLower {
                let t = lower_sum(seq, s, req.delta, cutoff)?;
                f = convolve_with(&f, &t, cfg)?;
                rate *= op_norm_sq(&t)?;
            }
            (f, rate, format!("s={s},s1={s1}"))
        }
        AuditTarget::BandPair => {
            let s1 = need(req.s1, "s1")?;
            let l = need(req.l, "l")?;
            in_window("s1", s1, sf.powf(alpha - 1.0 + req.delta), sf)?;
            in_window("l", l, 1.0, sf.powf(1.0 - 1.0 / alpha + req.delta / alpha))?;
            let psi = mollifier_kernel(l, MollifierKind::PsiBand)?;
            let h1 = block_kernel(seq, s1, cutoff, Variant::PhiOfMalphaOverS)?;
            let f = convolve_with(&convolve_with(&psi, &h1, cfg)?, &hs, cfg)?;
            (f, sf.powf(-1.0 - req.delta / 2.0), format!("s={s},s1={s1},l={l}"))
        }
        AuditTarget::BlockLower => {
            let t = lower_sum(seq, s, req.delta, cutoff)?;
            let f = convolve_with(&hs, &t, cfg)?;
            (f, op_norm_sq(&t)? / sf, format!("s={s}"))
        }
    };
    let mut rows = vec![row(param.clone(), f.l2_norm_sq(), rate)];
    for &h in &req.shifts {
        let ratio = (h.unsigned_abs() as f64 / sf).powf(req.gamma);
        rows.push(row(format!("{param},h={h}"), shifted_l2_sq(&f, h), rate * ratio));
    }
    Ok(rows)
}
