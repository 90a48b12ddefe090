use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::repr::{am_norm, canonical_decompose, AlgebraRepresentation};
use crate::convolution_lab::{convolve_with, loglog_fit, symbol_sup, ConvolutionConfig};
use crate::error::{LabError, Result};
use crate::kernel_factory::{ComplexKernel, DyadicSchedule};

/// `ℓ²→ℓ²` norm of a convolution operator, `sup |K̂|`.
pub fn op_norm(k: &ComplexKernel) -> Result<f64> {
    Ok(symbol_sup(k)?.n)
}

/// Both sides of the mixed and plain product inequalities for one pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmultRecord {
    pub m_top: u64,
    pub am1: f64,
    pub am2: f64,
    pub op1: f64,
    pub op2: f64,
    /// Algebra-norm upper bound of the product representation.
    pub am_product: f64,
    /// `‖T₁‖_op‖T₂‖_A + ‖T₁‖_A‖T₂‖_op`.
    pub mixed: f64,
    /// `am_product / mixed`.
    pub c_mixed: f64,
    /// `am_product / (‖T₁‖_A‖T₂‖_A)`.
    pub c_product: f64,
    /// `max(0, am_product − mixed) / (‖T₁‖_A‖T₂‖_A)`: the excess the ε term must absorb with `C_A = 1`.
    pub epsilon: f64,
}

/// Representation of `T₁T₂`: `λ = λ₁λ₂`, `β = λ₁β₂ + λ₂β₁`, blocks from the
/// canonical decomposition of the product kernel.
pub fn product_representation(
    rep1: &AlgebraRepresentation,
    rep2: &AlgebraRepresentation,
    cfg: &ConvolutionConfig,
) -> Result<AlgebraRepresentation> {
    if rep1.schedule != rep2.schedule {
        return Err(LabError::Config("representations use different schedules".into()));
    }
    if rep2.is_scalar() {
        return Ok(rep1.scaled(rep2.lambda));
    }
    if rep1.is_scalar() {
        return Ok(rep2.scaled(rep1.lambda));
    }
    let prod = convolve_with(&rep1.kernel(), &rep2.kernel(), cfg)?;
    let lambda = rep1.lambda * rep2.lambda;
    let beta = rep1.lambda * rep2.beta + rep2.lambda * rep1.beta;
    let h_m = if rep1.beta != Complex64::new(0.0, 0.0) { &rep1.h_m } else { &rep2.h_m };
    let (rep, _) = canonical_decompose(&prod, h_m, &rep1.schedule, Some(lambda), Some(beta), None, rep1.gamma0);
    Ok(rep)
}

pub fn submultiplicativity_audit(
    rep1: &AlgebraRepresentation,
    rep2: &AlgebraRepresentation,
    cfg: &ConvolutionConfig,
) -> Result<SubmultRecord> {
    let am1 = am_norm(rep1)?;
    let am2 = am_norm(rep2)?;
    let op1 = op_norm(&rep1.kernel())?;
    let op2 = op_norm(&rep2.kernel())?;
    let am_product = am_norm(&product_representation(rep1, rep2, cfg)?)?;
    let mixed = op1 * am2 + am1 * op2;
    let both = am1 * am2;
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(SubmultRecord {
        m_top: rep1.schedule.m_top,
        am1,
        am2,
        op1,
        op2,
        am_product,
        mixed,
        c_mixed: ratio(am_product, mixed),
        c_product: ratio(am_product, both),
        epsilon: ratio((am_product - mixed).max(0.0), both),
    })
}

/// Power-law fit `ε(M) ≈ c·M^{−rate}`; returns `(rate, stderr)`.
pub fn fit_epsilon(records: &[SubmultRecord]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.m_top as f64, r.epsilon)).collect();
    let (slope, err, _) = loglog_fit(&pts);
    (-slope, err)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub n: usize,
    pub am_upper: f64,
    pub op_norm: f64,
    pub l2_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerDecay {
    pub rows: Vec<PowerRow>,
    /// `exp` of the slope of `ln am_upper` against `n`.
    pub delta1: f64,
}

/// `T^n` for `n = 1..n_max`, re-decomposed at every step with
/// `λ_n = λⁿ` and `β_n = nλ^{n−1}β`.
pub fn power_decay_audit(rep: &AlgebraRepresentation, n_max: usize, cfg: &ConvolutionConfig) -> Result<PowerDecay> {
    let t = rep.kernel();
    let op1 = op_norm(&t)?;
    if op1 >= 1.0 {
        return Err(LabError::Divergence { n: 1, norm: op1 });
    }
    let mut rows = vec![PowerRow { n: 1, am_upper: am_norm(rep)?, op_norm: op1, l2_norm: t.l2_norm() }];
    let mut pow = t.clone();
    for n in 2..=n_max {
        let (am_upper, op, l2) = if rep.is_scalar() {
            let l = rep.lambda.powu(n as u32);
            (l.norm(), l.norm(), l.norm())
        } else {
            pow = convolve_with(&pow, &t, cfg)?;
            let lam = rep.lambda.powu(n as u32);
            let beta = rep.lambda.powu(n as u32 - 1) * rep.beta * n as f64;
            let (r, _) = canonical_decompose(&pow, &rep.h_m, &rep.schedule, Some(lam), Some(beta), None, rep.gamma0);
            (am_norm(&r)?, op_norm(&pow)?, pow.l2_norm())
        };
        if op > rows.last().unwrap().op_norm * (1.0 + 1e-12) {
            return Err(LabError::Divergence { n, norm: op });
        }
        rows.push(PowerRow { n, am_upper, op_norm: op, l2_norm: l2 });
    }
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.am_upper > 0.0).map(|r| (r.n as f64, r.am_upper.ln())).collect();
    let delta1 = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    } else {
        f64::NAN
    };
    Ok(PowerDecay { rows, delta1 })
}

/// Schedule used when a representation has no natural one.
pub fn trivial_schedule() -> DyadicSchedule {
    DyadicSchedule { m_top: 1, theta: 0.0, scales: vec![1] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_factory::Kernel;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn scalar_power_decay_is_exact() {
        let rep = AlgebraRepresentation::scalar_plus_hilbert(c(0.5), c(0.0), Kernel::zero(), trivial_schedule(), 0.1);
        let d = power_decay_audit(&rep, 6, &ConvolutionConfig::default()).unwrap();
        for r in &d.rows {
            assert_eq!(r.am_upper, 0.5f64.powi(r.n as i32));
        }
        assert!((d.delta1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_factor() {
        let sch = trivial_schedule();
        let t = AlgebraRepresentation::scalar_plus_hilbert(c(0.3), c(0.7), Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]), sch.clone(), 0.1);
        let id = AlgebraRepresentation::scalar_plus_hilbert(c(1.0), c(0.0), Kernel::zero(), sch, 0.1);
        let r = submultiplicativity_audit(&t, &id, &ConvolutionConfig::default()).unwrap();
        assert_eq!(r.am_product, r.am1);
        assert_eq!(r.c_product, 1.0);
    }
}
