use serde::{Deserialize, Serialize};

use super::cutoff::{plateau, BumpCutoff};
use super::kernel::{compensated_sum, Coeff, DiscreteKernel, Kernel, KernelMeta};
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    /// `φ_l`, unit sum, supported in `(−l/2, l/2)`.
    Phi,
    /// `ψ_l = φ_l − φ_{2l}`.
    PsiBand,
}

fn phi_l(l: u64) -> Kernel {
    let bump = BumpCutoff { lo: -0.5, hi: 0.5, amplitude: 1.0 };
    let r = (l / 2) as i64;
    let mut k = Kernel::zeros(-r, r, KernelMeta::labelled(format!("phi_{l}")));
    for x in -r..=r {
        k.add_at(x, bump.eval(x as f64 / l as f64));
    }
    let total = compensated_sum(k.values().iter().copied());
    for v in k.values_mut() {
        *v /= total;
    }
    k.trimmed(0.0)
}

/// Discrete mollifier at scale `l >= 1`.
pub fn mollifier_kernel(l: u64, kind: MollifierKind) -> Result<Kernel> {
    if l == 0 {
        return Err(LabError::Domain("mollifier scale must be >= 1".into()));
    }
    let k = match kind {
        MollifierKind::Phi => phi_l(l),
        MollifierKind::PsiBand => {
            let mut k = phi_l(l).sub(&phi_l(2 * l));
            k.meta = KernelMeta::labelled(format!("psi_{l}"));
            k
        }
    };
    Ok(k)
}

/// `K_R(x) = K(x)·ψ(x/R)` with the plateau cutoff `ψ`.
pub fn smooth_truncate<T: Coeff>(k: &DiscreteKernel<T>, r: f64) -> DiscreteKernel<T> {
    let reach = (2.0 * r).ceil() as i64;
    let lo = k.support_min().max(-reach);
    let hi = k.support_max().min(reach);
    let mut out = DiscreteKernel::zeros(lo, hi, k.meta.clone());
    for x in lo..=hi {
        let w = plateau(x as f64 / r);
        if w != 0.0 {
            out.add_at(x, k.get(x).scale(w));
        }
    }
    out.meta.notes.push(format!("smooth truncation at R = {r}"));
    out.trimmed(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_normalised() {
        for l in [1, 2, 3, 8, 100, 1024] {
            let k = mollifier_kernel(l, MollifierKind::Phi).unwrap();
            assert!((k.sum() - 1.0).abs() < 1e-12);
            assert!(k.values().iter().all(|&v| v >= 0.0));
            assert!((k.radius() as f64) < l as f64 / 2.0 || l == 1);
        }
        assert_eq!(mollifier_kernel(1, MollifierKind::Phi).unwrap(), Kernel::delta(0, 1.0).with_meta(KernelMeta::labelled("phi_1")));
    }

    #[test]
    fn telescoping_recovers_dirac() {
        let s1 = 64;
        let mut acc = mollifier_kernel(s1, MollifierKind::Phi).unwrap();
        let mut l = 1;
        while l <= s1 / 2 {
            acc = acc.add(&mollifier_kernel(l, MollifierKind::PsiBand).unwrap());
            l *= 2;
        }
        for x in -40..=40 {
            let want = if x == 0 { 1.0 } else { 0.0 };
            assert!((acc.get(x) - want).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn truncation_keeps_short_kernels() {
        let k = Kernel::from_pairs(&[(-3, 1.0), (2, 5.0)]);
        assert_eq!(smooth_truncate(&k, 3.0).values(), k.trimmed(0.0).values());
        let d = Kernel::delta(0, 1.0);
        assert_eq!(smooth_truncate(&d, 1.0).get(0), 1.0);
    }
}
