use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolution_lab::shifted_l2_sq;
use crate::error::{LabError, Result};
use crate::kernel_factory::{plateau, ComplexKernel, DyadicSchedule, Kernel, KernelMeta};

/// `T = λ·Id + β·H_M + Σ_s K_s`.
#[derive(Clone, Debug)]
pub struct AlgebraRepresentation {
    pub lambda: Complex64,
    pub beta: Complex64,
    /// The kernel multiplied by `β`.
    pub h_m: Kernel,
    /// Blocks keyed by their dyadic scale.
    pub blocks: BTreeMap<u64, ComplexKernel>,
    pub schedule: DyadicSchedule,
    pub gamma0: f64,
}

/// Outcome of the block conditions for one `K_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub s: u64,
    pub mean: Complex64,
    pub mean_ok: bool,
    pub support_ok: bool,
    /// `sqrt(s·Σ|K_s|²)`.
    pub d_size: f64,
    /// `(h, sqrt(s·(s/|h|)^γ₀·Σ|K_s(·+h) − K_s|²))` per probe.
    pub d_probes: Vec<(i64, f64)>,
    pub d_s: f64,
}

/// Probe shifts `1, 2, 4, …, s/2`.
pub fn default_probes(s: u64) -> Vec<i64> {
    let mut v = Vec::new();
    let mut h = 1u64;
    while 2 * h <= s {
        v.push(h as i64);
        h *= 2;
    }
    v
}

/// Evaluates the four block conditions; `D_s` is the smallest constant for
/// which the size and probed Hölder conditions hold.
pub fn block_conditions(k: &ComplexKernel, s: u64, gamma0: f64, probes: &[i64]) -> Result<BlockReport> {
    if s == 0 {
        return Err(LabError::Domain("block scale must be >= 1".into()));
    }
    for (x, v) in k.iter() {
        if v != Complex64::new(0.0, 0.0) && x.unsigned_abs() > s {
            return Err(LabError::SupportViolation { x, s });
        }
    }
    let mean = k.sum();
    let mean_ok = mean.norm() <= 1e-10 * k.l1_norm().max(1e-300);
    let sf = s as f64;
    let d_size = (sf * k.l2_norm_sq()).sqrt();
    let re = k.map(|z| z.re);
    let im = k.map(|z| z.im);
    let d_probes: Vec<(i64, f64)> = probes
        .iter()
        .filter(|&&h| h != 0)
        .map(|&h| {
            let diff = shifted_l2_sq(&re, h) + shifted_l2_sq(&im, h);
            (h, (sf * (sf / h.unsigned_abs() as f64).powf(gamma0) * diff).sqrt())
        })
        .collect();
    let d_s = d_probes.iter().fold(d_size, |m, p| m.max(p.1));
    Ok(BlockReport { s, mean, mean_ok, support_ok: true, d_size, d_probes, d_s })
}

impl AlgebraRepresentation {
    /// `λ·Id + β·H_M` with no blocks.
    pub fn scalar_plus_hilbert(lambda: Complex64, beta: Complex64, h_m: Kernel, schedule: DyadicSchedule, gamma0: f64) -> Self {
        AlgebraRepresentation { lambda, beta, h_m, blocks: BTreeMap::new(), schedule, gamma0 }
    }

    pub fn is_scalar(&self) -> bool {
        self.beta == Complex64::new(0.0, 0.0) && self.blocks.values().all(|b| b.nnz() == 0)
    }

    /// Reassembled kernel.
    pub fn kernel(&self) -> ComplexKernel {
        let mut k = ComplexKernel::delta(0, self.lambda);
        if self.beta != Complex64::new(0.0, 0.0) {
            k = k.add_scaled(&self.h_m.to_complex(), self.beta);
        }
        for b in self.blocks.values() {
            k = k.add(b);
        }
        k.meta = KernelMeta::labelled("representation");
        k
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut r = self.clone();
        r.lambda *= c;
        r.beta *= c;
        for b in r.blocks.values_mut() {
            *b = b.scaled(c);
        }
        r
    }

    /// Block reports with the default probes.
    pub fn block_reports(&self) -> Result<Vec<BlockReport>> {
        self.blocks.iter().map(|(&s, k)| block_conditions(k, s, self.gamma0, &default_probes(s))).collect()
    }
}

/// `|λ| + |β| + sup_s D_s` for this representation: an upper bound for the
/// algebra norm, which is an infimum over representations.
pub fn am_norm(rep: &AlgebraRepresentation) -> Result<f64> {
    let sup = rep.block_reports()?.iter().fold(0.0f64, |m, r| m.max(r.d_s));
    Ok(rep.lambda.norm() + rep.beta.norm() + sup)
}

/// `λ = T(0) − Σ_s K_s(0)`.
pub fn extract_lambda(t: &ComplexKernel, rep: &AlgebraRepresentation) -> Complex64 {
    rep.blocks.values().fold(t.get(0), |acc, b| acc - b.get(0))
}

/// Diagnostics of a canonical decomposition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecomposeTrace {
    pub s_prime: u64,
    pub s_top: u64,
    /// `(s, J_s)` with `J_s = Σ_y K(y)ψ(y/s)`.
    pub partial_sums: Vec<(u64, Complex64)>,
}

fn normalised_plateau(s: u64) -> Kernel {
    let r = 2 * s as i64;
    let mut k = Kernel::zeros(-r, r, KernelMeta::default());
    for x in -r..=r {
        k.add_at(x, plateau(x as f64 / s as f64));
    }
    let total = k.sum();
    k.scaled(1.0 / total).trimmed(0.0)
}

/// Dyadic cutoff `ψ(x/s) − ψ(2x/s)`, or `ψ(x/s)` at the bottom scale.
fn band(s: u64, bottom: bool, x: i64) -> f64 {
    let t = x as f64 / s as f64;
    if bottom {
        plateau(t)
    } else {
        plateau(t) - plateau(2.0 * t)
    }
}

/// Splits `T − λδ₀ − βH_M` into mean-zero blocks by dyadic cutoffs,
/// moving the partial sums `J_s` between neighbouring scales. Blocks are
/// keyed at `2s` so that block `k` is supported in `[−k, k]`. `λ` defaults
/// to `Σ_x T(x)`, the only value compatible with mean-zero blocks; `β`
/// defaults to 0. `s_top` defaults to the least dyadic scale covering the
/// support.
pub fn canonical_decompose(
    t: &ComplexKernel,
    h_m: &Kernel,
    schedule: &DyadicSchedule,
    lambda: Option<Complex64>,
    beta: Option<Complex64>,
    s_top: Option<u64>,
    gamma0: f64,
) -> (AlgebraRepresentation, DecomposeTrace) {
    let lambda = lambda.unwrap_or_else(|| t.sum());
    let beta = beta.unwrap_or_default();
    let mut k = t.add_scaled(&ComplexKernel::delta(0, Complex64::new(1.0, 0.0)), -lambda);
    if beta != Complex64::new(0.0, 0.0) {
        k = k.add_scaled(&h_m.to_complex(), -beta);
    }
    let m_theta = (schedule.m_top as f64).powf(schedule.theta);
    let mut s_prime = 1u64;
    while (2 * s_prime) as f64 <= m_theta / 2.0 {
        s_prime *= 2;
    }
    let radius = k.radius().max(1);
    let mut top = s_prime;
    while top < radius {
        top *= 2;
    }
    let s0 = s_top.unwrap_or(top).max(s_prime);
    let scales: Vec<u64> = std::iter::successors(Some(s_prime), |&s| (s < s0).then_some(2 * s)).collect();
    let mut blocks = BTreeMap::new();
    let mut trace = DecomposeTrace { s_prime, s_top: s0, partial_sums: Vec::new() };
    let mut j_prev = Complex64::new(0.0, 0.0);
    let mut n_prev: Option<Kernel> = None;
    for (i, &s) in scales.iter().enumerate() {
        let bottom = i == 0;
        let r = 2 * s as i64;
        let mut kt = ComplexKernel::zeros(-r, r, KernelMeta::default());
        for x in (-r).max(k.support_min())..=r.min(k.support_max()) {
            let w = band(s, bottom, x);
            if w != 0.0 {
                kt.add_at(x, k.get(x) * w);
            }
        }
        let mass = kt.sum();
        let n_s = normalised_plateau(s).to_complex();
        // K'_s = K̃_s − n_s ΣK̃_s, then K''_s adds J_{s/2}(n_{s/2} − n_s).
        let mut kb = kt.add_scaled(&n_s, -mass);
        if let Some(np) = &n_prev {
            kb = kb.add_scaled(&np.to_complex(), j_prev).add_scaled(&n_s, -j_prev);
        }
        let j_s = j_prev + mass;
        trace.partial_sums.push((s, j_s));
        if i + 1 == scales.len() {
            // Leftover J_{s₀} n_{s₀}; vanishes when λ = ΣT.
            kb = kb.add_scaled(&n_s, j_s);
        }
        let kb = kb.trimmed(0.0);
        if kb.nnz() > 0 {
            blocks.insert(2 * s, kb.with_meta(KernelMeta::labelled(format!("K''_{s}"))));
        }
        j_prev = j_s;
        n_prev = Some(normalised_plateau(s));
    }
    let rep = AlgebraRepresentation { lambda, beta, h_m: h_m.clone(), blocks, schedule: schedule.clone(), gamma0 };
    (rep, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zero_block_has_zero_constant() {
        let r = block_conditions(&ComplexKernel::zero(), 4, 0.1, &default_probes(4)).unwrap();
        assert!(r.mean_ok && r.support_ok);
        assert_eq!(r.d_s, 0.0);
    }

    #[test]
    fn derivative_block() {
        let k = Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]).to_complex();
        let r = block_conditions(&k, 2, 0.1, &[]).unwrap();
        assert!((r.d_s - 2.0).abs() < 1e-15);
        let d = block_conditions(&ComplexKernel::delta(0, c(1.0)), 2, 0.1, &[]).unwrap();
        assert!(!d.mean_ok);
        assert!(matches!(block_conditions(&k, 0, 0.1, &[]), Err(LabError::Domain(_))));
        let wide = Kernel::from_pairs(&[(3, 1.0), (-3, -1.0)]).to_complex();
        assert!(matches!(block_conditions(&wide, 2, 0.1, &[]), Err(LabError::SupportViolation { x: -3, s: 2 })));
    }

    #[test]
    fn scalar_norms() {
        let sch = DyadicSchedule::new(16, 0.5).unwrap();
        let id = AlgebraRepresentation::scalar_plus_hilbert(c(1.0), c(0.0), Kernel::zero(), sch.clone(), 0.1);
        assert_eq!(am_norm(&id).unwrap(), 1.0);
        let h = AlgebraRepresentation::scalar_plus_hilbert(c(0.0), c(1.0), Kernel::zero(), sch, 0.1);
        assert_eq!(am_norm(&h).unwrap(), 1.0);
    }

    #[test]
    fn derivative_decomposes_into_one_block() {
        let sch = DyadicSchedule::new(4, 0.5).unwrap();
        let t = Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]).to_complex();
        let (rep, trace) = canonical_decompose(&t, &Kernel::zero(), &sch, None, None, None, 0.1);
        assert_eq!(trace.s_prime, 1);
        assert_eq!(rep.blocks.len(), 1);
        let b = rep.blocks.values().next().unwrap();
        assert_eq!(b.trimmed(0.0).values(), t.values());
        assert_eq!(extract_lambda(&t, &rep), c(0.0));
    }
}
