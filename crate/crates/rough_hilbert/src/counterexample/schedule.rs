use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::power_lattice::check_alpha;

/// What to do when one of `U±` contains no dyadic scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalePolicy {
    /// Fail with an empty-block error.
    Strict,
    /// Use the largest dyadic scale below the upper end of the window.
    #[default]
    Snap,
}

/// Scale chain `M_1 < M_2 < …` with `10·M_l <= M_{l+1}^θ`, `θ = α−1−1.1δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    pub alpha: f64,
    pub delta: f64,
    pub c_kappa: f64,
    pub kappa: f64,
    pub theta: f64,
    /// `M_l`, or `None` once the value no longer fits in 64 bits.
    pub scales: Vec<Option<u64>>,
    pub log2_scales: Vec<f64>,
    /// Whether `ℍ₊∗ℍ₊` at `M_l` fits in the memory budget.
    pub feasible: Vec<bool>,
    pub budget_bytes: usize,
}

impl BlockSchedule {
    pub fn scale(&self, l: usize) -> Result<u64> {
        match self.scales.get(l) {
            Some(Some(m)) => Ok(*m),
            Some(None) => Err(LabError::Overflow(format!("M_{} = 2^{:.1} exceeds 64 bits", l + 1, self.log2_scales[l]))),
            None => Err(LabError::Range(format!("schedule has {} scales, asked for index {l}", self.scales.len()))),
        }
    }

    /// `U₋ = [M^{α−1−1.1δ}, M^{α−1−δ}]` as real endpoints.
    pub fn u_minus_window(&self, m: u64) -> (f64, f64) {
        let m = m as f64;
        (m.powf(self.alpha - 1.0 - 1.1 * self.delta), m.powf(self.alpha - 1.0 - self.delta))
    }

    /// `U₊ = [M^{1−0.1κ}, M]` as real endpoints.
    pub fn u_plus_window(&self, m: u64) -> (f64, f64) {
        let m = m as f64;
        (m.powf(1.0 - 0.1 * self.kappa), m)
    }

    /// Single-entry schedule at `M`.
    pub fn single(alpha: f64, delta: f64, c_kappa: f64, m: u64) -> Result<Self> {
        build_schedule(alpha, delta, c_kappa, 1, m, usize::MAX)
    }
}

/// Dyadic scales in `[lo, hi]`. Under `Snap` an empty window yields the
/// largest power of two `<= hi`; scales below 2 carry no integer `m` in
/// `(s, 2s)` and are never returned.
pub fn dyadic_in(lo: f64, hi: f64, policy: ScalePolicy) -> (Vec<u64>, bool) {
    let fuzz = 1e-12;
    let strict: Vec<u64> = (1..63)
        .map(|j| 1u64 << j)
        .filter(|&s| s as f64 >= lo * (1.0 - fuzz) && s as f64 <= hi * (1.0 + fuzz))
        .collect();
    if !strict.is_empty() || policy == ScalePolicy::Strict || hi < 2.0 {
        return (strict, false);
    }
    let top = 1u64 << (hi * (1.0 + fuzz)).log2().floor() as u32;
    (vec![top], true)
}

/// Bytes needed to hold `ℍ₊` and `ℍ₊∗ℍ₊` at scale `M` (support `|x| <= (2M)^α`).
pub fn self_term_bytes(alpha: f64, log2_m: f64) -> f64 {
    let r = 2f64.powf(alpha * (log2_m + 1.0));
    8.0 * (2.0 * r + 4.0 * r)
}

/// Minimal-growth chain starting at `M_1`.
pub fn build_schedule(
    alpha: f64,
    delta: f64,
    c_kappa: f64,
    l_count: usize,
    m1: u64,
    budget_bytes: usize,
) -> Result<BlockSchedule> {
    check_alpha(alpha)?;
    let dmax = (alpha - 1.0).powi(2) / alpha;
    if !(delta > 0.0 && delta <= dmax) {
        return Err(LabError::Infeasible(format!("delta = {delta} violates 0 < delta <= (alpha-1)^2/alpha = {dmax}")));
    }
    if !(c_kappa > 0.0 && c_kappa <= 1.0) {
        return Err(LabError::Infeasible(format!("c_kappa = {c_kappa} outside (0, 1]")));
    }
    if l_count == 0 {
        return Err(LabError::Config("schedule needs at least one scale".into()));
    }
    let theta = alpha - 1.0 - 1.1 * delta;
    if m1 < 2 || (m1 as f64).powf(alpha - 1.0 - delta) < 2.0 {
        return Err(LabError::Infeasible(format!("M_1 = {m1} too small: M^(alpha-1-delta) < 2 leaves U_- without scales")));
    }
    let mut scales = vec![Some(m1)];
    let mut log2 = vec![(m1 as f64).log2()];
    while scales.len() < l_count {
        let prev = *log2.last().unwrap();
        // log2 M_{l+1} = log2(10 M_l)/θ, then round up to an integer.
        let next_log2 = (prev + 10f64.log2()) / theta;
        let next = match scales.last().unwrap() {
            Some(m) if next_log2 < 63.0 => {
                let mut n = 2f64.powf(next_log2).ceil() as u64;
                while ((n as f64).powf(theta)) < 10.0 * *m as f64 {
                    n += 1;
                }
                Some(n)
            }
            _ => None,
        };
        log2.push(next.map(|n| (n as f64).log2()).unwrap_or(next_log2));
        scales.push(next);
    }
    let feasible = log2.iter().map(|&l| self_term_bytes(alpha, l) <= budget_bytes as f64).collect();
    Ok(BlockSchedule {
        alpha,
        delta,
        c_kappa,
        kappa: c_kappa * delta,
        theta,
        scales,
        log2_scales: log2,
        feasible,
        budget_bytes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scale_is_valid() {
        let s = build_schedule(1.5, 0.15, 0.1, 1, 1 << 12, 3 << 30).unwrap();
        assert_eq!(s.scales, vec![Some(4096)]);
        assert!((s.kappa - 0.015).abs() < 1e-15);
        assert!(s.feasible[0]);
    }

    #[test]
    fn second_scale_meets_chain() {
        let s = build_schedule(1.5, 0.15, 0.1, 2, 1 << 14, 3 << 30).unwrap();
        let m2 = s.scales[1].unwrap();
        let theta = 1.5 - 1.0 - 1.1 * 0.15;
        let want = (10.0 * 16384f64).powf(1.0 / theta).ceil();
        assert!((m2 as f64 - want).abs() <= want * 1e-12 + 2.0);
        assert!((m2 as f64).powf(theta) >= 163840.0);
        assert!(!s.feasible[1]);
    }

    #[test]
    fn delta_too_large() {
        assert!(matches!(build_schedule(1.5, 0.17, 0.1, 1, 4096, 1 << 30), Err(LabError::Infeasible(_))));
    }

    #[test]
    fn steep_chain_overflows_to_none() {
        let s = build_schedule(1.2, 0.03, 0.1, 2, 1 << 20, 1 << 30).unwrap();
        assert_eq!(s.scales[1], None);
        assert!(!s.feasible[1]);
        assert!(s.scale(1).is_err());
    }

    #[test]
    fn snap_policy() {
        assert_eq!(dyadic_in(25.8, 29.9, ScalePolicy::Snap), (vec![16], true));
        assert_eq!(dyadic_in(25.8, 29.9, ScalePolicy::Strict), (vec![], false));
        assert_eq!(dyadic_in(15.0, 70.0, ScalePolicy::Snap), (vec![16, 32, 64], false));
    }
}
