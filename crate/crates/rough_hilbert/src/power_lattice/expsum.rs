use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::certified::certify_power;
use super::gap::{gap_function, gap_root, IntervalGrid, DEFAULT_GAP_TOL};
use crate::error::{LabError, Result};

/// Integers `m` with `m(h, x, a(I_r)) <= m <= m(h, x, b(I_r))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JInterval {
    pub h: u64,
    pub x: u64,
    pub r: usize,
    pub m_lo: f64,
    pub m_hi: f64,
    pub first: u64,
    pub last: u64,
}

impl JInterval {
    pub fn len(&self) -> u64 {
        if self.last >= self.first {
            self.last - self.first + 1
        } else {
            0
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The 𝒥 interval for `(h, x, I_r)`; `None` when `m(h, x, b(I_r))` does not exist.
pub fn j_interval(alpha: f64, grid: &IntervalGrid, h: u64, x: u64, r: usize) -> Option<JInterval> {
    let (a, b) = grid.interval(r);
    let m_hi = gap_root(alpha, h as f64, x as f64 + b, DEFAULT_GAP_TOL)?;
    let m_lo = gap_root(alpha, h as f64, x as f64 + a, DEFAULT_GAP_TOL).unwrap_or(0.0);
    let first = m_lo.ceil().max(1.0) as u64;
    let last = m_hi.floor().max(0.0) as u64;
    Some(JInterval { h, x, r, m_lo, m_hi, first, last })
}

/// True when `|k| <= M^{2δ₀}`, the range in which the sum bound is claimed.
pub fn k_in_regime(k: i64, m_scale: f64, delta0: f64) -> bool {
    (k.unsigned_abs() as f64) <= m_scale.powf(2.0 * delta0)
}

/// `S_k = Σ_{m ∈ 𝒥} e^{2πi k m^α}`. Phases use certified fractional parts
/// of `m^α`, so the integer part of `k m^α` never enters floating point.
pub fn exponential_sum(alpha: f64, j: &JInterval, k: i64, max_bits: u32) -> Result<Complex64> {
    if k == 0 || j.is_empty() {
        return Ok(Complex64::new(j.len() as f64, 0.0));
    }
    let bits = 40 + (64 - k.unsigned_abs().leading_zeros());
    let mut acc = Complex64::new(0.0, 0.0);
    for m in j.first..=j.last {
        let c = certify_power(m, alpha, bits, max_bits)?;
        let phase = (k as f64 * c.frac_mid()).rem_euclid(1.0);
        acc += Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
    }
    Ok(acc)
}

/// Distance to the nearest integer.
pub fn dist_to_int(w: f64) -> f64 {
    (w - w.round()).abs()
}

/// True iff `‖α k m^{α−1}‖ >= M^{−δ₀/2}` for every integer `m` in 𝒥.
pub fn no_resonance_check(alpha: f64, m_scale: f64, delta0: f64, j: &JInterval, k: i64) -> bool {
    let thr = m_scale.powf(-delta0 / 2.0);
    (j.first..=j.last).all(|m| dist_to_int(alpha * k as f64 * (m as f64).powf(alpha - 1.0)) >= thr)
}

/// Parameters for `sample_exponential_sums`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumSampling {
    pub alpha: f64,
    pub m_scale: f64,
    pub delta0: f64,
    /// Inclusive range of the gap `h`.
    pub h_range: (u64, u64),
    pub count: usize,
    pub seed: u64,
    pub max_bits: u32,
}

/// One sampled tuple `(h, x, I_r, k)` that passed the no-resonance check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumRow {
    pub h: u64,
    pub x: u64,
    pub r: usize,
    pub k: i64,
    pub len: u64,
    pub abs_sum: f64,
    /// `4·|𝒥|·M^{−δ₀/2}`.
    pub bound: f64,
}

impl ExpSumRow {
    pub fn passes(&self) -> bool {
        self.abs_sum <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumSample {
    pub rows: Vec<ExpSumRow>,
    /// Draws discarded because the check failed or 𝒥 was empty.
    pub rejected: usize,
    /// `max |S_k| / (|𝒥|·M^{−δ₀/2})`.
    pub max_ratio: f64,
}

/// Draws `m₀` uniformly in `[M/2, 2M]`, `h` in `h_range`, sets `x = [(m₀+h)^α − m₀^α]`,
/// and draws `r` and `1 <= |k| <= M^{2δ₀}`. Tuples with empty 𝒥 or failing the
/// no-resonance check are discarded until `count` rows are collected.
pub fn sample_exponential_sums(cfg: &ExpSumSampling) -> Result<ExpSumSample> {
    let grid = IntervalGrid::new(cfg.m_scale, cfg.delta0)?;
    let (h_lo, h_hi) = cfg.h_range;
    if h_lo == 0 || h_lo > h_hi {
        return Err(LabError::Config(format!("h range ({h_lo}, {h_hi}) is invalid")));
    }
    let k_max = cfg.m_scale.powf(2.0 * cfg.delta0).floor() as i64;
    if k_max < 1 {
        return Err(LabError::Config("M^(2 delta0) < 1 leaves no admissible k".into()));
    }
    let m_lo = (cfg.m_scale / 2.0).ceil() as u64;
    let m_hi = (2.0 * cfg.m_scale).floor() as u64;
    let decay = cfg.m_scale.powf(-cfg.delta0 / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.count);
    let mut rejected = 0usize;
    let max_draws = 100 * cfg.count.max(1);
    for _ in 0..max_draws {
        if rows.len() == cfg.count {
            break;
        }
        let m0 = rng.gen_range(m_lo..=m_hi);
        let h = rng.gen_range(h_lo..=h_hi);
        let r = rng.gen_range(0..grid.count);
        let k = rng.gen_range(1..=k_max) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let x = gap_function(cfg.alpha, h as f64, m0 as f64).floor() as u64;
        let j = match j_interval(cfg.alpha, &grid, h, x, r) {
            Some(j) if !j.is_empty() => j,
            _ => {
                rejected += 1;
                continue;
            }
        };
        if !no_resonance_check(cfg.alpha, cfg.m_scale, cfg.delta0, &j, k) {
            rejected += 1;
            continue;
        }
        let s = exponential_sum(cfg.alpha, &j, k, cfg.max_bits)?;
        rows.push(ExpSumRow { h, x, r, k, len: j.len(), abs_sum: s.norm(), bound: 4.0 * j.len() as f64 * decay });
    }
    if rows.len() < cfg.count {
        return Err(LabError::Infeasible(format!(
            "only {} of {} tuples passed the no-resonance check in {max_draws} draws",
            rows.len(),
            cfg.count
        )));
    }
    let max_ratio = rows.iter().map(|r| r.abs_sum / (r.len as f64 * decay)).fold(0.0, f64::max);
    Ok(ExpSumSample { rows, rejected, max_ratio })
}
