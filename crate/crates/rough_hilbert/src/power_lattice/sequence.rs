use serde::{Deserialize, Serialize};

use super::certified::{certify_power, eval_floor_power_with, DEFAULT_MAX_BITS};
use crate::error::{LabError, Result};

/// Fraction bits kept for every table entry.
pub const TABLE_FRAC_BITS: u32 = 40;

/// Rejects exponents outside `(1, 2)`.
pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("alpha = {alpha} must lie in (1, 2)")))
    }
}

/// True when `α` lies in the range `1 < α <= 1.001` for which the
/// uniform estimates are proved; larger exponents are only a desk proxy.
pub fn in_admissible_regime(alpha: f64) -> bool {
    alpha > 1.0 && alpha <= 1.001
}

/// Certified `[m^α]`.
pub fn eval_floor_power(m: u64, alpha: f64) -> Result<i64> {
    check_alpha(alpha)?;
    eval_floor_power_with(m, alpha, DEFAULT_MAX_BITS)
}

/// Table of certified values `[m^α]`, `1 <= m <= m_max`, with enclosures of
/// the fractional parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerSequence {
    pub alpha: f64,
    pub m_max: u64,
    /// `values[m] = [m^α]`; `values[0] = 0`.
    pub values: Vec<i64>,
    frac_lo: Vec<f64>,
    frac_hi: Vec<f64>,
    /// Largest working precision any entry needed.
    pub precision_bits: u32,
}

impl PowerSequence {
    pub fn new(alpha: f64, m_max: u64) -> Result<Self> {
        Self::with_max_bits(alpha, m_max, DEFAULT_MAX_BITS)
    }

    pub fn with_max_bits(alpha: f64, m_max: u64, max_bits: u32) -> Result<Self> {
        check_alpha(alpha)?;
        let n = m_max as usize + 1;
        let mut values = vec![0i64; n];
        let mut frac_lo = vec![0.0; n];
        let mut frac_hi = vec![0.0; n];
        let mut precision_bits = 0;
        for m in 1..=m_max {
            let c = certify_power(m, alpha, TABLE_FRAC_BITS, max_bits)?;
            let i = m as usize;
            values[i] = i64::try_from(c.floor).map_err(|_| LabError::Overflow(format!("[{m}^{alpha}]")))?;
            frac_lo[i] = c.frac_lo;
            frac_hi[i] = c.frac_hi;
            precision_bits = precision_bits.max(c.bits);
        }
        Ok(PowerSequence { alpha, m_max, values, frac_lo, frac_hi, precision_bits })
    }

    #[inline]
    pub fn value(&self, m: u64) -> i64 {
        self.values[m as usize]
    }

    /// Enclosure of `{m^α}`.
    #[inline]
    pub fn frac(&self, m: u64) -> (f64, f64) {
        (self.frac_lo[m as usize], self.frac_hi[m as usize])
    }

    pub fn covers(&self, m: u64) -> bool {
        m >= 1 && m <= self.m_max
    }

    /// The `m >= 1` with `[m^α] = v`, if any.
    pub fn index_of_value(&self, v: i64) -> Option<u64> {
        if v < 1 {
            return None;
        }
        self.values[1..].binary_search(&v).ok().map(|i| i as u64 + 1)
    }

    /// Number of `m >= 1` in the table with `[m^α] <= v`.
    pub fn count_at_most(&self, v: i64) -> u64 {
        self.values[1..].partition_point(|&w| w <= v) as u64
    }

    /// Largest value in the table.
    pub fn max_value(&self) -> i64 {
        self.values[self.m_max as usize]
    }
}
