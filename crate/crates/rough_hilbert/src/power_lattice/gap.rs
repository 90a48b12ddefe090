use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Default absolute tolerance (in `m`) for gap-equation roots.
pub const DEFAULT_GAP_TOL: f64 = 1e-12;

/// `(m+h)^α − m^α`, evaluated without cancellation.
pub fn gap_function(alpha: f64, h: f64, m: f64) -> f64 {
    if m <= 0.0 {
        return h.powf(alpha);
    }
    m.powf(alpha) * (alpha * (h / m).ln_1p()).exp_m1()
}

/// Root `m(h, x, Δ) >= 0` of `(m+h)^α − m^α = x + Δ`, by bracketing and
/// bisection to absolute tolerance `tol`. `None` when `h^α > x + Δ`.
pub fn solve_gap_equation(alpha: f64, h: u64, x: u64, delta: f64, tol: f64) -> Result<Option<f64>> {
    if !(0.0..1.0).contains(&delta) {
        return Err(LabError::Domain(format!("delta = {delta} must lie in [0, 1)")));
    }
    if h == 0 {
        return Err(LabError::Domain("h must be positive".into()));
    }
    Ok(gap_root(alpha, h as f64, x as f64 + delta, tol))
}

/// Root of `(m+h)^α − m^α = target` over `m >= 0`.
pub(crate) fn gap_root(alpha: f64, h: f64, target: f64, tol: f64) -> Option<f64> {
    let g = |m: f64| gap_function(alpha, h, m) - target;
    let g0 = g(0.0);
    if g0 > 0.0 {
        return None;
    }
    if g0 == 0.0 {
        return Some(0.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Partition of `[0, 1)` into cells `I_r = [r·l, (r+1)·l)` with
/// `l = M^{−δ₀}`; the last cell is truncated at 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub m_scale: f64,
    pub delta0: f64,
    pub step: f64,
    pub count: usize,
}

impl IntervalGrid {
    pub fn new(m_scale: f64, delta0: f64) -> Result<Self> {
        if !(m_scale >= 1.0 && delta0 >= 0.0) {
            return Err(LabError::Domain(format!("grid needs M >= 1 and delta0 >= 0, got {m_scale}, {delta0}")));
        }
        let step = m_scale.powf(-delta0);
        let count = (1.0 / step - 1e-12).ceil().max(1.0) as usize;
        Ok(IntervalGrid { m_scale, delta0, step, count })
    }

    /// `[a(I_r), b(I_r))`.
    pub fn interval(&self, r: usize) -> (f64, f64) {
        let a = r as f64 * self.step;
        let b = if r + 1 >= self.count { 1.0 } else { (r + 1) as f64 * self.step };
        (a, b)
    }

    pub fn length(&self, r: usize) -> f64 {
        let (a, b) = self.interval(r);
        b - a
    }

    /// Index of the cell containing `d ∈ [0, 1)`.
    pub fn locate(&self, d: f64) -> usize {
        let r = (d / self.step).floor().max(0.0) as usize;
        let r = r.min(self.count - 1);
        // guard against rounding at cell edges
        let (a, b) = self.interval(r);
        if d < a && r > 0 {
            r - 1
        } else if d >= b && r + 1 < self.count {
            r + 1
        } else {
            r
        }
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        (0..self.count).map(|r| self.interval(r)).collect()
    }
}
