use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Smooth bump `φ(t) = A·e·exp(−1/(1−u²))`, `u` the affine image of `t`
/// from `(lo, hi)` onto `(−1, 1)`. The peak value is `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpCutoff {
    pub lo: f64,
    pub hi: f64,
    pub amplitude: f64,
}

impl Default for BumpCutoff {
    fn default() -> Self {
        BumpCutoff { lo: 0.5, hi: 2.0, amplitude: 1.0 }
    }
}

impl BumpCutoff {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(LabError::Domain(format!("bump support ({lo}, {hi}) is empty")));
        }
        Ok(BumpCutoff { lo, hi, amplitude: 1.0 })
    }

    /// The identically vanishing cutoff.
    pub fn zero() -> Self {
        BumpCutoff { amplitude: 0.0, ..Default::default() }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if !(t > self.lo && t < self.hi) || self.amplitude == 0.0 {
            return 0.0;
        }
        let u = (2.0 * t - self.lo - self.hi) / (self.hi - self.lo);
        let d = 1.0 - u * u;
        if d <= 0.0 {
            return 0.0;
        }
        self.amplitude * (1.0 - 1.0 / d).exp()
    }

    pub fn max_value(&self) -> f64 {
        self.amplitude.abs()
    }

    /// Short identifier recorded in kernel metadata.
    pub fn id(&self) -> String {
        format!("bump({:.6},{:.6})x{:.6}", self.lo, self.hi, self.amplitude)
    }
}

/// Smooth plateau `ψ`: `ψ ≡ 1` on `[−1, 1]`, `ψ ≡ 0` outside `(−2, 2)`.
pub fn plateau(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let f = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let up = f(2.0 - a);
    up / (up + f(a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support_and_peak() {
        let b = BumpCutoff::default();
        assert_eq!(b.eval(0.5), 0.0);
        assert_eq!(b.eval(2.0), 0.0);
        assert_eq!(b.eval(3.0), 0.0);
        assert!((b.eval(1.25) - 1.0).abs() < 1e-15);
        assert!(b.eval(0.51) > 0.0);
        assert_eq!(BumpCutoff::zero().eval(1.25), 0.0);
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(0.3), 1.0);
        assert_eq!(plateau(-1.0), 1.0);
        assert_eq!(plateau(2.0), 0.0);
        assert!((plateau(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = plateau(1.0 + i as f64 / 100.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}
