use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::kernel_factory::{compensated_sum, Coeff, DiscreteKernel};

/// Samples of `K̂(ξ) = Σ_x K(x) e^{−2πixξ}` at `ξ_j = j/N`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumProfile {
    pub grid_size: usize,
    /// Half-width of the support, the degree that enters the sampling bound.
    pub degree: usize,
    pub samples: Vec<Complex64>,
    pub sample_max: f64,
    /// Rigorous upper bound on `sup_ξ |K̂(ξ)|`.
    pub sup_bound: f64,
}

impl SpectrumProfile {
    /// `(Σ_j |K̂(ξ_j)|² / N)^{1/2}`, equal to `‖K‖₂` by Parseval.
    pub fn l2_mean(&self) -> f64 {
        (compensated_sum(self.samples.iter().map(|z| z.norm_sqr())) / self.grid_size as f64).sqrt()
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, z) in self.samples.iter().enumerate() {
            if z.norm() > self.samples[best].norm() {
                best = j;
            }
        }
        best
    }
}

fn degree<T: Coeff>(k: &DiscreteKernel<T>) -> usize {
    if k.is_empty() {
        0
    } else {
        (k.len() - 1).div_ceil(2)
    }
}

/// Direct evaluation of `K̂(ξ)`.
pub fn symbol_at<T: Coeff>(k: &DiscreteKernel<T>, xi: f64) -> Complex64 {
    let mut re = Vec::with_capacity(k.len());
    let mut im = Vec::with_capacity(k.len());
    for (x, v) in k.iter() {
        if v == T::zero() {
            continue;
        }
        let ph = -TAU * (((x as f64) * xi).rem_euclid(1.0));
        let z = v.to_c64() * Complex64::from_polar(1.0, ph);
        re.push(z.re);
        im.push(z.im);
    }
    Complex64::new(compensated_sum(re), compensated_sum(im))
}

/// Samples `K̂` on an `N`-point grid, `N >= 8·degree`.
pub fn symbol_profile<T: Coeff>(k: &DiscreteKernel<T>, grid_size: usize) -> Result<SpectrumProfile> {
    let d = degree(k);
    if grid_size == 0 || grid_size < 8 * d {
        return Err(LabError::GridTooCoarse { grid: grid_size, degree: d });
    }
    let n = grid_size;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (x, v) in k.iter() {
        buf[x.rem_euclid(n as i64) as usize] += v.to_c64();
    }
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let sample_max = buf.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    // Bernstein: between grid points |K̂| moves by at most (π d / N) sup |K̂|.
    // The FFT rounding allowance is generous for radix-2 transforms.
    let fft_err = 8.0 * f64::EPSILON * (n as f64).log2().max(1.0) * k.l1_norm();
    let sup_bound = (sample_max + fft_err) / (1.0 - PI * d as f64 / n as f64);
    Ok(SpectrumProfile { grid_size: n, degree: d, samples: buf, sample_max, sup_bound })
}

/// Smallest admissible power-of-two grid, at least 64 points.
pub fn default_grid<T: Coeff>(k: &DiscreteKernel<T>) -> usize {
    (16 * degree(k)).next_power_of_two().max(64)
}

/// Spectral radius of a real antisymmetric kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBound {
    /// Sample maximum refined by local search; a lower bound for the sup.
    pub n: f64,
    /// Certified upper bound.
    pub n_upper: f64,
    pub grid_size: usize,
}

impl SpectralBound {
    /// `1/dist(λ, [−iN, iN])`, using the certified `N`.
    pub fn inverse_bound(&self, lambda: Complex64) -> Option<f64> {
        let d = if lambda.im.abs() <= self.n_upper {
            lambda.re.abs()
        } else {
            Complex64::new(lambda.re, lambda.im.abs() - self.n_upper).norm()
        };
        (d > 0.0).then(|| 1.0 / d)
    }
}

/// `sup_ξ |K̂(ξ)|`: grid maximum refined by golden-section search, with
/// the certified upper bound alongside.
pub fn symbol_sup<T: Coeff>(k: &DiscreteKernel<T>) -> Result<SpectralBound> {
    if k.nnz() == 0 {
        return Ok(SpectralBound { n: 0.0, n_upper: 0.0, grid_size: 0 });
    }
    let grid = default_grid(k);
    let prof = symbol_profile(k, grid)?;
    let j = prof.argmax();
    let h = 1.0 / grid as f64;
    let c = j as f64 * h;
    let f = |xi: f64| symbol_at(k, xi).norm();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (c - h, c + h);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    let n = prof.sample_max.max(f1).max(f2);
    Ok(SpectralBound { n, n_upper: prof.sup_bound.max(n), grid_size: grid })
}

/// `N = sup_ξ |K̂(ξ)|` for real antisymmetric `K`; the symbol is `−i` times
/// a real odd function, so `λ·Id + K` is invertible off `[−iN, iN]`.
pub fn spectral_bound(k: &DiscreteKernel<f64>) -> Result<SpectralBound> {
    let (x, defect) = k.antisymmetry_defect();
    if defect > 1e-12 * k.l1_norm().max(f64::MIN_POSITIVE) {
        return Err(LabError::Symmetry { x, defect });
    }
    symbol_sup(k)
}

/// `(Σ_x |K(x)|^p)^{1/p}`; `p = ∞` gives the sup norm.
pub fn lp_norm<T: Coeff>(k: &DiscreteKernel<T>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(LabError::Domain(format!("lp_norm needs p >= 1, got {p}")));
    }
    let m = k.sup_norm();
    if p.is_infinite() || m == 0.0 {
        return Ok(m);
    }
    let s = compensated_sum(k.values().iter().map(|v| (v.modulus() / m).powf(p)));
    Ok(m * s.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_factory::Kernel;

    #[test]
    fn dirac_symbol_is_one() {
        let p = symbol_profile(&Kernel::delta(0, 1.0), 64).unwrap();
        assert!(p.samples.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let p = symbol_profile(&Kernel::delta(1, 1.0), 64).unwrap();
        assert!(p.samples.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let k = Kernel::from_pairs(&[(-10, 1.0), (10, 1.0)]);
        assert!(matches!(symbol_profile(&k, 64), Err(LabError::GridTooCoarse { .. })));
    }

    #[test]
    fn discrete_derivative_bound() {
        let k = Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]);
        let b = spectral_bound(&k).unwrap();
        assert!((b.n - 2.0).abs() < 1e-12);
        assert!(b.n_upper >= 2.0);
        assert!(spectral_bound(&Kernel::delta(1, 1.0)).is_err());
    }

    #[test]
    fn lp_norms() {
        let k = Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]);
        assert_eq!(lp_norm(&k, 1.0).unwrap(), 2.0);
        assert_eq!(lp_norm(&Kernel::delta(0, 1.0), 3.7).unwrap(), 1.0);
        assert!(lp_norm(&k, 0.5).is_err());
    }
}
