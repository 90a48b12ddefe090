use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::kernel_factory::{Coeff, DiscreteKernel, KernelMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvolutionMode {
    /// Direct summation when it is cheaper than the FFT, otherwise FFT.
    Auto,
    Direct,
    Fft,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionConfig {
    pub mode: ConvolutionMode,
    pub budget_bytes: usize,
    /// Number of output points re-checked by direct summation on the FFT path.
    pub residual_points: usize,
    pub seed: u64,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        ConvolutionConfig { mode: ConvolutionMode::Auto, budget_bytes: 3 << 30, residual_points: 64, seed: 0x5eed }
    }
}

/// FFT length used for a product of kernels with stored lengths `la`, `lb`.
pub fn fft_len(la: usize, lb: usize) -> usize {
    (la + lb - 1).next_power_of_two()
}

/// `A∗B` with the default configuration.
pub fn convolve<T: Coeff>(a: &DiscreteKernel<T>, b: &DiscreteKernel<T>) -> Result<DiscreteKernel<T>> {
    convolve_with(a, b, &ConvolutionConfig::default())
}

pub fn convolve_with<T: Coeff>(
    a: &DiscreteKernel<T>,
    b: &DiscreteKernel<T>,
    cfg: &ConvolutionConfig,
) -> Result<DiscreteKernel<T>> {
    let meta = KernelMeta::labelled(format!("({})*({})", a.meta.label, b.meta.label));
    if a.is_empty() || b.is_empty() {
        return Ok(DiscreteKernel::zero().with_meta(meta));
    }
    let lo = a.support_min() + b.support_min();
    let out_len = a.len() + b.len() - 1;
    let n = fft_len(a.len(), b.len());
    let nz_a = a.nonzeros();
    let nz_b = b.nonzeros();
    let direct_cost = (nz_a.len() as f64) * (nz_b.len() as f64);
    let fft_cost = 4.0 * n as f64 * (n as f64).log2().max(1.0);
    let use_fft = match cfg.mode {
        ConvolutionMode::Direct => false,
        ConvolutionMode::Fft => true,
        ConvolutionMode::Auto => direct_cost > fft_cost,
    };
    let elem = std::mem::size_of::<T>();
    let same = std::ptr::eq(a, b);
    let buffers = if T::IS_REAL || same { 1 } else { 2 };
    let needed = out_len * elem + if use_fft { buffers * n * 16 } else { 0 };
    if needed > cfg.budget_bytes {
        return Err(LabError::Budget { needed, budget: cfg.budget_bytes });
    }
    let values = if use_fft {
        let v = fft_product(a, b, n, out_len, same);
        residual_check(a, &nz_a, b, &v, lo, cfg)?;
        v
    } else {
        let mut v = vec![T::zero(); out_len];
        for &(x, u) in &nz_a {
            for &(y, w) in &nz_b {
                v[(x + y - lo) as usize] += u * w;
            }
        }
        v
    };
    Ok(DiscreteKernel::from_values(lo, values, meta))
}

fn fft_product<T: Coeff>(a: &DiscreteKernel<T>, b: &DiscreteKernel<T>, n: usize, out_len: usize, same: bool) -> Vec<T> {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;
    if same {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, v) in a.values().iter().enumerate() {
            buf[i] = v.to_c64();
        }
        fwd.process(&mut buf);
        for z in buf.iter_mut() {
            *z = *z * *z;
        }
        inv.process(&mut buf);
        return buf[..out_len].iter().map(|z| T::from_c64(z * scale)).collect();
    }
    if T::IS_REAL {
        // Pack both real inputs into one complex transform: z = a + i b.
        // Rounding then scales with ‖a‖² + ‖b‖², so the inputs are first
        // balanced to equal ℓ² norm; the product is unchanged.
        let (na, nb) = (a.l2_norm(), b.l2_norm());
        if na == 0.0 || nb == 0.0 {
            return vec![T::zero(); out_len];
        }
        let c = (nb / na).sqrt();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, v) in a.values().iter().enumerate() {
            buf[i].re = c * v.to_c64().re;
        }
        for (i, v) in b.values().iter().enumerate() {
            buf[i].im = v.to_c64().re / c;
        }
        fwd.process(&mut buf);
        // A_k = (Z_k + conj Z_{-k})/2, B_k = (Z_k − conj Z_{-k})/(2i), so
        // A_k B_k = (Z_k² − conj(Z_{-k})²)/(4i).
        let half = n / 2;
        for k in 0..=half {
            let j = (n - k) % n;
            let zk = buf[k];
            let zj = buf[j];
            let pk = (zk * zk - zj.conj() * zj.conj()) / Complex64::new(0.0, 4.0);
            let pj = (zj * zj - zk.conj() * zk.conj()) / Complex64::new(0.0, 4.0);
            buf[k] = pk;
            buf[j] = pj;
        }
        inv.process(&mut buf);
        return buf[..out_len].iter().map(|z| T::from_f64(z.re * scale)).collect();
    }
    let load = |k: &DiscreteKernel<T>| {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, v) in k.values().iter().enumerate() {
            buf[i] = v.to_c64();
        }
        buf
    };
    let mut fa = load(a);
    let mut fb = load(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    drop(fb);
    inv.process(&mut fa);
    fa[..out_len].iter().map(|z| T::from_c64(z * scale)).collect()
}

fn residual_check<T: Coeff>(
    a: &DiscreteKernel<T>,
    nz_a: &[(i64, T)],
    b: &DiscreteKernel<T>,
    out: &[T],
    lo: i64,
    cfg: &ConvolutionConfig,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let norms = a.l2_norm() * b.l2_norm();
    for _ in 0..cfg.residual_points {
        let i = rng.gen_range(0..out.len());
        let x = lo + i as i64;
        let mut exact = Complex64::new(0.0, 0.0);
        let mut local = 0.0;
        for &(y, u) in nz_a {
            let w = b.get(x - y);
            exact += (u * w).to_c64();
            local += u.modulus() * w.modulus();
        }
        let diff = (out[i].to_c64() - exact).norm();
        let allowed = 1e-8 * local + 1e-12 * norms;
        if diff > allowed {
            return Err(LabError::ResidualCheck { x, diff, allowed });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_factory::Kernel;

    #[test]
    fn hand_expansion() {
        let d = Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]);
        let c = convolve(&d, &d).unwrap();
        assert_eq!(c.values(), &[1.0, 0.0, -2.0, 0.0, 1.0]);
        assert_eq!(c.support_min(), -2);
    }

    #[test]
    fn fft_path_matches_direct() {
        let a = Kernel::from_values(-5, (0..40).map(|i| ((i * 7 % 11) as f64) - 5.0).collect(), KernelMeta::default());
        let b = Kernel::from_values(3, (0..25).map(|i| ((i * 5 % 13) as f64) * 0.25).collect(), KernelMeta::default());
        let fft = ConvolutionConfig { mode: ConvolutionMode::Fft, ..Default::default() };
        let direct = ConvolutionConfig { mode: ConvolutionMode::Direct, ..Default::default() };
        let x = convolve_with(&a, &b, &fft).unwrap();
        let y = convolve_with(&a, &b, &direct).unwrap();
        assert_eq!(x.support_min(), y.support_min());
        for (u, v) in x.values().iter().zip(y.values()) {
            assert!((u - v).abs() < 1e-10);
        }
        let sq = convolve_with(&a, &a, &fft).unwrap();
        let sq_direct = convolve_with(&a, &a.clone(), &direct).unwrap();
        for (u, v) in sq.values().iter().zip(sq_direct.values()) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let a = Kernel::zeros(0, 1000, KernelMeta::default()).add(&Kernel::delta(0, 1.0));
        let cfg = ConvolutionConfig { budget_bytes: 100, ..Default::default() };
        assert!(matches!(convolve_with(&a, &a, &cfg), Err(LabError::Budget { .. })));
    }
}
