use serde::{Deserialize, Serialize};

use super::convolve::{convolve_with, ConvolutionConfig};
use crate::error::{LabError, Result};
use crate::kernel_factory::{Kernel, KernelMeta};

/// `H_s∗H_s = G + E + dirac·δ₀`.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub s: u64,
    pub alpha: f64,
    pub delta_l: f64,
    /// Short-range cut `L = [s^{α−1+δ_L}]`.
    pub cut: i64,
    pub dirac_coefficient: f64,
    pub g: Kernel,
    pub e: Kernel,
    pub sup_g: f64,
    pub sup_e: f64,
    /// `sup|G|·s^α`.
    pub sup_g_scaled: f64,
    /// `sup|E|·s^α`.
    pub sup_e_scaled: f64,
    /// The autocorrelation `H⋆H` on its fixed-point grid.
    pub autocorrelation: Kernel,
    /// Grid step of `autocorrelation`.
    pub quantum: f64,
    /// True when `(G + E) + dirac·δ₀` reproduces `autocorrelation` bit for bit.
    pub exact: bool,
    pub holder: RegularityProfile,
}

/// Sup-norm of shifted differences of `G`, scaled by `s^α`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegularityProfile {
    pub rows: Vec<(u64, f64)>,
    /// Least-squares slope of `log ratio` against `log u` over `u >= 1`.
    pub slope: f64,
    pub slope_stderr: f64,
}

/// Slope, standard error and residuals of a least-squares line.
pub fn loglog_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    let stderr = if pts.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, stderr, icpt)
}

pub fn regularity_profile(g: &Kernel, s: u64, alpha: f64, shifts: &[u64]) -> RegularityProfile {
    let scale = (s as f64).powf(alpha);
    let rows: Vec<(u64, f64)> = shifts
        .iter()
        .map(|&u| {
            if g.is_empty() || u == 0 {
                return (u, 0.0);
            }
            let u = u as i64;
            let mut m = 0.0f64;
            for x in g.support_min() - u..=g.support_max() {
                m = m.max((g.get(x + u) - g.get(x)).abs());
            }
            (u as u64, m * scale)
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(u, r)| (u as f64, r)).collect();
    let (slope, slope_stderr, _) = loglog_fit(&pts);
    RegularityProfile { rows, slope, slope_stderr }
}

/// Dyadic shifts `1, 2, 4, …, 64`.
pub fn default_shifts() -> Vec<u64> {
    (0..7).map(|j| 1u64 << j).collect()
}

/// Rounds every entry to the fixed-point grid `Q = 2^{c−51}`, `2^c` the
/// first power of two above `max|A|`. Sums and differences of two entries
/// of size at most `max|A|` are then exact in binary64. The rounding is
/// below the accuracy of the convolution that produced `A`.
fn quantize(a: &mut Kernel) -> f64 {
    let m = a.sup_norm();
    if m == 0.0 {
        return 0.0;
    }
    let c = m.log2().floor() as i32 + 1;
    let q = 2f64.powi(c - 51);
    for v in a.values_mut() {
        *v = (*v / q).round() * q;
    }
    q
}

/// Autocorrelation `(H⋆H)(x) = Σ_y H(y)H(y−x)`; for antisymmetric `H` this
/// is `−H∗H`.
pub fn autocorrelation(h: &Kernel, cfg: &ConvolutionConfig) -> Result<Kernel> {
    if h.antisymmetry_defect().1 == 0.0 {
        let a = convolve_with(h, h, cfg)?;
        Ok(a.scaled(-1.0))
    } else {
        convolve_with(h, &h.reflected(), cfg)
    }
}

/// Splits the autocorrelation of a single block. Scale and exponent are
/// read from the kernel metadata.
pub fn autocorrelation_decompose(h: &Kernel, delta_l: f64) -> Result<DecompositionReport> {
    autocorrelation_decompose_with(h, delta_l, &ConvolutionConfig::default())
}

pub fn autocorrelation_decompose_with(h: &Kernel, delta_l: f64, cfg: &ConvolutionConfig) -> Result<DecompositionReport> {
    let alpha = h.meta.alpha.ok_or_else(|| LabError::Config("kernel carries no exponent".into()))?;
    let s = match h.meta.scales.as_slice() {
        [s] => *s,
        _ => return Err(LabError::Config("kernel is not a single block".into())),
    };
    let cut_f = (s as f64).powf(alpha - 1.0 + delta_l);
    let cut = cut_f.floor() as i64;
    if h.nnz() == 0 {
        return Ok(DecompositionReport {
            s,
            alpha,
            delta_l,
            cut,
            dirac_coefficient: 0.0,
            g: Kernel::zero(),
            e: Kernel::zero(),
            sup_g: 0.0,
            sup_e: 0.0,
            sup_g_scaled: 0.0,
            sup_e_scaled: 0.0,
            autocorrelation: Kernel::zero(),
            quantum: 0.0,
            exact: true,
            holder: RegularityProfile::default(),
        });
    }
    if cut < 2 {
        return Err(LabError::Degenerate(format!("short range s^(α−1+δ_L) = {cut_f:.3} < 2")));
    }
    let mut a = autocorrelation(h, cfg)?;
    let quantum = quantize(&mut a);
    let r = a.radius() as i64;
    let hi = r.max(cut);
    let dirac = a.get(0);
    let flat = a.get(cut);
    let mut g = Kernel::zeros(-hi, hi, KernelMeta::labelled(format!("G_{s}")));
    let mut e = Kernel::zeros(-cut, cut, KernelMeta::labelled(format!("E_{s}")));
    for x in -hi..=hi {
        let ax = a.get(x);
        if x.abs() > cut {
            g.add_at(x, ax);
            continue;
        }
        g.add_at(x, flat);
        if x == 0 {
            e.add_at(0, -flat);
            continue;
        }
        e.add_at(x, ax - flat);
    }
    // The flattened value at 0 cancels against E(0), so the diagonal sits
    // entirely in the Dirac coefficient.
    let exact = (-hi..=hi).all(|x| {
        let dx = if x == 0 { dirac } else { 0.0 };
        (g.get(x) + e.get(x)) + dx == a.get(x)
    });
    let scale = (s as f64).powf(alpha);
    let sup_g = g.sup_norm();
    let sup_e = e.sup_norm();
    let holder = regularity_profile(&g, s, alpha, &default_shifts());
    Ok(DecompositionReport {
        s,
        alpha,
        delta_l,
        cut,
        dirac_coefficient: dirac,
        g,
        e,
        sup_g,
        sup_e,
        sup_g_scaled: sup_g * scale,
        sup_e_scaled: sup_e * scale,
        autocorrelation: a,
        quantum,
        exact,
        holder,
    })
}
