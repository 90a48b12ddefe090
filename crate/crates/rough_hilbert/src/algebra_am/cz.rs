use crate::convolution_lab::convolve;
use crate::error::Result;
use crate::kernel_factory::{Coeff, DiscreteKernel};

/// `sup_{|y| <= y_max} Σ_{|x| >= 2|y|} |K(x−y) − K(x)|`, evaluated exactly.
/// Shifts beyond the support radius contribute nothing.
pub fn cz_norm<T: Coeff>(k: &DiscreteKernel<T>, y_max: u64) -> f64 {
    if k.nnz() == 0 {
        return 0.0;
    }
    let k = k.trimmed(0.0);
    let r = k.radius() as i64;
    let ym = (y_max as i64).min(r);
    let (lo, hi) = (k.support_min(), k.support_max());
    let vals = k.values();
    let at = |x: i64| -> T {
        if x < lo || x > hi {
            T::zero()
        } else {
            vals[(x - lo) as usize]
        }
    };
    let mut best = 0.0f64;
    for y in -ym..=ym {
        if y == 0 {
            continue;
        }
        let a = 2 * y.abs();
        let mut acc = 0.0;
        // Only x with K(x) or K(x−y) nonzero matter.
        let xs_lo = lo.min(lo + y);
        let xs_hi = hi.max(hi + y);
        for x in xs_lo..=xs_hi {
            if x.abs() < a {
                continue;
            }
            acc += (at(x - y) - at(x)).modulus();
        }
        best = best.max(acc);
    }
    best
}

/// `sup_t t·#{x : |g(x)| > t}` for `g = K∗f`, divided by `‖f‖₁`, maximised
/// over the inputs. The supremum over `t` is approached from below at each
/// distinct value `v` of `|g|`, giving `v·#{|g| >= v}`.
pub fn weak11_ratio<T: Coeff>(k: &DiscreteKernel<T>, inputs: &[DiscreteKernel<T>]) -> Result<f64> {
    let mut best = 0.0f64;
    for f in inputs {
        let n1 = f.l1_norm();
        if n1 == 0.0 {
            continue;
        }
        let g = convolve(k, f)?;
        let mut mags: Vec<f64> = g.values().iter().map(|v| v.modulus()).filter(|&m| m > 0.0).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (i, &v) in mags.iter().enumerate() {
            // mags is descending, so #{|g| >= v} is the index of the last tie + 1.
            if i + 1 < mags.len() && mags[i + 1] == v {
                continue;
            }
            best = best.max(v * (i + 1) as f64 / n1);
        }
    }
    Ok(best)
}
