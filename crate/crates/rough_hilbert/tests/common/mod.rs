//! Oracles shared by several test targets.
#![allow(dead_code)]

use num_complex::Complex64;
use rough_hilbert::kernel_factory::Kernel;

/// `[m^{3/2}] = ⌊√(m³)⌋` in integers.
pub fn floor_three_halves(m: u64) -> i64 {
    (m as u128).pow(3).isqrt() as i64
}

/// `(c·δ₀ + K)∗f` on the torus `Z_n`, by sparse direct summation.
fn circulant_apply(c: Complex64, k: &[(i64, f64)], f: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = f.len() as i64;
    let mut out: Vec<Complex64> = f.iter().map(|v| c * v).collect();
    for &(x, v) in k {
        let w = sign * v;
        let shift = x.rem_euclid(n) as usize;
        let (head, tail) = f.split_at(f.len() - shift);
        for (o, fv) in out[shift..].iter_mut().zip(head) {
            *o += w * fv;
        }
        for (o, fv) in out[..shift].iter_mut().zip(tail) {
            *o += w * fv;
        }
    }
    out
}

/// Solves `(λδ₀ + H)∗r = δ₀` on `Z_n` by conjugate gradients on the normal
/// equations, using only sparse matrix-vector products. `H` must be real
/// and odd, so the adjoint is `conj(λ)δ₀ − H`. Returns `r` and the final
/// residual norm.
pub fn cgnr_resolvent(h: &Kernel, lambda: Complex64, n: usize, tol: f64, max_iter: usize) -> (Vec<Complex64>, f64) {
    let k = h.nonzeros();
    let a = |f: &[Complex64]| circulant_apply(lambda, &k, f, 1.0);
    let a_adj = |f: &[Complex64]| circulant_apply(lambda.conj(), &k, f, -1.0);
    let dot = |u: &[Complex64], v: &[Complex64]| u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<Complex64>();
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    b[0] = Complex64::new(1.0, 0.0);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut r = b.clone();
    let mut z = a_adj(&r);
    let mut p = z.clone();
    let mut zz = dot(&z, &z).re;
    let mut res = 1.0;
    for _ in 0..max_iter {
        let w = a(&p);
        let alpha = zz / dot(&w, &w).re;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (ri, wi) in r.iter_mut().zip(&w) {
            *ri -= alpha * wi;
        }
        res = dot(&r, &r).re.sqrt();
        if res < tol {
            break;
        }
        z = a_adj(&r);
        let zz_new = dot(&z, &z).re;
        let beta = zz_new / zz;
        zz = zz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    (x, res)
}

/// Torus value at integer position `x`.
pub fn torus_at(v: &[Complex64], x: i64) -> Complex64 {
    v[x.rem_euclid(v.len() as i64) as usize]
}
