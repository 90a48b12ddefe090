use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Scalar type a kernel can carry: `f64` or `Complex64`.
pub trait Coeff:
    Copy
    + Debug
    + Default
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + Send
    + Sync
    + 'static
{
    const IS_REAL: bool;
    fn zero() -> Self {
        Self::default()
    }
    fn from_f64(x: f64) -> Self;
    fn to_c64(self) -> Complex64;
    fn from_c64(z: Complex64) -> Self;
    fn modulus(self) -> f64;
    fn conj(self) -> Self;
    fn scale(self, c: f64) -> Self;
}

impl Coeff for f64 {
    const IS_REAL: bool = true;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z.re
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
}

impl Coeff for Complex64 {
    const IS_REAL: bool = false;
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for v in it {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// How a Hilbert block weights the index `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `φ(m/s)`.
    PhiOfMOverS,
    /// `φ(m^α/s)`.
    PhiOfMalphaOverS,
}

/// Construction record carried by every kernel.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelMeta {
    pub label: String,
    pub alpha: Option<f64>,
    pub scales: Vec<u64>,
    pub cutoff: Option<String>,
    pub variant: Option<Variant>,
    pub notes: Vec<String>,
}

impl KernelMeta {
    pub fn labelled(label: impl Into<String>) -> Self {
        KernelMeta { label: label.into(), ..Default::default() }
    }
}

/// Finitely supported function on ℤ stored densely over
/// `[support_min, support_min + len − 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteKernel<T: Coeff = f64> {
    support_min: i64,
    values: Vec<T>,
    pub meta: KernelMeta,
}

pub type Kernel = DiscreteKernel<f64>;
pub type ComplexKernel = DiscreteKernel<Complex64>;

impl<T: Coeff> DiscreteKernel<T> {
    pub fn zero() -> Self {
        DiscreteKernel { support_min: 0, values: Vec::new(), meta: KernelMeta::labelled("zero") }
    }

    pub fn from_values(support_min: i64, values: Vec<T>, meta: KernelMeta) -> Self {
        DiscreteKernel { support_min, values, meta }
    }

    /// Zero kernel allocated over `[lo, hi]`.
    pub fn zeros(lo: i64, hi: i64, meta: KernelMeta) -> Self {
        if hi < lo {
            return DiscreteKernel { support_min: 0, values: Vec::new(), meta };
        }
        DiscreteKernel { support_min: lo, values: vec![T::zero(); (hi - lo + 1) as usize], meta }
    }

    /// `c·δ_at`.
    pub fn delta(at: i64, c: T) -> Self {
        DiscreteKernel { support_min: at, values: vec![c], meta: KernelMeta::labelled(format!("delta({at})")) }
    }

    pub fn from_pairs(pairs: &[(i64, T)]) -> Self {
        if pairs.is_empty() {
            return Self::zero();
        }
        let lo = pairs.iter().map(|p| p.0).min().unwrap();
        let hi = pairs.iter().map(|p| p.0).max().unwrap();
        let mut k = Self::zeros(lo, hi, KernelMeta::labelled("pairs"));
        for &(x, v) in pairs {
            k.values[(x - lo) as usize] += v;
        }
        k
    }

    pub fn support_min(&self) -> i64 {
        self.support_min
    }

    /// Inclusive upper end; `support_min − 1` for an empty kernel.
    pub fn support_max(&self) -> i64 {
        self.support_min + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> (i64, Vec<T>) {
        (self.support_min, self.values)
    }

    /// `max |x|` over the stored range.
    pub fn radius(&self) -> u64 {
        if self.is_empty() {
            return 0;
        }
        self.support_min.unsigned_abs().max(self.support_max().unsigned_abs())
    }

    #[inline]
    pub fn get(&self, x: i64) -> T {
        let i = x - self.support_min;
        if i < 0 || i as usize >= self.values.len() {
            T::zero()
        } else {
            self.values[i as usize]
        }
    }

    /// Adds `v` at `x`, which must lie in the stored range.
    pub fn add_at(&mut self, x: i64, v: T) {
        let i = (x - self.support_min) as usize;
        self.values[i] += v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.support_min + i as i64, v))
    }

    /// Nonzero entries.
    pub fn nonzeros(&self) -> Vec<(i64, T)> {
        self.iter().filter(|(_, v)| *v != T::zero()).collect()
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| **v != T::zero()).count()
    }

    /// Shrinks the stored range to the entries with `|v| > tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let first = self.values.iter().position(|v| v.modulus() > tol);
        let Some(first) = first else {
            return DiscreteKernel { support_min: 0, values: Vec::new(), meta: self.meta.clone() };
        };
        let last = self.values.iter().rposition(|v| v.modulus() > tol).unwrap();
        DiscreteKernel {
            support_min: self.support_min + first as i64,
            values: self.values[first..=last].to_vec(),
            meta: self.meta.clone(),
        }
    }

    /// Restriction to `[lo, hi]`, stored over exactly that range.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let mut k = Self::zeros(lo, hi, self.meta.clone());
        for x in lo.max(self.support_min)..=hi.min(self.support_max()) {
            k.values[(x - lo) as usize] = self.get(x);
        }
        k
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> DiscreteKernel<U> {
        DiscreteKernel { support_min: self.support_min, values: self.values.iter().map(|&v| f(v)).collect(), meta: self.meta.clone() }
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut k = self.map(|v| v * c);
        k.meta = self.meta.clone();
        k
    }

    /// `self + c·other` over the union of the stored ranges.
    pub fn add_scaled(&self, other: &Self, c: T) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.scaled(c);
        }
        let lo = self.support_min.min(other.support_min);
        let hi = self.support_max().max(other.support_max());
        let mut k = Self::zeros(lo, hi, self.meta.clone());
        for (x, v) in self.iter() {
            k.values[(x - lo) as usize] = v;
        }
        for (x, v) in other.iter() {
            k.values[(x - lo) as usize] += v * c;
        }
        k
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, T::from_f64(1.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, T::from_f64(-1.0))
    }

    /// `x ↦ K(−x)`.
    pub fn reflected(&self) -> Self {
        let mut v = self.values.clone();
        v.reverse();
        DiscreteKernel { support_min: -self.support_max(), values: v, meta: self.meta.clone() }
    }

    pub fn to_complex(&self) -> ComplexKernel {
        self.map(|v| v.to_c64())
    }

    /// Compensated `Σ_x K(x)`.
    pub fn sum(&self) -> T {
        let re = compensated_sum(self.values.iter().map(|v| v.to_c64().re));
        let im = compensated_sum(self.values.iter().map(|v| v.to_c64().im));
        T::from_c64(Complex64::new(re, im))
    }

    pub fn l1_norm(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v.modulus()))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| {
            let m = v.modulus();
            m * m
        }))
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.modulus()))
    }

    /// Largest `|K(x) + K(−x)|` and where it occurs.
    pub fn antisymmetry_defect(&self) -> (i64, f64) {
        let mut worst = (0i64, 0.0f64);
        for (x, v) in self.iter() {
            let d = (v + self.get(-x)).modulus();
            if d > worst.1 {
                worst = (x, d);
            }
        }
        worst
    }

    /// `Σ_x K(x) conj(L(x))`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let lo = self.support_min.max(other.support_min);
        let hi = self.support_max().min(other.support_max());
        let mut re = Vec::new();
        let mut im = Vec::new();
        for x in lo..=hi {
            let z = self.get(x).to_c64() * other.get(x).to_c64().conj();
            re.push(z.re);
            im.push(z.im);
        }
        Complex64::new(compensated_sum(re), compensated_sum(im))
    }

    pub fn with_meta(mut self, meta: KernelMeta) -> Self {
        self.meta = meta;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_and_pairs() {
        let k = Kernel::from_pairs(&[(1, 1.0), (-1, -1.0)]);
        assert_eq!(k.support_min(), -1);
        assert_eq!(k.support_max(), 1);
        assert_eq!(k.get(0), 0.0);
        assert_eq!(k.get(5), 0.0);
        assert_eq!(k.sum(), 0.0);
        assert_eq!(k.antisymmetry_defect().1, 0.0);
        assert_eq!(k.l1_norm(), 2.0);
    }

    #[test]
    fn trimming_and_reflection() {
        let k = Kernel::from_values(-3, vec![0.0, 2.0, 0.0, 1.0, 0.0], KernelMeta::default());
        let t = k.trimmed(0.0);
        assert_eq!((t.support_min(), t.support_max()), (-2, 0));
        let r = k.reflected();
        assert_eq!(r.get(2), 2.0);
        assert_eq!(r.get(0), 1.0);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let v = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
