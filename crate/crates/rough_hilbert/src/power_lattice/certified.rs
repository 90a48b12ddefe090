//! Fixed-point interval arithmetic for real powers `b^α`.
//!
//! A quantity is enclosed by a pair of big integers `[lo, hi]` read at scale
//! `2^-q`. Every operation rounds `lo` down and `hi` up, and every truncated
//! series carries an explicit tail bound, so the enclosure is rigorous.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

/// Starting working precision (fraction bits) for escalation.
pub const START_BITS: u32 = 64;
/// Default precision cap.
pub const DEFAULT_MAX_BITS: u32 = 1024;

/// A positive dyadic rational `num * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub num: BigUint,
    pub exp: i64,
}

impl Dyadic {
    pub fn from_u64(m: u64) -> Self {
        Dyadic { num: BigUint::from(m), exp: 0 }
    }

    /// Exact dyadic value of a finite positive double.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(LabError::Domain(format!("base {x} must be finite and positive")));
        }
        let (mant, exp, _) = num_traits::float::FloatCore::integer_decode(x);
        Ok(Dyadic { num: BigUint::from(mant), exp: exp as i64 })
    }
}

/// Exponent `α = a / 2^e` in lowest terms (`a` odd unless `α` is an integer).
#[derive(Clone, Copy, Debug)]
pub struct DyadicExponent {
    pub a: u64,
    pub e: u32,
}

impl DyadicExponent {
    pub fn from_f64(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(LabError::Domain(format!("exponent {alpha} must be finite and positive")));
        }
        let (mut mant, exp, _) = num_traits::float::FloatCore::integer_decode(alpha);
        let mut e: i32 = -(exp as i32);
        while e > 0 && mant % 2 == 0 {
            mant /= 2;
            e -= 1;
        }
        if e < 0 {
            // integer exponent >= 2^53 never occurs for alpha in (1,2)
            return Err(LabError::Domain(format!("exponent {alpha} too large")));
        }
        Ok(DyadicExponent { a: mant, e: e as u32 })
    }
}

/// Rigorous enclosure `[lo, hi] * 2^-q`.
#[derive(Clone, Debug)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub q: u32,
}

impl Enclosure {
    pub fn width_exceeds(&self, bits_below_one: u32) -> bool {
        // width >= 2^(q - bits_below_one)
        let w = &self.hi - &self.lo;
        if self.q < bits_below_one {
            return !w.is_zero();
        }
        w >= (BigInt::one() << (self.q - bits_below_one))
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        let scale = |v: &BigInt| ratio_to_f64(v, self.q);
        let (a, b) = (scale(&self.lo), scale(&self.hi));
        let slack = 4.0 * f64::EPSILON;
        (a - a.abs() * slack - f64::MIN_POSITIVE, b + b.abs() * slack + f64::MIN_POSITIVE)
    }
}

fn ratio_to_f64(v: &BigInt, q: u32) -> f64 {
    let bits = v.bits() as i64;
    let drop = (bits - 62).max(0);
    let top = (v >> drop as usize).to_f64().unwrap_or(f64::NAN);
    top * (2f64).powi((drop - q as i64) as i32)
}

fn floor_shr(v: &BigInt, k: u32) -> BigInt {
    // num-bigint's arithmetic shift rounds toward negative infinity
    v >> k as usize
}

fn ceil_shr(v: &BigInt, k: u32) -> BigInt {
    -((-v) >> k as usize)
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Enclosure of `2^q * atanh(a/b)` for `0 <= a/b <= 1/3`.
fn atanh_ratio(a: &BigInt, b: &BigInt, q: u32) -> (BigInt, BigInt) {
    debug_assert!(!a.is_negative() && b.is_positive() && a * 3 <= *b);
    let one_q = BigInt::one() << q as usize;
    let a2 = a * a;
    let b2 = b * b;
    let mut p_lo = floor_div(&(a * &one_q), b);
    let mut p_hi = ceil_div(&(a * &one_q), b);
    let mut s_lo = p_lo.clone();
    let mut s_hi = p_hi.clone();
    let eight = BigInt::from(8);
    let mut j: u64 = 0;
    // tail after term j is at most t^2/(1-t^2) <= 1/8 of the current power
    while p_hi > eight {
        j += 1;
        p_lo = floor_div(&(&p_lo * &a2), &b2);
        p_hi = ceil_div(&(&p_hi * &a2), &b2);
        let d = BigInt::from(2 * j + 1);
        s_lo += floor_div(&p_lo, &d);
        s_hi += ceil_div(&p_hi, &d);
    }
    s_hi += 1;
    (s_lo, s_hi)
}

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, (BigInt, BigInt)>> = RefCell::new(HashMap::new());
}

/// Enclosure of `2^q ln 2`, via `ln 2 = 2 atanh(1/3)`.
pub fn ln2(q: u32) -> (BigInt, BigInt) {
    LN2_CACHE.with(|c| {
        if let Some(v) = c.borrow().get(&q) {
            return v.clone();
        }
        let (lo, hi) = atanh_ratio(&BigInt::one(), &BigInt::from(3), q);
        let v = (lo * 2, hi * 2);
        c.borrow_mut().insert(q, v.clone());
        v
    })
}

/// Enclosure of `2^q ln(b)` for a positive dyadic `b`.
pub fn ln_dyadic(b: &Dyadic, q: u32) -> (BigInt, BigInt) {
    // b = num * 2^exp = 2^k * r with r = num / 2^(bits-1) in [1, 2)
    let nb = b.num.bits() as i64;
    let k = nb - 1 + b.exp;
    let num = BigInt::from_biguint(Sign::Plus, b.num.clone());
    let den = BigInt::one() << (nb - 1) as usize;
    let (t_lo, t_hi) = atanh_ratio(&(&num - &den), &(&num + &den), q);
    let (l2_lo, l2_hi) = ln2(q);
    let kb = BigInt::from(k);
    let (kl_lo, kl_hi) = if k >= 0 { (&kb * &l2_lo, &kb * &l2_hi) } else { (&kb * &l2_hi, &kb * &l2_lo) };
    (kl_lo + t_lo * 2, kl_hi + t_hi * 2)
}

/// Enclosure of `2^q exp(y)` given an enclosure of `2^q y`.
pub fn exp_enclosure(y_lo: &BigInt, y_hi: &BigInt, q: u32) -> (BigInt, BigInt) {
    let (l2_lo, l2_hi) = ln2(q);
    let y_est = ratio_to_f64(y_lo, q);
    let mut n = (y_est / std::f64::consts::LN_2).floor() as i64 - 1;
    let (z_lo, z_hi) = loop {
        let nb = BigInt::from(n);
        let (sub_lo, sub_hi) = if n >= 0 { (&nb * &l2_hi, &nb * &l2_lo) } else { (&nb * &l2_lo, &nb * &l2_hi) };
        let z_lo = y_lo - sub_lo;
        let z_hi = y_hi - sub_hi;
        if z_lo.is_negative() {
            n -= 1;
            continue;
        }
        break (z_lo, z_hi);
    };
    let one_q = BigInt::one() << q as usize;
    let mut t_lo = one_q.clone();
    let mut t_hi = one_q.clone();
    let mut s_lo = one_q.clone();
    let mut s_hi = one_q.clone();
    let z_max = ratio_to_f64(&z_hi, q);
    let mut j: u64 = 0;
    loop {
        j += 1;
        let d = BigInt::from(j);
        t_lo = floor_shr(&(&t_lo * &z_lo), q).div_floor(&d);
        t_hi = ceil_div(&ceil_shr(&(&t_hi * &z_hi), q), &d);
        s_lo += &t_lo;
        s_hi += &t_hi;
        // remaining tail <= t_j * r / (1 - r) with r = z/(j+1) <= 1/2
        if (j as f64 + 1.0) >= 2.0 * z_max && t_hi <= BigInt::one() {
            break;
        }
    }
    s_hi += &t_hi + 1;
    if n >= 0 {
        (s_lo << n as usize, s_hi << n as usize)
    } else {
        let k = (-n) as u32;
        (floor_shr(&s_lo, k), ceil_shr(&s_hi, k))
    }
}

/// Enclosure of `b^α` at fraction precision `q`.
pub fn pow_enclosure(b: &Dyadic, alpha: DyadicExponent, q: u32) -> Enclosure {
    let guard = 32;
    let qq = q + guard;
    let (l_lo, l_hi) = ln_dyadic(b, qq);
    let a = BigInt::from(alpha.a);
    let y_lo = floor_shr(&(&a * l_lo), alpha.e);
    let y_hi = ceil_shr(&(&a * l_hi), alpha.e);
    let (p_lo, p_hi) = exp_enclosure(&y_lo, &y_hi, qq);
    Enclosure { lo: floor_shr(&p_lo, guard), hi: ceil_shr(&p_hi, guard), q }
}

/// Certified `[m^α]` together with an enclosure of the fractional part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedPower {
    pub floor: u128,
    /// Lower and upper bounds for `{m^α}`.
    pub frac_lo: f64,
    pub frac_hi: f64,
    /// Precision (fraction bits) at which certification succeeded.
    pub bits: u32,
}

impl CertifiedPower {
    pub fn frac_mid(&self) -> f64 {
        0.5 * (self.frac_lo + self.frac_hi)
    }
}

/// Exact value of `m^α` when it is an integer (`m` a perfect `2^e`-th power).
fn exact_integer_power(m: u64, alpha: DyadicExponent) -> Option<u128> {
    if m == 1 {
        return Some(1);
    }
    if alpha.e == 0 {
        return (m as u128).checked_pow(alpha.a as u32);
    }
    if alpha.e > 6 {
        return None;
    }
    let root_deg = 1u32 << alpha.e;
    let c = m.nth_root(root_deg);
    if (c as u128).checked_pow(root_deg) == Some(m as u128) {
        (c as u128).checked_pow(alpha.a as u32)
    } else {
        None
    }
}

/// Certified floor of `m^α` with a fractional-part enclosure of width below
/// `2^-frac_bits`. Precision doubles from [`START_BITS`] up to `max_bits`.
pub fn certify_power(m: u64, alpha: f64, frac_bits: u32, max_bits: u32) -> Result<CertifiedPower> {
    if m == 0 {
        return Err(LabError::Domain("m must be positive".into()));
    }
    let ex = DyadicExponent::from_f64(alpha)?;
    if let Some(v) = exact_integer_power(m, ex) {
        return Ok(CertifiedPower { floor: v, frac_lo: 0.0, frac_hi: 0.0, bits: 0 });
    }
    let base = Dyadic::from_u64(m);
    let need = frac_bits.max(2);
    let mut q = START_BITS;
    loop {
        let enc = pow_enclosure(&base, ex, q);
        let f_lo = floor_shr(&enc.lo, q);
        let f_hi = floor_shr(&enc.hi, q);
        if f_lo == f_hi && !enc.width_exceeds(need) {
            let fl = f_lo.to_u128().ok_or_else(|| LabError::Overflow(format!("{m}^{alpha}")))?;
            let base_q = &f_lo << q as usize;
            let frac = Enclosure { lo: &enc.lo - &base_q, hi: &enc.hi - &base_q, q };
            let (a, b) = frac.to_f64_bounds();
            return Ok(CertifiedPower { floor: fl, frac_lo: a.max(0.0), frac_hi: b.min(1.0), bits: q });
        }
        if q >= max_bits {
            return Err(LabError::PrecisionExhausted { base: m.to_string(), alpha, max_bits });
        }
        q = (q * 2).min(max_bits);
    }
}

/// Certified `[m^α]` as a 64-bit integer.
pub fn eval_floor_power_with(m: u64, alpha: f64, max_bits: u32) -> Result<i64> {
    let c = certify_power(m, alpha, 2, max_bits)?;
    i64::try_from(c.floor).map_err(|_| LabError::Overflow(format!("[{m}^{alpha}] exceeds i64")))
}

/// Rigorous bounds on `b^α` for a positive double `b`, as doubles.
pub fn pow_bounds_f64(b: f64, alpha: f64, q: u32) -> Result<(f64, f64)> {
    let d = Dyadic::from_f64(b)?;
    let ex = DyadicExponent::from_f64(alpha)?;
    Ok(pow_enclosure(&d, ex, q).to_f64_bounds())
}
