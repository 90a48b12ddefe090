use crate::error::{LabError, Result};

/// Number of positive divisors of `n`, by trial division. Inputs wider
/// than 64 bits are refused.
pub fn divisor_count(n: u128) -> Result<u64> {
    if n == 0 {
        return Err(LabError::Domain("divisor_count needs n >= 1".into()));
    }
    let mut n = u64::try_from(n).map_err(|_| LabError::Overflow(format!("{n} exceeds 64 bits")))?;
    let mut count = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        count *= e + 1;
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        count *= 2;
    }
    Ok(count)
}

/// Smallest `n <= limit` maximising `d(n)`, with that maximum (sieve).
pub fn max_divisor_count(limit: u64) -> (u64, u64) {
    let lim = limit as usize;
    let mut d = vec![0u32; lim + 1];
    for i in 1..=lim {
        let mut j = i;
        while j <= lim {
            d[j] += 1;
            j += i;
        }
    }
    let mut best = (1u64, d.get(1).copied().unwrap_or(0) as u64);
    for (n, &v) in d.iter().enumerate().skip(2) {
        if v as u64 > best.1 {
            best = (n as u64, v as u64);
        }
    }
    best
}
