use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::blocks::TwoBlockTransform;
use crate::error::{LabError, Result};

/// Largest number of `j` values a single call will enumerate.
pub const MAX_J_COUNT: i64 = 50_000_000;

/// `A_j` for `j_lo <= j <= j_hi`, with `I_j = [(j−1)P, (j+1)P]`. Only
/// nonempty sets are stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSets {
    pub p_len: f64,
    pub j_lo: i64,
    pub j_hi: i64,
    pub sets: BTreeMap<i64, Vec<u64>>,
}

impl BadSets {
    pub fn get(&self, j: i64) -> &[u64] {
        self.sets.get(&j).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn size(&self, j: i64) -> usize {
        self.get(j).len()
    }

    pub fn max_size(&self) -> usize {
        self.sets.values().map(|v| v.len()).max().unwrap_or(0)
    }

    pub fn nonempty(&self) -> usize {
        self.sets.len()
    }

    pub fn contains(&self, j: i64, n: u64) -> bool {
        self.get(j).binary_search(&n).is_ok()
    }
}

/// `P = M^{α(α−1−δ)}`.
pub fn default_p_len(tb: &TwoBlockTransform) -> f64 {
    (tb.m_top as f64).powf(tb.alpha * (tb.alpha - 1.0 - tb.delta))
}

/// `M^{α(2+0.9δ−α)}/C <= j <= C·M^{α(2+δ−α)}`.
pub fn default_j_window(tb: &TwoBlockTransform, c: f64) -> (i64, i64) {
    let m = tb.m_top as f64;
    let a = tb.alpha;
    let lo = (m.powf(a * (2.0 + 0.9 * tb.delta - a)) / c).ceil() as i64;
    let hi = (c * m.powf(a * (2.0 + tb.delta - a))).floor() as i64;
    (lo.max(1), hi)
}

/// `I_j` contains `x`.
pub fn in_interval(x: i64, j: i64, p_len: f64) -> bool {
    let x = x as f64;
    (j - 1) as f64 * p_len <= x && x <= (j + 1) as f64 * p_len
}

/// Indices `j` with `x ∈ I_j`.
pub fn intervals_containing(x: i64, p_len: f64) -> impl Iterator<Item = i64> {
    let c = (x as f64 / p_len).floor() as i64;
    (c - 1..=c + 2).filter(move |&j| in_interval(x, j, p_len))
}

/// Enumerates every `x = σ₁[m^α] + σ₂[n^α]` reachable from the two blocks,
/// groups equal `x`, and records the `n` of every group with two or more
/// solutions in each `A_j` whose `I_j` holds that `x`.
pub fn bad_sets(tb: &TwoBlockTransform, j_lo: i64, j_hi: i64, p_len: f64) -> Result<BadSets> {
    if !(p_len > 0.0) || !p_len.is_finite() {
        return Err(LabError::Range(format!("P = {p_len} must be positive")));
    }
    if j_lo > j_hi {
        return Err(LabError::Range(format!("empty j window [{j_lo}, {j_hi}]")));
    }
    if j_hi - j_lo >= MAX_J_COUNT {
        return Err(LabError::Range(format!("j window of {} entries exceeds {MAX_J_COUNT}", j_hi - j_lo + 1)));
    }
    let x_lo = (j_lo - 1) as f64 * p_len;
    let x_hi = (j_hi + 1) as f64 * p_len;
    let mut reps: Vec<(i64, u64)> = Vec::new();
    for a in &tb.plus_atoms {
        for b in &tb.minus_atoms {
            for s1 in [1i64, -1] {
                for s2 in [1i64, -1] {
                    let x = s1 * a.x + s2 * b.x;
                    if (x as f64) >= x_lo && (x as f64) <= x_hi {
                        reps.push((x, b.m));
                    }
                }
            }
        }
    }
    reps.sort_unstable();
    let mut sets: BTreeMap<i64, BTreeSet<u64>> = BTreeMap::new();
    for group in reps.chunk_by(|a, b| a.0 == b.0) {
        if group.len() < 2 {
            continue;
        }
        let x = group[0].0;
        for j in intervals_containing(x, p_len).filter(|j| (j_lo..=j_hi).contains(j)) {
            sets.entry(j).or_default().extend(group.iter().map(|r| r.1));
        }
    }
    Ok(BadSets { p_len, j_lo, j_hi, sets: sets.into_iter().map(|(j, s)| (j, s.into_iter().collect())).collect() })
}

/// A point `x = [m^α] + σ[n^α]` with `[m^α] ∈ I_j` and `n ∉ A_{j'}` for
/// `j' ∈ {j−1, j, j+1}` and for every `j'` with `x ∈ I_{j'}`. The second
/// family matters once `[n^α] > P`, when `x` can leave `I_{j−1} ∪ I_j ∪ I_{j+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: i64,
    pub m: u64,
    pub n: u64,
    pub sign: i8,
    pub j: i64,
    /// `|ℍ₊([m^α])·ℍ₋([n^α])|`.
    pub bound: f64,
}

/// Witnesses whose excluded indices all lie inside the computed window.
pub fn witness_set(tb: &TwoBlockTransform, bad: &BadSets) -> Vec<Witness> {
    let inside = |j: i64| j >= bad.j_lo && j <= bad.j_hi;
    let mut out = Vec::new();
    for a in &tb.plus_atoms {
        let js: Vec<i64> = intervals_containing(a.x, bad.p_len).filter(|&j| inside(j - 1) && inside(j + 1)).collect();
        for b in &tb.minus_atoms {
            for sign in [1i8, -1] {
                let x = a.x + sign as i64 * b.x;
                let around: Vec<i64> = intervals_containing(x, bad.p_len).collect();
                if !around.iter().all(|&j| inside(j)) || around.iter().any(|&j| bad.contains(j, b.m)) {
                    continue;
                }
                let good = js.iter().copied().find(|&j| (j - 1..=j + 1).all(|k| !bad.contains(k, b.m)));
                if let Some(j) = good {
                    out.push(Witness { x, m: a.m, n: b.m, sign, j, bound: (a.coeff * b.coeff).abs() });
                }
            }
        }
    }
    out.sort_by_key(|w| w.x);
    out
}
