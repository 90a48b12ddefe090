//! Representation counts for `[m₁^α] − [m₂^α] = x` and their partition
//! into the sets 𝒥⁺, 𝒥⁻ indexed by the gap `h = m₁ − m₂` and the grid cell
//! containing the fractional offset.
//!
//! For a solution with smaller index `m` the real gap `(m+h)^α − m^α` is
//! either `x + Δ` (the solution lies in 𝒥⁺) or `x − 1 + Δ` (it lies in 𝒥⁻),
//! with `Δ ∈ [0, 1)`. The cell of Δ is decided from certified fractional
//! parts, never from the bisection roots, which only bound the search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::gap::{gap_root, IntervalGrid, DEFAULT_GAP_TOL};
use super::sequence::PowerSequence;
use crate::error::{LabError, Result};
use crate::kernel_factory::BumpCutoff;

/// Per-(h, r) sizes of 𝒥⁺ and 𝒥⁻.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JCell {
    pub h: u64,
    pub r: usize,
    pub plus: u64,
    pub minus: u64,
}

/// Census of solutions for one target `x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionCensus {
    pub x: i64,
    pub alpha: f64,
    pub m_scale: f64,
    /// Inclusive range of the larger index `m₁`.
    pub window: (u64, u64),
    pub count_total: u64,
    pub cells: Vec<JCell>,
    pub main_term: Option<f64>,
    pub residual: Option<f64>,
}

/// Members of 𝒥⁻ and 𝒥⁺ for one `(h, x, I_r)`, listed by the smaller index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JSets {
    pub minus: Vec<u64>,
    pub plus: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Plus,
    Minus,
}

fn guard(m: f64) -> f64 {
    1e-6 + 1e-12 * m.abs()
}

fn check_window(seq: &PowerSequence, window: (u64, u64)) -> Result<()> {
    if window.0 < 1 || window.1 > seq.m_max {
        return Err(LabError::WindowOutsideTable { lo: window.0, hi: window.1, m_max: seq.m_max });
    }
    Ok(())
}

/// Certified classification of the pair `(m + h, m)` as a solution for `x`.
fn classify(seq: &PowerSequence, grid: &IntervalGrid, m: u64, h: u64, x: i64) -> Result<Option<(Side, usize)>> {
    let m1 = m + h;
    if seq.value(m1) - seq.value(m) != x {
        return Ok(None);
    }
    let (a_lo, a_hi) = seq.frac(m1);
    let (b_lo, b_hi) = seq.frac(m);
    let (d_lo, d_hi) = (a_lo - b_hi, a_hi - b_lo);
    let (side, lo, hi) = if d_lo >= 0.0 {
        (Side::Plus, d_lo, d_hi)
    } else if d_hi < 0.0 {
        (Side::Minus, 1.0 + d_lo, 1.0 + d_hi)
    } else {
        return Err(LabError::BoundaryHit(format!("sign of {{{m1}^a}} - {{{m}^a}} undecided")));
    };
    let (r_lo, r_hi) = (grid.locate(lo.max(0.0)), grid.locate(hi.min(1.0 - f64::EPSILON)));
    if r_lo != r_hi {
        return Err(LabError::BoundaryHit(format!("offset of ({m1}, {m}) straddles a grid edge")));
    }
    Ok(Some((side, r_lo)))
}

/// Integer candidates `m >= 1` between the roots for `target_lo` and `target_hi`.
fn candidate_range(alpha: f64, h: u64, target_lo: f64, target_hi: f64) -> Option<(u64, u64)> {
    let hi = gap_root(alpha, h as f64, target_hi, DEFAULT_GAP_TOL)?;
    let lo = gap_root(alpha, h as f64, target_lo, DEFAULT_GAP_TOL).unwrap_or(0.0);
    let first = ((lo - guard(lo)).ceil()).max(1.0) as u64;
    let last = (hi + guard(hi)).floor();
    if last < 1.0 {
        return None;
    }
    let last = last as u64;
    (first <= last).then_some((first, last))
}

/// 𝒥⁻ and 𝒥⁺ for `(h, x, I_r)`.
///
/// 𝒥⁺ holds the `m` with `[(m+h)^α] − [m^α] = x` and real gap `x + Δ`,
/// 𝒥⁻ those with the same floor gap and real gap `x − 1 + Δ`, `Δ ∈ I_r`.
/// When `window` is given only solutions whose larger index lies in it count.
pub fn enumerate_j_sets(
    seq: &PowerSequence,
    grid: &IntervalGrid,
    h: u64,
    x: u64,
    r: usize,
    window: Option<(u64, u64)>,
) -> Result<JSets> {
    if h == 0 || r >= grid.count {
        return Err(LabError::Domain(format!("need h >= 1 and r < {}, got h = {h}, r = {r}", grid.count)));
    }
    let (a, b) = grid.interval(r);
    let (w_lo, w_hi) = window.unwrap_or((1, seq.m_max));
    let mut out = JSets::default();
    let scan = |base: f64, side: Side, dst: &mut Vec<u64>| -> Result<()> {
        if base < 0.0 {
            return Ok(());
        }
        let Some((first, last)) = candidate_range(seq.alpha, h, base + a, base + b) else {
            return Ok(());
        };
        let first = first.max(w_lo.saturating_sub(h));
        let last = last.min(w_hi.saturating_sub(h));
        for m in first..=last {
            if m < 1 {
                continue;
            }
            if !seq.covers(m + h) {
                return Err(LabError::WindowOutsideTable { lo: m, hi: m + h, m_max: seq.m_max });
            }
            if let Some((s, rr)) = classify(seq, grid, m, h, x as i64)? {
                if s == side && rr == r {
                    dst.push(m);
                }
            }
        }
        Ok(())
    };
    scan(x as f64, Side::Plus, &mut out.plus)?;
    scan(x as f64 - 1.0, Side::Minus, &mut out.minus)?;
    Ok(out)
}

/// All solutions for `x >= 1` with larger index in `window`, as
/// `(m₁, h, is_plus, r)`.
pub fn partition_solutions(
    seq: &PowerSequence,
    grid: &IntervalGrid,
    x: u64,
    window: (u64, u64),
) -> Result<Vec<(u64, u64, bool, usize)>> {
    check_window(seq, window)?;
    if x == 0 {
        return Err(LabError::Domain("partition needs x >= 1".into()));
    }
    let mut out = Vec::new();
    let target_hi = x as f64 + 1.0;
    let mut h = 1u64;
    while (h as f64).powf(seq.alpha) < target_hi {
        if let Some((first, last)) = candidate_range(seq.alpha, h, x as f64 - 1.0, target_hi) {
            let first = first.max(window.0.saturating_sub(h)).max(1);
            let last = last.min(window.1.saturating_sub(h));
            for m in first..last.saturating_add(1) {
                if let Some((side, r)) = classify(seq, grid, m, h, x as i64)? {
                    out.push((m + h, h, side == Side::Plus, r));
                }
            }
        }
        h += 1;
    }
    out.sort_unstable();
    Ok(out)
}

/// Census of `x >= 1` over larger indices in `window`, partitioned by `(h, r)`.
pub fn solution_census(seq: &PowerSequence, grid: &IntervalGrid, x: u64, window: (u64, u64)) -> Result<SolutionCensus> {
    let sols = partition_solutions(seq, grid, x, window)?;
    let mut cells: BTreeMap<(u64, usize), (u64, u64)> = BTreeMap::new();
    for &(_, h, plus, r) in &sols {
        let e = cells.entry((h, r)).or_default();
        if plus {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    Ok(SolutionCensus {
        x: x as i64,
        alpha: seq.alpha,
        m_scale: grid.m_scale,
        window,
        count_total: sols.len() as u64,
        cells: cells.into_iter().map(|((h, r), (plus, minus))| JCell { h, r, plus, minus }).collect(),
        main_term: None,
        residual: None,
    })
}

/// Number of `m` in `window` with `[m^α] − [k^α] = x` for some `k >= 1`,
/// by binary search in the table.
///
/// For negative `x` the pair is reversed: the count is of `m` that are the
/// smaller member of a representation of `|x|`.
pub fn count_representations(seq: &PowerSequence, x: i64, window: (u64, u64)) -> Result<u64> {
    check_window(seq, window)?;
    let mut n = 0;
    for m in window.0..=window.1 {
        let target = seq.value(m) - x;
        if x < 0 && target > seq.max_value() {
            return Err(LabError::WindowOutsideTable { lo: window.0, hi: window.1, m_max: seq.m_max });
        }
        if seq.index_of_value(target).is_some() {
            n += 1;
        }
    }
    Ok(n)
}

/// Value of the main term and of its limiting integral.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MainTerm {
    pub h_min: u64,
    pub h_max: u64,
    /// `S = Σ φ(m/M)² (l(I_r)/h) m^{2−α}` with `m = m(h, x, a(I_r))`.
    pub s_value: f64,
    /// Quadrature of `∫ φ(M^{−1}(x/αh)^ρ)² (x/αh)^{ρ(2−α)} dh/h`, `ρ = 1/(α−1)`.
    pub integral: f64,
    /// `S / (α(α−1))`: predicted weighted count of solutions.
    pub predicted_count: f64,
}

/// Main term `S` for target `x` at scale `M`.
///
/// `c_range` is the constant `C` bounding `H/C <= h <= CH`, and `delta`
/// fixes the admissible range `M^δ <= H <= M^{0.99}`, `H = x/M^{α−1}`.
pub fn main_term_s(
    alpha: f64,
    x: u64,
    m_scale: f64,
    cutoff: &BumpCutoff,
    grid: &IntervalGrid,
    c_range: f64,
    delta: f64,
) -> Result<MainTerm> {
    let big_h = x as f64 / m_scale.powf(alpha - 1.0);
    let (lo, hi) = (m_scale.powf(delta), m_scale.powf(0.99));
    if !(big_h >= lo && big_h <= hi) {
        return Err(LabError::Range(format!("H = {big_h} outside [{lo}, {hi}]")));
    }
    let h_min = (big_h / c_range).ceil().max(1.0) as u64;
    let h_max = (big_h * c_range).floor() as u64;
    let mut s = 0.0;
    if !cutoff.is_zero() {
        for h in h_min..=h_max {
            for r in 0..grid.count {
                let (a, _) = grid.interval(r);
                if let Some(m) = gap_root(alpha, h as f64, x as f64 + a, DEFAULT_GAP_TOL) {
                    let w = cutoff.eval(m / m_scale);
                    if w != 0.0 {
                        s += w * w * grid.length(r) / h as f64 * m.powf(2.0 - alpha);
                    }
                }
            }
        }
    }
    let integral = limiting_integral(alpha, x as f64, m_scale, cutoff);
    Ok(MainTerm { h_min, h_max, s_value: s, integral, predicted_count: s / (alpha * (alpha - 1.0)) })
}

/// Composite Simpson quadrature in `t = ln h` over the support of the integrand.
fn limiting_integral(alpha: f64, x: f64, m_scale: f64, cutoff: &BumpCutoff) -> f64 {
    if cutoff.is_zero() {
        return 0.0;
    }
    let rho = 1.0 / (alpha - 1.0);
    // φ(u) ≠ 0 for u ∈ (lo, hi), u = (x/(αh))^ρ / M
    let h_of_u = |u: f64| x / (alpha * (m_scale * u).powf(alpha - 1.0));
    let (t0, t1) = (h_of_u(cutoff.hi).ln(), h_of_u(cutoff.lo).ln());
    let f = |t: f64| {
        let y = x / (alpha * t.exp());
        let w = cutoff.eval(y.powf(rho) / m_scale);
        w * w * y.powf(rho * (2.0 - alpha))
    };
    let n = 4000;
    let step = (t1 - t0) / n as f64;
    let mut acc = f(t0) + f(t1);
    for i in 1..n {
        let wgt = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += wgt * f(t0 + i as f64 * step);
    }
    acc * step / 3.0
}

/// `Σ_{h,r} φ(m(h, x, a(I_r))/M)² (|𝒥⁺| + |𝒥⁻|)` over a census.
pub fn weighted_census(census: &SolutionCensus, grid: &IntervalGrid, cutoff: &BumpCutoff) -> f64 {
    let x = census.x as f64;
    let mut total = 0.0;
    for c in &census.cells {
        let (a, _) = grid.interval(c.r);
        let m = gap_root(census.alpha, c.h as f64, x + a, DEFAULT_GAP_TOL)
            .or_else(|| gap_root(census.alpha, c.h as f64, x - 1.0 + a, DEFAULT_GAP_TOL))
            .unwrap_or(0.0);
        let w = cutoff.eval(m / census.m_scale);
        total += w * w * (c.plus + c.minus) as f64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_solutions() {
        let seq = PowerSequence::new(1.5, 40).unwrap();
        assert_eq!(count_representations(&seq, 0, (10, 20)).unwrap(), 11);
    }

    #[test]
    fn window_outside_table() {
        let seq = PowerSequence::new(1.5, 40).unwrap();
        assert!(count_representations(&seq, 3, (10, 41)).is_err());
        assert!(count_representations(&seq, 3, (0, 5)).is_err());
    }

    #[test]
    fn zero_cutoff_gives_zero_main_term() {
        let grid = IntervalGrid::new(4096.0, 0.2).unwrap();
        let x = 4096f64.powf(1.2) as u64;
        let mt = main_term_s(1.5, x, 4096.0, &BumpCutoff::zero(), &grid, 8.0, 0.1).unwrap();
        assert_eq!(mt.s_value, 0.0);
        assert_eq!(mt.integral, 0.0);
    }

    #[test]
    fn main_term_range_error() {
        let grid = IntervalGrid::new(4096.0, 0.2).unwrap();
        let r = main_term_s(1.5, 10, 4096.0, &BumpCutoff::default(), &grid, 8.0, 0.1);
        assert!(matches!(r, Err(LabError::Range(_))));
    }
}
