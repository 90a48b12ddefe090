use serde::{Deserialize, Serialize};

use super::cutoff::BumpCutoff;
use super::kernel::{Kernel, KernelMeta, Variant};
use crate::error::{LabError, Result};
use crate::power_lattice::PowerSequence;

/// Dyadic scales `s = 2^j` with `M^θ <= s <= M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicSchedule {
    pub m_top: u64,
    pub theta: f64,
    pub scales: Vec<u64>,
}

impl DyadicSchedule {
    pub fn new(m_top: u64, theta: f64) -> Result<Self> {
        if m_top == 0 {
            return Err(LabError::Domain("top scale must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(LabError::Domain(format!("theta = {theta} outside [0, 1]")));
        }
        let lo = (m_top as f64).powf(theta);
        let scales = (0..64)
            .map(|j| 1u64 << j)
            .take_while(|&s| s <= m_top)
            .filter(|&s| s as f64 >= lo * (1.0 - 1e-12))
            .collect();
        Ok(DyadicSchedule { m_top, theta, scales })
    }

    /// Schedule with an explicit scale list.
    pub fn from_scales(m_top: u64, theta: f64, mut scales: Vec<u64>) -> Result<Self> {
        if scales.iter().any(|s| !s.is_power_of_two()) {
            return Err(LabError::Domain("scales must be powers of two".into()));
        }
        scales.sort_unstable();
        scales.dedup();
        Ok(DyadicSchedule { m_top, theta, scales })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

/// Range of `m` that can carry nonzero weight, before clipping to `m >= 1`.
fn m_range(alpha: f64, s: u64, cutoff: &BumpCutoff, variant: Variant) -> (u64, u64) {
    let s = s as f64;
    let (a, b) = match variant {
        Variant::PhiOfMOverS => (s * cutoff.lo, s * cutoff.hi),
        Variant::PhiOfMalphaOverS => {
            let root = |t: f64| if t <= 0.0 { 0.0 } else { t.powf(1.0 / alpha) };
            (root(s * cutoff.lo), root(s * cutoff.hi))
        }
    };
    let first = (a.floor().max(1.0)) as u64;
    let last = b.ceil().max(0.0) as u64;
    (first, last)
}

/// Weight `w(m)`.
fn weight(alpha: f64, m: u64, s: u64, cutoff: &BumpCutoff, variant: Variant) -> f64 {
    let t = match variant {
        Variant::PhiOfMOverS => m as f64 / s as f64,
        Variant::PhiOfMalphaOverS => (m as f64).powf(alpha) / s as f64,
    };
    cutoff.eval(t)
}

/// Positive-half coefficients `(x, w(m)/m)` of a block, with `x = [m^α]`.
fn block_half(seq: &PowerSequence, s: u64, cutoff: &BumpCutoff, variant: Variant) -> Result<Vec<(i64, f64)>> {
    if s == 0 {
        return Err(LabError::Domain("block scale must be >= 1".into()));
    }
    if cutoff.is_zero() {
        return Ok(Vec::new());
    }
    let (first, last) = m_range(seq.alpha, s, cutoff, variant);
    let last = last.max(first);
    if !seq.covers(last) {
        return Err(LabError::WindowOutsideTable { lo: first, hi: last, m_max: seq.m_max });
    }
    let mut out = Vec::new();
    for m in first..=last {
        let w = weight(seq.alpha, m, s, cutoff, variant);
        if w != 0.0 {
            out.push((seq.value(m), w / m as f64));
        }
    }
    Ok(out)
}

fn antisymmetric_from_halves(halves: &[Vec<(i64, f64)>]) -> Kernel {
    let r = halves.iter().flat_map(|h| h.iter().map(|p| p.0)).max().unwrap_or(0);
    if r == 0 {
        return Kernel::zero();
    }
    let mut k = Kernel::zeros(-r, r, KernelMeta::default());
    for half in halves {
        for &(x, v) in half {
            k.add_at(x, v);
        }
    }
    // Mirror after summation so that K(−x) = −K(x) holds bit for bit.
    let vals = k.values_mut();
    let mid = r as usize;
    for i in 1..=mid {
        vals[mid - i] = -vals[mid + i];
    }
    k
}

/// Single-scale block `H_s(x) = Σ_m w(m)/m (δ_{[m^α]} − δ_{−[m^α]})(x)`.
pub fn block_kernel(seq: &PowerSequence, s: u64, cutoff: &BumpCutoff, variant: Variant) -> Result<Kernel> {
    let half = block_half(seq, s, cutoff, variant)?;
    let mut k = antisymmetric_from_halves(std::slice::from_ref(&half));
    k.meta = KernelMeta {
        label: format!("H_{s}"),
        alpha: Some(seq.alpha),
        scales: vec![s],
        cutoff: Some(cutoff.id()),
        variant: Some(variant),
        notes: Vec::new(),
    };
    if half.is_empty() {
        k.meta.notes.push(format!("empty block: no integer m carries weight at s = {s}"));
    }
    Ok(k)
}

fn per_scale<'a>(schedule: &DyadicSchedule, cutoffs: &'a [BumpCutoff]) -> Result<Vec<&'a BumpCutoff>> {
    match cutoffs.len() {
        1 => Ok(vec![&cutoffs[0]; schedule.len()]),
        n if n == schedule.len() => Ok(cutoffs.iter().collect()),
        n => Err(LabError::Config(format!("{n} cutoffs for {} scales", schedule.len()))),
    }
}

/// `H_M = Σ_{s ∈ schedule} H_s`. `cutoffs` holds one cutoff per scale or a
/// single cutoff used at every scale.
pub fn truncated_transform(
    seq: &PowerSequence,
    schedule: &DyadicSchedule,
    cutoffs: &[BumpCutoff],
    variant: Variant,
) -> Result<Kernel> {
    let cs = per_scale(schedule, cutoffs)?;
    let halves = schedule
        .scales
        .iter()
        .zip(&cs)
        .map(|(&s, c)| block_half(seq, s, c, variant))
        .collect::<Result<Vec<_>>>()?;
    let mut k = antisymmetric_from_halves(&halves);
    k.meta = KernelMeta {
        label: format!("H_M(M={})", schedule.m_top),
        alpha: Some(seq.alpha),
        scales: schedule.scales.clone(),
        cutoff: Some(cs.first().map(|c| c.id()).unwrap_or_default()),
        variant: Some(variant),
        notes: Vec::new(),
    };
    Ok(k)
}

/// The individual blocks of `truncated_transform`, in schedule order.
pub fn transform_blocks(
    seq: &PowerSequence,
    schedule: &DyadicSchedule,
    cutoffs: &[BumpCutoff],
    variant: Variant,
) -> Result<Vec<Kernel>> {
    let cs = per_scale(schedule, cutoffs)?;
    schedule.scales.iter().zip(cs).map(|(&s, c)| block_kernel(seq, s, c, variant)).collect()
}

/// Largest `m` any block of the schedule can touch.
pub fn required_m_max(alpha: f64, schedule: &DyadicSchedule, cutoffs: &[BumpCutoff], variant: Variant) -> u64 {
    let n = cutoffs.len();
    schedule
        .scales
        .iter()
        .enumerate()
        .map(|(i, &s)| m_range(alpha, s, &cutoffs[if n == 1 { 0 } else { i }], variant).1)
        .max()
        .unwrap_or(1)
        .max(1)
}
