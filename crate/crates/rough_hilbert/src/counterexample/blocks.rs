use serde::{Deserialize, Serialize};

use super::schedule::{dyadic_in, BlockSchedule, ScalePolicy};
use crate::error::{LabError, Result};
use crate::kernel_factory::{truncated_transform, BumpCutoff, DyadicSchedule, Kernel, Variant};
use crate::power_lattice::PowerSequence;

/// One kick `c·δ_{[m^α]}` on the positive half of a block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub m: u64,
    pub x: i64,
    pub coeff: f64,
}

/// `ℍ₊ = Σ_{s∈U₊} H_s` and `ℍ₋ = Σ_{s∈U₋} H_s` at one scale `M`.
#[derive(Clone, Debug)]
pub struct TwoBlockTransform {
    pub alpha: f64,
    pub delta: f64,
    pub kappa: f64,
    pub m_top: u64,
    pub u_plus: Vec<u64>,
    pub u_minus: Vec<u64>,
    /// True when a window was empty and the snap policy supplied the scale.
    pub snapped: (bool, bool),
    pub h_plus: Kernel,
    pub h_minus: Kernel,
    /// Positive-half atoms sorted by position.
    pub plus_atoms: Vec<Atom>,
    pub minus_atoms: Vec<Atom>,
}

/// The bump on `(1, 2)` used for every active scale.
pub fn unit_bump() -> BumpCutoff {
    BumpCutoff { lo: 1.0, hi: 2.0, amplitude: 1.0 }
}

fn atoms(k: &Kernel, seq: &PowerSequence) -> Result<Vec<Atom>> {
    k.iter()
        .filter(|&(x, v)| x > 0 && v != 0.0)
        .map(|(x, v)| {
            let m = seq
                .index_of_value(x)
                .ok_or_else(|| LabError::Degenerate(format!("block position {x} is not a value [m^alpha]")))?;
            Ok(Atom { m, x, coeff: v })
        })
        .collect()
}

/// Blocks at `M_l`. The table must cover `m <= 2·M_l`.
pub fn build_blocks(
    schedule: &BlockSchedule,
    l: usize,
    seq: &PowerSequence,
    cutoff: &BumpCutoff,
    policy: ScalePolicy,
) -> Result<TwoBlockTransform> {
    let m = schedule.scale(l)?;
    if seq.alpha != schedule.alpha {
        return Err(LabError::Config(format!("table alpha {} differs from schedule alpha {}", seq.alpha, schedule.alpha)));
    }
    let (plo, phi) = schedule.u_plus_window(m);
    let (mlo, mhi) = schedule.u_minus_window(m);
    let (u_plus, snap_p) = dyadic_in(plo, phi, policy);
    let (u_minus, snap_m) = dyadic_in(mlo, mhi, policy);
    if u_plus.is_empty() {
        return Err(LabError::EmptyBlock(format!("U_+ = [{plo:.3}, {phi:.3}] holds no dyadic scale")));
    }
    if u_minus.is_empty() {
        return Err(LabError::EmptyBlock(format!("U_- = [{mlo:.3}, {mhi:.3}] holds no dyadic scale")));
    }
    if u_plus.iter().any(|s| u_minus.contains(s)) {
        return Err(LabError::Infeasible(format!("U_+ and U_- overlap at M = {m}")));
    }
    let build = |scales: &[u64]| -> Result<Kernel> {
        let sched = DyadicSchedule::from_scales(m, schedule.theta, scales.to_vec())?;
        truncated_transform(seq, &sched, std::slice::from_ref(cutoff), Variant::PhiOfMOverS)
    };
    let mut h_plus = build(&u_plus)?;
    let mut h_minus = build(&u_minus)?;
    h_plus.meta.label = format!("H+(M={m})");
    h_minus.meta.label = format!("H-(M={m})");
    if h_minus.nnz() == 0 || h_plus.nnz() == 0 {
        return Err(LabError::EmptyBlock(format!("a block at M = {m} carries no weight")));
    }
    let plus_atoms = atoms(&h_plus, seq)?;
    let minus_atoms = atoms(&h_minus, seq)?;
    Ok(TwoBlockTransform {
        alpha: schedule.alpha,
        delta: schedule.delta,
        kappa: schedule.kappa,
        m_top: m,
        u_plus,
        u_minus,
        snapped: (snap_p, snap_m),
        h_plus,
        h_minus,
        plus_atoms,
        minus_atoms,
    })
}

/// Table, schedule and blocks for a single scale `M` with the unit bump.
pub fn single_scale_blocks(alpha: f64, delta: f64, c_kappa: f64, m: u64) -> Result<TwoBlockTransform> {
    let sched = BlockSchedule::single(alpha, delta, c_kappa, m)?;
    let seq = PowerSequence::new(alpha, 2 * m)?;
    build_blocks(&sched, 0, &seq, &unit_bump(), ScalePolicy::Snap)
}

impl TwoBlockTransform {
    /// `ℍ₊ + ℍ₋`.
    pub fn total(&self) -> Kernel {
        let mut k = self.h_plus.add(&self.h_minus);
        k.meta.label = format!("H(M={})", self.m_top);
        k
    }

    /// All `(m, n, σ₁, σ₂)` with `σ₁[m^α] + σ₂[n^α] = x`, `m` an atom of `ℍ₊`
    /// and `n` an atom of `ℍ₋`. Every `(n, σ₁, σ₂)` is tried and `m` is
    /// located by exact search.
    pub fn representations(&self, x: i64) -> Vec<(u64, u64, i8, i8)> {
        let mut out = Vec::new();
        for b in &self.minus_atoms {
            for s2 in [1i8, -1] {
                let rest = x - s2 as i64 * b.x;
                for s1 in [1i8, -1] {
                    let target = s1 as i64 * rest;
                    if let Ok(i) = self.plus_atoms.binary_search_by_key(&target, |a| a.x) {
                        out.push((self.plus_atoms[i].m, b.m, s1, s2));
                    }
                }
            }
        }
        out
    }
}
