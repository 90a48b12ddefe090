//! Two-block construction with blocks near `M` and near `M^{α−1−δ}`:
//! scale chains, bad sets `A_j`, unique-representation witnesses, the
//! cross and self terms at `p = 1 + 1/ln M`, and a resolvent lower bound.

mod badsets;
mod blocks;
mod lower;
mod reports;
mod schedule;

pub use badsets::{
    bad_sets, default_j_window, default_p_len, in_interval, intervals_containing, witness_set, BadSets, Witness,
    MAX_J_COUNT,
};
pub use blocks::{build_blocks, single_scale_blocks, unit_bump, Atom, TwoBlockTransform};
pub use lower::{resolvent_lower_bound, resolvent_lower_demo, resolvent_lower_sweep, ResolventLowerRecord, ResolventSweep};
pub use reports::{
    blowup_report, cross_term_report, default_p, self_term_report, BlowupReport, BlowupRow, CrossTermReport,
    PairBound, SelfTermReport, DEFAULT_J_CONSTANT,
};
pub use schedule::{build_schedule, dyadic_in, self_term_bytes, BlockSchedule, ScalePolicy};
