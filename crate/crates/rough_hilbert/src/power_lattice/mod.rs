//! Exact arithmetic on `[m^α]` and the counting machinery for
//! `[m₁^α] − [m₂^α] = x`: gap-equation roots, interval grids, solution sets,
//! exponential sums and divisor counts.

pub mod census;
pub mod certified;
pub mod divisor;
pub mod expsum;
pub mod gap;
pub mod sequence;

pub use census::{
    count_representations, enumerate_j_sets, main_term_s, solution_census, weighted_census, JCell, JSets,
    MainTerm, SolutionCensus,
};
pub use certified::{certify_power, CertifiedPower, DEFAULT_MAX_BITS};
pub use divisor::{divisor_count, max_divisor_count};
pub use expsum::{
    dist_to_int, exponential_sum, j_interval, k_in_regime, no_resonance_check, sample_exponential_sums, ExpSumRow,
    ExpSumSample, ExpSumSampling, JInterval,
};
pub use gap::{gap_function, solve_gap_equation, IntervalGrid, DEFAULT_GAP_TOL};
pub use sequence::{check_alpha, eval_floor_power, in_admissible_regime, PowerSequence};
