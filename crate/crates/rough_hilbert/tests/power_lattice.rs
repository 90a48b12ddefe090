use astro_float::{BigFloat, Consts, RoundingMode};
use proptest::prelude::*;
use rough_hilbert::power_lattice::*;
use std::sync::OnceLock;

fn table_137() -> &'static PowerSequence {
    static T: OnceLock<PowerSequence> = OnceLock::new();
    T.get_or_init(|| PowerSequence::new(1.37, 5000).unwrap())
}

/// `[m^{3/2}] = ⌊√(m³)⌋`, exact in integers.
fn floor_three_halves(m: u64) -> i64 {
    (m as u128).pow(3).isqrt() as i64
}

/// Checks `v <= m^α < v + 1` with 512-bit arithmetic.
fn brackets(m: u64, alpha: f64, v: i64, cc: &mut Consts) -> bool {
    const P: usize = 512;
    let rm = RoundingMode::ToEven;
    let pw = BigFloat::from_word(m, P).pow(&BigFloat::from_f64(alpha, P), P, rm, cc);
    let lo = BigFloat::from_word(v as u64, P);
    let hi = BigFloat::from_word(v as u64 + 1, P);
    matches!(pw.cmp(&lo), Some(c) if c >= 0) && matches!(pw.cmp(&hi), Some(c) if c < 0)
}

#[test]
fn table_matches_integer_square_root() {
    let seq = PowerSequence::new(1.5, 20_000).unwrap();
    for m in 1..=20_000u64 {
        assert_eq!(seq.value(m), floor_three_halves(m), "m = {m}");
    }
}

#[test]
fn certified_floor_brackets_high_precision_power() {
    let mut cc = Consts::new().unwrap();
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for &alpha in &[1.001, 1.37, 1.5 + 1e-9, 1.9] {
        let m_cap: u64 = if alpha > 1.8 { 1 << 30 } else { 1 << 36 };
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let m = 2 + (state >> 11) % m_cap;
            let v = eval_floor_power(m, alpha).unwrap();
            assert!(brackets(m, alpha, v, &mut cc), "alpha = {alpha}, m = {m}, v = {v}");
        }
    }
}

#[test]
fn floor_near_integer_powers() {
    // Perfect squares make m^{3/2} an integer; the floor must not drop below it.
    for r in 1..2000u64 {
        let m = r * r;
        assert_eq!(eval_floor_power(m, 1.5).unwrap(), (r * r * r) as i64);
        assert_eq!(eval_floor_power(m + 1, 1.5).unwrap(), floor_three_halves(m + 1));
        assert_eq!(eval_floor_power(m - 1, 1.5).unwrap_or(0), if m > 1 { floor_three_halves(m - 1) } else { 0 });
    }
}

/// `#{(m₁, m₂) : m₁ ∈ window, 1 <= m₂ < m₁, [m₁^α] − [m₂^α] = x}`.
fn double_loop_count(x: i64, window: (u64, u64)) -> u64 {
    let mut n = 0;
    for m1 in window.0..=window.1 {
        let a = floor_three_halves(m1);
        for m2 in 1..m1 {
            if a - floor_three_halves(m2) == x {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn census_equals_double_loop() {
    let m = 512u64;
    let window = (m / 2, 2 * m);
    let seq = PowerSequence::new(1.5, 2 * m).unwrap();
    let grid = IntervalGrid::new(m as f64, 0.2).unwrap();
    for x in [1u64, 2, 3, 17, 50, 200, 201, 1000, 5000, 11_000] {
        let c = solution_census(&seq, &grid, x, window).unwrap();
        let brute = double_loop_count(x as i64, window);
        assert_eq!(c.count_total, brute, "x = {x}");
        assert_eq!(count_representations(&seq, x as i64, window).unwrap(), brute, "x = {x}");
        let cells: u64 = c.cells.iter().map(|c| c.plus + c.minus).sum();
        assert_eq!(cells, brute);
    }
}

#[test]
fn j_sets_reproduce_census_cells() {
    let m = 256u64;
    let window = (m / 2, 2 * m);
    let seq = PowerSequence::new(1.5, 2 * m).unwrap();
    let grid = IntervalGrid::new(m as f64, 0.3).unwrap();
    for x in [40u64, 97, 300, 640] {
        let c = solution_census(&seq, &grid, x, window).unwrap();
        for cell in &c.cells {
            let j = enumerate_j_sets(&seq, &grid, cell.h, x, cell.r, Some(window)).unwrap();
            assert_eq!(j.plus.len() as u64, cell.plus, "x = {x}, cell {cell:?}");
            assert_eq!(j.minus.len() as u64, cell.minus, "x = {x}, cell {cell:?}");
            for &m2 in j.plus.iter().chain(&j.minus) {
                assert_eq!(floor_three_halves(m2 + cell.h) - floor_three_halves(m2), x as i64);
            }
        }
    }
}

#[test]
fn divisor_count_matches_trial_count() {
    for n in 1..3000u64 {
        let naive = (1..=n).filter(|d| n % d == 0).count() as u64;
        assert_eq!(divisor_count(n as u128).unwrap(), naive, "n = {n}");
    }
    assert_eq!(max_divisor_count(1000), (840, 32));
    assert!(divisor_count(0).is_err());
    assert!(divisor_count(u128::from(u64::MAX) + 1).is_err());
}

#[test]
fn exponential_sum_matches_direct_sum() {
    let grid = IntervalGrid::new(4096.0, 0.2).unwrap();
    let j = (0..grid.count).find_map(|r| j_interval(1.5, &grid, 10, 700, r).filter(|j| !j.is_empty())).unwrap();
    let k = 3;
    let mut direct = num_complex::Complex64::new(0.0, 0.0);
    for m in j.first..=j.last {
        let ph = std::f64::consts::TAU * ((k as f64) * (m as f64).powf(1.5)).rem_euclid(1.0);
        direct += num_complex::Complex64::from_polar(1.0, ph);
    }
    let s = exponential_sum(1.5, &j, k, 1024).unwrap();
    assert!((s - direct).norm() < 1e-8 * j.len() as f64, "{s} vs {direct}");
}

proptest! {
    #[test]
    fn index_of_value_inverts_table(m in 1u64..5000) {
        let seq = table_137();
        prop_assert_eq!(seq.index_of_value(seq.value(m)), Some(m));
        prop_assert_eq!(seq.count_at_most(seq.value(m)), m);
        if m > 1 {
            prop_assert!(seq.value(m) > seq.value(m - 1));
        }
    }

    #[test]
    fn gap_root_solves_equation(h in 1u64..40, x in 100u64..100_000, d in 0.0f64..0.999) {
        let alpha = 1.5;
        if let Some(m) = solve_gap_equation(alpha, h, x, d, DEFAULT_GAP_TOL).unwrap() {
            let g = gap_function(alpha, h as f64, m);
            prop_assert!((g - (x as f64 + d)).abs() <= 1e-6 * (x as f64));
        } else {
            prop_assert!((h as f64).powf(alpha) > x as f64 + d);
        }
    }

    #[test]
    fn gap_function_is_increasing(h in 1.0f64..50.0, m in 1.0f64..1e6, dm in 0.5f64..100.0) {
        prop_assert!(gap_function(1.3, h, m + dm) > gap_function(1.3, h, m));
    }

    #[test]
    fn distance_to_integer_is_bounded(w in -1e6f64..1e6) {
        let d = dist_to_int(w);
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert!((d - (w - w.round()).abs()).abs() < 1e-9);
    }

    #[test]
    fn grid_locates_offsets(d in 0.0f64..1.0) {
        let grid = IntervalGrid::new(1e4, 0.25).unwrap();
        let r = grid.locate(d);
        let (a, b) = grid.interval(r);
        prop_assert!(a <= d && d < b + 1e-15);
    }
}
