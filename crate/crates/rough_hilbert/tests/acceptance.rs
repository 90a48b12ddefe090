//! The nine acceptance criteria at their pinned tolerances. Criteria run
//! one after another inside a single test so that the two heaviest ones
//! never share memory; each prints one PASS/FAIL line.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rough_hilbert::algebra_am::{neumann_resolvent, spectral_bound, ResolventOptions};
use rough_hilbert::cli_reports::{Manifest, MANIFEST_NAME};
use rough_hilbert::convolution_lab::{autocorrelation_decompose, loglog_fit, ConvolutionConfig};
use rough_hilbert::counterexample::blowup_report;
use rough_hilbert::kernel_factory::*;
use rough_hilbert::power_lattice::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Default `H_M`: `θ = 0.6`, weights `φ(m^α/s)`, bump on `(1/2, 2)`.
fn transform(alpha: f64, m: u64) -> Kernel {
    let schedule = DyadicSchedule::new(m, 0.6).unwrap();
    let cut = [BumpCutoff::default()];
    let seq = PowerSequence::new(alpha, required_m_max(alpha, &schedule, &cut, Variant::PhiOfMalphaOverS)).unwrap();
    truncated_transform(&seq, &schedule, &cut, Variant::PhiOfMalphaOverS).unwrap()
}

fn bump(t: f64) -> f64 {
    if t <= 0.5 || t >= 2.0 {
        return 0.0;
    }
    let u = (2.0 * t - 2.5) / 1.5;
    (1.0 - 1.0 / (1.0 - u * u)).exp()
}

fn kernel_exactness() -> Outcome {
    let mut worst_odd = 0.0f64;
    let mut worst_sum = 0.0f64;
    let mut support_mismatch = 0;
    let mut blocks = 0;
    for alpha in [1.001, 1.5] {
        let seq = PowerSequence::new(alpha, 2 * 4096 + 2).unwrap();
        for e in 8..=12 {
            let s = 1u64 << e;
            for variant in [Variant::PhiOfMOverS, Variant::PhiOfMalphaOverS] {
                let k = block_kernel(&seq, s, &BumpCutoff::default(), variant).unwrap();
                blocks += 1;
                worst_odd = worst_odd.max(k.antisymmetry_defect().1 / k.sup_norm());
                worst_sum = worst_sum.max(k.sum().abs() / k.l1_norm());
                let weighted: Vec<u64> = (1..=2 * s)
                    .filter(|&m| {
                        let t = match variant {
                            Variant::PhiOfMOverS => m as f64 / s as f64,
                            Variant::PhiOfMalphaOverS => (m as f64).powf(alpha) / s as f64,
                        };
                        bump(t) > 0.0
                    })
                    .collect();
                let (lo, hi) = (weighted[0], *weighted.last().unwrap());
                let inner = k.nonzeros().iter().filter(|p| p.0 > 0).map(|p| p.0).min().unwrap();
                if k.support_max() != seq.value(hi) || k.support_min() != -seq.value(hi) || inner != seq.value(lo) {
                    support_mismatch += 1;
                }
            }
        }
    }
    outcome(
        worst_odd <= 1e-12 && worst_sum <= 1e-12 && support_mismatch == 0,
        format!("{blocks} blocks, max odd defect {worst_odd:.1e}, max |sum|/l1 {worst_sum:.1e}, support mismatches {support_mismatch}"),
    )
}

fn counting_oracle() -> Outcome {
    let m = 1u64 << 11;
    let window = (m / 2, 2 * m);
    let seq = PowerSequence::new(1.5, 2 * m).unwrap();
    let grid = IntervalGrid::new(m as f64, 0.2).unwrap();
    let table: Vec<i64> = (0..=2 * m).map(common::floor_three_halves).collect();
    let lo = (m as f64).powf(0.7).ceil() as u64;
    let hi = (m as f64).powf(0.99).floor() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut total = 0;
    for _ in 0..50 {
        let x = rng.gen_range(lo..=hi);
        let census = solution_census(&seq, &grid, x, window).unwrap();
        let cells: u64 = census.cells.iter().map(|c| c.plus + c.minus).sum();
        let mut brute = 0u64;
        for m1 in window.0..=window.1 {
            let a = table[m1 as usize];
            for m2 in 1..m1 {
                if a - table[m2 as usize] == x as i64 {
                    brute += 1;
                }
            }
        }
        if census.count_total != brute || cells != brute {
            mismatches += 1;
        }
        total += brute;
    }
    outcome(mismatches == 0, format!("50 targets in [{lo}, {hi}], {total} solutions, {mismatches} mismatches"))
}

fn main_term_scaling() -> Outcome {
    let mut pts = Vec::new();
    for e in 9..=13u32 {
        let m = 1u64 << e;
        let seq = PowerSequence::new(1.5, 2 * m).unwrap();
        let grid = IntervalGrid::new(m as f64, 0.2).unwrap();
        let x0 = (2.0 * (m as f64).powf(0.7)).round() as u64;
        let total: u64 =
            (x0..x0 + 64).map(|x| solution_census(&seq, &grid, x, (m / 2, 2 * m)).unwrap().count_total).sum();
        pts.push((m as f64, total as f64 / 64.0));
    }
    let (slope, err, _) = loglog_fit(&pts);
    outcome((slope - 0.5).abs() <= 0.15, format!("exponent {slope:.4} ± {err:.4}, target 0.5 ± 0.15"))
}

fn decomposition_scaling() -> Outcome {
    let mut scaled = Vec::new();
    let mut exact = true;
    for e in 10..=13 {
        let s = 1u64 << e;
        let sched = DyadicSchedule::from_scales(s, 0.0, vec![s]).unwrap();
        let cut = BumpCutoff::default();
        let seq = PowerSequence::new(1.5, required_m_max(1.5, &sched, &[cut], Variant::PhiOfMOverS)).unwrap();
        let h = block_kernel(&seq, s, &cut, Variant::PhiOfMOverS).unwrap();
        let d = autocorrelation_decompose(&h, 0.2).unwrap();
        exact &= d.exact;
        scaled.push(d.sup_g_scaled);
    }
    let ratio = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        ratio <= 2.0 && exact,
        format!("sup|G|·s^α = {scaled:.4?}, variation {ratio:.3}, reconstruction exact {exact}"),
    )
}

fn exponential_sums() -> Outcome {
    let s = sample_exponential_sums(&ExpSumSampling {
        alpha: 1.5,
        m_scale: (1u64 << 30) as f64,
        delta0: 0.2,
        h_range: (8, 16),
        count: 200,
        seed: 7,
        max_bits: 1024,
    })
    .unwrap();
    let decay = ((1u64 << 30) as f64).powf(-0.1);
    let mut fails = 0;
    for r in &s.rows {
        let bound = 4.0 * r.len as f64 * decay;
        if (r.bound - bound).abs() > 1e-12 * bound || r.abs_sum > bound || r.k == 0 || r.len == 0 {
            fails += 1;
        }
    }
    outcome(
        s.rows.len() == 200 && fails == 0,
        format!("{} tuples, {fails} failures, max |S|/bound {:.3}, {} rejected draws", s.rows.len(), s.max_ratio, s.rejected),
    )
}

fn resolvent_correctness() -> Outcome {
    let h = transform(1.5, 1 << 10);
    let n = spectral_bound(&h).unwrap().n;
    let lambda = Complex64::new(1.0, 2.0 * n);
    let rep = neumann_resolvent(lambda, &h, &ResolventOptions::default()).unwrap();
    let (r, res) = common::cgnr_resolvent(&h, lambda, rep.torus, 1e-13, 1000);
    let mut diff = 0.0;
    for x in -(1i64 << 12)..=(1 << 12) {
        diff += (rep.kernel.get(x) - common::torus_at(&r, x)).norm_sqr();
    }
    let diff = diff.sqrt();
    outcome(
        rep.identity_residual <= 1e-6 && diff <= 1e-6,
        format!(
            "N = {n:.4}, identity residual {:.2e}, oracle l2 difference {diff:.2e} on [-2^12, 2^12] (torus {}, oracle residual {res:.1e})",
            rep.identity_residual, rep.torus
        ),
    )
}

fn uniformity_proxy() -> Outcome {
    let mut proxies = Vec::new();
    for e in [8, 10, 12] {
        let h = transform(1.5, 1 << e);
        let n = spectral_bound(&h).unwrap().n;
        let rep = neumann_resolvent(Complex64::new(1.0, 2.0 * n), &h, &ResolventOptions::default()).unwrap();
        proxies.push(rep.uniformity_proxy());
    }
    let ratio = proxies.iter().cloned().fold(0.0, f64::max) / proxies.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(ratio <= 3.0, format!("proxy {proxies:.4?}, variation {ratio:.3}"))
}

fn counterexample_mechanism() -> Outcome {
    let ms = [1u64 << 12, 1 << 13, 1 << 14];
    let r = blowup_report(1.5, 0.15, 0.1, &ms, &ConvolutionConfig::default()).unwrap();
    let kappa_ok = (r.kappa - 0.015).abs() < 1e-15;
    let p_ok = r.rows.iter().all(|row| (row.p - (1.0 + 1.0 / (row.m_top as f64).ln())).abs() < 1e-15);
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|row| {
            format!(
                "M={} cross {:.4} vs κ²·self {:.3e}, {} witnesses, {} non-unique, {} nonvanishing",
                row.m_top,
                row.cross_lp,
                r.kappa * r.kappa * row.self_lp,
                row.witness_count,
                row.uniqueness_failures,
                row.minus_nonvanishing
            )
        })
        .collect();
    outcome(r.all_pass() && kappa_ok && p_ok && r.rows.len() == 3, rows.join("; "))
}

fn full_report(out: &Path) -> Manifest {
    let st = Command::new(env!("CARGO_BIN_EXE_rough-hilbert"))
        .args(["full-report", "--seed", "12345", "--out"])
        .arg(out)
        .status()
        .unwrap();
    assert!(st.success());
    serde_json::from_str(&std::fs::read_to_string(out.join(MANIFEST_NAME)).unwrap()).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let a = full_report(&dir.path().join("a"));
    let first = t.elapsed();
    let b = full_report(&dir.path().join("b"));
    let mut differing = 0;
    for (ea, eb) in a.outputs.iter().zip(&b.outputs) {
        let same_bytes = std::fs::read(dir.path().join("a").join(&ea.path)).unwrap()
            == std::fs::read(dir.path().join("b").join(&eb.path)).unwrap();
        if ea.path != eb.path || ea.sha256 != eb.sha256 || !same_bytes {
            differing += 1;
        }
    }
    let same_list = a.outputs.len() == b.outputs.len();
    outcome(
        same_list && differing == 0 && first < Duration::from_secs(30 * 60),
        format!("{} artifacts, {differing} differ, first run {:.1} s", a.outputs.len(), first.as_secs_f64()),
    )
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 9] = [
        ("1 kernel exactness", kernel_exactness, Duration::from_secs(10)),
        ("2 counting oracle equivalence", counting_oracle, Duration::from_secs(120)),
        ("3 main-term scaling", main_term_scaling, Duration::from_secs(300)),
        ("4 decomposition scaling", decomposition_scaling, Duration::from_secs(180)),
        ("5 exponential-sum bound", exponential_sums, Duration::from_secs(120)),
        ("6 resolvent correctness", resolvent_correctness, Duration::from_secs(120)),
        ("7 uniformity proxy", uniformity_proxy, Duration::from_secs(300)),
        ("8 counterexample mechanism", counterexample_mechanism, Duration::from_secs(600)),
        ("9 determinism", determinism, Duration::from_secs(2 * 30 * 60)),
    ];
    let mut failed = Vec::new();
    for (name, f, limit) in criteria {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f));
        let dt = t.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass && dt <= limit, o.detail),
            Err(e) => (false, format!("panicked: {:?}", e.downcast_ref::<String>().cloned().unwrap_or_default())),
        };
        println!("{} criterion {name}: {detail} [{:.1} s, limit {} s]", if pass { "PASS" } else { "FAIL" }, dt.as_secs_f64(), limit.as_secs());
        if !pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
