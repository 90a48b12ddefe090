use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use rough_hilbert::convolution_lab::*;
use rough_hilbert::kernel_factory::*;
use rough_hilbert::power_lattice::PowerSequence;

fn naive_convolve(a: &Kernel, b: &Kernel) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    for (x, u) in a.nonzeros() {
        for (y, v) in b.nonzeros() {
            *out.entry(x + y).or_insert(0.0) += u * v;
        }
    }
    out
}

fn single_block(s: u64, alpha: f64) -> Kernel {
    let sched = DyadicSchedule::from_scales(s, 0.0, vec![s]).unwrap();
    let cut = BumpCutoff::default();
    let seq = PowerSequence::new(alpha, required_m_max(alpha, &sched, &[cut], Variant::PhiOfMOverS)).unwrap();
    block_kernel(&seq, s, &cut, Variant::PhiOfMOverS).unwrap()
}

fn sparse_kernel() -> impl Strategy<Value = Kernel> {
    prop::collection::vec((-300i64..300, -1.0f64..1.0), 1..40).prop_map(|pairs| Kernel::from_pairs(&pairs))
}

proptest! {
    #[test]
    fn both_paths_match_naive(a in sparse_kernel(), b in sparse_kernel()) {
        let want = naive_convolve(&a, &b);
        let scale = a.l1_norm() * b.l1_norm();
        for mode in [ConvolutionMode::Direct, ConvolutionMode::Fft, ConvolutionMode::Auto] {
            let cfg = ConvolutionConfig { mode, ..Default::default() };
            let got = convolve_with(&a, &b, &cfg).unwrap();
            for (&x, &v) in &want {
                prop_assert!((got.get(x) - v).abs() <= 1e-12 * scale);
            }
            let extra: f64 = got.iter().filter(|(x, _)| !want.contains_key(x)).map(|(_, v)| v.abs()).sum();
            prop_assert!(extra <= 1e-12 * scale);
        }
    }

    #[test]
    fn convolution_commutes(a in sparse_kernel(), b in sparse_kernel()) {
        let ab = convolve(&a, &b).unwrap();
        let ba = convolve(&b, &a).unwrap();
        prop_assert!(ab.sub(&ba).sup_norm() <= 1e-12 * a.l1_norm() * b.l1_norm());
    }

    #[test]
    fn symbol_matches_direct_sum(a in sparse_kernel(), xi in 0.0f64..1.0) {
        let mut z = Complex64::new(0.0, 0.0);
        for (x, v) in a.nonzeros() {
            z += v * Complex64::from_polar(1.0, -std::f64::consts::TAU * x as f64 * xi);
        }
        prop_assert!((symbol_at(&a, xi) - z).norm() <= 1e-11 * a.l1_norm());
    }

    #[test]
    fn lp_norm_matches_definition(a in sparse_kernel(), p in 1.0f64..6.0) {
        let want: f64 = a.values().iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        prop_assert!((lp_norm(&a, p).unwrap() - want).abs() <= 1e-12 * want.max(1e-300));
        prop_assert!(lp_norm(&a, 1.0).unwrap() >= lp_norm(&a, p).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn shifted_difference_matches_definition(a in sparse_kernel(), h in -50i64..50) {
        let mut want = 0.0;
        for x in -500..=500 {
            let d = a.get(x + h) - a.get(x);
            want += d * d;
        }
        prop_assert!((shifted_l2_sq(&a, h) - want).abs() <= 1e-12 * want.max(1e-300));
    }
}

#[test]
fn spectral_bound_brackets_dense_samples() {
    let seq = PowerSequence::new(1.5, 600).unwrap();
    let k = block_kernel(&seq, 256, &BumpCutoff::default(), Variant::PhiOfMOverS).unwrap();
    let b = spectral_bound(&k).unwrap();
    let n = 20_000;
    let mut best = 0.0f64;
    for i in 0..n {
        let xi = i as f64 / n as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (x, v) in k.nonzeros() {
            z += v * Complex64::from_polar(1.0, -std::f64::consts::TAU * x as f64 * xi);
        }
        assert!(z.re.abs() <= 1e-12 * k.l1_norm(), "odd real kernel has imaginary symbol");
        best = best.max(z.norm());
    }
    assert!(b.n >= best * (1.0 - 1e-9), "{} < {best}", b.n);
    assert!(b.n_upper >= b.n);
    assert!(b.n <= k.l1_norm());
    assert!(spectral_bound(&Kernel::from_pairs(&[(1, 1.0), (-1, 0.5)])).is_err());
}

#[test]
fn decomposition_reconstructs_autocorrelation() {
    for s in [256u64, 1024] {
        let h = single_block(s, 1.5);
        let d = autocorrelation_decompose(&h, 0.2).unwrap();
        assert!(d.exact);
        let direct = naive_convolve(&h, &h);
        let scale = h.l2_norm_sq();
        for (&x, &v) in &direct {
            let dirac = if x == 0 { d.dirac_coefficient } else { 0.0 };
            let rebuilt = d.g.get(x) + d.e.get(x) + dirac;
            assert!((rebuilt + v).abs() <= 1e-12 * scale, "s = {s}, x = {x}");
        }
        assert!((d.dirac_coefficient - scale).abs() <= 1e-12 * scale);
        for x in -d.cut..=d.cut {
            assert_eq!(d.g.get(x), d.g.get(d.cut));
        }
        assert!(d.e.radius() as i64 <= d.cut);
    }
}

#[test]
fn decomposition_refuses_multi_block_kernels() {
    let a = single_block(64, 1.5);
    let b = single_block(128, 1.5);
    let mut sum = a.add(&b);
    sum.meta.scales = vec![64, 128];
    assert!(autocorrelation_decompose(&sum, 0.2).is_err());
}

#[test]
fn budget_is_enforced() {
    let a = single_block(512, 1.5);
    let cfg = ConvolutionConfig { mode: ConvolutionMode::Fft, budget_bytes: 1024, ..Default::default() };
    assert!(matches!(convolve_with(&a, &a, &cfg), Err(rough_hilbert::LabError::Budget { .. })));
}

#[test]
fn regularity_fit_recovers_power_law() {
    let pts: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, 3.0 * (i as f64).powf(0.7))).collect();
    let (slope, err, _) = loglog_fit(&pts);
    assert!((slope - 0.7).abs() < 1e-12);
    assert!(err < 1e-10);
}

#[test]
fn lemma_audit_rows_are_consistent() {
    let s = 1024u64;
    let seq = PowerSequence::new(1.5, 2 * s + 2).unwrap();
    let req = AuditRequest {
        which: AuditTarget::MollifiedBlock,
        s,
        s1: Some(64),
        l: None,
        delta: 0.15,
        gamma: 0.05,
        shifts: vec![1, 4],
    };
    let rows = lemma_audit(&seq, &req, &BumpCutoff::default(), &ConvolutionConfig::default()).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.lhs > 0.0);
        assert!((r.measured_constant - r.lhs / r.predicted_rate).abs() <= 1e-12 * r.measured_constant);
    }
    let bad = AuditRequest { s1: Some(2), ..req };
    assert!(lemma_audit(&seq, &bad, &BumpCutoff::default(), &ConvolutionConfig::default()).is_err());
}

#[test]
fn fft_handles_unbalanced_and_zero_inputs() {
    let cfg = ConvolutionConfig { mode: ConvolutionMode::Fft, ..Default::default() };
    let a = Kernel::from_pairs(&[(-196, -0.86), (3, 0.5), (40, 0.25)]);
    let zero = Kernel::from_pairs(&[(0, 0.0), (7, 0.0)]);
    let got = convolve_with(&a, &zero, &cfg).unwrap();
    assert!(got.iter().all(|(_, v)| v == 0.0));
    let tiny = Kernel::from_pairs(&[(5, 1e-150), (-9, -3e-151)]);
    let got = convolve_with(&a, &tiny, &cfg).unwrap();
    for (x, v) in naive_convolve(&a, &tiny) {
        assert!((got.get(x) - v).abs() <= 1e-12 * a.l1_norm() * tiny.l1_norm());
    }
}
