use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::artifacts::{fmt_f, ArtifactWriter, Manifest};
use super::config::ExperimentConfig;
use crate::algebra_am::{
    canonical_decompose, default_gamma0, fit_epsilon, neumann_resolvent, op_norm, power_decay_audit,
    spectral_bound, submultiplicativity_audit, ResolventOptions,
};
use crate::convolution_lab::{
    autocorrelation_decompose_with, default_shifts, lemma_audit, loglog_fit, regularity_profile, AuditRequest,
    AuditTarget,
};
use crate::counterexample::{blowup_report, build_schedule, resolvent_lower_sweep, single_scale_blocks};
use crate::error::{LabError, Result};
use crate::kernel_factory::{
    block_kernel, required_m_max, transform_blocks, truncated_transform, DyadicSchedule, Kernel, Variant,
};
use crate::power_lattice::{
    main_term_s, sample_exponential_sums, solution_census, weighted_census, ExpSumSampling, IntervalGrid,
    PowerSequence,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    BuildKernel,
    Autocorrelate,
    VerifyRegularity,
    Count,
    ExpSums,
    AlgebraAudit,
    Resolvent,
    Counterexample,
    FullReport,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::BuildKernel,
        Command::Autocorrelate,
        Command::VerifyRegularity,
        Command::Count,
        Command::ExpSums,
        Command::AlgebraAudit,
        Command::Resolvent,
        Command::Counterexample,
        Command::FullReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::BuildKernel => "build-kernel",
            Command::Autocorrelate => "autocorrelate",
            Command::VerifyRegularity => "verify-regularity",
            Command::Count => "count",
            Command::ExpSums => "exp-sums",
            Command::AlgebraAudit => "algebra-audit",
            Command::Resolvent => "resolvent",
            Command::Counterexample => "counterexample",
            Command::FullReport => "full-report",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown subcommand {s:?}")))
    }
}

/// Runs one subcommand, writing its artifacts and `manifest.json` under `cfg.out`.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Manifest> {
    cfg.validate()?;
    let start = Instant::now();
    let mut w = ArtifactWriter::new(&cfg.out)?;
    // A stale error record from an earlier failed run would contradict the manifest.
    let _ = std::fs::remove_file(cfg.out.join("error.json"));
    if cmd == Command::FullReport {
        for c in &Command::ALL[..8] {
            w.set_subdir(c.name())?;
            stage(*c, cfg, &mut w)?;
        }
    } else {
        stage(cmd, cfg, &mut w)?;
    }
    w.finish(cmd.name(), cfg, start.elapsed().as_secs_f64())
}

fn stage(cmd: Command, cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    match cmd {
        Command::BuildKernel => build_kernel(cfg, w),
        Command::Autocorrelate => autocorrelate(cfg, w),
        Command::VerifyRegularity => verify_regularity(cfg, w),
        Command::Count => count(cfg, w),
        Command::ExpSums => exp_sums(cfg, w),
        Command::AlgebraAudit => algebra_audit(cfg, w),
        Command::Resolvent => resolvent(cfg, w),
        Command::Counterexample => counterexample(cfg, w),
        Command::FullReport => Err(LabError::Config("full-report cannot be nested".into())),
    }
}

/// Table and `H_M` for scale `m` with the configured variant and cutoff.
fn transform(cfg: &ExperimentConfig, m: u64) -> Result<(PowerSequence, DyadicSchedule, Kernel)> {
    let cutoff = cfg.cutoff()?;
    let schedule = DyadicSchedule::new(m, cfg.theta)?;
    let need = required_m_max(cfg.alpha, &schedule, &[cutoff], cfg.variant);
    let seq = PowerSequence::with_max_bits(cfg.alpha, need, cfg.precision_max_bits)?;
    let k = truncated_transform(&seq, &schedule, &[cutoff], cfg.variant)?;
    Ok((seq, schedule, k))
}

#[derive(Serialize)]
struct KernelSummary {
    alpha: f64,
    m: u64,
    theta: f64,
    variant: Variant,
    scales: Vec<u64>,
    support_min: i64,
    support_max: i64,
    nnz: usize,
    sum: f64,
    l1_norm: f64,
    l2_norm: f64,
    antisymmetry_defect: f64,
    precision_bits: u32,
}

fn build_kernel(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let (seq, schedule, k) = transform(cfg, cfg.m)?;
    w.kernel("kernel.csv", &k)?;
    let blocks = transform_blocks(&seq, &schedule, &[cfg.cutoff()?], cfg.variant)?;
    let rows: Vec<Vec<String>> = blocks
        .iter()
        .zip(&schedule.scales)
        .map(|(b, s)| {
            vec![s.to_string(), b.nnz().to_string(), b.radius().to_string(), fmt_f(b.l1_norm()), fmt_f(b.sum())]
        })
        .collect();
    w.csv("blocks.csv", &["s", "nnz", "radius", "l1_norm", "sum"], &rows)?;
    w.json(
        "kernel_summary.json",
        &KernelSummary {
            alpha: cfg.alpha,
            m: cfg.m,
            theta: cfg.theta,
            variant: cfg.variant,
            scales: schedule.scales.clone(),
            support_min: k.support_min(),
            support_max: k.support_max(),
            nnz: k.nnz(),
            sum: k.sum(),
            l1_norm: k.l1_norm(),
            l2_norm: k.l2_norm(),
            antisymmetry_defect: k.antisymmetry_defect().1,
            precision_bits: seq.precision_bits,
        },
    )
}

/// Single block `H_s` with weights `φ(m/s)`.
fn single_block(cfg: &ExperimentConfig, s: u64) -> Result<Kernel> {
    let cutoff = cfg.cutoff()?;
    let sched = DyadicSchedule::from_scales(s, 0.0, vec![s])?;
    let need = required_m_max(cfg.alpha, &sched, &[cutoff], Variant::PhiOfMOverS);
    let seq = PowerSequence::with_max_bits(cfg.alpha, need, cfg.precision_max_bits)?;
    block_kernel(&seq, s, &cutoff, Variant::PhiOfMOverS)
}

fn autocorrelate(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    for &s in &cfg.s_grid {
        let h = single_block(cfg, s)?;
        let d = autocorrelation_decompose_with(&h, cfg.delta_l, &cfg.conv())?;
        rows.push(vec![
            s.to_string(),
            d.cut.to_string(),
            fmt_f(d.dirac_coefficient),
            fmt_f(d.dirac_coefficient * s as f64),
            fmt_f(d.sup_g),
            fmt_f(d.sup_e),
            fmt_f(d.sup_g_scaled),
            fmt_f(d.sup_e_scaled),
            fmt_f(d.quantum),
            d.exact.to_string(),
        ]);
        scaled.push(d.sup_g_scaled);
        if cfg.write_kernels {
            w.kernel(&format!("g_{s}.csv"), &d.g)?;
            w.kernel(&format!("e_{s}.csv"), &d.e)?;
        }
    }
    w.csv(
        "decomposition.csv",
        &["s", "cut", "dirac", "dirac_times_s", "sup_g", "sup_e", "sup_g_scaled", "sup_e_scaled", "quantum", "exact"],
        &rows,
    )?;
    let mx = scaled.iter().cloned().fold(0.0, f64::max);
    let mn = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    w.json("decomposition_summary.json", &serde_json::json!({ "sup_g_scaled_variation": mx / mn }))
}

fn verify_regularity(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &s in &cfg.s_grid {
        let h = single_block(cfg, s)?;
        let d = autocorrelation_decompose_with(&h, cfg.delta_l, &cfg.conv())?;
        let prof = regularity_profile(&d.g, s, cfg.alpha, &default_shifts());
        for &(u, v) in &prof.rows {
            rows.push(vec![s.to_string(), u.to_string(), fmt_f(v)]);
        }
        fits.push(vec![s.to_string(), fmt_f(prof.slope), fmt_f(prof.slope_stderr)]);
    }
    w.csv("regularity.csv", &["s", "shift", "scaled_difference"], &rows)?;
    w.csv("regularity_fit.csv", &["s", "slope", "stderr"], &fits)?;

    let cutoff = cfg.cutoff()?;
    let gamma = default_gamma0(cfg.delta, cfg.alpha);
    let mut audit = Vec::new();
    for &s in &cfg.s_grid {
        let sf = s as f64;
        let need = (2 * s).max(sf.powf(1.0 / cfg.alpha).ceil() as u64 * 2 + 2);
        let seq = PowerSequence::with_max_bits(cfg.alpha, need, cfg.precision_max_bits)?;
        let dyadic_at_least = |t: f64| (t.max(1.0)).log2().ceil().exp2() as u64;
        let dyadic_at_most = |t: f64| (t.max(1.0)).log2().floor().exp2() as u64;
        let s1_a = dyadic_at_least(sf.powf((cfg.alpha - 1.0 + cfg.delta) / cfg.alpha));
        let s1_b = dyadic_at_least(sf.powf(cfg.alpha - 1.0 + cfg.delta));
        let l = dyadic_at_most(sf.powf(1.0 - 1.0 / cfg.alpha + cfg.delta / cfg.alpha));
        let shifts = vec![1, 2, 4, 8];
        for (which, s1, l) in [
            (AuditTarget::MollifiedBlock, Some(s1_a), None),
            (AuditTarget::MollifiedBlockLower, Some(s1_a), None),
            (AuditTarget::BandPair, Some(s1_b), Some(l)),
            (AuditTarget::BlockLower, None, None),
        ] {
            let req = AuditRequest { which, s, s1, l, delta: cfg.delta, gamma, shifts: shifts.clone() };
            for r in lemma_audit(&seq, &req, &cutoff, &cfg.conv())? {
                audit.push(vec![
                    format!("{which:?}"),
                    r.parameter,
                    fmt_f(r.lhs),
                    fmt_f(r.predicted_rate),
                    fmt_f(r.measured_constant),
                ]);
            }
        }
    }
    w.csv("lemma_audit.csv", &["lemma", "parameter", "lhs", "predicted_rate", "measured_constant"], &audit)
}

/// Census targets: the configured range, or 20 values from `2·M^{α−1+δ_count}`.
pub fn census_range(cfg: &ExperimentConfig) -> (u64, u64) {
    cfg.x_range.unwrap_or_else(|| {
        let x0 = (2.0 * (cfg.m as f64).powf(cfg.alpha - 1.0 + cfg.delta_count)).round() as u64;
        (x0, x0 + 19)
    })
}

fn count(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let m = cfg.m;
    let (x_lo, x_hi) = census_range(cfg);
    let window = (m / 2, 2 * m);
    let seq = PowerSequence::with_max_bits(cfg.alpha, 2 * m, cfg.precision_max_bits)?;
    let grid = IntervalGrid::new(m as f64, cfg.delta0)?;
    let cutoff = cfg.cutoff()?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for x in x_lo..=x_hi {
        let mut c = solution_census(&seq, &grid, x, window)?;
        match main_term_s(cfg.alpha, x, m as f64, &cutoff, &grid, cfg.c_range, cfg.delta_count) {
            Ok(mt) => {
                c.main_term = Some(mt.predicted_count);
                c.residual = Some(weighted_census(&c, &grid, &cutoff) - mt.predicted_count);
            }
            Err(LabError::Range(_)) => {}
            Err(e) => return Err(e),
        }
        let opt = |v: Option<f64>| v.map(fmt_f).unwrap_or_default();
        rows.push(vec![x.to_string(), c.count_total.to_string(), opt(c.main_term), opt(c.residual)]);
        cells.push(c);
    }
    w.csv("census.csv", &["x", "count_total", "main_term", "residual"], &rows)?;
    w.json("census_cells.json", &cells)
}

fn exp_sums(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let sample = sample_exponential_sums(&ExpSumSampling {
        alpha: cfg.alpha,
        m_scale: cfg.expsum_m,
        delta0: cfg.delta0,
        h_range: cfg.expsum_h,
        count: cfg.samples,
        seed: cfg.seed,
        max_bits: cfg.precision_max_bits,
    })?;
    let rows: Vec<Vec<String>> = sample
        .rows
        .iter()
        .map(|r| {
            vec![
                r.h.to_string(),
                r.x.to_string(),
                r.r.to_string(),
                r.k.to_string(),
                r.len.to_string(),
                fmt_f(r.abs_sum),
                fmt_f(r.bound),
                r.passes().to_string(),
            ]
        })
        .collect();
    w.csv("exp_sums.csv", &["h", "x", "r", "k", "len", "abs_sum", "bound", "passes"], &rows)?;
    w.json(
        "exp_sums_summary.json",
        &serde_json::json!({
            "samples": sample.rows.len(),
            "rejected": sample.rejected,
            "failures": sample.rows.iter().filter(|r| !r.passes()).count(),
            "max_ratio": sample.max_ratio,
        }),
    )
}

fn algebra_audit(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let gamma0 = default_gamma0(cfg.delta, cfg.alpha);
    let conv = cfg.conv();
    let mut blocks = Vec::new();
    let mut records = Vec::new();
    let mut powers = Vec::new();
    for &m in &cfg.m_grid {
        let (_, schedule, h) = transform(cfg, m)?;
        let (rep, _) = canonical_decompose(
            &h.to_complex(),
            &h,
            &schedule,
            Some(Complex64::new(0.0, 0.0)),
            Some(Complex64::new(1.0, 0.0)),
            None,
            gamma0,
        );
        for b in rep.block_reports()? {
            blocks.push(vec![m.to_string(), b.s.to_string(), fmt_f(b.mean.norm()), fmt_f(b.d_size), fmt_f(b.d_s)]);
        }
        let rec = submultiplicativity_audit(&rep, &rep, &conv)?;
        records.push(rec);
        // Scale so that the operator norm is one half, then follow T^n.
        let op = op_norm(&rep.kernel())?;
        let scaled = rep.scaled(Complex64::new(0.5 / op, 0.0));
        let decay = power_decay_audit(&scaled, cfg.power_n_max, &conv)?;
        for r in &decay.rows {
            powers.push(vec![m.to_string(), r.n.to_string(), fmt_f(r.am_upper), fmt_f(r.op_norm), fmt_f(r.l2_norm)]);
        }
    }
    w.csv("blocks.csv", &["m", "s", "mean_abs", "d_size", "d_s"], &blocks)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.m_top.to_string(),
                fmt_f(r.am1),
                fmt_f(r.op1),
                fmt_f(r.am_product),
                fmt_f(r.mixed),
                fmt_f(r.c_mixed),
                fmt_f(r.c_product),
                fmt_f(r.epsilon),
            ]
        })
        .collect();
    w.csv("submultiplicativity.csv", &["m", "am", "op", "am_product", "mixed", "c_mixed", "c_product", "epsilon"], &rows)?;
    w.csv("power_decay.csv", &["m", "n", "am_upper", "op_norm", "l2_norm"], &powers)?;
    let (rate, stderr) = fit_epsilon(&records);
    w.json("algebra_summary.json", &serde_json::json!({ "epsilon_rate": rate, "epsilon_rate_stderr": stderr, "gamma0": gamma0 }))
}

/// `λ` from the configuration, or `1 + 2iN`.
pub fn resolvent_lambda(cfg: &ExperimentConfig, n: f64) -> Complex64 {
    match (cfg.lambda_re, cfg.lambda_im) {
        (None, None) => Complex64::new(1.0, 2.0 * n),
        (re, im) => Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
    }
}

fn resolvent(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut proxies = Vec::new();
    for (i, &m) in cfg.m_grid.iter().enumerate() {
        let (_, _, h) = transform(cfg, m)?;
        let n = spectral_bound(&h)?;
        let lambda = resolvent_lambda(cfg, n.n);
        let opts = ResolventOptions {
            terms: cfg.terms,
            window: cfg.window.map(|w| (-(w as i64), w as i64)),
            cz_y_max: cfg.cz_y_max,
            conv: cfg.conv(),
        };
        let rep = neumann_resolvent(lambda, &h, &opts)?;
        if rep.identity_residual > cfg.tolerance {
            return Err(LabError::ResidualCheck { x: 0, diff: rep.identity_residual, allowed: cfg.tolerance });
        }
        let s = rep.summary();
        let proxy = rep.uniformity_proxy();
        rows.push(vec![
            m.to_string(),
            fmt_f(n.n),
            fmt_f(s.lambda_re),
            fmt_f(s.lambda_im),
            fmt_f(s.lambda_i_re),
            fmt_f(s.lambda_i_im),
            fmt_f(s.beta_i_re),
            fmt_f(s.beta_i_im),
            fmt_f(s.cz_norm),
            fmt_f(s.identity_residual),
            fmt_f(s.term_ratio),
            fmt_f(proxy),
        ]);
        if i == 0 && cfg.write_kernels {
            w.kernel(&format!("resolvent_{m}.csv"), &rep.kernel)?;
        }
        proxies.push(proxy);
        summaries.push(s);
    }
    w.csv(
        "resolvent.csv",
        &[
            "m",
            "spectral_n",
            "lambda_re",
            "lambda_im",
            "lambda_i_re",
            "lambda_i_im",
            "beta_i_re",
            "beta_i_im",
            "cz_norm",
            "identity_residual",
            "term_ratio",
            "uniformity_proxy",
        ],
        &rows,
    )?;
    let mx = proxies.iter().cloned().fold(0.0, f64::max);
    let mn = proxies.iter().cloned().fold(f64::INFINITY, f64::min);
    w.json("resolvent_summary.json", &serde_json::json!({ "reports": summaries, "proxy_variation": mx / mn }))
}

fn counterexample(cfg: &ExperimentConfig, w: &mut ArtifactWriter) -> Result<()> {
    let conv = cfg.conv();
    let report = blowup_report(cfg.alpha, cfg.delta, cfg.c_kappa, &cfg.counterexample_m, &conv)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.m_top.to_string(),
                fmt_f(r.p),
                fmt_f(r.cross_lp),
                fmt_f(r.self_lp),
                fmt_f(r.witness_bound),
                fmt_f(r.log_m_sq_ratio),
            ]
        })
        .collect();
    w.csv("blowup.csv", &["M", "p", "cross_lp", "self_lp", "witness_bound", "log_M_sq_ratio"], &rows)?;
    w.json("blowup.json", &report)?;
    let m1 = cfg.counterexample_m[0];
    w.json("schedule.json", &build_schedule(cfg.alpha, cfg.delta, cfg.c_kappa, 2, m1, cfg.budget_bytes())?)?;
    let tb = single_scale_blocks(cfg.alpha, cfg.delta, cfg.c_kappa, m1)?;
    let h = tb.total();
    let lambda = match (cfg.lambda_re, cfg.lambda_im) {
        (None, None) => Complex64::new(2.0 * h.l1_norm(), 0.0),
        (re, im) => Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
    };
    let p0 = 1.0 + 1.0 / (m1 as f64).ln();
    let sweep = resolvent_lower_sweep(&h, lambda, &[p0, 1.2, 1.4, 2.0], &conv)?;
    w.json("resolvent_lower.json", &sweep)?;
    let fit: Vec<(f64, f64)> = report.rows.iter().map(|r| ((r.m_top as f64).ln(), r.cross_lp)).collect();
    w.json("fits.json", &serde_json::json!({ "cross_vs_log_m": loglog_fit(&fit).0, "self_vs_log_m": report.self_exponent }))
}
