//! Python bindings. Kernels cross the boundary as lists of `(x, value)`
//! pairs; reports arrive as plain dicts built from their JSON form.

use pyo3::prelude::*;

#[pymodule]
mod rough_hilbert_py {
    use num_complex::Complex64;
    use pyo3::exceptions::{PyRuntimeError, PyValueError};
    use pyo3::prelude::*;
    use rough_hilbert::algebra_am::{neumann_resolvent, ResolventOptions};
    use rough_hilbert::convolution_lab::{spectral_bound as bound, ConvolutionConfig};
    use rough_hilbert::counterexample;
    use rough_hilbert::kernel_factory::{self as kf, BumpCutoff, DyadicSchedule, Kernel, Variant};
    use rough_hilbert::power_lattice::{self as pl, PowerSequence};
    use rough_hilbert::LabError;

    fn err(e: LabError) -> PyErr {
        let msg = format!("{} ({})", e, e.kind());
        match e.exit_code() {
            2 => PyValueError::new_err(msg),
            _ => PyRuntimeError::new_err(msg),
        }
    }

    fn variant(name: &str) -> PyResult<Variant> {
        match name {
            "m-over-s" => Ok(Variant::PhiOfMOverS),
            "malpha-over-s" => Ok(Variant::PhiOfMalphaOverS),
            _ => Err(PyValueError::new_err(format!("unknown variant {name:?}"))),
        }
    }

    fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
        let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        py.import("json")?.call_method1("loads", (s,))
    }

    fn transform(alpha: f64, m: u64, theta: f64) -> Result<Kernel, LabError> {
        let schedule = DyadicSchedule::new(m, theta)?;
        let cut = [BumpCutoff::default()];
        let v = Variant::PhiOfMalphaOverS;
        let seq = PowerSequence::new(alpha, kf::required_m_max(alpha, &schedule, &cut, v))?;
        kf::truncated_transform(&seq, &schedule, &cut, v)
    }

    /// Certified `[m^alpha]`.
    #[pyfunction]
    fn floor_power(m: u64, alpha: f64) -> PyResult<i64> {
        pl::eval_floor_power(m, alpha).map_err(err)
    }

    /// Number of pairs `m2 < m1` with `m1` in `[lo, hi]` and `[m1^a] - [m2^a] = x`.
    #[pyfunction]
    fn count_representations(alpha: f64, x: i64, lo: u64, hi: u64) -> PyResult<u64> {
        let seq = PowerSequence::new(alpha, hi).map_err(err)?;
        pl::count_representations(&seq, x, (lo, hi)).map_err(err)
    }

    /// Single block `H_s` as `(x, value)` pairs.
    #[pyfunction]
    #[pyo3(signature = (alpha, s, variant_name = "m-over-s"))]
    fn block_kernel(alpha: f64, s: u64, variant_name: &str) -> PyResult<Vec<(i64, f64)>> {
        let v = variant(variant_name)?;
        let cut = BumpCutoff::default();
        let sched = DyadicSchedule::from_scales(s, 0.0, vec![s]).map_err(err)?;
        let seq = PowerSequence::new(alpha, kf::required_m_max(alpha, &sched, &[cut], v)).map_err(err)?;
        Ok(kf::block_kernel(&seq, s, &cut, v).map_err(err)?.nonzeros())
    }

    /// `H_M` with weights `phi(m^alpha/s)` as `(x, value)` pairs.
    #[pyfunction]
    #[pyo3(signature = (alpha, m, theta = 0.6))]
    fn truncated_transform(py: Python<'_>, alpha: f64, m: u64, theta: f64) -> PyResult<Vec<(i64, f64)>> {
        Ok(py.detach(|| transform(alpha, m, theta)).map_err(err)?.nonzeros())
    }

    /// `(N, N_upper)`: sampled and certified sup of the symbol.
    #[pyfunction]
    fn spectral_bound(pairs: Vec<(i64, f64)>) -> PyResult<(f64, f64)> {
        let b = bound(&Kernel::from_pairs(&pairs)).map_err(err)?;
        Ok((b.n, b.n_upper))
    }

    /// Resolvent summary for `lambda` (default `1 + 2iN`) against `H_M`.
    #[pyfunction]
    #[pyo3(signature = (alpha, m, theta = 0.6, lambda_re = None, lambda_im = None))]
    fn resolvent_summary<'py>(
        py: Python<'py>,
        alpha: f64,
        m: u64,
        theta: f64,
        lambda_re: Option<f64>,
        lambda_im: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let summary = py
            .detach(|| {
                let h = transform(alpha, m, theta)?;
                let n = bound(&h)?.n;
                let lambda = Complex64::new(lambda_re.unwrap_or(1.0), lambda_im.unwrap_or(2.0 * n));
                neumann_resolvent(lambda, &h, &ResolventOptions::default()).map(|r| r.summary())
            })
            .map_err(err)?;
        to_dict(py, &summary)
    }

    /// Two-block blow-up report over the given top scales.
    #[pyfunction]
    #[pyo3(signature = (ms, alpha = 1.5, delta = 0.15, c_kappa = 0.1))]
    fn blowup_report<'py>(py: Python<'py>, ms: Vec<u64>, alpha: f64, delta: f64, c_kappa: f64) -> PyResult<Bound<'py, PyAny>> {
        let r = py
            .detach(|| counterexample::blowup_report(alpha, delta, c_kappa, &ms, &ConvolutionConfig::default()))
            .map_err(err)?;
        let d = to_dict(py, &r)?;
        d.set_item("all_pass", r.all_pass())?;
        Ok(d)
    }
}
