use thiserror::Error;

/// Errors raised anywhere in the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("could not certify floor of {base}^{alpha} within {max_bits} bits")]
    PrecisionExhausted { base: String, alpha: f64, max_bits: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("window [{lo}, {hi}] lies outside the power table (m_max = {m_max})")]
    WindowOutsideTable { lo: u64, hi: u64, m_max: u64 },

    #[error("enclosure of a fractional offset touches a grid boundary: {0}")]
    BoundaryHit(String),

    #[error("memory budget exceeded: need {needed} bytes, budget {budget} bytes")]
    Budget { needed: usize, budget: usize },

    #[error("residual check failed at x = {x}: residual {diff:e}, allowed {allowed:e}")]
    ResidualCheck { x: i64, diff: f64, allowed: f64 },

    #[error("grid of {grid} points too coarse for trigonometric degree {degree}")]
    GridTooCoarse { grid: usize, degree: usize },

    #[error("kernel has support at x = {x}, outside [-{s}, {s}]")]
    SupportViolation { x: i64, s: u64 },

    #[error("series does not converge: successive-term ratio {ratio}")]
    NonConvergence { ratio: f64 },

    #[error("powers fail to contract: l2 norm {norm} at n = {n}")]
    Divergence { n: usize, norm: f64 },

    #[error("kernel is not antisymmetric: defect {defect:e} at x = {x}")]
    Symmetry { x: i64, defect: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("empty block: {0}")]
    EmptyBlock(String),

    #[error("decomposition too degenerate: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_)
            | LabError::Domain(_)
            | LabError::Range(_)
            | LabError::Infeasible(_)
            | LabError::WindowOutsideTable { .. }
            | LabError::GridTooCoarse { .. }
            | LabError::EmptyBlock(_)
            | LabError::Degenerate(_)
            | LabError::Overflow(_) => 2,
            LabError::Budget { .. } => 3,
            LabError::PrecisionExhausted { .. }
            | LabError::BoundaryHit(_)
            | LabError::ResidualCheck { .. }
            | LabError::NonConvergence { .. }
            | LabError::Divergence { .. }
            | LabError::SupportViolation { .. }
            | LabError::Symmetry { .. } => 4,
            LabError::Io(_) | LabError::Json(_) | LabError::Csv(_) => 1,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::PrecisionExhausted { .. } => "precision_exhausted",
            LabError::Domain(_) => "domain",
            LabError::Range(_) => "range",
            LabError::WindowOutsideTable { .. } => "window_outside_table",
            LabError::BoundaryHit(_) => "boundary_hit",
            LabError::Budget { .. } => "budget",
            LabError::ResidualCheck { .. } => "residual_check",
            LabError::GridTooCoarse { .. } => "grid_too_coarse",
            LabError::SupportViolation { .. } => "support_violation",
            LabError::NonConvergence { .. } => "non_convergence",
            LabError::Divergence { .. } => "divergence",
            LabError::Symmetry { .. } => "symmetry",
            LabError::Infeasible(_) => "infeasible",
            LabError::EmptyBlock(_) => "empty_block",
            LabError::Degenerate(_) => "degenerate",
            LabError::Config(_) => "config",
            LabError::Overflow(_) => "overflow",
            LabError::Io(_) => "io",
            LabError::Json(_) => "json",
            LabError::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
