use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A[i][j] - conj(A[j][i])| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("QL iteration did not converge for a {dim}x{dim} matrix within {cap} sweeps per eigenvalue")]
    NoConvergence { dim: usize, cap: usize },

    #[error("eigen-residual {residual:.3e} exceeds bound {bound:.3e}")]
    Inaccurate { residual: f64, bound: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level {level} is degenerate (gap {gap:.3e} to a neighbouring level); its Berry phase is undefined")]
    Degenerate { level: usize, gap: f64 },

    #[error("eigenpath tracking failed at phi node {node}: step overlap {overlap:.6} below threshold {threshold}; increase the number of phi nodes")]
    TrackingFailed { node: usize, overlap: f64, threshold: f64 },

    #[error("anchor component {index} has magnitude {magnitude:.3e} at phi node {node}; choose another anchor")]
    AnchorInvalid { index: usize, node: usize, magnitude: f64 },

    #[error("the Berry connection is gauge dependent; fix a gauge before integrating it")]
    RawGauge,

    #[error("loop under-resolved: step overlap {overlap:.6} at node {node} is below 0.5")]
    UnderResolved { node: usize, overlap: f64 },

    #[error("conical intersection: the frozen spin Hamiltonian vanishes at rho = {rho} (Delta = 0), so the adiabatic states are undefined")]
    ConicalIntersection { rho: f64 },

    #[error("no sign change of the crossing function on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}
