//! Mean-field Born-Oppenheimer surfaces: the spin sector diagonalized with
//! the quadratures `(x, p)` frozen to numbers, plus the closed-form JC Berry
//! phases.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::qubit_ops;
use crate::linalg::{ComplexMatrix, C64};
use crate::models::{Branch, Model, ModelKind, ModelParams};

/// Fraction of grid lines a minimal set must touch to count as a line.
pub const LINE_COVERAGE: f64 = 0.9;
/// A minimal set touching fewer grid lines than this across the line is thin.
pub const LINE_WIDTH_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl From<Branch> for Sign {
    fn from(b: Branch) -> Self {
        match b {
            Branch::Upper => Sign::Plus,
            Branch::Lower => Sign::Minus,
        }
    }
}

/// Surfaces sampled on `x_axis × p_axis`; matrices are indexed `[ix][ip]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub upper: Vec<Vec<f64>>,
    pub lower: Vec<Vec<f64>>,
    pub gap: Vec<Vec<f64>>,
    pub model: ModelKind,
}

impl SurfaceGrid {
    pub fn is_empty(&self) -> bool {
        self.x_axis.is_empty() || self.p_axis.is_empty()
    }

    /// Row-major `(x, p, E_minus, E_plus, gap)` tuples, x outer.
    pub fn points(&self) -> impl Iterator<Item = [f64; 5]> + '_ {
        self.x_axis.iter().enumerate().flat_map(move |(i, &x)| {
            self.p_axis
                .iter()
                .enumerate()
                .map(move |(j, &p)| [x, p, self.lower[i][j], self.upper[i][j], self.gap[i][j]])
        })
    }
}

/// `(E_minus, E_plus)` at a single phase-space point.
pub fn boa_energies(model: Model, params: &ModelParams, x: f64, p: f64) -> (f64, f64) {
    let (centre, half) = centre_and_half_gap(model, params, x, p);
    (centre - half, centre + half)
}

fn centre_and_half_gap(model: Model, params: &ModelParams, x: f64, p: f64) -> (f64, f64) {
    let g = params.g();
    match model {
        Model::JaynesCummings => {
            let d = params.delta();
            (0.0, (0.25 * d * d + g * g * (x * x + p * p)).sqrt())
        }
        Model::Rabi => {
            let w = params.qubit_omega();
            (
                0.5 * params.omega() * (x * x + p * p),
                (0.25 * w * w + 4.0 * g * g * x * x).sqrt(),
            )
        }
    }
}

/// The 2×2 spin Hamiltonian with `x̂, p̂` replaced by numbers.
pub fn frozen_spin_hamiltonian(model: Model, params: &ModelParams, x: f64, p: f64) -> ComplexMatrix {
    let q = qubit_ops();
    let g = params.g();
    match model {
        Model::JaynesCummings => {
            let h = &q.sz.scale_real(0.5 * params.delta()) + &q.sx.scale_real(g * x);
            &h + &q.sy.scale_real(g * p)
        }
        Model::Rabi => {
            let osc = ComplexMatrix::identity(2).scale_real(0.5 * params.omega() * (x * x + p * p));
            let h = &osc + &q.sz.scale_real(0.5 * params.qubit_omega());
            &h + &q.sx.scale(C64::new(2.0 * g * x, 0.0))
        }
    }
}

pub fn boa_surface(kind: ModelKind, params: &ModelParams, x_axis: &[f64], p_axis: &[f64]) -> SurfaceGrid {
    let model = kind.model();
    let mut upper = Vec::with_capacity(x_axis.len());
    let mut lower = Vec::with_capacity(x_axis.len());
    let mut gap = Vec::with_capacity(x_axis.len());
    for &x in x_axis {
        let row: Vec<(f64, f64)> = p_axis
            .iter()
            .map(|&p| centre_and_half_gap(model, params, x, p))
            .collect();
        lower.push(row.iter().map(|(c, h)| c - h).collect());
        upper.push(row.iter().map(|(c, h)| c + h).collect());
        // 2·half rather than upper − lower keeps the gap free of cancellation
        gap.push(row.iter().map(|(_, h)| 2.0 * h).collect());
    }
    SurfaceGrid {
        x_axis: x_axis.to_vec(),
        p_axis: p_axis.to_vec(),
        upper,
        lower,
        gap,
        model: kind,
    }
}

/// `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Locus {
    /// Isolated minimum at the grid point `(x, p)`.
    Point { x: f64, p: f64 },
    /// Minimal set stretched along `along`, centred at `offset` on the other axis.
    Line { along: Axis, offset: f64 },
    None,
}

impl Locus {
    pub fn name(&self) -> &'static str {
        match self {
            Locus::Point { .. } => "point",
            Locus::Line { .. } => "line",
            Locus::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub min_gap: f64,
    pub tol_gap: f64,
    /// `min_gap ≤ tol_gap`: the surfaces touch on this grid.
    pub degenerate: bool,
    pub locus: Locus,
    /// Every grid point with `gap ≤ min_gap + tol_gap`.
    pub minimal_set: Vec<(f64, f64)>,
}

/// Twice the cell diagonal times the steepest finite-difference slope of the gap.
pub fn default_tol_gap(s: &SurfaceGrid) -> f64 {
    let step = |axis: &[f64]| {
        axis.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    };
    let (hx, hp) = (step(&s.x_axis), step(&s.p_axis));
    let mut slope: f64 = 0.0;
    for i in 0..s.x_axis.len() {
        for j in 0..s.p_axis.len() {
            if i + 1 < s.x_axis.len() {
                let h = s.x_axis[i + 1] - s.x_axis[i];
                if h != 0.0 {
                    slope = slope.max(((s.gap[i + 1][j] - s.gap[i][j]) / h).abs());
                }
            }
            if j + 1 < s.p_axis.len() {
                let h = s.p_axis[j + 1] - s.p_axis[j];
                if h != 0.0 {
                    slope = slope.max(((s.gap[i][j + 1] - s.gap[i][j]) / h).abs());
                }
            }
        }
    }
    2.0 * hx.hypot(hp) * slope
}

/// Classifies the set where the gap comes within `tol_gap` of its minimum.
///
/// A set touching at least 90% of the grid lines along one axis and fewer
/// than half across it is a line, whatever the gap value. Otherwise a set
/// whose minimum is within `tol_gap` of zero is a point; anything else is
/// reported as `none`.
pub fn classify_degeneracy(s: &SurfaceGrid, tol_gap: f64) -> Result<DegeneracyReport> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("surface grid is empty".into()));
    }
    if !(tol_gap.is_finite() && tol_gap >= 0.0) {
        return Err(Error::InvalidArgument(format!("tol_gap must be non-negative, got {tol_gap}")));
    }
    let covers = |axis: &[f64]| {
        let lo = axis.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    if !covers(&s.x_axis) || !covers(&s.p_axis) {
        return Err(Error::InvalidArgument("surface grid does not cover the origin".into()));
    }

    let (nx, np) = (s.x_axis.len(), s.p_axis.len());
    let mut min_gap = f64::INFINITY;
    let mut arg = (0, 0);
    for i in 0..nx {
        for j in 0..np {
            if s.gap[i][j] < min_gap {
                min_gap = s.gap[i][j];
                arg = (i, j);
            }
        }
    }
    let mut in_set = vec![vec![false; np]; nx];
    let mut minimal_set = Vec::new();
    for i in 0..nx {
        for j in 0..np {
            if s.gap[i][j] <= min_gap + tol_gap {
                in_set[i][j] = true;
                minimal_set.push((s.x_axis[i], s.p_axis[j]));
            }
        }
    }
    let x_lines = (0..nx).filter(|&i| in_set[i].iter().any(|&b| b)).count();
    let p_lines = (0..np).filter(|&j| (0..nx).any(|i| in_set[i][j])).count();
    let x_cov = x_lines as f64 / nx as f64;
    let p_cov = p_lines as f64 / np as f64;
    let mean = |v: &mut dyn Iterator<Item = f64>| {
        let (sum, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        sum / n as f64
    };

    let degenerate = min_gap <= tol_gap;
    let locus = if p_cov >= LINE_COVERAGE && x_cov < LINE_WIDTH_FRACTION {
        Locus::Line {
            along: Axis::P,
            offset: mean(&mut minimal_set.iter().map(|q| q.0)),
        }
    } else if x_cov >= LINE_COVERAGE && p_cov < LINE_WIDTH_FRACTION {
        Locus::Line {
            along: Axis::X,
            offset: mean(&mut minimal_set.iter().map(|q| q.1)),
        }
    } else if degenerate && x_cov < LINE_WIDTH_FRACTION && p_cov < LINE_WIDTH_FRACTION {
        Locus::Point {
            x: s.x_axis[arg.0],
            p: s.p_axis[arg.1],
        }
    } else {
        Locus::None
    };

    Ok(DegeneracyReport {
        min_gap,
        tol_gap,
        degenerate,
        locus,
        minimal_set,
    })
}

/// ρ with `ρ²/2 = n + 1/2`.
pub fn rho_from_photon_number(n: usize) -> f64 {
    (2.0 * n as f64 + 1.0).sqrt()
}

fn jc_phase(delta: f64, coupling_sq: f64, sign: Sign) -> f64 {
    // at resonance the ratio is taken as zero even when the coupling vanishes
    let ratio = if delta == 0.0 {
        0.0
    } else {
        0.5 * delta / (0.25 * delta * delta + coupling_sq).sqrt()
    };
    sign.value() * PI * (1.0 - ratio)
}

/// Mean-field JC Berry phase `±π(1 − (Δ/2)/√(Δ²/4 + g²ρ²))` for a loop of radius ρ.
pub fn berry_boa_jc(rho: f64, params: &ModelParams, sign: Sign) -> Result<f64> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::InvalidArgument(format!("rho must be non-negative, got {rho}")));
    }
    let coupling_sq = (params.g() * rho).powi(2);
    if params.delta() == 0.0 && coupling_sq == 0.0 {
        return Err(Error::ConicalIntersection { rho });
    }
    Ok(jc_phase(params.delta(), coupling_sq, sign))
}

/// JC eigenstate for the exact Berry phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JcState {
    Ground,
    /// Branch `sign` of the pair entering with `g²(n + 1)`.
    Dressed { n: usize, sign: Sign },
}

/// Exact JC Berry phase `±π(1 − (Δ/2)/√(Δ²/4 + g²(n+1)))`; zero for the ground state.
pub fn berry_exact_jc(state: JcState, params: &ModelParams) -> f64 {
    match state {
        JcState::Ground => 0.0,
        JcState::Dressed { n, sign } => jc_phase(params.delta(), params.g().powi(2) * (n as f64 + 1.0), sign),
    }
}
