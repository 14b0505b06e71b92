//! Geometric phases of an eigenstate carried once around `φ: 0 → 2π` by
//! `H'(φ) = U(φ) H U(φ)†`.
//!
//! Sign conventions: the connection is `A = i⟨ψ|∂_φ ψ⟩ = −Im⟨ψ|∂_φ ψ⟩` and the
//! discrete loop phase is `γ = −Im Σ log⟨ψ_k|ψ_{k+1}⟩`, so both give
//! `γ = ∫A dφ` for a smooth gauge. For the exactly rotated family this is
//! `2π⟨n̂⟩`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::TruncationConfig;
use crate::linalg::{hermitian_eig_range, inner, ComplexMatrix, C64, DEFAULT_TOL};
use crate::models::{rotate_hamiltonian, ModelKind, ModelParams};

pub const DEFAULT_PHI_NODES: usize = 720;
pub const BERRY_N_MAX: usize = 150;
pub const MIN_PHI_NODES: usize = 16;
/// Smallest accepted `|⟨ψ_k|ψ_{k+1}⟩|` while tracking.
pub const CONTINUITY_THRESHOLD: f64 = 0.99;
/// The Wilson loop refuses links weaker than this.
pub const UNDER_RESOLVED_OVERLAP: f64 = 0.5;
/// Levels closer than this at φ = 0 have no individual Berry phase.
pub const DEGENERACY_GAP: f64 = 1e-10;
pub const MIN_ANCHOR_MAGNITUDE: f64 = 1e-8;
/// Levels on each side of the tracked one offered as continuation candidates.
const TRACK_WINDOW: usize = 2;
/// Per-node allowance for rounding in the reported residual.
const ROUNDING_PER_NODE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum GaugeConvention {
    ParallelTransport,
    /// Component made real and non-negative at every node; `None` picks the
    /// largest-magnitude component at φ = 0.
    AnchorComponent(Option<usize>),
    Raw,
}

impl GaugeConvention {
    pub fn tag(&self) -> &'static str {
        match self {
            GaugeConvention::ParallelTransport => "parallel_transport",
            GaugeConvention::AnchorComponent(_) => "anchor_component",
            GaugeConvention::Raw => "raw",
        }
    }
}

/// One eigenvector per node of the uniform grid `φ_k = 2πk/K`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedFamily {
    pub phi_grid: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    /// Eigenindex at φ = 0, ascending energy.
    pub level: usize,
    pub energy: f64,
    pub min_step_overlap: f64,
    /// Largest eigen-residual over the nodes.
    pub residual: f64,
    pub model: ModelKind,
    pub params: ModelParams,
    pub cfg: TruncationConfig,
    pub gauge: GaugeConvention,
}

impl TrackedFamily {
    /// Number of steps `K`.
    pub fn steps(&self) -> usize {
        self.phi_grid.len() - 1
    }

    pub fn step_overlaps(&self) -> Vec<C64> {
        self.vectors.windows(2).map(|w| inner(&w[0], &w[1])).collect()
    }

    /// `⟨ψ(0)|n̂|ψ(0)⟩`.
    pub fn photon_number(&self) -> f64 {
        mean_photon_number(&self.vectors[0], self.cfg)
    }

    /// Every `stride`-th node; the coarser grid must still close at 2π.
    pub fn subsample(&self, stride: usize) -> Result<TrackedFamily> {
        let k = self.steps();
        if stride == 0 || !k.is_multiple_of(stride) || k / stride < MIN_PHI_NODES {
            return Err(Error::InvalidArgument(format!(
                "stride {stride} does not split {k} steps into at least {MIN_PHI_NODES}"
            )));
        }
        let mut out = self.clone();
        out.phi_grid = self.phi_grid.iter().copied().step_by(stride).collect();
        out.vectors = self.vectors.iter().step_by(stride).cloned().collect();
        out.min_step_overlap = out
            .step_overlaps()
            .iter()
            .map(|o| o.norm())
            .fold(f64::INFINITY, f64::min);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopResult {
    /// Closed-loop phase wrapped to (−π, π].
    pub gamma: f64,
    pub unwrapped: f64,
    /// `(φ_k, partial phase)`, starting at `(0, 0)`.
    pub curve: Vec<(f64, f64)>,
    pub gauge: GaugeConvention,
    /// `|γ(K) − γ(K/2)|` plus a rounding allowance.
    pub residual: f64,
    /// Phase that closes the loop, `arg⟨ψ_0|ψ_K⟩`; zero for the Wilson loop.
    pub closure: f64,
}

/// Maps an angle to (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Distance between two phases modulo 2π.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

pub fn phi_grid(k: usize) -> Vec<f64> {
    (0..=k).map(|j| TAU * j as f64 / k as f64).collect()
}

fn mean_photon_number(v: &[C64], cfg: TruncationConfig) -> f64 {
    v.iter()
        .enumerate()
        .map(|(idx, z)| cfg.label(idx).1 as f64 * z.norm_sqr())
        .sum()
}

fn check_level(level: usize, cfg: TruncationConfig) -> Result<()> {
    if level >= cfg.joint_dim() {
        return Err(Error::InvalidArgument(format!(
            "level {level} outside the spectrum of dimension {}",
            cfg.joint_dim()
        )));
    }
    Ok(())
}

pub fn eig_family(kind: ModelKind, p: &ModelParams, level: usize, k: usize, cfg: TruncationConfig) -> Result<TrackedFamily> {
    eig_family_with(Exec::default(), kind, p, level, k, cfg)
}

/// Diagonalizes `H'(φ_k)` at every node (concurrently under `exec`), then
/// follows the level by maximal overlap with the previous node.
pub fn eig_family_with(
    exec: Exec,
    kind: ModelKind,
    p: &ModelParams,
    level: usize,
    k: usize,
    cfg: TruncationConfig,
) -> Result<TrackedFamily> {
    if k < MIN_PHI_NODES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_PHI_NODES} phi steps are needed, got {k}"
        )));
    }
    check_level(level, cfg)?;
    let h = kind.build(p, cfg);
    let window = level.saturating_sub(TRACK_WINDOW)..(level + TRACK_WINDOW + 1).min(cfg.joint_dim());
    let phis = phi_grid(k);
    let systems = exec.try_map(&phis, |&phi| {
        let hp = rotate_hamiltonian(&h, phi, cfg)?;
        hermitian_eig_range(&hp, window.clone(), DEFAULT_TOL)
    })?;

    let first = &systems[0];
    let gap = first.gap(level);
    if gap < DEGENERACY_GAP {
        return Err(Error::Degenerate { level, gap });
    }
    let mut vectors = Vec::with_capacity(k + 1);
    vectors.push(first.vector(level).expect("level inside window").to_vec());
    let mut min_step_overlap = f64::INFINITY;
    for (node, sys) in systems.iter().enumerate().skip(1) {
        let prev = vectors.last().expect("non-empty");
        let (best, overlap) = sys
            .vectors
            .iter()
            .map(|v| (v, inner(prev, v).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty window");
        if overlap < CONTINUITY_THRESHOLD {
            return Err(Error::TrackingFailed {
                node,
                overlap,
                threshold: CONTINUITY_THRESHOLD,
            });
        }
        min_step_overlap = min_step_overlap.min(overlap);
        vectors.push(best.clone());
    }

    Ok(TrackedFamily {
        phi_grid: phis,
        vectors,
        level,
        energy: first.values[level],
        min_step_overlap,
        residual: systems.iter().map(|s| s.residual).fold(0.0, f64::max),
        model: kind,
        params: *p,
        cfg,
        gauge: GaugeConvention::Raw,
    })
}

/// Largest-magnitude component, lowest index among near ties.
fn default_anchor(v: &[C64]) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("non-empty vector")
}

fn rephase(v: &mut [C64], unit: C64) {
    for z in v.iter_mut() {
        *z *= unit;
    }
}

/// Rephases every vector according to `gauge`; the returned family records
/// the resolved convention.
pub fn gauge_fix(f: &TrackedFamily, gauge: GaugeConvention) -> Result<TrackedFamily> {
    let mut out = f.clone();
    let resolved = match gauge {
        GaugeConvention::Raw => GaugeConvention::Raw,
        GaugeConvention::ParallelTransport => {
            for k in 1..out.vectors.len() {
                let o = inner(&out.vectors[k - 1], &out.vectors[k]);
                let norm = o.norm();
                if norm > 0.0 {
                    rephase(&mut out.vectors[k], o.conj() / norm);
                }
            }
            GaugeConvention::ParallelTransport
        }
        GaugeConvention::AnchorComponent(index) => {
            let index = index.unwrap_or_else(|| default_anchor(&f.vectors[0]));
            if index >= f.cfg.joint_dim() {
                return Err(Error::InvalidArgument(format!("anchor index {index} out of range")));
            }
            for (node, v) in out.vectors.iter_mut().enumerate() {
                let c = v[index];
                let magnitude = c.norm();
                if magnitude < MIN_ANCHOR_MAGNITUDE {
                    return Err(Error::AnchorInvalid { index, node, magnitude });
                }
                rephase(v, c.conj() / magnitude);
                v[index] = C64::new(magnitude, 0.0);
            }
            GaugeConvention::AnchorComponent(Some(index))
        }
    };
    out.gauge = resolved;
    Ok(out)
}

/// Node indices of the half-resolution grid: every other node, ending on the last.
fn coarse_nodes(k: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..=k).step_by(2).collect();
    if *nodes.last().expect("k >= 1") != k {
        nodes.push(k);
    }
    nodes
}

fn wilson_phase(vectors: &[&[C64]]) -> Result<(Vec<f64>, f64)> {
    let k = vectors.len() - 1;
    let mut partial = Vec::with_capacity(k + 1);
    let mut acc = 0.0;
    partial.push(0.0);
    for j in 0..k {
        let next = if j + 1 == k { vectors[0] } else { vectors[j + 1] };
        let o = inner(vectors[j], next);
        if o.norm() < UNDER_RESOLVED_OVERLAP {
            return Err(Error::UnderResolved { node: j, overlap: o.norm() });
        }
        acc -= o.arg();
        partial.push(acc);
    }
    Ok((partial, acc))
}

/// Discrete Berry phase from successive overlaps; the last link closes on `ψ_0`.
pub fn wilson_loop(f: &TrackedFamily) -> Result<LoopResult> {
    let k = f.steps();
    let all: Vec<&[C64]> = f.vectors.iter().map(Vec::as_slice).collect();
    let (partial, total) = wilson_phase(&all)?;
    let coarse: Vec<&[C64]> = coarse_nodes(k).into_iter().map(|j| all[j]).collect();
    let (_, total_coarse) = wilson_phase(&coarse)?;
    Ok(LoopResult {
        gamma: wrap_phase(total),
        unwrapped: total,
        curve: f.phi_grid.iter().copied().zip(partial).collect(),
        gauge: f.gauge,
        residual: phase_distance(total, total_coarse) + k as f64 * ROUNDING_PER_NODE,
        closure: 0.0,
    })
}

/// `A_k = −Im⟨ψ_k|(ψ_{k+1} − ψ_{k−1})⟩/(φ_{k+1} − φ_{k−1})`, one-sided at the ends.
fn connection_samples(phis: &[f64], vectors: &[&[C64]]) -> Vec<f64> {
    let last = vectors.len() - 1;
    (0..=last)
        .map(|k| {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(last));
            let d: Vec<C64> = vectors[hi].iter().zip(vectors[lo]).map(|(a, b)| a - b).collect();
            -inner(vectors[k], &d).im / (phis[hi] - phis[lo])
        })
        .collect()
}

fn integrate_connection(phis: &[f64], vectors: &[&[C64]]) -> (Vec<f64>, f64) {
    let a = connection_samples(phis, vectors);
    let mut partial = Vec::with_capacity(a.len());
    let mut acc = 0.0;
    partial.push(0.0);
    for k in 1..a.len() {
        acc += 0.5 * (a[k - 1] + a[k]) * (phis[k] - phis[k - 1]);
        partial.push(acc);
    }
    let last = vectors.len() - 1;
    let closure = inner(vectors[0], vectors[last]).arg();
    (partial, closure)
}

/// Trapezoid integral of the gauge-fixed connection. The closed-loop value
/// adds `arg⟨ψ_0|ψ_K⟩`, which vanishes for gauges that are single valued.
pub fn connection_curve(f: &TrackedFamily, gauge: GaugeConvention) -> Result<LoopResult> {
    if gauge == GaugeConvention::Raw {
        return Err(Error::RawGauge);
    }
    let fixed = gauge_fix(f, gauge)?;
    let k = fixed.steps();
    let all: Vec<&[C64]> = fixed.vectors.iter().map(Vec::as_slice).collect();
    let (partial, closure) = integrate_connection(&fixed.phi_grid, &all);
    let total = partial[k] + closure;

    let nodes = coarse_nodes(k);
    let phis: Vec<f64> = nodes.iter().map(|&j| fixed.phi_grid[j]).collect();
    let coarse: Vec<&[C64]> = nodes.iter().map(|&j| all[j]).collect();
    let (coarse_partial, coarse_closure) = integrate_connection(&phis, &coarse);
    let total_coarse = coarse_partial[coarse_partial.len() - 1] + coarse_closure;

    Ok(LoopResult {
        gamma: wrap_phase(total),
        unwrapped: total,
        curve: fixed.phi_grid.iter().copied().zip(partial).collect(),
        gauge: fixed.gauge,
        residual: (total - total_coarse).abs() + k as f64 * ROUNDING_PER_NODE,
        closure,
    })
}

/// `2π⟨ψ|n̂|ψ⟩` for the level at φ = 0: the exact phase of the rotated family.
pub fn generator_phase(kind: ModelKind, p: &ModelParams, level: usize, cfg: TruncationConfig) -> Result<f64> {
    check_level(level, cfg)?;
    let h: ComplexMatrix = kind.build(p, cfg);
    let sys = hermitian_eig_range(&h, level..level + 1, DEFAULT_TOL)?;
    let gap = sys.gap(level);
    if gap < DEGENERACY_GAP {
        return Err(Error::Degenerate { level, gap });
    }
    Ok(TAU * mean_photon_number(sys.vector(level).expect("requested level"), cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::u_phi_diagonal;
    use crate::surfaces::{berry_exact_jc, JcState, Sign};

    const JC: ModelKind = ModelKind::JcLab;
    const RABI: ModelKind = ModelKind::RabiLab;

    fn cfg(n: usize) -> TruncationConfig {
        TruncationConfig::new(n).unwrap()
    }

    fn jc(delta: f64, g: f64) -> ModelParams {
        ModelParams::from_detuning(delta, g).unwrap()
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(TAU + 0.25) - 0.25).abs() < 1e-15);
        assert!(phase_distance(PI - 1e-9, -PI + 1e-9) < 1e-8);
    }

    #[test]
    fn too_few_nodes_or_bad_level_rejected() {
        let p = jc(0.0, 0.1);
        assert!(eig_family(JC, &p, 1, 8, cfg(4)).is_err());
        assert!(eig_family(JC, &p, 10, 16, cfg(4)).is_err());
        assert!(generator_phase(JC, &p, 10, cfg(4)).is_err());
    }

    #[test]
    fn decoupled_ground_family_is_constant() {
        let p = ModelParams::new(1.0, 0.0).unwrap();
        let f = eig_family(RABI, &p, 0, 16, cfg(6)).unwrap();
        for v in &f.vectors {
            assert!((inner(&f.vectors[0], v).norm() - 1.0).abs() < 1e-12);
        }
        let c = connection_curve(&f, GaugeConvention::AnchorComponent(None)).unwrap();
        assert!(c.curve.iter().all(|&(_, y)| y.abs() < 1e-12));
        assert!(wilson_loop(&f).unwrap().gamma.abs() < 1e-12);
    }

    #[test]
    fn family_follows_the_rotation() {
        let c = cfg(12);
        let f = eig_family(JC, &jc(0.0, 0.1), 1, 24, c).unwrap();
        for (phi, v) in f.phi_grid.iter().zip(&f.vectors) {
            let u = u_phi_diagonal(*phi, c);
            let rotated: Vec<C64> = f.vectors[0].iter().zip(&u).map(|(a, b)| a * b).collect();
            assert!(inner(&rotated, v).norm() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn finer_grid_raises_min_overlap() {
        let p = ModelParams::new(3.0, 0.1).unwrap();
        let coarse = eig_family(RABI, &p, 1, 16, cfg(20)).unwrap();
        let fine = eig_family(RABI, &p, 1, 32, cfg(20)).unwrap();
        assert!(fine.min_step_overlap > coarse.min_step_overlap);
    }

    #[test]
    fn decoupled_limits_of_the_generator() {
        // qubit below the photon: the first excited state tends to |2>|0>
        let p = ModelParams::new(0.5, 1e-4).unwrap();
        assert!(generator_phase(RABI, &p, 1, cfg(8)).unwrap() < 1e-6);
        let p = ModelParams::new(1.7, 0.0).unwrap();
        for kind in [JC, RABI, ModelKind::RabiQuadrature] {
            assert!(generator_phase(kind, &p, 0, cfg(8)).unwrap().abs() < 1e-12, "{kind}");
        }
        // the interaction picture has no photon energy, so every level is degenerate at g = 0
        assert!(matches!(
            generator_phase(ModelKind::JcQuadrature, &p, 0, cfg(8)),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn subsampled_family_keeps_endpoints() {
        let f = eig_family(JC, &jc(0.0, 0.1), 1, 64, cfg(6)).unwrap();
        let half = f.subsample(2).unwrap();
        assert_eq!(half.steps(), 32);
        assert_eq!(half.phi_grid[32], f.phi_grid[64]);
        assert!(half.min_step_overlap <= f.min_step_overlap);
        assert!(f.subsample(3).is_err());
        assert!(f.subsample(8).is_err());
    }

    #[test]
    fn degenerate_level_is_rejected() {
        // resonance, g = 1: |1,0> is degenerate with the lower n = 2 dressed state
        let p = jc(0.0, 1.0);
        assert!(matches!(generator_phase(JC, &p, 1, cfg(10)), Err(Error::Degenerate { .. })));
        assert!(matches!(eig_family(JC, &p, 1, 16, cfg(10)), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn resonant_jc_first_excited_gives_pi() {
        let c = cfg(10);
        let p = jc(0.0, 0.1);
        assert!((generator_phase(JC, &p, 1, c).unwrap() - PI).abs() < 1e-12);
        let f = eig_family(JC, &p, 1, 180, c).unwrap();
        let w = wilson_loop(&f).unwrap();
        assert!(phase_distance(w.gamma, PI) < 2e-3);

        let conn = connection_curve(&f, GaugeConvention::AnchorComponent(None)).unwrap();
        assert_eq!(conn.gauge, GaugeConvention::AnchorComponent(Some(0)));
        let a: Vec<f64> = conn.curve.iter().map(|&(phi, y)| y - 0.5 * phi).collect();
        assert!(a.iter().all(|d| d.abs() < 1e-3));
        assert!((conn.unwrapped - PI).abs() < 1e-3);
    }

    #[test]
    fn gauge_fixing_defining_properties() {
        let f = eig_family(RABI, &ModelParams::new(1.0, 0.3).unwrap(), 1, 32, cfg(15)).unwrap();
        let pt = gauge_fix(&f, GaugeConvention::ParallelTransport).unwrap();
        for o in pt.step_overlaps() {
            assert!(o.im.abs() < 1e-14 && o.re >= 0.0);
        }
        let anchor = gauge_fix(&f, GaugeConvention::AnchorComponent(None)).unwrap();
        let GaugeConvention::AnchorComponent(Some(idx)) = anchor.gauge else {
            panic!("anchor not resolved")
        };
        assert!(anchor.vectors.iter().all(|v| v[idx].im.abs() <= 1e-12 && v[idx].re >= 0.0));
        let twice = gauge_fix(&anchor, anchor.gauge).unwrap();
        for (a, b) in anchor.vectors.iter().zip(&twice.vectors) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14));
        }
        for (o1, o2) in f.step_overlaps().iter().zip(pt.step_overlaps()) {
            assert!((o1.norm() - o2.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn anchor_with_vanishing_component_is_rejected() {
        let f = eig_family(JC, &jc(0.3, 0.2), 1, 64, cfg(6)).unwrap();
        // the JC first excited state has no weight on |2>|3>
        let idx = f.cfg.index(crate::fock::Qubit::Excited, 3);
        assert!(matches!(
            gauge_fix(&f, GaugeConvention::AnchorComponent(Some(idx))),
            Err(Error::AnchorInvalid { .. })
        ));
    }

    #[test]
    fn raw_gauge_connection_is_an_error() {
        let f = eig_family(JC, &jc(0.3, 0.2), 1, 64, cfg(6)).unwrap();
        assert_eq!(connection_curve(&f, GaugeConvention::Raw), Err(Error::RawGauge));
    }

    #[test]
    fn parallel_transport_matches_wilson() {
        let f = eig_family(RABI, &ModelParams::new(1.0, 0.4).unwrap(), 1, 64, cfg(20)).unwrap();
        let w = wilson_loop(&f).unwrap();
        let c = connection_curve(&f, GaugeConvention::ParallelTransport).unwrap();
        assert!(phase_distance(w.gamma, c.gamma) <= w.residual);
        assert!(phase_distance(w.gamma, f.photon_number() * TAU) < 1e-2);
    }

    #[test]
    fn oracle_chain_fixes_doublet_indexing() {
        let c = cfg(10);
        for (delta, g) in [(0.0, 0.1), (0.5, 0.1), (1.3, 0.4)] {
            let p = jc(delta, g);
            let generator = generator_phase(JC, &p, 1, c).unwrap();
            let exact = berry_exact_jc(JcState::Dressed { n: 1, sign: Sign::Minus }, &p);
            assert!(phase_distance(generator, exact) < 1e-9, "delta={delta} g={g}");
        }
    }

    #[test]
    fn sequential_and_parallel_families_agree() {
        let p = ModelParams::new(1.0, 0.2).unwrap();
        let a = eig_family_with(Exec::Sequential, RABI, &p, 2, 48, cfg(8)).unwrap();
        let b = eig_family_with(Exec::Parallel, RABI, &p, 2, 48, cfg(8)).unwrap();
        assert_eq!(a, b);
    }
}
