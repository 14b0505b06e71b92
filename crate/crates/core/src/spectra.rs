//! Coupling sweeps of the low-lying spectrum, the Bloch-Siegert shift, the
//! JC ground-state crossing and truncation convergence.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{Qubit, TruncationConfig};
use crate::linalg::{hermitian_eig_range, hermitian_eigvals, DEFAULT_TOL};
use crate::models::{build_jc, empty_state_energy, jc_doublet_analytic, Frame, ModelKind, ModelParams};

/// Truncation used for coupling sweeps.
pub const SWEEP_N_MAX: usize = 200;
/// Truncation of the convergence anchor runs.
pub const ANCHOR_N_MAX: usize = 500;
/// Crossing coupling quoted alongside the computed one.
pub const QUOTED_CROSSING_G: f64 = SQRT_2;

/// `g = 0, 0.01, …, 1.5`.
pub fn default_g_grid() -> Vec<f64> {
    g_grid(0.0, 1.5, 0.01).expect("valid default range")
}

/// Uniform grid `g_min, g_min + step, …` up to `g_max` inclusive (with a
/// half-step tolerance so rounding does not drop the end point).
pub fn g_grid(g_min: f64, g_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(g_min.is_finite() && g_max.is_finite() && step.is_finite()) || step <= 0.0 || g_max < g_min || g_min < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "invalid g range [{g_min}, {g_max}] with step {step}"
        )));
    }
    let count = ((g_max - g_min) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| g_min + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub cfg: TruncationConfig,
    pub g_values: Vec<f64>,
    /// `levels[row][k]`: k-th lowest eigenvalue at `g_values[row]`.
    pub levels: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn k(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }
}

/// The `k` lowest eigenvalues of `kind` at every coupling in `g_grid`; the
/// remaining parameters come from `p`.
pub fn spectrum_sweep(
    kind: ModelKind,
    p: &ModelParams,
    g_grid: &[f64],
    k: usize,
    cfg: TruncationConfig,
) -> Result<SpectrumTable> {
    spectrum_sweep_with(Exec::default(), kind, p, g_grid, k, cfg)
}

pub fn spectrum_sweep_with(
    exec: Exec,
    kind: ModelKind,
    p: &ModelParams,
    g_grid: &[f64],
    k: usize,
    cfg: TruncationConfig,
) -> Result<SpectrumTable> {
    if k == 0 || k > cfg.joint_dim() {
        return Err(Error::InvalidArgument(format!(
            "requested {k} levels from a {}-dimensional space",
            cfg.joint_dim()
        )));
    }
    let params: Vec<ModelParams> = g_grid.iter().map(|&g| p.with_g(g)).collect::<Result<_>>()?;
    let levels = exec.try_map(&params, |q| lowest_levels(kind, q, k, cfg))?;
    Ok(SpectrumTable {
        kind,
        params: *p,
        cfg,
        g_values: g_grid.to_vec(),
        levels,
    })
}

fn lowest_levels(kind: ModelKind, p: &ModelParams, k: usize, cfg: TruncationConfig) -> Result<Vec<f64>> {
    let mut values = hermitian_eigvals(&kind.build(p, cfg), DEFAULT_TOL)?;
    values.truncate(k);
    Ok(values)
}

/// Rabi versus JC level comparison at one coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSiegertShift {
    /// 1-based level index, `E_1` being the ground state.
    pub level: usize,
    pub jc_energy: f64,
    pub rabi_energy: f64,
    pub jc_ground: f64,
    pub rabi_ground: f64,
}

impl BlochSiegertShift {
    /// `|ΔE_Rabi − ΔE_JC| / |ΔE_JC|` with `ΔE = E_level − E_1`.
    pub fn relative(&self) -> f64 {
        let jc = self.jc_energy - self.jc_ground;
        let rabi = self.rabi_energy - self.rabi_ground;
        (rabi - jc).abs() / jc.abs()
    }

    /// The same ratio on absolute energies; depends on the energy zero.
    pub fn relative_absolute(&self) -> f64 {
        (self.rabi_energy - self.jc_energy).abs() / self.jc_energy.abs()
    }
}

/// Lab-frame level comparison; see [`bloch_siegert`].
pub fn bloch_siegert_shift(p: &ModelParams, g: f64, level: usize, cfg: TruncationConfig) -> Result<BlochSiegertShift> {
    if level == 0 || level > cfg.joint_dim() {
        return Err(Error::InvalidArgument(format!("level must be in 1..={}", cfg.joint_dim())));
    }
    let q = p.with_g(g)?;
    let jc = lowest_levels(ModelKind::JcLab, &q, level, cfg)?;
    let rabi = lowest_levels(ModelKind::RabiLab, &q, level, cfg)?;
    Ok(BlochSiegertShift {
        level,
        jc_energy: jc[level - 1],
        rabi_energy: rabi[level - 1],
        jc_ground: jc[0],
        rabi_ground: rabi[0],
    })
}

/// Relative Bloch-Siegert shift of the transition `E_1 → E_level`.
///
/// Transition energies are measured from each model's own ground state, so
/// the ratio does not depend on where the energy zero sits.
pub fn bloch_siegert(p: &ModelParams, g: f64, level: usize, cfg: TruncationConfig) -> Result<f64> {
    let shift = bloch_siegert_shift(p, g, level, cfg)?;
    if (shift.jc_energy - shift.jc_ground).abs() < 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "JC transition energy to level {level} vanishes; relative shift undefined"
        )));
    }
    Ok(shift.relative())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport {
    /// Root of `E₁⁻(g) + Ω/2` from the closed-form doublet energy.
    pub analytic: f64,
    /// Coupling where the numerically obtained ground state stops being
    /// mostly `|1⟩⊗|0⟩`.
    pub numerical: f64,
    pub quoted_value: f64,
}

impl CrossingReport {
    pub fn discrepancy(&self) -> f64 {
        self.analytic - self.quoted_value
    }

    /// Set when the computed crossing differs from the quoted `g = √2`.
    pub fn disagrees_with_quoted(&self) -> bool {
        self.discrepancy().abs() > 1e-6
    }
}

const BISECTION_TOL: f64 = 1e-10;

/// Coupling at which the lower `n = 1` dressed state drops below the empty
/// state `|1⟩⊗|0⟩` in the JC model.
pub fn ground_crossing(p: &ModelParams, cfg: TruncationConfig, g_lo: f64, g_hi: f64) -> Result<CrossingReport> {
    if !(g_lo.is_finite() && g_hi.is_finite()) || g_lo < 0.0 || g_hi <= g_lo {
        return Err(Error::InvalidArgument(format!("invalid bracket [{g_lo}, {g_hi}]")));
    }
    let gap = |g: f64| -> Result<f64> {
        let q = p.with_g(g)?;
        Ok(jc_doublet_analytic(1, &q)?.lower.energy - empty_state_energy(&q))
    };
    let analytic = bisect(g_lo, g_hi, gap)?;

    let empty = cfg.index(Qubit::Ground, 0);
    let overlap = |g: f64| -> Result<f64> {
        let q = p.with_g(g)?;
        let es = hermitian_eig_range(&build_jc(&q, cfg, Frame::Lab), 0..1, DEFAULT_TOL)?;
        Ok(es.vectors[0][empty].norm() - 0.5)
    };
    let numerical = bisect(g_lo, g_hi, overlap)?;
    Ok(CrossingReport {
        analytic,
        numerical,
        quoted_value: QUOTED_CROSSING_G,
    })
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_max: usize,
    pub values: Vec<f64>,
    /// `values − previous row values`; `None` on the first row.
    pub differences: Option<Vec<f64>>,
}

impl ConvergenceRow {
    pub fn max_abs_difference(&self) -> Option<f64> {
        self.differences
            .as_ref()
            .map(|d| d.iter().map(|x| x.abs()).fold(0.0, f64::max))
    }
}

/// The `k` lowest levels for every truncation in `n_list` (ascending).
pub fn convergence_study(
    kind: ModelKind,
    p: &ModelParams,
    g: f64,
    k: usize,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    convergence_study_with(Exec::default(), kind, p, g, k, n_list)
}

pub fn convergence_study_with(
    exec: Exec,
    kind: ModelKind,
    p: &ModelParams,
    g: f64,
    k: usize,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("n_list must be strictly ascending".into()));
    }
    let q = p.with_g(g)?;
    let cfgs: Vec<TruncationConfig> = n_list.iter().map(|&n| TruncationConfig::new(n)).collect::<Result<_>>()?;
    if let Some(smallest) = cfgs.first() {
        if k == 0 || k > smallest.joint_dim() {
            return Err(Error::InvalidArgument(format!(
                "{k} levels requested but n_max={} has only {}",
                smallest.n_max(),
                smallest.joint_dim()
            )));
        }
    }
    let spectra = exec.try_map(&cfgs, |&c| lowest_levels(kind, &q, k, c))?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(spectra.len());
    for (c, values) in cfgs.iter().zip(spectra) {
        let differences = rows
            .last()
            .map(|prev| values.iter().zip(&prev.values).map(|(a, b)| a - b).collect());
        rows.push(ConvergenceRow {
            n_max: c.n_max(),
            values,
            differences,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::jc_lab_spectrum_analytic;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cfg(n: usize) -> TruncationConfig {
        TruncationConfig::new(n).unwrap()
    }

    fn resonant() -> ModelParams {
        ModelParams::new(1.0, 0.0).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = default_g_grid();
        assert_eq!(g.len(), 151);
        assert_eq!(g[0], 0.0);
        assert!((g[150] - 1.5).abs() < 1e-12);
        assert!(g_grid(1.0, 0.5, 0.1).is_err());
        assert!(g_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn decoupled_ladder() {
        let t = spectrum_sweep(ModelKind::RabiLab, &resonant(), &[0.0], 5, cfg(10)).unwrap();
        let expected = [-0.5, 0.5, 0.5, 1.5, 1.5];
        for (a, b) in t.levels[0].iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn too_many_levels_is_an_error() {
        assert!(spectrum_sweep(ModelKind::JcLab, &resonant(), &[0.1], 9, cfg(3)).is_err());
        assert!(spectrum_sweep(ModelKind::JcLab, &resonant(), &[0.1], 0, cfg(3)).is_err());
    }

    #[test]
    fn jc_rows_match_closed_forms() {
        let c = cfg(40);
        let grid = [0.0, 0.05, 0.3, 0.8, 1.2];
        for delta in [0.0, 0.5] {
            let p = ModelParams::from_detuning(delta, 0.0).unwrap();
            let t = spectrum_sweep(ModelKind::JcLab, &p, &grid, 11, c).unwrap();
            for (row, &g) in t.levels.iter().zip(&grid) {
                let ana = jc_lab_spectrum_analytic(&p.with_g(g).unwrap(), c);
                for (a, b) in row.iter().zip(&ana) {
                    assert!((a - b).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn sequential_and_parallel_sweeps_agree() {
        let grid = [0.0, 0.2, 0.4, 0.6];
        let a = spectrum_sweep_with(Exec::Sequential, ModelKind::RabiLab, &resonant(), &grid, 6, cfg(30)).unwrap();
        let b = spectrum_sweep_with(Exec::Parallel, ModelKind::RabiLab, &resonant(), &grid, 6, cfg(30)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bloch_siegert_limits() {
        let c = cfg(40);
        assert_eq!(bloch_siegert(&resonant(), 0.0, 2, c).unwrap(), 0.0);
        assert!(bloch_siegert(&resonant(), 0.1, 1, c).is_err());
        assert!(bloch_siegert(&resonant(), 0.1, 0, c).is_err());
        // transition shift grows steeply with coupling
        let weak = bloch_siegert(&resonant(), 0.01, 2, c).unwrap();
        let strong = bloch_siegert(&resonant(), 0.1, 2, c).unwrap();
        assert!(weak < 1e-5 && strong > 1e2 * weak);
        assert!((3e-4..3e-3).contains(&strong), "{strong}");
    }

    #[test]
    fn crossing_closed_form() {
        // E₁⁻ = ω/2 − √(Δ²/4 + 2g²) meets −Ω/2 at g* = √(ωΩ/2).
        let c = cfg(12);
        let r = ground_crossing(&resonant(), c, 0.1, 1.0).unwrap();
        assert!((r.analytic - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((r.numerical - r.analytic).abs() < 1e-6);
        assert!(r.disagrees_with_quoted());
        for omega in [0.5, 2.0] {
            let p = ModelParams::with_omega(omega, omega, 0.0).unwrap();
            let r = ground_crossing(&p, c, 0.01, 3.0).unwrap();
            assert!((r.analytic - omega * FRAC_1_SQRT_2).abs() < 1e-9);
        }
        let p = ModelParams::from_detuning(0.5, 0.0).unwrap();
        let r = ground_crossing(&p, c, 0.1, 2.0).unwrap();
        assert!((r.analytic - (1.5f64 / 2.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn crossing_without_sign_change() {
        let r = ground_crossing(&resonant(), cfg(8), 0.1, 0.5);
        assert!(matches!(r, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn jc_convergence_is_exact() {
        let rows = convergence_study(ModelKind::JcLab, &resonant(), 0.7, 11, &[12, 20, 30]).unwrap();
        assert!(rows[0].differences.is_none());
        for row in &rows[1..] {
            assert!(row.max_abs_difference().unwrap() <= 1e-12);
        }
        let rows = convergence_study(ModelKind::RabiLab, &resonant(), 0.0, 11, &[10, 20]).unwrap();
        assert!(rows[1].max_abs_difference().unwrap() <= 1e-12);
    }

    #[test]
    fn convergence_rejects_unsorted_list() {
        assert!(convergence_study(ModelKind::RabiLab, &resonant(), 0.5, 3, &[20, 10]).is_err());
    }

    #[test]
    fn rabi_ground_refinement_shrinks() {
        let rows = convergence_study(ModelKind::RabiLab, &resonant(), 1.0, 1, &[10, 14, 18, 22, 26]).unwrap();
        let diffs: Vec<f64> = rows[1..].iter().map(|r| r.max_abs_difference().unwrap()).collect();
        for w in diffs.windows(2) {
            assert!(w[1] < w[0], "{diffs:?}");
        }
    }
}
