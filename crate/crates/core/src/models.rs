//! Jaynes-Cummings and Rabi Hamiltonians, the phase-space rotation
//! `U(φ) = exp(−i n̂ φ)`, the analytic JC dressed states and the symmetry
//! operators of both models.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{embed, ladder_ops, quadrature_ops, qubit_ops, Qubit, TruncationConfig};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// Physical parameters in units of the resonator frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    qubit_omega: f64,
    g: f64,
}

impl ModelParams {
    /// `ω = 1`, qubit splitting `Ω`, coupling `g`.
    pub fn new(qubit_omega: f64, g: f64) -> Result<Self> {
        Self::with_omega(1.0, qubit_omega, g)
    }

    /// `ω = 1` and `Ω = 1 + Δ`.
    pub fn from_detuning(delta: f64, g: f64) -> Result<Self> {
        Self::new(1.0 + delta, g)
    }

    pub fn with_omega(omega: f64, qubit_omega: f64, g: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        if !(qubit_omega.is_finite() && qubit_omega >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Omega must be non-negative, got {qubit_omega}"
            )));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidArgument(format!("g must be non-negative, got {g}")));
        }
        Ok(Self { omega, qubit_omega, g })
    }

    /// Resonator frequency ω.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Qubit splitting Ω.
    pub fn qubit_omega(&self) -> f64 {
        self.qubit_omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Δ = Ω − ω.
    pub fn delta(&self) -> f64 {
        self.qubit_omega - self.omega
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::with_omega(self.omega, self.qubit_omega, g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    JaynesCummings,
    Rabi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Lab,
    /// Quadrature representation; for JC this is the interaction picture.
    Quadrature,
}

impl FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lab" => Ok(Frame::Lab),
            "quadrature" | "quad" => Ok(Frame::Quadrature),
            other => Err(Error::InvalidArgument(format!("unknown frame '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    JcLab,
    JcQuadrature,
    RabiLab,
    RabiQuadrature,
}

impl ModelKind {
    pub fn new(model: Model, frame: Frame) -> Self {
        match (model, frame) {
            (Model::JaynesCummings, Frame::Lab) => ModelKind::JcLab,
            (Model::JaynesCummings, Frame::Quadrature) => ModelKind::JcQuadrature,
            (Model::Rabi, Frame::Lab) => ModelKind::RabiLab,
            (Model::Rabi, Frame::Quadrature) => ModelKind::RabiQuadrature,
        }
    }

    pub fn model(self) -> Model {
        match self {
            ModelKind::JcLab | ModelKind::JcQuadrature => Model::JaynesCummings,
            ModelKind::RabiLab | ModelKind::RabiQuadrature => Model::Rabi,
        }
    }

    pub fn frame(self) -> Frame {
        match self {
            ModelKind::JcLab | ModelKind::RabiLab => Frame::Lab,
            ModelKind::JcQuadrature | ModelKind::RabiQuadrature => Frame::Quadrature,
        }
    }

    pub fn build(self, p: &ModelParams, cfg: TruncationConfig) -> ComplexMatrix {
        match self.model() {
            Model::JaynesCummings => build_jc(p, cfg, self.frame()),
            Model::Rabi => build_rabi(p, cfg, self.frame()),
        }
    }

    /// Energy added by this frame relative to the lab frame, where
    /// applicable: the zero-point `ω/2` of the Rabi quadrature form.
    pub fn zero_point_offset(self, p: &ModelParams) -> f64 {
        match self {
            ModelKind::RabiQuadrature => 0.5 * p.omega(),
            _ => 0.0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::JcLab => "jc",
            ModelKind::JcQuadrature => "jc_quadrature",
            ModelKind::RabiLab => "rabi",
            ModelKind::RabiQuadrature => "rabi_quadrature",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jc" | "jc_lab" => Ok(ModelKind::JcLab),
            "jc_quadrature" => Ok(ModelKind::JcQuadrature),
            "rabi" | "rabi_lab" => Ok(ModelKind::RabiLab),
            "rabi_quadrature" => Ok(ModelKind::RabiQuadrature),
            other => Err(Error::InvalidArgument(format!("unknown model '{other}'"))),
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn joint(field: Option<&ComplexMatrix>, qubit: Option<&ComplexMatrix>, cfg: TruncationConfig) -> ComplexMatrix {
    embed(field, qubit, cfg).expect("operators built for this truncation")
}

/// Lab: `ω a†a + (Ω/2)σz + g√2 (a† + a)σx`.
/// Quadrature: `ω(p̂²/2 + x̂²/2) + (Ω/2)σz + 2g x̂ σx`.
pub fn build_rabi(p: &ModelParams, cfg: TruncationConfig, frame: Frame) -> ComplexMatrix {
    let q = qubit_ops();
    let sz = joint(None, Some(&q.sz), cfg).scale_real(0.5 * p.qubit_omega());
    match frame {
        Frame::Lab => {
            let l = ladder_ops(cfg);
            let field = joint(Some(&l.n_hat), None, cfg).scale_real(p.omega());
            let coupling = joint(Some(&(&l.a + &l.a_dag)), Some(&q.sx), cfg).scale_real(p.g() * SQRT_2);
            &(&field + &sz) + &coupling
        }
        Frame::Quadrature => {
            let (x, pq) = quadrature_ops(cfg);
            let osc = (&(&pq * &pq) + &(&x * &x)).scale_real(0.5 * p.omega());
            let field = joint(Some(&osc), None, cfg);
            let coupling = joint(Some(&x), Some(&q.sx), cfg).scale_real(2.0 * p.g());
            (&(&field + &sz) + &coupling).symmetrized()
        }
    }
}

/// Lab: `ω a†a + (Ω/2)σz + g√2 (a†σ⁻ + σ⁺a)`.
/// Quadrature (interaction picture): `(Δ/2)σz + g(x̂σx + p̂σy)`.
pub fn build_jc(p: &ModelParams, cfg: TruncationConfig, frame: Frame) -> ComplexMatrix {
    let q = qubit_ops();
    match frame {
        Frame::Lab => {
            let l = ladder_ops(cfg);
            let field = joint(Some(&l.n_hat), None, cfg).scale_real(p.omega());
            let sz = joint(None, Some(&q.sz), cfg).scale_real(0.5 * p.qubit_omega());
            let coupling = &joint(Some(&l.a_dag), Some(&q.sm), cfg) + &joint(Some(&l.a), Some(&q.sp), cfg);
            &(&field + &sz) + &coupling.scale_real(p.g() * SQRT_2)
        }
        Frame::Quadrature => {
            let (x, pq) = quadrature_ops(cfg);
            let sz = joint(None, Some(&q.sz), cfg).scale_real(0.5 * p.delta());
            let coupling = &joint(Some(&x), Some(&q.sx), cfg) + &joint(Some(&pq), Some(&q.sy), cfg);
            &sz + &coupling.scale_real(p.g())
        }
    }
}

/// Diagonal of `U(φ) = exp(−i n̂ φ)` on the joint space.
pub fn u_phi_diagonal(phi: f64, cfg: TruncationConfig) -> Vec<C64> {
    (0..cfg.joint_dim())
        .map(|k| {
            let (_, n) = cfg.label(k);
            C64::from_polar(1.0, -(n as f64) * phi)
        })
        .collect()
}

pub fn u_phi(phi: f64, cfg: TruncationConfig) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&u_phi_diagonal(phi, cfg))
}

/// `U(φ) H U(φ)†`, symmetrized so the result is exactly Hermitian.
pub fn rotate_hamiltonian(h: &ComplexMatrix, phi: f64, cfg: TruncationConfig) -> Result<ComplexMatrix> {
    if h.dim() != cfg.joint_dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.joint_dim(),
            found: h.dim(),
        });
    }
    let u = u_phi_diagonal(phi, cfg);
    let rotated = ComplexMatrix::from_fn(h.dim(), |i, j| u[i] * h[(i, j)] * u[j].conj());
    Ok(rotated.symmetrized())
}

/// `N̂ = n̂ + σz/2` and parity `Π = σz ⊗ (−1)^n̂`.
pub fn symmetry_ops(cfg: TruncationConfig) -> (ComplexMatrix, ComplexMatrix) {
    let q = qubit_ops();
    let l = ladder_ops(cfg);
    let n_total = &joint(Some(&l.n_hat), None, cfg) + &joint(None, Some(&q.sz), cfg).scale_real(0.5);
    let parity_diag: Vec<f64> = (0..cfg.joint_dim())
        .map(|k| {
            let (qubit, n) = cfg.label(k);
            let s = if qubit == Qubit::Excited { 1.0 } else { -1.0 };
            if n % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect();
    (n_total, ComplexMatrix::from_real_diagonal(&parity_diag))
}

/// Energy of the uncoupled JC eigenstate `|1⟩⊗|0⟩`.
pub fn empty_state_energy(p: &ModelParams) -> f64 {
    -0.5 * p.qubit_omega()
}

/// One member of a JC dressed doublet, expanded over
/// `(|2⟩⊗|n−1⟩, |1⟩⊗|n⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedState {
    pub energy: f64,
    pub excited_amplitude: f64,
    pub ground_amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedDoublet {
    pub n: usize,
    /// Mixing angle, `tan 2θ = 2g√(2n)/Δ`.
    pub theta: f64,
    pub lower: DressedState,
    pub upper: DressedState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Lower,
    Upper,
}

impl DressedDoublet {
    pub fn energies(&self) -> (f64, f64) {
        (self.lower.energy, self.upper.energy)
    }

    pub fn state(&self, branch: Branch) -> &DressedState {
        match branch {
            Branch::Lower => &self.lower,
            Branch::Upper => &self.upper,
        }
    }

    /// Joint-space vector of one branch; needs `n ≤ n_max`.
    pub fn joint_vector(&self, branch: Branch, cfg: TruncationConfig) -> Result<Vec<C64>> {
        if self.n > cfg.n_max() {
            return Err(Error::InvalidArgument(format!(
                "doublet n={} is outside the truncation n_max={}",
                self.n,
                cfg.n_max()
            )));
        }
        let s = self.state(branch);
        let mut v = vec![ZERO; cfg.joint_dim()];
        v[cfg.index(Qubit::Excited, self.n - 1)] = real(s.excited_amplitude);
        v[cfg.index(Qubit::Ground, self.n)] = real(s.ground_amplitude);
        Ok(v)
    }
}

/// Closed-form JC eigenpair in the excitation block `n ≥ 1`.
///
/// Energies are `ω(n − 1/2) ± √(Δ²/4 + 2g²n)`; the upper state is
/// `(cos θ, sin θ)` and the lower `(−sin θ, cos θ)`.
pub fn jc_doublet_analytic(n: usize, p: &ModelParams) -> Result<DressedDoublet> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "n = 0 is the uncoupled state |1,0>; use empty_state_energy".into(),
        ));
    }
    let nf = n as f64;
    let delta = p.delta();
    let coupling = 2.0 * p.g() * (2.0 * nf).sqrt();
    let theta = if delta == 0.0 {
        FRAC_PI_4
    } else {
        0.5 * coupling.atan2(delta)
    };
    let centre = p.omega() * (nf - 0.5);
    let split = (0.25 * delta * delta + 2.0 * p.g() * p.g() * nf).sqrt();
    let (s, c) = theta.sin_cos();
    Ok(DressedDoublet {
        n,
        theta,
        lower: DressedState {
            energy: centre - split,
            excited_amplitude: -s,
            ground_amplitude: c,
        },
        upper: DressedState {
            energy: centre + split,
            excited_amplitude: c,
            ground_amplitude: s,
        },
    })
}

/// Every eigenvalue of the truncated JC lab-frame Hamiltonian from closed
/// forms, ascending: the empty state, the doublets `1..=n_max`, and the
/// unpaired edge state `|2⟩⊗|n_max⟩`.
pub fn jc_lab_spectrum_analytic(p: &ModelParams, cfg: TruncationConfig) -> Vec<f64> {
    let mut values = vec![empty_state_energy(p)];
    for n in 1..=cfg.n_max() {
        let d = jc_doublet_analytic(n, p).expect("n >= 1");
        values.push(d.lower.energy);
        values.push(d.upper.energy);
    }
    values.push(p.omega() * cfg.n_max() as f64 + 0.5 * p.qubit_omega());
    values.sort_by(f64::total_cmp);
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::quadrature_ops;
    use crate::linalg::{commutator_deviation, hermitian_eigvals, hermitian_eig, inner, DEFAULT_TOL};
    use std::f64::consts::PI;

    fn cfg(n: usize) -> TruncationConfig {
        TruncationConfig::new(n).unwrap()
    }

    fn resonant(g: f64) -> ModelParams {
        ModelParams::new(1.0, g).unwrap()
    }

    #[test]
    fn params_validation_and_detuning() {
        assert!(ModelParams::new(-1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, -0.1).is_err());
        assert!(ModelParams::with_omega(0.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(f64::NAN, 0.1).is_err());
        let p = ModelParams::from_detuning(0.5, 0.2).unwrap();
        assert_eq!(p.qubit_omega(), 1.5);
        assert_eq!(p.delta(), 0.5);
        assert_eq!(p.omega(), 1.0);
    }

    #[test]
    fn frame_and_kind_parsing() {
        assert_eq!("lab".parse::<Frame>().unwrap(), Frame::Lab);
        assert!("rotating".parse::<Frame>().is_err());
        assert_eq!("rabi".parse::<ModelKind>().unwrap(), ModelKind::RabiLab);
        assert!("dicke".parse::<ModelKind>().is_err());
        for kind in [ModelKind::JcLab, ModelKind::JcQuadrature, ModelKind::RabiLab, ModelKind::RabiQuadrature] {
            assert_eq!(kind.tag().parse::<ModelKind>().unwrap(), kind);
            assert_eq!(ModelKind::new(kind.model(), kind.frame()), kind);
        }
    }

    #[test]
    fn decoupled_rabi_spectrum() {
        let c = cfg(10);
        let vals = hermitian_eigvals(&build_rabi(&resonant(0.0), c, Frame::Lab), DEFAULT_TOL).unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-14);
        let expected = [-0.5, 0.5, 0.5, 1.5, 1.5, 2.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_jc_matches_decoupled_rabi() {
        let c = cfg(8);
        let p = resonant(0.0);
        let jc = hermitian_eigvals(&build_jc(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        let rabi = hermitian_eigvals(&build_rabi(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        for (a, b) in jc.iter().zip(&rabi) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn jc_quadrature_is_the_rwa_coupling() {
        let c = cfg(12);
        let p = ModelParams::from_detuning(0.3, 0.17).unwrap();
        let quad = build_jc(&p, c, Frame::Quadrature);
        let q = qubit_ops();
        let l = ladder_ops(c);
        let sz = joint(None, Some(&q.sz), c).scale_real(0.5 * p.delta());
        let rwa = &joint(Some(&l.a), Some(&q.sp), c) + &joint(Some(&l.a_dag), Some(&q.sm), c);
        let expected = &sz + &rwa.scale_real(p.g() * SQRT_2);
        assert!((&quad - &expected).max_abs() <= 1e-12);
    }

    #[test]
    fn small_coupling_jc_and_rabi_agree() {
        let c = cfg(40);
        let p = resonant(0.001);
        let jc = hermitian_eigvals(&build_jc(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        let rabi = hermitian_eigvals(&build_rabi(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        for k in 0..11 {
            assert!((jc[k] - rabi[k]).abs() < 1e-5, "level {k}: {} vs {}", jc[k], rabi[k]);
        }
    }

    #[test]
    fn resonant_first_doublet() {
        let c = cfg(20);
        let p = resonant(0.1);
        let vals = hermitian_eigvals(&build_jc(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        assert!((vals[1] - 0.35858).abs() < 1e-5);
        assert!((vals[2] - 0.64142).abs() < 1e-5);
        let d = jc_doublet_analytic(1, &p).unwrap();
        assert_eq!(d.theta, FRAC_PI_4);
        assert!((d.lower.energy - (0.5 - 0.02f64.sqrt())).abs() < 1e-15);
        assert!((vals[1] - d.lower.energy).abs() < 1e-12);
        assert!((vals[2] - d.upper.energy).abs() < 1e-12);
    }

    #[test]
    fn symmetries_commute() {
        let c = cfg(30);
        let (n_total, parity) = symmetry_ops(c);
        for g in [0.01, 0.1, 1.0] {
            let p = resonant(g);
            let jc = build_jc(&p, c, Frame::Lab);
            let zero = ComplexMatrix::zeros(c.joint_dim());
            assert!(commutator_deviation(&jc, &n_total, &zero).unwrap() <= 1e-12 * jc.max_abs());
            let rabi = build_rabi(&p, c, Frame::Lab);
            assert!(commutator_deviation(&rabi, &parity, &zero).unwrap() <= 1e-12 * rabi.max_abs());
            let rabi_q = build_rabi(&p, c, Frame::Quadrature);
            assert!(commutator_deviation(&rabi_q, &parity, &zero).unwrap() <= 1e-12 * rabi_q.max_abs());
        }
        assert_eq!(&parity * &parity, ComplexMatrix::identity(c.joint_dim()));
        let k = c.index(Qubit::Ground, 0);
        assert_eq!(n_total[(k, k)].re, -0.5);
    }

    #[test]
    fn rabi_frames_agree_after_zero_point_offset() {
        let c = cfg(60);
        let p = resonant(0.4);
        let lab = hermitian_eigvals(&build_rabi(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        let quad = hermitian_eigvals(&build_rabi(&p, c, Frame::Quadrature), DEFAULT_TOL).unwrap();
        let offset = ModelKind::RabiQuadrature.zero_point_offset(&p);
        for k in 0..c.n_max() / 4 {
            assert!((quad[k] - offset - lab[k]).abs() < 1e-10, "level {k}");
        }
    }

    #[test]
    fn u_phi_properties() {
        let c = cfg(6);
        let id = ComplexMatrix::identity(c.joint_dim());
        assert!((&u_phi(2.0 * PI, c) - &id).max_abs() < 1e-14);
        assert!((&(&u_phi(0.7, c) * &u_phi(-0.7, c)) - &id).max_abs() < 1e-15);
        let u = u_phi(PI, c);
        for qubit in [Qubit::Excited, Qubit::Ground] {
            let k = c.index(qubit, 1);
            assert!((u[(k, k)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_identity_periodicity_and_dimension_check() {
        let c = cfg(15);
        let h = build_rabi(&resonant(0.3), c, Frame::Lab);
        assert!((&rotate_hamiltonian(&h, 0.0, c).unwrap() - &h).max_abs() < 1e-15);
        let a = rotate_hamiltonian(&h, 1.1, c).unwrap();
        let b = rotate_hamiltonian(&h, 1.1 + 2.0 * PI, c).unwrap();
        assert!((&a - &b).max_abs() < 1e-12);
        assert!(rotate_hamiltonian(&ComplexMatrix::identity(3), 0.1, c).is_err());
    }

    #[test]
    fn rotated_spectrum_is_invariant() {
        let c = cfg(25);
        let h = build_rabi(&resonant(0.5), c, Frame::Lab);
        let base = hermitian_eigvals(&h, DEFAULT_TOL).unwrap();
        for phi in [0.3, 1.7, 4.0] {
            let r = hermitian_eigvals(&rotate_hamiltonian(&h, phi, c).unwrap(), DEFAULT_TOL).unwrap();
            for (a, b) in base.iter().zip(&r) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rotated_rabi_quadrature_coupling() {
        // Conjugation gives 2g(cos φ x̂ + sin φ p̂)σx with p̂ = i(a − a†)/√2.
        let c = cfg(14);
        let p = resonant(0.37);
        let h = build_rabi(&p, c, Frame::Quadrature);
        let (x, pq) = quadrature_ops(c);
        let q = qubit_ops();
        let diag_part = &h - &joint(Some(&x), Some(&q.sx), c).scale_real(2.0 * p.g());
        for phi in [PI / 2.0, 0.9] {
            let rotated = rotate_hamiltonian(&h, phi, c).unwrap();
            let field = &x.scale_real(phi.cos()) + &pq.scale_real(phi.sin());
            let expected = &diag_part + &joint(Some(&field), Some(&q.sx), c).scale_real(2.0 * p.g());
            assert!((&rotated - &expected).max_abs() <= 1e-12);
        }
        // at φ = π/2 the coupling is +2g p̂ σx in this sign convention
        let rotated = rotate_hamiltonian(&h, PI / 2.0, c).unwrap();
        let coupling = &rotated - &diag_part;
        let plus = joint(Some(&pq), Some(&q.sx), c).scale_real(2.0 * p.g());
        assert!((&coupling - &plus).max_abs() <= 1e-12);
    }

    #[test]
    fn rotated_jc_quadrature_structure() {
        let c = cfg(14);
        let p = ModelParams::from_detuning(0.4, 0.2).unwrap();
        let h = build_jc(&p, c, Frame::Quadrature);
        let (x, pq) = quadrature_ops(c);
        let q = qubit_ops();
        let sz = joint(None, Some(&q.sz), c).scale_real(0.5 * p.delta());
        let phi: f64 = 1.3;
        let (s, co) = phi.sin_cos();
        let bx = &x.scale_real(co) + &pq.scale_real(s);
        let by = &pq.scale_real(co) - &x.scale_real(s);
        let coupling = &joint(Some(&bx), Some(&q.sx), c) + &joint(Some(&by), Some(&q.sy), c);
        let consistent = &sz + &coupling.scale_real(p.g());
        let rotated = rotate_hamiltonian(&h, phi, c).unwrap();
        assert!((&rotated - &consistent).max_abs() <= 1e-12);

        // The printed form with prefactor g/√2 and σy field (sin φ x̂ − cos φ p̂)
        // does not reduce to the unrotated Hamiltonian; record that it differs.
        let by_printed = &x.scale_real(s) - &pq.scale_real(co);
        let printed = &sz
            + &(&joint(Some(&bx), Some(&q.sx), c) + &joint(Some(&by_printed), Some(&q.sy), c))
                .scale_real(p.g() / SQRT_2);
        assert!((&rotated - &printed).max_abs() > 1e-2);
    }

    #[test]
    fn doublet_matches_diagonalization_and_is_orthonormal() {
        let c = cfg(30);
        for (delta, g) in [(0.0, 0.1), (0.5, 0.3), (-0.4, 0.05), (0.5, 1.0)] {
            let p = ModelParams::from_detuning(delta, g).unwrap();
            let es = hermitian_eig(&build_jc(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
            let h = build_jc(&p, c, Frame::Lab);
            for n in 1..=10 {
                let d = jc_doublet_analytic(n, &p).unwrap();
                let tan2 = (2.0 * d.theta).tan();
                if delta != 0.0 {
                    assert!((tan2 - 2.0 * g * (2.0 * n as f64).sqrt() / delta).abs() < 1e-9 * tan2.abs().max(1.0));
                }
                for branch in [Branch::Lower, Branch::Upper] {
                    let v = d.joint_vector(branch, c).unwrap();
                    let hv = h.matvec(&v).unwrap();
                    let e = d.state(branch).energy;
                    let res = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm()).fold(0.0, f64::max);
                    assert!(res < 1e-12, "n={n} {branch:?} residual {res}");
                    assert!(es.values.iter().any(|&x| (x - e).abs() < 1e-10));
                }
                let lo = d.joint_vector(Branch::Lower, c).unwrap();
                let up = d.joint_vector(Branch::Upper, c).unwrap();
                assert!(inner(&lo, &up).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn doublet_limits_and_errors() {
        let p = ModelParams::from_detuning(0.5, 0.0).unwrap();
        let d = jc_doublet_analytic(3, &p).unwrap();
        assert_eq!(d.theta, 0.0);
        assert_eq!(d.upper.excited_amplitude, 1.0);
        assert_eq!(d.lower.ground_amplitude, 1.0);
        assert!(jc_doublet_analytic(0, &p).is_err());
        assert!(d.joint_vector(Branch::Lower, cfg(2)).is_err());
    }

    #[test]
    fn analytic_spectrum_matches_full_jc_spectrum() {
        let c = cfg(24);
        let p = ModelParams::from_detuning(0.5, 0.3).unwrap();
        let num = hermitian_eigvals(&build_jc(&p, c, Frame::Lab), DEFAULT_TOL).unwrap();
        let ana = jc_lab_spectrum_analytic(&p, c);
        assert_eq!(num.len(), ana.len());
        for (a, b) in num.iter().zip(&ana) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
