//! Release acceptance checks. Every tolerance is fixed here; a criterion
//! either holds at its bound or is reported as failed.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt::{self, Write as _};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::berry::{
    connection_curve, eig_family_with, generator_phase, phase_distance, wilson_loop, GaugeConvention, LoopResult,
    TrackedFamily, BERRY_N_MAX, DEFAULT_PHI_NODES,
};
use crate::error::Result;
use crate::exec::Exec;
use crate::fock::TruncationConfig;
use crate::linalg::{hermitian_eig, hermitian_eigvals, inner, ComplexMatrix, C64, DEFAULT_TOL};
use crate::models::{symmetry_ops, ModelKind, ModelParams};
use crate::spectra::{
    bloch_siegert, bloch_siegert_shift, convergence_study_with, default_g_grid, ground_crossing, spectrum_sweep_with,
    SWEEP_N_MAX,
};
use crate::surfaces::{berry_boa_jc, berry_exact_jc, rho_from_photon_number, JcState, Sign};

pub const EIGEN_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const JC_ORACLE_TOL: f64 = 1e-8;
pub const BS_SMALL_BOUND: f64 = 1e-4;
pub const BS_BRACKET: (f64, f64) = (3e-4, 3e-3);
pub const CROSSING_TOL: f64 = 1e-6;
pub const PHASE_TOL: f64 = 5e-3;
pub const GAUGE_TOL: f64 = 1e-10;
pub const CONVERGENCE_TOL: f64 = 1e-8;
const SEED: u64 = 0x4a43_5261_6269;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "eigensolver soundness"),
    (2, "model symmetries"),
    (3, "JC analytic doublets"),
    (4, "coupling sweep and Bloch-Siegert shift"),
    (5, "JC ground-state crossing"),
    (6, "JC Berry oracle chain"),
    (7, "Wilson loop gauge invariance"),
    (8, "parallel-transport consistency"),
    (9, "generator identity for the Rabi loop"),
    (10, "Rabi truncation convergence"),
    (11, "mean-field limit of the JC phase"),
    (12, "Rabi anchor-gauge loop investigation"),
];

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Investigation items report values; their status follows the criteria they rely on.
    pub investigation: bool,
    pub summary: String,
    pub details: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
    /// Long-form report attached to the investigation item.
    #[serde(skip)]
    pub report: Option<String>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.passed, self.investigation) {
            (true, false) => "PASS",
            (false, _) => "FAIL",
            (true, true) => "REPORT",
        };
        write!(
            f,
            "criterion {:>2} [{status}] {}: {} ({:.1}s)",
            self.id,
            self.title,
            self.summary,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct FamilyKey {
    kind: ModelKind,
    qubit_omega: u64,
    g: u64,
    level: usize,
    steps: usize,
    n_max: usize,
}

type SharedFamily = Arc<std::result::Result<TrackedFamily, crate::Error>>;

/// Runs criteria, sharing tracked families between the ones that use the
/// same loop.
pub struct Verifier {
    exec: Exec,
    families: Mutex<HashMap<FamilyKey, SharedFamily>>,
}

impl Default for Verifier {
    fn default() -> Self {
        Self::new(Exec::default())
    }
}

fn jc_params(delta: f64, g: f64) -> ModelParams {
    ModelParams::from_detuning(delta, g).expect("valid JC parameters")
}

fn rabi_params(g: f64) -> ModelParams {
    ModelParams::new(1.0, g).expect("valid Rabi parameters")
}

fn cfg(n_max: usize) -> TruncationConfig {
    TruncationConfig::new(n_max).expect("n_max >= 1")
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

struct Tally {
    passed: bool,
    details: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn fail(&mut self, line: String) {
        self.check(false, line);
    }
}

impl Verifier {
    pub fn new(exec: Exec) -> Self {
        Self {
            exec,
            families: Mutex::new(HashMap::new()),
        }
    }

    /// Level-1 family at `K = 720`, `n_max = 150`.
    pub fn family(&self, kind: ModelKind, p: &ModelParams) -> SharedFamily {
        let key = FamilyKey {
            kind,
            qubit_omega: p.qubit_omega().to_bits(),
            g: p.g().to_bits(),
            level: 1,
            steps: DEFAULT_PHI_NODES,
            n_max: BERRY_N_MAX,
        };
        if let Some(f) = self.families.lock().expect("cache lock").get(&key) {
            return Arc::clone(f);
        }
        let f = Arc::new(eig_family_with(self.exec, kind, p, 1, DEFAULT_PHI_NODES, cfg(BERRY_N_MAX)));
        self.families
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&f));
        f
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        CRITERIA.iter().map(|&(id, _)| self.run(id)).collect()
    }

    pub fn run(&self, id: u8) -> Outcome {
        let start = Instant::now();
        let title = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .unwrap_or("unknown criterion");
        let (tally, report) = match id {
            1 => (self.eigensolver(), None),
            2 => (self.symmetries(), None),
            3 => (self.jc_oracle(), None),
            4 => (self.bloch_siegert(), None),
            5 => (self.crossing(), None),
            6 => (self.oracle_chain(), None),
            7 => (self.gauge_invariance(), None),
            8 => (self.parallel_transport(), None),
            9 => (self.generator_identity(), None),
            10 => (self.truncation(), None),
            11 => (self.boa_limit(), None),
            12 => {
                let (t, r) = self.investigation();
                (t, Some(r))
            }
            _ => {
                let mut t = Tally::new();
                t.fail(format!("no criterion {id}"));
                (t, None)
            }
        };
        let summary = tally
            .details
            .iter()
            .find(|d| d.starts_with("FAIL"))
            .or(tally.details.last())
            .cloned()
            .unwrap_or_default();
        Outcome {
            id,
            title,
            passed: tally.passed,
            investigation: id == 12,
            summary,
            details: tally.details,
            elapsed: start.elapsed(),
            report,
        }
    }

    fn eigensolver(&self) -> Tally {
        let mut t = Tally::new();
        let mut rng = StdRng::seed_from_u64(SEED);
        for dim in [2usize, 31, 200] {
            let (mut residual, mut ortho, mut shift): (f64, f64, f64) = (0.0, 0.0, 0.0);
            let mut errors = 0;
            for _ in 0..50 {
                let mut a = ComplexMatrix::zeros(dim);
                for i in 0..dim {
                    a[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
                    for j in (i + 1)..dim {
                        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        a[(i, j)] = z;
                        a[(j, i)] = z.conj();
                    }
                }
                let scale = a.max_abs();
                let c = rng.gen_range(-5.0..5.0);
                let shifted = &a + &ComplexMatrix::identity(dim).scale_real(c);
                let (Ok(sys), Ok(sv)) = (hermitian_eig(&a, DEFAULT_TOL), hermitian_eigvals(&shifted, DEFAULT_TOL)) else {
                    errors += 1;
                    continue;
                };
                for (v, &lambda) in sys.vectors.iter().zip(&sys.values) {
                    let av = a.matvec(v).expect("matching dims");
                    let r = av.iter().zip(v).map(|(x, y)| (x - y * lambda).norm()).fold(0.0, f64::max);
                    residual = residual.max(r / scale);
                }
                for i in 0..dim {
                    for j in i..dim {
                        let o = inner(&sys.vectors[i], &sys.vectors[j]);
                        let target = if i == j { 1.0 } else { 0.0 };
                        ortho = ortho.max((o - target).norm());
                    }
                }
                for (s, v) in sv.iter().zip(&sys.values) {
                    shift = shift.max((s - (v + c)).abs());
                }
            }
            t.check(
                errors == 0 && residual <= EIGEN_TOL && ortho <= EIGEN_TOL && shift <= EIGEN_TOL,
                format!(
                    "dim {dim}: 50 matrices, residual/maxabs {}, orthonormality {}, shift {}, solver errors {errors}",
                    sci(residual),
                    sci(ortho),
                    sci(shift)
                ),
            );
        }
        t
    }

    fn symmetries(&self) -> Tally {
        let mut t = Tally::new();
        let c = cfg(SWEEP_N_MAX);
        let (n_total, parity) = symmetry_ops(c);
        for g in [0.01, 0.1, 1.0] {
            let p = rabi_params(g);
            for (kind, op, name) in [
                (ModelKind::JcLab, &n_total, "[H_JC, N]"),
                (ModelKind::RabiLab, &parity, "[H_Rabi, P]"),
            ] {
                let h = kind.build(&p, c);
                let norm = h.commutator(op).expect("same dims").frobenius_norm();
                let bound = SYMMETRY_TOL * h.max_abs();
                t.check(norm <= bound, format!("g={g}: |{name}|_F = {} (bound {})", sci(norm), sci(bound)));
            }
        }
        t
    }

    fn jc_oracle(&self) -> Tally {
        let mut t = Tally::new();
        let c = cfg(SWEEP_N_MAX);
        for delta in [0.0, 0.5] {
            for g in [0.01, 0.1, 1.0] {
                let p = jc_params(delta, g);
                let values = match hermitian_eigvals(&ModelKind::JcLab.build(&p, c), DEFAULT_TOL) {
                    Ok(v) => v,
                    Err(e) => {
                        t.fail(format!("delta={delta} g={g}: {e}"));
                        continue;
                    }
                };
                let mut worst: f64 = 0.0;
                for n in 1..=10 {
                    let nf = n as f64;
                    let split = (0.25 * delta * delta + 2.0 * g * g * nf).sqrt();
                    for e in [nf - 0.5 - split, nf - 0.5 + split] {
                        let nearest = values.iter().map(|v| (v - e).abs()).fold(f64::INFINITY, f64::min);
                        worst = worst.max(nearest);
                    }
                }
                t.check(
                    worst <= JC_ORACLE_TOL,
                    format!("delta={delta} g={g}: max doublet deviation {} for n <= 10", sci(worst)),
                );
            }
        }
        t
    }

    fn bloch_siegert(&self) -> Tally {
        let mut t = Tally::new();
        let c = cfg(SWEEP_N_MAX);
        let p = rabi_params(0.0);
        let grid = default_g_grid();
        for kind in [ModelKind::JcLab, ModelKind::RabiLab] {
            match spectrum_sweep_with(self.exec, kind, &p, &grid, 11, c) {
                Ok(table) => {
                    let ok = table.levels.len() == grid.len()
                        && table
                            .levels
                            .iter()
                            .all(|row| row.len() == 11 && row.windows(2).all(|w| w[0] <= w[1]));
                    t.check(
                        ok,
                        format!(
                            "{kind}: {} couplings x 11 levels, E1(g=0) = {}",
                            table.levels.len(),
                            table.levels[0][0]
                        ),
                    );
                }
                Err(e) => t.fail(format!("{kind} sweep: {e}")),
            }
        }
        match bloch_siegert(&p, 0.001, 2, c) {
            Ok(r) => t.check(
                r <= BS_SMALL_BOUND,
                format!("g=0.001: relative level-2 shift {} (bound {BS_SMALL_BOUND:e})", sci(r)),
            ),
            Err(e) => t.fail(format!("g=0.001: {e}")),
        }
        match bloch_siegert_shift(&p, 0.1, 2, c) {
            Ok(s) => {
                let r = s.relative();
                t.check(
                    (BS_BRACKET.0..=BS_BRACKET.1).contains(&r),
                    format!(
                        "g=0.1: relative level-2 shift {} in [{:e}, {:e}] (absolute-energy ratio {})",
                        sci(r),
                        BS_BRACKET.0,
                        BS_BRACKET.1,
                        sci(s.relative_absolute())
                    ),
                );
            }
            Err(e) => t.fail(format!("g=0.1: {e}")),
        }
        t
    }

    fn crossing(&self) -> Tally {
        let mut t = Tally::new();
        match ground_crossing(&rabi_params(0.0), cfg(SWEEP_N_MAX), 0.1, 1.5) {
            Ok(r) => {
                let diff = (r.analytic - r.numerical).abs();
                t.check(
                    diff <= CROSSING_TOL,
                    format!(
                        "analytic g* = {:.10}, numerical g* = {:.10}, difference {}",
                        r.analytic,
                        r.numerical,
                        sci(diff)
                    ),
                );
                t.check(
                    r.disagrees_with_quoted(),
                    format!(
                        "quoted value {:.10} differs by {:.6}: discrepancy flagged = {}",
                        r.quoted_value,
                        r.discrepancy(),
                        r.disagrees_with_quoted()
                    ),
                );
            }
            Err(e) => t.fail(format!("crossing search: {e}")),
        }
        t
    }

    fn oracle_chain(&self) -> Tally {
        let mut t = Tally::new();
        let c = cfg(BERRY_N_MAX);
        for delta in [0.0, 0.5] {
            for g in [0.1, 1.0] {
                let p = jc_params(delta, g);
                let label = format!("delta={delta} g={g}");
                let family = self.family(ModelKind::JcLab, &p);
                let wilson = match family.as_ref() {
                    Ok(f) => wilson_loop(f),
                    Err(e) => Err(e.clone()),
                };
                let generator = generator_phase(ModelKind::JcLab, &p, 1, c);
                let (w, gen) = match (wilson, generator) {
                    (Ok(w), Ok(gen)) => (w.gamma, gen),
                    (Err(e), _) | (_, Err(e)) => {
                        t.fail(format!("{label}: {e}"));
                        continue;
                    }
                };
                let d = phase_distance(w, gen);
                t.check(
                    d <= PHASE_TOL,
                    format!("{label}: wilson {w:.9}, generator {gen:.9}, distance {}", sci(d)),
                );
                if delta == 0.0 {
                    let exact = berry_exact_jc(JcState::Dressed { n: 1, sign: Sign::Minus }, &p);
                    let (dw, dg) = (phase_distance(w, exact), phase_distance(gen, exact));
                    t.check(
                        dw <= PHASE_TOL && dg <= PHASE_TOL && phase_distance(w, PI) <= PHASE_TOL,
                        format!(
                            "{label}: closed form {exact:.9}, distances wilson {} generator {}",
                            sci(dw),
                            sci(dg)
                        ),
                    );
                }
            }
        }
        t
    }

    fn gauge_invariance(&self) -> Tally {
        let mut t = Tally::new();
        let family = self.family(ModelKind::RabiLab, &rabi_params(0.1));
        let f = match family.as_ref() {
            Ok(f) => f,
            Err(e) => {
                t.fail(format!("Rabi g=0.1 family: {e}"));
                return t;
            }
        };
        let reference = match wilson_loop(f) {
            Ok(w) => w.gamma,
            Err(e) => {
                t.fail(format!("wilson loop: {e}"));
                return t;
            }
        };
        let mut rng = StdRng::seed_from_u64(SEED ^ 7);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let mut g = f.clone();
            for v in &mut g.vectors {
                let phase = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
                v.iter_mut().for_each(|z| *z *= phase);
            }
            match wilson_loop(&g) {
                Ok(w) => worst = worst.max(phase_distance(w.gamma, reference)),
                Err(_) => worst = f64::INFINITY,
            }
        }
        t.check(
            worst <= GAUGE_TOL,
            format!("Rabi g=0.1, 20 random rephasings: max change {} (gamma {reference:.12})", sci(worst)),
        );
        t
    }

    fn loop_pair(&self, kind: ModelKind, p: &ModelParams) -> Result<(LoopResult, LoopResult)> {
        let family = self.family(kind, p);
        let f = family.as_ref().as_ref().map_err(Clone::clone)?;
        Ok((wilson_loop(f)?, connection_curve(f, GaugeConvention::ParallelTransport)?))
    }

    fn parallel_transport(&self) -> Tally {
        let mut t = Tally::new();
        for g in [0.01, 1.0] {
            for (kind, p, name) in [
                (ModelKind::JcLab, jc_params(0.5, g), "JC delta=0.5"),
                (ModelKind::RabiLab, rabi_params(g), "Rabi"),
            ] {
                match self.loop_pair(kind, &p) {
                    Ok((w, c)) => {
                        let d = phase_distance(w.gamma, c.gamma);
                        t.check(
                            d <= w.residual,
                            format!(
                                "{name} g={g}: wilson {:.9}, connection {:.9}, difference {} (residual {})",
                                w.gamma,
                                c.gamma,
                                sci(d),
                                sci(w.residual)
                            ),
                        );
                    }
                    Err(e) => t.fail(format!("{name} g={g}: {e}")),
                }
            }
        }
        t
    }

    fn generator_identity(&self) -> Tally {
        let mut t = Tally::new();
        for g in [0.01, 0.1, 1.0] {
            let p = rabi_params(g);
            let family = self.family(ModelKind::RabiLab, &p);
            let res = family
                .as_ref()
                .as_ref()
                .map_err(Clone::clone)
                .and_then(wilson_loop)
                .and_then(|w| Ok((w, generator_phase(ModelKind::RabiLab, &p, 1, cfg(BERRY_N_MAX))?)));
            match res {
                Ok((w, gen)) => {
                    let d = phase_distance(w.gamma, gen);
                    t.check(
                        d <= PHASE_TOL,
                        format!("g={g}: wilson {:.9}, 2pi<n> = {gen:.9}, distance {}", w.gamma, sci(d)),
                    );
                }
                Err(e) => t.fail(format!("g={g}: {e}")),
            }
        }
        t
    }

    fn truncation(&self) -> Tally {
        let mut t = Tally::new();
        match convergence_study_with(self.exec, ModelKind::RabiLab, &rabi_params(1.0), 1.0, 11, &[300, 500]) {
            Ok(rows) => {
                let d = rows[1].max_abs_difference().unwrap_or(f64::INFINITY);
                t.check(
                    d <= CONVERGENCE_TOL,
                    format!("Rabi g=1, 11 levels: max change n_max 300 -> 500 = {}", sci(d)),
                );
            }
            Err(e) => t.fail(format!("convergence study: {e}")),
        }
        t
    }

    fn boa_limit(&self) -> Tally {
        let mut t = Tally::new();
        let p = jc_params(0.5, 0.1);
        let mut diffs = Vec::new();
        let mut doublet = Vec::new();
        for n in [1usize, 10, 100] {
            let boa = match berry_boa_jc(rho_from_photon_number(n), &p, Sign::Plus) {
                Ok(b) => b,
                Err(e) => {
                    t.fail(format!("n={n}: {e}"));
                    return t;
                }
            };
            diffs.push((boa - berry_exact_jc(JcState::Dressed { n, sign: Sign::Plus }, &p)).abs());
            // the n-excitation doublet enters the exact formula as g^2 * 2n
            let m = JcState::Dressed { n: 2 * n - 1, sign: Sign::Plus };
            doublet.push((boa - berry_exact_jc(m, &p)).abs());
        }
        t.details.push(format!(
            "info against the n-excitation doublet: {}, {}, {}",
            sci(doublet[0]),
            sci(doublet[1]),
            sci(doublet[2])
        ));
        t.check(
            diffs[0] > diffs[1] && diffs[1] > diffs[2],
            format!(
                "delta=0.5 g=0.1, |boa(rho^2=2n+1) - exact(n)| for n=1,10,100: {}, {}, {}",
                sci(diffs[0]),
                sci(diffs[1]),
                sci(diffs[2])
            ),
        );
        t
    }

    fn investigation(&self) -> (Tally, String) {
        let mut t = Tally::new();
        let mut report = String::new();
        let _ = writeln!(
            report,
            "Rabi model, first excited level, omega = Omega = 1, n_max = {BERRY_N_MAX}, K = {DEFAULT_PHI_NODES}"
        );
        let _ = writeln!(
            report,
            "closed-loop value of the anchor-gauge connection against 0 and against 2pi<n> (tolerance {PHASE_TOL:e})\n"
        );
        let _ = writeln!(
            report,
            "{:>6} {:>8} {:>6} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14}  verdict",
            "g", "<n>", "anchor", "anchor K=180", "anchor K=360", "anchor K=720", "wilson", "parallel", "2pi<n>", "2pi(<n>-m)"
        );
        for g in [0.001, 0.01, 0.1, 1.0] {
            let p = rabi_params(g);
            let family = self.family(ModelKind::RabiLab, &p);
            let row = family.as_ref().as_ref().map_err(Clone::clone).and_then(|f| {
                let anchored = connection_curve(f, GaugeConvention::AnchorComponent(None))?;
                let mut refined = Vec::new();
                for stride in [4, 2] {
                    refined.push(connection_curve(&f.subsample(stride)?, anchored.gauge)?.unwrapped);
                }
                refined.push(anchored.unwrapped);
                let (w, pt) = (wilson_loop(f)?, connection_curve(f, GaugeConvention::ParallelTransport)?);
                Ok((f.photon_number(), anchored.gauge, refined, w.gamma, pt.gamma))
            });
            match row {
                Ok((nbar, gauge, refined, w, pt)) => {
                    let GaugeConvention::AnchorComponent(Some(index)) = gauge else {
                        unreachable!("anchor gauge resolves its index")
                    };
                    let m = cfg(BERRY_N_MAX).label(index).1 as f64;
                    let closed = refined[2];
                    let generator = TAU * nbar;
                    let near_zero = closed.abs() <= PHASE_TOL;
                    let near_generator = phase_distance(closed, generator) <= PHASE_TOL;
                    let verdict = match (near_zero, near_generator) {
                        (true, true) => "consistent with both (2pi<n> is close to a multiple of 2pi)",
                        (true, false) => "vanishes after closing the loop",
                        (false, true) => "equals 2pi<n> mod 2pi, does not vanish",
                        (false, false) => "matches neither",
                    };
                    let _ = writeln!(
                        report,
                        "{g:>6} {nbar:>8.5} {index:>6} {:>14.9} {:>14.9} {:>14.9} {w:>14.9} {pt:>14.9} {generator:>14.9} {:>14.9}  {verdict}",
                        refined[0],
                        refined[1],
                        refined[2],
                        TAU * (nbar - m)
                    );
                    t.details.push(format!("g={g}: anchor loop {closed:.6}, 2pi<n> {generator:.6}: {verdict}"));
                }
                Err(e) => {
                    let _ = writeln!(report, "{g:>6} error: {e}");
                    t.fail(format!("g={g}: {e}"));
                }
            }
        }
        let rest = [self.parallel_transport(), self.generator_identity()];
        let ok = rest.iter().all(|r| r.passed);
        t.check(ok, format!("report produced; parallel-transport and generator criteria hold = {ok}"));
        let _ = writeln!(
            report,
            "\nThe anchor index is a joint-space component (photon number m); a single-valued gauge\n\
             closes the loop at 2pi(<n> - m), which agrees with the Wilson loop modulo 2pi."
        );
        (t, report)
    }
}
