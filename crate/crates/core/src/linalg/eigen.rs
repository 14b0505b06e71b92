//! Hermitian eigensolver: Householder reduction to real symmetric tridiagonal
//! form followed by implicit-shift QL iteration.
//!
//! The reflectors are kept so eigenvectors can be back-transformed either for
//! the whole spectrum or for a contiguous window of levels. In the windowed
//! case the QL plane rotations are recorded and replayed onto unit vectors,
//! which yields exactly the same columns the full accumulation would produce
//! at `O(rotations)` cost per vector.

use std::ops::Range;

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Default residual tolerance, relative to `max_abs(A)`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum QL sweeps spent on any single eigenvalue.
pub const QL_ITERATION_CAP: usize = 50;

/// Eigenvalues in ascending order together with a contiguous window of their
/// unit eigenvectors.
///
/// For a full decomposition the window covers every level. Eigenvector global
/// phases are whatever the reduction produced; callers that need a phase
/// convention fix it themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Index of the first level that has a stored vector.
    pub first: usize,
    /// `vectors[k]` belongs to `values[first + k]`.
    pub vectors: Vec<Vec<C64>>,
    /// max over stored levels of `‖A v - λ v‖_∞`.
    pub residual: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Levels that carry an eigenvector.
    pub fn window(&self) -> Range<usize> {
        self.first..self.first + self.vectors.len()
    }

    pub fn vector(&self, level: usize) -> Option<&[C64]> {
        level
            .checked_sub(self.first)
            .and_then(|k| self.vectors.get(k))
            .map(Vec::as_slice)
    }

    /// Smallest distance from `values[level]` to any other eigenvalue.
    pub fn gap(&self, level: usize) -> f64 {
        let e = self.values[level];
        let below = level
            .checked_sub(1)
            .map(|k| e - self.values[k])
            .unwrap_or(f64::INFINITY);
        let above = self
            .values
            .get(level + 1)
            .map(|&v| v - e)
            .unwrap_or(f64::INFINITY);
        below.min(above)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<EigenSystem> {
    let dim = a.dim();
    hermitian_eig_range(a, 0..dim, tol)
}

/// All eigenvalues plus the eigenvectors of the levels in `levels`
/// (indices into the ascending spectrum).
pub fn hermitian_eig_range(a: &ComplexMatrix, levels: Range<usize>, tol: f64) -> Result<EigenSystem> {
    let scale = validate(a, tol)?;
    let n = a.dim();
    if levels.start > levels.end || levels.end > n {
        return Err(Error::InvalidArgument(format!(
            "level window {}..{} outside spectrum of size {n}",
            levels.start, levels.end
        )));
    }
    let tri = Tridiagonal::reduce(a);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    e.push(0.0);

    let full = levels.len() == n;
    let (values, columns) = if full {
        // Accumulate Zᵀ so each rotation touches two contiguous rows.
        let mut zt = vec![0.0; n * n];
        for i in 0..n {
            zt[i * n + i] = 1.0;
        }
        ql_implicit(&mut d, &mut e, |i, c, s| {
            let (lo, hi) = zt.split_at_mut((i + 1) * n);
            let row_i = &mut lo[i * n..];
            let row_j = &mut hi[..n];
            for (x, y) in row_i.iter_mut().zip(row_j.iter_mut()) {
                let f = *y;
                *y = s * *x + c * f;
                *x = c * *x - s * f;
            }
        })?;
        let order = ascending_order(&d);
        let columns: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| zt[k * n..(k + 1) * n].to_vec())
            .collect();
        (order.iter().map(|&k| d[k]).collect::<Vec<_>>(), columns)
    } else {
        let mut rotations: Vec<(u32, f64, f64)> = Vec::new();
        ql_implicit(&mut d, &mut e, |i, c, s| rotations.push((i as u32, c, s)))?;
        let order = ascending_order(&d);
        let columns = order[levels.clone()]
            .iter()
            .map(|&k| replay_rotations(&rotations, n, k))
            .collect();
        (order.iter().map(|&k| d[k]).collect::<Vec<_>>(), columns)
    };

    let vectors: Vec<Vec<C64>> = columns.into_iter().map(|z| tri.back_transform(&z)).collect();
    let residual = vectors
        .iter()
        .zip(&values[levels.clone()])
        .map(|(v, &lambda)| residual_inf(a, v, lambda))
        .fold(0.0, f64::max);
    let bound = tol * scale;
    if residual > bound {
        return Err(Error::Inaccurate { residual, bound });
    }
    Ok(EigenSystem {
        values,
        first: levels.start,
        vectors,
        residual,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigvals(a: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    validate(a, tol)?;
    let tri = Tridiagonal::reduce(a);
    let mut d = tri.diag;
    let mut e = tri.off;
    e.push(0.0);
    ql_implicit(&mut d, &mut e, |_, _, _| {})?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Returns `max_abs(A)` after checking shape and Hermiticity.
fn validate(a: &ComplexMatrix, tol: f64) -> Result<f64> {
    if a.dim() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let scale = a.max_abs();
    let deviation = a.hermitian_deviation();
    let tolerance = tol * scale;
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(scale)
}

fn ascending_order(d: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    order
}

fn replay_rotations(rotations: &[(u32, f64, f64)], n: usize, column: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[column] = 1.0;
    for &(i, c, s) in rotations.iter().rev() {
        let i = i as usize;
        let (xi, xj) = (x[i], x[i + 1]);
        x[i] = c * xi + s * xj;
        x[i + 1] = -s * xi + c * xj;
    }
    x
}

fn residual_inf(a: &ComplexMatrix, v: &[C64], lambda: f64) -> f64 {
    (0..a.dim())
        .map(|i| {
            let av: C64 = a.row(i).iter().zip(v).map(|(&x, &y)| x * y).sum();
            (av - v[i] * lambda).norm()
        })
        .fold(0.0, f64::max)
}

/// `A = Q T Q†` with `T` real symmetric tridiagonal and
/// `Q = H_0 H_1 ⋯ H_{n-2}`, `H_i = I - τ_i v_i v_i†`.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    reflectors: Vec<Reflector>,
}

struct Reflector {
    tau: C64,
    /// Acts on rows `i+1..n`; `v[0] = 1`.
    v: Vec<C64>,
}

impl Tridiagonal {
    fn reduce(a: &ComplexMatrix) -> Self {
        let n = a.dim();
        // Only the lower triangle of the working copy is kept up to date.
        let mut w: Vec<C64> = a.as_slice().to_vec();
        let mut diag = vec![0.0; n];
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        let mut reflectors = Vec::with_capacity(n.saturating_sub(1));

        for i in 0..n.saturating_sub(1) {
            let s = i + 1;
            let m = n - s;
            let mut x: Vec<C64> = (s..n).map(|r| w[r * n + i]).collect();
            let (beta, tau) = householder(&mut x);
            off.push(beta);
            let v = x;
            if tau != ZERO {
                // p = τ A_sub v, using the lower triangle only.
                let mut p = vec![ZERO; m];
                for r in 0..m {
                    let row = &w[(s + r) * n + s..(s + r) * n + s + r];
                    let vr = v[r];
                    let mut acc = ZERO;
                    for ((&arc, pc), &vc) in row.iter().zip(p[..r].iter_mut()).zip(&v[..r]) {
                        acc += arc * vc;
                        *pc += arc.conj() * vr;
                    }
                    p[r] += acc + w[(s + r) * n + s + r].re * vr;
                }
                for pr in p.iter_mut() {
                    *pr *= tau;
                }
                let pv: C64 = p.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                let alpha = -0.5 * tau * pv;
                let wv: Vec<C64> = p.iter().zip(&v).map(|(&pr, &vr)| pr + alpha * vr).collect();
                for r in 0..m {
                    let (vr, wr) = (v[r], wv[r]);
                    let row = &mut w[(s + r) * n + s..(s + r) * n + s + r + 1];
                    for ((a, &vc), &wc) in row.iter_mut().zip(&v[..=r]).zip(&wv[..=r]) {
                        *a -= vr * wc.conj() + wr * vc.conj();
                    }
                }
            }
            diag[i] = w[i * n + i].re;
            reflectors.push(Reflector { tau, v });
        }
        if n > 0 {
            diag[n - 1] = w[(n - 1) * n + n - 1].re;
        }
        Self {
            diag,
            off,
            reflectors,
        }
    }

    /// Q z for a real tridiagonal eigenvector z.
    fn back_transform(&self, z: &[f64]) -> Vec<C64> {
        let mut x: Vec<C64> = z.iter().map(|&r| C64::new(r, 0.0)).collect();
        for (i, refl) in self.reflectors.iter().enumerate().rev() {
            if refl.tau == ZERO {
                continue;
            }
            let tail = &mut x[i + 1..];
            let proj: C64 = refl.v.iter().zip(tail.iter()).map(|(a, b)| a.conj() * b).sum();
            let f = refl.tau * proj;
            for (xk, &vk) in tail.iter_mut().zip(&refl.v) {
                *xk -= f * vk;
            }
        }
        x
    }
}

/// Overwrites `x` with the reflector vector (leading entry 1) and returns
/// `(β, τ)` such that `(I - τ v v†)† x = β e₁` with real `β`.
fn householder(x: &mut [C64]) -> (f64, C64) {
    let alpha = x[0];
    let tail_norm = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if tail_norm == 0.0 && alpha.im == 0.0 {
        x[0] = C64::new(1.0, 0.0);
        return (alpha.re, ZERO);
    }
    let magnitude = (alpha.norm_sqr() + tail_norm * tail_norm).sqrt();
    let beta = if alpha.re >= 0.0 { -magnitude } else { magnitude };
    let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = (alpha - beta).inv();
    for z in x[1..].iter_mut() {
        *z *= scale;
    }
    x[0] = C64::new(1.0, 0.0);
    (beta, tau)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix with diagonal `d` and
/// couplings `e[i]` between `i` and `i+1` (`e` has length `n`, last entry 0).
/// Every plane rotation on coordinates `(i, i+1)` is reported to `rotate`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut rotate: impl FnMut(usize, f64, f64)) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_ITERATION_CAP {
                return Err(Error::NoConvergence {
                    dim: n,
                    cap: QL_ITERATION_CAP,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotate(i, c, s);
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{inner, ONE};

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    #[test]
    fn pauli_z_spectrum() {
        let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let es = hermitian_eig(&sz, DEFAULT_TOL).unwrap();
        assert_eq!(es.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn pauli_x_vectors_up_to_phase() {
        let es = hermitian_eig(&pauli_x(), DEFAULT_TOL).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-15 && (es.values[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [C64::new(h, 0.0), C64::new(-h, 0.0)];
        let plus = [C64::new(h, 0.0), C64::new(h, 0.0)];
        assert!((inner(&minus, &es.vectors[0]).norm() - 1.0).abs() < 1e-14);
        assert!((inner(&plus, &es.vectors[1]).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_by_one() {
        let a = ComplexMatrix::from_real_diagonal(&[3.5]);
        let es = hermitian_eig(&a, DEFAULT_TOL).unwrap();
        assert_eq!(es.values, vec![3.5]);
        assert_eq!(es.vectors[0], vec![ONE]);
    }

    #[test]
    fn diagonal_returns_sorted_diagonal() {
        let diag = [4.0, -2.0, 0.5, 0.5, -7.25, 3.0];
        let es = hermitian_eig(&ComplexMatrix::from_real_diagonal(&diag), DEFAULT_TOL).unwrap();
        let mut sorted = diag.to_vec();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in es.values.iter().zip(&sorted) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn rejects_non_hermitian_with_deviation() {
        let a = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        match hermitian_eig(&a, DEFAULT_TOL) {
            Err(Error::NotHermitian { deviation, .. }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty() {
        assert!(hermitian_eig(&ComplexMatrix::zeros(0), DEFAULT_TOL).is_err());
    }

    #[test]
    fn window_matches_full_decomposition() {
        let a = ComplexMatrix::from_fn(9, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                C64::new(i * 0.7 - 2.0, 0.0)
            } else {
                C64::new(1.0 / (1.0 + (i - j).abs()), (i - j) * 0.1)
            }
        });
        let full = hermitian_eig(&a, DEFAULT_TOL).unwrap();
        let part = hermitian_eig_range(&a, 3..6, DEFAULT_TOL).unwrap();
        assert_eq!(full.values, part.values);
        assert_eq!(part.window(), 3..6);
        for level in 3..6 {
            let overlap = inner(full.vector(level).unwrap(), part.vector(level).unwrap());
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
        assert!(part.vector(2).is_none());
    }

    #[test]
    fn gap_reports_nearest_neighbour() {
        let es = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.5]), DEFAULT_TOL).unwrap();
        assert_eq!(es.gap(0), 1.0);
        assert_eq!(es.gap(1), 0.5);
        assert_eq!(es.gap(2), 0.5);
    }
}
