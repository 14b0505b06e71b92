//! Truncated Fock-space and qubit operators on the joint qubit ⊗ field space.
//!
//! Basis ordering is qubit-outer, field-inner:
//! `(|2⟩⊗|0⟩, …, |2⟩⊗|n_max⟩, |1⟩⊗|0⟩, …, |1⟩⊗|n_max⟩)`, where `|2⟩` is the
//! excited qubit state (`σz = +1`) and `|1⟩` the ground state.
//!
//! With `p̂ = i(a − a†)/√2` the canonical commutator reads `[x̂, p̂] = −i`.
//! Truncation leaves it wrong in the last Fock row and column; that defect is
//! kept as is.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64, I, ONE, ZERO};

/// Highest retained Fock state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationConfig {
    n_max: usize,
}

impl TruncationConfig {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn field_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn joint_dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Joint-space index of `|qubit⟩ ⊗ |n⟩`.
    pub fn index(&self, qubit: Qubit, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        match qubit {
            Qubit::Excited => n,
            Qubit::Ground => self.field_dim() + n,
        }
    }

    /// Inverse of [`TruncationConfig::index`].
    pub fn label(&self, index: usize) -> (Qubit, usize) {
        if index < self.field_dim() {
            (Qubit::Excited, index)
        } else {
            (Qubit::Ground, index - self.field_dim())
        }
    }
}

/// Qubit basis state; `Excited` is `|2⟩`, `Ground` is `|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Excited,
    Ground,
}

#[derive(Debug, Clone)]
pub struct LadderOps {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub n_hat: ComplexMatrix,
}

pub fn ladder_ops(cfg: TruncationConfig) -> LadderOps {
    let dim = cfg.field_dim();
    let a = ComplexMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let a_dag = a.adjoint();
    let n_hat = ComplexMatrix::from_real_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>());
    LadderOps { a, a_dag, n_hat }
}

/// `x̂ = (a + a†)/√2`, `p̂ = i(a − a†)/√2`.
pub fn quadrature_ops(cfg: TruncationConfig) -> (ComplexMatrix, ComplexMatrix) {
    let LadderOps { a, a_dag, .. } = ladder_ops(cfg);
    let x = (&a + &a_dag).scale_real(FRAC_1_SQRT_2);
    let p = (&a - &a_dag).scale(I * FRAC_1_SQRT_2);
    (x, p)
}

#[derive(Debug, Clone)]
pub struct QubitOps {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
    /// `|2⟩⟨1|`
    pub sp: ComplexMatrix,
    /// `|1⟩⟨2|`
    pub sm: ComplexMatrix,
}

/// Pauli matrices in the `(|2⟩, |1⟩)` basis.
pub fn qubit_ops() -> QubitOps {
    let m = |rows: [[C64; 2]; 2]| ComplexMatrix::from_rows(&rows.map(|r| r.to_vec())).unwrap();
    QubitOps {
        sx: m([[ZERO, ONE], [ONE, ZERO]]),
        sy: m([[ZERO, -I], [I, ZERO]]),
        sz: m([[ONE, ZERO], [ZERO, -ONE]]),
        sp: m([[ZERO, ONE], [ZERO, ZERO]]),
        sm: m([[ZERO, ZERO], [ONE, ZERO]]),
    }
}

/// `qubit_op ⊗ field_op` on the joint space; `None` stands for the identity.
pub fn embed(
    field_op: Option<&ComplexMatrix>,
    qubit_op: Option<&ComplexMatrix>,
    cfg: TruncationConfig,
) -> Result<ComplexMatrix> {
    let id_field;
    let field = match field_op {
        Some(f) => f,
        None => {
            id_field = ComplexMatrix::identity(cfg.field_dim());
            &id_field
        }
    };
    let id_qubit;
    let qubit = match qubit_op {
        Some(q) => q,
        None => {
            id_qubit = ComplexMatrix::identity(2);
            &id_qubit
        }
    };
    if field.dim() != cfg.field_dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.field_dim(),
            found: field.dim(),
        });
    }
    if qubit.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: qubit.dim(),
        });
    }
    Ok(kron(qubit, field))
}
