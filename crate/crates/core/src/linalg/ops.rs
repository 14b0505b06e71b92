use super::matrix::{inner, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Imaginary part of `v†Av` tolerated before the input is declared non-Hermitian.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// `Re(v†Av)` for a Hermitian `A` and unit `v`.
///
/// The imaginary part is checked against [`EXPECTATION_IMAG_TOL`] scaled by
/// `max(1, max_abs(A))`.
pub fn expectation(a: &ComplexMatrix, v: &[C64]) -> Result<f64> {
    let z = expectation_complex(a, v)?;
    let bound = EXPECTATION_IMAG_TOL * a.max_abs().max(1.0);
    if z.im.abs() > bound {
        return Err(Error::NotHermitian {
            deviation: z.im.abs(),
            tolerance: bound,
        });
    }
    Ok(z.re)
}

/// The raw complex value `v†Av`.
pub fn expectation_complex(a: &ComplexMatrix, v: &[C64]) -> Result<C64> {
    let av = a.matvec(v)?;
    Ok(inner(v, &av))
}

/// `‖AB − BA − target‖_F`.
pub fn commutator_deviation(a: &ComplexMatrix, b: &ComplexMatrix, target: &ComplexMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    a.check_same_dim(target)?;
    let c = a.commutator(b)?;
    Ok((&c - target).frobenius_norm())
}

/// Tensor product; block `(i, j)` of the result is `A[i][j]·B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{ONE, ZERO, I};

    fn paulis() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let sx = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let sy = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        (sx, sy, sz)
    }

    #[test]
    fn pauli_algebra() {
        let (sx, sy, sz) = paulis();
        let dev = commutator_deviation(&sx, &sy, &sz.scale(C64::new(0.0, 2.0))).unwrap();
        assert!(dev <= 1e-14);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let (sx, _, _) = paulis();
        let big = ComplexMatrix::identity(3);
        assert!(commutator_deviation(&sx, &big, &big).is_err());
        assert!(commutator_deviation(&sx, &sx, &big).is_err());
    }

    #[test]
    fn kron_identities_and_blocks() {
        let i6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(i6, ComplexMatrix::identity(6));
        let (_, _, sz) = paulis();
        let k = kron(&sz, &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn expectation_rejects_mismatch_and_non_hermitian() {
        let (sx, _, _) = paulis();
        assert!(expectation(&sx, &[ONE]).is_err());
        let skew = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![-ONE, ZERO]]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [C64::new(h, 0.0), C64::new(0.0, h)];
        assert!(expectation(&skew, &v).is_err());
    }
}
