//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, modulus, Real, C};

pub type CMatrix<T> = DMatrix<C<T>>;
pub type CVector<T> = DVector<C<T>>;

/// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = modulus(m[(i, j)] - m[(j, i)].conj());
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn is_hermitian<T: Real>(m: &CMatrix<T>, tol: T) -> bool {
    m.is_square() && hermiticity_defect(m) <= tol
}

/// `(m + m†) / 2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = T::one() / (T::one() + T::one());
    (m + m.adjoint()).map(|z| z.scale(half))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<T> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

pub fn min_hermitian_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_eigenvalues(m).first().copied().unwrap_or_else(T::zero)
}

/// Spectral decomposition of a Hermitian matrix as `(eigenvalue, eigenvector)` pairs.
pub fn hermitian_eigenpairs<T: Real>(m: &CMatrix<T>) -> Vec<(T, CVector<T>)> {
    let eig = hermitian_part(m).symmetric_eigen();
    eig.eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &val)| (val, eig.eigenvectors.column(i).into_owned()))
        .collect()
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> C<T> {
    m.diagonal().iter().fold(C::new(T::zero(), T::zero()), |acc, &z| acc + z)
}

pub fn determinant<T: Real>(m: &CMatrix<T>) -> C<T> {
    if m.nrows() == 0 {
        return C::new(T::one(), T::zero());
    }
    m.clone().determinant()
}

pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Relative floor below which singular values are treated as numerical noise.
pub const SINGULAR_VALUE_FLOOR: f64 = 1e-13;

/// Trace norm `Tr sqrt(A†A)`: the sum of singular values above the relative floor.
pub fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    let sv = singular_values(m);
    let largest = sv.iter().copied().fold(T::zero(), |a, b| if b > a { b } else { a });
    let floor = largest * crate::scalar::lit(SINGULAR_VALUE_FLOOR);
    sv.into_iter().filter(|&s| s > floor).fold(T::zero(), |a, b| a + b)
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Principal submatrix keeping the rows and columns listed in `r`
/// (strictly increasing, 1-based).
pub fn principal_submatrix<T: Real>(m: &CMatrix<T>, r: &[usize]) -> Result<CMatrix<T>> {
    let n = m.nrows();
    validate_index_set(r, n)?;
    Ok(CMatrix::from_fn(r.len(), r.len(), |i, j| m[(r[i] - 1, r[j] - 1)]))
}

pub(crate) fn validate_index_set(r: &[usize], n: usize) -> Result<()> {
    for (pos, &idx) in r.iter().enumerate() {
        if idx == 0 || idx > n {
            return Err(Error::Index { index: idx, bound: n });
        }
        if pos > 0 && r[pos - 1] >= idx {
            return Err(Error::Dimension(format!(
                "index set {r:?} must be strictly increasing"
            )));
        }
    }
    Ok(())
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| modulus(x - y))
        .fold(T::zero(), |acc, d| if d > acc { d } else { acc })
}

/// Complex matrix from real row-major entries.
pub fn from_real_rows<T: Real>(rows: usize, cols: usize, entries: &[f64]) -> CMatrix<T> {
    assert_eq!(entries.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| C::new(lit(entries[i * cols + j]), T::zero()))
}
