//! Partial transposition and realignment of bipartite matrices, and the
//! normalized trace norms built from them.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::moments::{build_moment_matrix, Expectation, MomentMatrix, OperatorClass, Side, Transform};
use crate::scalar::{lit, Real};

pub use crate::linalg::trace_norm;

/// Index layout of a `d_A d_B`-dimensional bipartite matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub d_a: usize,
    pub d_b: usize,
    /// A index varies fastest (matrices of moments); otherwise B does
    /// (Fock-basis density matrices).
    pub a_fastest: bool,
}

impl BlockLayout {
    pub fn moments(d_a: usize, d_b: usize) -> Self {
        Self { d_a, d_b, a_fastest: true }
    }

    pub fn fock(d_a: usize, d_b: usize) -> Self {
        Self { d_a, d_b, a_fastest: false }
    }

    /// 0-based flat index of `(k, l)`.
    #[inline]
    pub fn index(&self, k: usize, l: usize) -> usize {
        if self.a_fastest {
            l * self.d_a + k
        } else {
            k * self.d_b + l
        }
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    fn check<T: Real>(&self, m: &CMatrix<T>) -> Result<()> {
        let n = self.dim();
        if m.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "matrix of shape {:?} does not match a {}x{} bipartition",
                m.shape(),
                self.d_a,
                self.d_b
            )));
        }
        Ok(())
    }
}

/// Partial transpose of a bipartite matrix.
///
/// `Side::A` maps `|k l><k' l'| -> |k' l><k l'|`; `Side::B` maps it to
/// `|k l'><k' l|`. The two results are transposes of each other.
pub fn partial_transpose_raw<T: Real>(m: &CMatrix<T>, layout: BlockLayout, side: Side) -> Result<CMatrix<T>> {
    layout.check(m)?;
    let n = layout.dim();
    let mut out = CMatrix::<T>::zeros(n, n);
    for l in 0..layout.d_b {
        for k in 0..layout.d_a {
            for lp in 0..layout.d_b {
                for kp in 0..layout.d_a {
                    let (src_r, src_c) = match side {
                        Side::A => (layout.index(kp, l), layout.index(k, lp)),
                        Side::B => (layout.index(k, lp), layout.index(kp, l)),
                    };
                    out[(layout.index(k, l), layout.index(kp, lp))] = m[(src_r, src_c)];
                }
            }
        }
    }
    Ok(out)
}

/// Realignment: the element `M_{kl,k'l'}` moves to row `(l, l')`, column
/// `(k, k')`, second index fastest in each pair. The result is `d_B² x d_A²`.
pub fn realign_raw<T: Real>(m: &CMatrix<T>, layout: BlockLayout) -> Result<CMatrix<T>> {
    layout.check(m)?;
    let (da, db) = (layout.d_a, layout.d_b);
    let mut out = CMatrix::<T>::zeros(db * db, da * da);
    for l in 0..db {
        for lp in 0..db {
            for k in 0..da {
                for kp in 0..da {
                    out[(l * db + lp, k * da + kp)] = m[(layout.index(k, l), layout.index(kp, lp))];
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`realign_raw`].
pub fn unrealign_raw<T: Real>(r: &CMatrix<T>, layout: BlockLayout) -> Result<CMatrix<T>> {
    let (da, db) = (layout.d_a, layout.d_b);
    if r.shape() != (db * db, da * da) {
        return Err(Error::Dimension("realigned matrix has the wrong shape".into()));
    }
    let n = layout.dim();
    let mut out = CMatrix::<T>::zeros(n, n);
    for l in 0..db {
        for lp in 0..db {
            for k in 0..da {
                for kp in 0..da {
                    out[(layout.index(k, l), layout.index(kp, lp))] = r[(l * db + lp, k * da + kp)];
                }
            }
        }
    }
    Ok(out)
}

/// Partial transpose of a matrix of moments.
pub fn partial_transpose<T: Real>(m: &MomentMatrix<T>, side: Side) -> MomentMatrix<T> {
    let (da, db) = m.dims();
    let entries = partial_transpose_raw(m.entries(), BlockLayout::moments(da, db), side)
        .expect("moment matrix matches its class");
    m.with_entries(entries, Transform::PartialTranspose(side))
}

/// Realigned matrix of moments (generally neither square nor Hermitian).
#[derive(Debug, Clone)]
pub struct RealignedMatrix<T: Real> {
    entries: CMatrix<T>,
    dims: (usize, usize),
}

impl<T: Real> RealignedMatrix<T> {
    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn trace_norm(&self) -> T {
        linalg::trace_norm(&self.entries)
    }

    /// Undoes the realignment.
    pub fn unrealign(&self) -> CMatrix<T> {
        unrealign_raw(&self.entries, BlockLayout::moments(self.dims.0, self.dims.1))
            .expect("shape is consistent by construction")
    }
}

pub fn realign<T: Real>(m: &MomentMatrix<T>) -> RealignedMatrix<T> {
    let (da, db) = m.dims();
    RealignedMatrix {
        entries: realign_raw(m.entries(), BlockLayout::moments(da, db)).expect("moment matrix matches its class"),
        dims: (da, db),
    }
}

fn normalizer<T: Real>(m: &MomentMatrix<T>) -> Result<T> {
    let tr = m.trace().re;
    if !(tr > lit(1e-14)) {
        return Err(Error::DegenerateMoments);
    }
    Ok(tr)
}

/// `||M^Γ|| / Tr M` for an already built matrix of moments.
pub fn nu_gamma_of<T: Real>(m: &MomentMatrix<T>) -> Result<T> {
    let tr = normalizer(m)?;
    Ok(linalg::trace_norm(partial_transpose(m, Side::A).entries()) / tr)
}

/// `||M^R|| / Tr M` for an already built matrix of moments.
pub fn nu_r_of<T: Real>(m: &MomentMatrix<T>) -> Result<T> {
    let tr = normalizer(m)?;
    Ok(realign(m).trace_norm() / tr)
}

/// Normalized trace norm of the partially transposed matrix of moments.
pub fn nu_gamma<T: Real>(state: &dyn Expectation<T>, class: &OperatorClass) -> Result<T> {
    nu_gamma_of(&build_moment_matrix(state, class)?)
}

/// Normalized trace norm of the realigned matrix of moments.
pub fn nu_r<T: Real>(state: &dyn Expectation<T>, class: &OperatorClass) -> Result<T> {
    nu_r_of(&build_moment_matrix(state, class)?)
}
