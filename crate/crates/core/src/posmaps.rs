//! Positive (but not completely positive) maps and their partial action on
//! matrices of moments.
//!
//! Catalog: Choi maps (with the Störmer special case), Kossakowski maps
//! built on generalized Gell-Mann generators, and Breuer maps given by a
//! skew-symmetric unitary.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::moments::{MomentMatrix, Side, Transform};
use crate::reorder::BlockLayout;
use crate::scalar::{lit, modulus, real, to_f64, tol, Real, C};

/// A linear map on square complex matrices that preserves positivity.
pub trait PositiveMap<T: Real> {
    fn name(&self) -> String;

    /// Input dimension, `None` if the map acts on any dimension.
    fn dim(&self) -> Option<usize>;

    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>>;
}

fn check_dim<T: Real>(a: &CMatrix<T>, n: usize, name: &str) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "{name} acts on {n}x{n} matrices, got {:?}",
            a.shape()
        )));
    }
    Ok(())
}

/// The identity map.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl<T: Real> PositiveMap<T> for IdentityMap {
    fn name(&self) -> String {
        "identity".into()
    }
    fn dim(&self) -> Option<usize> {
        None
    }
    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        Ok(a.clone())
    }
}

/// Matrix transposition.
#[derive(Debug, Clone, Copy, Default)]
pub struct Transposition;

impl<T: Real> PositiveMap<T> for Transposition {
    fn name(&self) -> String {
        "transpose".into()
    }
    fn dim(&self) -> Option<usize> {
        None
    }
    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        Ok(a.transpose())
    }
}

/// Parameters of a Choi map on 3x3 matrices,
/// `Λ[A] = -A + diag(αA11+βA22+γA33, γA11+αA22+βA33, βA11+γA22+αA33)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiParams<T: Real> {
    alpha: T,
    beta: T,
    gamma: T,
    decomposable: bool,
}

impl<T: Real> ChoiParams<T> {
    /// Validates positivity: `α ≥ 1`, `α+β+γ ≥ 3`, and `1 ≤ α ≤ 2 ⇒ βγ ≥ (2-α)²`.
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        let zero = T::zero();
        let one = T::one();
        let two = one + one;
        let three = two + one;
        if alpha < zero || beta < zero || gamma < zero {
            return Err(Error::InvalidMap("Choi parameters must be nonnegative".into()));
        }
        let slack = tol::<T>(1e-12);
        let positive = alpha >= one - slack
            && alpha + beta + gamma >= three - slack
            && (alpha > two || beta * gamma >= (two - alpha) * (two - alpha) - slack);
        if !positive {
            return Err(Error::InvalidMap(format!(
                "Choi map ({}, {}, {}) is not positive",
                to_f64(alpha),
                to_f64(beta),
                to_f64(gamma)
            )));
        }
        let decomposable = alpha > three
            || beta * gamma >= (three - alpha) * (three - alpha) / (two + two) - slack;
        Ok(Self {
            alpha,
            beta,
            gamma,
            decomposable,
        })
    }

    /// The Störmer map, Choi parameters `(2, 0, 1)`.
    pub fn stormer() -> Self {
        Self::new(lit(2.0), T::zero(), T::one()).expect("Störmer parameters are positive")
    }

    pub fn params(&self) -> (T, T, T) {
        (self.alpha, self.beta, self.gamma)
    }

    pub fn is_decomposable(&self) -> bool {
        self.decomposable
    }
}

/// The Störmer map as Choi parameters.
pub fn stormer<T: Real>() -> ChoiParams<T> {
    ChoiParams::stormer()
}

/// Literal Choi-map action on a 3x3 matrix.
pub fn choi_apply<T: Real>(p: &ChoiParams<T>, a: &CMatrix<T>) -> Result<CMatrix<T>> {
    check_dim(a, 3, "the Choi map")?;
    let (x, y, z) = (a[(0, 0)], a[(1, 1)], a[(2, 2)]);
    let (al, be, ga) = (real(p.alpha), real(p.beta), real(p.gamma));
    let diag = [al * x + be * y + ga * z, ga * x + al * y + be * z, be * x + ga * y + al * z];
    let mut out = -a.clone();
    for (i, d) in diag.into_iter().enumerate() {
        out[(i, i)] += d;
    }
    Ok(out)
}

impl<T: Real> PositiveMap<T> for ChoiParams<T> {
    fn name(&self) -> String {
        if (self.alpha, self.beta, self.gamma) == (lit(2.0), T::zero(), T::one()) {
            "stormer".into()
        } else {
            format!(
                "choi({}, {}, {})",
                to_f64(self.alpha),
                to_f64(self.beta),
                to_f64(self.gamma)
            )
        }
    }
    fn dim(&self) -> Option<usize> {
        Some(3)
    }
    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        choi_apply(self, a)
    }
}

/// Generalized Gell-Mann basis of `su(N)`: `N² - 1` traceless Hermitian
/// matrices normalized to `Tr(g_i g_j) = δ_ij`.
///
/// Order: symmetric off-diagonal, antisymmetric off-diagonal (both by
/// `(j, k)` with `j < k`), then diagonal.
pub fn gell_mann_generators<T: Real>(n: usize) -> Vec<CMatrix<T>> {
    assert!(n >= 2, "su(N) generators need N >= 2");
    let inv_sqrt2 = T::one() / lit::<T>(2.0).sqrt();
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut g = CMatrix::<T>::zeros(n, n);
            g[(j, k)] = real(inv_sqrt2);
            g[(k, j)] = real(inv_sqrt2);
            out.push(g);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut g = CMatrix::<T>::zeros(n, n);
            g[(j, k)] = C::new(T::zero(), -inv_sqrt2);
            g[(k, j)] = C::new(T::zero(), inv_sqrt2);
            out.push(g);
        }
    }
    for l in 1..n {
        let norm = T::one() / lit::<T>((l * (l + 1)) as f64).sqrt();
        let mut g = CMatrix::<T>::zeros(n, n);
        for j in 0..l {
            g[(j, j)] = real(norm);
        }
        g[(l, l)] = real(-norm * lit(l as f64));
        out.push(g);
    }
    out
}

/// Parameters of a Kossakowski map on `N x N` matrices,
/// `Λ[A] = I Tr A / N + (1/(N-1)) g·(R x)`, `x_i = Tr(A g_i)`.
#[derive(Debug, Clone)]
pub struct KossakowskiParams<T: Real> {
    n: usize,
    rotation: DMatrix<T>,
    generators: Vec<CMatrix<T>>,
}

/// Random PSD inputs checked when a Kossakowski map is constructed.
const KOSSAKOWSKI_POSITIVITY_SAMPLES: usize = 200;

impl<T: Real> KossakowskiParams<T> {
    /// Map with the generalized Gell-Mann generators and `y = 0`.
    pub fn new(n: usize, rotation: DMatrix<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMap("Kossakowski maps need N >= 2".into()));
        }
        Self::with_generators(n, rotation, gell_mann_generators(n), None)
    }

    /// Map with explicit generators. Only `y = 0` is supported; pass
    /// `None` or a zero vector.
    pub fn with_generators(
        n: usize,
        rotation: DMatrix<T>,
        generators: Vec<CMatrix<T>>,
        y: Option<DVector<T>>,
    ) -> Result<Self> {
        let k = n * n - 1;
        if rotation.shape() != (k, k) {
            return Err(Error::InvalidMap(format!("rotation must be {k}x{k}")));
        }
        let orth = (&rotation * rotation.transpose() - DMatrix::<T>::identity(k, k)).norm();
        if orth > tol(1e-10) {
            return Err(Error::InvalidMap("rotation is not orthogonal".into()));
        }
        if (rotation.determinant() - T::one()).abs() > tol(1e-10) {
            return Err(Error::InvalidMap("rotation must have determinant +1".into()));
        }
        if let Some(y) = y {
            if y.iter().any(|v| *v != T::zero()) {
                return Err(Error::InvalidMap("only y = 0 is supported".into()));
            }
        }
        if generators.len() != k {
            return Err(Error::InvalidMap(format!("{k} generators are required")));
        }
        for (i, gi) in generators.iter().enumerate() {
            if gi.shape() != (n, n) || !linalg::is_hermitian(gi, tol(1e-10)) {
                return Err(Error::InvalidMap(format!("generator {i} is not Hermitian {n}x{n}")));
            }
            if modulus(linalg::trace(gi)) > tol(1e-10) {
                return Err(Error::InvalidMap(format!("generator {i} is not traceless")));
            }
            for (j, gj) in generators.iter().enumerate() {
                let expected = if i == j { T::one() } else { T::zero() };
                if modulus(linalg::trace(&(gi * gj)) - real(expected)) > tol(1e-10) {
                    return Err(Error::InvalidMap("generators are not orthonormal".into()));
                }
            }
        }
        let params = Self {
            n,
            rotation,
            generators,
        };
        params.verify_positivity()?;
        Ok(params)
    }

    fn verify_positivity(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6b6f_7373);
        for sample in 0..KOSSAKOWSKI_POSITIVITY_SAMPLES {
            let rank = 1 + sample % self.n;
            let a = crate::random::random_psd::<T, _>(self.n, rank, &mut rng);
            let out = kossakowski_apply(self, &a)?;
            if linalg::min_hermitian_eigenvalue(&out) < -tol::<T>(1e-10) {
                return Err(Error::InvalidMap(
                    "Kossakowski map sends a positive matrix to a non-positive one".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rotation(&self) -> &DMatrix<T> {
        &self.rotation
    }

    pub fn generators(&self) -> &[CMatrix<T>] {
        &self.generators
    }
}

pub fn kossakowski_apply<T: Real>(p: &KossakowskiParams<T>, a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = p.n;
    check_dim(a, n, "the Kossakowski map")?;
    let k = n * n - 1;
    let tr = linalg::trace(a);
    // x_i = Tr(A g_i); complex for non-Hermitian input, linear either way
    let x: Vec<C<T>> = p.generators.iter().map(|g| linalg::trace(&(a * g))).collect();
    let mut out = CMatrix::<T>::identity(n, n).map(|z| z * tr / real(lit(n as f64)));
    let scale = T::one() / lit((n - 1) as f64);
    for i in 0..k {
        let mut rx = C::new(T::zero(), T::zero());
        for (j, xj) in x.iter().enumerate() {
            rx += xj.scale(p.rotation[(i, j)]);
        }
        out += p.generators[i].map(|z| z * rx.scale(scale));
    }
    Ok(out)
}

impl<T: Real> PositiveMap<T> for KossakowskiParams<T> {
    fn name(&self) -> String {
        format!("kossakowski(N={})", self.n)
    }
    fn dim(&self) -> Option<usize> {
        Some(self.n)
    }
    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        kossakowski_apply(self, a)
    }
}

/// Skew-symmetric unitary `U = R D R^T` with
/// `D = sum_k e^{iφ_k} (|2k><2k+1| - |2k+1><2k|)`.
pub fn breuer_unitary<T: Real>(phases: &[T], rotation: &DMatrix<T>) -> Result<CMatrix<T>> {
    let d = rotation.nrows();
    if d % 2 != 0 || d == 0 {
        return Err(Error::InvalidMap(format!("Breuer maps need an even dimension, got {d}")));
    }
    if !rotation.is_square() {
        return Err(Error::InvalidMap("R must be square".into()));
    }
    if phases.len() != d / 2 {
        return Err(Error::InvalidMap(format!("{} phases are required", d / 2)));
    }
    if (rotation * rotation.transpose() - DMatrix::<T>::identity(d, d)).norm() > tol(1e-10) {
        return Err(Error::InvalidMap("R is not orthogonal".into()));
    }
    let mut dm = CMatrix::<T>::zeros(d, d);
    for (k, &phi) in phases.iter().enumerate() {
        let e = C::new(phi.cos(), phi.sin());
        dm[(2 * k, 2 * k + 1)] = e;
        dm[(2 * k + 1, 2 * k)] = -e;
    }
    let r = rotation.map(real);
    Ok(&r * dm * r.transpose())
}

/// Breuer map `Λ[A] = I Tr A - A - U A^T U^dag` on even dimension `d ≥ 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct BreuerParams<T: Real> {
    u: CMatrix<T>,
}

impl<T: Real> BreuerParams<T> {
    pub fn new(u: CMatrix<T>) -> Result<Self> {
        let d = u.nrows();
        if !u.is_square() || d < 4 || d % 2 != 0 {
            return Err(Error::InvalidMap(format!(
                "Breuer maps need an even dimension >= 4, got {:?}",
                u.shape()
            )));
        }
        if linalg::max_abs_diff(&(u.adjoint() * &u), &CMatrix::identity(d, d)) > tol(1e-10) {
            return Err(Error::InvalidMap("U is not unitary".into()));
        }
        if linalg::max_abs_diff(&u.transpose(), &(-u.clone())) > tol(1e-10) {
            return Err(Error::InvalidMap("U is not skew-symmetric".into()));
        }
        Ok(Self { u })
    }

    pub fn from_phases(phases: &[T], rotation: &DMatrix<T>) -> Result<Self> {
        Self::new(breuer_unitary(phases, rotation)?)
    }

    /// The 4x4 anti-diagonal unitary `[[0,0,0,1],[0,0,1,0],[0,-1,0,0],[-1,0,0,0]]`.
    pub fn anti_diagonal() -> Self {
        let mut u = CMatrix::<T>::zeros(4, 4);
        u[(0, 3)] = real(T::one());
        u[(1, 2)] = real(T::one());
        u[(2, 1)] = real(-T::one());
        u[(3, 0)] = real(-T::one());
        Self::new(u).expect("anti-diagonal unitary is valid")
    }

    /// Like [`Self::anti_diagonal`] with the sign of the outer pair flipped:
    /// `[[0,0,0,-1],[0,0,1,0],[0,-1,0,0],[1,0,0,0]]`.
    pub fn anti_diagonal_flipped() -> Self {
        let mut u = Self::anti_diagonal().u;
        u[(0, 3)] = -u[(0, 3)];
        u[(3, 0)] = -u[(3, 0)];
        Self::new(u).expect("flipped anti-diagonal unitary is valid")
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }
}

pub fn breuer_apply<T: Real>(p: &BreuerParams<T>, a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let d = p.dim();
    check_dim(a, d, "the Breuer map")?;
    let tr = linalg::trace(a);
    let theta = &p.u * a.transpose() * p.u.adjoint();
    Ok(CMatrix::<T>::identity(d, d).map(|z| z * tr) - a - theta)
}

impl<T: Real> PositiveMap<T> for BreuerParams<T> {
    fn name(&self) -> String {
        format!("breuer(d={})", self.dim())
    }
    fn dim(&self) -> Option<usize> {
        Some(self.dim())
    }
    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        breuer_apply(self, a)
    }
}

/// Any cataloged map, for configuration-driven use.
#[derive(Debug, Clone)]
pub enum CatalogMap<T: Real> {
    Identity,
    Transpose,
    Choi(ChoiParams<T>),
    Kossakowski(KossakowskiParams<T>),
    Breuer(BreuerParams<T>),
}

impl<T: Real> CatalogMap<T> {
    fn inner(&self) -> &dyn PositiveMap<T> {
        match self {
            CatalogMap::Identity => &IdentityMap,
            CatalogMap::Transpose => &Transposition,
            CatalogMap::Choi(p) => p,
            CatalogMap::Kossakowski(p) => p,
            CatalogMap::Breuer(p) => p,
        }
    }
}

impl<T: Real> PositiveMap<T> for CatalogMap<T> {
    fn name(&self) -> String {
        self.inner().name()
    }
    fn dim(&self) -> Option<usize> {
        self.inner().dim()
    }
    fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.inner().apply(a)
    }
}

impl<T: Real> fmt::Display for CatalogMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Applies `map` to the chosen tensor factor of a bipartite matrix: for every
/// pair of indices of the untouched factor, the corresponding block over the
/// mapped factor is replaced by its image.
pub fn apply_partial_raw<T: Real>(
    m: &CMatrix<T>,
    layout: BlockLayout,
    map: &dyn PositiveMap<T>,
    side: Side,
) -> Result<CMatrix<T>> {
    let n = layout.dim();
    if m.shape() != (n, n) {
        return Err(Error::Dimension("matrix does not match the bipartition".into()));
    }
    let (d_map, d_other) = match side {
        Side::A => (layout.d_a, layout.d_b),
        Side::B => (layout.d_b, layout.d_a),
    };
    if let Some(d) = map.dim() {
        if d != d_map {
            return Err(Error::Dimension(format!(
                "{} acts on dimension {d}, but side {side} has dimension {d_map}",
                map.name()
            )));
        }
    }
    let idx = |mapped: usize, other: usize| match side {
        Side::A => layout.index(mapped, other),
        Side::B => layout.index(other, mapped),
    };
    let mut out = CMatrix::<T>::zeros(n, n);
    for o in 0..d_other {
        for op in 0..d_other {
            let block = CMatrix::<T>::from_fn(d_map, d_map, |i, j| m[(idx(i, o), idx(j, op))]);
            let image = map.apply(&block)?;
            for i in 0..d_map {
                for j in 0..d_map {
                    out[(idx(i, o), idx(j, op))] = image[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

/// `(Λ ⊗ id)[M]` for `Side::A`, `(id ⊗ Λ)[M]` for `Side::B`.
pub fn apply_partial<T: Real>(
    m: &MomentMatrix<T>,
    map: &dyn PositiveMap<T>,
    side: Side,
) -> Result<MomentMatrix<T>> {
    let (da, db) = m.dims();
    let out = apply_partial_raw(m.entries(), BlockLayout::moments(da, db), map, side)?;
    Ok(m.with_entries(out, Transform::Map { name: map.name(), side }))
}
