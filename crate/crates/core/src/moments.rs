//! Moments `<f_i^dag f_j>` of ladder-operator monomials and the finite
//! matrices of moments built from operator classes.
//!
//! Tensor-product classes `f = f^A ⊗ f^B` are flattened with the A index
//! varying fastest: `i = (l - 1) d_A + k` (1-based), so `(1, a) ⊗ (1, b)`
//! lists `(1, a, b, ab)`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{
    apply_monomial, embed_vector, DensityMatrix, HermitianOperator, ModeCutoffs, MonomialSpec,
    StateVector,
};
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{Real, C};

/// Anything with a spectral decomposition `X = sum_k w_k |v_k><v_k|` on a
/// truncated Fock space: pure states, density matrices, Hermitian operators.
pub trait Expectation<T: Real> {
    fn cutoffs(&self) -> &ModeCutoffs;
    fn weighted_components(&self) -> Vec<(T, &CVector<T>)>;
}

impl<T: Real> Expectation<T> for StateVector<T> {
    fn cutoffs(&self) -> &ModeCutoffs {
        StateVector::cutoffs(self)
    }
    fn weighted_components(&self) -> Vec<(T, &CVector<T>)> {
        vec![(T::one(), self.amplitudes())]
    }
}

impl<T: Real> Expectation<T> for DensityMatrix<T> {
    fn cutoffs(&self) -> &ModeCutoffs {
        DensityMatrix::cutoffs(self)
    }
    fn weighted_components(&self) -> Vec<(T, &CVector<T>)> {
        self.components().iter().map(|(w, v)| (*w, v)).collect()
    }
}

impl<T: Real> Expectation<T> for HermitianOperator<T> {
    fn cutoffs(&self) -> &ModeCutoffs {
        HermitianOperator::cutoffs(self)
    }
    fn weighted_components(&self) -> Vec<(T, &CVector<T>)> {
        self.components().iter().map(|(w, v)| (*w, v)).collect()
    }
}

/// A pure or mixed state.
#[derive(Debug, Clone)]
pub enum State<T: Real> {
    Pure(StateVector<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Real> State<T> {
    pub fn modes(&self) -> usize {
        Expectation::cutoffs(self).modes()
    }

    pub fn density(&self) -> DensityMatrix<T> {
        match self {
            State::Pure(s) => s.density(),
            State::Mixed(r) => r.clone(),
        }
    }
}

impl<T: Real> From<StateVector<T>> for State<T> {
    fn from(s: StateVector<T>) -> Self {
        State::Pure(s)
    }
}

impl<T: Real> From<DensityMatrix<T>> for State<T> {
    fn from(r: DensityMatrix<T>) -> Self {
        State::Mixed(r)
    }
}

impl<T: Real> Expectation<T> for State<T> {
    fn cutoffs(&self) -> &ModeCutoffs {
        match self {
            State::Pure(s) => StateVector::cutoffs(s),
            State::Mixed(r) => DensityMatrix::cutoffs(r),
        }
    }
    fn weighted_components(&self) -> Vec<(T, &CVector<T>)> {
        match self {
            State::Pure(s) => s.weighted_components(),
            State::Mixed(r) => r.weighted_components(),
        }
    }
}

/// Padded copy of a state's components with a memo of applied monomials.
///
/// Every mode is padded by the largest creation power among the monomials
/// that will be applied, so `(a^dag)^n a^m` acts on the state's support
/// exactly as on the untruncated mode.
struct Workspace<T: Real> {
    cutoffs: ModeCutoffs,
    components: Vec<(T, CVector<T>)>,
    applied: HashMap<MonomialSpec, Vec<CVector<T>>>,
}

impl<T: Real> Workspace<T> {
    fn new<'s>(
        x: &dyn Expectation<T>,
        specs: impl IntoIterator<Item = &'s MonomialSpec>,
    ) -> Result<Self> {
        let base = x.cutoffs();
        let mut pad = vec![0usize; base.modes()];
        for spec in specs {
            if spec.span() > base.modes() {
                return Err(Error::InvalidClass(format!(
                    "`{spec}` acts on modes the {}-mode state does not have",
                    base.modes()
                )));
            }
            for (mode, p) in pad.iter_mut().enumerate() {
                *p = (*p).max(spec.max_creation(mode) as usize);
            }
        }
        let cutoffs = base.padded(&pad);
        let components = x
            .weighted_components()
            .into_iter()
            .map(|(w, v)| (w, embed_vector(v, base, &cutoffs)))
            .collect();
        Ok(Self {
            cutoffs,
            components,
            applied: HashMap::new(),
        })
    }

    fn ensure(&mut self, spec: &MonomialSpec) {
        if !self.applied.contains_key(spec) {
            let vs = self
                .components
                .iter()
                .map(|(_, v)| apply_monomial(spec, &self.cutoffs, v))
                .collect();
            self.applied.insert(spec.clone(), vs);
        }
    }

    /// `sum_k w_k <L v_k | R v_k> = Tr(R X L^dag)`.
    fn inner(&mut self, left: &MonomialSpec, right: &MonomialSpec) -> C<T> {
        self.ensure(left);
        self.ensure(right);
        let ls = &self.applied[left];
        let rs = &self.applied[right];
        self.components
            .iter()
            .zip(ls.iter().zip(rs))
            .fold(C::new(T::zero(), T::zero()), |acc, ((w, _), (l, r))| {
                acc + l.dotc(r).scale(*w)
            })
    }
}

/// `<spec> = Tr(X spec)` for a normally-ordered monomial.
///
/// Evaluated as `<a^n x | a^m x>` per mode, which is exact on the
/// truncated space without padding.
pub fn moment<T: Real>(x: &dyn Expectation<T>, spec: &MonomialSpec) -> Result<C<T>> {
    let left = spec.creation_part_adjoint();
    let right = spec.annihilation_part();
    let mut ws = Workspace::new(x, [&left, &right])?;
    Ok(ws.inner(&left, &right))
}

/// `<f_i^dag f_j> = Tr(f_i^dag f_j X)` for two arbitrary monomials.
pub fn pair_moment<T: Real>(
    x: &dyn Expectation<T>,
    fi: &MonomialSpec,
    fj: &MonomialSpec,
) -> Result<C<T>> {
    let mut ws = Workspace::new(x, [fi, fj])?;
    Ok(ws.inner(fi, fj))
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Side {
    #[default]
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Tensor-product operator class `(f^A_1, ..., f^A_dA) ⊗ (f^B_1, ..., f^B_dB)`.
///
/// Duplicate entries are kept verbatim and produce repeated rows/columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorClass {
    side_a: Vec<MonomialSpec>,
    side_b: Vec<MonomialSpec>,
    modes_a: Vec<usize>,
    modes_b: Vec<usize>,
}

impl OperatorClass {
    pub fn new(
        side_a: Vec<MonomialSpec>,
        side_b: Vec<MonomialSpec>,
        modes_a: Vec<usize>,
        modes_b: Vec<usize>,
    ) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidClass("both sides need at least one operator".into()));
        }
        if modes_a.is_empty() || modes_b.is_empty() {
            return Err(Error::InvalidClass("both mode sets must be nonempty".into()));
        }
        if let Some(m) = modes_a.iter().find(|m| modes_b.contains(m)) {
            return Err(Error::InvalidClass(format!("mode {m} is on both sides")));
        }
        for (side, specs, modes) in [("A", &side_a, &modes_a), ("B", &side_b, &modes_b)] {
            for spec in specs {
                if let Some(m) = spec.support().find(|m| !modes.contains(m)) {
                    return Err(Error::InvalidClass(format!(
                        "`{spec}` on side {side} acts on mode {m} outside {modes:?}"
                    )));
                }
            }
        }
        Ok(Self {
            side_a,
            side_b,
            modes_a,
            modes_b,
        })
    }

    /// Standard two-mode bipartition: mode 0 is A, mode 1 is B.
    pub fn two_mode(side_a: Vec<MonomialSpec>, side_b: Vec<MonomialSpec>) -> Result<Self> {
        Self::new(side_a, side_b, vec![0], vec![1])
    }

    /// Two-mode class from monomial strings, e.g. `(&["1", "a"], &["1", "b"])`.
    pub fn parse_two_mode(side_a: &[&str], side_b: &[&str]) -> Result<Self> {
        let parse = |xs: &[&str]| xs.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>();
        Self::two_mode(parse(side_a)?, parse(side_b)?)
    }

    pub fn side_a(&self) -> &[MonomialSpec] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[MonomialSpec] {
        &self.side_b
    }

    pub fn modes_a(&self) -> &[usize] {
        &self.modes_a
    }

    pub fn modes_b(&self) -> &[usize] {
        &self.modes_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.side_a.len(), self.side_b.len())
    }

    pub fn dim(&self) -> usize {
        self.side_a.len() * self.side_b.len()
    }

    /// `f^A_k f^B_l`, 0-based.
    pub fn element(&self, k: usize, l: usize) -> MonomialSpec {
        self.side_a[k]
            .disjoint_product(&self.side_b[l])
            .expect("sides act on disjoint modes")
    }

    /// All elements in flattened order.
    pub fn elements(&self) -> Vec<MonomialSpec> {
        let (da, db) = self.dims();
        (0..db)
            .flat_map(|l| (0..da).map(move |k| (k, l)))
            .map(|(k, l)| self.element(k, l))
            .collect()
    }

    fn check_state(&self, modes: usize) -> Result<()> {
        if let Some(m) = self.modes_a.iter().chain(&self.modes_b).find(|&&m| m >= modes) {
            return Err(Error::InvalidClass(format!(
                "mode {m} is not present in the {modes}-mode state"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[MonomialSpec]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
        write!(f, "({}) ⊗ ({})", join(&self.side_a), join(&self.side_b))
    }
}

/// Flattened 1-based index of the pair `(k, l)`: `(l - 1) d_A + k`.
pub fn flatten_index(k: usize, l: usize, dims: (usize, usize)) -> Result<usize> {
    let (da, db) = dims;
    if k == 0 || k > da {
        return Err(Error::Index { index: k, bound: da });
    }
    if l == 0 || l > db {
        return Err(Error::Index { index: l, bound: db });
    }
    Ok((l - 1) * da + k)
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(i: usize, dims: (usize, usize)) -> Result<(usize, usize)> {
    let (da, db) = dims;
    if i == 0 || i > da * db {
        return Err(Error::Index { index: i, bound: da * db });
    }
    Ok(((i - 1) % da + 1, (i - 1) / da + 1))
}

/// How a moment matrix was obtained from the plain matrix of moments.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Plain,
    /// Moments of the partially transposed state (transposition on B).
    OfPartialTranspose,
    /// Reordered by partial transposition on a side.
    PartialTranspose(Side),
    /// A positive map applied to one side.
    Map { name: String, side: Side },
}

/// Finite matrix of moments for a tensor-product class.
#[derive(Debug, Clone)]
pub struct MomentMatrix<T: Real> {
    entries: CMatrix<T>,
    class: OperatorClass,
    label: String,
    transform: Transform,
}

impl<T: Real> MomentMatrix<T> {
    /// Wraps an existing matrix; shape must match the class.
    pub fn from_entries(
        entries: CMatrix<T>,
        class: OperatorClass,
        label: impl Into<String>,
        transform: Transform,
    ) -> Result<Self> {
        let n = class.dim();
        if entries.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "matrix of shape {:?} for a class of dimension {n}",
                entries.shape()
            )));
        }
        Ok(Self {
            entries,
            class,
            label: label.into(),
            transform,
        })
    }

    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix<T> {
        self.entries
    }

    /// 1-based entry `M_ij`.
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.entries[(i - 1, j - 1)]
    }

    pub fn dims(&self) -> (usize, usize) {
        self.class.dims()
    }

    pub fn class(&self) -> &OperatorClass {
        &self.class
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn trace(&self) -> C<T> {
        linalg::trace(&self.entries)
    }

    pub fn with_entries(&self, entries: CMatrix<T>, transform: Transform) -> Self {
        assert_eq!(entries.shape(), self.entries.shape());
        Self {
            entries,
            class: self.class.clone(),
            label: self.label.clone(),
            transform,
        }
    }
}

/// `M_ij = <f_i^dag f_j>` for a tensor-product class.
pub fn build_moment_matrix<T: Real>(
    state: &dyn Expectation<T>,
    class: &OperatorClass,
) -> Result<MomentMatrix<T>> {
    class.check_state(state.cutoffs().modes())?;
    let elems = class.elements();
    let mut ws = Workspace::new(state, elems.iter())?;
    let n = elems.len();
    let mut m = CMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = ws.inner(&elems[i], &elems[j]);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    MomentMatrix::from_entries(m, class.clone(), "", Transform::Plain)
}

/// Matrix of moments of the partially transposed state, from moments of
/// the state itself: `M_{kl,k'l'}(ρ^Γ) = M_{kl',k'l}(ρ)`.
pub fn build_moment_matrix_of_pt_state<T: Real>(
    state: &dyn Expectation<T>,
    class: &OperatorClass,
) -> Result<MomentMatrix<T>> {
    class.check_state(state.cutoffs().modes())?;
    let (da, db) = class.dims();
    let elems = class.elements();
    let mut ws = Workspace::new(state, elems.iter())?;
    let n = elems.len();
    let mut m = CMatrix::<T>::zeros(n, n);
    for l in 0..db {
        for k in 0..da {
            let i = l * da + k;
            for lp in 0..db {
                for kp in 0..da {
                    let j = lp * da + kp;
                    let left = &elems[lp * da + k];
                    let right = &elems[l * da + kp];
                    m[(i, j)] = ws.inner(left, right);
                }
            }
        }
    }
    MomentMatrix::from_entries(m, class.clone(), "", Transform::OfPartialTranspose)
}

/// Ordered list of monomials over all modes, without tensor structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericClass {
    elements: Vec<MonomialSpec>,
}

impl GenericClass {
    pub fn new(elements: Vec<MonomialSpec>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidClass("generic class must be nonempty".into()));
        }
        Ok(Self { elements })
    }

    pub fn parse(elements: &[&str]) -> Result<Self> {
        Self::new(elements.iter().map(|s| s.parse()).collect::<Result<_>>()?)
    }

    pub fn elements(&self) -> &[MonomialSpec] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

impl fmt::Display for GenericClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Matrix of moments for a generic class.
#[derive(Debug, Clone)]
pub struct GenericMomentMatrix<T: Real> {
    entries: CMatrix<T>,
    class: GenericClass,
    transposed_modes: Vec<usize>,
}

impl<T: Real> GenericMomentMatrix<T> {
    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn class(&self) -> &GenericClass {
        &self.class
    }

    /// Modes on which the state was partially transposed (empty if none).
    pub fn transposed_modes(&self) -> &[usize] {
        &self.transposed_modes
    }

    pub fn determinant(&self) -> T {
        linalg::determinant(&self.entries).re
    }
}

/// Matrix of moments for a generic class on `ρ`, or on `ρ^Γ` when
/// `transposed_modes` is nonempty.
///
/// The partially transposed moments are obtained from `ρ` by conjugating
/// the transposed modes: with `f_i = A_i B_i` split into the untouched and
/// transposed factors, `<f_i^dag f_j>_{ρ^Γ} = Tr((A_i^dag A_j)(B_j^dag B_i) ρ)`.
pub fn build_generic_moment_matrix<T: Real>(
    state: &dyn Expectation<T>,
    class: &GenericClass,
    transposed_modes: &[usize],
) -> Result<GenericMomentMatrix<T>> {
    let modes = state.cutoffs().modes();
    if let Some(&m) = transposed_modes.iter().find(|&&m| m >= modes) {
        return Err(Error::InvalidClass(format!("mode {m} is not present in the state")));
    }
    let elems = class.elements();
    let n = elems.len();
    let is_b = |m: usize| transposed_modes.contains(&m);
    let a_parts: Vec<MonomialSpec> = elems.iter().map(|f| f.restrict(|m| !is_b(m))).collect();
    let b_parts: Vec<MonomialSpec> = elems.iter().map(|f| f.restrict(is_b)).collect();
    let mut pairs = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let left = a_parts[i].disjoint_product(&b_parts[j])?;
            let right = a_parts[j].disjoint_product(&b_parts[i])?;
            pairs.push((left, right));
        }
    }
    let mut ws = Workspace::new(state, pairs.iter().flat_map(|(l, r)| [l, r]))?;
    let mut m = CMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (l, r) = &pairs[i * n + j];
            m[(i, j)] = ws.inner(l, r);
        }
    }
    Ok(GenericMomentMatrix {
        entries: m,
        class: class.clone(),
        transposed_modes: transposed_modes.to_vec(),
    })
}

pub use crate::linalg::principal_submatrix;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::superpose;
    use crate::scalar::c;

    fn two_mode(kets: &[(f64, [usize; 2])], cut: usize) -> StateVector<f64> {
        let cu = ModeCutoffs::new(vec![cut, cut]).unwrap();
        let states: Vec<_> = kets.iter().map(|(_, o)| StateVector::fock(o, &cu).unwrap()).collect();
        let terms: Vec<_> = kets.iter().zip(&states).map(|((w, _), s)| (c(*w, 0.), s)).collect();
        superpose(&terms).unwrap()
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten_index(2, 1, (2, 2)).unwrap(), 2);
        assert_eq!(flatten_index(1, 2, (2, 2)).unwrap(), 3);
        for da in 1..5 {
            assert_eq!(flatten_index(1, 1, (da, 3)).unwrap(), 1);
        }
        assert!(flatten_index(3, 1, (2, 2)).is_err());
        assert!(flatten_index(1, 0, (2, 2)).is_err());
        assert_eq!(unflatten_index(4, (2, 2)).unwrap(), (2, 2));
    }

    #[test]
    fn singlet_moments() {
        let s = two_mode(&[(1., [0, 1]), (-1., [1, 0])], 2);
        let v = moment(&s, &"a+ b".parse().unwrap()).unwrap();
        assert!((v - c(-0.5, 0.)).norm() < 1e-15);
        let ab = moment(&s, &"a b".parse().unwrap()).unwrap();
        assert!(ab.norm() < 1e-15);
    }

    #[test]
    fn vacuum_moments_vanish() {
        let vac = two_mode(&[(1., [0, 0])], 3);
        for s in ["a", "a+", "a+ a", "b+^2 b", "a b"] {
            assert!(moment(&vac, &s.parse().unwrap()).unwrap().norm() < 1e-15);
        }
        assert!((moment(&vac, &MonomialSpec::identity()).unwrap() - c(1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn class_validation() {
        let a: MonomialSpec = "a".parse().unwrap();
        let b: MonomialSpec = "b".parse().unwrap();
        assert!(OperatorClass::two_mode(vec![b.clone()], vec![b.clone()]).is_err());
        assert!(OperatorClass::two_mode(vec![], vec![b.clone()]).is_err());
        assert!(OperatorClass::new(vec![a.clone()], vec![b.clone()], vec![0], vec![0]).is_err());
        let cls = OperatorClass::two_mode(vec![MonomialSpec::identity(), a], vec![MonomialSpec::identity(), b]).unwrap();
        let names: Vec<String> = cls.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["1", "a", "b", "a b"]);
        let one_mode = StateVector::<f64>::fock(&[0], &ModeCutoffs::new(vec![2]).unwrap()).unwrap();
        assert!(build_moment_matrix(&one_mode, &cls).is_err());
    }

    #[test]
    fn generic_identity_class() {
        let s = two_mode(&[(1., [0, 1]), (0.3, [1, 1])], 3);
        let cls = GenericClass::parse(&["1"]).unwrap();
        for modes in [&[][..], &[1][..]] {
            let m = build_generic_moment_matrix(&s, &cls, modes).unwrap();
            assert!((m.entries()[(0, 0)] - c(1., 0.)).norm() < 1e-14);
        }
    }
}
