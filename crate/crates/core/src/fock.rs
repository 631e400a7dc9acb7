//! Truncated multi-mode Fock space: cutoffs, normally-ordered monomials,
//! pure and mixed states.
//!
//! Basis convention: mode-major flattening with the last mode varying
//! fastest, occupations 0-based. A mode with cutoff `n` spans `|0>..|n-1>`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::scalar::{lit, modulus, real, to_f64, tol, Real, C};

/// Default cap on the total Fock dimension of a state.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Default limit on the norm lost when truncating coherent states.
pub const DEFAULT_COHERENT_EPSILON: f64 = 1e-10;

/// Extra levels added to suggested coherent cutoffs. Meeting the norm
/// deficit alone leaves degree-4 moments off by up to ~1e-7; two more
/// levels bring them to ~1e-10.
pub const COHERENT_CUTOFF_MARGIN: usize = 2;

/// Per-mode Fock cutoffs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeCutoffs {
    dims: Vec<usize>,
}

impl ModeCutoffs {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("at least one mode is required".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Dimension(format!("cutoff of mode {pos} must be >= 1")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > cap {
            return Err(Error::DimensionCap { total, cap });
        }
        Ok(Self { dims })
    }

    /// Working-space cutoffs; not subject to the dimension cap.
    pub(crate) fn unchecked(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn uniform(modes: usize, cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff; modes])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat index of a basis ket.
    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::Dimension(format!(
                "{} occupations given for {} modes",
                occupations.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (mode, (&n, &d)) in occupations.iter().zip(&self.dims).enumerate() {
            if n >= d {
                return Err(Error::Dimension(format!(
                    "occupation {n} of mode {mode} does not fit cutoff {d}"
                )));
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    pub fn occupations_of(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for (slot, &d) in occ.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        occ
    }

    /// Stride of `mode` in the flat index.
    fn stride(&self, mode: usize) -> usize {
        self.dims[mode + 1..].iter().product()
    }

    /// Cutoffs enlarged mode-wise by `pad`.
    pub(crate) fn padded(&self, pad: &[usize]) -> Self {
        let dims = self
            .dims
            .iter()
            .enumerate()
            .map(|(i, &d)| d + pad.get(i).copied().unwrap_or(0))
            .collect();
        Self::unchecked(dims)
    }
}

/// Normally-ordered monomial `prod_i (a_i^dag)^{n_i} a_i^{m_i}`.
///
/// Powers are stored per mode as `(creation, annihilation)`; trailing
/// identity modes are trimmed so equal operators compare equal regardless
/// of how many modes they were written for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MonomialSpec {
    powers: Vec<(u32, u32)>,
}

impl MonomialSpec {
    pub fn new(mut powers: Vec<(u32, u32)>) -> Self {
        while powers.last() == Some(&(0, 0)) {
            powers.pop();
        }
        Self { powers }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// `(a_mode^dag)^creation a_mode^annihilation`.
    pub fn single(mode: usize, creation: u32, annihilation: u32) -> Self {
        let mut powers = vec![(0, 0); mode + 1];
        powers[mode] = (creation, annihilation);
        Self::new(powers)
    }

    pub fn annihilation(mode: usize) -> Self {
        Self::single(mode, 0, 1)
    }

    pub fn creation(mode: usize) -> Self {
        Self::single(mode, 1, 0)
    }

    pub fn number(mode: usize) -> Self {
        Self::single(mode, 1, 1)
    }

    pub fn is_identity(&self) -> bool {
        self.powers.is_empty()
    }

    /// `(creation, annihilation)` powers on `mode`.
    pub fn powers(&self, mode: usize) -> (u32, u32) {
        self.powers.get(mode).copied().unwrap_or((0, 0))
    }

    /// Number of modes up to the last non-identity factor.
    pub fn span(&self) -> usize {
        self.powers.len()
    }

    pub fn acts_on(&self, mode: usize) -> bool {
        self.powers(mode) != (0, 0)
    }

    /// Modes with a non-identity factor.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.powers.len()).filter(|&m| self.acts_on(m))
    }

    /// Hermitian conjugate, which is again normally ordered.
    pub fn adjoint(&self) -> Self {
        Self::new(self.powers.iter().map(|&(n, m)| (m, n)).collect())
    }

    /// Factor restricted to the modes accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self::new(
            self.powers
                .iter()
                .enumerate()
                .map(|(mode, &p)| if keep(mode) { p } else { (0, 0) })
                .collect(),
        )
    }

    /// Product of two monomials acting on disjoint sets of modes.
    pub fn disjoint_product(&self, other: &Self) -> Result<Self> {
        let span = self.span().max(other.span());
        let mut powers = Vec::with_capacity(span);
        for mode in 0..span {
            let (a, b) = (self.powers(mode), other.powers(mode));
            powers.push(match (a, b) {
                ((0, 0), p) | (p, (0, 0)) => p,
                _ => {
                    return Err(Error::InvalidClass(format!(
                        "`{self}` and `{other}` both act on mode {}",
                        mode_name(mode)
                    )))
                }
            });
        }
        Ok(Self::new(powers))
    }

    /// Normally-ordered annihilation part only, `prod_i a_i^{m_i}`.
    pub fn annihilation_part(&self) -> Self {
        Self::new(self.powers.iter().map(|&(_, m)| (0, m)).collect())
    }

    /// The conjugate-transposed creation part, `prod_i a_i^{n_i}`, so that
    /// `<x| self |y> = <part_dag x | annihilation_part y>`.
    pub fn creation_part_adjoint(&self) -> Self {
        Self::new(self.powers.iter().map(|&(n, _)| (0, n)).collect())
    }

    pub fn max_creation(&self, mode: usize) -> u32 {
        self.powers(mode).0
    }
}

/// Conventional name of mode `i`: `a`, `b`, `c`, ...
pub fn mode_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("m{i}")
    }
}

fn parse_mode_name(s: &str) -> Option<usize> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Some((c as u8 - b'a') as usize),
        (Some('m'), Some(_)) => s[1..].parse().ok(),
        _ => None,
    }
}

impl fmt::Display for MonomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut put = |f: &mut fmt::Formatter<'_>, name: &str, dag: bool, p: u32| -> fmt::Result {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(name)?;
            if dag {
                f.write_str("+")?;
            }
            if p > 1 {
                write!(f, "^{p}")?;
            }
            Ok(())
        };
        for (mode, &(n, m)) in self.powers.iter().enumerate() {
            let name = mode_name(mode);
            if n > 0 {
                put(f, &name, true, n)?;
            }
            if m > 0 {
                put(f, &name, false, m)?;
            }
        }
        Ok(())
    }
}

/// Parses monomials such as `1`, `a`, `b+^2 b`, `a+ a b`, `Na Nb` (`N` is
/// the number operator `x+ x`). Factors are separated by whitespace or `*`;
/// within a mode every creation factor must precede every annihilation one.
impl FromStr for MonomialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut powers: Vec<(u32, u32)> = Vec::new();
        let tokens: Vec<&str> = s
            .split(|c: char| c.is_whitespace() || c == '*')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            return Err(Error::Parse("empty monomial".into()));
        }
        for token in tokens {
            if token == "1" {
                continue;
            }
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => {
                    let e: u32 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                    (b, e)
                }
                None => (token, 1),
            };
            let (mode, creation, annihilation) = if let Some(rest) = base.strip_prefix('N') {
                let rest = rest.strip_prefix('_').unwrap_or(rest);
                if exp != 1 {
                    return Err(Error::Parse(format!(
                        "`{token}`: powers of number operators are not single normally-ordered monomials"
                    )));
                }
                let mode = parse_mode_name(rest)
                    .ok_or_else(|| Error::Parse(format!("unknown mode in `{token}`")))?;
                (mode, 1, 1)
            } else {
                let (name, dag) = match base
                    .strip_suffix('+')
                    .or_else(|| base.strip_suffix('†'))
                    .or_else(|| base.strip_suffix("dag"))
                {
                    Some(n) => (n, true),
                    None => (base, false),
                };
                let mode = parse_mode_name(name)
                    .ok_or_else(|| Error::Parse(format!("unknown mode in `{token}`")))?;
                if dag {
                    (mode, exp, 0)
                } else {
                    (mode, 0, exp)
                }
            };
            if powers.len() <= mode {
                powers.resize(mode + 1, (0, 0));
            }
            let slot = &mut powers[mode];
            if creation > 0 && slot.1 > 0 {
                return Err(Error::Parse(format!(
                    "`{s}` is not normally ordered in mode {}",
                    mode_name(mode)
                )));
            }
            slot.0 += creation;
            slot.1 += annihilation;
        }
        Ok(Self::new(powers))
    }
}

/// `sqrt(n (n-1) ... (n-k+1))`, the matrix element of `a^k` on `|n>`.
fn lowering_factor(n: usize, k: u32) -> f64 {
    (0..k as usize).map(|t| ((n - t) as f64).sqrt()).product()
}

/// `sqrt((q+1) ... (q+p))`, the matrix element of `(a^dag)^p` on `|q>`.
fn raising_factor(q: usize, p: u32) -> f64 {
    (1..=p as usize).map(|t| ((q + t) as f64).sqrt()).product()
}

/// Applies a monomial to a flat state vector on `cutoffs`, with the
/// truncated-matrix semantics: raising past the cutoff gives zero.
pub fn apply_monomial<T: Real>(
    spec: &MonomialSpec,
    cutoffs: &ModeCutoffs,
    v: &CVector<T>,
) -> CVector<T> {
    assert_eq!(v.len(), cutoffs.total(), "vector does not match cutoffs");
    assert!(
        spec.span() <= cutoffs.modes(),
        "monomial `{spec}` acts on modes beyond the state"
    );
    let mut cur = v.clone();
    for mode in 0..spec.span() {
        let (n, m) = spec.powers(mode);
        if (n, m) == (0, 0) {
            continue;
        }
        let d = cutoffs.dims()[mode];
        let stride = cutoffs.stride(mode);
        let mut next = CVector::<T>::zeros(cur.len());
        for (idx, &amp) in cur.iter().enumerate() {
            if amp.re == T::zero() && amp.im == T::zero() {
                continue;
            }
            let occ = (idx / stride) % d;
            if occ < m as usize {
                continue;
            }
            let lowered = occ - m as usize;
            let raised = lowered + n as usize;
            if raised >= d {
                continue;
            }
            let coeff = lowering_factor(occ, m) * raising_factor(lowered, n);
            let target = idx - occ * stride + raised * stride;
            next[target] += amp.scale(lit(coeff));
        }
        cur = next;
    }
    cur
}

/// Zero-pads a flat vector from `from` into the larger cutoffs `to`.
pub(crate) fn embed_vector<T: Real>(
    v: &CVector<T>,
    from: &ModeCutoffs,
    to: &ModeCutoffs,
) -> CVector<T> {
    if from == to {
        return v.clone();
    }
    let mut out = CVector::<T>::zeros(to.total());
    for (idx, &amp) in v.iter().enumerate() {
        let occ = from.occupations_of(idx);
        let target = occ.iter().zip(to.dims()).fold(0, |acc, (&n, &d)| acc * d + n);
        out[target] = amp;
    }
    out
}

/// Truncated annihilation and creation matrices `(a, a^dag)` for one mode.
pub fn ladder_matrices<T: Real>(cutoff: usize) -> (CMatrix<T>, CMatrix<T>) {
    let mut a = CMatrix::<T>::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = real(lit::<T>(n as f64).sqrt());
    }
    let adag = a.adjoint();
    (a, adag)
}

/// Dense matrix of a monomial on the truncated space, built as a Kronecker
/// product of per-mode factors `(a^dag)^n a^m`.
pub fn monomial_matrix<T: Real>(spec: &MonomialSpec, cutoffs: &ModeCutoffs) -> CMatrix<T> {
    let mut out = CMatrix::<T>::identity(1, 1);
    for (mode, &d) in cutoffs.dims().iter().enumerate() {
        let (n, m) = spec.powers(mode);
        let (a, adag) = ladder_matrices::<T>(d);
        let factor = adag.pow(n) * a.pow(m);
        out = linalg::kron(&out, &factor);
    }
    out
}

/// Normalized pure state on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    cutoffs: ModeCutoffs,
    amplitudes: CVector<T>,
}

impl<T: Real> StateVector<T> {
    /// Builds a state from (possibly unnormalized) amplitudes.
    pub fn new(cutoffs: ModeCutoffs, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != cutoffs.total() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                cutoffs.total()
            )));
        }
        let norm = amplitudes.norm();
        if !(norm > tol::<T>(1e-12)) {
            return Err(Error::DegenerateState);
        }
        Ok(Self {
            cutoffs,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Basis ket `|n_1, ..., n_m>`.
    pub fn fock(occupations: &[usize], cutoffs: &ModeCutoffs) -> Result<Self> {
        let idx = cutoffs.index_of(occupations)?;
        let mut amps = CVector::<T>::zeros(cutoffs.total());
        amps[idx] = real(T::one());
        Ok(Self {
            cutoffs: cutoffs.clone(),
            amplitudes: amps,
        })
    }

    /// Normalized linear combination of states sharing one set of cutoffs.
    pub fn superpose(terms: &[(C<T>, &StateVector<T>)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or(Error::DegenerateState)?
            .1
            .cutoffs
            .clone();
        let mut acc = CVector::<T>::zeros(first.total());
        for (coeff, state) in terms {
            if state.cutoffs != first {
                return Err(Error::Dimension(
                    "superposed states have different cutoffs".into(),
                ));
            }
            acc += state.amplitudes.map(|z| z * *coeff);
        }
        Self::new(first, acc)
    }

    pub fn cutoffs(&self) -> &ModeCutoffs {
        &self.cutoffs
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Result<C<T>> {
        Ok(self.amplitudes[self.cutoffs.index_of(occupations)?])
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// The same state zero-padded into larger cutoffs.
    pub fn embed(&self, cutoffs: &ModeCutoffs) -> Result<Self> {
        if cutoffs.modes() != self.cutoffs.modes()
            || cutoffs.dims().iter().zip(self.cutoffs.dims()).any(|(a, b)| a < b)
        {
            return Err(Error::Dimension(format!(
                "cannot embed cutoffs {:?} into {:?}",
                self.cutoffs.dims(),
                cutoffs.dims()
            )));
        }
        Ok(Self {
            amplitudes: embed_vector(&self.amplitudes, &self.cutoffs, cutoffs),
            cutoffs: cutoffs.clone(),
        })
    }

    /// Tensor product `self ⊗ other`, modes of `other` appended.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.cutoffs.dims().to_vec();
        dims.extend_from_slice(other.cutoffs.dims());
        let cutoffs = ModeCutoffs::new(dims)?;
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        Self::new(cutoffs, amps)
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }
}

/// Basis ket `|n_1, ..., n_m>` with the given cutoffs.
pub fn make_fock_state<T: Real>(occupations: &[usize], cutoffs: &ModeCutoffs) -> Result<StateVector<T>> {
    StateVector::fock(occupations, cutoffs)
}

pub fn superpose<T: Real>(terms: &[(C<T>, &StateVector<T>)]) -> Result<StateVector<T>> {
    StateVector::superpose(terms)
}

/// Weighted pure components `X = sum_k w_k |v_k><v_k|` of a Hermitian operator.
pub(crate) type Components<T> = Vec<(T, CVector<T>)>;

fn spectral_components<T: Real>(m: &CMatrix<T>) -> Components<T> {
    let pairs = linalg::hermitian_eigenpairs(m);
    let scale = pairs
        .iter()
        .map(|(w, _)| w.abs())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let floor = scale * lit(1e-15);
    pairs.into_iter().filter(|(w, _)| w.abs() > floor).collect()
}

/// Mixed state on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    cutoffs: ModeCutoffs,
    matrix: CMatrix<T>,
    components: Components<T>,
}

/// Tolerances checked when a density matrix is constructed.
#[derive(Debug, Clone, Copy)]
pub struct DensityTolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl Default for DensityTolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-12,
            min_eigenvalue: 1e-10,
        }
    }
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(cutoffs: ModeCutoffs, matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerances(cutoffs, matrix, DensityTolerances::default())
    }

    pub fn with_tolerances(
        cutoffs: ModeCutoffs,
        matrix: CMatrix<T>,
        tols: DensityTolerances,
    ) -> Result<Self> {
        let n = cutoffs.total();
        if matrix.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "density matrix of shape {:?} for dimension {n}",
                matrix.shape()
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > tol(tols.hermiticity) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:e})",
                to_f64(defect)
            )));
        }
        let tr = linalg::trace(&matrix);
        if modulus(tr - real(T::one())) > tol(tols.trace) {
            return Err(Error::InvalidState(format!(
                "trace {} differs from 1",
                to_f64(tr.re)
            )));
        }
        let components = spectral_components(&matrix);
        let min_eig = components
            .iter()
            .map(|(w, _)| *w)
            .fold(T::zero(), |a, b| if b < a { b } else { a });
        if min_eig < -tol::<T>(tols.min_eigenvalue) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                to_f64(min_eig)
            )));
        }
        Ok(Self {
            cutoffs,
            matrix,
            components,
        })
    }

    pub fn from_pure(state: &StateVector<T>) -> Self {
        let v = state.amplitudes();
        Self {
            cutoffs: state.cutoffs.clone(),
            matrix: v * v.adjoint(),
            components: vec![(T::one(), v.clone())],
        }
    }

    /// Convex mixture `sum_k p_k |psi_k><psi_k|`; weights are renormalized.
    pub fn mixture(terms: &[(T, &StateVector<T>)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::DegenerateState)?.1.cutoffs.clone();
        let total: T = terms.iter().fold(T::zero(), |a, (p, _)| a + *p);
        if terms.iter().any(|(p, _)| *p < T::zero()) || !(total > T::zero()) {
            return Err(Error::InvalidState("mixture weights must be nonnegative".into()));
        }
        let n = first.total();
        let mut m = CMatrix::<T>::zeros(n, n);
        for (p, psi) in terms {
            if psi.cutoffs != first {
                return Err(Error::Dimension("mixed states have different cutoffs".into()));
            }
            let v = psi.amplitudes();
            m += (v * v.adjoint()).map(|z| z.scale(*p / total));
        }
        Self::new(first, m)
    }

    /// Convex mixture of density matrices; weights are renormalized.
    pub fn mix(terms: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::DegenerateState)?.1.cutoffs.clone();
        let total: T = terms.iter().fold(T::zero(), |a, (p, _)| a + *p);
        if terms.iter().any(|(p, _)| *p < T::zero()) || !(total > T::zero()) {
            return Err(Error::InvalidState("mixture weights must be nonnegative".into()));
        }
        let n = first.total();
        let mut m = CMatrix::<T>::zeros(n, n);
        for (p, rho) in terms {
            if rho.cutoffs != first {
                return Err(Error::Dimension("mixed states have different cutoffs".into()));
            }
            m += rho.matrix.map(|z| z.scale(*p / total));
        }
        Self::new(first, m)
    }

    pub fn maximally_mixed(cutoffs: &ModeCutoffs) -> Self {
        let n = cutoffs.total();
        let m = CMatrix::<T>::identity(n, n).map(|z| z.unscale(lit(n as f64)));
        Self::new(cutoffs.clone(), m).expect("maximally mixed state is valid")
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.cutoffs.dims().to_vec();
        dims.extend_from_slice(other.cutoffs.dims());
        Self::new(ModeCutoffs::new(dims)?, self.matrix.kronecker(&other.matrix))
    }

    pub fn cutoffs(&self) -> &ModeCutoffs {
        &self.cutoffs
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub(crate) fn components(&self) -> &Components<T> {
        &self.components
    }

    /// Fock-basis partial transpose on the listed modes:
    /// `rho^Γ = sum rho_{kl,k'l'} |k l'><k' l|` with `l` the listed modes.
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<HermitianOperator<T>> {
        if let Some(&bad) = modes.iter().find(|&&m| m >= self.cutoffs.modes()) {
            return Err(Error::Dimension(format!("mode {bad} is not part of the state")));
        }
        let n = self.cutoffs.total();
        let mut out = CMatrix::<T>::zeros(n, n);
        for row in 0..n {
            let occ_r = self.cutoffs.occupations_of(row);
            for col in 0..n {
                let occ_c = self.cutoffs.occupations_of(col);
                let (mut r2, mut c2) = (occ_r.clone(), occ_c.clone());
                for &m in modes {
                    std::mem::swap(&mut r2[m], &mut c2[m]);
                }
                let src_r = self.cutoffs.index_of(&r2)?;
                let src_c = self.cutoffs.index_of(&c2)?;
                out[(row, col)] = self.matrix[(src_r, src_c)];
            }
        }
        HermitianOperator::new(self.cutoffs.clone(), out)
    }
}

/// Hermitian (not necessarily positive) operator on a truncated Fock space,
/// e.g. a partially transposed state.
#[derive(Debug, Clone)]
pub struct HermitianOperator<T: Real> {
    cutoffs: ModeCutoffs,
    matrix: CMatrix<T>,
    components: Components<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(cutoffs: ModeCutoffs, matrix: CMatrix<T>) -> Result<Self> {
        let n = cutoffs.total();
        if matrix.shape() != (n, n) {
            return Err(Error::Dimension("operator does not match cutoffs".into()));
        }
        if !linalg::is_hermitian(&matrix, tol(1e-12)) {
            return Err(Error::InvalidState("operator is not Hermitian".into()));
        }
        let components = spectral_components(&matrix);
        Ok(Self {
            cutoffs,
            matrix,
            components,
        })
    }

    pub fn cutoffs(&self) -> &ModeCutoffs {
        &self.cutoffs
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub(crate) fn components(&self) -> &Components<T> {
        &self.components
    }
}

/// Truncated (unnormalized) coherent amplitudes `e^{-|α|²/2} α^n / sqrt(n!)`.
pub fn coherent_amplitudes<T: Real>(alpha: C<T>, cutoff: usize) -> CVector<T> {
    let damp = (-alpha.norm_sqr() / (T::one() + T::one())).exp();
    let mut out = CVector::<T>::zeros(cutoff);
    let mut term = real(damp);
    for n in 0..cutoff {
        out[n] = term;
        term = term * alpha / real(lit::<T>((n + 1) as f64).sqrt());
    }
    out
}

/// Norm lost by truncating `|α>` at `cutoff`: `e^{-x} sum_{n >= cutoff} x^n / n!`, `x = |α|²`.
pub fn coherent_norm_deficit(abs2: f64, cutoff: usize) -> f64 {
    if abs2 == 0.0 {
        return if cutoff >= 1 { 0.0 } else { 1.0 };
    }
    // log of the first tail term, then sum the tail until it stops mattering
    let log_first = -abs2 + cutoff as f64 * abs2.ln() - ln_factorial(cutoff);
    let mut term = log_first.exp();
    let mut sum = 0.0;
    let mut n = cutoff;
    while term > 0.0 && (term > sum * 1e-17 || (n as f64) < abs2) {
        sum += term;
        n += 1;
        term *= abs2 / n as f64;
        if n > cutoff + 10_000 {
            break;
        }
    }
    sum.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Smallest cutoff whose truncation deficit for `|α|²` is at most `eps`.
pub fn required_coherent_cutoff(abs2: f64, eps: f64) -> usize {
    let mut n = 1;
    while coherent_norm_deficit(abs2, n) > eps {
        n += 1;
    }
    n
}

/// Per-mode cutoffs sufficient for every coherent term, splitting the
/// deficit budget evenly across modes, plus [`COHERENT_CUTOFF_MARGIN`]
/// on modes with a nonzero amplitude.
pub fn coherent_cutoffs_for<T: Real>(terms: &[(C<T>, Vec<C<T>>)], eps: f64) -> Vec<usize> {
    let modes = terms.iter().map(|(_, a)| a.len()).max().unwrap_or(0);
    let per_mode = eps / modes.max(1) as f64;
    (0..modes)
        .map(|mode| {
            terms
                .iter()
                .map(|(_, alphas)| {
                    let a2 = to_f64(alphas[mode].norm_sqr());
                    let margin = if a2 > 0.0 { COHERENT_CUTOFF_MARGIN } else { 0 };
                    required_coherent_cutoff(a2, per_mode) + margin
                })
                .max()
                .unwrap_or(1)
        })
        .collect()
}

/// Normalized truncated superposition `sum_t c_t |α_t1, ..., α_tm>` of
/// multi-mode coherent states.
///
/// Each coherent term must lose at most `eps` of its norm to truncation;
/// otherwise an [`Error::InsufficientCutoff`] names cutoffs that suffice.
pub fn make_coherent_superposition<T: Real>(
    terms: &[(C<T>, Vec<C<T>>)],
    cutoffs: &ModeCutoffs,
    eps: f64,
) -> Result<StateVector<T>> {
    if terms.is_empty() {
        return Err(Error::DegenerateState);
    }
    let modes = cutoffs.modes();
    if terms.iter().any(|(_, a)| a.len() != modes) {
        return Err(Error::Dimension(format!(
            "every coherent term needs {modes} amplitudes"
        )));
    }
    let mut worst = 0.0f64;
    for (_, alphas) in terms {
        let kept: f64 = alphas
            .iter()
            .zip(cutoffs.dims())
            .map(|(a, &d)| 1.0 - coherent_norm_deficit(to_f64(a.norm_sqr()), d))
            .product();
        worst = worst.max(1.0 - kept);
    }
    if worst > eps {
        let needed = coherent_cutoffs_for(terms, eps);
        let required = needed
            .iter()
            .zip(cutoffs.dims())
            .map(|(&n, &d)| n.max(d))
            .collect();
        return Err(Error::InsufficientCutoff {
            required,
            deficit: worst,
            limit: eps,
        });
    }
    let mut acc = CVector::<T>::zeros(cutoffs.total());
    for (coeff, alphas) in terms {
        let mut v = DVector::from_element(1, real(T::one()));
        for (a, &d) in alphas.iter().zip(cutoffs.dims()) {
            v = v.kronecker(&coherent_amplitudes(*a, d));
        }
        acc += v.map(|z| z * *coeff);
    }
    StateVector::new(cutoffs.clone(), acc)
}
