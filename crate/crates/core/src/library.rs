//! Named states and operator classes used throughout the examples and the
//! regression fixtures.

use crate::error::{Error, Result};
use crate::fock::{
    coherent_cutoffs_for, make_coherent_superposition, DensityMatrix, ModeCutoffs, MonomialSpec,
    StateVector, DEFAULT_COHERENT_EPSILON,
};
use crate::moments::{GenericClass, OperatorClass, State};
use crate::scalar::{c, Real, C};

/// Parameters accepted by [`state_library`]. Unused fields are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct LibraryParams {
    pub alpha: C<f64>,
    pub beta: C<f64>,
    /// Occupations for `fock`.
    pub occupations: Vec<usize>,
    /// Per-mode cutoff override. Finite states are embedded; coherent
    /// states are truncated here (and rejected if the deficit exceeds `epsilon`).
    pub cutoff: Option<usize>,
    /// Mode count and cutoff for `maximally_mixed`.
    pub modes: usize,
    pub epsilon: f64,
}

impl Default for LibraryParams {
    fn default() -> Self {
        Self {
            alpha: C::new(0.0, 0.0),
            beta: C::new(0.0, 0.0),
            occupations: Vec::new(),
            cutoff: None,
            modes: 2,
            epsilon: DEFAULT_COHERENT_EPSILON,
        }
    }
}

impl LibraryParams {
    pub fn coherent(alpha: f64, beta: f64) -> Self {
        Self {
            alpha: C::new(alpha, 0.0),
            beta: C::new(beta, 0.0),
            ..Self::default()
        }
    }
}

/// Library entries with a one-line description each.
pub const LIBRARY_STATES: &[(&str, &str)] = &[
    ("singlet", "(|01> - |10>)/sqrt2"),
    ("bell_phi_plus", "(|00> + |11>)/sqrt2"),
    ("partial_example2", "(|00> + |01> + |10>)/sqrt3"),
    ("cat_prime", "N'(|alpha,-beta> - |-alpha,beta>)"),
    ("cat_double_prime", "N''(|alpha,beta> - |-alpha,-beta>)"),
    ("ghz3", "(|000> + |111>)/sqrt2"),
    ("w3", "(|001> + |010> + |100>)/sqrt3"),
    ("pair_single3", "(|011> + |100>)/sqrt2"),
    ("product_coherent", "|alpha>|beta>"),
    ("fock", "|n1 n2 ...>"),
    ("maximally_mixed", "identity / d^modes on `modes` modes with cutoff d (default 2)"),
];

fn qubit_superposition<T: Real>(terms: &[(f64, &[usize])], cutoff: Option<usize>) -> Result<State<T>> {
    let modes = terms[0].1.len();
    let support = terms.iter().flat_map(|(_, occ)| occ.iter()).max().copied().unwrap_or(0) + 1;
    let d = cutoff.unwrap_or(support);
    if d < support {
        return Err(Error::InvalidState(format!(
            "cutoff {d} is below the state's support {support}"
        )));
    }
    let cutoffs = ModeCutoffs::uniform(modes, d)?;
    let kets = terms
        .iter()
        .map(|(_, occ)| StateVector::fock(occ, &cutoffs))
        .collect::<Result<Vec<_>>>()?;
    let weighted: Vec<(C<T>, &StateVector<T>)> =
        terms.iter().zip(&kets).map(|((w, _), k)| (c(*w, 0.0), k)).collect();
    Ok(StateVector::superpose(&weighted)?.into())
}

fn coherent_state<T: Real>(terms: &[(f64, [C<f64>; 2])], p: &LibraryParams) -> Result<State<T>> {
    let terms: Vec<(C<T>, Vec<C<T>>)> = terms
        .iter()
        .map(|(w, a)| (c(*w, 0.0), a.iter().map(|z| c(z.re, z.im)).collect()))
        .collect();
    let dims = match p.cutoff {
        Some(d) => vec![d; 2],
        None => coherent_cutoffs_for(&terms, p.epsilon),
    };
    let cutoffs = ModeCutoffs::new(dims)?;
    Ok(make_coherent_superposition(&terms, &cutoffs, p.epsilon)?.into())
}

/// Builds a named library state.
pub fn state_library<T: Real>(name: &str, p: &LibraryParams) -> Result<State<T>> {
    let (a, b) = (p.alpha, p.beta);
    match name {
        "singlet" => qubit_superposition(&[(1.0, &[0, 1]), (-1.0, &[1, 0])], p.cutoff),
        "bell_phi_plus" => qubit_superposition(&[(1.0, &[0, 0]), (1.0, &[1, 1])], p.cutoff),
        "partial_example2" => {
            qubit_superposition(&[(1.0, &[0, 0]), (1.0, &[0, 1]), (1.0, &[1, 0])], p.cutoff)
        }
        "ghz3" => qubit_superposition(&[(1.0, &[0, 0, 0]), (1.0, &[1, 1, 1])], p.cutoff),
        "w3" => qubit_superposition(
            &[(1.0, &[0, 0, 1]), (1.0, &[0, 1, 0]), (1.0, &[1, 0, 0])],
            p.cutoff,
        ),
        "pair_single3" => qubit_superposition(&[(1.0, &[0, 1, 1]), (1.0, &[1, 0, 0])], p.cutoff),
        "cat_prime" => coherent_state(&[(1.0, [a, -b]), (-1.0, [-a, b])], p),
        "cat_double_prime" => coherent_state(&[(1.0, [a, b]), (-1.0, [-a, -b])], p),
        "product_coherent" => coherent_state(&[(1.0, [a, b])], p),
        "fock" => {
            if p.occupations.is_empty() {
                return Err(Error::InvalidState("`fock` needs occupations".into()));
            }
            qubit_superposition(&[(1.0, &p.occupations)], p.cutoff)
        }
        "maximally_mixed" => {
            let cutoffs = ModeCutoffs::uniform(p.modes.max(1), p.cutoff.unwrap_or(2))?;
            Ok(DensityMatrix::maximally_mixed(&cutoffs).into())
        }
        _ => Err(Error::Unknown(name.to_string())),
    }
}

pub fn singlet<T: Real>() -> StateVector<T> {
    pure(state_library("singlet", &LibraryParams::default()))
}

pub fn bell_phi_plus<T: Real>() -> StateVector<T> {
    pure(state_library("bell_phi_plus", &LibraryParams::default()))
}

pub fn partial_example2<T: Real>() -> StateVector<T> {
    pure(state_library("partial_example2", &LibraryParams::default()))
}

pub fn ghz3<T: Real>() -> StateVector<T> {
    pure(state_library("ghz3", &LibraryParams::default()))
}

pub fn pair_single3<T: Real>() -> StateVector<T> {
    pure(state_library("pair_single3", &LibraryParams::default()))
}

pub fn cat_prime<T: Real>(alpha: f64, beta: f64) -> Result<StateVector<T>> {
    state_library("cat_prime", &LibraryParams::coherent(alpha, beta)).map(pure_ok)
}

pub fn cat_double_prime<T: Real>(alpha: f64, beta: f64) -> Result<StateVector<T>> {
    state_library("cat_double_prime", &LibraryParams::coherent(alpha, beta)).map(pure_ok)
}

pub fn product_coherent<T: Real>(alpha: f64, beta: f64) -> Result<StateVector<T>> {
    state_library("product_coherent", &LibraryParams::coherent(alpha, beta)).map(pure_ok)
}

fn pure<T: Real>(s: Result<State<T>>) -> StateVector<T> {
    pure_ok(s.expect("fixed library state"))
}

fn pure_ok<T: Real>(s: State<T>) -> StateVector<T> {
    match s {
        State::Pure(v) => v,
        State::Mixed(_) => unreachable!("library entry is pure"),
    }
}

fn parse_all(xs: &[&str]) -> Vec<MonomialSpec> {
    xs.iter().map(|s| s.parse().expect("preset monomial")).collect()
}

fn preset(a: &[&str], b: &[&str]) -> OperatorClass {
    OperatorClass::two_mode(parse_all(a), parse_all(b)).expect("preset class")
}

/// `(1, a) ⊗ (1, b)`.
pub fn class_basic() -> OperatorClass {
    preset(&["1", "a"], &["1", "b"])
}

/// `(1, a, a) ⊗ (1, b, b)`, the 9x9 class used with the Störmer map.
pub fn class_stormer() -> OperatorClass {
    preset(&["1", "a", "a"], &["1", "b", "b"])
}

/// `(1, a, N_a, a^2) ⊗ (1, b, N_b, b^2)`.
pub fn class_breuer1() -> OperatorClass {
    preset(&["1", "a", "Na", "a^2"], &["1", "b", "Nb", "b^2"])
}

/// `(1, a, N_a, 1) ⊗ (1, b, N_b, 1)`.
pub fn class_breuer2() -> OperatorClass {
    preset(&["1", "a", "Na", "1"], &["1", "b", "Nb", "1"])
}

/// `(1, a, 1, 1) ⊗ (1, b, 1, 1)`.
pub fn class_breuer3() -> OperatorClass {
    preset(&["1", "a", "1", "1"], &["1", "b", "1", "1"])
}

/// Named tensor-product class presets.
pub const CLASS_PRESETS: &[(&str, &str)] = &[
    ("basic", "(1, a) ⊗ (1, b)"),
    ("stormer", "(1, a, a) ⊗ (1, b, b)"),
    ("breuer1", "(1, a, Na, a^2) ⊗ (1, b, Nb, b^2)"),
    ("breuer2", "(1, a, Na, 1) ⊗ (1, b, Nb, 1)"),
    ("breuer3", "(1, a, 1, 1) ⊗ (1, b, 1, 1)"),
];

pub fn class_preset(name: &str) -> Result<OperatorClass> {
    match name {
        "basic" => Ok(class_basic()),
        "stormer" => Ok(class_stormer()),
        "breuer1" => Ok(class_breuer1()),
        "breuer2" => Ok(class_breuer2()),
        "breuer3" => Ok(class_breuer3()),
        _ => Err(Error::Unknown(name.to_string())),
    }
}

/// `(1, b, ab)`, tested on the state with mode `b` conjugated.
pub fn class_cat() -> GenericClass {
    GenericClass::parse(&["1", "b", "a b"]).expect("preset class")
}

/// `(1, ab)`.
pub fn class_pair() -> GenericClass {
    GenericClass::parse(&["1", "a b"]).expect("preset class")
}
