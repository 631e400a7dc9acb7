//! Entanglement criteria on matrices of moments. Every test is one-sided:
//! a violation certifies entanglement, a pass proves nothing.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::fock::MonomialSpec;
use crate::library;
use crate::linalg::{self, CMatrix};
use crate::moments::{
    build_generic_moment_matrix, build_moment_matrix, moment, Expectation, GenericClass,
    OperatorClass, Side,
};
use crate::posmaps::{apply_partial, BreuerParams, PositiveMap};
use crate::reorder::{self, nu_gamma_of, nu_r_of};
use crate::scalar::{to_f64, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Entangled,
    Inconclusive,
    /// Only produced by state-level PPT checks on 2x2 and 2x3 systems.
    Separable,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Entangled => "ENTANGLED",
            Outcome::Inconclusive => "INCONCLUSIVE",
            Outcome::Separable => "SEPARABLE",
        })
    }
}

/// What a criterion was evaluated on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub class: Option<String>,
    /// 1-based principal submatrix indices.
    pub r: Option<Vec<usize>>,
    pub map: Option<String>,
    pub side: Option<Side>,
}

/// Result of one criterion. The deciding witness is `witness[0]`; it is
/// compared against `threshold` with tolerance `tol`.
#[derive(Debug, Clone)]
pub struct Verdict<T: Real> {
    pub criterion: String,
    pub witness: Vec<(String, T)>,
    pub threshold: T,
    pub tol: T,
    pub outcome: Outcome,
    /// Witness equals the threshold within `tol`.
    pub boundary: bool,
    pub provenance: Provenance,
    pub matrix: Option<CMatrix<T>>,
}

impl<T: Real> Verdict<T> {
    pub fn is_entangled(&self) -> bool {
        self.outcome == Outcome::Entangled
    }

    pub fn value(&self) -> T {
        self.witness[0].1
    }

    /// Witness by name.
    pub fn get(&self, name: &str) -> Option<T> {
        self.witness.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl<T: Real> fmt::Display for Verdict<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.criterion, self.outcome)?;
        for (name, v) in &self.witness {
            write!(f, " {name}={:.6}", to_f64(*v))?;
        }
        if self.boundary {
            f.write_str(" (boundary)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// Entangled when the witness is below the threshold.
    Below,
    Above,
}

fn verdict<T: Real>(
    criterion: &str,
    witness: Vec<(String, T)>,
    threshold: T,
    tol: T,
    direction: Direction,
    provenance: Provenance,
    matrix: Option<CMatrix<T>>,
) -> Verdict<T> {
    let v = witness[0].1;
    let violated = match direction {
        Direction::Below => v < threshold - tol,
        Direction::Above => v > threshold + tol,
    };
    Verdict {
        criterion: criterion.to_string(),
        witness,
        threshold,
        tol,
        outcome: if violated { Outcome::Entangled } else { Outcome::Inconclusive },
        boundary: !violated && (v - threshold).abs() <= tol,
        provenance,
        matrix,
    }
}

fn named<T>(pairs: &[(&str, T)]) -> Vec<(String, T)>
where
    T: Copy,
{
    pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
}

/// Names of every criterion in this module.
pub const CRITERIA: &[(&str, &str)] = &[
    ("sylvester_scan", "negative principal minor of the partially transposed matrix of moments"),
    ("min_eig_test", "negative eigenvalue of the partially transposed matrix of moments"),
    ("pt_norm_test", "normalized trace norm of the partially transposed matrix above 1"),
    ("realign_norm_test", "normalized trace norm of the realigned matrix above 1"),
    ("map_test", "positive map on one factor gives a non-positive (sub)matrix"),
    ("breuer_bell_test", "Breuer map, r = (1,6,9) submatrix"),
    ("hz_two_mode", "<N_a N_b> < |<a b^dag>|^2"),
    ("hz_three_mode", "<N_a N_b N_c> < |<a^dag b c>|^2 (variant 1) or <N_a><N_b N_c> < |<a b c>|^2 (variant 2)"),
    ("breuer_inequality_test", "2(<N_a N_b> + <N_a^2 N_b>) < |<N_a b> - <a^dag b>|^2"),
    ("sv_cat_state_test", "negative determinant for f = (1, b, ab) on the partially transposed state"),
    ("generic_det_test", "negative determinant of a non-tensor class on the state with some modes transposed"),
    ("state_level_tests", "PPT and realignment on a reconstructed density matrix"),
];

/// Default largest minor enumerated by [`sylvester_scan`].
pub const DEFAULT_MAX_MINOR: usize = 4;

/// Principal-minor scan. With `r_list`, only those minors are evaluated;
/// otherwise every minor up to `max_minor_size`. Reports the most negative
/// determinant found.
pub fn sylvester_scan<T: Real>(
    m: &CMatrix<T>,
    max_minor_size: usize,
    r_list: Option<&[Vec<usize>]>,
    tol: T,
) -> Result<Verdict<T>> {
    let n = m.nrows();
    let candidates: Vec<Vec<usize>> = match r_list {
        Some(list) => list.to_vec(),
        None => (1..=max_minor_size.min(n))
            .flat_map(|k| (1..=n).combinations(k))
            .collect(),
    };
    let mut best: Option<(T, Vec<usize>, CMatrix<T>)> = None;
    for r in candidates {
        let sub = linalg::principal_submatrix(m, &r)?;
        let det = linalg::determinant(&sub).re;
        if best.as_ref().is_none_or(|(d, _, _)| det < *d) {
            best = Some((det, r, sub));
        }
    }
    let (det, r, sub) = best.ok_or_else(|| Error::Dimension("no minors to scan".into()))?;
    Ok(verdict(
        "sylvester_scan",
        named(&[("det", det)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance { r: Some(r), ..Default::default() },
        Some(sub),
    ))
}

pub fn min_eig_test<T: Real>(m: &CMatrix<T>, tol: T) -> Verdict<T> {
    let e = linalg::min_hermitian_eigenvalue(m);
    verdict(
        "min_eig_test",
        named(&[("min_eig", e)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance::default(),
        Some(m.clone()),
    )
}

/// `ν^Γ > 1` on the class.
pub fn pt_norm_test<T: Real>(state: &dyn Expectation<T>, class: &OperatorClass, tol: T) -> Result<Verdict<T>> {
    let m = build_moment_matrix(state, class)?;
    let nu = nu_gamma_of(&m)?;
    let pt = reorder::partial_transpose(&m, Side::A);
    Ok(verdict(
        "pt_norm_test",
        named(&[("nu", nu)]),
        T::one(),
        tol,
        Direction::Above,
        Provenance { class: Some(class.to_string()), ..Default::default() },
        Some(pt.into_entries()),
    ))
}

/// `ν^R > 1` on the class.
pub fn realign_norm_test<T: Real>(state: &dyn Expectation<T>, class: &OperatorClass, tol: T) -> Result<Verdict<T>> {
    let m = build_moment_matrix(state, class)?;
    let nu = nu_r_of(&m)?;
    let r = reorder::realign(&m);
    Ok(verdict(
        "realign_norm_test",
        named(&[("nu", nu)]),
        T::one(),
        tol,
        Direction::Above,
        Provenance { class: Some(class.to_string()), ..Default::default() },
        Some(r.entries().clone()),
    ))
}

/// Applies `map` to one factor of the matrix of moments and checks the
/// result (or its `r` submatrix) for negativity.
pub fn map_test<T: Real>(
    state: &dyn Expectation<T>,
    class: &OperatorClass,
    map: &dyn PositiveMap<T>,
    side: Side,
    r: Option<&[usize]>,
    tol: T,
) -> Result<Verdict<T>> {
    let m = build_moment_matrix(state, class)?;
    let mapped = apply_partial(&m, map, side)?;
    let sub = match r {
        Some(r) => linalg::principal_submatrix(mapped.entries(), r)?,
        None => mapped.into_entries(),
    };
    let e = linalg::min_hermitian_eigenvalue(&sub);
    let det = linalg::determinant(&sub).re;
    let mut v = verdict(
        "map_test",
        named(&[("min_eig", e), ("det", det)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance {
            class: Some(class.to_string()),
            r: r.map(|r| r.to_vec()),
            map: Some(map.name()),
            side: Some(side),
        },
        Some(sub),
    );
    if det < -tol {
        v.outcome = Outcome::Entangled;
        v.boundary = false;
    }
    Ok(v)
}

/// Which redundant class the Bell-state Breuer test runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreuerClass {
    /// `(1, a, N_a, a^2) ⊗ (1, b, N_b, b^2)`.
    F1,
    /// `(1, a, N_a, 1) ⊗ (1, b, N_b, 1)`.
    F2,
}

impl BreuerClass {
    pub fn class(self) -> OperatorClass {
        match self {
            BreuerClass::F1 => library::class_breuer1(),
            BreuerClass::F2 => library::class_breuer2(),
        }
    }
}

/// The `r = (1, 6, 9)` submatrix of the Breuer-mapped 16x16 matrix,
/// assembled entry by entry from the plain moments.
pub fn breuer_bell_matrix<T: Real>(state: &dyn Expectation<T>, which: BreuerClass) -> Result<CMatrix<T>> {
    let class = which.class();
    let m = build_moment_matrix(state, &class)?;
    let g = |i: usize, j: usize| m.get(i, j);
    let mut out = CMatrix::<T>::zeros(3, 3);
    out[(0, 0)] = g(2, 2) + g(3, 3);
    out[(0, 1)] = -g(1, 6) - g(3, 8);
    out[(0, 2)] = g(2, 10) + g(3, 11);
    out[(1, 0)] = -g(6, 1) - g(8, 3);
    out[(1, 1)] = g(5, 5) + g(8, 8);
    out[(1, 2)] = -g(6, 9) - g(8, 11);
    out[(2, 0)] = g(10, 2) + g(11, 3);
    out[(2, 1)] = -g(9, 6) - g(11, 8);
    out[(2, 2)] = g(10, 10) + g(11, 11);
    Ok(out)
}

pub fn breuer_bell_test<T: Real>(state: &dyn Expectation<T>, which: BreuerClass, tol: T) -> Result<Verdict<T>> {
    let sub = breuer_bell_matrix(state, which)?;
    let det = linalg::determinant(&sub).re;
    let e = linalg::min_hermitian_eigenvalue(&sub);
    Ok(verdict(
        "breuer_bell_test",
        named(&[("det", det), ("min_eig", e)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance {
            class: Some(which.class().to_string()),
            r: Some(vec![1, 6, 9]),
            map: Some(PositiveMap::<T>::name(&BreuerParams::<T>::anti_diagonal())),
            side: Some(Side::A),
        },
        Some(sub),
    ))
}

fn m<T: Real>(state: &dyn Expectation<T>, s: &str) -> Result<C<T>> {
    let spec: MonomialSpec = s.parse()?;
    moment(state, &spec)
}

fn remap(spec: &str, modes: &[usize]) -> Result<MonomialSpec> {
    let s: MonomialSpec = spec.parse()?;
    let max = modes.iter().max().copied().unwrap_or(0) + 1;
    let mut powers = vec![(0, 0); max];
    for (i, &mode) in modes.iter().enumerate() {
        powers[mode] = s.powers(i);
    }
    Ok(MonomialSpec::new(powers))
}

fn check_modes(state: &dyn Expectation<impl Real>, modes: &[usize]) -> Result<()> {
    let n = state.cutoffs().modes();
    if modes.iter().any(|&m| m >= n) || modes.iter().duplicates().next().is_some() {
        return Err(Error::InvalidClass(format!(
            "modes {modes:?} are not distinct modes of a {n}-mode state"
        )));
    }
    Ok(())
}

/// `<N_a N_b> < |<a b^dag>|^2` on modes `(a, b)`. The companion condition
/// `<N_a><N_b> < |<a b>|^2` is reported as the witnesses `aux_lhs`, `aux_rhs`
/// but does not decide the outcome.
pub fn hz_two_mode<T: Real>(state: &dyn Expectation<T>, modes: (usize, usize), tol: T) -> Result<Verdict<T>> {
    let ms = [modes.0, modes.1];
    check_modes(state, &ms)?;
    let mm = |s: &str| -> Result<C<T>> { moment(state, &remap(s, &ms)?) };
    let nn = mm("Na Nb")?.re;
    let cross = mm("a b+")?.norm_sqr();
    let na = mm("Na")?.re;
    let nb = mm("Nb")?.re;
    let ab = mm("a b")?.norm_sqr();
    let diff = nn - cross;
    let mut v = verdict(
        "hz_two_mode",
        named(&[("lhs - rhs", diff), ("lhs", nn), ("rhs", cross), ("aux_lhs", na * nb), ("aux_rhs", ab)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance { class: Some("(1, a) ⊗ (1, b)".into()), r: Some(vec![1, 4]), ..Default::default() },
        None,
    );
    v.matrix = Some(hz_matrix(nn, mm("a b+")?));
    Ok(v)
}

fn hz_matrix<T: Real>(diag: T, off: C<T>) -> CMatrix<T> {
    let mut out = CMatrix::<T>::identity(2, 2);
    out[(0, 1)] = off;
    out[(1, 0)] = off.conj();
    out[(1, 1)] = C::new(diag, T::zero());
    out
}

/// Three-mode inequalities on modes 0, 1, 2:
/// variant 1 `<N_a N_b N_c> < |<a^dag b c>|^2`,
/// variant 2 `<N_a><N_b N_c> < |<a b c>|^2`.
pub fn hz_three_mode<T: Real>(state: &dyn Expectation<T>, variant: u8, tol: T) -> Result<Verdict<T>> {
    check_modes(state, &[0, 1, 2])?;
    let (lhs, rhs) = match variant {
        1 => (m(state, "Na Nb Nc")?.re, m(state, "a+ b c")?.norm_sqr()),
        2 => (m(state, "Na")?.re * m(state, "Nb Nc")?.re, m(state, "a b c")?.norm_sqr()),
        _ => return Err(Error::InvalidClass(format!("unknown variant {variant}"))),
    };
    Ok(verdict(
        &format!("hz_three_mode_v{variant}"),
        named(&[("lhs - rhs", lhs - rhs), ("lhs", lhs), ("rhs", rhs)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance::default(),
        None,
    ))
}

/// `2(<N_a N_b> + <N_a^2 N_b>) < |<N_a b> - <a^dag b>|^2`.
pub fn breuer_inequality_test<T: Real>(state: &dyn Expectation<T>, tol: T) -> Result<Verdict<T>> {
    check_modes(state, &[0, 1])?;
    let two = T::one() + T::one();
    let nn = m(state, "Na Nb")?.re;
    // N_a^2 = a^dag^2 a^2 + N_a
    let n2n = m(state, "a+^2 a^2 Nb")?.re + nn;
    let lhs = two * (nn + n2n);
    let off = m(state, "Na b")? - m(state, "a+ b")?;
    let rhs = off.norm_sqr();
    let mut mat = CMatrix::<T>::zeros(2, 2);
    mat[(0, 0)] = C::new(two, T::zero());
    mat[(0, 1)] = off;
    mat[(1, 0)] = off.conj();
    mat[(1, 1)] = C::new(lhs / two, T::zero());
    Ok(verdict(
        "breuer_inequality_test",
        named(&[("lhs - rhs", lhs - rhs), ("lhs", lhs), ("rhs", rhs)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance {
            class: Some(library::class_breuer2().to_string()),
            r: Some(vec![2, 5]),
            map: Some("breuer".into()),
            side: Some(Side::A),
        },
        Some(mat),
    ))
}

/// Determinant test for `f = (1, b, ab)` on the state partially transposed
/// on mode `b`.
pub fn sv_cat_state_test<T: Real>(state: &dyn Expectation<T>, tol: T) -> Result<Verdict<T>> {
    generic_det_test("sv_cat_state_test", state, &library::class_cat(), &[1], tol)
}

/// Determinant of a generic-class matrix of moments of the partially
/// transposed state.
pub fn generic_det_test<T: Real>(
    criterion: &str,
    state: &dyn Expectation<T>,
    class: &GenericClass,
    transposed_modes: &[usize],
    tol: T,
) -> Result<Verdict<T>> {
    let g = build_generic_moment_matrix(state, class, transposed_modes)?;
    let det = g.determinant();
    Ok(verdict(
        criterion,
        named(&[("det", det)]),
        T::zero(),
        tol,
        Direction::Below,
        Provenance { class: Some(class.to_string()), ..Default::default() },
        Some(g.entries().clone()),
    ))
}

/// Bipartition with mode `j` as subsystem A and all other modes as B.
/// Monomials use absolute mode names.
pub fn multimode_bipartition(
    modes: usize,
    j: usize,
    side_a: Vec<MonomialSpec>,
    side_b: Vec<MonomialSpec>,
) -> Result<OperatorClass> {
    if modes < 2 || j >= modes {
        return Err(Error::InvalidClass(format!("mode {j} of a {modes}-mode system")));
    }
    let rest = (0..modes).filter(|&m| m != j).collect();
    OperatorClass::new(side_a, side_b, vec![j], rest)
}

/// Every criterion this module offers, applied with default classes, to
/// one two-mode state. Used by soundness batteries and the CLI.
pub fn standard_battery<T: Real>(state: &dyn Expectation<T>, tol: T) -> Result<Vec<Verdict<T>>> {
    let basic = library::class_basic();
    let mut out = Vec::new();
    let pt = reorder::partial_transpose(&build_moment_matrix(state, &basic)?, Side::A);
    out.push(sylvester_scan(pt.entries(), DEFAULT_MAX_MINOR, None, tol)?);
    out.push(min_eig_test(pt.entries(), tol));
    out.push(pt_norm_test(state, &basic, tol)?);
    out.push(realign_norm_test(state, &basic, tol)?);
    let stormer = crate::posmaps::stormer::<T>();
    out.push(map_test(state, &library::class_stormer(), &stormer, Side::A, None, tol)?);
    out.push(map_test(state, &library::class_stormer(), &stormer, Side::B, None, tol)?);
    let breuer = BreuerParams::<T>::anti_diagonal();
    for class in [library::class_breuer1(), library::class_breuer2(), library::class_breuer3()] {
        out.push(map_test(state, &class, &breuer, Side::A, None, tol)?);
    }
    out.push(breuer_bell_test(state, BreuerClass::F1, tol)?);
    out.push(breuer_bell_test(state, BreuerClass::F2, tol)?);
    out.push(hz_two_mode(state, (0, 1), tol)?);
    out.push(breuer_inequality_test(state, tol)?);
    out.push(sv_cat_state_test(state, tol)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ModeCutoffs, StateVector};
    use crate::library::*;
    use crate::moments::build_moment_matrix_of_pt_state;
    use crate::posmaps::stormer;
    const TOL: f64 = 1e-9;

    fn fock(occ: &[usize], cut: usize) -> StateVector<f64> {
        StateVector::fock(occ, &ModeCutoffs::uniform(occ.len(), cut).unwrap()).unwrap()
    }

    fn pt_basic(s: &dyn Expectation<f64>) -> CMatrix<f64> {
        build_moment_matrix_of_pt_state(s, &class_basic()).unwrap().into_entries()
    }

    #[test]
    fn sylvester_singlet_and_example2() {
        let s = singlet::<f64>();
        let v = sylvester_scan(&pt_basic(&s), 2, Some(&[vec![1, 4]]), TOL).unwrap();
        assert!(v.is_entangled());
        assert!((v.value() + 0.25).abs() < 1e-12);
        let e2 = partial_example2::<f64>();
        let v = sylvester_scan(&pt_basic(&e2), 2, Some(&[vec![1, 4]]), TOL).unwrap();
        assert!((v.value() + 1.0 / 9.0).abs() < 1e-12);
        let full = sylvester_scan(&pt_basic(&e2), 4, None, TOL).unwrap();
        assert!(full.is_entangled());
        let sub = linalg::principal_submatrix(&pt_basic(&e2), &[1, 4]).unwrap();
        let e = min_eig_test(&sub, TOL);
        assert!((e.value() - (3.0 - 13f64.sqrt()) / 6.0).abs() < 1e-9);
    }

    #[test]
    fn psd_input_is_inconclusive() {
        let id = CMatrix::<f64>::identity(4, 4);
        let v = sylvester_scan(&id, 4, None, TOL).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(sylvester_scan(&id, 4, Some(&[vec![5]]), TOL).is_err());
        let vac = fock(&[0, 0], 2);
        let m = build_moment_matrix(&vac, &class_basic()).unwrap();
        assert_eq!(min_eig_test(m.entries(), TOL).outcome, Outcome::Inconclusive);
    }

    #[test]
    fn singlet_min_eig() {
        let v = min_eig_test(&pt_basic(&singlet::<f64>()), TOL);
        assert!((v.value() - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn norm_tests() {
        let nu = (1.0 + 2f64.sqrt()) / 2.0;
        let s = singlet::<f64>();
        for v in [pt_norm_test(&s, &class_basic(), TOL).unwrap(), realign_norm_test(&s, &class_basic(), TOL).unwrap()] {
            assert!(v.is_entangled());
            assert!((v.value() - nu).abs() < 1e-9);
        }
        let e2 = partial_example2::<f64>();
        assert!((pt_norm_test(&e2, &class_basic(), TOL).unwrap().value() - 1.1891).abs() < 5e-5);
        let p = product_coherent::<f64>(0.4, -0.3).unwrap();
        let tol = f64::truncation_tol();
        assert!(!pt_norm_test(&p, &class_basic(), tol).unwrap().is_entangled());
        assert!(!realign_norm_test(&p, &class_basic(), tol).unwrap().is_entangled());
    }

    #[test]
    fn stormer_map_examples() {
        let s = singlet::<f64>();
        let v = map_test(&s, &class_stormer(), &stormer(), Side::A, Some(&[2, 3, 7]), TOL).unwrap();
        let want = linalg::from_real_rows::<f64>(3, 3, &[3., -1., 1., -1., 2., 1., 1., 1., 1.]).map(|z| z / 2.0);
        assert!(linalg::max_abs_diff(v.matrix.as_ref().unwrap(), &want) < 1e-12);
        assert!((v.get("det").unwrap() + 0.25).abs() < 1e-12);
        assert!(v.is_entangled() && v.value() < 0.0);
        let e2 = partial_example2::<f64>();
        let v = map_test(&e2, &class_stormer(), &stormer(), Side::A, Some(&[2, 3, 7]), TOL).unwrap();
        let want = linalg::from_real_rows::<f64>(3, 3, &[4., -1., -1., -1., 2., -1., -1., -1., 1.]).map(|z| z / 3.0);
        assert!(linalg::max_abs_diff(v.matrix.as_ref().unwrap(), &want) < 1e-12);
        assert!((v.get("det").unwrap() + 1.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn breuer_map_examples() {
        let s = singlet::<f64>();
        let u = BreuerParams::<f64>::anti_diagonal();
        let check = |class: OperatorClass, r: &[usize], want: &[f64]| {
            let v = map_test(&s, &class, &u, Side::A, Some(r), TOL).unwrap();
            let n = r.len();
            let w = linalg::from_real_rows::<f64>(n, n, want);
            assert!(linalg::max_abs_diff(v.matrix.as_ref().unwrap(), &w) < 1e-12, "{class} {r:?}");
            v
        };
        let v1 = check(class_breuer1(), &[2, 5], &[1., 0.5, 0.5, 0.]);
        let v2 = check(class_breuer2(), &[2, 5], &[2., 0.5, 0.5, 0.]);
        let v3 = check(class_breuer3(), &[2, 5], &[2., 0.5, 0.5, 0.5]);
        for v in [&v1, &v2] {
            assert!(v.is_entangled());
            assert!((v.get("det").unwrap() + 0.25).abs() < 1e-12);
        }
        assert_eq!(v3.outcome, Outcome::Inconclusive);
        let v3b = map_test(&s, &class_breuer3(), &u, Side::A, Some(&[2, 5, 7, 8]), TOL).unwrap();
        assert!(v3b.is_entangled());
        assert!((v3b.get("det").unwrap() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn breuer_bell_literal_entries_match_mapped_matrix() {
        let u = BreuerParams::<f64>::anti_diagonal();
        for s in [bell_phi_plus::<f64>(), singlet(), partial_example2()] {
            for which in [BreuerClass::F1, BreuerClass::F2] {
                let lit = breuer_bell_matrix(&s, which).unwrap();
                let v = map_test(&s, &which.class(), &u, Side::A, Some(&[1, 6, 9]), TOL).unwrap();
                assert!(linalg::max_abs_diff(&lit, v.matrix.as_ref().unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn breuer_bell() {
        let b = bell_phi_plus::<f64>();
        for which in [BreuerClass::F1, BreuerClass::F2] {
            let v = breuer_bell_test(&b, which, TOL).unwrap();
            assert!(v.is_entangled());
            assert!((v.value() + 0.25).abs() < 1e-12);
        }
        let vac = fock(&[0, 0], 1);
        assert!(!breuer_bell_test(&vac, BreuerClass::F1, TOL).unwrap().is_entangled());
    }

    #[test]
    fn hz_examples() {
        let v = hz_two_mode(&singlet::<f64>(), (0, 1), TOL).unwrap();
        assert!(v.is_entangled());
        assert!((v.get("lhs").unwrap()).abs() < 1e-15 && (v.get("rhs").unwrap() - 0.25).abs() < 1e-12);
        let v = hz_two_mode(&partial_example2::<f64>(), (0, 1), TOL).unwrap();
        assert!(v.is_entangled() && (v.value() + 1.0 / 9.0).abs() < 1e-12);
        let v = hz_two_mode(&fock(&[1, 1], 2), (0, 1), TOL).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!((v.get("lhs").unwrap() - 1.0).abs() < 1e-15);
        assert!(hz_two_mode(&singlet::<f64>(), (0, 0), TOL).is_err());
    }

    #[test]
    fn hz_three_mode_examples() {
        let v = hz_three_mode(&pair_single3::<f64>(), 1, TOL).unwrap();
        assert!(v.is_entangled());
        assert!(v.get("lhs").unwrap().abs() < 1e-15 && (v.get("rhs").unwrap() - 0.25).abs() < 1e-12);
        let g = hz_three_mode(&ghz3::<f64>(), 2, TOL).unwrap();
        assert_eq!(g.outcome, Outcome::Inconclusive);
        assert!(g.boundary);
        assert!((g.get("lhs").unwrap() - 0.25).abs() < 1e-12 && (g.get("rhs").unwrap() - 0.25).abs() < 1e-12);
        let vac = fock(&[0, 0, 0], 2);
        for variant in [1, 2] {
            assert!(!hz_three_mode(&vac, variant, TOL).unwrap().is_entangled());
        }
        assert!(hz_three_mode(&vac, 3, TOL).is_err());
        assert!(hz_three_mode(&singlet::<f64>(), 1, TOL).is_err());
    }

    #[test]
    fn breuer_inequality_examples() {
        let v = breuer_inequality_test(&singlet::<f64>(), TOL).unwrap();
        assert!(v.is_entangled());
        let want = linalg::from_real_rows::<f64>(2, 2, &[2., 0.5, 0.5, 0.]);
        assert!(linalg::max_abs_diff(v.matrix.as_ref().unwrap(), &want) < 1e-12);
        assert!((v.value() + 0.25).abs() < 1e-12);
        let p = product_coherent::<f64>(0.5, 0.7).unwrap();
        assert!(!breuer_inequality_test(&p, 1e-6).unwrap().is_entangled());
    }

    #[test]
    fn cat_states() {
        for s in [cat_prime::<f64>(0.3, 0.2).unwrap(), cat_double_prime(0.3, 0.2).unwrap()] {
            let v = sv_cat_state_test(&s, 1e-6).unwrap();
            assert!(v.is_entangled(), "{v}");
        }
        let p = product_coherent::<f64>(0.3, 0.2).unwrap();
        assert!(!sv_cat_state_test(&p, 1e-6).unwrap().is_entangled());
    }

    #[test]
    fn pair_class_on_singlet() {
        let v = generic_det_test("pair", &singlet::<f64>(), &class_pair(), &[1], TOL).unwrap();
        let want = linalg::from_real_rows::<f64>(2, 2, &[1., -0.5, -0.5, 0.]);
        assert!(linalg::max_abs_diff(v.matrix.as_ref().unwrap(), &want) < 1e-12);
        assert!((v.value() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn multimode_classes() {
        let parse = |xs: &[&str]| xs.iter().map(|s| s.parse().unwrap()).collect::<Vec<MonomialSpec>>();
        let cls = multimode_bipartition(3, 0, parse(&["1", "a"]), parse(&["1", "b c"])).unwrap();
        assert_eq!(cls.modes_b(), &[1, 2]);
        assert!(multimode_bipartition(3, 0, parse(&["b"]), parse(&["1"])).is_err());
        assert!(multimode_bipartition(1, 0, parse(&["1"]), parse(&["1"])).is_err());
        let two = multimode_bipartition(2, 0, parse(&["1", "a"]), parse(&["1", "b"])).unwrap();
        assert_eq!(two, class_basic());

        // (a, bc) with mode a transposed reproduces the three-mode variant 2
        let g = ghz3::<f64>();
        let f = GenericClass::parse(&["a", "b c"]).unwrap();
        let v = generic_det_test("n32", &g, &f, &[0], TOL).unwrap();
        let hz = hz_three_mode(&g, 2, TOL).unwrap();
        assert!((v.value() - hz.value()).abs() < 1e-12);

        // (1, abc) gives [[1, <a^dag b c>], [<a b^dag c^dag>, <N_a N_b N_c>]]
        let s = pair_single3::<f64>();
        let f = GenericClass::parse(&["1", "a b c"]).unwrap();
        let v = generic_det_test("n31", &s, &f, &[0], TOL).unwrap();
        let mat = v.matrix.unwrap();
        let abc = moment(&s, &"a+ b c".parse().unwrap()).unwrap();
        assert!((mat[(0, 1)] - abc).norm() < 1e-12);
        assert!((mat[(1, 0)] - abc.conj()).norm() < 1e-12);
        assert!((mat[(1, 1)] - moment(&s, &"Na Nb Nc".parse().unwrap()).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn battery_on_singlet_and_vacuum() {
        let s = singlet::<f64>();
        let all = standard_battery(&s, TOL).unwrap();
        assert!(all.iter().filter(|v| v.is_entangled()).count() >= 8);
        let vac = fock(&[0, 0], 1);
        assert!(standard_battery(&vac, TOL).unwrap().iter().all(|v| !v.is_entangled()));
    }

    #[test]
    fn display() {
        let v = hz_two_mode(&singlet::<f64>(), (0, 1), TOL).unwrap();
        assert!(v.to_string().starts_with("hz_two_mode: ENTANGLED lhs - rhs=-0.250000"));
    }
}
