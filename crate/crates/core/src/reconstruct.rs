//! Density matrices from moments of ladder operators.
//!
//! A matrix element is the alternating series
//! `<m1|ρ|m2> = (m1! m2!)^{-1/2} sum_j (-1)^j / j! <a^dag^{m2+j} a^{m1+j}>`
//! taken independently per mode. With an assumed finite dimension the
//! series stops once `a^{m+j}` annihilates everything.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use crate::criteria::{Outcome, Provenance, Verdict};
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, DensityTolerances, ModeCutoffs, MonomialSpec};
use crate::linalg::{self, CMatrix};
use crate::moments::{moment, Expectation, Side};
use crate::reorder::{partial_transpose_raw, realign_raw, BlockLayout};
use crate::scalar::{lit, modulus, tol, Real, C};

/// Explicit moments `<spec>`. A spec and its adjoint must hold complex
/// conjugate values; only one of the two needs to be stored.
#[derive(Debug, Clone, Default)]
pub struct MomentTable<T: Real> {
    entries: HashMap<MonomialSpec, C<T>>,
}

/// Largest allowed `|<X> - conj(<X^dag>)|` inside a table.
pub const TABLE_CONSISTENCY_TOL: f64 = 1e-10;

impl<T: Real> MomentTable<T> {
    pub fn new() -> Self {
        Self { entries: HashMap::new() }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (MonomialSpec, C<T>)>) -> Result<Self> {
        let mut t = Self::new();
        for (spec, v) in entries {
            t.insert(spec, v)?;
        }
        Ok(t)
    }

    pub fn insert(&mut self, spec: MonomialSpec, value: C<T>) -> Result<()> {
        let adj = spec.adjoint();
        let clash = |other: C<T>, want: C<T>| modulus(other - want) > tol(TABLE_CONSISTENCY_TOL);
        if let Some(&v) = self.entries.get(&adj) {
            if clash(v, value.conj()) {
                return Err(Error::InconsistentMoments(format!(
                    "<{spec}> and <{adj}> are not complex conjugates"
                )));
            }
        }
        if let Some(&v) = self.entries.get(&spec) {
            if clash(v, value) {
                return Err(Error::InconsistentMoments(format!("<{spec}> given twice with different values")));
            }
        }
        self.entries.insert(spec, value);
        Ok(())
    }

    /// `<spec>`, using the adjoint entry if only that is stored. The
    /// identity defaults to 1.
    pub fn get(&self, spec: &MonomialSpec) -> Option<C<T>> {
        if let Some(&v) = self.entries.get(spec) {
            return Some(v);
        }
        if let Some(&v) = self.entries.get(&spec.adjoint()) {
            return Some(v.conj());
        }
        spec.is_identity().then(|| C::new(T::one(), T::zero()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MonomialSpec, &C<T>)> {
        self.entries.iter()
    }

    /// Every moment `<prod a_i^dag^{n_i} a_i^{m_i}>` with `n_i, m_i < max_power[i]`,
    /// evaluated on a state.
    pub fn tabulate(state: &dyn Expectation<T>, max_power: &[usize]) -> Result<Self> {
        let mut t = Self::new();
        for spec in all_specs(max_power) {
            let v = moment(state, &spec)?;
            t.entries.insert(spec, v);
        }
        Ok(t)
    }
}

fn all_specs(max_power: &[usize]) -> impl Iterator<Item = MonomialSpec> + '_ {
    max_power
        .iter()
        .map(|&p| (0..p as u32).cartesian_product(0..p as u32))
        .multi_cartesian_product()
        .map(MonomialSpec::new)
}

/// Moments from a state (computed on demand) or from a table.
#[derive(Clone, Copy)]
pub enum MomentSource<'a, T: Real> {
    State(&'a dyn Expectation<T>),
    Table(&'a MomentTable<T>),
}

impl<'a, T: Real> MomentSource<'a, T> {
    pub fn get(&self, spec: &MonomialSpec) -> Result<Option<C<T>>> {
        match self {
            MomentSource::State(s) => moment(*s, spec).map(Some),
            MomentSource::Table(t) => Ok(t.get(spec)),
        }
    }
}

impl<'a, T: Real> From<&'a MomentTable<T>> for MomentSource<'a, T> {
    fn from(t: &'a MomentTable<T>) -> Self {
        MomentSource::Table(t)
    }
}

/// Consecutive non-decaying series orders that count as divergence.
pub const DIVERGENCE_WINDOW: usize = 5;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `<m1|ρ|m2>` for multi-mode occupations under assumed per-mode dimensions.
///
/// Fails with [`Error::MissingMoments`] listing every moment the series
/// needs but the source lacks, and with [`Error::Divergence`] when the
/// magnitudes of the last [`DIVERGENCE_WINDOW`] series orders before the
/// cutoff never decrease.
pub fn density_element<T: Real>(
    source: MomentSource<'_, T>,
    m1: &[usize],
    m2: &[usize],
    assumed_dims: &[usize],
) -> Result<C<T>> {
    let modes = assumed_dims.len();
    if m1.len() != modes || m2.len() != modes {
        return Err(Error::Dimension(format!("occupations must list {modes} modes")));
    }
    if let Some(i) = (0..modes).find(|&i| m1[i] >= assumed_dims[i] || m2[i] >= assumed_dims[i]) {
        return Err(Error::Index { index: m1[i].max(m2[i]), bound: assumed_dims[i] - 1 });
    }
    let ranges: Vec<_> = (0..modes).map(|i| 0..assumed_dims[i] - m1[i].max(m2[i])).collect();
    let norm: f64 = (0..modes).map(|i| factorial(m1[i]) * factorial(m2[i])).product::<f64>().sqrt();

    let mut missing = BTreeSet::new();
    // (order, term)
    let mut terms: Vec<(usize, C<T>)> = Vec::new();
    for js in ranges.into_iter().multi_cartesian_product() {
        let spec = MonomialSpec::new(
            (0..modes).map(|i| ((m2[i] + js[i]) as u32, (m1[i] + js[i]) as u32)).collect(),
        );
        let order: usize = js.iter().sum();
        match source.get(&spec)? {
            Some(v) => {
                let denom: f64 = js.iter().map(|&j| factorial(j)).product::<f64>() * norm;
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((order, v * lit::<T>(sign / denom)));
            }
            None => {
                missing.insert(spec.to_string());
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMoments(missing.into_iter().collect()));
    }

    let max_order = terms.iter().map(|(o, _)| *o).max().unwrap_or(0);
    let mut per_order = vec![T::zero(); max_order + 1];
    for (o, t) in &terms {
        per_order[*o] += modulus(*t);
    }
    if let Some(order) = non_decaying_tail(&per_order) {
        let element = format!("<{m1:?}|ρ|{m2:?}>");
        return Err(Error::Divergence { element, order });
    }
    Ok(terms.into_iter().fold(C::new(T::zero(), T::zero()), |acc, (_, t)| acc + t))
}

/// Start of the tail if the last `DIVERGENCE_WINDOW` ratios between
/// consecutive order magnitudes are all at least 1.
///
/// Only the tail is inspected: for a state that really lives in the
/// assumed dimension, the final ratio is bounded by the inverse series
/// order, while early orders may legitimately grow (e.g. Fock states).
fn non_decaying_tail<T: Real>(per_order: &[T]) -> Option<usize> {
    if per_order.len() < DIVERGENCE_WINDOW + 1 {
        return None;
    }
    let start = per_order.len() - DIVERGENCE_WINDOW - 1;
    let tail = &per_order[start..];
    let grows = tail.windows(2).all(|w| w[0] > T::zero() && w[1] >= w[0] * (T::one() - tol(1e-12)));
    grows.then_some(start)
}

/// Full density matrix on the assumed dimensions, validated with
/// `tolerance` on Hermiticity, trace and positivity.
pub fn density_from_moments<T: Real>(
    source: MomentSource<'_, T>,
    assumed_dims: &[usize],
    tolerance: f64,
) -> Result<DensityMatrix<T>> {
    let cutoffs = ModeCutoffs::new(assumed_dims.to_vec())?;
    let n = cutoffs.total();
    let occ: Vec<Vec<usize>> = (0..n).map(|i| cutoffs.occupations_of(i)).collect();
    let mut rho = CMatrix::<T>::zeros(n, n);
    let mut missing = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            match density_element(source, &occ[i], &occ[j], assumed_dims) {
                Ok(v) => rho[(i, j)] = v,
                Err(Error::MissingMoments(m)) => missing.extend(m),
                Err(e) => return Err(e),
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMoments(missing.into_iter().collect()));
    }
    validated(cutoffs, rho, tolerance)
}

fn validated<T: Real>(cutoffs: ModeCutoffs, rho: CMatrix<T>, tolerance: f64) -> Result<DensityMatrix<T>> {
    let tols = DensityTolerances {
        hermiticity: tolerance,
        trace: tolerance,
        min_eigenvalue: tolerance,
    };
    DensityMatrix::with_tolerances(cutoffs, rho, tols).map_err(|e| Error::InconsistentMoments(e.to_string()))
}

/// Tolerance used to accept a two-qubit reconstruction as a state.
pub const TWO_QUBIT_TOL: f64 = 1e-8;

/// One factor `|m2><m1|` of a single qubit mode as moments:
/// `|0><0| = 1 - N`, `|1><0| = a^dag`, `|0><1| = a`, `|1><1| = N`.
fn qubit_factor(mode: usize, m1: usize, m2: usize) -> Vec<(f64, MonomialSpec)> {
    match (m1, m2) {
        (0, 0) => vec![(1.0, MonomialSpec::identity()), (-1.0, MonomialSpec::number(mode))],
        (0, 1) => vec![(1.0, MonomialSpec::creation(mode))],
        (1, 0) => vec![(1.0, MonomialSpec::annihilation(mode))],
        _ => vec![(1.0, MonomialSpec::number(mode))],
    }
}

/// The 4x4 two-qubit density matrix written directly in terms of sixteen
/// moment combinations such as `<(1 - N_a)(1 - N_b)>` and `<a^dag b>`.
pub fn two_qubit_density<T: Real>(source: MomentSource<'_, T>) -> Result<DensityMatrix<T>> {
    let basis = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut rho = CMatrix::<T>::zeros(4, 4);
    let mut missing = BTreeSet::new();
    for (i, &(ma1, mb1)) in basis.iter().enumerate() {
        for (j, &(ma2, mb2)) in basis.iter().enumerate() {
            let mut acc = C::new(T::zero(), T::zero());
            for ((wa, sa), (wb, sb)) in qubit_factor(0, ma1, ma2)
                .into_iter()
                .cartesian_product(qubit_factor(1, mb1, mb2))
            {
                let spec = sa.disjoint_product(&sb)?;
                match source.get(&spec)? {
                    Some(v) => acc += v * lit::<T>(wa * wb),
                    None => {
                        missing.insert(spec.to_string());
                    }
                }
            }
            rho[(i, j)] = acc;
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMoments(missing.into_iter().collect()));
    }
    validated(ModeCutoffs::new(vec![2, 2])?, rho, TWO_QUBIT_TOL)
}

/// Partial transposition and realignment of a density matrix in the Fock
/// layout (`i = k d_B + l`) with subsystem dimensions `dims`.
///
/// The PPT verdict is `SEPARABLE` when positivity holds on a 2x2 or 2x3
/// system, where PPT is also sufficient; otherwise never.
pub fn state_level_tests<T: Real>(rho: &CMatrix<T>, dims: (usize, usize), tol: T) -> Result<Vec<Verdict<T>>> {
    let layout = BlockLayout::fock(dims.0, dims.1);
    let pt = partial_transpose_raw(rho, layout, Side::B)?;
    let re = realign_raw(rho, layout)?;
    let tr = linalg::trace(rho).re;
    if tr.abs() <= lit(1e-14) {
        return Err(Error::DegenerateMoments);
    }
    let nu_pt = linalg::trace_norm(&pt) / tr;
    let nu_r = linalg::trace_norm(&re) / tr;
    let min_eig = linalg::min_hermitian_eigenvalue(&pt);
    let prov = Provenance { class: Some(format!("{}x{}", dims.0, dims.1)), ..Default::default() };
    let decide = |violated: bool| if violated { Outcome::Entangled } else { Outcome::Inconclusive };
    let mk = |criterion: &str, name: &str, value: T, threshold: T, violated: bool, m: CMatrix<T>| Verdict {
        criterion: criterion.into(),
        witness: vec![(name.into(), value)],
        threshold,
        tol,
        outcome: decide(violated),
        boundary: !violated && (value - threshold).abs() <= tol,
        provenance: prov.clone(),
        matrix: Some(m),
    };
    let mut ppt = mk("state_ppt", "min_eig", min_eig, T::zero(), min_eig < -tol, pt.clone());
    let small = dims.0.min(dims.1) == 2 && dims.0.max(dims.1) <= 3;
    if small && ppt.outcome == Outcome::Inconclusive {
        ppt.outcome = Outcome::Separable;
    }
    Ok(vec![
        mk("state_pt_norm", "nu", nu_pt, T::one(), nu_pt > T::one() + tol, pt),
        mk("state_realign_norm", "nu", nu_r, T::one(), nu_r > T::one() + tol, re),
        ppt,
    ])
}

/// Single-mode thermal moments `<a^dag^n a^m> = δ_nm n! n̄^n` for `n, m < max_power`.
pub fn thermal_moment_table<T: Real>(mean: f64, max_power: usize) -> MomentTable<T> {
    let entries = (0..max_power).cartesian_product(0..max_power).map(|(n, m)| {
        let v = if n == m { factorial(n) * mean.powi(n as i32) } else { 0.0 };
        (MonomialSpec::single(0, n as u32, m as u32), C::new(lit(v), T::zero()))
    });
    MomentTable::from_entries(entries).expect("thermal table is consistent")
}

/// Thermal state on a truncated mode (for comparison with reconstructions).
pub fn thermal_populations(mean: f64, cutoff: usize) -> Vec<f64> {
    let q = mean / (1.0 + mean);
    (0..cutoff).map(|n| q.powi(n as i32) / (1.0 + mean)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateVector;
    use crate::library::{bell_phi_plus, partial_example2, singlet};
    use crate::scalar::c;

    fn fock1(n: usize, d: usize) -> StateVector<f64> {
        StateVector::fock(&[n], &ModeCutoffs::new(vec![d]).unwrap()).unwrap()
    }

    #[test]
    fn single_mode_fock_one() {
        let s = fock1(1, 2);
        let v = density_element(MomentSource::State(&s), &[1], &[1], &[2]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let z = density_element(MomentSource::State(&s), &[0], &[0], &[2]).unwrap();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn vacuum_element() {
        let vac = fock1(0, 3);
        let v = density_element(MomentSource::State(&vac), &[0], &[0], &[3]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singlet_full_reconstruction() {
        let s = singlet::<f64>();
        let rho = density_from_moments(MomentSource::State(&s), &[2, 2], 1e-10).unwrap();
        assert!(linalg::max_abs_diff(rho.matrix(), s.density().matrix()) < 1e-12);
        let two = two_qubit_density(MomentSource::State(&s)).unwrap();
        assert!((two.matrix()[(1, 1)] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((two.matrix()[(2, 2)] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((two.matrix()[(1, 2)] - c(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn vacuum_two_qubit() {
        let cu = ModeCutoffs::new(vec![2, 2]).unwrap();
        let vac = StateVector::<f64>::fock(&[0, 0], &cu).unwrap();
        let rho = two_qubit_density(MomentSource::State(&vac)).unwrap();
        let mut want = CMatrix::<f64>::zeros(4, 4);
        want[(0, 0)] = c(1.0, 0.0);
        assert!(linalg::max_abs_diff(rho.matrix(), &want) < 1e-15);
    }

    #[test]
    fn fock_states_do_not_trigger_divergence() {
        for n in [6, 10, 14] {
            let s = fock1(n, n + 1);
            let rho = density_from_moments(MomentSource::State(&s), &[n + 1], 1e-8).unwrap();
            assert!((rho.matrix()[(n, n)] - c(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn thermal_divergence() {
        for mean in [1.0, 1.5] {
            let t = thermal_moment_table::<f64>(mean, 12);
            let err = density_element(MomentSource::Table(&t), &[0], &[0], &[12]).unwrap_err();
            assert!(matches!(err, Error::Divergence { .. }), "{err}");
        }
        // a weak thermal state converges to the geometric distribution
        let t = thermal_moment_table::<f64>(0.2, 40);
        let p = thermal_populations(0.2, 3);
        for (n, pn) in p.iter().enumerate() {
            let v = density_element(MomentSource::Table(&t), &[n], &[n], &[40]).unwrap();
            assert!((v.re - pn).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_moments_are_listed() {
        let mut t = MomentTable::<f64>::new();
        t.insert("a+ a".parse().unwrap(), c(1.0, 0.0)).unwrap();
        let err = density_element(MomentSource::Table(&t), &[1], &[1], &[3]).unwrap_err();
        assert_eq!(err, Error::MissingMoments(vec!["a+^2 a^2".into()]));
        let err = two_qubit_density(MomentSource::Table(&t)).unwrap_err();
        assert!(matches!(err, Error::MissingMoments(ref v) if v.len() > 3));
    }

    #[test]
    fn table_consistency() {
        let mut t = MomentTable::<f64>::new();
        t.insert("a+ b".parse().unwrap(), c(0.5, 0.25)).unwrap();
        assert_eq!(t.get(&"a b+".parse().unwrap()), Some(c(0.5, -0.25)));
        assert!(t.insert("a b+".parse().unwrap(), c(0.5, -0.25)).is_ok());
        assert!(t.insert("a b+".parse().unwrap(), c(0.5, 0.25)).is_err());
        assert_eq!(t.get(&MonomialSpec::identity()), Some(c(1.0, 0.0)));
        assert!(t.get(&"a".parse().unwrap()).is_none());
    }

    #[test]
    fn inconsistent_two_qubit_moments() {
        let s = bell_phi_plus::<f64>();
        let mut t = MomentTable::tabulate(&s, &[2, 2]).unwrap();
        let mut bad = MomentTable::new();
        for (k, v) in t.iter() {
            let v = if k.to_string() == "a b" { *v * 3.0 } else { *v };
            bad.entries.insert(k.clone(), v);
        }
        assert!(matches!(two_qubit_density(MomentSource::Table(&bad)), Err(Error::InconsistentMoments(_))));
        t.entries.remove(&"a b".parse().unwrap());
        assert!(two_qubit_density(MomentSource::Table(&t)).is_ok());
    }

    #[test]
    fn state_level_examples() {
        let s = singlet::<f64>();
        let rho = two_qubit_density(MomentSource::State(&s)).unwrap();
        let v = state_level_tests(rho.matrix(), (2, 2), 1e-9).unwrap();
        assert!((v[0].value() - 2.0).abs() < 1e-12);
        assert!((v[2].value() + 0.5).abs() < 1e-12);
        assert!(v.iter().all(|x| x.is_entangled()));

        let mixed = CMatrix::<f64>::identity(4, 4) / c(4.0, 0.0);
        let v = state_level_tests(&mixed, (2, 2), 1e-9).unwrap();
        assert_eq!(v[2].outcome, Outcome::Separable);
        assert_eq!(v[0].outcome, Outcome::Inconclusive);

        let mixed9 = CMatrix::<f64>::identity(9, 9) / c(9.0, 0.0);
        let v = state_level_tests(&mixed9, (3, 3), 1e-9).unwrap();
        assert_eq!(v[2].outcome, Outcome::Inconclusive);
        assert!(state_level_tests(&mixed9, (2, 3), 1e-9).is_err());
    }

    #[test]
    fn general_and_two_qubit_paths_agree() {
        let s = partial_example2::<f64>();
        let a = density_from_moments(MomentSource::State(&s), &[2, 2], 1e-10).unwrap();
        let b = two_qubit_density(MomentSource::State(&s)).unwrap();
        assert!(linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
    }
}
