//! Published reference values, bundled as one self-checking suite.

use std::fmt;

use crate::criteria::{
    breuer_bell_test, breuer_inequality_test, generic_det_test, hz_three_mode, hz_two_mode, map_test,
    sv_cat_state_test, BreuerClass,
};
use crate::error::Result;
use crate::library::*;
use crate::linalg::{self, from_real_rows, CMatrix};
use crate::moments::{build_moment_matrix, build_moment_matrix_of_pt_state, Expectation, OperatorClass, Side};
use crate::posmaps::{stormer, BreuerParams, PositiveMap};
use crate::reorder::{nu_gamma, nu_r};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expect {
    /// `|actual - value| <= tol`.
    Value { value: f64, tol: f64 },
    /// `actual < 0`.
    Negative,
    /// `actual >= -tol`.
    NonNegative { tol: f64 },
}

impl Expect {
    fn holds(&self, actual: f64) -> bool {
        match *self {
            Expect::Value { value, tol } => (actual - value).abs() <= tol,
            Expect::Negative => actual < 0.0,
            Expect::NonNegative { tol } => actual >= -tol,
        }
    }
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expect::Value { value, tol } => write!(f, "{value:.6} ± {tol:e}"),
            Expect::Negative => f.write_str("< 0"),
            Expect::NonNegative { tol } => write!(f, ">= -{tol:e}"),
        }
    }
}

pub struct Fixture {
    pub name: &'static str,
    pub expect: Expect,
    compute: fn() -> Result<f64>,
}

impl Fixture {
    pub fn compute(&self) -> Result<f64> {
        (self.compute)()
    }
}

impl fmt::Debug for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fixture").field("name", &self.name).field("expect", &self.expect).finish()
    }
}

#[derive(Debug, Clone)]
pub struct FixtureResult {
    pub name: &'static str,
    pub expect: Expect,
    pub actual: std::result::Result<f64, String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RegressionReport {
    pub results: Vec<FixtureResult>,
}

impl RegressionReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

fn value(value: f64, tol: f64) -> Expect {
    Expect::Value { value, tol }
}

fn f(name: &'static str, expect: Expect, compute: fn() -> Result<f64>) -> Fixture {
    Fixture { name, expect, compute }
}

fn pt_det(s: &dyn Expectation<f64>, r: Option<&[usize]>) -> Result<f64> {
    let pt = build_moment_matrix_of_pt_state(s, &class_basic())?.into_entries();
    let m = match r {
        Some(r) => linalg::principal_submatrix(&pt, r)?,
        None => pt,
    };
    Ok(linalg::determinant(&m).re)
}

fn pt_min_eig(s: &dyn Expectation<f64>, r: Option<&[usize]>) -> Result<f64> {
    let pt = build_moment_matrix_of_pt_state(s, &class_basic())?.into_entries();
    let m = match r {
        Some(r) => linalg::principal_submatrix(&pt, r)?,
        None => pt,
    };
    Ok(linalg::min_hermitian_eigenvalue(&m))
}

fn mapped(
    s: &dyn Expectation<f64>,
    class: &OperatorClass,
    map: &dyn PositiveMap<f64>,
    r: &[usize],
) -> Result<CMatrix<f64>> {
    Ok(map_test(s, class, map, Side::A, Some(r), TOL)?.matrix.expect("map_test keeps its matrix"))
}

fn det(m: &CMatrix<f64>) -> f64 {
    linalg::determinant(m).re
}

fn entry_error(m: &CMatrix<f64>, rows: usize, want: &[f64], scale: f64) -> f64 {
    linalg::max_abs_diff(m, &from_real_rows::<f64>(rows, rows, want).map(|z| z * scale))
}

fn stormer_singlet() -> Result<CMatrix<f64>> {
    mapped(&singlet::<f64>(), &class_stormer(), &stormer(), &[2, 3, 7])
}

fn stormer_example2() -> Result<CMatrix<f64>> {
    mapped(&partial_example2::<f64>(), &class_stormer(), &stormer(), &[2, 3, 7])
}

fn breuer_singlet(class: OperatorClass, r: &[usize]) -> Result<CMatrix<f64>> {
    mapped(&singlet::<f64>(), &class, &BreuerParams::anti_diagonal(), r)
}

fn cat(prime: bool) -> Result<crate::fock::StateVector<f64>> {
    if prime {
        cat_prime(0.3, 0.2)
    } else {
        cat_double_prime(0.3, 0.2)
    }
}

/// Every reference value, with its tolerance.
pub fn fixtures() -> Vec<Fixture> {
    let nu1 = (1.0 + 2f64.sqrt()) / 2.0;
    vec![
        f("singlet: nu^Gamma", value(nu1, 1e-9), || nu_gamma(&singlet::<f64>(), &class_basic())),
        f("singlet: nu^R", value(nu1, 1e-9), || nu_r(&singlet::<f64>(), &class_basic())),
        f("singlet: det M(rho^Gamma)", value(-1.0 / 16.0, 1e-12), || pt_det(&singlet::<f64>(), None)),
        f("singlet: min eig M(rho^Gamma)", value((1.0 - 2f64.sqrt()) / 2.0, 1e-9), || {
            pt_min_eig(&singlet::<f64>(), None)
        }),
        f("singlet: det, r = (1,4)", value(-0.25, 1e-12), || pt_det(&singlet::<f64>(), Some(&[1, 4]))),
        f("singlet: f = (1, ab) matrix", value(0.0, 1e-12), || {
            let v = generic_det_test("pair", &singlet::<f64>(), &class_pair(), &[1], TOL)?;
            Ok(entry_error(v.matrix.as_ref().unwrap(), 2, &[1.0, -0.5, -0.5, 0.0], 1.0))
        }),
        f("singlet: f = (1, ab) det", value(-0.25, 1e-12), || {
            Ok(generic_det_test("pair", &singlet::<f64>(), &class_pair(), &[1], TOL)?.value())
        }),
        f("example 2: matrix of moments", value(0.0, 1e-12), || {
            let m = build_moment_matrix(&partial_example2::<f64>(), &class_basic())?;
            let want = [3., 1., 1., 0., 1., 1., 1., 0., 1., 1., 1., 0., 0., 0., 0., 0.];
            Ok(entry_error(m.entries(), 4, &want, 1.0 / 3.0))
        }),
        f("example 2: nu^Gamma", value(1.1891, 5e-5), || nu_gamma(&partial_example2::<f64>(), &class_basic())),
        f("example 2: nu^R", value(1.1891, 5e-5), || nu_r(&partial_example2::<f64>(), &class_basic())),
        f("example 2: det M(rho^Gamma)", value(-1.0 / 81.0, 1e-12), || pt_det(&partial_example2::<f64>(), None)),
        f("example 2: det, r = (1,4)", value(-1.0 / 9.0, 1e-12), || {
            pt_det(&partial_example2::<f64>(), Some(&[1, 4]))
        }),
        f("example 2: min eig, r = (1,4)", value((3.0 - 13f64.sqrt()) / 6.0, 1e-9), || {
            pt_min_eig(&partial_example2::<f64>(), Some(&[1, 4]))
        }),
        f("cat': nu^R", value(1.1666, 1e-4), || nu_r(&cat(true)?, &class_basic())),
        f("cat': nu^Gamma", value(1.1783, 1e-4), || nu_gamma(&cat(true)?, &class_basic())),
        f("cat'': nu^R", value(1.1666, 1e-4), || nu_r(&cat(false)?, &class_basic())),
        f("cat'': nu^Gamma", value(1.1783, 1e-4), || nu_gamma(&cat(false)?, &class_basic())),
        f("cat': det for f = (1, b, ab)", Expect::Negative, || {
            Ok(sv_cat_state_test(&cat(true)?, 1e-6)?.value())
        }),
        f("cat'': det for f = (1, b, ab)", Expect::Negative, || {
            Ok(sv_cat_state_test(&cat(false)?, 1e-6)?.value())
        }),
        f("stormer singlet: matrix", value(0.0, 1e-12), || {
            Ok(entry_error(&stormer_singlet()?, 3, &[3., -1., 1., -1., 2., 1., 1., 1., 1.], 0.5))
        }),
        f("stormer singlet: det", value(-0.25, 1e-12), || Ok(det(&stormer_singlet()?))),
        f("stormer example 2: matrix", value(0.0, 1e-12), || {
            Ok(entry_error(&stormer_example2()?, 3, &[4., -1., -1., -1., 2., -1., -1., -1., 1.], 1.0 / 3.0))
        }),
        f("stormer example 2: det", value(-1.0 / 27.0, 1e-12), || Ok(det(&stormer_example2()?))),
        f("breuer f1 singlet: matrix", value(0.0, 1e-12), || {
            Ok(entry_error(&breuer_singlet(class_breuer1(), &[2, 5])?, 2, &[1., 0.5, 0.5, 0.], 1.0))
        }),
        f("breuer f1 singlet: det", value(-0.25, 1e-12), || Ok(det(&breuer_singlet(class_breuer1(), &[2, 5])?))),
        f("breuer f2 singlet: matrix", value(0.0, 1e-12), || {
            Ok(entry_error(&breuer_singlet(class_breuer2(), &[2, 5])?, 2, &[2., 0.5, 0.5, 0.], 1.0))
        }),
        f("breuer f2 singlet: det", value(-0.25, 1e-12), || Ok(det(&breuer_singlet(class_breuer2(), &[2, 5])?))),
        f("breuer f3 singlet: min eig, r = (2,5)", Expect::NonNegative { tol: 1e-12 }, || {
            Ok(linalg::min_hermitian_eigenvalue(&breuer_singlet(class_breuer3(), &[2, 5])?))
        }),
        f("breuer f3 singlet: det, r = (2,5,7,8)", value(-0.25, 1e-12), || {
            Ok(det(&breuer_singlet(class_breuer3(), &[2, 5, 7, 8])?))
        }),
        f("breuer bell f1: det, r = (1,6,9)", value(-0.25, 1e-12), || {
            Ok(breuer_bell_test(&bell_phi_plus::<f64>(), BreuerClass::F1, TOL)?.value())
        }),
        f("breuer bell f2: det, r = (1,6,9)", value(-0.25, 1e-12), || {
            Ok(breuer_bell_test(&bell_phi_plus::<f64>(), BreuerClass::F2, TOL)?.value())
        }),
        f("breuer inequality singlet: det", value(-0.25, 1e-12), || {
            Ok(breuer_inequality_test(&singlet::<f64>(), TOL)?.value())
        }),
        f("hz singlet: <N_a N_b> - |<a b^dag>|^2", value(-0.25, 1e-12), || {
            Ok(hz_two_mode(&singlet::<f64>(), (0, 1), TOL)?.value())
        }),
        f("hz example 2: <N_a N_b> - |<a b^dag>|^2", value(-1.0 / 9.0, 1e-12), || {
            Ok(hz_two_mode(&partial_example2::<f64>(), (0, 1), TOL)?.value())
        }),
        f("three-mode (|011>+|100>): variant 1", value(-0.25, 1e-12), || {
            Ok(hz_three_mode(&pair_single3::<f64>(), 1, TOL)?.value())
        }),
    ]
}

fn run(fixtures: Vec<Fixture>, perturb: Option<(&str, f64)>) -> RegressionReport {
    let results = fixtures
        .into_iter()
        .map(|fx| {
            let mut expect = fx.expect;
            if let (Some((name, delta)), Expect::Value { value, tol }) = (perturb, expect) {
                if name == fx.name {
                    expect = Expect::Value { value: value + delta, tol };
                }
            }
            let actual = fx.compute().map_err(|e| e.to_string());
            let pass = actual.as_ref().is_ok_and(|&a| expect.holds(a));
            FixtureResult { name: fx.name, expect, actual, pass }
        })
        .collect();
    RegressionReport { results }
}

/// Runs every fixture.
pub fn run_fixtures() -> RegressionReport {
    run(fixtures(), None)
}

/// Runs every fixture with one expected value shifted by `delta`.
pub fn run_fixtures_perturbed(name: &str, delta: f64) -> RegressionReport {
    run(fixtures(), Some((name, delta)))
}
