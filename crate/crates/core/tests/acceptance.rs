//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! gated criterion fails. Criterion 11 is monitored only.

mod common;

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use momsep::criteria::*;
use momsep::fock::{DensityMatrix, ModeCutoffs, StateVector};
use momsep::library::*;
use momsep::linalg::{self, from_real_rows, max_abs_diff, CMatrix};
use momsep::moments::{build_moment_matrix, build_moment_matrix_of_pt_state, Expectation, MomentMatrix, OperatorClass, Side, State, Transform};
use momsep::posmaps::*;
use momsep::random::*;
use momsep::reconstruct::*;
use momsep::reorder::{nu_gamma, nu_r, partial_transpose};
use momsep::scalar::c;
use momsep::error::Error;
use rand::Rng;

// pinned tolerances
const EXACT: f64 = 1e-12;
const CLOSE: f64 = 1e-9;
const FOUR_DIGITS: f64 = 5e-5;
const CAT_DIGITS: f64 = 1e-4;
const PSD_FLOOR: f64 = 1e-9;
const IDENTITY: f64 = 1e-10;
const RECON: f64 = 1e-10;
const CONJECTURE_SLACK: f64 = 1e-9;

#[derive(Default)]
struct Checks {
    total: usize,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, what: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(format!("{what}: {}", detail()));
        }
    }

    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check(what, (got - want).abs() <= tol, || format!("got {got:.15}, want {want:.15} ± {tol:e}"));
    }

    fn matrix(&mut self, what: &str, got: &CMatrix<f64>, want: &CMatrix<f64>, tol: f64) {
        let d = if got.shape() == want.shape() { max_abs_diff(got, want) } else { f64::INFINITY };
        self.check(what, d <= tol, || format!("max entry difference {d:e}"));
    }

    fn result<T>(&mut self, what: &str, r: momsep::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.total += 1;
                self.failures.push(format!("{what}: error {e}"));
                None
            }
        }
    }
}

fn rows(n: usize, entries: &[f64], scale: f64) -> CMatrix<f64> {
    from_real_rows::<f64>(n, n, entries).map(|z| z * scale)
}

fn det(m: &CMatrix<f64>) -> f64 {
    linalg::determinant(m).re
}

fn pt_basic(s: &dyn Expectation<f64>) -> CMatrix<f64> {
    build_moment_matrix_of_pt_state(s, &class_basic()).unwrap().into_entries()
}

fn mapped(s: &dyn Expectation<f64>, class: &OperatorClass, map: &dyn PositiveMap<f64>, r: &[usize]) -> CMatrix<f64> {
    map_test(s, class, map, Side::A, Some(r), CLOSE).unwrap().matrix.unwrap()
}

fn criterion_1(c: &mut Checks) {
    let s = singlet::<f64>();
    let nu = (1.0 + 2f64.sqrt()) / 2.0;
    c.near("nu^Gamma", nu_gamma(&s, &class_basic()).unwrap(), nu, CLOSE);
    c.near("nu^R", nu_r(&s, &class_basic()).unwrap(), nu, CLOSE);
    let pt = pt_basic(&s);
    c.near("det", det(&pt), -1.0 / 16.0, EXACT);
    c.near("min eig", linalg::min_hermitian_eigenvalue(&pt), (1.0 - 2f64.sqrt()) / 2.0, CLOSE);
}

fn criterion_2(c: &mut Checks) {
    let v = generic_det_test("pair", &singlet::<f64>(), &class_pair(), &[1], CLOSE).unwrap();
    c.matrix("matrix", v.matrix.as_ref().unwrap(), &rows(2, &[1.0, -0.5, -0.5, 0.0], 1.0), EXACT);
    c.near("det", v.value(), -0.25, EXACT);
    c.check("verdict", v.is_entangled(), || v.to_string());
}

fn criterion_3(c: &mut Checks) {
    let s = partial_example2::<f64>();
    let m = build_moment_matrix(&s, &class_basic()).unwrap();
    let want = rows(4, &[3., 1., 1., 0., 1., 1., 1., 0., 1., 1., 1., 0., 0., 0., 0., 0.], 1.0 / 3.0);
    c.matrix("moment matrix", m.entries(), &want, EXACT);
    c.near("nu^Gamma", nu_gamma(&s, &class_basic()).unwrap(), 1.1891, FOUR_DIGITS);
    c.near("nu^R", nu_r(&s, &class_basic()).unwrap(), 1.1891, FOUR_DIGITS);
    let pt = pt_basic(&s);
    c.near("det", det(&pt), -1.0 / 81.0, EXACT);
    let hz = linalg::principal_submatrix(&pt, &[1, 4]).unwrap();
    c.near("hz submatrix det", det(&hz), -1.0 / 9.0, EXACT);
    c.near("hz submatrix min eig", linalg::min_hermitian_eigenvalue(&hz), (3.0 - 13f64.sqrt()) / 6.0, CLOSE);
}

fn criterion_4(c: &mut Checks) {
    for (name, s) in [("cat'", cat_prime::<f64>(0.3, 0.2)), ("cat''", cat_double_prime::<f64>(0.3, 0.2))] {
        let Some(s) = c.result(name, s) else { continue };
        c.near(&format!("{name} nu^R"), nu_r(&s, &class_basic()).unwrap(), 1.1666, CAT_DIGITS);
        c.near(&format!("{name} nu^Gamma"), nu_gamma(&s, &class_basic()).unwrap(), 1.1783, CAT_DIGITS);
        let v = sv_cat_state_test(&s, 1e-6).unwrap();
        c.check(&format!("{name} det < 0"), v.value() < 0.0, || v.to_string());
    }
}

fn criterion_5(c: &mut Checks) {
    let st = stormer::<f64>();
    let m = mapped(&singlet::<f64>(), &class_stormer(), &st, &[2, 3, 7]);
    c.matrix("singlet matrix", &m, &rows(3, &[3., -1., 1., -1., 2., 1., 1., 1., 1.], 0.5), EXACT);
    c.near("singlet det", det(&m), -0.25, EXACT);
    let m = mapped(&partial_example2::<f64>(), &class_stormer(), &st, &[2, 3, 7]);
    c.matrix("example 2 matrix", &m, &rows(3, &[4., -1., -1., -1., 2., -1., -1., -1., 1.], 1.0 / 3.0), EXACT);
    c.near("example 2 det", det(&m), -1.0 / 27.0, EXACT);
}

fn criterion_6(c: &mut Checks) {
    let br = BreuerParams::<f64>::anti_diagonal();
    let s = singlet::<f64>();
    let m = mapped(&s, &class_breuer1(), &br, &[2, 5]);
    c.matrix("f1 matrix", &m, &rows(2, &[1., 0.5, 0.5, 0.], 1.0), EXACT);
    c.near("f1 det", det(&m), -0.25, EXACT);
    let m = mapped(&s, &class_breuer2(), &br, &[2, 5]);
    c.matrix("f2 matrix", &m, &rows(2, &[2., 0.5, 0.5, 0.], 1.0), EXACT);
    c.near("f2 det", det(&m), -0.25, EXACT);
    let m = mapped(&s, &class_breuer3(), &br, &[2, 5]);
    let e = linalg::min_hermitian_eigenvalue(&m);
    c.check("f3 r=(2,5) PSD", e >= -EXACT, || format!("min eig {e}"));
    c.near("f3 r=(2,5,7,8) det", det(&mapped(&s, &class_breuer3(), &br, &[2, 5, 7, 8])), -0.25, EXACT);
    let bell = bell_phi_plus::<f64>();
    for which in [BreuerClass::F1, BreuerClass::F2] {
        let v = breuer_bell_test(&bell, which, CLOSE).unwrap();
        c.near(&format!("bell {which:?} det"), v.value(), -0.25, EXACT);
    }
}

/// Nonzero coefficients of output entry (i, j) in the input entries.
fn coefficients(map: &dyn PositiveMap<f64>, class: &OperatorClass, i: usize, j: usize) -> Vec<((usize, usize), f64)> {
    let n = class.dim();
    let mut out = Vec::new();
    for p in 1..=n {
        for q in 1..=n {
            let mut e = CMatrix::<f64>::zeros(n, n);
            e[(p - 1, q - 1)] = c(1.0, 0.0);
            let m = MomentMatrix::from_entries(e, class.clone(), "", Transform::Plain).unwrap();
            let v = apply_partial(&m, map, Side::A).unwrap().get(i, j);
            if v != c(0.0, 0.0) {
                out.push(((p, q), v.re));
            }
        }
    }
    out
}

fn criterion_7(c: &mut Checks) {
    let st = stormer::<f64>();
    let cls = class_stormer();
    let pattern: &[((usize, usize), &[((usize, usize), f64)])] = &[
        ((2, 2), &[((1, 1), 1.0), ((2, 2), 1.0)]),
        ((2, 3), &[((2, 3), -1.0)]),
        ((2, 7), &[((2, 7), -1.0)]),
        ((3, 3), &[((2, 2), 1.0), ((3, 3), 1.0)]),
        ((3, 7), &[((3, 7), -1.0)]),
        ((7, 7), &[((7, 7), 1.0), ((9, 9), 1.0)]),
    ];
    for (ij, want) in pattern {
        let got = coefficients(&st, &cls, ij.0, ij.1);
        c.check(&format!("stormer out{ij:?}"), got == *want, || format!("{got:?}"));
    }
    let br = BreuerParams::<f64>::anti_diagonal();
    let cls = class_breuer1();
    let pattern: &[((usize, usize), &[((usize, usize), f64)])] = &[
        ((2, 2), &[((1, 1), 1.0), ((4, 4), 1.0)]),
        ((2, 5), &[((2, 5), -1.0), ((4, 7), -1.0)]),
        ((5, 5), &[((6, 6), 1.0), ((7, 7), 1.0)]),
    ];
    for (ij, want) in pattern {
        let got = coefficients(&br, &cls, ij.0, ij.1);
        c.check(&format!("breuer out{ij:?}"), got == *want, || format!("{got:?}"));
    }
}

fn random_class(rng: &mut rand_chacha::ChaCha8Rng) -> OperatorClass {
    let side = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<(u32, u32)> {
        let mut v = vec![(0, 0)];
        for _ in 0..rng.random_range(1..=2) {
            let p = (rng.random_range(0..=2), rng.random_range(0..=2));
            if !v.contains(&p) {
                v.push(p);
            }
        }
        v
    };
    let (a, b) = (side(rng), side(rng));
    class_from_powers(&a, &b)
}

fn criterion_8(c: &mut Checks) {
    let mut rng = rng(801);
    // (a) positivity
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let s = random_two_mode(&mut rng);
        let m = build_moment_matrix(&s, &random_class(&mut rng)).unwrap();
        worst = worst.min(linalg::min_hermitian_eigenvalue(m.entries()));
    }
    c.check("(a) PSD on 200 states", worst >= -PSD_FLOOR, || format!("min eig {worst:e}"));

    // (b) commutation with partial transposition
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = random_two_mode(&mut rng);
        let class = random_class(&mut rng);
        let of_pt = build_moment_matrix_of_pt_state(&s, &class).unwrap();
        let reordered = partial_transpose(&build_moment_matrix(&s, &class).unwrap(), Side::B);
        worst = worst.max(max_abs_diff(of_pt.entries(), reordered.entries()));
    }
    c.check("(b) commutation on 100 pairs", worst <= IDENTITY, || format!("defect {worst:e}"));

    // (c) factorization against the Kronecker product of one-mode matrices
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = random_density::<f64, _>(&ModeCutoffs::new(vec![rng.random_range(2..=3)]).unwrap(), 2, &mut rng);
        let b = random_density::<f64, _>(&ModeCutoffs::new(vec![rng.random_range(2..=3)]).unwrap(), 2, &mut rng);
        let rho = a.tensor(&b).unwrap();
        let class = random_class(&mut rng);
        let only = |side: &[momsep::fock::MonomialSpec], r: &DensityMatrix<f64>| {
            CMatrix::<f64>::from_fn(side.len(), side.len(), |i, j| {
                let (x, y) = (&side[i], &side[j]);
                momsep::moments::pair_moment(r, x, y).unwrap()
            })
        };
        let ma = only(class.side_a(), &a);
        let side_b: Vec<_> = class.side_b().iter().map(|s| momsep::fock::MonomialSpec::new(vec![s.powers(1)])).collect();
        let mb = only(&side_b, &b);
        // B index is the slow one
        let want = linalg::kron(&mb, &ma);
        let got = build_moment_matrix(&rho, &class).unwrap();
        worst = worst.max(max_abs_diff(got.entries(), &want));
    }
    c.check("(c) product factorization", worst <= IDENTITY, || format!("defect {worst:e}"));

    // (d) soundness on separable mixtures
    let mut hits = Vec::new();
    for i in 0..100 {
        let cu = ModeCutoffs::new(vec![rng.random_range(2..=3), rng.random_range(2..=3)]).unwrap();
        let rho = random_separable_mixture::<f64, _>(&cu, 1 + i % 4, &mut rng);
        for v in standard_battery(&rho, CLOSE).unwrap() {
            if v.is_entangled() {
                hits.push(format!("sample {i}: {v}"));
            }
        }
    }
    c.check("(d) no ENTANGLED on 100 separable mixtures", hits.is_empty(), || hits.join("; "));

    // (e) positive maps
    let mut maps: Vec<CatalogMap<f64>> = vec![
        CatalogMap::Identity,
        CatalogMap::Transpose,
        CatalogMap::Choi(stormer()),
        CatalogMap::Choi(ChoiParams::new(1.0, 1.0, 1.0).unwrap()),
        CatalogMap::Breuer(BreuerParams::anti_diagonal()),
        CatalogMap::Breuer(BreuerParams::anti_diagonal_flipped()),
    ];
    for n in [2, 3] {
        maps.push(CatalogMap::Kossakowski(KossakowskiParams::new(n, random_rotation(n * n - 1, &mut rng)).unwrap()));
    }
    for map in &maps {
        let n = map.dim().unwrap_or(3);
        let worst = (0..200)
            .map(|k| linalg::min_hermitian_eigenvalue(&map.apply(&random_psd(n, 1 + k % n, &mut rng)).unwrap()))
            .fold(f64::INFINITY, f64::min);
        c.check(&format!("(e) {map} keeps 200 inputs PSD"), worst >= -IDENTITY, || format!("min eig {worst:e}"));
    }
}

fn criterion_9(c: &mut Checks) {
    let mut rng = rng(901);
    let mut worst = 0.0f64;
    let mut paths = 0.0f64;
    for k in 0..20 {
        let s: State<f64> = if k % 2 == 0 {
            random_two_qubit_pure(&mut rng).into()
        } else {
            random_density::<f64, _>(&two_qubits(), 1 + k % 4, &mut rng).into()
        };
        let rho = two_qubit_density(MomentSource::State(&s)).unwrap();
        worst = worst.max(max_abs_diff(rho.matrix(), s.density().matrix()));
        let table = MomentTable::tabulate(&s, &[2, 2]).unwrap();
        let series = density_from_moments(MomentSource::from(&table), &[2, 2], 1e-8).unwrap();
        paths = paths.max(max_abs_diff(series.matrix(), rho.matrix()));
    }
    c.check("closed form equals exact state", worst <= RECON, || format!("defect {worst:e}"));
    c.check("series path equals closed form", paths <= RECON, || format!("defect {paths:e}"));
    for mean in [1.0, 2.0] {
        let r = density_from_moments(MomentSource::from(&thermal_moment_table::<f64>(mean, 12)), &[12], 1e-6);
        c.check(&format!("thermal mean {mean} diverges"), matches!(r, Err(Error::Divergence { .. })), || format!("{r:?}"));
    }
}

fn criterion_10(c: &mut Checks) {
    let v = hz_three_mode(&pair_single3::<f64>(), 1, CLOSE).unwrap();
    c.check("variant 1 detects (|011>+|100>)", v.is_entangled(), || v.to_string());
    c.near("variant 1 lhs", v.get("lhs").unwrap(), 0.0, EXACT);
    c.near("variant 1 rhs", v.get("rhs").unwrap(), 0.25, EXACT);
    let g = hz_three_mode(&ghz3::<f64>(), 2, CLOSE).unwrap();
    c.check("variant 2 on GHZ is INCONCLUSIVE", g.outcome == Outcome::Inconclusive, || g.to_string());
    c.check("variant 2 on GHZ flags boundary", g.boundary, || g.to_string());
    let hz = hz_two_mode(&singlet::<f64>(), (0, 1), CLOSE).unwrap();
    let pair = generic_det_test("pair", &singlet::<f64>(), &class_pair(), &[1], CLOSE).unwrap();
    c.near("two-mode reduction", hz.value(), pair.value(), EXACT);
}

/// States and classes over which the norm ordering is observed.
fn conjecture_battery() -> Vec<(String, State<f64>)> {
    let mut out: Vec<(String, State<f64>)> = vec![
        ("singlet".into(), singlet::<f64>().into()),
        ("bell".into(), bell_phi_plus::<f64>().into()),
        ("example 2".into(), partial_example2::<f64>().into()),
        ("cat'".into(), cat_prime::<f64>(0.3, 0.2).unwrap().into()),
        ("cat''".into(), cat_double_prime::<f64>(0.3, 0.2).unwrap().into()),
        ("product coherent".into(), product_coherent::<f64>(0.3, 0.2).unwrap().into()),
        ("|11>".into(), StateVector::<f64>::fock(&[1, 1], &two_qubits()).unwrap().into()),
        ("maximally mixed".into(), DensityMatrix::<f64>::maximally_mixed(&two_qubits()).into()),
    ];
    for (a, b) in [(0.5, 0.5), (0.8, 0.3), (1.0, 1.0)] {
        out.push((format!("cat'({a},{b})"), cat_prime::<f64>(a, b).unwrap().into()));
    }
    let mut rng = rng(1101);
    for k in 0..40 {
        out.push((format!("random #{k}"), random_two_mode(&mut rng)));
    }
    out
}

fn criterion_11() -> (usize, Vec<String>) {
    let classes: Vec<(&str, OperatorClass)> = CLASS_PRESETS
        .iter()
        .map(|(name, _)| (*name, class_preset(name).unwrap()))
        .collect();
    let mut checked = 0;
    let mut counter = Vec::new();
    for (sname, s) in conjecture_battery() {
        for (cname, class) in &classes {
            let (Ok(g), Ok(r)) = (nu_gamma(&s, class), nu_r(&s, class)) else { continue };
            checked += 1;
            if g < r - CONJECTURE_SLACK {
                let m = build_moment_matrix(&s, class).unwrap();
                counter.push(format!("{sname} / {cname}: nu^Gamma = {g:.12}, nu^R = {r:.12}\nM =\n{}", m.entries()));
            }
        }
    }
    (checked, counter)
}

fn run(n: usize, label: &str, f: fn(&mut Checks)) -> bool {
    let start = Instant::now();
    let mut checks = Checks::default();
    let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut checks)));
    if let Err(p) = outcome {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        checks.failures.push(format!("panic: {}", msg.unwrap_or_default()));
    }
    let ok = checks.failures.is_empty();
    let ms = start.elapsed().as_millis();
    println!(
        "criterion {n:>2} {} {label} ({}/{} checks, {ms} ms)",
        if ok { "PASS" } else { "FAIL" },
        checks.total - checks.failures.len().min(checks.total),
        checks.total
    );
    for f in &checks.failures {
        println!("    - {f}");
    }
    ok
}

fn main() {
    let criteria: [(&str, fn(&mut Checks)); 10] = [
        ("singlet, basic class", criterion_1),
        ("singlet, f = (1, ab)", criterion_2),
        ("(|00>+|01>+|10>)/sqrt3", criterion_3),
        ("cat states at (0.3, 0.2)", criterion_4),
        ("Störmer map test", criterion_5),
        ("Breuer map tests", criterion_6),
        ("partial map coefficient patterns", criterion_7),
        ("property suites", criterion_8),
        ("reconstruction", criterion_9),
        ("multimode", criterion_10),
    ];
    let mut failed = 0;
    for (i, (label, f)) in criteria.into_iter().enumerate() {
        if !run(i + 1, label, f) {
            failed += 1;
        }
    }

    let (checked, counter) = criterion_11();
    let status = if counter.is_empty() { "HOLDS" } else { "VIOLATED" };
    println!(
        "criterion 11 MONITOR nu^Gamma >= nu^R - {CONJECTURE_SLACK:e} {status} ({checked} state/class pairs, {} counterexamples)",
        counter.len()
    );
    if !counter.is_empty() {
        let dir = std::env::var("CARGO_TARGET_TMPDIR").unwrap_or_else(|_| std::env::temp_dir().display().to_string());
        let path = std::path::Path::new(&dir).join("norm_ordering_counterexamples.txt");
        let mut dump = String::new();
        for c in &counter {
            let _ = writeln!(dump, "{c}\n");
        }
        match std::fs::write(&path, dump) {
            Ok(()) => println!("    counterexamples written to {}", path.display()),
            Err(e) => println!("    could not write counterexamples: {e}"),
        }
        for c in counter.iter().take(3) {
            println!("    - {}", c.lines().next().unwrap_or_default());
        }
    }

    println!("acceptance: {} of 10 gated criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
