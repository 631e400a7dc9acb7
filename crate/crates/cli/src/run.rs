//! Executes a validated configuration.

use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::DMatrix;

use momsep::criteria::{self, BreuerClass, DEFAULT_MAX_MINOR};
use momsep::fock::DEFAULT_COHERENT_EPSILON;
use momsep::library::{class_basic, class_breuer1, class_preset, class_stormer, state_library, LibraryParams};
use momsep::reconstruct::{density_from_moments, state_level_tests, two_qubit_density, MomentTable};
use momsep::reorder::partial_transpose;
use momsep::{
    build_moment_matrix, BreuerParams, CMatrix64, CatalogMap, ChoiParams, DensityMatrix64, Expectation, GenericClass,
    KossakowskiParams, ModeCutoffs, MomentSource, MonomialSpec, OperatorClass, PositiveMap, Side, State64,
    StateVector64, Verdict64, C,
};

use crate::config::{BreuerSpec, ClassSpec, Complex, CriterionSpec, MapSpec, RunConfig, StateSpec};
use crate::report::{Report, StateReport, VerdictRecord, REPORT_SCHEMA};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Default acceptance tolerance for densities rebuilt from moment tables.
pub const DEFAULT_RECONSTRUCTION_TOL: f64 = 1e-8;

/// Command-line overrides; each wins over the config value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub cutoff: Option<usize>,
    pub epsilon: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Settings {
    cutoff: Option<usize>,
    epsilon: f64,
    tol: f64,
    embed: bool,
}

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn complex(z: &Complex) -> C<f64> {
    C::new(z[0], z[1])
}

fn parse_all(xs: &[String]) -> Res<Vec<MonomialSpec>> {
    xs.iter().map(|s| s.parse().map_err(err)).collect()
}

/// Builds the state a spec describes, with its source label.
pub fn build_state(spec: &StateSpec, cutoff: Option<usize>, epsilon: f64) -> Res<(State64, String)> {
    if let Some(lib) = &spec.library {
        let p = spec.params.clone().unwrap_or_default();
        let params = LibraryParams {
            alpha: p.alpha.as_ref().map(complex).unwrap_or_default(),
            beta: p.beta.as_ref().map(complex).unwrap_or_default(),
            occupations: p.occupations.unwrap_or_default(),
            cutoff: p.cutoff.or(cutoff),
            modes: p.modes.unwrap_or(2),
            epsilon: p.epsilon.unwrap_or(epsilon),
        };
        return Ok((state_library(lib, &params).map_err(err)?, format!("library {lib}")));
    }
    if let Some(amps) = &spec.amplitudes {
        let cutoffs = ModeCutoffs::new(spec.cutoffs.clone().unwrap_or_default()).map_err(err)?;
        let v = nalgebra::DVector::from_iterator(amps.len(), amps.iter().map(complex));
        return Ok((StateVector64::new(cutoffs, v).map_err(err)?.into(), "amplitudes".into()));
    }
    if let Some(rows) = &spec.density {
        let cutoffs = ModeCutoffs::new(spec.cutoffs.clone().unwrap_or_default()).map_err(err)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err("density matrix must be square".into());
        }
        let m = CMatrix64::from_fn(n, n, |i, j| complex(&rows[i][j]));
        return Ok((DensityMatrix64::new(cutoffs, m).map_err(err)?.into(), "density".into()));
    }
    if let Some(entries) = &spec.moments {
        let parsed = entries
            .iter()
            .map(|e| Ok((e.monomial.parse::<MonomialSpec>().map_err(err)?, complex(&e.value))))
            .collect::<Res<Vec<_>>>()?;
        let table = MomentTable::from_entries(parsed).map_err(err)?;
        let dims = spec.dims.clone().unwrap_or_default();
        let source = MomentSource::from(&table);
        let rho = if dims == [2, 2] && spec.reconstruction_tol.is_none() {
            two_qubit_density(source)
        } else {
            density_from_moments(source, &dims, spec.reconstruction_tol.unwrap_or(DEFAULT_RECONSTRUCTION_TOL))
        };
        return Ok((rho.map_err(err)?.into(), "moments".into()));
    }
    Err("state has no source".into())
}

fn tensor_class(spec: &ClassSpec) -> Res<OperatorClass> {
    match spec {
        ClassSpec::Preset(name) => class_preset(name).map_err(err),
        ClassSpec::Tensor { a, b, modes_a, modes_b } => OperatorClass::new(
            parse_all(a)?,
            parse_all(b)?,
            modes_a.clone().unwrap_or_else(|| vec![0]),
            modes_b.clone().unwrap_or_else(|| vec![1]),
        )
        .map_err(err),
        ClassSpec::Generic { .. } => Err("expected a tensor-product class".into()),
    }
}

fn rotation(rows: &[Vec<f64>]) -> Res<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err("rotation must be square".into());
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn build_map(spec: &MapSpec) -> Res<CatalogMap<f64>> {
    Ok(match spec {
        MapSpec::Named(n) => match n.as_str() {
            "identity" => CatalogMap::Identity,
            "transpose" => CatalogMap::Transpose,
            "stormer" => CatalogMap::Choi(ChoiParams::stormer()),
            "breuer" => CatalogMap::Breuer(BreuerParams::anti_diagonal()),
            "breuer_flipped" => CatalogMap::Breuer(BreuerParams::anti_diagonal_flipped()),
            other => return Err(format!("unknown map `{other}`")),
        },
        MapSpec::Choi { choi } => CatalogMap::Choi(ChoiParams::new(choi[0], choi[1], choi[2]).map_err(err)?),
        MapSpec::Kossakowski { kossakowski } => CatalogMap::Kossakowski(
            KossakowskiParams::new(kossakowski.n, rotation(&kossakowski.rotation)?).map_err(err)?,
        ),
        MapSpec::Breuer { breuer: BreuerSpec::Phases { phases, rotation: r } } => {
            CatalogMap::Breuer(BreuerParams::from_phases(phases, &rotation(r)?).map_err(err)?)
        }
        MapSpec::Breuer { breuer: BreuerSpec::Unitary { unitary } } => {
            let n = unitary.len();
            if unitary.iter().any(|r| r.len() != n) {
                return Err("unitary must be square".into());
            }
            CatalogMap::Breuer(BreuerParams::new(CMatrix64::from_fn(n, n, |i, j| complex(&unitary[i][j]))).map_err(err)?)
        }
    })
}

/// Class used when a criterion names none: the Störmer class for 3x3
/// maps, the first Breuer class for 4x4 maps, the basic class otherwise.
fn default_class(map: Option<&CatalogMap<f64>>) -> Res<OperatorClass> {
    match map.and_then(|m| m.dim()) {
        None => Ok(class_basic()),
        Some(3) => Ok(class_stormer()),
        Some(4) => Ok(class_breuer1()),
        Some(d) => Err(format!("a {d}x{d} map needs an explicit class")),
    }
}

fn class_for(spec: &CriterionSpec, map: Option<&CatalogMap<f64>>) -> Res<OperatorClass> {
    match &spec.class {
        Some(c) => tensor_class(c),
        None => default_class(map),
    }
}

/// Evaluates one invocation; one record per verdict produced.
pub fn evaluate(state: &State64, spec: &CriterionSpec, default_tol: f64) -> Res<Vec<Verdict64>> {
    let tol = spec.tol.unwrap_or(default_tol);
    let side: Side = spec.side.map(Into::into).unwrap_or_default();
    let one = |v: Verdict64| Ok(vec![v]);
    match spec.name.as_str() {
        "sylvester_scan" | "min_eig_test" => {
            let class = class_for(spec, None)?;
            let pt = partial_transpose(&build_moment_matrix(state, &class).map_err(err)?, side).into_entries();
            let mut v = if spec.name == "min_eig_test" {
                let m = match &spec.r {
                    Some(r) => momsep::linalg::principal_submatrix(&pt, r).map_err(err)?,
                    None => pt,
                };
                let mut v = criteria::min_eig_test(&m, tol);
                v.provenance.r = spec.r.clone();
                v
            } else {
                let list = spec.r_list.clone().or_else(|| spec.r.clone().map(|r| vec![r]));
                criteria::sylvester_scan(&pt, spec.max_minor.unwrap_or(DEFAULT_MAX_MINOR), list.as_deref(), tol)
                    .map_err(err)?
            };
            v.provenance.class = Some(class.to_string());
            v.provenance.side = Some(side);
            one(v)
        }
        "pt_norm_test" => one(criteria::pt_norm_test(state, &class_for(spec, None)?, tol).map_err(err)?),
        "realign_norm_test" => one(criteria::realign_norm_test(state, &class_for(spec, None)?, tol).map_err(err)?),
        "map_test" => {
            let map = build_map(spec.map.as_ref().ok_or("map_test needs a map")?)?;
            let class = class_for(spec, Some(&map))?;
            one(criteria::map_test(state, &class, &map, side, spec.r.as_deref(), tol).map_err(err)?)
        }
        "breuer_bell_test" => {
            let which = match spec.which.as_deref() {
                Some("f2") => BreuerClass::F2,
                _ => BreuerClass::F1,
            };
            one(criteria::breuer_bell_test(state, which, tol).map_err(err)?)
        }
        "hz_two_mode" => {
            let [a, b] = spec.modes.unwrap_or([0, 1]);
            one(criteria::hz_two_mode(state, (a, b), tol).map_err(err)?)
        }
        "hz_three_mode" => one(criteria::hz_three_mode(state, spec.variant.unwrap_or(1), tol).map_err(err)?),
        "breuer_inequality_test" => one(criteria::breuer_inequality_test(state, tol).map_err(err)?),
        "sv_cat_state_test" => one(criteria::sv_cat_state_test(state, tol).map_err(err)?),
        "generic_det_test" => {
            let Some(ClassSpec::Generic { generic }) = &spec.class else {
                return Err("generic_det_test needs a generic class".into());
            };
            let class = GenericClass::new(parse_all(generic)?).map_err(err)?;
            let modes = spec.transposed_modes.clone().unwrap_or_else(|| vec![1]);
            one(criteria::generic_det_test("generic_det_test", state, &class, &modes, tol).map_err(err)?)
        }
        "state_level_tests" => {
            let dims = match spec.dims {
                Some([a, b]) => (a, b),
                None => match Expectation::cutoffs(state).dims() {
                    &[a, b] => (a, b),
                    _ => return Err("state_level_tests needs `dims` for states with more than two modes".into()),
                },
            };
            state_level_tests(state.density().matrix(), dims, tol).map_err(err)
        }
        other => Err(format!("unknown criterion `{other}`")),
    }
}

fn guarded<T>(f: impl FnOnce() -> Res<T>) -> Res<T> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown failure".into());
        Err(format!("internal failure: {msg}"))
    })
}

/// Runs every criterion on every state, in config order. Failures are
/// recorded per state or per criterion and never abort the batch.
pub fn run(cfg: &RunConfig, overrides: Overrides) -> Report {
    let settings = Settings {
        cutoff: overrides.cutoff.or(cfg.cutoff),
        epsilon: overrides.epsilon.or(cfg.epsilon).unwrap_or(DEFAULT_COHERENT_EPSILON),
        tol: overrides.tol.or(cfg.tol).unwrap_or(DEFAULT_TOL),
        embed: cfg.embed_matrices.unwrap_or(true),
    };
    let states = cfg
        .states
        .iter()
        .map(|spec| {
            let mut report = StateReport {
                name: spec.name.clone(),
                source: String::new(),
                cutoffs: Vec::new(),
                error: None,
                verdicts: Vec::new(),
                summary: String::new(),
            };
            match guarded(|| build_state(spec, settings.cutoff, settings.epsilon)) {
                Err(e) => report.error = Some(e),
                Ok((state, source)) => {
                    report.source = source;
                    report.cutoffs = Expectation::cutoffs(&state).dims().to_vec();
                    for c in &cfg.criteria {
                        match guarded(|| evaluate(&state, c, settings.tol)) {
                            Ok(vs) => report
                                .verdicts
                                .extend(vs.iter().map(|v| VerdictRecord::from_verdict(v, settings.embed))),
                            Err(e) => report.verdicts.push(VerdictRecord::failed(&c.name, e)),
                        }
                    }
                }
            }
            report.summarize();
            report
        })
        .collect();
    Report { schema: REPORT_SCHEMA.into(), tol: settings.tol, states }
}
