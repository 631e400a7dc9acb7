//! Run configuration. JSON on disk; complex numbers are `[re, im]` pairs.
//!
//! ```json
//! {
//!   "tol": 1e-9,
//!   "states": [
//!     { "name": "singlet", "library": "singlet" },
//!     { "name": "cat", "library": "cat_prime", "params": { "alpha": [0.3, 0], "beta": [0.2, 0] } }
//!   ],
//!   "criteria": [
//!     { "name": "pt_norm_test", "class": "basic" },
//!     { "name": "map_test", "class": "stormer", "map": "stormer", "r": [2, 3, 7] }
//!   ]
//! }
//! ```
//!
//! The full schema, with an example for every criterion, is in `docs/config.md`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use momsep::criteria::CRITERIA;
use momsep::library::{CLASS_PRESETS, LIBRARY_STATES};
use momsep::MonomialSpec;

pub const CONFIG_SCHEMA: &str = "momsep.config/1";

pub type Complex = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Human,
    Structured,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(Format::Human),
            "structured" | "json" => Ok(Format::Structured),
            _ => Err(format!("unknown format `{s}` (expected human or structured)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    /// Per-mode cutoff for library states that do not set their own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    /// Coherent-state truncation budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Default criterion tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Embed witness matrices in the report (default true).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed_matrices: Option<bool>,
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub criteria: Vec<CriterionSpec>,
}

/// A state. Exactly one of `library`, `amplitudes`, `density` or `moments`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub library: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<LibraryParamsSpec>,
    /// State vector in the Fock basis, last mode fastest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Complex>>,
    /// Density matrix rows in the same basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Vec<Complex>>>,
    /// Per-mode cutoffs for `amplitudes` and `density`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<usize>>,
    /// Moment table, reconstructed into a density matrix on `dims`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<MomentEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    /// Acceptance tolerance for reconstructed density matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibraryParamsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupations: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentEntry {
    /// Normally ordered monomial, e.g. `a+ b`.
    pub monomial: String,
    pub value: Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassSpec {
    Preset(String),
    Tensor {
        a: Vec<String>,
        b: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes_a: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modes_b: Option<Vec<usize>>,
    },
    Generic {
        generic: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KossakowskiSpec {
    pub n: usize,
    /// `(n²-1) x (n²-1)` rotation, row by row.
    pub rotation: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BreuerSpec {
    Phases { phases: Vec<f64>, rotation: Vec<Vec<f64>> },
    Unitary { unitary: Vec<Vec<Complex>> },
}

/// `identity`, `transpose`, `stormer`, `breuer` (anti-diagonal `U`),
/// `breuer_flipped`, or a parametrized map object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    Named(String),
    Choi { choi: [f64; 3] },
    Kossakowski { kossakowski: KossakowskiSpec },
    Breuer { breuer: BreuerSpec },
}

pub const NAMED_MAPS: &[&str] = &["identity", "transpose", "stormer", "breuer", "breuer_flipped"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideSpec {
    A,
    B,
}

impl From<SideSpec> for momsep::Side {
    fn from(s: SideSpec) -> Self {
        match s {
            SideSpec::A => momsep::Side::A,
            SideSpec::B => momsep::Side::B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    /// 1-based principal submatrix indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<usize>>,
    /// Several submatrices for `sylvester_scan`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_list: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_minor: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<SideSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// `hz_two_mode` mode pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<[usize; 2]>,
    /// `hz_three_mode` variant, 1 or 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<u8>,
    /// `breuer_bell_test` class, `f1` or `f2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    /// `generic_det_test` modes to transpose.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transposed_modes: Option<Vec<usize>>,
    /// `state_level_tests` subsystem dimensions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

/// Parse or validation failure, located by line/column or field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn at(location: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { location: location.into(), message: message.into() }
}

impl RunConfig {
    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| at(format!("line {}, column {}", e.line(), e.column()), strip_position(&e.to_string())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Names, presets and monomials all resolve; each state has one source.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(s) = &self.schema {
            if s != CONFIG_SCHEMA {
                return Err(at("schema", format!("unsupported schema `{s}` (expected {CONFIG_SCHEMA})")));
            }
        }
        for (i, s) in self.states.iter().enumerate() {
            s.validate(&format!("states[{i}]"))?;
        }
        for (i, c) in self.criteria.iter().enumerate() {
            c.validate(&format!("criteria[{i}]"))?;
        }
        Ok(())
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn check_monomials(path: &str, xs: &[String]) -> Result<(), ConfigError> {
    for (i, m) in xs.iter().enumerate() {
        m.parse::<MonomialSpec>().map_err(|e| at(format!("{path}[{i}]"), e.to_string()))?;
    }
    Ok(())
}

impl StateSpec {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let sources = [
            self.library.is_some(),
            self.amplitudes.is_some(),
            self.density.is_some(),
            self.moments.is_some(),
        ];
        match sources.iter().filter(|&&b| b).count() {
            1 => {}
            0 => return Err(at(path, "needs one of `library`, `amplitudes`, `density`, `moments`")),
            _ => return Err(at(path, "give only one of `library`, `amplitudes`, `density`, `moments`")),
        }
        if let Some(lib) = &self.library {
            if !LIBRARY_STATES.iter().any(|(n, _)| n == lib) {
                return Err(at(format!("{path}.library"), format!("unknown library state `{lib}`")));
            }
        } else if self.params.is_some() {
            return Err(at(format!("{path}.params"), "only library states take params"));
        }
        if (self.amplitudes.is_some() || self.density.is_some()) && self.cutoffs.is_none() {
            return Err(at(format!("{path}.cutoffs"), "explicit states need per-mode cutoffs"));
        }
        if let Some(entries) = &self.moments {
            if self.dims.is_none() {
                return Err(at(format!("{path}.dims"), "moment tables need assumed per-mode dimensions"));
            }
            for (i, e) in entries.iter().enumerate() {
                e.monomial
                    .parse::<MonomialSpec>()
                    .map_err(|err| at(format!("{path}.moments[{i}].monomial"), err.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Criteria that evaluate a tensor-product class.
const TAKES_CLASS: &[&str] = &["sylvester_scan", "min_eig_test", "pt_norm_test", "realign_norm_test", "map_test"];

impl CriterionSpec {
    fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let name = self.name.as_str();
        if !CRITERIA.iter().any(|(n, _)| *n == name) {
            return Err(at(format!("{path}.name"), format!("unknown criterion `{name}`")));
        }
        match &self.class {
            Some(ClassSpec::Preset(p)) => {
                if !CLASS_PRESETS.iter().any(|(n, _)| n == p) {
                    return Err(at(format!("{path}.class"), format!("unknown class preset `{p}`")));
                }
            }
            Some(ClassSpec::Tensor { a, b, .. }) => {
                check_monomials(&format!("{path}.class.a"), a)?;
                check_monomials(&format!("{path}.class.b"), b)?;
            }
            Some(ClassSpec::Generic { generic }) => check_monomials(&format!("{path}.class.generic"), generic)?,
            None => {}
        }
        let generic = matches!(self.class, Some(ClassSpec::Generic { .. }));
        if name == "generic_det_test" && !generic {
            return Err(at(format!("{path}.class"), "generic_det_test needs a `{\"generic\": [...]}` class"));
        }
        if generic && name != "generic_det_test" {
            return Err(at(format!("{path}.class"), format!("`{name}` needs a tensor-product class")));
        }
        if self.class.is_some() && !TAKES_CLASS.contains(&name) && name != "generic_det_test" {
            return Err(at(format!("{path}.class"), format!("`{name}` uses a fixed class")));
        }
        if name == "map_test" && self.map.is_none() {
            return Err(at(format!("{path}.map"), "map_test needs a map"));
        }
        if let Some(MapSpec::Named(m)) = &self.map {
            if !NAMED_MAPS.contains(&m.as_str()) {
                return Err(at(format!("{path}.map"), format!("unknown map `{m}`")));
            }
        }
        if let Some(v) = self.variant {
            if v != 1 && v != 2 {
                return Err(at(format!("{path}.variant"), "variant must be 1 or 2"));
            }
        }
        if let Some(w) = &self.which {
            if w != "f1" && w != "f2" {
                return Err(at(format!("{path}.which"), "which must be f1 or f2"));
            }
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(at(format!("{path}.tol"), "tolerance must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
      "schema": "momsep.config/1",
      "cutoff": 12,
      "tol": 1e-9,
      "format": "structured",
      "states": [
        { "name": "s", "library": "singlet" },
        { "name": "c", "library": "cat_prime", "params": { "alpha": [0.3, 0], "beta": [0.2, 0], "epsilon": 1e-12 } },
        { "name": "v", "amplitudes": [[0,0],[1,0],[-1,0],[0,0]], "cutoffs": [2, 2] },
        { "name": "t", "moments": [{ "monomial": "Na", "value": [0.5, 0] }], "dims": [2, 2] }
      ],
      "criteria": [
        { "name": "pt_norm_test", "class": "basic" },
        { "name": "sylvester_scan", "class": { "a": ["1", "a"], "b": ["1", "b"] }, "r_list": [[1, 4]] },
        { "name": "map_test", "class": "stormer", "map": "stormer", "r": [2, 3, 7], "side": "A" },
        { "name": "map_test", "class": "breuer1", "map": { "choi": [2, 0, 1] } },
        { "name": "map_test", "class": "breuer1", "map": { "breuer": { "phases": [0, 0], "rotation": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]] } } },
        { "name": "generic_det_test", "class": { "generic": ["1", "a b"] }, "transposed_modes": [1] },
        { "name": "hz_three_mode", "variant": 2 },
        { "name": "breuer_bell_test", "which": "f1" }
      ]
    }"#;

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = RunConfig::parse(FULL).unwrap();
        let text = cfg.to_json();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(text, again.to_json());
    }

    #[test]
    fn untagged_shapes_resolve() {
        let cfg = RunConfig::parse(FULL).unwrap();
        assert!(matches!(cfg.criteria[1].class, Some(ClassSpec::Tensor { .. })));
        assert!(matches!(cfg.criteria[3].map, Some(MapSpec::Choi { .. })));
        assert!(matches!(cfg.criteria[4].map, Some(MapSpec::Breuer { breuer: BreuerSpec::Phases { .. } })));
        assert!(matches!(cfg.criteria[5].class, Some(ClassSpec::Generic { .. })));
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = RunConfig::parse("{\n  \"states\": [\n    { \"name\": 3 }\n  ]\n}").unwrap_err();
        assert!(err.location.starts_with("line 3"), "{err}");
    }

    #[test]
    fn semantic_errors_carry_field_paths() {
        let cases = [
            (r#"{"states":[{"name":"x","library":"nope"}]}"#, "states[0].library"),
            (r#"{"states":[{"name":"x"}]}"#, "states[0]"),
            (r#"{"states":[{"name":"x","library":"singlet","amplitudes":[]}]}"#, "states[0]"),
            (r#"{"states":[],"criteria":[{"name":"bogus"}]}"#, "criteria[0].name"),
            (r#"{"states":[],"criteria":[{"name":"map_test","class":"basic"}]}"#, "criteria[0].map"),
            (r#"{"states":[],"criteria":[{"name":"pt_norm_test","class":{"a":["1","a^x"],"b":["1"]}}]}"#, "criteria[0].class.a[1]"),
            (r#"{"states":[],"criteria":[{"name":"hz_two_mode","class":"basic"}]}"#, "criteria[0].class"),
        ];
        for (text, loc) in cases {
            let err = RunConfig::parse(text).unwrap_err();
            assert_eq!(err.location, loc, "{err}");
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = RunConfig::parse(r#"{"states":[{"name":"x","library":"singlet","colour":1}]}"#).unwrap_err();
        assert!(err.message.contains("colour"), "{err}");
    }

    #[test]
    fn empty_criteria_is_valid() {
        let cfg = RunConfig::parse(r#"{"states":[{"name":"s","library":"singlet"}]}"#).unwrap();
        assert!(cfg.criteria.is_empty());
    }
}
