//! JSON scenario manifests.
//!
//! A manifest names a Poisson structure, an optional density, a list of paths, and
//! the verification suites to run. Unknown fields are rejected. Indices of
//! coordinates and basis elements are 0-based.
//!
//! ```json
//! {
//!   "name": "aff1-demo",
//!   "dim": 2,
//!   "bivector": { "preset": "aff1" },
//!   "paths": [
//!     { "label": "e1", "loop": true,
//!       "cotangent": { "kind": "stationary", "point": [0, 0], "duration": 1,
//!                      "terms": [{ "covector": [1, 0] }] } }
//!   ],
//!   "suites": ["theorem-main"]
//! }
//! ```

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BivectorField, VolumeDensity, DEFAULT_RANK_TOL};
use crate::lie::LieAlgebraPresentation;
use crate::paths::{lift_min_norm, CotangentPath, TangentPath, DEFAULT_COT_TOL, DEFAULT_LIFT_TOL};
use crate::poly::{Poly, PolyTerm};
use crate::presets;

/// Largest accepted cyclic Jacobi sum at a probe point, relative to the squared
/// coefficient scale of the bivector.
pub const JACOBI_GATE_TOL: f64 = 1e-8;
const JACOBI_PROBES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub dim: usize,
    pub bivector: BivectorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub tangent_paths: Vec<TangentSpec>,
    #[serde(default)]
    pub paths: Vec<PathSpec>,
    #[serde(default)]
    pub compositions: Vec<CompositionSpec>,
    #[serde(default)]
    pub families: Vec<FamilySpec>,
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BivectorSpec {
    Preset(String),
    /// Upper-triangular entries `Pi^{ij}`, `i < j`; missing entries are zero.
    Entries(Vec<EntrySpec>),
    LieAlgebra(LieAlgebraSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<PolyTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraSpec {
    pub constants: Vec<StructureConstant>,
}

/// `c_{ij}^k = value` with `i < j`; the antisymmetric partner is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

/// `rho = exp(log)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub log: Vec<PolyTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentSpec {
    pub label: String,
    pub curve: CurveSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    /// `center + cos(2 pi t / T) u + sin(2 pi t / T) v`.
    Ellipse {
        center: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
        duration: f64,
    },
    /// Circle of `radius` in the coordinate plane `axes`.
    Circle {
        center: Vec<f64>,
        radius: f64,
        axes: [usize; 2],
        duration: f64,
    },
    Segment {
        from: Vec<f64>,
        to: Vec<f64>,
        duration: f64,
    },
    Constant {
        point: Vec<f64>,
        duration: f64,
    },
    /// Explicit samples on a uniform grid over `[t0, t1]`.
    Samples {
        t0: f64,
        t1: f64,
        points: Vec<Vec<f64>>,
        #[serde(default)]
        closed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub label: String,
    /// Declares the path a loop; validation requires both `gamma` and `alpha` to close.
    #[serde(rename = "loop", default)]
    pub is_loop: bool,
    pub cotangent: CotangentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CotangentSpec {
    /// Minimum-norm lift of a tangent path.
    Lift { tangent: String },
    /// `gamma = point`, `alpha(t) = sum of terms`; every value must lie in the
    /// kernel at `point`.
    Stationary {
        point: Vec<f64>,
        duration: f64,
        terms: Vec<CovectorTerm>,
    },
    /// Earlier paths joined in order.
    Concat { parts: Vec<String> },
    /// An earlier path traversed backwards.
    Reverse { path: String },
    Samples {
        t0: f64,
        t1: f64,
        points: Vec<Vec<f64>>,
        covectors: Vec<Vec<f64>>,
        #[serde(default)]
        closed: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Const,
    Cos,
    Sin,
}

/// `covector * g(2 pi frequency t / T)` with `g` one of `1`, `cos`, `sin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovectorTerm {
    pub covector: Vec<f64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionSpec {
    pub first: String,
    pub second: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    /// Holonomies must agree as matrices.
    #[default]
    Exact,
    /// Holonomies must agree modulo inner automorphisms (Lie–Poisson only).
    Inn,
}

/// Loops declared homotopic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub label: String,
    pub members: Vec<String>,
    #[serde(default)]
    pub mode: FamilyMode,
    /// Required lower bound on the largest pairwise `max |H_i - H_j|`.
    #[serde(default)]
    pub min_spread: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Holonomy,
    TheoremMain,
    Modular,
    Integrals,
    Oracles,
    Homotopy,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Holonomy,
        Suite::TheoremMain,
        Suite::Modular,
        Suite::Integrals,
        Suite::Oracles,
        Suite::Homotopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Holonomy => "holonomy",
            Suite::TheoremMain => "theorem-main",
            Suite::Modular => "modular",
            Suite::Integrals => "integrals",
            Suite::Oracles => "oracles",
            Suite::Homotopy => "homotopy",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Integrator steps per unit time.
    pub steps: usize,
    /// Samples per path (grid points, both ends included).
    pub samples: usize,
    pub seed: u64,
    /// Sign used for path integrals in place of the compiled one. The conventions
    /// pre-suite fails if it disagrees with the arbiter.
    pub sigma: Option<f64>,
    pub convergence_base: usize,
    pub convergence_levels: usize,
    /// Random `(f, x)` probes per structure in the modular suite.
    pub probes: usize,
    /// Random functions per path in the integrals suite.
    pub random_functions: usize,
    pub oracle_partitions: usize,
    pub tolerances: Tolerances,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            steps: crate::holonomy::DEFAULT_STEPS_PER_UNIT,
            samples: crate::paths::DEFAULT_SAMPLES,
            seed: 0,
            sigma: None,
            convergence_base: 16,
            convergence_levels: 4,
            probes: 100,
            random_functions: 10,
            oracle_partitions: 4096,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub theorem: f64,
    pub determinant: f64,
    pub leaf: f64,
    pub drift: f64,
    pub cotangent: f64,
    pub extension: f64,
    pub composition: f64,
    pub reparameterization: f64,
    pub endpoint: f64,
    pub hamiltonian_loop: f64,
    pub pullback: f64,
    pub defining_property: f64,
    pub gauge: f64,
    pub poisson: f64,
    pub gauge_loop: f64,
    pub oracle: f64,
    pub time_ordered: f64,
    pub inn: f64,
    pub homotopy: f64,
    pub min_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            theorem: 1e-5,
            determinant: 1e-6,
            leaf: crate::holonomy::DEFAULT_LEAF_TOL,
            drift: crate::holonomy::DEFAULT_DRIFT_TOL,
            cotangent: DEFAULT_COT_TOL,
            extension: 1e-6,
            composition: 1e-6,
            reparameterization: 1e-6,
            endpoint: 1e-7,
            hamiltonian_loop: 1e-8,
            pullback: 1e-7,
            defining_property: 1e-9,
            gauge: 1e-12,
            poisson: 1e-10,
            gauge_loop: 1e-7,
            oracle: 1e-6,
            time_ordered: 1e-5,
            inn: 1e-6,
            homotopy: 1e-6,
            min_order: 3.5,
        }
    }
}

impl Tolerances {
    fn named(&self) -> [(&'static str, f64); 20] {
        [
            ("theorem", self.theorem),
            ("determinant", self.determinant),
            ("leaf", self.leaf),
            ("drift", self.drift),
            ("cotangent", self.cotangent),
            ("extension", self.extension),
            ("composition", self.composition),
            ("reparameterization", self.reparameterization),
            ("endpoint", self.endpoint),
            ("hamiltonian_loop", self.hamiltonian_loop),
            ("pullback", self.pullback),
            ("defining_property", self.defining_property),
            ("gauge", self.gauge),
            ("poisson", self.poisson),
            ("gauge_loop", self.gauge_loop),
            ("oracle", self.oracle),
            ("time_ordered", self.time_ordered),
            ("inn", self.inn),
            ("homotopy", self.homotopy),
            ("min_order", self.min_order),
        ]
    }
}

/// Time-dependent covector `a(t)` of a stationary path.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorSchedule {
    pub duration: f64,
    pub terms: Vec<CovectorTerm>,
}

impl CovectorSchedule {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.terms.first().map_or(0, |c| c.covector.len());
        let mut out = vec![0.0; n];
        for term in &self.terms {
            let w = TAU * term.frequency * t / self.duration;
            let g = match term.mode {
                Mode::Const => 1.0,
                Mode::Cos => w.cos(),
                Mode::Sin => w.sin(),
            };
            for (o, c) in out.iter_mut().zip(&term.covector) {
                *o += c * g;
            }
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.mode == Mode::Const || (t.mode == Mode::Cos && t.frequency == 0.0))
    }
}

/// A built path with the data the suites need.
#[derive(Debug, Clone)]
pub struct NamedPath {
    pub label: String,
    pub path: CotangentPath,
    pub is_loop: bool,
    /// Present for stationary paths.
    pub schedule: Option<CovectorSchedule>,
}

/// A validated manifest with every object constructed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub bivector: BivectorField,
    pub lie: Option<LieAlgebraPresentation>,
    pub density: VolumeDensity,
    pub paths: Vec<NamedPath>,
    pub compositions: Vec<CompositionSpec>,
    pub families: Vec<FamilySpec>,
    pub suites: Vec<Suite>,
    pub config: Config,
}

impl Scenario {
    pub fn path(&self, label: &str) -> Option<&NamedPath> {
        self.paths.iter().find(|p| p.label == label)
    }
}

fn err(field: impl AsRef<str>, msg: impl AsRef<str>) -> Error {
    Error::Manifest(format!("{}: {}", field.as_ref(), msg.as_ref()))
}

fn check_dim(field: &str, v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(err(
            field,
            format!("expected {dim} components, found {}", v.len()),
        ));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(err(field, "non-finite value"));
    }
    Ok(())
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(err(field, format!("must be positive, got {v}")));
    }
    Ok(())
}

fn tag(field: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Manifest(m) => Error::Manifest(m),
        other => err(field, other.to_string()),
    }
}

/// Parse a JSON array of polynomial terms in `dim` variables.
pub fn parse_poly_literal(dim: usize, text: &str) -> Result<Poly> {
    let terms: Vec<PolyTerm> =
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
    Poly::from_literal(dim, &terms)
}

/// Parse a JSON array of `{i, j, k, value}` structure constants for a
/// `dim`-dimensional Lie algebra.
pub fn parse_structure_constants(dim: usize, text: &str) -> Result<LieAlgebraPresentation> {
    let constants: Vec<StructureConstant> =
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
    lie_from_constants(dim, &constants)
}

fn lie_from_constants(
    dim: usize,
    constants: &[StructureConstant],
) -> Result<LieAlgebraPresentation> {
    for (n, c) in constants.iter().enumerate() {
        if c.i >= c.j {
            return Err(err(format!("constants[{n}]"), "requires i < j"));
        }
    }
    let triples: Vec<_> = constants.iter().map(|c| (c.i, c.j, c.k, c.value)).collect();
    LieAlgebraPresentation::new(dim, &triples)
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(format!("parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)?;
        Manifest::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Validate and construct the structure, density, and paths.
    pub fn build(&self) -> Result<Scenario> {
        let n = self.dim;
        if n == 0 {
            return Err(err("dim", "must be at least 1"));
        }
        self.validate_config()?;
        let (bivector, lie) = self.build_bivector()?;
        jacobi_gate(&bivector, self.config.seed)?;
        let density = match &self.density {
            None => VolumeDensity::unit(n),
            Some(d) => {
                VolumeDensity::new(Poly::from_literal(n, &d.log).map_err(tag("density.log"))?)
            }
        };
        let samples = self.config.samples;

        let mut tangents: HashMap<&str, TangentPath> = HashMap::new();
        for (k, t) in self.tangent_paths.iter().enumerate() {
            let field = format!("tangent_paths[{k}]");
            if tangents.contains_key(t.label.as_str()) {
                return Err(err(field, format!("duplicate label '{}'", t.label)));
            }
            let path = build_curve(&t.curve, n, samples, &format!("{field}.curve"))?;
            tangents.insert(&t.label, path);
        }

        let tau_cot = self.config.tolerances.cotangent;
        let mut paths: Vec<NamedPath> = Vec::new();
        for (k, p) in self.paths.iter().enumerate() {
            let field = format!("paths[{k}]");
            if paths.iter().any(|q| q.label == p.label) {
                return Err(err(&field, format!("duplicate label '{}'", p.label)));
            }
            let lookup = |label: &str, what: &str| {
                paths
                    .iter()
                    .find(|q| q.label == label)
                    .map(|q| &q.path)
                    .ok_or_else(|| {
                        err(
                            format!("{field}.cotangent.{what}"),
                            format!("unknown path '{label}'"),
                        )
                    })
            };
            let cfield = format!("{field}.cotangent");
            let (path, schedule) = match &p.cotangent {
                CotangentSpec::Lift { tangent } => {
                    let g = tangents.get(tangent.as_str()).ok_or_else(|| {
                        err(
                            format!("{cfield}.tangent"),
                            format!("unknown tangent path '{tangent}'"),
                        )
                    })?;
                    let lp = lift_min_norm(&bivector, g, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL)
                        .map_err(tag(&cfield))?;
                    (lp, None)
                }
                CotangentSpec::Stationary {
                    point,
                    duration,
                    terms,
                } => {
                    check_dim(&format!("{cfield}.point"), point, n)?;
                    check_positive(&format!("{cfield}.duration"), *duration)?;
                    if terms.is_empty() {
                        return Err(err(format!("{cfield}.terms"), "at least one term required"));
                    }
                    for (m, t) in terms.iter().enumerate() {
                        check_dim(&format!("{cfield}.terms[{m}].covector"), &t.covector, n)?;
                        if !t.frequency.is_finite() {
                            return Err(err(
                                format!("{cfield}.terms[{m}].frequency"),
                                "non-finite value",
                            ));
                        }
                    }
                    let schedule = CovectorSchedule {
                        duration: *duration,
                        terms: terms.clone(),
                    };
                    let s = schedule.clone();
                    let lp = CotangentPath::stationary(
                        &bivector,
                        point,
                        *duration,
                        samples,
                        tau_cot,
                        move |t| s.eval(t),
                    )
                    .map_err(tag(&cfield))?;
                    (lp, Some(schedule))
                }
                CotangentSpec::Concat { parts } => {
                    let Some((first, rest)) = parts.split_first() else {
                        return Err(err(format!("{cfield}.parts"), "at least one part required"));
                    };
                    let mut acc = lookup(first, "parts")?.clone();
                    for part in rest {
                        acc = acc
                            .concatenate(lookup(part, "parts")?)
                            .map_err(tag(&cfield))?;
                    }
                    (acc, None)
                }
                CotangentSpec::Reverse { path } => (lookup(path, "path")?.reversed(), None),
                CotangentSpec::Samples {
                    t0,
                    t1,
                    points,
                    covectors,
                    closed,
                } => {
                    if points.len() != covectors.len() {
                        return Err(err(
                            &cfield,
                            format!("{} points but {} covectors", points.len(), covectors.len()),
                        ));
                    }
                    let g = samples_curve(*t0, *t1, points, *closed, n, &cfield)?;
                    let alpha = covectors
                        .iter()
                        .enumerate()
                        .map(|(m, a)| {
                            check_dim(&format!("{cfield}.covectors[{m}]"), a, n)?;
                            Ok(DVector::from_column_slice(a))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (CotangentPath::new(g, alpha).map_err(tag(&cfield))?, None)
                }
            };
            if path.dim() != n {
                return Err(err(
                    &field,
                    format!("path dimension {} differs from dim {n}", path.dim()),
                ));
            }
            let residual =
                crate::paths::cotangent_residual(&bivector, &path).map_err(tag(&field))?;
            if residual > tau_cot {
                return Err(err(
                    &field,
                    format!(
                        "cotangent condition violated: residual {residual:.3e} > {tau_cot:.1e}"
                    ),
                ));
            }
            if p.is_loop && !path.is_loop() {
                return Err(err(
                    &field,
                    "declared a loop but gamma or alpha does not close",
                ));
            }
            paths.push(NamedPath {
                label: p.label.clone(),
                path,
                is_loop: p.is_loop,
                schedule,
            });
        }

        for (k, c) in self.compositions.iter().enumerate() {
            for (what, label) in [("first", &c.first), ("second", &c.second)] {
                if !paths.iter().any(|p| &p.label == label) {
                    return Err(err(
                        format!("compositions[{k}].{what}"),
                        format!("unknown path '{label}'"),
                    ));
                }
            }
        }
        for (k, f) in self.families.iter().enumerate() {
            let field = format!("families[{k}]");
            if f.members.len() < 2 {
                return Err(err(
                    format!("{field}.members"),
                    "at least two members required",
                ));
            }
            for label in &f.members {
                match paths.iter().find(|p| &p.label == label) {
                    None => {
                        return Err(err(
                            format!("{field}.members"),
                            format!("unknown path '{label}'"),
                        ))
                    }
                    Some(p) if !p.is_loop => {
                        return Err(err(
                            format!("{field}.members"),
                            format!("'{label}' is not a declared loop"),
                        ))
                    }
                    Some(_) => {}
                }
            }
            if f.mode == FamilyMode::Inn && lie.is_none() {
                return Err(err(
                    format!("{field}.mode"),
                    "inn mode needs a Lie–Poisson structure",
                ));
            }
        }

        let mut suites = self.suites.clone();
        suites.sort();
        suites.dedup();
        Ok(Scenario {
            name: self.name.clone(),
            bivector,
            lie,
            density,
            paths,
            compositions: self.compositions.clone(),
            families: self.families.clone(),
            suites,
            config: self.config.clone(),
        })
    }

    fn validate_config(&self) -> Result<()> {
        let c = &self.config;
        if c.steps == 0 {
            return Err(err("config.steps", "must be positive"));
        }
        if c.samples < crate::paths::MIN_SAMPLES {
            return Err(err(
                "config.samples",
                format!("must be at least {}", crate::paths::MIN_SAMPLES),
            ));
        }
        if let Some(s) = c.sigma {
            if s != 1.0 && s != -1.0 {
                return Err(err("config.sigma", "must be +1 or -1"));
            }
        }
        if c.convergence_base == 0 {
            return Err(err("config.convergence_base", "must be positive"));
        }
        if c.convergence_levels < 3 {
            return Err(err("config.convergence_levels", "must be at least 3"));
        }
        if c.oracle_partitions < 2 {
            return Err(err("config.oracle_partitions", "must be at least 2"));
        }
        for (name, v) in c.tolerances.named() {
            check_positive(&format!("config.tolerances.{name}"), v)?;
        }
        Ok(())
    }

    fn build_bivector(&self) -> Result<(BivectorField, Option<LieAlgebraPresentation>)> {
        let n = self.dim;
        match &self.bivector {
            BivectorSpec::Preset(name) => {
                let p = presets::by_name(name).map_err(tag("bivector.preset"))?;
                if p.bivector.dim() != n {
                    return Err(err(
                        "bivector.preset",
                        format!(
                            "preset '{name}' has dimension {}, manifest dim is {n}",
                            p.bivector.dim()
                        ),
                    ));
                }
                Ok((p.bivector, p.lie))
            }
            BivectorSpec::Entries(entries) => {
                let mut upper = Vec::with_capacity(entries.len());
                for (k, e) in entries.iter().enumerate() {
                    let field = format!("bivector.entries[{k}]");
                    if e.i >= e.j || e.j >= n {
                        return Err(err(
                            &field,
                            format!("need i < j < {n}, got ({}, {})", e.i, e.j),
                        ));
                    }
                    if upper.iter().any(|(i, j, _)| (*i, *j) == (e.i, e.j)) {
                        return Err(err(&field, format!("duplicate entry ({}, {})", e.i, e.j)));
                    }
                    let p =
                        Poly::from_literal(n, &e.terms).map_err(tag(&format!("{field}.terms")))?;
                    upper.push((e.i, e.j, p));
                }
                Ok((
                    BivectorField::from_upper(n, upper).map_err(tag("bivector.entries"))?,
                    None,
                ))
            }
            BivectorSpec::LieAlgebra(spec) => {
                let lie =
                    lie_from_constants(n, &spec.constants).map_err(tag("bivector.lie_algebra"))?;
                Ok((lie.bivector(), Some(lie)))
            }
        }
    }
}

/// Reject bivectors whose Jacobi defect exceeds the gate at a seeded probe point.
pub fn jacobi_gate(pi: &BivectorField, seed: u64) -> Result<()> {
    let n = pi.dim();
    let scale = pi.max_abs_coeff().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a09_e667);
    let mut probes = vec![vec![1.0; n]];
    probes.extend((0..JACOBI_PROBES).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()));
    for x in probes {
        let d = pi.jacobi_defect(&x)?;
        if !(d <= JACOBI_GATE_TOL * scale * scale) {
            return Err(err(
                "bivector",
                format!("Jacobi identity fails at probe point {x:?}: cyclic sum {d:.3e}"),
            ));
        }
    }
    Ok(())
}

fn samples_curve(
    t0: f64,
    t1: f64,
    points: &[Vec<f64>],
    closed: bool,
    n: usize,
    field: &str,
) -> Result<TangentPath> {
    let pts = points
        .iter()
        .enumerate()
        .map(|(m, p)| {
            check_dim(&format!("{field}.points[{m}]"), p, n)?;
            Ok(DVector::from_column_slice(p))
        })
        .collect::<Result<Vec<_>>>()?;
    TangentPath::from_samples(t0, t1, pts, closed).map_err(tag(field))
}

fn build_curve(spec: &CurveSpec, n: usize, samples: usize, field: &str) -> Result<TangentPath> {
    match spec {
        CurveSpec::Ellipse {
            center,
            u,
            v,
            duration,
        } => {
            check_dim(&format!("{field}.center"), center, n)?;
            check_dim(&format!("{field}.u"), u, n)?;
            check_dim(&format!("{field}.v"), v, n)?;
            check_positive(&format!("{field}.duration"), *duration)?;
            TangentPath::ellipse(center, u, v, *duration, samples).map_err(tag(field))
        }
        CurveSpec::Circle {
            center,
            radius,
            axes,
            duration,
        } => {
            check_dim(&format!("{field}.center"), center, n)?;
            check_positive(&format!("{field}.radius"), *radius)?;
            check_positive(&format!("{field}.duration"), *duration)?;
            if axes[0] >= n || axes[1] >= n || axes[0] == axes[1] {
                return Err(err(
                    format!("{field}.axes"),
                    format!("need two distinct axes below {n}"),
                ));
            }
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            u[axes[0]] = *radius;
            v[axes[1]] = *radius;
            TangentPath::ellipse(center, &u, &v, *duration, samples).map_err(tag(field))
        }
        CurveSpec::Segment { from, to, duration } => {
            check_dim(&format!("{field}.from"), from, n)?;
            check_dim(&format!("{field}.to"), to, n)?;
            check_positive(&format!("{field}.duration"), *duration)?;
            TangentPath::segment(from, to, *duration, samples).map_err(tag(field))
        }
        CurveSpec::Constant { point, duration } => {
            check_dim(&format!("{field}.point"), point, n)?;
            check_positive(&format!("{field}.duration"), *duration)?;
            TangentPath::constant(point, *duration, samples).map_err(tag(field))
        }
        CurveSpec::Samples {
            t0,
            t1,
            points,
            closed,
        } => samples_curve(*t0, *t1, points, *closed, n, field),
    }
}
