//! Executes the suites of a built [`Scenario`] and renders the reports.
//!
//! Rows are produced per path and suite in manifest order; work runs on the rayon
//! pool but nothing depends on completion order, so the CSV body is reproducible
//! for a fixed manifest and build.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conventions::{self_test_with_sigma, ConventionReport, PATH_INTEGRAL_SIGN};
use crate::error::Result;
use crate::geometry::{BivectorField, CovectorField, VolumeDensity, DEFAULT_RANK_TOL};
use crate::holonomy::{
    convergence_study, holonomy, holonomy_with_extension, normal_determinant, ConvergenceTable,
    ExtensionFamily, HolonomyConfig, HolonomyResult,
};
use crate::integrals::{line_integral, pairing_integral, CLOSED_TOL};
use crate::linalg::{kernel_projection, logm, max_abs_diff};
use crate::manifest::{FamilyMode, NamedPath, Scenario, Suite};
use crate::modular::{
    defining_property_residual, gauge_shift_check, modular_field, poisson_field_residual,
};
use crate::paths::{CotangentPath, PowerWarp};
use crate::poly::{random_poly, Poly};

/// Label used for rows that concern the structure rather than a path.
pub const STRUCTURE_LABEL: &str = "structure";
/// Relative size below which the isotropy bracket counts as zero.
const ISOTROPY_ABELIAN_TOL: f64 = 1e-9;
pub const CSV_HEADER: &str = "label,suite,metric,value,tolerance,pass";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    AtMost(f64),
    AtLeast(f64),
    /// Reported value without a pass criterion.
    Info,
}

impl Check {
    fn passes(self, v: f64) -> bool {
        match self {
            Check::AtMost(t) => v <= t,
            Check::AtLeast(t) => v >= t,
            Check::Info => true,
        }
    }

    fn render(self) -> String {
        match self {
            Check::AtMost(t) => format!("<={t:e}"),
            Check::AtLeast(t) => format!(">={t:e}"),
            Check::Info => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub suite: String,
    pub metric: String,
    pub value: f64,
    pub check: Check,
    pub pass: bool,
    /// Error message when the computation behind the row failed.
    pub error: Option<String>,
}

impl Row {
    fn new(label: &str, suite: &str, metric: &str, value: f64, check: Check) -> Row {
        Row {
            label: label.to_string(),
            suite: suite.to_string(),
            metric: metric.to_string(),
            value,
            check,
            pass: check.passes(value),
            error: None,
        }
    }

    fn failed(label: &str, suite: &str, metric: &str, error: String) -> Row {
        Row {
            label: label.to_string(),
            suite: suite.to_string(),
            metric: metric.to_string(),
            value: f64::NAN,
            check: Check::Info,
            pass: false,
            error: Some(error),
        }
    }

    fn csv(&self) -> String {
        let value = if self.value.is_nan() {
            "nan".to_string()
        } else {
            format!("{:.12e}", self.value)
        };
        format!(
            "{},{},{},{},{},{}",
            self.label,
            self.suite,
            self.metric,
            value,
            self.check.render(),
            if self.check == Check::Info && self.pass {
                "info"
            } else if self.pass {
                "true"
            } else {
                "false"
            }
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub seed: u64,
    pub sigma: f64,
    pub conventions: std::result::Result<ConventionReport, String>,
    pub rows: Vec<Row>,
    pub convergence: Vec<(String, ConvergenceTable)>,
    pub wall_time: Duration,
    pub started_unix: u64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.conventions.as_ref().is_ok_and(|c| c.passed()) && self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Column header plus one line per row; no timestamps.
    pub fn csv_body(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }

    pub fn csv(&self) -> String {
        format!(
            "# {} generated at unix time {}\n{}",
            self.name,
            self.started_unix,
            self.csv_body()
        )
    }

    pub fn conventions_text(&self) -> String {
        match &self.conventions {
            Ok(c) => format!("{c}\n"),
            Err(e) => format!(
                "sigma = {:+}\nconventions self-test failed: {e}\n",
                self.sigma
            ),
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.name);
        let _ = writeln!(s, "linhol {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "wall time: {:.3} s", self.wall_time.as_secs_f64());
        let _ = writeln!(s, "\n[conventions]\n{}", self.conventions_text().trim_end());
        let mut suites: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !suites.contains(&r.suite.as_str()) {
                suites.push(&r.suite);
            }
        }
        for suite in suites {
            let rows: Vec<&Row> = self.rows.iter().filter(|r| r.suite == suite).collect();
            let checked = rows
                .iter()
                .filter(|r| r.check != Check::Info || r.error.is_some())
                .count();
            let passed = rows
                .iter()
                .filter(|r| r.pass && (r.check != Check::Info || r.error.is_some()))
                .count();
            let _ = writeln!(s, "\n[{suite}] {passed}/{checked} checks passed");
            for r in rows {
                let status = match (&r.error, r.check, r.pass) {
                    (Some(_), _, _) => "ERROR",
                    (None, Check::Info, _) => "",
                    (None, _, true) => "ok",
                    (None, _, false) => "FAIL",
                };
                let _ = write!(
                    s,
                    "  {:<5} {:<24} {:<28} {:>14.6e}",
                    status, r.label, r.metric, r.value
                );
                if r.check != Check::Info {
                    let _ = write!(s, "  ({})", r.check.render());
                }
                if let Some(e) = &r.error {
                    let _ = write!(s, "  {e}");
                }
                s.push('\n');
            }
        }
        if !self.convergence.is_empty() {
            let _ = writeln!(s, "\n[convergence study]");
            for (label, t) in &self.convergence {
                let errs: Vec<String> = t
                    .steps
                    .iter()
                    .zip(&t.errors)
                    .map(|(n, e)| format!("{n}:{e:.2e}"))
                    .collect();
                let order = t.order.map_or("exact".to_string(), |p| format!("{p:.2}"));
                let _ = writeln!(s, "  {label:<24} order {order:<6} [{}]", errs.join(" "));
            }
        }
        let _ = writeln!(
            s,
            "\nresult: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }

    /// Write `report.txt`, `results.csv`, and `conventions.txt` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), self.summary())?;
        std::fs::write(dir.join("results.csv"), self.csv())?;
        std::fs::write(dir.join("conventions.txt"), self.conventions_text())?;
        Ok(())
    }
}

/// FNV-1a, used to derive per-label random streams independent of run order.
fn stream_seed(seed: u64, parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn rng_for(seed: u64, parts: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, parts))
}

struct Ctx<'a> {
    sc: &'a Scenario,
    sigma: f64,
    cfg: HolonomyConfig,
    holonomies: Vec<std::result::Result<HolonomyResult, String>>,
}

impl Ctx<'_> {
    fn signed_integral(
        &self,
        v: &crate::geometry::VectorField,
        alpha: &CotangentPath,
    ) -> Result<f64> {
        Ok(self.sigma * pairing_integral(v, alpha)?)
    }

    fn holonomy_of(&self, label: &str) -> std::result::Result<&HolonomyResult, String> {
        let k = self
            .sc
            .paths
            .iter()
            .position(|p| p.label == label)
            .expect("labels validated");
        self.holonomies[k].as_ref().map_err(|e| e.clone())
    }
}

/// Run every suite of the scenario.
pub fn run(sc: &Scenario) -> RunReport {
    let clock = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let sigma = sc.config.sigma.unwrap_or(PATH_INTEGRAL_SIGN);
    let tol = &sc.config.tolerances;
    let cfg = HolonomyConfig {
        steps_per_unit: sc.config.steps,
        tau_rank: DEFAULT_RANK_TOL,
        tau_cot: tol.cotangent,
        tau_drift: tol.drift,
    };

    let conventions = self_test_with_sigma(sigma).map_err(|e| e.to_string());
    let mut rows = conventions_rows(&conventions, sigma);

    let needs_holonomy = sc.suites.iter().any(|s| {
        matches!(
            s,
            Suite::Holonomy | Suite::TheoremMain | Suite::Oracles | Suite::Homotopy
        )
    });
    let holonomies = if needs_holonomy {
        sc.paths
            .par_iter()
            .map(|p| holonomy(&sc.bivector, &p.path, &cfg).map_err(|e| e.to_string()))
            .collect()
    } else {
        Vec::new()
    };
    let ctx = Ctx {
        sc,
        sigma,
        cfg,
        holonomies,
    };

    let mut convergence = Vec::new();
    for suite in &sc.suites {
        match suite {
            Suite::Holonomy => {
                let (r, c) = holonomy_suite(&ctx);
                rows.extend(r);
                convergence = c;
            }
            Suite::TheoremMain => rows.extend(theorem_suite(&ctx)),
            Suite::Modular => rows.extend(modular_suite(&ctx)),
            Suite::Integrals => rows.extend(integrals_suite(&ctx)),
            Suite::Oracles => rows.extend(oracles_suite(&ctx)),
            Suite::Homotopy => rows.extend(homotopy_suite(&ctx)),
        }
    }

    RunReport {
        name: sc.name.clone(),
        seed: sc.config.seed,
        sigma,
        conventions,
        rows,
        convergence,
        wall_time: clock.elapsed(),
        started_unix,
    }
}

fn conventions_rows(c: &std::result::Result<ConventionReport, String>, sigma: f64) -> Vec<Row> {
    const S: &str = "conventions";
    match c {
        Err(e) => vec![Row::failed(S, S, "self_test", e.clone())],
        Ok(c) => {
            let idx = |s: f64| if s > 0.0 { 0 } else { 1 };
            vec![
                Row::new(S, S, "sigma", sigma, Check::Info),
                Row::new(
                    S,
                    S,
                    "endpoint_residual_active_sigma",
                    c.sigma_residuals[idx(sigma)],
                    Check::AtMost(1e-7),
                ),
                Row::new(
                    S,
                    S,
                    "endpoint_residual_other_sigma",
                    c.sigma_residuals[idx(-sigma)],
                    Check::Info,
                ),
                Row::new(S, S, "coad_sign", c.coad_sign, Check::Info),
                Row::new(
                    S,
                    S,
                    "oracle_residual_active_coad",
                    c.coad_residuals[idx(c.coad_sign)],
                    Check::AtMost(1e-6),
                ),
                Row::new(
                    S,
                    S,
                    "oracle_residual_other_coad",
                    c.coad_residuals[idx(-c.coad_sign)],
                    Check::Info,
                ),
            ]
        }
    }
}

/// `kappa(t) = sin(2 pi (t - a) / (b - a))` times the kernel part of `w` at `gamma(t)`.
fn kernel_perturbation(
    pi: &BivectorField,
    alpha: &CotangentPath,
    w: DVector<f64>,
) -> crate::holonomy::Perturbation {
    let pi = pi.clone();
    let alpha = alpha.clone();
    let (a, b) = (alpha.start_time(), alpha.end_time());
    Arc::new(move |t| {
        let x = alpha.point_at(t);
        let m = pi.eval(x.as_slice()).expect("dimension checked");
        let s = (std::f64::consts::TAU * (t - a) / (b - a)).sin();
        kernel_projection(&m, &w, DEFAULT_RANK_TOL) * s
    })
}

/// `kappa(t) = sin(2 pi (t - a) / (b - a)) * a0` for a path whose covector is the
/// constant `a0`. It commutes with the path's own covector in the isotropy algebra.
fn commuting_perturbation(alpha: &CotangentPath, a0: Vec<f64>) -> crate::holonomy::Perturbation {
    let (a, b) = (alpha.start_time(), alpha.end_time());
    let a0 = DVector::from_vec(a0);
    Arc::new(move |t| &a0 * (std::f64::consts::TAU * (t - a) / (b - a)).sin())
}

/// Largest isotropy bracket over the samples of the base curve.
fn isotropy_defect_along(pi: &BivectorField, alpha: &CotangentPath) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for seg in alpha.segments() {
        for x in seg.base().points() {
            worst = worst.max(pi.isotropy_defect(x.as_slice(), DEFAULT_RANK_TOL)?);
        }
    }
    Ok(worst)
}

/// Extension-independence rows. Generic kernel perturbations leave `H` unchanged
/// where the isotropy algebra along the path is abelian. At points with
/// non-abelian isotropy they only move `H` inside its inner coset, so there the
/// exact check uses a perturbation commuting with the path's covector and the
/// generic one is checked modulo Inn.
fn extension_rows(ctx: &Ctx, p: &NamedPath, h: &HolonomyResult) -> Vec<Row> {
    const S: &str = "holonomy";
    let sc = ctx.sc;
    let tol = &sc.config.tolerances;
    let l = p.label.as_str();
    let perturbed = |kappa| {
        holonomy_with_extension(
            &sc.bivector,
            &p.path,
            &ExtensionFamily::Perturbed(kappa),
            &ctx.cfg,
        )
        .map(|h1| h1.normal_map)
        .map_err(|e| e.to_string())
    };
    let defect = match isotropy_defect_along(&sc.bivector, &p.path) {
        Ok(d) => d,
        Err(e) => return vec![Row::failed(l, S, "isotropy_defect", e.to_string())],
    };
    let mut rows = vec![Row::new(l, S, "isotropy_defect", defect, Check::Info)];
    let mut rng = rng_for(sc.config.seed, &[S, l]);
    let w = DVector::from_fn(sc.bivector.dim(), |_, _| rng.gen_range(-1.0..1.0));
    let generic = perturbed(kernel_perturbation(&sc.bivector, &p.path, w));
    if defect <= ISOTROPY_ABELIAN_TOL * (1.0 + sc.bivector.max_abs_coeff()) {
        rows.push(match generic {
            Ok(m) => Row::new(
                l,
                S,
                "extension_independence",
                max_abs_diff(&h.normal_map, &m),
                Check::AtMost(tol.extension),
            ),
            Err(e) => Row::failed(l, S, "extension_independence", e),
        });
        return rows;
    }
    if let Some(a0) = p
        .schedule
        .as_ref()
        .filter(|s| s.is_constant())
        .map(|s| s.eval(0.0))
    {
        rows.push(match perturbed(commuting_perturbation(&p.path, a0)) {
            Ok(m) => Row::new(
                l,
                S,
                "extension_independence",
                max_abs_diff(&h.normal_map, &m),
                Check::AtMost(tol.extension),
            ),
            Err(e) => Row::failed(l, S, "extension_independence", e),
        });
    }
    match generic {
        Ok(m) => {
            rows.push(Row::new(
                l,
                S,
                "extension_noncommuting_difference",
                max_abs_diff(&h.normal_map, &m),
                Check::Info,
            ));
            if let Some(lie) = sc.lie.as_ref().filter(|_| h.codim() == sc.bivector.dim()) {
                match inn_residual(lie, &h.normal_map, &m) {
                    Some(r) => rows.push(Row::new(
                        l,
                        S,
                        "extension_inn_residual",
                        r,
                        Check::AtMost(tol.inn),
                    )),
                    None => rows.push(Row::new(
                        l,
                        S,
                        "extension_inn_inconclusive",
                        1.0,
                        Check::Info,
                    )),
                }
            }
        }
        Err(e) => rows.push(Row::failed(l, S, "extension_noncommuting_difference", e)),
    }
    rows
}

fn holonomy_suite(ctx: &Ctx) -> (Vec<Row>, Vec<(String, ConvergenceTable)>) {
    const S: &str = "holonomy";
    let sc = ctx.sc;
    let tol = &sc.config.tolerances;
    let per_path: Vec<(Vec<Row>, Option<ConvergenceTable>)> = sc
        .paths
        .par_iter()
        .zip(&ctx.holonomies)
        .map(|(p, h)| {
            let l = p.label.as_str();
            let mut rows = Vec::new();
            let h = match h {
                Ok(h) => h,
                Err(e) => return (vec![Row::failed(l, S, "holonomy", e.clone())], None),
            };
            rows.push(Row::new(l, S, "steps", h.steps as f64, Check::Info));
            rows.push(Row::new(l, S, "codim", h.codim() as f64, Check::Info));
            rows.push(Row::new(
                l,
                S,
                "det_h",
                normal_determinant(h, &sc.density),
                Check::Info,
            ));
            rows.push(Row::new(l, S, "drift", h.drift, Check::AtMost(tol.drift)));
            rows.push(Row::new(
                l,
                S,
                "leaf_residual",
                h.leaf_residual,
                Check::AtMost(tol.leaf),
            ));

            rows.extend(extension_rows(ctx, p, h));

            let warp = PowerWarp {
                from: (p.path.start_time(), p.path.end_time()),
                to: (p.path.start_time(), p.path.end_time()),
                power: 2.0,
            };
            let reparam = p
                .path
                .reparameterize(&warp)
                .and_then(|q| holonomy(&sc.bivector, &q, &ctx.cfg));
            rows.push(match reparam {
                Ok(h1) => Row::new(
                    l,
                    S,
                    "reparameterization",
                    max_abs_diff(&h.normal_map, &h1.normal_map),
                    Check::AtMost(tol.reparameterization),
                ),
                Err(e) => Row::failed(l, S, "reparameterization", e.to_string()),
            });

            let there_and_back = p
                .path
                .concatenate(&p.path.reversed())
                .and_then(|q| holonomy(&sc.bivector, &q, &ctx.cfg));
            rows.push(match there_and_back {
                Ok(h1) => {
                    let q = h1.codim();
                    Row::new(
                        l,
                        S,
                        "reversal_composition",
                        max_abs_diff(&h1.normal_map, &DMatrix::identity(q, q)),
                        Check::AtMost(tol.composition),
                    )
                }
                Err(e) => Row::failed(l, S, "reversal_composition", e.to_string()),
            });

            let study = convergence_study(
                &sc.bivector,
                &p.path,
                sc.config.convergence_base,
                sc.config.convergence_levels,
                &ctx.cfg,
            );
            let table = match study {
                Ok(t) => {
                    rows.push(Row::new(
                        l,
                        S,
                        "convergence_order",
                        t.order.unwrap_or(f64::INFINITY),
                        Check::AtLeast(tol.min_order),
                    ));
                    Some(t)
                }
                Err(e) => {
                    rows.push(Row::failed(l, S, "convergence_order", e.to_string()));
                    None
                }
            };
            (rows, table)
        })
        .collect();

    let mut rows = Vec::new();
    let mut tables = Vec::new();
    for (p, (r, t)) in sc.paths.iter().zip(per_path) {
        rows.extend(r);
        if let Some(t) = t {
            tables.push((p.label.clone(), t));
        }
    }

    let comps: Vec<Row> = sc
        .compositions
        .par_iter()
        .map(|c| {
            let label = format!("{}*{}", c.first, c.second);
            let first = &sc.path(&c.first).expect("validated").path;
            let second = &sc.path(&c.second).expect("validated").path;
            match crate::holonomy::composition_check(&sc.bivector, first, second, &ctx.cfg) {
                Ok(v) => Row::new(&label, S, "composition", v, Check::AtMost(tol.composition)),
                Err(e) => Row::failed(&label, S, "composition", e.to_string()),
            }
        })
        .collect();
    rows.extend(comps);
    (rows, tables)
}

fn theorem_suite(ctx: &Ctx) -> Vec<Row> {
    const S: &str = "theorem-main";
    let sc = ctx.sc;
    let v = modular_field(&sc.bivector, &sc.density).field;
    let mut rows = Vec::new();
    for (p, h) in sc.paths.iter().zip(&ctx.holonomies) {
        if !p.is_loop {
            continue;
        }
        let l = p.label.as_str();
        let h = match h {
            Ok(h) => h,
            Err(e) => {
                rows.push(Row::failed(l, S, "identity_residual", e.clone()));
                continue;
            }
        };
        let det = normal_determinant(h, &sc.density);
        match ctx.signed_integral(&v, &p.path) {
            Ok(integral) => {
                let residual = if det > 0.0 {
                    (det.ln() - ctx.sigma * integral).abs()
                } else {
                    f64::INFINITY
                };
                rows.push(Row::new(l, S, "det_h", det, Check::Info));
                rows.push(Row::new(l, S, "log_det_h", det.ln(), Check::Info));
                rows.push(Row::new(l, S, "integral_modular", integral, Check::Info));
                rows.push(Row::new(
                    l,
                    S,
                    "identity_residual",
                    residual,
                    Check::AtMost(sc.config.tolerances.theorem),
                ));
            }
            Err(e) => rows.push(Row::failed(l, S, "identity_residual", e.to_string())),
        }
    }
    rows
}

fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect()
}

fn modular_suite(ctx: &Ctx) -> Vec<Row> {
    const S: &str = "modular";
    let sc = ctx.sc;
    let tol = &sc.config.tolerances;
    let (pi, rho) = (&sc.bivector, &sc.density);
    let n = pi.dim();
    let v = modular_field(pi, rho).field;
    let mut rng = rng_for(sc.config.seed, &[S]);
    let l = STRUCTURE_LABEL;
    let mut rows = Vec::new();

    let mut defining: f64 = 0.0;
    let mut poisson: f64 = 0.0;
    let mut failure = None;
    for _ in 0..sc.config.probes {
        let f = random_poly(n, 3, 8, &mut rng);
        let x = random_point(n, &mut rng);
        match (
            defining_property_residual(pi, rho, &v, &f, &x),
            poisson_field_residual(pi, &v, &x),
        ) {
            (Ok(d), Ok(p)) => {
                defining = defining.max(d);
                poisson = poisson.max(p);
            }
            (Err(e), _) | (_, Err(e)) => failure = Some(e.to_string()),
        }
    }
    if let Some(e) = failure {
        rows.push(Row::failed(l, S, "probes", e));
    }
    rows.push(Row::new(
        l,
        S,
        "modular_field_max_coeff",
        v.max_abs_coeff(),
        Check::Info,
    ));
    rows.push(Row::new(
        l,
        S,
        "defining_property",
        defining,
        Check::AtMost(tol.defining_property),
    ));
    rows.push(Row::new(
        l,
        S,
        "poisson_residual",
        poisson,
        Check::AtMost(tol.poisson),
    ));

    let gauges: Vec<Poly> = (0..5).map(|_| random_poly(n, 2, 6, &mut rng)).collect();
    let gauge = gauges
        .iter()
        .map(|g| gauge_shift_check(pi, rho, g))
        .fold(0.0, f64::max);
    rows.push(Row::new(l, S, "gauge_law", gauge, Check::AtMost(tol.gauge)));

    if let Some(lie) = &sc.lie {
        let chi = lie.modular_character();
        let x = random_point(n, &mut rng);
        let unit = modular_field(pi, &VolumeDensity::unit(n)).field;
        rows.push(Row::new(l, S, "character_norm", chi.amax(), Check::Info));
        rows.push(Row::new(
            l,
            S,
            "character_agreement",
            (unit.eval(&x) - chi).amax(),
            Check::AtMost(tol.defining_property),
        ));
    }

    let shifted = modular_field(pi, &rho.rescaled(&gauges[0])).field;
    for p in sc.paths.iter().filter(|p| p.is_loop) {
        let row = ctx
            .signed_integral(&v, &p.path)
            .and_then(|a| Ok((a - ctx.signed_integral(&shifted, &p.path)?).abs()));
        rows.push(match row {
            Ok(d) => Row::new(
                &p.label,
                S,
                "loop_gauge_invariance",
                d,
                Check::AtMost(tol.gauge_loop),
            ),
            Err(e) => Row::failed(&p.label, S, "loop_gauge_invariance", e.to_string()),
        });
    }
    rows
}

fn integrals_suite(ctx: &Ctx) -> Vec<Row> {
    const S: &str = "integrals";
    let sc = ctx.sc;
    let tol = &sc.config.tolerances;
    let pi = &sc.bivector;
    let n = pi.dim();
    let per_path: Vec<Vec<Row>> = sc
        .paths
        .par_iter()
        .map(|p| {
            let l = p.label.as_str();
            let mut rng = rng_for(sc.config.seed, &[S, l]);
            let mut rows = Vec::new();
            let (xa, xb) = (
                p.path.start_point().as_slice(),
                p.path.end_point().as_slice(),
            );
            let mut endpoint: f64 = 0.0;
            let mut loop_max: f64 = 0.0;
            let mut pullback: f64 = 0.0;
            let mut failure = None;
            for _ in 0..sc.config.random_functions {
                let f = random_poly(n, 3, 8, &mut rng);
                let xf = pi.hamiltonian(&f);
                match ctx.signed_integral(&xf, &p.path) {
                    Ok(i) => {
                        endpoint = endpoint.max((i - (f.eval(xb) - f.eval(xa))).abs());
                        loop_max = loop_max.max(i.abs());
                    }
                    Err(e) => failure = Some(e.to_string()),
                }
                // Closed one-form dg + c.
                let g = random_poly(n, 3, 6, &mut rng);
                let c = CovectorField::constant(&random_point(n, &mut rng));
                let beta = CovectorField::new(
                    CovectorField::differential(&g)
                        .components()
                        .iter()
                        .zip(c.components())
                        .map(|(a, b)| a + b)
                        .collect(),
                )
                .expect("same dimension");
                debug_assert!(beta.closedness_defect() <= CLOSED_TOL);
                let lhs = ctx.signed_integral(&pi.sharp_field(&beta), &p.path);
                let rhs: Result<f64> = p
                    .path
                    .segments()
                    .iter()
                    .map(|s| line_integral(&beta, s.base()))
                    .sum();
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) => pullback = pullback.max((a - b).abs()),
                    (Err(e), _) | (_, Err(e)) => failure = Some(e.to_string()),
                }
            }
            if let Some(e) = failure {
                rows.push(Row::failed(l, S, "integrals", e));
            }
            rows.push(Row::new(
                l,
                S,
                "hamiltonian_endpoint",
                endpoint,
                Check::AtMost(tol.endpoint),
            ));
            if p.is_loop {
                rows.push(Row::new(
                    l,
                    S,
                    "hamiltonian_loop",
                    loop_max,
                    Check::AtMost(tol.hamiltonian_loop),
                ));
            }
            rows.push(Row::new(
                l,
                S,
                "pullback_identity",
                pullback,
                Check::AtMost(tol.pullback),
            ));
            rows
        })
        .collect();
    per_path.into_iter().flatten().collect()
}

fn at_origin(p: &NamedPath) -> bool {
    p.path.start_point().iter().all(|&x| x == 0.0) && p.schedule.is_some()
}

fn oracles_suite(ctx: &Ctx) -> Vec<Row> {
    const S: &str = "oracles";
    let sc = ctx.sc;
    let tol = &sc.config.tolerances;
    let Some(lie) = &sc.lie else {
        return vec![Row::new(
            STRUCTURE_LABEL,
            S,
            "not_lie_poisson",
            1.0,
            Check::Info,
        )];
    };
    let chi = lie.modular_character();
    let unimodular = lie.is_unimodular();
    let mut rows = vec![Row::new(
        STRUCTURE_LABEL,
        S,
        "character_norm",
        chi.amax(),
        Check::Info,
    )];

    let checks: Vec<Vec<Row>> = sc
        .paths
        .par_iter()
        .zip(&ctx.holonomies)
        .map(|(p, h)| {
            let l = p.label.as_str();
            let mut rows = Vec::new();
            let h = match h {
                Ok(h) => h,
                Err(e) => return vec![Row::failed(l, S, "oracle", e.clone())],
            };
            if at_origin(p) {
                let sched = p.schedule.as_ref().expect("checked by at_origin");
                let (metric, oracle, t) = if sched.is_constant() {
                    (
                        "constant_loop_oracle",
                        lie.constant_loop_oracle(&sched.eval(0.0), sched.duration),
                        tol.oracle,
                    )
                } else {
                    (
                        "time_ordered_oracle",
                        lie.time_ordered_oracle(
                            |t| sched.eval(t),
                            sched.duration,
                            sc.config.oracle_partitions,
                        ),
                        tol.time_ordered,
                    )
                };
                rows.push(Row::new(
                    l,
                    S,
                    metric,
                    max_abs_diff(&h.normal_map, &oracle),
                    Check::AtMost(t),
                ));
            }
            if p.is_loop && unimodular {
                let det = normal_determinant(h, &sc.density);
                rows.push(Row::new(
                    l,
                    S,
                    "unimodular_det",
                    (det - 1.0).abs(),
                    Check::AtMost(tol.determinant),
                ));
            }
            rows
        })
        .collect();
    rows.extend(checks.into_iter().flatten());

    if !unimodular {
        let witness = sc
            .paths
            .iter()
            .zip(&ctx.holonomies)
            .filter(|(p, _)| p.is_loop)
            .filter_map(|(_, h)| h.as_ref().ok())
            .map(|h| (normal_determinant(h, &sc.density) - 1.0).abs())
            .fold(0.0, f64::max);
        rows.push(Row::new(
            STRUCTURE_LABEL,
            S,
            "nonunimodular_det_witness",
            witness,
            Check::AtLeast(0.5),
        ));
    }
    rows
}

/// Frobenius residual of the principal log of `h2 h1^{-1}` against the inner span,
/// or `None` when the logarithm is not available.
fn inn_residual(
    lie: &crate::lie::LieAlgebraPresentation,
    h1: &DMatrix<f64>,
    h2: &DMatrix<f64>,
) -> Option<f64> {
    let inv = h1.clone().try_inverse()?;
    let log = logm(&(h2 * inv)).ok()?;
    Some(lie.inn_span().residual(&log))
}

fn homotopy_suite(ctx: &Ctx) -> Vec<Row> {
    const S: &str = "homotopy";
    let sc = ctx.sc;
    let tol = &sc.config.tolerances;
    let mut rows = Vec::new();
    for fam in &sc.families {
        let l = fam.label.as_str();
        let hs: std::result::Result<Vec<&HolonomyResult>, String> =
            fam.members.iter().map(|m| ctx.holonomy_of(m)).collect();
        let hs = match hs {
            Ok(hs) => hs,
            Err(e) => {
                rows.push(Row::failed(l, S, "family", e));
                continue;
            }
        };
        let mut spread: f64 = 0.0;
        let mut inn_max: f64 = 0.0;
        let mut inconclusive = 0usize;
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                spread = spread.max(max_abs_diff(&hs[i].normal_map, &hs[j].normal_map));
                if fam.mode == FamilyMode::Inn {
                    let lie = sc.lie.as_ref().expect("validated");
                    match inn_residual(lie, &hs[i].normal_map, &hs[j].normal_map) {
                        Some(r) => inn_max = inn_max.max(r),
                        None => inconclusive += 1,
                    }
                }
            }
        }
        match fam.mode {
            FamilyMode::Exact => rows.push(Row::new(
                l,
                S,
                "max_pairwise_difference",
                spread,
                Check::AtMost(tol.homotopy),
            )),
            FamilyMode::Inn => {
                rows.push(Row::new(
                    l,
                    S,
                    "max_pairwise_difference",
                    spread,
                    Check::Info,
                ));
                rows.push(Row::new(
                    l,
                    S,
                    "inn_coset_residual",
                    inn_max,
                    Check::AtMost(tol.inn),
                ));
                rows.push(Row::new(
                    l,
                    S,
                    "inn_inconclusive_pairs",
                    inconclusive as f64,
                    Check::Info,
                ));
            }
        }
        if let Some(m) = fam.min_spread {
            rows.push(Row::new(
                l,
                S,
                "non_invariance_spread",
                spread,
                Check::AtLeast(m),
            ));
        }
    }
    rows
}
