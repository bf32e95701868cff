//! Global sign conventions and the self-tests that pin them.
//!
//! Two signs are not fixed by the definitions alone:
//!
//! * `PATH_INTEGRAL_SIGN`: the sign `sigma` in
//!   `int_alpha v = sigma * int alpha(v(gamma)) dt`. It is the one for which
//!   `int_alpha X_f = f(gamma(b)) - f(gamma(a))`. With the sharp convention of
//!   [`crate::geometry`] the pairing `alpha(X_f) = -df(sharp(alpha)) = -d/dt f(gamma)`,
//!   so `sigma = -1`.
//! * `COAD_SIGN`: the coadjoint generator is `COAD_SIGN * ad^T`, chosen so that the
//!   linearized flow of a constant loop `a` over the origin of `g*` is
//!   `exp(T coad(a))`. The variational equation there is `Phi' = ad_a^T Phi`, so the
//!   sign is `+1`.
//!
//! [`self_test`] re-derives both numerically on `aff(1)*` and reports whether the
//! compiled constants agree.

use std::fmt;

use crate::error::Result;
use crate::geometry::DEFAULT_RANK_TOL;
use crate::holonomy::{holonomy, HolonomyConfig};
use crate::integrals::endpoint_residual_with_sign;
use crate::linalg::{expm, max_abs_diff};
use crate::paths::{lift_min_norm, CotangentPath, TangentPath, DEFAULT_LIFT_TOL, DEFAULT_SAMPLES};
use crate::poly::Poly;
use crate::presets;

pub const PATH_INTEGRAL_SIGN: f64 = -1.0;
pub const COAD_SIGN: f64 = 1.0;

/// Tolerances used by the arbiters.
const SIGMA_TOL: f64 = 1e-7;
const COAD_TOL: f64 = 1e-6;

/// Outcome of the convention arbiters.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionReport {
    /// Sign used for path integrals in this run (the compiled constant unless
    /// overridden).
    pub sigma: f64,
    /// Endpoint residuals of the Hamiltonian identity for `sigma = +1` and `-1`.
    pub sigma_residuals: [f64; 2],
    /// Sign the endpoint arbiter selects, if exactly one candidate passes.
    pub sigma_selected: Option<f64>,
    pub coad_sign: f64,
    /// `max |Phi - exp(s ad^T)|` for `s = +1` and `-1`.
    pub coad_residuals: [f64; 2],
    pub coad_selected: Option<f64>,
}

impl ConventionReport {
    pub fn sigma_ok(&self) -> bool {
        self.sigma_selected == Some(self.sigma)
    }

    pub fn coad_ok(&self) -> bool {
        self.coad_selected == Some(self.coad_sign)
    }

    pub fn passed(&self) -> bool {
        self.sigma_ok() && self.coad_ok()
    }
}

impl fmt::Display for ConventionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sharp: (sharp a)^j = sum_i Pi^ij a_i")?;
        writeln!(f, "sigma = {:+}", self.sigma)?;
        writeln!(
            f,
            "  endpoint residual: sigma=+1 -> {:.3e}, sigma=-1 -> {:.3e}; selected {}",
            self.sigma_residuals[0],
            self.sigma_residuals[1],
            fmt_sign(self.sigma_selected)
        )?;
        writeln!(
            f,
            "coad sign = {:+} (coad(xi) = sign * ad(xi)^T)",
            self.coad_sign
        )?;
        writeln!(
            f,
            "  oracle residual: +ad^T -> {:.3e}, -ad^T -> {:.3e}; selected {}",
            self.coad_residuals[0],
            self.coad_residuals[1],
            fmt_sign(self.coad_selected)
        )?;
        write!(
            f,
            "status: {}",
            if self.passed() { "ok" } else { "MISMATCH" }
        )
    }
}

fn fmt_sign(s: Option<f64>) -> String {
    match s {
        Some(s) => format!("{s:+}"),
        None => "none".to_string(),
    }
}

fn select(residuals: [f64; 2], tol: f64) -> Option<f64> {
    match (residuals[0] <= tol, residuals[1] <= tol) {
        (true, false) => Some(1.0),
        (false, true) => Some(-1.0),
        _ => None,
    }
}

/// Run both arbiters with the compiled constants.
pub fn self_test() -> Result<ConventionReport> {
    self_test_with_sigma(PATH_INTEGRAL_SIGN)
}

/// Run both arbiters, reporting `sigma` as the sign in use.
pub fn self_test_with_sigma(sigma: f64) -> Result<ConventionReport> {
    let lie = presets::aff1();
    let aff = lie.bivector();

    // Segment from (0, 1) to (1, 2) in the upper half-plane leaf, f = x2.
    let g = TangentPath::segment(&[0.0, 1.0], &[1.0, 2.0], 1.0, DEFAULT_SAMPLES)?;
    let lp = lift_min_norm(&aff, &g, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL)?;
    let f = Poly::var(2, 1);
    let sigma_residuals = [
        endpoint_residual_with_sign(&aff, &f, &lp, 1.0)?,
        endpoint_residual_with_sign(&aff, &f, &lp, -1.0)?,
    ];

    // Constant loop a = e1 at the origin.
    let a = [1.0, 0.0];
    let lp = CotangentPath::constant_loop(&aff, &[0.0, 0.0], &a, 1.0, 33, 1e-12)?;
    let phi = holonomy(&aff, &lp, &HolonomyConfig::default())?.phi;
    let adt = lie.ad_matrix(&a).transpose();
    let coad_residuals = [
        max_abs_diff(&phi, &expm(&adt)),
        max_abs_diff(&phi, &expm(&-adt)),
    ];

    Ok(ConventionReport {
        sigma,
        sigma_residuals,
        sigma_selected: select(sigma_residuals, SIGMA_TOL),
        coad_sign: COAD_SIGN,
        coad_residuals,
        coad_selected: select(coad_residuals, COAD_TOL),
    })
}
