//! Integrals of vector fields and one-forms along cotangent paths.
//!
//! `path_integral(v, alpha) = sigma * int alpha_{gamma(t)}(v(gamma(t))) dt` with the
//! crate-wide sign [`PATH_INTEGRAL_SIGN`]. Quadrature is composite Simpson on each
//! segment's sample grid.

use nalgebra::DVector;

use crate::conventions::PATH_INTEGRAL_SIGN;
use crate::error::{Error, Result};
use crate::geometry::{BivectorField, CovectorField, VectorField};
use crate::paths::{CotangentPath, TangentPath};
use crate::poly::Poly;

/// Closedness tolerance on polynomial coefficients of `d beta`.
pub const CLOSED_TOL: f64 = 1e-12;

/// Composite Simpson on uniformly spaced samples. An odd number of intervals uses
/// the 3/8 rule on the last three; a single interval falls back to the trapezoid.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len().saturating_sub(1);
    match m {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let (even, tail) = if m.is_multiple_of(2) {
                (m, 0)
            } else {
                (m - 3, 3)
            };
            let mut s = 0.0;
            for k in (0..even).step_by(2) {
                s += values[k] + 4.0 * values[k + 1] + values[k + 2];
            }
            let mut total = s * h / 3.0;
            if tail == 3 {
                let v = &values[even..];
                total += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}

/// `int alpha(v(gamma)) dt` without the sign convention.
pub fn pairing_integral(v: &VectorField, alpha: &CotangentPath) -> Result<f64> {
    if v.dim() != alpha.dim() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            found: v.dim(),
        });
    }
    Ok(alpha
        .segments()
        .iter()
        .map(|seg| {
            let base = seg.base();
            let integrand: Vec<f64> = base
                .points()
                .iter()
                .zip(seg.covectors())
                .map(|(x, a)| a.dot(&v.eval(x.as_slice())))
                .collect();
            simpson(&integrand, base.step())
        })
        .sum())
}

pub fn path_integral(v: &VectorField, alpha: &CotangentPath) -> Result<f64> {
    Ok(PATH_INTEGRAL_SIGN * pairing_integral(v, alpha)?)
}

/// `int_gamma beta = int beta(gamma(t)) gamma'(t) dt`.
pub fn line_integral(beta: &CovectorField, gamma: &TangentPath) -> Result<f64> {
    if beta.dim() != gamma.dim() {
        return Err(Error::DimensionMismatch {
            expected: gamma.dim(),
            found: beta.dim(),
        });
    }
    let integrand: Vec<f64> = gamma
        .points()
        .iter()
        .zip(gamma.velocities())
        .map(|(x, dx)| beta.eval(x.as_slice()).dot(dx))
        .collect();
    Ok(simpson(&integrand, gamma.step()))
}

fn path_line_integral(beta: &CovectorField, alpha: &CotangentPath) -> Result<f64> {
    alpha
        .segments()
        .iter()
        .map(|seg| line_integral(beta, seg.base()))
        .sum()
}

/// `|int_alpha sharp(beta) - int_gamma beta|` for a closed one-form `beta`.
pub fn pullback_identity_residual(
    pi: &BivectorField,
    beta: &CovectorField,
    alpha: &CotangentPath,
) -> Result<f64> {
    let defect = beta.closedness_defect();
    if defect > CLOSED_TOL {
        return Err(Error::NotClosed { defect });
    }
    let lhs = path_integral(&pi.sharp_field(beta), alpha)?;
    Ok((lhs - path_line_integral(beta, alpha)?).abs())
}

/// `|int_alpha X_f - (f(gamma(b)) - f(gamma(a)))|` under the sign `sign`.
pub fn endpoint_residual_with_sign(
    pi: &BivectorField,
    f: &Poly,
    alpha: &CotangentPath,
    sign: f64,
) -> Result<f64> {
    let raw = pairing_integral(&pi.hamiltonian(f), alpha)?;
    let jump = f.eval(alpha.end_point().as_slice()) - f.eval(alpha.start_point().as_slice());
    Ok((sign * raw - jump).abs())
}

pub fn hamiltonian_endpoint_residual(
    pi: &BivectorField,
    f: &Poly,
    alpha: &CotangentPath,
) -> Result<f64> {
    endpoint_residual_with_sign(pi, f, alpha, PATH_INTEGRAL_SIGN)
}

/// Covector field with constant components.
pub fn constant_covector(a: &DVector<f64>) -> CovectorField {
    CovectorField::constant(a.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_RANK_TOL;
    use crate::paths::{lift_min_norm, DEFAULT_LIFT_TOL, DEFAULT_SAMPLES};
    use crate::presets;

    fn lift(pi: &BivectorField, g: &TangentPath) -> CotangentPath {
        lift_min_norm(pi, g, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL).unwrap()
    }

    #[test]
    fn simpson_rules() {
        let cubic = |t: f64| t * t * t - 2.0 * t + 1.0;
        let exact = 0.25 - 1.0 + 1.0;
        for m in [2usize, 3, 5, 8, 9] {
            let h = 1.0 / m as f64;
            let v: Vec<f64> = (0..=m).map(|k| cubic(k as f64 * h)).collect();
            assert!((simpson(&v, h) - exact).abs() < 1e-14, "m = {m}");
        }
        assert_eq!(simpson(&[1.0, 3.0], 0.5), 1.0);
        assert_eq!(simpson(&[4.0], 0.5), 0.0);
    }

    #[test]
    fn zero_field_and_orthogonal_integrand() {
        let aff = presets::aff1().bivector();
        let lp =
            CotangentPath::constant_loop(&aff, &[0.0, 0.0], &[1.0, 0.0], 1.0, 33, 1e-7).unwrap();
        assert_eq!(path_integral(&VectorField::zero(2), &lp).unwrap(), 0.0);
        let x2 = VectorField::new(vec![Poly::zero(2), Poly::constant(2, 1.0)]).unwrap();
        assert_eq!(path_integral(&x2, &lp).unwrap(), 0.0);
    }

    #[test]
    fn endpoint_identity_on_aff1() {
        let aff = presets::aff1().bivector();
        let g = TangentPath::segment(&[0.0, 1.0], &[1.0, 2.0], 1.0, DEFAULT_SAMPLES).unwrap();
        let lp = lift(&aff, &g);
        let f = Poly::var(2, 1);
        assert!(hamiltonian_endpoint_residual(&aff, &f, &lp).unwrap() <= 1e-7);
        // The other sign misses by twice the jump.
        let wrong = endpoint_residual_with_sign(&aff, &f, &lp, -PATH_INTEGRAL_SIGN).unwrap();
        assert!((wrong - 2.0).abs() < 1e-6);
    }

    #[test]
    fn casimir_integrates_to_zero() {
        let so3 = presets::so3().bivector();
        let g = TangentPath::ellipse(
            &[0.0, 0.0, 0.6],
            &[0.8, 0.0, 0.0],
            &[0.0, 0.8, 0.0],
            1.0,
            DEFAULT_SAMPLES,
        )
        .unwrap();
        let lp = lift(&so3, &g);
        let x = |i| Poly::var(3, i);
        let casimir = &(&(&x(0) * &x(0)) + &(&x(1) * &x(1))) + &(&x(2) * &x(2));
        assert!(so3.hamiltonian(&casimir).max_abs_coeff() == 0.0);
        assert!(hamiltonian_endpoint_residual(&so3, &casimir, &lp).unwrap() <= 1e-12);
    }

    #[test]
    fn pullback_identity() {
        let sym = presets::symplectic_r2();
        let g = TangentPath::ellipse(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], 1.0, DEFAULT_SAMPLES)
            .unwrap();
        let lp = lift(&sym, &g);
        let dx1 = CovectorField::constant(&[1.0, 0.0]);
        assert!(pullback_identity_residual(&sym, &dx1, &lp).unwrap() <= 1e-8);

        let so3 = presets::so3().bivector();
        let g = TangentPath::ellipse(
            &[0.0, 0.0, 0.6],
            &[0.8, 0.0, 0.0],
            &[0.0, 0.8, 0.0],
            1.0,
            DEFAULT_SAMPLES,
        )
        .unwrap();
        let lp = lift(&so3, &g);
        let beta =
            CovectorField::new(vec![Poly::var(3, 1), Poly::var(3, 0), Poly::var(3, 2)]).unwrap();
        assert!(pullback_identity_residual(&so3, &beta, &lp).unwrap() <= 1e-7);

        let not_closed =
            CovectorField::new(vec![Poly::var(3, 1), Poly::zero(3), Poly::zero(3)]).unwrap();
        assert!(matches!(
            pullback_identity_residual(&so3, &not_closed, &lp),
            Err(Error::NotClosed { .. })
        ));
    }
}
