//! The modular vector field of a Poisson structure with respect to a volume
//! `rho dx`, and the checks that characterize it.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::geometry::{divergence, BivectorField, CovectorField, VectorField, VolumeDensity};
use crate::poly::Poly;

/// `v_mu` together with the structure and density it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularField {
    pub field: VectorField,
    pub bivector: BivectorField,
    pub density: VolumeDensity,
}

impl ModularField {
    pub fn eval(&self, x: &[f64]) -> nalgebra::DVector<f64> {
        self.field.eval(x)
    }
}

/// `v^i = sum_j d_j Pi^{ij} + Pi^{ij} d_j log rho`. With the crate's sharp
/// convention this is the field satisfying `div_rho X_f = v(f)`.
pub fn modular_field(pi: &BivectorField, rho: &VolumeDensity) -> ModularField {
    let n = pi.dim();
    let dlog = rho.log_density().gradient();
    let comps = (0..n)
        .map(|i| {
            (0..n).fold(Poly::zero(n), |acc, j| {
                let p = pi.entry(i, j);
                &(&acc + &p.derivative(j)) + &(p * &dlog[j])
            })
        })
        .collect();
    ModularField {
        field: VectorField::new(comps).expect("components share the chart dimension"),
        bivector: pi.clone(),
        density: rho.clone(),
    }
}

/// `|div_rho X_f(x) - df_x(v(x))|`.
pub fn defining_property_residual(
    pi: &BivectorField,
    rho: &VolumeDensity,
    v: &VectorField,
    f: &Poly,
    x: &[f64],
) -> Result<f64> {
    let xf = pi.hamiltonian(f);
    let div = divergence(&xf, rho, x)?;
    let df = CovectorField::differential(f).eval(x);
    Ok((div - df.dot(&v.eval(x))).abs())
}

/// Largest coefficient of `v_{g rho} - (v_rho - X_{ln g})`.
pub fn gauge_shift_check(pi: &BivectorField, rho: &VolumeDensity, log_g: &Poly) -> f64 {
    let shifted = modular_field(pi, &rho.rescaled(log_g)).field;
    let predicted = modular_field(pi, rho).field.sub(&pi.hamiltonian(log_g));
    shifted.sub(&predicted).max_abs_coeff()
}

/// Largest entry of `(L_v Pi)(x)`, where
/// `(L_v Pi)^{ij} = v^l d_l Pi^{ij} - Pi^{lj} d_l v^i - Pi^{il} d_l v^j`.
pub fn poisson_field_residual(pi: &BivectorField, v: &VectorField, x: &[f64]) -> Result<f64> {
    let n = pi.dim();
    let m = pi.eval(x)?;
    let vx = v.eval(x);
    let dv = v.jacobian(x);
    let mut lie = DMatrix::zeros(n, n);
    for l in 0..n {
        lie += pi.eval_derivative(l, x) * vx[l];
    }
    // (dv)_{il} = d_l v^i
    lie -= &dv * &m + m * dv.transpose();
    Ok(lie.amax())
}
