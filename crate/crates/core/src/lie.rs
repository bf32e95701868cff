//! Lie-Poisson structures from structure constants, closed-form holonomy oracles
//! for loops over the origin, the modular character, and the inner-automorphism
//! coset test.

use nalgebra::{DMatrix, DVector};

use crate::conventions::COAD_SIGN;
use crate::error::{Error, Result};
use crate::geometry::BivectorField;
use crate::linalg::{expm, logm, sorted_svd};
use crate::poly::Poly;

const JACOBI_TOL: f64 = 1e-12;
const INN_RANK_TOL: f64 = 1e-10;

/// Structure constants `c_{ij}^k` with `[e_i, e_j] = sum_k c_{ij}^k e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraPresentation {
    dim: usize,
    c: Vec<f64>,
}

impl LieAlgebraPresentation {
    /// From sparse triples `(i, j, k, value)` with `i < j`, 0-based.
    pub fn new(dim: usize, triples: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        for &(i, j, k, v) in triples {
            if i >= j || j >= dim || k >= dim {
                return Err(Error::InvalidLieAlgebra(format!(
                    "triple ({i}, {j}, {k}) must satisfy i < j < {dim} and k < {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidLieAlgebra(format!(
                    "non-finite constant at ({i}, {j}, {k})"
                )));
            }
            c[(i * dim + j) * dim + k] += v;
            c[(j * dim + i) * dim + k] -= v;
        }
        Self::from_dense(dim, c)
    }

    /// From a dense `d^3` array indexed `(i * d + j) * d + k`.
    pub fn from_dense(dim: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::InvalidLieAlgebra(format!(
                "{} constants for dimension {dim}",
                c.len()
            )));
        }
        let l = LieAlgebraPresentation { dim, c };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if l.constant(i, j, k) != -l.constant(j, i, k) {
                        return Err(Error::InvalidLieAlgebra(format!(
                            "c_({i},{j})^{k} is not antisymmetric"
                        )));
                    }
                }
            }
        }
        let defect = l.jacobi_defect();
        if defect > JACOBI_TOL {
            return Err(Error::InvalidLieAlgebra(format!(
                "Jacobi identity fails by {defect:e}"
            )));
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Sparse upper triples, for manifests.
    pub fn triples(&self) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in 0..d {
                    let v = self.constant(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    /// Largest `|sum_m c_ij^m c_mk^l + c_jk^m c_mi^l + c_ki^m c_mj^l|`.
    pub fn jacobi_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let s: f64 = (0..d)
                            .map(|m| {
                                self.constant(i, j, m) * self.constant(m, k, l)
                                    + self.constant(j, k, m) * self.constant(m, i, l)
                                    + self.constant(k, i, m) * self.constant(m, j, l)
                            })
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// The linear Poisson structure `Pi^{ij}(x) = sum_k c_{ij}^k x_k` on the dual.
    pub fn bivector(&self) -> BivectorField {
        let d = self.dim;
        let mut upper = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let p = (0..d).fold(Poly::zero(d), |acc, k| {
                    &acc + &Poly::var(d, k).scale(self.constant(i, j, k))
                });
                if !p.is_zero() {
                    upper.push((i, j, p));
                }
            }
        }
        BivectorField::from_upper(d, upper).expect("indices are in range")
    }

    /// `ad_xi`, with `(ad_xi)^k_j = sum_i c_{ij}^k xi_i`, so `ad_xi e_j = [xi, e_j]`.
    pub fn ad_matrix(&self, xi: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        assert_eq!(xi.len(), d, "element has wrong dimension");
        DMatrix::from_fn(d, d, |k, j| {
            (0..d).map(|i| self.constant(i, j, k) * xi[i]).sum()
        })
    }

    /// Coadjoint generator in dual coordinates, `COAD_SIGN * ad_xi^T`. The sign is the
    /// one under which the linearized flow of a constant loop at the origin equals
    /// `exp(T coad_matrix(a))`.
    pub fn coad_matrix(&self, xi: &[f64]) -> DMatrix<f64> {
        self.ad_matrix(xi).transpose() * COAD_SIGN
    }

    /// Holonomy of the constant loop `a` of duration `t` at the origin.
    pub fn constant_loop_oracle(&self, a: &[f64], t: f64) -> DMatrix<f64> {
        expm(&(self.coad_matrix(a) * t))
    }

    /// Ordered product `E_N ... E_1` of `exp((T/N) coad(a(t_m)))` at midpoints.
    pub fn time_ordered_oracle<F>(&self, a: F, t: f64, n: usize) -> DMatrix<f64>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        assert!(n >= 2, "time-ordered oracle needs at least two partitions");
        let h = t / n as f64;
        let mut acc = DMatrix::identity(self.dim, self.dim);
        for m in 0..n {
            let tm = (m as f64 + 0.5) * h;
            acc = expm(&(self.coad_matrix(&a(tm)) * h)) * acc;
        }
        acc
    }

    /// `chi_i = tr ad_{e_i}`.
    pub fn modular_character(&self) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |i, _| (0..d).map(|j| self.constant(i, j, j)).sum())
    }

    pub fn is_unimodular(&self) -> bool {
        self.modular_character().iter().all(|c| c.abs() <= 1e-12)
    }

    /// Orthonormal (Frobenius) basis of `span { coad(xi) }`.
    pub fn inn_span(&self) -> InnSpan {
        let d = self.dim;
        let gens: Vec<DMatrix<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                self.coad_matrix(&e)
            })
            .collect();
        if d == 0 || gens.iter().all(|g| g.iter().all(|&x| x == 0.0)) {
            return InnSpan {
                dim: d,
                basis: Vec::new(),
                elements: Vec::new(),
            };
        }
        let flat = DMatrix::from_fn(d * d, d, |r, c| gens[c][(r % d, r / d)]);
        let svd = sorted_svd(&flat);
        let smax = svd.sigma[0];
        let mut basis = Vec::new();
        let mut elements = Vec::new();
        for (k, &s) in svd.sigma.iter().enumerate() {
            if s < INN_RANK_TOL * smax.max(1.0) {
                break;
            }
            let xi: Vec<f64> = svd.v.column(k).iter().map(|v| v / s).collect();
            basis.push(self.coad_matrix(&xi));
            elements.push(DVector::from_vec(xi));
        }
        InnSpan {
            dim: d,
            basis,
            elements,
        }
    }

    /// Sufficient test that `h2 h1^{-1}` is an inner automorphism: its principal
    /// logarithm lies in the coadjoint span within `tol` (Frobenius residual).
    ///
    /// A [`Error::LogDomain`] result means the single-logarithm witness does not
    /// apply; it is not a negative answer.
    pub fn inn_coset_equal(&self, h1: &DMatrix<f64>, h2: &DMatrix<f64>, tol: f64) -> Result<bool> {
        let h1_inv = h1
            .clone()
            .try_inverse()
            .ok_or(Error::LogDomain { re: 0.0, im: 0.0 })?;
        let log = logm(&(h2 * h1_inv))?;
        Ok(self.inn_span().residual(&log) <= tol)
    }
}

/// Linear span of the coadjoint generators inside `d x d` matrices.
#[derive(Debug, Clone)]
pub struct InnSpan {
    dim: usize,
    basis: Vec<DMatrix<f64>>,
    elements: Vec<DVector<f64>>,
}

impl InnSpan {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Frobenius-orthonormal basis matrices.
    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Algebra elements `xi_k` with `basis[k] = coad(xi_k)`.
    pub fn elements(&self) -> &[DVector<f64>] {
        &self.elements
    }

    /// Frobenius norm of the component of `m` orthogonal to the span.
    pub fn residual(&self, m: &DMatrix<f64>) -> f64 {
        assert_eq!(m.nrows(), self.dim);
        let mut r = m.clone();
        for b in &self.basis {
            let c = b.dot(m);
            r -= b * c;
        }
        r.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::presets;
    use std::f64::consts::E;

    #[test]
    fn bivector_from_constants() {
        let aff = presets::aff1().bivector();
        assert_eq!(aff.entry(0, 1), &Poly::var(2, 1));
        let so3 = presets::so3().bivector();
        assert_eq!(so3.entry(0, 1), &Poly::var(3, 2));
        assert_eq!(so3.entry(1, 2), &Poly::var(3, 0));
        assert_eq!(so3.entry(2, 0), &Poly::var(3, 1));
        let ab = presets::abelian(3).bivector();
        assert!((0..3).all(|i| (0..3).all(|j| ab.entry(i, j).is_zero())));
    }

    #[test]
    fn ad_examples() {
        assert_eq!(
            presets::aff1().ad_matrix(&[1.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0])
        );
        let r = presets::so3().ad_matrix(&[0.0, 0.0, 1.0]);
        // [e3, e1] = e2, [e3, e2] = -e1
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(r, expect);
        assert_eq!(presets::sl2().ad_matrix(&[0.0; 3]), DMatrix::zeros(3, 3));
    }

    #[test]
    fn invalid_constants_rejected() {
        // [e1,e2] = e1, [e2,e3] = e1, [e1,e3] = e2 violates Jacobi.
        let bad = LieAlgebraPresentation::new(3, &[(0, 1, 0, 1.0), (1, 2, 0, 1.0), (0, 2, 1, 1.0)]);
        assert!(matches!(bad, Err(Error::InvalidLieAlgebra(_))));
        assert!(LieAlgebraPresentation::new(2, &[(1, 0, 0, 1.0)]).is_err());
        let mut dense = vec![0.0; 8];
        dense[1] = 1.0; // c_00^1 != -c_00^1
        assert!(LieAlgebraPresentation::from_dense(2, dense).is_err());
    }

    #[test]
    fn constant_oracle_examples() {
        let h = presets::aff1().constant_loop_oracle(&[1.0, 0.0], 1.0);
        assert!(max_abs_diff(&h, &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, E])) < 1e-14);

        let theta = 0.7;
        let r = presets::so3().constant_loop_oracle(&[0.0, 0.0, theta], 1.0);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
        assert!((r[(0, 0)] - theta.cos()).abs() < 1e-14);
        assert!((r[(2, 2)] - 1.0).abs() < 1e-14);
        assert!((r[(0, 1)].abs() - theta.sin()).abs() < 1e-14);

        let id = presets::sl2().constant_loop_oracle(&[0.0; 3], 2.0);
        assert_eq!(id, DMatrix::identity(3, 3));
    }

    #[test]
    fn time_ordered_oracle_examples() {
        let sl2 = presets::sl2();
        let a = [0.3, -0.2, 0.5];
        let c = sl2.time_ordered_oracle(|_| a.to_vec(), 1.0, 1024);
        assert!(max_abs_diff(&c, &sl2.constant_loop_oracle(&a, 1.0)) < 1e-10);

        let h3 = presets::h3();
        let m = h3.time_ordered_oracle(|t| vec![t.cos(), t * t, 1.0], 2.0, 64);
        assert!((m.determinant() - 1.0).abs() < 1e-13);

        // Commuting family f(t) a0 with f(t) = 1 + cos t, whose integral over [0, 1] is 1 + sin 1.
        let a0 = [0.4, 0.1, -0.3];
        let m = sl2.time_ordered_oracle(
            |t| a0.iter().map(|x| x * (1.0 + t.cos())).collect(),
            1.0,
            4096,
        );
        let expect = sl2.constant_loop_oracle(&a0, 1.0 + 1f64.sin());
        assert!(max_abs_diff(&m, &expect) < 1e-8);
    }

    #[test]
    fn modular_character_examples() {
        assert_eq!(
            presets::so3().modular_character().as_slice(),
            &[0.0, 0.0, 0.0]
        );
        assert_eq!(presets::aff1().modular_character().as_slice(), &[1.0, 0.0]);
        assert_eq!(
            presets::h3().modular_character().as_slice(),
            &[0.0, 0.0, 0.0]
        );
        assert!(presets::sl2().is_unimodular());
        assert!(!presets::aff1().is_unimodular());
    }

    #[test]
    fn inn_span_examples() {
        assert_eq!(presets::abelian(2).inn_span().dimension(), 0);
        assert_eq!(presets::so3().inn_span().dimension(), 3);
        let aff = presets::aff1();
        let span = aff.inn_span();
        assert_eq!(span.dimension(), 2);
        for (b, xi) in span.basis().iter().zip(span.elements()) {
            assert!(max_abs_diff(b, &aff.coad_matrix(xi.as_slice())) < 1e-14);
        }
    }

    #[test]
    fn inn_coset_examples() {
        let h3 = presets::h3();
        let a = h3.constant_loop_oracle(&[1.0, 0.5, 0.0], 1.0);
        assert!(h3.inn_coset_equal(&a, &a, 1e-12).unwrap());
        let b = h3.constant_loop_oracle(&[-0.3, 2.0, 1.0], 1.0);
        assert!(h3.inn_coset_equal(&a, &b, 1e-10).unwrap());

        let ab = presets::abelian(2);
        let two = DMatrix::identity(2, 2) * 2.0;
        assert!(!ab
            .inn_coset_equal(&DMatrix::identity(2, 2), &two, 1e-6)
            .unwrap());

        let flip = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            ab.inn_coset_equal(&DMatrix::identity(2, 2), &flip, 1e-6),
            Err(Error::LogDomain { .. })
        ));
    }
}
