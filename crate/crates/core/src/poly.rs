//! Exact multivariate polynomials with real coefficients on a fixed chart dimension.
//!
//! These back every scalar, vector, covector and bivector field in the crate, so
//! partial derivatives (and therefore Jacobians of flows) are exact.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One monomial in the manifest literal format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// A polynomial scalar field on `R^dim`.
#[derive(Clone, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(
            i < dim,
            "variable index {i} out of range for dimension {dim}"
        );
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Poly::zero(dim);
        p.add_term(e, 1.0);
        p
    }

    pub fn monomial(exponents: Vec<u32>, coeff: f64) -> Self {
        let mut p = Poly::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Poly::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::InvalidPolynomial(format!(
                    "exponent vector {:?} has length {}, chart dimension is {}",
                    e,
                    e.len(),
                    dim
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidPolynomial(format!(
                    "non-finite coefficient {c} for exponents {e:?}"
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn from_literal(dim: usize, terms: &[PolyTerm]) -> Result<Self> {
        Poly::from_terms(dim, terms.iter().map(|t| (t.exponents.clone(), t.coeff)))
    }

    pub fn to_literal(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(e, &c)| PolyTerm {
                exponents: e.clone(),
                coeff: c,
            })
            .collect()
    }

    fn add_term(&mut self, exponents: Vec<u32>, coeff: f64) {
        debug_assert_eq!(exponents.len(), self.dim);
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(exponents) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Largest absolute coefficient, zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter().zip(x).fold(
                    c,
                    |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) },
                )
            })
            .sum()
    }

    /// Exact partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, &c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut de = e.clone();
            de[i] -= 1;
            out.add_term(de, c * e[i] as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, &c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    fn check_dim(&self, other: &Poly) {
        assert_eq!(
            self.dim, other.dim,
            "polynomial chart dimensions differ ({} vs {})",
            self.dim, other.dim
        );
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    // Exponents add when monomials multiply.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs);
        let mut out = Poly::zero(self.dim);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A polynomial with `terms` random monomials of total degree at most
/// `max_degree` and coefficients uniform in `[-1, 1)`.
pub fn random_poly<R: rand::Rng>(dim: usize, max_degree: u32, terms: usize, rng: &mut R) -> Poly {
    let mut f = Poly::zero(dim);
    for _ in 0..terms {
        let mut e = vec![0u32; dim];
        for _ in 0..rng.gen_range(0..=max_degree) {
            e[rng.gen_range(0..dim)] += 1;
        }
        f = &f + &Poly::monomial(e, rng.gen_range(-1.0..1.0));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(&[u32], f64)]) -> Poly {
        let dim = terms[0].0.len();
        Poly::from_terms(dim, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    #[test]
    fn eval_and_derivative() {
        // 3 x1^2 x2 - x2 + 2
        let f = p(&[(&[2, 1], 3.0), (&[0, 1], -1.0), (&[0, 0], 2.0)]);
        assert_eq!(f.eval(&[2.0, 5.0]), 3.0 * 4.0 * 5.0 - 5.0 + 2.0);
        let d1 = f.derivative(0);
        assert_eq!(d1, p(&[(&[1, 1], 6.0)]));
        let d2 = f.derivative(1);
        assert_eq!(d2, p(&[(&[2, 0], 3.0), (&[0, 0], -1.0)]));
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(2, 0);
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn rejects_wrong_exponent_length() {
        let err = Poly::from_terms(3, vec![(vec![1, 0], 1.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPolynomial(_)));
        let err = Poly::from_terms(1, vec![(vec![1], f64::NAN)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPolynomial(_)));
    }

    #[test]
    fn literal_round_trip() {
        let f = p(&[(&[1, 2, 0], 0.5), (&[0, 0, 3], -2.0)]);
        let lit = f.to_literal();
        assert_eq!(Poly::from_literal(3, &lit).unwrap(), f);
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3), -3.0f64..3.0), 0..6).prop_map(|ts| {
            Poly::from_terms(2, ts.into_iter().map(|((a, b), c)| (vec![a, b], c))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_rule(f in arb_poly(), g in arb_poly(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let lhs = (&f * &g).derivative(0);
            let rhs = &(&f.derivative(0) * &g) + &(&f * &g.derivative(0));
            let pt = [x, y];
            prop_assert!((lhs.eval(&pt) - rhs.eval(&pt)).abs() <= 1e-9 * (1.0 + lhs.eval(&pt).abs()));
        }

        #[test]
        fn evaluation_is_a_ring_map(f in arb_poly(), g in arb_poly(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let pt = [x, y];
            let prod = (&f * &g).eval(&pt);
            let sum = (&f + &g).eval(&pt);
            prop_assert!((prod - f.eval(&pt) * g.eval(&pt)).abs() <= 1e-9 * (1.0 + prod.abs()));
            prop_assert!((sum - f.eval(&pt) - g.eval(&pt)).abs() <= 1e-9 * (1.0 + sum.abs()));
        }
    }
}
