//! Polynomial fields on a single linear chart `R^n` and the pointwise linear algebra
//! of the symplectic-leaf splitting.
//!
//! Sharp convention, used everywhere in the crate: for a covector `a`,
//! `(sharp(a))^j = sum_i Pi^{ij}(x) a_i`. With `Pi^{ij} = {x_i, x_j}` the
//! Hamiltonian field of `f` then acts as `X_f(g) = {f, g}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{basis_from_projector, kernel_basis, rank_of, sorted_svd};
use crate::poly::Poly;

/// Default relative singular value threshold for ranks of `Pi(x)`.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

fn check_point(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    Ok(())
}

/// Antisymmetric matrix of polynomial entries `Pi^{ij}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivectorField {
    dim: usize,
    entries: Vec<Poly>,
    // d[l][i * dim + j] = d_l Pi^{ij}
    derivs: Vec<Vec<Poly>>,
}

impl BivectorField {
    /// Build from upper-triangular entries `(i, j, Pi^{ij})` with `i < j`; the lower
    /// triangle follows by antisymmetry. Repeated entries are summed.
    pub fn from_upper<I>(dim: usize, upper: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Poly)>,
    {
        let mut entries = vec![Poly::zero(dim); dim * dim];
        for (i, j, p) in upper {
            if i >= j || j >= dim {
                return Err(Error::InvalidPolynomial(format!(
                    "bivector entry ({i}, {j}) must satisfy i < j < {dim}"
                )));
            }
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            let cur = &entries[i * dim + j] + &p;
            entries[j * dim + i] = -&cur;
            entries[i * dim + j] = cur;
        }
        Ok(Self::from_entries_unchecked(dim, entries))
    }

    /// Build from a full `dim x dim` grid, rejecting grids that are not
    /// antisymmetric at the coefficient level.
    pub fn from_matrix(dim: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        for e in &entries {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let s = &entries[i * dim + j] + &entries[j * dim + i];
                if !s.is_zero() {
                    return Err(Error::NotAntisymmetric { i, j });
                }
            }
        }
        Ok(Self::from_entries_unchecked(dim, entries))
    }

    fn from_entries_unchecked(dim: usize, entries: Vec<Poly>) -> Self {
        let derivs = (0..dim)
            .map(|l| entries.iter().map(|p| p.derivative(l)).collect())
            .collect();
        BivectorField {
            dim,
            entries,
            derivs,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_entries_unchecked(dim, vec![Poly::zero(dim); dim * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.dim + j]
    }

    /// Upper-triangular nonzero entries, in row-major order.
    pub fn max_abs_coeff(&self) -> f64 {
        self.upper_entries()
            .fold(0.0, |m, (_, _, p)| m.max(p.max_abs_coeff()))
    }

    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        let n = self.dim;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .map(move |(i, j)| (i, j, self.entry(i, j)))
            .filter(|(_, _, p)| !p.is_zero())
    }

    /// `[Pi^{ij}(x)]`.
    pub fn eval(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_point(self.dim, x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.entries[i * n + j].eval(x);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        m
    }

    /// `[d_l Pi^{ij}(x)]` for a fixed `l`.
    pub(crate) fn eval_derivative(&self, l: usize, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.derivs[l][i * n + j].eval(x);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        m
    }

    /// `sharp(a)` at `x`.
    pub fn sharp(&self, x: &[f64], a: &[f64]) -> Result<DVector<f64>> {
        check_point(self.dim, x)?;
        check_point(self.dim, a)?;
        Ok(sharp_matrix(&self.eval_unchecked(x), a))
    }

    /// Jacobian at `x` of the vector field `y -> sharp_y(a)` for a constant covector `a`:
    /// `J^j_l = sum_i a_i d_l Pi^{ij}(x)`.
    pub(crate) fn sharp_jacobian(&self, x: &[f64], a: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut jac = DMatrix::zeros(n, n);
        for l in 0..n {
            let d = self.eval_derivative(l, x);
            for j in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += a[i] * d[(i, j)];
                }
                jac[(j, l)] = s;
            }
        }
        jac
    }

    /// The polynomial vector field `sharp(beta)`.
    pub fn sharp_field(&self, beta: &CovectorField) -> VectorField {
        let n = self.dim;
        let comps = (0..n)
            .map(|j| {
                (0..n).fold(Poly::zero(n), |acc, i| {
                    &acc + &(self.entry(i, j) * &beta.components()[i])
                })
            })
            .collect();
        VectorField::new(comps).expect("components share the chart dimension")
    }

    /// Hamiltonian vector field `X_f = sharp(df)`.
    pub fn hamiltonian(&self, f: &Poly) -> VectorField {
        self.sharp_field(&CovectorField::differential(f))
    }

    /// Maximum over `i < j < k` of the cyclic Jacobi sum at `x`.
    pub fn jacobi_defect(&self, x: &[f64]) -> Result<f64> {
        check_point(self.dim, x)?;
        let n = self.dim;
        let pi = self.eval_unchecked(x);
        let d: Vec<DMatrix<f64>> = (0..n).map(|l| self.eval_derivative(l, x)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += pi[(l, i)] * d[l][(j, k)]
                            + pi[(l, j)] * d[l][(k, i)]
                            + pi[(l, k)] * d[l][(i, j)];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Symplectic-leaf splitting of `R^n` at `x`.
    /// Bracket of two covectors in the isotropy algebra at `x`:
    /// `[a, b]_k = sum d_k Pi^{ij} a_i b_j`. Meaningful when `a, b` lie in `ker sharp`.
    pub fn isotropy_bracket(&self, x: &[f64], a: &[f64], b: &[f64]) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |k, _| {
            let d = self.eval_derivative(k, x);
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += d[(i, j)] * a[i] * b[j];
                }
            }
            s
        })
    }

    /// Largest bracket between kernel basis vectors at `x`. Zero iff the
    /// isotropy algebra there is abelian.
    pub fn isotropy_defect(&self, x: &[f64], tau_rank: f64) -> Result<f64> {
        let m = self.eval(x)?;
        let basis = kernel_basis(&m, tau_rank);
        let mut worst: f64 = 0.0;
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                worst = worst.max(self.isotropy_bracket(x, a.as_slice(), b.as_slice()).norm());
            }
        }
        Ok(worst)
    }

    pub fn leaf_splitting(&self, x: &[f64], tau_rank: f64) -> Result<LeafSplitting> {
        check_point(self.dim, x)?;
        LeafSplitting::from_matrix(x, &self.eval_unchecked(x), tau_rank)
    }
}

/// `sharp` with an already evaluated bivector matrix.
pub(crate) fn sharp_matrix(pi: &DMatrix<f64>, a: &[f64]) -> DVector<f64> {
    let n = pi.nrows();
    DVector::from_fn(n, |j, _| (0..n).map(|i| pi[(i, j)] * a[i]).sum())
}

/// A polynomial vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: Vec<Poly>,
}

impl VectorField {
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        let dim = comps.len();
        for c in &comps {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
        }
        Ok(VectorField { comps })
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            comps: vec![Poly::zero(dim); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.comps.iter().map(|c| c.eval(x)))
    }

    /// `J^i_l = d_l v^i(x)`.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, l| self.comps[i].derivative(l).eval(x))
    }

    pub fn scale(&self, s: f64) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest coefficient of any component.
    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.max_abs_coeff()))
    }
}

/// A polynomial covector field (one-form).
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorField {
    comps: Vec<Poly>,
}

impl CovectorField {
    pub fn new(comps: Vec<Poly>) -> Result<Self> {
        let dim = comps.len();
        for c in &comps {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
        }
        Ok(CovectorField { comps })
    }

    /// Constant covector field; always closed.
    pub fn constant(a: &[f64]) -> Self {
        let n = a.len();
        CovectorField {
            comps: a.iter().map(|&c| Poly::constant(n, c)).collect(),
        }
    }

    pub fn differential(f: &Poly) -> Self {
        CovectorField {
            comps: f.gradient(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.comps.iter().map(|c| c.eval(x)))
    }

    /// Largest coefficient of `d_i beta_j - d_j beta_i`; zero iff closed.
    pub fn closedness_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let d = &self.comps[j].derivative(i) - &self.comps[i].derivative(j);
                worst = worst.max(d.max_abs_coeff());
            }
        }
        worst
    }
}

/// Volume form `rho dx^1 ... dx^n` with `rho = exp(log_density)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeDensity {
    log_density: Poly,
}

impl VolumeDensity {
    pub fn new(log_density: Poly) -> Self {
        VolumeDensity { log_density }
    }

    /// The chart volume, `rho = 1`.
    pub fn unit(dim: usize) -> Self {
        VolumeDensity {
            log_density: Poly::zero(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.log_density.dim()
    }

    pub fn log_density(&self) -> &Poly {
        &self.log_density
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density.eval(x).exp()
    }

    /// The density `g rho` for `g = exp(log_g)`.
    pub fn rescaled(&self, log_g: &Poly) -> Self {
        VolumeDensity {
            log_density: &self.log_density + log_g,
        }
    }
}

/// Divergence of `v` with respect to `rho dx`:
/// `sum_j d_j v^j + v^j d_j log rho`, evaluated exactly at `x`.
pub fn divergence(v: &VectorField, rho: &VolumeDensity, x: &[f64]) -> Result<f64> {
    check_point(v.dim(), x)?;
    if rho.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: rho.dim(),
        });
    }
    let mut s = 0.0;
    for (j, c) in v.components().iter().enumerate() {
        s += c.derivative(j).eval(x) + c.eval(x) * rho.log_density.derivative(j).eval(x);
    }
    Ok(s)
}

/// Splitting of `R^n` at a point into the leaf tangent `Im sharp(x)` and its
/// Euclidean orthogonal complement.
///
/// The leaf basis is symplectic for the leafwise form `omega`, paired as
/// `omega(u_{2i}, u_{2i+1}) = 1` (0-based), so its leafwise Liouville volume is 1.
/// `omega(sharp a, sharp b) = a^T Pi(x) b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafSplitting {
    pub point: Vec<f64>,
    pub rank: usize,
    pub leaf_basis: Vec<DVector<f64>>,
    pub normal_basis: Vec<DVector<f64>>,
}

impl LeafSplitting {
    pub(crate) fn from_matrix(x: &[f64], pi: &DMatrix<f64>, tau_rank: f64) -> Result<Self> {
        let n = pi.nrows();
        let svd = sorted_svd(pi);
        let rank = if pi.iter().all(|&v| v == 0.0) {
            0
        } else {
            rank_of(&svd.sigma, tau_rank)
        };
        if rank % 2 == 1 {
            return Err(Error::OddRank {
                rank,
                point: x.to_vec(),
            });
        }
        let w_raw = svd.u.columns(0, rank).into_owned();
        let p_leaf = &w_raw * w_raw.transpose();
        let p_normal = DMatrix::identity(n, n) - &p_leaf;

        let leaf_basis = if rank == 0 {
            Vec::new()
        } else {
            let ortho = basis_from_projector(&p_leaf, rank);
            let w = DMatrix::from_columns(&ortho);
            let m = w.transpose() * pi * &w;
            let m_inv = m.try_inverse().ok_or_else(|| Error::OddRank {
                rank,
                point: x.to_vec(),
            })?;
            let omega = -m_inv;
            symplectic_gram_schmidt(&omega)
                .into_iter()
                .map(|c| &w * c)
                .collect()
        };
        let normal_basis = basis_from_projector(&p_normal, n - rank);
        Ok(LeafSplitting {
            point: x.to_vec(),
            rank,
            leaf_basis,
            normal_basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn codim(&self) -> usize {
        self.normal_basis.len()
    }

    /// `n x q` matrix whose columns are the normal basis.
    pub fn normal_matrix(&self) -> DMatrix<f64> {
        columns(self.dim(), &self.normal_basis)
    }

    pub fn leaf_matrix(&self) -> DMatrix<f64> {
        columns(self.dim(), &self.leaf_basis)
    }

    /// `[u_1 .. u_2k, n_1 .. n_q]`.
    pub fn full_matrix(&self) -> DMatrix<f64> {
        let all: Vec<DVector<f64>> = self
            .leaf_basis
            .iter()
            .chain(&self.normal_basis)
            .cloned()
            .collect();
        columns(self.dim(), &all)
    }

    /// Normal coordinates of `v`, i.e. the projection onto the normal basis along
    /// the leaf tangent space.
    pub fn normal_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.codim(), self.normal_basis.iter().map(|nv| nv.dot(v)))
    }

    /// Chart volume of the basis `[u, n]`, the induced normal volume of the normal
    /// basis for the unit density.
    pub fn basis_volume(&self) -> f64 {
        let m = self.full_matrix();
        if m.nrows() == 0 {
            1.0
        } else {
            m.determinant()
        }
    }

    /// Reconstruct `Pi(x)` from the symplectic leaf basis:
    /// `sum_i u_{2i} u_{2i+1}^T - u_{2i+1} u_{2i}^T`.
    pub fn reconstruct_bivector(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for pair in self.leaf_basis.chunks(2) {
            m += &pair[0] * pair[1].transpose() - &pair[1] * pair[0].transpose();
        }
        m
    }
}

fn columns(n: usize, vs: &[DVector<f64>]) -> DMatrix<f64> {
    if vs.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(vs)
    }
}

/// Symplectic Gram-Schmidt for a nondegenerate antisymmetric form; returns the
/// coordinate vectors `e_1, f_1, e_2, f_2, ...` with `omega(e_i, f_i) = 1`.
fn symplectic_gram_schmidt(omega: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let m = omega.nrows();
    let form = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * omega * b)[(0, 0)];
    let mut pool: Vec<DVector<f64>> = (0..m)
        .map(|i| {
            let mut e = DVector::zeros(m);
            e[i] = 1.0;
            e
        })
        .collect();
    let mut out = Vec::with_capacity(m);
    while !pool.is_empty() {
        let e = pool.remove(0);
        let (idx, _) = pool
            .iter()
            .enumerate()
            .map(|(k, w)| (k, form(&e, w).abs()))
            .fold(
                (0, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        let f_raw = pool.remove(idx);
        let f = &f_raw / form(&e, &f_raw);
        for w in pool.iter_mut() {
            let wf = form(w, &f);
            let we = form(w, &e);
            *w = &*w - &e * wf + &f * we;
        }
        out.push(e);
        out.push(f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn eval_examples() {
        let sym = presets::symplectic_r2();
        let m = sym.eval(&[3.0, 7.0]).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));

        let aff = presets::aff1().bivector();
        let m = aff.eval(&[0.0, 2.0]).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]));

        let so3 = presets::so3().bivector();
        let m = so3.eval(&[0.0, 0.0, 1.0]).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(m, expect);

        assert!(matches!(
            so3.eval(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn isotropy_defect_detects_nonabelian_kernels() {
        let aff = presets::aff1().bivector();
        assert!((aff.isotropy_defect(&[0.0, 0.0], DEFAULT_RANK_TOL).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            aff.isotropy_defect(&[0.0, 1.0], DEFAULT_RANK_TOL).unwrap(),
            0.0
        );
        let so3 = presets::so3().bivector();
        assert!(
            so3.isotropy_defect(&[0.0, 0.0, 0.0], DEFAULT_RANK_TOL)
                .unwrap()
                > 0.5
        );
        assert!(
            so3.isotropy_defect(&[0.3, -0.2, 1.0], DEFAULT_RANK_TOL)
                .unwrap()
                < 1e-12
        );
        let h3 = presets::h3().bivector();
        assert!(
            h3.isotropy_defect(&[0.0, 0.0, 1.0], DEFAULT_RANK_TOL)
                .unwrap()
                < 1e-12
        );
        assert!(
            h3.isotropy_defect(&[0.0, 0.0, 0.0], DEFAULT_RANK_TOL)
                .unwrap()
                > 0.5
        );
    }

    #[test]
    fn sharp_convention() {
        let sym = presets::symplectic_r2();
        let v = sym.sharp(&[0.3, -1.0], &[1.0, 0.0]).unwrap();
        // dx^1 |-> d/dx^2, the Hamiltonian field of x_1.
        assert_eq!(v.as_slice(), &[0.0, 1.0]);
        let zero = BivectorField::zero(3);
        assert_eq!(
            zero.sharp(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0])
                .unwrap()
                .norm(),
            0.0
        );
        let so3 = presets::so3().bivector();
        let v = so3.sharp(&[0.0, 0.0, 2.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn broken_bivector_has_jacobi_defect() {
        let x = |i| Poly::var(3, i);
        let pi =
            BivectorField::from_upper(3, vec![(0, 1, &x(0) * &x(1)), (0, 2, x(2)), (1, 2, x(0))])
                .unwrap();
        // Hand evaluation of the cyclic sum at (1,1,1): 0 + x1 + (x3 x2 + x1 x1) = 3.
        let d = pi.jacobi_defect(&[1.0, 1.0, 1.0]).unwrap();
        assert!((d - 3.0).abs() < 1e-14, "{d}");
        assert_eq!(
            presets::symplectic_r2().jacobi_defect(&[0.4, 9.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn from_matrix_checks_antisymmetry() {
        let x = Poly::var(2, 0);
        let ok = BivectorField::from_matrix(2, vec![Poly::zero(2), x.clone(), -&x, Poly::zero(2)]);
        assert!(ok.is_ok());
        let bad = BivectorField::from_matrix(2, vec![Poly::zero(2), x.clone(), x, Poly::zero(2)]);
        assert_eq!(bad.unwrap_err(), Error::NotAntisymmetric { i: 0, j: 1 });
    }

    #[test]
    fn splitting_examples() {
        let s = presets::symplectic_r2()
            .leaf_splitting(&[1.0, 2.0], DEFAULT_RANK_TOL)
            .unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.normal_basis.is_empty());

        let s = presets::aff1()
            .bivector()
            .leaf_splitting(&[0.0, 0.0], DEFAULT_RANK_TOL)
            .unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(s.normal_matrix(), DMatrix::identity(2, 2));

        let s = presets::so3()
            .bivector()
            .leaf_splitting(&[0.0, 0.0, 1.0], DEFAULT_RANK_TOL)
            .unwrap();
        assert_eq!(s.rank, 2);
        let nv = &s.normal_basis[0];
        assert!((nv[2].abs() - 1.0).abs() < 1e-14 && nv[0].abs() < 1e-14 && nv[1].abs() < 1e-14);
    }

    #[test]
    fn odd_rank_is_reported() {
        // Singular values of an antisymmetric matrix come in pairs, so only a
        // non-antisymmetric input can land on odd rank.
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1e-3, 0.0, 0.0, -1e-3, 0.0,
            ],
        );
        assert_eq!(
            LeafSplitting::from_matrix(&[0.0; 4], &m, 1e-2)
                .unwrap()
                .rank,
            2
        );
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            LeafSplitting::from_matrix(&[0.0; 2], &bad, 1e-9),
            Err(Error::OddRank { rank: 1, .. })
        ));
    }

    #[test]
    fn divergence_examples() {
        let x = |i| Poly::var(2, i);
        let rot = VectorField::new(vec![-&x(1), x(0)]).unwrap();
        let unit = VolumeDensity::unit(2);
        assert_eq!(divergence(&rot, &unit, &[0.3, 0.7]).unwrap(), 0.0);
        let radial = VectorField::new(vec![x(0), x(1)]).unwrap();
        assert_eq!(divergence(&radial, &unit, &[5.0, -1.0]).unwrap(), 2.0);
        let rho = VolumeDensity::new(x(0));
        assert_eq!(divergence(&radial, &rho, &[1.0, 0.0]).unwrap(), 3.0);
    }

    #[test]
    fn closedness() {
        let x = |i| Poly::var(2, i);
        assert_eq!(
            CovectorField::constant(&[1.0, 2.0]).closedness_defect(),
            0.0
        );
        let f = &(&x(0) * &x(1)) * &x(1);
        assert_eq!(CovectorField::differential(&f).closedness_defect(), 0.0);
        let not_closed = CovectorField::new(vec![x(1), Poly::zero(2)]).unwrap();
        assert_eq!(not_closed.closedness_defect(), 1.0);
    }
}
