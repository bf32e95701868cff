//! Small dense linear algebra helpers: thresholded SVD, canonical subspace bases,
//! and the principal matrix logarithm.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Thin SVD with singular values sorted in decreasing order.
pub(crate) struct SortedSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    let sigma = order.iter().map(|&i| s[i]).collect();
    SortedSvd { u, sigma, v }
}

/// Numerical rank under a relative singular value threshold.
pub fn numerical_rank(m: &DMatrix<f64>, tau_rel: f64) -> usize {
    if m.iter().all(|&x| x == 0.0) {
        return 0;
    }
    let svd = sorted_svd(m);
    rank_of(&svd.sigma, tau_rel)
}

pub(crate) fn rank_of(sigma: &[f64], tau_rel: f64) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sigma.iter().take_while(|&&s| s >= tau_rel * smax).count()
}

/// Minimum-norm least-squares solution of `m * x = b` with a relative cutoff.
/// Returns the solution and the residual norm.
pub fn min_norm_solve(m: &DMatrix<f64>, b: &DVector<f64>, tau_rel: f64) -> (DVector<f64>, f64) {
    let mut x = DVector::zeros(m.ncols());
    if m.iter().any(|&v| v != 0.0) {
        let svd = sorted_svd(m);
        let r = rank_of(&svd.sigma, tau_rel);
        for k in 0..r {
            let coeff = svd.u.column(k).dot(b) / svd.sigma[k];
            x.axpy(coeff, &svd.v.column(k), 1.0);
        }
    }
    let res = (m * &x - b).norm();
    (x, res)
}

/// Pivoted Gram-Schmidt on the columns of an orthogonal projector. Deterministic
/// for a given projector and continuous away from pivot ties, which keeps bases
/// reproducible between nearby points.
pub(crate) fn basis_from_projector(p: &DMatrix<f64>, count: usize) -> Vec<DVector<f64>> {
    let n = p.nrows();
    let mut cols: Vec<DVector<f64>> = (0..n).map(|j| p.column(j).into_owned()).collect();
    let mut used = vec![false; n];
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best = None;
        let mut best_norm = -1.0;
        for (j, c) in cols.iter().enumerate() {
            if used[j] {
                continue;
            }
            let nrm = c.norm();
            if nrm > best_norm * (1.0 + 1e-12) {
                best_norm = nrm;
                best = Some(j);
            }
        }
        let j = best.expect("projector has enough columns");
        used[j] = true;
        let mut e = cols[j].clone();
        // Orient along +e_j, matching the positive diagonal of the projector.
        if e[j] < 0.0 {
            e = -e;
        }
        let e = e.normalize();
        for (k, c) in cols.iter_mut().enumerate() {
            if !used[k] {
                let d = c.dot(&e);
                c.axpy(-d, &e, 1.0);
            }
        }
        basis.push(e);
    }
    basis
}

/// Orthogonal projection of `w` onto the kernel of the square matrix `m`.
pub fn kernel_projection(m: &DMatrix<f64>, w: &DVector<f64>, tau_rel: f64) -> DVector<f64> {
    if m.iter().all(|&x| x == 0.0) {
        return w.clone();
    }
    let svd = sorted_svd(m);
    let r = rank_of(&svd.sigma, tau_rel);
    let mut out = w.clone();
    for k in 0..r {
        let v = svd.v.column(k);
        out -= v * v.dot(w);
    }
    out
}

/// Orthonormal basis of the kernel of the square matrix `m`.
pub fn kernel_basis(m: &DMatrix<f64>, tau_rel: f64) -> Vec<DVector<f64>> {
    let n = m.ncols();
    if m.iter().all(|&x| x == 0.0) {
        return (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
    }
    let svd = sorted_svd(m);
    let r = rank_of(&svd.sigma, tau_rel);
    let mut p = DMatrix::<f64>::identity(n, n);
    for k in 0..r {
        let v = svd.v.column(k);
        p -= v * v.transpose();
    }
    basis_from_projector(&p, n - r)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return m.clone();
    }
    m.exp()
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Fails with [`Error::LogDomain`] when an eigenvalue lies on the closed negative
/// real axis (including zero).
pub fn logm(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "logm needs a square matrix");
    if n == 0 {
        return Ok(m.clone());
    }
    let scale = max_abs(m).max(1.0);
    for ev in m.clone().complex_eigenvalues().iter() {
        if ev.im.abs() <= 1e-12 * scale && ev.re <= 1e-14 * scale {
            return Err(Error::LogDomain {
                re: ev.re,
                im: ev.im,
            });
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = m.clone();
    let mut k = 0;
    while max_abs(&(&x - &id)) > 0.25 {
        x = sqrtm_db(&x)?;
        k += 1;
        if k > 60 {
            return Err(Error::LogDomain {
                re: f64::NAN,
                im: f64::NAN,
            });
        }
    }
    // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
    let xp = (&x + &id)
        .try_inverse()
        .ok_or(Error::LogDomain { re: -1.0, im: 0.0 })?;
    let z = (&x - &id) * xp;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut acc = z.clone();
    for j in 1..200 {
        term = &term * &z2;
        let add = &term / (2 * j + 1) as f64;
        acc += &add;
        if max_abs(&add) < 1e-18 {
            break;
        }
    }
    Ok(acc * (2.0 * (1u64 << k) as f64))
}

/// Principal square root by the Denman-Beavers iteration.
fn sqrtm_db(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let yi = y
            .clone()
            .try_inverse()
            .ok_or(Error::LogDomain { re: 0.0, im: 0.0 })?;
        let zi = z
            .clone()
            .try_inverse()
            .ok_or(Error::LogDomain { re: 0.0, im: 0.0 })?;
        let y_next = (&y + &zi) * 0.5;
        let z_next = (&z + &yi) * 0.5;
        let delta = max_abs_diff(&y_next, &y);
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * max_abs(&y).max(1.0) {
            break;
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_projection_keeps_radial_part() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let w = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let k = kernel_projection(&m, &w, 1e-9);
        assert!((k - DVector::from_vec(vec![0.0, 0.0, 3.0])).amax() < 1e-14);
        assert_eq!(kernel_projection(&DMatrix::zeros(3, 3), &w, 1e-9), w);
    }

    #[test]
    fn rank_and_min_norm() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(numerical_rank(&m, 1e-9), 2);
        let b = DVector::from_vec(vec![2.0, 3.0, 0.0]);
        let (x, res) = min_norm_solve(&m, &b, 1e-9);
        assert!(res < 1e-14);
        assert!(x[2].abs() < 1e-15);
        let (_, res) = min_norm_solve(&m, &DVector::from_vec(vec![0.0, 0.0, 1.0]), 1e-9);
        assert!((res - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_inverts_exp() {
        let a = DMatrix::from_row_slice(3, 3, &[0.1, 0.7, -0.3, -0.2, 0.0, 0.4, 0.5, 0.1, -0.2]);
        let l = logm(&expm(&a)).unwrap();
        assert!(max_abs_diff(&l, &a) < 1e-12, "{l}");
    }

    #[test]
    fn log_of_unipotent() {
        let n = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, -3.0, 0.0]);
        let l = logm(&(DMatrix::identity(3, 3) + &n)).unwrap();
        assert!(max_abs_diff(&l, &n) < 1e-12);
    }

    #[test]
    fn log_domain_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 2.0]);
        assert!(matches!(logm(&m), Err(Error::LogDomain { .. })));
        let z = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(logm(&z), Err(Error::LogDomain { .. })));
    }

    #[test]
    fn projector_basis_is_orthonormal() {
        let w = DVector::from_vec(vec![1.0, 2.0, 2.0]).normalize();
        let p = DMatrix::identity(3, 3) - &w * w.transpose();
        let b = basis_from_projector(&p, 2);
        for u in &b {
            assert!((u.norm() - 1.0).abs() < 1e-14);
            assert!(u.dot(&w).abs() < 1e-14);
        }
        assert!(b[0].dot(&b[1]).abs() < 1e-14);
    }
}
