//! Vector-valued cubic interpolating splines on uniform grids.

use nalgebra::DVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    /// Third derivative continuous across the first and last interior knots.
    NotAKnot,
    /// Periodic; the first and last samples must coincide.
    Periodic,
}

#[derive(Debug, Clone)]
pub struct CubicSpline {
    t0: f64,
    h: f64,
    values: Vec<DVector<f64>>,
    moments: Vec<DVector<f64>>,
}

impl CubicSpline {
    /// `values[i]` is the sample at `t0 + i * h`. At least 4 samples are needed.
    pub fn new(t0: f64, h: f64, values: Vec<DVector<f64>>, end: EndCondition) -> Self {
        let n = values.len() - 1;
        assert!(n >= 3, "cubic spline needs at least 4 samples");
        let dim = values[0].len();
        let second_diff = |i: usize, prev: &DVector<f64>, next: &DVector<f64>| {
            (prev - &values[i] * 2.0 + next) * (6.0 / (h * h))
        };
        let moments = match end {
            EndCondition::NotAKnot => {
                let m1 = second_diff(1, &values[0], &values[2]) / 6.0;
                let mlast = second_diff(n - 1, &values[n - 2], &values[n]) / 6.0;
                let mut moments = vec![DVector::zeros(dim); n + 1];
                if n > 3 {
                    // rows 2..=n-2
                    let m = n - 3;
                    let mut rhs: Vec<DVector<f64>> = (2..=n - 2)
                        .map(|i| second_diff(i, &values[i - 1], &values[i + 1]))
                        .collect();
                    rhs[0] -= &m1;
                    rhs[m - 1] -= &mlast;
                    let sol = thomas(&vec![1.0; m], &vec![4.0; m], &vec![1.0; m], rhs);
                    for (k, v) in sol.into_iter().enumerate() {
                        moments[k + 2] = v;
                    }
                }
                moments[1] = m1;
                moments[n - 1] = mlast;
                moments[0] = &moments[1] * 2.0 - &moments[2];
                moments[n] = &moments[n - 1] * 2.0 - &moments[n - 2];
                moments
            }
            EndCondition::Periodic => {
                let rhs: Vec<DVector<f64>> = (0..n)
                    .map(|i| {
                        let prev = if i == 0 {
                            &values[n - 1]
                        } else {
                            &values[i - 1]
                        };
                        second_diff(i, prev, &values[i + 1])
                    })
                    .collect();
                let mut moments = cyclic_141(rhs);
                moments.push(moments[0].clone());
                moments
            }
        };
        CubicSpline {
            t0,
            h,
            values,
            moments,
        }
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.values.len() - 1;
        let pos = (t - self.t0) / self.h;
        let i = (pos.floor().max(0.0) as usize).min(n - 1);
        let left = t - (self.t0 + i as f64 * self.h);
        let right = self.h - left;
        (i, left, right)
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        let (i, l, r) = self.locate(t);
        let h = self.h;
        let (y0, y1) = (&self.values[i], &self.values[i + 1]);
        let (m0, m1) = (&self.moments[i], &self.moments[i + 1]);
        m0 * (r * r * r / (6.0 * h))
            + m1 * (l * l * l / (6.0 * h))
            + (y0 / h - m0 * (h / 6.0)) * r
            + (y1 / h - m1 * (h / 6.0)) * l
    }

    pub fn derivative(&self, t: f64) -> DVector<f64> {
        let (i, l, r) = self.locate(t);
        let h = self.h;
        let (y0, y1) = (&self.values[i], &self.values[i + 1]);
        let (m0, m1) = (&self.moments[i], &self.moments[i + 1]);
        m1 * (l * l / (2.0 * h)) - m0 * (r * r / (2.0 * h)) + (y1 - y0) / h - (m1 - m0) * (h / 6.0)
    }
}

/// Thomas algorithm for a tridiagonal system with several right-hand sides packed
/// as vectors. `a` is the sub-diagonal (a[0] unused), `c` the super-diagonal.
fn thomas(a: &[f64], b: &[f64], c: &[f64], mut r: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let m = b.len();
    let mut cp = vec![0.0; m];
    let mut denom = b[0];
    cp[0] = c[0] / denom;
    r[0] /= denom;
    for i in 1..m {
        denom = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / denom;
        let prev = r[i - 1].clone();
        r[i] -= prev * a[i];
        r[i] /= denom;
    }
    for i in (0..m - 1).rev() {
        let next = r[i + 1].clone();
        r[i] -= next * cp[i];
    }
    r
}

/// Solve the periodic system `x_{i-1} + 4 x_i + x_{i+1} = r_i` (Sherman-Morrison).
fn cyclic_141(r: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let m = r.len();
    let dim = r[0].len();
    let (alpha, beta) = (1.0, 1.0);
    let gamma = -4.0;
    let mut b = vec![4.0; m];
    b[0] -= gamma;
    b[m - 1] -= alpha * beta / gamma;
    let a = vec![1.0; m];
    let c = vec![1.0; m];
    let x = thomas(&a, &b, &c, r);
    let mut u = vec![DVector::zeros(1); m];
    u[0][0] = gamma;
    u[m - 1][0] = alpha;
    let z = thomas(&a, &b, &c, u);
    let denom = 1.0 + z[0][0] + beta * z[m - 1][0] / gamma;
    let fact = (&x[0] + &x[m - 1] * (beta / gamma)) / denom;
    x.into_iter()
        .zip(z)
        .map(|(xi, zi)| {
            let mut out = xi;
            out.axpy(-zi[0], &fact, 1.0);
            debug_assert_eq!(out.len(), dim);
            out
        })
        .collect()
}
