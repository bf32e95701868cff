//! Sampled tangent and cotangent paths on uniform time grids.
//!
//! A [`CotangentPath`] is a list of smooth segments; junctions between segments are
//! kept explicit so quadrature and integration restart there.

use std::f64::consts::TAU;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{sharp_matrix, BivectorField};
use crate::linalg::min_norm_solve;
use crate::spline::{CubicSpline, EndCondition};

/// Grid points per path segment (512 intervals).
pub const DEFAULT_SAMPLES: usize = 513;
pub const MIN_SAMPLES: usize = 9;
pub const DEFAULT_CLOSE_TOL: f64 = 1e-10;
pub const DEFAULT_COT_TOL: f64 = 1e-7;
/// Lift residual tolerance, relative to `max |gamma'|`.
pub const DEFAULT_LIFT_TOL: f64 = 1e-6;

fn check_len(expected: usize, v: &DVector<f64>) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidPath("non-finite sample".into()));
    }
    Ok(())
}

fn check_grid(t0: f64, t1: f64, count: usize) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidPath(format!(
            "bad time interval [{t0}, {t1}]"
        )));
    }
    if count < MIN_SAMPLES {
        return Err(Error::InvalidPath(format!(
            "{count} samples, at least {MIN_SAMPLES} required"
        )));
    }
    Ok(())
}

/// A smooth curve `gamma` sampled on a uniform grid over `[t0, t1]`, with
/// derivative samples.
#[derive(Debug, Clone)]
pub struct TangentPath {
    t0: f64,
    t1: f64,
    points: Vec<DVector<f64>>,
    velocities: Vec<DVector<f64>>,
    closed: bool,
    velocity_spline: CubicSpline,
}

impl TangentPath {
    fn assemble(
        t0: f64,
        t1: f64,
        points: Vec<DVector<f64>>,
        velocities: Vec<DVector<f64>>,
        closed: bool,
    ) -> Self {
        let h = (t1 - t0) / (points.len() - 1) as f64;
        let periodic = closed
            && (&velocities[0] - &velocities[velocities.len() - 1]).norm()
                <= DEFAULT_CLOSE_TOL.max(1e-9 * velocities[0].norm());
        let end = if periodic {
            EndCondition::Periodic
        } else {
            EndCondition::NotAKnot
        };
        let velocity_spline = CubicSpline::new(t0, h, velocities.clone(), end);
        TangentPath {
            t0,
            t1,
            points,
            velocities,
            closed,
            velocity_spline,
        }
    }

    /// Derivatives come from a cubic spline through the samples (periodic when
    /// `closed`, not-a-knot otherwise).
    pub fn from_samples(t0: f64, t1: f64, points: Vec<DVector<f64>>, closed: bool) -> Result<Self> {
        check_grid(t0, t1, points.len())?;
        let dim = points[0].len();
        for p in &points {
            check_len(dim, p)?;
        }
        if closed {
            let gap = (&points[0] - &points[points.len() - 1]).norm();
            if gap > DEFAULT_CLOSE_TOL {
                return Err(Error::InvalidPath(format!(
                    "closed path does not close up: gap {gap:e}"
                )));
            }
        }
        let h = (t1 - t0) / (points.len() - 1) as f64;
        let end = if closed {
            EndCondition::Periodic
        } else {
            EndCondition::NotAKnot
        };
        let spline = CubicSpline::new(t0, h, points.clone(), end);
        let velocities = (0..points.len())
            .map(|i| spline.derivative(t0 + i as f64 * h))
            .collect();
        Ok(TangentPath::assemble(t0, t1, points, velocities, closed))
    }

    pub(crate) fn with_velocities(
        t0: f64,
        t1: f64,
        points: Vec<DVector<f64>>,
        velocities: Vec<DVector<f64>>,
        closed: bool,
    ) -> Result<Self> {
        check_grid(t0, t1, points.len())?;
        if velocities.len() != points.len() {
            return Err(Error::InvalidPath("velocity sample count differs".into()));
        }
        let dim = points[0].len();
        for (p, v) in points.iter().zip(&velocities) {
            check_len(dim, p)?;
            check_len(dim, v)?;
        }
        if closed && (&points[0] - &points[points.len() - 1]).norm() > DEFAULT_CLOSE_TOL {
            return Err(Error::InvalidPath("closed path does not close up".into()));
        }
        Ok(TangentPath::assemble(t0, t1, points, velocities, closed))
    }

    pub fn from_fn<F>(t0: f64, t1: f64, samples: usize, closed: bool, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        check_grid(t0, t1, samples)?;
        let h = (t1 - t0) / (samples - 1) as f64;
        let mut points: Vec<DVector<f64>> = (0..samples)
            .map(|i| DVector::from_vec(f(t0 + i as f64 * h)))
            .collect();
        if closed && (&points[0] - &points[samples - 1]).norm() <= DEFAULT_CLOSE_TOL {
            points[samples - 1] = points[0].clone();
        }
        TangentPath::from_samples(t0, t1, points, closed)
    }

    /// `gamma(t) = center + cos(2 pi t / T) u + sin(2 pi t / T) v` on `[0, T]`.
    pub fn ellipse(
        center: &[f64],
        u: &[f64],
        v: &[f64],
        duration: f64,
        samples: usize,
    ) -> Result<Self> {
        let n = center.len();
        if u.len() != n || v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if u.len() != n { u.len() } else { v.len() },
            });
        }
        TangentPath::from_fn(0.0, duration, samples, true, |t| {
            let (s, c) = (TAU * t / duration).sin_cos();
            (0..n).map(|i| center[i] + c * u[i] + s * v[i]).collect()
        })
    }

    /// Straight segment from `a` to `b` on `[0, T]`.
    pub fn segment(a: &[f64], b: &[f64], duration: f64, samples: usize) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        TangentPath::from_fn(0.0, duration, samples, false, |t| {
            let s = t / duration;
            a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
        })
    }

    pub fn constant(point: &[f64], duration: f64, samples: usize) -> Result<Self> {
        TangentPath::from_fn(0.0, duration, samples, true, |_| point.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn start_time(&self) -> f64 {
        self.t0
    }

    pub fn end_time(&self) -> f64 {
        self.t1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / (self.points.len() - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.points.len() {
            self.t1
        } else {
            self.t0 + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn velocities(&self) -> &[DVector<f64>] {
        &self.velocities
    }

    pub fn start(&self) -> &DVector<f64> {
        &self.points[0]
    }

    pub fn end(&self) -> &DVector<f64> {
        &self.points[self.points.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let h = self.step();
        let pos = (t - self.t0) / h;
        let i = (pos.floor().max(0.0) as usize).min(self.points.len() - 2);
        (i, (t - self.time(i)) / h)
    }

    /// Cubic Hermite interpolation through the position and velocity samples.
    pub fn point_at(&self, t: f64) -> DVector<f64> {
        let (i, s) = self.locate(t);
        let h = self.step();
        let (p0, p1) = (&self.points[i], &self.points[i + 1]);
        let (v0, v1) = (&self.velocities[i], &self.velocities[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        p0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + v0 * (h * (s3 - 2.0 * s2 + s))
            + p1 * (-2.0 * s3 + 3.0 * s2)
            + v1 * (h * (s3 - s2))
    }

    /// Cubic spline through the velocity samples.
    pub fn velocity_at(&self, t: f64) -> DVector<f64> {
        self.velocity_spline.eval(t)
    }
}

/// One smooth piece of a cotangent path.
#[derive(Debug, Clone)]
pub struct CotangentSegment {
    base: TangentPath,
    alpha: Vec<DVector<f64>>,
    alpha_spline: CubicSpline,
}

impl CotangentSegment {
    fn new(base: TangentPath, alpha: Vec<DVector<f64>>) -> Result<Self> {
        if alpha.len() != base.len() {
            return Err(Error::InvalidPath(format!(
                "{} covector samples for {} base samples",
                alpha.len(),
                base.len()
            )));
        }
        for a in &alpha {
            check_len(base.dim(), a)?;
        }
        let periodic = base.is_closed()
            && (&alpha[0] - &alpha[alpha.len() - 1]).norm() <= DEFAULT_CLOSE_TOL
            && (&base.velocities()[0] - &base.velocities()[base.len() - 1]).norm()
                <= DEFAULT_CLOSE_TOL.max(1e-9 * base.velocities()[0].norm());
        let end = if periodic {
            EndCondition::Periodic
        } else {
            EndCondition::NotAKnot
        };
        let alpha_spline = CubicSpline::new(base.start_time(), base.step(), alpha.clone(), end);
        Ok(CotangentSegment {
            base,
            alpha,
            alpha_spline,
        })
    }

    pub fn base(&self) -> &TangentPath {
        &self.base
    }

    pub fn covectors(&self) -> &[DVector<f64>] {
        &self.alpha
    }

    pub fn covector_at(&self, t: f64) -> DVector<f64> {
        self.alpha_spline.eval(t)
    }

    pub fn start_time(&self) -> f64 {
        self.base.start_time()
    }

    pub fn end_time(&self) -> f64 {
        self.base.end_time()
    }

    fn shifted(&self, dt: f64) -> Result<Self> {
        let b = &self.base;
        let base = TangentPath::with_velocities(
            b.t0 + dt,
            b.t1 + dt,
            b.points.clone(),
            b.velocities.clone(),
            b.closed,
        )?;
        CotangentSegment::new(base, self.alpha.clone())
    }
}

/// A piecewise smooth cotangent path `alpha` over `gamma = pr(alpha)`.
#[derive(Debug, Clone)]
pub struct CotangentPath {
    segments: Vec<CotangentSegment>,
}

impl CotangentPath {
    /// Pair a tangent path with covector samples on the same grid. The cotangent
    /// condition is not checked here; see [`cotangent_residual`].
    pub fn new(base: TangentPath, alpha: Vec<DVector<f64>>) -> Result<Self> {
        Ok(CotangentPath {
            segments: vec![CotangentSegment::new(base, alpha)?],
        })
    }

    /// `gamma = x0`, `alpha = a` on `[0, duration]`; `a` must lie in the kernel of
    /// `Pi(x0)`.
    pub fn constant_loop(
        pi: &BivectorField,
        x0: &[f64],
        a: &[f64],
        duration: f64,
        samples: usize,
        tau_cot: f64,
    ) -> Result<Self> {
        let a = a.to_vec();
        CotangentPath::stationary(pi, x0, duration, samples, tau_cot, move |_| a.clone())
    }

    /// Loop sitting at `x0` with a time-varying kernel covector `a(t)`.
    pub fn stationary<F>(
        pi: &BivectorField,
        x0: &[f64],
        duration: f64,
        samples: usize,
        tau_cot: f64,
        a: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        let m = pi.eval(x0)?;
        let base = TangentPath::constant(x0, duration, samples)?;
        let mut alpha = Vec::with_capacity(samples);
        for i in 0..samples {
            let v = DVector::from_vec(a(base.time(i)));
            check_len(pi.dim(), &v)?;
            let residual = sharp_matrix(&m, v.as_slice()).norm();
            if residual > tau_cot {
                return Err(Error::CotangentViolation {
                    residual,
                    tolerance: tau_cot,
                });
            }
            alpha.push(v);
        }
        CotangentPath::new(base, alpha)
    }

    pub fn segments(&self) -> &[CotangentSegment] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].base.dim()
    }

    pub fn start_time(&self) -> f64 {
        self.segments[0].start_time()
    }

    pub fn end_time(&self) -> f64 {
        self.segments[self.segments.len() - 1].end_time()
    }

    pub fn start_point(&self) -> &DVector<f64> {
        self.segments[0].base.start()
    }

    pub fn end_point(&self) -> &DVector<f64> {
        self.segments[self.segments.len() - 1].base.end()
    }

    pub fn start_covector(&self) -> &DVector<f64> {
        &self.segments[0].alpha[0]
    }

    pub fn end_covector(&self) -> &DVector<f64> {
        let s = &self.segments[self.segments.len() - 1];
        &s.alpha[s.alpha.len() - 1]
    }

    /// `gamma(t)`, taken from the segment containing `t`.
    pub fn point_at(&self, t: f64) -> DVector<f64> {
        let seg = self
            .segments
            .iter()
            .find(|s| t <= s.end_time())
            .unwrap_or(&self.segments[self.segments.len() - 1]);
        seg.base.point_at(t)
    }

    /// The base curve closes up.
    pub fn is_closed(&self) -> bool {
        (self.start_point() - self.end_point()).norm() <= DEFAULT_CLOSE_TOL
    }

    /// Both the base curve and the covectors close up.
    pub fn is_loop(&self) -> bool {
        self.is_closed()
            && (self.start_covector() - self.end_covector()).norm() <= DEFAULT_CLOSE_TOL
    }

    /// Same path on `[t0 + dt, t1 + dt]`.
    pub fn shifted(&self, dt: f64) -> Result<Self> {
        Ok(CotangentPath {
            segments: self
                .segments
                .iter()
                .map(|s| s.shifted(dt))
                .collect::<Result<_>>()?,
        })
    }

    /// The path traversed backwards over the same interval: `gamma(a + b - t)`
    /// with covectors `-alpha(a + b - t)`.
    pub fn reversed(&self) -> Self {
        let (a, b) = (self.start_time(), self.end_time());
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| {
                let base = &s.base;
                let points: Vec<_> = base.points.iter().rev().cloned().collect();
                let vel: Vec<_> = base.velocities.iter().rev().map(|v| -v).collect();
                let alpha: Vec<_> = s.alpha.iter().rev().map(|v| -v).collect();
                let tb = TangentPath::with_velocities(
                    a + b - base.t1,
                    a + b - base.t0,
                    points,
                    vel,
                    base.closed,
                )
                .expect("reversal preserves grid validity");
                CotangentSegment::new(tb, alpha).expect("reversal preserves sample counts")
            })
            .collect();
        CotangentPath { segments }
    }

    /// Composition: `self` followed by `next`, with `next` shifted in time to start
    /// where `self` ends.
    pub fn concatenate(&self, next: &CotangentPath) -> Result<Self> {
        let gap = (self.end_point() - next.start_point()).norm();
        if gap > DEFAULT_CLOSE_TOL {
            return Err(Error::EndpointMismatch { gap });
        }
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: next.dim(),
            });
        }
        let moved = next.shifted(self.end_time() - next.start_time())?;
        let mut segments = self.segments.clone();
        segments.extend(moved.segments);
        Ok(CotangentPath { segments })
    }

    /// `alpha^phi(s) = phi'(s) alpha(phi(s))` over `gamma(phi(s))`. Each segment
    /// keeps its sample count; junctions move to their preimages under `phi`.
    pub fn reparameterize(&self, phi: &dyn TimeWarp) -> Result<Self> {
        let (s0, s1) = phi.domain();
        let (a, c) = (self.start_time(), self.end_time());
        let scale = 1e-9 * (1.0 + a.abs().max(c.abs()));
        if !(s1 > s0) || (phi.value(s0) - a).abs() > scale || (phi.value(s1) - c).abs() > scale {
            return Err(Error::InvalidPath(format!(
                "time warp must map [{s0}, {s1}] onto [{a}, {c}]"
            )));
        }
        let mut bounds = vec![s0];
        for seg in &self.segments[..self.segments.len() - 1] {
            bounds.push(invert_warp(phi, seg.end_time(), s0, s1));
        }
        bounds.push(s1);

        let mut segments = Vec::with_capacity(self.segments.len());
        for (k, seg) in self.segments.iter().enumerate() {
            let (lo, hi) = (bounds[k], bounds[k + 1]);
            let count = seg.base.len();
            let h = (hi - lo) / (count - 1) as f64;
            let mut points = Vec::with_capacity(count);
            let mut vel = Vec::with_capacity(count);
            let mut alpha = Vec::with_capacity(count);
            for i in 0..count {
                let s = if i + 1 == count {
                    hi
                } else {
                    lo + i as f64 * h
                };
                let d = phi.derivative(s);
                let interior = i > 0 && i + 1 < count;
                if !(d > 0.0 || (!interior && d == 0.0)) {
                    return Err(Error::NonMonotone { at: s });
                }
                let t = phi.value(s).clamp(seg.start_time(), seg.end_time());
                points.push(seg.base.point_at(t));
                vel.push(seg.base.velocity_at(t) * d);
                alpha.push(seg.covector_at(t) * d);
            }
            if !(hi > lo) {
                return Err(Error::NonMonotone { at: lo });
            }
            let base = TangentPath::with_velocities(lo, hi, points, vel, seg.base.closed)?;
            segments.push(CotangentSegment::new(base, alpha)?);
        }
        Ok(CotangentPath { segments })
    }
}

/// Minimum-norm cotangent lift of a leaf-tangent path.
pub fn lift_min_norm(
    pi: &BivectorField,
    gamma: &TangentPath,
    tau_rank: f64,
    tau_lift: f64,
) -> Result<CotangentPath> {
    if gamma.dim() != pi.dim() {
        return Err(Error::DimensionMismatch {
            expected: pi.dim(),
            found: gamma.dim(),
        });
    }
    let vmax = gamma
        .velocities()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.norm()));
    let limit = tau_lift * vmax.max(f64::MIN_POSITIVE);
    let mut alpha = Vec::with_capacity(gamma.len());
    for (i, (x, v)) in gamma.points().iter().zip(gamma.velocities()).enumerate() {
        let m = pi.eval_unchecked(x.as_slice());
        // sharp(a) = Pi^T a
        let (a, residual) = min_norm_solve(&m.transpose(), v, tau_rank);
        if residual > limit && vmax > 0.0 {
            return Err(Error::NotLeafTangent {
                time: gamma.time(i),
                residual,
            });
        }
        alpha.push(a);
    }
    CotangentPath::new(gamma.clone(), alpha)
}

/// `max_t |sharp(alpha(t)) - gamma'(t)|` over every grid sample.
pub fn cotangent_residual(pi: &BivectorField, alpha: &CotangentPath) -> Result<f64> {
    if alpha.dim() != pi.dim() {
        return Err(Error::DimensionMismatch {
            expected: pi.dim(),
            found: alpha.dim(),
        });
    }
    let mut worst: f64 = 0.0;
    for seg in alpha.segments() {
        for ((x, v), a) in seg
            .base
            .points()
            .iter()
            .zip(seg.base.velocities())
            .zip(&seg.alpha)
        {
            let m = pi.eval_unchecked(x.as_slice());
            worst = worst.max((sharp_matrix(&m, a.as_slice()) - v).norm());
        }
    }
    Ok(worst)
}

/// An orientation-preserving reparameterization `phi: [s0, s1] -> [a, b]`.
pub trait TimeWarp {
    fn domain(&self) -> (f64, f64);
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
}

/// `phi(s) = t0 + (t1 - t0) (s - s0) / (s1 - s0)`.
#[derive(Debug, Clone, Copy)]
pub struct AffineWarp {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

impl TimeWarp for AffineWarp {
    fn domain(&self) -> (f64, f64) {
        self.from
    }
    fn value(&self, s: f64) -> f64 {
        let u = (s - self.from.0) / (self.from.1 - self.from.0);
        self.to.0 + u * (self.to.1 - self.to.0)
    }
    fn derivative(&self, _s: f64) -> f64 {
        (self.to.1 - self.to.0) / (self.from.1 - self.from.0)
    }
}

/// `phi(s) = t0 + (t1 - t0) u^p` with `u = (s - s0) / (s1 - s0)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerWarp {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub power: f64,
}

impl TimeWarp for PowerWarp {
    fn domain(&self) -> (f64, f64) {
        self.from
    }
    fn value(&self, s: f64) -> f64 {
        let u = ((s - self.from.0) / (self.from.1 - self.from.0)).clamp(0.0, 1.0);
        self.to.0 + (self.to.1 - self.to.0) * u.powf(self.power)
    }
    fn derivative(&self, s: f64) -> f64 {
        let w = self.from.1 - self.from.0;
        let u = ((s - self.from.0) / w).clamp(0.0, 1.0);
        (self.to.1 - self.to.0) * self.power * u.powf(self.power - 1.0) / w
    }
}

/// A warp from closures for the value and its derivative.
pub struct FnWarp<F, G> {
    pub from: (f64, f64),
    pub value: F,
    pub derivative: G,
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> TimeWarp for FnWarp<F, G> {
    fn domain(&self) -> (f64, f64) {
        self.from
    }
    fn value(&self, s: f64) -> f64 {
        (self.value)(s)
    }
    fn derivative(&self, s: f64) -> f64 {
        (self.derivative)(s)
    }
}

fn invert_warp(phi: &dyn TimeWarp, t: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi.value(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_RANK_TOL;
    use crate::presets;

    fn unit_circle(samples: usize) -> TangentPath {
        TangentPath::ellipse(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], 1.0, samples).unwrap()
    }

    #[test]
    fn residual_examples() {
        let aff = presets::aff1().bivector();
        let loop0 =
            CotangentPath::constant_loop(&aff, &[0.0, 0.0], &[0.3, -2.0], 1.0, 33, 1e-7).unwrap();
        assert_eq!(cotangent_residual(&aff, &loop0).unwrap(), 0.0);

        let sym = presets::symplectic_r2();
        let gamma = TangentPath::from_fn(0.0, TAU, 257, true, |t| vec![t.cos(), t.sin()]).unwrap();
        let zeros = vec![DVector::zeros(2); 257];
        let path = CotangentPath::new(gamma, zeros).unwrap();
        let r = cotangent_residual(&sym, &path).unwrap();
        assert!((r - 1.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn lift_of_circle_in_symplectic_plane() {
        let sym = presets::symplectic_r2();
        let gamma = unit_circle(DEFAULT_SAMPLES);
        let alpha = lift_min_norm(&sym, &gamma, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL).unwrap();
        assert!(cotangent_residual(&sym, &alpha).unwrap() <= 1e-8);
        // Pointwise inverse of the 2x2 matrix: sharp(a) = (-a2, a1), so a = (v2, -v1).
        for (i, a) in alpha.segments()[0].covectors().iter().enumerate() {
            let t = gamma.time(i);
            let v = [-TAU * (TAU * t).sin(), TAU * (TAU * t).cos()];
            assert!((a[0] - v[1]).abs() < 1e-6 && (a[1] + v[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn lift_of_constant_path_is_zero() {
        let so3 = presets::so3().bivector();
        let gamma = TangentPath::constant(&[0.2, 0.3, 0.4], 1.0, 17).unwrap();
        let alpha = lift_min_norm(&so3, &gamma, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL).unwrap();
        assert!(alpha.segments()[0]
            .covectors()
            .iter()
            .all(|a| a.norm() == 0.0));
    }

    #[test]
    fn radial_segment_is_not_leaf_tangent() {
        let so3 = presets::so3().bivector();
        let gamma = TangentPath::segment(&[0.0, 0.0, 0.0], &[2.0, 0.0, 0.0], 2.0, 33).unwrap();
        let err = lift_min_norm(&so3, &gamma, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotLeafTangent { .. }));
    }

    #[test]
    fn constant_loop_kernel_condition() {
        let so3 = presets::so3().bivector();
        assert!(CotangentPath::constant_loop(
            &so3,
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0],
            1.0,
            17,
            1e-7
        )
        .is_ok());
        let err =
            CotangentPath::constant_loop(&so3, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], 1.0, 17, 1e-7)
                .unwrap_err();
        assert!(matches!(err, Error::CotangentViolation { .. }));
        let lp = CotangentPath::constant_loop(&so3, &[0.0; 3], &[1.0, -2.0, 0.5], 1.0, 17, 1e-7)
            .unwrap();
        assert!(lp.is_loop());
    }

    #[test]
    fn reparameterize_examples() {
        let sym = presets::symplectic_r2();
        let alpha = lift_min_norm(
            &sym,
            &unit_circle(DEFAULT_SAMPLES),
            DEFAULT_RANK_TOL,
            DEFAULT_LIFT_TOL,
        )
        .unwrap();

        let id = AffineWarp {
            from: (0.0, 1.0),
            to: (0.0, 1.0),
        };
        let same = alpha.reparameterize(&id).unwrap();
        for (a, b) in same.segments()[0]
            .covectors()
            .iter()
            .zip(alpha.segments()[0].covectors())
        {
            assert!((a - b).norm() < 1e-12);
        }

        let sq = PowerWarp {
            from: (0.0, 1.0),
            to: (0.0, 1.0),
            power: 2.0,
        };
        let warped = alpha.reparameterize(&sq).unwrap();
        assert!(cotangent_residual(&sym, &warped).unwrap() <= 1e-6);

        let aff = presets::aff1().bivector();
        let lp =
            CotangentPath::constant_loop(&aff, &[0.0, 0.0], &[1.0, 2.0], 3.0, 17, 1e-7).unwrap();
        let stretch = AffineWarp {
            from: (0.0, 1.0),
            to: (0.0, 3.0),
        };
        let r = lp.reparameterize(&stretch).unwrap();
        assert_eq!(r.end_time(), 1.0);
        assert!((r.start_covector()[1] - 6.0).abs() < 1e-12);

        let backwards = FnWarp {
            from: (0.0, 1.0),
            value: |s: f64| 1.0 - s,
            derivative: |_| -1.0,
        };
        assert!(alpha.reparameterize(&backwards).is_err());
        let wobble = FnWarp {
            from: (0.0, 1.0),
            value: |s: f64| s + 0.3 * (TAU * s).sin(),
            derivative: |s: f64| 1.0 + 0.3 * TAU * (TAU * s).cos(),
        };
        assert!(matches!(
            alpha.reparameterize(&wobble),
            Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn concatenate_examples() {
        let sym = presets::symplectic_r2();
        let lift = |from: f64, to: f64| {
            let g = TangentPath::from_fn(0.0, 1.0, 129, false, |t| {
                let th = from + (to - from) * t;
                vec![th.cos(), th.sin()]
            })
            .unwrap();
            lift_min_norm(&sym, &g, DEFAULT_RANK_TOL, DEFAULT_LIFT_TOL).unwrap()
        };
        let q1 = lift(0.0, TAU / 4.0);
        let q2 = lift(TAU / 4.0, TAU / 2.0);
        let half = q1.concatenate(&q2).unwrap();
        assert_eq!(half.segments().len(), 2);
        assert!((half.end_point() - DVector::from_vec(vec![-1.0, 0.0])).norm() < 1e-12);
        assert!(cotangent_residual(&sym, &half).unwrap() < 1e-7);

        let there_and_back = q1.concatenate(&q1.reversed()).unwrap();
        assert!(there_and_back.is_closed());

        let off = lift(0.1, 1.0);
        assert!(matches!(
            q1.concatenate(&off),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn rejects_short_or_open_loops() {
        assert!(TangentPath::constant(&[0.0], 1.0, 5).is_err());
        let bad = TangentPath::from_fn(0.0, 1.0, 17, true, |t| vec![t]);
        assert!(bad.is_err());
    }
}
