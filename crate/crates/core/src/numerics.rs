//! Shared numerical kernels: central finite differences for vector
//! calculus, tensor-product Gauss-Legendre quadrature and residual
//! bookkeeping.
//!
//! Everything here is independent of the waveguide algebra so it can serve
//! as the numerical oracle for the closed forms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WaveguideError};

pub type Vec3 = [f64; 3];

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: Vec3) -> f64 {
    a[0].abs().max(a[1].abs()).max(a[2].abs())
}

/// Axis-aligned box a stencil must stay inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl Bounds {
    fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|i| {
            let tol = 1e-12 * (self.max[i] - self.min[i]).abs().max(f64::MIN_POSITIVE);
            p[i] >= self.min[i] - tol && p[i] <= self.max[i] + tol
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    fn reach(self) -> f64 {
        match self {
            StencilOrder::Second => 1.0,
            StencilOrder::Fourth => 2.0,
        }
    }
}

/// Central finite-difference stencil: spatial steps per axis, a time step
/// and the formal order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub h: Vec3,
    pub ht: f64,
    pub order: StencilOrder,
    pub bounds: Option<Bounds>,
}

impl Stencil {
    pub fn new(h: Vec3, ht: f64, order: StencilOrder) -> Self {
        Self {
            h,
            ht,
            order,
            bounds: None,
        }
    }

    pub fn uniform(h: f64, ht: f64) -> Self {
        Self::new([h; 3], ht, StencilOrder::Second)
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    /// Same stencil with every step multiplied by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.h = scale(self.h, factor);
        self.ht *= factor;
        self
    }

    /// Checks that every stencil node around `p` stays inside the bounds.
    pub fn check(&self, p: Vec3) -> Result<()> {
        assert!(
            self.h.iter().all(|&h| h > 0.0) && self.ht > 0.0,
            "stencil steps must be positive"
        );
        if let Some(b) = &self.bounds {
            let r = self.order.reach();
            for i in 0..3 {
                for s in [-r, r] {
                    let mut q = p;
                    q[i] += s * self.h[i];
                    if !b.contains(q) {
                        return Err(WaveguideError::StencilOutOfBounds { point: p });
                    }
                }
            }
        }
        Ok(())
    }
}

/// First derivative of a one-dimensional function at 0 with step `h`.
pub fn d1<F: Fn(f64) -> f64>(g: F, h: f64, order: StencilOrder) -> f64 {
    match order {
        StencilOrder::Second => (g(h) - g(-h)) / (2.0 * h),
        StencilOrder::Fourth => (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h),
    }
}

/// Second derivative of a one-dimensional function at 0 with step `h`.
pub fn d2<F: Fn(f64) -> f64>(g: F, h: f64, order: StencilOrder) -> f64 {
    match order {
        StencilOrder::Second => (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h),
        StencilOrder::Fourth => {
            (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h))
                / (12.0 * h * h)
        }
    }
}

fn shifted(p: Vec3, axis: usize, s: f64) -> Vec3 {
    let mut q = p;
    q[axis] += s;
    q
}

/// Partial derivative of a scalar field along a spatial axis.
pub fn fd_partial<F>(field: &F, p: Vec3, t: f64, axis: usize, st: &Stencil) -> Result<f64>
where
    F: Fn(Vec3, f64) -> f64,
{
    st.check(p)?;
    Ok(d1(|s| field(shifted(p, axis, s), t), st.h[axis], st.order))
}

pub fn fd_grad<F>(field: &F, p: Vec3, t: f64, st: &Stencil) -> Result<Vec3>
where
    F: Fn(Vec3, f64) -> f64,
{
    st.check(p)?;
    let mut g = [0.0; 3];
    for (axis, gi) in g.iter_mut().enumerate() {
        *gi = d1(|s| field(shifted(p, axis, s), t), st.h[axis], st.order);
    }
    Ok(g)
}

/// Jacobian `J[i][j] = d F_i / d x_j` of a vector field.
pub fn fd_jacobian<F>(field: &F, p: Vec3, t: f64, st: &Stencil) -> Result<[Vec3; 3]>
where
    F: Fn(Vec3, f64) -> Vec3,
{
    st.check(p)?;
    let mut jac = [[0.0; 3]; 3];
    for axis in 0..3 {
        let h = st.h[axis];
        for (i, row) in jac.iter_mut().enumerate() {
            row[axis] = d1(|s| field(shifted(p, axis, s), t)[i], h, st.order);
        }
    }
    Ok(jac)
}

pub fn fd_div<F>(field: &F, p: Vec3, t: f64, st: &Stencil) -> Result<f64>
where
    F: Fn(Vec3, f64) -> Vec3,
{
    let j = fd_jacobian(field, p, t, st)?;
    Ok(j[0][0] + j[1][1] + j[2][2])
}

pub fn fd_curl<F>(field: &F, p: Vec3, t: f64, st: &Stencil) -> Result<Vec3>
where
    F: Fn(Vec3, f64) -> Vec3,
{
    let j = fd_jacobian(field, p, t, st)?;
    Ok([j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]])
}

/// Time derivative of a vector field.
pub fn fd_dt<F>(field: &F, p: Vec3, t: f64, st: &Stencil) -> Result<Vec3>
where
    F: Fn(Vec3, f64) -> Vec3,
{
    st.check(p)?;
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = d1(|s| field(p, t + s)[i], st.ht, st.order);
    }
    Ok(out)
}

pub fn fd_dt_scalar<F>(field: &F, p: Vec3, t: f64, st: &Stencil) -> Result<f64>
where
    F: Fn(Vec3, f64) -> f64,
{
    st.check(p)?;
    Ok(d1(|s| field(p, t + s), st.ht, st.order))
}

/// Observed convergence order from residuals at step `h` and `h / ratio`.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}

/// Maximum absolute residual together with the magnitude scale it should be
/// judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub max_abs: f64,
    pub scale: f64,
}

impl Default for Residual {
    fn default() -> Self {
        Self {
            max_abs: 0.0,
            scale: 0.0,
        }
    }
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_abs / self.scale
        } else {
            self.max_abs
        }
    }

    pub fn record(&mut self, residual: f64, scale: f64) {
        self.max_abs = self.max_abs.max(residual.abs());
        self.scale = self.scale.max(scale.abs());
    }

    pub fn merge(self, other: Residual) -> Residual {
        Residual {
            max_abs: self.max_abs.max(other.max_abs),
            scale: self.scale.max(other.scale),
        }
    }

    /// Worst relative residual of a set, each judged against its own scale.
    pub fn worst_relative<'a, I: IntoIterator<Item = &'a Residual>>(items: I) -> f64 {
        items
            .into_iter()
            .map(Residual::relative)
            .fold(0.0, f64::max)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, dpn) = legendre_with_derivative(n, x);
            dp = dpn;
            let dx = p / dpn;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dpn) = legendre_with_derivative(n, x);
        if dpn != 0.0 {
            dp = dpn;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre rule on one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub order: usize,
    pub panels: usize,
}

impl AxisRule {
    pub fn gauss_legendre(a: f64, b: f64, order: usize, panels: usize) -> Self {
        assert!(panels >= 1, "at least one panel required");
        let (xs, ws) = gauss_legendre(order);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            for (x, w) in xs.iter().zip(&ws) {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        Self {
            nodes,
            weights,
            a,
            b,
            order,
            panels,
        }
    }

    /// Polynomials up to this degree are integrated exactly on each panel.
    pub fn exact_degree(&self) -> usize {
        2 * self.order - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Tensor product of one-dimensional rules.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub axes: Vec<AxisRule>,
}

impl QuadratureRule {
    pub fn new(axes: Vec<AxisRule>) -> Self {
        assert!(
            (1..=3).contains(&axes.len()),
            "tensor rules of dimension 1 to 3 are supported"
        );
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn points(&self) -> usize {
        self.axes.iter().map(AxisRule::len).product()
    }

    /// Integrates an `N`-component integrand. The outer axis is split
    /// across threads; partial sums are reduced in node order so the result
    /// does not depend on the thread count.
    pub fn integrate_vec<const N: usize, F>(&self, f: F) -> [f64; N]
    where
        F: Fn(&[f64]) -> [f64; N] + Sync,
    {
        let outer = &self.axes[0];
        let inner = &self.axes[1..];
        let partial: Vec<[f64; N]> = outer
            .nodes
            .par_iter()
            .zip(outer.weights.par_iter())
            .map(|(&x0, &w0)| {
                let mut acc = [0.0; N];
                let mut point = vec![0.0; self.axes.len()];
                point[0] = x0;
                accumulate_inner(inner, 1, &mut point, w0, &f, &mut acc);
                acc
            })
            .collect();
        let mut total = [0.0; N];
        for p in partial {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        total
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.integrate_vec(|p| [f(p)])[0]
    }
}

fn accumulate_inner<const N: usize, F>(
    inner: &[AxisRule],
    depth: usize,
    point: &mut [f64],
    weight: f64,
    f: &F,
    acc: &mut [f64; N],
) where
    F: Fn(&[f64]) -> [f64; N],
{
    match inner.split_first() {
        None => {
            let v = f(point);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += weight * x;
            }
        }
        Some((axis, rest)) => {
            for (&x, &w) in axis.nodes.iter().zip(&axis.weights) {
                point[depth] = x;
                accumulate_inner(rest, depth + 1, point, weight * w, f, acc);
            }
        }
    }
}

/// Integrates `f` with the given tensor rule.
pub fn integrate<F>(f: F, rule: &QuadratureRule) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    rule.integrate(f)
}
