//! Quadrature rules: globally adaptive Gauss-Kronrod (21 points) for
//! scalar or vector valued integrands, and fixed Gauss-Legendre rules.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: closed under addition and real scaling.
pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    /// `self += w * other`
    fn axpy(&mut self, w: f64, other: &Self);
    fn norm(&self) -> f64;
    fn dist(&self, other: &Self) -> f64;
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, w: f64, other: &Self) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl QuadValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy(&mut self, w: f64, other: &Self) {
        *self += other * w;
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl QuadValue for Vec<Complex64> {
    fn zero_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }
    fn axpy(&mut self, w: f64, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b * w;
        }
    }
    fn norm(&self) -> f64 {
        crate::scalar::cvec::norm(self)
    }
    fn dist(&self, other: &Self) -> f64 {
        crate::scalar::cvec::dist(self, other)
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of equal panels the interval is cut into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 2000,
            initial_panels: 1,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Quadrature<V> {
    pub value: V,
    pub error: f64,
    pub intervals: usize,
    /// Integral of the pointwise norm; the ratio `l1 / |value|` measures cancellation.
    pub l1: f64,
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208734983632,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    l1: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod_panel<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Panel<V> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc.zero_like();
    let mut g = fc.zero_like();
    let mut l1 = WGK[10] * fc.norm();
    k.axpy(WGK[10], &fc);
    for i in 0..10 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k.axpy(WGK[i], &f1);
        k.axpy(WGK[i], &f2);
        l1 += WGK[i] * (f1.norm() + f2.norm());
        if i % 2 == 1 {
            g.axpy(WG[i / 2], &f1);
            g.axpy(WG[i / 2], &f2);
        }
    }
    let mut value = k.zero_like();
    value.axpy(h, &k);
    let mut gv = k.zero_like();
    gv.axpy(h, &g);
    let error = value.dist(&gv);
    Panel {
        a,
        b,
        value,
        error,
        l1: l1 * h.abs(),
    }
}

/// Globally adaptive 21-point Gauss-Kronrod quadrature on `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`. Returns
/// `ConvergenceFailure` when `max_intervals` is exhausted first.
pub fn integrate<V, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Quadrature<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let panels = opts.initial_panels.max(1);
    let step = (b - a) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(opts.max_intervals + panels);
    for i in 0..panels {
        let lo = a + step * i as f64;
        let hi = if i + 1 == panels { b } else { lo + step };
        heap.push(kronrod_panel(&mut f, lo, hi));
    }
    loop {
        let (value, error, l1) = summarize(&heap);
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target || error <= 1e3 * f64::EPSILON * l1 * 1e-3 {
            return Ok(Quadrature {
                value,
                error,
                intervals: heap.len(),
                l1,
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::ConvergenceFailure {
                what: "adaptive Gauss-Kronrod quadrature",
                estimate: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            let (value, error, l1) = summarize(&heap);
            return Ok(Quadrature {
                value,
                error,
                intervals: heap.len(),
                l1,
            });
        }
        heap.push(kronrod_panel(&mut f, worst.a, mid));
        heap.push(kronrod_panel(&mut f, mid, worst.b));
    }
}

fn summarize<V: QuadValue>(heap: &BinaryHeap<Panel<V>>) -> (V, f64, f64) {
    let mut iter = heap.iter();
    let first = iter.next().expect("heap is never empty");
    let mut value = first.value.clone();
    let mut error = first.error;
    let mut l1 = first.l1;
    for p in iter {
        value.axpy(1.0, &p.value);
        error += p.error;
        l1 += p.l1;
    }
    (value, error, l1)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
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
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels of
/// `order` nodes each; returns absolute nodes and weights.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let c = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(c + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}
