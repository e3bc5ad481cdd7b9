//! Boundary functions `f` on `C \ R`, the Bruggeman transform
//! `psi(z) = f(z) - z^{-2nu-1} eta(S) f(-1/z)` and its inverse, and the
//! residual checks that characterize period functions.
//!
//! For a cusp form, `psi` is evaluated either from the Fourier data of `f`
//! or, near the positive real axis where that series is useless, from a
//! Mellin-Barnes integral over the completed L-functions.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l_functions::FoldTable;
use crate::maass_forms::{Evaluated, MaassFormData};
use crate::quadrature::{integrate, QuadOptions};
use crate::representations::Representation;
use crate::scalar::{cvec, Matrix};
use crate::special_functions::{bessel_k, c, gamma, ln_gamma, on_cut, power};

type C = Complex64;
type VecFn = Arc<dyn Fn(C) -> Result<Evaluated> + Send + Sync>;

/// Smallest `|Im z|` at which a truncated Fourier series is evaluated.
pub const DEFAULT_FLOOR: f64 = 0.05;

/// Offsets used for one-sided limits onto the real axis.
pub const DEFAULT_DELTAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

fn zeros(dim: usize) -> Vec<C> {
    vec![c(0.0, 0.0); dim]
}

fn exact(value: Vec<C>) -> Evaluated {
    Evaluated { value, tail: 0.0 }
}

/// `z^{-2 nu - 1}` on the principal branch.
pub fn automorphy_factor(z: C, nu: C) -> Result<C> {
    power(z, -(nu * 2.0 + 1.0))
}

fn is_half_integer(nu: C) -> bool {
    let x = nu.re - 0.5;
    nu.im.abs() < 1e-14 && (x - x.round()).abs() < 1e-12
}

/// Where the data of a [`BoundaryFunction`] came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryMeta {
    Form { nu: [f64; 2], k_max: i64, source: String },
    Synthetic { terms: usize },
    Inverted { nu: [f64; 2] },
}

struct Series {
    width: f64,
    /// `(k, w_k)` for `k > 0`, used in the upper half-plane.
    upper: Vec<(f64, Vec<C>)>,
    /// `(k, w_k)` for `k < 0`, used in the lower half-plane.
    lower: Vec<(f64, Vec<C>)>,
    at_inf: [Vec<C>; 2],
    tail: Option<TailModel>,
}

/// Omitted terms are assumed to obey `|w_k| <= bound |k|^growth`.
struct TailModel {
    bound: f64,
    growth: f64,
    k_up: f64,
    k_low: f64,
}

impl Series {
    fn terms(&self, upper: bool) -> &[(f64, Vec<C>)] {
        if upper {
            &self.upper
        } else {
            &self.lower
        }
    }

    fn eval(&self, z: C) -> Evaluated {
        let upper = z.im > 0.0;
        let mut out = self.at_inf[if upper { 0 } else { 1 }].clone();
        let scale = c(0.0, 2.0 * PI / self.width);
        for (k, w) in self.terms(upper) {
            let e = (scale * z * *k).exp();
            cvec::axpy(&mut out, e, w);
        }
        Evaluated {
            value: out,
            tail: self.tail_at(z.im),
        }
    }

    /// The upper series and constant at any `z`; entire when there is no tail.
    fn eval_upper(&self, z: C) -> Vec<C> {
        let mut out = self.at_inf[0].clone();
        let scale = c(0.0, 2.0 * PI / self.width);
        for (k, w) in &self.upper {
            cvec::axpy(&mut out, (scale * z * *k).exp(), w);
        }
        out
    }

    fn tail_at(&self, y: f64) -> f64 {
        let Some(t) = &self.tail else {
            return 0.0;
        };
        let k0 = if y > 0.0 { t.k_up } else { t.k_low };
        let q = (-2.0 * PI * y.abs() / self.width).exp();
        if q >= 1.0 - 1e-9 {
            return f64::INFINITY;
        }
        let mut k = k0 + 1.0;
        let mut sum = 0.0;
        loop {
            let term = t.bound * k.powf(t.growth) * q.powf(k);
            sum += term;
            if term <= 1e-17 * sum || term == 0.0 {
                break;
            }
            if k > k0 + 1e6 {
                return f64::INFINITY;
            }
            k += 1.0;
        }
        sum
    }

    /// `sum |w_k| |q|^k` over the retained terms, for rounding estimates.
    fn abs_sum(&self, z: C) -> f64 {
        let upper = z.im > 0.0;
        let q = (-2.0 * PI * z.im.abs() / self.width).exp();
        cvec::norm(&self.at_inf[0])
            + self
                .terms(upper)
                .iter()
                .map(|(k, w)| cvec::norm(w) * q.powf(k.abs()))
                .sum::<f64>()
    }
}

#[derive(Clone)]
enum Backend {
    Series(Arc<Series>),
    Inverted(PeriodEvaluator),
}

/// A holomorphic function on `C \ R`, given by upper and lower Fourier
/// series or by inverting a period function.
#[derive(Clone)]
pub struct BoundaryFunction {
    n: u64,
    dim: usize,
    floor: f64,
    backend: Backend,
    meta: BoundaryMeta,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("n", &self.n)
            .field("dim", &self.dim)
            .field("floor", &self.floor)
            .field("meta", &self.meta)
            .finish()
    }
}

/// Projector of `eta(T)` onto its `exp(2 pi i k / N)`-eigenspace.
fn eigen_projector(eta: &Representation<C>, k: i64) -> Matrix<C> {
    let n = eta.n();
    let dim = eta.dim();
    let mut p = Matrix::zeros(dim);
    let mut tj = Matrix::identity(dim);
    for j in 0..n {
        let lam = C::from_polar(1.0 / n as f64, -2.0 * PI * (k * j as i64) as f64 / n as f64);
        p = p.add(&tj.scale(&lam));
        tj = tj.mul(eta.rho_t());
    }
    p
}

impl BoundaryFunction {
    /// `f_u(z) = sum_{k>0} k^nu e^{2 pi i k z/N} v_k` in the upper
    /// half-plane and `-sum_{k<0} |k|^nu e^{2 pi i k z/N} v_k` in the lower.
    pub fn from_form(form: &MaassFormData) -> Result<Self> {
        let nu = form.nu;
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let growth = 0.5 + nu.re.abs();
        let mut bound: f64 = 0.0;
        for (&k, v) in form.coeffs() {
            let ka = k.unsigned_abs() as f64;
            let kn = (nu * ka.ln()).exp();
            let w = if k > 0 {
                cvec::scale(v, kn)
            } else {
                cvec::scale(v, -kn)
            };
            bound = bound.max(cvec::norm(&w) / ka.powf(growth));
            if k > 0 {
                upper.push((ka, w));
            } else {
                lower.push((-ka, w));
            }
        }
        let k_up = upper.iter().map(|t| t.0).fold(0.0, f64::max);
        let k_low = lower.iter().map(|t| -t.0).fold(0.0, f64::max);
        let series = Series {
            width: form.n as f64,
            upper,
            lower,
            at_inf: [zeros(form.dim), zeros(form.dim)],
            tail: Some(TailModel {
                bound,
                growth,
                k_up,
                k_low,
            }),
        };
        Ok(BoundaryFunction {
            n: form.n,
            dim: form.dim,
            floor: DEFAULT_FLOOR,
            backend: Backend::Series(Arc::new(series)),
            meta: BoundaryMeta::Form {
                nu: [nu.re, nu.im],
                k_max: form.k_max(),
                source: form.source.clone(),
            },
        })
    }

    /// Exact trigonometric polynomials: `f(z) = c + sum_{k>0} e^{2 pi i k z/N} w_k`
    /// on the upper half-plane and `-c + sum_{k<0} ...` on the lower one.
    pub fn synthetic(n: u64, dim: usize, coeffs: BTreeMap<i64, Vec<C>>, constant: Vec<C>) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::Domain("N and dim must be positive".into()));
        }
        if constant.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: constant.len(),
            });
        }
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for (&k, w) in &coeffs {
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: w.len(),
                });
            }
            match k.signum() {
                1 => upper.push((k as f64, w.clone())),
                -1 => lower.push((k as f64, w.clone())),
                _ => {
                    return Err(Error::Domain(
                        "use the constant term instead of k = 0".into(),
                    ))
                }
            }
        }
        let neg = cvec::scale(&constant, c(-1.0, 0.0));
        let series = Series {
            width: n as f64,
            upper,
            lower,
            at_inf: [constant, neg],
            tail: None,
        };
        Ok(BoundaryFunction {
            n,
            dim,
            floor: 0.0,
            backend: Backend::Series(Arc::new(series)),
            meta: BoundaryMeta::Synthetic { terms: coeffs.len() },
        })
    }

    /// Random `T`-equivariant data: `w_k` projected onto the matching
    /// eigenspace of `eta(T)`, with `|w_k| ~ e^{-|k|}`.
    pub fn random_synthetic<R: Rng>(eta: &Representation<C>, k_max: i64, rng: &mut R) -> Result<Self> {
        let dim = eta.dim();
        let draw = |rng: &mut R| -> Vec<C> {
            (0..dim)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let mut coeffs = BTreeMap::new();
        for k in (-k_max..=k_max).filter(|k| *k != 0) {
            let v = eigen_projector(eta, k).apply(&draw(rng));
            coeffs.insert(k, cvec::scale(&v, c((-(k.abs() as f64)).exp(), 0.0)));
        }
        let constant = eigen_projector(eta, 0).apply(&draw(rng));
        Self::synthetic(eta.n(), dim, coeffs, constant)
    }

    /// `f = (psi(z) + z^{-2nu-1} eta(S) psi(-1/z)) / (1 + e^{-+2 pi i nu})`.
    pub fn from_period(psi: PeriodEvaluator) -> Result<Self> {
        let nu = psi.nu();
        if is_half_integer(nu) {
            return Err(Error::HalfIntegerNu { nu });
        }
        Ok(BoundaryFunction {
            n: psi.eta().n(),
            dim: psi.dim(),
            floor: 0.0,
            meta: BoundaryMeta::Inverted { nu: [nu.re, nu.im] },
            backend: Backend::Inverted(psi),
        })
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor.max(0.0);
        self
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn meta(&self) -> &BoundaryMeta {
        &self.meta
    }

    /// Value with a bound on the truncated terms.
    pub fn eval(&self, z: C) -> Result<Evaluated> {
        if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
            return Err(Error::Domain(format!("boundary functions live off the real axis, got {z}")));
        }
        if z.im.abs() < self.floor {
            return Err(Error::Domain(format!(
                "|Im z| = {:e} is below the evaluation floor {}",
                z.im.abs(),
                self.floor
            )));
        }
        match &self.backend {
            Backend::Series(s) => Ok(s.eval(z)),
            Backend::Inverted(p) => {
                let nu = p.nu();
                let g = inversion_numerator(p, nu, z)?;
                let factor = inversion_factor(nu, z);
                Ok(Evaluated {
                    value: cvec::scale(&g.value, factor.inv()),
                    tail: g.tail / factor.norm(),
                })
            }
        }
    }

    pub fn value(&self, z: C) -> Result<Vec<C>> {
        Ok(self.eval(z)?.value)
    }

    /// `(f(i inf), f(-i inf))` when known in closed form.
    pub fn at_infinity(&self) -> Option<[Vec<C>; 2]> {
        match &self.backend {
            Backend::Series(s) => Some(s.at_inf.clone()),
            Backend::Inverted(_) => None,
        }
    }

    /// `max |f(z+1) - eta(T) f(z)|` over `points`.
    pub fn t_shift_residual(&self, eta: &Representation<C>, points: &[C]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &z in points {
            let a = self.value(z + 1.0)?;
            let b = eta.rho_t().apply(&self.value(z)?);
            worst = worst.max(cvec::dist(&a, &b));
        }
        Ok(worst)
    }

    fn series_error(&self, z: C) -> Option<(f64, f64)> {
        match &self.backend {
            Backend::Series(s) => Some((s.tail_at(z.im), s.abs_sum(z))),
            Backend::Inverted(_) => None,
        }
    }
}

/// Alias of [`BoundaryFunction::from_form`].
pub fn f_from_form(form: &MaassFormData) -> Result<BoundaryFunction> {
    BoundaryFunction::from_form(form)
}

/// Which side of the real axis a limit is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
    Average,
}

/// Polynomial extrapolation to `h = 0` (Neville). The error estimate is
/// the change from dropping the largest `h`.
pub fn extrapolate_to_zero(h: &[f64], v: &[Vec<C>]) -> (Vec<C>, f64) {
    fn neville(h: &[f64], v: &[Vec<C>]) -> Vec<C> {
        let mut p: Vec<Vec<C>> = v.to_vec();
        let m = h.len();
        for level in 1..m {
            for i in 0..m - level {
                let (hi, hj) = (h[i], h[i + level]);
                p[i] = p[i]
                    .iter()
                    .zip(&p[i + 1])
                    .map(|(a, b)| (b * hi - a * hj) / (hi - hj))
                    .collect();
            }
        }
        p[0].clone()
    }
    let full = neville(h, v);
    if h.len() < 2 {
        return (full, f64::INFINITY);
    }
    let lower = neville(&h[1..], &v[1..]);
    let err = cvec::dist(&full, &lower);
    (full, err)
}

/// Limit of `g(x + i delta)` and/or `g(x - i delta)` as `delta -> 0`.
pub fn one_sided_limit<F>(g: F, x: f64, side: Side, deltas: &[f64]) -> Result<Evaluated>
where
    F: Fn(C) -> Result<Evaluated>,
{
    if deltas.is_empty() {
        return Err(Error::Domain("need at least one delta".into()));
    }
    let mut vals = Vec::with_capacity(deltas.len());
    let mut tail: f64 = 0.0;
    for &d in deltas {
        let v = match side {
            Side::Upper => g(c(x, d))?,
            Side::Lower => g(c(x, -d))?,
            Side::Average => {
                let a = g(c(x, d))?;
                let b = g(c(x, -d))?;
                Evaluated {
                    value: cvec::scale(&cvec::add(&a.value, &b.value), c(0.5, 0.0)),
                    tail: 0.5 * (a.tail + b.tail),
                }
            }
        };
        tail = tail.max(v.tail);
        vals.push(v.value);
    }
    let (value, err) = extrapolate_to_zero(deltas, &vals);
    Ok(Evaluated {
        value,
        tail: err + tail,
    })
}

fn check_dims(eta: &Representation<C>, dim: usize) -> Result<()> {
    if eta.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: eta.dim(),
        });
    }
    Ok(())
}

fn check_z(z: C) -> Result<()> {
    if on_cut(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::BranchCut { z });
    }
    if z.norm() < 1e-12 {
        return Err(Error::Domain(format!("z = {z} is too close to 0")));
    }
    Ok(())
}

/// `psi(z) = f(z) - z^{-2nu-1} eta(S) f(-1/z)` off the real axis, with the
/// truncation bounds of both terms.
pub fn bruggeman_eval(f: &BoundaryFunction, nu: C, eta: &Representation<C>, z: C) -> Result<Evaluated> {
    check_dims(eta, f.dim())?;
    check_z(z)?;
    if z.im == 0.0 {
        return one_sided_limit(|w| bruggeman_eval(f, nu, eta, w), z.re, Side::Average, &DEFAULT_DELTAS);
    }
    let a = f.eval(z)?;
    let w = -z.inv();
    let b = f.eval(w)?;
    let fac = automorphy_factor(z, nu)?;
    let sb = eta.rho_s().apply(&b.value);
    let mut out = a.value;
    cvec::axpy(&mut out, -fac, &sb);
    Ok(Evaluated {
        value: out,
        tail: a.tail + fac.norm() * eta.rho_s().frobenius() * b.tail,
    })
}

/// The Bruggeman transform. On the positive real axis the value is the
/// Richardson-extrapolated average of the limits from both sides.
pub fn bruggeman_psi(f: &BoundaryFunction, nu: C, eta: &Representation<C>, z: C) -> Result<Vec<C>> {
    Ok(bruggeman_eval(f, nu, eta, z)?.value)
}

/// One-sided limit of the Bruggeman transform at `x > 0`.
pub fn bruggeman_limit(
    f: &BoundaryFunction,
    nu: C,
    eta: &Representation<C>,
    x: f64,
    side: Side,
    deltas: &[f64],
) -> Result<Evaluated> {
    if !(x > 0.0) {
        return Err(Error::BranchCut { z: c(x, 0.0) });
    }
    one_sided_limit(|w| bruggeman_eval(f, nu, eta, w), x, side, deltas)
}

/// A vector-valued function on `C \ (-inf, 0]`, the candidate period
/// function, together with the `nu` and `eta` it is meant for.
#[derive(Clone)]
pub struct PeriodEvaluator {
    nu: C,
    dim: usize,
    eta: Arc<Representation<C>>,
    f: VecFn,
}

impl fmt::Debug for PeriodEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodEvaluator")
            .field("nu", &self.nu)
            .field("dim", &self.dim)
            .finish()
    }
}

impl PeriodEvaluator {
    /// Wraps an exact closure.
    pub fn new<F>(nu: C, eta: &Representation<C>, f: F) -> Self
    where
        F: Fn(C) -> Result<Vec<C>> + Send + Sync + 'static,
    {
        Self::with_error(nu, eta, move |z| f(z).map(exact))
    }

    /// Wraps a closure that reports its own error bound.
    pub fn with_error<F>(nu: C, eta: &Representation<C>, f: F) -> Self
    where
        F: Fn(C) -> Result<Evaluated> + Send + Sync + 'static,
    {
        PeriodEvaluator {
            nu,
            dim: eta.dim(),
            eta: Arc::new(eta.clone()),
            f: Arc::new(f),
        }
    }

    pub fn zero(nu: C, eta: &Representation<C>) -> Self {
        let dim = eta.dim();
        Self::new(nu, eta, move |_| Ok(zeros(dim)))
    }

    /// `psi` of a boundary function by the Bruggeman transform.
    pub fn from_boundary(f: BoundaryFunction, nu: C, eta: &Representation<C>) -> Result<Self> {
        check_dims(eta, f.dim())?;
        let e = eta.clone();
        Ok(Self::with_error(nu, eta, move |z| bruggeman_eval(&f, nu, &e, z)))
    }

    /// The period function of a cusp form; see [`FormPeriod`].
    pub fn from_form(form: &MaassFormData, eta: &Representation<C>) -> Result<Self> {
        Ok(FormPeriod::new(form, eta)?.into_evaluator())
    }

    /// `g(z) - z^{-2nu-1} eta(S) g(-1/z)` with `g` the upper Fourier
    /// polynomial of a synthetic boundary function, continued to all of
    /// `C \ (-inf, 0]`. Satisfies the Lewis equation on the whole cut plane
    /// when `f` is `T`-equivariant.
    pub fn from_upper_series(f: &BoundaryFunction, nu: C, eta: &Representation<C>) -> Result<Self> {
        check_dims(eta, f.dim())?;
        let series = match &f.backend {
            Backend::Series(s) if s.tail.is_none() => s.clone(),
            _ => {
                return Err(Error::Domain(
                    "only finite trigonometric boundary data can be continued".into(),
                ))
            }
        };
        let s_mat = eta.rho_s().clone();
        Ok(Self::new(nu, eta, move |z| {
            let mut v = series.eval_upper(z);
            let back = s_mat.apply(&series.eval_upper(-z.inv()));
            cvec::axpy(&mut v, -automorphy_factor(z, nu)?, &back);
            Ok(v)
        }))
    }

    /// `a p + b q`.
    pub fn linear_combination(a: C, p: &PeriodEvaluator, b: C, q: &PeriodEvaluator) -> Result<Self> {
        if p.dim != q.dim {
            return Err(Error::DimensionMismatch {
                expected: p.dim,
                found: q.dim,
            });
        }
        let (p, q) = (p.clone(), q.clone());
        let eta = p.eta.clone();
        Ok(Self::with_error(p.nu, &eta, move |z| {
            let x = p.eval(z)?;
            let y = q.eval(z)?;
            let mut v = cvec::scale(&x.value, a);
            cvec::axpy(&mut v, b, &y.value);
            Ok(Evaluated {
                value: v,
                tail: a.norm() * x.tail + b.norm() * y.tail,
            })
        }))
    }

    pub fn nu(&self) -> C {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eta(&self) -> &Representation<C> {
        &self.eta
    }

    pub fn eval(&self, z: C) -> Result<Evaluated> {
        check_z(z)?;
        let v = (self.f)(z)?;
        if v.value.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.value.len(),
            });
        }
        Ok(v)
    }

    pub fn value(&self, z: C) -> Result<Vec<C>> {
        Ok(self.eval(z)?.value)
    }
}

struct MbNode {
    s: C,
    a: Vec<C>,
    a_norm: f64,
}

/// `psi(z) = (1/2 pi) int z^{-s} A(s) dt` on `Re s = c0` by the trapezoid
/// rule, with `A(s)` assembled from `hat L_0(s - nu)` and `hat L_1(s - nu)`.
struct MellinBarnes {
    h: f64,
    nodes: Vec<MbNode>,
}

impl MellinBarnes {
    const STEP: f64 = 0.1;
    const MARGIN: f64 = 30.0;

    fn new(form: &MaassFormData, eta: &Representation<C>) -> Result<Self> {
        let nu = form.nu;
        if !(nu.re > -0.5) {
            return Err(Error::Domain("the Mellin-Barnes route needs Re nu > -1/2".into()));
        }
        if is_half_integer(nu) {
            return Err(Error::HalfIntegerNu { nu });
        }
        let c0 = nu.re + 0.5;
        let t_lo = (2.0 * nu.im).min(0.0) - Self::MARGIN;
        let t_hi = (2.0 * nu.im).max(0.0) + Self::MARGIN;
        let table = FoldTable::new(form, eta.rho_s(), nu.im.abs() + Self::MARGIN + 1.0, (c0 - nu.re).abs() + 0.5)?;
        let ln_pi = PI.ln();
        let pre = (nu * (form.n as f64).ln()).exp() * (nu * PI).cos();
        let count = ((t_hi - t_lo) / Self::STEP).round() as usize;
        let mut nodes = Vec::with_capacity(count + 1);
        let one = c(1.0, 0.0);
        for j in 0..=count {
            let t = t_lo + j as f64 * Self::STEP;
            let s = c(c0, t);
            let w = s - nu;
            let l0 = table.hat_l(w, 0);
            let l1 = table.hat_l(w, 1);
            let g0 = (ln_gamma((s + one) * 0.5)? + ln_gamma((nu * 2.0 + 2.0 - s) * 0.5)?
                - (nu + 1.5) * ln_pi)
                .exp()
                * c(0.0, 1.0);
            let g1 = (ln_gamma(s * 0.5)? + ln_gamma((nu * 2.0 + one - s) * 0.5)? - (nu + 0.5) * ln_pi).exp();
            let a: Vec<C> = l0
                .iter()
                .zip(&l1)
                .map(|(x, y)| pre * (g0 * x + g1 * y))
                .collect();
            let a_norm = cvec::norm(&a);
            nodes.push(MbNode { s, a, a_norm });
        }
        Ok(MellinBarnes {
            h: Self::STEP,
            nodes,
        })
    }

    /// Predicted error: cancellation in the sum plus the truncated ends.
    fn error(&self, z: C) -> f64 {
        let lz = z.ln();
        let w = |nd: &MbNode| (-(nd.s * lz)).exp().norm() * nd.a_norm;
        let l1: f64 = self.nodes.iter().map(w).sum::<f64>() * self.h / (2.0 * PI);
        let ends = w(&self.nodes[0]) + w(&self.nodes[self.nodes.len() - 1]);
        5e-14 * l1 + ends
    }

    fn eval(&self, z: C) -> Result<Evaluated> {
        let lz = crate::special_functions::log_principal(z)?;
        let dim = self.nodes[0].a.len();
        let mut out = zeros(dim);
        for nd in &self.nodes {
            cvec::axpy(&mut out, (-(nd.s * lz)).exp(), &nd.a);
        }
        let k = c(self.h / (2.0 * PI), 0.0);
        Ok(Evaluated {
            value: cvec::scale(&out, k),
            tail: self.error(z),
        })
    }
}

/// Which evaluation route [`FormPeriod`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiRoute {
    Series,
    MellinBarnes,
}

/// Period function of a cusp form.
///
/// Two routes are available: the Bruggeman transform of the truncated
/// Fourier series of `f_u`, accurate when both `z` and `-1/z` stay away
/// from the real axis, and a Mellin-Barnes integral over the completed
/// L-functions, accurate near the positive real axis but subject to
/// cancellation of size `e^{2 |Im nu| |arg z|}`. Each call takes the route
/// with the smaller predicted error.
pub struct FormPeriod {
    nu: C,
    eta: Representation<C>,
    f: BoundaryFunction,
    mb: MellinBarnes,
}

impl FormPeriod {
    pub fn new(form: &MaassFormData, eta: &Representation<C>) -> Result<Self> {
        check_dims(eta, form.dim)?;
        let f = BoundaryFunction::from_form(form)?.with_floor(0.0);
        let mb = MellinBarnes::new(form, eta)?;
        Ok(FormPeriod {
            nu: form.nu,
            eta: eta.clone(),
            f,
            mb,
        })
    }

    pub fn boundary(&self) -> &BoundaryFunction {
        &self.f
    }

    fn series_error(&self, z: C) -> f64 {
        if z.im == 0.0 {
            return f64::INFINITY;
        }
        let w = -z.inv();
        let (Some((t1, s1)), Some((t2, s2))) = (self.f.series_error(z), self.f.series_error(w)) else {
            return f64::INFINITY;
        };
        let fac = automorphy_factor(z, self.nu).map(|v| v.norm()).unwrap_or(f64::INFINITY);
        t1 + fac * t2 + 1e-15 * (s1 + fac * s2)
    }

    pub fn series(&self, z: C) -> Result<Evaluated> {
        check_z(z)?;
        if z.im == 0.0 {
            return Err(Error::Domain("the series route needs z off the real axis".into()));
        }
        bruggeman_eval(&self.f, self.nu, &self.eta, z)
    }

    pub fn mellin_barnes(&self, z: C) -> Result<Evaluated> {
        check_z(z)?;
        self.mb.eval(z)
    }

    pub fn route(&self, z: C) -> PsiRoute {
        if self.series_error(z) <= self.mb.error(z) {
            PsiRoute::Series
        } else {
            PsiRoute::MellinBarnes
        }
    }

    pub fn eval(&self, z: C) -> Result<Evaluated> {
        check_z(z)?;
        match self.route(z) {
            PsiRoute::Series => self.series(z),
            PsiRoute::MellinBarnes => self.mellin_barnes(z),
        }
    }

    pub fn into_evaluator(self) -> PeriodEvaluator {
        let nu = self.nu;
        let eta = self.eta.clone();
        PeriodEvaluator::with_error(nu, &eta, move |z| self.eval(z))
    }
}

/// `eta(T) psi(z) - psi(z+1) - (z+1)^{-2nu-1} eta(S T^{-1}) psi(z/(z+1))`.
pub fn lewis_residual(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, z: C) -> Result<Vec<C>> {
    Ok(lewis_point(psi, eta, nu, z)?.residual)
}

/// Lewis residual at one point, with the size of the largest of the three
/// terms for relative comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LewisPoint {
    pub z: C,
    pub psi: Vec<C>,
    pub residual: Vec<C>,
    pub norm: f64,
    pub scale: f64,
    /// Propagated evaluation error of the three terms.
    pub error: f64,
}

impl LewisPoint {
    pub fn relative(&self) -> f64 {
        self.norm / self.scale.max(1.0)
    }
}

pub fn lewis_point(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, z: C) -> Result<LewisPoint> {
    check_dims(eta, psi.dim())?;
    let z1 = z + 1.0;
    let zq = z / z1;
    for w in [z, z1, zq] {
        check_z(w)?;
    }
    let p0 = psi.eval(z)?;
    let p1 = psi.eval(z1)?;
    let p2 = psi.eval(zq)?;
    let fac = automorphy_factor(z1, nu)?;
    let st = eta.rho_s().mul(eta.rho_t_inv());
    let a = eta.rho_t().apply(&p0.value);
    let b = p1.value.clone();
    let d = cvec::scale(&st.apply(&p2.value), fac);
    let residual: Vec<C> = (0..a.len()).map(|j| a[j] - b[j] - d[j]).collect();
    let scale = cvec::norm(&a).max(cvec::norm(&b)).max(cvec::norm(&d));
    let error = eta.rho_t().frobenius() * p0.tail + p1.tail + fac.norm() * st.frobenius() * p2.tail;
    Ok(LewisPoint {
        z,
        psi: p0.value,
        norm: cvec::norm(&residual),
        residual,
        scale,
        error,
    })
}

/// Lewis residuals on an `n x n` grid over a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct LewisGrid {
    pub points: Vec<LewisPoint>,
    pub max_abs: f64,
    pub max_rel: f64,
}

pub fn grid_points(re: (f64, f64), im: (f64, f64), n: usize) -> Vec<C> {
    let lin = |(a, b): (f64, f64), j: usize| {
        if n <= 1 {
            0.5 * (a + b)
        } else {
            a + (b - a) * j as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(c(lin(re, i), lin(im, j)));
        }
    }
    out
}

pub fn lewis_grid(
    psi: &PeriodEvaluator,
    eta: &Representation<C>,
    nu: C,
    re: (f64, f64),
    im: (f64, f64),
    n: usize,
) -> Result<LewisGrid> {
    let points = grid_points(re, im, n)
        .into_iter()
        .map(|z| lewis_point(psi, eta, nu, z))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_grid(points))
}

pub fn summarize_grid(points: Vec<LewisPoint>) -> LewisGrid {
    let max_abs = points.iter().map(|p| p.norm).fold(0.0, f64::max);
    let max_rel = points.iter().map(|p| p.relative()).fold(0.0, f64::max);
    LewisGrid {
        points,
        max_abs,
        max_rel,
    }
}

/// `psi(z) + z^{-2nu-1} eta(S) psi(-1/z)`.
fn inversion_numerator(psi: &PeriodEvaluator, nu: C, z: C) -> Result<Evaluated> {
    inversion_numerator_with(psi, psi.eta(), nu, z)
}

fn inversion_numerator_with(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, z: C) -> Result<Evaluated> {
    let a = psi.eval(z)?;
    let b = psi.eval(-z.inv())?;
    let fac = automorphy_factor(z, nu)?;
    let s = eta.rho_s();
    let mut v = a.value;
    cvec::axpy(&mut v, fac, &s.apply(&b.value));
    Ok(Evaluated {
        value: v,
        tail: a.tail + fac.norm() * s.frobenius() * b.tail,
    })
}

/// `1 + e^{-2 pi i nu}` on the upper half-plane, `1 + e^{2 pi i nu}` on the lower.
fn inversion_factor(nu: C, z: C) -> C {
    let sign = if z.im > 0.0 { -1.0 } else { 1.0 };
    c(1.0, 0.0) + (c(0.0, 2.0 * PI * sign) * nu).exp()
}

/// Recovers `f` from `psi`:
/// `f(z) = (psi(z) + z^{-2nu-1} eta(S) psi(-1/z)) / (1 + e^{-+2 pi i nu})`.
pub fn invert_bruggeman(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, z: C) -> Result<Vec<C>> {
    check_dims(eta, psi.dim())?;
    if is_half_integer(nu) {
        return Err(Error::HalfIntegerNu { nu });
    }
    if z.im == 0.0 {
        return Err(Error::Domain("the inversion formula needs z off the real axis".into()));
    }
    let g = inversion_numerator_with(psi, eta, nu, z)?;
    Ok(cvec::scale(&g.value, inversion_factor(nu, z).inv()))
}

/// Finite-`Y` proxy for the limit condition at `x0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub x0: f64,
    pub y: f64,
    pub residual: Vec<[f64; 2]>,
    pub norm: f64,
    /// Propagated evaluation error of `norm`.
    pub error: f64,
    /// The same quantity at `2Y`.
    pub norm_doubled: f64,
    pub error_doubled: f64,
    /// `norm_doubled <= norm + error_doubled`: doubling `Y` does not
    /// increase the residual beyond the evaluation noise.
    pub decreasing: bool,
}

fn limit_proxy(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, x0: f64, y: f64) -> Result<Evaluated> {
    let up = inversion_numerator_with(psi, eta, nu, c(x0, y))?;
    let low = inversion_numerator_with(psi, eta, nu, c(x0, -y))?;
    let e_plus = (c(0.0, PI) * nu).exp();
    let mut v = cvec::scale(&up.value, e_plus);
    cvec::axpy(&mut v, e_plus.inv(), &low.value);
    Ok(Evaluated {
        value: v,
        tail: e_plus.norm() * up.tail + low.tail / e_plus.norm(),
    })
}

/// `e^{pi i nu} g(x0 + iY) + e^{-pi i nu} g(x0 - iY)` with
/// `g(z) = psi(z) + z^{-2nu-1} eta(S) psi(-1/z)`, compared with its value at `2Y`.
pub fn limit_condition_residual(
    psi: &PeriodEvaluator,
    eta: &Representation<C>,
    nu: C,
    x0: f64,
    y: f64,
) -> Result<LimitReport> {
    check_dims(eta, psi.dim())?;
    if !(y >= 5.0) {
        return Err(Error::Domain(format!("limit condition needs Y >= 5, got {y}")));
    }
    let r = limit_proxy(psi, eta, nu, x0, y)?;
    let r2 = limit_proxy(psi, eta, nu, x0, 2.0 * y)?;
    let norm = cvec::norm(&r.value);
    let norm_doubled = cvec::norm(&r2.value);
    Ok(LimitReport {
        x0,
        y,
        residual: r.value.iter().map(|z| [z.re, z.im]).collect(),
        norm,
        error: r.tail,
        norm_doubled,
        error_doubled: r2.tail,
        decreasing: norm_doubled <= norm + r2.tail,
    })
}

/// Result of [`asymptotic_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub c: f64,
    pub sup: f64,
    pub argmax: [f64; 2],
    pub refined_sup: f64,
    pub refined_argmax: [f64; 2],
    pub pass: bool,
}

/// Refines a sample set: midpoints between neighbours and the extreme
/// samples pushed by a factor 4 towards 0 and infinity.
fn refine_samples(samples: &[C]) -> Vec<C> {
    let mut out: Vec<C> = samples.to_vec();
    for w in samples.windows(2) {
        out.push((w[0] + w[1]) * 0.5);
    }
    let by_norm = |a: &&C, b: &&C| a.norm().total_cmp(&b.norm());
    if let Some(lo) = samples.iter().min_by(by_norm) {
        out.push(lo * 0.25);
    }
    if let Some(hi) = samples.iter().max_by(by_norm) {
        out.push(hi * 4.0);
    }
    out
}

/// `sup |psi(z)| / min(1, |z|^{-C})` over the samples and over a refined
/// set; passes when finite and the refinement grows it by at most 50%.
pub fn asymptotic_bound_check(psi: &PeriodEvaluator, c_exp: f64, samples: &[C]) -> Result<BoundReport> {
    let nu = psi.nu();
    if !(c_exp > 0.0 && c_exp < 2.0 * nu.re + 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < C < 2 Re nu + 1 = {}, got {c_exp}",
            2.0 * nu.re + 1.0
        )));
    }
    if samples.is_empty() {
        return Err(Error::Domain("no samples".into()));
    }
    let sup_over = |pts: &[C]| -> Result<(f64, C)> {
        let mut best = (0.0, pts[0]);
        for &z in pts {
            let r = cvec::norm(&psi.value(z)?) / z.norm().powf(-c_exp).min(1.0);
            if !(r <= best.0) {
                best = (r, z);
            }
        }
        Ok(best)
    };
    let (sup, am) = sup_over(samples)?;
    let refined = refine_samples(samples);
    let (refined_sup, ram) = sup_over(&refined)?;
    let pass = sup.is_finite() && refined_sup.is_finite() && refined_sup <= 1.5 * sup.max(1e-300);
    Ok(BoundReport {
        c: c_exp,
        sup,
        argmax: [am.re, am.im],
        refined_sup,
        refined_argmax: [ram.re, ram.im],
        pass,
    })
}

/// Jump across the real axis at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingRow {
    pub x: f64,
    pub jumps: Vec<f64>,
    pub extrapolated: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingReport {
    pub deltas: Vec<f64>,
    pub rows: Vec<GluingRow>,
    pub max_jump: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Jump of `z -> f(z) - z^{-2nu-1} eta(S) f(-1/z)` across `x > 0`, from
/// its values at `x +- i delta` extrapolated to `delta = 0`.
pub fn gluing_symmetry_check(
    f: &BoundaryFunction,
    nu: C,
    eta: &Representation<C>,
    x_points: &[f64],
    deltas: &[f64],
    tol: f64,
) -> Result<GluingReport> {
    check_dims(eta, f.dim())?;
    if deltas.is_empty() {
        return Err(Error::Domain("need at least one delta".into()));
    }
    let mut rows = Vec::with_capacity(x_points.len());
    for &x in x_points {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("gluing points must be positive, got {x}")));
        }
        let mut jumps = Vec::with_capacity(deltas.len());
        let mut norms = Vec::with_capacity(deltas.len());
        for &d in deltas {
            let up = bruggeman_eval(f, nu, eta, c(x, d))?.value;
            let low = bruggeman_eval(f, nu, eta, c(x, -d))?.value;
            let j = cvec::sub(&up, &low);
            norms.push(cvec::norm(&j));
            jumps.push(j);
        }
        let (limit, error) = extrapolate_to_zero(deltas, &jumps);
        rows.push(GluingRow {
            x,
            jumps: norms,
            extrapolated: cvec::norm(&limit),
            error,
        });
    }
    let max_jump = rows.iter().map(|r| r.extrapolated).fold(0.0, f64::max);
    Ok(GluingReport {
        deltas: deltas.to_vec(),
        rows,
        max_jump,
        tol,
        pass: max_jump <= tol,
    })
}

/// `C = 2 N^nu pi^{-nu-1/2} / Gamma(1/2 - nu)`, the proportionality constant
/// between the Poisson image of `e^{2 pi i k x/N}` and the K-Bessel term of
/// a cusp form.
pub fn lz_normalization_constant(nu: C, n: u64) -> Result<C> {
    let g = gamma(c(0.5, 0.0) - nu)?;
    let nn = (nu * (n as f64).ln()).exp();
    Ok(nn * (-(nu + 0.5) * PI.ln()).exp() * 2.0 / g)
}

/// `2 sign(k) (N/|k|)^nu pi^{-nu-1/2} / Gamma(1/2 - nu) sqrt(b) K_nu(2 pi |k| b/N) e^{2 pi i k a/N}`.
pub fn poisson_image_basis(k: i64, nu: C, n: u64, a: f64, b: f64) -> Result<C> {
    if k == 0 {
        return Err(Error::Domain("k must be nonzero".into()));
    }
    if !(b > 0.0) {
        return Err(Error::Domain(format!("need b > 0, got {b}")));
    }
    let nf = n as f64;
    let ka = k.unsigned_abs() as f64;
    let g = gamma(c(0.5, 0.0) - nu)?;
    let kb = bessel_k(nu, 2.0 * PI * ka * b / nf)?;
    let sign = k.signum() as f64;
    let phase = C::from_polar(1.0, 2.0 * PI * k as f64 * a / nf);
    Ok((nu * (nf / ka).ln()).exp() * (-(nu + 0.5) * PI.ln()).exp() * (2.0 * sign * b.sqrt()) / g * kb * phase)
}

/// The same quantity as [`poisson_image_basis`], from quadrature of
/// `sign(k) b^{1/2-nu} / pi int (b^2 + (tau - a)^2)^{nu - 1/2} e^{2 pi i k tau/N} dtau`.
///
/// The line is bent into the half-plane where the exponential decays,
/// `u = t(1 + i c)` for `t > 0` and `u = t(1 - i c)` for `t < 0`; the
/// branch points `+- i b` stay on the far side. Returns the value and the
/// quadrature error estimate.
pub fn poisson_image_quadrature(k: i64, nu: C, n: u64, a: f64, b: f64) -> Result<(C, f64)> {
    if k == 0 {
        return Err(Error::Domain("k must be nonzero".into()));
    }
    if !(b > 0.0) {
        return Err(Error::Domain(format!("need b > 0, got {b}")));
    }
    let omega = 2.0 * PI * k as f64 / n as f64;
    let q = c(0.5, 0.0) - nu;
    let slope = 0.5 * k.signum() as f64;
    let b2 = b * b;
    let t_max = 45.0 / (omega.abs() * slope.abs());
    let mut err = 0.0;
    let mut total = c(0.0, 0.0);
    for dir in [1.0, -1.0] {
        let j = c(dir, slope);
        let mut failure = None;
        let r = integrate(
            |t: f64| -> C {
                let u = j * t;
                match power(u * u + b2, -q) {
                    Ok(p) => p * (c(0.0, omega) * u).exp() * j,
                    Err(e) => {
                        failure.get_or_insert(e);
                        c(0.0, 0.0)
                    }
                }
            },
            0.0,
            t_max,
            &QuadOptions::rel(1e-13).with_panels(16),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        total += r.value * dir;
        err += r.error;
    }
    let phase = C::from_polar(1.0, omega * a);
    let pre = power(c(b, 0.0), q)? * (k.signum() as f64 / PI) * phase;
    Ok((pre * total, pre.norm() * err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn single_term(n: u64) -> BoundaryFunction {
        let mut co = BTreeMap::new();
        co.insert(1, vec![c(1.0, 0.0)]);
        BoundaryFunction::synthetic(n, 1, co, vec![c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn single_term_boundary_function() {
        let f = single_term(3);
        let z = c(0.3, 0.7);
        let v = f.value(z).unwrap()[0];
        assert!((v - (c(0.0, 2.0 * PI / 3.0) * z).exp()).norm() < 1e-15);
        assert_eq!(f.value(z.conj()).unwrap()[0], c(0.0, 0.0));
        let [up, low] = f.at_infinity().unwrap();
        assert_eq!(up[0] + low[0], c(0.0, 0.0));
    }

    #[test]
    fn form_boundary_function_respects_floor() {
        let form = crate::maass_forms::scalar_form(c(0.0, 2.0), &[1.0, 0.5], false).unwrap();
        let f = BoundaryFunction::from_form(&form).unwrap();
        assert!(matches!(f.eval(c(0.2, 0.01)), Err(Error::Domain(_))));
        let e = f.eval(c(0.2, 0.5)).unwrap();
        assert!(e.tail > 0.0 && e.tail < 1e-3);
        // k^nu with nu imaginary has modulus one
        let k2 = (c(0.0, 2.0) * 2f64.ln()).exp();
        assert!((k2.norm() - 1.0).abs() < 1e-15);
        let t = f.t_shift_residual(&Representation::trivial(1), &[c(0.1, 0.3), c(-0.4, -0.2)]).unwrap();
        assert!(t < 1e-13);
    }

    #[test]
    fn psi_at_i_and_zero() {
        let f = single_term(1);
        let nu = c(0.0, 1.7);
        let eta = Representation::trivial(1);
        let z = c(0.0, 1.0);
        let fi = f.value(z).unwrap()[0];
        let p = bruggeman_psi(&f, nu, &eta, z).unwrap()[0];
        let expect = fi - (c(0.0, -PI / 2.0) * (nu * 2.0 + 1.0)).exp() * fi;
        assert!((p - expect).norm() < 1e-14);
        let zero = BoundaryFunction::synthetic(1, 1, BTreeMap::new(), vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(bruggeman_psi(&zero, nu, &eta, c(0.5, 0.2)).unwrap()[0], c(0.0, 0.0));
        assert!(matches!(
            bruggeman_psi(&f, nu, &eta, c(-1.0, 0.0)),
            Err(Error::BranchCut { .. })
        ));
    }

    #[test]
    fn richardson_is_exact_for_quadratics() {
        let g = |z: C| -> Result<Evaluated> { Ok(exact(vec![z * z * 3.0 + z - 2.0])) };
        let v = one_sided_limit(g, 0.7, Side::Upper, &DEFAULT_DELTAS).unwrap();
        let x = c(0.7, 0.0);
        assert!((v.value[0] - (x * x * 3.0 + x - 2.0)).norm() < 1e-12);
    }

    #[test]
    fn constant_psi_lewis_residual() {
        let nu = c(0.0, 3.0);
        let eta = Representation::trivial(1);
        let k = c(0.4, -1.1);
        let psi = PeriodEvaluator::new(nu, &eta, move |_| Ok(vec![k]));
        let z = c(0.8, 0.3);
        let r = lewis_residual(&psi, &eta, nu, z).unwrap()[0];
        let expect = -automorphy_factor(z + 1.0, nu).unwrap() * k;
        assert!((r - expect).norm() < 1e-13);
        let zero = PeriodEvaluator::zero(nu, &eta);
        assert_eq!(lewis_residual(&zero, &eta, nu, z).unwrap()[0], c(0.0, 0.0));
    }

    #[test]
    fn round_trip_synthetic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let eta = Representation::sixth_root();
        let f = BoundaryFunction::random_synthetic(&eta, 6, &mut rng).unwrap();
        let nu = c(0.2, 0.6);
        let psi = PeriodEvaluator::from_boundary(f.clone(), nu, &eta).unwrap();
        for z in [c(0.3, 0.4), c(-1.2, 0.8), c(0.5, -0.6), c(2.0, -0.1)] {
            let back = invert_bruggeman(&psi, &eta, nu, z).unwrap();
            let orig = f.value(z).unwrap();
            assert!(cvec::dist(&back, &orig) < 1e-12 * cvec::norm(&orig).max(1.0));
        }
        assert!(matches!(
            invert_bruggeman(&psi, &eta, c(0.5, 0.0), c(0.1, 1.0)),
            Err(Error::HalfIntegerNu { .. })
        ));
    }

    #[test]
    fn equivariant_synthetic_satisfies_lewis() {
        // f(z+1) = eta(T) f(z) makes psi a solution of the three-term equation
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let eta = Representation::sixth_root();
        let f = BoundaryFunction::random_synthetic(&eta, 5, &mut rng).unwrap();
        assert!(f.t_shift_residual(&eta, &[c(0.2, 0.5), c(0.1, -0.4)]).unwrap() < 1e-14);
        let nu = c(0.1, 0.8);
        let psi = PeriodEvaluator::from_boundary(f, nu, &eta).unwrap();
        for z in [c(0.5, 0.5), c(1.3, -0.7)] {
            let p = lewis_point(&psi, &eta, nu, z).unwrap();
            assert!(p.norm < 1e-12 * p.scale.max(1.0), "{}", p.norm);
        }
    }

    #[test]
    fn lz_constant_identities() {
        let v = lz_normalization_constant(c(0.0, 0.0), 1).unwrap();
        assert!((v - c(2.0 / PI, 0.0)).norm() < 1e-14);
        let nu = c(0.1, 2.3);
        let k = lz_normalization_constant(nu, 3).unwrap();
        let other = (nu * PI.ln() + 0.5 * PI.ln()).exp() * gamma(c(0.5, 0.0) - nu).unwrap() * 0.5;
        let n_nu = (nu * 3f64.ln()).exp();
        assert!((k * other - n_nu).norm() < 1e-13 * n_nu.norm());
        assert!(matches!(lz_normalization_constant(c(0.5, 0.0), 1), Err(Error::Pole { .. })));
    }

    #[test]
    fn poisson_basis_against_quadrature() {
        let (q, err) = poisson_image_quadrature(1, c(0.3, 0.0), 1, 0.2, 1.5).unwrap();
        let p = poisson_image_basis(1, c(0.3, 0.0), 1, 0.2, 1.5).unwrap();
        assert!((q - p).norm() < 1e-8 * p.norm(), "{q} {p} {err}");
        let m = poisson_image_basis(-1, c(0.3, 0.0), 1, 0.2, 1.5).unwrap();
        assert!((m + p.conj()).norm() < 1e-14);
    }

    #[test]
    fn poisson_basis_decay() {
        let nu = c(0.0, 1.5);
        let r = poisson_image_basis(2, nu, 3, 0.1, 9.0).unwrap() / poisson_image_basis(2, nu, 3, 0.1, 8.0).unwrap();
        let expect = (-2.0 * PI * 2.0 / 3.0f64).exp();
        assert!((r.norm() / expect - 1.0).abs() < 2e-2);
    }

    #[test]
    fn bound_check_flags_inverse_power() {
        let eta = Representation::trivial(1);
        let nu = c(0.0, 1.0);
        let psi = PeriodEvaluator::new(nu, &eta, |z| Ok(vec![z.inv()]));
        let samples: Vec<C> = (0..20).map(|j| c(10f64.powf(-1.0 + 0.2 * j as f64), 0.0)).collect();
        let r = asymptotic_bound_check(&psi, 0.5, &samples).unwrap();
        assert!(!r.pass);
        assert!(r.refined_argmax[0] < 0.1);
        let zero = PeriodEvaluator::zero(nu, &eta);
        assert_eq!(asymptotic_bound_check(&zero, 0.5, &samples).unwrap().sup, 0.0);
        assert!(asymptotic_bound_check(&zero, 1.5, &samples).is_err());
    }

    #[test]
    fn gluing_of_random_polynomial_fails() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = BoundaryFunction::random_synthetic(&Representation::trivial(1), 4, &mut rng).unwrap();
        let eta = Representation::trivial(1);
        let r = gluing_symmetry_check(&f, c(0.0, 2.0), &eta, &[0.5, 1.0, 2.0], &DEFAULT_DELTAS, 1e-6).unwrap();
        assert!(!r.pass && r.max_jump > 1e-2);
        let zero = BoundaryFunction::synthetic(1, 1, BTreeMap::new(), vec![c(0.0, 0.0)]).unwrap();
        let r0 = gluing_symmetry_check(&zero, c(0.0, 2.0), &eta, &[1.0], &DEFAULT_DELTAS, 1e-12).unwrap();
        assert!(r0.pass && r0.max_jump == 0.0);
    }
}
