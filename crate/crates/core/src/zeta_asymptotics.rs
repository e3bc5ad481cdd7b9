//! Operator-valued Hurwitz zeta functions `zeta_eta`, `zeta'_eta`, their
//! large-`x` expansions, and the asymptotic coefficients `C*_l`, `C*'_l` of
//! a period function at `0` and `infinity`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lewis_transform::PeriodEvaluator;
use crate::maass_forms::Evaluated;
use crate::modular_group::ProjectiveMatrix;
use crate::representations::Representation;
use crate::scalar::{cvec, Matrix};
use crate::special_functions::{bernoulli_f64, binom_general, c, hurwitz_zeta, on_cut, power};

type C = Complex64;

/// Parameters of `zeta_eta(a, .)` or, with `primed`, `zeta'_eta(a, .)`.
#[derive(Debug, Clone)]
pub struct OperatorZetaConfig {
    pub eta: Representation<C>,
    pub primed: bool,
    pub a: C,
    /// Default expansion order for [`asymptotic_zeta_eta`].
    pub truncation: usize,
    pub tol: f64,
}

impl OperatorZetaConfig {
    pub fn new(eta: &Representation<C>, a: C) -> Self {
        OperatorZetaConfig {
            eta: eta.clone(),
            primed: false,
            a,
            truncation: 4,
            tol: 1e-10,
        }
    }

    pub fn primed(mut self, primed: bool) -> Self {
        self.primed = primed;
        self
    }

    pub fn with_a(&self, a: C) -> Self {
        let mut out = self.clone();
        out.a = a;
        out
    }

    pub fn n(&self) -> u64 {
        self.eta.n()
    }

    /// The `j`-th weight for `j = 0..N`.
    pub fn weights(&self) -> Vec<Matrix<C>> {
        (0..self.n()).map(|j| operator_weight(&self.eta, self.primed, j)).collect()
    }
}

/// `eta(T (T')^n)^{-1}`, or `eta(T' T^n)^{-1}` when `primed`.
pub fn operator_weight(eta: &Representation<C>, primed: bool, n: u64) -> Matrix<C> {
    let (first, rep) = if primed {
        (ProjectiveMatrix::t_prime(), ProjectiveMatrix::t())
    } else {
        (ProjectiveMatrix::t(), ProjectiveMatrix::t_prime())
    };
    let mut g = first;
    for _ in 0..n {
        g = g.mul(&rep);
    }
    eta.evaluate(&g.inverse())
}

/// Closed form `N^{-a} sum_j W_j zeta(a, (j + x)/N)`.
pub fn zeta_eta(cfg: &OperatorZetaConfig, x: C) -> Result<Matrix<C>> {
    if on_cut(x) {
        return Err(Error::BranchCut { z: x });
    }
    let n = cfg.n() as f64;
    let lead = power(c(n, 0.0), -cfg.a)?;
    let dim = cfg.eta.dim();
    let mut out = Matrix::zeros(dim);
    for (j, w) in cfg.weights().iter().enumerate() {
        let z = hurwitz_zeta(cfg.a, (x + j as f64) / n)?;
        out = out.add(&w.scale(&(lead * z)));
    }
    Ok(out)
}

/// The weighted series `sum_{n < terms} W_n (n + x)^{-a}`, completed by the
/// mean weight times `int_{terms - 1/2}^inf (t + x)^{-a} dt`. The returned
/// bound covers the periodic fluctuation and the midpoint error of that tail.
pub fn zeta_eta_direct(cfg: &OperatorZetaConfig, x: C, terms: usize) -> Result<(Matrix<C>, f64)> {
    if on_cut(x) {
        return Err(Error::BranchCut { z: x });
    }
    if !(cfg.a.re > 1.0) {
        return Err(Error::Domain("the direct series needs Re a > 1".into()));
    }
    if x.re <= 0.0 && (terms as f64) + x.re < 1.0 {
        return Err(Error::Domain("too few terms to pass the singularities".into()));
    }
    let weights = cfg.weights();
    let n = weights.len();
    let dim = cfg.eta.dim();
    // group terms by weight class to keep the matrix work O(N)
    let mut sums = vec![C::new(0.0, 0.0); n];
    for k in 0..terms {
        sums[k % n] += power(x + k as f64, -cfg.a)?;
    }
    let mut out = Matrix::zeros(dim);
    let mut mean = Matrix::zeros(dim);
    for (w, s) in weights.iter().zip(&sums) {
        out = out.add(&w.scale(s));
        mean = mean.add(&w.scale(&c(1.0 / n as f64, 0.0)));
    }
    let start = x + (terms as f64 - 0.5);
    let integral = power(start, c(1.0, 0.0) - cfg.a)? / (cfg.a - 1.0);
    out = out.add(&mean.scale(&integral));
    let w_max = weights.iter().map(|w| w.max_abs()).fold(0.0, f64::max) * dim as f64;
    let base = (terms as f64 + x.re - 1.0).max(1.0);
    let sigma = cfg.a.re;
    let bound = w_max * (n as f64 * base.powf(-sigma) + cfg.a.norm() * base.powf(-sigma - 1.0));
    Ok((out, bound))
}

/// `C(mu, j) = sum_{k<=mu} (-1)^k B_k binom(k+a-2, k) binom(1-a-k, mu-k) N^{k-1} j^{mu-k}`
/// with `B_1 = -1/2` and `0^0 = 1`.
pub fn c_coeff(mu: usize, j: u64, a: C, n: u64) -> C {
    let one = c(1.0, 0.0);
    let mut sum = C::new(0.0, 0.0);
    for k in 0..=mu {
        let b = bernoulli_f64(k);
        if b == 0.0 {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let jp = if mu == k { 1.0 } else { (j as f64).powi((mu - k) as i32) };
        let nk = (n as f64).powi(k as i32 - 1);
        sum += binom_general(a + (k as f64 - 2.0), k)
            * binom_general(one - a - k as f64, mu - k)
            * (sign * b * nk * jp);
    }
    sum
}

/// `sum_j W_j C(mu, j)`.
pub fn weighted_c(cfg: &OperatorZetaConfig, mu: usize) -> Matrix<C> {
    let dim = cfg.eta.dim();
    let n = cfg.n();
    cfg.weights()
        .iter()
        .enumerate()
        .fold(Matrix::zeros(dim), |acc, (j, w)| {
            acc.add(&w.scale(&c_coeff(mu, j as u64, cfg.a, n)))
        })
}

/// Truncated large-`x` expansion `(1/(a-1)) sum_{mu<=M} x^{1-a-mu} sum_j W_j C(mu, j)`;
/// the error estimate is the size of the first omitted term.
pub fn asymptotic_zeta_eta(cfg: &OperatorZetaConfig, x: C, m: usize) -> Result<(Matrix<C>, f64)> {
    let one = c(1.0, 0.0);
    if cfg.a == one {
        return Err(Error::PoleAtOne);
    }
    let pre = (cfg.a - 1.0).inv();
    let mut out = Matrix::zeros(cfg.eta.dim());
    for mu in 0..=m {
        let p = power(x, one - cfg.a - mu as f64)? * pre;
        out = out.add(&weighted_c(cfg, mu).scale(&p));
    }
    let next = power(x, one - cfg.a - (m + 1) as f64)? * pre;
    let err = weighted_c(cfg, m + 1).max_abs() * next.norm();
    Ok((out, err))
}

/// Exponent of `|x|` in the error of the order-`m` expansion: the first
/// omitted order whose coefficient does not vanish.
pub fn predicted_error_power(cfg: &OperatorZetaConfig, m: usize) -> f64 {
    let scale = weighted_c(cfg, 0).max_abs().max(1e-300);
    let mut mu = m + 1;
    while mu < m + 12 && weighted_c(cfg, mu).max_abs() <= 1e-13 * scale {
        mu += 1;
    }
    1.0 - cfg.a.re - mu as f64
}

/// Taylor coefficients `C_0..C_m` of `psi` at `1` from `nodes` trapezoid
/// nodes on `|z - 1| = radius`, with the half-node discrepancy as error.
pub fn taylor_coeffs_with(psi: &PeriodEvaluator, m: usize, radius: f64, nodes: usize) -> Result<(Vec<Vec<C>>, f64)> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Domain(format!("radius {radius} must lie in (0, 1)")));
    }
    if nodes < 2 * (m + 2) || nodes % 2 != 0 {
        return Err(Error::Domain(format!("{nodes} nodes are too few for order {m}")));
    }
    let values: Vec<Vec<C>> = (0..nodes)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / nodes as f64;
            psi.value(c(1.0, 0.0) + C::from_polar(radius, theta))
        })
        .collect::<Result<_>>()?;
    let dim = psi.dim();
    let coeffs_from = |step: usize| -> Vec<Vec<C>> {
        let count = nodes / step;
        (0..=m)
            .map(|deg| {
                let mut acc = vec![C::new(0.0, 0.0); dim];
                for (i, v) in values.iter().step_by(step).enumerate() {
                    let theta = 2.0 * PI * i as f64 / count as f64;
                    cvec::axpy(&mut acc, C::from_polar(1.0, -(deg as f64) * theta), v);
                }
                cvec::scale(&acc, c(1.0 / (count as f64 * radius.powi(deg as i32)), 0.0))
            })
            .collect()
    };
    let full = coeffs_from(1);
    let half = coeffs_from(2);
    let err = full
        .iter()
        .zip(&half)
        .enumerate()
        .map(|(deg, (a, b))| cvec::dist(a, b) * radius.powi(deg as i32))
        .fold(0.0, f64::max);
    Ok((full, err))
}

/// [`taylor_coeffs_with`] on 128 nodes; fails if the 64-node rule disagrees
/// by more than `1e-6` of the largest scaled coefficient.
pub fn taylor_coeffs(psi: &PeriodEvaluator, m: usize, radius: f64) -> Result<Vec<Vec<C>>> {
    let (coeffs, err) = taylor_coeffs_with(psi, m, radius, 128)?;
    let scale = coeffs
        .iter()
        .enumerate()
        .map(|(deg, v)| cvec::norm(v) * radius.powi(deg as i32))
        .fold(1e-300, f64::max);
    if err > 1e-6 * scale {
        return Err(Error::ConvergenceFailure {
            what: "Cauchy trapezoid for Taylor coefficients",
            estimate: err / scale,
        });
    }
    Ok(coeffs)
}

fn check_resonance(nu: C, m: usize) -> Result<C> {
    let d = nu * 2.0 + m as f64;
    if d.norm() < 1e-14 {
        return Err(Error::ResonantNu { m });
    }
    Ok(d)
}

fn check_taylor(taylor: &[Vec<C>], need: usize) -> Result<()> {
    if taylor.len() < need {
        return Err(Error::Domain(format!(
            "{need} Taylor coefficients needed, {} given",
            taylor.len()
        )));
    }
    Ok(())
}

/// `C*_l = sum_{m<=l+1} (1/(m+2nu)) sum_j eta(T (T')^j)^{-1} C_m C(l+1-m, j)`,
/// where `C(., j)` is taken at `a = m + 2nu + 1`.
pub fn c_star(l: i64, nu: C, eta: &Representation<C>, taylor: &[Vec<C>]) -> Result<Vec<C>> {
    if l < -1 {
        return Err(Error::Domain("l must be at least -1".into()));
    }
    let top = (l + 1) as usize;
    check_taylor(taylor, top + 1)?;
    let n = eta.n();
    let weights: Vec<Matrix<C>> = (0..n).map(|j| operator_weight(eta, false, j)).collect();
    let mut out = vec![C::new(0.0, 0.0); eta.dim()];
    for (m, cm) in taylor.iter().enumerate().take(top + 1) {
        let d = check_resonance(nu, m)?;
        let a = nu * 2.0 + (m + 1) as f64;
        for (j, w) in weights.iter().enumerate() {
            let k = c_coeff(top - m, j as u64, a, n) / d;
            cvec::axpy(&mut out, k, &w.apply(cm));
        }
    }
    Ok(out)
}

/// `C*'_l = sum_m (1/(m+2nu)) sum_{r<=l+1-m} binom(r-2nu-l-1, r)
/// sum_j eta(T' T^j)^{-1} (-1)^m C_m C(l+1-r-m, j)`.
///
/// The sign `(-1)^m` comes from expanding `psi(1 - 1/t)` in powers of `1/t`.
pub fn c_star_prime(l: i64, nu: C, eta: &Representation<C>, taylor: &[Vec<C>]) -> Result<Vec<C>> {
    if l < -1 {
        return Err(Error::Domain("l must be at least -1".into()));
    }
    let top = (l + 1) as usize;
    check_taylor(taylor, top + 1)?;
    let n = eta.n();
    let weights: Vec<Matrix<C>> = (0..n).map(|j| operator_weight(eta, true, j)).collect();
    let mut out = vec![C::new(0.0, 0.0); eta.dim()];
    for (m, cm) in taylor.iter().enumerate().take(top + 1) {
        let d = check_resonance(nu, m)?;
        let a = nu * 2.0 + (m + 1) as f64;
        let cm = if m % 2 == 1 { cvec::scale(cm, c(-1.0, 0.0)) } else { cm.clone() };
        for r in 0..=(top - m) {
            let b = binom_general(nu * -2.0 + (r as f64 - l as f64 - 1.0), r) / d;
            for (j, w) in weights.iter().enumerate() {
                let k = b * c_coeff(top - m - r, j as u64, a, n);
                cvec::axpy(&mut out, k, &w.apply(&cm));
            }
        }
    }
    Ok(out)
}

/// Taylor data at `1` and the derived coefficients at `0` and `infinity`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub nu: C,
    pub taylor: Vec<Vec<C>>,
    pub c_star: BTreeMap<i64, Vec<C>>,
    pub c_star_prime: BTreeMap<i64, Vec<C>>,
}

impl AsymptoticCoefficients {
    /// Both families for `l = -1..=l_max`; needs `C_0..C_{l_max+1}`.
    pub fn new(nu: C, eta: &Representation<C>, taylor: Vec<Vec<C>>, l_max: i64) -> Result<Self> {
        let mut cs = BTreeMap::new();
        let mut csp = BTreeMap::new();
        for l in -1..=l_max {
            cs.insert(l, c_star(l, nu, eta, &taylor)?);
            csp.insert(l, c_star_prime(l, nu, eta, &taylor)?);
        }
        Ok(AsymptoticCoefficients {
            nu,
            taylor,
            c_star: cs,
            c_star_prime: csp,
        })
    }

    /// Taylor coefficients of `psi` by [`taylor_coeffs`], then `new`.
    pub fn from_psi(psi: &PeriodEvaluator, l_max: i64, radius: f64) -> Result<Self> {
        let taylor = taylor_coeffs(psi, (l_max + 1).max(0) as usize, radius)?;
        Self::new(psi.nu(), psi.eta(), taylor, l_max)
    }

    /// Drops the orders above `l`.
    pub fn truncated(&self, l: i64) -> Self {
        let keep = |m: &BTreeMap<i64, Vec<C>>| m.range(..=l).map(|(k, v)| (*k, v.clone())).collect();
        AsymptoticCoefficients {
            nu: self.nu,
            taylor: self.taylor.clone(),
            c_star: keep(&self.c_star),
            c_star_prime: keep(&self.c_star_prime),
        }
    }

    pub fn l_max(&self) -> i64 {
        self.c_star.keys().copied().max().unwrap_or(-1)
    }

    /// `sum_l C*_l x^l`.
    pub fn expansion_at_zero(&self, x: f64) -> Vec<C> {
        let dim = self.taylor.first().map_or(0, |v| v.len());
        let mut out = vec![C::new(0.0, 0.0); dim];
        for (&l, v) in &self.c_star {
            cvec::axpy(&mut out, c(x.powi(l as i32), 0.0), v);
        }
        out
    }

    /// `sum_l C*'_l x^{-l-2nu-1}`.
    pub fn expansion_at_infinity(&self, x: f64) -> Result<Vec<C>> {
        let dim = self.taylor.first().map_or(0, |v| v.len());
        let mut out = vec![C::new(0.0, 0.0); dim];
        for (&l, v) in &self.c_star_prime {
            let p = power(c(x, 0.0), -(self.nu * 2.0) - (l + 1) as f64)?;
            cvec::axpy(&mut out, p, v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QSide {
    Q0,
    Qinf,
}

/// Evaluates the subtracted-Taylor series for `Q_0` and `Q_inf`:
///
/// `Q_0(x) = x^{-2nu-1} psi(1/x) - sum_m zeta_eta(m+2nu+1, x) C_m
///   - sum_{n>=0} (n+x)^{-2nu-1} W_n (psi(1 + 1/(n+x)) - sum_m C_m (n+x)^{-m})`
///
/// and the same for `Q_inf` with `psi(x)`, `zeta'_eta(., x+1)`, weights
/// `eta(T' T^{n-1})^{-1}`, `psi(1 - 1/(n+x))` and `(-1)^m C_m`.
pub struct QProfile {
    psi: PeriodEvaluator,
    taylor: Vec<Vec<C>>,
    m: usize,
    tol: f64,
}

impl QProfile {
    /// Subtracts `C_0..C_m`; `C_{m+1}` enters the tail estimate.
    pub fn new(psi: &PeriodEvaluator, m: usize, radius: f64) -> Result<Self> {
        let taylor = taylor_coeffs(psi, m + 1, radius)?;
        Self::with_taylor(psi, taylor, m)
    }

    pub fn with_taylor(psi: &PeriodEvaluator, taylor: Vec<Vec<C>>, m: usize) -> Result<Self> {
        check_taylor(&taylor, m + 2)?;
        let nu = psi.nu();
        if !((m as f64) > -2.0 * nu.re - 1.0) {
            return Err(Error::Domain(format!("M = {m} must exceed -2 Re nu - 1")));
        }
        Ok(QProfile {
            psi: psi.clone(),
            taylor,
            m,
            tol: 1e-8,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn taylor(&self) -> &[Vec<C>] {
        &self.taylor
    }

    /// Coefficients of `psi(1 +- 1/t)` in powers of `1/t`, up to order `M`.
    fn coeffs(&self, minus: bool) -> Vec<Vec<C>> {
        self.taylor[..=self.m]
            .iter()
            .enumerate()
            .map(|(m, v)| {
                if minus && m % 2 == 1 {
                    cvec::scale(v, c(-1.0, 0.0))
                } else {
                    v.clone()
                }
            })
            .collect()
    }

    /// `Q_0(x)` or `Q_inf(x)` with the sum cut at `n_max`.
    pub fn eval(&self, x: f64, n_max: usize, which: QSide) -> Result<Evaluated> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("x = {x} must be positive")));
        }
        let psi = &self.psi;
        let nu = psi.nu();
        let eta = psi.eta();
        let dim = psi.dim();
        let primed = which == QSide::Qinf;
        let n_w = eta.n();
        let weights: Vec<Matrix<C>> = (0..n_w).map(|j| operator_weight(eta, primed, j)).collect();
        let expo = -(nu * 2.0) - 1.0;
        let mut err = 0.0;
        let (mut out, shift, first) = match which {
            QSide::Q0 => {
                let e = psi.eval(c(1.0 / x, 0.0))?;
                let p = power(c(x, 0.0), expo)?;
                err += p.norm() * e.tail;
                (cvec::scale(&e.value, p), x, 0usize)
            }
            QSide::Qinf => {
                let e = psi.eval(c(x, 0.0))?;
                err += e.tail;
                (e.value, x + 1.0, 1usize)
            }
        };
        let cfg = OperatorZetaConfig::new(eta, c(0.0, 0.0)).primed(primed);
        for (m, cm) in self.coeffs(primed).iter().enumerate() {
            let z = zeta_eta(&cfg.with_a(nu * 2.0 + (m + 1) as f64), c(shift, 0.0))?;
            cvec::axpy(&mut out, c(-1.0, 0.0), &z.apply(cm));
        }
        for n in first..n_max {
            let t = n as f64 + x;
            let arg = if primed { 1.0 - 1.0 / t } else { 1.0 + 1.0 / t };
            let e = psi.eval(c(arg, 0.0))?;
            let mut r = e.value;
            for (m, cm) in self.coeffs(primed).iter().enumerate() {
                cvec::axpy(&mut r, c(-t.powi(-(m as i32)), 0.0), cm);
            }
            let p = power(c(t, 0.0), expo)?;
            let w = &weights[(n - first) % n_w as usize];
            cvec::axpy(&mut out, -p, &w.apply(&r));
            err += p.norm() * e.tail;
        }
        let sigma = 2.0 * nu.re + 2.0 + self.m as f64;
        let w_max = weights.iter().map(|w| w.max_abs()).fold(0.0, f64::max) * dim as f64;
        let base = n_max as f64 + x - 1.0;
        let tail = 2.0 * w_max * cvec::norm(&self.taylor[self.m + 1]) * base.powf(1.0 - sigma) / (sigma - 1.0);
        if tail > self.tol {
            return Err(Error::SlowConvergence { tail, tol: self.tol });
        }
        Ok(Evaluated {
            value: out,
            tail: tail + err,
        })
    }
}

/// One-shot [`QProfile`] with radius `1/2`.
pub fn q_profile(psi: &PeriodEvaluator, x: f64, m: usize, n_max: usize, which: QSide) -> Result<Evaluated> {
    QProfile::new(psi, m, 0.5)?.eval(x, n_max, which)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticSide {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticSample {
    pub x: f64,
    pub psi: Vec<C>,
    pub expansion: Vec<C>,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub side: AsymptoticSide,
    pub samples: Vec<AsymptoticSample>,
    pub fitted_slope: f64,
    pub expected_slope: f64,
    pub pass: bool,
}

/// Compares `psi` with its expansion through order `order` at `0` or
/// `infinity`; passes iff the least-squares log-log slope of the error is
/// within `0.3` of the first non-vanishing omitted order. Coefficients of
/// `coeffs` above `order` are used only to locate that order.
pub fn asymptotic_psi_check(
    psi: &PeriodEvaluator,
    coeffs: &AsymptoticCoefficients,
    side: AsymptoticSide,
    samples: &[f64],
    order: i64,
) -> Result<AsymptoticReport> {
    if order > coeffs.l_max() {
        return Err(Error::Domain(format!(
            "order {order} exceeds the computed l_max = {}",
            coeffs.l_max()
        )));
    }
    let family = match side {
        AsymptoticSide::Zero => &coeffs.c_star,
        AsymptoticSide::Infinity => &coeffs.c_star_prime,
    };
    let scale = family.values().map(|v| cvec::norm(v)).fold(0.0, f64::max);
    let next = family
        .range(order + 1..)
        .find(|(_, v)| cvec::norm(v) > 1e-8 * scale)
        .map_or(order + 1, |(&l, _)| l);
    let expected_slope = match side {
        AsymptoticSide::Zero => next as f64,
        AsymptoticSide::Infinity => -(next as f64) - 2.0 * coeffs.nu.re - 1.0,
    };
    let truncated = coeffs.truncated(order);
    let mut rows = Vec::with_capacity(samples.len());
    for &x in samples {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("sample x = {x} must be positive")));
        }
        let v = psi.value(c(x, 0.0))?;
        let e = match side {
            AsymptoticSide::Zero => truncated.expansion_at_zero(x),
            AsymptoticSide::Infinity => truncated.expansion_at_infinity(x)?,
        };
        rows.push(AsymptoticSample {
            x,
            error: cvec::dist(&v, &e),
            psi: v,
            expansion: e,
        });
    }
    let exact = rows.iter().all(|r| r.error == 0.0);
    let fitted_slope = if exact {
        expected_slope
    } else {
        log_log_slope(&rows.iter().map(|r| (r.x, r.error)).collect::<Vec<_>>())
    };
    let pass = exact || (fitted_slope - expected_slope).abs() <= 0.3;
    Ok(AsymptoticReport {
        side,
        samples: rows,
        fitted_slope,
        expected_slope,
        pass,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares fit of `x psi(x) ~ sum_{i<=degree} b_i x^i` on `points`
/// equally spaced samples of `[lo, hi]`; `b_0` estimates `C*_{-1}`.
pub fn laurent_fit(psi: &PeriodEvaluator, lo: f64, hi: f64, points: usize, degree: usize) -> Result<Vec<Vec<C>>> {
    if !(lo > 0.0 && hi > lo) || points <= degree {
        return Err(Error::Domain("bad fit range".into()));
    }
    let dim = psi.dim();
    let p = degree + 1;
    let mut ata = Matrix::zeros(p);
    let mut aty = vec![vec![C::new(0.0, 0.0); dim]; p];
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let y = cvec::scale(&psi.value(c(x, 0.0))?, c(x, 0.0));
        for r in 0..p {
            let xr = x.powi(r as i32);
            cvec::axpy(&mut aty[r], c(xr, 0.0), &y);
            for s in 0..p {
                let v = *ata.get(r, s) + xr * x.powi(s as i32);
                ata.set(r, s, v);
            }
        }
    }
    let inv = ata
        .inverse()
        .ok_or_else(|| Error::Domain("singular normal equations".into()))?;
    Ok((0..p)
        .map(|r| {
            let mut v = vec![C::new(0.0, 0.0); dim];
            for (s, col) in aty.iter().enumerate() {
                cvec::axpy(&mut v, *inv.get(r, s), col);
            }
            v
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(name: &str) -> Representation<C> {
        Representation::preset(name).unwrap()
    }

    #[test]
    fn trivial_reduces_to_hurwitz() {
        let a = c(2.5, 0.3);
        let x = c(0.7, 0.2);
        let z = zeta_eta(&OperatorZetaConfig::new(&rep("trivial"), a), x).unwrap();
        let h = hurwitz_zeta(a, x).unwrap();
        assert!((*z.get(0, 0) - h).norm() < 1e-14 * h.norm());
    }

    #[test]
    fn direct_series_matches_closed_form() {
        let cfg = OperatorZetaConfig::new(&rep("sixth-root"), c(2.5, 0.0));
        let x = c(0.7, 0.0);
        let closed = zeta_eta(&cfg, x).unwrap();
        let (direct, bound) = zeta_eta_direct(&cfg, x, 100_000).unwrap();
        let d = closed.sub(&direct).max_abs();
        assert!(d < 1e-8 && d <= bound + 1e-14, "d = {d:e}, bound = {bound:e}");
    }

    #[test]
    fn weights_are_periodic() {
        for name in ["sixth-root", "char:0,2"] {
            let eta = rep(name);
            let n = eta.n();
            for primed in [false, true] {
                for j in 0..n {
                    let a = operator_weight(&eta, primed, j);
                    let b = operator_weight(&eta, primed, j + n);
                    assert!(a.sub(&b).max_abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn c_coeff_hand_values() {
        let a = c(2.3, 0.4);
        for n in [1, 6] {
            for j in 0..4 {
                assert!((c_coeff(0, j, a, n) - c(1.0 / n as f64, 0.0)).norm() < 1e-15);
            }
            let want = binom_general(a, 2) * (n as f64 / 6.0);
            assert!((c_coeff(2, 0, a, n) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn expansion_matches_closed_form_at_fifty() {
        let cfg = OperatorZetaConfig::new(&rep("trivial"), c(2.5, 0.0));
        let x = c(50.0, 0.0);
        let (asym, _) = asymptotic_zeta_eta(&cfg, x, 6).unwrap();
        let closed = zeta_eta(&cfg, x).unwrap();
        assert!(asym.sub(&closed).max_abs() < 1e-8);
    }

    #[test]
    fn expansion_at_hundred_sixth_root() {
        let cfg = OperatorZetaConfig::new(&rep("sixth-root"), c(2.5, 0.0));
        let x = c(100.0, 0.0);
        let (asym, est) = asymptotic_zeta_eta(&cfg, x, 4).unwrap();
        let closed = zeta_eta(&cfg, x).unwrap();
        let d = asym.sub(&closed).max_abs();
        assert!(d < 1e-10, "d = {d:e}");
        let (next, _) = asymptotic_zeta_eta(&cfg, x, 5).unwrap();
        let step = next.sub(&asym).max_abs();
        assert!(step <= est * (1.0 + 1e-9), "step = {step:e}, est = {est:e}");
    }

    #[test]
    fn scalar_expansion_matches_emot_form() {
        // zeta(a,z) ~ z^{1-a}/(a-1) + z^{-a}/2 + sum B_{2n} (a)_{2n-1}/(2n)! z^{1-2n-a}
        let a = c(3.2, -0.7);
        let cfg = OperatorZetaConfig::new(&rep("trivial"), a);
        let pre = (a - 1.0).inv();
        assert!((weighted_c(&cfg, 0).get(0, 0) * pre - pre).norm() < 1e-15);
        assert!((weighted_c(&cfg, 1).get(0, 0) * pre - c(0.5, 0.0)).norm() < 1e-15);
        let mut rising = a;
        for n in 1..4usize {
            let fact: f64 = (1..=2 * n).map(|k| k as f64).product();
            let want = rising * (bernoulli_f64(2 * n) / fact);
            let got = weighted_c(&cfg, 2 * n).get(0, 0) * pre;
            assert!((got - want).norm() < 1e-13 * want.norm());
            assert!(weighted_c(&cfg, 2 * n + 1).get(0, 0).norm() < 1e-15);
            rising *= (a + (2 * n - 1) as f64) * (a + (2 * n) as f64);
        }
    }

    #[test]
    fn taylor_of_polynomial_and_reciprocal() {
        let eta = rep("trivial");
        let nu = c(0.0, 1.0);
        let sq = PeriodEvaluator::new(nu, &eta, |z| Ok(vec![(z - 1.0) * (z - 1.0)]));
        let (t, _) = taylor_coeffs_with(&sq, 5, 0.5, 64).unwrap();
        for (m, v) in t.iter().enumerate() {
            let want = if m == 2 { 1.0 } else { 0.0 };
            assert!((v[0] - want).norm() < 1e-12);
        }
        let inv = PeriodEvaluator::new(nu, &eta, |z| Ok(vec![z.inv()]));
        let (a, _) = taylor_coeffs_with(&inv, 8, 0.5, 64).unwrap();
        let (b, _) = taylor_coeffs_with(&inv, 8, 0.5, 128).unwrap();
        for (m, (x, y)) in a.iter().zip(&b).enumerate() {
            let want = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((x[0] - want).norm() < 1e-12);
            assert!((x[0] - y[0]).norm() < 1e-11);
        }
    }

    #[test]
    fn c_star_minus_one_closed_form() {
        let eta = rep("sixth-root");
        let nu = c(0.1, 2.0);
        let taylor = vec![vec![c(0.3, -1.2)]];
        let got = c_star(-1, nu, &eta, &taylor).unwrap();
        let mut want = C::new(0.0, 0.0);
        for j in 0..eta.n() {
            want += operator_weight(&eta, false, j).apply(&taylor[0])[0];
        }
        want /= nu * 2.0 * eta.n() as f64;
        assert!((got[0] - want).norm() < 1e-14);
        let zero = c_star(-1, nu, &eta, &[vec![c(0.0, 0.0)]]).unwrap();
        assert_eq!(zero[0], c(0.0, 0.0));
    }

    #[test]
    fn trivial_c_star_matches_scalar_expansion() {
        // x^{-2nu-1} zeta(m+2nu+1, 1/x) = x^m/(m+2nu) + x^{m+1}/2
        //   + sum_n B_{2n} (a)_{2n-1}/(2n)! x^{m+2n}
        let eta = rep("trivial");
        let nu = c(0.05, 4.2);
        let taylor: Vec<Vec<C>> = (0..4).map(|m| vec![c(0.3 * m as f64 - 0.4, 1.0 / (m as f64 + 1.0))]).collect();
        let coef = |k: usize, a: C| -> C {
            match k {
                0 => (a - 1.0).inv(),
                1 => c(0.5, 0.0),
                k if k % 2 == 1 => c(0.0, 0.0),
                k => {
                    let mut rising = c(1.0, 0.0);
                    for i in 0..k - 1 {
                        rising *= a + i as f64;
                    }
                    let fact: f64 = (1..=k).map(|i| i as f64).product();
                    rising * (bernoulli_f64(k) / fact)
                }
            }
        };
        for l in -1..=2i64 {
            let mut want = c(0.0, 0.0);
            for m in 0..=(l + 1) as usize {
                want += taylor[m][0] * coef((l + 1) as usize - m, nu * 2.0 + (m + 1) as f64);
            }
            let got = c_star(l, nu, &eta, &taylor).unwrap()[0];
            assert!((got - want).norm() < 1e-13 * want.norm().max(1.0), "l = {l}");
        }
    }

    #[test]
    fn resonance_is_an_error() {
        let eta = rep("trivial");
        let taylor = vec![vec![c(1.0, 0.0)]; 4];
        assert!(matches!(
            c_star(1, c(-1.0, 0.0), &eta, &taylor),
            Err(Error::ResonantNu { m: 2 })
        ));
    }

    #[test]
    fn zero_function_has_zero_profiles() {
        let eta = rep("trivial");
        let psi = PeriodEvaluator::zero(c(0.0, 3.0), &eta);
        let q = QProfile::new(&psi, 3, 0.5).unwrap();
        for which in [QSide::Q0, QSide::Qinf] {
            assert_eq!(q.eval(1.5, 50, which).unwrap().value[0], c(0.0, 0.0));
        }
        let coeffs = AsymptoticCoefficients::from_psi(&psi, 1, 0.5).unwrap();
        let r = asymptotic_psi_check(&psi, &coeffs, AsymptoticSide::Zero, &[0.2, 0.1], 1).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.2, 0.1, 0.05].iter().map(|&x: &f64| (x, 3.0 * x * x)).collect();
        assert!((log_log_slope(&pts) - 2.0).abs() < 1e-12);
    }
}
