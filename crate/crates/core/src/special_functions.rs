//! Principal-branch powers, complex Gamma, K-Bessel functions of complex
//! order, Hurwitz zeta, Bernoulli numbers and related helpers.
//!
//! Everything here works in double precision.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// True if `z` lies on the closed ray `(-inf, 0]`.
#[inline]
pub fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

/// Principal logarithm with imaginary part in `(-pi, pi)`.
pub fn log_principal(z: Complex64) -> Result<Complex64> {
    if on_cut(z) || z.re.is_nan() || z.im.is_nan() {
        return Err(Error::BranchCut { z });
    }
    Ok(z.ln())
}

/// `exp(w * Log z)` on the cut plane.
pub fn power(z: Complex64, w: Complex64) -> Result<Complex64> {
    let l = log_principal(z)?;
    if w.is_zero() {
        return Ok(Complex64::one());
    }
    Ok((w * l).exp())
}

fn stirling_ln_gamma(w: Complex64) -> Complex64 {
    // B_2k / (2k (2k-1)) for k = 1..8
    const COEF: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::zero();
    let mut p = inv;
    for cf in COEF {
        series += p * cf;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Complex Gamma function.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { what: "Gamma", at: z });
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        let g = gamma_right(Complex64::one() - z);
        return Ok(c(PI, 0.0) / (s * g));
    }
    Ok(gamma_right(z))
}

fn gamma_right(z: Complex64) -> Complex64 {
    let shift = (17.0 - z.re).ceil().max(0.0) as usize;
    let mut prod = Complex64::one();
    for k in 0..shift {
        prod *= z + k as f64;
    }
    stirling_ln_gamma(z + shift as f64).exp() / prod
}

/// Log-Gamma on `Re z > 0`, continuous in `z` (not reduced mod `2 pi i`).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma needs Re z > 0, got {z}")));
    }
    let shift = (17.0 - z.re).ceil().max(0.0) as usize;
    let mut acc = Complex64::zero();
    for k in 0..shift {
        acc += (z + k as f64).ln();
    }
    Ok(stirling_ln_gamma(z + shift as f64) - acc)
}

/// `Gamma_nu(s) = Gamma((s - nu)/2) Gamma((s + nu)/2) / (4 pi^s)`.
pub fn gamma_nu(s: Complex64, nu: Complex64) -> Result<Complex64> {
    let g1 = gamma((s - nu) * 0.5)?;
    let g2 = gamma((s + nu) * 0.5)?;
    Ok(g1 * g2 / ((s * PI.ln()).exp() * 4.0))
}

/// Generalized binomial coefficient `alpha (alpha-1) ... (alpha-k+1) / k!`.
pub fn binom_general(alpha: Complex64, k: usize) -> Complex64 {
    let mut acc = Complex64::one();
    for j in 0..k {
        acc *= (alpha - j as f64) / (j as f64 + 1.0);
    }
    acc
}

/// Largest index served by [`bernoulli`].
pub const BERNOULLI_MAX: usize = 60;

fn bernoulli_table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // sum_{k=0}^{m} binom(m+1, k) B_k = 0
        let mut b: Vec<BigRational> = Vec::with_capacity(BERNOULLI_MAX + 1);
        b.push(BigRational::one());
        for m in 1..=BERNOULLI_MAX {
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(binom.clone()) * bk;
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            // binom now equals binom(m+1, m) = m+1
            b.push(-acc / BigRational::from_integer(binom));
        }
        b
    })
}

/// Exact Bernoulli number `B_k` with `B_1 = -1/2`.
pub fn bernoulli(k: usize) -> Result<BigRational> {
    if k > BERNOULLI_MAX {
        return Err(Error::SizeLimit { n: k, max: BERNOULLI_MAX });
    }
    Ok(bernoulli_table()[k].clone())
}

/// `B_k` as a float.
pub fn bernoulli_f64(k: usize) -> f64 {
    bernoulli_table()
        .get(k)
        .and_then(|b| b.to_f64())
        .unwrap_or(f64::NAN)
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Options for [`bessel_k_with`].
#[derive(Debug, Clone, Copy)]
pub struct BesselOptions {
    pub rel_tol: f64,
    pub max_halvings: usize,
}

impl Default for BesselOptions {
    fn default() -> Self {
        BesselOptions {
            rel_tol: 1e-13,
            max_halvings: 14,
        }
    }
}

/// Modified Bessel function `K_nu(x)` for complex order and real `x > 0`.
pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64> {
    bessel_k_with(nu, x, &BesselOptions::default())
}

/// `K_nu(x) = 1/2 * int_R exp(-x cosh t + nu t) dt`, evaluated on the line
/// `Im t = alpha` through (or near) the relevant saddle point with a
/// step-halving trapezoidal rule. The integrand is entire and decays
/// doubly exponentially, so the rule converges geometrically in `1/h`.
pub fn bessel_k_with(nu: Complex64, x: f64, opts: &BesselOptions) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    // K_nu = K_{-nu}; work with Im nu >= 0 and, for real nu, Re nu >= 0.
    let nu = if nu.im < 0.0 || (nu.im == 0.0 && nu.re < 0.0) {
        -nu
    } else {
        nu
    };
    if x > 740.0 && nu.norm() < 0.5 * x {
        return Ok(Complex64::zero());
    }
    let r = nu.im;
    let sigma = nu.re;
    let alpha = if r == 0.0 {
        0.0
    } else if r < x {
        (r / x).asin().min(PI / 2.0 - 0.5 / r.max(1.0))
    } else {
        PI / 2.0 - (1.0 / r).min(PI / 2.0)
    };
    let (sa, ca) = alpha.sin_cos();
    let shift = c(0.0, alpha);
    let f = |t: f64| -> Complex64 {
        let ch = t.cosh();
        let sh = t.sinh();
        let e = c(-x * ch * ca, -x * sh * sa) + nu * (c(t, 0.0) + shift);
        e.exp()
    };
    let log_mag = |t: f64| -x * ca * t.cosh() + sigma * t;
    let t_peak = (sigma / (x * ca)).asinh();
    let g_peak = log_mag(t_peak);
    let cutoff = g_peak - 46.0;
    let mut hi = t_peak + 0.25;
    while log_mag(hi) > cutoff {
        hi += 0.25 + 0.25 * (hi - t_peak);
    }
    let mut lo = t_peak - 0.25;
    while log_mag(lo) > cutoff {
        lo -= 0.25 + 0.25 * (t_peak - lo);
    }

    let mut n = 32usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum = Complex64::zero();
    let mut abs_sum = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let v = f(lo + i as f64 * h);
        sum += v * w;
        abs_sum += v.norm() * w;
    }
    let mut prev = sum * h;
    for _ in 0..opts.max_halvings {
        let mut add = Complex64::zero();
        for i in 0..n {
            let v = f(lo + (i as f64 + 0.5) * h);
            add += v;
            abs_sum += v.norm();
        }
        sum += add;
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        let diff = (cur - prev).norm();
        let scale = abs_sum * h;
        if diff <= opts.rel_tol * cur.norm() || diff <= 8.0 * f64::EPSILON * scale {
            return Ok(cur * 0.5);
        }
        prev = cur;
    }
    Err(Error::ConvergenceFailure {
        what: "K-Bessel trapezoidal rule",
        estimate: (sum * h - prev).norm() / (sum * h).norm(),
    })
}

/// Hurwitz zeta `zeta(a, x) = sum_{n>=0} (n+x)^{-a}` continued by
/// Euler-Maclaurin summation.
pub fn hurwitz_zeta(a: Complex64, x: Complex64) -> Result<Complex64> {
    let target = 0.5 * a.norm() + 8.0;
    // smallest m0 >= 0 with |m0 + x| >= target
    let mut m0 = (target - x.re).ceil().max(0.0) as usize;
    if (c(m0 as f64, 0.0) + x).norm() < target {
        m0 += target.ceil() as usize;
    }
    hurwitz_zeta_with(a, x, m0, BERNOULLI_MAX / 2)
}

/// Euler-Maclaurin with an explicit cut `m0` and at most `terms` Bernoulli
/// corrections; the correction series stops early once its terms become
/// negligible or start to grow.
pub fn hurwitz_zeta_with(a: Complex64, x: Complex64, m0: usize, terms: usize) -> Result<Complex64> {
    if a == Complex64::one() {
        return Err(Error::PoleAtOne);
    }
    if on_cut(x) {
        return Err(Error::BranchCut { z: x });
    }
    let terms = terms.min(BERNOULLI_MAX / 2);
    let mut head = Complex64::zero();
    for n in 0..m0 {
        head += power(x + n as f64, -a)?;
    }
    let big = x + m0 as f64;
    let lb = log_principal(big)?;
    let p0 = (-a * lb).exp();
    let mut tail = (lb * (Complex64::one() - a)).exp() / (a - 1.0) + p0 * 0.5;
    let inv2 = (big * big).inv();
    // rising factorial (a)_{2k-1} times big^{-a-2k+1}
    let mut rising = a;
    let mut pw = p0 / big;
    let mut last = f64::INFINITY;
    for k in 1..=terms {
        let b = bernoulli_f64(2 * k) / factorial_f64(2 * k);
        let term = rising * pw * b;
        let size = term.norm();
        if size > last {
            break;
        }
        tail += term;
        last = size;
        if size <= 1e-18 * (head + tail).norm() {
            break;
        }
        rising *= (a + (2 * k - 1) as f64) * (a + (2 * k) as f64);
        pw *= inv2;
    }
    Ok(head + tail)
}
