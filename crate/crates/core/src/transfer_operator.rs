//! The slash action of the semigroup generated by `T` and `T'`, the
//! transfer operators `L_0` and `L_inf`, and the continuation
//! `psi(z) = sum_{gamma in Q_n} (psi | gamma)(z)`.

use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lewis_transform::PeriodEvaluator;
use crate::maass_forms::Evaluated;
use crate::modular_group::{mobius, ProjectiveMatrix};
use crate::representations::Representation;
use crate::scalar::{cvec, Matrix};
use crate::special_functions::{c, power};
use crate::zeta_asymptotics::{operator_weight, taylor_coeffs, zeta_eta, OperatorZetaConfig};

type C = Complex64;

/// Longest word length accepted by [`enumerate_qn`].
pub const MAX_WORD_LENGTH: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    T,
    TPrime,
}

impl Generator {
    pub fn matrix(self) -> ProjectiveMatrix {
        match self {
            Generator::T => ProjectiveMatrix::t(),
            Generator::TPrime => ProjectiveMatrix::t_prime(),
        }
    }
}

/// A word in `T`, `T'` with its product cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupWord {
    letters: Vec<Generator>,
    matrix: ProjectiveMatrix,
}

impl SemigroupWord {
    pub fn identity() -> Self {
        SemigroupWord {
            letters: Vec::new(),
            matrix: ProjectiveMatrix::identity(),
        }
    }

    pub fn from_letters(letters: &[Generator]) -> Self {
        let mut w = Self::identity();
        for &l in letters {
            w = w.then(l);
        }
        w
    }

    /// `self * l`.
    pub fn then(&self, l: Generator) -> Self {
        let mut letters = self.letters.clone();
        letters.push(l);
        SemigroupWord {
            letters,
            matrix: self.matrix.mul(&l.matrix()),
        }
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn matrix(&self) -> &ProjectiveMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for SemigroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            match l {
                Generator::T => write!(f, "T")?,
                Generator::TPrime => write!(f, "T'")?,
            }
        }
        Ok(())
    }
}

/// All `2^n` words of length `n`.
pub fn enumerate_qn(n: usize) -> Result<Vec<SemigroupWord>> {
    if n > MAX_WORD_LENGTH {
        return Err(Error::SizeLimit {
            n,
            max: MAX_WORD_LENGTH,
        });
    }
    let mut words = vec![SemigroupWord::identity()];
    for _ in 0..n {
        words = words
            .iter()
            .flat_map(|w| [w.then(Generator::T), w.then(Generator::TPrime)])
            .collect();
    }
    Ok(words)
}

/// `(psi | gamma)(z) = (cz + d)^{-2nu-1} eta(gamma)^{-1} psi(gamma z)`.
pub fn slash(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, gamma: &ProjectiveMatrix, z: C) -> Result<Vec<C>> {
    let [_, _, cc, dd] = gamma.to_f64();
    let j = z * cc + dd;
    let gz = mobius(gamma, z).ok_or_else(|| Error::Domain(format!("{gamma} sends {z} to infinity")))?;
    let fac = power(j, -(nu * 2.0) - 1.0)?;
    let v = psi
        .value(gz)
        .map_err(|e| Error::Domain(format!("psi at {gz} (image of {z} under {gamma}): {e}")))?;
    let w = eta.evaluate(&gamma.inverse()).apply(&v);
    Ok(cvec::scale(&w, fac))
}

/// Which transfer operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferKind {
    /// `x^{-2nu-1} sum_{n>=0} (n+1/x)^{-2nu-1} eta(T (T')^n)^{-1} psi(1 + 1/(n+1/x))`.
    L0,
    /// `sum_{n>=1} (n+x)^{-2nu-1} eta(T' T^n)^{-1} psi(1 - 1/(n+x))`.
    Linf,
    /// The same weights with `psi(1 + 1/(n+x))`.
    LinfRemark,
}

/// One row of a residual table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferRow {
    pub x: f64,
    pub residual_norm: f64,
    pub tail_estimate: f64,
    pub n_max: usize,
}

/// Transfer operators acting on a fixed `psi`, with the Taylor data at `1`
/// used to sum the tail beyond `n_max` in closed form.
pub struct TransferOperator {
    psi: PeriodEvaluator,
    taylor: Vec<Vec<C>>,
    order: usize,
    tol: f64,
}

impl TransferOperator {
    /// Tail acceleration of order `order`: `C_0..C_order` are summed
    /// exactly with Hurwitz zetas, `C_{order+1}` sets the tail estimate.
    pub fn new(psi: &PeriodEvaluator, order: usize, radius: f64) -> Result<Self> {
        let taylor = taylor_coeffs(psi, order + 1, radius)?;
        Ok(TransferOperator {
            psi: psi.clone(),
            taylor,
            order,
            tol: 1e-6,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn taylor(&self) -> &[Vec<C>] {
        &self.taylor
    }

    /// The operator applied at `x > 0`, summing `n < n_max` directly.
    /// `n_max` is rounded up to a multiple of `N` so the tail is an
    /// operator-valued Hurwitz zeta.
    pub fn apply(&self, x: f64, n_max: usize, which: TransferKind) -> Result<Evaluated> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!("x = {x} must be positive")));
        }
        if n_max < 10 {
            return Err(Error::Domain(format!("n_max = {n_max} is below 10")));
        }
        let psi = &self.psi;
        let nu = psi.nu();
        let eta = psi.eta();
        let dim = psi.dim();
        let period = eta.n() as usize;
        let n_max = n_max.div_ceil(period) * period;
        let (primed, minus, shift, first) = match which {
            TransferKind::L0 => (false, false, 1.0 / x, 0usize),
            TransferKind::Linf => (true, true, x, 1),
            TransferKind::LinfRemark => (true, false, x, 1),
        };
        let weights: Vec<Matrix<C>> = (0..period as u64).map(|j| operator_weight(eta, primed, j)).collect();
        let expo = -(nu * 2.0) - 1.0;
        let mut out = vec![C::zero(); dim];
        let mut err = 0.0;
        for n in first..n_max {
            let t = n as f64 + shift;
            let arg = if minus { 1.0 - 1.0 / t } else { 1.0 + 1.0 / t };
            let e = psi.eval(c(arg, 0.0))?;
            let p = power(c(t, 0.0), expo)?;
            cvec::axpy(&mut out, p, &weights[n % period].apply(&e.value));
            err += p.norm() * e.tail;
        }
        // tail: psi(1 +- 1/t) replaced by its Taylor polynomial in 1/t
        let cfg = OperatorZetaConfig::new(eta, c(0.0, 0.0)).primed(primed);
        let start = c(n_max as f64 + shift, 0.0);
        for (m, cm) in self.taylor.iter().enumerate().take(self.order + 1) {
            let sign = if minus && m % 2 == 1 { -1.0 } else { 1.0 };
            let z = zeta_eta(&cfg.with_a(nu * 2.0 + (m + 1) as f64), start)?;
            cvec::axpy(&mut out, c(sign, 0.0), &z.apply(cm));
        }
        let sigma = 2.0 * nu.re + 2.0 + self.order as f64;
        let w_max = weights.iter().map(|w| w.max_abs()).fold(0.0, f64::max) * dim as f64;
        let base = n_max as f64 + shift - 1.0;
        let tail = 2.0 * w_max * cvec::norm(&self.taylor[self.order + 1]) * base.powf(1.0 - sigma) / (sigma - 1.0);
        if tail > self.tol {
            return Err(Error::SlowConvergence { tail, tol: self.tol });
        }
        if which == TransferKind::L0 {
            let p = power(c(x, 0.0), expo)?;
            return Ok(Evaluated {
                value: cvec::scale(&out, p),
                tail: (tail + err) * p.norm(),
            });
        }
        Ok(Evaluated {
            value: out,
            tail: tail + err,
        })
    }

    /// `|L psi(x) - psi(x)|` with the combined error estimate.
    pub fn residual(&self, x: f64, n_max: usize, which: TransferKind) -> Result<TransferRow> {
        let l = self.apply(x, n_max, which)?;
        let p = self.psi.eval(c(x, 0.0))?;
        let period = self.psi.eta().n() as usize;
        Ok(TransferRow {
            x,
            residual_norm: cvec::dist(&l.value, &p.value),
            tail_estimate: l.tail + p.tail,
            n_max: n_max.div_ceil(period) * period,
        })
    }
}

/// One-shot [`TransferOperator`] with order-4 acceleration on radius `1/2`.
pub fn transfer_apply(psi: &PeriodEvaluator, x: f64, n_max: usize, which: TransferKind) -> Result<Evaluated> {
    TransferOperator::new(psi, 4, 0.5)?.apply(x, n_max, which)
}

/// `sum_{gamma in Q_n} (psi | gamma)(z)`.
pub fn continue_psi(psi: &PeriodEvaluator, eta: &Representation<C>, nu: C, z: C, n: usize) -> Result<Vec<C>> {
    let words = enumerate_qn(n)?;
    let mut out = vec![C::zero(); psi.dim()];
    for w in &words {
        let v = slash(psi, eta, nu, w.matrix(), z)?;
        out = cvec::add(&out, &v);
    }
    Ok(out)
}

/// True if every entry of the word's matrix is nonnegative.
pub fn is_nonnegative(w: &SemigroupWord) -> bool {
    w.matrix().entries().iter().all(|e| !e.is_negative())
}

/// Largest entry of the word's matrix as a float.
pub fn max_entry(w: &SemigroupWord) -> f64 {
    w.matrix().max_abs_entry().to_f64().unwrap_or(f64::INFINITY)
}
