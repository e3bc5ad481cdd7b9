//! Finite-dimensional representations of the modular group given by the
//! images of the generators `S` and `T`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular_group::{matrix_to_word, word_to_matrix, Letter, ProjectiveMatrix, Word};
use crate::scalar::{Matrix, Scalar};

/// `eta(S)`, `eta(T)` and the order `N` of `eta(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<T: Scalar> {
    n: u64,
    rho_s: Matrix<T>,
    rho_t: Matrix<T>,
    rho_t_inv: Matrix<T>,
}

/// Deviations of the defining relations.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RelationReport {
    pub s_squared: f64,
    pub st_cubed: f64,
    pub t_to_n: f64,
    pub tol: f64,
    pub pass: bool,
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParabolicReport {
    /// max over exponents k of |eta(T^{kN}) - I|
    pub power_deviation: f64,
    /// max over conjugators g and exponents of |eta(g T^{kN} g^{-1}) - I|
    pub conjugate_deviation: f64,
    pub checked: usize,
    pub pass: bool,
}

impl<T: Scalar> Representation<T> {
    pub fn new(rho_s: Matrix<T>, rho_t: Matrix<T>, n: u64) -> Result<Self> {
        let dim = rho_s.dim();
        if rho_t.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho_t.dim(),
            });
        }
        if dim == 0 {
            return Err(Error::Domain("representation of dimension 0".into()));
        }
        if n == 0 {
            return Err(Error::Domain("order N of eta(T) must be positive".into()));
        }
        let rho_t_inv = rho_t
            .inverse()
            .ok_or_else(|| Error::Domain("eta(T) is singular".into()))?;
        Ok(Representation {
            n,
            rho_s,
            rho_t,
            rho_t_inv,
        })
    }

    pub fn trivial(dim: usize) -> Self {
        Representation {
            n: 1,
            rho_s: Matrix::identity(dim),
            rho_t: Matrix::identity(dim),
            rho_t_inv: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho_s.dim()
    }

    /// Order `N` of `eta(T)`, the cusp width.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn rho_s(&self) -> &Matrix<T> {
        &self.rho_s
    }

    pub fn rho_t(&self) -> &Matrix<T> {
        &self.rho_t
    }

    pub fn rho_t_inv(&self) -> &Matrix<T> {
        &self.rho_t_inv
    }

    pub fn letter(&self, l: Letter) -> &Matrix<T> {
        match l {
            Letter::S => &self.rho_s,
            Letter::T => &self.rho_t,
            Letter::Tinv => &self.rho_t_inv,
        }
    }

    pub fn with_order(&self, n: u64) -> Self {
        Representation {
            n,
            ..self.clone()
        }
    }

    pub fn default_tol(&self) -> f64 {
        if T::EXACT {
            0.0
        } else {
            1e-12 * self.dim() as f64
        }
    }

    pub fn validate(&self, tol: f64) -> RelationReport {
        let dev = |m: &Matrix<T>| m.minus_identity().max_abs();
        let s_squared = dev(&self.rho_s.mul(&self.rho_s));
        let st = self.rho_s.mul(&self.rho_t);
        let st_cubed = dev(&st.mul(&st).mul(&st));
        let t_to_n = dev(&self.rho_t.pow(self.n));
        let mut failed = Vec::new();
        if s_squared > tol {
            failed.push("S^2 = 1".to_string());
        }
        if st_cubed > tol {
            failed.push("(ST)^3 = 1".to_string());
        }
        if t_to_n > tol {
            failed.push(format!("T^{} = 1", self.n));
        }
        RelationReport {
            s_squared,
            st_cubed,
            t_to_n,
            tol,
            pass: failed.is_empty(),
            failed,
        }
    }

    pub fn evaluate_word(&self, w: &Word) -> Matrix<T> {
        w.letters()
            .iter()
            .fold(Matrix::identity(self.dim()), |acc, &l| acc.mul(self.letter(l)))
    }

    pub fn evaluate(&self, m: &ProjectiveMatrix) -> Matrix<T> {
        self.evaluate_word(&matrix_to_word(m))
    }

    /// `eta(T)^k` for any integer `k`, reduced mod `N`.
    pub fn t_power(&self, k: i64) -> Matrix<T> {
        let r = k.rem_euclid(self.n as i64) as u64;
        self.rho_t.pow(r)
    }

    /// Checks `eta(T^{kN}) = I` and `eta(g T^{kN} g^{-1}) = I`.
    pub fn parabolic_triviality_check(
        &self,
        exponents: &[i64],
        conjugators: &[Word],
        tol: f64,
    ) -> ParabolicReport {
        let n = self.n as i64;
        let mut power_deviation: f64 = 0.0;
        let mut conjugate_deviation: f64 = 0.0;
        let mut checked = 0;
        for &k in exponents {
            let e = k * n;
            let p = if e >= 0 {
                self.rho_t.pow(e as u64)
            } else {
                self.rho_t_inv.pow(e.unsigned_abs())
            };
            power_deviation = power_deviation.max(p.minus_identity().max_abs());
            checked += 1;
            for g in conjugators {
                let gm = word_to_matrix(g);
                let conj = gm.mul(&ProjectiveMatrix::t_pow(e)).mul(&gm.inverse());
                let v = self.evaluate(&conj);
                conjugate_deviation = conjugate_deviation.max(v.minus_identity().max_abs());
                checked += 1;
            }
        }
        ParabolicReport {
            power_deviation,
            conjugate_deviation,
            checked,
            pass: power_deviation <= tol && conjugate_deviation <= tol,
        }
    }

    pub fn to_complex(&self) -> Representation<Complex64> {
        Representation {
            n: self.n,
            rho_s: self.rho_s.to_complex(),
            rho_t: self.rho_t.to_complex(),
            rho_t_inv: self.rho_t_inv.to_complex(),
        }
    }
}

impl Representation<Complex64> {
    /// Character of `Gamma(1)^ab = Z/6`: `eta(S) = (-1)^a`, `eta(T) = exp(i pi b / 3)`.
    /// Requires `a = b (mod 2)`.
    pub fn character(a: u32, b: u32) -> Result<Self> {
        if a % 2 != b % 2 {
            return Err(Error::Domain(format!(
                "character (a, b) = ({a}, {b}) violates (ST)^3 = 1; need a = b mod 2"
            )));
        }
        let s = if a % 2 == 0 { 1.0 } else { -1.0 };
        let b6 = (b % 6) as u64;
        let n = 6 / num_integer::gcd(b6, 6).max(1);
        let n = if b6 == 0 { 1 } else { n };
        let t = Complex64::from_polar(1.0, PI * b6 as f64 / 3.0);
        Representation::new(
            Matrix::scalar(Complex64::new(s, 0.0)),
            Matrix::scalar(t),
            n,
        )
    }

    /// The six characters of `Gamma(1)`, indexed by `b = 0..6`.
    pub fn all_characters() -> Vec<Self> {
        (0..6u32)
            .map(|b| Self::character(b % 2, b).expect("compatible by construction"))
            .collect()
    }

    /// `eta(S) = -1`, `eta(T) = exp(i pi / 3)`, `N = 6`.
    pub fn sixth_root() -> Self {
        Self::character(1, 1).expect("compatible")
    }

    /// Block-diagonal sum; the order is the lcm of the two orders.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.dim(), other.dim());
        let block = |x: &Matrix<Complex64>, y: &Matrix<Complex64>| {
            let mut m = Matrix::zeros(a + b);
            for i in 0..a {
                for j in 0..a {
                    m.set(i, j, *x.get(i, j));
                }
            }
            for i in 0..b {
                for j in 0..b {
                    m.set(a + i, a + j, *y.get(i, j));
                }
            }
            m
        };
        Representation::new(
            block(&self.rho_s, &other.rho_s),
            block(&self.rho_t, &other.rho_t),
            num_integer::lcm(self.n, other.n),
        )
    }

    /// `g -> P eta(g) P^{-1}`.
    pub fn conjugate(&self, p: &Matrix<Complex64>) -> Result<Self> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        let pinv = p
            .inverse()
            .ok_or_else(|| Error::Domain("conjugating matrix is singular".into()))?;
        Representation::new(
            p.mul(&self.rho_s).mul(&pinv),
            p.mul(&self.rho_t).mul(&pinv),
            self.n,
        )
    }

    /// Looks up a preset by name: `trivial`, `sixth-root`, or `char:a,b`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "trivial" => Ok(Self::trivial(1)),
            "sixth-root" | "sixth_root" => Ok(Self::sixth_root()),
            other => {
                if let Some(rest) = other.strip_prefix("char:") {
                    let parts: Vec<&str> = rest.split(',').collect();
                    if parts.len() == 2 {
                        if let (Ok(a), Ok(b)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
                            return Self::character(a, b);
                        }
                    }
                }
                Err(Error::Parse(format!("unknown representation preset {other:?}")))
            }
        }
    }

    pub fn to_json(&self) -> RepresentationJson {
        let conv = |m: &Matrix<Complex64>| -> Vec<Vec<[f64; 2]>> {
            m.rows()
                .into_iter()
                .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
                .collect()
        };
        RepresentationJson {
            dim: self.dim(),
            n: self.n,
            rho_s: conv(&self.rho_s),
            rho_t: conv(&self.rho_t),
        }
    }

    pub fn from_json(j: &RepresentationJson) -> Result<Self> {
        let conv = |rows: &Vec<Vec<[f64; 2]>>| -> Result<Matrix<Complex64>> {
            if rows.len() != j.dim {
                return Err(Error::DimensionMismatch {
                    expected: j.dim,
                    found: rows.len(),
                });
            }
            for r in rows {
                if r.len() != j.dim {
                    return Err(Error::DimensionMismatch {
                        expected: j.dim,
                        found: r.len(),
                    });
                }
            }
            Matrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|p| Complex64::new(p[0], p[1])).collect())
                    .collect(),
            )
        };
        Representation::new(conv(&j.rho_s)?, conv(&j.rho_t)?, j.n)
    }
}

/// `{dim, N, rhoS, rhoT}` with row-major `[re, im]` entries.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RepresentationJson {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "rhoS")]
    pub rho_s: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "rhoT")]
    pub rho_t: Vec<Vec<[f64; 2]>>,
}
