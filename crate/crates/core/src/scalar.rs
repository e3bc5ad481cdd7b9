//! Coefficient types shared by the algebraic layers.
//!
//! Group-ring elements, representation matrices and the order-lowering
//! operator are generic over [`Scalar`]. Two backends exist: exact Gaussian
//! rationals ([`GaussianRational`]) for identities that must hold on the nose,
//! and `Complex64` for interop with the numerical modules.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative field-like coefficient type.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Whether equality on this type is exact.
    const EXACT: bool;

    fn to_complex(&self) -> Complex64;

    /// Modulus as a double (exact types round).
    fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Multiplicative inverse, `None` for zero.
    fn recip(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self;
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.inv())
        }
    }

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Exact element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    fn from_i64(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }
}

/// Square matrix stored row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; fails unless the rows form a square array.
    pub fn from_rows(rows: Vec<Vec<T>>) -> crate::Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(crate::Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Matrix { n, data })
    }

    pub fn scalar(x: T) -> Self {
        Matrix { n: 1, data: vec![x] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out: Matrix<T> = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a.clone() * rhs.data[k * n + j].clone();
                    let cell = &mut out.data[i * n + j];
                    *cell = cell.clone() + prod;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn minus_identity(&self) -> Matrix<T> {
        self.sub(&Matrix::identity(self.n))
    }

    pub fn pow(&self, mut e: u64) -> Matrix<T> {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n, "vector dimension mismatch");
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(T::zero(), |acc, j| {
                    acc + self.data[i * self.n + j].clone() * v[j].clone()
                })
            })
            .collect()
    }

    /// Gauss-Jordan inverse; `None` when singular (exactly zero pivot, or a
    /// pivot below `1e-300` for floats).
    pub fn inverse(&self) -> Option<Matrix<T>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv: Matrix<T> = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| {
                a.get(i, col)
                    .modulus()
                    .partial_cmp(&a.get(j, col).modulus())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a.get(pivot, col).is_zero() || (!T::EXACT && a.get(pivot, col).modulus() < 1e-300) {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).recip()?;
            for j in 0..n {
                let v = a.get(col, j).clone() * p.clone();
                a.set(col, j, v);
                let w = inv.get(col, j).clone() * p.clone();
                inv.set(col, j, w);
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(col, j).clone();
                    a.set(i, j, v);
                    let w = inv.get(i, j).clone() - f.clone() * inv.get(col, j).clone();
                    inv.set(i, j, w);
                }
            }
        }
        Some(inv)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    /// Operator 2-norm bound: the Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let m = x.modulus();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x.to_complex()).collect(),
        }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

/// Complex vector helpers used by the numerical modules.
pub mod cvec {
    use num_complex::Complex64;

    pub fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn scale(a: &[Complex64], c: Complex64) -> Vec<Complex64> {
        a.iter().map(|x| x * c).collect()
    }

    pub fn axpy(acc: &mut [Complex64], c: Complex64, x: &[Complex64]) {
        for (a, b) in acc.iter_mut().zip(x) {
            *a += c * b;
        }
    }

    pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}
