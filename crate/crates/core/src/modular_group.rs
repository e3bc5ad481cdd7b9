//! Exact arithmetic in PSL(2, Z).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    S,
    T,
    /// `T^{-1}`
    Tinv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::S => Letter::S,
            Letter::T => Letter::Tinv,
            Letter::Tinv => Letter::T,
        }
    }

    pub fn matrix(self) -> ProjectiveMatrix {
        match self {
            Letter::S => ProjectiveMatrix::s(),
            Letter::T => ProjectiveMatrix::t(),
            Letter::Tinv => ProjectiveMatrix::t_inv(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::S => 'S',
            Letter::T => 'T',
            Letter::Tinv => 't',
        }
    }
}

/// A word in `S`, `T`, `T^{-1}`. Serialized as a string over `{S, T, t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cancel adjacent `T t`, `t T` and `S S` pairs.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0].inverse() != w[1])
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'S' => Ok(Letter::S),
                'T' => Ok(Letter::T),
                't' => Ok(Letter::Tinv),
                other => Err(Error::Parse(format!("unknown generator letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// An element of PSL(2, Z), stored sign-normalized:
/// `c > 0`, or `c = 0` and `d > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveMatrix {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl ProjectiveMatrix {
    /// Checks `ad - bc = 1` (or `-1` after which nothing is accepted) and
    /// normalizes the sign.
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<ProjectiveMatrix> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::Domain(format!(
                "matrix [[{a},{b}],[{c},{d}]] has determinant {det}, not 1"
            )));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<ProjectiveMatrix> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    fn normalized(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> ProjectiveMatrix {
        if c.is_negative() || (c.is_zero() && d.is_negative()) {
            ProjectiveMatrix { a: -a, b: -b, c: -c, d: -d }
        } else {
            ProjectiveMatrix { a, b, c, d }
        }
    }

    fn raw(a: i64, b: i64, c: i64, d: i64) -> ProjectiveMatrix {
        Self::normalized(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> ProjectiveMatrix {
        Self::raw(1, 0, 0, 1)
    }

    /// `S = [[0, 1], [-1, 0]]`, `z -> -1/z`.
    pub fn s() -> ProjectiveMatrix {
        Self::raw(0, 1, -1, 0)
    }

    pub fn t() -> ProjectiveMatrix {
        Self::raw(1, 1, 0, 1)
    }

    pub fn t_inv() -> ProjectiveMatrix {
        Self::raw(1, -1, 0, 1)
    }

    pub fn t_pow(n: i64) -> ProjectiveMatrix {
        Self::raw(1, n, 0, 1)
    }

    /// `T' = T S^{-1} T = [[1, 0], [1, 1]]`.
    pub fn t_prime() -> ProjectiveMatrix {
        Self::raw(1, 0, 1, 1)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn mul(&self, rhs: &ProjectiveMatrix) -> ProjectiveMatrix {
        Self::normalized(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn inverse(&self) -> ProjectiveMatrix {
        Self::normalized(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// Entries as floats, `[a, b, c, d]`.
    pub fn to_f64(&self) -> [f64; 4] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries()
            .into_iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Display for ProjectiveMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

fn int_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("matrix entry {n} is not an integer"))),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| Error::Parse(format!("matrix entry {s:?} is not an integer"))),
        other => Err(Error::Parse(format!("matrix entry {other} is not an integer"))),
    }
}

impl ProjectiveMatrix {
    /// `[[a, b], [c, d]]`; entries beyond 64 bits are written as strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!([
            [int_to_json(&self.a), int_to_json(&self.b)],
            [int_to_json(&self.c), int_to_json(&self.d)]
        ])
    }

    pub fn from_json(v: &serde_json::Value) -> Result<ProjectiveMatrix> {
        let rows = v
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::Parse("matrix must be [[a,b],[c,d]]".into()))?;
        let mut e = Vec::with_capacity(4);
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == 2)
                .ok_or_else(|| Error::Parse("matrix must be [[a,b],[c,d]]".into()))?;
            for x in row {
                e.push(int_from_json(x)?);
            }
        }
        let d = e.pop().unwrap();
        let c = e.pop().unwrap();
        let b = e.pop().unwrap();
        let a = e.pop().unwrap();
        ProjectiveMatrix::new(a, b, c, d)
    }
}

impl Serialize for ProjectiveMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectiveMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        ProjectiveMatrix::from_json(&v).map_err(D::Error::custom)
    }
}

pub fn word_to_matrix(w: &Word) -> ProjectiveMatrix {
    w.0.iter()
        .fold(ProjectiveMatrix::identity(), |acc, l| acc.mul(&l.matrix()))
}

fn push_t_power(out: &mut Vec<Letter>, q: &BigInt) {
    let letter = if q.is_negative() { Letter::Tinv } else { Letter::T };
    let n = q.abs().to_usize().expect("T exponent fits in memory");
    out.extend(std::iter::repeat_n(letter, n));
}

/// Euclidean reduction `m = T^{q1} S T^{q2} S ... T^{qk}`; the result is
/// freely reduced and evaluates back to `m`.
pub fn matrix_to_word(m: &ProjectiveMatrix) -> Word {
    let mut out = Vec::new();
    let mut cur = m.clone();
    while !cur.c.is_zero() {
        // cur = T^q S cur' with 0 <= a - qc < c
        let q = cur.a.div_floor(&cur.c);
        push_t_power(&mut out, &q);
        out.push(Letter::S);
        let a1 = &cur.a - &q * &cur.c;
        let b1 = &cur.b - &q * &cur.d;
        // S^{-1} [[a1, b1], [c, d]] with S^{-1} = [[0,-1],[1,0]]
        cur = ProjectiveMatrix::normalized(-&cur.c, -&cur.d, a1, b1);
    }
    // cur = [[1, b], [0, 1]]
    push_t_power(&mut out, &cur.b);
    Word(out).free_reduce()
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CPoint {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for CPoint {
    fn from(z: Complex64) -> Self {
        CPoint::Finite(z)
    }
}

impl CPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            CPoint::Finite(z) => Some(z),
            CPoint::Infinity => None,
        }
    }
}

pub fn mobius_apply(m: &ProjectiveMatrix, z: CPoint) -> CPoint {
    let [a, b, c, d] = m.to_f64();
    match z {
        CPoint::Infinity => {
            if c == 0.0 {
                CPoint::Infinity
            } else {
                CPoint::Finite(Complex64::new(a / c, 0.0))
            }
        }
        CPoint::Finite(z) => {
            let den = z * c + d;
            if den == Complex64::new(0.0, 0.0) {
                CPoint::Infinity
            } else {
                CPoint::Finite((z * a + b) / den)
            }
        }
    }
}

/// Möbius action on a finite point with a finite image.
pub fn mobius(m: &ProjectiveMatrix, z: Complex64) -> Option<Complex64> {
    mobius_apply(m, CPoint::Finite(z)).finite()
}
