//! Group rings, augmentation, the generator decomposition of `gamma - 1`,
//! unipotent representations `eta_chi` and the order-lowering operator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular_group::{matrix_to_word, Letter, ProjectiveMatrix};
use crate::representations::Representation;
use crate::scalar::{GaussianRational, Matrix, Scalar};

/// A group with a distinguished finite generating set and a normal form.
pub trait GroupElement: Clone + Ord + fmt::Debug {
    type Gen: Copy + Eq + Ord + fmt::Debug;

    fn identity() -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn generator(g: Self::Gen) -> Self;
    /// Factorization into generators; `true` marks an inverse letter.
    fn factor(&self) -> Vec<(Self::Gen, bool)>;
}

/// Generators of `Gamma(1)` used by the decomposition: `S` and `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModularGen {
    S,
    T,
}

impl From<ModularGen> for Letter {
    fn from(g: ModularGen) -> Letter {
        match g {
            ModularGen::S => Letter::S,
            ModularGen::T => Letter::T,
        }
    }
}

impl GroupElement for ProjectiveMatrix {
    type Gen = ModularGen;

    fn identity() -> Self {
        ProjectiveMatrix::identity()
    }
    fn mul(&self, rhs: &Self) -> Self {
        ProjectiveMatrix::mul(self, rhs)
    }
    fn inverse(&self) -> Self {
        ProjectiveMatrix::inverse(self)
    }
    fn generator(g: ModularGen) -> Self {
        match g {
            ModularGen::S => ProjectiveMatrix::s(),
            ModularGen::T => ProjectiveMatrix::t(),
        }
    }
    fn factor(&self) -> Vec<(ModularGen, bool)> {
        matrix_to_word(self)
            .letters()
            .iter()
            .map(|l| match l {
                Letter::S => (ModularGen::S, false),
                Letter::T => (ModularGen::T, false),
                Letter::Tinv => (ModularGen::T, true),
            })
            .collect()
    }
}

/// Freely reduced word in abstract generators `0..`; an element of a free group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FreeWord(Vec<(usize, bool)>);

impl FreeWord {
    pub fn new(letters: Vec<(usize, bool)>) -> FreeWord {
        let mut out: Vec<(usize, bool)> = Vec::with_capacity(letters.len());
        for (g, inv) in letters {
            if out.last() == Some(&(g, !inv)) {
                out.pop();
            } else {
                out.push((g, inv));
            }
        }
        FreeWord(out)
    }

    pub fn letters(&self) -> &[(usize, bool)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl GroupElement for FreeWord {
    type Gen = usize;

    fn identity() -> Self {
        FreeWord::default()
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&rhs.0);
        FreeWord::new(v)
    }
    fn inverse(&self) -> Self {
        FreeWord(self.0.iter().rev().map(|&(g, i)| (g, !i)).collect())
    }
    fn generator(g: usize) -> Self {
        FreeWord(vec![(g, false)])
    }
    fn factor(&self) -> Vec<(usize, bool)> {
        self.0.clone()
    }
}

/// Finite formal linear combination of group elements; zero coefficients
/// are never stored.
#[derive(Clone, PartialEq)]
pub struct GroupRingElement<G: GroupElement, T: Scalar> {
    terms: BTreeMap<G, T>,
}

impl<G: GroupElement, T: Scalar> fmt::Debug for GroupRingElement<G, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<G: GroupElement, T: Scalar> Default for GroupRingElement<G, T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<G: GroupElement, T: Scalar> GroupRingElement<G, T> {
    pub fn zero() -> Self {
        GroupRingElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::basis(G::identity())
    }

    pub fn basis(g: G) -> Self {
        Self::term(g, T::one())
    }

    pub fn term(g: G, c: T) -> Self {
        let mut e = Self::zero();
        e.add_term(g, c);
        e
    }

    /// `g - 1`
    pub fn minus_one(g: G) -> Self {
        Self::basis(g).sub(&Self::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (G, T)>) -> Self {
        let mut e = Self::zero();
        for (g, c) in terms {
            e.add_term(g, c);
        }
        e
    }

    pub fn add_term(&mut self, g: G, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&g);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&G, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &G) -> T {
        self.terms.get(g).cloned().unwrap_or_else(T::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &rhs.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &rhs.terms {
            out.add_term(g.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(g, v)| (g.clone(), v.clone() * c.clone())))
    }

    /// Convolution product.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (g, a) in &self.terms {
            for (h, b) in &rhs.terms {
                out.add_term(g.mul(h), a.clone() * b.clone());
            }
        }
        out
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, c| acc + c.clone())
    }

    /// Applies a representation term by term.
    pub fn apply<R: GroupRep<G, T>>(&self, rep: &R) -> Matrix<T> {
        let mut out = Matrix::zeros(rep.dim());
        for (g, c) in &self.terms {
            out = out.add(&rep.image(g).scale(c));
        }
        out
    }
}

/// `sum x_i (s_i - 1)` over generators `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<G: GroupElement, T: Scalar> {
    pub summands: Vec<(GroupRingElement<G, T>, G::Gen)>,
}

impl<G: GroupElement, T: Scalar> Decomposition<G, T> {
    pub fn reconstruct(&self) -> GroupRingElement<G, T> {
        self.summands.iter().fold(GroupRingElement::zero(), |acc, (x, s)| {
            acc.add(&x.mul(&GroupRingElement::minus_one(G::generator(*s))))
        })
    }
}

/// Writes `gamma - 1` as `sum x_s (s - 1)`, one summand per generator that
/// occurs, by induction along the normal-form factorization: for
/// `sigma' = sigma s`,
/// `sigma s - 1 = (sigma - 1)(s - 1) + (sigma - 1) + (s - 1)`,
/// and `s^{-1} - 1 = -s^{-1} (s - 1)`.
pub fn generator_decomposition<G: GroupElement, T: Scalar>(gamma: &G) -> Decomposition<G, T> {
    let mut acc: BTreeMap<G::Gen, GroupRingElement<G, T>> = BTreeMap::new();
    let mut sigma = G::identity();
    for (s, inverted) in gamma.factor() {
        let sigma_minus_one = GroupRingElement::<G, T>::minus_one(sigma.clone());
        // coefficient of (s - 1) contributed by (sigma - 1)(s - 1) + (s - 1)
        let mut x = sigma_minus_one.add(&GroupRingElement::one());
        let step = G::generator(s);
        if inverted {
            let sinv = step.inverse();
            x = x.mul(&GroupRingElement::basis(sinv.clone())).scale(&-T::one());
            sigma = sigma.mul(&sinv);
        } else {
            sigma = sigma.mul(&step);
        }
        let entry = acc.entry(s).or_default();
        *entry = entry.add(&x);
    }
    Decomposition {
        summands: acc.into_iter().filter(|(_, x)| !x.is_zero()).map(|(s, x)| (x, s)).collect(),
    }
}

/// Something that maps group elements to matrices.
pub trait GroupRep<G: GroupElement, T: Scalar> {
    fn dim(&self) -> usize;
    fn image(&self, g: &G) -> Matrix<T>;
    fn generators(&self) -> Vec<G::Gen>;
    fn generator_image(&self, s: G::Gen, inverted: bool) -> Matrix<T>;
}

impl<T: Scalar> GroupRep<ProjectiveMatrix, T> for Representation<T> {
    fn dim(&self) -> usize {
        Representation::dim(self)
    }
    fn image(&self, g: &ProjectiveMatrix) -> Matrix<T> {
        self.evaluate(g)
    }
    fn generators(&self) -> Vec<ModularGen> {
        vec![ModularGen::S, ModularGen::T]
    }
    fn generator_image(&self, s: ModularGen, inverted: bool) -> Matrix<T> {
        match (s, inverted) {
            (ModularGen::S, _) => self.rho_s().clone(),
            (ModularGen::T, false) => self.rho_t().clone(),
            (ModularGen::T, true) => self.rho_t_inv().clone(),
        }
    }
}

/// A group given by generator names and relation words.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<FreeWord>,
}

impl GroupPresentation {
    /// Free group on `g1, ..., gn`.
    pub fn free(n: usize) -> Self {
        GroupPresentation {
            generators: (1..=n).map(|i| format!("g{i}")).collect(),
            relations: Vec::new(),
        }
    }

    /// `Gamma(1) = <S, T | S^2, (ST)^3>`.
    pub fn modular() -> Self {
        let s = (0, false);
        let t = (1, false);
        GroupPresentation {
            generators: vec!["S".into(), "T".into()],
            relations: vec![
                FreeWord::new(vec![s, s]),
                FreeWord::new(vec![s, t, s, t, s, t]),
            ],
        }
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))
    }

    /// Parses whitespace-separated generator names, `x^-1` for inverses.
    /// A token without whitespace that consists of single-letter generator
    /// names (like `STST`) is split into letters.
    pub fn parse_word(&self, s: &str) -> Result<FreeWord> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            if let Ok(i) = self.generator_index(name) {
                letters.push((i, inv));
            } else if !inv && name.chars().all(|c| self.generator_index(&c.to_string()).is_ok()) {
                for c in name.chars() {
                    letters.push((self.generator_index(&c.to_string())?, false));
                }
            } else {
                return Err(Error::Parse(format!("unknown generator {name:?}")));
            }
        }
        Ok(FreeWord::new(letters))
    }

    pub fn format_word(&self, w: &FreeWord) -> String {
        w.letters()
            .iter()
            .map(|&(g, inv)| {
                if inv {
                    format!("{}^-1", self.generators[g])
                } else {
                    self.generators[g].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A representation of a presented group by generator images.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRep<T: Scalar> {
    pub group: GroupPresentation,
    images: Vec<Matrix<T>>,
    inverses: Vec<Matrix<T>>,
}

impl<T: Scalar> GeneratorRep<T> {
    pub fn new(group: GroupPresentation, images: Vec<Matrix<T>>) -> Result<Self> {
        if images.len() != group.generators.len() {
            return Err(Error::DimensionMismatch {
                expected: group.generators.len(),
                found: images.len(),
            });
        }
        let dim = images.first().map(|m| m.dim()).unwrap_or(1);
        let mut inverses = Vec::with_capacity(images.len());
        for m in &images {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            inverses.push(
                m.inverse()
                    .ok_or_else(|| Error::Domain("generator image is singular".into()))?,
            );
        }
        Ok(GeneratorRep {
            group,
            images,
            inverses,
        })
    }

    pub fn images(&self) -> &[Matrix<T>] {
        &self.images
    }

    /// Maximal deviation from the identity over the relation words.
    pub fn relation_deviation(&self) -> f64 {
        self.group
            .relations
            .iter()
            .map(|r| self.image(r).minus_identity().max_abs())
            .fold(0.0, f64::max)
    }

    /// For the two-generator presentation `<S, T>`, the corresponding
    /// representation of the modular group, with `N` the order of `eta(T)`
    /// (searched up to `max_order`).
    pub fn to_modular(&self, max_order: u64) -> Result<Representation<T>> {
        if self.group.generators != ["S", "T"] {
            return Err(Error::Domain("presentation is not <S, T>".into()));
        }
        let t = &self.images[1];
        let mut p = t.clone();
        for n in 1..=max_order {
            if p.minus_identity().max_abs() <= 1e-12 * t.dim() as f64 {
                return Representation::new(self.images[0].clone(), t.clone(), n);
            }
            p = p.mul(t);
        }
        Err(Error::Domain(format!("eta(T) has no finite order <= {max_order}")))
    }
}

impl<T: Scalar> GroupRep<FreeWord, T> for GeneratorRep<T> {
    fn dim(&self) -> usize {
        self.images.first().map(|m| m.dim()).unwrap_or(1)
    }
    fn image(&self, g: &FreeWord) -> Matrix<T> {
        g.letters()
            .iter()
            .fold(Matrix::identity(GroupRep::dim(self)), |acc, &(i, inv)| {
                acc.mul(if inv { &self.inverses[i] } else { &self.images[i] })
            })
    }
    fn generators(&self) -> Vec<usize> {
        (0..self.images.len()).collect()
    }
    fn generator_image(&self, s: usize, inverted: bool) -> Matrix<T> {
        if inverted {
            self.inverses[s].clone()
        } else {
            self.images[s].clone()
        }
    }
}

/// `eta_chi(g) = [[1, chi(g)], [0, 1]]` on the generators of `group`.
///
/// `chi` must extend to a homomorphism, i.e. its letter sum over every
/// relation must vanish; otherwise `RelationViolation`.
pub fn build_eta_chi<T: Scalar + fmt::Display>(
    group: &GroupPresentation,
    chi: &[T],
) -> Result<GeneratorRep<T>> {
    if chi.len() != group.generators.len() {
        return Err(Error::DimensionMismatch {
            expected: group.generators.len(),
            found: chi.len(),
        });
    }
    for rel in &group.relations {
        let sum = rel.letters().iter().fold(T::zero(), |acc, &(g, inv)| {
            if inv {
                acc - chi[g].clone()
            } else {
                acc + chi[g].clone()
            }
        });
        if !sum.is_zero() {
            return Err(Error::RelationViolation {
                relation: group.format_word(rel),
                sum: sum.to_string(),
            });
        }
    }
    let images = chi
        .iter()
        .map(|x| {
            let mut m = Matrix::identity(2);
            m.set(0, 1, x.clone());
            m
        })
        .collect();
    GeneratorRep::new(group.clone(), images)
}

/// `chi` of a word under the homomorphism determined by generator values.
pub fn chi_of<T: Scalar>(chi: &[T], w: &FreeWord) -> T {
    w.letters().iter().fold(T::zero(), |acc, &(g, inv)| {
        if inv {
            acc - chi[g].clone()
        } else {
            acc + chi[g].clone()
        }
    })
}

/// `Lambda(v)(gamma) = (eta(gamma) - 1) v`.
pub fn order_lowering<G: GroupElement, T: Scalar, R: GroupRep<G, T>>(
    eta: &R,
    v: &[T],
    gamma: &G,
) -> Result<Vec<T>> {
    if v.len() != eta.dim() {
        return Err(Error::DimensionMismatch {
            expected: eta.dim(),
            found: v.len(),
        });
    }
    Ok(eta.image(gamma).minus_identity().apply(v))
}

/// True if `v` is fixed by every generator.
pub fn is_invariant<G: GroupElement, T: Scalar, R: GroupRep<G, T>>(eta: &R, v: &[T], tol: f64) -> bool {
    eta.generators().into_iter().all(|s| {
        eta.generator_image(s, false)
            .minus_identity()
            .apply(v)
            .iter()
            .all(|x| x.modulus() <= tol)
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct UnipotentReport {
    pub q: usize,
    pub samples: usize,
    /// max Frobenius norm of prod (eta(gamma_i) - I) over the samples
    pub max_norm: f64,
    /// Outcome of the exact decision procedure, when it applies (q <= 2, dim <= 4).
    pub exact: Option<bool>,
    pub tol: f64,
    pub pass: bool,
}

/// Image of a random word of length `1..=max_len` in generators and inverses.
fn random_image<G: GroupElement, T: Scalar, R: GroupRep<G, T>, Rn: Rng>(
    eta: &R,
    rng: &mut Rn,
    max_len: usize,
) -> Matrix<T> {
    let gens = eta.generators();
    let len = rng.gen_range(1..=max_len);
    let mut m = Matrix::identity(eta.dim());
    for _ in 0..len {
        let s = gens[rng.gen_range(0..gens.len())];
        m = m.mul(&eta.generator_image(s, rng.gen_bool(0.5)));
    }
    m
}

/// Checks that `eta` kills `I^{q+1}`: by sampling `(q+1)`-tuples of random
/// group elements and, for `q <= 2` and `dim <= 4`, by an exact decision.
///
/// The exact procedure uses that `I` is the left ideal generated by the
/// `s - 1`, so `eta(I^{q+1})` is spanned by
/// `(eta(s_1) - 1) B_1 (eta(s_2) - 1) ... B_q (eta(s_{q+1}) - 1)` with `B_i`
/// running over a basis of the algebra spanned by `eta(Gamma)`.
pub fn check_unipotent_order<G, T, R, Rn>(
    eta: &R,
    q: usize,
    samples: usize,
    tol: f64,
    rng: &mut Rn,
) -> UnipotentReport
where
    G: GroupElement,
    T: Scalar,
    R: GroupRep<G, T>,
    Rn: Rng,
{
    let mut max_norm: f64 = 0.0;
    for _ in 0..samples {
        let mut prod = Matrix::identity(eta.dim());
        for _ in 0..=q {
            prod = prod.mul(&random_image(eta, rng, 12).minus_identity());
        }
        max_norm = max_norm.max(prod.frobenius());
    }
    let exact = if q <= 2 && eta.dim() <= 4 {
        Some(exact_unipotent(eta, q, tol))
    } else {
        None
    };
    let sampled_ok = max_norm <= tol;
    UnipotentReport {
        q,
        samples,
        max_norm,
        exact,
        tol,
        pass: sampled_ok && exact.unwrap_or(true),
    }
}

fn negligible<T: Scalar>(x: &T, tol: f64) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.modulus() <= tol
    }
}

/// Incremental row echelon basis of a subspace of `T^m`.
struct Echelon<T: Scalar> {
    rows: Vec<(usize, Vec<T>)>,
    tol: f64,
}

impl<T: Scalar> Echelon<T> {
    /// Reduces `v` against the basis; inserts and returns true if independent.
    fn insert(&mut self, mut v: Vec<T>) -> bool {
        for (p, row) in &self.rows {
            let f = v[*p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.clone() - f.clone() * r.clone();
            }
        }
        let scale = v.iter().map(|x| x.modulus()).fold(0.0, f64::max);
        let pivot = if T::EXACT {
            v.iter().position(|x| !x.is_zero())
        } else {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !negligible(*x, self.tol))
                .max_by(|a, b| a.1.modulus().partial_cmp(&b.1.modulus()).unwrap())
                .map(|(i, _)| i)
        };
        let Some(p) = pivot else { return false };
        if !T::EXACT && scale <= self.tol {
            return false;
        }
        let inv = v[p].recip().expect("pivot is nonzero");
        for x in v.iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[p].clone();
            if !f.is_zero() {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = x.clone() - f.clone() * r.clone();
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

fn exact_unipotent<G: GroupElement, T: Scalar, R: GroupRep<G, T>>(eta: &R, q: usize, tol: f64) -> bool {
    let dim = eta.dim();
    let mut gens: Vec<Matrix<T>> = Vec::new();
    let mut nilp: Vec<Matrix<T>> = Vec::new();
    for s in eta.generators() {
        gens.push(eta.generator_image(s, false));
        gens.push(eta.generator_image(s, true));
        nilp.push(eta.generator_image(s, false).minus_identity());
    }
    // basis of the algebra spanned by eta(Gamma)
    let lin_tol = if T::EXACT { 0.0 } else { 1e-10 };
    let mut ech = Echelon { rows: Vec::new(), tol: lin_tol };
    let mut basis = vec![Matrix::<T>::identity(dim)];
    ech.insert(basis[0].entries().to_vec());
    let mut i = 0;
    while i < basis.len() {
        for g in &gens {
            let cand = basis[i].mul(g);
            if ech.insert(cand.entries().to_vec()) {
                basis.push(cand);
            }
        }
        i += 1;
    }
    // all products A_{s1} B_1 A_{s2} ... B_q A_{s_{q+1}}
    let mut layer: Vec<Matrix<T>> = nilp.clone();
    for _ in 0..q {
        let mut next = Vec::with_capacity(layer.len() * basis.len() * nilp.len());
        for m in &layer {
            for b in &basis {
                let mb = m.mul(b);
                for a in &nilp {
                    next.push(mb.mul(a));
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .all(|m| m.entries().iter().all(|x| negligible(x, tol)))
}

fn rational_to_json(r: &BigRational) -> serde_json::Value {
    if r.is_integer() {
        if let Ok(v) = i64::try_from(r.to_integer()) {
            return serde_json::Value::from(v);
        }
    }
    serde_json::Value::String(r.to_string())
}

fn rational_from_json(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                BigRational::from_f64(f).ok_or_else(|| Error::Parse(format!("bad coefficient {n}")))
            }
        }
        serde_json::Value::String(s) => s
            .parse::<BigRational>()
            .map_err(|_| Error::Parse(format!("bad rational coefficient {s:?}"))),
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

impl GroupRingElement<ProjectiveMatrix, GaussianRational> {
    /// JSON list of `{matrix, coeff_re, coeff_im}`; non-integral rationals
    /// are written as `"p/q"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(g, c)| {
                    serde_json::json!({
                        "matrix": g.to_json(),
                        "coeff_re": rational_to_json(&c.re),
                        "coeff_im": rational_to_json(&c.im),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("group ring element must be a JSON list".into()))?;
        let mut out = Self::zero();
        for t in arr {
            let m = ProjectiveMatrix::from_json(
                t.get("matrix").ok_or_else(|| Error::Parse("missing matrix".into()))?,
            )?;
            let re = rational_from_json(t.get("coeff_re").unwrap_or(&serde_json::Value::from(0)))?;
            let im = rational_from_json(t.get("coeff_im").unwrap_or(&serde_json::Value::from(0)))?;
            out.add_term(m, GaussianRational::new(re, im));
        }
        Ok(out)
    }
}

impl GroupRingElement<ProjectiveMatrix, Complex64> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(g, c)| {
                    serde_json::json!({ "matrix": g.to_json(), "coeff_re": c.re, "coeff_im": c.im })
                })
                .collect(),
        )
    }
}

impl<G: GroupElement> GroupRingElement<G, GaussianRational> {
    pub fn to_complex(&self) -> GroupRingElement<G, Complex64> {
        GroupRingElement::from_terms(self.terms().map(|(g, c)| (g.clone(), c.to_complex())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_group::{word_to_matrix, Word};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use num_traits::Zero;

    type Q = GaussianRational;
    type E = GroupRingElement<ProjectiveMatrix, Q>;

    fn m(s: &str) -> ProjectiveMatrix {
        word_to_matrix(&s.parse::<Word>().unwrap())
    }

    fn q(n: i64) -> Q {
        Q::from_ratio(n, 1)
    }

    #[test]
    fn augmentation_examples() {
        assert_eq!(E::basis(m("TS")).augmentation(), q(1));
        assert!(E::minus_one(m("TST")).augmentation().is_zero());
        let x = E::from_terms([(m("T"), q(2)), (m("S"), q(3))]);
        assert_eq!(x.augmentation(), q(5));
    }

    #[test]
    fn no_stored_zeros() {
        let x = E::basis(m("T")).sub(&E::basis(m("T")));
        assert!(x.is_zero());
        let y = E::term(m("S"), Q::zero());
        assert_eq!(y.len(), 0);
    }

    #[test]
    fn product_expansion() {
        let g = m("TS");
        let t = m("St");
        let lhs = E::minus_one(g.clone()).mul(&E::minus_one(t.clone()));
        let rhs = E::basis(g.mul(&t))
            .sub(&E::basis(g))
            .sub(&E::basis(t))
            .add(&E::one());
        assert_eq!(lhs, rhs);
        let x = E::from_terms([(m("T"), Q::from_parts((1, 2), (3, 1))), (m("S"), q(-2))]);
        assert_eq!(x.mul(&E::one()), x);
    }

    #[test]
    fn decomposition_base_case_and_words() {
        let d = generator_decomposition::<ProjectiveMatrix, Q>(&ProjectiveMatrix::s());
        assert_eq!(d.summands.len(), 1);
        assert_eq!(d.summands[0].0, E::one());
        assert_eq!(d.summands[0].1, ModularGen::S);
        for w in ["T", "t", "TSTt", "SttSTTTS", "tStStS"] {
            let g = m(w);
            let d = generator_decomposition::<ProjectiveMatrix, Q>(&g);
            assert_eq!(d.reconstruct(), E::minus_one(g), "{w}");
        }
        assert!(generator_decomposition::<ProjectiveMatrix, Q>(&ProjectiveMatrix::identity())
            .summands
            .is_empty());
    }

    #[test]
    fn eta_chi_examples() {
        let f2 = GroupPresentation::free(2);
        let zero = build_eta_chi(&f2, &[q(0), q(0)]).unwrap();
        let w = f2.parse_word("g1 g2 g1^-1").unwrap();
        assert!(zero.image(&w).minus_identity().is_zero());

        let rep = build_eta_chi(&f2, &[q(1), q(-2)]).unwrap();
        let w = f2.parse_word("g1 g2 g1").unwrap();
        let img = rep.image(&w);
        assert!(img.get(0, 1).is_zero());
        assert_eq!(*img.get(0, 0), q(1));
        let img = rep.image(&f2.parse_word("g1 g1").unwrap());
        assert_eq!(*img.get(0, 1), q(2));

        let modular = GroupPresentation::modular();
        let err = build_eta_chi(&modular, &[q(0), q(1)]).unwrap_err();
        assert!(matches!(err, Error::RelationViolation { .. }));
        let triv = build_eta_chi(&modular, &[q(0), q(0)]).unwrap();
        let as_mod = triv.to_modular(12).unwrap();
        assert_eq!(as_mod.n(), 1);
    }

    #[test]
    fn order_lowering_examples() {
        let triv = Representation::<Q>::trivial(2);
        let v = vec![q(3), Q::from_parts((1, 2), (-1, 3))];
        assert!(order_lowering(&triv, &v, &m("TSt")).unwrap().iter().all(|x| x.is_zero()));

        let f2 = GroupPresentation::free(2);
        let chi = [q(1), q(-2)];
        let rep = build_eta_chi(&f2, &chi).unwrap();
        let g = f2.parse_word("g1 g2^-1 g2^-1").unwrap();
        let out = order_lowering(&rep, &[q(0), q(1)], &g).unwrap();
        assert_eq!(out, vec![chi_of(&chi, &g), q(0)]);
        assert_eq!(out[0], q(5));
        assert!(order_lowering(&rep, &[q(0)], &g).is_err());
        assert!(is_invariant(&rep, &[q(1), q(0)], 0.0));
        assert!(!is_invariant(&rep, &[q(0), q(1)], 0.0));
    }

    #[test]
    fn unipotent_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let triv = Representation::<Complex64>::trivial(1);
        let r = check_unipotent_order(&triv, 0, 20, 1e-12, &mut rng);
        assert!(r.pass && r.max_norm == 0.0 && r.exact == Some(true));

        let f2 = GroupPresentation::free(2);
        let rep = build_eta_chi(&f2, &[q(1), q(-2)]).unwrap();
        let r = check_unipotent_order(&rep, 1, 50, 0.0, &mut rng);
        assert!(r.pass && r.max_norm == 0.0 && r.exact == Some(true));
        let r0 = check_unipotent_order(&rep, 0, 50, 0.0, &mut rng);
        assert!(!r0.pass && r0.exact == Some(false));

        let six = Representation::sixth_root();
        let r = check_unipotent_order(&six, 0, 50, 1e-12, &mut rng);
        assert!(!r.pass && r.max_norm > 0.1);
    }

    #[test]
    fn json_round_trip() {
        let x = E::from_terms([(m("T"), Q::from_parts((1, 2), (3, 1))), (m("STt"), q(-2))]);
        let j = x.to_json();
        let s = j.to_string();
        assert!(s.contains("\"1/2\""));
        assert_eq!(E::from_json(&j).unwrap(), x);
    }
}
