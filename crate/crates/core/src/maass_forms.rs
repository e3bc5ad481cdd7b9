//! Maass cusp forms given by Fourier coefficient vectors:
//! `u(z) = sum_{k != 0} e^{2 pi i k x / N} sqrt(y) K_nu(2 pi |k| y / N) v_k`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular_group::{mobius, ProjectiveMatrix};
use crate::representations::Representation;
use crate::scalar::cvec;
use crate::special_functions::bessel_k;

#[derive(Debug, Clone, PartialEq)]
pub struct MaassFormData {
    pub nu: Complex64,
    /// Period of the expansion (cusp width).
    pub n: u64,
    pub dim: usize,
    coeffs: BTreeMap<i64, Vec<Complex64>>,
    pub source: String,
    pub est_accuracy: f64,
}

/// A value together with a bound on the omitted Fourier terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub value: Vec<Complex64>,
    pub tail: f64,
}

impl MaassFormData {
    pub fn new(nu: Complex64, n: u64, dim: usize, coeffs: BTreeMap<i64, Vec<Complex64>>) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::Domain("N and dim must be positive".into()));
        }
        if coeffs.contains_key(&0) {
            return Err(Error::Domain("cusp forms have no k = 0 coefficient".into()));
        }
        for (k, v) in &coeffs {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
                return Err(Error::Domain(format!("coefficient v_{k} is not finite")));
            }
        }
        Ok(MaassFormData {
            nu,
            n,
            dim,
            coeffs,
            source: String::new(),
            est_accuracy: f64::NAN,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>, est_accuracy: f64) -> Self {
        self.source = source.into();
        self.est_accuracy = est_accuracy;
        self
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Vec<Complex64>> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Option<&Vec<Complex64>> {
        self.coeffs.get(&k)
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Truncation order `K = max |k|`.
    pub fn k_max(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// `max_k |v_k|`.
    pub fn coeff_bound(&self) -> f64 {
        self.coeffs.values().map(|v| cvec::norm(v)).fold(0.0, f64::max)
    }

    /// The form restricted to `|k| <= k`.
    pub fn truncated(&self, k: i64) -> MaassFormData {
        MaassFormData {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(j, _)| j.abs() <= k)
                .map(|(j, v)| (*j, v.clone()))
                .collect(),
            ..self.clone()
        }
    }

    pub fn with_nu(&self, nu: Complex64) -> MaassFormData {
        MaassFormData { nu, ..self.clone() }
    }

    fn width(&self) -> f64 {
        self.n as f64
    }

    /// `K_nu(2 pi |k| y / N)` for `|k| = 1..=K`.
    fn bessel_row(&self, y: f64) -> Result<Vec<Complex64>> {
        let kmax = self.k_max() as usize;
        let mut row = Vec::with_capacity(kmax);
        // past this point |K_nu(x)| is below 1e-18 of its size at small x
        let r = self.nu.im.abs();
        let x1 = 2.0 * PI * y / self.width();
        let negligible = |x: f64| x - (0.5 * PI * r + self.nu.norm_sqr() / (2.0 * x)).max(x1) > 42.0;
        for k in 1..=kmax {
            let x = 2.0 * PI * k as f64 * y / self.width();
            if x > 745.0 || (self.nu.re.abs() < 1.0 && negligible(x)) {
                row.resize(kmax, Complex64::new(0.0, 0.0));
                break;
            }
            row.push(bessel_k(self.nu, x)?);
        }
        Ok(row)
    }

    /// Bound on the terms `|k| > K`, from `|K_nu(x)| <= K_{Re nu}(x)` and
    /// the coefficient bound.
    pub fn tail_bound(&self, y: f64) -> f64 {
        let b = self.coeff_bound();
        let sigma = Complex64::new(self.nu.re.abs(), 0.0);
        let mut k = self.k_max() + 1;
        let mut sum = 0.0;
        loop {
            let x = 2.0 * PI * k as f64 * y / self.width();
            if x > 745.0 {
                break;
            }
            let t = bessel_k(sigma, x).map(|v| v.re).unwrap_or(0.0);
            sum += t;
            if t <= 1e-18 * sum || k > self.k_max() + 100_000 {
                break;
            }
            k += 1;
        }
        2.0 * b * y.sqrt() * sum
    }

    pub fn evaluate_u(&self, z: Complex64) -> Result<Evaluated> {
        if !(z.im > 0.0) {
            return Err(Error::Domain(format!("u needs Im z > 0, got {z}")));
        }
        let (x, y) = (z.re, z.im);
        let row = self.bessel_row(y)?;
        let sy = y.sqrt();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (k, v) in &self.coeffs {
            let kb = row[(k.unsigned_abs() - 1) as usize];
            if kb == Complex64::new(0.0, 0.0) {
                continue;
            }
            let phase = Complex64::from_polar(1.0, 2.0 * PI * *k as f64 * x / self.width());
            cvec::axpy(&mut out, phase * kb * sy, v);
        }
        Ok(Evaluated {
            value: out,
            tail: self.tail_bound(y),
        })
    }

    pub fn u(&self, z: Complex64) -> Result<Vec<Complex64>> {
        Ok(self.evaluate_u(z)?.value)
    }

    /// `|Delta_h u - (1/4 - nu^2) u|` with `Delta = -y^2 (d_x^2 + d_y^2)`
    /// discretized by the five-point stencil.
    pub fn laplace_residual(&self, z: Complex64, h: f64) -> Result<f64> {
        self.laplace_residual_for(z, h, self.nu)
    }

    /// As [`Self::laplace_residual`] but tested against the eigenvalue
    /// `1/4 - nu^2` of an arbitrary `nu`.
    pub fn laplace_residual_for(&self, z: Complex64, h: f64, nu: Complex64) -> Result<f64> {
        if !(z.im > 2.0 * h) {
            return Err(Error::Domain("laplace_residual needs Im z > 2h".into()));
        }
        let c = self.u(z)?;
        let e = self.u(z + h)?;
        let w = self.u(z - h)?;
        let n = self.u(z + Complex64::new(0.0, h))?;
        let s = self.u(z - Complex64::new(0.0, h))?;
        let lambda = Complex64::new(0.25, 0.0) - nu * nu;
        let y2 = z.im * z.im;
        let res: Vec<Complex64> = (0..self.dim)
            .map(|j| {
                let lap = -(e[j] + w[j] + n[j] + s[j] - c[j] * 4.0) * (y2 / (h * h));
                lap - lambda * c[j]
            })
            .collect();
        Ok(cvec::norm(&res))
    }

    /// `max |u(gamma z) - eta(gamma) u(z)|` over `points`.
    pub fn automorphy_residual(
        &self,
        eta: &Representation<Complex64>,
        gamma: &ProjectiveMatrix,
        points: &[Complex64],
    ) -> Result<f64> {
        if eta.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: eta.dim(),
            });
        }
        let m = eta.evaluate(gamma);
        let mut worst: f64 = 0.0;
        for &z in points {
            let gz = mobius(gamma, z).ok_or_else(|| Error::Domain("gamma z is infinite".into()))?;
            let lhs = self.u(gz)?;
            let rhs = m.apply(&self.u(z)?);
            worst = worst.max(cvec::dist(&lhs, &rhs));
        }
        Ok(worst)
    }

    /// `u_0(y) = u(iy)/sqrt(y)` and `u_1(y) = sqrt(y)/(2 pi i) d_x u(iy)`.
    pub fn u_profile(&self, y: f64, eps: u8) -> Result<Vec<Complex64>> {
        if !(y > 0.0) {
            return Err(Error::Domain("u_profile needs y > 0".into()));
        }
        let row = self.bessel_row(y)?;
        Ok(self.profile_from_row(&row, y, eps))
    }

    fn profile_from_row(&self, row: &[Complex64], y: f64, eps: u8) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (k, v) in &self.coeffs {
            let kb = row[(k.unsigned_abs() - 1) as usize];
            let w = if eps == 0 {
                kb
            } else {
                kb * (y * *k as f64 / self.width())
            };
            cvec::axpy(&mut out, w, v);
        }
        out
    }

    /// Both profiles at once, sharing the Bessel evaluations.
    pub fn u_profiles(&self, y: f64) -> Result<[Vec<Complex64>; 2]> {
        let row = self.bessel_row(y)?;
        Ok([self.profile_from_row(&row, y, 0), self.profile_from_row(&row, y, 1)])
    }

    pub fn to_json(&self) -> FixtureJson {
        FixtureJson {
            nu: [self.nu.re, self.nu.im],
            n: self.n,
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| CoeffJson {
                    k: *k,
                    v: v.iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
            source: self.source.clone(),
            est_accuracy: self.est_accuracy,
        }
    }

    pub fn from_json(j: &FixtureJson) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for c in &j.coeffs {
            let v: Vec<Complex64> = c.v.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            if coeffs.insert(c.k, v).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient k = {}", c.k)));
            }
        }
        Ok(MaassFormData::new(Complex64::new(j.nu[0], j.nu[1]), j.n, j.dim, coeffs)?
            .with_source(j.source.clone(), j.est_accuracy))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        let j: FixtureJson = serde_json::from_str(&text)?;
        Self::from_json(&j)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path.as_ref(), text)?;
        Ok(())
    }
}

/// `{nu: [re, im], N, dim, coeffs: [{k, v: [[re, im], ...]}], source, est_accuracy}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FixtureJson {
    pub nu: [f64; 2],
    #[serde(rename = "N")]
    pub n: u64,
    pub dim: usize,
    pub coeffs: Vec<CoeffJson>,
    #[serde(default)]
    pub source: String,
    #[serde(default = "nan")]
    pub est_accuracy: f64,
}

fn nan() -> f64 {
    f64::NAN
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoeffJson {
    pub k: i64,
    pub v: Vec<[f64; 2]>,
}

/// Directory holding the bundled fixtures; `PERIODLAB_FIXTURES` overrides.
pub fn fixture_dir() -> PathBuf {
    match std::env::var_os("PERIODLAB_FIXTURES") {
        Some(p) => PathBuf::from(p),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

pub fn load_fixture(name: &str) -> Result<MaassFormData> {
    let mut p = fixture_dir().join(name);
    if p.extension().is_none() {
        p.set_extension("json");
    }
    MaassFormData::load(p)
}

/// Form with real coefficients `c_k`, `k = 1..`, for `PSL(2, Z)`:
/// `v_k = c_k`, `v_{-k} = +-c_k` (even / odd).
pub fn scalar_form(nu: Complex64, c: &[f64], odd: bool) -> Result<MaassFormData> {
    let mut coeffs = BTreeMap::new();
    for (i, &ck) in c.iter().enumerate() {
        let k = i as i64 + 1;
        coeffs.insert(k, vec![Complex64::new(ck, 0.0)]);
        coeffs.insert(-k, vec![Complex64::new(if odd { -ck } else { ck }, 0.0)]);
    }
    MaassFormData::new(nu, 1, 1, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(nu: Complex64, n: u64) -> MaassFormData {
        let mut c = BTreeMap::new();
        c.insert(1, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        MaassFormData::new(nu, n, 2, c).unwrap()
    }

    #[test]
    fn rejects_constant_term() {
        let mut c = BTreeMap::new();
        c.insert(0, vec![Complex64::new(1.0, 0.0)]);
        assert!(MaassFormData::new(Complex64::new(0.0, 1.0), 1, 1, c).is_err());
    }

    #[test]
    fn single_term_value() {
        let nu = Complex64::new(0.0, 3.1);
        let f = single(nu, 2);
        let y = 0.8;
        let u = f.u(Complex64::new(0.0, y)).unwrap();
        let k = bessel_k(nu, 2.0 * PI * y / 2.0).unwrap() * y.sqrt();
        assert!((u[0] - k).norm() < 1e-15 && u[1].norm() == 0.0);
        let p = f.u_profile(y, 0).unwrap();
        assert!((p[0] - k / y.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn laplace_residual_order() {
        let nu = Complex64::new(0.0, 2.5);
        let f = single(nu, 4);
        let z = Complex64::new(0.1, 0.9);
        let u = cvec::norm(&f.u(z).unwrap());
        let r1 = f.laplace_residual(z, 2e-3).unwrap();
        let r2 = f.laplace_residual(z, 1e-3).unwrap();
        assert!(r2 <= 1e-5 * u, "{r2} vs {u}");
        let ratio = r2 / r1;
        assert!((0.2..0.3).contains(&ratio), "ratio {ratio}");
        let r = f.laplace_residual_for(z, 1e-3, nu + 0.1).unwrap();
        assert!(r > 0.1 * u);
    }

    #[test]
    fn odd_form_has_vanishing_u0() {
        let f = scalar_form(Complex64::new(0.0, 4.0), &[1.0, -0.4, 0.25], true).unwrap();
        let p = f.u_profile(0.7, 0).unwrap();
        assert!(p[0].norm() < 1e-18);
        assert!(f.u_profile(0.7, 1).unwrap()[0].norm() > 1e-6);
    }

    #[test]
    fn t_automorphy_with_eigenvector_condition() {
        // eta(T) v_k = e^{2 pi i k / N} v_k with N = 6 and the sixth-root character
        let eta = Representation::sixth_root();
        let mut c = BTreeMap::new();
        for k in [1i64, 7, -5, 13] {
            c.insert(k, vec![Complex64::new(1.0 / k as f64, 0.3)]);
        }
        let f = MaassFormData::new(Complex64::new(0.0, 1.7), 6, 1, c).unwrap();
        let pts = [Complex64::new(0.2, 1.1), Complex64::new(-0.4, 0.6)];
        let r = f.automorphy_residual(&eta, &ProjectiveMatrix::t(), &pts).unwrap();
        assert!(r < 1e-15, "{r}");
        let r = f
            .automorphy_residual(&eta, &ProjectiveMatrix::identity(), &pts)
            .unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn tail_bound_dominates_truncation() {
        let c: Vec<f64> = (1..=30).map(|k| (k as f64).sin()).collect();
        let f = scalar_form(Complex64::new(0.0, 5.0), &c, false).unwrap();
        let g = f.truncated(15);
        for z in [Complex64::new(0.1, 0.3), Complex64::new(0.4, 1.0)] {
            let full = f.u(z).unwrap();
            let part = g.evaluate_u(z).unwrap();
            assert!(cvec::dist(&full, &part.value) <= part.tail);
        }
    }

    #[test]
    fn json_round_trip() {
        let f = scalar_form(Complex64::new(0.0, 5.0), &[1.0, 0.5], false)
            .unwrap()
            .with_source("synthetic", 0.0);
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let g = MaassFormData::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(f, g);
    }
}
