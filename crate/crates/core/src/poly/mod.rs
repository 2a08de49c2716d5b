//! Dense complex polynomials in ascending-degree storage.
//!
//! Evaluation is Horner from the leading coefficient; the first and second
//! derivative come out of the same pass. Root finding lives in [`roots`].

pub mod roots;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use roots::{is_simple, RootConfig, RootList, RootSet, Simplicity, SimplicityWitness};

/// A polynomial with complex coefficients, `coeffs[i]` multiplying `z^i`.
///
/// The leading coefficient is always nonzero and every coefficient is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialRepr", into = "PolynomialRepr")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialRepr {
    coeffs: Vec<Complex64>,
}

impl TryFrom<PolynomialRepr> for Polynomial {
    type Error = Error;

    fn try_from(repr: PolynomialRepr) -> Result<Self> {
        Polynomial::new(repr.coeffs)
    }
}

impl From<Polynomial> for PolynomialRepr {
    fn from(p: Polynomial) -> Self {
        PolynomialRepr { coeffs: p.coeffs }
    }
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients. Trailing exact zeros are
    /// dropped; an empty or identically zero list is rejected.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("empty coefficient list".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidPolynomial(format!("non-finite coefficient {bad}")));
        }
        while coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z^n - 1`.
    pub fn unit_roots(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[0] = Complex64::new(-1.0, 0.0);
        coeffs[n] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    /// Monic polynomial with exactly the given roots, repeated roots included.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidPolynomial("from_roots needs at least one root".into()));
        }
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(Complex64::new(1.0, 0.0));
        for &r in roots {
            // multiply by (z - r)
            coeffs.push(Complex64::new(0.0, 0.0));
            for i in (1..coeffs.len()).rev() {
                coeffs[i] = coeffs[i - 1] - r * coeffs[i];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Largest coefficient modulus.
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum |a_i| max(1,|z|)^i`: the magnitude against which a computed value of
    /// `p(z)` is judged. Rounding error in [`Polynomial::eval`] is a small multiple
    /// of `f64::EPSILON` times this.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let m = z.norm().max(1.0);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * m + c.norm())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` in one Horner pass.
    pub fn eval_d1(&self, z: Complex64) -> (Complex64, Complex64) {
        let n = self.degree();
        let mut p = self.coeffs[n];
        let mut d1 = Complex64::new(0.0, 0.0);
        for &c in self.coeffs[..n].iter().rev() {
            d1 = d1 * z + p;
            p = p * z + c;
        }
        (p, d1)
    }

    /// `(p(z), p'(z), p''(z))` in one Horner pass.
    pub fn eval_d2(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let n = self.degree();
        let mut p = self.coeffs[n];
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for &c in self.coeffs[..n].iter().rev() {
            d2 = d2 * z + d1;
            d1 = d1 * z + p;
            p = p * z + c;
        }
        (p, d1, d2 * 2.0)
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.eval_d1(z).1
    }

    pub fn eval_second_derivative(&self, z: Complex64) -> Complex64 {
        self.eval_d2(z).2
    }

    pub fn derivative(&self) -> Result<Polynomial> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::DegreeTooLow { degree: 0, required: 1 });
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (i + 1) as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    /// `r^n p(z / r)`; its roots are the roots of `p` multiplied by `r`.
    pub fn scale(&self, r: f64) -> Result<Polynomial> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Precondition(format!("scale factor must be finite and positive, got {r}")));
        }
        let n = self.degree() as i32;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * r.powi(n - i as i32))
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn monic(&self) -> Polynomial {
        let lead = self.leading();
        Polynomial { coeffs: self.coeffs.iter().map(|&c| c / lead).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial { coeffs }
    }

    pub fn scale_coeffs(&self, s: Complex64) -> Result<Polynomial> {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `self - other`; fails only if the difference is identically zero.
    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(zero) - other.coeffs.get(i).copied().unwrap_or(zero)
            })
            .collect();
        Polynomial::new(coeffs)
    }

    /// Quotient of synthetic division by `(z - root)`; the remainder is dropped.
    pub fn deflate(&self, root: Complex64) -> Result<Polynomial> {
        let n = self.degree();
        if n == 0 {
            return Err(Error::DegreeTooLow { degree: 0, required: 1 });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = self.coeffs[n];
        for i in (0..n).rev() {
            out[i] = acc;
            acc = acc * root + self.coeffs[i];
        }
        Polynomial::new(out)
    }

    pub fn roots(&self) -> Result<RootList> {
        self.roots_with(&RootConfig::default())
    }

    pub fn roots_with(&self, config: &RootConfig) -> Result<RootList> {
        roots::find_roots(self, config)
    }
}
