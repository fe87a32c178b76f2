//! Dense complex polynomials and the Bombieri inner product on `C_n[X]`.
//!
//! The inner product weights coefficient `i` by `binom(n, i)^-1`, which turns
//! `(conj(alpha) X + 1)^n` into a reproducing kernel for evaluation at `alpha`.
//! That identity is what lets the Walsh coalescence principle be applied to
//! point evaluations (see [`multiaffine_form`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial with complex coefficients, constant term first.
///
/// Trailing zero coefficients are always stripped, except that the zero
/// polynomial keeps a single `0` coefficient.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.normalize();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `X^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    /// Monic polynomial whose zeros are `roots` (with multiplicity).
    ///
    /// Linear factors are multiplied in input order.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(Complex64::new(1.0, 0.0));
        for &root in roots {
            // multiply by (z - root) in place
            coeffs.push(Complex64::new(0.0, 0.0));
            for i in (1..coeffs.len()).rev() {
                coeffs[i] = coeffs[i - 1] - root * coeffs[i];
            }
            coeffs[0] = -root * coeffs[0];
        }
        Polynomial { coeffs }
    }

    fn normalize(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Complex64::new(1.0, 0.0)
    }

    /// Largest coefficient modulus.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `P - w`, the polynomial whose zeros are the solutions of `P(z) = w`.
    pub fn shift_value(&self, w: Complex64) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] -= w;
        Polynomial::new(coeffs)
    }

    /// Coefficient-wise comparison with relative tolerance `rel`, measured
    /// against the larger coefficient norm of the two operands.
    pub fn approx_eq(&self, other: &Polynomial, rel: f64) -> bool {
        let scale = 1.0 + self.max_coeff_norm().max(other.max_coeff_norm());
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..len).all(|i| {
            let a = self.coeffs.get(i).copied().unwrap_or(zero);
            let b = other.coeffs.get(i).copied().unwrap_or(zero);
            (a - b).norm() <= rel * scale
        })
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Polynomial").field(&self.coeffs).finish()
    }
}

impl From<Vec<[f64; 2]>> for Polynomial {
    fn from(pairs: Vec<[f64; 2]>) -> Self {
        Polynomial::new(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<Polynomial> for Vec<[f64; 2]> {
    fn from(p: Polynomial) -> Self {
        p.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Polynomial::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero)
                        + rhs.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

/// Serde adapter for sequences of complex numbers stored as `[re, im]` pairs.
pub mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

/// Parse a root list (JSON array of `[re, im]` pairs).
pub fn roots_from_json(text: &str) -> serde_json::Result<Vec<Complex64>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
    Ok(pairs
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect())
}

pub fn roots_to_json(roots: &[Complex64]) -> String {
    let pairs: Vec<[f64; 2]> = roots.iter().map(|c| [c.re, c.im]).collect();
    serde_json::to_string(&pairs).expect("finite pairs serialize")
}

/// `binom(n, k)` as a float, by the multiplicative recurrence.
///
/// Stays finite far past the point where `u64` overflows (n around 67).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The space `C_n[X]` with its Bombieri inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InnerProductSpace {
    n: usize,
}

impl InnerProductSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("inner-product space needs n >= 1"));
        }
        Ok(InnerProductSpace { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        p.degree() <= self.n
    }

    pub fn inner(&self, p: &Polynomial, q: &Polynomial) -> Result<Complex64> {
        bombieri_inner(p, q, self.n)
    }

    /// The kernel `(conj(alpha) X + 1)^n`.
    pub fn kernel(&self, alpha: Complex64) -> Polynomial {
        let factor = Polynomial::new(vec![Complex64::new(1.0, 0.0), alpha.conj()]);
        (0..self.n).fold(Polynomial::constant(Complex64::new(1.0, 0.0)), |acc, _| {
            &acc * &factor
        })
    }

    /// The derivative kernel `X (conj(alpha) X + 1)^(n-1)`.
    pub fn derivative_kernel(&self, alpha: Complex64) -> Polynomial {
        let factor = Polynomial::new(vec![Complex64::new(1.0, 0.0), alpha.conj()]);
        (0..self.n - 1).fold(Polynomial::monomial(1), |acc, _| &acc * &factor)
    }
}

/// `<P, Q>_n = sum_i binom(n, i)^-1 p_i conj(q_i)`.
pub fn bombieri_inner(p: &Polynomial, q: &Polynomial, n: usize) -> Result<Complex64> {
    for poly in [p, q] {
        if poly.degree() > n {
            return Err(Error::DegreeOverflow {
                degree: poly.degree(),
                n,
            });
        }
    }
    let len = p.coeffs.len().min(q.coeffs.len());
    Ok((0..len)
        .map(|i| p.coeffs[i] * q.coeffs[i].conj() / binomial(n, i))
        .sum())
}

/// `<P, (conj(a_1) X + 1) ... (conj(a_n) X + 1)>_n` with `n = alphas.len()`.
///
/// This is the polarization of `P` evaluated at `alphas`; when every `a_k`
/// equals `a` it reduces to `P(a)`.
pub fn multiaffine_form(p: &Polynomial, alphas: &[Complex64]) -> Result<Complex64> {
    let n = alphas.len();
    if n == 0 {
        return Err(Error::EmptyInput(
            "multiaffine form needs at least one point",
        ));
    }
    let product = alphas
        .iter()
        .fold(Polynomial::constant(Complex64::new(1.0, 0.0)), |acc, a| {
            &acc * &Polynomial::new(vec![Complex64::new(1.0, 0.0), a.conj()])
        });
    bombieri_inner(p, &product, n)
}
