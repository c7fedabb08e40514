//! Dense polynomials with exact big-rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::rational_to_string;
use crate::error::{Error, Result};

/// A polynomial stored densely; index = power of the variable. Trailing zero
/// coefficients are trimmed and the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactPolynomial {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPolynomial{:?}", self.coeff_strings())
    }
}

impl ExactPolynomial {
    pub fn zero() -> Self {
        ExactPolynomial { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ExactPolynomial { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// `c · x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_to_string).collect()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Value at 1, i.e. the coefficient sum.
    pub fn eval_one(&self) -> BigRational {
        self.coeffs.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ExactPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        ExactPolynomial {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Exact synthetic division by `(1 − t)`; `None` when the remainder is
    /// nonzero (i.e. the value at 1 is nonzero).
    pub fn div_one_minus_t(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if !self.eval_one().is_zero() {
            return None;
        }
        // (1 − t) Q = P gives q_k = q_{k−1} + p_k; the final prefix sum is
        // P(1) = 0 and drops off the end.
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        let mut acc = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            acc += c;
            coeffs.push(acc.clone());
        }
        Some(Self::from_coeffs(coeffs))
    }

    /// Divide by `(1 − t)^k`, asserting exact divisibility at each step.
    pub fn div_one_minus_t_power(&self, k: usize) -> Result<Self> {
        let mut acc = self.clone();
        for step in 1..=k {
            acc = acc.div_one_minus_t().ok_or(Error::DivisibilityFailure {
                factor: format!("(1-t)^{step}"),
            })?;
        }
        Ok(acc)
    }

    /// Unique interpolating polynomial through distinct nodes (Lagrange form).
    pub fn interpolate(points: &[(BigRational, BigRational)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Self::from_coeffs(vec![BigRational::one()]);
            let mut denom = BigRational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = basis.mul(&Self::from_coeffs(vec![-xj.clone(), BigRational::one()]));
                denom *= xi - xj;
            }
            acc = acc.add(&basis.scale(&(yi / denom)));
        }
        acc
    }
}
