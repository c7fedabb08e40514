//! Exact descent generating functions on `B_n`.
//!
//! The whole-group polynomial `B_n(t) = Σ_ω t^{des_B(ω)+1}` satisfies
//! `B_n(t)/(1−t)^{n+1} = Σ_{k≥1} (2k−1)^n t^k`, and the per-class polynomial
//! `B_{λ,μ}(t)` has the analogous expansion whose `t^k` coefficient is a
//! product of binomials in the primitive-necklace counts
//! `N(q, 2m) = (1/2m) Σ_{d|m, d odd} μ(d) (q^{m/d} − 1)`.
//!
//! Coefficients are always extracted through the finite alternating sum
//! against `(1−t)^{n+1}`; every computation here is a finite exact sum, no
//! truncated power series. The expansion theorems relating `B_{λ,μ}` to
//! `B_n` are checked by exact synthetic division by powers of `(1−t)`, and
//! the central-limit behaviour of descents is reported through exact
//! standardized moments (floats appear only in the final report).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, binomial_big, factorial, rat_int, rational_to_f64};
use crate::classes::RPartition;
use crate::error::{Error, Result};
use crate::poly::ExactPolynomial;

/// Number-theoretic Möbius function, by trial-division factorization.
pub fn mobius(d: u64) -> i32 {
    assert!(d >= 1, "mobius needs d >= 1");
    let mut d = d;
    let mut primes = 0;
    let mut p = 2u64;
    while p * p <= d {
        if d % p == 0 {
            d /= p;
            if d % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if d > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `N(q, 2m) = (1/2m) Σ_{d|m, d odd} μ(d) (q^{m/d} − 1)` for odd `q`.
/// Counts primitive necklaces, hence always a nonnegative integer;
/// `N(1, 2m) = 0`.
pub fn necklace_count(q: u64, m: u64) -> Result<BigInt> {
    if q % 2 == 0 {
        return Err(Error::Invalid(format!("necklace count needs odd q, got {q}")));
    }
    if q < 1 || m < 1 {
        return Err(Error::Invalid("necklace count needs q, m >= 1".into()));
    }
    let mut sum = BigInt::zero();
    for d in 1..=m {
        if m % d != 0 || d % 2 == 0 {
            continue;
        }
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let term = BigInt::from(q).pow((m / d) as u32) - BigInt::one();
        sum += BigInt::from(mu) * term;
    }
    let (quot, rem) = num_integer::Integer::div_rem(&sum, &BigInt::from(2 * m));
    if !rem.is_zero() {
        return Err(Error::DivisibilityFailure {
            factor: format!("2m = {} in the Möbius sum", 2 * m),
        });
    }
    Ok(quot)
}

/// Coefficients of `(1−t)^{n+1} Σ_k c_k t^k`: the finite alternating sum
/// `[t^d] = Σ_{k=1}^{d} (−1)^{d−k} C(n+1, d−k) c_k`.
fn extract_polynomial(n: usize, series_coeff: impl Fn(usize) -> BigInt) -> ExactPolynomial {
    let degree = n + 1;
    let cs: Vec<BigInt> = (0..=degree).map(|k| if k == 0 { BigInt::zero() } else { series_coeff(k) }).collect();
    let mut coeffs = Vec::with_capacity(degree + 1);
    for d in 0..=degree {
        let mut acc = BigInt::zero();
        for k in 1..=d {
            let term = binomial(n + 1, d - k) * &cs[k];
            if (d - k) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        coeffs.push(BigRational::from_integer(acc));
    }
    ExactPolynomial::from_coeffs(coeffs)
}

/// `B_n(t) = Σ_{ω ∈ B_n} t^{des_B(ω)+1}`, from
/// `B_n(t)/(1−t)^{n+1} = Σ_{k≥1} (2k−1)^n t^k`.
pub fn group_descent_poly(n: usize) -> ExactPolynomial {
    extract_polynomial(n, |k| BigInt::from(2 * k - 1).pow(n as u32))
}

/// `t^k` coefficient of `B_{λ,μ}(t)/(1−t)^{n+1}`:
/// `δ_{((1^n),∅)}` at `k = 1`, and for `k ≥ 2`
/// `C(N(2k−1,2)+m_1(λ), m_1(λ)) · ∏_{i≥2} C(N(2k−1,2i)+m_i(λ)−1, m_i(λ))
///  · ∏_{i≥1} C(N(2k−1,2i), m_i(μ))`.
fn class_series_coeff(label: &RPartition, k: usize) -> Result<BigInt> {
    if k == 1 {
        let is_identity_class =
            label.component(1).is_empty() && label.component(0).iter().all(|&p| p == 1);
        return Ok(if is_identity_class {
            BigInt::one()
        } else {
            BigInt::zero()
        });
    }
    let q = 2 * k as u64 - 1;
    let m1_lambda = label.multiplicity(0, 1);
    // N(2k−1, 2) = k − 1; the extra +1 in the exponent of (1−x_1 u) shifts
    // the first factor to C(N+m, m).
    let mut acc = binomial_big(&BigInt::from(k - 1 + m1_lambda), m1_lambda);
    let distinct = |comp: &[usize]| {
        let mut seen = Vec::new();
        for &p in comp {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        seen
    };
    for i in distinct(label.component(0)) {
        if i == 1 {
            continue;
        }
        let m = label.multiplicity(0, i);
        let necklaces = necklace_count(q, i as u64)?;
        acc *= binomial_big(&(necklaces + BigInt::from(m) - BigInt::one()), m);
    }
    for i in distinct(label.component(1)) {
        let m = label.multiplicity(1, i);
        let necklaces = necklace_count(q, i as u64)?;
        acc *= binomial_big(&necklaces, m);
    }
    Ok(acc)
}

/// `B_{λ,μ}(t) = Σ_{ω ∈ C_{λ,μ}} t^{des_B(ω)+1}`, degree ≤ n+1 and
/// `B_{λ,μ}(1) = |C_{λ,μ}|`.
pub fn class_descent_poly(label: &RPartition) -> Result<ExactPolynomial> {
    if label.r() != 2 {
        return Err(Error::Invalid(format!(
            "descent generating functions are for B_n (r = 2), got r = {}",
            label.r()
        )));
    }
    let n = label.n();
    let coeffs: Result<Vec<BigInt>> = (0..=n + 1)
        .map(|k| {
            if k == 0 {
                Ok(BigInt::zero())
            } else {
                class_series_coeff(label, k)
            }
        })
        .collect();
    let coeffs = coeffs?;
    Ok(extract_polynomial(n, |k| coeffs[k].clone()))
}

/// Number of elements of `C_{λ,μ}` with exactly `d − 1` descents.
pub fn descent_count(label: &RPartition, d: usize) -> Result<BigInt> {
    let n = label.n();
    if d < 1 || d > n + 1 {
        return Err(Error::OutOfRange(format!(
            "descent count index d = {d} outside [1, {}]",
            n + 1
        )));
    }
    let poly = class_descent_poly(label)?;
    let c = poly.coeff(d);
    debug_assert!(c.denom().is_one());
    Ok(c.numer().clone())
}

/// k-th raw moment of `des_B` under the distribution encoded by `P`
/// (values are exponent − 1, weights the coefficients): `Σ c_d (d−1)^k / P(1)`.
pub fn poly_moments(poly: &ExactPolynomial, k: u32) -> Result<BigRational> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if poly.coeffs().iter().any(|c| c.is_negative()) {
        return Err(Error::Invalid(
            "moment extraction needs nonnegative coefficients".into(),
        ));
    }
    let mut acc = BigRational::zero();
    for (d, c) in poly.coeffs().iter().enumerate() {
        if c.is_zero() || d == 0 {
            continue;
        }
        acc += c * rat_int(d as i64 - 1).pow(k as i32);
    }
    Ok(acc / poly.eval_one())
}

use num_traits::Pow;

/// Two-term expansion around the whole group:
/// `B_{λ,μ}/|C| − B_n/(2^n n!) − (1−t)/(2n) · B_{n−1}/(2^{n−1}(n−1)!) · Δ²`
/// is exactly divisible by `(1−t)²`; returns the quotient `g(t)`.
pub fn expansion_remainder(label: &RPartition) -> Result<ExactPolynomial> {
    let n = label.n();
    if n < 1 {
        return Err(Error::Invalid("the expansion theorem needs n >= 1".into()));
    }
    let class_part = class_descent_poly(label)?
        .scale(&BigRational::new(BigInt::one(), label.class_size()));
    let group_part = group_descent_poly(n).scale(&BigRational::new(
        BigInt::one(),
        BigInt::from(2).pow(n as u32) * factorial(n),
    ));
    let correction_scale = BigRational::new(
        BigInt::from(label.delta(2)?),
        BigInt::from(2 * n) * BigInt::from(2).pow(n as u32 - 1) * factorial(n - 1),
    );
    let correction = ExactPolynomial::from_integers(&[1, -1])
        .mul(&group_descent_poly(n - 1))
        .scale(&correction_scale);
    let difference = class_part.sub(&group_part).sub(&correction);
    difference.div_one_minus_t_power(2)
}

/// Long-cycle expansion: on a class with no cycles of length up to `2ℓ`,
/// `B_{λ,μ}/|C| − B_n/(2^n n!)` is divisible by `(1−t)^{ℓ+1}`; returns `g(t)`.
pub fn long_cycle_remainder(label: &RPartition, ell: usize) -> Result<ExactPolynomial> {
    if !label.has_no_cycles_up_to(2 * ell) {
        return Err(Error::ShortCycles {
            label: label.to_string(),
            bound: 2 * ell,
        });
    }
    let n = label.n();
    let class_part = class_descent_poly(label)?
        .scale(&BigRational::new(BigInt::one(), label.class_size()));
    let group_part = group_descent_poly(n).scale(&BigRational::new(
        BigInt::one(),
        BigInt::from(2).pow(n as u32) * factorial(n),
    ));
    class_part.sub(&group_part).div_one_minus_t_power(ell + 1)
}

/// `E_{λ,μ}[des_B^k] = E_{B_n}[des_B^k]` on classes with no cycles of length
/// up to `2k`, decided from the exact polynomials.
pub fn moment_equality_check(label: &RPartition, k: u32) -> Result<bool> {
    if !label.has_no_cycles_up_to(2 * k as usize) {
        return Err(Error::ShortCycles {
            label: label.to_string(),
            bound: 2 * k as usize,
        });
    }
    let class_moment = poly_moments(&class_descent_poly(label)?, k)?;
    let group_moment = poly_moments(&group_descent_poly(label.n()), k)?;
    Ok(class_moment == group_moment)
}

/// Where a descent distribution comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CltSource {
    WholeGroup { n: usize },
    Class { label: RPartition },
}

impl fmt::Display for CltSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CltSource::WholeGroup { n } => write!(f, "B_{n}"),
            CltSource::Class { label } => write!(f, "class {label}"),
        }
    }
}

/// Exact mean/variance of `des_B` plus float standardized third and fourth
/// moments; the CLT predicts skewness → 0 and excess kurtosis → 0.
///
/// The standardized moments are computed from exact central moments and only
/// converted to f64 at the end; past n ≈ 10^4 the conversion itself limits
/// the reported precision.
#[derive(Clone, Debug)]
pub struct CltReport {
    pub source: CltSource,
    pub n: usize,
    pub mean: BigRational,
    pub variance: BigRational,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn clt_report(source: &CltSource) -> Result<CltReport> {
    let (n, poly) = match source {
        CltSource::WholeGroup { n } => (*n, group_descent_poly(*n)),
        CltSource::Class { label } => (label.n(), class_descent_poly(label)?),
    };
    let raw: Vec<BigRational> = (1..=4)
        .map(|k| poly_moments(&poly, k))
        .collect::<Result<_>>()?;
    let mean = raw[0].clone();
    let variance = &raw[1] - &mean * &mean;
    if variance.is_zero() {
        return Err(Error::DegenerateDistribution);
    }
    let m3 = &raw[2] - rat_int(3) * &raw[1] * &mean + rat_int(2) * &mean * &mean * &mean;
    let m4 = &raw[3] - rat_int(4) * &raw[2] * &mean
        + rat_int(6) * &raw[1] * &mean * &mean
        - rat_int(3) * &mean * &mean * &mean * &mean;
    let var_f = rational_to_f64(&variance);
    let skewness = rational_to_f64(&m3) / var_f.powf(1.5);
    let excess_kurtosis = rational_to_f64(&(&m4 / (&variance * &variance))) - 3.0;
    Ok(CltReport {
        source: source.clone(),
        n,
        mean,
        variance,
        skewness,
        excess_kurtosis,
    })
}
