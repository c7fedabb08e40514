//! Small exact-arithmetic helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Falling factorial n(n-1)...(n-k+1).
pub fn falling(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k {
        acc *= n - t;
    }
    acc
}

/// Binomial coefficient with a big (possibly small) top argument and small k.
/// `a` may be smaller than `k`, in which case a factor of the product is zero.
pub fn binomial_big(a: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    for t in 0..k {
        num *= a - BigInt::from(t);
    }
    num / factorial(k)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    binomial_big(&BigInt::from(n), k)
}

/// Group order r^n * n!.
pub fn group_order(n: usize, r: u32) -> BigInt {
    BigInt::from(r).pow(n as u32) * factorial(n)
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Render a rational as `p/q`, or just `p` when the denominator is one.
pub fn rational_to_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p`, `p/q` or a plain decimal integer into an exact rational.
pub fn rational_from_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let mk_err = || Error::Parse(format!("expected a rational `p/q`, got `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| mk_err())?;
            let q: BigInt = q.trim().parse().map_err(|_| mk_err())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| mk_err())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// Exact f64 view of a rational, for reporting only.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or_else(|| {
        // Fall back to a long division when the parts overflow f64 separately.
        let sign = if x.is_negative() { -1.0 } else { 1.0 };
        sign * f64::INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(binomial_big(&BigInt::from(2), 5), BigInt::zero());
        assert_eq!(falling(5, 3), BigInt::from(60));
        assert_eq!(group_order(2, 2), BigInt::from(8));
        assert_eq!(group_order(0, 4), BigInt::one());
    }

    #[test]
    fn rational_round_trip() {
        let x = rat(-15, 2);
        assert_eq!(rational_to_string(&x), "-15/2");
        assert_eq!(rational_from_str("-15/2").unwrap(), x);
        assert_eq!(rational_to_string(&rat(4, 1)), "4");
        assert_eq!(rational_from_str(" 4 ").unwrap(), rat_int(4));
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("x").is_err());
    }
}
