//! Moments of statistics on conjugacy classes, three ways.
//!
//! * Brute force: exact averages over an enumerated class (the oracle).
//! * The formula engine: on a class whose cycles all exceed `m`, a size-`m`
//!   acyclic constraint is satisfied with probability
//!   `1 / ((n−1)(n−2)⋯(n−m) r^m)` and a non-acyclic one never. The mean of
//!   any decomposed statistic, and via products any higher moment, is then a
//!   class-independent finite sum.
//! * Closed forms for `des_B`, `neg`, `inv`, `inv_B` on classes of `B_n`,
//!   which depend only on `n` and `Δ^k(λ,μ) = m_1(λ)^k − m_1(μ)^k`.
//!
//! Order-invariant extensions get their moment polynomials in `n` here too:
//! the first moment from exact acyclic counts, higher ones by interpolating
//! the formula engine at enough nodes (degree ≤ mk is guaranteed).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{falling, rat, rat_int};
use crate::classes::{class_elements, RPartition};
use crate::error::{Error, Result};
use crate::poly::ExactPolynomial;
use crate::statistics::{
    order_invariant_extension, statistic_from_set, uniform_set_params, Builtin, Pcp, Statistic,
};

/// Hard cap on the number of term tuples the k-th moment walk may visit.
const WORK_LIMIT: u128 = 20_000_000_000;

/// How a moment was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Formula,
    ClosedForm,
    GenFunc,
    Interpolated,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Formula => "formula",
            Method::ClosedForm => "closed_form",
            Method::GenFunc => "genfunc",
            Method::Interpolated => "interpolated",
        }
    }
}

/// An exact moment value and its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentResult {
    pub value: BigRational,
    pub method: Method,
    pub label: RPartition,
    pub k: u32,
}

fn check_stat_label(x: &Statistic, label: &RPartition) -> Result<()> {
    if x.n() != label.n() || x.r() != label.r() {
        return Err(Error::ParamMismatch {
            expected_n: label.n(),
            expected_r: label.r(),
            got_n: x.n(),
            got_r: x.r(),
        });
    }
    Ok(())
}

/// Exact k-th moment of `x` over the class, by enumeration.
pub fn brute_moment(
    x: &Statistic,
    label: &RPartition,
    k: u32,
    budget: u128,
) -> Result<MomentResult> {
    check_stat_label(x, label)?;
    let elements = class_elements(label, budget)?;
    let total: BigRational = elements
        .par_iter()
        .map(|p| x.evaluate(p).expect("params checked").pow(k as i32))
        .reduce(BigRational::zero, |a, b| a + b);
    let size = BigRational::from_integer(BigInt::from(elements.len()));
    Ok(MomentResult {
        value: total / size,
        method: Method::Brute,
        label: label.clone(),
        k,
    })
}

/// Exact distribution of `x` over the class: value → count.
pub fn brute_distribution(
    x: &Statistic,
    label: &RPartition,
    budget: u128,
) -> Result<BTreeMap<BigRational, BigInt>> {
    check_stat_label(x, label)?;
    let mut dist: BTreeMap<BigRational, BigInt> = BTreeMap::new();
    for p in class_elements(label, budget)? {
        *dist.entry(x.evaluate(&p)?).or_insert_with(BigInt::zero) += 1;
    }
    Ok(dist)
}

fn acyclic_probability(n: usize, r: u32, size: usize) -> BigRational {
    if size == 0 {
        return BigRational::one();
    }
    let denom = falling(n - 1, size) * BigInt::from(r).pow(size as u32);
    BigRational::new(BigInt::one(), denom)
}

/// `Pr[(ω,τ) satisfies (K,κ)]` on a class with all cycles longer than
/// `|K|`: zero unless acyclic, else `1/((n−1)⋯(n−m) r^m)`.
pub fn indicator_probability(pcp: &Pcp, label: &RPartition) -> Result<BigRational> {
    if pcp.n() != label.n() || pcp.r() != label.r() {
        return Err(Error::ParamMismatch {
            expected_n: label.n(),
            expected_r: label.r(),
            got_n: pcp.n(),
            got_r: pcp.r(),
        });
    }
    if !label.has_no_cycles_up_to(pcp.size()) {
        return Err(Error::ShortCycles {
            label: label.to_string(),
            bound: pcp.size(),
        });
    }
    if !pcp.is_acyclic() {
        return Ok(BigRational::zero());
    }
    Ok(acyclic_probability(label.n(), label.r(), pcp.size()))
}

/// Brute-force satisfaction probability over the class (the oracle for
/// `indicator_probability`).
pub fn brute_indicator_probability(
    pcp: &Pcp,
    label: &RPartition,
    budget: u128,
) -> Result<BigRational> {
    let elements = class_elements(label, budget)?;
    let hits = elements
        .iter()
        .filter(|p| pcp.satisfied_by(p).expect("params checked"))
        .count();
    Ok(rat(hits as i64, elements.len() as i64))
}

/// Class-independent mean of a decomposed statistic, valid on every class
/// whose cycles all exceed the degree bound.
pub fn mean_no_short_cycles(x: &Statistic) -> Result<BigRational> {
    let (n, r) = (x.n(), x.r());
    let m = x.degree_bound();
    if m > 0 && m + 1 > n {
        return Err(Error::DegreeTooLarge { bound: m, k: 1, n });
    }
    let mut acc = x.constant_part().clone();
    for (pcp, coeff) in x.terms() {
        if pcp.is_acyclic() {
            acc += coeff * acyclic_probability(n, r, pcp.size());
        }
    }
    Ok(acc)
}

/// Class-independent k-th moment of a decomposed statistic, valid on classes
/// with no cycles of length up to `m·k`.
///
/// Expands `X^k` distributively: walks k-tuples of terms, merging constraints
/// and pruning as soon as a cycle appears, accumulating
/// `∏ coeff · Pr[I_merged]`. Equivalent to the repeated-`multiply` route (a
/// test checks this) without materializing the product.
pub fn kth_moment_no_short_cycles(x: &Statistic, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::Invalid("moment order k must be >= 1".into()));
    }
    let (n, r) = (x.n(), x.r());
    let m = x.degree_bound();
    if m > 0 && m * (k as usize) + 1 > n {
        return Err(Error::DegreeTooLarge { bound: m, k: k as usize, n });
    }
    let mut items: Vec<(Pcp, BigRational)> = x
        .terms()
        .map(|(p, c)| (p.clone(), c.clone()))
        .collect();
    if !x.constant_part().is_zero() {
        items.push((Pcp::empty(n, r), x.constant_part().clone()));
    }
    if items.is_empty() {
        return Ok(BigRational::zero());
    }
    let work = (items.len() as u128).pow(k);
    if work > WORK_LIMIT {
        return Err(Error::TermBudget {
            terms: usize::MAX,
            limit: WORK_LIMIT as usize,
        });
    }

    fn walk(
        items: &[(Pcp, BigRational)],
        current: &Pcp,
        coeff: &BigRational,
        remaining: u32,
        n: usize,
        r: u32,
    ) -> BigRational {
        if remaining == 0 {
            return coeff * acyclic_probability(n, r, current.size());
        }
        let mut acc = BigRational::zero();
        for (pcp, c) in items {
            if let Some(merged) = current.merge_if_compatible(pcp).expect("same params") {
                if merged.is_acyclic() {
                    acc += walk(items, &merged, &(coeff * c), remaining - 1, n, r);
                }
            }
        }
        acc
    }

    Ok(items
        .par_iter()
        .map(|(pcp, coeff)| {
            if pcp.is_acyclic() {
                walk(&items, pcp, coeff, k - 1, n, r)
            } else {
                BigRational::zero()
            }
        })
        .reduce(BigRational::zero, |a, b| a + b))
}

/// Mean of a weighted inversion statistic `Σ wt(i,j)·inv_ij` on `C_{λ,μ}`,
/// which depends only on `n`, `m_1(λ)` and `m_1(μ)`:
/// `(α/2)(1 + (Δ¹−Δ²)/(n(n−1))) − (β/(2(n−2)))(Δ¹/(n−1) − Δ²/(n(n−1)))`
/// with `α = Σ wt(i,j)` and `β = Σ (j−i−1) wt(i,j)`.
pub fn weighted_inversion_mean(
    wt: &BTreeMap<(usize, usize), BigRational>,
    label: &RPartition,
) -> Result<BigRational> {
    if label.r() != 2 {
        return Err(Error::Invalid("weighted inversion means need r = 2".into()));
    }
    let n = label.n();
    let mut alpha = BigRational::zero();
    let mut beta = BigRational::zero();
    for (&(i, j), w) in wt {
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::OutOfRange(format!(
                "weight index ({i},{j}) violates 1 <= i < j <= {n}"
            )));
        }
        alpha += w;
        beta += BigRational::from_integer(BigInt::from(j - i - 1)) * w;
    }
    if alpha.is_zero() && beta.is_zero() {
        return Ok(BigRational::zero());
    }
    if n < 3 && !beta.is_zero() {
        return Err(Error::Invalid(format!(
            "the β correction term needs n >= 3, got n = {n}"
        )));
    }
    let d1 = rat_int(label.delta(1)?);
    let d2 = rat_int(label.delta(2)?);
    let nn1 = rat_int((n * (n - 1)) as i64);
    let mut acc = &alpha / rat_int(2) * (BigRational::one() + (&d1 - &d2) / &nn1);
    if !beta.is_zero() {
        acc -= beta / rat_int(2 * (n as i64 - 2))
            * (&d1 / rat_int(n as i64 - 1) - &d2 / &nn1);
    }
    Ok(acc)
}

/// `E_{λ,μ}[des_B] = n/2 − Δ²/2n`.
pub fn mean_des_b(label: &RPartition) -> Result<BigRational> {
    let n = require_bn(label)?;
    Ok(rat(n, 2) - rat_int(label.delta(2)?) / rat_int(2 * n))
}

/// `E_{λ,μ}[neg] = −n(n+1)/4 + (n+1)/4 · Δ¹`.
pub fn mean_neg(label: &RPartition) -> Result<BigRational> {
    let n = require_bn(label)?;
    Ok(rat(-n * (n + 1), 4) + rat(n + 1, 4) * rat_int(label.delta(1)?))
}

/// `E_{λ,μ}[inv] = n(n−1)/4 − (n−3)/12 · Δ¹ − 1/6 · Δ²`.
pub fn mean_inv(label: &RPartition) -> Result<BigRational> {
    let n = require_bn(label)?;
    Ok(rat(n * (n - 1), 4)
        - rat(n - 3, 12) * rat_int(label.delta(1)?)
        - rat(1, 6) * rat_int(label.delta(2)?))
}

/// `E_{λ,μ}[inv_B] = n²/2 − n/3 · Δ¹ − 1/6 · Δ²`.
pub fn mean_inv_b(label: &RPartition) -> Result<BigRational> {
    let n = require_bn(label)?;
    Ok(rat(n * n, 2)
        - rat(n, 3) * rat_int(label.delta(1)?)
        - rat(1, 6) * rat_int(label.delta(2)?))
}

fn require_bn(label: &RPartition) -> Result<i64> {
    if label.r() != 2 {
        return Err(Error::Invalid(format!(
            "closed forms are for B_n (r = 2), got r = {}",
            label.r()
        )));
    }
    if label.n() == 0 {
        return Err(Error::Invalid("closed forms need n >= 1".into()));
    }
    Ok(label.n() as i64)
}

/// Closed-form class mean of a built-in statistic.
pub fn closed_form_mean(which: Builtin, label: &RPartition) -> Result<MomentResult> {
    let value = match which {
        Builtin::DesB => mean_des_b(label)?,
        Builtin::Neg => mean_neg(label)?,
        Builtin::Inv => mean_inv(label)?,
        Builtin::InvB => mean_inv_b(label)?,
    };
    Ok(MomentResult {
        value,
        method: Method::ClosedForm,
        label: label.clone(),
        k: 1,
    })
}

/// First moments over all of `B_n`.
pub fn whole_group_mean(which: Builtin, n: usize) -> BigRational {
    let n = n as i64;
    match which {
        Builtin::Inv => rat(n * (n - 1), 4),
        Builtin::InvB => rat(n * n, 2),
        Builtin::DesB => rat(n, 2),
        Builtin::Neg => rat(-n * (n + 1), 4),
    }
}

/// The `Δ` pair controlling first moments on `B_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaPair {
    pub d1: i64,
    pub d2: i64,
}

pub fn delta_pair(label: &RPartition) -> Result<DeltaPair> {
    Ok(DeltaPair {
        d1: label.delta(1)?,
        d2: label.delta(2)?,
    })
}

/// The polynomial `p` with `p(n) = E_λ[X_n^k]` for every conjugacy class of
/// `S_{n,r}` without cycles of length up to `mk`, where `(X_n)` is the
/// order-invariant extension of `set` (constraints of common size `m`).
///
/// For `k = 1` the polynomial comes straight from the acyclic counts
/// `|A_{s,s}|`, `s = m+1..2m`; for `k ≥ 2` it is the exact interpolation of
/// the formula engine at `mk+1` nodes (degree ≤ mk is guaranteed).
pub fn oie_polynomial(set: &BTreeSet<Pcp>, k: u32) -> Result<ExactPolynomial> {
    if k == 0 {
        return Err(Error::Invalid("moment order k must be >= 1".into()));
    }
    let Some((_, r, m)) = uniform_set_params(set)? else {
        return Ok(ExactPolynomial::zero());
    };
    if m == 0 {
        // Only the empty constraint: X ≡ |set| = 1 identically.
        return Ok(ExactPolynomial::from_coeffs(vec![BigRational::one()]));
    }

    if k == 1 {
        let mut acc = ExactPolynomial::zero();
        let r_pow_m = BigInt::from(r).pow(m as u32);
        for s in m + 1..=2 * m {
            let ext = order_invariant_extension(set, s)?;
            let count = ext
                .iter()
                .filter(|pcp| pcp.support().len() == s && pcp.is_acyclic())
                .count();
            if count == 0 {
                continue;
            }
            // |A_{s,s}| / (s! r^m) · n (n−m−1)(n−m−2) ⋯ (n−s+1)
            let mut basis = ExactPolynomial::from_integers(&[0, 1]);
            for t in m + 1..s {
                basis = basis.mul(&ExactPolynomial::from_coeffs(vec![
                    -rat_int(t as i64),
                    BigRational::one(),
                ]));
            }
            let scale = BigRational::new(
                BigInt::from(count),
                crate::arith::factorial(s) * &r_pow_m,
            );
            acc = acc.add(&basis.scale(&scale));
        }
        return Ok(acc);
    }

    let mk = m * k as usize;
    let nodes: Vec<usize> = (mk + 1..=2 * mk + 1).collect();
    let mut points = Vec::with_capacity(nodes.len());
    for &node in &nodes {
        let ext = order_invariant_extension(set, node)?;
        let x = statistic_from_set(node, r, &ext)?;
        let value = kth_moment_no_short_cycles(&x, k)?;
        points.push((rat_int(node as i64), value));
    }
    Ok(ExactPolynomial::interpolate(&points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{binomial, rational_to_string};
    use crate::classes::enumerate_r_partitions;
    use crate::statistics::inv_defining_set;
    use crate::DEFAULT_BUDGET;

    fn label(text: &str) -> RPartition {
        RPartition::parse(text).unwrap()
    }

    #[test]
    fn brute_moment_trivial_classes() {
        let n = 4;
        let des = Statistic::des_b(n);
        let idn = label("1,1,1,1;");
        let negid = label(";1,1,1,1");
        assert_eq!(
            brute_moment(&des, &idn, 1, DEFAULT_BUDGET).unwrap().value,
            rat_int(0)
        );
        assert_eq!(
            brute_moment(&des, &negid, 1, DEFAULT_BUDGET).unwrap().value,
            rat_int(4)
        );
        let dist = brute_distribution(&Statistic::des_b(2), &label("2;"), DEFAULT_BUDGET).unwrap();
        assert_eq!(dist, BTreeMap::from([(rat_int(1), BigInt::from(2))]));
    }

    #[test]
    fn indicator_probability_examples() {
        let pcp = Pcp::new(3, 2, vec![(1, 2, 1)]).unwrap();
        let cls = label("3;");
        assert_eq!(indicator_probability(&pcp, &cls).unwrap(), rat(1, 4));
        assert_eq!(
            brute_indicator_probability(&pcp, &cls, DEFAULT_BUDGET).unwrap(),
            rat(1, 4)
        );

        let self_loop = Pcp::new(3, 2, vec![(1, 1, 0)]).unwrap();
        assert_eq!(indicator_probability(&self_loop, &cls).unwrap(), rat_int(0));

        let two_cycle = Pcp::new(5, 2, vec![(1, 2, 0), (2, 1, 0)]).unwrap();
        assert_eq!(indicator_probability(&two_cycle, &label("5;")).unwrap(), rat_int(0));

        // Precondition: the class must not have cycles of length <= size.
        let err = indicator_probability(&pcp, &label("1,1,1;")).unwrap_err();
        assert!(matches!(err, Error::ShortCycles { .. }));
    }

    #[test]
    fn mean_formula_examples() {
        // neg on B_n: −(1/2) C(n+1, 2) on classes without fixed points.
        for n in 2..=5usize {
            let expect = -BigRational::from_integer(binomial(n + 1, 2)) / rat_int(2);
            assert_eq!(mean_no_short_cycles(&Statistic::neg(n)).unwrap(), expect);
        }
        // Matches brute force on the single-cycle class of B_5.
        let des5 = Statistic::des_b(5);
        let cls = label("5;");
        assert_eq!(
            mean_no_short_cycles(&des5).unwrap(),
            brute_moment(&des5, &cls, 1, DEFAULT_BUDGET).unwrap().value
        );
        // A constant statistic keeps its value.
        let c = Statistic::constant(5, 2, rat(7, 3));
        assert_eq!(mean_no_short_cycles(&c).unwrap(), rat(7, 3));
        // Degree too large for the group size.
        assert!(matches!(
            mean_no_short_cycles(&Statistic::des_b(2)),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn kth_moment_examples() {
        let des5 = Statistic::des_b(5);
        assert_eq!(
            kth_moment_no_short_cycles(&des5, 1).unwrap(),
            mean_no_short_cycles(&des5).unwrap()
        );
        let cls = label("5;");
        assert_eq!(
            kth_moment_no_short_cycles(&des5, 2).unwrap(),
            brute_moment(&des5, &cls, 2, DEFAULT_BUDGET).unwrap().value
        );
        // Idempotent indicator: second moment equals the probability.
        let pcp = Pcp::new(5, 2, vec![(1, 2, 0), (2, 3, 1)]).unwrap();
        let ind = Statistic::indicator(pcp.clone());
        assert_eq!(
            kth_moment_no_short_cycles(&ind, 2).unwrap(),
            indicator_probability(&pcp, &cls).unwrap()
        );
        // Tuple walk agrees with the repeated-multiply route.
        let sq = des5.multiply(&des5).unwrap();
        assert_eq!(
            mean_no_short_cycles(&sq).unwrap(),
            kth_moment_no_short_cycles(&des5, 2).unwrap()
        );
        assert!(matches!(
            kth_moment_no_short_cycles(&des5, 3),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn weighted_inversion_examples() {
        // wt ≡ 1 is inv; with m1(λ) = m1(μ) the mean is n(n−1)/4.
        let n = 5;
        let mut wt = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                wt.insert((i, j), BigRational::one());
            }
        }
        let balanced = label("3,1;1"); // m1 = 1 on both sides
        assert_eq!(weighted_inversion_mean(&wt, &balanced).unwrap(), rat(5 * 4, 4));
        // −identity inverts every pair.
        assert_eq!(
            weighted_inversion_mean(&wt, &label(";1,1,1,1,1")).unwrap(),
            rat_int(10)
        );
        // A single pair satisfies E_{λ,μ} + E_{μ,λ} = 1.
        let mut single = BTreeMap::new();
        single.insert((2, 4), BigRational::one());
        for lbl in enumerate_r_partitions(5, 2) {
            let swapped = lbl.swap_components(0, 1);
            let total = weighted_inversion_mean(&single, &lbl).unwrap()
                + weighted_inversion_mean(&single, &swapped).unwrap();
            assert_eq!(total, rat_int(1), "label {lbl}");
        }
        assert!(weighted_inversion_mean(&BTreeMap::new(), &label("2;")).unwrap().is_zero());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(mean_des_b(&label("1,1,1,1;")).unwrap(), rat_int(0));
        assert_eq!(mean_des_b(&label(";1,1,1,1")).unwrap(), rat_int(4));
        assert_eq!(mean_inv_b(&label(";1,1,1")).unwrap(), rat_int(9));
        assert_eq!(mean_des_b(&label("3;5")).unwrap(), rat_int(4));
        assert_eq!(rational_to_string(&mean_neg(&label("5;")).unwrap()), "-15/2");
    }

    #[test]
    fn closed_forms_match_brute_on_b4() {
        for lbl in enumerate_r_partitions(4, 2) {
            for which in [Builtin::DesB, Builtin::Neg, Builtin::Inv, Builtin::InvB] {
                let closed = closed_form_mean(which, &lbl).unwrap().value;
                let brute = brute_moment(&Statistic::builtin(which, 4), &lbl, 1, DEFAULT_BUDGET)
                    .unwrap()
                    .value;
                assert_eq!(closed, brute, "{} on {lbl}", which.name());
            }
        }
    }

    #[test]
    fn whole_group_means() {
        assert_eq!(whole_group_mean(Builtin::DesB, 7), rat(7, 2));
        assert_eq!(whole_group_mean(Builtin::Inv, 4), rat_int(3));
        // Brute average over all of B_3 for all four statistics.
        let full = label("1,1,1;");
        for which in [Builtin::DesB, Builtin::Neg, Builtin::Inv, Builtin::InvB] {
            let stat = Statistic::builtin(which, 3);
            let mut total = BigRational::zero();
            let mut count = 0i64;
            for lbl in enumerate_r_partitions(3, 2) {
                for p in class_elements(&lbl, DEFAULT_BUDGET).unwrap() {
                    total += stat.evaluate(&p).unwrap();
                    count += 1;
                }
            }
            assert_eq!(total / rat_int(count), whole_group_mean(which, 3));
        }
        let _ = full;
    }

    #[test]
    fn oie_polynomial_inv_mean() {
        // Extension of the inv-defining set: p(n) = n(n−1)/4.
        let set = inv_defining_set(4);
        let p = oie_polynomial(&set, 1).unwrap();
        let expect = ExactPolynomial::from_coeffs(vec![rat_int(0), rat(-1, 4), rat(1, 4)]);
        assert_eq!(p, expect);
        // Checked against brute force at n = 5 on the single-cycle class.
        let brute = brute_moment(&Statistic::inv(5), &label("5;"), 1, DEFAULT_BUDGET)
            .unwrap()
            .value;
        assert_eq!(p.eval(&rat_int(5)), brute);
        // Empty set extends to the zero statistic.
        assert_eq!(oie_polynomial(&BTreeSet::new(), 1).unwrap(), ExactPolynomial::zero());
    }

    #[test]
    fn delta_pair_fields() {
        let d = delta_pair(&label("1,1;2")).unwrap();
        assert_eq!(d, DeltaPair { d1: 2, d2: 4 });
    }
}
