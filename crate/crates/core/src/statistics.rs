//! Partial colored permutations and the algebra of statistics they span.
//!
//! A partial colored permutation `(K, κ)` prescribes `m` function values
//! `ω(i_h) = j_h` together with the colors `τ(j_h) = κ(j_h)`. Its indicator
//! `I_{(K,κ)}` is 1 on the elements extending it, and a statistic has degree
//! at most `m` when it lies in the span of indicators of size at most `m`.
//! Products of indicators either vanish (incompatible constraints) or merge,
//! which bounds the degree of a product by the sum of the degrees.
//!
//! The classical `B_n` statistics carry both a native evaluator and their
//! indicator decomposition; the two agree everywhere (asserted exhaustively
//! in tests for small n).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{group_order, rational_from_str, rational_to_string};
use crate::classes::enumerate_group;
use crate::error::{Error, Result};
use crate::linalg::{least_squares_residual, solve_exact, SolveOutcome};
use crate::perm::ColoredPermutation;

/// Guardrail for term growth when expanding products of statistics.
pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

/// A partial colored permutation `(K, κ)` on `S_{n,r}`: constraint triples
/// `(i, j, c)` meaning `ω(i) = j` and `τ(j) = c`, with all `i` distinct and
/// all `j` distinct. Triples are kept sorted by `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pcp {
    n: usize,
    r: u32,
    constraints: Vec<(usize, usize, u32)>,
}

impl fmt::Debug for Pcp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pcp[n={},r={}]{self}", self.n, self.r)
    }
}

impl fmt::Display for Pcp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self
            .constraints
            .iter()
            .map(|&(i, j, c)| format!("({i},{j}^{c})"))
            .join(",");
        write!(f, "{{{body}}}")
    }
}

impl Pcp {
    pub fn new(n: usize, r: u32, mut constraints: Vec<(usize, usize, u32)>) -> Result<Self> {
        if r < 1 {
            return Err(Error::Invalid("r must be positive".into()));
        }
        constraints.sort_unstable();
        for window in constraints.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::Invalid(format!(
                    "repeated source element {}",
                    window[0].0
                )));
            }
        }
        let mut targets: Vec<usize> = constraints.iter().map(|&(_, j, _)| j).collect();
        targets.sort_unstable();
        if targets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("repeated target element".into()));
        }
        for &(i, j, c) in &constraints {
            if i < 1 || i > n || j < 1 || j > n {
                return Err(Error::Invalid(format!(
                    "constraint ({i},{j}) outside [1,{n}]"
                )));
            }
            if c >= r {
                return Err(Error::Invalid(format!("color {c} outside 0..{r}")));
            }
        }
        Ok(Pcp { n, r, constraints })
    }

    /// The empty constraint (size 0); its indicator is identically 1.
    pub fn empty(n: usize, r: u32) -> Self {
        Pcp {
            n,
            r,
            constraints: Vec::new(),
        }
    }

    /// r = 2 shorthand: `(i, ±j)` means `ω(i) = j` with color `j < 0`.
    pub fn from_signed_pairs(n: usize, pairs: &[(usize, i64)]) -> Result<Self> {
        let constraints = pairs
            .iter()
            .map(|&(i, sj)| {
                if sj == 0 {
                    return Err(Error::Invalid("signed target 0".into()));
                }
                Ok((i, sj.unsigned_abs() as usize, u32::from(sj < 0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, 2, constraints)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn size(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[(usize, usize, u32)] {
        &self.constraints
    }

    /// Does `(ω, τ)` satisfy every constraint?
    pub fn satisfied_by(&self, p: &ColoredPermutation) -> Result<bool> {
        if p.degree() != self.n || p.num_colors() != self.r {
            return Err(Error::ParamMismatch {
                expected_n: self.n,
                expected_r: self.r,
                got_n: p.degree(),
                got_r: p.num_colors(),
            });
        }
        Ok(self
            .constraints
            .iter()
            .all(|&(i, j, c)| p.apply(i) == j && p.color_of_value(j) == c))
    }

    /// True when the directed graph on `[n]` with edges `i → j` has no cycle.
    /// Out- and in-degrees are at most 1, so it suffices to follow chains.
    pub fn is_acyclic(&self) -> bool {
        let map: BTreeMap<usize, usize> =
            self.constraints.iter().map(|&(i, j, _)| (i, j)).collect();
        let sources: BTreeSet<usize> = map.keys().copied().collect();
        let mut visited = BTreeSet::new();
        for &start in &sources {
            if visited.contains(&start) {
                continue;
            }
            let mut node = start;
            let mut chain = BTreeSet::from([start]);
            while let Some(&next) = map.get(&node) {
                if chain.contains(&next) {
                    return false;
                }
                node = next;
                chain.insert(node);
                if visited.contains(&node) {
                    break;
                }
            }
            visited.extend(chain);
        }
        true
    }

    /// Union of the two constraint sets, or `None` when no colored
    /// permutation satisfies both.
    pub fn merge_if_compatible(&self, other: &Self) -> Result<Option<Pcp>> {
        if self.n != other.n || self.r != other.r {
            return Err(Error::ParamMismatch {
                expected_n: self.n,
                expected_r: self.r,
                got_n: other.n,
                got_r: other.r,
            });
        }
        let mut by_source: BTreeMap<usize, (usize, u32)> = BTreeMap::new();
        let mut by_target: BTreeMap<usize, usize> = BTreeMap::new();
        for &(i, j, c) in self.constraints.iter().chain(&other.constraints) {
            match by_source.get(&i) {
                Some(&(j0, c0)) => {
                    if j0 != j || c0 != c {
                        return Ok(None);
                    }
                }
                None => {
                    by_source.insert(i, (j, c));
                }
            }
            match by_target.get(&j) {
                Some(&i0) => {
                    if i0 != i {
                        return Ok(None);
                    }
                }
                None => {
                    by_target.insert(j, i);
                }
            }
        }
        let constraints = by_source
            .into_iter()
            .map(|(i, (j, c))| (i, j, c))
            .collect();
        Ok(Some(Pcp {
            n: self.n,
            r: self.r,
            constraints,
        }))
    }

    /// All elements appearing as a source or target, sorted.
    pub fn support(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .constraints
            .iter()
            .flat_map(|&(i, j, _)| [i, j])
            .collect();
        set.into_iter().collect()
    }

    /// Relabel through an order-preserving injection of the support into
    /// `[new_n]`, given as sorted `(from, to)` pairs covering the support.
    pub fn apply_order_injection(&self, f: &[(usize, usize)], new_n: usize) -> Result<Pcp> {
        let support = self.support();
        if f.len() != support.len()
            || f.iter().map(|&(from, _)| from).ne(support.iter().copied())
        {
            return Err(Error::Invalid(
                "injection domain must equal the support".into(),
            ));
        }
        for w in f.windows(2) {
            if w[0].1 >= w[1].1 {
                return Err(Error::Invalid("injection must be strictly increasing".into()));
            }
        }
        let map: BTreeMap<usize, usize> = f.iter().copied().collect();
        if f.iter().any(|&(_, to)| to < 1 || to > new_n) {
            return Err(Error::Invalid(format!("injection target outside [1,{new_n}]")));
        }
        let constraints = self
            .constraints
            .iter()
            .map(|&(i, j, c)| (map[&i], map[&j], c))
            .collect();
        Pcp::new(new_n, self.r, constraints)
    }
}

/// Built-in `B_n` statistics with native evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    DesB,
    Inv,
    Neg,
    InvB,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::DesB => "des_b",
            Builtin::Inv => "inv",
            Builtin::Neg => "neg",
            Builtin::InvB => "inv_b",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "des_b" | "des_B" | "desB" => Ok(Builtin::DesB),
            "inv" => Ok(Builtin::Inv),
            "neg" => Ok(Builtin::Neg),
            "inv_b" | "inv_B" | "invB" => Ok(Builtin::InvB),
            other => Err(Error::UnknownStatistic(other.into())),
        }
    }

    pub fn eval(self, p: &ColoredPermutation) -> Result<i64> {
        match self {
            Builtin::DesB => eval_des_b(p),
            Builtin::Inv => eval_inv(p),
            Builtin::Neg => eval_neg(p),
            Builtin::InvB => eval_inv_b(p),
        }
    }
}

fn require_signed(p: &ColoredPermutation) -> Result<Vec<i64>> {
    p.signed_word()
}

/// Type-B descents: positions `i ∈ {0} ∪ [n−1]` with `ω(i) > ω(i+1)`, using
/// the convention `ω(0) = 0` and the usual order on `[±n] ∪ {0}`.
pub fn eval_des_b(p: &ColoredPermutation) -> Result<i64> {
    let w = require_signed(p)?;
    let mut prev = 0i64;
    let mut count = 0;
    for &v in &w {
        if prev > v {
            count += 1;
        }
        prev = v;
    }
    Ok(count)
}

/// Inversions of the signed word: pairs `i < j` with `ω(i) > ω(j)`.
pub fn eval_inv(p: &ColoredPermutation) -> Result<i64> {
    let w = require_signed(p)?;
    let mut count = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] > w[j] {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Sum of the negative letters of the signed word (a nonpositive number).
pub fn eval_neg(p: &ColoredPermutation) -> Result<i64> {
    Ok(require_signed(p)?.iter().filter(|&&v| v < 0).sum())
}

/// Coxeter length of `B_n`: `inv_B = inv − neg`.
pub fn eval_inv_b(p: &ColoredPermutation) -> Result<i64> {
    Ok(eval_inv(p)? - eval_neg(p)?)
}

/// A formal rational combination of indicator functions, plus an optional
/// native evaluator tag for the built-in statistics.
#[derive(Clone)]
pub struct Statistic {
    n: usize,
    r: u32,
    constant: BigRational,
    terms: BTreeMap<Pcp, BigRational>,
    native: Option<Builtin>,
}

impl fmt::Debug for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Statistic[n={},r={},constant={},terms={},native={:?}]",
            self.n,
            self.r,
            rational_to_string(&self.constant),
            self.terms.len(),
            self.native
        )
    }
}

impl PartialEq for Statistic {
    /// Equality of the formal decomposition; the native tag is advisory.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.r == other.r
            && self.constant == other.constant
            && self.terms == other.terms
    }
}

impl Eq for Statistic {}

impl Statistic {
    pub fn zero(n: usize, r: u32) -> Self {
        Statistic {
            n,
            r,
            constant: BigRational::zero(),
            terms: BTreeMap::new(),
            native: None,
        }
    }

    pub fn constant(n: usize, r: u32, value: BigRational) -> Self {
        Statistic {
            n,
            r,
            constant: value,
            terms: BTreeMap::new(),
            native: None,
        }
    }

    pub fn indicator(pcp: Pcp) -> Self {
        let mut terms = BTreeMap::new();
        let (n, r) = (pcp.n(), pcp.r());
        terms.insert(pcp, BigRational::one());
        Statistic {
            n,
            r,
            constant: BigRational::zero(),
            terms,
            native: None,
        }
    }

    /// Sum of coefficient-weighted indicators plus a constant.
    pub fn from_terms(
        n: usize,
        r: u32,
        constant: BigRational,
        terms: impl IntoIterator<Item = (Pcp, BigRational)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Pcp, BigRational> = BTreeMap::new();
        for (pcp, coeff) in terms {
            if pcp.n() != n || pcp.r() != r {
                return Err(Error::ParamMismatch {
                    expected_n: n,
                    expected_r: r,
                    got_n: pcp.n(),
                    got_r: pcp.r(),
                });
            }
            let entry = map.entry(pcp).or_insert_with(BigRational::zero);
            *entry += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Statistic {
            n,
            r,
            constant,
            terms: map,
            native: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn constant_part(&self) -> &BigRational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Pcp, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn native(&self) -> Option<Builtin> {
        self.native
    }

    /// Declared degree bound: the largest term size (0 with no terms).
    pub fn degree_bound(&self) -> usize {
        self.terms.keys().map(Pcp::size).max().unwrap_or(0)
    }

    fn check_params(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.r != other.r {
            return Err(Error::ParamMismatch {
                expected_n: self.n,
                expected_r: self.r,
                got_n: other.n,
                got_r: other.r,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        let mut terms = self.terms.clone();
        for (pcp, coeff) in &other.terms {
            let entry = terms.entry(pcp.clone()).or_insert_with(BigRational::zero);
            *entry += coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Statistic {
            n: self.n,
            r: self.r,
            constant: &self.constant + &other.constant,
            terms,
            native: None,
        })
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Statistic::zero(self.n, self.r);
        }
        Statistic {
            n: self.n,
            r: self.r,
            constant: &self.constant * s,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect(),
            native: None,
        }
    }

    /// Pointwise product, expanded term by term: incompatible pairs vanish,
    /// compatible pairs merge. Degree bound of the result is at most the sum
    /// of the two bounds.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_with_limit(other, DEFAULT_TERM_LIMIT)
    }

    pub fn multiply_with_limit(&self, other: &Self, limit: usize) -> Result<Self> {
        self.check_params(other)?;
        let mut terms: BTreeMap<Pcp, BigRational> = BTreeMap::new();
        let mut bump = |pcp: Pcp, coeff: BigRational| -> Result<()> {
            let entry = terms.entry(pcp).or_insert_with(BigRational::zero);
            *entry += coeff;
            if terms.len() > limit {
                return Err(Error::TermBudget {
                    terms: terms.len(),
                    limit,
                });
            }
            Ok(())
        };
        if !other.constant.is_zero() {
            for (pcp, coeff) in &self.terms {
                bump(pcp.clone(), coeff * &other.constant)?;
            }
        }
        if !self.constant.is_zero() {
            for (pcp, coeff) in &other.terms {
                bump(pcp.clone(), coeff * &self.constant)?;
            }
        }
        for (p1, c1) in &self.terms {
            for (p2, c2) in &other.terms {
                if let Some(merged) = p1.merge_if_compatible(p2)? {
                    bump(merged, c1 * c2)?;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Statistic {
            n: self.n,
            r: self.r,
            constant: &self.constant * &other.constant,
            terms,
            native: None,
        })
    }

    /// Evaluate on an element. Uses the native evaluator when one is
    /// attached (the decompositions agree with it; see the tests), otherwise
    /// sums the satisfied indicators.
    pub fn evaluate(&self, p: &ColoredPermutation) -> Result<BigRational> {
        if let Some(native) = self.native {
            if p.degree() == self.n && p.num_colors() == self.r {
                return Ok(BigRational::from_integer(BigInt::from(native.eval(p)?)));
            }
        }
        self.evaluate_decomposed(p)
    }

    /// Evaluate strictly through the indicator decomposition.
    pub fn evaluate_decomposed(&self, p: &ColoredPermutation) -> Result<BigRational> {
        if p.degree() != self.n || p.num_colors() != self.r {
            return Err(Error::ParamMismatch {
                expected_n: self.n,
                expected_r: self.r,
                got_n: p.degree(),
                got_r: p.num_colors(),
            });
        }
        let mut acc = self.constant.clone();
        for (pcp, coeff) in &self.terms {
            if pcp.satisfied_by(p)? {
                acc += coeff;
            }
        }
        Ok(acc)
    }

    /// Built-in statistics on `B_n`, with both native evaluator and
    /// decomposition into indicators.
    pub fn builtin(which: Builtin, n: usize) -> Self {
        let mut stat = match which {
            Builtin::DesB => Self::build_des_b(n),
            Builtin::Inv => Self::build_inv(n),
            Builtin::Neg => Self::build_neg(n),
            Builtin::InvB => {
                let inv = Self::build_inv(n);
                let neg = Self::build_neg(n);
                inv.add(&neg.scale(&-BigRational::one())).expect("same params")
            }
        };
        stat.native = Some(which);
        stat
    }

    pub fn des_b(n: usize) -> Self {
        Self::builtin(Builtin::DesB, n)
    }

    pub fn inv(n: usize) -> Self {
        Self::builtin(Builtin::Inv, n)
    }

    pub fn neg(n: usize) -> Self {
        Self::builtin(Builtin::Neg, n)
    }

    pub fn inv_b(n: usize) -> Self {
        Self::builtin(Builtin::InvB, n)
    }

    fn build_des_b(n: usize) -> Self {
        let mut terms = Vec::new();
        // Descent at position 0: ω(1) < 0.
        for j in 1..=n {
            terms.push((
                Pcp::new(n, 2, vec![(1, j, 1)]).expect("valid"),
                BigRational::one(),
            ));
        }
        // Descent at position i: ω(i) = ℓ > k = ω(i+1).
        for i in 1..n {
            for (k, l) in signed_pairs(n) {
                terms.push((
                    Pcp::from_signed_pairs(n, &[(i, l), (i + 1, k)]).expect("valid"),
                    BigRational::one(),
                ));
            }
        }
        Self::from_terms(n, 2, BigRational::zero(), terms).expect("valid terms")
    }

    fn build_inv(n: usize) -> Self {
        let mut terms = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                for (k, l) in signed_pairs(n) {
                    terms.push((
                        Pcp::from_signed_pairs(n, &[(i, l), (j, k)]).expect("valid"),
                        BigRational::one(),
                    ));
                }
            }
        }
        Self::from_terms(n, 2, BigRational::zero(), terms).expect("valid terms")
    }

    fn build_neg(n: usize) -> Self {
        let mut terms = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                terms.push((
                    Pcp::new(n, 2, vec![(i, j, 1)]).expect("valid"),
                    -BigRational::from_integer(BigInt::from(j)),
                ));
            }
        }
        Self::from_terms(n, 2, BigRational::zero(), terms).expect("valid terms")
    }

    /// JSON form documented in the README: rationals as `p/q` strings,
    /// constraints as `[i, j, c]` triples (signed pairs accepted for r = 2).
    pub fn to_json(&self) -> String {
        let dto = StatisticJson {
            n: self.n,
            r: self.r,
            constant: rational_to_string(&self.constant),
            terms: self
                .terms
                .iter()
                .map(|(pcp, coeff)| TermJson {
                    coeff: rational_to_string(coeff),
                    constraints: pcp
                        .constraints()
                        .iter()
                        .map(|&(i, j, c)| ConstraintJson::Triple(i, j, c))
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: StatisticJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut terms = Vec::new();
        for term in dto.terms {
            let mut triples = Vec::new();
            for c in term.constraints {
                triples.push(c.into_triple(dto.r)?);
            }
            let pcp = Pcp::new(dto.n, dto.r, triples).map_err(|e| Error::Parse(e.to_string()))?;
            terms.push((pcp, rational_from_str(&term.coeff)?));
        }
        Self::from_terms(dto.n, dto.r, rational_from_str(&dto.constant)?, terms)
            .map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Signed pairs `k < ℓ` in `[±n]` with `|k| ≠ |ℓ|` (equal absolute values
/// cannot occur together in one signed word).
fn signed_pairs(n: usize) -> Vec<(i64, i64)> {
    let values: Vec<i64> = (-(n as i64)..=n as i64).filter(|&v| v != 0).collect();
    let mut pairs = Vec::new();
    for &k in &values {
        for &l in &values {
            if k < l && k.abs() != l.abs() {
                pairs.push((k, l));
            }
        }
    }
    pairs
}

/// 0/1 statistic: is `(i, j)` an inversion (`ω(i) > ω(j)` for `i < j`)?
pub fn inv_ij_indicator(n: usize, i: usize, j: usize) -> Result<Statistic> {
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::OutOfRange(format!("need 1 <= i < j <= {n}, got ({i},{j})")));
    }
    let mut terms = Vec::new();
    for (k, l) in signed_pairs(n) {
        terms.push((
            Pcp::from_signed_pairs(n, &[(i, l), (j, k)])?,
            BigRational::one(),
        ));
    }
    Statistic::from_terms(n, 2, BigRational::zero(), terms)
}

/// 0/1 statistic: `ω(i) < ω(−i)`, equivalently `ω(i) < 0`.
pub fn inv_neg_ii_indicator(n: usize, i: usize) -> Result<Statistic> {
    if !(1 <= i && i <= n) {
        return Err(Error::OutOfRange(format!("need 1 <= i <= {n}, got {i}")));
    }
    let mut terms = Vec::new();
    for j in 1..=n {
        terms.push((Pcp::new(n, 2, vec![(i, j, 1)])?, BigRational::one()));
    }
    Statistic::from_terms(n, 2, BigRational::zero(), terms)
}

/// The order-invariant set of size-2 constraints defining `inv` on `B_n`.
pub fn inv_defining_set(n: usize) -> BTreeSet<Pcp> {
    let mut set = BTreeSet::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for (k, l) in signed_pairs(n) {
                set.insert(Pcp::from_signed_pairs(n, &[(i, l), (j, k)]).expect("valid"));
            }
        }
    }
    set
}

/// Common `(n, r, size)` of a constraint set, `None` when empty; errors on
/// mixed parameters or mixed sizes.
pub(crate) fn uniform_set_params(set: &BTreeSet<Pcp>) -> Result<Option<(usize, u32, usize)>> {
    let Some(first) = set.iter().next() else {
        return Ok(None);
    };
    let (n, r, m) = (first.n(), first.r(), first.size());
    for pcp in set {
        if pcp.n() != n || pcp.r() != r {
            return Err(Error::ParamMismatch {
                expected_n: n,
                expected_r: r,
                got_n: pcp.n(),
                got_r: pcp.r(),
            });
        }
        if pcp.size() != m {
            return Err(Error::Invalid(format!(
                "mixed sizes in set: {m} and {}",
                pcp.size()
            )));
        }
    }
    Ok(Some((n, r, m)))
}

/// Is the set closed under order-preserving relabelings of supports?
pub fn is_order_invariant_set(set: &BTreeSet<Pcp>) -> Result<bool> {
    let Some((n, _, _)) = uniform_set_params(set)? else {
        return Ok(true);
    };
    for pcp in set {
        let support = pcp.support();
        for targets in (1..=n).combinations(support.len()) {
            let f: Vec<(usize, usize)> =
                support.iter().copied().zip(targets.iter().copied()).collect();
            if !set.contains(&pcp.apply_order_injection(&f, n)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The r-colored order-invariant extension of a set living at degree `n0`:
/// for `n ≤ n0` the members with support inside `[n]`, for `n ≥ n0` all
/// order-preserving relabelings of supports into `[n]`.
pub fn order_invariant_extension(set: &BTreeSet<Pcp>, target_n: usize) -> Result<BTreeSet<Pcp>> {
    let Some((n0, r, _)) = uniform_set_params(set)? else {
        return Ok(BTreeSet::new());
    };
    let mut out = BTreeSet::new();
    if target_n <= n0 {
        for pcp in set {
            if pcp.support().last().is_none_or(|&max| max <= target_n) {
                out.insert(Pcp::new(target_n, r, pcp.constraints().to_vec())?);
            }
        }
    } else {
        for pcp in set {
            let support = pcp.support();
            for targets in (1..=target_n).combinations(support.len()) {
                let f: Vec<(usize, usize)> =
                    support.iter().copied().zip(targets.iter().copied()).collect();
                out.insert(pcp.apply_order_injection(&f, target_n)?);
            }
        }
    }
    Ok(out)
}

/// The statistic `Σ I_{(K,κ)}` induced by a set of constraints.
pub fn statistic_from_set(n: usize, r: u32, set: &BTreeSet<Pcp>) -> Result<Statistic> {
    Statistic::from_terms(
        n,
        r,
        BigRational::zero(),
        set.iter().cloned().map(|p| (p, BigRational::one())),
    )
}

/// All partial colored permutations of size at most `m` on `S_{n,r}`,
/// including the empty one (whose indicator is the constant 1).
pub fn enumerate_pcps_up_to(n: usize, r: u32, m: usize) -> Vec<Pcp> {
    let mut out = vec![Pcp::empty(n, r)];
    for size in 1..=m.min(n) {
        for sources in (1..=n).combinations(size) {
            for targets in (1..=n).permutations(size) {
                let mut colors = vec![0u32; size];
                loop {
                    let constraints: Vec<(usize, usize, u32)> = sources
                        .iter()
                        .zip(&targets)
                        .zip(&colors)
                        .map(|((&i, &j), &c)| (i, j, c))
                        .collect();
                    out.push(Pcp::new(n, r, constraints).expect("valid"));
                    let mut idx = size;
                    loop {
                        if idx == 0 {
                            break;
                        }
                        idx -= 1;
                        colors[idx] += 1;
                        if colors[idx] < r {
                            break;
                        }
                        colors[idx] = 0;
                    }
                    if colors.iter().all(|&c| c == 0) {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Result of the exact span-membership test behind the degree notion.
pub enum DegreeOutcome {
    /// Coefficients expressing the statistic over the indicator basis
    /// (only nonzero entries are listed; the empty constraint carries the
    /// constant part).
    InSpan { coefficients: Vec<(Pcp, BigRational)> },
    /// A functional vanishing on every basis indicator but not on the
    /// statistic, indexed by the canonical group enumeration order.
    NotInSpan { witness: Vec<BigRational> },
}

impl DegreeOutcome {
    pub fn is_in_span(&self) -> bool {
        matches!(self, DegreeOutcome::InSpan { .. })
    }
}

/// Does `x` lie in the span of indicators of partial colored permutations of
/// size at most `m` (constants included)? Exact rational linear algebra over
/// the full `|group| × |basis|` evaluation matrix.
pub fn in_degree_span(x: &Statistic, m: usize, budget: u128) -> Result<DegreeOutcome> {
    let (n, r) = (x.n(), x.r());
    let basis = enumerate_pcps_up_to(n, r, m);
    let order = group_order(n, r);
    let work = order.clone() * BigInt::from(basis.len());
    if work > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            work: u128::try_from(&work).unwrap_or(u128::MAX),
            budget,
        });
    }

    let elements: Vec<ColoredPermutation> = enumerate_group(n, r).collect();
    let values: Vec<BigRational> = elements
        .iter()
        .map(|p| x.evaluate(p))
        .collect::<Result<_>>()?;
    let denom_lcm: BigInt = values
        .iter()
        .fold(BigInt::one(), |acc, v| num_integer::lcm(acc, v.denom().clone()));
    let b: Vec<BigInt> = values
        .iter()
        .map(|v| (v * BigRational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let a: Vec<Vec<BigInt>> = elements
        .iter()
        .map(|p| {
            basis
                .iter()
                .map(|pcp| {
                    if pcp.satisfied_by(p).expect("same params") {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();

    match solve_exact(&a, &b) {
        SolveOutcome::Solution(xs) => {
            let scale = BigRational::from_integer(denom_lcm);
            let coefficients = basis
                .into_iter()
                .zip(xs)
                .filter(|(_, c)| !c.is_zero())
                .map(|(pcp, c)| (pcp, c / &scale))
                .collect();
            Ok(DegreeOutcome::InSpan { coefficients })
        }
        SolveOutcome::Inconsistent => Ok(DegreeOutcome::NotInSpan {
            witness: least_squares_residual(&a, &b),
        }),
    }
}

#[derive(Serialize, Deserialize)]
struct StatisticJson {
    n: usize,
    r: u32,
    constant: String,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    constraints: Vec<ConstraintJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConstraintJson {
    Triple(usize, usize, u32),
    Signed(usize, i64),
}

impl ConstraintJson {
    fn into_triple(self, r: u32) -> Result<(usize, usize, u32)> {
        match self {
            ConstraintJson::Triple(i, j, c) => Ok((i, j, c)),
            ConstraintJson::Signed(i, sj) => {
                if r != 2 {
                    return Err(Error::Parse(
                        "signed constraint shorthand needs r = 2".into(),
                    ));
                }
                if sj == 0 {
                    return Err(Error::Parse("signed target 0".into()));
                }
                Ok((i, sj.unsigned_abs() as usize, u32::from(sj < 0)))
            }
        }
    }
}
