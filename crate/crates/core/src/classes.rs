//! Conjugacy classes of `S_{n,r}`.
//!
//! Classes are indexed by r-partitions: component `c` records the multiset of
//! lengths of the cycles of color `c`. The centralizer of an element of cycle
//! type `λ` has order `∏_{c,i} (r·i)^{m_i(λ^c)} · m_i(λ^c)!` (for r = 2 this
//! is the classical `2^{ℓ(λ)} z_λ 2^{ℓ(μ)} z_μ`), and the class size is
//! `r^n n!` divided by it. The formula is validated against brute-force
//! grouping and against the constructive enumeration in the test suite.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{factorial, group_order};
use crate::error::{Error, Result};
use crate::perm::{ColoredCycle, ColoredPermutation};

/// An r-tuple of integer partitions with total weight `n`; the label of a
/// conjugacy class of `S_{n,r}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RPartition {
    n: usize,
    r: u32,
    parts: Vec<Vec<usize>>,
}

impl fmt::Debug for RPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RPartition[{self}]")
    }
}

/// A class label together with its centralizer order and class size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSummary {
    pub label: RPartition,
    pub centralizer_order: BigInt,
    pub class_size: BigInt,
}

impl RPartition {
    /// Build from one part list per color; each list is sorted descending.
    pub fn new(r: u32, mut parts: Vec<Vec<usize>>) -> Result<Self> {
        if r < 1 {
            return Err(Error::Invalid("r must be positive".into()));
        }
        if parts.len() != r as usize {
            return Err(Error::Invalid(format!(
                "expected {r} components, got {}",
                parts.len()
            )));
        }
        for comp in &mut parts {
            if comp.iter().any(|&p| p == 0) {
                return Err(Error::Invalid("partition parts must be positive".into()));
            }
            comp.sort_unstable_by(|a, b| b.cmp(a));
        }
        let n = parts.iter().flatten().sum();
        Ok(RPartition { n, r, parts })
    }

    /// The empty r-partition, labelling the single class of `S_{0,r}`.
    pub fn empty(r: u32) -> Self {
        RPartition {
            n: 0,
            r,
            parts: vec![Vec::new(); r as usize],
        }
    }

    /// Bipartition shorthand for `B_n` labels.
    pub fn bipartition(lambda: Vec<usize>, mu: Vec<usize>) -> Result<Self> {
        Self::new(2, vec![lambda, mu])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn component(&self, c: u32) -> &[usize] {
        &self.parts[c as usize]
    }

    /// `m_i(λ^c)`: number of parts equal to `i` in component `c`.
    pub fn multiplicity(&self, c: u32, i: usize) -> usize {
        self.parts[c as usize].iter().filter(|&&p| p == i).count()
    }

    /// Total number of parts over all colors.
    pub fn num_parts(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    /// Smallest part over all colors; `None` for the empty label (convention +∞).
    pub fn min_cycle_length(&self) -> Option<usize> {
        self.parts.iter().flatten().min().copied()
    }

    /// True when every cycle is longer than `m` (vacuously true at n = 0).
    pub fn has_no_cycles_up_to(&self, m: usize) -> bool {
        self.min_cycle_length().map_or(true, |l| l > m)
    }

    /// `Δ^k(λ,μ) = m_1(λ)^k − m_1(μ)^k` (bipartitions only).
    pub fn delta(&self, k: u32) -> Result<i64> {
        if self.r != 2 {
            return Err(Error::Invalid(format!("Δ^k needs r = 2, got r = {}", self.r)));
        }
        let a = self.multiplicity(0, 1) as i64;
        let b = self.multiplicity(1, 1) as i64;
        Ok(a.pow(k) - b.pow(k))
    }

    /// Order of the centralizer of an element of this cycle type:
    /// `∏_{c,i} (r·i)^{m_i(λ^c)} m_i(λ^c)!`.
    pub fn centralizer_order(&self) -> BigInt {
        let mut acc = BigInt::from(1);
        for comp in &self.parts {
            for (len, chunk) in &comp.iter().chunk_by(|&&p| p) {
                let mult = chunk.count();
                acc *= BigInt::from(self.r as usize * len).pow(mult as u32);
                acc *= factorial(mult);
            }
        }
        acc
    }

    /// `|C_λ| = r^n n! / centralizer_order`.
    pub fn class_size(&self) -> BigInt {
        group_order(self.n, self.r) / self.centralizer_order()
    }

    pub fn summary(&self) -> ClassSummary {
        ClassSummary {
            label: self.clone(),
            centralizer_order: self.centralizer_order(),
            class_size: self.class_size(),
        }
    }

    /// Label with two components swapped (swaps cycle colors i and j).
    pub fn swap_components(&self, i: u32, j: u32) -> Self {
        let mut parts = self.parts.clone();
        parts.swap(i as usize, j as usize);
        RPartition { n: self.n, r: self.r, parts }
    }

    /// Cycle specs `(length, color)` with multiplicity, sorted.
    fn cycle_specs(&self) -> Vec<(usize, u32)> {
        let mut specs = Vec::with_capacity(self.num_parts());
        for (c, comp) in self.parts.iter().enumerate() {
            for &len in comp {
                specs.push((len, c as u32));
            }
        }
        specs.sort_unstable();
        specs
    }

    /// Parse the text label grammar: components separated by `;`, parts by
    /// `,`; empty components allowed (`5;` is ((5),∅), `;;3;2` has r = 4).
    pub fn parse(text: &str) -> Result<Self> {
        let comps: Vec<&str> = text.split(';').collect();
        let r = comps.len() as u32;
        let mut parts = Vec::with_capacity(comps.len());
        for comp in comps {
            let mut ps = Vec::new();
            for tok in comp.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad part `{tok}` in label `{text}`")))?;
                if p == 0 {
                    return Err(Error::Parse(format!("zero part in label `{text}`")));
                }
                ps.push(p);
            }
            parts.push(ps);
        }
        Self::new(r, parts).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Sort key for the canonical label order: total number of parts
    /// descending, then color-weight vector descending-lex, then per-color
    /// partitions descending-lex. The identity class comes first.
    fn order_key(&self) -> std::cmp::Reverse<(usize, Vec<usize>, Vec<Vec<usize>>)> {
        let weights: Vec<usize> = self.parts.iter().map(|c| c.iter().sum()).collect();
        std::cmp::Reverse((self.num_parts(), weights, self.parts.clone()))
    }
}

impl fmt::Display for RPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self
            .parts
            .iter()
            .map(|comp| comp.iter().map(usize::to_string).join(","))
            .collect();
        write!(f, "{}", rendered.join(";"))
    }
}

impl Serialize for RPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<Vec<usize>>::deserialize(deserializer)?;
        RPartition::new(parts.len() as u32, parts).map_err(D::Error::custom)
    }
}

/// All partitions of `k`, each as a descending part list.
fn partitions_of(k: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k.max(1), &mut Vec::new(), &mut out);
    out
}

/// Every r-partition of `n` exactly once, in the canonical label order.
pub fn enumerate_r_partitions(n: usize, r: u32) -> Vec<RPartition> {
    fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![n]];
        }
        let mut out = Vec::new();
        for first in (0..=n).rev() {
            for mut rest in compositions(n - first, parts - 1) {
                let mut v = vec![first];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }

    assert!(r >= 1, "r must be positive");
    let mut labels = Vec::new();
    for weights in compositions(n, r as usize) {
        let per_color: Vec<Vec<Vec<usize>>> =
            weights.iter().map(|&w| partitions_of(w)).collect();
        for choice in per_color.into_iter().multi_cartesian_product() {
            labels.push(RPartition {
                n,
                r,
                parts: choice,
            });
        }
    }
    labels.sort_by_cached_key(|l| l.order_key());
    labels
}

/// Lazy enumeration of all of `S_{n,r}`: base permutations in lexicographic
/// one-line order, colorings counting up in base r (color of value n fastest).
pub struct GroupIter {
    n: usize,
    r: u32,
    perms: itertools::structs::Permutations<std::ops::RangeInclusive<usize>>,
    current: Option<Vec<usize>>,
    colors: Vec<u32>,
    exhausted_colors: bool,
}

impl GroupIter {
    pub fn new(n: usize, r: u32) -> Self {
        assert!(r >= 1, "r must be positive");
        let mut perms = (1..=n).permutations(n);
        let current = perms.next();
        GroupIter {
            n,
            r,
            perms,
            current,
            colors: vec![0; n],
            exhausted_colors: false,
        }
    }
}

impl Iterator for GroupIter {
    type Item = ColoredPermutation;

    fn next(&mut self) -> Option<ColoredPermutation> {
        loop {
            let image = self.current.as_ref()?;
            if !self.exhausted_colors {
                let item = ColoredPermutation::from_parts(self.r, image.clone(), self.colors.clone())
                    .expect("enumerated data is always valid");
                // Increment the base-r counter.
                let mut idx = self.n;
                loop {
                    if idx == 0 {
                        self.exhausted_colors = true;
                        break;
                    }
                    idx -= 1;
                    self.colors[idx] += 1;
                    if self.colors[idx] < self.r {
                        break;
                    }
                    self.colors[idx] = 0;
                }
                return Some(item);
            }
            self.current = self.perms.next();
            self.colors.fill(0);
            self.exhausted_colors = false;
        }
    }
}

pub fn enumerate_group(n: usize, r: u32) -> GroupIter {
    GroupIter::new(n, r)
}

/// Every element of the class, exactly once. Uses whole-group filtering when
/// `r^n n!` fits in the budget, otherwise the constructive generator (which
/// costs one visit per class element); errors when both exceed the budget.
pub fn class_elements(label: &RPartition, budget: u128) -> Result<Vec<ColoredPermutation>> {
    let whole = group_order(label.n(), label.r());
    if whole <= BigInt::from(budget) {
        let target = label.clone();
        return Ok(enumerate_group(label.n(), label.r())
            .filter(|p| p.cycle_type() == target)
            .collect());
    }
    let size = label.class_size();
    if size <= BigInt::from(budget) {
        return Ok(class_elements_constructive(label));
    }
    Err(Error::BudgetExceeded {
        work: u128::try_from(&size).unwrap_or(u128::MAX),
        budget,
    })
}

/// Constructive enumeration: the smallest unused element leads the next
/// cycle; pick which remaining cycle spec it leads, an arrangement of the
/// remaining entries, and free colors on all entries but the leader, whose
/// color is fixed to make the cycle color come out right.
pub fn class_elements_constructive(label: &RPartition) -> Vec<ColoredPermutation> {
    let n = label.n();
    let r = label.r();
    let mut specs: Vec<((usize, u32), usize)> = Vec::new();
    for spec in label.cycle_specs() {
        match specs.last_mut() {
            Some((s, count)) if *s == spec => *count += 1,
            _ => specs.push((spec, 1)),
        }
    }

    struct State {
        n: usize,
        r: u32,
        used: Vec<bool>,
        cycles: Vec<ColoredCycle>,
        out: Vec<ColoredPermutation>,
    }

    fn rec(st: &mut State, specs: &mut Vec<((usize, u32), usize)>) {
        let leader = match st.used.iter().position(|&u| !u) {
            Some(idx) => idx + 1,
            None => {
                let elem =
                    ColoredPermutation::from_cycles(st.n, st.r, &st.cycles).expect("valid cycles");
                st.out.push(elem);
                return;
            }
        };
        let free: Vec<usize> = (leader + 1..=st.n).filter(|&e| !st.used[e - 1]).collect();
        for spec_idx in 0..specs.len() {
            let ((len, color), count) = specs[spec_idx];
            if count == 0 || free.len() + 1 < len {
                continue;
            }
            specs[spec_idx].1 -= 1;
            st.used[leader - 1] = true;
            for tail in free.iter().copied().permutations(len - 1) {
                for e in &tail {
                    st.used[e - 1] = true;
                }
                // Free colors on the tail, leader color forced.
                let mut tail_colors = vec![0u32; len - 1];
                loop {
                    let tail_sum: u32 = tail_colors.iter().sum::<u32>() % st.r;
                    let leader_color = (color + st.r - tail_sum % st.r) % st.r;
                    let mut entries = Vec::with_capacity(len);
                    entries.push((leader, leader_color));
                    entries.extend(tail.iter().copied().zip(tail_colors.iter().copied()));
                    st.cycles.push(ColoredCycle::from_entries(st.r, entries));
                    rec(st, specs);
                    st.cycles.pop();

                    let mut idx = tail_colors.len();
                    loop {
                        if idx == 0 {
                            break;
                        }
                        idx -= 1;
                        tail_colors[idx] += 1;
                        if tail_colors[idx] < st.r {
                            break;
                        }
                        tail_colors[idx] = 0;
                    }
                    if tail_colors.iter().all(|&c| c == 0) {
                        break;
                    }
                }
                for e in &tail {
                    st.used[e - 1] = false;
                }
            }
            st.used[leader - 1] = false;
            specs[spec_idx].1 += 1;
        }
    }

    let mut st = State {
        n,
        r,
        used: vec![false; n],
        cycles: Vec::new(),
        out: Vec::new(),
    };
    rec(&mut st, &mut specs);
    st.out
}

/// Exactly uniform sample from the class, deterministic in the seed.
///
/// A uniformly random ordering of `[n]` is cut into blocks matching the cycle
/// specs; each block read as a cycle, with free colors on all entries but the
/// first. Every class element arises from the same number
/// `∏ i^{m_i} m_i(λ^c)!` of (ordering, colors) choices, so this is uniform
/// without rejection.
pub fn sample_uniform(label: &RPartition, seed: u64) -> ColoredPermutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_uniform_with_rng(label, &mut rng)
}

pub fn sample_uniform_with_rng<R: Rng + ?Sized>(
    label: &RPartition,
    rng: &mut R,
) -> ColoredPermutation {
    let n = label.n();
    let r = label.r();
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut cycles = Vec::with_capacity(label.num_parts());
    let mut pos = 0;
    for (len, color) in label.cycle_specs() {
        let block = &order[pos..pos + len];
        pos += len;
        let mut entries = Vec::with_capacity(len);
        let mut tail_sum = 0u32;
        entries.push((block[0], 0)); // placeholder, fixed below
        for &e in &block[1..] {
            let c = rng.random_range(0..r);
            tail_sum = (tail_sum + c) % r;
            entries.push((e, c));
        }
        entries[0].1 = (color + r - tail_sum) % r;
        cycles.push(ColoredCycle::from_entries(r, entries));
    }
    ColoredPermutation::from_cycles(n, r, &cycles).expect("blocks partition [n]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use std::collections::BTreeSet;

    fn label(text: &str) -> RPartition {
        RPartition::parse(text).unwrap()
    }

    #[test]
    fn parse_display_round_trip() {
        for text in ["3,1;2", ";;3;2", "5;", ";1,1", "1,1,1;", "3;5"] {
            assert_eq!(label(text).to_string(), text);
        }
        assert_eq!(label("2;").components(), &[vec![2], vec![]]);
        assert_eq!(label(";;").n(), 0);
        assert_eq!(label(";;").r(), 3);
        assert_eq!(label("3,1;2").n(), 6);
        assert!(RPartition::parse("0;1").is_err());
        assert!(RPartition::parse("a;1").is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = label("3,1;2");
        let js = serde_json::to_string(&l).unwrap();
        assert_eq!(js, "[[3,1],[2]]");
        let back: RPartition = serde_json::from_str(&js).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn enumeration_small_cases() {
        let labels = enumerate_r_partitions(1, 2);
        assert_eq!(
            labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            vec!["1;", ";1"]
        );
        let labels = enumerate_r_partitions(2, 2);
        assert_eq!(
            labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            vec!["1,1;", "1;1", ";1,1", "2;", ";2"]
        );
        // Pairs of partitions (a, b) with |a| + |b| = 5.
        assert_eq!(enumerate_r_partitions(5, 2).len(), 36);
        assert_eq!(enumerate_r_partitions(0, 3).len(), 1);
        assert_eq!(enumerate_r_partitions(0, 3)[0], RPartition::empty(3));
    }

    #[test]
    fn enumeration_matches_brute_grouping() {
        // Group B_2 by cycle type and compare against the formula sizes.
        let labels = enumerate_r_partitions(2, 2);
        for l in &labels {
            let brute = enumerate_group(2, 2)
                .filter(|p| &p.cycle_type() == l)
                .count();
            assert_eq!(BigInt::from(brute), l.class_size(), "label {l}");
        }
        let total: BigInt = labels.iter().map(|l| l.class_size()).sum();
        assert_eq!(total, group_order(2, 2));
    }

    #[test]
    fn centralizer_examples() {
        assert_eq!(label("3;5").centralizer_order(), BigInt::from(60));
        assert_eq!(label("4,1;2,1").centralizer_order(), BigInt::from(128));
        assert_eq!(label("4,1;2,1").class_size(), BigInt::from(80640));
        let idn = label("1,1,1,1,1;");
        assert_eq!(idn.centralizer_order(), group_order(5, 2));
        assert_eq!(idn.class_size(), BigInt::one());
    }

    #[test]
    fn class_size_examples() {
        assert_eq!(label("2;").class_size(), BigInt::from(2));
        assert_eq!(label("3;").class_size(), BigInt::from(8));
        for n in 0..=4usize {
            for r in 1..=3u32 {
                let total: BigInt = enumerate_r_partitions(n, r)
                    .iter()
                    .map(|l| l.class_size())
                    .sum();
                assert_eq!(total, group_order(n, r), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn min_cycle_examples() {
        assert_eq!(label("3;5").min_cycle_length(), Some(3));
        assert!(label("3;5").has_no_cycles_up_to(2));
        assert_eq!(label("4,1;2,1").min_cycle_length(), Some(1));
        assert!(label("5;").has_no_cycles_up_to(4));
        assert_eq!(RPartition::empty(2).min_cycle_length(), None);
        assert!(RPartition::empty(2).has_no_cycles_up_to(10));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(label("4,1;2,1").delta(1).unwrap(), 0);
        assert_eq!(label("1,1;").delta(2).unwrap(), 4);
        assert_eq!(label(";1,1").delta(2).unwrap(), -4);
        assert!(label(";;").delta(1).is_err());
    }

    #[test]
    fn class_elements_trivial_classes() {
        let id_class = class_elements(&label("1,1,1;"), 1 << 20).unwrap();
        assert_eq!(id_class, vec![ColoredPermutation::identity(3, 2)]);
        let neg_class = class_elements(&label(";1,1,1"), 1 << 20).unwrap();
        assert_eq!(neg_class.len(), 1);
        assert_eq!(neg_class[0].signed_word().unwrap(), vec![-1, -2, -3]);
        let two_cycle = class_elements(&label("2;"), 1 << 20).unwrap();
        let words: BTreeSet<Vec<i64>> = two_cycle
            .iter()
            .map(|p| p.signed_word().unwrap())
            .collect();
        assert_eq!(
            words,
            BTreeSet::from([vec![2, 1], vec![-2, -1]])
        );
    }

    #[test]
    fn constructive_matches_filtering() {
        for (n, r) in [(4, 2u32), (3, 3u32)] {
            for l in enumerate_r_partitions(n, r) {
                let filtered: BTreeSet<ColoredPermutation> = enumerate_group(n, r)
                    .filter(|p| p.cycle_type() == l)
                    .collect();
                let constructive: Vec<ColoredPermutation> = class_elements_constructive(&l);
                let constructive_set: BTreeSet<ColoredPermutation> =
                    constructive.iter().cloned().collect();
                assert_eq!(constructive_set.len(), constructive.len(), "dup in {l}");
                assert_eq!(constructive_set, filtered, "mismatch for {l}");
                assert_eq!(BigInt::from(constructive.len()), l.class_size());
            }
        }
    }

    #[test]
    fn budget_behaviour() {
        // Tiny budget forces the constructive path, then errors out.
        let l = label("3;");
        let via_constructive = class_elements(&l, 10).unwrap();
        assert_eq!(via_constructive.len(), 8);
        let err = class_elements(&l, 2).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn sampling_basics() {
        let idn = label("1,1,1,1;");
        assert_eq!(sample_uniform(&idn, 7), ColoredPermutation::identity(4, 2));
        let l = label("4,1;2,1");
        for seed in 0..40 {
            assert_eq!(sample_uniform(&l, seed).cycle_type(), l);
        }
        // Deterministic in the seed.
        assert_eq!(sample_uniform(&l, 3), sample_uniform(&l, 3));
    }

    #[test]
    fn group_iter_counts() {
        assert_eq!(enumerate_group(0, 3).count(), 1);
        assert_eq!(enumerate_group(3, 2).count(), 48);
        assert_eq!(enumerate_group(2, 3).count(), 18);
        let all: BTreeSet<ColoredPermutation> = enumerate_group(3, 2).collect();
        assert_eq!(all.len(), 48);
    }

    #[test]
    fn swap_symmetry_small() {
        for l in enumerate_r_partitions(4, 2) {
            assert_eq!(l.class_size(), l.swap_components(0, 1).class_size());
        }
    }
}
