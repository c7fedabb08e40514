//! Colored permutations: elements of `S_{n,r} = Z_r ≀ S_n`.
//!
//! An element is a pair `(ω, τ)` of a permutation `ω` of `[n]` and a coloring
//! `τ : [n] → Z_r` of the *values*. Viewed as a bijection of the `rn`-element
//! set `[n]^r = { i^c }`, it acts by `f(i^c) = ω(i)^{τ(ω(i)) + c}`.
//!
//! For `r = 2` the signed view `i ↦ (−1)^{τ(ω(i))} ω(i)` identifies `S_{n,2}`
//! with the hyperoctahedral group `B_n`; color 1 is the negative sign.
//! Elements are 1-based everywhere, including the text formats.

use std::fmt;

use crate::classes::RPartition;
use crate::error::{Error, Result};

/// An element of the colored permutation group `S_{n,r}`.
///
/// `image[i-1] = ω(i)` and `color[v-1] = τ(v)`: colors are attached to
/// values, so the superscript printed at position `i` of the one-line form is
/// `τ(ω(i))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredPermutation {
    n: usize,
    r: u32,
    image: Vec<usize>,
    color: Vec<u32>,
}

impl fmt::Debug for ColoredPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoredPermutation[{self}]")
    }
}

/// One cycle of a colored permutation, in canonical form: the first entry is
/// the minimal element of the cycle and each entry carries `τ(element)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredCycle {
    entries: Vec<(usize, u32)>,
    color: u32,
}

impl ColoredCycle {
    /// Build a cycle from `(element, color)` entries in cycle order.
    pub fn from_entries(r: u32, entries: Vec<(usize, u32)>) -> Self {
        debug_assert!(!entries.is_empty());
        let color = entries.iter().map(|&(_, c)| c).sum::<u32>() % r;
        ColoredCycle { entries, color }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of the entry colors mod r.
    pub fn color(&self) -> u32 {
        self.color
    }

    /// `(element, τ(element))` pairs in cycle order, minimal element first.
    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }
}

impl ColoredPermutation {
    /// The identity of `S_{n,r}`: every value fixed with color 0.
    pub fn identity(n: usize, r: u32) -> Self {
        assert!(r >= 1, "r must be positive");
        ColoredPermutation {
            n,
            r,
            image: (1..=n).collect(),
            color: vec![0; n],
        }
    }

    /// Build from explicit `ω` (1-based images) and `τ` (colors of values).
    pub fn from_parts(r: u32, image: Vec<usize>, color: Vec<u32>) -> Result<Self> {
        if r < 1 {
            return Err(Error::Invalid("r must be positive".into()));
        }
        let n = image.len();
        if color.len() != n {
            return Err(Error::Invalid(format!(
                "image has length {n} but color has length {}",
                color.len()
            )));
        }
        let mut seen = vec![false; n];
        for &v in &image {
            if v < 1 || v > n {
                return Err(Error::Invalid(format!("image value {v} outside 1..={n}")));
            }
            if seen[v - 1] {
                return Err(Error::Invalid(format!("duplicate image value {v}")));
            }
            seen[v - 1] = true;
        }
        if color.iter().any(|&c| c >= r) {
            return Err(Error::Invalid(format!("color out of range 0..{r}")));
        }
        Ok(ColoredPermutation { n, r, image, color })
    }

    /// Build a `B_n` element from its signed one-line word.
    pub fn from_signed(word: &[i64]) -> Result<Self> {
        let n = word.len();
        let mut image = Vec::with_capacity(n);
        let mut color = vec![0u32; n];
        for &s in word {
            if s == 0 || s.unsigned_abs() as usize > n {
                return Err(Error::Invalid(format!("signed value {s} outside ±1..={n}")));
            }
            let v = s.unsigned_abs() as usize;
            image.push(v);
            if s < 0 {
                color[v - 1] = 1;
            }
        }
        Self::from_parts(2, image, color)
    }

    /// Rebuild an element from a full set of cycles partitioning `[n]`.
    pub fn from_cycles(n: usize, r: u32, cycles: &[ColoredCycle]) -> Result<Self> {
        let mut image = vec![0usize; n];
        let mut color = vec![0u32; n];
        let mut seen = vec![false; n];
        for cyc in cycles {
            let k = cyc.entries.len();
            for (idx, &(e, c)) in cyc.entries.iter().enumerate() {
                if e < 1 || e > n {
                    return Err(Error::Invalid(format!("cycle element {e} outside [1,{n}]")));
                }
                if seen[e - 1] {
                    return Err(Error::Invalid(format!("element {e} in two cycles")));
                }
                seen[e - 1] = true;
                let next = cyc.entries[(idx + 1) % k].0;
                image[e - 1] = next;
                color[e - 1] = c;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Invalid("cycles do not cover [n]".into()));
        }
        Self::from_parts(r, image, color)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn num_colors(&self) -> u32 {
        self.r
    }

    /// `ω(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    /// `τ(v)` for 1-based value `v`.
    pub fn color_of_value(&self, v: usize) -> u32 {
        self.color[v - 1]
    }

    /// Image of `i^c` under the bijection of `[n]^r`:
    /// `f(i^c) = ω(i)^{τ(ω(i)) + c}`.
    pub fn as_function(&self, i: usize, c: u32) -> Result<(usize, u32)> {
        if i < 1 || i > self.n {
            return Err(Error::OutOfRange(format!("element {i} outside [1,{}]", self.n)));
        }
        if c >= self.r {
            return Err(Error::OutOfRange(format!("color {c} outside 0..{}", self.r)));
        }
        let j = self.image[i - 1];
        Ok((j, (self.color[j - 1] + c) % self.r))
    }

    /// Signed value at position `i` (r = 2 only).
    pub fn signed_at(&self, i: usize) -> i64 {
        debug_assert_eq!(self.r, 2);
        let v = self.image[i - 1] as i64;
        if self.color[self.image[i - 1] - 1] == 1 {
            -v
        } else {
            v
        }
    }

    /// Signed one-line word (r = 2 only).
    pub fn signed_word(&self) -> Result<Vec<i64>> {
        if self.r != 2 {
            return Err(Error::Invalid(format!("signed view needs r = 2, got r = {}", self.r)));
        }
        Ok((1..=self.n).map(|i| self.signed_at(i)).collect())
    }

    fn check_same_params(&self, other: &Self) -> Result<()> {
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

    /// Group law: `self ∘ other`, applying `other` first on `[n]^r`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_params(other)?;
        let n = self.n;
        let mut image = vec![0usize; n];
        let mut color = vec![0u32; n];
        for i in 1..=n {
            image[i - 1] = self.image[other.image[i - 1] - 1];
        }
        // τ(v) = τ_a(v) + τ_b(ω_a^{-1}(v)): the color picked up at v plus the
        // color other attached to the value a sends to v.
        let mut a_preimage = vec![0usize; n];
        for i in 1..=n {
            a_preimage[self.image[i - 1] - 1] = i;
        }
        for v in 1..=n {
            color[v - 1] = (self.color[v - 1] + other.color[a_preimage[v - 1] - 1]) % self.r;
        }
        Ok(ColoredPermutation { n, r: self.r, image, color })
    }

    pub fn inverse(&self) -> Self {
        let n = self.n;
        let mut image = vec![0usize; n];
        let mut color = vec![0u32; n];
        for i in 1..=n {
            image[self.image[i - 1] - 1] = i;
        }
        for v in 1..=n {
            // τ'(v) = −τ(ω(v)): undo the color the forward map adds at ω(v).
            color[v - 1] = (self.r - self.color[self.image[v - 1] - 1]) % self.r;
        }
        ColoredPermutation { n, r: self.r, image, color }
    }

    /// `g · self · g^{-1}`.
    pub fn conjugate_by(&self, g: &Self) -> Result<Self> {
        self.check_same_params(g)?;
        g.compose(&self.compose(&g.inverse())?)
    }

    /// Cycles in canonical form: each starts at its minimal element, cycles
    /// sorted by minimal element; together they partition `[n]`.
    pub fn cycle_decomposition(&self) -> Vec<ColoredCycle> {
        let mut seen = vec![false; self.n];
        let mut cycles = Vec::new();
        for start in 1..=self.n {
            if seen[start - 1] {
                continue;
            }
            let mut entries = Vec::new();
            let mut e = start;
            loop {
                seen[e - 1] = true;
                entries.push((e, self.color[e - 1]));
                e = self.image[e - 1];
                if e == start {
                    break;
                }
            }
            cycles.push(ColoredCycle::from_entries(self.r, entries));
        }
        cycles
    }

    /// Cycle type as an r-partition: component `c` collects the lengths of
    /// the cycles of color `c`.
    pub fn cycle_type(&self) -> RPartition {
        let mut parts = vec![Vec::new(); self.r as usize];
        for cyc in self.cycle_decomposition() {
            parts[cyc.color() as usize].push(cyc.len());
        }
        RPartition::new(self.r, parts).expect("cycle lengths always form an r-partition")
    }

    /// One-line notation with explicit colors: `4^1 5^3 1^3 3^1 2^0`.
    pub fn format_colored(&self) -> String {
        (1..=self.n)
            .map(|i| {
                let v = self.image[i - 1];
                format!("{}^{}", v, self.color[v - 1])
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Signed one-line notation (r = 2): `2,7,-1,-5,8,3,6,-4`.
    pub fn format_signed(&self) -> Result<String> {
        Ok(self
            .signed_word()?
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","))
    }

    /// Parse one-line notation. Tokens are separated by spaces or commas and
    /// are either `v^c`, a bare positive integer (color 0), or a negative
    /// integer (r = 2 shorthand for color 1).
    pub fn parse(text: &str, r: u32) -> Result<Self> {
        if r < 1 {
            return Err(Error::Parse("r must be positive".into()));
        }
        let tokens: Vec<&str> = text
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let n = tokens.len();
        let mut image = Vec::with_capacity(n);
        let mut colors = Vec::with_capacity(n);
        for tok in tokens {
            let (v, c) = if let Some((v, c)) = tok.split_once('^') {
                let v: usize = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("malformed token `{tok}`")))?;
                let c: u32 = c
                    .parse()
                    .map_err(|_| Error::Parse(format!("malformed token `{tok}`")))?;
                (v, c)
            } else {
                let s: i64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("malformed token `{tok}`")))?;
                if s < 0 && r != 2 {
                    return Err(Error::Parse(format!(
                        "signed token `{tok}` only valid for r = 2"
                    )));
                }
                if s == 0 {
                    return Err(Error::Parse("token 0 is not a valid element".into()));
                }
                (s.unsigned_abs() as usize, u32::from(s < 0))
            };
            if c >= r {
                return Err(Error::Parse(format!("color {c} out of range 0..{r}")));
            }
            image.push(v);
            colors.push(c);
        }
        // Colors ride on values: the superscript at position i is τ(image[i]).
        let mut color = vec![0u32; n];
        for (idx, &v) in image.iter().enumerate() {
            if v < 1 || v > n {
                return Err(Error::Parse(format!("image value {v} outside 1..={n}")));
            }
            color[v - 1] = colors[idx];
        }
        Self::from_parts(r, image, color).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for ColoredPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 2 {
            write!(f, "{}", self.format_signed().expect("r = 2"))
        } else {
            write!(f, "{}", self.format_colored())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The running S_{5,4} example: [4^1 5^3 1^3 3^1 2^0].
    fn sample_5_4() -> ColoredPermutation {
        ColoredPermutation::from_parts(4, vec![4, 5, 1, 3, 2], vec![3, 0, 1, 1, 3]).unwrap()
    }

    #[test]
    fn identity_basics() {
        let id = ColoredPermutation::identity(3, 2);
        assert_eq!(id.format_colored(), "1^0 2^0 3^0");
        assert_eq!(id.cycle_type().to_string(), "1,1,1;");
        let empty = ColoredPermutation::identity(0, 4);
        assert_eq!(empty.degree(), 0);
        assert_eq!(empty.cycle_decomposition().len(), 0);
    }

    #[test]
    fn as_function_matches_examples() {
        let p = sample_5_4();
        assert_eq!(p.as_function(1, 0).unwrap(), (4, 1));
        assert_eq!(p.as_function(1, 3).unwrap(), (4, 0));
        let id = ColoredPermutation::identity(3, 2);
        assert_eq!(id.as_function(2, 1).unwrap(), (2, 1));
        assert!(p.as_function(6, 0).is_err());
        assert!(p.as_function(1, 4).is_err());
    }

    #[test]
    fn compose_identity_and_inverse() {
        let p = sample_5_4();
        let id = ColoredPermutation::identity(5, 4);
        assert_eq!(p.compose(&id).unwrap(), p);
        assert_eq!(id.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&p.inverse()).unwrap(), id);
        assert_eq!(p.inverse().compose(&p).unwrap(), id);
        assert_eq!(p.inverse().inverse(), p);
    }

    /// compose(a, b) must act on [n]^r exactly like f_a ∘ f_b (b first).
    fn assert_is_function_composition(a: &ColoredPermutation, b: &ColoredPermutation) {
        let c = a.compose(b).unwrap();
        for i in 1..=a.degree() {
            for col in 0..a.num_colors() {
                let (j, d) = b.as_function(i, col).unwrap();
                let expect = a.as_function(j, d).unwrap();
                assert_eq!(c.as_function(i, col).unwrap(), expect);
            }
        }
    }

    #[test]
    fn compose_is_function_composition_b2() {
        // s_0 = [-1, 2] composed with the transposition [2, 1], right factor
        // first: f([1]) goes 1 -> 2 -> 2, f([2]) goes 2 -> 1 -> -1.
        let a = ColoredPermutation::from_signed(&[-1, 2]).unwrap();
        let b = ColoredPermutation::from_signed(&[2, 1]).unwrap();
        let c = a.compose(&b).unwrap();
        assert_eq!(c.signed_word().unwrap(), vec![2, -1]);
        assert_is_function_composition(&a, &b);
        assert_is_function_composition(&b, &a);
    }

    #[test]
    fn inverse_of_involution() {
        let s0 = ColoredPermutation::from_signed(&[-1, 2]).unwrap();
        assert_eq!(s0.inverse(), s0);
    }

    #[test]
    fn conjugate_trivia() {
        let p = sample_5_4();
        let id = ColoredPermutation::identity(5, 4);
        assert_eq!(p.conjugate_by(&id).unwrap(), p);
        assert_eq!(p.conjugate_by(&p).unwrap(), p);
        assert!(p.conjugate_by(&ColoredPermutation::identity(4, 4)).is_err());
    }

    #[test]
    fn cycle_decomposition_examples() {
        let p = sample_5_4();
        let cycles = p.cycle_decomposition();
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].entries(), &[(1, 3), (4, 1), (3, 1)]);
        assert_eq!(cycles[0].color(), 1);
        assert_eq!(cycles[1].entries(), &[(2, 0), (5, 3)]);
        assert_eq!(cycles[1].color(), 3);
        assert_eq!(p.cycle_type().to_string(), ";3;;2");

        let b8 = ColoredPermutation::from_signed(&[2, 7, -1, -5, 8, 3, 6, -4]).unwrap();
        let mut lens: Vec<(usize, u32)> = b8
            .cycle_decomposition()
            .iter()
            .map(|c| (c.len(), c.color()))
            .collect();
        lens.sort();
        assert_eq!(lens, vec![(3, 0), (5, 1)]);
        assert_eq!(b8.cycle_type().to_string(), "3;5");

        let b8b = ColoredPermutation::from_signed(&[2, 7, 3, -4, 8, -1, -6, -5]).unwrap();
        assert_eq!(b8b.cycle_type().to_string(), "4,1;2,1");

        let id = ColoredPermutation::identity(3, 2);
        let cycles = id.cycle_decomposition();
        assert_eq!(cycles.len(), 3);
        assert!(cycles.iter().all(|c| c.len() == 1 && c.color() == 0));
    }

    #[test]
    fn cycles_round_trip() {
        let p = sample_5_4();
        let back = ColoredPermutation::from_cycles(5, 4, &p.cycle_decomposition()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn parse_and_format() {
        let p = ColoredPermutation::parse("4^1 5^3 1^3 3^1 2^0", 4).unwrap();
        assert_eq!(p, sample_5_4());
        assert_eq!(p.format_colored(), "4^1 5^3 1^3 3^1 2^0");

        let b8 = ColoredPermutation::parse("2,7,-1,-5,8,3,6,-4", 2).unwrap();
        assert_eq!(b8, ColoredPermutation::from_signed(&[2, 7, -1, -5, 8, 3, 6, -4]).unwrap());
        assert_eq!(b8.to_string(), "2,7,-1,-5,8,3,6,-4");

        let one = ColoredPermutation::parse("1^0", 1).unwrap();
        assert_eq!(one, ColoredPermutation::identity(1, 1));

        assert!(ColoredPermutation::parse("1^1", 1).is_err());
        assert!(ColoredPermutation::parse("1 1", 2).is_err());
        assert!(ColoredPermutation::parse("3 1", 2).is_err());
        assert!(ColoredPermutation::parse("-1 2", 3).is_err());
        assert!(ColoredPermutation::parse("0 1", 2).is_err());
        assert!(ColoredPermutation::parse("a b", 2).is_err());
    }

    #[test]
    fn signed_view_is_signed_permutation() {
        // ω(-i) = -ω(i) is automatic in the signed view; spot-check values.
        let b8 = ColoredPermutation::from_signed(&[2, 7, -1, -5, 8, 3, 6, -4]).unwrap();
        assert_eq!(b8.signed_at(3), -1);
        assert_eq!(b8.apply(3), 1);
        assert_eq!(b8.color_of_value(1), 1);
    }
}
