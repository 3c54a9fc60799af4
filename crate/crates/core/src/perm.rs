//! Permutations in one-line notation and the pattern machinery built on them.
//!
//! Values and positions are 1-indexed in every public signature and in text
//! output; storage is a plain `Vec<u8>` of the one-line word.
//!
//! Composition follows a single convention everywhere in the crate:
//! `compose(a, b)[i] = a[b[i]]`. A shuffle of device content `w` by `σ`
//! produces `compose(w, σ)`, and products of embedded shuffles are formed
//! with the same rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported size. Values are stored as `u8`.
pub const MAX_SIZE: usize = u8::MAX as usize;

/// A sequence of distinct positive integers, not necessarily `1..=n`.
///
/// Device, input and output contents of a configuration are words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        let mut seen = [false; 256];
        for &e in &entries {
            if e == 0 {
                return Err(Error::InvalidWord("entries must be positive".into()));
            }
            if seen[e as usize] {
                return Err(Error::InvalidWord(format!("duplicate entry {e}")));
            }
            seen[e as usize] = true;
        }
        Ok(Word(entries))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// The word rearranged by `sigma`: entry `i` becomes `self[sigma[i]]`.
    pub fn compose(&self, sigma: &Permutation) -> Result<Word> {
        compose_slices(&self.0, sigma.as_slice()).map(Word)
    }

    pub fn reduce(&self) -> Permutation {
        reduce_distinct(&self.0)
    }

    pub(crate) fn vec_mut(&mut self) -> &mut Vec<u8> {
        &mut self.0
    }
}

impl From<Permutation> for Word {
    fn from(p: Permutation) -> Self {
        Word(p.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::new(parse_entries(s, "word")?).map_err(|e| Error::Parse {
            what: "word",
            input: s.to_string(),
            reason: e.to_string(),
        })
    }
}

/// A bijection on `[n]` written as its one-line word. Size 0 is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Permutation(Vec<u8>);

impl TryFrom<Vec<u8>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<u8> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    /// Validates that `word` holds exactly the values `1..=word.len()`.
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if word.len() > MAX_SIZE {
            return Err(Error::InvalidWord(format!(
                "size {} exceeds {MAX_SIZE}",
                word.len()
            )));
        }
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &v in &word {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(Error::InvalidWord(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if seen[v] {
                return Err(Error::InvalidWord(format!("duplicate value {v}")));
            }
            seen[v] = true;
        }
        Ok(Permutation(word))
    }

    pub(crate) fn from_vec_unchecked(word: Vec<u8>) -> Self {
        debug_assert!(Permutation::new(word.clone()).is_ok(), "{word:?}");
        Permutation(word)
    }

    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    /// `12…n`.
    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u8).collect())
    }

    /// `n(n-1)…1`.
    pub fn reverse_identity(n: usize) -> Self {
        Permutation((1..=n as u8).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// Value at 1-indexed position `i`.
    pub fn at(&self, i: usize) -> u8 {
        self.0[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    /// `compose(a, b)[i] = a[b[i]]`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        compose_slices(&self.0, &other.0).map(Permutation)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = (i + 1) as u8;
        }
        Permutation(inv)
    }

    pub fn reverse(&self) -> Permutation {
        Permutation(self.0.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Permutation {
        let n1 = self.0.len() as u8 + 1;
        Permutation(self.0.iter().map(|&v| n1 - v).collect())
    }

    /// Complement of the reverse (equivalently, the graph rotated by 180°).
    pub fn star(&self) -> Permutation {
        self.reverse().complement()
    }

    /// `a ⊕ b`: `b` placed above and to the right of `a`.
    pub fn direct_sum(&self, other: &Permutation) -> Permutation {
        let k = self.0.len() as u8;
        let mut w = self.0.clone();
        w.extend(other.0.iter().map(|&v| v + k));
        Permutation(w)
    }

    /// `a ⊖ b`: `a` placed above and to the left of `b`.
    pub fn skew_sum(&self, other: &Permutation) -> Permutation {
        let l = other.0.len() as u8;
        let mut w: Vec<u8> = self.0.iter().map(|&v| v + l).collect();
        w.extend_from_slice(&other.0);
        Permutation(w)
    }

    /// True iff no proper nonempty prefix occupies a prefix of the values.
    /// Vacuously true for sizes 0 and 1.
    pub fn is_irreducible(&self) -> bool {
        let mut max = 0u8;
        for (j, &v) in self.0.iter().enumerate().take(self.0.len().saturating_sub(1)) {
            max = max.max(v);
            if max as usize == j + 1 {
                return false;
            }
        }
        true
    }

    /// Positions `j` (1 ≤ j < n) where the prefix of length `j` holds `1..=j`.
    pub fn sum_split_points(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut max = 0u8;
        for (j, &v) in self.0.iter().enumerate().take(self.0.len().saturating_sub(1)) {
            max = max.max(v);
            if max as usize == j + 1 {
                out.push(j + 1);
            }
        }
        out
    }

    /// Sum-indecomposable components, left to right.
    pub fn sum_components(&self) -> Vec<Permutation> {
        let mut cuts = self.sum_split_points();
        cuts.push(self.0.len());
        let mut out = Vec::with_capacity(cuts.len());
        let mut start = 0;
        for end in cuts {
            if end > start {
                out.push(reduce_distinct(&self.0[start..end]));
            }
            start = end;
        }
        out
    }

    /// True iff some subsequence of `self` is order-isomorphic to `pattern`.
    pub fn contains(&self, pattern: &Permutation) -> bool {
        contains_pattern(&self.0, &pattern.0)
    }

    pub fn avoids_all<'a>(&self, patterns: impl IntoIterator<Item = &'a Permutation>) -> bool {
        patterns.into_iter().all(|p| !self.contains(p))
    }

    /// Length of a longest decreasing subsequence.
    pub fn longest_decreasing(&self) -> usize {
        let w = &self.0;
        let mut best = vec![1usize; w.len()];
        for i in 0..w.len() {
            for j in 0..i {
                if w[j] > w[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Lexicographic rank among permutations of the same size (n ≤ 20).
    pub fn rank(&self) -> usize {
        let n = self.0.len();
        debug_assert!(n <= 20);
        let mut rank = 0usize;
        let mut used = 0u64;
        for (i, &v) in self.0.iter().enumerate() {
            let smaller_unused = (1..v).filter(|&u| used & (1 << u) == 0).count();
            rank = rank * (n - i) + smaller_unused;
            used |= 1 << v;
        }
        rank
    }

    /// Inverse of [`Permutation::rank`].
    pub fn unrank(n: usize, mut rank: usize) -> Permutation {
        let mut pool: Vec<u8> = (1..=n as u8).collect();
        let mut radix: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            radix.push(n - i);
        }
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            digits[i] = rank % radix[i];
            rank /= radix[i];
        }
        let w = digits.into_iter().map(|d| pool.remove(d)).collect();
        Permutation(w)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

/// Accepts `2,1,3`, `2 1 3`, or the compact `213` (single digits only).
/// The empty string is the empty permutation.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = parse_entries(s, "permutation")?;
        Permutation::new(entries).map_err(|e| Error::Parse {
            what: "permutation",
            input: s.to_string(),
            reason: e.to_string(),
        })
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, w: &[u8]) -> fmt::Result {
    for (i, v) in w.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

fn parse_entries(s: &str, what: &'static str) -> Result<Vec<u8>> {
    let t = s.trim();
    let t = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(t).trim();
    if t.is_empty() || t == "ε" {
        return Ok(Vec::new());
    }
    let err = |reason: String| Error::Parse {
        what,
        input: s.to_string(),
        reason,
    };
    if t.contains(|c: char| c == ',' || c.is_whitespace()) {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| tok.parse::<u8>().map_err(|e| err(format!("{tok:?}: {e}"))))
            .collect()
    } else {
        t.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| err(format!("unexpected character {c:?}")))
            })
            .collect()
    }
}

/// `red(w)`: replace the i-th smallest entry by i.
pub fn reduce(w: &[u8]) -> Result<Permutation> {
    Word::new(w.to_vec())?;
    Ok(reduce_distinct(w))
}

pub(crate) fn reduce_distinct(w: &[u8]) -> Permutation {
    let mut sorted: Vec<u8> = w.to_vec();
    sorted.sort_unstable();
    Permutation(
        w.iter()
            .map(|v| (sorted.binary_search(v).expect("entry present") + 1) as u8)
            .collect(),
    )
}

pub(crate) fn compose_slices(a: &[u8], b: &[u8]) -> Result<Vec<u8>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(b.iter().map(|&i| a[i as usize - 1]).collect())
}

/// In-place rearrangement `w ← compose(w, sigma)`; lengths must agree.
pub(crate) fn compose_into(w: &[u8], sigma: &[u8], out: &mut Vec<u8>) {
    out.clear();
    out.extend(sigma.iter().map(|&i| w[i as usize - 1]));
}

fn contains_pattern(text: &[u8], pattern: &[u8]) -> bool {
    let k = pattern.len();
    if k == 0 {
        return true;
    }
    if k > text.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(k);
    extend_occurrence(text, pattern, 0, &mut chosen)
}

fn extend_occurrence(text: &[u8], pattern: &[u8], from: usize, chosen: &mut Vec<u8>) -> bool {
    let t = chosen.len();
    if t == pattern.len() {
        return true;
    }
    let remaining = pattern.len() - t;
    for j in from..=text.len() - remaining {
        let x = text[j];
        let consistent = chosen
            .iter()
            .zip(pattern)
            .all(|(&y, &p)| (y < x) == (p < pattern[t]));
        if consistent {
            chosen.push(x);
            if extend_occurrence(text, pattern, j + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// All permutations of size `n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut w: Vec<u8> = (1..=n as u8).collect();
    loop {
        out.push(Permutation(w.clone()));
        if !next_permutation(&mut w) {
            break;
        }
    }
    out
}

fn next_permutation(w: &mut [u8]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let mut i = w.len() - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = w.len() - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}
