//! Exact counts: closed forms, recurrences, and the plan/cluster encodings
//! that the counting arguments rest on.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::method::ShufflingMethod;
use crate::perm::{compose_slices, Permutation};

/// `|Avₙ(321, 2413, 3142)|` via `aₙ = 3aₙ₋₁ − 2aₙ₋₂ + aₙ₋₃` from
/// `a₁ = 1, a₂ = 2, a₃ = 5` (and `a₀ = 1`).
pub fn av321sep_count(n: usize) -> BigUint {
    av321sep_table(n).pop().expect("table is nonempty")
}

/// `[a₀, a₁, …, aₙ]`.
pub fn av321sep_table(n: usize) -> Vec<BigUint> {
    let mut a: Vec<BigUint> = [1u32, 1, 2, 5].iter().map(|&v| BigUint::from(v)).collect();
    while a.len() <= n {
        let k = a.len();
        let next = BigUint::from(3u32) * &a[k - 1] + &a[k - 3] - BigUint::from(2u32) * &a[k - 2];
        a.push(next);
    }
    a.truncate(n + 1);
    a
}

/// `a(n+1) / a(n)` as a float.
pub fn av321sep_ratio(n: usize) -> f64 {
    let t = av321sep_table(n + 1);
    big_ratio(&t[n + 1], &t[n])
}

pub(crate) fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    // Keep 60 significant bits of the denominator so both sides fit in f64.
    let shift = den.bits().saturating_sub(60);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Fibonacci numbers with `F₀ = 0`, `F₁ = F₂ = 1`.
pub fn fib(k: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..k {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of compositions of `k` with every part at least 2, by dynamic
/// programming.
pub fn compositions_parts_ge2(k: usize) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "compositions with parts ≥ 2 need k ≥ 2, got {k}"
        )));
    }
    let mut c = vec![BigUint::zero(); k + 1];
    c[0] = BigUint::one();
    for m in 2..=k {
        let mut s = BigUint::zero();
        for part in 2..=m {
            s += &c[m - part];
        }
        c[m] = s;
    }
    Ok(c.swap_remove(k))
}

/// `(F₂ₙ₋₁, 1 + Σ_{k=2}^{n} C(n, k)·F_{k−1})`.
pub fn fib_odd_identity(n: usize) -> Result<(BigUint, BigUint)> {
    if n == 0 {
        return Err(Error::Precondition("fib_odd_identity needs n ≥ 1".into()));
    }
    let lhs = fib(2 * n - 1);
    let mut rhs = BigUint::one();
    for k in 2..=n {
        rhs += binomial(n, k) * fib(k - 1);
    }
    Ok((lhs, rhs))
}

/// `F₂ₙ₋₁`, the number of permutations of size `n` sorted by the
/// pop-unloading queue of any back-front method.
pub fn backfront_pop_count(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Precondition("backfront_pop_count needs n ≥ 1".into()));
    }
    Ok(fib(2 * n - 1))
}

/// Count of permutations sorted by the unload-after-shuffle queue of a
/// method whose members are all irreducible:
/// `1 + Σ_{u ≥ 0} Σ_{k₁+…+k_l = n−u, kᵢ ≥ 2} C(u+l, l)·∏ b_{kⱼ}`.
pub fn p_prime_formula(method: &ShufflingMethod, n: usize) -> Result<BigUint> {
    if !method.is_irreducible_family(n) {
        return Err(Error::Precondition(format!(
            "method {method} has a reducible family member at some size ≤ {n}"
        )));
    }
    let b: Vec<BigUint> = (0..=n).map(|k| BigUint::from(method.family(k).len())).collect();
    // g[m][l]: weighted compositions of m into l parts, each part ≥ 2.
    let mut g = vec![vec![BigUint::zero(); n / 2 + 2]; n + 1];
    g[0][0] = BigUint::one();
    for m in 2..=n {
        for l in 1..=m / 2 {
            let mut s = BigUint::zero();
            for part in 2..=m {
                if !g[m - part][l - 1].is_zero() {
                    s += &g[m - part][l - 1] * &b[part];
                }
            }
            g[m][l] = s;
        }
    }
    let mut total = BigUint::one();
    for u in 0..=n {
        let m = n - u;
        for (l, ways) in g[m].iter().enumerate().take(m / 2 + 1).skip(1) {
            if !ways.is_zero() {
                total += binomial(u + l, l) * ways;
            }
        }
    }
    Ok(total)
}

/// A shuffled segment `[start, end]` (1-indexed, inclusive) and the family
/// member applied to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub sigma: Permutation,
}

/// Disjoint increasing segments, each rearranged by one shuffle during a
/// single pass of the unload-after-shuffle queue.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SegmentShufflePlan {
    pub segments: Vec<Segment>,
}

impl SegmentShufflePlan {
    pub fn new(segments: Vec<Segment>) -> Self {
        SegmentShufflePlan { segments }
    }

    /// Number of positions not covered by a segment.
    pub fn unshuffled(&self, n: usize) -> usize {
        n - self.segments.iter().map(|s| s.end - s.start + 1).sum::<usize>()
    }

    /// Checks geometry, and family membership when `method` is given.
    pub fn validate(&self, n: usize, method: Option<&ShufflingMethod>) -> Result<()> {
        let mut next_free = 1;
        for s in &self.segments {
            if s.start < next_free || s.end > n || s.end <= s.start {
                return Err(Error::InvalidGeometry(format!(
                    "segment [{}, {}] is empty, overlaps, or leaves [1, {n}]",
                    s.start, s.end
                )));
            }
            if s.sigma.len() != s.end - s.start + 1 {
                return Err(Error::InvalidGeometry(format!(
                    "segment [{}, {}] carries {} of size {}",
                    s.start,
                    s.end,
                    s.sigma,
                    s.sigma.len()
                )));
            }
            if let Some(m) = method {
                if !m.contains(&s.sigma) {
                    return Err(Error::InvalidGeometry(format!(
                        "{} is not a member of {m}",
                        s.sigma
                    )));
                }
            }
            next_free = s.end + 1;
        }
        Ok(())
    }
}

impl fmt::Display for SegmentShufflePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|s| format!("[{},{}]->{}", s.start, s.end, s.sigma))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The permutation sorted by the pass that realizes `plan`: the identity
/// with each segment rearranged by the inverse of its shuffle.
pub fn perm_from_plan(plan: &SegmentShufflePlan, n: usize) -> Result<Permutation> {
    plan.validate(n, None)?;
    let mut w: Vec<u8> = Permutation::identity(n).into_inner();
    for s in plan.segments.iter().rev() {
        let seg = &mut w[s.start - 1..s.end];
        let undone = compose_slices(seg, s.sigma.inverse().as_slice())?;
        seg.copy_from_slice(&undone);
    }
    Ok(Permutation::from_vec_unchecked(w))
}

/// Every plan for size `n`, ordered by the number of unshuffled positions,
/// then lexicographically by segments.
pub fn all_plans(method: &ShufflingMethod, n: usize) -> Vec<SegmentShufflePlan> {
    fn rec(
        method: &ShufflingMethod,
        n: usize,
        pos: usize,
        acc: &mut Vec<Segment>,
        out: &mut Vec<SegmentShufflePlan>,
    ) {
        if pos > n {
            out.push(SegmentShufflePlan::new(acc.clone()));
            return;
        }
        rec(method, n, pos + 1, acc, out);
        for end in pos + 1..=n {
            for sigma in method.family(end - pos + 1).iter() {
                acc.push(Segment {
                    start: pos,
                    end,
                    sigma: sigma.clone(),
                });
                rec(method, n, end + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(method, n, 1, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        a.unshuffled(n)
            .cmp(&b.unshuffled(n))
            .then_with(|| a.segments.cmp(&b.segments))
    });
    out
}

/// `[a; b₁, …, b_v]`: the device starts filling at position `a` and is
/// shuffled when it holds positions `a..=bⱼ`, then unloaded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cluster {
    pub start: usize,
    pub ends: Vec<usize>,
}

impl Cluster {
    pub fn new(start: usize, ends: Vec<usize>) -> Self {
        Cluster { start, ends }
    }

    fn last(&self) -> usize {
        *self.ends.last().unwrap_or(&self.start)
    }
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ends: Vec<String> = self.ends.iter().map(usize::to_string).collect();
        write!(f, "[{}; {}]", self.start, ends.join(","))
    }
}

pub fn validate_clusters(clusters: &[Cluster], n: usize) -> Result<()> {
    let mut next_free = 1;
    for c in clusters {
        let bad = || Error::InvalidGeometry(format!("cluster {c} is invalid in [1, {n}]"));
        if c.ends.is_empty() || c.start < next_free || c.last() > n {
            return Err(bad());
        }
        let mut prev = c.start;
        for &b in &c.ends {
            if b <= prev {
                return Err(bad());
            }
            prev = b;
        }
        next_free = c.last() + 1;
    }
    Ok(())
}

/// The permutation sorted by the pop-unloading pass that realizes
/// `clusters` under a back-front method.
pub fn perm_from_clusters(
    method: &ShufflingMethod,
    clusters: &[Cluster],
    n: usize,
) -> Result<Permutation> {
    if !method.is_back_front(n) {
        return Err(Error::Precondition(format!(
            "method {method} is not back-front up to size {n}"
        )));
    }
    validate_clusters(clusters, n)?;
    let mut w: Vec<u8> = Permutation::identity(n).into_inner();
    for c in clusters {
        for &b in c.ends.iter().rev() {
            let size = b - c.start + 1;
            let sigma = method.single(size).expect("back-front family has one member");
            let seg = &mut w[c.start - 1..b];
            let undone = compose_slices(seg, sigma.inverse().as_slice())?;
            seg.copy_from_slice(&undone);
        }
    }
    Ok(Permutation::from_vec_unchecked(w))
}

/// Every cluster list for size `n`.
pub fn all_cluster_lists(n: usize) -> Vec<Vec<Cluster>> {
    fn ends_from(from: usize, n: usize) -> Vec<Vec<usize>> {
        // Nonempty increasing sequences in [from, n].
        let mut out = Vec::new();
        for first in from..=n {
            out.push(vec![first]);
            for tail in ends_from(first + 1, n) {
                let mut v = vec![first];
                v.extend(tail);
                out.push(v);
            }
        }
        out
    }
    fn rec(n: usize, pos: usize, acc: &mut Vec<Cluster>, out: &mut Vec<Vec<Cluster>>) {
        if pos > n {
            out.push(acc.clone());
            return;
        }
        rec(n, pos + 1, acc, out);
        for ends in ends_from(pos + 1, n) {
            let last = *ends.last().expect("nonempty");
            acc.push(Cluster::new(pos, ends));
            rec(n, last + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut out);
    out
}

/// Where a count came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Brute,
    Formula,
    Recurrence,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Brute => "brute",
            Provenance::Formula => "formula",
            Provenance::Recurrence => "recurrence",
        })
    }
}

fn big_as_string<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountEntry {
    pub n: usize,
    #[serde(serialize_with = "big_as_string")]
    pub count: BigUint,
    pub provenance: Provenance,
}

/// Per-`n` counts for one method and variant, `n` contiguous from
/// `first_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub method: String,
    pub variant: String,
    pub entries: Vec<CountEntry>,
}

impl CountTable {
    pub fn new(method: impl Into<String>, variant: impl Into<String>) -> Self {
        CountTable {
            method: method.into(),
            variant: variant.into(),
            entries: Vec::new(),
        }
    }

    /// Appends the row for `n`, which must follow the previous row.
    pub fn push(&mut self, n: usize, count: BigUint, provenance: Provenance) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if n != last.n + 1 {
                return Err(Error::Precondition(format!(
                    "count table rows must be contiguous: {} then {n}",
                    last.n
                )));
            }
        }
        self.entries.push(CountEntry {
            n,
            count,
            provenance,
        });
        Ok(())
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.entries.iter().find(|e| e.n == n).map(|e| &e.count)
    }

    /// `n,count,provenance` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,count,provenance\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.n, e.count, e.provenance));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn av321sep_values() {
        let want = [1u64, 2, 5, 12, 28, 65, 151];
        for (i, &v) in want.iter().enumerate() {
            assert_eq!(av321sep_count(i + 1), big(v));
        }
        assert_eq!(av321sep_count(0), big(1));
    }

    #[test]
    fn fibonacci_identities() {
        assert_eq!(compositions_parts_ge2(2).unwrap(), big(1));
        assert_eq!(compositions_parts_ge2(3).unwrap(), big(1));
        assert_eq!(compositions_parts_ge2(5).unwrap(), big(3));
        assert!(compositions_parts_ge2(1).is_err());
        assert_eq!(fib_odd_identity(3).unwrap(), (big(5), big(5)));
        assert_eq!(fib_odd_identity(2).unwrap(), (big(2), big(2)));
        let (l, r) = fib_odd_identity(10).unwrap();
        assert_eq!(l, r);
        assert_eq!(backfront_pop_count(2).unwrap(), big(2));
        assert_eq!(backfront_pop_count(4).unwrap(), big(13));
        assert_eq!(backfront_pop_count(7).unwrap(), big(233));
    }

    #[test]
    fn formula_values() {
        let cuts = ShufflingMethod::cuts();
        assert_eq!(p_prime_formula(&cuts, 1).unwrap(), big(1));
        assert_eq!(p_prime_formula(&cuts, 3).unwrap(), big(5));
        assert_eq!(p_prime_formula(&ShufflingMethod::rev(), 4).unwrap(), big(8));
        for n in 1..=20 {
            assert_eq!(p_prime_formula(&cuts, n).unwrap(), av321sep_count(n), "n = {n}");
        }
        let reducible = ShufflingMethod::parse_custom("r", "2: 21\n3: 132").unwrap();
        assert!(matches!(p_prime_formula(&reducible, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn plan_examples() {
        let plan = SegmentShufflePlan::new(vec![
            Segment { start: 1, end: 2, sigma: p("21") },
            Segment { start: 4, end: 6, sigma: p("231") },
        ]);
        plan.validate(6, Some(&ShufflingMethod::cuts())).unwrap();
        assert_eq!(perm_from_plan(&plan, 6).unwrap(), p("213645"));
        assert_eq!(perm_from_plan(&SegmentShufflePlan::default(), 5).unwrap(), Permutation::identity(5));
        let overlapping = SegmentShufflePlan::new(vec![
            Segment { start: 1, end: 2, sigma: p("21") },
            Segment { start: 2, end: 3, sigma: p("21") },
        ]);
        assert!(matches!(perm_from_plan(&overlapping, 3), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn plan_order_and_counts() {
        let cuts = ShufflingMethod::cuts();
        let plans = all_plans(&cuts, 3);
        assert_eq!(plans.len(), 5);
        assert_eq!(plans[0].unshuffled(3), 0);
        assert!(plans.last().unwrap().segments.is_empty());
        for n in 1..=8 {
            assert_eq!(big(all_plans(&cuts, n).len() as u64), p_prime_formula(&cuts, n).unwrap());
        }
    }

    #[test]
    fn cluster_examples() {
        let tb = ShufflingMethod::top_bottom();
        let c = vec![Cluster::new(1, vec![3, 4])];
        assert_eq!(perm_from_clusters(&tb, &c, 5).unwrap(), p("32415"));
        let c = vec![Cluster::new(1, vec![3, 4]), Cluster::new(5, vec![6])];
        assert_eq!(perm_from_clusters(&tb, &c, 6).unwrap(), p("324165"));
        assert!(matches!(
            perm_from_clusters(&tb, &c, 5),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            perm_from_clusters(&ShufflingMethod::cuts(), &[], 3),
            Err(Error::Precondition(_))
        ));
        for n in 1..=10 {
            assert_eq!(big(all_cluster_lists(n).len() as u64), fib(2 * n - 1));
        }
    }

    #[test]
    fn count_table() {
        let mut t = CountTable::new("cuts", "prime");
        t.push(1, big(1), Provenance::Brute).unwrap();
        t.push(2, big(2), Provenance::Formula).unwrap();
        assert!(t.push(4, big(12), Provenance::Formula).is_err());
        assert_eq!(t.to_csv(), "n,count,provenance\n1,1,brute\n2,2,formula\n");
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains(r#"{"n":2,"count":"2","provenance":"formula"}"#), "{json}");
    }

    #[test]
    fn growth_ratio() {
        assert!((av321sep_ratio(60) - 2.32).abs() < 0.01);
    }
}
