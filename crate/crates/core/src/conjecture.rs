//! Pop-unloading queues for the In-shuffle and Monge methods: single-pop
//! sets, the split recurrence for the counts, and the checks that make the
//! recurrence exact.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::device::{sortable_set, validate_iteration, DeviceVariant, EngineConfig, Iteration, Op};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::method::ShufflingMethod;
use crate::perm::{all_permutations, compose_slices, factorial, reduce_distinct, Permutation};
use crate::report::CheckReport;

/// Largest size accepted by the single-pop routines.
pub const DEFAULT_S1_LIMIT: usize = 20;
/// Largest size for the block-sum construction of the pop-sortable set.
pub const DEFAULT_BLOCK_SUM_LIMIT: usize = 14;
/// Largest size for which the recurrence has been run against the checks.
pub const RECURRENCE_LIMIT: usize = 19;

/// `σᵢ` acting on `[1, i]` and fixing `i+1..=n`.
pub fn tau(method: &ShufflingMethod, i: usize, n: usize) -> Result<Permutation> {
    if i < 2 || i > n {
        return Err(Error::Precondition(format!("tau needs 2 ≤ i ≤ n, got i = {i}, n = {n}")));
    }
    let sigma = method.single(i).ok_or_else(|| {
        Error::Precondition(format!(
            "tau needs a single-member family; {method} has {} members at size {i}",
            method.family(i).len()
        ))
    })?;
    let mut w = sigma.into_inner();
    w.extend(i as u8 + 1..=n as u8);
    Ok(Permutation::from_vec_unchecked(w))
}

fn taus(method: &ShufflingMethod, n: usize) -> Result<Vec<Vec<u8>>> {
    // Index b holds τ_b; entries 0 and 1 are unused.
    let mut out = vec![Vec::new(), Vec::new()];
    for b in 2..=n {
        out.push(tau(method, b, n)?.into_inner());
    }
    Ok(out)
}

/// Product `τ_{b₁} ∘ ⋯ ∘ τ_{b_v}` over the set bits `b` of `mask`, ascending.
fn product(taus: &[Vec<u8>], n: usize, mask: u64) -> Vec<u8> {
    let mut acc: Vec<u8> = (1..=n as u8).collect();
    let mut next = Vec::with_capacity(n);
    for (b, t) in taus.iter().enumerate().skip(2) {
        if mask & (1 << b) != 0 {
            next.clear();
            next.extend(t.iter().map(|&j| acc[j as usize - 1]));
            std::mem::swap(&mut acc, &mut next);
        }
    }
    acc
}

fn inverse_word(w: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; w.len()];
    for (i, &v) in w.iter().enumerate() {
        inv[v as usize - 1] = (i + 1) as u8;
    }
    inv
}

/// Permutations of size `n` sorted by the pop-unloading queue with a single
/// pop: the inverses of all products of `τ_b` over subsets of `[2, n]`.
/// Sorted lexicographically.
pub fn s1_set(method: &ShufflingMethod, n: usize) -> Result<Vec<Permutation>> {
    s1_set_with(method, n, DEFAULT_S1_LIMIT, Strategy::default())
}

pub fn s1_set_with(
    method: &ShufflingMethod,
    n: usize,
    limit: usize,
    strategy: Strategy,
) -> Result<Vec<Permutation>> {
    if n > limit {
        return Err(Error::LimitExceeded { what: "s1_set", n, limit });
    }
    let taus = taus(method, n)?;
    let subsets: u64 = 1 << n.saturating_sub(1);
    let chunk = 1u64 << 12;
    let starts: Vec<u64> = (0..subsets.div_ceil(chunk)).map(|c| c * chunk).collect();
    let parts = exec::map(strategy, &starts, |&start| {
        let mut local = BTreeSet::new();
        for s in start..(start + chunk).min(subsets) {
            // Bit k of s selects size k + 2.
            let prod = product(&taus, n, s << 2);
            local.insert(inverse_word(&prod));
        }
        local
    });
    let mut all = BTreeSet::new();
    for p in parts {
        all.extend(p);
    }
    Ok(all.into_iter().map(Permutation::from_vec_unchecked).collect())
}

/// `a₁ = 2, a₂ = 4, aₖ = 3aₖ₋₂`, shifted so that `p1_expected(n) = a_{n−2}`
/// for `n ≥ 3`, with `p1_expected(1) = 1` and `p1_expected(2) = 2`.
pub fn p1_expected(n: usize) -> BigUint {
    match n {
        0 | 1 => BigUint::one(),
        2 => BigUint::from(2u32),
        3 => BigUint::from(2u32),
        4 => BigUint::from(4u32),
        _ => BigUint::from(3u32) * p1_expected(n - 2),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct P1Row {
    pub n: usize,
    pub in_shuffle: usize,
    pub monge: usize,
    #[serde(serialize_with = "big_str")]
    pub expected: BigUint,
    pub holds: bool,
}

/// Single-pop counts agree for both methods and follow `a_{n−2}`; for small
/// `n` the sets are also compared with a direct single-pop device search.
pub fn check_p1_equality(n_max: usize, cfg: &EngineConfig) -> Result<(CheckReport, Vec<P1Row>)> {
    let insh = ShufflingMethod::in_shuffle();
    let monge = ShufflingMethod::monge();
    let mut report = CheckReport::new(format!("single-pop counts, 3 ≤ n ≤ {n_max}"));
    let mut rows = Vec::new();
    for n in 3..=n_max {
        let a = s1_set_with(&insh, n, DEFAULT_S1_LIMIT, cfg.strategy)?;
        let b = s1_set_with(&monge, n, DEFAULT_S1_LIMIT, cfg.strategy)?;
        let expected = p1_expected(n);
        let holds = BigUint::from(a.len()) == expected && BigUint::from(b.len()) == expected;
        report.tick();
        if !holds {
            report.fail(format!("n = {n}: in-shuffle {}, monge {}, expected {expected}", a.len(), b.len()));
        }
        if n <= 4.min(cfg.limit) {
            for (m, set) in [(&insh, &a), (&monge, &b)] {
                let direct = single_pop_sortable(m, n, cfg)?;
                if &direct != set {
                    report.fail(format!("n = {n}: {m} single-pop set differs from device search"));
                }
            }
        }
        rows.push(P1Row {
            n,
            in_shuffle: a.len(),
            monge: b.len(),
            expected,
            holds,
        });
    }
    Ok((report, rows))
}

/// Single-pop sortable permutations by device search.
pub fn single_pop_sortable(
    method: &ShufflingMethod,
    n: usize,
    cfg: &EngineConfig,
) -> Result<Vec<Permutation>> {
    cfg.check_limit("single_pop_sortable", n)?;
    let sorter = crate::device::Sorter::new(method, DeviceVariant::PopUnloadsAll)
        .with_budget(cfg.budget)
        .single_pop(true);
    let all = all_permutations(n);
    let keep = exec::try_map(cfg.strategy, &all, |p| sorter.is_sortable(p))?;
    Ok(all.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect())
}

/// Whether `method` is pop-simple at size `n`, with a witness when not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopSimple {
    pub method: String,
    pub n: usize,
    pub holds: bool,
    pub counterexample: Option<Permutation>,
}

/// Pop-simple at `n`: no single-pop permutation not ending in `n` splits as
/// `π′ ⊕ π″` with `|π′|, |π″| ≥ 2` and `π″` itself single-pop sortable.
pub fn is_pop_simple(method: &ShufflingMethod, n: usize) -> Result<PopSimple> {
    let sets: Vec<HashSet<Permutation>> = (0..=n)
        .map(|k| s1_set(method, k).map(|v| v.into_iter().collect()))
        .collect::<Result<_>>()?;
    let mut counterexample = None;
    let mut members: Vec<&Permutation> = sets[n].iter().collect();
    members.sort();
    'outer: for pi in members {
        if n == 0 || pi.at(n) as usize == n {
            continue;
        }
        for j in pi.sum_split_points() {
            if j >= 2 && n - j >= 2 {
                let tail = reduce_distinct(&pi.as_slice()[j..]);
                if sets[n - j].contains(&tail) {
                    counterexample = Some(pi.clone());
                    break 'outer;
                }
            }
        }
    }
    Ok(PopSimple {
        method: method.name().to_string(),
        n,
        holds: counterexample.is_none(),
        counterexample,
    })
}

/// `A_k`: single-pop permutations of odd size `k` whose iteration shuffles
/// at both sizes `k − 1` and `k`.
fn last_pair_set(taus: &[Vec<u8>], k: usize) -> HashSet<Vec<u8>> {
    let base_mask: u64 = (1 << (k - 1)) | (1 << k);
    let mut out = HashSet::new();
    for s in 0..(1u64 << (k - 3)) {
        let prod = product(taus, k, (s << 2) | base_mask);
        out.insert(inverse_word(&prod));
    }
    out
}

/// No permutation is counted twice across different odd sizes of the last
/// popped block: for odd `5 ≤ k < k′ ≤ n`, no member of `A_{k′}` ends in a
/// block of the `k` largest values whose reduction lies in `A_k`.
pub fn check_ending_uniqueness(method: &ShufflingMethod, n: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("ending uniqueness for {method}, n = {n}"));
    if n > DEFAULT_S1_LIMIT {
        return Err(Error::LimitExceeded { what: "check_ending_uniqueness", n, limit: DEFAULT_S1_LIMIT });
    }
    let odd: Vec<usize> = (5..=n).filter(|k| k % 2 == 1).collect();
    let sets: Vec<(usize, HashSet<Vec<u8>>)> = odd
        .iter()
        .map(|&k| Ok((k, last_pair_set(&taus(method, k)?, k))))
        .collect::<Result<_>>()?;
    for (i, (k, small)) in sets.iter().enumerate() {
        for (k2, large) in &sets[i + 1..] {
            let mut members: Vec<&Vec<u8>> = large.iter().collect();
            members.sort();
            for a in members {
                report.tick();
                let suffix = &a[k2 - k..];
                if suffix.iter().all(|&v| v as usize > k2 - k)
                    && small.contains(reduce_distinct(suffix).as_slice())
                {
                    report.fail(format!(
                        "{} (size {k2}) ends in a member of the size-{k} set",
                        Permutation::from_vec_unchecked(a.clone())
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// `(p′ₙ, p″ₙ)` from the tables `p1[k] = |S¹_k|` and `p[k]` for `k < n`
/// (`p[0] = 1`):
///
/// * `p′ₙ = p_{n−1} + (1/3)·Σ_{j=2}^{⌊(n−1)/2⌋} p¹_{2j+1}·p_{n−2j−1}`
/// * `p″ₙ = Σ_{j=1}^{⌊n/2⌋} (p¹_{2j} − p¹_{2j−1})·p_{n−2j}`
///
/// `p¹_{2j} − p¹_{2j−1}` counts the single-pop permutations of size `2j`
/// that do not end in `2j`, which are the only ones that can form the last
/// block of a permutation not ending in its maximum.
pub fn p_split_recurrence(
    n: usize,
    p1: &[BigUint],
    p: &[BigUint],
) -> Result<(BigUint, BigUint)> {
    if n == 0 {
        return Err(Error::Precondition("the split recurrence starts at n = 1".into()));
    }
    let get = |t: &[BigUint], k: usize| t.get(k).cloned().ok_or(Error::MissingTableEntry(k));
    let mut third = BigUint::zero();
    for j in 2..=(n - 1) / 2 {
        third += get(p1, 2 * j + 1)? * get(p, n - 2 * j - 1)?;
    }
    let three = BigUint::from(3u32);
    if !(&third % &three).is_zero() {
        return Err(Error::Indivisible {
            what: format!("odd-block sum for n = {n}"),
            value: third.to_string(),
            divisor: 3,
        });
    }
    let p_prime = get(p, n - 1)? + third / three;
    let mut p_double = BigUint::zero();
    for j in 1..=n / 2 {
        let not_ending = get(p1, 2 * j)? - get(p1, 2 * j - 1)?;
        p_double += not_ending * get(p, n - 2 * j)?;
    }
    Ok((p_prime, p_double))
}

/// Pop-sortable permutations of size `n` as direct sums of single-pop
/// sortable blocks. Sorted lexicographically.
pub fn block_sum_set(method: &ShufflingMethod, n: usize, limit: usize) -> Result<Vec<Permutation>> {
    if n > limit {
        return Err(Error::LimitExceeded { what: "block_sum_set", n, limit });
    }
    let blocks: Vec<Vec<Permutation>> = (0..=n)
        .map(|k| if k == 0 { Ok(Vec::new()) } else { s1_set(method, k) })
        .collect::<Result<_>>()?;
    let mut levels: Vec<HashSet<Permutation>> = vec![HashSet::from([Permutation::empty()])];
    for m in 1..=n {
        let mut level = HashSet::new();
        for k in 1..=m {
            for head in &levels[m - k] {
                for b in &blocks[k] {
                    level.insert(head.direct_sum(b));
                }
            }
        }
        levels.push(level);
    }
    let mut out: Vec<Permutation> = levels.swap_remove(n).into_iter().collect();
    out.sort();
    Ok(out)
}

fn big_str<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// How a row's counts were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exhaustive device search over `Sₙ`.
    Brute,
    /// Direct sums of single-pop blocks.
    BlockSum,
    /// Split recurrence; brute force for `n ≤ 4`.
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodCounts {
    #[serde(serialize_with = "big_str")]
    pub p1: BigUint,
    #[serde(serialize_with = "big_str")]
    pub p_prime: BigUint,
    #[serde(serialize_with = "big_str")]
    pub p_double_prime: BigUint,
    #[serde(serialize_with = "big_str")]
    pub p: BigUint,
    /// Both condition checks passed, so the recurrence value is exact.
    pub exact: bool,
    pub pop_simple: bool,
    pub ending_unique: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceRow {
    pub n: usize,
    pub in_shuffle: MethodCounts,
    pub monge: MethodCounts,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub schema: u32,
    pub mode: Mode,
    pub n_max: usize,
    pub rows: Vec<EquivalenceRow>,
    /// Sizes where the counts differ.
    pub differ: Vec<usize>,
    /// Sizes where a condition check failed, so a recurrence value is only
    /// an upper bound.
    pub unverified: Vec<usize>,
    pub holds: bool,
}

impl EquivalenceReport {
    /// `n,method,p1,p_prime,p_double_prime,p,exact`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,method,p1,p_prime,p_double_prime,p,exact\n");
        for r in &self.rows {
            for (name, c) in [("in-shuffle", &r.in_shuffle), ("monge", &r.monge)] {
                s.push_str(&format!(
                    "{},{name},{},{},{},{},{}\n",
                    r.n, c.p1, c.p_prime, c.p_double_prime, c.p, c.exact
                ));
            }
        }
        s
    }
}

fn counts_from_set(set: &[Permutation], n: usize, p1: BigUint) -> MethodCounts {
    let ending = set.iter().filter(|p| n == 0 || p.at(n) as usize == n).count();
    MethodCounts {
        p1,
        p_prime: BigUint::from(ending),
        p_double_prime: BigUint::from(set.len() - ending),
        p: BigUint::from(set.len()),
        exact: true,
        pop_simple: true,
        ending_unique: true,
    }
}

/// Compares the pop-sortable counts of In-shuffle and Monge for
/// `1 ≤ n ≤ n_max`.
pub fn verify_conjecture(mode: Mode, n_max: usize, cfg: &EngineConfig) -> Result<EquivalenceReport> {
    let insh = ShufflingMethod::in_shuffle();
    let monge = ShufflingMethod::monge();
    let methods = [&insh, &monge];
    let mut rows = Vec::new();
    match mode {
        Mode::Brute | Mode::BlockSum => {
            for n in 1..=n_max {
                let mut counts = Vec::new();
                for m in methods {
                    let set = if mode == Mode::Brute {
                        sortable_set(n, m, DeviceVariant::PopUnloadsAll, cfg)?
                    } else {
                        block_sum_set(m, n, DEFAULT_BLOCK_SUM_LIMIT)?
                    };
                    let p1 = BigUint::from(s1_set_with(m, n, DEFAULT_S1_LIMIT, cfg.strategy)?.len());
                    counts.push(counts_from_set(&set, n, p1));
                }
                let monge_c = counts.pop().expect("two methods");
                let insh_c = counts.pop().expect("two methods");
                rows.push(EquivalenceRow {
                    n,
                    equal: insh_c.p == monge_c.p,
                    in_shuffle: insh_c,
                    monge: monge_c,
                });
            }
        }
        Mode::Recurrence => {
            if n_max > RECURRENCE_LIMIT {
                return Err(Error::LimitExceeded { what: "recurrence mode", n: n_max, limit: RECURRENCE_LIMIT });
            }
            let base_n = 4.min(n_max);
            let mut per_method: Vec<Vec<MethodCounts>> = Vec::new();
            for m in methods {
                let mut p1 = vec![BigUint::one()];
                for k in 1..=n_max {
                    p1.push(BigUint::from(s1_set_with(m, k, DEFAULT_S1_LIMIT, cfg.strategy)?.len()));
                }
                let mut p = vec![BigUint::one()];
                let mut col = Vec::new();
                for n in 1..=n_max {
                    let pop_simple = is_pop_simple(m, n)?.holds;
                    let ending_unique = check_ending_uniqueness(m, n)?.holds;
                    let c = if n <= base_n {
                        let set = sortable_set(n, m, DeviceVariant::PopUnloadsAll, cfg)?;
                        MethodCounts {
                            pop_simple,
                            ending_unique,
                            ..counts_from_set(&set, n, p1[n].clone())
                        }
                    } else {
                        let (pp, pd) = p_split_recurrence(n, &p1, &p)?;
                        MethodCounts {
                            p1: p1[n].clone(),
                            p: &pp + &pd,
                            p_prime: pp,
                            p_double_prime: pd,
                            exact: pop_simple && ending_unique,
                            pop_simple,
                            ending_unique,
                        }
                    };
                    p.push(c.p.clone());
                    col.push(c);
                }
                per_method.push(col);
            }
            let monge_col = per_method.pop().expect("two methods");
            let insh_col = per_method.pop().expect("two methods");
            for (i, (a, b)) in insh_col.into_iter().zip(monge_col).enumerate() {
                rows.push(EquivalenceRow {
                    n: i + 1,
                    equal: a.p == b.p,
                    in_shuffle: a,
                    monge: b,
                });
            }
        }
    }
    let differ: Vec<usize> = rows.iter().filter(|r| !r.equal).map(|r| r.n).collect();
    let unverified: Vec<usize> = rows
        .iter()
        .filter(|r| !(r.in_shuffle.exact && r.monge.exact))
        .map(|r| r.n)
        .collect();
    Ok(EquivalenceReport {
        schema: 1,
        mode,
        n_max,
        holds: differ.is_empty() && unverified.is_empty(),
        rows,
        differ,
        unverified,
    })
}

/// A single-pop iteration sorting `pi` under the pop-unloading queue, built
/// recursively from the last input symbol. Needs, for each size `k ≥ 2`,
/// an inverse family member ending in each `j < k`.
pub fn cutsall_witness(method: &ShufflingMethod, pi: &Permutation) -> Result<Iteration> {
    let mut ops = cutsall_ops(method, pi.as_slice())?;
    if !pi.is_empty() {
        ops.push(Op::PopAll);
    }
    Ok(Iteration::new(pi.clone(), ops))
}

/// Operations leaving the device holding `1..=n` in order, without popping.
fn cutsall_ops(method: &ShufflingMethod, pi: &[u8]) -> Result<Vec<Op>> {
    let n = pi.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (head, x) = (&pi[..n - 1], pi[n - 1]);
    if x as usize == n {
        let mut ops = cutsall_ops(method, head)?;
        ops.push(Op::Push);
        return Ok(ops);
    }
    let sigma = method
        .inverse_family(n)
        .into_iter()
        .find(|s| s.at(n) == x)
        .ok_or_else(|| {
            Error::Precondition(format!("no inverse member of {method} at size {n} ends in {x}"))
        })?;
    let sigma_head = &sigma.as_slice()[..n - 1];
    // τ_i is the position of head[i] within sigma_head.
    let mut pos = vec![0u8; n + 1];
    for (i, &v) in sigma_head.iter().enumerate() {
        pos[v as usize] = (i + 1) as u8;
    }
    let tau: Vec<u8> = head.iter().map(|&v| pos[v as usize]).collect();
    let mut ops = cutsall_ops(method, &tau)?;
    ops.push(Op::Push);
    ops.push(Op::Shuffle(sigma.inverse()));
    Ok(ops)
}

/// Every permutation of size `n ≤ min(n_max, cfg.limit)` is pop-sortable,
/// each by the single-pop construction.
pub fn verify_cutsall(method: &ShufflingMethod, n_max: usize, cfg: &EngineConfig) -> Result<CheckReport> {
    if !method.satisfies_ending_condition(n_max) {
        return Err(Error::Precondition(format!(
            "{method} lacks an inverse member ending in some j < k for some k ≤ {n_max}"
        )));
    }
    let top = n_max.min(cfg.limit);
    let mut report = CheckReport::new(format!("{method} pop queue sorts all of Sₙ, n ≤ {top}"));
    for n in 0..=top {
        let sortable = sortable_set(n, method, DeviceVariant::PopUnloadsAll, cfg)?;
        if sortable.len() != factorial(n) {
            let all = all_permutations(n);
            let missing = all.iter().find(|p| sortable.binary_search(p).is_err());
            report.fail(format!("n = {n}: {} not sortable", missing.map(|p| p.to_string()).unwrap_or_default()));
        }
        let all = all_permutations(n);
        let parts = exec::map(cfg.strategy, &all, |pi| {
            let mut r = CheckReport::new("");
            r.tick();
            let ok = cutsall_witness(method, pi).and_then(|it| {
                let end = validate_iteration(&it, DeviceVariant::PopUnloadsAll, method)?;
                Ok(it.pop_count() == usize::from(n > 0) && end.output.as_slice() == Permutation::identity(n).as_slice())
            });
            match ok {
                Ok(true) => {}
                Ok(false) => r.fail(format!("{pi}: construction does not sort with one pop")),
                Err(e) => r.fail(format!("{pi}: {e}")),
            }
            r
        });
        for r in parts {
            report.merge(r);
        }
    }
    Ok(report)
}

/// `compose` on raw words for callers that check the sorting condition.
pub fn sorts_by_product(pi: &Permutation, product_word: &[u8]) -> bool {
    compose_slices(pi.as_slice(), product_word)
        .map(|w| w.iter().enumerate().all(|(i, &v)| v as usize == i + 1))
        .unwrap_or(false)
}
