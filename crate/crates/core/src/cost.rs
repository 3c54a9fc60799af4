//! Sorting cost under repeated passes through the cut queue that unloads
//! after every shuffle.
//!
//! `cost(π)` is the least `m` such that `m` chained passes can turn `π` into
//! the identity. A pass may shuffle nothing, so reachability is reflexive.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::device::{family_words, for_each_segment_image, DeviceVariant, EngineConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::method::ShufflingMethod;
use crate::perm::{all_permutations, factorial, Permutation};
use crate::report::CheckReport;

pub const DEFAULT_COST_LIMIT: usize = 9;

const UNSEEN: u8 = u8::MAX;

/// A cost and one optimal chain of pass outputs ending in the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostResult {
    pub value: usize,
    /// `π⁽¹⁾, …, idₙ`: one entry per pass, so `witness.len() == value`.
    pub witness: Vec<Permutation>,
}

/// Cost computations for one method; cuts unless stated otherwise.
#[derive(Debug, Clone)]
pub struct CostEngine {
    method: ShufflingMethod,
    /// Largest size accepted by [`CostEngine::cost`].
    pub cost_limit: usize,
    /// Largest size accepted by the sweeps over `Sₙ`.
    pub sweep_limit: usize,
    pub strategy: Strategy,
}

impl Default for CostEngine {
    fn default() -> Self {
        CostEngine::new(&ShufflingMethod::cuts())
    }
}

impl CostEngine {
    pub fn new(method: &ShufflingMethod) -> Self {
        let defaults = EngineConfig::default();
        CostEngine {
            method: method.clone(),
            cost_limit: DEFAULT_COST_LIMIT,
            sweep_limit: defaults.limit,
            strategy: defaults.strategy,
        }
    }

    pub fn with_limits(mut self, cost_limit: usize, sweep_limit: usize) -> Self {
        self.cost_limit = cost_limit;
        self.sweep_limit = sweep_limit;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn method(&self) -> &ShufflingMethod {
        &self.method
    }

    fn check(&self, what: &'static str, n: usize, limit: usize) -> Result<()> {
        if n > limit {
            return Err(Error::LimitExceeded { what, n, limit });
        }
        Ok(())
    }

    /// Breadth-first search over pass outputs from `pi`.
    pub fn cost(&self, pi: &Permutation) -> Result<CostResult> {
        let n = pi.len();
        self.check("cost", n, self.cost_limit)?;
        if pi.is_identity() {
            return Ok(CostResult {
                value: 0,
                witness: Vec::new(),
            });
        }
        let families = family_words(&self.method, n, false);
        let target: Vec<u8> = Permutation::identity(n).into_inner();
        let mut parent: HashMap<Vec<u8>, Vec<u8>> = HashMap::new();
        parent.insert(pi.as_slice().to_vec(), Vec::new());
        let mut queue = VecDeque::from([pi.as_slice().to_vec()]);
        while let Some(cur) = queue.pop_front() {
            let mut found = false;
            for_each_segment_image(&cur, &families, &mut |img| {
                if found || parent.contains_key(img) {
                    return;
                }
                parent.insert(img.to_vec(), cur.clone());
                if img == target.as_slice() {
                    found = true;
                } else {
                    queue.push_back(img.to_vec());
                }
            });
            if found {
                let mut chain = vec![target.clone()];
                let mut at = cur;
                while at != pi.as_slice() {
                    let prev = parent[&at].clone();
                    chain.push(at);
                    at = prev;
                }
                chain.reverse();
                let witness: Vec<Permutation> =
                    chain.into_iter().map(Permutation::from_vec_unchecked).collect();
                return Ok(CostResult {
                    value: witness.len(),
                    witness,
                });
            }
        }
        Err(Error::Precondition(format!(
            "{pi} cannot be sorted by repeated passes of {}",
            self.method
        )))
    }

    /// Costs of every permutation of size `n`, by breadth-first search
    /// backwards from the identity.
    pub fn cost_table(&self, n: usize) -> Result<CostTable> {
        self.check("cost table", n, self.sweep_limit)?;
        let total = factorial(n);
        let inverse = family_words(&self.method, n, true);
        let mut dist = vec![UNSEEN; total];
        let id = Permutation::identity(n);
        dist[id.rank()] = 0;
        let mut frontier = vec![id.rank()];
        let mut level = 0u8;
        while !frontier.is_empty() {
            let chunks: Vec<&[usize]> = frontier.chunks(512).collect();
            let found = exec::map(self.strategy, &chunks, |chunk| {
                let mut out = Vec::new();
                for &r in *chunk {
                    let word = Permutation::unrank(n, r).into_inner();
                    for_each_segment_image(&word, &inverse, &mut |img| {
                        let rank = Permutation::from_vec_unchecked(img.to_vec()).rank();
                        if dist[rank] == UNSEEN {
                            out.push(rank);
                        }
                    });
                }
                out.sort_unstable();
                out.dedup();
                out
            });
            level += 1;
            let mut next = Vec::new();
            for rank in found.into_iter().flatten() {
                if dist[rank] == UNSEEN {
                    dist[rank] = level;
                    next.push(rank);
                }
            }
            next.sort_unstable();
            frontier = next;
        }
        if let Some(r) = dist.iter().position(|&d| d == UNSEEN) {
            return Err(Error::Precondition(format!(
                "{} cannot be sorted by repeated passes of {}",
                Permutation::unrank(n, r),
                self.method
            )));
        }
        Ok(CostTable { n, dist })
    }

    /// `M(n)`.
    pub fn max_cost(&self, n: usize) -> Result<usize> {
        Ok(self.cost_table(n)?.max())
    }

    /// `⌈log₂ n⌉ ≤ M(n) ≤ ⌈n/2⌉`.
    pub fn check_bounds(&self, n: usize) -> Result<BoundsReport> {
        let table = self.cost_table(n)?;
        let max = table.max();
        let lower = ceil_log2(n);
        let upper = n.div_ceil(2);
        let maximizers = table.maximizers();
        Ok(BoundsReport {
            n,
            lower,
            max_cost: max,
            upper,
            holds: n < 2 || (lower <= max && max <= upper),
            maximizer_count: maximizers.len(),
            maximizers: maximizers.into_iter().take(MAXIMIZER_SAMPLE).collect(),
        })
    }

    /// `cost(π) = cost(π*)` over `Sₙ`.
    pub fn check_star_symmetry(&self, n: usize) -> Result<CheckReport> {
        let table = self.cost_table(n)?;
        let mut report = CheckReport::new(format!("star symmetry, n = {n}"));
        for pi in all_permutations(n) {
            report.tick();
            let (a, b) = (table.cost_of(&pi), table.cost_of(&pi.star()));
            if a != b {
                report.fail(format!("cost({pi}) = {a}, cost({}) = {b}", pi.star()));
            }
        }
        Ok(report)
    }

    /// `cost(π) ≥ cost(q)` for each listed pair where `π` contains `q`.
    /// Pairs without containment are skipped.
    pub fn check_pattern_monotonicity(
        &self,
        pairs: &[(Permutation, Permutation)],
    ) -> Result<CheckReport> {
        let mut report = CheckReport::new("pattern monotonicity");
        for (pi, q) in pairs {
            if !pi.contains(q) {
                continue;
            }
            report.tick();
            let (a, b) = (self.cost(pi)?.value, self.cost(q)?.value);
            if a < b {
                report.fail(format!("cost({pi}) = {a} < cost({q}) = {b}"));
            }
        }
        Ok(report)
    }

    /// Monotonicity over every `π` with `|π| ≤ max_pi` and every pattern
    /// `q` with `|q| ≤ max_q` that it contains.
    pub fn check_pattern_monotonicity_exhaustive(
        &self,
        max_pi: usize,
        max_q: usize,
    ) -> Result<CheckReport> {
        let tables = (0..=max_pi)
            .map(|n| self.cost_table(n))
            .collect::<Result<Vec<_>>>()?;
        let mut report =
            CheckReport::new(format!("pattern monotonicity, |π| ≤ {max_pi}, |q| ≤ {max_q}"));
        for n in 0..=max_pi {
            let patterns: Vec<Permutation> =
                (0..=max_q.min(n)).flat_map(all_permutations).collect();
            let perms = all_permutations(n);
            let parts = exec::map(self.strategy, &perms, |pi| {
                let mut r = CheckReport::new("");
                let a = tables[n].cost_of(pi);
                for q in &patterns {
                    if pi.contains(q) {
                        r.tick();
                        let b = tables[q.len()].cost_of(q);
                        if a < b {
                            r.fail(format!("cost({pi}) = {a} < cost({q}) = {b}"));
                        }
                    }
                }
                r
            });
            for r in parts {
                report.merge(r);
            }
        }
        Ok(report)
    }

    /// Every single-pass output of `n…1` has a decreasing subsequence of
    /// length `⌈n/2⌉`.
    pub fn check_decreasing_subsequence(&self, n: usize) -> Result<CheckReport> {
        let cfg = EngineConfig::default().with_limit(self.sweep_limit);
        let outputs = crate::device::output_set(
            &Permutation::reverse_identity(n),
            &self.method,
            DeviceVariant::UnloadAfterShuffle,
            &cfg,
        )?;
        let need = n.div_ceil(2);
        let mut report = CheckReport::new(format!("decreasing subsequence ≥ {need}, n = {n}"));
        for out in outputs {
            report.tick();
            if out.longest_decreasing() < need {
                report.fail(format!("{out} has longest decreasing subsequence {}", out.longest_decreasing()));
            }
        }
        Ok(report)
    }

    /// Rows `(n, ⌈log₂ n⌉, M(n))` for `2 ≤ n ≤ n_max`.
    pub fn probe_max_vs_log(&self, n_max: usize) -> Result<Vec<ProbeRow>> {
        (2..=n_max)
            .map(|n| {
                let m = self.max_cost(n)?;
                let log2 = ceil_log2(n);
                Ok(ProbeRow {
                    n,
                    ceil_log2: log2,
                    max_cost: m,
                    exceeds_log: m > log2,
                })
            })
            .collect()
    }
}

const MAXIMIZER_SAMPLE: usize = 10;

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Costs indexed by lexicographic rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    n: usize,
    dist: Vec<u8>,
}

impl CostTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cost_of(&self, pi: &Permutation) -> usize {
        assert_eq!(pi.len(), self.n, "size mismatch");
        self.dist[pi.rank()] as usize
    }

    pub fn max(&self) -> usize {
        self.dist.iter().copied().max().unwrap_or(0) as usize
    }

    /// Permutations attaining the maximum, in lexicographic order.
    pub fn maximizers(&self) -> Vec<Permutation> {
        let m = self.max() as u8;
        self.dist
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == m)
            .map(|(r, _)| Permutation::unrank(self.n, r))
            .collect()
    }

    /// `histogram[c]` permutations have cost `c`.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.max() + 1];
        for &d in &self.dist {
            h[d as usize] += 1;
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub lower: usize,
    pub max_cost: usize,
    pub upper: usize,
    pub holds: bool,
    pub maximizer_count: usize,
    /// The first few maximizers in lexicographic order.
    pub maximizers: Vec<Permutation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    pub ceil_log2: usize,
    pub max_cost: usize,
    pub exceeds_log: bool,
}
