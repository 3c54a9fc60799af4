//! Shuffle queues: configurations, operations, replay, and sortability search.
//!
//! A configuration is a triple `(input, device, output)` of words that
//! partition `[n]`. `push` moves the first input symbol to the back of the
//! device, `pop` moves the front of the device to the output, and
//! `shuffle σ` rearranges the device word `w` into `compose(w, σ)`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::exec::{self, Strategy};
use crate::method::ShufflingMethod;
use crate::perm::{all_permutations, compose_into, Permutation, Word};

pub const DEFAULT_LIMIT: usize = 8;
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// The three kinds of shuffle queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviceVariant {
    /// Plain shuffle queue.
    Unrestricted,
    /// Every shuffle is followed at once by unloading the whole device.
    /// `Shuffle(σ)` denotes the combined transition.
    UnloadAfterShuffle,
    /// Every pop unloads the whole device.
    PopUnloadsAll,
}

impl DeviceVariant {
    pub const ALL: [DeviceVariant; 3] = [
        DeviceVariant::Unrestricted,
        DeviceVariant::UnloadAfterShuffle,
        DeviceVariant::PopUnloadsAll,
    ];

    /// Short name used on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            DeviceVariant::Unrestricted => "plain",
            DeviceVariant::UnloadAfterShuffle => "prime",
            DeviceVariant::PopUnloadsAll => "pop",
        }
    }
}

impl fmt::Display for DeviceVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for DeviceVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" | "unrestricted" => Ok(DeviceVariant::Unrestricted),
            "prime" | "unload-after-shuffle" => Ok(DeviceVariant::UnloadAfterShuffle),
            "pop" | "pop-unloads-all" => Ok(DeviceVariant::PopUnloadsAll),
            _ => Err(Error::Parse {
                what: "device variant",
                input: s.to_string(),
                reason: "expected plain, prime or pop".into(),
            }),
        }
    }
}

/// One device operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Push,
    Pop,
    PopAll,
    Shuffle(Permutation),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Push => f.write_str("push"),
            Op::Pop => f.write_str("pop"),
            Op::PopAll => f.write_str("popall"),
            Op::Shuffle(s) => write!(f, "shuffle {s}"),
        }
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (head, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        match head.to_ascii_lowercase().as_str() {
            "push" if rest.trim().is_empty() => Ok(Op::Push),
            "pop" if rest.trim().is_empty() => Ok(Op::Pop),
            "popall" if rest.trim().is_empty() => Ok(Op::PopAll),
            "shuffle" => Ok(Op::Shuffle(rest.parse()?)),
            _ => Err(Error::Parse {
                what: "operation",
                input: s.to_string(),
                reason: "expected push, pop, popall or shuffle <perm>".into(),
            }),
        }
    }
}

/// The state `(input, device, output)` of a device.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub input: Word,
    pub device: Word,
    pub output: Word,
}

impl Configuration {
    /// `(π, ε, ε)`.
    pub fn start(pi: &Permutation) -> Self {
        Configuration {
            input: pi.clone().into(),
            device: Word::empty(),
            output: Word::empty(),
        }
    }

    pub fn new(input: Word, device: Word, output: Word) -> Result<Self> {
        let cfg = Configuration {
            input,
            device,
            output,
        };
        let n = cfg.input.len() + cfg.device.len() + cfg.output.len();
        if !cfg.is_partition_of(n) {
            return Err(Error::InvalidWord(format!(
                "{cfg} does not partition [1, {n}]"
            )));
        }
        Ok(cfg)
    }

    /// Input and device are both empty.
    pub fn is_final(&self) -> bool {
        self.input.is_empty() && self.device.is_empty()
    }

    /// The three words are disjoint and together hold exactly `1..=n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n + 1];
        let words = [&self.input, &self.device, &self.output];
        let mut total = 0;
        for w in words {
            for &v in w.as_slice() {
                let v = v as usize;
                if v == 0 || v > n || seen[v] {
                    return false;
                }
                seen[v] = true;
                total += 1;
            }
        }
        total == n
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &Word| {
            if w.is_empty() {
                "ε".to_string()
            } else {
                w.to_string()
            }
        };
        write!(
            f,
            "({}; {}; {})",
            show(&self.input),
            show(&self.device),
            show(&self.output)
        )
    }
}

/// An input permutation and the operations applied to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    pub input: Permutation,
    pub ops: Vec<Op>,
}

impl Iteration {
    pub fn new(input: Permutation, ops: Vec<Op>) -> Self {
        Iteration { input, ops }
    }

    /// One op per line.
    pub fn ops_text(&self) -> String {
        let mut s = String::new();
        for op in &self.ops {
            s.push_str(&op.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses the one-op-per-line format; blank lines and `#` comments are
    /// skipped.
    pub fn parse_ops(text: &str) -> Result<Vec<Op>> {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect()
    }

    pub fn pop_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, Op::Pop | Op::PopAll))
            .count()
    }

    pub fn shuffle_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Shuffle(_))).count()
    }
}

/// Applies a single operation. Rule violations are reported with index 0;
/// [`validate_iteration`] reports the real position.
pub fn apply_op(
    cfg: &Configuration,
    op: &Op,
    variant: DeviceVariant,
    method: &ShufflingMethod,
    last_was_shuffle: bool,
) -> Result<Configuration> {
    let mut next = cfg.clone();
    step(&mut next, op, variant, method, last_was_shuffle, 0)?;
    Ok(next)
}

fn step(
    cfg: &mut Configuration,
    op: &Op,
    variant: DeviceVariant,
    method: &ShufflingMethod,
    last_was_shuffle: bool,
    index: usize,
) -> Result<()> {
    let violation = |kind| Err(Error::RuleViolation { index, kind });
    let unload = |cfg: &mut Configuration| {
        let dev = std::mem::take(cfg.device.vec_mut());
        cfg.output.vec_mut().extend(dev);
    };
    match op {
        Op::Push => {
            if cfg.input.is_empty() {
                return violation(Violation::PushEmptyInput);
            }
            let x = cfg.input.vec_mut().remove(0);
            cfg.device.vec_mut().push(x);
        }
        Op::Pop | Op::PopAll => {
            if *op == Op::PopAll && variant != DeviceVariant::PopUnloadsAll {
                return violation(Violation::PopAllNotAllowed);
            }
            if cfg.device.is_empty() {
                return violation(Violation::PopEmptyDevice);
            }
            if variant == DeviceVariant::PopUnloadsAll {
                unload(cfg);
            } else {
                let x = cfg.device.vec_mut().remove(0);
                cfg.output.vec_mut().push(x);
            }
        }
        Op::Shuffle(sigma) => {
            if last_was_shuffle {
                return violation(Violation::ConsecutiveShuffle);
            }
            let m = cfg.device.len();
            if m < 2 {
                return violation(Violation::ShuffleTooSmall);
            }
            if sigma.len() != m || !method.contains(sigma) {
                return violation(Violation::ShuffleNotInFamily);
            }
            let mut out = Vec::with_capacity(m);
            compose_into(cfg.device.as_slice(), sigma.as_slice(), &mut out);
            *cfg.device.vec_mut() = out;
            if variant == DeviceVariant::UnloadAfterShuffle {
                unload(cfg);
            }
        }
    }
    Ok(())
}

/// Replays `it` from `(π, ε, ε)` and returns the final configuration, which
/// must be `(ε, ε, out)`.
pub fn validate_iteration(
    it: &Iteration,
    variant: DeviceVariant,
    method: &ShufflingMethod,
) -> Result<Configuration> {
    let n = it.input.len();
    let mut cfg = Configuration::start(&it.input);
    let mut last = false;
    for (index, op) in it.ops.iter().enumerate() {
        step(&mut cfg, op, variant, method, last, index)?;
        if !cfg.is_partition_of(n) {
            return Err(Error::InvalidWord(format!(
                "configuration {cfg} after operation {index} does not partition [1, {n}]"
            )));
        }
        last = matches!(op, Op::Shuffle(_));
    }
    if !cfg.is_final() {
        return Err(Error::IncompleteIteration(cfg.to_string()));
    }
    Ok(cfg)
}

/// Limits shared by the exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Largest `n` for sweeps over all of `Sₙ` and for output-set searches.
    pub limit: usize,
    /// Maximum number of memo entries a single search may create.
    pub budget: usize,
    pub strategy: Strategy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            limit: DEFAULT_LIMIT,
            budget: DEFAULT_BUDGET,
            strategy: Strategy::default(),
        }
    }
}

impl EngineConfig {
    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub(crate) fn check_limit(&self, what: &'static str, n: usize) -> Result<()> {
        if n > self.limit {
            return Err(Error::LimitExceeded {
                what,
                n,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// Sortability search for one method and variant.
#[derive(Debug, Clone)]
pub struct Sorter {
    method: ShufflingMethod,
    variant: DeviceVariant,
    budget: usize,
    single_pop: bool,
}

impl Sorter {
    pub fn new(method: &ShufflingMethod, variant: DeviceVariant) -> Self {
        Sorter {
            method: method.clone(),
            variant,
            budget: DEFAULT_BUDGET,
            single_pop: false,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Only accept iterations with exactly one pop. Meaningful for
    /// [`DeviceVariant::PopUnloadsAll`], where that pop empties the device.
    pub fn single_pop(mut self, yes: bool) -> Self {
        self.single_pop = yes;
        self
    }

    pub fn is_sortable(&self, pi: &Permutation) -> Result<bool> {
        Ok(self.run(pi)?.is_some())
    }

    /// A replayable iteration that sorts `pi`, if one exists.
    pub fn witness(&self, pi: &Permutation) -> Result<Option<Iteration>> {
        Ok(self.run(pi)?.map(|ops| Iteration::new(pi.clone(), ops)))
    }

    fn run(&self, pi: &Permutation) -> Result<Option<Vec<Op>>> {
        let n = pi.len();
        let mut search = Search {
            pi: pi.as_slice(),
            variant: self.variant,
            families: (0..=n).map(|m| self.method.family(m)).collect(),
            single_pop: self.single_pop,
            budget: self.budget,
            failed: HashSet::new(),
            path: Vec::new(),
        };
        let mut dev = Vec::with_capacity(n);
        if search.dfs(0, &mut dev, false)? {
            Ok(Some(search.path))
        } else {
            Ok(None)
        }
    }
}

struct Search<'a> {
    pi: &'a [u8],
    variant: DeviceVariant,
    families: Vec<Arc<[Permutation]>>,
    single_pop: bool,
    budget: usize,
    failed: HashSet<(u8, Vec<u8>, bool)>,
    path: Vec<Op>,
}

fn is_run(w: &[u8], first: u8) -> bool {
    w.iter().enumerate().all(|(k, &v)| v as usize == first as usize + k)
}

impl Search<'_> {
    /// `i` input symbols consumed, device word `dev`; the output so far is
    /// `1..expected`.
    fn dfs(&mut self, i: usize, dev: &mut Vec<u8>, last: bool) -> Result<bool> {
        let n = self.pi.len();
        if i == n && dev.is_empty() {
            return Ok(true);
        }
        let key = (i as u8, dev.clone(), last);
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let expected = (i - dev.len() + 1) as u8;

        match self.variant {
            DeviceVariant::PopUnloadsAll => {
                if !dev.is_empty() && (!self.single_pop || i == n) && is_run(dev, expected) {
                    let saved = std::mem::take(dev);
                    self.path.push(Op::PopAll);
                    if self.dfs(i, dev, false)? {
                        return Ok(true);
                    }
                    self.path.pop();
                    *dev = saved;
                }
            }
            _ => {
                if dev.first() == Some(&expected) {
                    let x = dev.remove(0);
                    self.path.push(Op::Pop);
                    if self.dfs(i, dev, false)? {
                        return Ok(true);
                    }
                    self.path.pop();
                    dev.insert(0, x);
                }
            }
        }

        if i < n {
            dev.push(self.pi[i]);
            self.path.push(Op::Push);
            if self.dfs(i + 1, dev, false)? {
                return Ok(true);
            }
            self.path.pop();
            dev.pop();
        }

        let m = dev.len();
        if !last && m >= 2 {
            let family = Arc::clone(&self.families[m]);
            let mut shuffled = Vec::with_capacity(m);
            for sigma in family.iter() {
                compose_into(dev, sigma.as_slice(), &mut shuffled);
                let found = if self.variant == DeviceVariant::UnloadAfterShuffle {
                    if !is_run(&shuffled, expected) {
                        continue;
                    }
                    let saved = std::mem::take(dev);
                    self.path.push(Op::Shuffle(sigma.clone()));
                    let found = self.dfs(i, dev, true)?;
                    *dev = saved;
                    found
                } else {
                    let saved = std::mem::replace(dev, shuffled.clone());
                    self.path.push(Op::Shuffle(sigma.clone()));
                    let found = self.dfs(i, dev, true)?;
                    *dev = saved;
                    found
                };
                if found {
                    return Ok(true);
                }
                self.path.pop();
            }
        }

        self.failed.insert(key);
        if self.failed.len() > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(false)
    }
}

pub fn is_sortable(
    pi: &Permutation,
    method: &ShufflingMethod,
    variant: DeviceVariant,
) -> Result<bool> {
    Sorter::new(method, variant).is_sortable(pi)
}

pub fn sorting_witness(
    pi: &Permutation,
    method: &ShufflingMethod,
    variant: DeviceVariant,
) -> Result<Option<Iteration>> {
    Sorter::new(method, variant).witness(pi)
}

/// All sortable permutations of size `n`, in lexicographic order.
pub fn sortable_set(
    n: usize,
    method: &ShufflingMethod,
    variant: DeviceVariant,
    cfg: &EngineConfig,
) -> Result<Vec<Permutation>> {
    cfg.check_limit("sortable_set", n)?;
    let sorter = Sorter::new(method, variant).with_budget(cfg.budget);
    let all = all_permutations(n);
    let keep = exec::try_map(cfg.strategy, &all, |pi| sorter.is_sortable(pi))?;
    Ok(all
        .into_iter()
        .zip(keep)
        .filter_map(|(pi, k)| k.then_some(pi))
        .collect())
}

/// Every final output reachable from `(π, ε, ε)`.
///
/// For [`DeviceVariant::UnloadAfterShuffle`] this uses the segment
/// description of the outputs: `π` with disjoint contiguous segments of
/// length at least 2 each rearranged by a family member.
pub fn output_set(
    pi: &Permutation,
    method: &ShufflingMethod,
    variant: DeviceVariant,
    cfg: &EngineConfig,
) -> Result<BTreeSet<Permutation>> {
    cfg.check_limit("output_set", pi.len())?;
    if variant != DeviceVariant::UnloadAfterShuffle {
        return output_set_exhaustive(pi, method, variant, cfg);
    }
    let families = family_words(method, pi.len(), false);
    let mut out = BTreeSet::new();
    for_each_segment_image(pi.as_slice(), &families, &mut |w| {
        out.insert(Permutation::from_vec_unchecked(w.to_vec()));
    });
    Ok(out)
}

/// [`output_set`] by direct exploration of every configuration.
pub fn output_set_exhaustive(
    pi: &Permutation,
    method: &ShufflingMethod,
    variant: DeviceVariant,
    cfg: &EngineConfig,
) -> Result<BTreeSet<Permutation>> {
    cfg.check_limit("output_set", pi.len())?;
    let n = pi.len();
    let families: Vec<Arc<[Permutation]>> = (0..=n).map(|m| method.family(m)).collect();
    let mut seen: HashSet<(u8, Vec<u8>, Vec<u8>, bool)> = HashSet::new();
    let mut out = BTreeSet::new();
    let mut stack = vec![(0u8, Vec::<u8>::new(), Vec::<u8>::new(), false)];
    let p = pi.as_slice();
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        if seen.len() > cfg.budget {
            return Err(Error::BudgetExceeded { budget: cfg.budget });
        }
        let (i, dev, outw, last) = state;
        let iu = i as usize;
        if iu == n && dev.is_empty() {
            out.insert(Permutation::from_vec_unchecked(outw));
            continue;
        }
        if !dev.is_empty() {
            let (d, o) = if variant == DeviceVariant::PopUnloadsAll {
                let mut o = outw.clone();
                o.extend_from_slice(&dev);
                (Vec::new(), o)
            } else {
                let mut o = outw.clone();
                o.push(dev[0]);
                (dev[1..].to_vec(), o)
            };
            stack.push((i, d, o, false));
        }
        if iu < n {
            let mut d = dev.clone();
            d.push(p[iu]);
            stack.push((i + 1, d, outw.clone(), false));
        }
        if !last && dev.len() >= 2 {
            for sigma in families[dev.len()].iter() {
                let mut d = Vec::with_capacity(dev.len());
                compose_into(&dev, sigma.as_slice(), &mut d);
                if variant == DeviceVariant::UnloadAfterShuffle {
                    let mut o = outw.clone();
                    o.extend_from_slice(&d);
                    stack.push((i, Vec::new(), o, true));
                } else {
                    stack.push((i, d, outw.clone(), true));
                }
            }
        }
    }
    Ok(out)
}

/// Family members of every size up to `n` as raw words, optionally inverted.
pub(crate) fn family_words(method: &ShufflingMethod, n: usize, inverse: bool) -> Vec<Vec<Vec<u8>>> {
    (0..=n)
        .map(|m| {
            method
                .family(m)
                .iter()
                .map(|s| {
                    if inverse {
                        s.inverse().into_inner()
                    } else {
                        s.as_slice().to_vec()
                    }
                })
                .collect()
        })
        .collect()
}

/// Calls `visit` on `word` with every choice of disjoint contiguous segments
/// (length ≥ 2) rearranged by a member of `families[len]`. The same image
/// may be visited more than once.
pub(crate) fn for_each_segment_image(
    word: &[u8],
    families: &[Vec<Vec<u8>>],
    visit: &mut dyn FnMut(&[u8]),
) {
    let mut buf = Vec::with_capacity(word.len());
    segment_rec(word, families, 0, &mut buf, visit);
}

fn segment_rec(
    word: &[u8],
    families: &[Vec<Vec<u8>>],
    pos: usize,
    buf: &mut Vec<u8>,
    visit: &mut dyn FnMut(&[u8]),
) {
    let n = word.len();
    if pos == n {
        visit(buf);
        return;
    }
    buf.push(word[pos]);
    segment_rec(word, families, pos + 1, buf, visit);
    buf.pop();
    for end in pos + 1..n {
        let len = end - pos + 1;
        for sigma in &families[len] {
            buf.extend(sigma.iter().map(|&j| word[pos + j as usize - 1]));
            segment_rec(word, families, end + 1, buf, visit);
            buf.truncate(pos);
        }
    }
}
