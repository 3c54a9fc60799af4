//! Deques and the reversal shuffle queue.
//!
//! The deque's front is where `O` pops and `Ib` pushes; its back is where
//! `I` pushes and `Ob` pops. The reversal queue pushes at the back, pops at
//! the front, and may reverse its whole content.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::device::{sortable_set, DeviceVariant, EngineConfig, Op};
use crate::error::{Error, Result, Violation};
use crate::exec;
use crate::method::ShufflingMethod;
use crate::perm::{all_permutations, Permutation, Word};
use crate::report::CheckReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DequeOp {
    /// Push at the back.
    I,
    /// Pop from the front.
    O,
    /// Push at the front.
    Ib,
    /// Pop from the back.
    Ob,
}

impl DequeOp {
    pub const ALL: [DequeOp; 4] = [DequeOp::I, DequeOp::O, DequeOp::Ib, DequeOp::Ob];

    /// Swaps the two ends.
    pub fn complement(self) -> DequeOp {
        match self {
            DequeOp::I => DequeOp::Ib,
            DequeOp::Ib => DequeOp::I,
            DequeOp::O => DequeOp::Ob,
            DequeOp::Ob => DequeOp::O,
        }
    }
}

impl fmt::Display for DequeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DequeOp::I => "I",
            DequeOp::O => "O",
            DequeOp::Ib => "Ib",
            DequeOp::Ob => "Ob",
        })
    }
}

impl FromStr for DequeOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(DequeOp::I),
            "O" => Ok(DequeOp::O),
            "Ib" => Ok(DequeOp::Ib),
            "Ob" => Ok(DequeOp::Ob),
            _ => Err(Error::Parse {
                what: "deque operation",
                input: s.to_string(),
                reason: "expected I, O, Ib or Ob".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QRevOp {
    Push,
    Pop,
    Reverse,
}

impl fmt::Display for QRevOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QRevOp::Push => "push",
            QRevOp::Pop => "pop",
            QRevOp::Reverse => "reverse",
        })
    }
}

impl FromStr for QRevOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "push" => Ok(QRevOp::Push),
            "pop" => Ok(QRevOp::Pop),
            "reverse" | "rev" => Ok(QRevOp::Reverse),
            _ => Err(Error::Parse {
                what: "reversal-queue operation",
                input: s.to_string(),
                reason: "expected push, pop or reverse".into(),
            }),
        }
    }
}

/// Whitespace-separated tokens.
pub fn parse_seq<T: FromStr<Err = Error>>(text: &str) -> Result<Vec<T>> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn format_seq<T: fmt::Display>(seq: &[T]) -> String {
    seq.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Output and remaining device content after a replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub output: Word,
    /// Front to back.
    pub device: Vec<u8>,
    /// Input symbols not yet pushed.
    pub remaining: usize,
}

pub fn run_deque(pi: &Permutation, seq: &[DequeOp]) -> Result<Trace> {
    let mut input = pi.as_slice().iter().copied();
    let mut remaining = pi.len();
    let mut dq: VecDeque<u8> = VecDeque::new();
    let mut out = Vec::new();
    for (index, op) in seq.iter().enumerate() {
        let violation = |kind| Error::RuleViolation { index, kind };
        match op {
            DequeOp::I | DequeOp::Ib => {
                let x = input.next().ok_or_else(|| violation(Violation::PushEmptyInput))?;
                remaining -= 1;
                if *op == DequeOp::I {
                    dq.push_back(x);
                } else {
                    dq.push_front(x);
                }
            }
            DequeOp::O | DequeOp::Ob => {
                let x = if *op == DequeOp::O { dq.pop_front() } else { dq.pop_back() };
                out.push(x.ok_or_else(|| violation(Violation::PopEmptyDevice))?);
            }
        }
    }
    Ok(Trace {
        output: Word::new(out).expect("distinct entries"),
        device: dq.into_iter().collect(),
        remaining,
    })
}

/// Replays `seq`; reverses are accepted at any size and in any position.
pub fn run_qrev(pi: &Permutation, seq: &[QRevOp]) -> Result<Trace> {
    let mut input = pi.as_slice().iter().copied();
    let mut remaining = pi.len();
    let mut dq: VecDeque<u8> = VecDeque::new();
    let mut out = Vec::new();
    for (index, op) in seq.iter().enumerate() {
        let violation = |kind| Error::RuleViolation { index, kind };
        match op {
            QRevOp::Push => {
                let x = input.next().ok_or_else(|| violation(Violation::PushEmptyInput))?;
                remaining -= 1;
                dq.push_back(x);
            }
            QRevOp::Pop => out.push(dq.pop_front().ok_or_else(|| violation(Violation::PopEmptyDevice))?),
            QRevOp::Reverse => dq.make_contiguous().reverse(),
        }
    }
    Ok(Trace {
        output: Word::new(out).expect("distinct entries"),
        device: dq.into_iter().collect(),
        remaining,
    })
}

pub fn simulate_deque(pi: &Permutation, seq: &[DequeOp]) -> Result<Word> {
    run_deque(pi, seq).map(|t| t.output)
}

pub fn simulate_qrev(pi: &Permutation, seq: &[QRevOp]) -> Result<Word> {
    run_qrev(pi, seq).map(|t| t.output)
}

/// `I ↦ push`, `O ↦ pop`, `Ib ↦ reverse push reverse`,
/// `Ob ↦ reverse pop reverse`.
pub fn deque_to_qrev(seq: &[DequeOp]) -> Vec<QRevOp> {
    let mut out = Vec::with_capacity(seq.len() * 3);
    for op in seq {
        match op {
            DequeOp::I => out.push(QRevOp::Push),
            DequeOp::O => out.push(QRevOp::Pop),
            DequeOp::Ib => out.extend([QRevOp::Reverse, QRevOp::Push, QRevOp::Reverse]),
            DequeOp::Ob => out.extend([QRevOp::Reverse, QRevOp::Pop, QRevOp::Reverse]),
        }
    }
    out
}

/// Drops reverses of fewer than two elements and cancels adjacent reverse
/// pairs until neither applies. The result obeys the device rules of the
/// reversal queue and has the same effect.
pub fn normalize_qrev(seq: &[QRevOp]) -> Vec<QRevOp> {
    let mut cur = seq.to_vec();
    loop {
        let mut next: Vec<QRevOp> = Vec::with_capacity(cur.len());
        let mut size = 0usize;
        for &op in &cur {
            match op {
                QRevOp::Push => size += 1,
                QRevOp::Pop => size = size.saturating_sub(1),
                QRevOp::Reverse => {
                    if size < 2 {
                        continue;
                    }
                    if next.last() == Some(&QRevOp::Reverse) {
                        next.pop();
                        continue;
                    }
                }
            }
            next.push(op);
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// The reversal-queue sequence as device operations for `rev`.
pub fn qrev_to_device_ops(seq: &[QRevOp]) -> Vec<Op> {
    let mut size = 0usize;
    seq.iter()
        .map(|op| match op {
            QRevOp::Push => {
                size += 1;
                Op::Push
            }
            QRevOp::Pop => {
                size = size.saturating_sub(1);
                Op::Pop
            }
            QRevOp::Reverse => Op::Shuffle(Permutation::reverse_identity(size)),
        })
        .collect()
}

/// `push ↦ I`, `pop ↦ O`, then each reverse complements everything before
/// it and disappears. Equivalently, an op is complemented when an odd
/// number of reverses follow it.
pub fn qrev_to_deque(seq: &[QRevOp]) -> Vec<DequeOp> {
    let mut flips = seq.iter().filter(|&&op| op == QRevOp::Reverse).count();
    let mut out = Vec::with_capacity(seq.len());
    for op in seq {
        let base = match op {
            QRevOp::Push => DequeOp::I,
            QRevOp::Pop => DequeOp::O,
            QRevOp::Reverse => {
                flips -= 1;
                continue;
            }
        };
        out.push(if flips % 2 == 1 { base.complement() } else { base });
    }
    out
}

/// Sortability by a deque, by direct search.
pub fn is_deque_sortable(pi: &Permutation, budget: usize) -> Result<bool> {
    struct S<'a> {
        pi: &'a [u8],
        failed: HashSet<(u8, Vec<u8>)>,
        budget: usize,
    }
    impl S<'_> {
        fn dfs(&mut self, i: usize, dq: &mut VecDeque<u8>) -> Result<bool> {
            let n = self.pi.len();
            if i == n && dq.is_empty() {
                return Ok(true);
            }
            let key = (i as u8, dq.iter().copied().collect::<Vec<u8>>());
            if self.failed.contains(&key) {
                return Ok(false);
            }
            let expected = (i - dq.len() + 1) as u8;
            if dq.front() == Some(&expected) {
                dq.pop_front();
                if self.dfs(i, dq)? {
                    return Ok(true);
                }
                dq.push_front(expected);
            }
            if dq.len() > 1 && dq.back() == Some(&expected) {
                dq.pop_back();
                if self.dfs(i, dq)? {
                    return Ok(true);
                }
                dq.push_back(expected);
            }
            if i < n {
                let x = self.pi[i];
                dq.push_back(x);
                if self.dfs(i + 1, dq)? {
                    return Ok(true);
                }
                dq.pop_back();
                if !dq.is_empty() {
                    dq.push_front(x);
                    if self.dfs(i + 1, dq)? {
                        return Ok(true);
                    }
                    dq.pop_front();
                }
            }
            self.failed.insert(key);
            if self.failed.len() > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            Ok(false)
        }
    }
    let mut s = S {
        pi: pi.as_slice(),
        failed: HashSet::new(),
        budget,
    };
    s.dfs(0, &mut VecDeque::new())
}

/// Deque-sortable permutations of size `n`, lexicographic.
pub fn deque_sortable_set(n: usize, cfg: &EngineConfig) -> Result<Vec<Permutation>> {
    cfg.check_limit("deque_sortable_set", n)?;
    let all = all_permutations(n);
    let keep = exec::try_map(cfg.strategy, &all, |pi| is_deque_sortable(pi, cfg.budget))?;
    Ok(all.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect())
}

/// The deque and the plain reversal queue sort the same permutations of
/// size `n`.
pub fn verify_deque_equivalence(n: usize, cfg: &EngineConfig) -> Result<CheckReport> {
    let deque = deque_sortable_set(n, cfg)?;
    let qrev = sortable_set(n, &ShufflingMethod::rev(), DeviceVariant::Unrestricted, cfg)?;
    let mut report = CheckReport::new(format!("deque ≡ reversal queue, n = {n}"));
    report.checked = crate::perm::factorial(n) as u64;
    let (a, b): (HashSet<_>, HashSet<_>) = (deque.iter().collect(), qrev.iter().collect());
    if let Some(p) = deque.iter().find(|p| !b.contains(p)) {
        report.fail(format!("{p} is deque-sortable but not reversal-queue-sortable"));
    } else if let Some(p) = qrev.iter().find(|p| !a.contains(p)) {
        report.fail(format!("{p} is reversal-queue-sortable but not deque-sortable"));
    }
    Ok(report)
}

/// Every sequence over `alphabet` of length at most `max_len`.
pub fn all_sequences<T: Copy>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &a in alphabet {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Both translations preserve outputs: every replay-valid sequence of
/// length at most `max_len`, on every permutation of size `n`.
pub fn verify_translations(n: usize, max_len: usize) -> CheckReport {
    let mut report = CheckReport::new(format!(
        "translations preserve outputs, n = {n}, length ≤ {max_len}"
    ));
    let perms = all_permutations(n);
    for seq in all_sequences(&DequeOp::ALL, max_len) {
        let image = deque_to_qrev(&seq);
        for pi in &perms {
            let Ok(d) = run_deque(pi, &seq) else { continue };
            report.tick();
            match run_qrev(pi, &image) {
                Ok(q) if q.output == d.output && q.device == d.device => {}
                other => report.fail(format!("{pi} [{}] -> {:?} vs {:?}", format_seq(&seq), d, other)),
            }
        }
    }
    for seq in all_sequences(&[QRevOp::Push, QRevOp::Pop, QRevOp::Reverse], max_len) {
        let image = qrev_to_deque(&seq);
        for pi in &perms {
            let Ok(q) = run_qrev(pi, &seq) else { continue };
            report.tick();
            match run_deque(pi, &image) {
                Ok(d) if d.output == q.output && d.device == q.device => {}
                other => report.fail(format!("{pi} [{}] -> {:?} vs {:?}", format_seq(&seq), q, other)),
            }
        }
    }
    report
}
