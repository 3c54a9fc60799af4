//! Bundled integer-sequence prefixes and the engines that reproduce them.
//!
//! Each data file holds `index value` lines; `#` lines are comments and
//! record the command that generated the file.

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::conjecture::s1_set_with;
use crate::deque::deque_sortable_set;
use crate::device::EngineConfig;
use crate::enumeration::av321sep_count;
use crate::error::{Error, Result};
use crate::method::ShufflingMethod;

struct Sequence {
    id: &'static str,
    description: &'static str,
    data: &'static str,
    first_index: usize,
    /// Largest index the engine will compute by default.
    default_max: usize,
}

const SEQUENCES: [Sequence; 3] = [
    Sequence {
        id: "A034943",
        description: "permutations of size n avoiding 321, 2413 and 3142",
        data: include_str!("../data/oeis/A034943.txt"),
        first_index: 1,
        default_max: 40,
    },
    Sequence {
        id: "A068911",
        description: "a(k) = |S¹_{k+2}| for In-shuffle and Monge pop queues: 2, 4, then a(k) = 3a(k-2)",
        data: include_str!("../data/oeis/A068911.txt"),
        first_index: 1,
        default_max: 17,
    },
    Sequence {
        id: "A182216",
        description: "deque-sortable permutations of size n",
        data: include_str!("../data/oeis/A182216.txt"),
        first_index: 1,
        default_max: 7,
    },
];

pub fn known_ids() -> Vec<&'static str> {
    SEQUENCES.iter().map(|s| s.id).collect()
}

fn lookup(id: &str) -> Result<&'static Sequence> {
    SEQUENCES
        .iter()
        .find(|s| s.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::UnknownSequence(id.to_string()))
}

/// The bundled `(index, value)` pairs for `id`.
pub fn reference(id: &str) -> Result<Vec<(usize, BigUint)>> {
    let s = lookup(id)?;
    s.data
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let bad = || Error::Parse {
                what: "sequence data",
                input: l.to_string(),
                reason: format!("expected `index value` in {}", s.id),
            };
            let (i, v) = l.split_once(char::is_whitespace).ok_or_else(bad)?;
            Ok((
                i.trim().parse().map_err(|_| bad())?,
                v.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

/// Terms `first_index..=n_max` computed by this crate's engines.
pub fn compute(id: &str, n_max: usize, cfg: &EngineConfig) -> Result<Vec<(usize, BigUint)>> {
    let s = lookup(id)?;
    (s.first_index..=n_max)
        .map(|k| {
            let v = match s.id {
                "A034943" => av321sep_count(k),
                "A068911" => BigUint::from(
                    s1_set_with(&ShufflingMethod::monge(), k + 2, k + 2, cfg.strategy)?.len(),
                ),
                _ => BigUint::from(deque_sortable_set(k, cfg)?.len()),
            };
            Ok((k, v))
        })
        .collect()
}

pub fn default_max(id: &str) -> Result<usize> {
    Ok(lookup(id)?.default_max)
}

/// Data-file text for `id` up to `n_max`.
pub fn emit(id: &str, n_max: usize, cfg: &EngineConfig) -> Result<String> {
    let s = lookup(id)?;
    let mut out = format!(
        "# {}: {}\n# generated by: shuffleq oeis-check {} --n {} --emit\n",
        s.id, s.description, s.id, n_max
    );
    for (k, v) in compute(id, n_max, cfg)? {
        out.push_str(&format!("{k} {v}\n"));
    }
    Ok(out)
}

fn big_str<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: usize,
    #[serde(serialize_with = "big_str")]
    pub expected: BigUint,
    #[serde(serialize_with = "big_str")]
    pub computed: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OeisReport {
    pub id: String,
    pub checked: usize,
    pub holds: bool,
    pub mismatches: Vec<Mismatch>,
}

/// Compares bundled terms with index `≤ n_max` against computed ones.
pub fn oeis_check(id: &str, n_max: usize, cfg: &EngineConfig) -> Result<OeisReport> {
    let s = lookup(id)?;
    let expected: Vec<(usize, BigUint)> =
        reference(id)?.into_iter().filter(|(k, _)| *k <= n_max).collect();
    let top = expected.iter().map(|(k, _)| *k).max().unwrap_or(0);
    let computed = compute(id, top, cfg)?;
    let mut mismatches = Vec::new();
    for (k, want) in &expected {
        let got = computed
            .iter()
            .find(|(i, _)| i == k)
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        if &got != want {
            mismatches.push(Mismatch {
                index: *k,
                expected: want.clone(),
                computed: got,
            });
        }
    }
    Ok(OeisReport {
        id: s.id.to_string(),
        checked: expected.len(),
        holds: mismatches.is_empty() && !expected.is_empty(),
        mismatches,
    })
}
