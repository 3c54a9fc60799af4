//! Permutations sortable by one pass of the cut queue that unloads after each
//! shuffle, by patterns and by block structure.

use std::sync::OnceLock;

use crate::perm::{reduce, Permutation};

fn forbidden() -> &'static [Permutation; 3] {
    static PATTERNS: OnceLock<[Permutation; 3]> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        ["321", "2413", "3142"].map(|s| s.parse().expect("literal pattern"))
    })
}

/// Avoids 321, 2413 and 3142.
pub fn is_cut_sortable_pattern(pi: &Permutation) -> bool {
    pi.avoids_all(forbidden())
}

/// `id_{r1} ⊖ id_{r2}` with `r1, r2 ≥ 1`, i.e. a single nontrivial rotation.
fn is_rotation_block(w: &[u8]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let top = w[0] as usize;
    let r2 = top - 1;
    if r2 == 0 || r2 >= n {
        return false;
    }
    let r1 = n - r2;
    w[..r1].iter().enumerate().all(|(k, &v)| v as usize == r2 + 1 + k)
        && w[r1..].iter().enumerate().all(|(k, &v)| v as usize == k + 1)
}

/// Recursive structural test: `π` is empty, or `id_r ⊕ π′`, or
/// `(id_{r1} ⊖ id_{r2}) ⊕ π″`, with the tail again of one of these forms.
pub fn is_cut_sortable_structural(pi: &Permutation) -> bool {
    structural(pi.as_slice())
}

fn structural(w: &[u8]) -> bool {
    if w.is_empty() {
        return true;
    }
    if w[0] == 1 {
        return structural(&shift_tail(w, 1));
    }
    // The leading block of form 2 must hold exactly the values 1..=len.
    (2..=w.len()).any(|len| {
        is_rotation_block(&w[..len]) && structural(&shift_tail(w, len))
    })
}

fn shift_tail(w: &[u8], k: usize) -> Vec<u8> {
    w[k..].iter().map(|&v| v - k as u8).collect()
}

/// The finest direct-sum decomposition into `1` and rotation blocks, or
/// `None` when `π` is not cut-sortable.
pub fn decompose_cut_sortable(pi: &Permutation) -> Option<Vec<Permutation>> {
    let blocks = pi.sum_components();
    blocks
        .iter()
        .all(|b| b.len() == 1 || is_rotation_block(b.as_slice()))
        .then_some(blocks)
}

/// Direct sum of `blocks`, left to right.
pub fn rebuild(blocks: &[Permutation]) -> Permutation {
    blocks
        .iter()
        .fold(Permutation::empty(), |acc, b| acc.direct_sum(b))
}

/// `red` of a rotation block, exposed for callers that build blocks by hand.
pub fn rotation_block(r1: usize, r2: usize) -> Permutation {
    let word: Vec<u8> = (r2 + 1..=r1 + r2).chain(1..=r2).map(|v| v as u8).collect();
    reduce(&word).expect("distinct values")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn pattern_examples() {
        assert!(is_cut_sortable_pattern(&p("213645")));
        assert!(!is_cut_sortable_pattern(&p("321")));
        assert!(!is_cut_sortable_pattern(&p("83527461")));
    }

    #[test]
    fn structural_examples() {
        let word = reduce(&[4, 5, 1, 2]).unwrap();
        assert_eq!(word, rotation_block(2, 2));
        assert!(is_cut_sortable_structural(&word));
        assert!(is_cut_sortable_structural(&Permutation::identity(7)));
        assert!(is_cut_sortable_structural(&Permutation::empty()));
        assert!(!is_cut_sortable_structural(&p("2413")));
    }

    #[test]
    fn decomposition_examples() {
        let blocks = decompose_cut_sortable(&p("213645")).unwrap();
        assert_eq!(blocks, vec![p("21"), p("1"), p("312")]);
        assert_eq!(blocks[2], rotation_block(1, 2));
        assert_eq!(rebuild(&blocks), p("213645"));
        assert_eq!(decompose_cut_sortable(&p("1")), Some(vec![p("1")]));
        assert_eq!(decompose_cut_sortable(&p("321")), None);
    }

    #[test]
    fn characterizations_agree_small() {
        for n in 0..=6 {
            for pi in all_permutations(n) {
                let a = is_cut_sortable_pattern(&pi);
                assert_eq!(a, is_cut_sortable_structural(&pi), "{pi}");
                assert_eq!(a, decompose_cut_sortable(&pi).is_some(), "{pi}");
            }
        }
    }
}
