use shuffleq::perm::{all_permutations, Word};
use shuffleq::Permutation;

/// Every arrangement of `k` distinct values drawn from `1..=m`.
fn words(m: u8, k: usize) -> Vec<Vec<u8>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for w in words(m, k - 1) {
        for v in 1..=m {
            if !w.contains(&v) {
                let mut x = w.clone();
                x.push(v);
                out.push(x);
            }
        }
    }
    out
}

#[test]
fn containment_is_transitive() {
    let small: Vec<Permutation> = (0..=6).flat_map(all_permutations).collect();
    for pi in all_permutations(6) {
        let below: Vec<&Permutation> = small.iter().filter(|s| pi.contains(s)).collect();
        for sigma in &below {
            for tau in small.iter().filter(|t| t.len() <= sigma.len()) {
                if sigma.contains(tau) {
                    assert!(pi.contains(tau), "{pi} ⊇ {sigma} ⊇ {tau}");
                }
            }
        }
    }
}

#[test]
fn reduce_commutes_with_compose_exhaustively() {
    for k in 0..=6 {
        let sigmas = all_permutations(k);
        for w in words(7, k) {
            let w = Word::new(w).unwrap();
            let red = w.reduce();
            for sigma in &sigmas {
                assert_eq!(w.compose(sigma).unwrap().reduce(), red.compose(sigma).unwrap());
            }
        }
    }
}

#[test]
fn rank_is_lexicographic_position() {
    for n in 0..=6 {
        for (i, pi) in all_permutations(n).iter().enumerate() {
            assert_eq!(pi.rank(), i);
            assert_eq!(&Permutation::unrank(n, i), pi);
        }
    }
}
