use std::collections::HashSet;

use num_bigint::BigUint;
use shuffleq::conjecture::{
    block_sum_set, check_ending_uniqueness, check_p1_equality, cutsall_witness, is_pop_simple, s1_set,
    single_pop_sortable, tau, verify_conjecture, verify_cutsall, Mode,
};
use shuffleq::device::{sortable_set, validate_iteration};
use shuffleq::perm::all_permutations;
use shuffleq::{DeviceVariant, EngineConfig, Permutation, ShufflingMethod};

fn pair_methods() -> [ShufflingMethod; 2] {
    [ShufflingMethod::in_shuffle(), ShufflingMethod::monge()]
}

/// Shuffle sizes grouped as `{2, 3}, {4, 5}, …`, with a lone even `n` last.
fn groups(n: usize) -> Vec<Vec<usize>> {
    (1..=n / 2).map(|j| (2 * j..=(2 * j + 1).min(n)).collect()).collect()
}

#[test]
fn tau_pairs_coincide() {
    for m in pair_methods() {
        for n in 3..=19 {
            for g in groups(n).iter().filter(|g| g.len() == 2) {
                assert_eq!(tau(&m, g[0], n).unwrap(), tau(&m, g[1], n).unwrap());
            }
        }
    }
}

#[test]
fn exponent_vectors_give_distinct_products() {
    // τ₂ is a transposition, so its group only contributes exponents 0 and 1.
    for m in pair_methods() {
        for n in 2..=16 {
            let gs = groups(n);
            let taus: Vec<Permutation> = gs.iter().map(|g| tau(&m, g[0], n).unwrap()).collect();
            let ranges: Vec<usize> = gs
                .iter()
                .enumerate()
                .map(|(i, g)| if i == 0 { 2 } else { g.len() + 1 })
                .collect();
            let vectors: usize = ranges.iter().product();
            let mut products = HashSet::new();
            for mut code in 0..vectors {
                let mut acc = Permutation::identity(n);
                for (t, &r) in taus.iter().zip(&ranges) {
                    for _ in 0..code % r {
                        acc = acc.compose(t).unwrap();
                    }
                    code /= r;
                }
                products.insert(acc);
            }
            assert_eq!(products.len(), vectors, "{m} n={n}");
            assert_eq!(s1_set(&m, n).unwrap().len(), vectors, "{m} n={n}");
        }
    }
}

#[test]
fn tau_two_is_an_involution() {
    for m in pair_methods() {
        let t = tau(&m, 2, 6).unwrap();
        assert!(t.compose(&t).unwrap().is_identity());
    }
}

#[test]
fn single_pop_sets_match_device_search() {
    let cfg = EngineConfig::default();
    for m in pair_methods() {
        for n in 1..=7 {
            assert_eq!(single_pop_sortable(&m, n, &cfg).unwrap(), s1_set(&m, n).unwrap(), "{m} n={n}");
        }
    }
    let (report, rows) = check_p1_equality(12, &cfg).unwrap();
    assert!(report.holds, "{report}");
    let seen: Vec<usize> = rows.iter().map(|r| r.monge).collect();
    assert_eq!(seen, [2, 4, 6, 12, 18, 36, 54, 108, 162, 324]);
}

#[test]
fn block_sums_match_brute_force() {
    let cfg = EngineConfig::default();
    for m in pair_methods() {
        for n in 0..=8 {
            assert_eq!(
                block_sum_set(&m, n, 14).unwrap(),
                sortable_set(n, &m, DeviceVariant::PopUnloadsAll, &cfg).unwrap(),
                "{m} n={n}"
            );
        }
    }
}

#[test]
fn recurrence_matches_brute_force() {
    let cfg = EngineConfig::default();
    let brute = verify_conjecture(Mode::Brute, 8, &cfg).unwrap();
    let rec = verify_conjecture(Mode::Recurrence, 8, &cfg).unwrap();
    let blocks = verify_conjecture(Mode::BlockSum, 8, &cfg).unwrap();
    for ((b, r), s) in brute.rows.iter().zip(&rec.rows).zip(&blocks.rows) {
        for (x, y, z) in [(&b.monge, &r.monge, &s.monge), (&b.in_shuffle, &r.in_shuffle, &s.in_shuffle)] {
            assert_eq!(x.p, y.p, "n={}", b.n);
            assert_eq!(x.p_prime, y.p_prime, "n={}", b.n);
            assert_eq!(x.p_double_prime, y.p_double_prime, "n={}", b.n);
            assert_eq!(x.p, z.p, "n={}", b.n);
            assert_eq!(&y.p, &(&y.p_prime + &y.p_double_prime));
        }
    }
    assert!(brute.holds && rec.holds && blocks.holds);
}

#[test]
fn conditions_hold_for_both_methods() {
    for m in pair_methods() {
        for n in 1..=12 {
            assert!(is_pop_simple(&m, n).unwrap().holds, "{m} n={n}");
            assert!(check_ending_uniqueness(&m, n).unwrap().holds, "{m} n={n}");
        }
    }
}

#[test]
fn cuts_sorts_everything_with_one_pop() {
    let cuts = ShufflingMethod::cuts();
    let cfg = EngineConfig::default().with_limit(6);
    let r = verify_cutsall(&cuts, 6, &cfg).unwrap();
    assert!(r.holds, "{r}");
    let it = cutsall_witness(&cuts, &"25143".parse().unwrap()).unwrap();
    let text = it.ops_text();
    let ops: Vec<&str> = text.lines().collect();
    assert_eq!(
        ops,
        ["push", "push", "push", "shuffle 2,3,1", "push", "shuffle 4,1,2,3", "push", "shuffle 3,4,5,1,2", "popall"]
    );
    validate_iteration(&it, DeviceVariant::PopUnloadsAll, &cuts).unwrap();
}

#[test]
fn cutsall_needs_the_ending_condition() {
    assert!(verify_cutsall(&ShufflingMethod::rev(), 4, &EngineConfig::default()).is_err());
}

#[test]
fn every_size_seven_permutation_is_cuts_pop_sortable() {
    let cfg = EngineConfig::default();
    let n = 7;
    assert_eq!(
        BigUint::from(sortable_set(n, &ShufflingMethod::cuts(), DeviceVariant::PopUnloadsAll, &cfg).unwrap().len()),
        BigUint::from(all_permutations(n).len())
    );
}
