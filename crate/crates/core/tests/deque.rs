use std::collections::BTreeSet;

use shuffleq::deque::{
    all_sequences, deque_sortable_set, deque_to_qrev, normalize_qrev, qrev_to_deque, qrev_to_device_ops,
    run_deque, run_qrev, DequeOp, QRevOp,
};
use shuffleq::device::{sortable_set, validate_iteration, Iteration};
use shuffleq::perm::all_permutations;
use shuffleq::{DeviceVariant, EngineConfig, Permutation, ShufflingMethod};

/// Deque-sortable permutations by trying every operation sequence of
/// length `2n`.
fn oracle(n: usize) -> BTreeSet<Permutation> {
    let seqs: Vec<Vec<DequeOp>> = all_sequences(&DequeOp::ALL, 2 * n)
        .into_iter()
        .filter(|s| s.len() == 2 * n)
        .collect();
    all_permutations(n)
        .into_iter()
        .filter(|pi| {
            seqs.iter().any(|s| {
                run_deque(pi, s).is_ok_and(|t| {
                    t.remaining == 0 && t.device.is_empty() && t.output.as_slice() == Permutation::identity(n).as_slice()
                })
            })
        })
        .collect()
}

#[test]
fn search_matches_exhaustive_sequences() {
    let cfg = EngineConfig::default();
    for n in 0..=4 {
        let found: BTreeSet<Permutation> = deque_sortable_set(n, &cfg).unwrap().into_iter().collect();
        assert_eq!(found, oracle(n), "n={n}");
    }
}

#[test]
fn deque_and_reversal_queue_agree() {
    let cfg = EngineConfig::default();
    for n in 0..=6 {
        assert_eq!(
            deque_sortable_set(n, &cfg).unwrap(),
            sortable_set(n, &ShufflingMethod::rev(), DeviceVariant::Unrestricted, &cfg).unwrap()
        );
    }
}

#[test]
fn known_counts() {
    let cfg = EngineConfig::default();
    let counts: Vec<usize> = (1..=7).map(|n| deque_sortable_set(n, &cfg).unwrap().len()).collect();
    assert_eq!(counts, [1, 2, 6, 24, 116, 634, 3762]);
}

#[test]
fn translations_round_trip_through_the_device() {
    let rev = ShufflingMethod::rev();
    for seq in all_sequences(&[QRevOp::Push, QRevOp::Pop, QRevOp::Reverse], 8) {
        for pi in all_permutations(4) {
            let Ok(q) = run_qrev(&pi, &seq) else { continue };
            let d = run_deque(&pi, &qrev_to_deque(&seq)).unwrap();
            assert_eq!(d.output, q.output);
            let again = run_qrev(&pi, &deque_to_qrev(&qrev_to_deque(&seq))).unwrap();
            assert_eq!(again.output, q.output);
            if q.remaining == 0 && q.device.is_empty() {
                let it = Iteration::new(pi.clone(), qrev_to_device_ops(&normalize_qrev(&seq)));
                let end = validate_iteration(&it, DeviceVariant::Unrestricted, &rev).unwrap();
                assert_eq!(end.output, q.output);
            }
        }
    }
}
