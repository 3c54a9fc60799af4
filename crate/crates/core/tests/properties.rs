use proptest::prelude::*;

use shuffleq::deque::{deque_to_qrev, qrev_to_deque, run_deque, run_qrev, DequeOp, QRevOp};
use shuffleq::device::validate_iteration;
use shuffleq::perm::{reduce, Word};
use shuffleq::{DeviceVariant, Permutation, ShufflingMethod, Sorter};

fn perm(max: usize) -> impl Strategy<Value = Permutation> {
    (0..=max).prop_flat_map(|n| {
        Just((1..=n as u8).collect::<Vec<u8>>())
            .prop_shuffle()
            .prop_map(|w| Permutation::new(w).unwrap())
    })
}

fn perms_of(n: usize, k: usize) -> impl Strategy<Value = Vec<Permutation>> {
    let one = Just((1..=n as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(|w| Permutation::new(w).unwrap());
    proptest::collection::vec(one, k)
}

/// A word of distinct values from `1..=40`.
fn word(max: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::sample::subsequence((1..=40u8).collect::<Vec<_>>(), 0..=max).prop_shuffle()
}

fn method() -> impl Strategy<Value = ShufflingMethod> {
    prop_oneof![
        Just(ShufflingMethod::cuts()),
        Just(ShufflingMethod::rev()),
        Just(ShufflingMethod::top_bottom()),
        Just(ShufflingMethod::in_shuffle()),
        Just(ShufflingMethod::monge()),
    ]
}

fn variant() -> impl Strategy<Value = DeviceVariant> {
    prop_oneof![
        Just(DeviceVariant::Unrestricted),
        Just(DeviceVariant::UnloadAfterShuffle),
        Just(DeviceVariant::PopUnloadsAll),
    ]
}

proptest! {
    #[test]
    fn symmetries_are_involutions(pi in perm(12)) {
        prop_assert_eq!(pi.star().star(), pi.clone());
        prop_assert_eq!(pi.reverse().reverse(), pi.clone());
        prop_assert_eq!(pi.complement().complement(), pi.clone());
        prop_assert_eq!(pi.inverse().inverse(), pi);
    }

    #[test]
    fn inverse_cancels(pi in perm(12)) {
        prop_assert!(pi.compose(&pi.inverse()).unwrap().is_identity());
        prop_assert!(pi.inverse().compose(&pi).unwrap().is_identity());
    }

    #[test]
    fn composition_is_associative((n, ps) in (0..=10usize).prop_flat_map(|n| (Just(n), perms_of(n, 3)))) {
        let (a, b, c) = (&ps[0], &ps[1], &ps[2]);
        let left = a.compose(b).unwrap().compose(c).unwrap();
        let right = a.compose(&b.compose(c).unwrap()).unwrap();
        prop_assert_eq!(left.len(), n);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn reduce_commutes_with_compose(
        (w, sigma) in word(8).prop_flat_map(|w| {
            let n = w.len();
            (Just(w), perms_of(n, 1))
        }),
    ) {
        let sigma = &sigma[0];
        let w = Word::new(w).unwrap();
        prop_assert_eq!(w.compose(sigma).unwrap().reduce(), w.reduce().compose(sigma).unwrap());
        prop_assert_eq!(reduce(w.as_slice()).unwrap(), w.reduce());
    }

    #[test]
    fn containment_is_reflexive(pi in perm(9)) {
        prop_assert!(pi.contains(&pi));
        prop_assert!(pi.contains(&Permutation::empty()));
    }

    #[test]
    fn witnesses_revalidate(pi in perm(6), m in method(), v in variant()) {
        let sorter = Sorter::new(&m, v);
        if let Some(it) = sorter.witness(&pi).unwrap() {
            let end = validate_iteration(&it, v, &m).unwrap();
            prop_assert!(end.output.as_slice() == Permutation::identity(pi.len()).as_slice());
        } else {
            prop_assert!(!sorter.is_sortable(&pi).unwrap());
        }
    }

    #[test]
    fn deque_translation_preserves_outputs(
        pi in perm(6),
        seq in proptest::collection::vec(proptest::sample::select(DequeOp::ALL.to_vec()), 0..14),
    ) {
        if let Ok(d) = run_deque(&pi, &seq) {
            let q = run_qrev(&pi, &deque_to_qrev(&seq)).unwrap();
            prop_assert_eq!(&q.output, &d.output);
            prop_assert_eq!(&q.device, &d.device);
        }
    }

    #[test]
    fn qrev_translation_preserves_outputs(
        pi in perm(6),
        seq in proptest::collection::vec(
            proptest::sample::select(vec![QRevOp::Push, QRevOp::Pop, QRevOp::Reverse]),
            0..14,
        ),
    ) {
        if let Ok(q) = run_qrev(&pi, &seq) {
            let d = run_deque(&pi, &qrev_to_deque(&seq)).unwrap();
            prop_assert_eq!(&d.output, &q.output);
            prop_assert_eq!(&d.device, &q.device);
        }
    }
}
