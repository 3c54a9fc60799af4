//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use shuffleq::conjecture::{cutsall_witness, s1_set, verify_conjecture, Mode, p1_expected};
use shuffleq::cost::{ceil_log2, CostEngine};
use shuffleq::cut::{is_cut_sortable_pattern, is_cut_sortable_structural};
use shuffleq::deque::{
    deque_to_qrev, parse_seq, qrev_to_deque, verify_deque_equivalence, verify_translations,
    DequeOp, QRevOp,
};
use shuffleq::device::{sortable_set, validate_iteration};
use shuffleq::enumeration::{
    av321sep_count, av321sep_ratio, compositions_parts_ge2, fib, fib_odd_identity, p_prime_formula,
};
use shuffleq::perm::{all_permutations, factorial};
use shuffleq::{DeviceVariant, EngineConfig, Permutation, ShufflingMethod, Sorter};

type Outcome = Result<String, String>;

/// Name, check, and time limit.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: shuffleq::Error) -> String {
    e.to_string()
}

fn cut_counts() -> Outcome {
    let cuts = ShufflingMethod::cuts();
    let cfg = EngineConfig::default();
    let want = [1u64, 2, 5, 12, 28, 65, 151];
    for (i, &w) in want.iter().enumerate() {
        let n = i + 1;
        let brute = sortable_set(n, &cuts, DeviceVariant::UnloadAfterShuffle, &cfg).map_err(err)?.len();
        let rec = av321sep_count(n);
        let formula = p_prime_formula(&cuts, n).map_err(err)?;
        ensure(big(brute as u64) == big(w) && rec == big(w) && formula == big(w), || {
            format!("n = {n}: brute {brute}, recurrence {rec}, formula {formula}, expected {w}")
        })?;
    }
    Ok("1, 2, 5, 12, 28, 65, 151 from brute force, recurrence and formula".into())
}

fn three_way() -> Outcome {
    let cuts = ShufflingMethod::cuts();
    let cfg = EngineConfig::default();
    let mut checked = 0;
    for n in 0..=8 {
        let device: HashSet<Permutation> = sortable_set(n, &cuts, DeviceVariant::UnloadAfterShuffle, &cfg)
            .map_err(err)?
            .into_iter()
            .collect();
        for pi in all_permutations(n) {
            checked += 1;
            let (a, b, c) = (is_cut_sortable_pattern(&pi), is_cut_sortable_structural(&pi), device.contains(&pi));
            ensure(a == b && b == c, || format!("{pi}: pattern {a}, structural {b}, device {c}"))?;
        }
    }
    Ok(format!("{checked} permutations, zero disagreements"))
}

fn back_front() -> Outcome {
    let cfg = EngineConfig::default();
    for m in [ShufflingMethod::rev(), ShufflingMethod::top_bottom()] {
        for n in 2..=7 {
            let got = sortable_set(n, &m, DeviceVariant::PopUnloadsAll, &cfg).map_err(err)?.len();
            let want = fib(2 * n - 1);
            ensure(big(got as u64) == want, || format!("{m}, n = {n}: {got} vs F = {want}"))?;
        }
    }
    Ok("rev and top-bottom: 2, 5, 13, 34, 89, 233".into())
}

fn cuts_universal() -> Outcome {
    let cuts = ShufflingMethod::cuts();
    let cfg = EngineConfig::default();
    for n in 1..=6 {
        let got = sortable_set(n, &cuts, DeviceVariant::PopUnloadsAll, &cfg).map_err(err)?.len();
        ensure(got == factorial(n), || format!("n = {n}: {got} of {}", factorial(n)))?;
    }
    let single = Sorter::new(&cuts, DeviceVariant::PopUnloadsAll).single_pop(true);
    let mut witnesses = 0;
    for n in 1..=5 {
        for pi in all_permutations(n) {
            for it in [
                single.witness(&pi).map_err(err)?.ok_or_else(|| format!("{pi}: no single-pop witness"))?,
                cutsall_witness(&cuts, &pi).map_err(err)?,
            ] {
                let end = validate_iteration(&it, DeviceVariant::PopUnloadsAll, &cuts).map_err(err)?;
                ensure(it.pop_count() == 1 && end.output.as_slice() == Permutation::identity(n).as_slice(), || {
                    format!("{pi}: witness does not sort with one pop")
                })?;
                witnesses += 1;
            }
        }
    }
    Ok(format!("n! for n ≤ 6; {witnesses} single-pop witnesses replayed for n ≤ 5"))
}

fn cost_bounds() -> Outcome {
    let e = CostEngine::default();
    let v = e.cost(&"8,3,5,2,7,4,6,1".parse().unwrap()).map_err(err)?.value;
    ensure(v == 4, || format!("cost(83527461) = {v}"))?;
    for n in 0..=9 {
        let c = e.cost(&Permutation::identity(n)).map_err(err)?.value;
        ensure(c == 0, || format!("cost(id_{n}) = {c}"))?;
    }
    let mut maxima = Vec::new();
    for n in 2..=8 {
        let b = e.check_bounds(n).map_err(err)?;
        ensure(b.holds, || format!("n = {n}: {} ≤ {} ≤ {} fails", b.lower, b.max_cost, b.upper))?;
        ensure(b.lower == ceil_log2(n) && b.upper == n.div_ceil(2), || format!("n = {n}: wrong bounds"))?;
        maxima.push(b.max_cost);
    }
    ensure(maxima.last() == Some(&4), || format!("M(8) = {:?}", maxima.last()))?;
    Ok(format!("cost(83527461) = 4; M(2..8) = {maxima:?}"))
}

fn star_symmetry() -> Outcome {
    let e = CostEngine::default();
    let mut checked = 0;
    for n in 0..=7 {
        let r = e.check_star_symmetry(n).map_err(err)?;
        ensure(r.holds, || r.to_string())?;
        checked += r.checked;
    }
    Ok(format!("{checked} permutations"))
}

fn monotonicity() -> Outcome {
    let r = CostEngine::default().check_pattern_monotonicity_exhaustive(6, 4).map_err(err)?;
    ensure(r.holds, || r.to_string())?;
    Ok(format!("{} containing pairs", r.checked))
}

fn deque_equivalence() -> Outcome {
    let cfg = EngineConfig::default();
    for n in 0..=7 {
        let r = verify_deque_equivalence(n, &cfg).map_err(err)?;
        ensure(r.holds, || r.to_string())?;
    }
    let r = verify_translations(4, 8);
    ensure(r.holds, || r.to_string())?;
    let s: Vec<QRevOp> = parse_seq("push push reverse pop reverse push pop push reverse pop pop").unwrap();
    let s2: Vec<DequeOp> = parse_seq("Ib Ib O Ib Ob Ib O O").unwrap();
    ensure(qrev_to_deque(&s) == s2, || "worked example translates differently".into())?;
    let back = deque_to_qrev(&s2);
    for pi in all_permutations(4) {
        let a = shuffleq::deque::simulate_qrev(&pi, &s).map_err(err)?;
        let b = shuffleq::deque::simulate_deque(&pi, &s2).map_err(err)?;
        let c = shuffleq::deque::simulate_qrev(&pi, &back).map_err(err)?;
        ensure(a == b && b == c, || format!("{pi}: worked example outputs differ"))?;
    }
    Ok(format!("sets equal for n ≤ 7; {} replays agree", r.checked))
}

fn single_pop_counts() -> Outcome {
    for n in 3..=19 {
        let want = p1_expected(n);
        for m in [ShufflingMethod::in_shuffle(), ShufflingMethod::monge()] {
            let got = s1_set(&m, n).map_err(err)?.len();
            ensure(big(got as u64) == want, || format!("{m}, n = {n}: {got} vs {want}"))?;
        }
    }
    Ok("in-shuffle and monge match a(n-2) for n = 3..19".into())
}

fn conjecture() -> Outcome {
    let cfg = EngineConfig::default();
    let brute = verify_conjecture(Mode::Brute, 8, &cfg).map_err(err)?;
    ensure(brute.holds, || format!("brute: differ at {:?}", brute.differ))?;
    let t = Instant::now();
    let rec = verify_conjecture(Mode::Recurrence, 19, &cfg).map_err(err)?;
    let elapsed = t.elapsed();
    ensure(rec.holds, || format!("recurrence: differ {:?}, unverified {:?}", rec.differ, rec.unverified))?;
    for r in &rec.rows {
        for c in [&r.in_shuffle, &r.monge] {
            ensure(c.pop_simple && c.ending_unique, || format!("n = {}: a condition check failed", r.n))?;
        }
    }
    for (b, r) in brute.rows.iter().zip(&rec.rows) {
        ensure(b.monge.p == r.monge.p && b.in_shuffle.p == r.in_shuffle.p, || {
            format!("n = {}: recurrence disagrees with brute force", b.n)
        })?;
    }
    ensure(elapsed < Duration::from_secs(600), || format!("recurrence took {elapsed:?}"))?;
    let p19 = &rec.rows.last().expect("rows").monge.p;
    Ok(format!("equal for n ≤ 8 by brute force and n ≤ 19 by recurrence (p19 = {p19})"))
}

fn fibonacci() -> Outcome {
    for n in 1..=30 {
        let (l, r) = fib_odd_identity(n).map_err(err)?;
        ensure(l == r, || format!("n = {n}: {l} vs {r}"))?;
    }
    for k in 2..=30 {
        let c = compositions_parts_ge2(k).map_err(err)?;
        ensure(c == fib(k - 1), || format!("k = {k}: {c} vs {}", fib(k - 1)))?;
    }
    Ok("identity for n ≤ 30; compositions for k ≤ 30".into())
}

fn growth() -> Outcome {
    let r = av321sep_ratio(60);
    ensure((r - 2.32).abs() <= 0.01, || format!("ratio {r}"))?;
    Ok(format!("a(61)/a(60) = {r:.6}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("cut-sortable counts", cut_counts, Duration::from_secs(60)),
        ("three-way characterization", three_way, Duration::from_secs(300)),
        ("back-front Fibonacci counts", back_front, Duration::from_secs(60)),
        ("cuts pop universality", cuts_universal, Duration::from_secs(60)),
        ("cost values and bounds", cost_bounds, Duration::from_secs(1800)),
        ("star symmetry", star_symmetry, Duration::from_secs(600)),
        ("pattern monotonicity", monotonicity, Duration::MAX),
        ("deque equivalence", deque_equivalence, Duration::MAX),
        ("single-pop counts", single_pop_counts, Duration::from_secs(300)),
        ("pop-equivalence of in-shuffle and monge", conjecture, Duration::from_secs(600)),
        ("Fibonacci identities", fibonacci, Duration::MAX),
        ("growth rate", growth, Duration::MAX),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *budget => Err(format!("{msg}; took {elapsed:.1?}, limit {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{elapsed:.2?}]", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {msg} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
