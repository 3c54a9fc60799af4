use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use shuffleq::conjecture::{verify_conjecture, Mode};
use shuffleq::cost::CostEngine;
use shuffleq::deque::{
    deque_to_qrev, format_seq, normalize_qrev, parse_seq, qrev_to_deque, run_deque, run_qrev,
    verify_deque_equivalence, verify_translations, DequeOp, QRevOp,
};
use shuffleq::device::{sortable_set, DEFAULT_BUDGET, DEFAULT_LIMIT};
use shuffleq::enumeration::{backfront_pop_count, p_prime_formula, CountTable, Provenance};
use shuffleq::{oeis, DeviceVariant, EngineConfig, Error, Permutation, ShufflingMethod, Sorter, Strategy};

const EXIT_FALSIFIED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "shuffleq", version, about = "Shuffle queue sortability, counts, costs and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Built-in shuffling method: cuts, rev, top-bottom, in-shuffle, monge.
    #[arg(long, global = true, default_value = "cuts")]
    method: String,

    /// Custom method file (`n: perm ; perm` per line); overrides --method.
    #[arg(long, global = true)]
    method_file: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Prime)]
    variant: VariantArg,

    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// Largest n for exhaustive sweeps over all permutations.
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT)]
    limit: usize,

    /// Memo-entry budget per search.
    #[arg(long, global = true, env = "SHUFFLEQ_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,

    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Plain,
    Prime,
    Pop,
}

impl From<VariantArg> for DeviceVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => DeviceVariant::Unrestricted,
            VariantArg::Prime => DeviceVariant::UnloadAfterShuffle,
            VariantArg::Pop => DeviceVariant::PopUnloadsAll,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Brute,
    BlockSum,
    Recurrence,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CountSource {
    /// Exhaustive device search.
    Brute,
    /// Closed form: irreducible families for prime, back-front for pop.
    Formula,
    /// Both, failing on any disagreement.
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a permutation is sortable.
    Sortable {
        #[arg(short = 'p', long = "perm")]
        perm: String,
    },
    /// Print an iteration that sorts a permutation.
    Witness {
        #[arg(short = 'p', long = "perm")]
        perm: String,
        /// Only accept iterations with exactly one pop.
        #[arg(long)]
        single_pop: bool,
    },
    /// Count sortable permutations for each n.
    Count {
        #[arg(long, default_value = "1..7", value_parser = parse_range)]
        n: RangeInclusive<usize>,
        #[arg(long, value_enum, default_value_t = CountSource::Brute)]
        source: CountSource,
    },
    /// Cut-sorting cost of a permutation with an optimal chain.
    Cost {
        #[arg(short = 'p', long = "perm")]
        perm: String,
    },
    /// Maximum cost over all permutations of each size.
    Maxcost {
        #[arg(long, default_value = "2..7", value_parser = parse_range)]
        n: RangeInclusive<usize>,
    },
    /// Check ⌈log₂ n⌉ ≤ M(n) ≤ ⌈n/2⌉.
    Bounds {
        #[arg(long, default_value = "2..7", value_parser = parse_range)]
        n: RangeInclusive<usize>,
    },
    /// Translate between deque and reversal-queue operation sequences.
    DequeTranslate {
        /// Deque tokens: I O Ib Ob.
        #[arg(long, conflicts_with = "qrev")]
        deque: Option<String>,
        /// Reversal-queue tokens: push pop reverse.
        #[arg(long)]
        qrev: Option<String>,
        /// Replay both sequences on this input and compare outputs.
        #[arg(short = 'p', long = "perm")]
        perm: Option<String>,
        /// Cancel redundant reverses in the reversal-queue sequence.
        #[arg(long)]
        normalize: bool,
    },
    /// Check that deques and the reversal queue sort the same permutations.
    DequeVerify {
        #[arg(long, default_value = "1..6", value_parser = parse_range)]
        n: RangeInclusive<usize>,
        /// Also replay all operation sequences up to this length on S₄.
        #[arg(long)]
        seq_len: Option<usize>,
    },
    /// Compare In-shuffle and Monge pop-queue counts.
    Conjecture {
        #[arg(long, default_value = "1..8", value_parser = parse_range)]
        n: RangeInclusive<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Brute)]
        mode: ModeArg,
    },
    /// Compare a bundled integer sequence with computed terms.
    OeisCheck {
        id: String,
        /// Largest index to compare or emit.
        #[arg(long)]
        n: Option<usize>,
        /// Print a data file for the sequence instead of checking.
        #[arg(long)]
        emit: bool,
    },
    /// Check cost(π) = cost(π*) over all permutations of each size.
    StarCheck {
        #[arg(long, default_value = "1..6", value_parser = parse_range)]
        n: RangeInclusive<usize>,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected N or A..B, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let n: usize = s.trim().parse().map_err(|_| bad())?;
            Ok(n..=n)
        }
    }
}

/// What a subcommand produced: text for stdout and whether every check held.
struct Outcome {
    text: String,
    holds: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, holds: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.limit == 0 || cli.common.budget == 0 {
        eprintln!("error: --limit and --budget must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    let workers = cli.common.workers;
    match shuffleq::exec::with_workers(workers, || run(&cli)) {
        Ok(out) => {
            print!("{}", out.text);
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FALSIFIED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(EXIT_BUDGET),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}

fn engine(c: &Common) -> EngineConfig {
    let strategy = if c.workers == Some(1) {
        Strategy::Sequential
    } else {
        Strategy::default()
    };
    EngineConfig::default()
        .with_limit(c.limit)
        .with_budget(c.budget)
        .with_strategy(strategy)
}

fn method(c: &Common) -> shuffleq::Result<ShufflingMethod> {
    match &c.method_file {
        Some(path) => ShufflingMethod::load_custom(path),
        None => ShufflingMethod::by_name(&c.method),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> shuffleq::Result<Outcome> {
    let c = &cli.common;
    let cfg = engine(c);
    let variant: DeviceVariant = c.variant.into();
    match &cli.command {
        Command::Sortable { perm } => {
            let pi: Permutation = perm.parse()?;
            let m = method(c)?;
            let yes = Sorter::new(&m, variant).with_budget(c.budget).is_sortable(&pi)?;
            Ok(Outcome::ok(match c.format {
                Format::Json => json(&serde_json::json!({
                    "perm": pi.to_string(), "method": m.name(), "variant": variant, "sortable": yes
                })),
                Format::Csv => format!("perm,method,variant,sortable\n\"{pi}\",{m},{variant},{yes}\n"),
                Format::Plain => format!("{yes}\n"),
            }))
        }
        Command::Witness { perm, single_pop } => {
            let pi: Permutation = perm.parse()?;
            let m = method(c)?;
            let it = Sorter::new(&m, variant)
                .with_budget(c.budget)
                .single_pop(*single_pop)
                .witness(&pi)?;
            Ok(Outcome::ok(match (c.format, it) {
                (Format::Json, it) => json(&serde_json::json!({
                    "perm": pi.to_string(),
                    "sortable": it.is_some(),
                    "ops": it.map(|i| i.ops.iter().map(|o| o.to_string()).collect::<Vec<_>>()),
                })),
                (_, Some(it)) => it.ops_text(),
                (_, None) => "none\n".to_string(),
            }))
        }
        Command::Count { n, source } => count(c, &cfg, variant, n.clone(), *source),
        Command::Cost { perm } => {
            let pi: Permutation = perm.parse()?;
            let r = CostEngine::new(&method(c)?).cost(&pi)?;
            Ok(Outcome::ok(match c.format {
                Format::Json => json(&serde_json::json!({
                    "perm": pi.to_string(),
                    "value": r.value,
                    "witness": r.witness.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                })),
                Format::Csv => {
                    let chain: Vec<String> = r.witness.iter().map(|p| p.to_string()).collect();
                    format!("perm,value,witness\n\"{pi}\",{},\"{}\"\n", r.value, chain.join(" -> "))
                }
                Format::Plain => {
                    let mut s = format!("{}\n", r.value);
                    for p in &r.witness {
                        let _ = writeln!(s, "{p}");
                    }
                    s
                }
            }))
        }
        Command::Maxcost { n } => {
            let e = cost_engine(c, &cfg)?;
            let rows = e.probe_max_vs_log(*n.end())?;
            let rows: Vec<_> = rows.into_iter().filter(|r| n.contains(&r.n)).collect();
            Ok(Outcome::ok(match c.format {
                Format::Json => json(&rows),
                _ => {
                    let mut s = String::from("n,ceil_log2,max_cost,exceeds_log\n");
                    for r in rows {
                        let _ = writeln!(s, "{},{},{},{}", r.n, r.ceil_log2, r.max_cost, r.exceeds_log);
                    }
                    s
                }
            }))
        }
        Command::Bounds { n } => {
            let e = cost_engine(c, &cfg)?;
            let reports = n.clone().map(|k| e.check_bounds(k)).collect::<shuffleq::Result<Vec<_>>>()?;
            let holds = reports.iter().all(|r| r.holds);
            let text = match c.format {
                Format::Json => json(&reports),
                _ => {
                    let mut s = String::from("n,lower,max_cost,upper,holds,maximizers\n");
                    for r in &reports {
                        let _ = writeln!(s, "{},{},{},{},{},{}", r.n, r.lower, r.max_cost, r.upper, r.holds, r.maximizer_count);
                    }
                    for r in reports.iter().filter(|r| !r.holds) {
                        let _ = writeln!(s, "counterexample: n={} max_cost={} bounds=[{},{}]", r.n, r.max_cost, r.lower, r.upper);
                    }
                    s
                }
            };
            Ok(Outcome { text, holds })
        }
        Command::StarCheck { n } => {
            let e = cost_engine(c, &cfg)?;
            let reports = n.clone().map(|k| e.check_star_symmetry(k)).collect::<shuffleq::Result<Vec<_>>>()?;
            Ok(report_outcome(c.format, &reports))
        }
        Command::DequeTranslate { deque, qrev, perm, normalize } => {
            deque_translate(c.format, deque.as_deref(), qrev.as_deref(), perm.as_deref(), *normalize)
        }
        Command::DequeVerify { n, seq_len } => {
            let mut reports = n
                .clone()
                .map(|k| verify_deque_equivalence(k, &cfg))
                .collect::<shuffleq::Result<Vec<_>>>()?;
            if let Some(len) = seq_len {
                reports.push(verify_translations(4, *len));
            }
            Ok(report_outcome(c.format, &reports))
        }
        Command::Conjecture { n, mode } => {
            let mode = match mode {
                ModeArg::Brute => Mode::Brute,
                ModeArg::BlockSum => Mode::BlockSum,
                ModeArg::Recurrence => Mode::Recurrence,
            };
            let mut report = verify_conjecture(mode, *n.end(), &cfg)?;
            report.rows.retain(|r| n.contains(&r.n));
            let text = match c.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
                Format::Plain => {
                    let mut s = String::from("n,in_shuffle,monge,equal,exact\n");
                    for r in &report.rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            r.n,
                            r.in_shuffle.p,
                            r.monge.p,
                            r.equal,
                            r.in_shuffle.exact && r.monge.exact
                        );
                    }
                    for k in &report.differ {
                        let _ = writeln!(s, "counterexample: n={k} counts differ");
                    }
                    for k in &report.unverified {
                        let _ = writeln!(s, "unverified: n={k} recurrence value is only an upper bound");
                    }
                    s
                }
            };
            Ok(Outcome { text, holds: report.holds })
        }
        Command::OeisCheck { id, n, emit } => {
            let top = match n {
                Some(k) => *k,
                None => oeis::default_max(id)?,
            };
            if *emit {
                return Ok(Outcome::ok(oeis::emit(id, top, &cfg)?));
            }
            let r = oeis::oeis_check(id, top, &cfg)?;
            let text = match c.format {
                Format::Json => json(&r),
                _ => {
                    let mut s = format!("{}: {} ({} terms)\n", r.id, if r.holds { "match" } else { "MISMATCH" }, r.checked);
                    for m in &r.mismatches {
                        let _ = writeln!(s, "counterexample: index={} expected={} computed={}", m.index, m.expected, m.computed);
                    }
                    s
                }
            };
            Ok(Outcome { text, holds: r.holds })
        }
    }
}

fn cost_engine(c: &Common, cfg: &EngineConfig) -> shuffleq::Result<CostEngine> {
    Ok(CostEngine::new(&method(c)?)
        .with_limits(shuffleq::cost::DEFAULT_COST_LIMIT.max(c.limit), c.limit)
        .with_strategy(cfg.strategy))
}

fn report_outcome(format: Format, reports: &[shuffleq::CheckReport]) -> Outcome {
    let holds = reports.iter().all(|r| r.holds);
    let text = match format {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut s = String::from("check,holds,checked,counterexample\n");
            for r in reports {
                let _ = writeln!(
                    s,
                    "\"{}\",{},{},\"{}\"",
                    r.check,
                    r.holds,
                    r.checked,
                    r.counterexample.clone().unwrap_or_default()
                );
            }
            s
        }
        Format::Plain => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(s, "{r}");
                if let Some(ce) = &r.counterexample {
                    let _ = writeln!(s, "counterexample: {ce}");
                }
            }
            s
        }
    };
    Outcome { text, holds }
}

fn count(
    c: &Common,
    cfg: &EngineConfig,
    variant: DeviceVariant,
    range: RangeInclusive<usize>,
    source: CountSource,
) -> shuffleq::Result<Outcome> {
    let m = method(c)?;
    let formula = |n: usize| -> shuffleq::Result<BigUint> {
        match variant {
            DeviceVariant::UnloadAfterShuffle => p_prime_formula(&m, n),
            DeviceVariant::PopUnloadsAll if m.is_back_front(n.max(2)) => backfront_pop_count(n),
            _ => Err(Error::Precondition(format!(
                "no closed form for {m} with variant {variant}"
            ))),
        }
    };
    let mut table = CountTable::new(m.name(), variant.short_name());
    let mut mismatches = Vec::new();
    for n in range {
        let (value, prov) = match source {
            CountSource::Brute => (BigUint::from(sortable_set(n, &m, variant, cfg)?.len()), Provenance::Brute),
            CountSource::Formula => (formula(n)?, Provenance::Formula),
            CountSource::Both => {
                let b = BigUint::from(sortable_set(n, &m, variant, cfg)?.len());
                let f = formula(n)?;
                if b != f {
                    mismatches.push(format!("counterexample: n={n} brute={b} formula={f}"));
                }
                (b, Provenance::Brute)
            }
        };
        table.push(n, value, prov)?;
    }
    let mut text = match c.format {
        Format::Json => json(&table),
        Format::Csv => table.to_csv(),
        Format::Plain => {
            let mut s = String::new();
            for e in &table.entries {
                let _ = writeln!(s, "{} {}", e.n, e.count);
            }
            s
        }
    };
    for m in &mismatches {
        text.push_str(m);
        text.push('\n');
    }
    Ok(Outcome { text, holds: mismatches.is_empty() })
}

fn deque_translate(
    format: Format,
    deque: Option<&str>,
    qrev: Option<&str>,
    perm: Option<&str>,
    normalize: bool,
) -> shuffleq::Result<Outcome> {
    let (d, q): (Vec<DequeOp>, Vec<QRevOp>) = match (deque, qrev) {
        (Some(d), None) => {
            let d: Vec<DequeOp> = parse_seq(d)?;
            let mut q = deque_to_qrev(&d);
            if normalize {
                q = normalize_qrev(&q);
            }
            (d, q)
        }
        (None, Some(q)) => {
            let q: Vec<QRevOp> = parse_seq(q)?;
            (qrev_to_deque(&q), q)
        }
        _ => {
            return Err(Error::Precondition("give exactly one of --deque or --qrev".into()));
        }
    };
    let mut holds = true;
    let mut replay = None;
    if let Some(p) = perm {
        let pi: Permutation = p.parse()?;
        let a = run_deque(&pi, &d)?;
        let b = run_qrev(&pi, &q)?;
        holds = a.output == b.output;
        replay = Some((a.output.to_string(), b.output.to_string()));
    }
    let text = match format {
        Format::Json => json(&serde_json::json!({
            "deque": format_seq(&d),
            "qrev": format_seq(&q),
            "deque_output": replay.as_ref().map(|r| r.0.clone()),
            "qrev_output": replay.as_ref().map(|r| r.1.clone()),
            "outputs_agree": holds,
        })),
        _ => {
            let mut s = format!("deque: {}\nqrev: {}\n", format_seq(&d), format_seq(&q));
            if let Some((a, b)) = &replay {
                let _ = writeln!(s, "deque output: {a}\nqrev output: {b}");
                if !holds {
                    let _ = writeln!(s, "counterexample: outputs differ");
                }
            }
            s
        }
    };
    Ok(Outcome { text, holds })
}
