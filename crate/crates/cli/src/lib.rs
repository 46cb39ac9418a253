//! Command-line front end. [`run`] is a pure function of its arguments so it
//! can be driven from tests as well as from `main`.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kakeya::expander::{
    count_prefixes, digit_frequency, enumerate_expansions, feasible_prefix, greedy_expand,
    kakeya_partition, lazy_expand, theorem14_construct, ExpansionCertificate, DEFAULT_WINDOW,
};
use kakeya::fibonacci::{binet_nearest_check, cassini_check, fib, lemma31_check};
use kakeya::sequences::{perturbation_check, CheckReport};
use kakeya::{
    DigitPrefix, Error, Feasibility, Interval, QuadRat, Rational, Refinement, Sequence,
    SequenceDescriptor, TargetValue, TiePolicy,
};
use serde_json::{json, Map, Value};

mod render;

pub use render::Format;

#[derive(Parser, Debug)]
#[command(name = "kakeya", version, about = "Exact binary expansions over Kakeya sequences")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Number of refinement steps before a comparison is reported undecided.
    #[arg(long, global = true, default_value_t = Refinement::default().cap)]
    cap: u32,
    /// Starting enclosure width, as an exact rational or decimal.
    #[arg(long, global = true, default_value = "1/1000", value_parser = positive_rational)]
    width: Rational,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fibonacci numbers F_from..=F_to.
    Fib(Range),
    /// Cassini's identity F_n^2 = F_{n-1} F_{n+1} + (-1)^{n+1}.
    Cassini(Range),
    /// F_n against phi^n / sqrt5.
    Binet(Range),
    /// F_{n+1} <= 2 F_n, with equality flags.
    Doubling(Range),
    /// Enclosure of S = sum of 1/F_i.
    SConst,
    /// p_n <= T_n (or strict) on [1, N].
    CheckKakeya {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long)]
        n: usize,
        /// Check p_n < T_n instead of p_n <= T_n.
        #[arg(long)]
        strict: bool,
    },
    /// Indices n in [2, N] with p_{n-1} < T_n.
    Special {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long)]
        n: usize,
    },
    /// Minimum consecutive ratio against 1/phi.
    Rho {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Perturbation condition (1 + inf eps)/(1 + sup eps) >= q - 1.
    Perturb {
        /// Takes the bounds from a perturbed sequence descriptor.
        #[arg(long, conflicts_with_all = ["inf", "sup", "q"])]
        seq: Option<SequenceDescriptor>,
        #[arg(long, requires_all = ["sup", "q"], allow_hyphen_values = true)]
        inf: Option<QuadRat>,
        #[arg(long, allow_hyphen_values = true)]
        sup: Option<QuadRat>,
        #[arg(long)]
        q: Option<QuadRat>,
    },
    /// Digit expansion of a target.
    Expand {
        #[arg(value_enum)]
        rule: Rule,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        digits: usize,
        /// Bin preferred by the partition rule when both fit.
        #[arg(long, value_enum, default_value_t = Tie::Target)]
        tie: Tie,
    },
    /// Whether a digit prefix extends to an expansion.
    Feasible {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        bits: DigitPrefix,
    },
    /// Number of feasible prefixes per length.
    Count {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        depth: usize,
    },
    /// First feasible prefixes of a given length.
    Enumerate {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Free-digit indices with every pattern certified.
    BranchPlan {
        #[command(flatten)]
        target: TargetArgs,
        /// Number of free digits.
        #[arg(long)]
        m: usize,
        /// Largest index searched.
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        /// Also check all 2^m patterns at this prefix length.
        #[arg(long)]
        verify_depth: Option<usize>,
    },
    /// Share of ones in a digit string, or in a greedy expansion.
    Freq {
        #[arg(long, conflicts_with_all = ["seq", "x", "digits"])]
        bits: Option<DigitPrefix>,
        #[arg(long, requires_all = ["x", "digits"])]
        seq: Option<SequenceDescriptor>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<TargetValue>,
        #[arg(long)]
        digits: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Range {
    #[arg(long, default_value_t = 1)]
    from: usize,
    #[arg(long)]
    to: usize,
}

#[derive(Args, Debug)]
struct SeqArg {
    /// geometric:<q>, fibonacci, perturbed-golden[:<q>], custom:<path>,
    /// custom-inline:<t1>,<t2>,...;<lo>,<hi>
    #[arg(long)]
    seq: SequenceDescriptor,
}

#[derive(Args, Debug)]
struct TargetArgs {
    #[command(flatten)]
    seq: SeqArg,
    /// p/q, decimal, a+b*sqrt5, or relative to the sum: S, S/2, S-1/100.
    #[arg(long, allow_hyphen_values = true)]
    x: TargetValue,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rule {
    Greedy,
    Lazy,
    Partition,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Tie {
    Target,
    Complement,
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let r: Rational = s.parse().map_err(|e: Error| e.to_string())?;
    if r.signum() <= 0 {
        return Err(format!("{s} is not positive"));
    }
    Ok(r)
}

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome {
            code: 0,
            stdout: render::render(&report, cli.global.format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// A report is an ordered map of fields; a `rows` field holding an array
/// of flat objects is rendered as a table.
type Report = Map<String, Value>;

fn s(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

fn interval(iv: &Interval) -> Value {
    json!({ "lo": s(iv.lo()), "hi": s(iv.hi()) })
}

fn report(pairs: Vec<(&str, Value)>) -> Report {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn sequence(seq: &SeqArg, g: &Global) -> kakeya::Result<Sequence> {
    Sequence::with_refinement(seq.seq.clone(), Refinement::with_cap(g.cap))
}

fn range_rows(r: &Range, first: usize, row: impl Fn(usize) -> kakeya::Result<Value>) -> kakeya::Result<Vec<Value>> {
    if r.from < first || r.to < r.from {
        return Err(Error::Precondition(format!("range [{}, {}] must satisfy {first} <= from <= to", r.from, r.to)));
    }
    (r.from..=r.to).map(row).collect()
}

fn check_rows(rep: &CheckReport) -> Value {
    rep.entries
        .iter()
        .map(|e| json!({ "n": e.index, "verdict": s(e.verdict), "equality": e.equality }))
        .collect()
}

fn certificate_fields(c: &ExpansionCertificate) -> Vec<(&'static str, Value)> {
    vec![
        ("seq", s(&c.descriptor)),
        ("target", s(&c.target)),
        ("bits", s(&c.prefix)),
        ("partial", s(&c.partial)),
        ("residual", interval(&c.residual)),
        ("feasible", s(c.feasible)),
    ]
}

fn execute(cli: &Cli) -> kakeya::Result<Report> {
    let g = &cli.global;
    let w = &g.width;
    Ok(match &cli.command {
        Command::Fib(r) => {
            let rows = range_rows(r, 1, |n| Ok(json!({ "n": n, "F_n": s(fib(n)) })))?;
            report(vec![("rows", Value::Array(rows))])
        }
        Command::Cassini(r) => {
            let rows = range_rows(r, 2, |n| Ok(json!({ "n": n, "holds": cassini_check(n)? })))?;
            let all = rows.iter().all(|v| v["holds"] == Value::Bool(true));
            report(vec![("all_hold", Value::Bool(all)), ("rows", Value::Array(rows))])
        }
        Command::Binet(r) => {
            let rows = range_rows(r, 1, |n| {
                let b = binet_nearest_check(n)?;
                Ok(json!({
                    "n": n,
                    "deviation": s(&b.deviation),
                    "nearest": b.nearest,
                    "identity": b.identity,
                }))
            })?;
            let all = rows
                .iter()
                .all(|v| v["nearest"] == Value::Bool(true) && v["identity"] == Value::Bool(true));
            report(vec![("all_hold", Value::Bool(all)), ("rows", Value::Array(rows))])
        }
        Command::Doubling(r) => {
            let rows = range_rows(r, 1, |n| {
                let d = lemma31_check(n)?;
                Ok(json!({ "n": n, "holds": d.holds, "equality": d.equality }))
            })?;
            let all = rows.iter().all(|v| v["holds"] == Value::Bool(true));
            report(vec![("all_hold", Value::Bool(all)), ("rows", Value::Array(rows))])
        }
        Command::SConst => {
            let seq = Sequence::with_refinement(SequenceDescriptor::FibonacciReciprocal, Refinement::with_cap(g.cap))?;
            let iv = seq.tail_enclosure(0, w)?;
            let digits = decimal_digits(w);
            report(vec![
                ("enclosure", interval(&iv)),
                ("width", s(iv.width())),
                ("midpoint", s(iv.midpoint())),
                ("decimal", s(iv.midpoint().to_decimal(digits))),
            ])
        }
        Command::CheckKakeya { seq, n, strict } => {
            let rep = sequence(seq, g)?.kakeya_check(*n, *strict, w)?;
            report(vec![
                ("property", s(&rep.property)),
                ("all_hold", Value::Bool(rep.all_hold())),
                ("failures", json!(rep.failures())),
                ("undecided", json!(rep.undecided())),
                ("rows", check_rows(&rep)),
            ])
        }
        Command::Special { seq, n } => {
            let (special, rep) = sequence(seq, g)?.special_indices(*n, w)?;
            report(vec![
                ("special", json!(special)),
                ("undecided", json!(rep.undecided())),
                ("note", s(rep.note.as_deref().unwrap_or(""))),
            ])
        }
        Command::Rho { seq, n } => {
            let r = sequence(seq, g)?.rho_check(*n)?;
            report(vec![
                ("holds", Value::Bool(r.holds)),
                ("rho", s(&r.rho)),
                ("argmin", json!(r.argmin)),
                ("threshold", s(QuadRat::phi() - QuadRat::one())),
            ])
        }
        Command::Perturb { seq, inf, sup, q } => {
            let (inf, sup, q) = match (seq, inf, sup, q) {
                (Some(d), _, _, _) => d
                    .perturbation_bounds()
                    .ok_or_else(|| Error::Precondition(format!("{d} carries no perturbation")))?,
                (None, Some(i), Some(s), Some(q)) => (i.clone(), s.clone(), q.clone()),
                _ => return Err(Error::Precondition("give --seq or all of --inf, --sup, --q".into())),
            };
            let r = perturbation_check(&inf, &sup, &q)?;
            report(vec![
                ("holds", Value::Bool(r.holds)),
                ("equality", Value::Bool(r.equality)),
                ("ratio", s(&r.ratio)),
                ("q_minus_1", s(&q - &QuadRat::one())),
            ])
        }
        Command::Expand { rule, target, digits, tie } => {
            let seq = sequence(&target.seq, g)?;
            match rule {
                Rule::Greedy => report(certificate_fields(&greedy_expand(&seq, &target.x, *digits, w)?)),
                Rule::Lazy => report(certificate_fields(&lazy_expand(&seq, &target.x, *digits, w)?)),
                Rule::Partition => {
                    let tie = match tie {
                        Tie::Target => TiePolicy::PreferTarget,
                        Tie::Complement => TiePolicy::PreferComplement,
                    };
                    let (bins, complement) = kakeya_partition(&seq, &target.x, *digits, tie, w)?;
                    report(vec![
                        ("seq", s(seq.descriptor())),
                        ("target", s(&target.x)),
                        ("bits", s(&bins)),
                        ("complement", s(&complement)),
                    ])
                }
            }
        }
        Command::Feasible { target, bits } => {
            let seq = sequence(&target.seq, g)?;
            let f = feasible_prefix(&seq, &target.x, bits, w)?;
            report(vec![("bits", s(bits)), ("feasible", s(f))])
        }
        Command::Count { target, depth } => {
            let seq = sequence(&target.seq, g)?;
            let c = count_prefixes(&seq, &target.x, *depth, w)?;
            let rows = (0..=*depth)
                .map(|l| json!({ "level": l, "feasible": c.feasible[l], "undecided": c.undecided[l] }))
                .collect();
            report(vec![("rows", Value::Array(rows))])
        }
        Command::Enumerate { target, count, depth } => {
            let seq = sequence(&target.seq, g)?;
            let certs = enumerate_expansions(&seq, &target.x, *count, *depth, w)?;
            let rows = certs
                .iter()
                .map(|c| {
                    json!({
                        "bits": s(&c.prefix),
                        "partial": s(&c.partial),
                        "residual_lo": s(c.residual.lo()),
                        "residual_hi": s(c.residual.hi()),
                    })
                })
                .collect();
            report(vec![("rows", Value::Array(rows))])
        }
        Command::BranchPlan { target, m, window, verify_depth } => {
            let seq = sequence(&target.seq, g)?;
            let plan = theorem14_construct(&seq, &target.x, *m, w, *window)?;
            let mut out = report(vec![
                ("special", json!(plan.special)),
                ("sum", s(&plan.sum)),
                ("budget", interval(&plan.budget)),
                ("window", json!(plan.window)),
                ("ratio_threshold", json!(plan.ratio_threshold)),
            ]);
            if let Some(depth) = verify_depth {
                let mut feasible = 0u64;
                for word in 0..(1u64 << plan.special.len()) {
                    let bits = DigitPrefix::from_word(word, plan.special.len());
                    if plan.pattern_feasibility(&seq, bits.bits(), *depth, w)? == Feasibility::Feasible {
                        feasible += 1;
                    }
                }
                out.insert("patterns".into(), json!(1u64 << plan.special.len()));
                out.insert("patterns_feasible".into(), json!(feasible));
            }
            out
        }
        Command::Freq { bits, seq, x, digits } => {
            let prefix = match (bits, seq, x, digits) {
                (Some(b), _, _, _) => b.clone(),
                (None, Some(d), Some(x), Some(n)) => {
                    let seq = Sequence::with_refinement(d.clone(), Refinement::with_cap(g.cap))?;
                    greedy_expand(&seq, x, *n, w)?.prefix
                }
                _ => return Err(Error::Precondition("give --bits or all of --seq, --x, --digits".into())),
            };
            let f = digit_frequency(&prefix)?;
            report(vec![
                ("bits", s(&prefix)),
                ("ones", json!(f.ones)),
                ("zeros", json!(f.zeros)),
                ("ratio", s(&f.ratio)),
            ])
        }
    })
}

/// Decimal places that a width can support: the largest d with 10^-d >= width.
fn decimal_digits(width: &Rational) -> usize {
    let mut d = 0;
    let mut step = Rational::one();
    while &step / &Rational::from(10) >= *width {
        step = &step / &Rational::from(10);
        d += 1;
    }
    d
}
