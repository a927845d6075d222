//! `pdakit` command-line front end.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage or input
//! errors. Results go to stdout (or `-o`), diagnostics to stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdakit::actree::emit_actree;
use pdakit::convert::{self, TripleOptions, DEFAULT_RULE_BUDGET};
use pdakit::family::{self, BoundsReport, FamilyParams, DEFAULT_NODE_BUDGET};
use pdakit::format::{self, Automaton};
use pdakit::oracle::{self, EnumerationResult, PdaLimits};
use pdakit::pda::{random_pda, RandomPdaShape};
use pdakit::{Pda, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(name = "pdakit", version, about = "Pushdown automata, actrees and grammar conversions")]
struct Cli {
    /// Seed for random generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on rule instances created by the triple construction.
    #[arg(long, global = true, default_value_t = DEFAULT_RULE_BUDGET)]
    budget: u128,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Output path (default: stdout).
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the PDA P(n,k), or a random PDA with --random.
    GenFamily {
        #[command(flatten)]
        nk: FamilyArgs,
        /// Emit a small random PDA (uses --seed) instead of P(n,k).
        #[arg(long)]
        random: bool,
    },
    /// Length of the single word accepted by P(n,k).
    FamilyWord {
        #[command(flatten)]
        nk: FamilyArgs,
    },
    /// Conversions between PDAs, grammars and finite automata.
    Convert {
        #[command(subcommand)]
        kind: ConvertKind,
    },
    /// List the words of length at most --max-len accepted by an automaton.
    Simulate {
        input: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Print actrees: the unique accepting one of P(n,k), or all accepting
    /// ones of a PDA file up to --max-size nodes.
    Actree {
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        max_size: u64,
    },
    /// Checks; a negative answer exits with status 1.
    Check {
        #[command(subcommand)]
        kind: CheckKind,
    },
    /// Numeric reports.
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct FamilyArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
}

impl FamilyArgs {
    fn params(self) -> FamilyParams {
        FamilyParams { n: self.n, k: self.k }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct Bounds {
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: u64,
    #[arg(long, default_value_t = 2_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_stack: u64,
}

impl Bounds {
    fn limits(self) -> PdaLimits {
        PdaLimits { max_steps: self.max_steps as usize, max_stack: self.max_stack as usize }
    }
}

#[derive(Subcommand, Debug)]
enum ConvertKind {
    /// Triple construction.
    PdaToCfg {
        input: PathBuf,
        #[arg(long)]
        trim: bool,
    },
    /// Unary deterministic PDA (empty stack) to grammar.
    UdpdaToCfg { input: PathBuf },
    /// Unary deterministic PDA (final states) to grammar.
    UdpdaFinalToCfg { input: PathBuf },
    /// 2-1-NF grammar to a Parikh-equivalent automaton.
    CfgToParikhNfa {
        input: PathBuf,
        /// Largest multiset kept (default: variables + 1).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cap: Option<u64>,
    },
    /// Reduce, triple construction, multiset automaton.
    PdaToParikhNfa { input: PathBuf },
    /// Rewrite so that every action pushes at most two symbols.
    Reduce { input: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CheckKind {
    /// Same words up to --max-len.
    LangEquiv {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Same Parikh vectors up to --max-len.
    ParikhEquiv {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// At most one action applies in any configuration.
    Deterministic { input: PathBuf },
    /// Every action pushes at most two symbols.
    Reduced { input: PathBuf },
    /// Grammar is in 2-1 normal form.
    #[command(name = "21nf")]
    TwoOneNf { input: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ReportKind {
    /// Word length, dimension and grammar/automaton size bounds for P(n,k).
    Bounds {
        #[command(flatten)]
        nk: FamilyArgs,
        /// Sweep 1..N × 1..K instead of a single member.
        #[arg(long, num_args = 2, value_names = ["N", "K"], value_parser = clap::value_parser!(u32).range(1..))]
        grid: Option<Vec<u32>>,
    },
}

/// Failure modes mapped to exit codes.
enum Failure {
    /// A check answered no; the message goes to stdout.
    Negative(String),
    /// Bad input or an operation error.
    Error(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Automaton, Failure> {
    format::parse_automaton(&read(path)?)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load_pda(path: &Path) -> Result<Pda, Failure> {
    match load(path)? {
        Automaton::Pda(p) => Ok(p),
        other => Err(Failure::Error(format!("{}: expected a [pda], found [{}]", path.display(), other.kind()))),
    }
}

fn word_text(w: &Word) -> String {
    if w.is_empty() {
        format::EPS.to_string()
    } else {
        w.join(" ")
    }
}

fn emit_enumeration(r: &EnumerationResult, max_len: u64) -> String {
    let mut out = String::new();
    for w in &r.words {
        out.push_str(&word_text(w));
        out.push('\n');
    }
    let _ = writeln!(out, "# {} words up to length {max_len}, complete = {}", r.words.len(), r.complete);
    out
}

fn report_text(r: &BoundsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "P({},{})", r.n, r.k);
    let _ = writeln!(out, "n = {}", r.n);
    let _ = writeln!(out, "k = {}", r.k);
    let _ = writeln!(out, "p = {}", r.p);
    let _ = writeln!(out, "word_length = {}", r.word_length);
    let _ = writeln!(out, "word_length_log2 = {}", r.word_length_log2);
    let _ = writeln!(out, "dimension = {}", r.dimension);
    let _ = writeln!(out, "lower_2pow = {}", r.lower_2pow);
    let _ = writeln!(out, "cfg_textbook_vars = {}", r.cfg_textbook_vars);
    let _ = writeln!(out, "cfg_var_lower = {}", r.cfg_var_lower);
    let _ = writeln!(out, "fsa_lower_states = {}", r.fsa_lower_states);
    let _ = writeln!(out, "fsa_upper_states_log2 = {}", r.fsa_upper_states_log2);
    let _ = writeln!(out, "max_push_len = {}", r.max_push_len);
    out
}

fn render_reports(reports: &[BoundsReport], fmt: OutputFormat, single: bool) -> Result<String, Failure> {
    Ok(match fmt {
        OutputFormat::Json if single => serde_json::to_string_pretty(&reports[0])? + "\n",
        OutputFormat::Json => serde_json::to_string_pretty(reports)? + "\n",
        OutputFormat::Text => reports.iter().map(report_text).collect::<Vec<_>>().join("\n"),
    })
}

/// Reports for every `(n,k)` in `1..=gn × 1..=gk`, one worker thread per
/// member, merged in `(n,k)` order.
fn grid_reports(gn: u32, gk: u32) -> Result<Vec<BoundsReport>, Failure> {
    let members: Vec<FamilyParams> =
        (1..=gn).flat_map(|n| (1..=gk).map(move |k| FamilyParams { n, k })).collect();
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = members
            .iter()
            .map(|&m| s.spawn(move || family::bounds_report(m)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("report worker panicked")).collect()
    });
    results.into_iter().map(|r| r.map_err(Failure::from)).collect()
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::GenFamily { nk, random } => {
            let p = if *random {
                random_pda(&mut ChaCha8Rng::seed_from_u64(cli.seed), RandomPdaShape::default())
            } else {
                family::build_family_pda(nk.params())?
            };
            Ok(format::emit_pda(&p))
        }
        Command::FamilyWord { nk } => {
            let r = family::bounds_report(nk.params())?;
            Ok(match cli.format {
                OutputFormat::Text => format!(
                    "P({},{})\nword_length = {}\nword_length_log2 = {}\n",
                    r.n, r.k, r.word_length, r.word_length_log2
                ),
                OutputFormat::Json => {
                    let v = serde_json::json!({
                        "n": r.n,
                        "k": r.k,
                        "word_length": r.word_length.to_string(),
                        "word_length_log2": r.word_length_log2,
                    });
                    serde_json::to_string_pretty(&v)? + "\n"
                }
            })
        }
        Command::Convert { kind } => convert_command(cli, kind),
        Command::Simulate { input, bounds } => {
            let a = load(input)?;
            let r = oracle::enumerate_language(&a, bounds.max_len as usize, bounds.limits());
            Ok(emit_enumeration(&r, bounds.max_len))
        }
        Command::Actree { input, n, k, max_size } => match (input, n, k) {
            (Some(path), None, None) => {
                let p = load_pda(path)?;
                let mut out = String::new();
                for t in oracle::enumerate_actrees(&p, *max_size as usize).iter().filter(|t| t.accepting) {
                    out.push_str(&emit_actree(&t.tree, &p));
                }
                Ok(out)
            }
            (None, Some(n), Some(k)) => {
                let tree = family::build_unique_actree(FamilyParams::new(*n, *k)?)?;
                let t = tree.materialize(DEFAULT_NODE_BUDGET)?;
                Ok(emit_actree(&t, &tree.family.pda))
            }
            _ => Err(Failure::Error("actree takes either a PDA file or both --n and --k".into())),
        },
        Command::Check { kind } => check_command(kind),
        Command::Report { kind: ReportKind::Bounds { nk, grid } } => {
            let (reports, single) = match grid.as_deref() {
                Some(&[gn, gk]) => (grid_reports(gn, gk)?, false),
                _ => (vec![family::bounds_report(nk.params())?], true),
            };
            render_reports(&reports, cli.format, single)
        }
    }
}

fn convert_command(cli: &Cli, kind: &ConvertKind) -> Result<String, Failure> {
    Ok(match kind {
        ConvertKind::PdaToCfg { input, trim } => {
            let g = convert::pda_to_cfg_triples(&load_pda(input)?, TripleOptions { trim: *trim, budget: cli.budget })?;
            format::emit_cfg(&g)
        }
        ConvertKind::UdpdaToCfg { input } => format::emit_cfg(&convert::udpda_to_cfg(&load_pda(input)?)?),
        ConvertKind::UdpdaFinalToCfg { input } => {
            format::emit_cfg(&convert::udpda_final_to_cfg(&load_pda(input)?)?)
        }
        ConvertKind::CfgToParikhNfa { input, cap } => {
            let g = match load(input)? {
                Automaton::Cfg(g) => g,
                other => {
                    return Err(Failure::Error(format!(
                        "{}: expected a [cfg], found [{}]",
                        input.display(),
                        other.kind()
                    )))
                }
            };
            format::emit_fsa(&convert::cfg_to_parikh_fsa(&g, cap.map(|c| c as usize))?)
        }
        ConvertKind::PdaToParikhNfa { input } => {
            format::emit_fsa(&convert::pda_to_parikh_fsa(&load_pda(input)?, cli.budget)?)
        }
        ConvertKind::Reduce { input } => format::emit_pda(&load_pda(input)?.to_reduced_form()),
    })
}

fn complete_pair(left: &Path, right: &Path, bounds: &Bounds) -> Result<(EnumerationResult, EnumerationResult), Failure> {
    let len = bounds.max_len as usize;
    let l = oracle::enumerate_language(&load(left)?, len, bounds.limits());
    let r = oracle::enumerate_language(&load(right)?, len, bounds.limits());
    for (res, path) in [(&l, left), (&r, right)] {
        if !res.complete {
            return Err(Failure::Error(format!(
                "{}: enumeration incomplete at length {len}; raise --max-steps or --max-stack",
                path.display()
            )));
        }
    }
    Ok((l, r))
}

fn check_command(kind: &CheckKind) -> Result<String, Failure> {
    let verdict = |ok: bool, yes: String, no: String| if ok { Ok(yes + "\n") } else { Err(Failure::Negative(no)) };
    match kind {
        CheckKind::LangEquiv { left, right, bounds } => {
            let (l, r) = complete_pair(left, right, bounds)?;
            let first = l.words.symmetric_difference(&r.words).next().cloned();
            verdict(
                first.is_none(),
                format!("equivalent up to length {}", bounds.max_len),
                format!(
                    "not equivalent: `{}` is accepted by only one side",
                    first.as_ref().map(word_text).unwrap_or_default()
                ),
            )
        }
        CheckKind::ParikhEquiv { left, right, bounds } => {
            let (l, r) = complete_pair(left, right, bounds)?;
            let cmp = oracle::parikh_equiv_upto(&l, &r)?;
            let diff = cmp
                .only_left
                .iter()
                .map(|v| (v, "left"))
                .chain(cmp.only_right.iter().map(|v| (v, "right")))
                .min();
            verdict(
                cmp.equal,
                format!("Parikh-equivalent up to length {}", bounds.max_len),
                diff.map(|(v, side)| format!("not Parikh-equivalent: {v} occurs only on the {side}"))
                    .unwrap_or_default(),
            )
        }
        CheckKind::Deterministic { input } => {
            let p = load_pda(input)?;
            match p.check_deterministic() {
                Ok(()) => Ok("deterministic\n".into()),
                Err(c) => Err(Failure::Negative(format!(
                    "not deterministic: {} and {}",
                    p.describe_action(p.action(c.first)),
                    p.describe_action(p.action(c.second))
                ))),
            }
        }
        CheckKind::Reduced { input } => {
            let p = load_pda(input)?;
            verdict(
                p.is_reduced_form(),
                "reduced form".into(),
                format!("not in reduced form: an action pushes {} symbols", p.max_push_len()),
            )
        }
        CheckKind::TwoOneNf { input } => {
            let g = match load(input)? {
                Automaton::Cfg(g) => g,
                other => return Err(Failure::Error(format!("expected a [cfg], found [{}]", other.kind()))),
            };
            let bad = g.rules.iter().find(|r| r.terminals().count() > 1 || r.variables().count() > 2);
            verdict(
                bad.is_none(),
                "2-1 normal form".into(),
                format!("not in 2-1 normal form: {}", bad.map(|r| g.describe_rule(r)).unwrap_or_default()),
            )
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match run(&cli) {
        Ok(text) => (text, ExitCode::SUCCESS),
        Err(Failure::Negative(msg)) => (msg + "\n", ExitCode::from(1)),
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_output(cli.output.as_deref(), &text) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    code
}
