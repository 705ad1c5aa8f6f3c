use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lcu_core::convergence::{big_step, EvalOutcome};
use lcu_core::deriv_syntax::parse_derivation;
use lcu_core::filter::{build_domain, EnvN};
use lcu_core::harness::{run_suite, GenConfig};
use lcu_core::moggi::{from_moggi, parse_moggi, to_moggi};
use lcu_core::parse::{parse_comp, parse_term};
use lcu_core::reduction::{normalize, Outcome, Rules};
use lcu_core::term::Term;
use lcu_core::type_parse::parse_type;
use lcu_core::types::{leq_c_eta, leq_v_eta, enumerate_types, AtomTable, EtaMode, Type};
use lcu_core::typing::{check_derivation, infer_bounded, Basis};

const OK: u8 = 0;
const FALSE: u8 = 1;
const INCONCLUSIVE: u8 = 3;
const ETA_DEPTH: usize = 3;

#[derive(Parser)]
#[command(name = "lcu", version, about = "Untyped computational lambda-calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Step or rule-application budget.
    #[arg(long, default_value_t = 1000)]
    fuel: usize,
    /// Comma-separated rules: betac,id,ass[,etac].
    #[arg(long, default_value = "betac,id,ass")]
    rules: String,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    #[arg(long)]
    width: Option<usize>,
    /// File declaring atoms (`@a @b`) and their order (`@a <= @b`).
    #[arg(long)]
    atoms: Option<PathBuf>,
    /// none, scott or park.
    #[arg(long, default_value = "none")]
    eta: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and pretty-print a term.
    Fmt {
        term: String,
        #[command(flatten)]
        common: Common,
    },
    /// Leftmost-outermost reduction with a step trace.
    Reduce {
        term: String,
        #[command(flatten)]
        common: Common,
    },
    /// Big-step evaluation of a closed computation.
    Eval {
        term: String,
        #[command(flatten)]
        common: Common,
    },
    /// Decide `A <= B`, `A >= B` or `A = B`.
    Subtype {
        left: String,
        op: String,
        right: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a derivation file.
    Typecheck {
        file: String,
        #[command(flatten)]
        common: Common,
    },
    /// Every type of bounded rank and width derivable for a closed term.
    Infer {
        term: String,
        #[command(flatten)]
        common: Common,
    },
    /// Translate to or from the let-calculus.
    Translate {
        term: String,
        #[arg(long, conflicts_with = "from_moggi", required_unless_present = "from_moggi")]
        to_moggi: bool,
        #[arg(long)]
        from_moggi: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Interpretation in the rank-n filter domain.
    Interp {
        term: Option<String>,
        /// Print the lattice as a DOT diagram.
        #[arg(long)]
        table: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a property suite.
    Prop {
        suite: String,
        #[arg(long, default_value_t = 25)]
        max_size: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FALSE)
        }
    }
}

type Res<T> = Result<T, Box<dyn std::error::Error>>;

/// Inline text, a file path, or `-` for stdin.
fn source(arg: &str) -> Res<String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    let p = Path::new(arg);
    if p.exists() && !p.is_dir() {
        return Ok(std::fs::read_to_string(p)?);
    }
    Ok(arg.to_string())
}

fn table(c: &Common) -> Res<AtomTable> {
    match &c.atoms {
        Some(p) => Ok(AtomTable::parse(&std::fs::read_to_string(p)?)?),
        None => Ok(AtomTable::empty()),
    }
}

fn rules(c: &Common) -> Res<Rules> {
    let r: Rules = c.rules.parse()?;
    if r.non_confluent_mode() {
        eprintln!("warning: etac enabled, reduction is not confluent");
    }
    Ok(r)
}

fn print_json(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).unwrap());
}

fn run(cmd: Cmd) -> Res<u8> {
    match cmd {
        Cmd::Fmt { term, common } => {
            let t = parse_term(&source(&term)?)?;
            if common.json {
                print_json(json!({ "term": t.to_string() }));
            } else {
                println!("{t}");
            }
            Ok(OK)
        }
        Cmd::Reduce { term, common } => {
            let m = parse_comp(&source(&term)?)?;
            let n = normalize(&m, rules(&common)?, common.fuel);
            let (status, last, code) = match &n.outcome {
                Outcome::NormalForm(t) => ("normal-form", t, OK),
                Outcome::FuelExhausted(t) => ("fuel-exhausted", t, INCONCLUSIVE),
            };
            if common.json {
                let trace: Vec<_> = n.trace.iter().map(|s| s.to_json()).collect();
                print_json(json!({ "trace": trace, "outcome": status, "steps": n.trace.len(), "term": last.to_string() }));
            } else {
                for s in &n.trace {
                    println!("{}", s.trace_line());
                }
                match &n.outcome {
                    Outcome::NormalForm(t) => println!("normal form: {t}"),
                    Outcome::FuelExhausted(t) => println!("fuel-exhausted after {} steps: {t}", n.trace.len()),
                }
            }
            Ok(code)
        }
        Cmd::Eval { term, common } => {
            let m = parse_comp(&source(&term)?)?;
            let out = big_step(&m, common.fuel);
            if common.json {
                let v = match &out {
                    EvalOutcome::Converges(v) => json!({ "outcome": "converges", "value": v.to_string() }),
                    EvalOutcome::FuelExhausted { steps } => json!({ "outcome": "fuel-exhausted", "steps": steps }),
                    EvalOutcome::Diverges { steps } => json!({ "outcome": "diverges", "steps": steps }),
                    EvalOutcome::OpenTermError(xs) => {
                        let names: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                        json!({ "outcome": "open-term", "free": names })
                    }
                };
                print_json(v);
            } else {
                println!("{out}");
            }
            Ok(match out {
                EvalOutcome::Converges(_) => OK,
                EvalOutcome::FuelExhausted { .. } => INCONCLUSIVE,
                _ => FALSE,
            })
        }
        Cmd::Subtype { left, op, right, common } => {
            let t = table(&common)?;
            let mode: EtaMode = common.eta.parse()?;
            let a = parse_type(&source(&left)?)?;
            let b = parse_type(&source(&right)?)?;
            let le = |x: &Type, y: &Type| -> Res<bool> {
                match (x, y) {
                    (Type::V(x), Type::V(y)) => Ok(leq_v_eta(x, y, &t, mode, ETA_DEPTH)?),
                    (Type::C(x), Type::C(y)) => Ok(leq_c_eta(x, y, &t, mode, ETA_DEPTH)?),
                    _ => Err("the two types have different sorts".into()),
                }
            };
            let verdict = match op.as_str() {
                "<=" => le(&a, &b)?,
                ">=" => le(&b, &a)?,
                "=" | "==" => le(&a, &b)? && le(&b, &a)?,
                other => return Err(format!("unknown relation `{other}`, expected <=, >= or =").into()),
            };
            // under eta the decider is sound but not complete
            let answer = match (verdict, mode) {
                (true, _) => "true",
                (false, EtaMode::None) => "false",
                (false, _) => "unknown",
            };
            if common.json {
                print_json(json!({ "left": a.to_string(), "op": op, "right": b.to_string(), "result": answer }));
            } else {
                println!("{answer}");
            }
            Ok(match answer {
                "true" => OK,
                "false" => FALSE,
                _ => INCONCLUSIVE,
            })
        }
        Cmd::Typecheck { file, common } => {
            let t = table(&common)?;
            let d = parse_derivation(&source(&file)?)?;
            let report = check_derivation(&d, &t);
            if common.json {
                let errs: Vec<_> =
                    report.errors.iter().map(|e| json!({ "path": e.path, "message": e.message })).collect();
                print_json(json!({ "valid": report.is_valid(), "conclusion": d.concl.to_string(), "errors": errs }));
            } else if report.is_valid() {
                println!("valid: {}", d.concl);
            } else {
                for e in &report.errors {
                    println!("{e}");
                }
            }
            Ok(if report.is_valid() { OK } else { FALSE })
        }
        Cmd::Infer { term, common } => {
            let t = table(&common)?;
            let subject = parse_term(&source(&term)?)?;
            let universe = enumerate_types(common.rank, common.width, &t);
            let basis = Basis(subject.free_vars().into_iter().map(|x| (x, lcu_core::types::VType::Omega)).collect());
            let types = infer_bounded(&basis, &subject, &universe, &t);
            if common.json {
                let ts: Vec<String> = types.iter().map(|x| x.to_string()).collect();
                print_json(json!({ "rank": common.rank, "width": common.width, "types": ts }));
            } else {
                println!("# bounded search: rank <= {}, width <= {:?}", common.rank, common.width);
                for ty in &types {
                    println!("{ty}");
                }
            }
            Ok(OK)
        }
        Cmd::Translate { term, to_moggi: to, common, .. } => {
            let src = source(&term)?;
            let out = if to { to_moggi(&parse_term(&src)?).to_string() } else { from_moggi(&parse_moggi(&src)?).to_string() };
            if common.json {
                print_json(json!({ "input": src.trim(), "output": out }));
            } else {
                println!("{out}");
            }
            Ok(OK)
        }
        Cmd::Interp { term, table: dot, common } => {
            let t = table(&common)?;
            let dom = build_domain(common.rank, &t)?;
            if dot {
                print!("{}", dom.to_dot());
                if term.is_none() {
                    return Ok(OK);
                }
            }
            let Some(term) = term else { return Err("a term is required unless --table is given".into()) };
            let generator = match parse_term(&source(&term)?)? {
                Term::Comp(m) => Type::C(dom.interp_comp(&m, &EnvN::new())?.to_ctype()),
                Term::Value(v) => Type::V(dom.interp_value(&v, &EnvN::new())?.to_vtype()),
            };
            if common.json {
                print_json(json!({ "rank": common.rank, "generator": generator.to_string() }));
            } else if !dot {
                println!("{generator}");
            }
            Ok(OK)
        }
        Cmd::Prop { suite, max_size, common } => {
            let cfg = GenConfig {
                seed: common.seed,
                cases: common.cases,
                max_size,
                closed: true,
                rules: common.rules.parse()?,
                fuel: common.fuel,
                rank: common.rank,
                width: common.width.or(Some(2)),
                table: table(&common)?,
            };
            let report = run_suite(&suite, &cfg)?;
            if common.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{}", report.summary());
                for f in &report.failures {
                    println!("case {} (seed {}): {}", f.case, f.seed, f.detail);
                    println!("  term:      {}", f.term);
                    println!("  minimized: {}", f.minimized);
                }
            }
            Ok(if report.ok() { OK } else { FALSE })
        }
    }
}
