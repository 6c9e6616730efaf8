use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgGroup, Parser, Subcommand};
use gamemem::conditions::{replay, HarnessReport};
use gamemem::io;
use gamemem::strategy::product_arena;
use gamemem::verify::DEFAULT_BUDGET;
use gamemem::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gamemem", version, about = "Finite-memory equilibria in games on colored graphs")]
struct Cli {
    /// Seed for sampled runs. Every current subcommand is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker count. Accepted for compatibility; work runs on one thread.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse input files and report their sizes. A `.strat` file needs `--arena`.
    Validate {
        files: Vec<PathBuf>,
        #[arg(long)]
        arena: Option<PathBuf>,
    },
    /// Product of an arena with one or more skeletons.
    Product {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long = "skel", required = true)]
        skels: Vec<PathBuf>,
        /// Keep every (state, memory) pair instead of those reachable from S x {m_init}.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a skeleton covers an arena from a set of states.
    Covers {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        skel: PathBuf,
        /// `all`, a comma-separated list of state names, or `S×<m>` for the
        /// product states `(s,<m>)`; `minit` stands for the initial memory state.
        #[arg(long)]
        cov: String,
        #[arg(long, value_parser = ["both", "prefix", "cyclic"], default_value = "both")]
        check: String,
    },
    /// Synthesize an equilibrium and write `sigma1.strat` and `sigma2.strat`.
    #[command(group(ArgGroup::new("mode").required(true).args(["cov", "general"])))]
    Solve {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        pref: PathBuf,
        /// With `--cov`: one skeleton for everything, two as (prefix, cyclic)
        /// for both players, or four as P1 prefix, P1 cyclic, P2 prefix, P2 cyclic.
        /// With `--general`: any number, combined by product.
        #[arg(long = "skel")]
        skels: Vec<PathBuf>,
        #[arg(long)]
        cov: Option<String>,
        #[arg(long)]
        general: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Skip the equilibrium check of the result.
        #[arg(long)]
        no_verify: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check a strategy pair against unilateral deviations.
    Verify {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        pref: PathBuf,
        #[arg(long)]
        s1: PathBuf,
        #[arg(long)]
        s2: PathBuf,
        #[arg(long, default_value = "all")]
        start: String,
        /// `memoryless`, `upto:<k>`, `unbounded` or `skel:<file>`.
        #[arg(long, default_value = "memoryless")]
        class: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Search for monotony or selectivity violations of a relation.
    TestConditions {
        #[arg(long)]
        pref: PathBuf,
        #[arg(long)]
        skel: Option<PathBuf>,
        #[arg(long, value_parser = ["monotony", "selectivity", "both"], default_value = "both")]
        condition: String,
        /// `nfa:<max states>` or `lasso:<max length>`.
        #[arg(long, default_value = "nfa:2")]
        family: String,
        #[arg(long, default_value_t = 3)]
        words: usize,
        #[arg(long)]
        budget_instances: Option<u64>,
        #[arg(long)]
        budget_seconds: Option<f64>,
        /// Write the first violation found as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-check a violation written by `--out` instead of searching.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Try to beat every small P1 Mealy strategy with a losing lasso.
    Counterexample {
        #[arg(long)]
        arena: PathBuf,
        #[arg(long)]
        pref: PathBuf,
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 2)]
        max_states: usize,
        #[arg(long, default_value_t = 8)]
        max_cycle: usize,
    },
    /// DOT rendering of an arena, skeleton, automaton or strategy (with `--arena`).
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        arena: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Fail {
    Usage(String),
    Game(GameError),
}

impl From<GameError> for Fail {
    fn from(e: GameError) -> Self {
        Fail::Game(e)
    }
}

type Run<T> = std::result::Result<T, Fail>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Fail::Usage(msg.into()))
}

fn read(p: &Path) -> Run<String> {
    std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn write(p: &Path, s: &str) -> Run<()> {
    std::fs::write(p, s).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn in_file<T>(p: &Path, r: Result<T>) -> Run<T> {
    r.map_err(|e| match e {
        GameError::Parse { line, msg } => Fail::Usage(format!("{}:{line}: {msg}", p.display())),
        e => Fail::Usage(format!("{}: {e}", p.display())),
    })
}

fn arena(p: &Path) -> Run<Arena> {
    in_file(p, io::parse_arena(&read(p)?))
}

fn skel(p: &Path) -> Run<MemorySkeleton> {
    in_file(p, io::parse_skeleton(&read(p)?))
}

fn pref(p: &Path, a: Option<&Arena>) -> Run<Relation> {
    let r = in_file(p, io::parse_relation(&read(p)?))?;
    match a {
        Some(a) => in_file(p, r.align_to(a.colors())),
        None => Ok(r),
    }
}

fn strat(p: &Path, a: &Arena) -> Run<MealyStrategy> {
    in_file(p, io::parse_strategy(&read(p)?, a))
}

fn emit(v: Value) {
    println!("{v}");
}

fn ext(p: &Path) -> &str {
    p.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn states(a: &Arena, sel: &str, init_name: Option<&str>) -> Run<Vec<usize>> {
    let sel = sel.trim();
    if sel == "all" {
        return Ok((0..a.n_states()).collect());
    }
    let layer = sel.strip_prefix("S×").or_else(|| sel.strip_prefix("S*"));
    if let Some(m) = layer {
        let m = match (m, init_name) {
            ("minit", Some(i)) => i,
            ("minit", None) => return usage("`minit` needs a skeleton"),
            (m, _) => m,
        };
        let suffix = format!(",{m})");
        let out: Vec<usize> = (0..a.n_states()).filter(|&s| a.name(s).ends_with(&suffix)).collect();
        if out.is_empty() {
            return usage(format!("no state of the form (s,{m})"));
        }
        return Ok(out);
    }
    split_top(sel)
        .into_iter()
        .map(|n| a.state_index(n.trim()).ok_or_else(|| Fail::Usage(format!("unknown state `{}`", n.trim()))))
        .collect()
}

/// Splits on commas outside parentheses, so product names like `(s,m)` survive.
fn split_top(s: &str) -> Vec<&str> {
    let (mut out, mut depth, mut from) = (Vec::new(), 0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[from..i]);
                from = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[from..]);
    out
}

fn names(a: &Arena, ss: &[usize]) -> Vec<String> {
    ss.iter().map(|&s| a.name(s).to_string()).collect()
}

fn lasso_json(a: &Arena, l: &Lasso) -> Value {
    let c = l.colors();
    let word = |w: &[usize]| w.iter().map(|&x| a.color_name(x).to_string()).collect::<Vec<_>>();
    json!({ "start": a.name(l.start()), "prefix": word(c.u()), "cycle": word(c.v()) })
}

fn history_json(a: &Arena, h: &History) -> Value {
    let edges: Vec<String> = h.edges.iter().map(|e| format!("{}-{}->{}", a.name(e.src), a.color_name(e.color), a.name(e.dst))).collect();
    json!(edges)
}

fn cover_json(a: &Arena, sk: &MemorySkeleton, check: &str, r: &CoverReport) -> Value {
    let violation = r.violation.as_ref().map(|v| match v {
        covers::Violation::Prefix { state, first, first_mem, second, second_mem } => json!({
            "state": a.name(*state),
            "first": history_json(a, first), "first_memory": sk.name(*first_mem),
            "second": history_json(a, second), "second_memory": sk.name(*second_mem),
        }),
        covers::Violation::Cyclic { state, history, mem, cycle, after } => json!({
            "state": a.name(*state),
            "history": history_json(a, history), "memory": sk.name(*mem),
            "cycle": history_json(a, cycle), "after": sk.name(*after),
        }),
    });
    let assignment: serde_json::Map<String, Value> = r
        .assignment
        .iter()
        .enumerate()
        .filter_map(|(s, m)| m.map(|m| (a.name(s).to_string(), json!(sk.name(m)))))
        .collect();
    json!({ "command": "covers", "check": check, "verdict": r.verdict, "assignment": assignment, "violation": violation })
}

fn class_of(sel: &str, colors: &[String]) -> Run<DeviationClass> {
    match sel.split_once(':') {
        None if sel == "memoryless" => Ok(DeviationClass::memoryless(colors)),
        None if sel == "unbounded" => Ok(DeviationClass::Unbounded),
        Some(("upto", k)) => k.parse().map(DeviationClass::UpTo).map_err(|_| Fail::Usage(format!("bad bound `{k}`"))),
        Some(("skel", f)) => Ok(DeviationClass::Skeleton(skel(Path::new(f))?)),
        _ => usage(format!("unknown deviation class `{sel}`")),
    }
}

fn verdict_json(a: &Arena, v: &NeVerdict) -> Value {
    let values: Vec<Value> = v.values.iter().map(|(_, l)| lasso_json(a, l)).collect();
    let witness = v.witness.as_ref().map(|w| {
        json!({
            "player": w.player.to_string(),
            "start": a.name(w.start),
            "memory_states": w.strategy.skeleton().n_states(),
            "play": lasso_json(a, &w.lasso),
        })
    });
    json!({ "command": "verify", "verdict": v.verdict, "class": v.class, "values": values, "witness": witness })
}

/// `Some(verdict)`, or `None` when the budget ran out.
fn check_ne(
    a: &Arena,
    r: &Relation,
    res: &EquilibriumResult,
    budget: u64,
) -> Run<Option<bool>> {
    let class = DeviationClass::Skeleton(res.deviation_skeleton.clone());
    match is_ne_within(a, r, &res.sigma1, &res.sigma2, &res.starts, &class, budget) {
        Ok(v) => Ok(Some(v.verdict)),
        Err(GameError::BudgetExceeded(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn exit_for(verdict: Option<bool>) -> u8 {
    match verdict {
        Some(true) => 0,
        Some(false) => 1,
        None => 3,
    }
}

fn run(cli: Cli) -> Run<u8> {
    match cli.cmd {
        Cmd::Validate { files, arena: ap } => {
            if files.is_empty() {
                return usage("no files given");
            }
            let mut ok = true;
            for f in &files {
                let text = read(f)?;
                let report = match ext(f) {
                    "arena" => io::parse_arena(&text).map(|a| {
                        json!({ "type": "arena", "states": a.n_states(), "edges": a.n_edges(), "choice_states": a.num_choices() })
                    }),
                    "skel" => io::parse_skeleton(&text).map(|s| json!({ "type": "skeleton", "states": s.n_states() })),
                    "nfa" => io::parse_nfa(&text).map(|k| json!({ "type": "nfa", "states": k.n_states(), "transitions": k.delta().len() })),
                    "pref" => io::parse_relation(&text).map(|r| json!({ "type": "relation", "kind": r.kind().name() })),
                    "strat" => {
                        let Some(ap) = &ap else { return usage("validating a .strat file needs --arena") };
                        let a = arena(ap)?;
                        io::parse_strategy(&text, &a).map(|s| {
                            json!({ "type": "strategy", "owner": s.owner().to_string(), "memory_states": s.skeleton().n_states() })
                        })
                    }
                    other => return usage(format!("{}: unknown file type `{other}`", f.display())),
                };
                let mut v = match report {
                    Ok(v) => v,
                    Err(e) => {
                        ok = false;
                        json!({ "valid": false, "error": e.to_string() })
                    }
                };
                v["file"] = json!(f.display().to_string());
                v.as_object_mut().unwrap().entry("valid").or_insert(json!(true));
                emit(v);
            }
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Product { arena: ap, skels, full, out } => {
            let a = arena(&ap)?;
            let sks = skels.iter().map(|p| skel(p)).collect::<Run<Vec<_>>>()?;
            let sk = MemorySkeleton::product_all(&sks.iter().collect::<Vec<_>>())?;
            let p = if full { product_arena(&a, &sk)? } else { product_reachable(&a, &sk)? };
            let text = io::print_arena(&p.arena);
            match out {
                Some(o) => {
                    write(&o, &text)?;
                    emit(json!({
                        "command": "product", "states": p.arena.n_states(), "edges": p.arena.n_edges(),
                        "memory_states": sk.n_states(), "out": o.display().to_string(),
                    }));
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Covers { arena: ap, skel: sp, cov, check } => {
            let a = arena(&ap)?;
            let sk = skel(&sp)?;
            let s_cov = states(&a, &cov, Some(sk.name(sk.init())))?;
            let mut ok = true;
            if check != "cyclic" {
                let r = check_prefix_cover(&a, &sk, &s_cov)?;
                ok &= r.verdict;
                emit(cover_json(&a, &sk, "prefix", &r));
            }
            if check != "prefix" {
                let r = check_cyclic_cover(&a, &sk, &s_cov)?;
                ok &= r.verdict;
                emit(cover_json(&a, &sk, "cyclic", &r));
            }
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Solve { arena: ap, pref: pp, skels, cov, general, out, no_verify, budget } => {
            let a = arena(&ap)?;
            let r = pref(&pp, Some(&a))?;
            let sks = skels.iter().map(|p| skel(p)).collect::<Run<Vec<_>>>()?;
            std::fs::create_dir_all(&out).map_err(|e| Fail::Usage(format!("{}: {e}", out.display())))?;
            let (s1p, s2p) = (out.join("sigma1.strat"), out.join("sigma2.strat"));
            let (res, on, verified) = if general {
                let g = solve_general(&a, &r, &sks)?;
                write(&s1p, &io::print_strategy(&g.sigma1, &a))?;
                write(&s2p, &io::print_strategy(&g.sigma2, &a))?;
                let verified = if no_verify { None } else { check_ne(&g.product.arena, &r, &g.covered, budget)? };
                (g.covered, g.product.arena, verified)
            } else {
                let Some(cov) = cov else { unreachable!() };
                let Some(first) = sks.first() else { return usage("--cov needs at least one --skel") };
                let s_cov = states(&a, &cov, Some(first.name(first.init())))?;
                let (p1p, p1c, p2p, p2c) = match sks.as_slice() {
                    [m] => (m, m, m, m),
                    [p, c] => (p, c, p, c),
                    [a, b, c, d] => (a, b, c, d),
                    _ => return usage("--cov takes one, two or four skeletons"),
                };
                let problem = Problem {
                    arena: a.clone(),
                    s_cov,
                    pref: r.clone(),
                    p1_prefix: p1p.clone(),
                    p1_cycle: p1c.clone(),
                    p2_prefix: p2p.clone(),
                    p2_cycle: p2c.clone(),
                };
                let res = solve_covered(&problem)?;
                write(&s1p, &io::print_strategy(&res.sigma1, &a))?;
                write(&s2p, &io::print_strategy(&res.sigma2, &a))?;
                let verified = if no_verify { None } else { check_ne(&a, &r, &res, budget)? };
                (res, a, verified)
            };
            for rec in &res.trace {
                emit(json!({ "split": rec }));
            }
            emit(json!({
                "command": "solve",
                "mode": if general { "general" } else { "covered" },
                "starts": names(&on, &res.starts),
                "sigma1": s1p.display().to_string(),
                "sigma2": s2p.display().to_string(),
                "sigma1_memory": res.sigma1.skeleton().n_states(),
                "deviation_memory": res.deviation_skeleton.n_states(),
                "verified": verified,
            }));
            Ok(match (no_verify, verified) {
                (true, _) | (_, Some(true)) => 0,
                (_, v) => exit_for(v),
            })
        }
        Cmd::Verify { arena: ap, pref: pp, s1, s2, start, class, budget } => {
            let a = arena(&ap)?;
            let r = pref(&pp, Some(&a))?;
            let (x, y) = (strat(&s1, &a)?, strat(&s2, &a)?);
            if x.owner() != Player::P1 || y.owner() != Player::P2 {
                return usage("--s1 must be a P1 strategy and --s2 a P2 strategy");
            }
            let starts = states(&a, &start, None)?;
            let class = class_of(&class, a.colors())?;
            let v = is_ne_within(&a, &r, &x, &y, &starts, &class, budget)?;
            emit(verdict_json(&a, &v));
            Ok(exit_for(Some(v.verdict)))
        }
        Cmd::TestConditions { pref: pp, skel: sp, condition, family, words, budget_instances, budget_seconds, out, replay: rp } => {
            let r = pref(&pp, None)?;
            let sk = match sp {
                Some(p) => skel(&p)?,
                None => MemorySkeleton::trivial(r.colors().to_vec()),
            };
            if let Some(rp) = rp {
                let v: ConditionViolation = serde_json::from_str(&read(&rp)?)
                    .map_err(|e| Fail::Usage(format!("{}: {e}", rp.display())))?;
                let holds = replay(&r, &sk, &v)?;
                emit(json!({ "command": "test-conditions", "replay": rp.display().to_string(), "reproduced": holds }));
                return Ok(if holds { 1 } else { 0 });
            }
            let fam = match family.split_once(':').map(|(k, n)| (k, n.parse::<usize>())) {
                Some(("nfa", Ok(n))) => Family::SmallNfas { max_states: n },
                Some(("lasso", Ok(n))) => Family::LassoWords { max_len: n },
                _ => return usage(format!("unknown family `{family}`")),
            };
            let mut budget = ConditionBudget::new(fam, words);
            if let Some(n) = budget_instances {
                budget.max_instances = n;
            }
            if let Some(s) = budget_seconds {
                if !(s.is_finite() && s >= 0.0) {
                    return usage("--budget-seconds must be a non-negative number");
                }
                budget.time_limit = Some(Duration::from_secs_f64(s));
            }
            let mut reports = Vec::new();
            if condition != "selectivity" {
                reports.push(test_monotony(&r, &sk, &budget)?);
            }
            if condition != "monotony" {
                reports.push(test_selectivity(&r, &sk, &budget)?);
            }
            let mut code = 0;
            for rep in &reports {
                let mut v = serde_json::to_value(rep).unwrap();
                v["command"] = json!("test-conditions");
                v["passed"] = json!(rep.passed());
                emit(v);
                if let (Some(o), Some(viol)) = (&out, &rep.violation) {
                    if code != 1 {
                        write(o, &serde_json::to_string_pretty(viol).unwrap())?;
                    }
                }
                code = match (code, rep.passed(), rep.coverage.complete) {
                    (_, false, _) | (1, _, _) => 1,
                    (_, true, false) => 3,
                    (c, true, true) => c,
                };
            }
            Ok(code)
        }
        Cmd::Counterexample { arena: ap, pref: pp, start, max_states, max_cycle } => {
            let a = arena(&ap)?;
            let r = pref(&pp, Some(&a))?;
            let s = match states(&a, &start, None)?.as_slice() {
                [s] => *s,
                _ => return usage("--start takes a single state"),
            };
            let rep: HarnessReport = counterexample_harness(&a, &r, s, max_states, max_cycle)?;
            let beaten: Vec<Value> = rep
                .entries
                .iter()
                .map(|e| json!({ "memory_states": e.skeleton_states, "beaten_by": e.beaten_by.as_ref().map(|l| lasso_json(&a, l)) }))
                .collect();
            let all = rep.beaten == rep.strategies;
            emit(json!({
                "command": "counterexample",
                "strategies": rep.strategies,
                "beaten": rep.beaten,
                "all_beaten": all,
                "longest_cycle_needed": rep.longest_cycle_needed,
                "one_player_win": rep.one_player_win.as_ref().map(|l| lasso_json(&a, l)),
                "entries": beaten,
            }));
            Ok(if all { 0 } else { 1 })
        }
        Cmd::ExportDot { file, arena: ap, out } => {
            let text = read(&file)?;
            let dot = match ext(&file) {
                "arena" => io::arena_dot(&in_file(&file, io::parse_arena(&text))?, &[]),
                "skel" => io::skeleton_dot(&in_file(&file, io::parse_skeleton(&text))?),
                "nfa" => io::nfa_dot(&in_file(&file, io::parse_nfa(&text))?),
                "strat" => {
                    let Some(ap) = ap else { return usage("exporting a .strat file needs --arena") };
                    let a = arena(&ap)?;
                    let s = in_file(&file, io::parse_strategy(&text, &a))?;
                    let bold: Vec<Edge> = s.table().iter().flatten().copied().collect();
                    io::arena_dot(&a, &bold)
                }
                other => return usage(format!("{}: cannot export `{other}`", file.display())),
            };
            match out {
                Some(o) => write(&o, &dot)?,
                None => print!("{dot}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string().trim_end() }));
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(m)) => {
            eprintln!("{}", json!({ "error": "usage", "message": m }));
            ExitCode::from(2)
        }
        Err(Fail::Game(e)) => {
            let (kind, code) = match e {
                GameError::BudgetExceeded(_) | GameError::SearchExhausted(_) => ("budget", 3),
                _ => ("input", 2),
            };
            eprintln!("{}", json!({ "error": kind, "message": e.to_string() }));
            ExitCode::from(code)
        }
    }
}
