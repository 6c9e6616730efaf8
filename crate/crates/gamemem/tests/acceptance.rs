//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use gamemem::conditions::{lasso_nfa, test_monotony_all};
use gamemem::io::{parse_arena, parse_relation, parse_skeleton};
use gamemem::strategy::{lift, mix_ne, product_arena, Certified};
use gamemem::verify::DEFAULT_BUDGET;
use gamemem::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn cs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&p).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Debug>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|x| format!("{x:?}"))
}

fn gr() -> Relation {
    Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"])
}

struct Fig6 {
    arena: Arena,
    cov: Vec<usize>,
    sk: MemorySkeleton,
    res: EquilibriumResult,
}

fn fig6() -> std::result::Result<Fig6, String> {
    let base = e(parse_arena(&fixture("fig6_base.arena")))?;
    let sk = e(parse_skeleton(&fixture("fig6.skel")))?;
    let pref = e(parse_relation(&fixture("genreach2.pref")))?;
    let p = e(product_reachable(&base, &sk))?;
    let cov = p.layer(sk.init());
    let problem = Problem::uniform(p.arena.clone(), cov.clone(), pref, sk.clone());
    let res = e(solve_covered(&problem))?;
    Ok(Fig6 { arena: p.arena, cov, sk, res })
}

fn c1() -> Outcome {
    let f = fig6()?;
    let a = &f.arena;
    ensure(a.n_states() == 6 && a.n_edges() == 8, || format!("{} states, {} edges", a.n_states(), a.n_edges()))?;
    ensure(f.res.sigma1.is_memoryless(), || "sigma1 has memory".into())?;
    let pick = |name: &str| {
        let s = a.state_index(name).unwrap();
        a.color_name(f.res.sigma1.action(0, s).unwrap().color).to_string()
    };
    let (at1, at2) = (pick("(s2,m1)"), pick("(s2,m2)"));
    ensure(at1 == "t2" && at2 == "t1", || format!("(s2,m1)->{at1}, (s2,m2)->{at2}"))?;
    // The joint skeleton of the four identical covers, and the skeleton itself.
    for sk in [&f.res.deviation_skeleton, &f.sk] {
        let class = DeviationClass::Skeleton(sk.clone());
        let v = e(is_ne_within(a, &gr(), &f.res.sigma1, &f.res.sigma2, &f.cov, &class, DEFAULT_BUDGET))?;
        ensure(v.verdict, || format!("not an equilibrium against {}-state deviations", sk.n_states()))?;
    }
    Ok("6 states, 8 edges; t2 at (s2,m1), t1 at (s2,m2); NE vs 3- and 81-state deviations".into())
}

fn c2() -> Outcome {
    let f = fig6()?;
    let a = &f.arena;
    let s = a.state_index("(s2,m2)").unwrap();
    let v = e(is_ne_within(a, &gr(), &f.res.sigma1, &f.res.sigma2, &[s], &DeviationClass::UpTo(2), DEFAULT_BUDGET))?;
    ensure(!v.verdict, || "bold strategy survived".into())?;
    let w = v.witness.ok_or("no witness")?;
    let replay = play_of(a, s, &w.strategy, &f.res.sigma2).colors();
    ensure(w.player == Player::P1 && replay == w.lasso.colors(), || "witness does not replay".into())?;
    ensure(e(gr().lasso_in_win(&replay))?, || "witness play does not win".into())?;
    let shown: Vec<&str> = replay.unroll(5).iter().map(|&c| a.color_name(c)).collect();
    Ok(format!("{}-state deviation wins with {}...", w.strategy.skeleton().n_states(), shown.join(" ")))
}

fn c3() -> Outcome {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let colors = gen::color_names(rng.gen_range(1..=3));
        let (n, k) = (rng.gen_range(1..=5), rng.gen_range(1..=3));
        let a = gen::arena(&mut rng, &colors, n, 3, true);
        let sk = gen::skeleton(&mut rng, &colors, k);
        let p = e(product_reachable(&a, &sk))?;
        let cov = p.layer(sk.init());
        let pc = e(check_prefix_cover(&p.arena, &sk, &cov))?;
        let cc = e(check_cyclic_cover(&p.arena, &sk, &cov))?;
        ensure(pc.verdict && cc.verdict, || format!("seed {seed}"))?;
    }
    Ok("100/100 products covered".into())
}

/// Length-`len` prefixes of the infinite words all of whose prefixes extend
/// into `k`. Any prefix of a `k`-word extended by `n_states` more letters
/// already repeats a state, so looking `n_states` letters ahead suffices.
fn closure_prefixes(k: &Nfa, len: usize) -> BTreeSet<Vec<usize>> {
    let depth = len + k.n_states();
    let mut out = BTreeSet::new();
    let mut stack = vec![vec![]];
    while let Some(w) = stack.pop() {
        if !k.is_prefix(&w) {
            continue;
        }
        if w.len() == depth {
            out.insert(w[..len].to_vec());
            continue;
        }
        for c in 0..k.n_colors() {
            let mut w2 = w.clone();
            w2.push(c);
            stack.push(w2);
        }
    }
    out
}

fn arena_prefixes(ca: &ClosureArena, len: usize) -> BTreeSet<Vec<usize>> {
    let mut layer: BTreeSet<(usize, Vec<usize>)> = ca.starts.iter().map(|&s| (s, vec![])).collect();
    for _ in 0..len {
        layer = layer
            .into_iter()
            .flat_map(|(s, w)| {
                ca.arena.out_edges(s).map(move |x| {
                    let mut w2 = w.clone();
                    w2.push(x.color);
                    (x.dst, w2)
                })
            })
            .collect();
    }
    layer.into_iter().map(|x| x.1).collect()
}

fn c4() -> Outcome {
    let colors = gen::color_names(2);
    let mut nonempty = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || {
            let n = rng.gen_range(1..=4);
            let t = rng.gen_range(0..=2 * n);
            gen::nfa(&mut rng, &colors, n, t)
        };
        let (k1, k2) = (pick(), pick());
        let u = e(k1.union(&k2))?;
        let cu = u.arena_of();
        for len in 0..=8 {
            let mut expect = closure_prefixes(&k1, len);
            expect.extend(closure_prefixes(&k2, len));
            ensure(arena_prefixes(&cu, len) == expect, || format!("seed {seed}, length {len}"))?;
            if len == 8 && !expect.is_empty() {
                nonempty += 1;
            }
        }
    }
    Ok(format!("200/200 pairs agree up to length 8 ({nonempty} with nonempty closure)"))
}

fn c5() -> Outcome {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let colors = gen::color_names(rng.gen_range(1..=3));
        let n = rng.gen_range(1..=5);
        let a = gen::arena(&mut rng, &colors, n, 3, true);
        let k = rng.gen_range(1..=3);
        let sk = gen::skeleton(&mut rng, &colors, k);
        let sigma = gen::mealy(&mut rng, &a, Player::P1, sk.clone());
        let tau = gen::mealy(&mut rng, &a, Player::P2, sk.clone());
        let p = e(product_arena(&a, &sk))?;
        let (ls, lt) = (e(lift(&p, &sigma))?, e(lift(&p, &tau))?);
        for s in 0..n {
            let base = play_of(&a, s, &sigma, &tau).colors();
            for m in 0..k {
                let i = p.index(s, m).unwrap();
                ensure(play_of(&p.arena, i, &ls, &lt).colors() == base, || format!("seed {seed}, state {s}, memory {m}"))?;
            }
        }
    }
    Ok("100/100 samples agree from every state".into())
}

fn c6() -> Outcome {
    let (mut games, mut pairs) = (0, 0);
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let a = gen::arena(&mut rng, &cs(&["n", "t1", "t2"]), n, 2, true);
        let all: Vec<usize> = (0..n).collect();
        let class = DeviationClass::Unbounded;
        let nes = e(enumerate_ne(&a, &gr(), &all, &class, DEFAULT_BUDGET))?;
        games += usize::from(!nes.is_empty());
        for (x1, x2) in &nes {
            for (y1, y2) in &nes {
                let x = Certified { sigma1: x1.clone(), sigma2: x2.clone(), starts: all.clone() };
                let y = Certified { sigma1: y1.clone(), sigma2: y2.clone(), starts: all.clone() };
                let z = e(mix_ne(&x, &y))?;
                let v = e(is_ne_within(&a, &gr(), &z.sigma1, &z.sigma2, &all, &class, DEFAULT_BUDGET))?;
                ensure(v.verdict, || format!("seed {seed}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} crossed pairs over {games} games with equilibria"))
}

fn mp() -> MemorySkeleton {
    parse_skeleton(&fixture("fig5_mp.skel")).unwrap()
}

fn mc() -> MemorySkeleton {
    parse_skeleton(&fixture("fig5_mc.skel")).unwrap()
}

fn sound(problem: &Problem) -> std::result::Result<bool, String> {
    let res = e(solve_covered(problem))?;
    let class = DeviationClass::Skeleton(res.deviation_skeleton.clone());
    Ok(e(is_ne_within(&problem.arena, &problem.pref, &res.sigma1, &res.sigma2, &problem.s_cov, &class, DEFAULT_BUDGET))?.verdict)
}

fn c7() -> Outcome {
    let colors = cs(&["n", "t1", "t2"]);
    let (mp, mc) = (mp(), mc());
    let m = e(mp.product(&mc))?;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=5);
        let a = gen::arena(&mut rng, &colors, n, 2, true);
        let p = e(product_reachable(&a, &m))?;
        let problem = Problem {
            arena: p.arena.clone(),
            s_cov: p.layer(m.init()),
            pref: gr(),
            p1_prefix: mp.clone(),
            p1_cycle: mc.clone(),
            p2_prefix: mp.clone(),
            p2_cycle: mc.clone(),
        };
        ensure(sound(&problem)?, || format!("GenReach2 seed {seed}"))?;
    }
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=3);
        let colors = gen::color_names(k);
        let names: Vec<&str> = colors.iter().map(|s| s.as_str()).collect();
        let prios: Vec<u32> = (0..k).map(|_| rng.gen_range(0..4)).collect();
        let n = rng.gen_range(1..=5);
        let a = gen::arena(&mut rng, &colors, n, 2, true);
        let ks = rng.gen_range(1..=3);
        let sk = gen::skeleton(&mut rng, &colors, ks);
        let p = e(product_reachable(&a, &sk))?;
        let problem = Problem::uniform(p.arena.clone(), p.layer(sk.init()), Relation::parity(&names, &prios), sk);
        ensure(sound(&problem)?, || format!("Parity seed {seed}"))?;
    }
    Ok("GenReach2 100/100, Parity 100/100".into())
}

fn small(states: usize, words: usize) -> ConditionBudget {
    ConditionBudget::new(Family::SmallNfas { max_states: states }, words)
}

fn c8a() -> Outcome {
    let triv = MemorySkeleton::trivial(cs(&["n", "t1", "t2"]));
    let r = e(test_monotony(&gr(), &triv, &small(2, 2)))?;
    let v = r.violation.ok_or("no violation found")?;
    ensure(e(gamemem::conditions::replay(&gr(), &triv, &v))?, || "violation does not replay".into())?;
    Ok(format!("violation after {} instances", r.coverage.instances))
}

fn c8b() -> Outcome {
    let m = e(test_monotony(&gr(), &mp(), &small(2, 3)))?;
    ensure(m.passed() && m.coverage.complete, || format!("monotony: {:?}", m.violation))?;
    let s = e(test_selectivity(&gr(), &mc(), &small(2, 3)))?;
    ensure(s.passed() && s.coverage.complete, || format!("selectivity: {:?}", s.violation))?;
    Ok(format!(
        "monotony {} instances, selectivity {} instances (+{} pruned), both complete",
        m.coverage.instances, s.coverage.instances, s.coverage.pruned
    ))
}

fn c8c() -> Outcome {
    let c = cs(&["-1", "0", "1"]);
    let r = Relation::appendix_a(&["-1", "0", "1"], &[-1, 0, 1]);
    let triv = MemorySkeleton::trivial(c.clone());
    let budget = ConditionBudget::new(Family::LassoWords { max_len: 2 }, 2);
    let (all, cov) = e(test_monotony_all(&r, &triv, &budget, usize::MAX))?;
    ensure(cov.complete, || "search incomplete".into())?;
    // (-1)(-1)0* and (-1)0*
    let (k1, k2) = (lasso_nfa(&c, &[0, 0], &[1]), lasso_nfa(&c, &[0], &[1]));
    let hit = all.iter().find(|v| match v {
        ConditionViolation::Monotony { w, w2, k1: a, k2: b, .. } => {
            *w == vec![2] && *w2 == vec![2, 2] && a.closure_key() == k1.closure_key() && b.closure_key() == k2.closure_key()
        }
        _ => false,
    });
    let hit = hit.ok_or_else(|| format!("derived instance missing among {} violations", all.len()))?;
    ensure(e(gamemem::conditions::replay(&r, &triv, hit))?, || "does not replay".into())?;
    Ok(format!("w=(1), w'=(1,1) found among {} violations", all.len()))
}

fn c9() -> Outcome {
    let a = e(parse_arena(&fixture("fig1.arena")))?;
    let r = e(parse_relation(&fixture("appendixa.pref")))?;
    let rep = e(counterexample_harness(&a, &r, 0, 2, 8))?;
    ensure(rep.beaten == rep.strategies, || format!("{} of {} beaten", rep.beaten, rep.strategies))?;
    for x in &rep.entries {
        let l = x.beaten_by.as_ref().ok_or("unbeaten entry")?;
        ensure(!e(r.lasso_in_win(&l.colors()))?, || "beating lasso is winning".into())?;
    }
    let w = rep.one_player_win.ok_or("no one-player win")?;
    ensure(e(r.lasso_in_win(&w.colors()))?, || "one-player lasso loses".into())?;
    Ok(format!("{} strategies beaten, longest cycle {}", rep.strategies, rep.longest_cycle_needed))
}

/// Brute force over memoryless pairs: max over P1 of min over P2.
fn brute_value(a: &Arena, r: &Relation, s: usize) -> std::result::Result<ColorLasso, String> {
    let all = |p: Player| -> Vec<MealyStrategy> {
        let mut out = vec![vec![]];
        for st in 0..a.n_states() {
            let opts: Vec<Option<Edge>> =
                if a.owner(st) == p { a.out_edges(st).map(|x| Some(*x)).collect() } else { vec![None] };
            out = out
                .into_iter()
                .flat_map(|pre: Vec<Option<Edge>>| {
                    opts.iter().map(move |o| {
                        let mut v = pre.clone();
                        v.push(*o);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(|c| MealyStrategy::memoryless(a, p, c).unwrap()).collect()
    };
    let (s1s, s2s) = (all(Player::P1), all(Player::P2));
    let mut best: Option<ColorLasso> = None;
    for s1 in &s1s {
        let mut worst: Option<ColorLasso> = None;
        for s2 in &s2s {
            let l = play_of(a, s, s1, s2).colors();
            if worst.as_ref().map_or(true, |w| e(r.compare(&l, w)).unwrap() == Ordering::Less) {
                worst = Some(l);
            }
        }
        let w = worst.unwrap();
        if best.as_ref().map_or(true, |b| e(r.compare(b, &w)).unwrap() == Ordering::Less) {
            best = Some(w);
        }
    }
    Ok(best.unwrap())
}

fn c10() -> Outcome {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=3);
        let colors = gen::color_names(k);
        let names: Vec<&str> = colors.iter().map(|s| s.as_str()).collect();
        let r = Relation::mean_payoff(&names, &gen::weights(&mut rng, k, -3, 3));
        let n = rng.gen_range(1..=5);
        let a = gen::arena(&mut rng, &colors, n, 3, true);
        let triv = MemorySkeleton::trivial(colors.clone());
        let res = e(solve_general(&a, &r, &[triv.clone(), triv]))?;
        ensure(res.sigma1.is_memoryless() && res.sigma2.is_memoryless(), || format!("seed {seed}: memory used"))?;
        for s in 0..n {
            let got = play_of(&a, s, &res.sigma1, &res.sigma2).colors();
            let want = brute_value(&a, &r, s)?;
            ensure(e(r.compare(&got, &want))? == Ordering::Equal, || format!("seed {seed}, state {s}"))?;
        }
    }
    Ok("50/50 arenas match brute-force values".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 12] = [
        ("1  fig6 product and bold NE", 1, c1),
        ("2  not optimal from (s2,m2)", 1, c2),
        ("3  products are covered", 10, c3),
        ("4  closure of union", 30, c4),
        ("5  product plays", 30, c5),
        ("6  crossed equilibria", 60, c6),
        ("7  synthesis soundness", 120, c7),
        ("8a GenReach2 trivial not monotone", 5, c8a),
        ("8b GenReach2 fig5 skeletons pass", 60, c8b),
        ("8c AppendixA derived violation", 10, c8c),
        ("9  AppendixA harness", 120, c9),
        ("10 mean-payoff regression", 60, c10),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let slow = dt > Duration::from_secs(limit);
        let (tag, detail) = match (&out, slow) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time limit; {d}")),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} [{name}] {:.2}s (limit {limit}s): {detail}", dt.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
