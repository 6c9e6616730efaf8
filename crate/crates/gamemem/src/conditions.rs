//! Bounded refutation search for monotony and selectivity modulo a skeleton,
//! and the exhaustive search on the fig1 game showing that no small Mealy
//! strategy of P1 wins there.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, Edge, Player};
use crate::automata::{enumerate_small_nfas, selectivity_gadget, star_after, ClosureArena, Nfa};
use crate::error::{GameError, Result};
use crate::lasso::Lasso;
use crate::preference::{Relation, Score, Side, SupResult};
use crate::skeleton::MemorySkeleton;
use crate::strategy::{fix_opponent, MealyStrategy, Strategy};

/// Languages tried for `K1`, `K2`, `K3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Every automaton with at most this many states.
    SmallNfas { max_states: usize },
    /// `u v*` for words with `|u| <= max_len` and `1 <= |v| <= max_len`.
    LassoWords { max_len: usize },
}

#[derive(Clone, Debug)]
pub struct ConditionBudget {
    pub family: Family,
    pub max_word_len: usize,
    pub max_instances: u64,
    pub time_limit: Option<Duration>,
}

impl ConditionBudget {
    pub fn new(family: Family, max_word_len: usize) -> Self {
        ConditionBudget { family, max_word_len, max_instances: 100_000_000, time_limit: None }
    }
}

/// What was actually examined. `complete` is false when the budget cut the
/// search short, in which case a pass is inconclusive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub words: usize,
    pub word_classes: usize,
    pub languages: usize,
    pub instances: u64,
    pub pruned: u64,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConditionViolation {
    /// `[w K1] < [w K2]` but `[w2 K1] > [w2 K2]`, with both words leading to `m`.
    Monotony {
        m: usize,
        w: Vec<usize>,
        w2: Vec<usize>,
        k1: Nfa,
        k2: Nfa,
        premise: (SupResult, SupResult),
        conclusion: (SupResult, SupResult),
    },
    /// `[w (K1 ∪ K2)* K3]` beats `[w K1*] ∪ [w K2*] ∪ [w K3]`.
    Selectivity { m: usize, w: Vec<usize>, k1: Nfa, k2: Nfa, k3: Nfa, left: SupResult, right: SupResult },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: &'static str,
    pub violation: Option<ConditionViolation>,
    pub coverage: Coverage,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

type Val = Option<Score>;

fn val(rel: &Relation, s: &SupResult) -> Result<Val> {
    s.colors().map(|c| rel.score(c)).transpose()
}

fn cmp_val(rel: &Relation, a: &Val, b: &Val) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Less,
        (_, None) => Ordering::Greater,
        (Some(x), Some(y)) => {
            let o = x.cmp(y);
            if rel.is_inverted() {
                o.reverse()
            } else {
                o
            }
        }
    }
}

fn max_val(rel: &Relation, a: Val, b: Val) -> Val {
    if cmp_val(rel, &a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

fn is_top(rel: &Relation, v: &Val) -> bool {
    *v == Some(rel.top_score())
}

/// The automaton of `u v*` with final state at the entry of the loop.
pub fn lasso_nfa(colors: &[String], u: &[usize], v: &[usize]) -> Nfa {
    assert!(!v.is_empty());
    let (nu, nv) = (u.len(), v.len());
    let mut delta: Vec<(usize, usize, usize)> = u.iter().enumerate().map(|(i, &c)| (i, c, i + 1)).collect();
    delta.extend(v.iter().enumerate().map(|(j, &c)| (nu + j, c, if j + 1 < nv { nu + j + 1 } else { nu })));
    let names = (0..nu + nv).map(|q| format!("q{q}")).collect();
    Nfa::new(names, colors.to_vec(), delta, vec![0], vec![nu]).unwrap()
}

/// Words of length at most `len`, shortest first, then lexicographic.
pub fn words_upto(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| (0..k).map(move |c| [w.as_slice(), &[c]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn family_nfas(colors: &[String], family: &Family) -> Vec<Nfa> {
    match family {
        Family::SmallNfas { max_states } => enumerate_small_nfas(colors, *max_states, usize::MAX).collect(),
        Family::LassoWords { max_len } => {
            let ws = words_upto(colors.len(), *max_len);
            let mut out = Vec::new();
            for u in &ws {
                for v in ws.iter().filter(|v| !v.is_empty()) {
                    out.push(lasso_nfa(colors, u, v));
                }
            }
            out
        }
    }
}

/// Representative words, one per (memory state, prefix key).
struct WordClass {
    m: usize,
    word: Vec<usize>,
}

fn word_classes(rel: &Relation, sk: &MemorySkeleton, max_len: usize) -> (usize, Vec<WordClass>) {
    let words = words_upto(sk.n_colors(), max_len);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for w in &words {
        let m = sk.run(sk.init(), w).unwrap();
        if seen.insert((m, rel.prefix_key(w))) {
            out.push(WordClass { m, word: w.clone() });
        }
    }
    (words.len(), out)
}

/// Every accepted word of `k` leads `m` back to `m`.
pub fn loops_on(k: &Nfa, sk: &MemorySkeleton, m: usize) -> bool {
    let fin: HashSet<usize> = k.fin().iter().copied().collect();
    let mut seen: HashSet<(usize, usize)> = k.init().iter().map(|&q| (q, m)).collect();
    let mut queue: VecDeque<(usize, usize)> = seen.iter().copied().collect();
    while let Some((q, mm)) = queue.pop_front() {
        if fin.contains(&q) && mm != m {
            return false;
        }
        for &(_, c, q2) in k.delta().iter().filter(|x| x.0 == q) {
            let next = (q2, sk.update(mm, c));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    true
}

struct Meter {
    start: Instant,
    budget: ConditionBudget,
    cov: Coverage,
}

impl Meter {
    fn new(budget: &ConditionBudget) -> Self {
        Meter { start: Instant::now(), budget: budget.clone(), cov: Coverage { complete: true, ..Coverage::default() } }
    }

    /// Counts a batch of `n` instances about to be evaluated. A batch that
    /// does not fit is not counted and ends the search.
    fn charge(&mut self, n: u64) -> bool {
        let over_time = self.budget.time_limit.is_some_and(|t| self.start.elapsed() > t);
        if over_time || self.cov.instances + n > self.budget.max_instances {
            self.cov.complete = false;
            return false;
        }
        self.cov.instances += n;
        true
    }
}

fn sup_of(rel: &Relation, ca: &ClosureArena, prefix: &[usize]) -> Result<SupResult> {
    rel.sup_play(&ca.arena, &ca.starts, prefix)
}

fn dedupe<K: std::hash::Hash + Eq>(nfas: Vec<Nfa>, key: impl Fn(&Nfa) -> K) -> Vec<Nfa> {
    let mut seen = HashSet::new();
    nfas.into_iter().filter(|k| seen.insert(key(k))).collect()
}

fn monotony_scan(
    rel: &Relation,
    sk: &MemorySkeleton,
    budget: &ConditionBudget,
    cap: usize,
) -> Result<(Vec<ConditionViolation>, Coverage)> {
    rel.check_alphabet(sk.colors())?;
    let (n_words, classes) = word_classes(rel, sk, budget.max_word_len);
    let ks = dedupe(family_nfas(sk.colors(), &budget.family), |k| k.closure_key());
    let cas: Vec<ClosureArena> = ks.iter().map(|k| k.arena_of()).collect();
    let mut meter = Meter::new(budget);
    meter.cov.words = n_words;
    meter.cov.word_classes = classes.len();
    meter.cov.languages = ks.len();
    let mut out = Vec::new();
    'outer: for m in 0..sk.n_states() {
        let reps: Vec<&WordClass> = classes.iter().filter(|c| c.m == m).collect();
        if reps.len() < 2 {
            continue;
        }
        let mut sups = Vec::new();
        let mut vals = Vec::new();
        for r in &reps {
            let row: Vec<SupResult> = cas.iter().map(|ca| sup_of(rel, ca, &r.word)).collect::<Result<_>>()?;
            vals.push(row.iter().map(|s| val(rel, s)).collect::<Result<Vec<Val>>>()?);
            sups.push(row);
        }
        for i in 0..ks.len() {
            for j in i + 1..ks.len() {
                if !meter.charge(reps.len() as u64) {
                    break 'outer;
                }
                let ords: Vec<Ordering> = (0..reps.len()).map(|r| cmp_val(rel, &vals[r][i], &vals[r][j])).collect();
                let Some(first) = ords.iter().position(|&o| o != Ordering::Equal) else { continue };
                let Some(second) = ords.iter().position(|&o| o == ords[first].reverse()) else { continue };
                let (a, b) = if ords[first] == Ordering::Less { (i, j) } else { (j, i) };
                out.push(ConditionViolation::Monotony {
                    m,
                    w: reps[first].word.clone(),
                    w2: reps[second].word.clone(),
                    k1: ks[a].clone(),
                    k2: ks[b].clone(),
                    premise: (sups[first][a].clone(), sups[first][b].clone()),
                    conclusion: (sups[second][a].clone(), sups[second][b].clone()),
                });
                if out.len() >= cap {
                    break 'outer;
                }
            }
        }
    }
    Ok((out, meter.cov))
}

/// Searches for `m`, words `w, w2` leading to `m` and languages `K1, K2` with
/// `[w K1] < [w K2]` and `[w2 K1] > [w2 K2]`. Languages are taken up to
/// their safety closure, and words up to their memory state and prefix key.
pub fn test_monotony(rel: &Relation, sk: &MemorySkeleton, budget: &ConditionBudget) -> Result<ConditionReport> {
    let (mut v, coverage) = monotony_scan(rel, sk, budget, 1)?;
    Ok(ConditionReport { condition: "monotony", violation: v.pop(), coverage })
}

/// Like [`test_monotony`], collecting up to `cap` violations.
pub fn test_monotony_all(
    rel: &Relation,
    sk: &MemorySkeleton,
    budget: &ConditionBudget,
    cap: usize,
) -> Result<(Vec<ConditionViolation>, Coverage)> {
    monotony_scan(rel, sk, budget, cap)
}

/// `(key, witness word)` for every key of a word in `w · L(nfa)`.
fn reachable_keys(rel: &Relation, nfa: &Nfa, w: &[usize]) -> Vec<(i64, Vec<usize>)> {
    let k0 = rel.prefix_key(w);
    let mut word: HashMap<(usize, i64), Vec<usize>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &q in nfa.init() {
        word.insert((q, k0), w.to_vec());
        queue.push_back((q, k0));
    }
    while let Some((q, k)) = queue.pop_front() {
        for &(_, c, q2) in nfa.delta().iter().filter(|x| x.0 == q) {
            let next = (q2, rel.step_key(k, c));
            if !word.contains_key(&next) {
                let mut wd = word[&(q, k)].clone();
                wd.push(c);
                word.insert(next, wd);
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<(i64, Vec<usize>)> = Vec::new();
    let mut keys: Vec<&(usize, i64)> = word.keys().filter(|(q, _)| nfa.fin().contains(q)).collect();
    keys.sort_by_key(|(q, k)| (*k, word[&(*q, *k)].len(), *q));
    for &(q, k) in keys {
        if out.last().map(|x| x.0) != Some(k) {
            out.push((k, word[&(q, k)].clone()));
        }
    }
    out
}

/// Suprema of both sides of the selectivity inequality, from the gadgets.
fn selectivity_sides(rel: &Relation, w: &[usize], k1: &Nfa, k2: &Nfa, k3: &Nfa) -> Result<(SupResult, SupResult)> {
    let left = sup_of(rel, &selectivity_gadget(w, k1, k2, k3)?.nfa.arena_of(), &[])?;
    let mut right = sup_of(rel, &k3.arena_of(), w)?;
    for k in [k1, k2] {
        let s = sup_of(rel, &star_after(w, k)?.nfa.arena_of(), &[])?;
        if rel.compare_sups(&right, &s)? == Ordering::Less {
            right = s;
        }
    }
    Ok((left, right))
}

/// Searches for `w` and `K1, K2 ⊆ L(m, m)` (with `m` the memory after `w`)
/// and any `K3` such that `[w (K1 ∪ K2)* K3]` beats the union of
/// `[w K1*]`, `[w K2*]` and `[w K3]`. `K1, K2` are taken up to their star,
/// `K3` up to its safety closure. For relations with finitely many prefix
/// keys, `[w U K3]` is evaluated as the best of `[w U]` and of `[K3]` after
/// each key reachable through `w U`.
pub fn test_selectivity(rel: &Relation, sk: &MemorySkeleton, budget: &ConditionBudget) -> Result<ConditionReport> {
    selectivity_scan(rel, sk, budget, !rel.has_finite_keys())
}

/// With `exact`, every instance is decided on its own gadget.
fn selectivity_scan(rel: &Relation, sk: &MemorySkeleton, budget: &ConditionBudget, exact: bool) -> Result<ConditionReport> {
    rel.check_alphabet(sk.colors())?;
    let colors = sk.colors();
    let eps = Nfa::epsilon(colors.to_vec());
    let fam = family_nfas(colors, &budget.family);
    let stars = dedupe(fam.clone(), |k| star_after(&[], k).unwrap().nfa.language_key());
    let star_cas: Vec<ClosureArena> = stars.iter().map(|k| star_after(&[], k).unwrap().nfa.arena_of()).collect();
    let k3s = dedupe(fam, |k| k.closure_key());
    let k3_cas: Vec<ClosureArena> = k3s.iter().map(|k| k.arena_of()).collect();
    let (n_words, classes) = word_classes(rel, sk, budget.max_word_len);
    let mut meter = Meter::new(budget);
    meter.cov.words = n_words;
    meter.cov.word_classes = classes.len();
    meter.cov.languages = stars.len() + k3s.len();
    let per_pair = k3s.len() as u64;
    let mut tail: HashMap<(i64, usize), Val> = HashMap::new();
    let report = |v, cov| Ok(ConditionReport { condition: "selectivity", violation: v, coverage: cov });
    for m in 0..sk.n_states() {
        let reps: Vec<&WordClass> = classes.iter().filter(|c| c.m == m).collect();
        if reps.is_empty() {
            continue;
        }
        let cands: Vec<usize> = (0..stars.len()).filter(|&s| loops_on(&stars[s], sk, m)).collect();
        let mut r1: Vec<HashMap<usize, Val>> = Vec::new();
        let mut r3: Vec<Vec<Val>> = Vec::new();
        for r in &reps {
            let mut row = HashMap::new();
            for &s in &cands {
                row.insert(s, val(rel, &sup_of(rel, &star_cas[s], &r.word)?)?);
            }
            r1.push(row);
            r3.push(k3_cas.iter().map(|ca| val(rel, &sup_of(rel, ca, &r.word)?)).collect::<Result<_>>()?);
        }
        for (ii, &i) in cands.iter().enumerate() {
            for &j in &cands[ii..] {
                let live: Vec<usize> = (0..reps.len())
                    .filter(|&r| !is_top(rel, &max_val(rel, r1[r][&i].clone(), r1[r][&j].clone())))
                    .collect();
                meter.cov.pruned += per_pair * (reps.len() - live.len()) as u64;
                if live.is_empty() {
                    continue;
                }
                if !meter.charge(per_pair * live.len() as u64) {
                    return report(None, meter.cov);
                }
                let u = selectivity_gadget(&[], &stars[i], &stars[j], &eps)?;
                let u_ca = u.nfa.arena_of();
                for r in live {
                    let w = &reps[r].word;
                    let r12 = max_val(rel, r1[r][&i].clone(), r1[r][&j].clone());
                    let limit = val(rel, &sup_of(rel, &u_ca, w)?)?;
                    let keys = if !exact { reachable_keys(rel, &u.nfa, w) } else { Vec::new() };
                    for k3 in 0..k3s.len() {
                        let right = max_val(rel, r12.clone(), r3[r][k3].clone());
                        if is_top(rel, &right) {
                            meter.cov.pruned += 1;
                            meter.cov.instances -= 1;
                            continue;
                        }
                        let beaten = if !exact {
                            let mut left = limit.clone();
                            for (key, word) in &keys {
                                let v = match tail.get(&(*key, k3)) {
                                    Some(v) => v.clone(),
                                    None => {
                                        let v = val(rel, &sup_of(rel, &k3_cas[k3], word)?)?;
                                        tail.insert((*key, k3), v.clone());
                                        v
                                    }
                                };
                                left = max_val(rel, left, v);
                            }
                            cmp_val(rel, &left, &right) == Ordering::Greater
                        } else {
                            let (l, rr) = selectivity_sides(rel, w, &stars[i], &stars[j], &k3s[k3])?;
                            rel.compare_sups(&l, &rr)? == Ordering::Greater
                        };
                        if beaten {
                            let (left, right) = selectivity_sides(rel, w, &stars[i], &stars[j], &k3s[k3])?;
                            if rel.compare_sups(&left, &right)? == Ordering::Greater {
                                let v = ConditionViolation::Selectivity {
                                    m,
                                    w: w.clone(),
                                    k1: stars[i].clone(),
                                    k2: stars[j].clone(),
                                    k3: k3s[k3].clone(),
                                    left,
                                    right,
                                };
                                return report(Some(v), meter.cov);
                            }
                        }
                    }
                }
            }
        }
    }
    report(None, meter.cov)
}

/// Recomputes a violation from scratch; true iff it still holds.
pub fn replay(rel: &Relation, sk: &MemorySkeleton, v: &ConditionViolation) -> Result<bool> {
    match v {
        ConditionViolation::Monotony { m, w, w2, k1, k2, .. } => {
            if sk.run(sk.init(), w)? != *m || sk.run(sk.init(), w2)? != *m {
                return Ok(false);
            }
            let (a1, a2) = (k1.arena_of(), k2.arena_of());
            let premise = rel.set_lt(
                Side { arena: &a1.arena, starts: &a1.starts, prefix: w },
                Side { arena: &a2.arena, starts: &a2.starts, prefix: w },
            )?;
            let conclusion = rel.set_leq(
                Side { arena: &a1.arena, starts: &a1.starts, prefix: w2 },
                Side { arena: &a2.arena, starts: &a2.starts, prefix: w2 },
            )?;
            Ok(premise && !conclusion)
        }
        ConditionViolation::Selectivity { m, w, k1, k2, k3, .. } => {
            if sk.run(sk.init(), w)? != *m || !loops_on(k1, sk, *m) || !loops_on(k2, sk, *m) {
                return Ok(false);
            }
            let (left, right) = selectivity_sides(rel, w, k1, k2, k3)?;
            Ok(rel.compare_sups(&left, &right)? == Ordering::Greater)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessEntry {
    pub skeleton_states: usize,
    pub strategy: MealyStrategy,
    /// Play consistent with the strategy that P1 loses, on the base arena.
    pub beaten_by: Option<Lasso>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub strategies: usize,
    pub beaten: usize,
    pub longest_cycle_needed: usize,
    pub entries: Vec<HarnessEntry>,
    /// Winning lasso when every state belongs to P1.
    pub one_player_win: Option<Lasso>,
}

/// Every Mealy strategy of `player` on `a` over skeletons with at most `k` states.
pub fn enumerate_mealy(a: &Arena, player: Player, k: usize) -> Vec<MealyStrategy> {
    let mut out = Vec::new();
    let n = a.n_states();
    for sk in MemorySkeleton::enumerate(a.colors(), k) {
        let slots: Vec<usize> = (0..n * sk.n_states()).filter(|&i| a.owner(i % n) == player).collect();
        let outs: Vec<Vec<Edge>> = (0..n).map(|s| a.out_edges(s).copied().collect()).collect();
        let mut idx = vec![0usize; slots.len()];
        loop {
            let mut next = vec![None; n * sk.n_states()];
            for (x, &i) in slots.iter().enumerate() {
                next[i] = Some(outs[i % n][idx[x]]);
            }
            out.push(MealyStrategy::new(a, player, sk.clone(), next).unwrap());
            let mut x = slots.len();
            loop {
                if x == 0 {
                    break;
                }
                x -= 1;
                idx[x] += 1;
                if idx[x] < outs[slots[x] % n].len() {
                    break;
                }
                idx[x] = 0;
            }
            if idx.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    out
}

/// A play consistent with `sigma` from `start` that `sigma`'s owner loses,
/// with cycle length at most `max_cycle`; shortest total length first.
pub fn losing_lasso(a: &Arena, rel: &Relation, sigma: &MealyStrategy, start: usize, max_cycle: usize) -> Result<Option<Lasso>> {
    let mine = match sigma.owner() {
        Player::P1 => rel.clone(),
        Player::P2 => rel.inverse(),
    };
    let fixed = fix_opponent(a, sigma)?;
    let s0 = fixed.index(start, sigma.skeleton().init()).unwrap();
    let fa = &fixed.arena;
    for total in 1..=fa.n_states() + max_cycle {
        let mut path: Vec<Edge> = Vec::new();
        if let Some(l) = deepen(fa, &mine, s0, total, max_cycle, &mut path)? {
            return Ok(Some(l.map_edges(|e| fixed.project(e))));
        }
    }
    Ok(None)
}

fn deepen(a: &Arena, rel: &Relation, s: usize, total: usize, max_cycle: usize, path: &mut Vec<Edge>) -> Result<Option<Lasso>> {
    if path.len() == total {
        let end = path.last().unwrap().dst;
        let nodes: Vec<usize> = path.iter().map(|e| e.src).collect();
        for (i, &x) in nodes.iter().enumerate() {
            if x == end && total - i <= max_cycle {
                let l = Lasso::new(path[..i].to_vec(), path[i..].to_vec());
                if !rel.lasso_in_win(&l.colors())? {
                    return Ok(Some(l));
                }
            }
        }
        return Ok(None);
    }
    let outs: Vec<Edge> = a.out_edges(s).copied().collect();
    for e in outs {
        path.push(e);
        let found = deepen(a, rel, e.dst, total, max_cycle, path)?;
        path.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Beats every P1 Mealy strategy with at most `max_states` memory states
/// from `start`, and finds a winning play when P1 owns every state.
/// Fails with `SearchExhausted` if some strategy is not beaten.
pub fn counterexample_harness(
    a: &Arena,
    rel: &Relation,
    start: usize,
    max_states: usize,
    max_cycle: usize,
) -> Result<HarnessReport> {
    if !rel.kind().is_qualitative() {
        return Err(GameError::NotQualitative(rel.kind().name().into()));
    }
    let mut entries = Vec::new();
    let mut longest = 0;
    for sigma in enumerate_mealy(a, Player::P1, max_states) {
        let beaten_by = losing_lasso(a, rel, &sigma, start, max_cycle)?;
        if let Some(l) = &beaten_by {
            longest = longest.max(l.cycle().len());
        }
        entries.push(HarnessEntry { skeleton_states: sigma.skeleton().n_states(), strategy: sigma, beaten_by });
    }
    let solo = a.with_owners(vec![Player::P1; a.n_states()]);
    let sup = rel.sup_play(&solo, &[start], &[])?;
    let one_player_win = match sup.lasso() {
        Some(l) if rel.lasso_in_win(&l.colors())? => Some(l.clone()),
        _ => None,
    };
    let beaten = entries.iter().filter(|e| e.beaten_by.is_some()).count();
    let report = HarnessReport { strategies: entries.len(), beaten, longest_cycle_needed: longest, entries, one_player_win };
    if report.beaten < report.strategies {
        return Err(GameError::SearchExhausted(format!(
            "{} of {} strategies not beaten with cycles up to {max_cycle}",
            report.strategies - report.beaten,
            report.strategies
        )));
    }
    if report.one_player_win.is_none() {
        return Err(GameError::SearchExhausted("no winning play in the one-player variant".into()));
    }
    Ok(report)
}
