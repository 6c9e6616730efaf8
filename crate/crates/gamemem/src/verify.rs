//! Equilibrium checks against bounded-memory deviations, best responses and
//! brute-force enumeration of memoryless equilibria.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::arena::{Arena, Edge, Player};
use crate::error::{GameError, Result};
use crate::lasso::{ColorLasso, Lasso};
use crate::preference::Relation;
use crate::skeleton::MemorySkeleton;
use crate::strategy::{fix_opponent, play_of, MealyStrategy, Strategy};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Which deviations are tried: Mealy strategies over one skeleton, over every
/// skeleton with at most `k` states, or any strategy at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeviationClass {
    Skeleton(MemorySkeleton),
    UpTo(usize),
    Unbounded,
}

impl DeviationClass {
    pub fn memoryless(colors: &[String]) -> Self {
        DeviationClass::Skeleton(MemorySkeleton::trivial(colors.to_vec()))
    }

    pub fn describe(&self) -> String {
        match self {
            DeviationClass::Skeleton(sk) if sk.n_states() == 1 => "memoryless".into(),
            DeviationClass::Skeleton(sk) => format!("skeleton with {} states", sk.n_states()),
            DeviationClass::UpTo(k) => format!("all skeletons with at most {k} states"),
            DeviationClass::Unbounded => "unbounded".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub player: Player,
    pub start: usize,
    pub strategy: MealyStrategy,
    /// Play of the deviation against the other strategy.
    pub lasso: Lasso,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeVerdict {
    pub verdict: bool,
    pub class: String,
    /// Equilibrium play from each start.
    pub values: Vec<(usize, Lasso)>,
    pub witness: Option<Witness>,
}

/// The relation a player maximizes.
pub fn relation_of(pref: &Relation, p: Player) -> Relation {
    match p {
        Player::P1 => pref.clone(),
        Player::P2 => pref.inverse(),
    }
}

/// Enumerates the plays of Mealy strategies of `player` over `sk` against
/// `opp`, branching on a (memory, state) pair only when the play first needs
/// it. Every leaf is the play of at least one strategy of the class.
struct Plays<'a> {
    a: &'a Arena,
    sk: &'a MemorySkeleton,
    player: Player,
    opp: &'a dyn Strategy,
    assign: Vec<Option<Edge>>,
    path: Vec<Edge>,
    pos: HashMap<(usize, usize, usize), usize>,
    leaves: u64,
    budget: u64,
}

type Visit<'f> = dyn FnMut(&Lasso, &[Option<Edge>]) -> Result<bool> + 'f;

impl<'a> Plays<'a> {
    fn new(a: &'a Arena, sk: &'a MemorySkeleton, player: Player, opp: &'a dyn Strategy, budget: u64) -> Self {
        Plays {
            a,
            sk,
            player,
            opp,
            assign: vec![None; a.n_states() * sk.n_states()],
            path: Vec::new(),
            pos: HashMap::new(),
            leaves: 0,
            budget,
        }
    }

    /// Calls `visit` on every play from `start`; stops when it returns true.
    fn run(&mut self, start: usize, visit: &mut Visit) -> Result<bool> {
        self.go((start, self.sk.init(), self.opp.init_mem()), visit)
    }

    fn go(&mut self, node: (usize, usize, usize), visit: &mut Visit) -> Result<bool> {
        if let Some(&i) = self.pos.get(&node) {
            self.leaves += 1;
            if self.leaves > self.budget {
                return Err(GameError::BudgetExceeded(format!("more than {} deviation plays", self.budget)));
            }
            let lasso = Lasso::new(self.path[..i].to_vec(), self.path[i..].to_vec());
            return visit(&lasso, &self.assign);
        }
        let (s, m, mo) = node;
        self.pos.insert(node, self.path.len());
        let slot = m * self.a.n_states() + s;
        let options: Vec<Edge> = if self.a.owner(s) != self.player {
            vec![self.opp.action(mo, s).expect("opponent strategy is total")]
        } else if let Some(e) = self.assign[slot] {
            vec![e]
        } else {
            self.a.out_edges(s).copied().collect()
        };
        let fresh = self.a.owner(s) == self.player && self.assign[slot].is_none();
        let mut stop = false;
        for e in options {
            if fresh {
                self.assign[slot] = Some(e);
            }
            self.path.push(e);
            let next = (e.dst, self.sk.update(m, e.color), self.opp.update(mo, &e));
            stop = self.go(next, visit)?;
            self.path.pop();
            if stop {
                break;
            }
        }
        if fresh && !stop {
            self.assign[slot] = None;
        }
        self.pos.remove(&node);
        Ok(stop)
    }

    /// Completes a partial table with least edges.
    fn strategy(&self, assign: &[Option<Edge>]) -> MealyStrategy {
        let n = self.a.n_states();
        let next = assign
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let s = i % n;
                (self.a.owner(s) == self.player).then(|| e.unwrap_or_else(|| *self.a.out_edges(s).next().unwrap()))
            })
            .collect();
        MealyStrategy::new(self.a, self.player, self.sk.clone(), next).unwrap()
    }
}

/// A Mealy strategy of `player` whose play against the right opponent is
/// exactly `lasso`: memory counts the position along the lasso.
pub fn follower(a: &Arena, player: Player, lasso: &Lasso) -> MealyStrategy {
    let seq: Vec<Edge> = lasso.prefix().iter().chain(lasso.cycle()).copied().collect();
    let (len, back) = (seq.len(), lasso.prefix().len());
    let table: Vec<Vec<usize>> = (0..len)
        .map(|i| {
            (0..a.n_colors()).map(|c| if c == seq[i].color { if i + 1 < len { i + 1 } else { back } } else { i }).collect()
        })
        .collect();
    let names = (0..len).map(|i| format!("p{i}")).collect();
    let sk = MemorySkeleton::from_table(names, a.colors().to_vec(), 0, &table).unwrap();
    let n = a.n_states();
    let next = (0..len * n)
        .map(|i| {
            let (m, s) = (i / n, i % n);
            (a.owner(s) == player).then(|| if seq[m].src == s { seq[m] } else { *a.out_edges(s).next().unwrap() })
        })
        .collect();
    MealyStrategy::new(a, player, sk, next).unwrap()
}

fn skeletons_of(class: &DeviationClass, colors: &[String]) -> Vec<MemorySkeleton> {
    match class {
        DeviationClass::Skeleton(sk) => vec![sk.clone()],
        DeviationClass::UpTo(k) => MemorySkeleton::enumerate(colors, *k),
        DeviationClass::Unbounded => Vec::new(),
    }
}

/// The best play `player` can force against `opp` over all strategies.
fn unbounded_best(a: &Arena, rel: &Relation, opp: &dyn Strategy, start: usize) -> Result<Lasso> {
    let fixed = fix_opponent(a, opp)?;
    let st = fixed.index(start, opp.init_mem()).unwrap();
    let sup = rel.sup_play(&fixed.arena, &[st], &[])?;
    Ok(sup.lasso().expect("non-blocking arena has plays").map_edges(|e| fixed.project(e)))
}

/// A deviation of `player` from `start` strictly better than `value`.
fn improving(
    a: &Arena,
    pref: &Relation,
    player: Player,
    opp: &dyn Strategy,
    start: usize,
    value: &ColorLasso,
    class: &DeviationClass,
    budget: u64,
) -> Result<Option<Witness>> {
    let rel = relation_of(pref, player);
    let best = unbounded_best(a, &rel, opp, start)?;
    if rel.compare(value, &best.colors())? != Ordering::Less {
        return Ok(None);
    }
    if *class == DeviationClass::Unbounded {
        let strategy = follower(a, player, &best);
        return Ok(Some(Witness { player, start, strategy, lasso: best }));
    }
    for sk in skeletons_of(class, a.colors()) {
        let mut plays = Plays::new(a, &sk, player, opp, budget);
        let mut found = None;
        plays.run(start, &mut |l, assign| {
            if rel.compare(value, &l.colors())? == Ordering::Less {
                found = Some((l.clone(), assign.to_vec()));
                return Ok(true);
            }
            Ok(false)
        })?;
        if let Some((lasso, assign)) = found {
            return Ok(Some(Witness { player, start, strategy: plays.strategy(&assign), lasso }));
        }
    }
    Ok(None)
}

/// Checks that no deviation of the class improves either player's outcome
/// from any of `starts`. The unbounded best response is computed first, and
/// the class is only searched when it beats the equilibrium play.
pub fn is_ne_within(
    a: &Arena,
    pref: &Relation,
    sigma1: &dyn Strategy,
    sigma2: &dyn Strategy,
    starts: &[usize],
    class: &DeviationClass,
    budget: u64,
) -> Result<NeVerdict> {
    pref.check_alphabet(a.colors())?;
    let mut values = Vec::new();
    for &s in starts {
        let value = play_of(a, s, sigma1, sigma2);
        let colors = value.colors();
        values.push((s, value));
        for (player, opp) in [(Player::P1, sigma2), (Player::P2, sigma1)] {
            if let Some(w) = improving(a, pref, player, opp, s, &colors, class, budget)? {
                return Ok(NeVerdict { verdict: false, class: class.describe(), values, witness: Some(w) });
            }
        }
    }
    Ok(NeVerdict { verdict: true, class: class.describe(), values, witness: None })
}

/// The best play the opponent of `sigma`'s owner achieves from `start` with a
/// strategy of the class, under its own relation (the inverse for P2).
pub fn best_response_within(
    a: &Arena,
    pref: &Relation,
    sigma: &dyn Strategy,
    start: usize,
    class: &DeviationClass,
    budget: u64,
) -> Result<Lasso> {
    let player = sigma.owner().opponent();
    let rel = relation_of(pref, player);
    if *class == DeviationClass::Unbounded {
        return unbounded_best(a, &rel, sigma, start);
    }
    let mut best: Option<Lasso> = None;
    for sk in skeletons_of(class, a.colors()) {
        Plays::new(a, &sk, player, sigma, budget).run(start, &mut |l, _| {
            let better = match &best {
                None => true,
                Some(b) => rel.compare(&b.colors(), &l.colors())? == Ordering::Less,
            };
            if better {
                best = Some(l.clone());
            }
            Ok(false)
        })?;
    }
    Ok(best.expect("class is non-empty"))
}

/// Every memoryless pair that is an equilibrium from all of `starts` against
/// the class, in lexicographic order of the choice vectors.
pub fn enumerate_ne(
    a: &Arena,
    pref: &Relation,
    starts: &[usize],
    class: &DeviationClass,
    budget: u64,
) -> Result<Vec<(MealyStrategy, MealyStrategy)>> {
    let n = a.n_states();
    let outs: Vec<Vec<Edge>> = (0..n).map(|s| a.out_edges(s).copied().collect()).collect();
    let total = outs.iter().try_fold(1u64, |acc, o| acc.checked_mul(o.len() as u64).filter(|&x| x <= budget));
    if total.is_none() {
        return Err(GameError::BudgetExceeded(format!("more than {budget} memoryless pairs")));
    }
    let mut idx = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let pick = |p: Player| -> Vec<Option<Edge>> {
            (0..n).map(|s| (a.owner(s) == p).then(|| outs[s][idx[s]])).collect()
        };
        let s1 = MealyStrategy::memoryless(a, Player::P1, pick(Player::P1))?;
        let s2 = MealyStrategy::memoryless(a, Player::P2, pick(Player::P2))?;
        if is_ne_within(a, pref, &s1, &s2, starts, class, budget)?.verdict {
            out.push((s1, s2));
        }
        // Odometer, last state fastest.
        let mut s = n;
        loop {
            if s == 0 {
                return Ok(out);
            }
            s -= 1;
            idx[s] += 1;
            if idx[s] < outs[s].len() {
                break;
            }
            idx[s] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::strategy::{mix_ne, product_reachable, Certified};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn cs(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn fig1() -> Arena {
        Arena::new(
            cs(&["-1", "1"]),
            vec![("s1".into(), Player::P1), ("s2".into(), Player::P2)],
            vec![Edge::new(0, 0, 0), Edge::new(0, 1, 1), Edge::new(1, 1, 1), Edge::new(1, 0, 0)],
        )
        .unwrap()
    }

    fn fig6_product() -> (Arena, Vec<usize>) {
        let base = Arena::new(
            cs(&["n", "t1", "t2"]),
            vec![("s1".into(), Player::P1), ("s2".into(), Player::P1), ("s3".into(), Player::P1)],
            vec![Edge::new(0, 0, 1), Edge::new(1, 1, 2), Edge::new(1, 2, 0), Edge::new(2, 0, 2)],
        )
        .unwrap();
        let sk = MemorySkeleton::from_table(cs(&["mi", "m2", "m3"]), cs(&["n", "t1", "t2"]), 0, &[
            vec![0, 2, 1],
            vec![1, 2, 1],
            vec![2, 2, 2],
        ])
        .unwrap();
        let p = product_reachable(&base, &sk).unwrap();
        let cov = p.layer(0);
        (p.arena, cov)
    }

    fn gr() -> Relation {
        Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"])
    }

    /// Bold σ1: t2 at (s2,mi), t1 at (s2,m2).
    fn bold(a: &Arena) -> MealyStrategy {
        let choice = (0..a.n_states())
            .map(|s| {
                let name = a.name(s);
                let want = match name {
                    "(s2,mi)" => Some(2),
                    "(s2,m2)" => Some(1),
                    _ => None,
                };
                Some(*a.out_edges(s).find(|e| want.map_or(true, |c| e.color == c)).unwrap())
            })
            .collect();
        MealyStrategy::memoryless(a, Player::P1, choice).unwrap()
    }

    #[test]
    fn fig6_bold_pair() {
        let (a, cov) = fig6_product();
        let s1 = bold(&a);
        let s2 = MealyStrategy::lowest(&a, Player::P2);
        let class = DeviationClass::UpTo(2);
        let v = is_ne_within(&a, &gr(), &s1, &s2, &cov, &class, DEFAULT_BUDGET).unwrap();
        assert!(v.verdict);
        let s22 = a.state_index("(s2,m2)").unwrap();
        let v = is_ne_within(&a, &gr(), &s1, &s2, &[s22], &class, DEFAULT_BUDGET).unwrap();
        assert!(!v.verdict);
        let w = v.witness.unwrap();
        assert_eq!(w.player, Player::P1);
        assert_eq!(w.strategy.skeleton().n_states(), 2);
        let replay = play_of(&a, s22, &w.strategy, &s2);
        assert_eq!(replay.colors(), w.lasso.colors());
        assert_eq!(replay.colors().unroll(5), vec![2, 0, 1, 0, 0]);
        // Memoryless deviations do not help from there.
        let ml = DeviationClass::memoryless(a.colors());
        assert!(is_ne_within(&a, &gr(), &s1, &s2, &[s22], &ml, DEFAULT_BUDGET).unwrap().verdict);
        let br = best_response_within(&a, &gr(), &s2, s22, &ml, DEFAULT_BUDGET).unwrap();
        assert_eq!(br.colors().unroll(3), vec![1, 0, 0]);
    }

    #[test]
    fn fig1_best_response_loops_on_minus_one() {
        let a = fig1();
        let r = Relation::appendix_a(&["-1", "1"], &[-1, 1]);
        // P1 always takes the edge to s2.
        let s1 = MealyStrategy::memoryless(&a, Player::P1, vec![Some(Edge::new(0, 1, 1)), None]).unwrap();
        let br = best_response_within(&a, &r, &s1, 0, &DeviationClass::Unbounded, DEFAULT_BUDGET).unwrap();
        assert!(!r.lasso_in_win(&br.colors()).unwrap());
        let loop1 = MealyStrategy::memoryless(&a, Player::P1, vec![Some(Edge::new(0, 0, 0)), None]).unwrap();
        let br = best_response_within(&a, &r, &loop1, 0, &DeviationClass::UpTo(1), DEFAULT_BUDGET).unwrap();
        assert_eq!(br.colors(), ColorLasso::new(vec![], vec![0]));
    }

    #[test]
    fn enumeration_examples() {
        let (a, cov) = fig6_product();
        let ml = DeviationClass::memoryless(a.colors());
        let all = enumerate_ne(&a, &gr(), &cov, &ml, DEFAULT_BUDGET).unwrap();
        assert!(all.iter().any(|(s1, _)| *s1 == bold(&a)));
        let base = Arena::new(
            cs(&["n", "t1", "t2"]),
            vec![("s1".into(), Player::P1), ("s2".into(), Player::P1), ("s3".into(), Player::P1)],
            vec![Edge::new(0, 0, 1), Edge::new(1, 1, 2), Edge::new(1, 2, 0), Edge::new(2, 0, 2)],
        )
        .unwrap();
        let none = enumerate_ne(&base, &gr(), &[1], &DeviationClass::Unbounded, DEFAULT_BUDGET).unwrap();
        assert!(none.is_empty());
        let ml_base = enumerate_ne(&base, &gr(), &[1], &DeviationClass::memoryless(base.colors()), DEFAULT_BUDGET).unwrap();
        assert_eq!(ml_base.len(), 2);
        let forced = Arena::new(cs(&["n"]), vec![("x".into(), Player::P1), ("y".into(), Player::P2)], vec![
            Edge::new(0, 0, 1),
            Edge::new(1, 0, 0),
        ])
        .unwrap();
        let r = Relation::reachability(&["n"], &["n"]);
        assert_eq!(enumerate_ne(&forced, &r, &[0, 1], &DeviationClass::UpTo(2), DEFAULT_BUDGET).unwrap().len(), 1);
        assert!(matches!(enumerate_ne(&a, &gr(), &cov, &ml, 1), Err(GameError::BudgetExceeded(_))));
    }

    fn random_game(seed: u64) -> (Arena, Relation) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let colors = ["n", "t1", "t2"];
        let n = rng.gen_range(1..=4);
        let a = gen::arena(&mut rng, &cs(&colors), n, 2, true);
        (a, Relation::gen_reach2(&colors, &["t1"], &["t2"]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn witnesses_replay_and_symmetry(seed in any::<u64>()) {
            let (a, r) = random_game(seed);
            let all: Vec<usize> = (0..a.n_states()).collect();
            let s1 = MealyStrategy::lowest(&a, Player::P1);
            let s2 = MealyStrategy::lowest(&a, Player::P2);
            for class in [DeviationClass::memoryless(a.colors()), DeviationClass::UpTo(2), DeviationClass::Unbounded] {
                let v = is_ne_within(&a, &r, &s1, &s2, &all, &class, DEFAULT_BUDGET).unwrap();
                if let Some(w) = &v.witness {
                    let replay = match w.player {
                        Player::P1 => play_of(&a, w.start, &w.strategy, &s2),
                        Player::P2 => play_of(&a, w.start, &s1, &w.strategy),
                    };
                    prop_assert_eq!(replay.colors(), w.lasso.colors());
                    let value = play_of(&a, w.start, &s1, &s2);
                    let rel = relation_of(&r, w.player);
                    prop_assert_eq!(rel.compare(&value.colors(), &replay.colors()).unwrap(), Ordering::Less);
                }
                // Swap owners and strategies, invert the relation.
                let owners: Vec<Player> = a.owners().iter().map(|p| p.opponent()).collect();
                let b = a.with_owners(owners);
                let t1 = MealyStrategy::memoryless(&b, Player::P1, s2.choices().to_vec()).unwrap();
                let t2 = MealyStrategy::memoryless(&b, Player::P2, s1.choices().to_vec()).unwrap();
                let u = is_ne_within(&b, &r.inverse(), &t1, &t2, &all, &class, DEFAULT_BUDGET).unwrap();
                prop_assert_eq!(u.verdict, v.verdict);
            }
        }

        #[test]
        fn crossed_equilibria_and_one_sided_optimality(seed in any::<u64>()) {
            let (a, r) = random_game(seed);
            let all: Vec<usize> = (0..a.n_states()).collect();
            let class = DeviationClass::memoryless(a.colors());
            let nes = enumerate_ne(&a, &r, &all, &class, DEFAULT_BUDGET).unwrap();
            for (x1, x2) in &nes {
                for (y1, y2) in &nes {
                    let x = Certified { sigma1: x1.clone(), sigma2: x2.clone(), starts: all.clone() };
                    let y = Certified { sigma1: y1.clone(), sigma2: y2.clone(), starts: all.clone() };
                    let z = mix_ne(&x, &y).unwrap();
                    let v = is_ne_within(&a, &r, &z.sigma1, &z.sigma2, &all, &class, DEFAULT_BUDGET).unwrap();
                    prop_assert!(v.verdict);
                    for &s in &all {
                        let vx = play_of(&a, s, x1, x2).colors();
                        let vz = play_of(&a, s, &z.sigma1, &z.sigma2).colors();
                        prop_assert_eq!(r.compare(&vx, &vz).unwrap(), Ordering::Equal);
                    }
                }
                for &s in &all {
                    let value = play_of(&a, s, x1, x2).colors();
                    let b2 = best_response_within(&a, &r, x1, s, &class, DEFAULT_BUDGET).unwrap();
                    prop_assert_ne!(r.inverse().compare(&value, &b2.colors()).unwrap(), Ordering::Less);
                    let b1 = best_response_within(&a, &r, x2, s, &class, DEFAULT_BUDGET).unwrap();
                    prop_assert_ne!(r.compare(&value, &b1.colors()).unwrap(), Ordering::Less);
                }
            }
        }
    }
}
