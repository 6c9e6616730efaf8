//! Seeded random instances for property suites and acceptance runs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arena::{Arena, Edge, Player};
use crate::automata::Nfa;
use crate::skeleton::MemorySkeleton;
use crate::strategy::MealyStrategy;

pub fn color_names(k: usize) -> Vec<String> {
    (0..k).map(|c| format!("c{c}")).collect()
}

/// Every state gets between 1 and `max_out` outgoing edges. With `two_player`
/// owners are drawn uniformly, otherwise all states belong to P1.
pub fn arena<R: Rng>(rng: &mut R, colors: &[String], n: usize, max_out: usize, two_player: bool) -> Arena {
    let mut states = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for s in 0..n {
        let owner = if two_player && rng.gen_bool(0.5) { Player::P2 } else { Player::P1 };
        states.push((format!("s{s}"), owner));
        for _ in 0..rng.gen_range(1..=max_out) {
            edges.push(Edge::new(s, rng.gen_range(0..colors.len()), rng.gen_range(0..n)));
        }
    }
    Arena::new(colors.to_vec(), states, edges).unwrap()
}

pub fn skeleton<R: Rng>(rng: &mut R, colors: &[String], n: usize) -> MemorySkeleton {
    let names = (0..n).map(|m| format!("m{m}")).collect();
    let table: Vec<Vec<usize>> = (0..n).map(|_| (0..colors.len()).map(|_| rng.gen_range(0..n)).collect()).collect();
    MemorySkeleton::from_table(names, colors.to_vec(), 0, &table).unwrap()
}

pub fn nfa<R: Rng>(rng: &mut R, colors: &[String], n: usize, n_trans: usize) -> Nfa {
    let delta = (0..n_trans)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..colors.len()), rng.gen_range(0..n)))
        .collect();
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let n_fin = rng.gen_range(1..=n);
    let names = (0..n).map(|q| format!("q{q}")).collect();
    Nfa::new(names, colors.to_vec(), delta, vec![0], states[..n_fin].to_vec()).unwrap()
}

/// Weights drawn from `lo..=hi`, one per color.
pub fn weights<R: Rng>(rng: &mut R, k: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..k).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Uniformly random next-action table over `sk`.
pub fn mealy<R: Rng>(rng: &mut R, a: &Arena, owner: Player, sk: MemorySkeleton) -> MealyStrategy {
    let n = a.n_states();
    let next = (0..n * sk.n_states())
        .map(|i| {
            let s = i % n;
            (a.owner(s) == owner).then(|| {
                let out: Vec<&Edge> = a.out_edges(s).collect();
                *out[rng.gen_range(0..out.len())]
            })
        })
        .collect();
    MealyStrategy::new(a, owner, sk, next).unwrap()
}
