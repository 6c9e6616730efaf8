//! Finite-memory strategies, product arenas and play tracing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, Edge, Player};
use crate::error::{GameError, Result};
use crate::lasso::Lasso;
use crate::skeleton::MemorySkeleton;

/// A strategy with finite memory, updated on every edge of the play.
pub trait Strategy {
    fn owner(&self) -> Player;
    fn mem_size(&self) -> usize;
    fn init_mem(&self) -> usize;
    /// The edge chosen at an owned state; `None` elsewhere.
    fn action(&self, mem: usize, s: usize) -> Option<Edge>;
    fn update(&self, mem: usize, e: &Edge) -> usize;
    fn mem_name(&self, mem: usize) -> String {
        format!("m{mem}")
    }
}

/// Skeleton plus next-action table, indexed by `mem * n_states + state`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MealyStrategy {
    owner: Player,
    skeleton: MemorySkeleton,
    n_states: usize,
    next: Vec<Option<Edge>>,
}

impl MealyStrategy {
    /// Checks that every (memory, owned state) pair picks an edge of `arena`
    /// leaving that state, and that other entries are empty.
    pub fn new(arena: &Arena, owner: Player, skeleton: MemorySkeleton, next: Vec<Option<Edge>>) -> Result<Self> {
        skeleton.check_alphabet(arena.colors())?;
        let n = arena.n_states();
        if next.len() != n * skeleton.n_states() {
            return Err(GameError::DanglingEdge("next-action table has the wrong size".into()));
        }
        for (i, e) in next.iter().enumerate() {
            let (m, s) = (i / n, i % n);
            match (arena.owner(s) == owner, e) {
                (true, Some(e)) if e.src == s && arena.has_edge(e) => {}
                (true, _) => {
                    return Err(GameError::DanglingEdge(format!(
                        "no valid action at ({}, {})",
                        arena.name(s),
                        skeleton.name(m)
                    )))
                }
                (false, Some(_)) => {
                    return Err(GameError::DanglingEdge(format!("action at opponent state {}", arena.name(s))))
                }
                (false, None) => {}
            }
        }
        Ok(MealyStrategy { owner, skeleton, n_states: n, next })
    }

    /// One memory state; `choice[s]` is the edge taken at each owned state.
    pub fn memoryless(arena: &Arena, owner: Player, choice: Vec<Option<Edge>>) -> Result<Self> {
        MealyStrategy::new(arena, owner, MemorySkeleton::trivial(arena.colors().to_vec()), choice)
    }

    /// Memoryless, always the least edge.
    pub fn lowest(arena: &Arena, owner: Player) -> Self {
        let choice = (0..arena.n_states())
            .map(|s| (arena.owner(s) == owner).then(|| *arena.out_edges(s).next().unwrap()))
            .collect();
        MealyStrategy::memoryless(arena, owner, choice).unwrap()
    }

    pub fn skeleton(&self) -> &MemorySkeleton {
        &self.skeleton
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn table(&self) -> &[Option<Edge>] {
        &self.next
    }

    pub fn is_memoryless(&self) -> bool {
        self.skeleton.n_states() == 1
    }

    /// Choices of a memoryless strategy.
    pub fn choices(&self) -> &[Option<Edge>] {
        &self.next[..self.n_states]
    }
}

impl Strategy for MealyStrategy {
    fn owner(&self) -> Player {
        self.owner
    }

    fn mem_size(&self) -> usize {
        self.skeleton.n_states()
    }

    fn init_mem(&self) -> usize {
        self.skeleton.init()
    }

    fn action(&self, mem: usize, s: usize) -> Option<Edge> {
        self.next[mem * self.n_states + s]
    }

    fn update(&self, mem: usize, e: &Edge) -> usize {
        self.skeleton.update(mem, e.color)
    }

    fn mem_name(&self, mem: usize) -> String {
        self.skeleton.name(mem).to_string()
    }
}

/// Plays `a` until the last visit of `t` was followed by an edge outside
/// `part_a`, then `b`; switches back the same way. Memory is the side bit.
/// Memory is updated on edges rather than colors, since the two sides of `t`
/// may share colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingStrategy {
    pub t: usize,
    pub part_a: Vec<Edge>,
    pub a: MealyStrategy,
    pub b: MealyStrategy,
    pub init_side: usize,
}

impl SwitchingStrategy {
    pub fn new(t: usize, part_a: Vec<Edge>, a: MealyStrategy, b: MealyStrategy, init_side: usize) -> Self {
        assert!(a.is_memoryless() && b.is_memoryless() && a.owner == b.owner);
        SwitchingStrategy { t, part_a, a, b, init_side }
    }
}

impl Strategy for SwitchingStrategy {
    fn owner(&self) -> Player {
        self.a.owner
    }

    fn mem_size(&self) -> usize {
        2
    }

    fn init_mem(&self) -> usize {
        self.init_side
    }

    fn action(&self, mem: usize, s: usize) -> Option<Edge> {
        if mem == 0 {
            self.a.action(0, s)
        } else {
            self.b.action(0, s)
        }
    }

    fn update(&self, mem: usize, e: &Edge) -> usize {
        if e.src == self.t {
            (!self.part_a.contains(e)) as usize
        } else {
            mem
        }
    }

    fn mem_name(&self, mem: usize) -> String {
        ["a", "b"][mem].into()
    }
}

/// Arena on pairs (state, memory). `pairs[i]` is the pair behind state `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductArena {
    pub arena: Arena,
    pub pairs: Vec<(usize, usize)>,
    pub base_states: usize,
    pub mem_size: usize,
}

impl ProductArena {
    pub fn index(&self, s: usize, m: usize) -> Option<usize> {
        if self.pairs.len() == self.base_states * self.mem_size {
            return Some(s * self.mem_size + m);
        }
        self.pairs.binary_search(&(s, m)).ok()
    }

    /// Keeps the part reachable from the given product states.
    pub fn restrict_reachable(&self, from: &[usize]) -> ProductArena {
        let keep = self.arena.reachable(from);
        let (arena, old) = self.arena.restrict(&keep).expect("reachable part is closed");
        let pairs = old.iter().map(|&i| self.pairs[i]).collect();
        ProductArena { arena, pairs, base_states: self.base_states, mem_size: self.mem_size }
    }

    /// Indices of `(s, m)` for every base state `s` present.
    pub fn layer(&self, m: usize) -> Vec<usize> {
        (0..self.pairs.len()).filter(|&i| self.pairs[i].1 == m).collect()
    }

    /// Projects a product edge onto the base arena.
    pub fn project(&self, e: &Edge) -> Edge {
        Edge::new(self.pairs[e.src].0, e.color, self.pairs[e.dst].0)
    }
}

/// Builds the product over all of `S × M`. `edge_ok(m, e)` filters base
/// edges per memory state and `step(m, e)` gives the next memory state.
fn build_product(
    a: &Arena,
    mem_size: usize,
    mem_name: &dyn Fn(usize) -> String,
    edge_ok: &dyn Fn(usize, &Edge) -> bool,
    step: &dyn Fn(usize, &Edge) -> usize,
) -> ProductArena {
    let n = a.n_states();
    let mut states = Vec::with_capacity(n * mem_size);
    let mut pairs = Vec::with_capacity(n * mem_size);
    let mut edges = Vec::new();
    for s in 0..n {
        for m in 0..mem_size {
            states.push((format!("({},{})", a.name(s), mem_name(m)), a.owner(s)));
            pairs.push((s, m));
            for e in a.out_edges(s).filter(|e| edge_ok(m, e)) {
                edges.push(Edge::new(s * mem_size + m, e.color, e.dst * mem_size + step(m, e)));
            }
        }
    }
    let arena = Arena::new(a.colors().to_vec(), states, edges).expect("product of a valid arena is valid");
    ProductArena { arena, pairs, base_states: n, mem_size }
}

/// `A ⋉ M` over all pairs.
pub fn product_arena(a: &Arena, sk: &MemorySkeleton) -> Result<ProductArena> {
    sk.check_alphabet(a.colors())?;
    Ok(build_product(a, sk.n_states(), &|m| sk.name(m).to_string(), &|_, _| true, &|m, e| {
        sk.update(m, e.color)
    }))
}

/// `A ⋉ M` restricted to the part reachable from `S × {m_init}`.
pub fn product_reachable(a: &Arena, sk: &MemorySkeleton) -> Result<ProductArena> {
    let p = product_arena(a, sk)?;
    let from = p.layer(sk.init());
    Ok(p.restrict_reachable(&from))
}

/// The arena of plays consistent with `sigma`: states `S × mem(sigma)`,
/// where states of sigma's owner keep only the chosen edge.
pub fn fix_opponent(a: &Arena, sigma: &dyn Strategy) -> Result<ProductArena> {
    for s in (0..a.n_states()).filter(|&s| a.owner(s) == sigma.owner()) {
        for m in 0..sigma.mem_size() {
            match sigma.action(m, s) {
                Some(e) if e.src == s && a.has_edge(&e) => {}
                _ => return Err(GameError::DanglingEdge(format!("strategy has no valid action at {}", a.name(s)))),
            }
        }
    }
    Ok(build_product(
        a,
        sigma.mem_size(),
        &|m| sigma.mem_name(m),
        &|m, e| a.owner(e.src) != sigma.owner() || sigma.action(m, e.src) == Some(*e),
        &|m, e| sigma.update(m, e),
    ))
}

/// The unique play from `s` consistent with both strategies.
pub fn play_of(a: &Arena, s: usize, sigma1: &dyn Strategy, sigma2: &dyn Strategy) -> Lasso {
    assert!(sigma1.owner() == Player::P1 && sigma2.owner() == Player::P2);
    let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut path = Vec::new();
    let mut cur = (s, sigma1.init_mem(), sigma2.init_mem());
    while !seen.contains_key(&cur) {
        seen.insert(cur, path.len());
        let (st, m1, m2) = cur;
        let e = match a.owner(st) {
            Player::P1 => sigma1.action(m1, st),
            Player::P2 => sigma2.action(m2, st),
        }
        .expect("strategy is total on its owner's states");
        path.push(e);
        cur = (e.dst, sigma1.update(m1, &e), sigma2.update(m2, &e));
    }
    let cycle = path.split_off(seen[&cur]);
    Lasso::new(path, cycle)
}

/// Memoryless strategy on `A ⋉ M_sigma` reading sigma's memory from the state.
pub fn ufm_to_ml(a: &Arena, sigma: &MealyStrategy) -> Result<(ProductArena, MealyStrategy)> {
    let p = product_arena(a, &sigma.skeleton)?;
    let choice = p
        .pairs
        .iter()
        .map(|&(s, m)| {
            sigma.action(m, s).map(|e| {
                let dst = p.index(e.dst, sigma.skeleton.update(m, e.color)).unwrap();
                Edge::new(p.index(s, m).unwrap(), e.color, dst)
            })
        })
        .collect();
    let ml = MealyStrategy::memoryless(&p.arena, sigma.owner, choice)?;
    Ok((p, ml))
}

/// Reads a memoryless strategy on a product (possibly restricted) as a
/// Mealy strategy on the base arena with skeleton `sk`. Pairs missing from the
/// product get the least edge.
pub fn ml_to_ufm(a: &Arena, p: &ProductArena, sk: &MemorySkeleton, tau: &MealyStrategy) -> Result<MealyStrategy> {
    let n = a.n_states();
    let owner = tau.owner;
    let mut next = vec![None; n * sk.n_states()];
    for m in 0..sk.n_states() {
        for s in (0..n).filter(|&s| a.owner(s) == owner) {
            next[m * n + s] = Some(match p.index(s, m) {
                Some(i) => p.project(&tau.action(0, i).expect("memoryless strategy is total")),
                None => *a.out_edges(s).next().unwrap(),
            });
        }
    }
    MealyStrategy::new(a, owner, sk.clone(), next)
}

/// Transports a Mealy strategy on the base arena to the product, keeping its
/// own memory: at `(s, m)` it takes the product edge above its base choice.
pub fn lift(p: &ProductArena, tau: &MealyStrategy) -> Result<MealyStrategy> {
    let np = p.arena.n_states();
    let mut next = vec![None; np * tau.mem_size()];
    for k in 0..tau.mem_size() {
        for (i, &(s, _)) in p.pairs.iter().enumerate() {
            if let Some(e) = tau.action(k, s) {
                let up = p
                    .arena
                    .out_edges(i)
                    .find(|pe| p.project(pe) == e)
                    .ok_or_else(|| GameError::DanglingEdge(format!("no product edge above {:?}", e)))?;
                next[k * np + i] = Some(*up);
            }
        }
    }
    MealyStrategy::new(&p.arena, tau.owner, tau.skeleton.clone(), next)
}

/// A strategy pair together with the start states it was certified from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certified {
    pub sigma1: MealyStrategy,
    pub sigma2: MealyStrategy,
    pub starts: Vec<usize>,
}

/// `(σ1 of the first pair, σ2 of the second)`.
pub fn mix_ne(x: &Certified, y: &Certified) -> Result<Certified> {
    let norm = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    if norm(&x.starts) != norm(&y.starts) {
        return Err(GameError::CertificateMismatch);
    }
    Ok(Certified { sigma1: x.sigma1.clone(), sigma2: y.sigma2.clone(), starts: x.starts.clone() })
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn product_plays_match_base_plays(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let colors = gen::color_names(rng.gen_range(1..=3));
            let n = rng.gen_range(1..=5);
            let a = gen::arena(&mut rng, &colors, n, 3, true);
            let (k, k1, k2) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
            let sk = gen::skeleton(&mut rng, &colors, k);
            let s1 = gen::skeleton(&mut rng, &colors, k1);
            let s2 = gen::skeleton(&mut rng, &colors, k2);
            let sigma = gen::mealy(&mut rng, &a, Player::P1, s1);
            let tau = gen::mealy(&mut rng, &a, Player::P2, s2);
            let p = product_arena(&a, &sk).unwrap();
            let (ls, lt) = (lift(&p, &sigma).unwrap(), lift(&p, &tau).unwrap());
            for s in 0..n {
                let base = play_of(&a, s, &sigma, &tau).colors();
                for m in 0..k {
                    let i = p.index(s, m).unwrap();
                    prop_assert_eq!(&play_of(&p.arena, i, &ls, &lt).colors(), &base);
                }
            }
        }
    }
}
