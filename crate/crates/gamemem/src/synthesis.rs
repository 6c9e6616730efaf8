//! Memoryless equilibria on covered arenas by recursive edge splitting, and
//! finite-memory equilibria on arbitrary arenas through the product.

use std::collections::HashMap;

use serde::Serialize;

use crate::arena::{Arena, Edge, Player};
use crate::covers::{check_cyclic_cover, check_prefix_cover};
use crate::error::{GameError, Result};
use crate::preference::{Relation, Side};
use crate::skeleton::MemorySkeleton;
use crate::strategy::{
    fix_opponent, ml_to_ufm, product_reachable, MealyStrategy, ProductArena, Strategy, SwitchingStrategy,
};

/// Arena, covered states, relation of P1, and the prefix/cycle skeletons of
/// each player.
#[derive(Clone, Debug)]
pub struct Problem {
    pub arena: Arena,
    pub s_cov: Vec<usize>,
    pub pref: Relation,
    pub p1_prefix: MemorySkeleton,
    pub p1_cycle: MemorySkeleton,
    pub p2_prefix: MemorySkeleton,
    pub p2_cycle: MemorySkeleton,
}

impl Problem {
    /// All four skeletons equal to `sk`.
    pub fn uniform(arena: Arena, s_cov: Vec<usize>, pref: Relation, sk: MemorySkeleton) -> Problem {
        Problem {
            arena,
            s_cov,
            pref,
            p1_prefix: sk.clone(),
            p1_cycle: sk.clone(),
            p2_prefix: sk.clone(),
            p2_cycle: sk,
        }
    }

    /// Product of the four skeletons, the deviation class for verification.
    pub fn joint_skeleton(&self) -> Result<MemorySkeleton> {
        MemorySkeleton::product_all(&[&self.p1_prefix, &self.p1_cycle, &self.p2_prefix, &self.p2_cycle])
    }

    pub fn check_covers(&self) -> Result<()> {
        let checks = [
            ("P1 prefix", &self.p1_prefix, true),
            ("P1 cycle", &self.p1_cycle, false),
            ("P2 prefix", &self.p2_prefix, true),
            ("P2 cycle", &self.p2_cycle, false),
        ];
        for (what, sk, prefix) in checks {
            let report = if prefix {
                check_prefix_cover(&self.arena, sk, &self.s_cov)?
            } else {
                check_cyclic_cover(&self.arena, sk, &self.s_cov)?
            };
            if !report.verdict {
                return Err(GameError::CoverViolation(format!("{what} skeleton does not cover the given states")));
            }
        }
        Ok(())
    }
}

/// One split decision made during the recursion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitRecord {
    pub focus: Player,
    pub choices: usize,
    pub state: String,
    /// Edge kept on side a.
    pub edge_a: String,
    pub prefix: Option<Vec<String>>,
    pub chose_a: bool,
}

/// The opponent strategy returned alongside a focus strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Opponent {
    Memoryless(MealyStrategy),
    Switching(SwitchingStrategy),
}

impl Strategy for Opponent {
    fn owner(&self) -> Player {
        match self {
            Opponent::Memoryless(s) => s.owner(),
            Opponent::Switching(s) => s.owner(),
        }
    }

    fn mem_size(&self) -> usize {
        match self {
            Opponent::Memoryless(s) => s.mem_size(),
            Opponent::Switching(s) => s.mem_size(),
        }
    }

    fn init_mem(&self) -> usize {
        match self {
            Opponent::Memoryless(s) => s.init_mem(),
            Opponent::Switching(s) => s.init_mem(),
        }
    }

    fn action(&self, mem: usize, s: usize) -> Option<Edge> {
        match self {
            Opponent::Memoryless(x) => x.action(mem, s),
            Opponent::Switching(x) => x.action(mem, s),
        }
    }

    fn update(&self, mem: usize, e: &Edge) -> usize {
        match self {
            Opponent::Memoryless(x) => x.update(mem, e),
            Opponent::Switching(x) => x.update(mem, e),
        }
    }

    fn mem_name(&self, mem: usize) -> String {
        match self {
            Opponent::Memoryless(x) => x.mem_name(mem),
            Opponent::Switching(x) => x.mem_name(mem),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquilibriumResult {
    pub sigma1: MealyStrategy,
    pub sigma2: MealyStrategy,
    pub starts: Vec<usize>,
    /// Skeleton of the deviation class the result is meant to be checked against.
    pub deviation_skeleton: MemorySkeleton,
    pub trace: Vec<SplitRecord>,
}

/// Recursion state: memoized focus strategies keyed by (edge set, focus).
struct Solver<'a> {
    s_cov: &'a [usize],
    pref: &'a Relation,
    memo: HashMap<(Vec<Edge>, Player), MealyStrategy>,
    trace: Vec<SplitRecord>,
}

impl Solver<'_> {
    fn relation(&self, focus: Player) -> Relation {
        match focus {
            Player::P1 => self.pref.clone(),
            Player::P2 => self.pref.inverse(),
        }
    }

    /// Memoryless strategy of `focus` from the equilibrium on `a`.
    fn focus(&mut self, a: &Arena, focus: Player) -> Result<MealyStrategy> {
        let key = (a.edges().to_vec(), focus);
        if let Some(s) = self.memo.get(&key) {
            return Ok(s.clone());
        }
        let s = match a.first_choice_state(focus) {
            None => MealyStrategy::lowest(a, focus),
            Some(t) => self.split(a, focus, t)?.0,
        };
        self.memo.insert(key, s.clone());
        Ok(s)
    }

    /// Splits at `t`, solves both halves and picks the better one for `focus`.
    /// Returns the focus strategy and the switching opponent strategy.
    fn split(&mut self, a: &Arena, focus: Player, t: usize) -> Result<(MealyStrategy, SwitchingStrategy)> {
        let opp = focus.opponent();
        let e_a = *a.out_edges(t).next().unwrap();
        let (arena_a, arena_b) = a.split_at(t, &[e_a])?;
        let focus_a = self.focus(&arena_a, focus)?;
        let opp_a = self.focus(&arena_a, opp)?;
        let history = a.shortest_history(self.s_cov, t);
        let (chose_a, focus_b, opp_b) = match &history {
            None => (true, focus_a.clone(), opp_a.clone()),
            Some(h) => {
                let focus_b = self.focus(&arena_b, focus)?;
                let opp_b = self.focus(&arena_b, opp)?;
                let w = h.colors();
                let fixed_a = fix_opponent(&arena_a, &opp_a)?;
                let fixed_b = fix_opponent(&arena_b, &opp_b)?;
                let start = |p: &ProductArena| [p.index(t, 0).unwrap()];
                let (sa, sb) = (start(&fixed_a), start(&fixed_b));
                let side_a = Side { arena: &fixed_a.arena, starts: &sa, prefix: &w };
                let side_b = Side { arena: &fixed_b.arena, starts: &sb, prefix: &w };
                let chose_a = self.relation(focus).set_leq(side_b, side_a)?;
                (chose_a, focus_b, opp_b)
            }
        };
        self.trace.push(SplitRecord {
            focus,
            choices: a.num_choices(),
            state: a.name(t).to_string(),
            edge_a: a.edge_label(&e_a),
            prefix: history.map(|h| h.colors().iter().map(|&c| a.color_name(c).to_string()).collect()),
            chose_a,
        });
        let chosen = if chose_a { focus_a } else { focus_b };
        let switching = SwitchingStrategy::new(t, vec![e_a], opp_a, opp_b, (!chose_a) as usize);
        Ok((chosen, switching))
    }
}

fn start(problem: &Problem) -> Result<Solver<'_>> {
    problem.pref.check_alphabet(problem.arena.colors())?;
    problem.check_covers()?;
    Ok(Solver { s_cov: &problem.s_cov, pref: &problem.pref, memo: HashMap::new(), trace: Vec::new() })
}

/// The equilibrium of the induction step for one player: a memoryless
/// strategy for `focus` and an opponent strategy (switching when a split
/// happened, memoryless otherwise).
pub fn step_focus(problem: &Problem, focus: Player) -> Result<(MealyStrategy, Opponent)> {
    let mut solver = start(problem)?;
    let a = &problem.arena;
    match a.first_choice_state(focus) {
        None => {
            let unique = MealyStrategy::lowest(a, focus);
            let opp = solver.focus(a, focus.opponent())?;
            Ok((unique, Opponent::Memoryless(opp)))
        }
        Some(t) => {
            let (f, sw) = solver.split(a, focus, t)?;
            Ok((f, Opponent::Switching(sw)))
        }
    }
}

/// Memoryless equilibrium from the covered states: the focus strategies of
/// the two induction steps, mixed.
pub fn solve_covered(problem: &Problem) -> Result<EquilibriumResult> {
    let mut solver = start(problem)?;
    let sigma1 = solver.focus(&problem.arena, Player::P1)?;
    let sigma2 = solver.focus(&problem.arena, Player::P2)?;
    Ok(EquilibriumResult {
        sigma1,
        sigma2,
        starts: problem.s_cov.clone(),
        deviation_skeleton: problem.joint_skeleton()?,
        trace: solver.trace,
    })
}

#[derive(Clone, Debug)]
pub struct GeneralResult {
    /// Mealy strategies on the base arena over `skeleton`.
    pub sigma1: MealyStrategy,
    pub sigma2: MealyStrategy,
    pub skeleton: MemorySkeleton,
    pub product: ProductArena,
    pub covered: EquilibriumResult,
}

/// Finite-memory equilibrium from every state, based on the product of
/// `skeletons` (trivial if none).
pub fn solve_general(a: &Arena, pref: &Relation, skeletons: &[MemorySkeleton]) -> Result<GeneralResult> {
    let sk = if skeletons.is_empty() {
        MemorySkeleton::trivial(a.colors().to_vec())
    } else {
        MemorySkeleton::product_all(&skeletons.iter().collect::<Vec<_>>())?
    };
    let product = product_reachable(a, &sk)?;
    let s_cov = product.layer(sk.init());
    let problem = Problem::uniform(product.arena.clone(), s_cov, pref.clone(), sk.clone());
    let covered = solve_covered(&problem)?;
    let sigma1 = ml_to_ufm(a, &product, &sk, &covered.sigma1)?;
    let sigma2 = ml_to_ufm(a, &product, &sk, &covered.sigma2)?;
    Ok(GeneralResult { sigma1, sigma2, skeleton: sk, product, covered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{play_of, ufm_to_ml};

    fn cs(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn fig6_base() -> Arena {
        Arena::new(
            cs(&["n", "t1", "t2"]),
            vec![("s1".into(), Player::P1), ("s2".into(), Player::P1), ("s3".into(), Player::P1)],
            vec![Edge::new(0, 0, 1), Edge::new(1, 1, 2), Edge::new(1, 2, 0), Edge::new(2, 0, 2)],
        )
        .unwrap()
    }

    fn mp() -> MemorySkeleton {
        MemorySkeleton::from_table(cs(&["mpi", "mp2"]), cs(&["n", "t1", "t2"]), 0, &[vec![0, 1, 0], vec![1, 1, 1]])
            .unwrap()
    }

    fn mc() -> MemorySkeleton {
        MemorySkeleton::from_table(cs(&["mci", "mc2", "mc3"]), cs(&["n", "t1", "t2"]), 0, &[
            vec![0, 2, 1],
            vec![1, 2, 1],
            vec![2, 2, 2],
        ])
        .unwrap()
    }

    fn gr() -> Relation {
        Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"])
    }

    #[test]
    fn fig6_general_plays_t2_then_t1() {
        let a = fig6_base();
        let res = solve_general(&a, &gr(), &[mp(), mc()]).unwrap();
        let tau = MealyStrategy::lowest(&a, Player::P2);
        let l = play_of(&a, 1, &res.sigma1, &tau);
        assert_eq!(l.colors().unroll(5), vec![2, 0, 1, 0, 0]);
        assert!(gr().lasso_in_win(&l.colors()).unwrap());
        // Pushing back to the product agrees with the covered solution on reachable pairs.
        let (full, ml) = ufm_to_ml(&a, &res.sigma1).unwrap();
        for (i, &(s, m)) in res.product.pairs.iter().enumerate() {
            let e = ml.action(0, full.index(s, m).unwrap()).unwrap();
            assert_eq!(full.project(&e), res.product.project(&res.covered.sigma1.action(0, i).unwrap()));
        }
    }

    #[test]
    fn no_choice_and_single_state() {
        let single = Arena::new(cs(&["a"]), vec![("s".into(), Player::P1)], vec![Edge::new(0, 0, 0)]).unwrap();
        let r = Relation::reachability(&["a"], &["a"]);
        let p = Problem::uniform(single.clone(), vec![0], r.clone(), MemorySkeleton::trivial(cs(&["a"])));
        let res = solve_covered(&p).unwrap();
        assert_eq!(res.sigma1.choices(), &[Some(Edge::new(0, 0, 0))]);
        let (f, opp) = step_focus(&p, Player::P1).unwrap();
        assert_eq!(f, res.sigma1);
        assert!(matches!(opp, Opponent::Memoryless(_)));
        let g = solve_general(&single, &r, &[]).unwrap();
        assert_eq!(g.sigma1.choices(), &[Some(Edge::new(0, 0, 0))]);
    }

    #[test]
    fn uncovered_is_rejected() {
        let p = Problem::uniform(fig6_base(), vec![0], gr(), mc());
        assert!(matches!(solve_covered(&p), Err(GameError::CoverViolation(_))));
    }
}
