//! Preference relations on ultimately periodic color words.
//!
//! A relation maps every [`ColorLasso`] to a [`Score`]; the preorder is the
//! order on scores, reversed for the inverse relation. Set comparisons go
//! through [`Relation::sup_play`], which returns a lasso attaining the best
//! class among all plays of a one-player arena.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arena::{Arena, Edge};
use crate::error::{GameError, Result};
use crate::graph::Digraph;
use crate::lasso::{ColorLasso, Lasso};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Reachability,
    GenReach2,
    Parity,
    MeanPayoffLimInf,
    AppendixA,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Reachability => "Reachability",
            Kind::GenReach2 => "GenReach2",
            Kind::Parity => "Parity",
            Kind::MeanPayoffLimInf => "MeanPayoffLimInf",
            Kind::AppendixA => "AppendixA",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        [Kind::Reachability, Kind::GenReach2, Kind::Parity, Kind::MeanPayoffLimInf, Kind::AppendixA]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
    }

    pub fn is_qualitative(self) -> bool {
        self != Kind::MeanPayoffLimInf
    }
}

/// Per-color payload. Which fields matter depends on the relation kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorAttr {
    pub weight: Option<i64>,
    pub priority: Option<u32>,
    pub t1: bool,
    pub t2: bool,
}

/// The value class of a word. Within one relation all scores share a variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Score {
    Bool(bool),
    Mean(Ratio<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupResult {
    Empty,
    /// `colors` is the prefix followed by the lasso's colors.
    Attained { lasso: Lasso, colors: ColorLasso },
}

impl SupResult {
    pub fn colors(&self) -> Option<&ColorLasso> {
        match self {
            SupResult::Empty => None,
            SupResult::Attained { colors, .. } => Some(colors),
        }
    }

    pub fn lasso(&self) -> Option<&Lasso> {
        match self {
            SupResult::Empty => None,
            SupResult::Attained { lasso, .. } => Some(lasso),
        }
    }
}

/// One side of a set comparison: the plays of `arena` from any of `starts`,
/// each preceded by the color word `prefix`.
#[derive(Clone, Copy, Debug)]
pub struct Side<'a> {
    pub arena: &'a Arena,
    pub starts: &'a [usize],
    pub prefix: &'a [usize],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    kind: Kind,
    colors: Vec<String>,
    attrs: Vec<ColorAttr>,
    inverted: bool,
}

impl Relation {
    /// Checks that every color carries the attributes `kind` needs.
    pub fn new(kind: Kind, colors: Vec<String>, attrs: Vec<ColorAttr>) -> Result<Relation> {
        if colors.len() != attrs.len() {
            return Err(GameError::AlphabetMismatch("one attribute entry per color expected".into()));
        }
        for (c, a) in colors.iter().zip(&attrs) {
            let missing = match kind {
                Kind::MeanPayoffLimInf | Kind::AppendixA => a.weight.is_none(),
                Kind::Parity => a.priority.is_none(),
                Kind::Reachability | Kind::GenReach2 => false,
            };
            if missing {
                return Err(GameError::UnknownColor(format!("{c} lacks the attribute required by {}", kind.name())));
            }
        }
        Ok(Relation { kind, colors, attrs, inverted: false })
    }

    pub fn reachability(colors: &[&str], targets: &[&str]) -> Relation {
        let attrs = colors
            .iter()
            .map(|c| ColorAttr { t1: targets.contains(c), ..Default::default() })
            .collect();
        Relation::new(Kind::Reachability, own(colors), attrs).unwrap()
    }

    pub fn gen_reach2(colors: &[&str], t1: &[&str], t2: &[&str]) -> Relation {
        let attrs = colors
            .iter()
            .map(|c| ColorAttr { t1: t1.contains(c), t2: t2.contains(c), ..Default::default() })
            .collect();
        Relation::new(Kind::GenReach2, own(colors), attrs).unwrap()
    }

    pub fn parity(colors: &[&str], priorities: &[u32]) -> Relation {
        let attrs = priorities.iter().map(|&p| ColorAttr { priority: Some(p), ..Default::default() }).collect();
        Relation::new(Kind::Parity, own(colors), attrs).unwrap()
    }

    pub fn mean_payoff(colors: &[&str], weights: &[i64]) -> Relation {
        Relation::new(Kind::MeanPayoffLimInf, own(colors), weight_attrs(weights)).unwrap()
    }

    pub fn appendix_a(colors: &[&str], weights: &[i64]) -> Relation {
        Relation::new(Kind::AppendixA, own(colors), weight_attrs(weights)).unwrap()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn attrs(&self) -> &[ColorAttr] {
        &self.attrs
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    pub fn inverse(&self) -> Relation {
        Relation { inverted: !self.inverted, ..self.clone() }
    }

    /// The same relation re-indexed for another alphabet, matched by name.
    pub fn align_to(&self, colors: &[String]) -> Result<Relation> {
        let attrs = colors
            .iter()
            .map(|c| {
                self.colors
                    .iter()
                    .position(|x| x == c)
                    .map(|i| self.attrs[i].clone())
                    .ok_or_else(|| GameError::UnknownColor(c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Relation { kind: self.kind, colors: colors.to_vec(), attrs, inverted: self.inverted })
    }

    pub fn check_alphabet(&self, colors: &[String]) -> Result<()> {
        if colors != self.colors.as_slice() {
            return Err(GameError::AlphabetMismatch(format!(
                "relation over [{}], arena over [{}]",
                self.colors.join(" "),
                colors.join(" ")
            )));
        }
        Ok(())
    }

    fn weight(&self, c: usize) -> i64 {
        self.attrs[c].weight.unwrap_or(0)
    }

    fn priority(&self, c: usize) -> u32 {
        self.attrs[c].priority.unwrap_or(0)
    }

    fn flags(&self, c: usize) -> i64 {
        let a = &self.attrs[c];
        (a.t1 as i64) | ((a.t2 as i64) << 1)
    }

    fn full_flags(&self) -> i64 {
        if self.kind == Kind::GenReach2 {
            3
        } else {
            1
        }
    }

    fn check_word(&self, w: &[usize]) -> Result<()> {
        match w.iter().find(|&&c| c >= self.colors.len()) {
            Some(c) => Err(GameError::UnknownColor(format!("#{c}"))),
            None => Ok(()),
        }
    }

    /// Summary of a finite prefix that, together with the rest of the word,
    /// determines the value: seen target flags, the running sum, or nothing.
    pub fn prefix_key(&self, w: &[usize]) -> i64 {
        match self.kind {
            Kind::Reachability | Kind::GenReach2 => w.iter().fold(0, |f, &c| f | self.flags(c)),
            Kind::AppendixA => w.iter().map(|&c| self.weight(c)).sum(),
            Kind::Parity | Kind::MeanPayoffLimInf => 0,
        }
    }

    /// `prefix_key` after one more color.
    pub fn step_key(&self, key: i64, c: usize) -> i64 {
        match self.kind {
            Kind::Reachability | Kind::GenReach2 => key | self.flags(c),
            Kind::AppendixA => key + self.weight(c),
            Kind::Parity | Kind::MeanPayoffLimInf => 0,
        }
    }

    /// Whether prefixes fall into finitely many key classes.
    pub fn has_finite_keys(&self) -> bool {
        self.kind != Kind::AppendixA
    }

    /// The best score for the owner of the relation, as an un-inverted score.
    pub fn top_score(&self) -> Score {
        match self.kind {
            Kind::MeanPayoffLimInf => {
                let ws = (0..self.colors.len()).map(|c| self.weight(c));
                let w = if self.inverted { ws.min() } else { ws.max() };
                Score::Mean(Ratio::from_integer(w.unwrap_or(0)))
            }
            _ => Score::Bool(!self.inverted),
        }
    }

    /// Score of the word under the un-inverted relation.
    pub fn score(&self, l: &ColorLasso) -> Result<Score> {
        self.check_word(l.u())?;
        self.check_word(l.v())?;
        let (u, v) = (l.u(), l.v());
        Ok(match self.kind {
            Kind::Reachability | Kind::GenReach2 => {
                let f = self.prefix_key(u) | self.prefix_key(v);
                Score::Bool(f == self.full_flags())
            }
            Kind::Parity => Score::Bool(v.iter().map(|&c| self.priority(c)).max().unwrap() % 2 == 0),
            Kind::MeanPayoffLimInf => {
                let sum: i64 = v.iter().map(|&c| self.weight(c)).sum();
                Score::Mean(Ratio::new(sum, v.len() as i64))
            }
            Kind::AppendixA => {
                let cycle: i64 = v.iter().map(|&c| self.weight(c)).sum();
                let win = match cycle.cmp(&0) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => {
                        let mut total = self.prefix_key(u);
                        let mut hit = total == 0;
                        for &c in v {
                            total += self.weight(c);
                            hit |= total == 0;
                        }
                        hit
                    }
                };
                Score::Bool(win)
            }
        })
    }

    /// `Less` iff `l1` is strictly worse than `l2` for the player owning the relation.
    pub fn compare(&self, l1: &ColorLasso, l2: &ColorLasso) -> Result<Ordering> {
        let ord = self.score(l1)?.cmp(&self.score(l2)?);
        Ok(if self.inverted { ord.reverse() } else { ord })
    }

    /// Membership in the top class of a qualitative relation (the losing set
    /// of the original relation when inverted).
    pub fn lasso_in_win(&self, l: &ColorLasso) -> Result<bool> {
        if !self.kind.is_qualitative() {
            return Err(GameError::NotQualitative(self.kind.name().into()));
        }
        let Score::Bool(b) = self.score(l)? else { unreachable!() };
        Ok(b != self.inverted)
    }

    /// A play from one of `starts`, traversing `arena` regardless of owners,
    /// whose prefixed color word is maximal for this relation.
    pub fn sup_play(&self, arena: &Arena, starts: &[usize], prefix: &[usize]) -> Result<SupResult> {
        self.check_alphabet(arena.colors())?;
        self.check_word(prefix)?;
        if starts.is_empty() {
            return Ok(SupResult::Empty);
        }
        let want_win = !self.inverted;
        let found = match self.kind {
            Kind::Reachability | Kind::GenReach2 => self.flag_search(arena, starts, prefix, want_win),
            Kind::Parity => self.parity_search(arena, starts, want_win),
            Kind::MeanPayoffLimInf => mean_lasso(arena, starts, &self.weights_signed(!want_win)).map(|(_, l)| l),
            Kind::AppendixA => self.appendix_search(arena, starts, prefix, want_win),
        };
        let lasso = found.unwrap_or_else(|| any_lasso(arena, starts[0]));
        let colors = lasso.colors().prepend(prefix);
        Ok(SupResult::Attained { lasso, colors })
    }

    /// Compares two attained suprema; the empty set is below everything.
    pub fn compare_sups(&self, a: &SupResult, b: &SupResult) -> Result<Ordering> {
        match (a.colors(), b.colors()) {
            (None, None) => Ok(Ordering::Equal),
            (None, Some(_)) => Ok(Ordering::Less),
            (Some(_), None) => Ok(Ordering::Greater),
            (Some(x), Some(y)) => self.compare(x, y),
        }
    }

    pub fn set_leq(&self, left: Side, right: Side) -> Result<bool> {
        let a = self.sup_play(left.arena, left.starts, left.prefix)?;
        if a == SupResult::Empty {
            return Ok(true);
        }
        let b = self.sup_play(right.arena, right.starts, right.prefix)?;
        Ok(self.compare_sups(&a, &b)? != Ordering::Greater)
    }

    pub fn set_lt(&self, left: Side, right: Side) -> Result<bool> {
        let b = self.sup_play(right.arena, right.starts, right.prefix)?;
        if b == SupResult::Empty {
            return Ok(false);
        }
        let a = self.sup_play(left.arena, left.starts, left.prefix)?;
        Ok(self.compare_sups(&a, &b)? == Ordering::Less)
    }

    fn weights_signed(&self, negate: bool) -> Vec<i64> {
        (0..self.colors.len()).map(|c| if negate { -self.weight(c) } else { self.weight(c) }).collect()
    }

    fn flag_search(&self, arena: &Arena, starts: &[usize], prefix: &[usize], win: bool) -> Option<Lasso> {
        let full = self.full_flags();
        let init = self.prefix_key(prefix);
        let mon = Monitor::build(arena, starts, init, |q, c| Some(q | self.flags(c)));
        if win {
            mon.find(&|_| true, &|_| true, &|ei| mon.q(mon.g.edges[ei].0) == full)
        } else {
            mon.find(&|n| mon.q(n) != full, &|_| true, &|_| true)
        }
    }

    fn parity_search(&self, arena: &Arena, starts: &[usize], win: bool) -> Option<Lasso> {
        let mon = Monitor::build(arena, starts, 0, |q, _| Some(q));
        let mut prios: Vec<u32> = (0..self.colors.len()).map(|c| self.priority(c)).collect();
        prios.sort_unstable();
        prios.dedup();
        prios
            .into_iter()
            .filter(|p| (p % 2 == 0) == win)
            .find_map(|p| {
                let prio = |ei: usize| self.priority(mon.edge_of[ei].color);
                mon.find(&|_| true, &|ei| prio(ei) <= p, &|ei| prio(ei) == p)
            })
    }

    fn appendix_search(&self, arena: &Arena, starts: &[usize], prefix: &[usize], win: bool) -> Option<Lasso> {
        if let Some((mean, l)) = mean_lasso(arena, starts, &self.weights_signed(!win)) {
            if mean > Ratio::from_integer(0) {
                return Some(l);
            }
        }
        let init = self.prefix_key(prefix);
        let max_w = (0..self.colors.len()).map(|c| self.weight(c).abs()).max().unwrap_or(0);
        let bound = init.abs() + arena.n_states() as i64 * max_w + 1;
        let mon = Monitor::build(arena, starts, init, |q, c| {
            let next = q + self.weight(c);
            (next.abs() <= bound).then_some(next)
        });
        // Product cycles are exactly the zero-sum cycles.
        if win {
            mon.find(&|_| true, &|_| true, &|ei| mon.q(mon.g.edges[ei].0) == 0)
        } else {
            mon.find(&|n| mon.q(n) != 0, &|_| true, &|_| true)
        }
    }
}

fn own(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn weight_attrs(weights: &[i64]) -> Vec<ColorAttr> {
    weights.iter().map(|&w| ColorAttr { weight: Some(w), ..Default::default() }).collect()
}

/// Product of an arena with a deterministic integer-valued monitor, restricted
/// to nodes reachable from the starts.
struct Monitor {
    nodes: Vec<(usize, i64)>,
    g: Digraph,
    edge_of: Vec<Edge>,
    roots: Vec<usize>,
}

impl Monitor {
    fn build(arena: &Arena, starts: &[usize], init: i64, step: impl Fn(i64, usize) -> Option<i64>) -> Monitor {
        let mut nodes: Vec<(usize, i64)> = Vec::new();
        let mut index: HashMap<(usize, i64), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_of = Vec::new();
        let mut roots = Vec::new();
        for &s in starts {
            let key = (s, init);
            if !index.contains_key(&key) {
                index.insert(key, nodes.len());
                roots.push(nodes.len());
                nodes.push(key);
            }
        }
        let mut i = 0;
        while i < nodes.len() {
            let (s, q) = nodes[i];
            for e in arena.out_edges(s) {
                let Some(q2) = step(q, e.color) else { continue };
                let key = (e.dst, q2);
                let j = *index.entry(key).or_insert_with(|| {
                    nodes.push(key);
                    nodes.len() - 1
                });
                edges.push((i, j));
                edge_of.push(*e);
            }
            i += 1;
        }
        Monitor { g: Digraph::new(nodes.len(), edges), nodes, edge_of, roots }
    }

    fn q(&self, n: usize) -> i64 {
        self.nodes[n].1
    }

    /// A lasso whose cycle stays in nodes accepted by `node_ok`, uses edges
    /// accepted by `edge_ok`, and contains a `good` edge.
    fn find(
        &self,
        node_ok: &dyn Fn(usize) -> bool,
        edge_ok: &dyn Fn(usize) -> bool,
        good: &dyn Fn(usize) -> bool,
    ) -> Option<Lasso> {
        let g = &self.g;
        let keep = |ei: usize| edge_ok(ei) && node_ok(g.edges[ei].0) && node_ok(g.edges[ei].1);
        let comp = g.scc(&keep);
        let (dist, via) = g.bfs(&self.roots, &|_| true);
        let ei = (0..g.edges.len())
            .filter(|&ei| keep(ei) && comp[g.edges[ei].0] == comp[g.edges[ei].1] && good(ei))
            .min_by_key(|&ei| (dist[g.edges[ei].0], ei))?;
        let c = comp[g.edges[ei].0];
        let cycle = g
            .cycle_through(ei, &|e| keep(e) && comp[g.edges[e].0] == c && comp[g.edges[e].1] == c)
            .unwrap();
        let mut prefix = Vec::new();
        let mut cur = g.edges[ei].0;
        while dist[cur] > 0 {
            let e = via[cur].unwrap();
            prefix.push(e);
            cur = g.edges[e].0;
        }
        prefix.reverse();
        let map = |v: Vec<usize>| v.into_iter().map(|e| self.edge_of[e]).collect();
        Some(Lasso::new(map(prefix), map(cycle)))
    }
}

/// Maximum cycle mean over cycles reachable from `starts`, with a lasso
/// reaching a best cycle along a shortest path.
pub fn mean_lasso(arena: &Arena, starts: &[usize], weight_of_color: &[i64]) -> Option<(Ratio<i64>, Lasso)> {
    let reach = arena.reachable(starts);
    let g = Digraph::new(arena.n_states(), arena.edges().iter().map(|e| (e.src, e.dst)).collect());
    let w: Vec<i64> = arena.edges().iter().map(|e| weight_of_color[e.color]).collect();
    let (mean, cycle) = g.max_mean_cycle(&w, &|ei| reach[g.edges[ei].0])?;
    let (dist, via) = g.bfs(starts, &|_| true);
    let k = (0..cycle.len()).min_by_key(|&k| (dist[g.edges[cycle[k]].0], k)).unwrap();
    let mut cycle: Vec<Edge> = cycle.iter().map(|&e| arena.edges()[e]).collect();
    cycle.rotate_left(k);
    let mut prefix = Vec::new();
    let mut cur = cycle[0].src;
    while dist[cur] > 0 {
        let e = via[cur].unwrap();
        prefix.push(arena.edges()[e]);
        cur = g.edges[e].0;
    }
    prefix.reverse();
    Some((mean, Lasso::new(prefix, cycle)))
}

/// The play that always takes the least outgoing edge.
pub fn any_lasso(arena: &Arena, start: usize) -> Lasso {
    let mut seen = vec![usize::MAX; arena.n_states()];
    let mut path = Vec::new();
    let mut s = start;
    while seen[s] == usize::MAX {
        seen[s] = path.len();
        let e = *arena.out_edges(s).next().unwrap();
        path.push(e);
        s = e.dst;
    }
    let cycle = path.split_off(seen[s]);
    Lasso::new(path, cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player;
    use proptest::prelude::*;

    fn cl(u: &[usize], v: &[usize]) -> ColorLasso {
        ColorLasso::new(u.to_vec(), v.to_vec())
    }

    fn appendix() -> Relation {
        Relation::appendix_a(&["-1", "0", "1"], &[-1, 0, 1])
    }

    fn fig1() -> Arena {
        Arena::new(
            vec!["-1".into(), "1".into()],
            vec![("s1".into(), Player::P1), ("s2".into(), Player::P2)],
            vec![Edge::new(0, 0, 0), Edge::new(0, 1, 1), Edge::new(1, 1, 1), Edge::new(1, 0, 0)],
        )
        .unwrap()
    }

    #[test]
    fn compare_examples() {
        let mp = Relation::mean_payoff(&["0", "1", "2"], &[0, 1, 2]);
        assert_eq!(mp.compare(&cl(&[], &[1]), &cl(&[], &[0, 2])).unwrap(), Ordering::Equal);
        let mp5 = Relation::mean_payoff(&["0", "5"], &[0, 5]);
        assert_eq!(mp5.compare(&cl(&[1], &[0]), &cl(&[], &[0])).unwrap(), Ordering::Equal);
        let gr = Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"]);
        assert_eq!(gr.compare(&cl(&[1, 2], &[0]), &cl(&[0], &[0])).unwrap(), Ordering::Greater);
        let inv = Relation::mean_payoff(&["-1", "1"], &[-1, 1]).inverse();
        assert_eq!(inv.compare(&cl(&[], &[0]), &cl(&[], &[1])).unwrap(), Ordering::Greater);
        assert!(matches!(gr.compare(&cl(&[], &[7]), &cl(&[], &[0])), Err(GameError::UnknownColor(_))));
    }

    #[test]
    fn appendix_membership() {
        let r = appendix();
        assert!(r.lasso_in_win(&cl(&[], &[2])).unwrap());
        assert!(r.lasso_in_win(&cl(&[2], &[0, 2])).unwrap());
        assert!(!r.lasso_in_win(&cl(&[2], &[1])).unwrap());
        let mp = Relation::mean_payoff(&["a"], &[0]);
        assert!(matches!(mp.lasso_in_win(&cl(&[], &[0])), Err(GameError::NotQualitative(_))));
    }

    #[test]
    fn sup_examples() {
        let a = fig1();
        let mp = Relation::mean_payoff(&["-1", "1"], &[-1, 1]);
        let sup = mp.sup_play(&a, &[0], &[]).unwrap();
        assert_eq!(sup.lasso().unwrap().cycle(), &[Edge::new(1, 1, 1)]);
        assert_eq!(sup.lasso().unwrap().prefix(), &[Edge::new(0, 1, 1)]);

        // Arena for t1·n*: q0 -t1-> q1 -n-> q1.
        let gr = Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"]);
        let k = Arena::new(
            gr.colors().to_vec(),
            vec![("q0".into(), Player::P1), ("q1".into(), Player::P1)],
            vec![Edge::new(0, 1, 1), Edge::new(1, 0, 1)],
        )
        .unwrap();
        let sup = gr.sup_play(&k, &[0], &[2]).unwrap();
        assert!(gr.lasso_in_win(sup.colors().unwrap()).unwrap());
        assert_eq!(gr.sup_play(&k, &[], &[2]).unwrap(), SupResult::Empty);

        let inv = gr.inverse();
        let sup = inv.sup_play(&k, &[0], &[]).unwrap();
        assert!(inv.lasso_in_win(sup.colors().unwrap()).unwrap());
    }

    #[test]
    fn set_comparisons() {
        let gr = Relation::gen_reach2(&["n", "t1", "t2"], &["t1"], &["t2"]);
        let chain = |first: usize| {
            Arena::new(
                gr.colors().to_vec(),
                vec![("q0".into(), Player::P1), ("q1".into(), Player::P1)],
                vec![Edge::new(0, first, 1), Edge::new(1, 0, 1)],
            )
            .unwrap()
        };
        let (t2n, t1n) = (chain(2), chain(1));
        let left = Side { arena: &t2n, starts: &[0], prefix: &[1] };
        let right = Side { arena: &t1n, starts: &[0], prefix: &[1] };
        assert!(!gr.set_lt(left, right).unwrap());
        assert!(gr.set_lt(right, left).unwrap());
        assert!(gr.set_leq(left, left).unwrap());
        let empty = Side { arena: &t1n, starts: &[], prefix: &[] };
        assert!(gr.set_leq(empty, left).unwrap());
        assert!(gr.set_lt(empty, left).unwrap());
        assert!(!gr.set_lt(empty, empty).unwrap());
    }

    fn relations() -> Vec<Relation> {
        let cs = ["a", "b", "c"];
        vec![
            Relation::reachability(&cs, &["b"]),
            Relation::gen_reach2(&cs, &["a"], &["b"]),
            Relation::parity(&cs, &[0, 1, 2]),
            Relation::mean_payoff(&cs, &[-2, 1, 3]),
            Relation::appendix_a(&cs, &[-1, 0, 1]),
        ]
    }

    fn word() -> impl Strategy<Value = ColorLasso> {
        (prop::collection::vec(0usize..3, 0..4), prop::collection::vec(0usize..3, 1..4))
            .prop_map(|(u, v)| ColorLasso::new(u, v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn total_preorder(a in word(), b in word(), c in word(), inv in any::<bool>()) {
            for r in relations() {
                let r = if inv { r.inverse() } else { r };
                let ab = r.compare(&a, &b).unwrap();
                prop_assert_eq!(ab, r.compare(&b, &a).unwrap().reverse());
                let bc = r.compare(&b, &c).unwrap();
                if ab != Ordering::Greater && bc != Ordering::Greater {
                    prop_assert_ne!(r.compare(&a, &c).unwrap(), Ordering::Greater);
                }
                prop_assert_eq!(r.inverse().inverse().compare(&a, &b).unwrap(), ab);
                if r.kind().is_qualitative() && r.lasso_in_win(&a).unwrap() == r.lasso_in_win(&b).unwrap() {
                    prop_assert_eq!(ab, Ordering::Equal);
                }
            }
        }

        #[test]
        fn mean_payoff_ignores_unrolling(u in prop::collection::vec(0usize..3, 0..4), v in prop::collection::vec(0usize..3, 1..4), k in 0usize..4) {
            let r = Relation::mean_payoff(&["a", "b", "c"], &[-2, 1, 3]);
            let base = ColorLasso::new(u.clone(), v.clone());
            let mut rot = v.clone();
            rot.rotate_left(k % v.len());
            prop_assert_eq!(r.compare(&base, &ColorLasso::new(u.clone(), v.repeat(2))).unwrap(), Ordering::Equal);
            prop_assert_eq!(r.compare(&base, &ColorLasso::new(vec![], rot)).unwrap(), Ordering::Equal);
        }
    }

    /// All lassos with prefix and cycle of length at most `n`.
    fn small_lassos(a: &Arena, start: usize, n: usize) -> Vec<Lasso> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Edge>> = vec![vec![]];
        while let Some(path) = stack.pop() {
            let end = path.last().map_or(start, |e| e.dst);
            for i in 0..path.len() {
                if path[i].src == end && path.len() - i <= n && i <= n {
                    out.push(Lasso::new(path[..i].to_vec(), path[i..].to_vec()));
                }
            }
            if path.len() < 2 * n {
                for e in a.out_edges(end) {
                    let mut p = path.clone();
                    p.push(*e);
                    stack.push(p);
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn sup_dominates_small_lassos(
            n in 1usize..4,
            raw in prop::collection::vec((0usize..4, 0usize..3, 0usize..4), 1..10),
            prefix in prop::collection::vec(0usize..3, 0..3),
            inv in any::<bool>(),
        ) {
            let mut edges: Vec<Edge> = raw.iter().map(|&(s, c, d)| Edge::new(s % n, c, d % n)).collect();
            for s in 0..n {
                edges.push(Edge::new(s, 0, (s + 1) % n));
            }
            let states = (0..n).map(|i| (format!("s{i}"), Player::P1)).collect();
            let a = Arena::new(vec!["a".into(), "b".into(), "c".into()], states, edges).unwrap();
            for r in relations() {
                let r = if inv { r.inverse() } else { r };
                let sup = r.sup_play(&a, &[0], &prefix).unwrap();
                let best = sup.colors().unwrap().clone();
                prop_assert_eq!(sup.lasso().unwrap().start(), 0);
                for l in small_lassos(&a, 0, n) {
                    let c = l.colors().prepend(&prefix);
                    prop_assert_ne!(r.compare(&c, &best).unwrap(), Ordering::Greater, "{:?} beats {:?}", c, best);
                }
            }
        }
    }
}
