use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::P1 => "P1",
            Player::P2 => "P2",
        })
    }
}

/// An edge `(src, color, dst)`. The derived order is the lexicographic one used
/// for every deterministic tie-break in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub color: usize,
    pub dst: usize,
}

impl Edge {
    pub fn new(src: usize, color: usize, dst: usize) -> Self {
        Edge { src, color, dst }
    }
}

/// A finite chained edge sequence, possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct History {
    pub start: usize,
    pub edges: Vec<Edge>,
}

impl History {
    pub fn empty(s: usize) -> Self {
        History { start: s, edges: Vec::new() }
    }

    pub fn end(&self) -> usize {
        self.edges.last().map_or(self.start, |e| e.dst)
    }

    pub fn colors(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.color).collect()
    }
}

/// A two-player arena with colored edges.
///
/// Edges form a set: parallel edges with the same color collapse to one triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arena {
    names: Vec<String>,
    owners: Vec<Player>,
    colors: Vec<String>,
    edges: Vec<Edge>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
}

impl Arena {
    /// Validates and builds an arena. Edges are sorted and deduplicated.
    pub fn new(colors: Vec<String>, states: Vec<(String, Player)>, mut edges: Vec<Edge>) -> Result<Arena> {
        let n = states.len();
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(GameError::DanglingEdge(format!("edge {:?} references an unknown state", e)));
            }
            if e.color >= colors.len() {
                return Err(GameError::DanglingEdge(format!("edge {:?} references an unknown color", e)));
            }
        }
        edges.sort();
        edges.dedup();
        let mut out = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out[e.src].push(i);
        }
        let (names, owners): (Vec<_>, Vec<_>) = states.into_iter().unzip();
        if let Some(s) = (0..n).find(|&s| out[s].is_empty()) {
            return Err(GameError::BlockingState(names[s].clone()));
        }
        Ok(Arena { names, owners, colors, edges, out })
    }

    /// Same states and colors, different edge set.
    pub fn with_edges(&self, edges: Vec<Edge>) -> Result<Arena> {
        Arena::new(self.colors.clone(), self.states(), edges)
    }

    /// Same edges with owners replaced.
    pub fn with_owners(&self, owners: Vec<Player>) -> Arena {
        assert_eq!(owners.len(), self.n_states());
        Arena { owners, ..self.clone() }
    }

    pub fn states(&self) -> Vec<(String, Player)> {
        self.names.iter().cloned().zip(self.owners.iter().copied()).collect()
    }

    pub fn n_states(&self) -> usize {
        self.names.len()
    }

    pub fn n_colors(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color_name(&self, c: usize) -> &str {
        &self.colors[c]
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c == name)
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn owner(&self, s: usize) -> Player {
        self.owners[s]
    }

    pub fn owners(&self) -> &[Player] {
        &self.owners
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Outgoing edges of `s` in (color, dst) order.
    pub fn out_edges(&self, s: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s].iter().map(move |&i| &self.edges[i])
    }

    pub fn out_degree(&self, s: usize) -> usize {
        self.out[s].len()
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// `|E| - |S|`.
    pub fn num_choices(&self) -> usize {
        self.edges.len() - self.n_states()
    }

    /// Lowest-indexed state of `p` with at least two outgoing edges.
    pub fn first_choice_state(&self, p: Player) -> Option<usize> {
        (0..self.n_states()).find(|&s| self.owners[s] == p && self.out[s].len() >= 2)
    }

    /// True iff every state of `p` has exactly one outgoing edge.
    pub fn no_choice_for(&self, p: Player) -> bool {
        self.first_choice_state(p).is_none()
    }

    /// Splits the edges leaving `t`: the first arena keeps `part`, the second the rest.
    pub fn split_at(&self, t: usize, part: &[Edge]) -> Result<(Arena, Arena)> {
        if self.out[t].len() < 2 {
            return Err(GameError::NotAChoiceState(self.names[t].clone()));
        }
        let at_t: Vec<Edge> = self.out_edges(t).copied().collect();
        let mut chosen: Vec<Edge> = part.to_vec();
        chosen.sort();
        chosen.dedup();
        if chosen.is_empty() || chosen.len() >= at_t.len() || chosen.iter().any(|e| !at_t.contains(e)) {
            return Err(GameError::BadPartition);
        }
        let keep = |side_a: bool| -> Vec<Edge> {
            self.edges
                .iter()
                .filter(|e| e.src != t || chosen.contains(e) == side_a)
                .copied()
                .collect()
        };
        Ok((self.with_edges(keep(true))?, self.with_edges(keep(false))?))
    }

    /// States reachable from `from` (including `from`).
    pub fn reachable(&self, from: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.n_states()];
        let mut stack: Vec<usize> = Vec::new();
        for &s in from {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for e in self.out_edges(s) {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    stack.push(e.dst);
                }
            }
        }
        seen
    }

    /// Minimum-length history from a state of `from` to `to`; among those, the
    /// lexicographically least edge sequence under (src, color, dst).
    pub fn shortest_history(&self, from: &[usize], to: usize) -> Option<History> {
        let n = self.n_states();
        let mut dist = vec![usize::MAX; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            preds[e.dst].push(e.src);
        }
        dist[to] = 0;
        let mut queue = VecDeque::from([to]);
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s] {
                if dist[p] == usize::MAX {
                    dist[p] = dist[s] + 1;
                    queue.push_back(p);
                }
            }
        }
        let start = from
            .iter()
            .copied()
            .filter(|&s| dist[s] != usize::MAX)
            .min_by_key(|&s| (dist[s], s))?;
        let mut edges = Vec::with_capacity(dist[start]);
        let mut cur = start;
        while cur != to {
            let e = *self
                .out_edges(cur)
                .find(|e| dist[e.dst] != usize::MAX && dist[e.dst] + 1 == dist[cur])
                .expect("distance labels admit a descending edge");
            edges.push(e);
            cur = e.dst;
        }
        Some(History { start, edges })
    }

    /// Keeps the states flagged in `keep` (with edges among them), renumbering
    /// in order. Returns the sub-arena and, for each new state, its old index.
    pub fn restrict(&self, keep: &[bool]) -> Result<(Arena, Vec<usize>)> {
        let old: Vec<usize> = (0..self.n_states()).filter(|&s| keep[s]).collect();
        let mut new_index = vec![usize::MAX; self.n_states()];
        for (i, &s) in old.iter().enumerate() {
            new_index[s] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.src] && keep[e.dst])
            .map(|e| Edge::new(new_index[e.src], e.color, new_index[e.dst]))
            .collect();
        let states = old.iter().map(|&s| (self.names[s].clone(), self.owners[s])).collect();
        Ok((Arena::new(self.colors.clone(), states, edges)?, old))
    }

    /// Rebuilds the adjacency index after deserialization.
    pub fn reindex(mut self) -> Result<Arena> {
        let states = self.states();
        let edges = std::mem::take(&mut self.edges);
        Arena::new(self.colors, states, edges)
    }

    /// The unique successor edge of `s`, if it has exactly one.
    pub fn forced_edge(&self, s: usize) -> Option<Edge> {
        (self.out[s].len() == 1).then(|| self.edges[self.out[s][0]])
    }

    pub fn edge_label(&self, e: &Edge) -> String {
        format!("{} -{}-> {}", self.names[e.src], self.colors[e.color], self.names[e.dst])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Arena {
        Arena::new(
            vec!["-1".into(), "1".into()],
            vec![("s1".into(), Player::P1), ("s2".into(), Player::P2)],
            vec![Edge::new(0, 0, 0), Edge::new(0, 1, 1), Edge::new(1, 1, 1), Edge::new(1, 0, 0)],
        )
        .unwrap()
    }

    fn fig6_base() -> Arena {
        let c = |s: &str| s.to_string();
        Arena::new(
            vec![c("n"), c("t1"), c("t2")],
            vec![(c("s1"), Player::P1), (c("s2"), Player::P1), (c("s3"), Player::P1)],
            vec![Edge::new(0, 0, 1), Edge::new(1, 1, 2), Edge::new(1, 2, 0), Edge::new(2, 0, 2)],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(fig1().num_choices(), 2);
        let single = Arena::new(vec!["a".into()], vec![("s".into(), Player::P1)], vec![Edge::new(0, 0, 0)]).unwrap();
        assert_eq!(single.num_choices(), 0);
        let blocking = Arena::new(
            vec!["a".into()],
            vec![("s".into(), Player::P1), ("t".into(), Player::P1)],
            vec![Edge::new(0, 0, 1)],
        );
        assert_eq!(blocking, Err(GameError::BlockingState("t".into())));
        let dangling = Arena::new(vec!["a".into()], vec![("s".into(), Player::P1)], vec![Edge::new(0, 1, 0)]);
        assert!(matches!(dangling, Err(GameError::DanglingEdge(_))));
    }

    #[test]
    fn parallel_edges_collapse() {
        let a = Arena::new(
            vec!["a".into()],
            vec![("s".into(), Player::P1)],
            vec![Edge::new(0, 0, 0), Edge::new(0, 0, 0)],
        )
        .unwrap();
        assert_eq!(a.n_edges(), 1);
    }

    #[test]
    fn split_fig1_at_s1() {
        let a = fig1();
        let (aa, ab) = a.split_at(0, &[Edge::new(0, 0, 0)]).unwrap();
        assert_eq!(aa.out_edges(0).copied().collect::<Vec<_>>(), vec![Edge::new(0, 0, 0)]);
        assert_eq!(ab.out_edges(0).copied().collect::<Vec<_>>(), vec![Edge::new(0, 1, 1)]);
        assert_eq!(aa.num_choices() + ab.num_choices(), a.num_choices() + 2 - 2);
        assert_eq!(a.split_at(0, &[Edge::new(0, 0, 0), Edge::new(0, 1, 1)]), Err(GameError::BadPartition));
        assert_eq!(a.split_at(0, &[]), Err(GameError::BadPartition));
    }

    #[test]
    fn split_three_way_state() {
        let a = Arena::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![("s".into(), Player::P1)],
            vec![Edge::new(0, 0, 0), Edge::new(0, 1, 0), Edge::new(0, 2, 0)],
        )
        .unwrap();
        let (aa, ab) = a.split_at(0, &[Edge::new(0, 0, 0)]).unwrap();
        assert_eq!(aa.num_choices(), 0);
        assert_eq!(ab.num_choices(), 1);
        let single = Arena::new(vec!["a".into()], vec![("s".into(), Player::P1)], vec![Edge::new(0, 0, 0)]).unwrap();
        assert_eq!(single.split_at(0, &[]), Err(GameError::NotAChoiceState("s".into())));
    }

    #[test]
    fn shortest_history_fig6() {
        let a = fig6_base();
        let h = a.shortest_history(&[0], 2).unwrap();
        assert_eq!(h.colors(), vec![0, 1]);
        assert_eq!(h.edges, vec![Edge::new(0, 0, 1), Edge::new(1, 1, 2)]);
        assert_eq!(a.shortest_history(&[0, 2], 2).unwrap(), History::empty(2));
        assert_eq!(a.shortest_history(&[2], 0), None);
    }
}
