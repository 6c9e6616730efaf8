//! Prefix-covers and cyclic-covers of a state set by a memory skeleton.

use std::collections::VecDeque;

use serde::Serialize;

use crate::arena::{Arena, Edge, History};
use crate::error::Result;
use crate::skeleton::MemorySkeleton;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Two histories from the covered set to `state` reaching different memory states.
    Prefix { state: usize, first: History, first_mem: usize, second: History, second_mem: usize },
    /// A history reaching `state` with memory `mem`, then a cycle back to
    /// `state` after which the memory is `after`.
    Cyclic { state: usize, history: History, mem: usize, cycle: History, after: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub verdict: bool,
    /// Memory state per arena state; `None` for states no history reaches.
    pub assignment: Vec<Option<usize>>,
    pub violation: Option<Violation>,
}

/// Breadth-first search of `A ⋉ M` from `sources`, remembering how each
/// product node (`s * |M| + m`) was first reached.
struct Search {
    k: usize,
    /// `Some(None)` for sources, `Some(Some((prev, edge)))` otherwise.
    parent: Vec<Option<Option<(usize, Edge)>>>,
    order: Vec<usize>,
}

impl Search {
    /// With `cycles`, sources are expanded without being marked, so every
    /// marked node is reached by at least one edge.
    fn run(a: &Arena, sk: &MemorySkeleton, sources: &[(usize, usize)], cycles: bool) -> Self {
        let k = sk.n_states();
        let mut parent: Vec<Option<Option<(usize, Edge)>>> = vec![None; a.n_states() * k];
        let mut queue = VecDeque::new();
        let mut order = Vec::new();
        for &(s, m) in sources {
            let node = s * k + m;
            if cycles {
                queue.push_back(node);
            } else if parent[node].is_none() {
                parent[node] = Some(None);
                order.push(node);
                queue.push_back(node);
            }
        }
        while let Some(node) = queue.pop_front() {
            let (s, m) = (node / k, node % k);
            for e in a.out_edges(s) {
                let next = e.dst * k + sk.update(m, e.color);
                if parent[next].is_none() {
                    parent[next] = Some(Some((node, *e)));
                    order.push(next);
                    queue.push_back(next);
                }
            }
        }
        Search { k, parent, order }
    }

    fn reached(&self, node: usize) -> bool {
        self.parent[node].is_some()
    }

    /// Edges from a source to `node`; with `stop`, the walk ends at the first
    /// step leaving that node.
    fn path(&self, node: usize, stop: Option<usize>) -> History {
        let mut edges = Vec::new();
        let mut cur = node;
        while let Some(Some((prev, e))) = self.parent[cur] {
            edges.push(e);
            cur = prev;
            if Some(prev) == stop {
                break;
            }
        }
        edges.reverse();
        History { start: cur / self.k, edges }
    }
}

pub fn check_prefix_cover(a: &Arena, sk: &MemorySkeleton, s_cov: &[usize]) -> Result<CoverReport> {
    sk.check_alphabet(a.colors())?;
    let k = sk.n_states();
    let sources: Vec<(usize, usize)> = s_cov.iter().map(|&s| (s, sk.init())).collect();
    let search = Search::run(a, sk, &sources, false);
    let mut assignment: Vec<Option<usize>> = vec![None; a.n_states()];
    for &node in &search.order {
        let (s, m) = (node / k, node % k);
        match assignment[s] {
            None => assignment[s] = Some(m),
            Some(m0) if m0 != m => {
                let violation = Violation::Prefix {
                    state: s,
                    first: search.path(s * k + m0, None),
                    first_mem: m0,
                    second: search.path(node, None),
                    second_mem: m,
                };
                return Ok(CoverReport { verdict: false, assignment, violation: Some(violation) });
            }
            Some(_) => {}
        }
    }
    Ok(CoverReport { verdict: true, assignment, violation: None })
}

pub fn check_cyclic_cover(a: &Arena, sk: &MemorySkeleton, s_cov: &[usize]) -> Result<CoverReport> {
    sk.check_alphabet(a.colors())?;
    let k = sk.n_states();
    let sources: Vec<(usize, usize)> = s_cov.iter().map(|&s| (s, sk.init())).collect();
    let reach = Search::run(a, sk, &sources, false);
    let mut assignment: Vec<Option<usize>> = vec![None; a.n_states()];
    for &node in &reach.order {
        assignment[node / k].get_or_insert(node % k);
    }
    for &node in &reach.order {
        let (s, m) = (node / k, node % k);
        let cyc = Search::run(a, sk, &[(s, m)], true);
        if let Some(m2) = (0..k).find(|&m2| m2 != m && cyc.reached(s * k + m2)) {
            let violation = Violation::Cyclic {
                state: s,
                history: reach.path(node, None),
                mem: m,
                cycle: cyc.path(s * k + m2, Some(node)),
                after: m2,
            };
            return Ok(CoverReport { verdict: false, assignment, violation: Some(violation) });
        }
    }
    Ok(CoverReport { verdict: true, assignment, violation: None })
}
