//! Small directed-graph kernels shared by the analyses: strongly connected
//! components, shortest paths and maximum cycle mean.

use std::collections::VecDeque;

use num_rational::Ratio;

/// A labelled edge list over nodes `0..n`.
#[derive(Clone, Debug, Default)]
pub struct Digraph {
    pub n: usize,
    /// (src, dst)
    pub edges: Vec<(usize, usize)>,
    pub out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut out = vec![Vec::new(); n];
        for (i, &(u, _)) in edges.iter().enumerate() {
            out[u].push(i);
        }
        Digraph { n, edges, out }
    }

    /// Tarjan's algorithm restricted to edges accepted by `keep`; returns the
    /// component id of every node.
    pub fn scc(&self, keep: &dyn Fn(usize) -> bool) -> Vec<usize> {
        let n = self.n;
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut next_index = 0;
        let mut next_comp = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // (node, position in its out list)
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < self.out[v].len() {
                    let ei = self.out[v][*pos];
                    *pos += 1;
                    if !keep(ei) {
                        continue;
                    }
                    let w = self.edges[ei].1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Breadth-first distances from `sources` along accepted edges.
    pub fn bfs(&self, sources: &[usize], keep: &dyn Fn(usize) -> bool) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut dist = vec![usize::MAX; self.n];
        let mut via = vec![None; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &ei in &self.out[u] {
                if !keep(ei) {
                    continue;
                }
                let v = self.edges[ei].1;
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    via[v] = Some(ei);
                    queue.push_back(v);
                }
            }
        }
        (dist, via)
    }

    /// Shortest edge path from `from` to `to` along accepted edges (empty if equal).
    pub fn path(&self, from: usize, to: usize, keep: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
        let (dist, via) = self.bfs(&[from], keep);
        if dist[to] == usize::MAX {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let ei = via[cur].unwrap();
            path.push(ei);
            cur = self.edges[ei].0;
        }
        path.reverse();
        Some(path)
    }

    /// A cycle through edge `ei` using only accepted edges: `ei` followed by a
    /// shortest return path.
    pub fn cycle_through(&self, ei: usize, keep: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
        let (u, v) = self.edges[ei];
        let back = self.path(v, u, keep)?;
        let mut cycle = vec![ei];
        cycle.extend(back);
        Some(cycle)
    }

    /// Maximum cycle mean among cycles using accepted edges, together with a
    /// cycle attaining it. `weight` is indexed by edge id.
    pub fn max_mean_cycle(&self, weight: &[i64], keep: &dyn Fn(usize) -> bool) -> Option<(Ratio<i64>, Vec<usize>)> {
        let comp = self.scc(keep);
        let n_comp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut best: Option<(Ratio<i64>, Vec<usize>)> = None;
        for c in 0..n_comp {
            let inside = |ei: usize| keep(ei) && comp[self.edges[ei].0] == c && comp[self.edges[ei].1] == c;
            let Some(first) = (0..self.edges.len()).find(|&ei| inside(ei)) else {
                continue;
            };
            let lambda = karp(self, weight, &inside, self.edges[first].0);
            if best.as_ref().is_some_and(|(b, _)| *b >= lambda) {
                continue;
            }
            let cycle = critical_cycle(self, weight, &inside, lambda);
            best = Some((lambda, cycle));
        }
        best
    }
}

/// Karp's characterization on one strongly connected component.
fn karp(g: &Digraph, weight: &[i64], inside: &dyn Fn(usize) -> bool, source: usize) -> Ratio<i64> {
    let members: Vec<usize> = {
        let mut m = vec![false; g.n];
        for ei in 0..g.edges.len() {
            if inside(ei) {
                m[g.edges[ei].0] = true;
            }
        }
        (0..g.n).filter(|&v| m[v]).collect()
    };
    let n = members.len();
    let mut d: Vec<Vec<Option<i64>>> = vec![vec![None; g.n]; n + 1];
    d[0][source] = Some(0);
    for k in 1..=n {
        for ei in 0..g.edges.len() {
            if !inside(ei) {
                continue;
            }
            let (u, v) = g.edges[ei];
            if let Some(du) = d[k - 1][u] {
                let cand = du + weight[ei];
                if d[k][v].map_or(true, |x| cand > x) {
                    d[k][v] = Some(cand);
                }
            }
        }
    }
    let mut best: Option<Ratio<i64>> = None;
    for &v in &members {
        let Some(dn) = d[n][v] else { continue };
        let worst = (0..n)
            .filter_map(|k| d[k][v].map(|dk| Ratio::new(dn - dk, (n - k) as i64)))
            .min()
            .unwrap();
        if best.map_or(true, |b| worst > b) {
            best = Some(worst);
        }
    }
    best.expect("a strongly connected component with an edge has a cycle")
}

/// A cycle of mean exactly `lambda` inside the component, found among edges
/// that are tight for longest-path potentials under the reweighting w·q − p.
fn critical_cycle(g: &Digraph, weight: &[i64], inside: &dyn Fn(usize) -> bool, lambda: Ratio<i64>) -> Vec<usize> {
    let (p, q) = (*lambda.numer(), *lambda.denom());
    let w2: Vec<i64> = weight.iter().map(|w| w * q - p).collect();
    let mut pot = vec![0i64; g.n];
    for _ in 0..=g.n {
        let mut changed = false;
        for ei in 0..g.edges.len() {
            if !inside(ei) {
                continue;
            }
            let (u, v) = g.edges[ei];
            if pot[u] + w2[ei] > pot[v] {
                pot[v] = pot[u] + w2[ei];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let tight = |ei: usize| inside(ei) && pot[g.edges[ei].0] + w2[ei] == pot[g.edges[ei].1];
    let comp = g.scc(&tight);
    let ei = (0..g.edges.len())
        .find(|&ei| tight(ei) && comp[g.edges[ei].0] == comp[g.edges[ei].1])
        .expect("tight subgraph contains a critical cycle");
    let c = comp[g.edges[ei].0];
    g.cycle_through(ei, &|e| tight(e) && comp[g.edges[e].0] == c && comp[g.edges[e].1] == c)
        .expect("edge inside a component closes a cycle")
}
