use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// A memory skeleton: a complete deterministic automaton over the alphabet,
/// without outputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemorySkeleton {
    names: Vec<String>,
    colors: Vec<String>,
    init: usize,
    /// `upd[m * |C| + c]`
    upd: Vec<usize>,
}

impl MemorySkeleton {
    /// Builds a skeleton; every (state, color) pair must have exactly one update.
    pub fn new(names: Vec<String>, colors: Vec<String>, init: usize, transitions: &[(usize, usize, usize)]) -> Result<Self> {
        let (n, k) = (names.len(), colors.len());
        if init >= n {
            return Err(GameError::DanglingEdge("initial memory state out of range".into()));
        }
        let mut upd = vec![usize::MAX; n * k];
        for &(m, c, m2) in transitions {
            if m >= n || m2 >= n {
                return Err(GameError::DanglingEdge(format!("memory update ({m}, {c}, {m2}) references an unknown state")));
            }
            if c >= k {
                return Err(GameError::UnknownColor(format!("#{c}")));
            }
            let slot = &mut upd[m * k + c];
            if *slot != usize::MAX && *slot != m2 {
                return Err(GameError::AlphabetMismatch(format!(
                    "update of `{}` on `{}` defined twice",
                    names[m], colors[c]
                )));
            }
            *slot = m2;
        }
        if let Some(i) = upd.iter().position(|&x| x == usize::MAX) {
            return Err(GameError::AlphabetMismatch(format!(
                "update of `{}` on `{}` is missing",
                names[i / k.max(1)],
                colors[i % k.max(1)]
            )));
        }
        Ok(MemorySkeleton { names, colors, init, upd })
    }

    /// Builds from a dense update table `table[m][c]`.
    pub fn from_table(names: Vec<String>, colors: Vec<String>, init: usize, table: &[Vec<usize>]) -> Result<Self> {
        let trans: Vec<_> = table
            .iter()
            .enumerate()
            .flat_map(|(m, row)| row.iter().enumerate().map(move |(c, &m2)| (m, c, m2)))
            .collect();
        MemorySkeleton::new(names, colors, init, &trans)
    }

    /// The one-state skeleton.
    pub fn trivial(colors: Vec<String>) -> Self {
        let k = colors.len();
        MemorySkeleton { names: vec!["mtriv".into()], colors, init: 0, upd: vec![0; k] }
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

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, m: usize) -> &str {
        &self.names[m]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn update(&self, m: usize, c: usize) -> usize {
        self.upd[m * self.colors.len() + c]
    }

    /// Iterated update along `w`.
    pub fn run(&self, m: usize, w: &[usize]) -> Result<usize> {
        w.iter().try_fold(m, |m, &c| {
            if c >= self.colors.len() {
                Err(GameError::UnknownColor(format!("#{c}")))
            } else {
                Ok(self.update(m, c))
            }
        })
    }

    /// Fails unless the skeleton reads exactly `colors` (same names, same order).
    pub fn check_alphabet(&self, colors: &[String]) -> Result<()> {
        if self.colors != colors {
            return Err(GameError::AlphabetMismatch(format!(
                "skeleton reads {:?}, expected {:?}",
                self.colors, colors
            )));
        }
        Ok(())
    }

    /// Reorders the color indices to match `colors`; the color sets must coincide.
    pub fn align_to(&self, colors: &[String]) -> Result<Self> {
        let mut sorted_a = self.colors.clone();
        let mut sorted_b = colors.to_vec();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b {
            return Err(GameError::AlphabetMismatch(format!(
                "skeleton reads {:?}, expected {:?}",
                self.colors, colors
            )));
        }
        let perm: Vec<usize> = colors
            .iter()
            .map(|c| self.colors.iter().position(|x| x == c).unwrap())
            .collect();
        let table: Vec<Vec<usize>> = (0..self.n_states())
            .map(|m| perm.iter().map(|&old| self.update(m, old)).collect())
            .collect();
        MemorySkeleton::from_table(self.names.clone(), colors.to_vec(), self.init, &table)
    }

    /// Parallel product over a shared alphabet; state `(i, j)` has index `i * |M2| + j`.
    pub fn product(&self, other: &MemorySkeleton) -> Result<Self> {
        other.check_alphabet(&self.colors)?;
        let n2 = other.n_states();
        let names = self
            .names
            .iter()
            .flat_map(|a| other.names.iter().map(move |b| format!("({a},{b})")))
            .collect();
        let table: Vec<Vec<usize>> = (0..self.n_states() * n2)
            .map(|m| {
                (0..self.n_colors())
                    .map(|c| self.update(m / n2, c) * n2 + other.update(m % n2, c))
                    .collect()
            })
            .collect();
        MemorySkeleton::from_table(names, self.colors.clone(), self.init * n2 + other.init, &table)
    }

    /// Product of a non-empty list of skeletons, left to right.
    pub fn product_all(list: &[&MemorySkeleton]) -> Result<Self> {
        let (first, rest) = list.split_first().expect("non-empty skeleton list");
        rest.iter().try_fold((*first).clone(), |acc, s| acc.product(s))
    }

    /// States reachable from the initial one, flagged.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n_states()];
        seen[self.init] = true;
        let mut stack = vec![self.init];
        while let Some(m) = stack.pop() {
            for c in 0..self.n_colors() {
                let m2 = self.update(m, c);
                if !seen[m2] {
                    seen[m2] = true;
                    stack.push(m2);
                }
            }
        }
        seen
    }

    /// The reachable part, renumbered in index order, with the old index of each state.
    pub fn prune(&self) -> (Self, Vec<usize>) {
        let keep = self.reachable();
        let old: Vec<usize> = (0..self.n_states()).filter(|&m| keep[m]).collect();
        let mut new_index = vec![usize::MAX; self.n_states()];
        for (i, &m) in old.iter().enumerate() {
            new_index[m] = i;
        }
        let table: Vec<Vec<usize>> = old
            .iter()
            .map(|&m| (0..self.n_colors()).map(|c| new_index[self.update(m, c)]).collect())
            .collect();
        let names = old.iter().map(|&m| self.names[m].clone()).collect();
        let sk = MemorySkeleton::from_table(names, self.colors.clone(), new_index[self.init], &table)
            .expect("pruned skeleton stays total");
        (sk, old)
    }

    /// Reachable part renumbered in breadth-first order (colors by id), with
    /// generic state names. Isomorphic skeletons share the same canonical form.
    pub fn canonical(&self) -> Self {
        let mut order = vec![self.init];
        let mut new_index = vec![usize::MAX; self.n_states()];
        new_index[self.init] = 0;
        let mut i = 0;
        while i < order.len() {
            let m = order[i];
            for c in 0..self.n_colors() {
                let m2 = self.update(m, c);
                if new_index[m2] == usize::MAX {
                    new_index[m2] = order.len();
                    order.push(m2);
                }
            }
            i += 1;
        }
        let table: Vec<Vec<usize>> = order
            .iter()
            .map(|&m| (0..self.n_colors()).map(|c| new_index[self.update(m, c)]).collect())
            .collect();
        let names = (0..order.len()).map(|i| format!("m{i}")).collect();
        MemorySkeleton::from_table(names, self.colors.clone(), 0, &table).expect("canonical skeleton stays total")
    }

    /// Shortest word leading from `m` to `target`, at most `max_len` long;
    /// among shortest words, the least one by color id.
    pub fn witness_word(&self, m: usize, target: usize, max_len: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.n_states()];
        let mut depth = vec![usize::MAX; self.n_states()];
        depth[m] = 0;
        let mut queue = VecDeque::from([m]);
        while let Some(x) = queue.pop_front() {
            if x == target {
                break;
            }
            if depth[x] == max_len {
                continue;
            }
            for c in 0..self.n_colors() {
                let y = self.update(x, c);
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    parent[y] = Some((x, c));
                    queue.push_back(y);
                }
            }
        }
        if depth[target] == usize::MAX {
            return None;
        }
        let mut word = Vec::new();
        let mut cur = target;
        while let Some((p, c)) = parent[cur] {
            word.push(c);
            cur = p;
        }
        word.reverse();
        Some(word)
    }

    /// All skeletons with at most `max_states` states over `colors`, one per
    /// isomorphism class of initially-connected skeletons, in a fixed order.
    pub fn enumerate(colors: &[String], max_states: usize) -> Vec<MemorySkeleton> {
        let k = colors.len();
        let mut out = Vec::new();
        for n in 1..=max_states {
            let cells = n * k;
            let total = (n as u64).checked_pow(cells as u32).expect("enumeration too large");
            for code in 0..total {
                let mut x = code;
                let table: Vec<Vec<usize>> = (0..n)
                    .map(|_| {
                        (0..k)
                            .map(|_| {
                                let d = (x % n as u64) as usize;
                                x /= n as u64;
                                d
                            })
                            .collect()
                    })
                    .collect();
                let names = (0..n).map(|i| format!("m{i}")).collect();
                let sk = MemorySkeleton::from_table(names, colors.to_vec(), 0, &table).unwrap();
                if sk.canonical() == sk {
                    out.push(sk);
                }
            }
        }
        out
    }
}
