//! Ultimately periodic words and plays.
//!
//! Both [`Lasso`] (over edges) and [`ColorLasso`] (over colors) are kept in
//! canonical form: primitive cycle, shortest prefix. The cycle rotation is then
//! forced by the prefix, so two values denote the same infinite sequence iff
//! they are structurally equal.

use serde::{Deserialize, Serialize};

use crate::arena::Edge;

/// Canonical (prefix, cycle) pair for `prefix · cycle^ω`.
pub fn canonicalize<T: PartialEq + Clone>(mut prefix: Vec<T>, mut cycle: Vec<T>) -> (Vec<T>, Vec<T>) {
    assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
    let n = cycle.len();
    let period = (1..=n)
        .find(|&p| n % p == 0 && (p..n).all(|i| cycle[i] == cycle[i - p]))
        .unwrap_or(n);
    cycle.truncate(period);
    while let Some(last) = prefix.last() {
        if *last != cycle[cycle.len() - 1] {
            break;
        }
        prefix.pop();
        cycle.rotate_right(1);
    }
    (prefix, cycle)
}

fn nth<'a, T>(prefix: &'a [T], cycle: &'a [T], i: usize) -> &'a T {
    if i < prefix.len() {
        &prefix[i]
    } else {
        &cycle[(i - prefix.len()) % cycle.len()]
    }
}

/// An ultimately periodic color word `u · v^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColorLasso {
    u: Vec<usize>,
    v: Vec<usize>,
}

impl ColorLasso {
    pub fn new(u: Vec<usize>, v: Vec<usize>) -> Self {
        let (u, v) = canonicalize(u, v);
        ColorLasso { u, v }
    }

    pub fn u(&self) -> &[usize] {
        &self.u
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    /// Prepends a finite word.
    pub fn prepend(&self, w: &[usize]) -> Self {
        let mut u = w.to_vec();
        u.extend_from_slice(&self.u);
        ColorLasso::new(u, self.v.clone())
    }

    pub fn nth(&self, i: usize) -> usize {
        *nth(&self.u, &self.v, i)
    }

    /// First `n` letters of the infinite word.
    pub fn unroll(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.nth(i)).collect()
    }
}

/// An ultimately periodic play `prefix · cycle^ω` over arena edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lasso {
    prefix: Vec<Edge>,
    cycle: Vec<Edge>,
}

impl Lasso {
    /// Builds a canonical lasso. Panics on an empty cycle or broken chaining.
    pub fn new(prefix: Vec<Edge>, cycle: Vec<Edge>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        let chained = prefix
            .iter()
            .chain(cycle.iter())
            .zip(prefix.iter().chain(cycle.iter()).skip(1))
            .all(|(a, b)| a.dst == b.src);
        assert!(chained && cycle[cycle.len() - 1].dst == cycle[0].src, "lasso edges do not chain");
        let (prefix, cycle) = canonicalize(prefix, cycle);
        Lasso { prefix, cycle }
    }

    pub fn prefix(&self) -> &[Edge] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Edge] {
        &self.cycle
    }

    pub fn start(&self) -> usize {
        self.prefix.first().unwrap_or(&self.cycle[0]).src
    }

    pub fn colors(&self) -> ColorLasso {
        ColorLasso::new(
            self.prefix.iter().map(|e| e.color).collect(),
            self.cycle.iter().map(|e| e.color).collect(),
        )
    }

    pub fn nth(&self, i: usize) -> Edge {
        *nth(&self.prefix, &self.cycle, i)
    }

    /// Maps every edge through `f`; the result is re-canonicalized.
    pub fn map_edges(&self, f: impl Fn(&Edge) -> Edge) -> Lasso {
        Lasso::new(self.prefix.iter().map(&f).collect(), self.cycle.iter().map(&f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn absorbs_prefix_and_takes_root() {
        let l = ColorLasso::new(vec![0, 1, 2, 1, 2], vec![1, 2, 1, 2]);
        assert_eq!(l.u(), &[0]);
        assert_eq!(l.v(), &[1, 2]);
        let l = ColorLasso::new(vec![2], vec![1, 2]);
        assert_eq!(l.u(), &[] as &[usize]);
        assert_eq!(l.v(), &[2, 1]);
    }

    proptest! {
        #[test]
        fn canonical_form_decides_equality(
            u1 in prop::collection::vec(0usize..2, 0..4),
            v1 in prop::collection::vec(0usize..2, 1..4),
            u2 in prop::collection::vec(0usize..2, 0..4),
            v2 in prop::collection::vec(0usize..2, 1..4),
        ) {
            let a = ColorLasso::new(u1.clone(), v1.clone());
            let b = ColorLasso::new(u2.clone(), v2.clone());
            // Two lassos agree forever iff they agree on a window covering both
            // prefixes plus the product of the periods.
            let n = u1.len().max(u2.len()) + v1.len() * v2.len() + 1;
            let same = (0..n).all(|i| nth(&u1, &v1, i) == nth(&u2, &v2, i));
            prop_assert_eq!(a == b, same);
        }

        #[test]
        fn unrolling_and_rotation_are_invisible(
            u in prop::collection::vec(0usize..3, 0..4),
            v in prop::collection::vec(0usize..3, 1..4),
            k in 1usize..3,
        ) {
            let base = ColorLasso::new(u.clone(), v.clone());
            let unrolled = ColorLasso::new(u.clone(), v.repeat(k));
            prop_assert_eq!(&base, &unrolled);
            let mut u2 = u.clone();
            u2.push(v[0]);
            let mut v2 = v.clone();
            v2.rotate_left(1);
            prop_assert_eq!(&base, &ColorLasso::new(u2, v2));
        }
    }
}
