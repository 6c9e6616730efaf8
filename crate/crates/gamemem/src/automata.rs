//! NFAs over colors, safety closures as arenas, and the gadget automata used
//! to compare prefixed language closures.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, Edge, Player};
use crate::error::{GameError, Result};
use crate::graph::Digraph;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nfa {
    names: Vec<String>,
    colors: Vec<String>,
    /// Sorted, deduplicated (q, c, q').
    delta: Vec<(usize, usize, usize)>,
    init: Vec<usize>,
    fin: Vec<usize>,
}

/// Result of [`Nfa::arena_of`]: the arena on essential states, the arena
/// states that are initial, and the NFA state behind each arena state.
#[derive(Clone, Debug)]
pub struct ClosureArena {
    pub arena: Arena,
    pub starts: Vec<usize>,
    pub origin: Vec<usize>,
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

impl Nfa {
    pub fn new(
        names: Vec<String>,
        colors: Vec<String>,
        delta: Vec<(usize, usize, usize)>,
        init: Vec<usize>,
        fin: Vec<usize>,
    ) -> Result<Nfa> {
        let n = names.len();
        if let Some(t) = delta.iter().find(|t| t.0 >= n || t.2 >= n || t.1 >= colors.len()) {
            return Err(GameError::DanglingEdge(format!("transition {:?}", t)));
        }
        if init.iter().chain(&fin).any(|&q| q >= n) {
            return Err(GameError::DanglingEdge("initial or final state out of range".into()));
        }
        let mut delta = delta;
        delta.sort_unstable();
        delta.dedup();
        Ok(Nfa { names, colors, delta, init: sorted(init), fin: sorted(fin) })
    }

    /// The automaton with no states.
    pub fn empty(colors: Vec<String>) -> Nfa {
        Nfa { names: vec![], colors, delta: vec![], init: vec![], fin: vec![] }
    }

    /// `{ε}`.
    pub fn epsilon(colors: Vec<String>) -> Nfa {
        Nfa { names: vec!["e".into()], colors, delta: vec![], init: vec![0], fin: vec![0] }
    }

    /// Chain automaton for the single word `w`.
    pub fn word(colors: Vec<String>, w: &[usize]) -> Nfa {
        let names = (0..=w.len()).map(|i| format!("w{i}")).collect();
        let delta = w.iter().enumerate().map(|(i, &c)| (i, c, i + 1)).collect();
        Nfa::new(names, colors, delta, vec![0], vec![w.len()]).unwrap()
    }

    /// Builds an ε-free automaton (Glushkov) from a small regular expression
    /// over color names: juxtaposition, `|`, postfix `*`, parentheses, `eps`.
    pub fn from_regex(colors: &[String], src: &str) -> Result<Nfa> {
        regex::compile(colors, src)
    }

    pub fn n_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn delta(&self) -> &[(usize, usize, usize)] {
        &self.delta
    }

    pub fn init(&self) -> &[usize] {
        &self.init
    }

    pub fn fin(&self) -> &[usize] {
        &self.fin
    }

    fn step(&self, set: &BTreeSet<usize>, c: usize) -> BTreeSet<usize> {
        self.delta
            .iter()
            .filter(|t| t.1 == c && set.contains(&t.0))
            .map(|t| t.2)
            .collect()
    }

    fn run(&self, w: &[usize]) -> BTreeSet<usize> {
        w.iter().fold(self.init.iter().copied().collect(), |s, &c| self.step(&s, c))
    }

    pub fn accepts(&self, w: &[usize]) -> bool {
        self.run(w).iter().any(|q| self.fin.contains(q))
    }

    /// States from which a final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let mut ok = vec![false; self.n_states()];
        let mut stack: Vec<usize> = self.fin.clone();
        for &q in &self.fin {
            ok[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &(p, _, q2) in &self.delta {
                if q2 == q && !ok[p] {
                    ok[p] = true;
                    stack.push(p);
                }
            }
        }
        ok
    }

    /// Membership in the set of prefixes of words of the language.
    pub fn is_prefix(&self, w: &[usize]) -> bool {
        let co = self.coaccessible();
        self.run(w).iter().any(|&q| co[q])
    }

    /// Keeps only states from which a final state is reachable.
    pub fn trim_coaccessible(&self) -> Nfa {
        let keep = self.coaccessible();
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> Nfa {
        let mut idx = vec![usize::MAX; self.n_states()];
        let mut names = Vec::new();
        for q in 0..self.n_states() {
            if keep[q] {
                idx[q] = names.len();
                names.push(self.names[q].clone());
            }
        }
        let delta = self
            .delta
            .iter()
            .filter(|t| keep[t.0] && keep[t.2])
            .map(|&(q, c, q2)| (idx[q], c, idx[q2]))
            .collect();
        let map = |v: &[usize]| v.iter().filter(|&&q| keep[q]).map(|&q| idx[q]).collect();
        Nfa::new(names, self.colors.clone(), delta, map(&self.init), map(&self.fin)).unwrap()
    }

    pub fn is_empty(&self) -> bool {
        let co = self.coaccessible();
        !self.init.iter().any(|&q| co[q])
    }

    /// States lying on or reaching a cycle.
    pub fn essential_states(&self) -> Vec<bool> {
        let g = Digraph::new(self.n_states(), self.delta.iter().map(|t| (t.0, t.2)).collect());
        let comp = g.scc(&|_| true);
        let mut ess = vec![false; self.n_states()];
        for &(u, v) in &g.edges {
            if comp[u] == comp[v] {
                ess[u] = true;
            }
        }
        let mut stack: Vec<usize> = (0..self.n_states()).filter(|&q| ess[q]).collect();
        while let Some(q) = stack.pop() {
            for &(u, v) in &g.edges {
                if v == q && !ess[u] {
                    ess[u] = true;
                    stack.push(u);
                }
            }
        }
        ess
    }

    /// One-player arena whose plays from `starts` have exactly the colors of
    /// the safety closure of the language. Trims first.
    pub fn arena_of(&self) -> ClosureArena {
        let co = self.coaccessible();
        let kept: Vec<usize> = (0..self.n_states()).filter(|&q| co[q]).collect();
        let t = self.restrict(&co);
        let ess = t.essential_states();
        let origin: Vec<usize> = (0..t.n_states()).filter(|&q| ess[q]).collect();
        let mut idx = vec![usize::MAX; t.n_states()];
        for (i, &q) in origin.iter().enumerate() {
            idx[q] = i;
        }
        let edges = t
            .delta
            .iter()
            .filter(|x| ess[x.0] && ess[x.2])
            .map(|&(q, c, q2)| Edge::new(idx[q], c, idx[q2]))
            .collect();
        let states = origin.iter().map(|&q| (t.names[q].clone(), Player::P1)).collect();
        let arena = Arena::new(t.colors.clone(), states, edges).expect("essential states have essential successors");
        let starts = t.init.iter().filter(|&&q| ess[q]).map(|&q| idx[q]).collect();
        let origin = origin.into_iter().map(|q| kept[q]).collect();
        ClosureArena { arena, starts, origin }
    }

    /// Disjoint union.
    pub fn union(&self, other: &Nfa) -> Result<Nfa> {
        self.same_alphabet(other)?;
        let k = self.n_states();
        let mut names: Vec<String> = self.names.iter().map(|n| format!("l.{n}")).collect();
        names.extend(other.names.iter().map(|n| format!("r.{n}")));
        let mut delta = self.delta.clone();
        delta.extend(other.delta.iter().map(|&(q, c, q2)| (q + k, c, q2 + k)));
        let shift = |v: &[usize]| v.iter().map(|q| q + k).collect::<Vec<_>>();
        let init = [self.init.clone(), shift(&other.init)].concat();
        let fin = [self.fin.clone(), shift(&other.fin)].concat();
        Nfa::new(names, self.colors.clone(), delta, init, fin)
    }

    fn same_alphabet(&self, other: &Nfa) -> Result<()> {
        if self.colors != other.colors {
            return Err(GameError::AlphabetMismatch(format!(
                "[{}] vs [{}]",
                self.colors.join(" "),
                other.colors.join(" ")
            )));
        }
        Ok(())
    }

    /// Canonical minimal-DFA description of the finite-word language; equal
    /// keys iff equal languages.
    pub fn language_key(&self) -> Vec<u32> {
        let k = self.n_colors();
        // Subset construction; the empty set is the sink.
        let mut sets: Vec<BTreeSet<usize>> = vec![self.init.iter().copied().collect()];
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(sets[0].clone(), 0)]);
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let row = (0..k)
                .map(|c| {
                    let next = self.step(&sets[i], c);
                    *index.entry(next.clone()).or_insert_with(|| {
                        sets.push(next);
                        sets.len() - 1
                    })
                })
                .collect();
            trans.push(row);
            i += 1;
        }
        let accepting: Vec<bool> = sets.iter().map(|s| s.iter().any(|q| self.fin.contains(q))).collect();
        // Moore refinement.
        let mut class: Vec<usize> = accepting.iter().map(|&a| a as usize).collect();
        loop {
            let mut sig: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let next: Vec<usize> = (0..sets.len())
                .map(|d| {
                    let key = (class[d], trans[d].iter().map(|&e| class[e]).collect());
                    let n = sig.len();
                    *sig.entry(key).or_insert(n)
                })
                .collect();
            let stable = sig.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        // Canonical BFS numbering of classes from the initial one.
        let mut number: HashMap<usize, u32> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        number.insert(class[0], 0);
        let mut rep: HashMap<usize, usize> = HashMap::new();
        for d in 0..sets.len() {
            rep.entry(class[d]).or_insert(d);
        }
        while let Some(d) = queue.pop_front() {
            order.push(d);
            for &e in &trans[d] {
                if !number.contains_key(&class[e]) {
                    number.insert(class[e], number.len() as u32);
                    queue.push_back(rep[&class[e]]);
                }
            }
        }
        let mut key = vec![k as u32];
        for d in order {
            key.push(accepting[d] as u32);
            key.extend(trans[d].iter().map(|&e| number[&class[e]]));
        }
        key
    }

    pub fn same_language(&self, other: &Nfa) -> bool {
        self.colors == other.colors && self.language_key() == other.language_key()
    }

    /// Key of the safety closure: the prefix language of the closure.
    pub fn closure_key(&self) -> Vec<u32> {
        let ca = self.arena_of();
        let a = &ca.arena;
        let n = a.n_states();
        let delta = a.edges().iter().map(|e| (e.src, e.color, e.dst)).collect();
        let prefixes = Nfa::new(a.names().to_vec(), self.colors.clone(), delta, ca.starts.clone(), (0..n).collect())
            .unwrap();
        prefixes.language_key()
    }

    pub fn n_colors(&self) -> usize {
        self.colors.len()
    }

    pub fn contains_epsilon(&self) -> bool {
        self.init.iter().any(|q| self.fin.contains(q))
    }
}

/// Assembles gadget automata: states are appended with fresh names and merged
/// by pointing transitions directly at the shared state.
struct Builder {
    names: Vec<String>,
    delta: Vec<(usize, usize, usize)>,
    fin: Vec<usize>,
}

impl Builder {
    fn add(&mut self, name: String) -> usize {
        self.names.push(name);
        self.names.len() - 1
    }

    /// Chain for `w` ending in the existing state `t`; returns its first state.
    fn chain_into(&mut self, tag: &str, w: &[usize], t: usize) -> usize {
        if w.is_empty() {
            return t;
        }
        let first = self.add(format!("{tag}0"));
        let mut cur = first;
        for (i, &c) in w.iter().enumerate() {
            let next = if i + 1 == w.len() { t } else { self.add(format!("{tag}{}", i + 1)) };
            self.delta.push((cur, c, next));
            cur = next;
        }
        first
    }

    /// Copies `k` with its initial states replaced by `t` (incoming edges of
    /// the old initial states are kept on copies of them). With `close`, the
    /// final states of `k` are also represented by `t` and lose their own
    /// finality.
    fn attach(&mut self, tag: &str, k: &Nfa, t: usize, close: bool) {
        let base = self.names.len();
        for n in &k.names {
            self.add(format!("{tag}.{n}"));
        }
        let is_fin = |q: usize| k.fin.contains(&q);
        let targets = |q2: usize| -> Vec<usize> {
            let mut v = vec![base + q2];
            if close && is_fin(q2) {
                v.push(t);
            }
            v
        };
        for &(q, c, q2) in &k.delta {
            let mut srcs = vec![base + q];
            if k.init.contains(&q) {
                srcs.push(t);
            }
            for s in srcs {
                for d in targets(q2) {
                    self.delta.push((s, c, d));
                }
            }
        }
        if !close {
            self.fin.extend(k.fin.iter().map(|&q| base + q));
            if k.contains_epsilon() {
                self.fin.push(t);
            }
        }
    }

    fn finish(self, colors: &[String], init: Vec<usize>) -> Nfa {
        Nfa::new(self.names, colors.to_vec(), self.delta, init, self.fin).unwrap()
    }
}

/// Automaton with two entry states reading `w` resp. `w'` into a shared state
/// `t`, followed by `K1 ∪ K2`.
#[derive(Clone, Debug)]
pub struct MonotonyGadget {
    pub nfa: Nfa,
    pub start_w: usize,
    pub start_w2: usize,
    pub t: usize,
}

pub fn monotony_gadget(w: &[usize], w2: &[usize], k1: &Nfa, k2: &Nfa) -> Result<MonotonyGadget> {
    k1.same_alphabet(k2)?;
    for (name, k) in [("K1", k1), ("K2", k2)] {
        if k.is_empty() {
            return Err(GameError::EmptyLanguage(name.into()));
        }
    }
    let mut b = Builder { names: vec!["t".into()], delta: vec![], fin: vec![] };
    let t = 0;
    let start_w = b.chain_into("u", w, t);
    let start_w2 = b.chain_into("v", w2, t);
    b.attach("k1", &k1.trim_coaccessible(), t, false);
    b.attach("k2", &k2.trim_coaccessible(), t, false);
    let nfa = b.finish(k1.colors(), vec![start_w, start_w2]);
    Ok(MonotonyGadget { nfa, start_w, start_w2, t })
}

/// Automaton for `w (K1 ∪ K2)* K3`: a chain into `t`, the ε-free parts of `K1`
/// and `K2` as loops on `t`, and `K3` leaving from `t`.
#[derive(Clone, Debug)]
pub struct SelectivityGadget {
    pub nfa: Nfa,
    pub start: usize,
    pub t: usize,
}

pub fn selectivity_gadget(w: &[usize], k1: &Nfa, k2: &Nfa, k3: &Nfa) -> Result<SelectivityGadget> {
    k1.same_alphabet(k2)?;
    k1.same_alphabet(k3)?;
    for (name, k) in [("K1", k1), ("K2", k2), ("K3", k3)] {
        if k.is_empty() {
            return Err(GameError::EmptyLanguage(name.into()));
        }
    }
    let mut b = Builder { names: vec!["t".into()], delta: vec![], fin: vec![] };
    let t = 0;
    let start = b.chain_into("u", w, t);
    b.attach("k1", &k1.trim_coaccessible(), t, true);
    b.attach("k2", &k2.trim_coaccessible(), t, true);
    b.attach("k3", &k3.trim_coaccessible(), t, false);
    let nfa = b.finish(k1.colors(), vec![start]);
    Ok(SelectivityGadget { nfa, start, t })
}

/// `w K*`, built as the selectivity gadget with `K3 = {ε}`.
pub fn star_after(w: &[usize], k: &Nfa) -> Result<SelectivityGadget> {
    selectivity_gadget(w, k, k, &Nfa::epsilon(k.colors().to_vec()))
}

/// Exhaustive enumeration of small automata with initial state 0, ordered by
/// state count, then transition bitmask, then final-state bitmask. Bit
/// `(q·|C| + c)·k + q'` of the transition mask stands for `(q, c, q')`.
/// Automata are trimmed; empty languages are skipped.
pub struct SmallNfas {
    colors: Vec<String>,
    max_states: usize,
    budget: usize,
    emitted: usize,
    k: usize,
    tmask: u64,
    fmask: u64,
}

impl SmallNfas {
    pub fn new(colors: Vec<String>, max_states: usize, budget: usize) -> SmallNfas {
        let bits = max_states * max_states * colors.len();
        assert!(bits < 64, "enumeration space too large");
        SmallNfas { colors, max_states, budget, emitted: 0, k: 1, tmask: 0, fmask: 0 }
    }

    fn build(&self) -> Nfa {
        let (k, nc) = (self.k, self.colors.len());
        let mut delta = Vec::new();
        for q in 0..k {
            for c in 0..nc {
                for q2 in 0..k {
                    if self.tmask >> ((q * nc + c) * k + q2) & 1 == 1 {
                        delta.push((q, c, q2));
                    }
                }
            }
        }
        let fin = (0..k).filter(|q| self.fmask >> q & 1 == 1).collect();
        let names = (0..k).map(|q| format!("q{q}")).collect();
        Nfa::new(names, self.colors.clone(), delta, vec![0], fin).unwrap()
    }

    fn advance(&mut self) -> bool {
        self.fmask += 1;
        if self.fmask >> self.k == 1 {
            self.fmask = 0;
            self.tmask += 1;
            if self.tmask >> (self.k * self.k * self.colors.len()) == 1 {
                self.tmask = 0;
                self.k += 1;
            }
        }
        self.k <= self.max_states
    }
}

impl Iterator for SmallNfas {
    type Item = Nfa;

    fn next(&mut self) -> Option<Nfa> {
        while self.emitted < self.budget && self.k <= self.max_states {
            let nfa = self.build();
            self.advance();
            if !nfa.is_empty() {
                self.emitted += 1;
                return Some(nfa.trim_coaccessible());
            }
        }
        None
    }
}

pub fn enumerate_small_nfas(colors: &[String], max_states: usize, budget: usize) -> SmallNfas {
    SmallNfas::new(colors.to_vec(), max_states, budget)
}

mod regex {
    use super::*;

    enum Re {
        Eps,
        Sym(usize),
        Cat(Box<Re>, Box<Re>),
        Alt(Box<Re>, Box<Re>),
        Star(Box<Re>),
    }

    struct Parser<'a> {
        toks: Vec<&'a str>,
        pos: usize,
        colors: &'a [String],
        n_pos: usize,
        letters: Vec<usize>,
    }

    fn err(msg: String) -> GameError {
        GameError::Parse { line: 0, msg }
    }

    fn tokenize(src: &str) -> Vec<&str> {
        let mut out = Vec::new();
        for word in src.split_whitespace() {
            let mut start = 0;
            for (i, ch) in word.char_indices() {
                if "()|*".contains(ch) {
                    if start < i {
                        out.push(&word[start..i]);
                    }
                    out.push(&word[i..i + 1]);
                    start = i + 1;
                }
            }
            if start < word.len() {
                out.push(&word[start..]);
            }
        }
        out
    }

    impl<'a> Parser<'a> {
        fn peek(&self) -> Option<&'a str> {
            self.toks.get(self.pos).copied()
        }

        fn alt(&mut self) -> Result<Re> {
            let mut left = self.cat()?;
            while self.peek() == Some("|") {
                self.pos += 1;
                left = Re::Alt(Box::new(left), Box::new(self.cat()?));
            }
            Ok(left)
        }

        fn cat(&mut self) -> Result<Re> {
            let mut left: Option<Re> = None;
            while let Some(t) = self.peek() {
                if t == "|" || t == ")" {
                    break;
                }
                let mut atom = self.atom()?;
                while self.peek() == Some("*") {
                    self.pos += 1;
                    atom = Re::Star(Box::new(atom));
                }
                left = Some(match left {
                    None => atom,
                    Some(l) => Re::Cat(Box::new(l), Box::new(atom)),
                });
            }
            left.ok_or_else(|| err("empty expression".into()))
        }

        fn atom(&mut self) -> Result<Re> {
            let t = self.peek().ok_or_else(|| err("unexpected end".into()))?;
            self.pos += 1;
            match t {
                "(" => {
                    let inner = self.alt()?;
                    if self.peek() != Some(")") {
                        return Err(err("missing `)`".into()));
                    }
                    self.pos += 1;
                    Ok(inner)
                }
                "*" | ")" | "|" => Err(err(format!("unexpected `{t}`"))),
                "eps" => Ok(Re::Eps),
                name => {
                    let c = self
                        .colors
                        .iter()
                        .position(|x| x == name)
                        .ok_or_else(|| GameError::UnknownColor(name.into()))?;
                    self.n_pos += 1;
                    self.letters.push(c);
                    Ok(Re::Sym(self.n_pos))
                }
            }
        }
    }

    /// (nullable, first, last), filling `follow`.
    fn analyze(re: &Re, follow: &mut Vec<BTreeSet<usize>>) -> (bool, BTreeSet<usize>, BTreeSet<usize>) {
        match re {
            Re::Eps => (true, BTreeSet::new(), BTreeSet::new()),
            Re::Sym(p) => (false, BTreeSet::from([*p]), BTreeSet::from([*p])),
            Re::Cat(a, b) => {
                let (na, fa, la) = analyze(a, follow);
                let (nb, fb, lb) = analyze(b, follow);
                for &p in &la {
                    follow[p].extend(fb.iter().copied());
                }
                let first = if na { fa.union(&fb).copied().collect() } else { fa };
                let last = if nb { la.union(&lb).copied().collect() } else { lb };
                (na && nb, first, last)
            }
            Re::Alt(a, b) => {
                let (na, fa, la) = analyze(a, follow);
                let (nb, fb, lb) = analyze(b, follow);
                (na || nb, fa.union(&fb).copied().collect(), la.union(&lb).copied().collect())
            }
            Re::Star(a) => {
                let (_, f, l) = analyze(a, follow);
                for &p in &l {
                    follow[p].extend(f.iter().copied());
                }
                (true, f, l)
            }
        }
    }

    pub fn compile(colors: &[String], src: &str) -> Result<Nfa> {
        let mut p = Parser { toks: tokenize(src), pos: 0, colors, n_pos: 0, letters: vec![0] };
        let re = p.alt()?;
        if p.pos != p.toks.len() {
            return Err(err(format!("trailing `{}`", p.toks[p.pos])));
        }
        let mut follow = vec![BTreeSet::new(); p.n_pos + 1];
        let (nullable, first, last) = analyze(&re, &mut follow);
        let mut delta: Vec<(usize, usize, usize)> = first.iter().map(|&q| (0, p.letters[q], q)).collect();
        for (q, f) in follow.iter().enumerate() {
            delta.extend(f.iter().map(|&q2| (q, p.letters[q2], q2)));
        }
        let mut fin: Vec<usize> = last.into_iter().collect();
        if nullable {
            fin.push(0);
        }
        let names = (0..=p.n_pos).map(|q| format!("p{q}")).collect();
        Nfa::new(names, colors.to_vec(), delta, vec![0], fin)
    }
}
