//! Line-oriented text formats for arenas, skeletons, automata, relations and
//! strategies. `#` starts a comment; blank lines are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::arena::{Arena, Edge, Player};
use crate::automata::Nfa;
use crate::error::{GameError, Result};
use crate::preference::{ColorAttr, Kind, Relation};
use crate::skeleton::MemorySkeleton;
use crate::strategy::{MealyStrategy, Strategy};

fn err(line: usize, msg: impl Into<String>) -> GameError {
    GameError::Parse { line, msg: msg.into() }
}

/// Non-empty lines as (1-based line number, tokens). A `key:` prefix becomes
/// its own token.
fn lines(src: &str) -> Vec<(usize, Vec<&str>)> {
    src.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap().trim();
            if l.is_empty() {
                return None;
            }
            let mut toks = Vec::new();
            let rest = match l.split_once(':') {
                Some((k, r)) if !k.contains(char::is_whitespace) => {
                    toks.push(k);
                    r
                }
                _ => l,
            };
            toks.extend(rest.split_whitespace());
            Some((i + 1, toks))
        })
        .collect()
}

struct Names<'a> {
    what: &'static str,
    index: HashMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn new(what: &'static str) -> Self {
        Names { what, index: HashMap::new() }
    }

    fn add(&mut self, line: usize, name: &'a str) -> Result<usize> {
        let i = self.index.len();
        if self.index.insert(name, i).is_some() {
            return Err(err(line, format!("duplicate {} `{name}`", self.what)));
        }
        Ok(i)
    }

    fn get(&self, line: usize, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| err(line, format!("unknown {} `{name}`", self.what)))
    }
}

fn colors_of(ls: &[(usize, Vec<&str>)]) -> Result<Vec<String>> {
    let found: Vec<&(usize, Vec<&str>)> = ls.iter().filter(|(_, t)| t[0] == "alphabet").collect();
    match found.as_slice() {
        [(_, t)] => Ok(t[1..].iter().map(|s| s.to_string()).collect()),
        [] => Err(err(0, "missing `alphabet:` line")),
        [_, (l, _), ..] => Err(err(*l, "second `alphabet:` line")),
    }
}

fn color_names(colors: &[String]) -> Names<'_> {
    let mut n = Names::new("color");
    for c in colors {
        n.index.insert(c, n.index.len());
    }
    n
}

fn arity(line: usize, t: &[&str], n: usize) -> Result<()> {
    if t.len() != n {
        return Err(err(line, format!("`{}` takes {} arguments", t[0], n - 1)));
    }
    Ok(())
}

pub fn parse_arena(src: &str) -> Result<Arena> {
    let ls = lines(src);
    let colors = colors_of(&ls)?;
    let cn = color_names(&colors);
    let mut sn = Names::new("state");
    let mut states = Vec::new();
    for (l, t) in ls.iter().filter(|(_, t)| t[0] == "state") {
        arity(*l, t, 3)?;
        let owner = match t[2] {
            "P1" => Player::P1,
            "P2" => Player::P2,
            o => return Err(err(*l, format!("owner must be P1 or P2, got `{o}`"))),
        };
        sn.add(*l, t[1])?;
        states.push((t[1].to_string(), owner));
    }
    let mut edges = Vec::new();
    for (l, t) in &ls {
        match t[0] {
            "alphabet" | "state" => {}
            "edge" => {
                arity(*l, t, 4)?;
                edges.push(Edge::new(sn.get(*l, t[1])?, cn.get(*l, t[2])?, sn.get(*l, t[3])?));
            }
            k => return Err(err(*l, format!("unexpected `{k}`"))),
        }
    }
    Arena::new(colors, states, edges)
}

pub fn print_arena(a: &Arena) -> String {
    let mut s = format!("alphabet: {}\n", a.colors().join(" "));
    for (name, owner) in a.states() {
        writeln!(s, "state {name} {owner}").unwrap();
    }
    for e in a.edges() {
        writeln!(s, "edge {} {} {}", a.name(e.src), a.color_name(e.color), a.name(e.dst)).unwrap();
    }
    s
}

/// Skeleton lines of `ls`; other keywords are left to the caller.
fn skeleton_from(ls: &[(usize, Vec<&str>)], colors: Vec<String>) -> Result<MemorySkeleton> {
    let cn = color_names(&colors);
    let mut mn = Names::new("memory state");
    let mut names = Vec::new();
    for (l, t) in ls.iter().filter(|(_, t)| t[0] == "state") {
        arity(*l, t, 2)?;
        mn.add(*l, t[1])?;
        names.push(t[1].to_string());
    }
    let mut init = None;
    let mut trans = Vec::new();
    for (l, t) in ls {
        match t[0] {
            "init" => {
                arity(*l, t, 2)?;
                if init.replace(mn.get(*l, t[1])?).is_some() {
                    return Err(err(*l, "second `init` line"));
                }
            }
            "upd" => {
                arity(*l, t, 4)?;
                trans.push((mn.get(*l, t[1])?, cn.get(*l, t[2])?, mn.get(*l, t[3])?));
            }
            _ => {}
        }
    }
    let init = init.ok_or_else(|| err(0, "missing `init` line"))?;
    MemorySkeleton::new(names, colors, init, &trans)
}

fn only(ls: &[(usize, Vec<&str>)], allowed: &[&str]) -> Result<()> {
    match ls.iter().find(|(_, t)| !allowed.contains(&t[0])) {
        Some((l, t)) => Err(err(*l, format!("unexpected `{}`", t[0]))),
        None => Ok(()),
    }
}

pub fn parse_skeleton(src: &str) -> Result<MemorySkeleton> {
    let ls = lines(src);
    only(&ls, &["alphabet", "state", "init", "upd"])?;
    skeleton_from(&ls, colors_of(&ls)?)
}

fn write_skeleton(s: &mut String, sk: &MemorySkeleton) {
    writeln!(s, "alphabet: {}", sk.colors().join(" ")).unwrap();
    for n in sk.names() {
        writeln!(s, "state {n}").unwrap();
    }
    writeln!(s, "init {}", sk.name(sk.init())).unwrap();
    for m in 0..sk.n_states() {
        for (c, cname) in sk.colors().iter().enumerate() {
            writeln!(s, "upd {} {cname} {}", sk.name(m), sk.name(sk.update(m, c))).unwrap();
        }
    }
}

pub fn print_skeleton(sk: &MemorySkeleton) -> String {
    let mut s = String::new();
    write_skeleton(&mut s, sk);
    s
}

pub fn parse_nfa(src: &str) -> Result<Nfa> {
    let ls = lines(src);
    only(&ls, &["alphabet", "state", "trans"])?;
    let colors = colors_of(&ls)?;
    let cn = color_names(&colors);
    let mut qn = Names::new("automaton state");
    let (mut names, mut init, mut fin) = (Vec::new(), Vec::new(), Vec::new());
    for (l, t) in ls.iter().filter(|(_, t)| t[0] == "state") {
        if t.len() < 2 {
            return Err(err(*l, "`state` needs a name"));
        }
        let q = qn.add(*l, t[1])?;
        names.push(t[1].to_string());
        for flag in &t[2..] {
            match *flag {
                "init" => init.push(q),
                "fin" => fin.push(q),
                f => return Err(err(*l, format!("unknown state flag `{f}`"))),
            }
        }
    }
    let mut delta = Vec::new();
    for (l, t) in ls.iter().filter(|(_, t)| t[0] == "trans") {
        arity(*l, t, 4)?;
        delta.push((qn.get(*l, t[1])?, cn.get(*l, t[2])?, qn.get(*l, t[3])?));
    }
    Nfa::new(names, colors, delta, init, fin)
}

pub fn print_nfa(k: &Nfa) -> String {
    let mut s = format!("alphabet: {}\n", k.colors().join(" "));
    for (q, n) in k.names().iter().enumerate() {
        let mut line = format!("state {n}");
        if k.init().contains(&q) {
            line.push_str(" init");
        }
        if k.fin().contains(&q) {
            line.push_str(" fin");
        }
        writeln!(s, "{line}").unwrap();
    }
    for &(q, c, q2) in k.delta() {
        writeln!(s, "trans {} {} {}", k.names()[q], k.colors()[c], k.names()[q2]).unwrap();
    }
    s
}

pub fn parse_relation(src: &str) -> Result<Relation> {
    let ls = lines(src);
    only(&ls, &["kind", "alphabet", "attr", "inverse"])?;
    let colors = colors_of(&ls)?;
    let cn = color_names(&colors);
    let mut kind = None;
    let mut attrs = vec![ColorAttr::default(); colors.len()];
    let mut inverse = false;
    for (l, t) in &ls {
        match t[0] {
            "kind" => {
                arity(*l, t, 2)?;
                let k = Kind::from_name(t[1]).ok_or_else(|| err(*l, format!("unknown relation kind `{}`", t[1])))?;
                if kind.replace(k).is_some() {
                    return Err(err(*l, "second `kind:` line"));
                }
            }
            "attr" => {
                if t.len() < 3 {
                    return Err(err(*l, "`attr` needs a color and at least one key=value"));
                }
                let a = &mut attrs[cn.get(*l, t[1])?];
                for kv in &t[2..] {
                    let (k, v) = kv.split_once('=').ok_or_else(|| err(*l, format!("expected key=value, got `{kv}`")))?;
                    let bad = |_| err(*l, format!("bad value `{v}` for `{k}`"));
                    match k {
                        "weight" => a.weight = Some(v.parse().map_err(bad)?),
                        "priority" => a.priority = Some(v.parse().map_err(bad)?),
                        "targets" => {
                            for x in v.split(',') {
                                match x {
                                    "T1" => a.t1 = true,
                                    "T2" => a.t2 = true,
                                    _ => return Err(err(*l, format!("unknown target set `{x}`"))),
                                }
                            }
                        }
                        _ => return Err(err(*l, format!("unknown attribute `{k}`"))),
                    }
                }
            }
            "inverse" => inverse = true,
            _ => {}
        }
    }
    let kind = kind.ok_or_else(|| err(0, "missing `kind:` line"))?;
    let r = Relation::new(kind, colors, attrs)?;
    Ok(if inverse { r.inverse() } else { r })
}

pub fn print_relation(r: &Relation) -> String {
    let mut s = format!("kind: {}\nalphabet: {}\n", r.kind().name(), r.colors().join(" "));
    for (c, a) in r.colors().iter().zip(r.attrs()) {
        let mut kv = Vec::new();
        if let Some(w) = a.weight {
            kv.push(format!("weight={w}"));
        }
        if let Some(p) = a.priority {
            kv.push(format!("priority={p}"));
        }
        let targets: Vec<&str> = [(a.t1, "T1"), (a.t2, "T2")].iter().filter(|x| x.0).map(|x| x.1).collect();
        if !targets.is_empty() {
            kv.push(format!("targets={}", targets.join(",")));
        }
        if !kv.is_empty() {
            writeln!(s, "attr {c} {}", kv.join(" ")).unwrap();
        }
    }
    if r.is_inverted() {
        s.push_str("inverse\n");
    }
    s
}

/// A strategy on `arena`: an `owner:` line, an inline skeleton, and one
/// `act <mem> <state> <color> <dst>` line per memory state and owned state.
pub fn parse_strategy(src: &str, arena: &Arena) -> Result<MealyStrategy> {
    let ls = lines(src);
    only(&ls, &["owner", "alphabet", "state", "init", "upd", "act"])?;
    let sk = skeleton_from(&ls, colors_of(&ls)?)?;
    sk.check_alphabet(arena.colors())?;
    let owner = match ls.iter().find(|(_, t)| t[0] == "owner") {
        Some((l, t)) => match t.get(1).copied() {
            Some("P1") => Player::P1,
            Some("P2") => Player::P2,
            _ => return Err(err(*l, "owner must be P1 or P2")),
        },
        None => return Err(err(0, "missing `owner:` line")),
    };
    let n = arena.n_states();
    let mut next = vec![None; n * sk.n_states()];
    for (l, t) in ls.iter().filter(|(_, t)| t[0] == "act") {
        arity(*l, t, 5)?;
        let m = sk.state_index(t[1]).ok_or_else(|| err(*l, format!("unknown memory state `{}`", t[1])))?;
        let st = |x: &str| arena.state_index(x).ok_or_else(|| err(*l, format!("unknown state `{x}`")));
        let c = arena.color_index(t[3]).ok_or_else(|| err(*l, format!("unknown color `{}`", t[3])))?;
        let e = Edge::new(st(t[2])?, c, st(t[4])?);
        if next[m * n + e.src].replace(e).is_some() {
            return Err(err(*l, "second action for the same pair"));
        }
    }
    MealyStrategy::new(arena, owner, sk, next)
}

pub fn print_strategy(sigma: &MealyStrategy, arena: &Arena) -> String {
    let mut s = format!("owner: {}\n", sigma.owner());
    write_skeleton(&mut s, sigma.skeleton());
    let n = arena.n_states();
    for (i, e) in sigma.table().iter().enumerate() {
        if let Some(e) = e {
            let m = i / n;
            writeln!(
                s,
                "act {} {} {} {}",
                sigma.skeleton().name(m),
                arena.name(e.src),
                arena.color_name(e.color),
                arena.name(e.dst)
            )
            .unwrap();
        }
    }
    s
}

/// DOT rendering: P1 states as circles, P2 states as boxes, `bold` edges drawn thick.
pub fn arena_dot(a: &Arena, bold: &[Edge]) -> String {
    let mut s = String::from("digraph arena {\n  rankdir=LR;\n");
    for (i, (name, owner)) in a.states().iter().enumerate() {
        let shape = if *owner == Player::P1 { "circle" } else { "box" };
        writeln!(s, "  s{i} [label=\"{}\", shape={shape}];", escape(name)).unwrap();
    }
    for e in a.edges() {
        let style = if bold.contains(e) { ", penwidth=3" } else { "" };
        writeln!(s, "  s{} -> s{} [label=\"{}\"{style}];", e.src, e.dst, escape(a.color_name(e.color))).unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn skeleton_dot(sk: &MemorySkeleton) -> String {
    let mut s = String::from("digraph skeleton {\n  rankdir=LR;\n  init [shape=point];\n");
    for (m, name) in sk.names().iter().enumerate() {
        writeln!(s, "  m{m} [label=\"{}\", shape=circle];", escape(name)).unwrap();
    }
    writeln!(s, "  init -> m{};", sk.init()).unwrap();
    for m in 0..sk.n_states() {
        // One arrow per target, labeled with every color leading there.
        let mut by_target: Vec<(usize, Vec<&str>)> = Vec::new();
        for (c, cname) in sk.colors().iter().enumerate() {
            let m2 = sk.update(m, c);
            match by_target.iter_mut().find(|x| x.0 == m2) {
                Some(x) => x.1.push(cname),
                None => by_target.push((m2, vec![cname])),
            }
        }
        for (m2, cs) in by_target {
            writeln!(s, "  m{m} -> m{m2} [label=\"{}\"];", escape(&cs.join(","))).unwrap();
        }
    }
    s.push_str("}\n");
    s
}

pub fn nfa_dot(k: &Nfa) -> String {
    let mut s = String::from("digraph nfa {\n  rankdir=LR;\n");
    for (q, name) in k.names().iter().enumerate() {
        let shape = if k.fin().contains(&q) { "doublecircle" } else { "circle" };
        writeln!(s, "  q{q} [label=\"{}\", shape={shape}];", escape(name)).unwrap();
        if k.init().contains(&q) {
            writeln!(s, "  i{q} [shape=point];\n  i{q} -> q{q};").unwrap();
        }
    }
    for &(q, c, q2) in k.delta() {
        writeln!(s, "  q{q} -> q{q2} [label=\"{}\"];", escape(&k.colors()[c])).unwrap();
    }
    s.push_str("}\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
