//! DARPE compilation: Thompson construction followed by subset
//! construction. The result is deterministic, so every labeled path has at
//! most one run, which is what makes per-state path counts exact.

use std::collections::{BTreeSet, HashMap};

use crate::catalog::{Catalog, GraphDef};
use crate::frontend::ast::{Adorn, Bounds, Darpe};
use crate::graph::{EdgeId, Graph, VertexId};

use super::DarpeError;

/// Upper bound on states produced by unrolling bounded repetitions.
const MAX_NFA_STATES: usize = 100_000;

/// Direction adornment of a hop label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Undirected = 0,
    Forward = 1,
    Backward = 2,
}

impl From<Adorn> for Dir {
    fn from(a: Adorn) -> Self {
        match a {
            Adorn::Undirected => Dir::Undirected,
            Adorn::Forward => Dir::Forward,
            Adorn::Backward => Dir::Backward,
        }
    }
}

/// A letter of the adorned edge-type alphabet; `etype` indexes the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirSymbol {
    pub etype: u32,
    pub dir: Dir,
}

impl DirSymbol {
    fn index(self) -> usize {
        self.etype as usize * 3 + self.dir as usize
    }

    pub fn display(self, catalog: &Catalog) -> String {
        let name = &catalog.edge_type_at(self.etype as usize).name;
        match self.dir {
            Dir::Undirected => name.clone(),
            Dir::Forward => format!("{name}>"),
            Dir::Backward => format!("<{name}"),
        }
    }
}

/// Deterministic automaton over [`DirSymbol`]s. State 0 is the start; every
/// state is reachable from it and can reach an accepting state.
#[derive(Debug, Clone)]
pub struct DarpeAutomaton {
    accepting: Vec<bool>,
    /// `table[q * width + sym.index()]`, `NONE` when undefined.
    table: Vec<u32>,
    width: usize,
    /// Symbols with at least one transition, sorted.
    alphabet: Vec<DirSymbol>,
}

const NONE: u32 = u32::MAX;

impl DarpeAutomaton {
    pub const START: u32 = 0;

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.accepting[q as usize]
    }

    #[inline]
    pub fn step(&self, q: u32, sym: DirSymbol) -> Option<u32> {
        let i = sym.index();
        if i >= self.width {
            return None;
        }
        let t = self.table[q as usize * self.width + i];
        (t != NONE).then_some(t)
    }

    pub fn accepts(&self, word: &[DirSymbol]) -> bool {
        if self.num_states() == 0 {
            return false;
        }
        let mut q = Self::START;
        for &s in word {
            match self.step(q, s) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.is_accepting(q)
    }

    /// Whether the language is empty.
    pub fn is_empty(&self) -> bool {
        self.num_states() == 0
    }

    pub fn alphabet(&self) -> &[DirSymbol] {
        &self.alphabet
    }

    /// Whether any transition reads edge type `etype` in direction `dir`.
    #[inline]
    pub fn uses(&self, etype: u32, dir: Dir) -> bool {
        let i = DirSymbol { etype, dir }.index();
        i < self.width && (0..self.num_states()).any(|q| self.table[q * self.width + i] != NONE)
    }

    /// Transitions of one state, sorted by symbol.
    pub fn transitions(&self, q: u32) -> Vec<(DirSymbol, u32)> {
        self.alphabet.iter().filter_map(|&s| self.step(q, s).map(|t| (s, t))).collect()
    }
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<u32>>,
    sym: Vec<Vec<(DirSymbol, u32)>>,
}

impl Nfa {
    fn state(&mut self) -> Result<u32, DarpeError> {
        if self.eps.len() >= MAX_NFA_STATES {
            return Err(DarpeError::TooLarge);
        }
        self.eps.push(Vec::new());
        self.sym.push(Vec::new());
        Ok((self.eps.len() - 1) as u32)
    }

    /// Adds a fragment for `d`; returns its (entry, exit) states.
    fn build(&mut self, d: &Darpe, letters: &dyn Fn(&Darpe) -> Result<Vec<DirSymbol>, DarpeError>) -> Result<(u32, u32), DarpeError> {
        match d {
            Darpe::Sym { .. } | Darpe::Wild { .. } => {
                let (a, b) = (self.state()?, self.state()?);
                for s in letters(d)? {
                    self.sym[a as usize].push((s, b));
                }
                Ok((a, b))
            }
            Darpe::Concat(xs) => {
                let entry = self.state()?;
                let mut cur = entry;
                for x in xs {
                    let (a, b) = self.build(x, letters)?;
                    self.eps[cur as usize].push(a);
                    cur = b;
                }
                Ok((entry, cur))
            }
            Darpe::Alt(xs) => {
                let (entry, exit) = (self.state()?, self.state()?);
                for x in xs {
                    let (a, b) = self.build(x, letters)?;
                    self.eps[entry as usize].push(a);
                    self.eps[b as usize].push(exit);
                }
                Ok((entry, exit))
            }
            Darpe::Star { inner, bounds } => {
                let (lo, hi) = bounds.map_or((0, None), Bounds::lo_hi);
                let entry = self.state()?;
                let mut cur = entry;
                for _ in 0..lo {
                    let (a, b) = self.build(inner, letters)?;
                    self.eps[cur as usize].push(a);
                    cur = b;
                }
                let exit = self.state()?;
                self.eps[cur as usize].push(exit);
                match hi {
                    None => {
                        let (a, b) = self.build(inner, letters)?;
                        self.eps[cur as usize].push(a);
                        self.eps[b as usize].push(cur);
                    }
                    Some(hi) => {
                        for _ in lo..hi {
                            let (a, b) = self.build(inner, letters)?;
                            self.eps[cur as usize].push(a);
                            self.eps[b as usize].push(exit);
                            cur = b;
                        }
                    }
                }
                Ok((entry, exit))
            }
        }
    }

    fn closure(&self, set: &mut BTreeSet<u32>) {
        let mut stack: Vec<u32> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &n in &self.eps[q as usize] {
                if set.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
}

/// Expands a symbol or wildcard into alphabet letters, validating names and
/// adornments. Types outside `graph` are unknown to the pattern.
pub fn letters(d: &Darpe, catalog: &Catalog, graph: Option<&GraphDef>) -> Result<Vec<DirSymbol>, DarpeError> {
    let member = |name: &str| graph.is_none_or(|g| g.edge_types.contains(name));
    match d {
        Darpe::Sym { name, adorn } => {
            let idx = catalog
                .edge_type_index(name)
                .filter(|_| member(name))
                .ok_or_else(|| DarpeError::UnknownEdgeType(name.clone()))?;
            let directed = catalog.edge_type_at(idx).directed;
            if directed == (*adorn == Adorn::Undirected) {
                return Err(DarpeError::Adornment { name: name.clone(), directed });
            }
            Ok(vec![DirSymbol { etype: idx as u32, dir: (*adorn).into() }])
        }
        Darpe::Wild { adorn } => {
            let mut out = Vec::new();
            for (i, et) in catalog.edge_types().enumerate() {
                if !member(&et.name) {
                    continue;
                }
                let dirs: &[Dir] = match (adorn, et.directed) {
                    (None, false) | (Some(Adorn::Undirected), false) => &[Dir::Undirected],
                    (None, true) => &[Dir::Forward, Dir::Backward],
                    (Some(Adorn::Forward), true) => &[Dir::Forward],
                    (Some(Adorn::Backward), true) => &[Dir::Backward],
                    _ => &[],
                };
                out.extend(dirs.iter().map(|&dir| DirSymbol { etype: i as u32, dir }));
            }
            Ok(out)
        }
        _ => unreachable!("letters of a compound expression"),
    }
}

/// Compiles a DARPE against the catalog, restricted to `graph`'s edge types
/// when given.
pub fn compile_darpe(d: &Darpe, catalog: &Catalog, graph: Option<&GraphDef>) -> Result<DarpeAutomaton, DarpeError> {
    let mut nfa = Nfa::default();
    let leaf = |x: &Darpe| letters(x, catalog, graph);
    let (entry, exit) = nfa.build(d, &leaf)?;
    let width = catalog.edge_type_count() * 3;

    // Subset construction; DFA states are epsilon-closed NFA state sets.
    let mut start = BTreeSet::from([entry]);
    nfa.closure(&mut start);
    let mut index: HashMap<BTreeSet<u32>, u32> = HashMap::from([(start.clone(), 0)]);
    let mut sets = vec![start];
    let mut edges: Vec<Vec<(DirSymbol, u32)>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut moves: std::collections::BTreeMap<DirSymbol, BTreeSet<u32>> = Default::default();
        for &q in &sets[i] {
            for &(s, t) in &nfa.sym[q as usize] {
                moves.entry(s).or_default().insert(t);
            }
        }
        let mut out = Vec::with_capacity(moves.len());
        for (s, mut target) in moves {
            nfa.closure(&mut target);
            let next = sets.len() as u32;
            let id = *index.entry(target.clone()).or_insert_with(|| {
                sets.push(target);
                next
            });
            out.push((s, id));
        }
        edges.push(out);
        i += 1;
    }
    let accepting: Vec<bool> = sets.iter().map(|s| s.contains(&exit)).collect();

    // Keep only states that can reach acceptance (co-reachability).
    let n = sets.len();
    let mut live = accepting.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            if !live[q] && edges[q].iter().any(|&(_, t)| live[t as usize]) {
                live[q] = true;
                changed = true;
            }
        }
    }
    if !live[0] {
        return Ok(DarpeAutomaton { accepting: Vec::new(), table: Vec::new(), width, alphabet: Vec::new() });
    }
    let mut renumber = vec![NONE; n];
    let mut next = 0u32;
    for q in 0..n {
        if live[q] {
            renumber[q] = next;
            next += 1;
        }
    }
    let m = next as usize;
    let mut table = vec![NONE; m * width];
    let mut acc = vec![false; m];
    let mut alphabet = BTreeSet::new();
    for q in (0..n).filter(|&q| live[q]) {
        let nq = renumber[q] as usize;
        acc[nq] = accepting[q];
        for &(s, t) in &edges[q] {
            if live[t as usize] {
                table[nq * width + s.index()] = renumber[t as usize];
                alphabet.insert(s);
            }
        }
    }
    let alphabet: Vec<DirSymbol> = alphabet.into_iter().collect();
    Ok(minimize(&acc, &table, width, alphabet))
}

/// Moore partition refinement. Missing transitions behave as a dead state,
/// so equivalent states have identical defined-ness as well as targets.
fn minimize(acc: &[bool], table: &[u32], width: usize, alphabet: Vec<DirSymbol>) -> DarpeAutomaton {
    let m = acc.len();
    let mut class: Vec<u32> = acc.iter().map(|&a| a as u32).collect();
    loop {
        let mut ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        // Class numbering follows first appearance so the start stays 0.
        let next: Vec<u32> = (0..m)
            .map(|q| {
                let sig = alphabet
                    .iter()
                    .map(|s| match table[q * width + s.index()] {
                        NONE => NONE,
                        t => class[t as usize],
                    })
                    .collect();
                let n = ids.len() as u32;
                *ids.entry((class[q], sig)).or_insert(n)
            })
            .collect();
        let done = ids.len() == class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if done {
            break;
        }
    }
    let k = class.iter().max().map_or(0, |&c| c as usize + 1);
    let mut accepting = vec![false; k];
    let mut out = vec![NONE; k * width];
    for q in 0..m {
        let c = class[q] as usize;
        accepting[c] = acc[q];
        for s in &alphabet {
            let t = table[q * width + s.index()];
            if t != NONE {
                out[c * width + s.index()] = class[t as usize];
            }
        }
    }
    DarpeAutomaton { accepting, table: out, width, alphabet }
}

/// The label of hop `(u, e, v)`. For a directed self-loop both adornments
/// apply; the forward one is returned.
pub fn hop_label(g: &Graph, u: VertexId, e: EdgeId, v: VertexId) -> Result<DirSymbol, DarpeError> {
    let (s, t) = g.endpoints(e);
    let etype = g.edge_type(e);
    let dir = if !g.edge_directed(e) {
        ((s, t) == (u, v) || (s, t) == (v, u)).then_some(Dir::Undirected)
    } else if (s, t) == (u, v) {
        Some(Dir::Forward)
    } else if (s, t) == (v, u) {
        Some(Dir::Backward)
    } else {
        None
    };
    dir.map(|dir| DirSymbol { etype, dir }).ok_or(DarpeError::NotIncident { edge: e.0, u: u.0, v: v.0 })
}

/// Length shared by every word of the language, if there is one.
pub fn fixed_length(d: &Darpe) -> Option<u32> {
    match d {
        Darpe::Sym { .. } | Darpe::Wild { .. } => Some(1),
        Darpe::Concat(xs) => xs.iter().map(fixed_length).sum(),
        Darpe::Alt(xs) => {
            let first = fixed_length(xs.first()?)?;
            xs.iter().all(|x| fixed_length(x) == Some(first)).then_some(first)
        }
        Darpe::Star { inner, bounds } => {
            let len = fixed_length(inner)?;
            match bounds.map(Bounds::lo_hi) {
                _ if len == 0 => Some(0),
                Some((lo, Some(hi))) if lo == hi => Some(lo * len),
                _ => None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_ddl;

    fn catalog() -> Catalog {
        let ddl = "CREATE VERTEX V (id STRING PRIMARY KEY)
                   CREATE DIRECTED EDGE E (FROM V, TO V)
                   CREATE DIRECTED EDGE F (FROM V, TO V)
                   CREATE DIRECTED EDGE G (FROM V, TO V)
                   CREATE DIRECTED EDGE H (FROM V, TO V)
                   CREATE UNDIRECTED EDGE J (FROM V, TO V)";
        let mut c = Catalog::new();
        for s in parse_ddl(ddl).unwrap() {
            c.apply_in_place(&s).unwrap();
        }
        c
    }

    fn compile(text: &str, c: &Catalog) -> DarpeAutomaton {
        let q = crate::frontend::parse_query(&format!("SELECT s FROM :s -({text})- :t")).unwrap();
        let crate::frontend::ast::StmtKind::Block(b) = &q.body[0].kind else { unreachable!() };
        let crate::frontend::ast::Atom::Graph { pattern, .. } = &b.from[0] else { unreachable!() };
        compile_darpe(&pattern[0].hops[0].0.darpe, c, None).unwrap()
    }

    fn word(c: &Catalog, syms: &str) -> Vec<DirSymbol> {
        syms.split_whitespace()
            .map(|s| {
                let (name, dir) = if let Some(n) = s.strip_suffix('>') {
                    (n, Dir::Forward)
                } else if let Some(n) = s.strip_prefix('<') {
                    (n, Dir::Backward)
                } else {
                    (s, Dir::Undirected)
                };
                DirSymbol { etype: c.edge_type_index(name).unwrap() as u32, dir }
            })
            .collect()
    }

    #[test]
    fn kleene_star_is_a_single_accepting_loop() {
        let c = catalog();
        let a = compile("E>*", &c);
        assert_eq!(a.num_states(), 1);
        assert!(a.is_accepting(0));
        assert_eq!(a.step(0, word(&c, "E>")[0]), Some(0));
    }

    #[test]
    fn bounded_repetition_accepts_only_counts_in_range() {
        let c = catalog();
        let a = compile("E>*2..3", &c);
        let accepted: Vec<usize> = (0..=5).filter(|&n| a.accepts(&vec![word(&c, "E>")[0]; n])).collect();
        assert_eq!(accepted, vec![2, 3]);
        let open = compile("E>*2..", &c);
        assert!(!open.accepts(&word(&c, "E>")) && open.accepts(&word(&c, "E> E> E> E> E>")));
        let upto = compile("E>*..1", &c);
        assert!(upto.accepts(&[]) && upto.accepts(&word(&c, "E>")) && !upto.accepts(&word(&c, "E> E>")));
    }

    #[test]
    fn precedence_example_language() {
        let c = catalog();
        let a = compile("E>.(F>|<G)*.<H.J", &c);
        assert!(a.accepts(&word(&c, "E> F> <G <H J")));
        assert!(a.accepts(&word(&c, "E> <H J")));
        assert!(!a.accepts(&word(&c, "E> J")));
        assert!(!a.accepts(&word(&c, "E> G> <H J")));
    }

    #[test]
    fn wildcard_expands_to_legal_adornments() {
        let c = catalog();
        let any = compile("_", &c);
        assert_eq!(any.alphabet().len(), 4 * 2 + 1);
        let fwd = compile("_>", &c);
        assert!(fwd.alphabet().iter().all(|s| s.dir == Dir::Forward));
        assert_eq!(fwd.alphabet().len(), 4);
    }

    #[test]
    fn contradictory_adornment_is_rejected() {
        let c = catalog();
        let d = Darpe::Sym { name: "J".into(), adorn: Adorn::Forward };
        assert!(matches!(compile_darpe(&d, &c, None), Err(DarpeError::Adornment { .. })));
        let d = Darpe::Sym { name: "E".into(), adorn: Adorn::Undirected };
        assert!(matches!(compile_darpe(&d, &c, None), Err(DarpeError::Adornment { .. })));
    }

    #[test]
    fn hop_labels_follow_orientation() {
        let c = std::sync::Arc::new(catalog());
        let mut g = Graph::new(c.clone());
        let u = g.add_vertex("V", crate::Value::str("u"), &[]).unwrap();
        let v = g.add_vertex("V", crate::Value::str("v"), &[]).unwrap();
        let e = g.add_edge("E", u, v, &[]).unwrap();
        let j = g.add_edge("J", u, v, &[]).unwrap();
        assert_eq!(hop_label(&g, u, e, v).unwrap().dir, Dir::Forward);
        assert_eq!(hop_label(&g, v, e, u).unwrap().dir, Dir::Backward);
        assert_eq!(hop_label(&g, u, j, v).unwrap().dir, Dir::Undirected);
        assert_eq!(hop_label(&g, v, j, u).unwrap().dir, Dir::Undirected);
        assert!(hop_label(&g, u, e, u).is_err());
    }

    #[test]
    fn fixed_lengths() {
        let c = catalog();
        let _ = c;
        let sym = |n: &str| Darpe::Sym { name: n.into(), adorn: Adorn::Forward };
        assert_eq!(fixed_length(&Darpe::Concat(vec![sym("E"), sym("F")])), Some(2));
        assert_eq!(fixed_length(&Darpe::Star { inner: Box::new(sym("E")), bounds: Some(Bounds::Exact(3)) }), Some(3));
        assert_eq!(fixed_length(&Darpe::Star { inner: Box::new(sym("E")), bounds: None }), None);
    }
}
