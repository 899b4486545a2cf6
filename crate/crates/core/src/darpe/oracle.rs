//! Brute-force path enumeration, kept independent of the automaton: language
//! membership uses Brzozowski derivatives and paths are listed explicitly.
//! Exponential; for small graphs in tests only.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::automaton::{Dir, DirSymbol};
use super::DarpeError;
use crate::catalog::{Catalog, GraphDef};
use crate::frontend::ast::{Adorn, Darpe};
use crate::graph::{EdgeId, Graph, VertexId};

/// Largest graph the oracle accepts.
pub const ORACLE_VERTEX_LIMIT: usize = 20;

/// Which satisfying paths count as matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Legality {
    /// Only the minimum-length satisfying paths.
    AllShortest,
    NoRepeatVertex,
    NoRepeatEdge,
    /// Every satisfying path of at most this many hops.
    Unrestricted(u32),
}

/// One traversal step: the edge, its label as traversed, and where it leads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: EdgeId,
    pub label: DirSymbol,
    pub to: VertexId,
}

/// An explicit path; two paths are equal when their labeled hops are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: VertexId,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> VertexId {
        self.steps.last().map_or(self.start, |s| s.to)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.to))
    }
}

/// Regular expressions normalized up to associativity, commutativity and
/// idempotence of alternation, which keeps the derivative set finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Re {
    Empty,
    Eps,
    Sym(DirSymbol),
    Cat(Box<Re>, Box<Re>),
    Alt(BTreeSet<Re>),
    Star(Box<Re>),
    Repeat(Box<Re>, u32, Option<u32>),
}

fn cat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Empty, _) | (_, Re::Empty) => Re::Empty,
        (Re::Eps, x) | (x, Re::Eps) => x,
        (Re::Cat(x, y), b) => cat(*x, cat(*y, b)),
        (a, b) => Re::Cat(Box::new(a), Box::new(b)),
    }
}

fn alt(xs: impl IntoIterator<Item = Re>) -> Re {
    let mut set = BTreeSet::new();
    for x in xs {
        match x {
            Re::Empty => {}
            Re::Alt(inner) => set.extend(inner),
            x => {
                set.insert(x);
            }
        }
    }
    match set.len() {
        0 => Re::Empty,
        1 => set.into_iter().next().unwrap(),
        _ => Re::Alt(set),
    }
}

fn star(r: Re) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Eps,
        s @ Re::Star(_) => s,
        r => Re::Star(Box::new(r)),
    }
}

fn repeat(r: Re, lo: u32, hi: Option<u32>) -> Re {
    match (r, lo, hi) {
        (_, _, Some(h)) if h < lo => Re::Empty,
        (_, _, Some(0)) => Re::Eps,
        (Re::Empty, 0, _) | (Re::Eps, _, _) => Re::Eps,
        (Re::Empty, _, _) => Re::Empty,
        (r, 0, None) => star(r),
        (r, 1, Some(1)) => r,
        (r, lo, hi) => Re::Repeat(Box::new(r), lo, hi),
    }
}

fn nullable(r: &Re) -> bool {
    match r {
        Re::Empty | Re::Sym(_) => false,
        Re::Eps | Re::Star(_) => true,
        Re::Cat(a, b) => nullable(a) && nullable(b),
        Re::Alt(xs) => xs.iter().any(nullable),
        Re::Repeat(r, lo, _) => *lo == 0 || nullable(r),
    }
}

fn derive(r: &Re, a: DirSymbol) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Empty,
        Re::Sym(x) => {
            if *x == a {
                Re::Eps
            } else {
                Re::Empty
            }
        }
        Re::Cat(x, y) => {
            let left = cat(derive(x, a), (**y).clone());
            if nullable(x) {
                alt([left, derive(y, a)])
            } else {
                left
            }
        }
        Re::Alt(xs) => alt(xs.iter().map(|x| derive(x, a))),
        Re::Star(x) => cat(derive(x, a), star((**x).clone())),
        Re::Repeat(x, lo, hi) => {
            cat(derive(x, a), repeat((**x).clone(), lo.saturating_sub(1), hi.map(|h| h - 1)))
        }
    }
}

fn to_re(d: &Darpe, catalog: &Catalog, graph: Option<&GraphDef>) -> Result<Re, DarpeError> {
    let visible = |name: &str| graph.is_none_or(|g| g.edge_types.contains(name));
    Ok(match d {
        Darpe::Sym { name, adorn } => {
            let et = catalog.edge_type(name).filter(|_| visible(name)).ok_or_else(|| DarpeError::UnknownEdgeType(name.clone()))?;
            let legal = match adorn {
                Adorn::Undirected => !et.directed,
                Adorn::Forward | Adorn::Backward => et.directed,
            };
            if !legal {
                return Err(DarpeError::Adornment { name: name.clone(), directed: et.directed });
            }
            let etype = catalog.edge_type_index(name).unwrap() as u32;
            Re::Sym(DirSymbol { etype, dir: (*adorn).into() })
        }
        Darpe::Wild { adorn } => {
            let mut xs = Vec::new();
            for (i, et) in catalog.edge_types().enumerate().filter(|(_, et)| visible(&et.name)) {
                let etype = i as u32;
                let dirs = match (et.directed, adorn) {
                    (false, None | Some(Adorn::Undirected)) => vec![Dir::Undirected],
                    (true, None) => vec![Dir::Forward, Dir::Backward],
                    (true, Some(Adorn::Forward)) => vec![Dir::Forward],
                    (true, Some(Adorn::Backward)) => vec![Dir::Backward],
                    _ => vec![],
                };
                xs.extend(dirs.into_iter().map(|dir| Re::Sym(DirSymbol { etype, dir })));
            }
            alt(xs)
        }
        Darpe::Concat(xs) => {
            let mut r = Re::Eps;
            for x in xs.iter().rev() {
                r = cat(to_re(x, catalog, graph)?, r);
            }
            r
        }
        Darpe::Alt(xs) => alt(xs.iter().map(|x| to_re(x, catalog, graph)).collect::<Result<Vec<_>, _>>()?),
        Darpe::Star { inner, bounds } => {
            let r = to_re(inner, catalog, graph)?;
            match bounds {
                None => star(r),
                Some(b) => {
                    let (lo, hi) = b.lo_hi();
                    repeat(r, lo, hi)
                }
            }
        }
    })
}

/// Outgoing traversal steps per vertex, built from a scan of the edge list.
fn steps_by_vertex(g: &Graph) -> Vec<Vec<Step>> {
    let mut out = vec![Vec::new(); g.vertex_count()];
    for e in g.edge_ids() {
        let etype = g.edge_type(e);
        if g.edge_directed(e) {
            let (s, t) = g.endpoints(e);
            out[s.index()].push(Step { edge: e, label: DirSymbol { etype, dir: Dir::Forward }, to: t });
            out[t.index()].push(Step { edge: e, label: DirSymbol { etype, dir: Dir::Backward }, to: s });
        } else {
            let mut pairs = g.st(e);
            pairs.dedup();
            for (s, t) in pairs {
                out[s.index()].push(Step { edge: e, label: DirSymbol { etype, dir: Dir::Undirected }, to: t });
            }
        }
    }
    out
}

struct Search<'a> {
    adj: &'a [Vec<Step>],
    target: VertexId,
    legality: Legality,
    /// Product states at their BFS distance, for the shortest mode.
    dist: HashMap<(VertexId, Re), u32>,
    limit: u32,
    path: Vec<Step>,
    used_v: HashSet<VertexId>,
    used_e: HashSet<EdgeId>,
    found: Vec<Vec<Step>>,
}

impl Search<'_> {
    fn dfs(&mut self, v: VertexId, r: &Re) {
        let depth = self.path.len() as u32;
        if v == self.target && nullable(r) {
            let keep = match self.legality {
                Legality::AllShortest => depth == self.limit,
                _ => true,
            };
            if keep {
                self.found.push(self.path.clone());
            }
            if self.legality == Legality::NoRepeatVertex {
                return;
            }
        }
        if depth >= self.limit {
            return;
        }
        for &step in self.adj[v.index()].iter() {
            let next = derive(r, step.label);
            if next == Re::Empty {
                continue;
            }
            match self.legality {
                Legality::NoRepeatVertex if self.used_v.contains(&step.to) => continue,
                Legality::NoRepeatEdge if self.used_e.contains(&step.edge) => continue,
                // A prefix of a shortest path reaches its product state first.
                Legality::AllShortest if self.dist.get(&(step.to, next.clone())) != Some(&(depth + 1)) => continue,
                _ => {}
            }
            self.used_v.insert(step.to);
            self.used_e.insert(step.edge);
            self.path.push(step);
            self.dfs(step.to, &next);
            self.path.pop();
            self.used_e.remove(&step.edge);
            self.used_v.remove(&step.to);
        }
    }
}

/// Every `s`-to-`t` path whose label spells a word of `d`, filtered by
/// `legality`, in sorted order.
pub fn enumerate_legal_paths(
    g: &Graph,
    d: &Darpe,
    graph: Option<&GraphDef>,
    s: VertexId,
    t: VertexId,
    legality: Legality,
) -> Result<Vec<Path>, DarpeError> {
    if g.vertex_count() > ORACLE_VERTEX_LIMIT {
        return Err(DarpeError::OracleGuard { limit: ORACLE_VERTEX_LIMIT, actual: g.vertex_count() });
    }
    let re = to_re(d, g.catalog(), graph)?;
    let adj = steps_by_vertex(g);
    let mut search = Search {
        adj: &adj,
        target: t,
        legality,
        dist: HashMap::new(),
        limit: u32::MAX,
        path: Vec::new(),
        used_v: HashSet::from([s]),
        used_e: HashSet::new(),
        found: Vec::new(),
    };
    match legality {
        Legality::AllShortest => {
            // Plain BFS over (vertex, derivative) for the minimum length.
            let mut dist = HashMap::from([((s, re.clone()), 0u32)]);
            let mut frontier = vec![(s, re.clone())];
            let mut depth = 0;
            let mut best = None;
            while !frontier.is_empty() && best.is_none() {
                if frontier.iter().any(|(v, r)| *v == t && nullable(r)) {
                    best = Some(depth);
                    break;
                }
                let mut next = Vec::new();
                for (v, r) in &frontier {
                    for step in &adj[v.index()] {
                        let r2 = derive(r, step.label);
                        if r2 != Re::Empty && !dist.contains_key(&(step.to, r2.clone())) {
                            dist.insert((step.to, r2.clone()), depth + 1);
                            next.push((step.to, r2));
                        }
                    }
                }
                frontier = next;
                depth += 1;
            }
            let Some(best) = best else { return Ok(Vec::new()) };
            search.dist = dist;
            search.limit = best;
        }
        Legality::Unrestricted(cap) => search.limit = cap,
        Legality::NoRepeatVertex | Legality::NoRepeatEdge => {}
    }
    search.dfs(s, &re);
    let mut paths: Vec<Path> = search.found.into_iter().map(|steps| Path { start: s, steps }).collect();
    paths.sort();
    paths.dedup();
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(e: u32, dir: Dir) -> DirSymbol {
        DirSymbol { etype: e, dir }
    }

    fn matches(r: &Re, word: &[DirSymbol]) -> bool {
        nullable(&word.iter().fold(r.clone(), |r, &a| derive(&r, a)))
    }

    #[test]
    fn bounded_repeat_derivatives() {
        let a = sym(0, Dir::Forward);
        let r = repeat(Re::Sym(a), 2, Some(3));
        let lens: Vec<usize> = (0..6).filter(|&n| matches(&r, &vec![a; n])).collect();
        assert_eq!(lens, [2, 3]);
        let r = repeat(Re::Sym(a), 2, None);
        assert!(!matches(&r, &[a]) && matches(&r, &[a; 5]));
    }

    #[test]
    fn alternation_is_normalized() {
        let a = Re::Sym(sym(0, Dir::Forward));
        let b = Re::Sym(sym(1, Dir::Forward));
        assert_eq!(alt([a.clone(), b.clone(), a.clone()]), alt([b, a]));
    }
}
