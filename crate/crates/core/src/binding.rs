//! Binding tables: bags of variable bindings with multiplicities.

use std::collections::HashMap;

use crate::value::Value;

/// Row-major bag of bindings. Every row binds exactly `vars`; multiplicities
/// are positive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BindingTable {
    pub vars: Vec<String>,
    data: Vec<Value>,
    mults: Vec<u64>,
}

impl BindingTable {
    pub fn new(vars: Vec<String>) -> Self {
        BindingTable { vars, data: Vec::new(), mults: Vec::new() }
    }

    /// The table holding one empty binding: the identity of `join`.
    pub fn unit() -> Self {
        BindingTable { vars: Vec::new(), data: Vec::new(), mults: vec![1] }
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.mults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn row(&self, i: usize) -> &[Value] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn multiplicity(&self, i: usize) -> u64 {
        self.mults[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[Value], u64)> + '_ {
        (0..self.len()).map(move |i| (self.row(i), self.mults[i]))
    }

    /// Sum of multiplicities, saturating.
    pub fn total(&self) -> u64 {
        self.mults.iter().fold(0u64, |a, &m| a.saturating_add(m))
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = Value>, mult: u64) {
        debug_assert!(mult > 0);
        let before = self.data.len();
        self.data.extend(row);
        debug_assert_eq!(self.data.len() - before, self.width());
        self.mults.push(mult);
    }

    pub fn reserve(&mut self, rows: usize) {
        self.data.reserve(rows * self.width());
        self.mults.reserve(rows);
    }

    /// Appends all rows of `other`, which must have the same variables.
    pub fn extend(&mut self, other: BindingTable) {
        debug_assert_eq!(self.vars, other.vars);
        self.data.extend(other.data);
        self.mults.extend(other.mults);
    }

    /// Keeps the rows for which `keep` holds, preserving order.
    pub fn retain_rows(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let w = self.width();
        let mut data = Vec::with_capacity(self.data.len());
        let mut mults = Vec::with_capacity(self.mults.len());
        for i in 0..self.len() {
            if keep(i) {
                data.extend_from_slice(&self.data[i * w..(i + 1) * w]);
                mults.push(self.mults[i]);
            }
        }
        self.data = data;
        self.mults = mults;
    }

    /// Natural join on shared variables; multiplicities multiply. Output
    /// order is left-major, then right rows in their order.
    pub fn join(&self, right: &BindingTable) -> BindingTable {
        let shared: Vec<(usize, usize)> = self
            .vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| right.var_index(v).map(|j| (i, j)))
            .collect();
        let right_only: Vec<usize> = (0..right.width()).filter(|j| !shared.iter().any(|&(_, s)| s == *j)).collect();
        let mut vars = self.vars.clone();
        vars.extend(right_only.iter().map(|&j| right.vars[j].clone()));
        let mut out = BindingTable::new(vars);
        let mut index: HashMap<Vec<&Value>, Vec<usize>> = HashMap::new();
        for j in 0..right.len() {
            let key = shared.iter().map(|&(_, s)| &right.row(j)[s]).collect();
            index.entry(key).or_default().push(j);
        }
        for i in 0..self.len() {
            let l = self.row(i);
            let key: Vec<&Value> = shared.iter().map(|&(s, _)| &l[s]).collect();
            let Some(matches) = index.get(&key) else { continue };
            for &j in matches {
                let r = right.row(j);
                let row = l.iter().cloned().chain(right_only.iter().map(|&k| r[k].clone()));
                out.push(row, self.mults[i].saturating_mul(right.mults[j]));
            }
        }
        out
    }

    /// Merges identical rows, summing multiplicities; first occurrence order.
    pub fn consolidate(&self) -> BindingTable {
        let mut index: HashMap<&[Value], usize> = HashMap::new();
        let mut order: Vec<(usize, u64)> = Vec::new();
        for i in 0..self.len() {
            match index.get(self.row(i)) {
                Some(&k) => order[k].1 = order[k].1.saturating_add(self.mults[i]),
                None => {
                    index.insert(self.row(i), order.len());
                    order.push((i, self.mults[i]));
                }
            }
        }
        let mut out = BindingTable::new(self.vars.clone());
        for (i, m) in order {
            out.push(self.row(i).iter().cloned(), m);
        }
        out
    }
}
