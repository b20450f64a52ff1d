//! Instance sets, prefix state vectors and the avoidance-detection automaton.
//!
//! A word over `[k]` contains `v` iff it contains some instance of `v` over
//! `[k]` (a length-`ℓ` word with exactly one occurrence of `v`) as a
//! subsequence. The automaton tracks, for every instance, the longest prefix
//! matched greedily so far. Once any instance is matched in full the walk is
//! absorbed; all such states are collapsed into a single sink.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::word::{letters_to_string, Letter, Pattern, Word};

/// Default cap on the number of live states.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

/// All instances of a pattern over `[k]`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSet {
    pattern: Pattern,
    k: u32,
    instances: Vec<Vec<Letter>>,
}

/// Per-instance matched prefix lengths, in instance order.
///
/// The prefix of instance `u` is `u[..len]`, so the length vector is the
/// whole state identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StateVector(Vec<u16>);

impl StateVector {
    pub fn lengths(&self) -> &[u16] {
        &self.0
    }

    /// Sum of the prefix lengths; strictly increases along advancing edges.
    pub fn total_length(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }
}

pub fn instances(v: &Pattern, k: u32) -> InstanceSet {
    InstanceSet::new(v, k)
}

/// `ε, u_1, u_1u_2, …, u` in order of length.
pub fn prefix_set(u: &[Letter]) -> Vec<&[Letter]> {
    (0..=u.len()).map(|i| &u[..i]).collect()
}

impl InstanceSet {
    /// One instance per `d`-subset of `[k]`; empty when `k < d`.
    pub fn new(v: &Pattern, k: u32) -> Self {
        let d = v.distinct() as usize;
        let mut instances = Vec::new();
        if d <= k as usize {
            let mut subset: Vec<Letter> = (1..=d as Letter).collect();
            loop {
                instances.push(v.letters().iter().map(|&c| subset[c as usize - 1]).collect());
                // advance to the next d-subset of [k] in lexicographic order
                match (0..d).rev().find(|&i| subset[i] < k - (d - 1 - i) as Letter) {
                    None => break,
                    Some(i) => {
                        subset[i] += 1;
                        for j in i + 1..d {
                            subset[j] = subset[j - 1] + 1;
                        }
                    }
                }
            }
        }
        instances.sort();
        InstanceSet {
            pattern: v.clone(),
            k,
            instances,
        }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn instances(&self) -> &[Vec<Letter>] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// The all-empty state `ξ^ε`.
    pub fn start(&self) -> StateVector {
        StateVector(alloc::vec![0; self.instances.len()])
    }

    fn check_letter(&self, letter: Letter) -> Result<()> {
        if letter == 0 || letter > self.k {
            return Err(Error::LetterOutOfRange { letter, k: self.k });
        }
        Ok(())
    }

    /// Appends `letter` to every prefix it extends and leaves the rest.
    pub fn extend(&self, state: &StateVector, letter: Letter) -> Result<StateVector> {
        self.check_letter(letter)?;
        Ok(self.extend_unchecked(state, letter))
    }

    fn extend_unchecked(&self, state: &StateVector, letter: Letter) -> StateVector {
        let l = self.pattern.len();
        StateVector(
            state
                .0
                .iter()
                .zip(&self.instances)
                .map(|(&len, u)| {
                    if (len as usize) < l && u[len as usize] == letter {
                        len + 1
                    } else {
                        len
                    }
                })
                .collect(),
        )
    }

    /// Letters that change the state (including those that absorb it).
    pub fn advancing_letters(&self, state: &StateVector) -> Vec<Letter> {
        let l = self.pattern.len();
        let mut out: Vec<Letter> = state
            .0
            .iter()
            .zip(&self.instances)
            .filter(|(&len, _)| (len as usize) < l)
            .map(|(&len, u)| u[len as usize])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Some instance is matched in full.
    pub fn is_absorbing(&self, state: &StateVector) -> bool {
        let l = self.pattern.len() as u16;
        state.0.contains(&l)
    }

    pub fn prefix(&self, state: &StateVector, instance: usize) -> &[Letter] {
        &self.instances[instance][..state.0[instance] as usize]
    }

    /// `(p_1,…,p_m)` with `epsilon` standing for empty prefixes. Prefix
    /// letters are written as digits for `k ≤ 9`, dot-separated otherwise.
    pub fn label(&self, state: &StateVector, epsilon: &str) -> String {
        let mut s = String::from("(");
        for i in 0..self.instances.len() {
            if i > 0 {
                s.push(',');
            }
            let p = self.prefix(state, i);
            if p.is_empty() {
                s.push_str(epsilon);
            } else if self.k <= 9 {
                s.push_str(&letters_to_string(p));
            } else {
                for (j, x) in p.iter().enumerate() {
                    if j > 0 {
                        s.push('.');
                    }
                    let _ = write!(s, "{x}");
                }
            }
        }
        s.push(')');
        s
    }
}

/// The reachable live states with their per-letter transitions.
///
/// Live states are numbered in a topological order of the advancing edges
/// (Kahn layers from `ξ^ε`, ties broken by the prefix-length vector), so the
/// letter-count matrix restricted to live states is upper triangular. The
/// sink has index `live_count()`.
#[derive(Clone, Debug)]
pub struct AutomatonGraph {
    instances: InstanceSet,
    states: Vec<StateVector>,
    next: Vec<u32>,
    advancing: Vec<Vec<Letter>>,
    depth: usize,
}

pub fn build_automaton(v: &Pattern, k: u32) -> Result<AutomatonGraph> {
    AutomatonGraph::build(v, k)
}

pub fn max_chain(g: &AutomatonGraph) -> usize {
    g.depth()
}

pub fn detect_avoidance(g: &AutomatonGraph, w: &Word) -> Result<bool> {
    g.detect_avoidance(w)
}

pub fn export_dot(g: &AutomatonGraph, include_sink: bool) -> String {
    g.to_dot(include_sink)
}

impl AutomatonGraph {
    pub fn build(v: &Pattern, k: u32) -> Result<Self> {
        Self::build_with_limit(v, k, DEFAULT_STATE_LIMIT)
    }

    pub fn build_with_limit(v: &Pattern, k: u32, limit: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("alphabet size must be at least 1".into()));
        }
        let inst = InstanceSet::new(v, k);
        let ku = k as usize;
        const SINK: u32 = u32::MAX;

        // breadth-first closure from the start state
        let mut ids: BTreeMap<StateVector, u32> = BTreeMap::new();
        let mut found: Vec<StateVector> = Vec::new();
        let mut next: Vec<u32> = Vec::new();
        let start = inst.start();
        ids.insert(start.clone(), 0);
        found.push(start);
        let mut head = 0;
        while head < found.len() {
            let cur = found[head].clone();
            for letter in 1..=k {
                let succ = inst.extend_unchecked(&cur, letter);
                let id = if inst.is_absorbing(&succ) {
                    SINK
                } else if let Some(&id) = ids.get(&succ) {
                    id
                } else {
                    if found.len() >= limit {
                        return Err(Error::StateLimit { limit });
                    }
                    let id = found.len() as u32;
                    ids.insert(succ.clone(), id);
                    found.push(succ);
                    id
                };
                next.push(id);
            }
            head += 1;
        }
        drop(ids);

        let n = found.len();
        let mut indegree = alloc::vec![0usize; n];
        for s in 0..n {
            for &t in &next[s * ku..(s + 1) * ku] {
                if t != SINK && t as usize != s {
                    indegree[t as usize] += 1;
                }
            }
        }
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut layer: Vec<usize> = (0..n).filter(|&s| indegree[s] == 0).collect();
        while !layer.is_empty() {
            layer.sort_by(|&a, &b| found[a].cmp(&found[b]));
            let mut following = Vec::new();
            for &s in &layer {
                for &t in &next[s * ku..(s + 1) * ku] {
                    if t != SINK && t as usize != s {
                        indegree[t as usize] -= 1;
                        if indegree[t as usize] == 0 {
                            following.push(t as usize);
                        }
                    }
                }
            }
            order.extend_from_slice(&layer);
            layer = following;
        }
        debug_assert_eq!(order.len(), n, "advancing edges must be acyclic");

        let mut rank = alloc::vec![0u32; n];
        for (pos, &s) in order.iter().enumerate() {
            rank[s] = pos as u32;
        }
        let sink = n as u32;
        let mut states = Vec::with_capacity(n);
        let mut remapped = Vec::with_capacity(n * ku);
        let mut advancing = Vec::with_capacity(n);
        for &s in &order {
            for &t in &next[s * ku..(s + 1) * ku] {
                remapped.push(if t == SINK { sink } else { rank[t as usize] });
            }
            advancing.push(inst.advancing_letters(&found[s]));
            states.push(core::mem::take(&mut found[s]));
        }

        let mut chain = alloc::vec![1usize; n];
        for s in 0..n {
            for &t in &remapped[s * ku..(s + 1) * ku] {
                if t != sink && t as usize != s {
                    chain[t as usize] = chain[t as usize].max(chain[s] + 1);
                }
            }
        }
        let depth = chain.iter().copied().max().unwrap_or(0);

        Ok(AutomatonGraph {
            instances: inst,
            states,
            next: remapped,
            advancing,
            depth,
        })
    }

    pub fn pattern(&self) -> &Pattern {
        self.instances.pattern()
    }

    pub fn k(&self) -> u32 {
        self.instances.k()
    }

    pub fn instances(&self) -> &InstanceSet {
        &self.instances
    }

    pub fn live_count(&self) -> usize {
        self.states.len()
    }

    /// Index of the absorbing sink.
    pub fn sink(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, idx: usize) -> &StateVector {
        &self.states[idx]
    }

    /// Successor of live state `idx` under `letter` (the sink maps to itself).
    pub fn next(&self, idx: usize, letter: Letter) -> usize {
        if idx == self.sink() {
            return idx;
        }
        let k = self.k() as usize;
        self.next[idx * k + letter as usize - 1] as usize
    }

    /// Successors of `idx` for letters `1..=k`.
    pub fn successors(&self, idx: usize) -> &[u32] {
        let k = self.k() as usize;
        &self.next[idx * k..(idx + 1) * k]
    }

    pub fn advancing(&self, idx: usize) -> &[Letter] {
        &self.advancing[idx]
    }

    /// Size of the longest chain of live states.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Smallest advancing-letter count over live states.
    pub fn min_advancing(&self) -> usize {
        self.advancing.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Advancing edges between live states as `(from, letter, to)`.
    pub fn live_edges(&self) -> impl Iterator<Item = (usize, Letter, usize)> + '_ {
        (0..self.live_count()).flat_map(move |s| {
            self.successors(s)
                .iter()
                .enumerate()
                .filter(move |&(_, &t)| t as usize != s && (t as usize) < self.sink())
                .map(move |(i, &t)| (s, i as Letter + 1, t as usize))
        })
    }

    /// Final state index after reading `w` from `ξ^ε`.
    pub fn run(&self, w: &Word) -> Result<usize> {
        let mut s = 0;
        for &x in w.letters() {
            self.instances.check_letter(x)?;
            s = self.next(s, x);
        }
        Ok(s)
    }

    pub fn detect_avoidance(&self, w: &Word) -> Result<bool> {
        Ok(self.run(w)? != self.sink())
    }

    /// Graphviz rendering of the live states and advancing edges.
    pub fn to_dot(&self, include_sink: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph automaton {{");
        let _ = writeln!(s, "  label=\"pattern {} over [{}]\";", self.pattern(), self.k());
        let _ = writeln!(s, "  rankdir=LR;");
        let _ = writeln!(s, "  node [shape=box];");
        for (i, st) in self.states.iter().enumerate() {
            let _ = writeln!(s, "  s{i} [label=\"{}\"];", self.instances.label(st, "e"));
        }
        for (from, letter, to) in self.live_edges() {
            let _ = writeln!(s, "  s{from} -> s{to} [label=\"{letter}\"];");
        }
        if include_sink && !self.instances.is_empty() {
            let _ = writeln!(s, "  sink [label=\"absorbed\", shape=doublecircle];");
            for st in 0..self.live_count() {
                let letters: Vec<String> = self
                    .successors(st)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &t)| t as usize == self.sink())
                    .map(|(i, _)| alloc::format!("{}", i + 1))
                    .collect();
                if !letters.is_empty() {
                    let _ = writeln!(s, "  s{st} -> sink [label=\"{}\"];", letters.join(","));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}
