//! Inverse word graphs, folding, rooted isomorphisms and DOT output.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::word::Letter;

pub type Vertex = usize;

/// A labelled digraph whose edge set is closed under `(u, x, v) ↦ (v, x⁻¹, u)`.
///
/// Vertex ids are dense. Nothing here forces determinism; [`fold`](Self::fold)
/// produces the least deterministic quotient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InverseWordGraph {
    adj: Vec<BTreeMap<Letter, BTreeSet<Vertex>>>,
}

/// Smallest-id union-find used by folding.
struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn new(n: usize) -> Self {
        Classes { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }
}

impl InverseWordGraph {
    pub fn with_vertices(n: usize) -> Self {
        InverseWordGraph { adj: vec![BTreeMap::new(); n] }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.adj.len()
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(BTreeMap::new());
        self.adj.len() - 1
    }

    /// Inserts `(u, l, v)` and its inverse. Returns false if already present.
    pub fn add_edge(&mut self, u: Vertex, l: Letter, v: Vertex) -> bool {
        let fresh = self.adj[u].entry(l).or_default().insert(v);
        self.adj[v].entry(l.inv()).or_default().insert(u);
        fresh
    }

    /// Adds a fresh path spelling `w` from `u` to `v`.
    pub fn add_path(&mut self, u: Vertex, w: &[Letter], v: Vertex) {
        let mut cur = u;
        for (i, &l) in w.iter().enumerate() {
            let next = if i + 1 == w.len() { v } else { self.add_vertex() };
            self.add_edge(cur, l, next);
            cur = next;
        }
    }

    pub fn out(&self, u: Vertex) -> &BTreeMap<Letter, BTreeSet<Vertex>> {
        &self.adj[u]
    }

    /// All directed edges `(u, l, v)`, both orientations, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Letter, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, m)| m.iter().flat_map(move |(&l, vs)| vs.iter().map(move |&v| (u, l, v))))
    }

    /// Edges with a positive label, one per involutive pair.
    pub fn positive_edges(&self) -> impl Iterator<Item = (Vertex, Letter, Vertex)> + '_ {
        self.edges().filter(|(_, l, _)| !l.inverse)
    }

    pub fn num_edges(&self) -> usize {
        self.positive_edges().count()
    }

    /// Unique successor along `l`, if the graph is deterministic at `u`.
    pub fn step(&self, u: Vertex, l: Letter) -> Option<Vertex> {
        self.adj[u].get(&l).and_then(|s| s.iter().next().copied())
    }

    /// Reads `w` from `u` following first successors.
    pub fn read(&self, u: Vertex, w: &[Letter]) -> Option<Vertex> {
        w.iter().try_fold(u, |cur, &l| self.step(cur, l))
    }

    pub fn is_deterministic(&self) -> bool {
        self.adj.iter().all(|m| m.values().all(|s| s.len() <= 1))
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        self.reachable(0).len() == self.adj.len()
    }

    pub fn reachable(&self, from: Vertex) -> BTreeSet<Vertex> {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for vs in self.adj[u].values() {
                for &v in vs {
                    if seen.insert(v) {
                        queue.push_back(v);
                    }
                }
            }
        }
        seen
    }

    /// Colours of the edges at `v`.
    pub fn colors_at(&self, v: Vertex) -> BTreeSet<u8> {
        self.adj[v].keys().map(|l| l.color).collect()
    }

    /// The least deterministic quotient and the projection `old → new`.
    pub fn fold(&self) -> (InverseWordGraph, Vec<Vertex>) {
        self.fold_identifying(&[])
    }

    /// Identifies each pair, then folds. Class representatives are the
    /// smallest old ids and new ids follow their order.
    pub fn fold_identifying(&self, pairs: &[(Vertex, Vertex)]) -> (InverseWordGraph, Vec<Vertex>) {
        let n = self.adj.len();
        let mut classes = Classes::new(n);
        let mut out: Vec<BTreeMap<Letter, Vertex>> = vec![BTreeMap::new(); n];
        let mut pending: Vec<(Vertex, Vertex)> = pairs.to_vec();
        for (u, l, v) in self.edges() {
            match out[u].get(&l) {
                Some(&t) if t != v => pending.push((t, v)),
                Some(_) => {}
                None => {
                    out[u].insert(l, v);
                }
            }
        }
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (classes.find(a), classes.find(b));
            if ra == rb {
                continue;
            }
            let (keep, gone) = (ra.min(rb), ra.max(rb));
            classes.parent[gone] = keep;
            let moved = std::mem::take(&mut out[gone]);
            for (l, t) in moved {
                match out[keep].get(&l) {
                    Some(&t2) => pending.push((t2, t)),
                    None => {
                        out[keep].insert(l, t);
                    }
                }
            }
        }
        let mut map = vec![0; n];
        let mut next_id = 0;
        let mut root_id = vec![usize::MAX; n];
        for v in 0..n {
            let r = classes.find(v);
            if root_id[r] == usize::MAX {
                root_id[r] = next_id;
                next_id += 1;
            }
            map[v] = root_id[r];
        }
        let mut g = InverseWordGraph::with_vertices(next_id);
        for v in 0..n {
            if classes.find(v) != v {
                continue;
            }
            for (&l, &t) in &out[v] {
                g.adj[map[v]].entry(l).or_default().insert(map[t]);
            }
        }
        (g, map)
    }

    /// Subgraph on `keep` using only edges whose labels pass `label_ok`.
    /// Returns the subgraph and the new id of each kept vertex.
    pub fn subgraph(
        &self,
        keep: &BTreeSet<Vertex>,
        label_ok: impl Fn(Letter) -> bool,
    ) -> (InverseWordGraph, BTreeMap<Vertex, Vertex>) {
        let ids: BTreeMap<Vertex, Vertex> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut g = InverseWordGraph::with_vertices(ids.len());
        for (&v, &i) in &ids {
            for (&l, ts) in &self.adj[v] {
                if !label_ok(l) {
                    continue;
                }
                for t in ts {
                    if let Some(&j) = ids.get(t) {
                        g.adj[i].entry(l).or_default().insert(j);
                    }
                }
            }
        }
        (g, ids)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.num_vertices()`.
    pub fn append(&mut self, other: &InverseWordGraph) -> Vertex {
        let offset = self.adj.len();
        for m in &other.adj {
            self.adj.push(
                m.iter()
                    .map(|(&l, ts)| (l, ts.iter().map(|t| t + offset).collect()))
                    .collect(),
            );
        }
        offset
    }

    /// Relabels letters, e.g. to recolour a graph.
    pub fn map_letters(&self, f: impl Fn(Letter) -> Letter) -> InverseWordGraph {
        InverseWordGraph {
            adj: self
                .adj
                .iter()
                .map(|m| m.iter().map(|(&l, ts)| (f(l), ts.clone())).collect())
                .collect(),
        }
    }

    /// Graphviz rendering of positive edges. Colour 1 is drawn blue, colour 2 red.
    pub fn to_dot(
        &self,
        name: &str,
        label: impl Fn(Letter) -> String,
        marks: &[(Vertex, &str)],
    ) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", name.replace('"', "'"));
        let _ = writeln!(s, "  node [shape=circle];");
        for v in self.vertices() {
            let extra: Vec<&str> = marks.iter().filter(|(m, _)| *m == v).map(|(_, t)| *t).collect();
            if extra.is_empty() {
                let _ = writeln!(s, "  {v};");
            } else {
                let _ = writeln!(s, "  {v} [xlabel=\"{}\"];", extra.join(","));
            }
        }
        for (u, l, v) in self.positive_edges() {
            let color = if l.color == 1 { "blue" } else { "red" };
            let _ = writeln!(s, "  {u} -> {v} [label=\"{}\", color={color}];", label(l));
        }
        s.push_str("}\n");
        s
    }
}

/// A graph with distinguished initial and final vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedAutomaton {
    pub graph: InverseWordGraph,
    pub initial: Vertex,
    pub terminal: Vertex,
}

impl PointedAutomaton {
    /// The path automaton of `w`; vertex `k` is reached after `k` letters.
    pub fn linear(w: &[Letter]) -> Self {
        let mut graph = InverseWordGraph::with_vertices(w.len() + 1);
        for (k, &l) in w.iter().enumerate() {
            graph.add_edge(k, l, k + 1);
        }
        PointedAutomaton { graph, initial: 0, terminal: w.len() }
    }

    /// Folds and carries both marked vertices through the projection.
    pub fn fold(&self) -> (PointedAutomaton, Vec<Vertex>) {
        let (graph, map) = self.graph.fold();
        (PointedAutomaton { graph, initial: map[self.initial], terminal: map[self.terminal] }, map)
    }

    pub fn accepts(&self, w: &[Letter]) -> bool {
        self.graph.read(self.initial, w) == Some(self.terminal)
    }
}

/// Summary used in JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct GraphDump {
    pub vertices: usize,
    pub edges: Vec<(Vertex, String, Vertex)>,
}

impl GraphDump {
    pub fn new(g: &InverseWordGraph, label: impl Fn(Letter) -> String) -> Self {
        GraphDump {
            vertices: g.num_vertices(),
            edges: g.positive_edges().map(|(u, l, v)| (u, label(l), v)).collect(),
        }
    }
}

/// Label-preserving map `g1 → g2` with `v1 ↦ v2`, following edges of `g1`
/// from `v1`. Vertices of `g1` unreachable from `v1` map to `usize::MAX`.
/// Both graphs must be deterministic.
pub fn rooted_hom(
    g1: &InverseWordGraph,
    v1: Vertex,
    g2: &InverseWordGraph,
    v2: Vertex,
) -> Option<Vec<Vertex>> {
    let mut map = vec![usize::MAX; g1.num_vertices()];
    map[v1] = v2;
    let mut queue = VecDeque::from([v1]);
    while let Some(u) = queue.pop_front() {
        for (&l, ts) in g1.out(u) {
            let t = *ts.iter().next()?;
            let image = g2.step(map[u], l)?;
            if map[t] == usize::MAX {
                map[t] = image;
                queue.push_back(t);
            } else if map[t] != image {
                return None;
            }
        }
    }
    Some(map)
}

/// The label-preserving isomorphism with `v1 ↦ v2`, when one exists.
/// Both graphs must be deterministic and connected.
pub fn rooted_iso(
    g1: &InverseWordGraph,
    v1: Vertex,
    g2: &InverseWordGraph,
    v2: Vertex,
) -> Option<Vec<Vertex>> {
    if g1.num_vertices() != g2.num_vertices() {
        return None;
    }
    let map = rooted_hom(g1, v1, g2, v2)?;
    let mut hit = vec![false; g2.num_vertices()];
    for (u, &m) in map.iter().enumerate() {
        if m == usize::MAX || hit[m] {
            return None;
        }
        hit[m] = true;
        let labels1: Vec<&Letter> = g1.out(u).keys().collect();
        let labels2: Vec<&Letter> = g2.out(m).keys().collect();
        if labels1 != labels2 {
            return None;
        }
    }
    Some(map)
}

/// All automorphisms of a finite deterministic connected graph, as vertex
/// permutations, ordered by the image of `base`.
pub fn automorphisms(g: &InverseWordGraph, base: Vertex) -> Vec<Vec<Vertex>> {
    g.vertices().filter_map(|v| rooted_iso(g, base, g, v)).collect()
}

/// `p` then `q`.
pub fn compose(p: &[Vertex], q: &[Vertex]) -> Vec<Vertex> {
    p.iter().map(|&x| q[x]).collect()
}
