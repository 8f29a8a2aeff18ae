//! Lobe decompositions, the opuntoid axioms, the core automaton, bud
//! expansion and the word problem of the amalgamated free product.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::fis::Elem;
use crate::graph::{compose, rooted_hom, GraphDump, InverseWordGraph, PointedAutomaton, Vertex};
use crate::stephen::{expand_at, expand_once, schutz_graph_of, DEFAULT_MAX_EDGES};
use crate::word::{Letter, Word};

pub const DEFAULT_MAX_LOBES: usize = 10_000;

/// Guards that turn runaway expansions into [`Error::EdgeBudget`] / [`Error::LobeBudget`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_edges: usize,
    pub max_lobes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_edges: DEFAULT_MAX_EDGES, max_lobes: DEFAULT_MAX_LOBES }
    }
}

/// A maximal monochromatic connected subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lobe {
    pub color: u8,
    pub vertices: BTreeSet<Vertex>,
}

impl Lobe {
    /// Stable identity across bud expansions: old vertex ids never move.
    pub fn key(&self) -> (u8, Vertex) {
        (self.color, *self.vertices.iter().next().expect("lobes are nonempty"))
    }
}

/// A word graph over `X1 ⊔ X2` split into lobes.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub automaton: PointedAutomaton,
    /// Ordered by `(min vertex, colour)`.
    pub lobes: Vec<Lobe>,
    /// Lobes containing each vertex; at most one per colour.
    pub vertex_lobes: Vec<Vec<usize>>,
    /// Lobe adjacency: lobes sharing at least one vertex.
    pub tree: Vec<BTreeSet<usize>>,
    pub intersections: BTreeSet<Vertex>,
    pub buds: BTreeSet<Vertex>,
    /// A cycle of lobes when the lobe graph is not a tree.
    pub cycle: Option<Vec<usize>>,
    core_keys: BTreeSet<(u8, Vertex)>,
}

/// Vertices `y` with `(v, u, y)` a path of colour `color`.
pub fn u_path_target(a: &Amalgam, g: &InverseWordGraph, v: Vertex, u: Elem, color: u8) -> Option<Vertex> {
    g.read(v, &a.u_word(u, color))
}

/// `L_U(v, Δ)` for the lobe of colour `color` at `v`.
pub fn loop_set(a: &Amalgam, g: &InverseWordGraph, v: Vertex, color: u8) -> Vec<Elem> {
    a.u().elements().filter(|&u| u_path_target(a, g, v, u, color) == Some(v)).collect()
}

/// `e_i(v)`: the meet of the idempotents of `S_i` labelling loops at `v`.
pub fn min_loop_idempotent(a: &Amalgam, g: &InverseWordGraph, v: Vertex, color: u8) -> Result<Elem> {
    let s = a.factor(color);
    s.idempotents()
        .into_iter()
        .filter(|&e| g.read(v, &s.canonical_word(e, color)) == Some(v))
        .reduce(|x, y| s.meet(x, y))
        .ok_or(Error::LobeNotClosed(v))
}

/// `f(e_i(v))`: the least idempotent of `L_U(v, Δ)`, absent when the set is empty.
pub fn min_u_idempotent(a: &Amalgam, g: &InverseWordGraph, v: Vertex, color: u8) -> Option<Elem> {
    let u = a.u();
    loop_set(a, g, v, color)
        .into_iter()
        .filter(|&x| u.is_idempotent(x))
        .reduce(|x, y| u.meet(x, y))
}

/// `N(x, Λ)`: endpoints of paths from `x` labelled by elements of `lset`.
pub fn net(a: &Amalgam, lam: &InverseWordGraph, x: Vertex, lset: &[Elem], color: u8) -> BTreeSet<Vertex> {
    lset.iter().filter_map(|&u| u_path_target(a, lam, x, u, color)).collect()
}

fn find_cycle(tree: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let n = tree.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &tree[x] {
                if y == parent[x] {
                    continue;
                }
                if seen[y] {
                    // walk both ends up to their common ancestor
                    let path_to_root = |mut z: usize| {
                        let mut p = vec![z];
                        while parent[z] != usize::MAX {
                            z = parent[z];
                            p.push(z);
                        }
                        p
                    };
                    let px = path_to_root(x);
                    let py = path_to_root(y);
                    let common = *px.iter().find(|z| py.contains(z))?;
                    let mut cycle: Vec<usize> = px.iter().copied().take_while(|&z| z != common).collect();
                    cycle.push(common);
                    let tail: Vec<usize> = py.iter().copied().take_while(|&z| z != common).collect();
                    cycle.extend(tail.into_iter().rev());
                    return Some(cycle);
                }
                seen[y] = true;
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    None
}

impl Decomposition {
    /// Splits `automaton` into lobes; never fails, a cyclic lobe graph is recorded in `cycle`.
    pub fn build(a: &Amalgam, automaton: PointedAutomaton, core_keys: Option<BTreeSet<(u8, Vertex)>>) -> Self {
        let g = &automaton.graph;
        let n = g.num_vertices();
        let mut lobes: Vec<Lobe> = Vec::new();
        for color in [1u8, 2] {
            let mut seen = vec![false; n];
            for v in g.vertices() {
                if seen[v] || !g.colors_at(v).contains(&color) {
                    continue;
                }
                let mut vertices = BTreeSet::from([v]);
                let mut queue = VecDeque::from([v]);
                seen[v] = true;
                while let Some(x) = queue.pop_front() {
                    for (l, ts) in g.out(x) {
                        if l.color != color {
                            continue;
                        }
                        for &t in ts {
                            if !seen[t] {
                                seen[t] = true;
                                vertices.insert(t);
                                queue.push_back(t);
                            }
                        }
                    }
                }
                lobes.push(Lobe { color, vertices });
            }
        }
        lobes.sort_by_key(|l| (l.key().1, l.color));
        let mut vertex_lobes = vec![Vec::new(); n];
        for (k, lobe) in lobes.iter().enumerate() {
            for &v in &lobe.vertices {
                vertex_lobes[v].push(k);
            }
        }
        let mut tree = vec![BTreeSet::new(); lobes.len()];
        let mut intersections = BTreeSet::new();
        for (v, ls) in vertex_lobes.iter().enumerate() {
            if ls.len() >= 2 {
                intersections.insert(v);
                for &x in ls {
                    for &y in ls {
                        if x != y {
                            tree[x].insert(y);
                        }
                    }
                }
            }
        }
        let cycle = find_cycle(&tree);
        let buds = g
            .vertices()
            .filter(|&v| vertex_lobes[v].len() == 1)
            .filter(|&v| !loop_set(a, g, v, lobes[vertex_lobes[v][0]].color).is_empty())
            .collect();
        let core_keys = core_keys.unwrap_or_else(|| lobes.iter().map(Lobe::key).collect());
        Decomposition { automaton, lobes, vertex_lobes, tree, intersections, buds, cycle, core_keys }
    }

    pub fn graph(&self) -> &InverseWordGraph {
        &self.automaton.graph
    }

    pub fn num_lobes(&self) -> usize {
        self.lobes.len()
    }

    /// The lobe of colour `color` through `v`.
    pub fn lobe_at(&self, v: Vertex, color: u8) -> Option<usize> {
        self.vertex_lobes[v].iter().copied().find(|&k| self.lobes[k].color == color)
    }

    /// The lobe as a standalone graph and the local id of each of its vertices.
    pub fn lobe_graph(&self, k: usize) -> (InverseWordGraph, BTreeMap<Vertex, Vertex>) {
        let color = self.lobes[k].color;
        self.graph().subgraph(&self.lobes[k].vertices, |l| l.color == color)
    }

    pub fn is_core_lobe(&self, k: usize) -> bool {
        self.core_keys.contains(&self.lobes[k].key())
    }

    /// Lobe-tree distance from the nearest core lobe.
    pub fn lobe_distances(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.lobes.len()];
        let mut queue = VecDeque::new();
        for k in 0..self.lobes.len() {
            if self.is_core_lobe(k) {
                dist[k] = 0;
                queue.push_back(k);
            }
        }
        while let Some(k) = queue.pop_front() {
            for &m in &self.tree[k] {
                if dist[m] == usize::MAX {
                    dist[m] = dist[k] + 1;
                    queue.push_back(m);
                }
            }
        }
        dist
    }

    /// The unique lobe path between two lobes of the tree.
    pub fn lobe_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.lobes.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(k) = queue.pop_front() {
            for &m in &self.tree[k] {
                if prev[m] == usize::MAX {
                    prev[m] = k;
                    queue.push_back(m);
                }
            }
        }
        if prev[to] == usize::MAX {
            return Vec::new();
        }
        let mut path = vec![to];
        let mut k = to;
        while k != from {
            k = prev[k];
            path.push(k);
        }
        path.reverse();
        path
    }

    pub fn dump(&self, a: &Amalgam) -> DecompositionDump {
        let mut tree_edges = Vec::new();
        for (x, ys) in self.tree.iter().enumerate() {
            tree_edges.extend(ys.iter().filter(|&&y| x < y).map(|&y| (x, y)));
        }
        DecompositionDump {
            graph: GraphDump::new(self.graph(), |l| a.letter_name(l)),
            initial: self.automaton.initial,
            terminal: self.automaton.terminal,
            lobes: self.lobes.clone(),
            lobe_tree: tree_edges,
            intersections: self.intersections.iter().copied().collect(),
            buds: self.buds.iter().copied().collect(),
        }
    }

    /// Graphviz output; edges carry their lobe id and colour.
    pub fn to_dot(&self, a: &Amalgam, name: &str) -> String {
        let marks = [(self.automaton.initial, "in"), (self.automaton.terminal, "out")];
        let mut dot = self.graph().to_dot(name, |l| a.letter_name(l), &marks);
        let mut lines = String::new();
        for (k, lobe) in self.lobes.iter().enumerate() {
            let verts: Vec<String> = lobe.vertices.iter().map(|v| v.to_string()).collect();
            lines.push_str(&format!("  // lobe {k} colour {}: {}\n", lobe.color, verts.join(" ")));
        }
        dot.insert_str(dot.len() - 2, &lines);
        dot
    }
}

/// JSON shape of a decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionDump {
    pub graph: GraphDump,
    pub initial: Vertex,
    pub terminal: Vertex,
    pub lobes: Vec<Lobe>,
    pub lobe_tree: Vec<(usize, usize)>,
    pub intersections: Vec<Vertex>,
    pub buds: Vec<Vertex>,
}

/// Lobe decomposition, rejecting graphs whose lobe graph has a cycle.
pub fn lobes(a: &Amalgam, automaton: PointedAutomaton) -> Result<Decomposition> {
    let d = Decomposition::build(a, automaton, None);
    match &d.cycle {
        Some(c) => Err(Error::LobeGraphNotTree(c.clone())),
        None => Ok(d),
    }
}

/// A failed opuntoid axiom with its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    NotDeterministic,
    LobeGraphNotTree { cycle: Vec<usize> },
    LobeNotClosed { lobe: usize },
    NotDvQuotient { lobe: usize },
    LoopEquality { vertex: Vertex },
    Assimilation { vertex: Vertex, other: Vertex },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpuntoidReport {
    pub violations: Vec<Violation>,
}

impl OpuntoidReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks determinism, the tree property, that each lobe is a closed
/// DV-quotient of a Schützenberger graph, loop equality and assimilation.
pub fn validate_opuntoid(a: &Amalgam, d: &Decomposition) -> OpuntoidReport {
    let g = d.graph();
    let mut violations = Vec::new();
    if !g.is_deterministic() {
        violations.push(Violation::NotDeterministic);
        return OpuntoidReport { violations };
    }
    if let Some(cycle) = &d.cycle {
        violations.push(Violation::LobeGraphNotTree { cycle: cycle.clone() });
    }
    for (k, lobe) in d.lobes.iter().enumerate() {
        let (mut h, ids) = d.lobe_graph(k);
        let root = *lobe.vertices.iter().next().unwrap();
        let local_root = ids[&root];
        let quotient_ok = match min_loop_idempotent(a, &h, local_root, lobe.color) {
            Ok(e) => {
                let sigma = schutz_graph_of(a.factor(lobe.color), e, lobe.color).automaton;
                match rooted_hom(&sigma.graph, sigma.initial, &h, local_root) {
                    Some(m) => {
                        let image: BTreeSet<Vertex> = m.iter().copied().collect();
                        !image.contains(&usize::MAX) && image.len() == h.num_vertices()
                    }
                    None => false,
                }
            }
            Err(_) => false,
        };
        if expand_once(&mut h, a.table_presentation(lobe.color)) {
            violations.push(Violation::LobeNotClosed { lobe: k });
        }
        if !quotient_ok {
            violations.push(Violation::NotDvQuotient { lobe: k });
        }
    }
    for &v in &d.intersections {
        if loop_set(a, g, v, 1) != loop_set(a, g, v, 2) {
            violations.push(Violation::LoopEquality { vertex: v });
        }
        let (Some(l1), Some(l2)) = (d.lobe_at(v, 1), d.lobe_at(v, 2)) else { continue };
        let shared: Vec<Vertex> =
            d.lobes[l1].vertices.intersection(&d.lobes[l2].vertices).copied().filter(|&x| x != v).collect();
        for other in shared {
            let mut witnessed = false;
            let mut consistent = true;
            for u in a.u().elements() {
                let p1 = u_path_target(a, g, v, u, 1) == Some(other);
                let p2 = u_path_target(a, g, v, u, 2) == Some(other);
                consistent &= p1 == p2;
                witnessed |= p1 && p2;
            }
            if !(witnessed && consistent) {
                violations.push(Violation::Assimilation { vertex: v, other });
            }
        }
    }
    OpuntoidReport { violations }
}

/// Colour-`color` component through `v`.
fn component(g: &InverseWordGraph, v: Vertex, color: u8) -> Vec<Vertex> {
    let mut seen = BTreeSet::from([v]);
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for (l, ts) in g.out(x) {
            if l.color == color {
                for &t in ts {
                    if seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Folds, then expands relative to `R1 ∪ R2` and applies `W` at vertices
/// carrying both colours, until nothing changes. With `scope = (v, i)` only
/// the colour-`i` lobe through `v` is expanded. Returns the cumulative projection.
fn saturate(
    a: &Amalgam,
    auto: PointedAutomaton,
    scope: Option<(Vertex, u8)>,
    budget: &Budget,
) -> Result<(PointedAutomaton, Vec<Vertex>)> {
    let (mut cur, mut map) = auto.fold();
    loop {
        if cur.graph.num_edges() > budget.max_edges {
            return Err(Error::EdgeBudget(budget.max_edges));
        }
        let (starts, r) = match scope {
            None => (cur.graph.vertices().collect::<Vec<_>>(), a.r_presentation()),
            Some((v, color)) => (component(&cur.graph, map[v], color), a.table_presentation(color)),
        };
        let both: Vec<Vertex> = starts.iter().copied().filter(|&v| cur.graph.colors_at(v).len() == 2).collect();
        let grew_r = expand_at(&mut cur.graph, r, &starts);
        let grew_w = expand_at(&mut cur.graph, a.w_presentation(), &both);
        if !grew_r && !grew_w {
            return Ok((cur, map));
        }
        let (next, m) = cur.fold();
        map = compose(&map, &m);
        cur = next;
    }
}

/// The core automaton of `w`: closed relative to `R1 ∪ R2`, with `W` applied
/// at every vertex carrying both colours and all buds left unexpanded.
pub fn core(a: &Amalgam, w: &[Letter], budget: &Budget) -> Result<Decomposition> {
    a.check_word(w)?;
    let (auto, _) = saturate(a, PointedAutomaton::linear(w), None, budget)?;
    lobes(a, auto)
}

/// Result of one bud expansion.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub decomposition: Decomposition,
    /// Old vertex id → new vertex id; injective.
    pub projection: Vec<Vertex>,
    pub new_lobe: usize,
}

/// Attaches the net-collapsed Schützenberger graph of `f(e_i(ν))` at the bud `ν`
/// and glues it along `U`-paths.
pub fn construction5(a: &Amalgam, d: &Decomposition, bud: Vertex, budget: &Budget) -> Result<Expansion> {
    if !d.buds.contains(&bud) {
        return Err(Error::NotABud(bud));
    }
    let g = d.graph();
    let n = g.num_vertices();
    let i = d.lobes[d.vertex_lobes[bud][0]].color;
    let j = 3 - i;
    let lset = loop_set(a, g, bud, i);
    let f = min_u_idempotent(a, g, bud, i).ok_or(Error::NotABud(bud))?;
    let lambda = schutz_graph_of(a.factor(j), a.phi(j, f), j).automaton;
    let x = lambda.initial;
    let collapse: Vec<(Vertex, Vertex)> =
        net(a, &lambda.graph, x, &lset, j).into_iter().map(|y| (x, y)).collect();
    let (lam_rho, rho) = lambda.graph.fold_identifying(&collapse);
    let x_rho = rho[x];

    let mut glued = g.clone();
    let offset = glued.append(&lam_rho);
    let mut pairs = vec![(bud, offset + x_rho)];
    for u in a.u().elements() {
        if let (Some(y), Some(y2)) = (u_path_target(a, g, bud, u, i), u_path_target(a, &lam_rho, x_rho, u, j)) {
            pairs.push((y, offset + y2));
        }
    }
    let (glued, kappa) = glued.fold_identifying(&pairs);
    let auto = PointedAutomaton {
        graph: glued,
        initial: kappa[d.automaton.initial],
        terminal: kappa[d.automaton.terminal],
    };
    let attach = kappa[bud];
    let (auto, sat) = saturate(a, auto, Some((attach, j)), budget)?;
    let projection: Vec<Vertex> = (0..n).map(|v| sat[kappa[v]]).collect();
    let distinct: BTreeSet<Vertex> = projection.iter().copied().collect();
    if distinct.len() != n {
        return Err(Error::Internal(format!("bud expansion at {bud} identified old vertices")));
    }
    for lobe in &d.lobes {
        let before = lobe_edge_count(g, &lobe.vertices, lobe.color, |v| v);
        let after = lobe_edge_count(&auto.graph, &lobe.vertices, lobe.color, |v| projection[v]);
        if before != after {
            return Err(Error::Internal(format!("bud expansion at {bud} changed a prior lobe")));
        }
    }
    let keys = d.core_keys.iter().map(|&(c, v)| (c, projection[v])).collect();
    let attach_new = projection[bud];
    let decomposition = Decomposition::build(a, auto, Some(keys));
    if let Some(cycle) = &decomposition.cycle {
        return Err(Error::LobeGraphNotTree(cycle.clone()));
    }
    let new_lobe = decomposition
        .lobe_at(attach_new, j)
        .ok_or_else(|| Error::Internal("attached lobe missing".into()))?;
    Ok(Expansion { decomposition, projection, new_lobe })
}

fn lobe_edge_count(
    g: &InverseWordGraph,
    vertices: &BTreeSet<Vertex>,
    color: u8,
    image: impl Fn(Vertex) -> Vertex,
) -> usize {
    let mapped: BTreeSet<Vertex> = vertices.iter().map(|&v| image(v)).collect();
    mapped
        .iter()
        .map(|&v| {
            g.out(v)
                .iter()
                .filter(|(l, _)| l.color == color && !l.inverse)
                .map(|(_, ts)| ts.iter().filter(|t| mapped.contains(t)).count())
                .sum::<usize>()
        })
        .sum()
}

/// Expands every bud lying on a lobe at lobe-tree distance `< k` from the
/// core, smallest bud first, until none is left.
pub fn expand_to_depth(a: &Amalgam, d: &Decomposition, k: usize, budget: &Budget) -> Result<Decomposition> {
    expand_to_depth_filtered(a, d, k, budget, |_, _| true)
}

/// [`expand_to_depth`] restricted to buds accepted by `keep`.
pub fn expand_to_depth_filtered(
    a: &Amalgam,
    d: &Decomposition,
    k: usize,
    budget: &Budget,
    keep: impl Fn(&Decomposition, Vertex) -> bool,
) -> Result<Decomposition> {
    let mut cur = d.clone();
    loop {
        let dist = cur.lobe_distances();
        let next = cur.buds.iter().copied().find(|&v| dist[cur.vertex_lobes[v][0]] < k && keep(&cur, v));
        let Some(bud) = next else { return Ok(cur) };
        cur = construction5(a, &cur, bud, budget)?.decomposition;
        if cur.num_lobes() > budget.max_lobes {
            return Err(Error::LobeBudget(budget.max_lobes));
        }
    }
}

/// Stephen's criterion: each word is accepted by the other's automaton
/// expanded to the other word's length.
pub fn word_equal(a: &Amalgam, w1: &[Letter], w2: &[Letter], budget: &Budget) -> Result<bool> {
    let d1 = expand_to_depth(a, &core(a, w1, budget)?, w2.len(), budget)?;
    if !d1.automaton.accepts(w2) {
        return Ok(false);
    }
    let d2 = expand_to_depth(a, &core(a, w2, budget)?, w1.len(), budget)?;
    Ok(d2.automaton.accepts(w1))
}

/// Word-problem oracle caching one expanded automaton per word. Every
/// automaton is expanded to `depth`, which must bound the length of all
/// queried words; acceptance only grows with depth, so answers agree with
/// [`word_equal`].
pub struct WordSolver<'a> {
    amalgam: &'a Amalgam,
    depth: usize,
    budget: Budget,
    cache: HashMap<Word, PointedAutomaton>,
}

impl<'a> WordSolver<'a> {
    pub fn new(amalgam: &'a Amalgam, depth: usize, budget: Budget) -> Self {
        WordSolver { amalgam, depth, budget, cache: HashMap::new() }
    }

    pub fn automaton(&mut self, w: &[Letter]) -> Result<&PointedAutomaton> {
        if !self.cache.contains_key(w) {
            let d = expand_to_depth(self.amalgam, &core(self.amalgam, w, &self.budget)?, self.depth, &self.budget)?;
            self.cache.insert(w.to_vec(), d.automaton);
        }
        Ok(&self.cache[w])
    }

    pub fn equal(&mut self, w1: &[Letter], w2: &[Letter]) -> Result<bool> {
        debug_assert!(w1.len() <= self.depth && w2.len() <= self.depth);
        Ok(self.automaton(w1)?.accepts(w2) && self.automaton(w2)?.accepts(w1))
    }
}
