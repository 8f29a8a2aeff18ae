//! Feed-off, parasites and hosts; the host-type graph and finiteness of the
//! host union; shift-isomorphisms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::fis::Elem;
use crate::graph::{automorphisms, rooted_iso, InverseWordGraph, PointedAutomaton, Vertex};
use crate::opuntoid::{
    construction5, core, expand_to_depth_filtered, min_loop_idempotent, min_u_idempotent, u_path_target,
    Budget, Decomposition,
};
use crate::stephen::schutz_graph_of;
use crate::word::Letter;

/// Replays the bud expansion at `v` on lobe `from` in isolation and compares
/// the produced lobe with `to`, both rooted at `v`.
pub fn direct_feed_off(a: &Amalgam, d: &Decomposition, from: usize, to: usize, v: Vertex, budget: &Budget) -> Result<bool> {
    if !d.lobes[from].vertices.contains(&v) || !d.lobes[to].vertices.contains(&v) || from == to {
        return Err(Error::NotAdjacent(from, to));
    }
    let (h, ids) = d.lobe_graph(from);
    let local = ids[&v];
    let alone = Decomposition::build(a, PointedAutomaton { graph: h, initial: local, terminal: local }, None);
    if !alone.buds.contains(&local) {
        return Ok(false);
    }
    let e = construction5(a, &alone, local, budget)?;
    let (grown, grown_ids) = e.decomposition.lobe_graph(e.new_lobe);
    let (target, target_ids) = d.lobe_graph(to);
    Ok(rooted_iso(&grown, grown_ids[&e.projection[local]], &target, target_ids[&v]).is_some())
}

/// Whether `to` directly feeds off `from` at some shared vertex.
fn feeds_off_somewhere(a: &Amalgam, d: &Decomposition, from: usize, to: usize, budget: &Budget) -> Result<bool> {
    let shared: Vec<Vertex> = d.lobes[from].vertices.intersection(&d.lobes[to].vertices).copied().collect();
    for v in shared {
        if direct_feed_off(a, d, from, to, v, budget)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Lobes adjacent to exactly one lobe off which they directly feed.
pub fn parasites(a: &Amalgam, d: &Decomposition, budget: &Budget) -> Result<Vec<usize>> {
    let all: BTreeSet<usize> = (0..d.num_lobes()).collect();
    parasites_within(a, d, &all, budget)
}

fn parasites_within(a: &Amalgam, d: &Decomposition, alive: &BTreeSet<usize>, budget: &Budget) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    if alive.len() < 2 {
        return Ok(out);
    }
    for &k in alive {
        let nbrs: Vec<usize> = d.tree[k].iter().copied().filter(|m| alive.contains(m)).collect();
        if nbrs.len() == 1 && feeds_off_somewhere(a, d, nbrs[0], k, budget)? {
            out.push(k);
        }
    }
    Ok(out)
}

/// Removes parasites one at a time until none is left or one lobe remains;
/// `choose` picks the parasite to remove among the current candidates.
pub fn peel_with(
    a: &Amalgam,
    d: &Decomposition,
    budget: &Budget,
    mut choose: impl FnMut(&[usize]) -> usize,
) -> Result<BTreeSet<usize>> {
    let mut alive: BTreeSet<usize> = (0..d.num_lobes()).collect();
    loop {
        let cands = parasites_within(a, d, &alive, budget)?;
        if cands.is_empty() {
            return Ok(alive);
        }
        alive.remove(&cands[choose(&cands)]);
    }
}

/// Peels the parasite with the highest lobe id first.
pub fn peel(a: &Amalgam, d: &Decomposition, budget: &Budget) -> Result<BTreeSet<usize>> {
    peel_with(a, d, budget, |c| c.len() - 1)
}

/// A host lobe `SΓ(S_color, φ_color(f))` for `f ∈ E(U)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HostType {
    pub color: u8,
    pub f: Elem,
}

/// Isomorphism class of a host lobe: its colour and the D-class of `φ(f)` in the factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LobeTypeKey {
    pub color: u8,
    pub d_class: usize,
}

impl HostType {
    pub fn key(&self, a: &Amalgam) -> LobeTypeKey {
        let s = a.factor(self.color);
        LobeTypeKey { color: self.color, d_class: s.green().d_class[a.phi(self.color, self.f)] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

/// Host residue of a finite opuntoid graph.
#[derive(Clone, Debug, Serialize)]
pub struct HostAnalysis {
    /// Lobes left after peeling.
    pub host_lobes: Vec<usize>,
    pub multi_host: bool,
    /// Type of the residue lobe in the multi-host case.
    pub root: Option<HostType>,
    /// Vertex of the residue lobe witnessing `root`.
    pub root_vertex: Option<Vertex>,
    /// All host types reachable from `root`.
    pub host_types: Vec<HostType>,
}

/// Peels parasites, then decides whether the residue is a single full
/// Schützenberger graph of an idempotent of `U`.
pub fn hosts(a: &Amalgam, d: &Decomposition, budget: &Budget) -> Result<HostAnalysis> {
    let residue = peel(a, d, budget)?;
    let mut analysis = HostAnalysis {
        host_lobes: residue.iter().copied().collect(),
        multi_host: false,
        root: None,
        root_vertex: None,
        host_types: Vec::new(),
    };
    if residue.len() == 1 {
        let k = analysis.host_lobes[0];
        if let Some((ty, v)) = lobe_host_type(a, d, k) {
            analysis.multi_host = true;
            analysis.root = Some(ty);
            analysis.root_vertex = Some(v);
            let graph = HostGraph::explore(a, ty, usize::MAX)?;
            analysis.host_types = graph.types();
        }
    }
    Ok(analysis)
}

/// Smallest vertex `v` of lobe `k` with `e_i(v) = φ_i(f)`, `f ∈ E(U)`, at
/// which the lobe is rooted-isomorphic to `SΓ(S_i, φ_i(f))`.
pub fn lobe_host_type(a: &Amalgam, d: &Decomposition, k: usize) -> Option<(HostType, Vertex)> {
    let color = d.lobes[k].color;
    let (h, ids) = d.lobe_graph(k);
    for &v in &d.lobes[k].vertices {
        let local = ids[&v];
        let Ok(e) = min_loop_idempotent(a, &h, local, color) else { continue };
        let Some(f) = min_u_idempotent(a, &h, local, color) else { continue };
        if a.phi(color, f) != e {
            continue;
        }
        let sigma = schutz_graph_of(a.factor(color), e, color).automaton;
        if rooted_iso(&sigma.graph, sigma.initial, &h, local).is_some() {
            return Some((HostType { color, f }, v));
        }
    }
    None
}

/// `Some(f)` with `f ∈ E(U)` when the Schützenberger graph of `w` has more
/// than one host, `f` being the attachment idempotent of the residue lobe.
pub fn is_d_related_to_u(a: &Amalgam, w: &[Letter], budget: &Budget) -> Result<Option<Elem>> {
    let analysis = hosts(a, &core(a, w, budget)?, budget)?;
    Ok(analysis.root.map(|t| t.f))
}

/// A host lobe entered through its root vertex, or the root lobe itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HostState {
    pub ty: HostType,
    /// The class of the root vertex is the parent attachment and yields no child.
    pub entered: bool,
}

/// One `U`-attachment class of a host lobe that carries another host.
#[derive(Clone, Debug, Serialize)]
pub struct Attachment {
    /// Vertices of the class, as elements of the R-class.
    pub class: Vec<Elem>,
    /// Least element of the class.
    pub rep: Elem,
    pub child: HostType,
}

/// The classes of vertices of `SΓ(S_i, φ_i(f))` joined by `U`-paths whose
/// domain idempotent `s⁻¹s` lies in `φ_i(E(U))`. The root class comes first.
pub fn eligible_attachments(a: &Amalgam, ty: HostType) -> Vec<Attachment> {
    let i = ty.color;
    let s = a.factor(i);
    let root = a.phi(i, ty.f);
    let sg = schutz_graph_of(s, root, i);
    let g = &sg.automaton.graph;
    let n = g.num_vertices();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<Vertex>> = Vec::new();
    let order: Vec<Vertex> = std::iter::once(sg.automaton.initial).chain(g.vertices()).collect();
    for v in order {
        if class_of[v] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = vec![v];
        class_of[v] = id;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for u in a.u().elements() {
                if let Some(y) = u_path_target(a, g, x, u, i) {
                    if class_of[y] == usize::MAX {
                        class_of[y] = id;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        classes.push(members);
    }
    let j = 3 - i;
    let mut out = Vec::new();
    for members in classes {
        let mut class: Vec<Elem> = members.iter().map(|&v| sg.elements[v]).collect();
        class.sort();
        let rep = class[0];
        if let Some(f) = a.embedding(i).preimage(s.domain_idem(rep)) {
            out.push(Attachment { class, rep, child: HostType { color: j, f } });
        }
    }
    out
}

/// The finite graph of host states reachable from a root host type.
#[derive(Clone, Debug)]
pub struct HostGraph {
    pub root: HostState,
    pub states: Vec<HostState>,
    /// Children of each state, by index into `states`, one per eligible class.
    pub children: Vec<Vec<usize>>,
}

impl HostGraph {
    pub fn explore(a: &Amalgam, root: HostType, max_states: usize) -> Result<HostGraph> {
        let root = HostState { ty: root, entered: false };
        let mut index: BTreeMap<HostState, usize> = BTreeMap::from([(root, 0)]);
        let mut states = vec![root];
        let mut children: Vec<Vec<usize>> = Vec::new();
        let mut k = 0;
        while k < states.len() {
            let st = states[k];
            let mut kids = Vec::new();
            let atts = eligible_attachments(a, st.ty);
            let root_elem = a.phi(st.ty.color, st.ty.f);
            for att in atts {
                if st.entered && att.class.contains(&root_elem) {
                    continue;
                }
                let child = HostState { ty: att.child, entered: true };
                let id = *index.entry(child).or_insert_with(|| {
                    states.push(child);
                    states.len() - 1
                });
                kids.push(id);
            }
            children.push(kids);
            if states.len() > max_states {
                return Err(Error::LobeBudget(max_states));
            }
            k += 1;
        }
        Ok(HostGraph { root, states, children })
    }

    pub fn types(&self) -> Vec<HostType> {
        let set: BTreeSet<HostType> = self.states.iter().map(|s| s.ty).collect();
        set.into_iter().collect()
    }

    pub fn keys(&self, a: &Amalgam) -> BTreeSet<LobeTypeKey> {
        self.states.iter().map(|s| s.ty.key(a)).collect()
    }
}

/// Outcome of the geometric finiteness test.
#[derive(Clone, Debug, Serialize)]
pub struct FinitenessReport {
    pub verdict: Finiteness,
    /// Host types along a downward path with equal types at positions `0`, `t`, `2t`.
    pub witness: Vec<HostType>,
    pub t: Option<usize>,
    /// Distinct lobe types seen.
    pub types_seen: usize,
    /// Search radius `2T + 2`.
    pub radius: usize,
    /// Verdict of the sequence criterion over `E(U)`, `true` meaning infinite.
    pub algebraic_infinite: Option<bool>,
    pub discrepancy: bool,
    /// Advisory only; does not bound the verdict.
    pub respects_j_order: bool,
}

/// Searches the host-state graph for a downward path `Δ0, …, Δ2t` with
/// `Δ0 ≅ Δt ≅ Δ2t`, up to length `2T + 2` where `T` is the number of lobe types.
pub fn classify_host_type(a: &Amalgam, root: HostType, budget: &Budget) -> FinitenessReport {
    let graph = match HostGraph::explore(a, root, budget.max_lobes) {
        Ok(g) => g,
        Err(_) => {
            return FinitenessReport {
                verdict: Finiteness::Unknown,
                witness: Vec::new(),
                t: None,
                types_seen: 0,
                radius: 0,
                algebraic_infinite: None,
                discrepancy: false,
                respects_j_order: respects_j_order(a),
            }
        }
    };
    let keys: Vec<LobeTypeKey> = graph.states.iter().map(|s| s.ty.key(a)).collect();
    let types_seen = graph.keys(a).len();
    let radius = 2 * types_seen + 2;
    let n = graph.states.len();
    // downward paths of exactly `steps` edges from `from`, one per endpoint
    let reach = |from: usize, steps: usize| -> BTreeMap<usize, Vec<usize>> {
        let mut cur = BTreeMap::from([(from, vec![from])]);
        for _ in 0..steps {
            let mut next = BTreeMap::new();
            for (&x, p) in &cur {
                for &c in &graph.children[x] {
                    next.entry(c).or_insert_with(|| {
                        let mut q: Vec<usize> = p.clone();
                        q.push(c);
                        q
                    });
                }
            }
            cur = next;
        }
        cur
    };
    let mut found: Option<(Vec<usize>, usize)> = None;
    'search: for t in 1..=radius / 2 {
        for x in 0..n {
            for (y, p1) in reach(x, t) {
                if keys[y] != keys[x] {
                    continue;
                }
                if let Some((_, p2)) = reach(y, t).into_iter().find(|(z, _)| keys[*z] == keys[x]) {
                    let mut p = p1;
                    p.extend(p2.into_iter().skip(1));
                    found = Some((p, t));
                    break 'search;
                }
            }
        }
    }
    let (verdict, witness, t) = match found {
        Some((p, t)) => (Finiteness::Infinite, p.iter().map(|&x| graph.states[x].ty).collect(), Some(t)),
        None => (Finiteness::Finite, Vec::new(), None),
    };
    let algebraic = algebraic_finiteness_check(a, root.f);
    FinitenessReport {
        verdict,
        witness,
        t,
        types_seen,
        radius,
        algebraic_infinite: Some(algebraic),
        discrepancy: algebraic != (verdict == Finiteness::Infinite),
        respects_j_order: respects_j_order(a),
    }
}

/// Finiteness of the host union of `SΓ(w)`. A single host is always finite.
pub fn classify_finiteness(a: &Amalgam, w: &[Letter], budget: &Budget) -> Result<FinitenessReport> {
    let d = core(a, w, budget)?;
    let analysis = hosts(a, &d, budget)?;
    match analysis.root {
        Some(root) => Ok(classify_host_type(a, root, budget)),
        None => Ok(FinitenessReport {
            verdict: Finiteness::Finite,
            witness: Vec::new(),
            t: None,
            types_seen: 1,
            radius: 0,
            algebraic_infinite: None,
            discrepancy: false,
            respects_j_order: respects_j_order(a),
        }),
    }
}

/// For idempotents of `U`, J-relatedness in one factor implies it in the other.
/// J coincides with D in a finite semigroup.
pub fn respects_j_order(a: &Amalgam) -> bool {
    let ds = [a.factor(1).green().d_class, a.factor(2).green().d_class];
    let eu = a.u().idempotents();
    let same = |k: usize, x: Elem, y: Elem| ds[k][a.phi(k as u8 + 1, x)] == ds[k][a.phi(k as u8 + 1, y)];
    eu.iter().all(|&x| eu.iter().all(|&y| same(0, x, y) == same(1, x, y)))
}

/// The sequence criterion over `E(U)`: `f_1, …, f_{2t−2}` with `f D f_1` in
/// the amalgam, consecutive terms not D-related in `U`, and the alternating
/// D-relations in the factors. `t` ranges up to `|E(U)| + 2`. D-relatedness in
/// the amalgam is taken as co-occurrence in the host-state graph of `f`.
pub fn algebraic_finiteness_check(a: &Amalgam, f: Elem) -> bool {
    let u = a.u();
    let eu = u.idempotents();
    let du = u.green().d_class;
    let ds = [a.factor(1).green().d_class, a.factor(2).green().d_class];
    let d_in = |k: u8, x: Elem, y: Elem| ds[usize::from(k) - 1][a.phi(k, x)] == ds[usize::from(k) - 1][a.phi(k, y)];
    let mut related: BTreeSet<Elem> = BTreeSet::from([f]);
    for color in [1u8, 2] {
        if let Ok(g) = HostGraph::explore(a, HostType { color, f }, 10_000) {
            related.extend(g.states.iter().map(|s| s.ty.f));
        }
    }
    let t_max = eu.len() + 2;
    for t in 2..=t_max {
        let len = 2 * t - 2;
        for k in [1u8, 2] {
            let other = 3 - k;
            let mut seq: Vec<Elem> = Vec::with_capacity(len);
            if extend(&eu, &du, &related, len, t, k, other, &d_in, &mut seq) {
                return true;
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn extend(
    eu: &[Elem],
    du: &[usize],
    related: &BTreeSet<Elem>,
    len: usize,
    t: usize,
    k: u8,
    other: u8,
    d_in: &dyn Fn(u8, Elem, Elem) -> bool,
    seq: &mut Vec<Elem>,
) -> bool {
    // positions are 1-based in the criterion; `pos` is the one being filled
    let pos = seq.len() + 1;
    if pos > len {
        let (f1, ft, fl) = (seq[0], seq[t - 1], seq[len - 1]);
        return d_in(k, f1, ft) && d_in(k, ft, fl) && d_in(other, seq[len - 2], seq[len - 1]);
    }
    for &x in eu {
        if pos == 1 && !related.contains(&x) {
            continue;
        }
        if pos > 1 {
            let prev = seq[pos - 2];
            if du[prev] == du[x] {
                continue;
            }
            // for even i with 1 < i < len: f_{i−1} D^{other} f_i
            if pos.is_multiple_of(2) && pos < len && !d_in(other, prev, x) {
                continue;
            }
            // and f_i D^{k} f_{i+1}
            if pos % 2 == 1 && pos > 2 && (pos - 1) < len && !d_in(k, prev, x) {
                continue;
            }
        }
        seq.push(x);
        if extend(eu, du, related, len, t, k, other, d_in, seq) {
            return true;
        }
        seq.pop();
    }
    false
}

/// Materializes host lobes reachable from the root host type up to lobe-tree
/// distance `depth`, expanding only buds whose attached lobe is a host.
pub fn host_region(a: &Amalgam, root: HostType, depth: usize, budget: &Budget) -> Result<Decomposition> {
    let sg = schutz_graph_of(a.factor(root.color), a.phi(root.color, root.f), root.color).automaton;
    let d = Decomposition::build(a, sg, None);
    expand_to_depth_filtered(a, &d, depth, budget, |d, v| is_host_bud(a, d, v))
}

/// A bud whose expansion attaches a full Schützenberger graph of an idempotent of `U`.
pub fn is_host_bud(a: &Amalgam, d: &Decomposition, v: Vertex) -> bool {
    let color = d.lobes[d.vertex_lobes[v][0]].color;
    let g = d.graph();
    match (min_loop_idempotent(a, g, v, color), min_u_idempotent(a, g, v, color)) {
        (Ok(e), Some(f)) => a.phi(color, f) == e,
        _ => false,
    }
}

/// The complete host union for a finite host-state graph, or `None` if host
/// buds remain after `max_depth` levels.
pub fn complete_host_union(a: &Amalgam, root: HostType, max_depth: usize, budget: &Budget) -> Result<Option<Decomposition>> {
    let d = host_region(a, root, max_depth, budget)?;
    let pending = d.buds.iter().any(|&v| is_host_bud(a, &d, v));
    Ok(if pending { None } else { Some(d) })
}

/// The union of the given lobes as a standalone graph, with its vertex ids.
pub fn lobes_subgraph(d: &Decomposition, lobes: &[usize]) -> (InverseWordGraph, BTreeMap<Vertex, Vertex>) {
    let keep: BTreeSet<Vertex> = lobes.iter().flat_map(|&k| d.lobes[k].vertices.iter().copied()).collect();
    let ids: BTreeMap<Vertex, Vertex> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut g = InverseWordGraph::with_vertices(ids.len());
    for &k in lobes {
        let color = d.lobes[k].color;
        for &v in &d.lobes[k].vertices {
            for (&l, ts) in d.graph().out(v) {
                if l.color == color && !l.inverse {
                    for t in ts {
                        g.add_edge(ids[&v], l, ids[t]);
                    }
                }
            }
        }
    }
    (g, ids)
}

/// Automorphisms of the union of all host lobes of `d` (all of its lobes
/// when `d` is a host region).
pub fn host_automorphisms(d: &Decomposition, lobes: &[usize]) -> Vec<Vec<Vertex>> {
    let (g, _) = lobes_subgraph(d, lobes);
    automorphisms(&g, 0)
}

/// A lobe isomorphism `Δ → Δ'` moving the first attachment vertex of the
/// lobe path off the last shared vertex set.
pub fn shift_iso(d: &Decomposition, from: usize, to: usize) -> Result<Option<BTreeMap<Vertex, Vertex>>> {
    let (h1, ids1) = d.lobe_graph(from);
    let (h2, ids2) = d.lobe_graph(to);
    let back2: BTreeMap<Vertex, Vertex> = ids2.iter().map(|(&g, &l)| (l, g)).collect();
    let isos: Vec<Vec<Vertex>> = if d.lobes[from].color == d.lobes[to].color && from != to {
        h2.vertices().filter_map(|v| rooted_iso(&h1, 0, &h2, v)).collect()
    } else {
        Vec::new()
    };
    if isos.is_empty() {
        return Err(Error::NotIsomorphicLobes(from, to));
    }
    let path = d.lobe_path(from, to);
    if path.len() < 2 {
        return Ok(None);
    }
    let n = path.len() - 1;
    let first: BTreeSet<Vertex> = d.lobes[path[0]].vertices.intersection(&d.lobes[path[1]].vertices).copied().collect();
    let last: BTreeSet<Vertex> =
        d.lobes[path[n - 1]].vertices.intersection(&d.lobes[path[n]].vertices).copied().collect();
    let nu1 = *first.iter().next().expect("adjacent lobes share a vertex");
    for iso in isos {
        let image = back2[&iso[ids1[&nu1]]];
        if !last.contains(&image) {
            return Ok(Some(ids1.iter().map(|(&g, &l)| (g, back2[&iso[l]])).collect()));
        }
    }
    Ok(None)
}
