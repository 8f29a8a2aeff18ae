//! Graphs of groups from host trees and presentations of maximal subgroups.
//!
//! In the multi-host case the maximal subgroup acts on the tree of host
//! lobes with finite vertex stabilizers `H_{φ_i(f)}^{S_i}` and edge
//! stabilizers `H_g^U`; its quotient graph `Y` is read off the host-state
//! graph, and the subgroup is the fundamental group of the resulting graph
//! of groups.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::fis::{Elem, FiniteInverseSemigroup, Subgroup};
use crate::graph::{automorphisms, compose, rooted_hom, rooted_iso, InverseWordGraph, PointedAutomaton, Vertex};
use crate::group::{
    inverse, shift_word, sym, table_word, Abelianization, GroupPresentation, GroupWord, DEFAULT_MAX_COSETS,
};
use crate::host::{
    classify_host_type, complete_host_union, eligible_attachments, host_automorphisms, hosts, Finiteness,
    FinitenessReport, HostGraph, HostType, LobeTypeKey,
};
use crate::opuntoid::{core, min_loop_idempotent, Budget, Decomposition};
use crate::stephen::schutz_graph_of;
use crate::word::Letter;

/// A vertex of `Y`: an orbit of host lobes, with group `H_{φ_i(f)}^{S_i}`.
#[derive(Clone, Debug, Serialize)]
pub struct YVertex {
    pub key: LobeTypeKey,
    /// Representative type; the first one met in the host-state graph.
    pub ty: HostType,
    /// `φ_i(f)`.
    pub idempotent: Elem,
    pub subgroup: Subgroup,
    pub group: GroupPresentation,
}

/// An oriented edge of `Y` from a colour-1 vertex to a colour-2 vertex.
#[derive(Clone, Debug, Serialize)]
pub struct YEdge {
    pub from: usize,
    pub to: usize,
    /// Attachment idempotent `g ∈ E(U)`.
    pub f: Elem,
    /// Least vertex of the representative class; `rep⁻¹·rep = φ1(g)`.
    pub rep: Elem,
    /// `c ∈ S2` with `cc⁻¹ = φ2(f_to)` and `c⁻¹c = φ2(g)`.
    pub conjugator: Elem,
    /// Attachment classes of the `from` representative in this orbit.
    pub orbit: Vec<Vec<Elem>>,
    pub subgroup: Subgroup,
    pub group: GroupPresentation,
    /// `σ(u) = rep·φ1(u)·rep⁻¹`, as local indices of the `from` group.
    pub sigma: Vec<usize>,
    /// `τ(u) = c·φ2(u)·c⁻¹`, as local indices of the `to` group.
    pub tau: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphOfGroups {
    pub vertices: Vec<YVertex>,
    pub edges: Vec<YEdge>,
}

fn vertex_data(a: &Amalgam, ty: HostType) -> Result<YVertex> {
    let s = a.factor(ty.color);
    let e = a.phi(ty.color, ty.f);
    let subgroup = s.maximal_subgroup(e)?;
    let group = subgroup_presentation(s, &subgroup);
    Ok(YVertex { key: ty.key(a), ty, idempotent: e, subgroup, group })
}

/// Multiplication-table presentation of a maximal subgroup, named by elements.
pub fn subgroup_presentation(s: &FiniteInverseSemigroup, h: &Subgroup) -> GroupPresentation {
    let names: Vec<String> = h.elements.iter().map(|&x| s.element_name(x).to_string()).collect();
    GroupPresentation::from_table(&names, &h.table, h.identity)
}

/// `H_{φ_i(f)}^{S_i}`.
pub fn vertex_group(a: &Amalgam, ty: HostType) -> Result<GroupPresentation> {
    Ok(vertex_data(a, ty)?.group)
}

/// `H_f^U` with `σ(u) = φ1(u)` and `τ(u) = φ2(u)`, as elements of the factors.
pub fn edge_group(a: &Amalgam, f: Elem) -> Result<(GroupPresentation, Vec<Elem>, Vec<Elem>)> {
    let h = a.u().maximal_subgroup(f)?;
    let sigma = h.elements.iter().map(|&u| a.phi(1, u)).collect();
    let tau = h.elements.iter().map(|&u| a.phi(2, u)).collect();
    Ok((subgroup_presentation(a.u(), &h), sigma, tau))
}

fn local(h: &Subgroup, x: Elem, what: &str) -> Result<usize> {
    h.local(x).ok_or_else(|| Error::Internal(format!("{what} leaves the vertex group")))
}

/// The quotient graph of groups of the host tree rooted at `root`.
pub fn quotient_graph(a: &Amalgam, root: HostType, budget: &Budget) -> Result<GraphOfGroups> {
    let hg = HostGraph::explore(a, root, budget.max_lobes)?;
    let mut index: BTreeMap<LobeTypeKey, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    for st in &hg.states {
        let key = st.ty.key(a);
        if let std::collections::btree_map::Entry::Vacant(e) = index.entry(key) {
            e.insert(vertices.len());
            vertices.push(vertex_data(a, st.ty)?);
        }
    }
    let (s1, s2) = (a.factor(1), a.factor(2));
    let mut edges = Vec::new();
    for (from, v) in vertices.iter().enumerate().filter(|(_, v)| v.ty.color == 1) {
        let mut covered: BTreeSet<Vec<Elem>> = BTreeSet::new();
        for att in eligible_attachments(a, v.ty) {
            if covered.contains(&att.class) {
                continue;
            }
            let mut orbit: BTreeSet<Vec<Elem>> = BTreeSet::new();
            for &h in &v.subgroup.elements {
                let mut image: Vec<Elem> = att.class.iter().map(|&x| s1.mul(h, x)).collect();
                image.sort();
                orbit.insert(image);
            }
            covered.extend(orbit.iter().cloned());
            let g = att.child.f;
            let to = *index
                .get(&att.child.key(a))
                .ok_or_else(|| Error::Internal(format!("attachment type {:?} missing from Y", att.child)))?;
            let target = &vertices[to];
            let (top, bottom) = (target.idempotent, a.phi(2, g));
            let conjugator = s2
                .elements()
                .find(|&c| s2.range_idem(c) == top && s2.domain_idem(c) == bottom)
                .ok_or_else(|| Error::Internal("attachment type is not D-related to its vertex".into()))?;
            let subgroup = a.u().maximal_subgroup(g)?;
            let r = att.rep;
            let mut sigma = Vec::new();
            let mut tau = Vec::new();
            for &u in &subgroup.elements {
                let x = s1.mul(s1.mul(r, a.phi(1, u)), s1.inv(r));
                sigma.push(local(&v.subgroup, x, "σ")?);
                let y = s2.mul(s2.mul(conjugator, a.phi(2, u)), s2.inv(conjugator));
                tau.push(local(&target.subgroup, y, "τ")?);
            }
            let group = subgroup_presentation(a.u(), &subgroup);
            edges.push(YEdge {
                from,
                to,
                f: g,
                rep: r,
                conjugator,
                orbit: orbit.into_iter().collect(),
                subgroup,
                group,
                sigma,
                tau,
            });
        }
    }
    Ok(GraphOfGroups { vertices, edges })
}

/// `σ, τ` injective homomorphisms into the vertex groups.
pub fn check_edge_maps(gog: &GraphOfGroups) -> Result<()> {
    for (k, e) in gog.edges.iter().enumerate() {
        for (map, target) in [(&e.sigma, &gog.vertices[e.from].subgroup), (&e.tau, &gog.vertices[e.to].subgroup)] {
            let distinct: BTreeSet<usize> = map.iter().copied().collect();
            if distinct.len() != map.len() {
                return Err(Error::Internal(format!("edge {k}: map not injective")));
            }
            for i in 0..map.len() {
                for j in 0..map.len() {
                    if map[e.subgroup.table[i][j]] != target.table[map[i]][map[j]] {
                        return Err(Error::Internal(format!("edge {k}: map not a homomorphism")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Edge ids of a BFS spanning tree from `start`, scanning edges in id order
/// or in reverse.
pub fn spanning_tree(gog: &GraphOfGroups, start: usize, reverse: bool) -> BTreeSet<usize> {
    let n = gog.vertices.len();
    let mut order: Vec<usize> = (0..gog.edges.len()).collect();
    if reverse {
        order.reverse();
    }
    let mut seen = vec![false; n];
    let mut tree = BTreeSet::new();
    if n == 0 {
        return tree;
    }
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &k in &order {
            let e = &gog.edges[k];
            let other = if e.from == x {
                e.to
            } else if e.to == x {
                e.from
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                tree.insert(k);
                queue.push_back(other);
            }
        }
    }
    tree
}

/// Vertex presentations, one stable letter `t{k}` per edge outside `tree`,
/// and relators `t⁻¹σ(u)t = τ(u)`, with `t = 1` substituted on tree edges.
pub fn raw_fundamental_presentation(gog: &GraphOfGroups, tree: &BTreeSet<usize>) -> GroupPresentation {
    let mut p = GroupPresentation { generators: Vec::new(), relators: Vec::new(), order: None };
    let offsets: Vec<usize> = gog.vertices.iter().map(|v| p.append(&v.group)).collect();
    for (k, e) in gog.edges.iter().enumerate() {
        let stable = (!tree.contains(&k)).then(|| p.add_generator(&format!("t{k}")));
        let (vf, vt) = (&gog.vertices[e.from].subgroup, &gog.vertices[e.to].subgroup);
        for u in (0..e.subgroup.elements.len()).filter(|&u| u != e.subgroup.identity) {
            let s: GroupWord = shift_word(&table_word(vf.identity, e.sigma[u]), offsets[e.from]);
            let t: GroupWord = shift_word(&table_word(vt.identity, e.tau[u]), offsets[e.to]);
            let mut r = Vec::new();
            if let Some(y) = stable {
                r.push(sym(y, true));
            }
            r.extend(s);
            if let Some(y) = stable {
                r.push(sym(y, false));
            }
            r.extend(inverse(&t));
            p.relators.push(r);
        }
    }
    if gog.vertices.len() == 1 && gog.edges.is_empty() {
        p.order = gog.vertices[0].group.order;
    }
    p
}

/// Simplified presentation of `π(G, Y)` for the BFS tree from vertex 0.
pub fn fundamental_presentation(gog: &GraphOfGroups) -> GroupPresentation {
    raw_fundamental_presentation(gog, &spanning_tree(gog, 0, false)).simplify()
}

impl GraphOfGroups {
    pub fn to_dot(&self, a: &Amalgam) -> String {
        let mut out = String::from("digraph Y {\n");
        for (k, v) in self.vertices.iter().enumerate() {
            let s = a.factor(v.ty.color);
            out.push_str(&format!(
                "  v{k} [label=\"S{} {} |G|={}\"];\n",
                v.ty.color,
                s.element_name(v.idempotent),
                v.subgroup.order()
            ));
        }
        for (k, e) in self.edges.iter().enumerate() {
            out.push_str(&format!(
                "  v{} -> v{} [label=\"y{k} {} |G|={}\"];\n",
                e.from,
                e.to,
                a.u().element_name(e.f),
                e.subgroup.order()
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Table presentation of a group of vertex permutations closed under composition.
pub fn permutation_group_presentation(perms: &[Vec<Vertex>], prefix: &str) -> Result<GroupPresentation> {
    let index: BTreeMap<&[Vertex], usize> = perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let identity = perms
        .iter()
        .position(|p| p.iter().enumerate().all(|(i, &x)| i == x))
        .ok_or_else(|| Error::Internal("automorphism list lacks the identity".into()))?;
    let mut table = Vec::with_capacity(perms.len());
    for p in perms {
        let mut row = Vec::with_capacity(perms.len());
        for q in perms {
            let pq = compose(p, q);
            row.push(*index.get(pq.as_slice()).ok_or_else(|| Error::Internal("automorphisms not closed".into()))?);
        }
        table.push(row);
    }
    let names: Vec<String> =
        (0..perms.len()).map(|i| if i == identity { "1".to_string() } else { format!("{prefix}{i}") }).collect();
    Ok(GroupPresentation::from_table(&names, &table, identity))
}

/// Automorphisms of `Σ` compatible with a quotient map and their action on
/// the quotient.
#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    /// First lift of `φ` in the order of images of the initial vertex.
    pub lift: Vec<Vertex>,
    pub lifts: Vec<Vec<Vertex>>,
    pub aut_sigma: usize,
    /// Automorphisms of `Σ` that descend to `Δ`.
    pub h: Vec<Vec<Vertex>>,
    /// Members of `H` inducing the identity on `Δ`.
    pub n: Vec<Vec<Vertex>>,
    pub aut_delta: usize,
    /// Members of `H` mapping the fibre over `π(initial)` onto itself.
    pub fibre_stabilizer: Vec<Vec<Vertex>>,
    /// Every automorphism of `Δ` is induced by some member of `H`.
    pub surjective: bool,
    /// `|Aut(Δ)|·|N| = |H|`.
    pub index_matches: bool,
}

fn induced(pi: &[Vertex], alpha: &[Vertex], delta_size: usize) -> Option<Vec<Vertex>> {
    let mut map = vec![usize::MAX; delta_size];
    for (v, &p) in pi.iter().enumerate() {
        let image = pi[alpha[v]];
        if map[p] == usize::MAX {
            map[p] = image;
        } else if map[p] != image {
            return None;
        }
    }
    Some(map)
}

/// Lifts `φ ∈ Aut(Δ)` along `π: Σ → Δ` to `φ̂ ∈ Aut(Σ)` with `π∘φ̂ = φ∘π`.
pub fn lift_automorphism(
    sigma: &PointedAutomaton,
    delta: &InverseWordGraph,
    pi: &[Vertex],
    phi: &[Vertex],
) -> Result<LiftReport> {
    let all = automorphisms(&sigma.graph, sigma.initial);
    let mut h = Vec::new();
    let mut n = Vec::new();
    let mut lifts = Vec::new();
    let mut fibre_stabilizer = Vec::new();
    let mut induced_set: BTreeSet<Vec<Vertex>> = BTreeSet::new();
    let nu = pi[sigma.initial];
    let fibre: BTreeSet<Vertex> = (0..pi.len()).filter(|&v| pi[v] == nu).collect();
    for alpha in &all {
        let Some(map) = induced(pi, alpha, delta.num_vertices()) else { continue };
        if map.iter().enumerate().all(|(i, &x)| i == x) {
            n.push(alpha.clone());
        }
        if map == phi {
            lifts.push(alpha.clone());
        }
        let image: BTreeSet<Vertex> = fibre.iter().map(|&v| alpha[v]).collect();
        if image == fibre {
            fibre_stabilizer.push(alpha.clone());
        }
        induced_set.insert(map);
        h.push(alpha.clone());
    }
    let aut_delta: BTreeSet<Vec<Vertex>> = automorphisms(delta, 0).into_iter().collect();
    let lift = lifts.first().cloned().ok_or_else(|| Error::NoLiftFound(format!("{phi:?}")))?;
    Ok(LiftReport {
        lift,
        lifts,
        aut_sigma: all.len(),
        surjective: aut_delta.is_subset(&induced_set),
        index_matches: aut_delta.len() * n.len() == h.len(),
        aut_delta: aut_delta.len(),
        h,
        n,
        fibre_stabilizer,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubgroupCase {
    /// The residue is one lobe `SΓ(S_i, g)` with `g` not D-related to `U`.
    OldIdempotent,
    MultiHost,
    NewIdempotent,
}

impl SubgroupCase {
    pub fn tag(self) -> &'static str {
        match self {
            SubgroupCase::OldIdempotent => "old idempotent, not D^U",
            SubgroupCase::MultiHost => "multi-host",
            SubgroupCase::NewIdempotent => "new idempotent",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct YSummary {
    pub vertices: usize,
    pub edges: usize,
    pub tree_edges: usize,
}

/// Lifting of the automorphisms of one host lobe `Δ` to `SΓ(S_k, e_k(ν))`.
#[derive(Clone, Debug, Serialize)]
pub struct LiftDiagnostics {
    pub lobe: usize,
    pub aut_sigma: usize,
    pub aut_delta: usize,
    pub h: usize,
    pub n: usize,
    pub lifted: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxSubgroupResult {
    pub case: SubgroupCase,
    pub tag: String,
    pub presentation: GroupPresentation,
    pub order: Option<usize>,
    pub abelianization: Abelianization,
    pub finiteness: Option<FinitenessReport>,
    pub y: Option<YSummary>,
    /// `|Aut|` of the complete host union, when it is finite.
    pub host_union_automorphisms: Option<usize>,
    pub order_cross_check: Option<bool>,
    pub lifting: Option<LiftDiagnostics>,
}

/// A residue lobe isomorphic to `SΓ(S_i, g)` with `g` not D-related to `φ_i(E(U))`.
fn old_idempotent_host(a: &Amalgam, d: &Decomposition, lobes: &[usize]) -> Option<(u8, Elem)> {
    for &k in lobes {
        let color = d.lobes[k].color;
        let s = a.factor(color);
        let (h, ids) = d.lobe_graph(k);
        for &v in &d.lobes[k].vertices {
            let local = ids[&v];
            let Ok(e) = min_loop_idempotent(a, &h, local, color) else { continue };
            if a.u_idempotents().iter().any(|&f| s.d_related(e, a.phi(color, f))) {
                continue;
            }
            let sigma = schutz_graph_of(s, e, color).automaton;
            if rooted_iso(&sigma.graph, sigma.initial, &h, local).is_some() {
                return Some((color, e));
            }
        }
    }
    None
}

fn lift_diagnostics(a: &Amalgam, d: &Decomposition, k: usize) -> Option<LiftDiagnostics> {
    let color = d.lobes[k].color;
    let (h, ids) = d.lobe_graph(k);
    let nu = ids[d.lobes[k].vertices.iter().next()?];
    let e = min_loop_idempotent(a, &h, nu, color).ok()?;
    let sigma = schutz_graph_of(a.factor(color), e, color).automaton;
    let pi = rooted_hom(&sigma.graph, sigma.initial, &h, nu)?;
    if pi.contains(&usize::MAX) {
        return None;
    }
    let auts = automorphisms(&h, 0);
    let mut diag = LiftDiagnostics { lobe: k, aut_sigma: 0, aut_delta: auts.len(), h: 0, n: 0, lifted: 0, failed: 0 };
    for phi in &auts {
        match lift_automorphism(&sigma, &h, &pi, phi) {
            Ok(r) => {
                diag.lifted += 1;
                diag.aut_sigma = r.aut_sigma;
                diag.h = r.h.len();
                diag.n = r.n.len();
            }
            Err(_) => diag.failed += 1,
        }
    }
    Some(diag)
}

/// Presentation of the maximal subgroup at `e = ww⁻¹` of the amalgamated free product.
pub fn maximal_subgroup_presentation(a: &Amalgam, w: &[Letter], budget: &Budget) -> Result<MaxSubgroupResult> {
    a.check_word(w)?;
    let d = core(a, w, budget)?;
    let analysis = hosts(a, &d, budget)?;
    if let Some(root) = analysis.root {
        let gog = quotient_graph(a, root, budget)?;
        check_edge_maps(&gog)?;
        let tree = spanning_tree(&gog, 0, false);
        let presentation = raw_fundamental_presentation(&gog, &tree).simplify();
        let finiteness = classify_host_type(a, root, budget);
        let mut result = MaxSubgroupResult {
            case: SubgroupCase::MultiHost,
            tag: SubgroupCase::MultiHost.tag().into(),
            abelianization: presentation.abelianization(),
            order: None,
            presentation,
            finiteness: None,
            y: Some(YSummary { vertices: gog.vertices.len(), edges: gog.edges.len(), tree_edges: tree.len() }),
            host_union_automorphisms: None,
            order_cross_check: None,
            lifting: None,
        };
        if finiteness.verdict == Finiteness::Finite {
            result.order = result.presentation.enumerate_order(DEFAULT_MAX_COSETS);
            let depth = HostGraph::explore(a, root, budget.max_lobes)?.states.len() + 1;
            if let Some(union) = complete_host_union(a, root, depth, budget)? {
                let all: Vec<usize> = (0..union.num_lobes()).collect();
                let auts = host_automorphisms(&union, &all).len();
                result.host_union_automorphisms = Some(auts);
                result.order_cross_check = Some(result.order == Some(auts));
            }
        }
        result.finiteness = Some(finiteness);
        return Ok(result);
    }
    if let Some((color, g)) = old_idempotent_host(a, &d, &analysis.host_lobes) {
        let s = a.factor(color);
        let h = s.maximal_subgroup(g)?;
        let presentation = subgroup_presentation(s, &h).simplify();
        return Ok(MaxSubgroupResult {
            case: SubgroupCase::OldIdempotent,
            tag: SubgroupCase::OldIdempotent.tag().into(),
            abelianization: presentation.abelianization(),
            order: Some(h.order()),
            presentation,
            finiteness: None,
            y: None,
            host_union_automorphisms: None,
            order_cross_check: None,
            lifting: None,
        });
    }
    let auts = host_automorphisms(&d, &analysis.host_lobes);
    let presentation = permutation_group_presentation(&auts, "g")?.simplify();
    Ok(MaxSubgroupResult {
        case: SubgroupCase::NewIdempotent,
        tag: SubgroupCase::NewIdempotent.tag().into(),
        abelianization: presentation.abelianization(),
        order: Some(auts.len()),
        presentation,
        finiteness: None,
        y: None,
        host_union_automorphisms: None,
        order_cross_check: None,
        lifting: analysis.host_lobes.first().and_then(|&k| lift_diagnostics(a, &d, k)),
    })
}
