//! Presentations, expansions and closure of word graphs, and Schützenberger
//! graphs built directly from a multiplication table.

use crate::error::{Error, Result};
use crate::fis::{Elem, FiniteInverseSemigroup};
use crate::graph::{InverseWordGraph, PointedAutomaton, Vertex};
use crate::word::{Letter, Word};

pub const DEFAULT_MAX_EDGES: usize = 1_000_000;

/// Relations `r = t` over a coloured alphabet. Both sides are nonempty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Presentation {
    pub relations: Vec<(Word, Word)>,
}

impl Presentation {
    /// The multiplication-table presentation of `s` over its generators, in colour `color`:
    /// `c(s)·l = c(s·l)` for every element and letter, and `l = c(l)` for every letter.
    pub fn from_table(s: &FiniteInverseSemigroup, color: u8) -> Self {
        let mut letters: Vec<Letter> = (0..s.generators().len()).map(|g| Letter::pos(color, g)).collect();
        letters.extend((0..s.generators().len()).map(|g| Letter::new(color, g, true)));
        let mut relations = Vec::new();
        for l in &letters {
            let c = s.canonical_word(s.letter_value(*l), color);
            if c != [*l] {
                relations.push((vec![*l], c));
            }
        }
        for x in s.elements() {
            for l in &letters {
                let mut lhs = s.canonical_word(x, color);
                lhs.push(*l);
                let rhs = s.canonical_word(s.mul(x, s.letter_value(*l)), color);
                if lhs != rhs {
                    relations.push((lhs, rhs));
                }
            }
        }
        Presentation { relations }
    }

    pub fn union(&self, other: &Presentation) -> Presentation {
        let mut relations = self.relations.clone();
        relations.extend(other.relations.iter().cloned());
        Presentation { relations }
    }
}

/// One expansion pass over a deterministic graph: wherever one side of a
/// relation reads `v → y` and the other side does not, a fresh path for the
/// other side is added. Returns whether anything was added.
pub fn expand_once(g: &mut InverseWordGraph, p: &Presentation) -> bool {
    expand_at(g, p, &g.vertices().collect::<Vec<_>>())
}

/// [`expand_once`] restricted to paths starting at `starts`.
pub fn expand_at(g: &mut InverseWordGraph, p: &Presentation, starts: &[Vertex]) -> bool {
    let mut additions: Vec<(Vertex, &[Letter], Vertex)> = Vec::new();
    for &v in starts {
        for (r, t) in &p.relations {
            for (have, want) in [(t, r), (r, t)] {
                if let Some(y) = g.read(v, have) {
                    if g.read(v, want) != Some(y) {
                        additions.push((v, want, y));
                    }
                }
            }
        }
    }
    let changed = !additions.is_empty();
    for (v, w, y) in additions {
        g.add_path(v, w, y);
    }
    changed
}

/// Alternates full folds and expansion passes until nothing changes.
pub fn close(a: &PointedAutomaton, p: &Presentation, max_edges: usize) -> Result<PointedAutomaton> {
    let (mut cur, _) = a.fold();
    loop {
        if cur.graph.num_edges() > max_edges {
            return Err(Error::EdgeBudget(max_edges));
        }
        if !expand_once(&mut cur.graph, p) {
            return Ok(cur);
        }
        cur = cur.fold().0;
    }
}

/// A Schützenberger automaton together with the element each vertex stands for.
#[derive(Clone, Debug)]
pub struct SchutzGraph {
    pub automaton: PointedAutomaton,
    /// Vertex `k` is the element `elements[k]` of the R-class, ascending.
    pub elements: Vec<Elem>,
}

impl SchutzGraph {
    pub fn vertex_of(&self, s: Elem) -> Option<Vertex> {
        self.elements.binary_search(&s).ok()
    }
}

/// The Schützenberger automaton of `s`: vertices are the R-class of `s`,
/// with an edge `x → x·g` whenever `x·g` stays in the class; initial
/// `ss⁻¹`, final `s`.
pub fn schutz_graph_of(semigroup: &FiniteInverseSemigroup, s: Elem, color: u8) -> SchutzGraph {
    let elements = semigroup.r_class_of(s);
    let pos = |x: Elem| elements.binary_search(&x).ok();
    let mut graph = InverseWordGraph::with_vertices(elements.len());
    for (i, &x) in elements.iter().enumerate() {
        for (g, &gen) in semigroup.generators().iter().enumerate() {
            if let Some(j) = pos(semigroup.mul(x, gen)) {
                graph.add_edge(i, Letter::pos(color, g), j);
            }
        }
    }
    let initial = pos(semigroup.range_idem(s)).expect("ss⁻¹ R s");
    let terminal = pos(s).expect("s R s");
    SchutzGraph { automaton: PointedAutomaton { graph, initial, terminal }, elements }
}

/// [`schutz_graph_of`] for the value of a word.
pub fn schutz_graph(semigroup: &FiniteInverseSemigroup, w: &[Letter], color: u8) -> Result<SchutzGraph> {
    Ok(schutz_graph_of(semigroup, semigroup.eval(w)?, color))
}
