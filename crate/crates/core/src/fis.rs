//! Finite inverse semigroups given by multiplication tables.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// Dense element id, `0..n`.
pub type Elem = usize;

/// A validated finite inverse semigroup.
///
/// Immutable after construction. The generator list is the presentation
/// alphabet; every element has a canonical word over it (see
/// [`FiniteInverseSemigroup::canonical_word`]).
#[derive(Clone, Debug)]
pub struct FiniteInverseSemigroup {
    name: String,
    names: Vec<String>,
    mul: Vec<Vec<Elem>>,
    inv: Vec<Elem>,
    idempotent: Vec<bool>,
    generators: Vec<Elem>,
    canonical: Vec<Vec<(usize, bool)>>,
}

/// Green's relations as class ids per element. For finite semigroups `D = J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenData {
    pub r_class: Vec<usize>,
    pub l_class: Vec<usize>,
    pub h_class: Vec<usize>,
    pub d_class: Vec<usize>,
}

impl GreenData {
    pub fn j_class(&self) -> &[usize] {
        &self.d_class
    }

    pub fn class_sizes(classes: &[usize]) -> Vec<usize> {
        let k = classes.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0; k];
        for &c in classes {
            sizes[c] += 1;
        }
        sizes
    }
}

/// A maximal subgroup `H_e` with its multiplication restricted to it.
#[derive(Clone, Debug, Serialize)]
pub struct Subgroup {
    /// Semigroup ids of the members, ascending.
    pub elements: Vec<Elem>,
    /// Multiplication on local indices into `elements`.
    pub table: Vec<Vec<usize>>,
    /// Local index of the identity.
    pub identity: usize,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn local(&self, x: Elem) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }
}

fn dense_classes(key: impl Fn(usize) -> usize, n: usize) -> Vec<usize> {
    let mut seen: Vec<(usize, usize)> = Vec::new();
    (0..n)
        .map(|a| {
            let k = key(a);
            match seen.iter().find(|(kk, _)| *kk == k) {
                Some(&(_, id)) => id,
                None => {
                    let id = seen.len();
                    seen.push((k, id));
                    id
                }
            }
        })
        .collect()
}

impl FiniteInverseSemigroup {
    /// Validates a table and derives inverses. `generators` defaults to all elements.
    pub fn from_table(
        name: impl Into<String>,
        names: Vec<String>,
        mul: Vec<Vec<Elem>>,
        generators: Option<Vec<Elem>>,
    ) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::EmptyTable);
        }
        for (row, r) in mul.iter().enumerate() {
            if r.len() != n {
                return Err(Error::RaggedTable { row, len: r.len(), expected: n });
            }
            for (col, &value) in r.iter().enumerate() {
                if value >= n {
                    return Err(Error::EntryOutOfRange { row, col, value });
                }
            }
        }
        let names = if names.len() == n { names } else { (0..n).map(|i| i.to_string()).collect() };
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a][b];
                for c in 0..n {
                    if mul[ab][c] != mul[a][mul[b][c]] {
                        return Err(Error::NotAssociative(
                            names[a].clone(),
                            names[b].clone(),
                            names[c].clone(),
                        ));
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            let cands: Vec<Elem> = (0..n)
                .filter(|&b| mul[mul[a][b]][a] == a && mul[mul[b][a]][b] == b)
                .collect();
            if cands.len() != 1 {
                return Err(Error::NoUniqueInverse(names[a].clone()));
            }
            inv.push(cands[0]);
        }
        let idempotent: Vec<bool> = (0..n).map(|a| mul[a][a] == a).collect();
        for e in 0..n {
            for f in 0..n {
                if idempotent[e] && idempotent[f] && mul[e][f] != mul[f][e] {
                    return Err(Error::IdempotentsDontCommute(names[e].clone(), names[f].clone()));
                }
            }
        }
        let generators = generators.unwrap_or_else(|| (0..n).collect());
        let mut s = FiniteInverseSemigroup {
            name: name.into(),
            names,
            mul,
            inv,
            idempotent,
            generators,
            canonical: Vec::new(),
        };
        s.canonical = s.compute_canonical_words()?;
        Ok(s)
    }

    /// Shortest-lex words: first over positive generators, then over
    /// `X ∪ X⁻¹` for elements the positive letters do not reach.
    fn compute_canonical_words(&self) -> Result<Vec<Vec<(usize, bool)>>> {
        let n = self.size();
        let mut words: Vec<Option<Vec<(usize, bool)>>> = vec![None; n];
        let positive: Vec<(usize, bool)> = (0..self.generators.len()).map(|g| (g, false)).collect();
        let all: Vec<(usize, bool)> = positive
            .iter()
            .copied()
            .chain((0..self.generators.len()).map(|g| (g, true)))
            .collect();
        for letters in [&positive, &all] {
            let mut local: Vec<Option<Vec<(usize, bool)>>> = vec![None; n];
            let mut queue = VecDeque::new();
            for &l in letters.iter() {
                let v = self.letter_value_raw(l);
                if local[v].is_none() {
                    local[v] = Some(vec![l]);
                    queue.push_back(v);
                }
            }
            while let Some(s) = queue.pop_front() {
                let w = local[s].clone().unwrap();
                for &l in letters.iter() {
                    let t = self.mul[s][self.letter_value_raw(l)];
                    if local[t].is_none() {
                        let mut w2 = w.clone();
                        w2.push(l);
                        local[t] = Some(w2);
                        queue.push_back(t);
                    }
                }
            }
            for (slot, found) in words.iter_mut().zip(local) {
                if slot.is_none() {
                    *slot = found;
                }
            }
        }
        words
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::GeneratorsDontGenerate(self.names[i].clone())))
            .collect()
    }

    fn letter_value_raw(&self, (g, inverse): (usize, bool)) -> Elem {
        let x = self.generators[g];
        if inverse {
            self.inv[x]
        } else {
            x
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.mul.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a][b]
    }

    pub fn table(&self) -> &[Vec<Elem>] {
        &self.mul
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a]
    }

    pub fn is_idempotent(&self, a: Elem) -> bool {
        self.idempotent[a]
    }

    pub fn idempotents(&self) -> Vec<Elem> {
        self.elements().filter(|&a| self.idempotent[a]).collect()
    }

    pub fn element_name(&self, a: Elem) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn find(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    /// `a a⁻¹`
    pub fn range_idem(&self, a: Elem) -> Elem {
        self.mul[a][self.inv[a]]
    }

    /// `a⁻¹ a`
    pub fn domain_idem(&self, a: Elem) -> Elem {
        self.mul[self.inv[a]][a]
    }

    pub fn letter_value(&self, l: Letter) -> Elem {
        self.letter_value_raw((l.gen, l.inverse))
    }

    /// Evaluates a word; letter colours are ignored.
    pub fn eval(&self, w: &[Letter]) -> Result<Elem> {
        let (first, rest) = w.split_first().ok_or(Error::EmptyWord)?;
        if first.gen >= self.generators.len() {
            return Err(Error::BadWord(format!("{first}")));
        }
        let mut acc = self.letter_value(*first);
        for l in rest {
            if l.gen >= self.generators.len() {
                return Err(Error::BadWord(format!("{l}")));
            }
            acc = self.mul[acc][self.letter_value(*l)];
        }
        Ok(acc)
    }

    /// Canonical word of `s`, coloured `color`.
    pub fn canonical_word(&self, s: Elem, color: u8) -> Word {
        self.canonical[s].iter().map(|&(g, inv)| Letter::new(color, g, inv)).collect()
    }

    pub fn green(&self) -> GreenData {
        let n = self.size();
        let r_class = dense_classes(|a| self.range_idem(a), n);
        let l_class = dense_classes(|a| self.domain_idem(a), n);
        let h_class = dense_classes(|a| r_class[a] * n + l_class[a], n);
        // D = R ∨ L: a D b iff the domain idempotent of a is D-linked to the
        // range idempotent of b through some element; union-find on R and L.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if r_class[a] == r_class[b] || l_class[a] == l_class[b] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let d_class = dense_classes(|a| find(&mut parent.clone(), a), n);
        GreenData { r_class, l_class, h_class, d_class }
    }

    /// The H-class of `e` with the induced multiplication.
    pub fn maximal_subgroup(&self, e: Elem) -> Result<Subgroup> {
        if !self.is_idempotent(e) {
            return Err(Error::NotIdempotent(self.names[e].clone()));
        }
        let elements: Vec<Elem> = self
            .elements()
            .filter(|&a| self.range_idem(a) == e && self.domain_idem(a) == e)
            .collect();
        let pos = |x: Elem| elements.binary_search(&x).expect("H-class closed under product");
        let table = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| pos(self.mul[a][b])).collect())
            .collect();
        let identity = pos(e);
        Ok(Subgroup { elements, table, identity })
    }

    /// `a ≤ b` iff `a = e b` for some idempotent `e`.
    pub fn natural_order(&self, a: Elem, b: Elem) -> bool {
        self.elements().any(|e| self.idempotent[e] && self.mul[e][b] == a)
    }

    /// Greatest lower bound of idempotents under the natural order.
    pub fn meet(&self, e: Elem, f: Elem) -> Elem {
        self.mul[e][f]
    }

    /// Every H-class is trivial.
    pub fn is_combinatorial(&self) -> bool {
        let g = self.green();
        GreenData::class_sizes(&g.h_class).iter().all(|&s| s == 1)
    }

    /// The R-class of `a`, ascending.
    pub fn r_class_of(&self, a: Elem) -> Vec<Elem> {
        let e = self.range_idem(a);
        self.elements().filter(|&s| self.range_idem(s) == e).collect()
    }

    pub fn d_related(&self, a: Elem, b: Elem) -> bool {
        let g = self.green();
        g.d_class[a] == g.d_class[b]
    }
}

/// An injective homomorphism `U → S`.
#[derive(Clone, Debug)]
pub struct SubsemigroupEmbedding {
    map: Vec<Elem>,
    preimage: Vec<Option<Elem>>,
}

impl SubsemigroupEmbedding {
    pub fn new(
        source: &FiniteInverseSemigroup,
        target: &FiniteInverseSemigroup,
        map: Vec<Elem>,
    ) -> Result<Self> {
        if map.len() != source.size() {
            return Err(Error::EmbeddingArity { got: map.len(), expected: source.size() });
        }
        let mut preimage = vec![None; target.size()];
        for (u, &s) in map.iter().enumerate() {
            if s >= target.size() {
                return Err(Error::EntryOutOfRange { row: u, col: 0, value: s });
            }
            if let Some(prev) = preimage[s] {
                return Err(Error::NotInjective(
                    source.element_name(prev).to_string(),
                    source.element_name(u).to_string(),
                ));
            }
            preimage[s] = Some(u);
        }
        for u in source.elements() {
            for v in source.elements() {
                if map[source.mul(u, v)] != target.mul(map[u], map[v]) {
                    return Err(Error::NotHomomorphism(
                        source.element_name(u).to_string(),
                        source.element_name(v).to_string(),
                    ));
                }
            }
        }
        Ok(SubsemigroupEmbedding { map, preimage })
    }

    pub fn apply(&self, u: Elem) -> Elem {
        self.map[u]
    }

    pub fn preimage(&self, s: Elem) -> Option<Elem> {
        self.preimage[s]
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn z2_inverse_is_identity() {
        let z2 = corpus::cyclic_group("Z2", 2, &["1", "a"]);
        assert_eq!((0..2).map(|a| z2.inv(a)).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn chain_inverse_is_identity() {
        let c = corpus::chain("C2", &["e", "f"]);
        assert!(c.elements().all(|a| c.inv(a) == a));
    }

    #[test]
    fn left_zero_semigroup_rejected() {
        let err = FiniteInverseSemigroup::from_table("LZ", names(&["p", "q"]), vec![vec![0, 0], vec![1, 1]], None)
            .unwrap_err();
        assert!(matches!(err, Error::NoUniqueInverse(_)));
    }

    #[test]
    fn non_associative_rejected() {
        // a·a = b, all other products a: (aa)b = a but a(ab) = b
        let t = vec![vec![1, 0], vec![0, 0]];
        let err = FiniteInverseSemigroup::from_table("bad", names(&["a", "b"]), t, None).unwrap_err();
        assert!(matches!(err, Error::NotAssociative(..)), "{err:?}");
    }

    #[test]
    fn out_of_range_entry() {
        let err = FiniteInverseSemigroup::from_table("bad", vec![], vec![vec![3]], None).unwrap_err();
        assert!(matches!(err, Error::EntryOutOfRange { .. }));
    }

    #[test]
    fn green_group_and_semilattice() {
        let z3 = corpus::cyclic_group("Z3", 3, &["1", "b", "bb"]);
        let g = z3.green();
        assert!(g.d_class.iter().all(|&c| c == 0));
        assert!(g.h_class.iter().all(|&c| c == 0));
        let c = corpus::chain("C2", &["e", "f"]);
        let g = c.green();
        assert_eq!(GreenData::class_sizes(&g.d_class), vec![1, 1]);
        assert_eq!(GreenData::class_sizes(&g.h_class), vec![1, 1]);
    }

    #[test]
    fn green_i2_by_brute_force() {
        let i2 = corpus::symmetric_inverse_monoid_2();
        let g = i2.green();
        // brute-force D: a D b iff some c has c c⁻¹ = a a⁻¹ and c⁻¹ c = b⁻¹ b
        for a in i2.elements() {
            for b in i2.elements() {
                let oracle = i2
                    .elements()
                    .any(|c| i2.range_idem(c) == i2.range_idem(a) && i2.domain_idem(c) == i2.domain_idem(b));
                assert_eq!(oracle, g.d_class[a] == g.d_class[b], "{a} {b}");
            }
        }
        let mut sizes = GreenData::class_sizes(&g.d_class);
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 4]);
        let id = i2.find("id").unwrap();
        let t = i2.find("t").unwrap();
        let h: Vec<_> = i2.elements().filter(|&x| g.h_class[x] == g.h_class[id]).collect();
        let mut expect = vec![id, t];
        expect.sort();
        assert_eq!(h, expect);
        assert_eq!(i2.green(), g);
    }

    #[test]
    fn maximal_subgroups() {
        let c = corpus::chain("C2", &["e", "f"]);
        assert_eq!(c.maximal_subgroup(1).unwrap().order(), 1);
        let i2 = corpus::symmetric_inverse_monoid_2();
        let id = i2.find("id").unwrap();
        assert_eq!(i2.maximal_subgroup(id).unwrap().order(), 2);
        let d4 = corpus::dihedral_d4();
        assert_eq!(d4.maximal_subgroup(d4.find("1").unwrap()).unwrap().order(), 8);
        let x = i2.find("x").unwrap();
        assert!(matches!(i2.maximal_subgroup(x), Err(Error::NotIdempotent(_))));
    }

    #[test]
    fn natural_order_examples() {
        let c = corpus::chain("C2", &["e", "f"]);
        assert!(c.natural_order(1, 0));
        assert!(!c.natural_order(0, 1));
        let z3 = corpus::cyclic_group("Z3", 3, &["1", "b", "bb"]);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(z3.natural_order(a, b), a == b);
            }
        }
        let i2 = corpus::symmetric_inverse_monoid_2();
        assert!(i2.natural_order(i2.find("e1").unwrap(), i2.find("id").unwrap()));
    }

    #[test]
    fn combinatorial_flags() {
        assert!(corpus::chain("C3", &["a", "b", "c"]).is_combinatorial());
        assert!(!corpus::cyclic_group("Z2", 2, &["1", "a"]).is_combinatorial());
        assert!(!corpus::symmetric_inverse_monoid_2().is_combinatorial());
    }

    #[test]
    fn embeddings() {
        let triv = corpus::cyclic_group("U", 1, &["1"]);
        let z2 = corpus::cyclic_group("Z2", 2, &["1", "a"]);
        assert!(SubsemigroupEmbedding::new(&triv, &z2, vec![0]).is_ok());
        let c2 = corpus::chain("C2", &["e", "f"]);
        let c3 = corpus::chain("C3", &["x", "y", "z"]);
        let bottom = corpus::chain("B", &["f"]);
        assert!(SubsemigroupEmbedding::new(&bottom, &c3, vec![2]).is_ok());
        assert!(matches!(
            SubsemigroupEmbedding::new(&c2, &c3, vec![0, 0]),
            Err(Error::NotInjective(..))
        ));
        // e ↦ f, f ↦ e reverses the order: not a homomorphism
        assert!(matches!(
            SubsemigroupEmbedding::new(&c2, &c3, vec![2, 0]),
            Err(Error::NotHomomorphism(..))
        ));
    }

    #[test]
    fn canonical_words_prefer_positive_letters() {
        let z3 = corpus::cyclic_group_gens("Z3", 3, &["1", "b", "bb"], &["b"]);
        assert_eq!(z3.canonical_word(0, 2).len(), 3);
        let i2 = corpus::symmetric_inverse_monoid_2_gens();
        for s in i2.elements() {
            assert_eq!(i2.eval(&i2.canonical_word(s, 1)).unwrap(), s);
        }
    }
}
