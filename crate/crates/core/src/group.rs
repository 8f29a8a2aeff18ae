//! Finite group presentations: table presentations, Tietze-lite reduction,
//! abelianization invariants and coset enumeration.
//!
//! A relator is a `Vec<i32>`; generator `g` is written `g + 1` and its inverse `-(g + 1)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub type GroupWord = Vec<i32>;

/// Relators of length at most this may be used to eliminate a generator.
const MAX_ELIMINATION_LEN: usize = 3;

pub const DEFAULT_MAX_COSETS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<GroupWord>,
    /// Order of the group, when it is known from a multiplication table.
    pub order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Abelianization {
    /// Diagonal of the Smith normal form, entries `> 1`, each dividing the next.
    pub invariant_factors: Vec<u64>,
    /// Prime-power decomposition of the torsion part, ascending by prime.
    pub elementary_divisors: Vec<u64>,
    pub free_rank: usize,
}

impl Abelianization {
    pub fn order(&self) -> Option<u64> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

pub fn sym(gen: usize, inverse: bool) -> i32 {
    let g = gen as i32 + 1;
    if inverse {
        -g
    } else {
        g
    }
}

pub fn gen_of(x: i32) -> usize {
    x.unsigned_abs() as usize - 1
}

pub fn inverse(w: &[i32]) -> GroupWord {
    w.iter().rev().map(|x| -x).collect()
}

pub fn free_reduce(w: &[i32]) -> GroupWord {
    let mut out: GroupWord = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn cyclic_reduce(w: &[i32]) -> GroupWord {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.pop();
        w.remove(0);
    }
    w
}

fn sym_key(x: i32) -> (u32, bool) {
    (x.unsigned_abs(), x < 0)
}

fn word_key(w: &[i32]) -> Vec<(u32, bool)> {
    w.iter().map(|&x| sym_key(x)).collect()
}

/// Least rotation of `w` or of its inverse; equal for relators that define
/// the same normal closure by cyclic permutation and inversion.
pub fn canonical_relator(w: &[i32]) -> GroupWord {
    let w = cyclic_reduce(w);
    let inv = inverse(&w);
    let mut best: Option<GroupWord> = None;
    for base in [&w, &inv] {
        for k in 0..base.len().max(1) {
            let mut r = base[k..].to_vec();
            r.extend_from_slice(&base[..k]);
            if best.as_ref().is_none_or(|b| word_key(&r) < word_key(b)) {
                best = Some(r);
            }
        }
    }
    best.unwrap_or_default()
}

impl GroupPresentation {
    pub fn trivial() -> Self {
        GroupPresentation { generators: Vec::new(), relators: Vec::new(), order: Some(1) }
    }

    /// Generators are the non-identity elements in table order; one relator
    /// `x_a x_b = x_{ab}` per pair of non-identity elements.
    pub fn from_table(names: &[String], table: &[Vec<usize>], identity: usize) -> Self {
        let n = table.len();
        let generators = (0..n).filter(|&k| k != identity).map(|k| names[k].clone()).collect();
        let mut relators = Vec::new();
        for a in (0..n).filter(|&k| k != identity) {
            for b in (0..n).filter(|&k| k != identity) {
                let mut r = table_word(identity, a);
                r.extend(table_word(identity, b));
                r.extend(inverse(&table_word(identity, table[a][b])));
                relators.push(r);
            }
        }
        GroupPresentation { generators, relators, order: Some(n) }
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Adds a generator, suffixing the name until it is unused.
    pub fn add_generator(&mut self, name: &str) -> usize {
        let mut candidate = name.to_string();
        let mut k = 2;
        while self.generators.contains(&candidate) {
            candidate = format!("{name}_{k}");
            k += 1;
        }
        self.generators.push(candidate);
        self.generators.len() - 1
    }

    /// Free product with `other`; returns the offset of its generators.
    pub fn append(&mut self, other: &GroupPresentation) -> usize {
        let offset = self.generators.len();
        for g in &other.generators {
            self.add_generator(g);
        }
        for r in &other.relators {
            self.relators.push(shift_word(r, offset));
        }
        self.order = None;
        offset
    }

    pub fn word_to_string(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = &self.generators[gen_of(w[i])];
            let count = (j - i) as i64 * if w[i] < 0 { -1 } else { 1 };
            parts.push(if count == 1 { name.clone() } else { format!("{name}^{count}") });
            i = j;
        }
        parts.join(" ")
    }

    pub fn relator_strings(&self) -> Vec<String> {
        self.relators.iter().map(|r| self.word_to_string(r)).collect()
    }

    /// Cyclic reduction, deduplication up to rotation and inversion, deletion
    /// of generators equal to a word in the others via a relator of length at
    /// most three in which they occur once. Relators end sorted by length.
    pub fn simplify(&self) -> GroupPresentation {
        let mut p = self.clone();
        loop {
            p.normalize_relators();
            let Some((g, value)) = p.elimination() else { break };
            p.eliminate(g, &value);
        }
        p
    }

    fn normalize_relators(&mut self) {
        let set: BTreeSet<Vec<(u32, bool)>> =
            self.relators.iter().map(|r| canonical_relator(r)).filter(|r| !r.is_empty()).map(|r| word_key(&r)).collect();
        let mut rels: Vec<GroupWord> = set
            .into_iter()
            .map(|k| k.into_iter().map(|(a, neg)| if neg { -(a as i32) } else { a as i32 }).collect())
            .collect();
        rels.sort_by(|a: &GroupWord, b: &GroupWord| a.len().cmp(&b.len()).then_with(|| word_key(a).cmp(&word_key(b))));
        self.relators = rels;
    }

    /// A generator and the word it equals; the highest generator occurring
    /// once in the first eligible relator.
    fn elimination(&self) -> Option<(usize, GroupWord)> {
        for r in self.relators.iter().filter(|r| r.len() <= MAX_ELIMINATION_LEN) {
            let candidate = (0..r.len())
                .filter(|&i| r.iter().filter(|x| x.unsigned_abs() == r[i].unsigned_abs()).count() == 1)
                .max_by_key(|&i| r[i].unsigned_abs());
            if let Some(i) = candidate {
                // r = u g^ε v, so g^ε = (v u)^-1
                let mut vu = r[i + 1..].to_vec();
                vu.extend_from_slice(&r[..i]);
                let value = if r[i] > 0 { inverse(&vu) } else { vu };
                return Some((gen_of(r[i]), value));
            }
        }
        None
    }

    fn eliminate(&mut self, g: usize, value: &[i32]) {
        let value_inv = inverse(value);
        let renumber = |x: i32| -> i32 {
            let h = gen_of(x);
            let h = if h > g { h - 1 } else { h };
            sym(h, x < 0)
        };
        self.relators = self
            .relators
            .iter()
            .map(|r| {
                let mut out = Vec::new();
                for &x in r {
                    if gen_of(x) == g {
                        out.extend_from_slice(if x > 0 { value } else { &value_inv });
                    } else {
                        out.push(x);
                    }
                }
                out.into_iter().map(renumber).collect()
            })
            .collect();
        self.generators.remove(g);
    }

    pub fn abelianization(&self) -> Abelianization {
        let cols = self.generators.len();
        let matrix: Vec<Vec<i128>> = self
            .relators
            .iter()
            .map(|r| {
                let mut row = vec![0i128; cols];
                for &x in r {
                    row[gen_of(x)] += if x > 0 { 1 } else { -1 };
                }
                row
            })
            .collect();
        let diagonal = smith_diagonal(matrix, cols);
        let rank = diagonal.len();
        let invariant_factors: Vec<u64> = diagonal.into_iter().map(|d| d as u64).filter(|&d| d > 1).collect();
        let mut elementary_divisors: Vec<(u64, u64)> = Vec::new();
        for &d in &invariant_factors {
            elementary_divisors.extend(prime_powers(d));
        }
        elementary_divisors.sort();
        Abelianization {
            invariant_factors,
            elementary_divisors: elementary_divisors.into_iter().map(|(_, q)| q).collect(),
            free_rank: cols - rank,
        }
    }

    /// Order by Todd–Coxeter enumeration of the cosets of the trivial
    /// subgroup; `None` when more than `max_cosets` cosets are defined.
    pub fn enumerate_order(&self, max_cosets: usize) -> Option<usize> {
        let rels: Vec<GroupWord> = self.relators.iter().map(|r| cyclic_reduce(r)).filter(|r| !r.is_empty()).collect();
        CosetTable::new(self.generators.len(), max_cosets).run(&rels)
    }

    /// Order from the table when known, otherwise by enumeration.
    pub fn finite_order(&self, max_cosets: usize) -> Option<usize> {
        self.order.or_else(|| self.enumerate_order(max_cosets))
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pad = |s: String| if s.is_empty() { " ".to_string() } else { format!(" {s} ") };
        write!(f, "<{}|{}>", pad(self.generators.join(", ")), pad(self.relator_strings().join(", ")))
    }
}

/// The word of table element `k` in a table presentation.
pub fn table_word(identity: usize, k: usize) -> GroupWord {
    match k.cmp(&identity) {
        std::cmp::Ordering::Equal => Vec::new(),
        std::cmp::Ordering::Less => vec![sym(k, false)],
        std::cmp::Ordering::Greater => vec![sym(k - 1, false)],
    }
}

pub fn shift_word(w: &[i32], offset: usize) -> GroupWord {
    w.iter().map(|&x| sym(gen_of(x) + offset, x < 0)).collect()
}

fn prime_powers(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            out.push((p, q));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// Absolute values of the nonzero Smith normal form diagonal.
fn smith_diagonal(mut m: Vec<Vec<i128>>, cols: usize) -> Vec<i128> {
    let rows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = min_nonzero(&m, (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j)))) else { break };
        m.swap(t, pr);
        swap_cols(&mut m, t, pc);
        loop {
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                let cells = (t..rows).map(|i| (i, t)).chain((t + 1..cols).map(|j| (t, j)));
                let (pr, pc) = min_nonzero(&m, cells).expect("pivot is nonzero");
                m.swap(t, pr);
                swap_cols(&mut m, t, pc);
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        m[t][j] += m[i][j];
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

fn min_nonzero(m: &[Vec<i128>], cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    cells.filter(|&(i, j)| m[i][j] != 0).min_by_key(|&(i, j)| (m[i][j].abs(), i, j))
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

const UNDEF: usize = usize::MAX;

/// HLT coset enumeration with coincidence processing.
struct CosetTable {
    cols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    max_cosets: usize,
}

impl CosetTable {
    fn new(gens: usize, max_cosets: usize) -> Self {
        CosetTable { cols: 2 * gens, table: vec![vec![UNDEF; 2 * gens]], parent: vec![0], max_cosets }
    }

    fn col(x: i32) -> usize {
        2 * gen_of(x) + usize::from(x < 0)
    }

    fn define(&mut self, c: usize, x: usize) {
        let n = self.table.len();
        self.table.push(vec![UNDEF; self.cols]);
        self.parent.push(n);
        self.table[c][x] = n;
        self.table[n][x ^ 1] = c;
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut k = c;
        while self.parent[k] != r {
            let next = self.parent[k];
            self.parent[k] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (x, y) = (self.rep(a), self.rep(b));
        if x != y {
            let (lo, hi) = (x.min(y), x.max(y));
            self.parent[hi] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let g = queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.table[g][x];
                if d == UNDEF {
                    continue;
                }
                self.table[d][x ^ 1] = UNDEF;
                let (mu, nu) = (self.rep(g), self.rep(d));
                if self.table[mu][x] != UNDEF {
                    let t = self.table[mu][x];
                    self.merge(nu, t, &mut queue);
                } else if self.table[nu][x ^ 1] != UNDEF {
                    let t = self.table[nu][x ^ 1];
                    self.merge(mu, t, &mut queue);
                } else {
                    self.table[mu][x] = nu;
                    self.table[nu][x ^ 1] = mu;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len());
        loop {
            while i < j && self.table[f][w[i]] != UNDEF {
                f = self.table[f][w[i]];
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j > i && self.table[b][w[j - 1] ^ 1] != UNDEF {
                b = self.table[b][w[j - 1] ^ 1];
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return;
            }
            if j == i + 1 {
                self.table[f][w[i]] = b;
                self.table[b][w[i] ^ 1] = f;
                return;
            }
            self.define(f, w[i]);
        }
    }

    fn run(mut self, relators: &[GroupWord]) -> Option<usize> {
        let rels: Vec<Vec<usize>> = relators.iter().map(|r| r.iter().map(|&x| Self::col(x)).collect()).collect();
        let mut c = 0;
        while c < self.table.len() {
            for r in &rels {
                if self.parent[c] != c {
                    break;
                }
                self.scan_and_fill(c, r);
            }
            if self.parent[c] == c {
                for x in 0..self.cols {
                    if self.table[c][x] == UNDEF {
                        self.define(c, x);
                    }
                }
            }
            if self.table.len() > self.max_cosets {
                return None;
            }
            c += 1;
        }
        Some((0..self.table.len()).filter(|&k| self.parent[k] == k).count())
    }
}
