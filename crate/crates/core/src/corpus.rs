//! Small named semigroups and amalgams used by tests, the CLI and the docs.

use std::collections::BTreeMap;

use crate::amalgam::Amalgam;
use crate::fis::{Elem, FiniteInverseSemigroup};

fn owned(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn gens_by_name(names: &[&str], gens: &[&str]) -> Vec<Elem> {
    gens.iter()
        .map(|g| names.iter().position(|n| n == g).expect("generator name"))
        .collect()
}

/// `Z_n` with element `k` named `names[k]`; generated by all elements.
pub fn cyclic_group(name: &str, n: usize, names: &[&str]) -> FiniteInverseSemigroup {
    let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteInverseSemigroup::from_table(name, owned(names), mul, None).expect("cyclic group")
}

/// `Z_n` with a restricted generating set.
pub fn cyclic_group_gens(name: &str, n: usize, names: &[&str], gens: &[&str]) -> FiniteInverseSemigroup {
    let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteInverseSemigroup::from_table(name, owned(names), mul, Some(gens_by_name(names, gens)))
        .expect("cyclic group")
}

/// Chain semilattice `names[0] > names[1] > …`; the product is the lower element.
pub fn chain(name: &str, names: &[&str]) -> FiniteInverseSemigroup {
    let n = names.len();
    let mul = (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
    FiniteInverseSemigroup::from_table(name, owned(names), mul, None).expect("chain")
}

/// Closes `seeds` under composition `p·q = q ∘ p` and names each element by
/// its shortest-lex word over the seed names (`"1"` for the identity).
fn permutation_group(name: &str, seeds: &[(&str, Vec<usize>)]) -> FiniteInverseSemigroup {
    let degree = seeds[0].1.len();
    let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { p.iter().map(|&x| q[x]).collect() };
    let identity: Vec<usize> = (0..degree).collect();
    let mut elems: Vec<Vec<usize>> = vec![identity.clone()];
    let mut names: Vec<String> = vec!["1".into()];
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(identity, 0)]);
    let mut i = 0;
    while i < elems.len() {
        for (sname, sp) in seeds {
            let next = compose(&elems[i], sp);
            if !index.contains_key(&next) {
                index.insert(next.clone(), elems.len());
                let nm = if i == 0 { sname.to_string() } else { format!("{}{}", names[i], sname) };
                names.push(nm);
                elems.push(next);
            }
        }
        i += 1;
    }
    let mul = elems
        .iter()
        .map(|p| elems.iter().map(|q| index[&compose(p, q)]).collect())
        .collect();
    let gens = seeds.iter().map(|(_, p)| index[p]).collect();
    FiniteInverseSemigroup::from_table(name, names, mul, Some(gens)).expect("permutation group")
}

/// Dihedral group of order 8 generated by two reflections `r`, `s` with `rs` of order 4.
pub fn dihedral_d4() -> FiniteInverseSemigroup {
    // symmetries of a square with corners 0..4 in cyclic order
    permutation_group("D4", &[("r", vec![1, 0, 3, 2]), ("s", vec![0, 3, 2, 1])])
}

/// Partial injections of `{1,2}` composed left to right.
fn partial_injections() -> (Vec<&'static str>, Vec<Vec<Elem>>) {
    // maps as images of points 1 and 2, `None` = undefined
    let elems: [(&str, [Option<u8>; 2]); 7] = [
        ("id", [Some(1), Some(2)]),
        ("t", [Some(2), Some(1)]),
        ("e1", [Some(1), None]),
        ("e2", [None, Some(2)]),
        ("x", [Some(2), None]),
        ("y", [None, Some(1)]),
        ("0", [None, None]),
    ];
    let apply = |m: &[Option<u8>; 2], p: Option<u8>| p.and_then(|p| m[(p - 1) as usize]);
    let mul = elems
        .iter()
        .map(|(_, a)| {
            elems
                .iter()
                .map(|(_, b)| {
                    let c = [apply(b, a[0]), apply(b, a[1])];
                    elems.iter().position(|(_, m)| *m == c).expect("closed")
                })
                .collect()
        })
        .collect();
    (elems.iter().map(|(n, _)| *n).collect(), mul)
}

/// The symmetric inverse monoid on two points (7 elements), generated by all elements.
pub fn symmetric_inverse_monoid_2() -> FiniteInverseSemigroup {
    let (names, mul) = partial_injections();
    FiniteInverseSemigroup::from_table("I2", owned(&names), mul, None).expect("I2")
}

/// The symmetric inverse monoid on two points generated by `t` (transposition) and `x` (1 ↦ 2).
pub fn symmetric_inverse_monoid_2_gens() -> FiniteInverseSemigroup {
    let (names, mul) = partial_injections();
    let gens = gens_by_name(&names, &["t", "x"]);
    FiniteInverseSemigroup::from_table("I2", owned(&names), mul, Some(gens)).expect("I2")
}

/// The semigroups whose idempotents are checked against their automorphism groups.
pub fn semigroup_corpus() -> Vec<FiniteInverseSemigroup> {
    vec![
        cyclic_group_gens("Z2", 2, &["1", "a"], &["a"]),
        cyclic_group_gens("Z3", 3, &["1", "b", "bb"], &["b"]),
        dihedral_d4(),
        symmetric_inverse_monoid_2_gens(),
        chain("C2", &["e", "f"]),
        chain("C3", &["a", "b", "c"]),
    ]
}

/// `[Z2, Z3; {1}]` with generators `a` and `b`.
pub fn z2_z3_trivial() -> Amalgam {
    let s1 = cyclic_group_gens("Z2", 2, &["1", "a"], &["a"]);
    let s2 = cyclic_group_gens("Z3", 3, &["1", "b", "bb"], &["b"]);
    let u = cyclic_group("U", 1, &["1"]);
    Amalgam::new(s1, s2, u, vec![0], vec![0]).expect("amalgam")
}

/// `[Z2, Z2; Z2]` with generators `a` and `b`, both identified with `u`.
pub fn z2_z2_z2() -> Amalgam {
    let s1 = cyclic_group_gens("Z2a", 2, &["1", "a"], &["a"]);
    let s2 = cyclic_group_gens("Z2b", 2, &["1", "b"], &["b"]);
    let u = cyclic_group("U", 2, &["1", "u"]);
    Amalgam::new(s1, s2, u, vec![0, 1], vec![0, 1]).expect("amalgam")
}

/// Two 2-chains `e1 > f1`, `e2 > f2` amalgamated over their bottoms.
pub fn chain2_amalgam() -> Amalgam {
    let s1 = chain("C2a", &["e1", "f1"]);
    let s2 = chain("C2b", &["e2", "f2"]);
    let u = chain("U", &["f"]);
    Amalgam::new(s1, s2, u, vec![1], vec![1]).expect("amalgam")
}

/// Two 3-chains over a common 2-chain `p > q`: in the first factor `U` is the
/// lower pair, in the second it is the top and the bottom.
pub fn chain3_amalgam() -> Amalgam {
    let s1 = chain("C3a", &["a1", "b1", "c1"]);
    let s2 = chain("C3b", &["a2", "b2", "c2"]);
    let u = chain("U", &["p", "q"]);
    Amalgam::new(s1, s2, u, vec![1, 2], vec![0, 2]).expect("amalgam")
}

/// `[I2, Z2; Z2]`: the transposition of `I2` identified with the generator of `Z2`.
pub fn i2_z2_amalgam() -> Amalgam {
    let s1 = symmetric_inverse_monoid_2_gens();
    let s2 = cyclic_group_gens("Z2", 2, &["1", "a"], &["a"]);
    let u = cyclic_group("U", 2, &["1", "u"]);
    let id = s1.find("id").unwrap();
    let t = s1.find("t").unwrap();
    Amalgam::new(s1, s2, u, vec![id, t], vec![0, 1]).expect("amalgam")
}

/// `[I2, I2'; {0, e1}]`: two copies of `I2` glued along the idempotents `0 < e1`;
/// names in the second copy carry a prime.
pub fn i2_i2_amalgam() -> Amalgam {
    let s1 = symmetric_inverse_monoid_2_gens();
    let (names, mul) = partial_injections();
    let renamed: Vec<String> = names.iter().map(|n| format!("{n}'")).collect();
    let gens = gens_by_name(&names, &["t", "x"]);
    let s2 = FiniteInverseSemigroup::from_table("I2'", renamed, mul, Some(gens)).expect("I2");
    let u = chain("U", &["p", "q"]);
    let e1 = s1.find("e1").unwrap();
    let zero = s1.find("0").unwrap();
    Amalgam::new(s1, s2, u, vec![e1, zero], vec![e1, zero]).expect("amalgam")
}

/// Every named amalgam, in a fixed order.
pub fn amalgam_corpus() -> Vec<(&'static str, Amalgam)> {
    vec![
        ("z2-z3", z2_z3_trivial()),
        ("z2-z2", z2_z2_z2()),
        ("chain2", chain2_amalgam()),
        ("chain3", chain3_amalgam()),
        ("i2-z2", i2_z2_amalgam()),
        ("i2-i2", i2_i2_amalgam()),
    ]
}

pub fn amalgam_by_name(name: &str) -> Option<Amalgam> {
    amalgam_corpus().into_iter().find(|(n, _)| *n == name).map(|(_, a)| a)
}
