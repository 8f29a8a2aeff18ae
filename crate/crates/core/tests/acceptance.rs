//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use opuntia::amalgam::Amalgam;
use opuntia::bassserre::{
    fundamental_presentation, lift_automorphism, maximal_subgroup_presentation, quotient_graph, SubgroupCase,
};
use opuntia::corpus;
use opuntia::fis::FiniteInverseSemigroup;
use opuntia::graph::{automorphisms, rooted_iso, PointedAutomaton};
use opuntia::group::DEFAULT_MAX_COSETS;
use opuntia::host::{
    algebraic_finiteness_check, classify_finiteness, complete_host_union, host_automorphisms, Finiteness, HostType,
};
use opuntia::opuntoid::{construction5, core, expand_to_depth, validate_opuntoid, Budget, Decomposition, WordSolver};
use opuntia::stephen::{close, schutz_graph, schutz_graph_of, Presentation};
use opuntia::word::Letter;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const LIMIT_DUALITY: Duration = Duration::from_secs(5);
const LIMIT_STEPHEN: Duration = Duration::from_secs(60);
const LIMIT_WORD_PROBLEM: Duration = Duration::from_secs(120);
const STEPHEN_WORD_LEN: usize = 4;
const COMBINATORIAL_WORD_LEN: usize = 3;
const RANDOM_AMALGAMS: usize = 20;
const RANDOM_MAX_SIZE: usize = 5;
const RANDOM_WORD_LEN: usize = 2;
const VALIDATOR_WORD_LEN: usize = 3;
const VALIDATOR_DEPTH: usize = 2;
const WORD_PROBLEM_LEN: usize = 5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, what: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<Duration, String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

/// Nonempty words up to `max` letters over the given alphabet, shortlex.
fn words(letters: &[Letter], max: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for &l in letters {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn letters_of(s: &FiniteInverseSemigroup, color: u8) -> Vec<Letter> {
    (0..s.generators().len()).flat_map(|g| [Letter::new(color, g, false), Letter::new(color, g, true)]).collect()
}

fn amalgam_letters(a: &Amalgam) -> Vec<Letter> {
    let mut l = letters_of(a.factor(1), 1);
    l.extend(letters_of(a.factor(2), 2));
    l
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for s in corpus::semigroup_corpus() {
        for e in s.idempotents() {
            let sg = schutz_graph_of(&s, e, 1);
            let auts = automorphisms(&sg.automaton.graph, sg.automaton.initial).len();
            let h = s.maximal_subgroup(e).map_err(|e| e.to_string())?.order();
            check(auts == h, format!("{} at {}: |Aut| = {auts}, |H| = {h}", s.name(), s.element_name(e)))?;
            checked += 1;
        }
    }
    let t = within(start, LIMIT_DUALITY)?;
    Ok(format!("{checked} idempotents, {t:.2?}"))
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for s in [corpus::symmetric_inverse_monoid_2_gens(), corpus::dihedral_d4()] {
        let p = Presentation::from_table(&s, 1);
        for w in words(&letters_of(&s, 1), STEPHEN_WORD_LEN) {
            let closed = close(&PointedAutomaton::linear(&w), &p, 100_000).map_err(|e| e.to_string())?;
            let sg = schutz_graph(&s, &w, 1).map_err(|e| e.to_string())?.automaton;
            let iso = rooted_iso(&closed.graph, closed.initial, &sg.graph, sg.initial);
            let ok = iso.as_ref().is_some_and(|m| m[closed.terminal] == sg.terminal);
            check(ok, format!("{}: word of length {} not isomorphic", s.name(), w.len()))?;
            checked += 1;
        }
    }
    let t = within(start, LIMIT_STEPHEN)?;
    Ok(format!("{checked} words, {t:.2?}"))
}

fn criterion3() -> Outcome {
    let d4 = corpus::dihedral_d4();
    let find = |n: &str| d4.find(n).ok_or(format!("no element {n}"));
    let (one, r, s) = (find("1")?, find("r")?, find("s")?);
    let sr = d4.mul(s, r);
    let sr2 = d4.mul(sr, sr);
    let cayley = schutz_graph_of(&d4, one, 1);
    let v = |x| cayley.vertex_of(x).expect("D4 element");
    let (delta, pi) = cayley.automaton.graph.fold_identifying(&[(v(one), v(s))]);
    let auts = automorphisms(&delta, 0);
    check(auts.len() == 2, format!("|Aut(Δ)| = {}", auts.len()))?;
    let sigma_aut = auts.iter().find(|p| p.iter().enumerate().any(|(i, &x)| i != x)).ok_or("no nontrivial automorphism")?;
    let report = lift_automorphism(&cayley.automaton, &delta, &pi, sigma_aut).map_err(|e| e.to_string())?;
    check(report.h.len() < 8, format!("|H| = {}", report.h.len()))?;
    check(report.index_matches && report.surjective, "Aut(Δ) is not H/N")?;
    let images: BTreeSet<usize> = report.lifts.iter().map(|p| p[v(one)]).collect();
    check(images.contains(&v(sr2)), "(sr)^2 is not a lift")?;
    let h_images: BTreeSet<usize> = report.h.iter().map(|p| p[v(one)]).collect();
    check(!h_images.contains(&v(sr)), "sr lies in H")?;
    Ok(format!("|Aut(Δ)| = 2, |H| = {}, |N| = {}, (sr)^2 lifts σ, sr ∉ H", report.h.len(), report.n.len()))
}

/// A semilattice of subsets of `{0, 1, 2, 3}` under intersection.
fn subset_semilattice(name: &str, prefix: &str, sets: &BTreeSet<u8>) -> FiniteInverseSemigroup {
    let elems: Vec<u8> = sets.iter().copied().collect();
    let names = elems.iter().map(|m| format!("{prefix}{m}")).collect();
    let mul = elems.iter().map(|&x| elems.iter().map(|&y| elems.iter().position(|&z| z == x & y).unwrap()).collect()).collect();
    FiniteInverseSemigroup::from_table(name, names, mul, None).expect("semilattice")
}

fn close_meets(sets: &mut BTreeSet<u8>) {
    loop {
        let extra: Vec<u8> =
            sets.iter().flat_map(|&x| sets.iter().map(move |&y| x & y)).filter(|z| !sets.contains(z)).collect();
        if extra.is_empty() {
            return;
        }
        sets.extend(extra);
    }
}

fn random_semilattice_amalgam(rng: &mut StdRng) -> Amalgam {
    loop {
        let mut u: BTreeSet<u8> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..16)).collect();
        close_meets(&mut u);
        let mut side = || {
            let mut s = u.clone();
            for _ in 0..rng.gen_range(0..=3) {
                s.insert(rng.gen_range(0..16));
            }
            close_meets(&mut s);
            s
        };
        let (s1, s2) = (side(), side());
        if s1.len() > RANDOM_MAX_SIZE || s2.len() > RANDOM_MAX_SIZE || u.len() > RANDOM_MAX_SIZE {
            continue;
        }
        let embed = |s: &BTreeSet<u8>| u.iter().map(|x| s.iter().position(|y| y == x).unwrap()).collect();
        let (phi1, phi2) = (embed(&s1), embed(&s2));
        let (a, b, c) = (subset_semilattice("L1", "p", &s1), subset_semilattice("L2", "q", &s2), subset_semilattice("U", "u", &u));
        return Amalgam::new(a, b, c, phi1, phi2).expect("semilattice amalgam");
    }
}

fn trivial_everywhere(a: &Amalgam, max_len: usize, budget: &Budget) -> std::result::Result<usize, String> {
    let mut n = 0;
    for w in words(&amalgam_letters(a), max_len) {
        let r = maximal_subgroup_presentation(a, &w, budget).map_err(|e| format!("{}: {e}", a.word_to_string(&w)))?;
        let trivial = r.order == Some(1) || (r.presentation.generators.is_empty() && r.order.is_none());
        check(trivial && r.abelianization.is_trivial(), format!("{}: {}", a.word_to_string(&w), r.presentation))?;
        n += 1;
    }
    Ok(n)
}

fn criterion4() -> Outcome {
    let budget = Budget::default();
    let chain3 = corpus::chain3_amalgam();
    let n = trivial_everywhere(&chain3, COMBINATORIAL_WORD_LEN, &budget)?;
    let mut rng = StdRng::seed_from_u64(20);
    let mut m = 0;
    for _ in 0..RANDOM_AMALGAMS {
        let a = random_semilattice_amalgam(&mut rng);
        check(a.factor(1).is_combinatorial() && a.factor(2).is_combinatorial(), "generated factor is not combinatorial")?;
        m += trivial_everywhere(&a, RANDOM_WORD_LEN, &budget)?;
    }
    Ok(format!("3-chains: {n} words trivial; {RANDOM_AMALGAMS} random semilattice amalgams: {m} words trivial"))
}

fn criterion5() -> Outcome {
    let budget = Budget::default();
    let a = corpus::z2_z3_trivial();
    let w = a.parse_word("a").map_err(|e| e.to_string())?;
    let r = maximal_subgroup_presentation(&a, &w, &budget).map_err(|e| e.to_string())?;
    check(r.case == SubgroupCase::MultiHost, format!("case {:?}", r.case))?;
    let y = r.y.as_ref().ok_or("no quotient graph")?;
    check((y.vertices, y.edges) == (2, 1), format!("Y has {} vertices, {} edges", y.vertices, y.edges))?;
    let p = &r.presentation;
    check(p.num_generators() == 2, format!("{p}"))?;
    let mut orders: Vec<usize> = p
        .relators
        .iter()
        .map(|rel| if rel.iter().all(|&x| x == rel[0]) { rel.len() } else { 0 })
        .collect();
    orders.sort();
    check(orders == vec![2, 3], format!("relators of {p}"))?;
    check(r.abelianization.elementary_divisors == vec![2, 3], format!("{:?}", r.abelianization))?;
    let fin = classify_finiteness(&a, &w, &budget).map_err(|e| e.to_string())?;
    check(fin.verdict == Finiteness::Infinite, format!("verdict {:?}", fin.verdict))?;
    check(!algebraic_finiteness_check(&a, 0), "algebraic check agrees")?;
    check(fin.discrepancy, "discrepancy flag not set")?;
    Ok(format!("{p}, abelianization [2, 3], Infinite, discrepancy flagged"))
}

fn criterion6() -> Outcome {
    let budget = Budget::default();
    let a = corpus::z2_z2_z2();
    let root = HostType { color: 1, f: 0 };
    let gog = quotient_graph(&a, root, &budget).map_err(|e| e.to_string())?;
    let order = fundamental_presentation(&gog).enumerate_order(DEFAULT_MAX_COSETS);
    let union = complete_host_union(&a, root, 8, &budget).map_err(|e| e.to_string())?.ok_or("host union not complete")?;
    check(union.num_lobes() == 2, format!("host union has {} lobes", union.num_lobes()))?;
    let all: Vec<usize> = (0..union.num_lobes()).collect();
    let auts = host_automorphisms(&union, &all).len();
    check(order == Some(2) && auts == 2, format!("order {order:?}, |Aut| = {auts}"))?;
    Ok("order 2 = |Aut(host union)|".into())
}

fn c5_preserves(a: &Amalgam, d: &Decomposition, budget: &Budget) -> std::result::Result<usize, String> {
    let mut n = 0;
    for &bud in &d.buds {
        let e = construction5(a, d, bud, budget).map_err(|e| e.to_string())?;
        check(e.decomposition.num_lobes() == d.num_lobes() + 1, "lobe count did not grow by one")?;
        let images: BTreeSet<usize> = e.projection.iter().copied().collect();
        check(images.len() == d.graph().num_vertices(), "old vertices merged")?;
        for (u, l, v) in d.graph().edges() {
            check(e.decomposition.graph().step(e.projection[u], l) == Some(e.projection[v]), "old edge lost")?;
        }
        n += 1;
    }
    Ok(n)
}

fn criterion7() -> Outcome {
    let budget = Budget::default();
    let (mut graphs, mut steps) = (0, 0);
    for (name, a) in corpus::amalgam_corpus() {
        for w in words(&amalgam_letters(&a), VALIDATOR_WORD_LEN) {
            let label = format!("{name} {}", a.word_to_string(&w));
            let c = core(&a, &w, &budget).map_err(|e| format!("{label}: {e}"))?;
            let x = expand_to_depth(&a, &c, VALIDATOR_DEPTH, &budget).map_err(|e| format!("{label}: {e}"))?;
            for d in [&c, &x] {
                let report = validate_opuntoid(&a, d);
                check(report.is_valid(), format!("{label}: {:?}", report.violations))?;
                graphs += 1;
            }
            steps += c5_preserves(&a, &c, &budget).map_err(|e| format!("{label}: {e}"))?;
        }
    }
    Ok(format!("{graphs} graphs valid, {steps} single expansions checked"))
}

/// Free-product normal form in `Z2 * Z3`: alternating syllables `(gen, exponent)`.
fn z2_z3_normal_form(w: &[Letter]) -> Vec<(u8, u8)> {
    let mut stack: Vec<(u8, u8)> = Vec::new();
    for l in w {
        let order = if l.color == 1 { 2 } else { 3 };
        let e = if l.inverse { order - 1 } else { 1 };
        match stack.last_mut() {
            Some((c, k)) if *c == l.color => {
                *k = (*k + e) % order;
                if *k == 0 {
                    stack.pop();
                }
            }
            _ => stack.push((l.color, e)),
        }
    }
    stack
}

fn criterion8() -> Outcome {
    let start = Instant::now();
    let a = corpus::z2_z3_trivial();
    let all = words(&amalgam_letters(&a), WORD_PROBLEM_LEN);
    let forms: Vec<Vec<(u8, u8)>> = all.iter().map(|w| z2_z3_normal_form(w)).collect();
    let mut solver = WordSolver::new(&a, WORD_PROBLEM_LEN, Budget::default());
    let mut pairs = 0u64;
    for (i, u) in all.iter().enumerate() {
        for (j, v) in all.iter().enumerate() {
            let got = solver.equal(u, v).map_err(|e| e.to_string())?;
            check(got == (forms[i] == forms[j]), format!("{} vs {}", a.word_to_string(u), a.word_to_string(v)))?;
            pairs += 1;
        }
    }
    let t = within(start, LIMIT_WORD_PROBLEM)?;
    Ok(format!("{} words, {pairs} pairs agree, {t:.2?}", all.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("Schützenberger graph automorphisms match maximal subgroups", criterion1),
        ("Stephen closure matches the table Schützenberger graph", criterion2),
        ("D4 fold lifting", criterion3),
        ("semilattice amalgams have trivial maximal subgroups", criterion4),
        ("[Z2, Z3; 1] graph of groups", criterion5),
        ("[Z2, Z2; Z2] order equals host-union automorphisms", criterion6),
        ("opuntoid axioms and single-lobe expansion", criterion7),
        ("word problem against Z2 * Z3 normal forms", criterion8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}: {name} ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why})", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
