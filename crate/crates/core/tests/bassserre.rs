use opuntia::amalgam::Amalgam;
use opuntia::bassserre::{
    check_edge_maps, edge_group, fundamental_presentation, lift_automorphism, maximal_subgroup_presentation,
    quotient_graph, raw_fundamental_presentation, spanning_tree, vertex_group, SubgroupCase,
};
use opuntia::corpus;
use opuntia::graph::automorphisms;
use opuntia::group::{GroupPresentation, DEFAULT_MAX_COSETS};
use opuntia::host::{Finiteness, HostType};
use opuntia::opuntoid::Budget;
use opuntia::stephen::schutz_graph_of;
use opuntia::word::Letter;

fn w(a: &Amalgam, s: &str) -> Vec<Letter> {
    a.parse_word(s).unwrap()
}

const ROOT: HostType = HostType { color: 1, f: 0 };

#[test]
fn quotient_graph_examples() {
    let b = Budget::default();
    for a in [corpus::z2_z3_trivial(), corpus::z2_z2_z2(), corpus::chain2_amalgam()] {
        let gog = quotient_graph(&a, ROOT, &b).unwrap();
        assert_eq!((gog.vertices.len(), gog.edges.len()), (2, 1));
        assert_eq!(gog.vertices[gog.edges[0].from].ty.color, 1);
        assert_eq!(gog.vertices[gog.edges[0].to].ty.color, 2);
        check_edge_maps(&gog).unwrap();
    }
}

#[test]
fn vertex_groups() {
    let a = corpus::z2_z3_trivial();
    assert_eq!(vertex_group(&a, HostType { color: 1, f: 0 }).unwrap().order, Some(2));
    assert_eq!(vertex_group(&a, HostType { color: 2, f: 0 }).unwrap().order, Some(3));
    let c = corpus::chain2_amalgam();
    for color in [1, 2] {
        let g = vertex_group(&c, HostType { color, f: 0 }).unwrap();
        assert_eq!(g.order, Some(1));
        assert!(g.generators.is_empty());
    }
}

#[test]
fn edge_groups() {
    let (g, s, t) = edge_group(&corpus::z2_z3_trivial(), 0).unwrap();
    assert_eq!((g.order, s.len(), t.len()), (Some(1), 1, 1));
    let z = corpus::z2_z2_z2();
    let (g, s, t) = edge_group(&z, 0).unwrap();
    assert_eq!(g.order, Some(2));
    // both embeddings are onto Z2
    assert_eq!(s, vec![0, 1]);
    assert_eq!(t, vec![0, 1]);
    let (g, _, _) = edge_group(&corpus::chain2_amalgam(), 0).unwrap();
    assert_eq!(g.order, Some(1));
}

#[test]
fn fundamental_presentations() {
    let b = Budget::default();
    let a = corpus::z2_z3_trivial();
    let p = fundamental_presentation(&quotient_graph(&a, ROOT, &b).unwrap());
    assert_eq!(p.to_string(), "< a, b | a^2, b^3 >");
    assert_eq!(p.abelianization().elementary_divisors, vec![2, 3]);

    let z = corpus::z2_z2_z2();
    let p = fundamental_presentation(&quotient_graph(&z, ROOT, &b).unwrap());
    assert_eq!(p.enumerate_order(DEFAULT_MAX_COSETS), Some(2));
    assert_eq!(p.num_generators(), 1);

    let single = GroupPresentation::from_table(&["1".into(), "a".into()], &[vec![0, 1], vec![1, 0]], 0);
    assert_eq!(single.simplify().to_string(), "< a | a^2 >");
}

#[test]
fn spanning_tree_independence() {
    let b = Budget::default();
    for (name, a) in corpus::amalgam_corpus() {
        for f in a.u_idempotents() {
            for color in [1, 2] {
                let Ok(gog) = quotient_graph(&a, HostType { color, f }, &b) else { continue };
                let n = gog.vertices.len();
                let trees = [spanning_tree(&gog, 0, false), spanning_tree(&gog, n - 1, true)];
                let ps: Vec<GroupPresentation> =
                    trees.iter().map(|t| raw_fundamental_presentation(&gog, t).simplify()).collect();
                assert_eq!(ps[0].abelianization(), ps[1].abelianization(), "{name}");
                assert_eq!(ps[0].enumerate_order(20_000), ps[1].enumerate_order(20_000), "{name}");
            }
        }
    }
}

#[test]
fn edge_maps_are_injective_homomorphisms_across_corpus() {
    let b = Budget::default();
    for (_, a) in corpus::amalgam_corpus() {
        for f in a.u_idempotents() {
            for color in [1, 2] {
                if let Ok(gog) = quotient_graph(&a, HostType { color, f }, &b) {
                    check_edge_maps(&gog).unwrap();
                }
            }
        }
    }
}

#[test]
fn d4_lifting() {
    let d4 = corpus::dihedral_d4();
    let one = d4.find("1").unwrap();
    let s = d4.find("s").unwrap();
    let r = d4.find("r").unwrap();
    let sr = d4.mul(s, r);
    let z = d4.mul(sr, sr);
    let cayley = schutz_graph_of(&d4, one, 1);
    assert_eq!(cayley.elements.len(), 8);
    let sigma = cayley.automaton.clone();
    let (delta, pi) = sigma.graph.fold_identifying(&[(cayley.vertex_of(one).unwrap(), cayley.vertex_of(s).unwrap())]);
    assert_eq!(delta.num_vertices(), 4);
    let auts = automorphisms(&delta, 0);
    assert_eq!(auts.len(), 2);
    let identity = auts.iter().find(|p| p.iter().enumerate().all(|(i, &x)| i == x)).unwrap().clone();
    let nontrivial = auts.iter().find(|p| **p != identity).unwrap().clone();

    let report = lift_automorphism(&sigma, &delta, &pi, &nontrivial).unwrap();
    assert_eq!(report.aut_sigma, 8);
    assert_eq!(report.h.len(), 4);
    assert_eq!(report.n.len(), 2);
    assert!(report.surjective && report.index_matches);
    assert_eq!(report.fibre_stabilizer, report.n);
    // automorphisms of the Cayley graph are left multiplications, named by the image of 1
    let v1 = cayley.vertex_of(one).unwrap();
    let left = |x| cayley.vertex_of(x).unwrap();
    let lift_images: Vec<usize> = report.lifts.iter().map(|p| p[v1]).collect();
    assert!(lift_images.contains(&left(z)));
    let h_images: Vec<usize> = report.h.iter().map(|p| p[v1]).collect();
    assert!(!h_images.contains(&left(sr)));

    let trivial = lift_automorphism(&sigma, &delta, &pi, &identity).unwrap();
    assert!(trivial.lifts.iter().any(|p| p.iter().enumerate().all(|(i, &x)| i == x)));
}

#[test]
fn maximal_subgroup_examples() {
    let b = Budget::default();
    let a = corpus::z2_z3_trivial();
    let r = maximal_subgroup_presentation(&a, &w(&a, "a"), &b).unwrap();
    assert_eq!(r.case, SubgroupCase::MultiHost);
    assert_eq!(r.presentation.to_string(), "< a, b | a^2, b^3 >");
    let fin = r.finiteness.as_ref().unwrap();
    assert_eq!(fin.verdict, Finiteness::Infinite);
    assert!(fin.discrepancy);
    assert_eq!(r.order, None);

    let z = corpus::z2_z2_z2();
    let r = maximal_subgroup_presentation(&z, &w(&z, "a"), &b).unwrap();
    assert_eq!(r.case, SubgroupCase::MultiHost);
    assert_eq!(r.order, Some(2));
    assert_eq!(r.host_union_automorphisms, Some(2));
    assert_eq!(r.order_cross_check, Some(true));

    let c = corpus::chain2_amalgam();
    let r = maximal_subgroup_presentation(&c, &w(&c, "e1"), &b).unwrap();
    assert_eq!(r.case, SubgroupCase::OldIdempotent);
    assert_eq!(r.order, Some(1));
    assert!(r.abelianization.is_trivial());
}

#[test]
fn corpus_maximal_subgroups_are_consistent() {
    let b = Budget::default();
    for (name, a) in corpus::amalgam_corpus() {
        for text in ["t", "x", "x^-1 x", "t x", "x t", "a1", "b2 c1", "x'", "x x'", "t'", "e1", "f2", "a b", "a"] {
            let Ok(word) = a.parse_word(text) else { continue };
            let r = maximal_subgroup_presentation(&a, &word, &b).unwrap_or_else(|e| panic!("{name} {text}: {e}"));
            if let Some(ok) = r.order_cross_check {
                assert!(ok, "{name} {text}: {r:?}");
            }
            if let (Some(order), Some(ab)) = (r.order, r.abelianization.order()) {
                assert_eq!(order as u64 % ab, 0, "{name} {text}");
            }
        }
    }
}
