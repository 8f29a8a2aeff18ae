use opuntia::graph::{automorphisms, rooted_iso, InverseWordGraph};
use opuntia::group::{free_reduce, GroupPresentation, GroupWord};
use opuntia::word::Letter;
use proptest::prelude::*;

const COSETS: usize = 5_000;

fn relator(gens: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((0..gens as i32, any::<bool>()), 1..7)
        .prop_map(|v| v.into_iter().map(|(g, inv)| if inv { -(g + 1) } else { g + 1 }).collect())
}

fn presentation() -> impl Strategy<Value = GroupPresentation> {
    (1usize..4).prop_flat_map(|n| {
        prop::collection::vec(relator(n), 0..5).prop_map(move |relators| GroupPresentation {
            generators: (0..n).map(|i| format!("g{i}")).collect(),
            relators,
            order: None,
        })
    })
}

fn graph() -> impl Strategy<Value = InverseWordGraph> {
    (1usize..7).prop_flat_map(|n| {
        prop::collection::vec((0..n, 1u8..3, 0usize..2, 0..n), 0..12).prop_map(move |edges| {
            let mut g = InverseWordGraph::with_vertices(n);
            for (u, color, gen, v) in edges {
                g.add_edge(u, Letter::pos(color, gen), v);
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn free_reduction_is_idempotent(w in relator(3)) {
        let r = free_reduce(&w);
        prop_assert!(r.windows(2).all(|p| p[0] != -p[1]));
        prop_assert_eq!(free_reduce(&r), r);
    }

    #[test]
    fn simplify_preserves_invariants(p in presentation()) {
        let q = p.simplify();
        prop_assert!(q.num_generators() <= p.num_generators());
        prop_assert_eq!(p.abelianization(), q.abelianization());
        if let (Some(a), Some(b)) = (p.enumerate_order(COSETS), q.enumerate_order(COSETS)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn smith_form_is_a_divisor_chain(p in presentation()) {
        let ab = p.abelianization();
        prop_assert!(ab.invariant_factors.iter().all(|&d| d > 1));
        prop_assert!(ab.invariant_factors.windows(2).all(|w| w[1] % w[0] == 0));
        let torsion: u64 = ab.invariant_factors.iter().product();
        prop_assert_eq!(ab.elementary_divisors.iter().product::<u64>(), torsion);
        prop_assert!(ab.free_rank + ab.invariant_factors.len() <= p.num_generators());
        if let (Some(order), Some(n)) = (p.enumerate_order(COSETS), ab.order()) {
            prop_assert_eq!(order as u64 % n, 0);
        }
    }

    #[test]
    fn folding_is_idempotent_and_edge_preserving(g in graph()) {
        let (f, pi) = g.fold();
        prop_assert!(f.is_deterministic());
        for (u, l, v) in g.edges() {
            prop_assert_eq!(f.step(pi[u], l), Some(pi[v]));
        }
        let (ff, _) = f.fold();
        prop_assert_eq!(ff.num_vertices(), f.num_vertices());
        prop_assert_eq!(ff.num_edges(), f.num_edges());
    }

    #[test]
    fn automorphisms_form_a_group(g in graph()) {
        let (f, _) = g.fold();
        prop_assume!(f.is_connected());
        let auts = automorphisms(&f, 0);
        prop_assert!(auts.iter().any(|p| p.iter().enumerate().all(|(i, &x)| i == x)));
        for p in &auts {
            prop_assert!(rooted_iso(&f, 0, &f, p[0]).is_some());
            let composed = opuntia::graph::compose(p, p);
            prop_assert!(auts.contains(&composed));
        }
    }
}
