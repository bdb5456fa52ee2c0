use std::sync::Arc;

use cikit::format::{parse_graph, parse_relation, write_graph, write_relation};
use cikit::gaussian::{random_model, random_spd, tree_structured_model};
use cikit::{
    bidirected_graph_of, close, enumerate_triples, is_closed_under, is_faithful, is_global_markov,
    undirected_graph_of, GaussianModel, Graph, GroundSet, Mode, Relation, Rule, Triple, VertexSet,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ground(p: usize) -> Arc<GroundSet> {
    GroundSet::standard(p).unwrap().shared()
}

fn relation(p: usize) -> impl Strategy<Value = Relation> {
    let n = enumerate_triples(p).count();
    // Densities vary per case so both sparse and nearly full relations appear.
    (0.02..0.9f64)
        .prop_flat_map(move |w| prop::collection::vec(prop::bool::weighted(w), n))
        .prop_map(move |bits| {
            Relation::from_triples(
                ground(p),
                enumerate_triples(p)
                    .zip(bits)
                    .filter(|(_, b)| *b)
                    .map(|(t, _)| t),
            )
            .unwrap()
        })
}

fn graph(p: usize) -> impl Strategy<Value = Graph> {
    let pairs = p * (p - 1) / 2;
    (0u64..1 << pairs).prop_map(move |mask| Graph::from_edge_mask(ground(p), mask))
}

fn rule_set() -> impl Strategy<Value = Vec<Rule>> {
    let horn: Vec<Rule> = Rule::ALL.into_iter().filter(|r| r.is_horn()).collect();
    prop::sample::subsequence(horn.clone(), 0..=horn.len())
}

fn model(max_p: usize) -> impl Strategy<Value = GaussianModel> {
    (3..=max_p, any::<u64>())
        .prop_map(|(p, seed)| random_spd(ground(p), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap())
}

fn structured_model(max_p: usize) -> impl Strategy<Value = GaussianModel> {
    (3..=max_p, any::<u64>()).prop_map(|(p, seed)| {
        random_model(ground(p), &mut ChaCha8Rng::seed_from_u64(seed))
            .unwrap()
            .1
    })
}

fn graph_of(l: &Relation, mode: Mode) -> Graph {
    match mode {
        Mode::Undirected => undirected_graph_of(l),
        Mode::Bidirected => bidirected_graph_of(l),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dual_is_an_involution(l in relation(5)) {
        let d = l.dual();
        prop_assert_eq!(d.len(), l.len());
        prop_assert_eq!(d.dual(), l);
    }

    #[test]
    fn bidirected_graph_is_undirected_graph_of_dual(l in relation(5)) {
        prop_assert_eq!(bidirected_graph_of(&l), undirected_graph_of(&l.dual()));
    }

    #[test]
    fn global_markov_and_faithfulness_transport_by_duality(l in relation(4), g in graph(4)) {
        prop_assert_eq!(
            is_global_markov(&l, &g, Mode::Bidirected).unwrap(),
            is_global_markov(&l.dual(), &g, Mode::Undirected).unwrap()
        );
        prop_assert_eq!(
            is_faithful(&l, &g, Mode::Bidirected).unwrap(),
            is_faithful(&l.dual(), &g, Mode::Undirected).unwrap()
        );
    }

    #[test]
    fn closure_is_idempotent_closed_and_extensive(l in relation(4), rules in rule_set()) {
        let c = close(&l, &rules).unwrap();
        prop_assert!(l.is_subset(&c).unwrap());
        prop_assert!(is_closed_under(&c, &rules));
        prop_assert_eq!(close(&c, &rules).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_is_monotone(l in relation(4), extra in relation(4), rules in rule_set()) {
        let bigger = l.union(&extra).unwrap();
        let small = close(&l, &rules).unwrap();
        prop_assert!(small.is_subset(&close(&bigger, &rules).unwrap()).unwrap());
    }

    #[test]
    fn triples_are_stored_canonically(a in 1u32..16, b in 1u32..16, c in 0u32..16) {
        let (a, b, c) = (VertexSet::from_indices(ix(a)), VertexSet::from_indices(ix(b)), VertexSet::from_indices(ix(c)));
        match (Triple::new(a, b, c), Triple::new(b, a, c)) {
            (Ok(x), Ok(y)) => {
                prop_assert_eq!(x, y);
                prop_assert!(x.a().bits() < x.b().bits());
                prop_assert_eq!(x.dual(4).dual(4), x);
            }
            (Err(_), Err(_)) => prop_assert!(!a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c)),
            _ => prop_assert!(false, "asymmetric validation"),
        }
    }

    #[test]
    fn separation_is_monotone_in_the_separator(g in graph(5), a in 0usize..5, b in 0usize..5, s in 0u32..32, x in 0usize..5) {
        prop_assume!(a != b);
        let s = VertexSet::from_indices(ix(s)) - VertexSet::singleton(a) - VertexSet::singleton(b);
        let (a, b) = (VertexSet::singleton(a), VertexSet::singleton(b));
        let wider = s | (VertexSet::singleton(x) - a - b);
        if g.separates(a, b, s).unwrap() {
            // Adding vertices to a separator never reconnects, in graphs.
            prop_assert!(g.separates(a, b, wider).unwrap());
        }
        // Removing edges never breaks a separation.
        if let Some(&(u, v)) = g.edges().first() {
            let fewer = Graph::from_edges(g.ground().clone(), g.edges().into_iter().filter(|&e| e != (u, v))).unwrap();
            if g.separates(a, b, s).unwrap() {
                prop_assert!(fewer.separates(a, b, s).unwrap());
            }
        }
    }

    #[test]
    fn serialization_round_trips(l in relation(5), g in graph(5)) {
        let text = write_relation(&l);
        let back = parse_relation(&text).unwrap();
        prop_assert_eq!(&back, &l);
        prop_assert_eq!(write_relation(&back), text);
        let text = write_graph(&g);
        prop_assert_eq!(write_graph(&parse_graph(&text).unwrap()), text);
    }

    #[test]
    fn gaussian_inverse_round_trip(m in model(6)) {
        let back = m.inverse().unwrap().inverse().unwrap();
        let diff = (back.sigma() - m.sigma()).abs().max();
        prop_assert!(diff < 1e-8, "max deviation {}", diff);
    }

    #[test]
    fn gaussian_relation_survives_rescaling(m in structured_model(6), big in any::<bool>()) {
        let c = if big { 10.0 } else { 0.1 };
        prop_assert_eq!(m.scaled(c).unwrap().relation(), m.relation());
    }

    #[test]
    fn gaussian_marginal_keeps_triples_inside(m in structured_model(6), keep in 1u32..64) {
        let keep = VertexSet::from_indices(ix(keep).filter(|&v| v < m.p()));
        prop_assume!(keep.len() >= 2);
        let sub = m.marginal(keep).unwrap();
        let index: Vec<usize> = keep.iter().collect();
        let lift = |s: VertexSet| VertexSet::from_indices(s.iter().map(|v| index[v]));
        let full = m.relation();
        for t in enumerate_triples(keep.len()) {
            let lifted = Triple::new(lift(t.a()), lift(t.b()), lift(t.c())).unwrap();
            prop_assert_eq!(sub.relation().contains(&t), full.contains(&lifted));
        }
    }

    #[test]
    fn gaussian_duality_on_structured_models(m in structured_model(6)) {
        prop_assert_eq!(m.inverse().unwrap().relation(), m.relation().dual());
    }
}

fn ix(mask: u32) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| mask >> i & 1 == 1)
}

#[test]
fn path_model_recovers_the_path() {
    let path = Graph::from_edges(ground(4), [(0, 1), (1, 2), (2, 3)]).unwrap();
    for mode in [Mode::Undirected, Mode::Bidirected] {
        for seed in 0..10 {
            let m = tree_structured_model(&path, mode, seed).unwrap();
            let rel = m.relation();
            assert_eq!(graph_of(&rel, mode), path, "{mode}");
            let sep = path.separation_relation();
            match mode {
                Mode::Undirected => assert_eq!(rel, sep),
                Mode::Bidirected => assert_eq!(rel.dual(), sep),
            }
        }
    }
}
