mod common;

use boolmin_core::datagen::{gen_comparison_formula, random_circuit, trim};
use boolmin_core::heuristics::hill_climb;
use boolmin_core::rewrite::{
    apply_defactorization, apply_factorization, count_factorization_sites, find_defactorization_sites,
    find_factorization_sites,
};
use boolmin_core::{Algorithm, Formula, Gate, HeuristicParams, Node};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_parse_round_trip(f in formula(6, 4)) {
        let text = f.to_text();
        let g = Formula::parse(&text).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(g.to_text(), text);
        prop_assert_eq!(g.canonical_hash(), f.canonical_hash());
    }

    #[test]
    fn child_order_is_irrelevant(f in formula(6, 4), rot in 0usize..4) {
        fn rotate(n: &std::sync::Arc<Node>, r: usize) -> std::sync::Arc<Node> {
            match n.gate_kind() {
                None => n.clone(),
                Some(g) => {
                    let mut kids: Vec<_> = n.children().iter().map(|c| rotate(c, r)).collect();
                    let len = kids.len();
                    kids.rotate_left(r % len);
                    kids.reverse();
                    Node::gate(g, kids)
                }
            }
        }
        let g = Formula::new(rotate(f.root(), rot));
        prop_assert_eq!(g.canonical_hash(), f.canonical_hash());
        prop_assert_eq!(g, f);
    }

    #[test]
    fn cost_counts_leaves(f in formula(6, 4)) {
        prop_assert_eq!(f.cost(), leaves_in_text(&f.to_text()));
        let occ: usize = f.occurrences().values().sum();
        prop_assert_eq!(occ, f.cost());
    }

    #[test]
    fn normalized_shape(f in formula(6, 4)) {
        for (_, n) in nodes(&f) {
            if let Some(g) = n.gate_kind() {
                prop_assert!(n.children().len() >= 2);
                for c in n.children() {
                    prop_assert_ne!(c.gate_kind(), Some(g));
                }
                for (i, a) in n.children().iter().enumerate() {
                    for b in &n.children()[i + 1..] {
                        prop_assert_ne!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_sites_match_brute_force(f in formula(5, 4)) {
        let sites = find_factorization_sites(&f);
        prop_assert_eq!(sites.len(), brute_force_sites(&f));
        prop_assert_eq!(count_factorization_sites(&f), sites.len() as u64);
    }

    #[test]
    fn factorization_lowers_cost_and_keeps_function(f in formula(5, 4)) {
        for site in find_factorization_sites(&f) {
            let g = apply_factorization(&f, &site).unwrap();
            let change = g.cost() as i64 - f.cost() as i64;
            prop_assert!(change < 0);
            prop_assert!(change <= site.delta, "predicted {} actual {}", site.delta, change);
            prop_assert!(same_function(&f, &g));
        }
    }

    #[test]
    fn defactorization_raises_cost_and_keeps_function(f in formula(5, 3)) {
        for site in find_defactorization_sites(&f) {
            let g = apply_defactorization(&f, &site).unwrap();
            prop_assert!(site.delta > 0);
            prop_assert_eq!(g.cost() as i64 - f.cost() as i64, site.delta);
            prop_assert!(same_function(&f, &g));
        }
    }

    #[test]
    fn hill_climb_reaches_a_local_optimum(f in formula(6, 4), seed in any::<u64>()) {
        let g = hill_climb(&f, seed);
        prop_assert!(g.cost() <= f.cost());
        prop_assert_eq!(brute_force_sites(&g), 0);
        prop_assert!(same_function(&f, &g));
    }

    #[test]
    fn trim_is_idempotent_and_sound(f in formula(6, 4)) {
        let t = trim(&f);
        prop_assert_eq!(trim(&t), t.clone());
        prop_assert!(t.cost() <= f.cost());
        prop_assert!(same_function(&f, &t));
    }

    #[test]
    fn comparison_chains_compare(b in 1u32..=10, k in 1u64..1024, a in 0u64..1024) {
        let k = k % (1 << b);
        prop_assume!(k > 0);
        let a = a % (1 << b);
        let f = gen_comparison_formula(k, b, "A").unwrap();
        let truth: std::collections::BTreeSet<String> =
            (0..b).filter(|i| a >> i & 1 == 1).map(|i| format!("A{i}")).collect();
        let truth: std::collections::BTreeSet<&str> = truth.iter().map(String::as_str).collect();
        prop_assert_eq!(eval(f.root(), &truth), a >= k);
    }

    #[test]
    fn circuits_unfold_to_their_path_count(inputs in 2usize..8, gates in 1usize..14, seed in any::<u64>()) {
        let c = random_circuit(inputs, gates, seed, 200);
        prop_assume!(c.is_ok());
        let c = c.unwrap();
        let f = c.unfold().unwrap();
        let paths = c.path_count().unwrap();
        prop_assert_eq!(f.cost() as u64, paths.total);
        for (attr, n) in f.occurrences() {
            prop_assert_eq!(paths.per_attribute.get(&attr).copied(), Some(n as u64));
        }
        let names: Vec<String> = f.attributes().names().iter().map(|n| n.to_string()).collect();
        for m in 0u32..1 << names.len() {
            let assignment: std::collections::BTreeMap<String, bool> =
                names.iter().enumerate().map(|(i, n)| (n.clone(), m >> i & 1 == 1)).collect();
            prop_assert_eq!(c.evaluate(&assignment), f.evaluate(&assignment));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn optimizers_are_safe(f in formula(6, 4), seed in any::<u64>()) {
        let params = HeuristicParams { seed, restarts: 3, k_max: 100, ..Default::default() };
        for alg in Algorithm::ALL {
            let g = alg.run(&f, &params);
            prop_assert!(g.cost() <= f.cost(), "{alg}");
            prop_assert!(same_function(&f, &g), "{alg}");
            prop_assert_eq!(alg.run(&f, &params), g, "{} is not deterministic", alg);
        }
    }
}

#[test]
fn optimal_formula_is_left_alone() {
    let f = Formula::parse("(In2 & (In1 | In3))").unwrap();
    for alg in Algorithm::ALL {
        assert_eq!(alg.run(&f, &HeuristicParams::default()), f, "{alg}");
    }
    assert_eq!(f.root().gate_kind(), Some(Gate::And));
}
