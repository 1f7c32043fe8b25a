//! Distinct formulas should practically never share a canonical hash.
//! Equality stays correct regardless (it compares structure), but hash
//! buckets degrade if collisions become common.

use std::collections::HashMap;

use boolmin_core::datagen::gen_dataset;
use boolmin_core::rewrite::{apply, find_defactorization_sites, find_factorization_sites};
use boolmin_core::GenSpec;

#[test]
fn no_collisions_among_generated_subformulas() {
    let mut seen: HashMap<u64, String> = HashMap::new();
    let mut collisions = 0;
    for d in 1..=4 {
        let spec = GenSpec::dataset(d, 99).unwrap();
        for f in gen_dataset(&spec, 60).unwrap() {
            // Single rewrites produce many near-identical formulas, the
            // hardest case for a structural hash.
            let mut family = vec![f.clone()];
            for site in find_factorization_sites(&f)
                .iter()
                .chain(&find_defactorization_sites(&f))
            {
                family.push(apply(&f, site).unwrap());
            }
            for g in &family {
                g.root().for_each_preorder(|_, node| {
                    let text = node.to_string();
                    match seen.get(&node.canonical_hash()) {
                        Some(prev) if *prev != text => collisions += 1,
                        Some(_) => {}
                        None => {
                            seen.insert(node.canonical_hash(), text);
                        }
                    }
                });
            }
        }
    }
    assert!(seen.len() > 10_000, "census too small: {}", seen.len());
    assert_eq!(collisions, 0);
}
