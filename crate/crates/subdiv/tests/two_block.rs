use proptest::prelude::*;
use subdiv::digraph::pattern_two_block;
use subdiv::oracle::{validate_certificate, SearchBudget};
use subdiv::random::{random_k_out, rng};
use subdiv::two_block::{find_two_block, fork};

#[test]
fn threshold_hosts_always_succeed() {
    for (k1, k2) in [(2, 2), (3, 2), (2, 2), (3, 3)] {
        let deg = k1 + 3 * k2 - 5;
        let pat = pattern_two_block(k1, k2).unwrap();
        for seed in 0..300u64 {
            let n = deg + 1 + (seed as usize % 25);
            let d = random_k_out(n, deg, &mut rng(seed));
            let cert = find_two_block(&d, k1, k2, &mut SearchBudget::default())
                .unwrap_or_else(|e| panic!("({k1},{k2}) seed {seed}: {e}"));
            assert_eq!(validate_certificate(&d, &pat, &cert), Ok(()));
        }
    }
}

proptest! {
    #[test]
    fn fork_paths_are_disjoint(seed in 0u64..10_000, n in 8usize..40) {
        let d = random_k_out(n, 6, &mut rng(seed));
        let (p, q) = fork(&d, 0, 3, 3, &vec![false; n]).unwrap();
        prop_assert!(p.valid_in(&d) && q.valid_in(&d));
        prop_assert_eq!((p.len(), q.len()), (3, 3));
        prop_assert!(p.vertices[1..].iter().all(|v| !q.contains(*v)));
    }
}
