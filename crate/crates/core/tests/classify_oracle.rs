mod common;

use std::collections::BTreeSet;

use common::naive::{brute_min_image, certificate, naive_solutions, Solution};
use uslsq::classify::classify_uniform;
use uslsq::isomorph::{design_certificate, Certificate};

#[test]
fn symmetric_search_equals_naive_search() {
    for (n, mu) in [(3, 1), (3, 2), (4, 1)] {
        let perms = common::permutations(n);
        let naive = naive_solutions(n, mu);
        assert!(!naive.is_empty());
        let classes: BTreeSet<Solution> = naive.iter().map(|s| brute_min_image(n, s, &perms)).collect();
        let naive_certs: BTreeSet<Certificate> = classes.iter().map(|s| certificate(n, s)).collect();
        assert_eq!(naive_certs.len(), classes.len(), "({n},{mu}): certificates merge distinct orbits");
        let all_certs: BTreeSet<Certificate> = naive.iter().map(|s| certificate(n, s)).collect();
        assert_eq!(all_certs, naive_certs);

        let reps = classify_uniform(n, mu).unwrap();
        let fast: BTreeSet<Certificate> = reps.iter().map(|r| r.certificate.clone()).collect();
        assert_eq!(fast.len(), reps.len());
        assert_eq!(fast, naive_certs, "({n},{mu})");
        for r in &reps {
            assert_eq!(r.square.uniform_mu().unwrap(), mu as usize);
            assert_eq!(design_certificate(&r.square.dual()).unwrap(), r.certificate);
        }
    }
}
