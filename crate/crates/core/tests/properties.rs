mod common;

use std::collections::BTreeSet;

use gammaring::maps::{
    defect_of_derivation, defect_of_iso, verify_additive_derivation, verify_additive_pair, verify_n_derivation,
    verify_n_multiplicative, DerivationTable, MapPair, VerifyConfig,
};
use gammaring::search::{search_n_derivations, search_n_multiplicative_isos, SearchConfig};
use gammaring::GammaRing;
use proptest::prelude::*;

use common::*;

fn barnes_corpus() -> Vec<(String, GammaRing)> {
    let mut out: Vec<_> = small_structured().into_iter().filter(|(_, r)| r.is_barnes().unwrap()).collect();
    out.push(label("matrix(2,1,2)", GammaRing::matrix(2, 1, 2).unwrap()));
    out.push(label("matrix(2,2,2)", GammaRing::matrix(2, 2, 2).unwrap()));
    out.push(label("matrix(3,1,2)", GammaRing::matrix(3, 1, 2).unwrap()));
    out
}

#[test]
fn found_isos_are_closed_under_composition_and_inverse() {
    for (label, r) in barnes_corpus() {
        for n in [2, 3] {
            let found = search_n_multiplicative_isos(&r, &r, SearchConfig::new(n)).unwrap();
            assert!(found.is_complete(), "{label}");
            let set: BTreeSet<MapPair> = found.results.iter().cloned().collect();
            assert!(set.contains(&MapPair::identity(&r)), "{label}: identity missing");
            for a in &found.results {
                assert!(set.contains(&a.inverted()), "{label}: inverse missing");
                for b in found.results.iter().take(8) {
                    assert!(set.contains(&a.then(b)), "{label}: composite missing at n = {n}");
                }
            }
        }
    }
}

#[test]
fn search_results_pass_literal_verification() {
    for (label, r) in barnes_corpus() {
        for n in [2, 3] {
            let found = search_n_multiplicative_isos(&r, &r, SearchConfig::new(n)).unwrap();
            let sorted = found.results.windows(2).all(|w| w[0] < w[1]);
            assert!(sorted, "{label}: results not strictly sorted");
            for p in &found.results {
                assert!(literal_multiplicative(&r, &r, &p.phi, &p.psi, n), "{label}");
                let v = verify_n_multiplicative(&r, &r, p, n, VerifyConfig::default()).unwrap();
                assert!(v.is_exact_pass(), "{label}");
            }
            let ders = search_n_derivations(&r, SearchConfig::new(n)).unwrap();
            for d in &ders.results {
                assert!(literal_derivation(&r, &d.d, n), "{label}");
            }
        }
    }
}

#[test]
fn additive_iff_defect_zero() {
    let cfg = VerifyConfig::default();
    for (label, r) in barnes_corpus() {
        let found = search_n_multiplicative_isos(&r, &r, SearchConfig::new(2)).unwrap();
        for p in &found.results {
            let f = defect_of_iso(&r, &r, p, 2, cfg).unwrap();
            let additive = verify_additive_pair(&r, &r, p).passed;
            assert_eq!(f.is_zero(), additive, "{label}: {p:?}");
            assert_eq!(additive, literal_additive(&r, &r, &p.phi), "{label}");
        }
        let ders = search_n_derivations(&r, SearchConfig::new(2)).unwrap();
        for d in &ders.results {
            let f = defect_of_derivation(&r, d, 2, cfg).unwrap();
            assert_eq!(f.is_zero(), verify_additive_derivation(&r, d).passed, "{label}");
        }
    }
}

#[test]
fn iso_defect_is_symmetric_and_gamma_blind() {
    let cfg = VerifyConfig::default();
    let r = GammaRing::trivial(group(&[4]), group(&[2])).unwrap();
    let found = search_n_multiplicative_isos(&r, &r, SearchConfig::new(2)).unwrap();
    let mut nonzero = 0;
    for p in &found.results {
        let f = defect_of_iso(&r, &r, p, 2, cfg).unwrap();
        for x in 0..r.m_order() {
            assert_eq!(f.get(x, 0, 0), 0);
            for y in 0..r.m_order() {
                assert_eq!(f.get(x, 0, y), f.get(y, 0, x));
                assert_eq!(f.get(x, 0, y), f.get(x, 1, y));
                // oracle: phi^-1(phi(x + y) - phi(x) - phi(y))
                let img = r.sub(r.sub(p.phi[r.add(x, y)], p.phi[x]), p.phi[y]);
                let inv = p.phi.iter().position(|&v| v == img).unwrap();
                assert_eq!(f.get(x, 0, y), inv);
            }
        }
        nonzero += usize::from(!f.is_zero());
    }
    assert_eq!(nonzero, 8);
}

fn table_ring() -> impl Strategy<Value = GammaRing> {
    (prop_oneof![Just(vec![2u64]), Just(vec![3]), Just(vec![4]), Just(vec![2, 2])], prop_oneof![Just(vec![]), Just(vec![2u64])])
        .prop_flat_map(|(m, g)| {
            let (mg, gg) = (group(&m), group(&g));
            let (mo, go) = (mg.order(), gg.order());
            proptest::collection::vec(0..mo, mo * go * mo)
                .prop_map(move |mu| GammaRing::from_table(mg.clone(), gg.clone(), mu).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verifier_matches_literal_check(r in table_ring(), seed in any::<u64>(), n in 2usize..4) {
        let perms = permutations(r.m_order());
        let gperms = permutations(r.gamma_order());
        let phi = perms[(seed as usize) % perms.len()].clone();
        let psi = gperms[(seed as usize / 7) % gperms.len()].clone();
        let pair = MapPair::new(&r, &r, phi.clone(), psi.clone()).unwrap();
        let v = verify_n_multiplicative(&r, &r, &pair, n, VerifyConfig::default()).unwrap();
        prop_assert_eq!(v.passed, literal_multiplicative(&r, &r, &phi, &psi, n));
        prop_assert_eq!(verify_additive_pair(&r, &r, &pair).passed, literal_additive(&r, &r, &phi));

        let m = r.m_order();
        let d: Vec<usize> = (0..m).map(|i| ((seed >> (2 * i)) as usize) % m).collect();
        let table = DerivationTable::new(&r, d.clone()).unwrap();
        let v = verify_n_derivation(&r, &table, n, VerifyConfig::default()).unwrap();
        prop_assert_eq!(v.passed, literal_derivation(&r, &d, n));
    }

    #[test]
    fn search_matches_filtration(r in table_ring(), n in 2usize..4) {
        let found = search_n_multiplicative_isos(&r, &r, SearchConfig::new(n)).unwrap();
        let got: Vec<(Vec<usize>, Vec<usize>)> = found.results.iter().map(|p| (p.phi.clone(), p.psi.clone())).collect();
        prop_assert_eq!(got, brute_isos(&r, &r, n));
        let ders = search_n_derivations(&r, SearchConfig::new(n)).unwrap();
        let got: Vec<Vec<usize>> = ders.results.iter().map(|d| d.d.clone()).collect();
        prop_assert_eq!(got, brute_derivations(&r, n));
    }
}
