use std::collections::BTreeMap;

use wedgelab::analytics::{fingerprint, order_statistics};
use wedgelab::catalog::{build, expected, list};
use wedgelab::groupcore::{direct_product, AbelianType, Group, TableGroup};
use wedgelab::pairings::{certify_nontrivial, verify_pairing, PairingMode, PairingSpec, PairingTerm};
use wedgelab::reproduce::{check_entry, run_suite, Suite};
use wedgelab::wedge::{b0, parse_wedge_word, schur_multiplier, EngineChoice, WedgeOptions};

fn metab() -> WedgeOptions {
    WedgeOptions { engine: EngineChoice::Linear, ..Default::default() }
}

#[test]
fn every_entry_matches_record() {
    for e in list() {
        let checks = check_entry(&e.key, &metab(), false).unwrap();
        for c in checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}

#[test]
fn schur_of_e64() {
    let g = build("e64").unwrap();
    assert_eq!(schur_multiplier(&g, &metab()).unwrap().kernel, AbelianType(vec![2, 4]));
}

#[test]
fn schur_of_heisenberg() {
    let g = build("heis:3").unwrap();
    assert_eq!(schur_multiplier(&g, &metab()).unwrap().kernel, AbelianType(vec![3, 3]));
}

#[test]
fn isoclinic_pair_same_b0() {
    let a = b0(&build("e64").unwrap(), &metab()).unwrap().kernel;
    let b = b0(&build("e256").unwrap(), &metab()).unwrap().kernel;
    assert_eq!(a, b);
}

#[test]
fn g6_and_e64_fingerprints() {
    let a = build("gn:6").unwrap().to_table(64).unwrap();
    let b = build("e64").unwrap().to_table(64).unwrap();
    let fa = fingerprint(&a).unwrap();
    let fb = fingerprint(&b).unwrap();
    assert_eq!(fa.cp, fb.cp);
    let sa = order_statistics(&a);
    let sb = order_statistics(&b);
    assert_eq!(fa, fb);
    assert_eq!(sa, sb);
    assert_eq!(sa, BTreeMap::from([(1, 1), (2, 23), (4, 24), (8, 16)]));
}

#[test]
fn k9_b0_certified() {
    for p in [3u64, 5] {
        let g = build(&format!("k9:{p}")).unwrap();
        assert_eq!(g.order(), (p as u128).pow(9));
        assert_eq!(expected(&format!("k9:{p}")).unwrap().order.unwrap().value, g.order());
        let r = b0(&g, &metab()).unwrap();
        assert_eq!(r.kernel, AbelianType(vec![p]));
        let spec = PairingSpec { p, target_rank: 1, terms: vec![PairingTerm { coord: 0, i: 1, j: 2, coeff: 1 }] };
        let cert = verify_pairing(&g, &spec, PairingMode::Structured).unwrap();
        assert!(cert.verified);
        let w = parse_wedge_word(&g, "(a w b)(c w d)^-1").unwrap();
        assert_eq!(certify_nontrivial(&g, &cert, &w).unwrap(), vec![1]);
    }
}

#[test]
fn fingerprint_direct_factor() {
    let g = build("e64").unwrap().to_table(64).unwrap();
    let gz = direct_product(&g, &TableGroup::cyclic(2).unwrap(), 128).unwrap();
    let (a, b) = (fingerprint(&g).unwrap(), fingerprint(&gz).unwrap());
    assert_eq!(
        (a.cp, a.class, a.derived_type, a.central_quotient_order),
        (b.cp, b.class, b.derived_type, b.central_quotient_order)
    );
    let c4 = fingerprint(&TableGroup::cyclic(4).unwrap()).unwrap();
    let v4 = fingerprint(&build("klein").unwrap().to_table(4).unwrap()).unwrap();
    assert_eq!((c4.class, &c4.cp), (v4.class, &v4.cp));
    assert_eq!(c4.cp, ("1".to_string(), "1".to_string()));
}

#[test]
fn class2_and_table_backends_agree() {
    let g = build("g2:2").unwrap();
    let t = Group::Table(g.to_table(256).unwrap());
    assert_eq!(b0(&g, &metab()).unwrap().kernel, b0(&t, &metab()).unwrap().kernel);
    assert_eq!(schur_multiplier(&g, &metab()).unwrap().kernel, schur_multiplier(&t, &metab()).unwrap().kernel);
}

#[test]
fn reproduce_thresholds_suite() {
    let checks = run_suite(Suite::Thresholds, &metab()).unwrap();
    assert!(checks.iter().all(|c| c.passed && !c.counterexample), "{checks:?}");
}
