mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use common::*;
use exprays::combinatorics::*;
use num_rational::BigRational;
use proptest::prelude::*;

fn poly(text: &str, degree: u32) -> ExternalAddress {
    ExternalAddress::parse_with(text, Alphabet::PolynomialCyclic(degree)).unwrap()
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn address(bound: i64, max_pre: usize, max_per: usize) -> impl Strategy<Value = ExternalAddress> {
    (
        prop::collection::vec(-bound..=bound, 0..=max_pre),
        prop::collection::vec(-bound..=bound, 1..=max_per),
    )
        .prop_map(|(pre, per)| ExternalAddress::exp(&pre, &per).unwrap())
}

fn periodic(bound: i64, max_per: usize) -> impl Strategy<Value = ExternalAddress> {
    prop::collection::vec(-bound..=bound, 1..=max_per).prop_map(|per| ExternalAddress::exp(&[], &per).unwrap())
}

fn misiurewicz_base(bound: i64) -> impl Strategy<Value = ExternalAddress> {
    address(bound, 3, 3).prop_filter("strictly preperiodic", |a| a.is_strictly_preperiodic())
}

#[test]
fn shift_examples() {
    assert_eq!(addr("| 0 1").shift(), addr("| 1 0"));
    assert_eq!(addr("2 | 0 1").shift(), addr("| 0 1"));
    assert_eq!(addr("| 0").shift(), addr("| 0"));
}

#[test]
fn compare_examples() {
    assert_eq!(addr("| 0").compare(&addr("| 1")).unwrap(), Ordering::Less);
    assert_eq!(addr("| 0 1").compare(&addr("0 | 1 0")).unwrap(), Ordering::Equal);
    assert_eq!(addr("| 1 0").compare(&addr("| 0 1")).unwrap(), Ordering::Greater);
}

#[test]
fn dist_examples() {
    let s = addr("3 | 1 -2");
    assert_eq!(s.dist(&s).unwrap(), rational(0, 1));
    assert_eq!(addr("| 0").dist(&addr("| 1")).unwrap(), rational(1, 1));
    assert_eq!(addr("| 0 1").dist(&addr("| 0")).unwrap(), rational(1, 3));
}

#[test]
fn minimal_potential_examples() {
    for text in ["| 0", "| 5 -3", "7 7 7 | 1"] {
        assert_eq!(addr(text).minimal_potential(), 0.0);
    }
}

#[test]
fn sector_index_examples() {
    let base = addr("1 | 0");
    assert_eq!(sector_index(&base, &base).unwrap(), 0);
    assert_eq!(sector_index(&addr("| 0"), &base).unwrap(), -1);
    assert_eq!(naive_itinerary(&addr("| 0"), &base, 1), vec![-1]);
    assert!(matches!(
        sector_index(&addr("0 1 | 0"), &base),
        Err(CombinatoricsError::BoundaryHit(_))
    ));
    assert!(matches!(
        sector_index(&base, &addr("| 0 1")),
        Err(CombinatoricsError::InvalidBase(_))
    ));
}

#[test]
fn itinerary_examples() {
    let base = addr("1 | 0");
    let own = itinerary(&base, &base).unwrap();
    assert_eq!(own.entries().unwrap().first(), 0);
    let zero = itinerary(&addr("| 0"), &base).unwrap();
    assert_eq!(zero.entries().unwrap(), &Sequence::constant(-1));
    let r = addr("| 2 0");
    let a = itinerary(&r, &base).unwrap();
    let b = itinerary(&r.shift(), &base).unwrap();
    assert_eq!(&a.entries().unwrap().shift(), b.entries().unwrap());
}

#[test]
fn landing_class_examples() {
    let base = addr("1 | 0");
    let r = addr("| 0 1");
    assert!(same_landing_class(&r, &r, &base).unwrap());
    assert!(!same_landing_class(&addr("| 0"), &addr("| 1"), &base).unwrap());

    let mut found = None;
    'search: for pre in [-1, 0, 1] {
        for per in [-1, 0, 1] {
            let Ok(b) = ExternalAddress::exp(&[pre], &[per]) else {
                continue;
            };
            if !b.is_strictly_preperiodic() {
                continue;
            }
            let x = naive_itinerary(&addr("| 0 1"), &b, 8);
            let y = naive_itinerary(&addr("| 1 0"), &b, 8);
            if x == y {
                found = Some(b);
                break 'search;
            }
        }
    }
    let b = found.expect("some small base gives (01) and (10) one itinerary");
    assert!(same_landing_class(&addr("| 0 1"), &addr("| 1 0"), &b).unwrap());
}

#[test]
fn portrait_examples() {
    let ps = portrait_classes(1, 0, &addr("1 | 0")).unwrap();
    assert_eq!(ps.len(), 1);
    assert_eq!(ps[0].classes(), &[vec![addr("| 0")]]);

    let base = addr("1 | -1");
    let ps = portrait_classes(2, 1, &base).unwrap();
    let class: BTreeSet<_> = [addr("| 0 1"), addr("| 1 0")].into_iter().collect();
    assert!(ps.iter().any(|p| p
        .classes()
        .iter()
        .any(|c| c.iter().cloned().collect::<BTreeSet<_>>() == class)));
    let all: Vec<&Vec<ExternalAddress>> = ps.iter().flat_map(|p| p.classes()).collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            assert!(!classes_linked(a, b).unwrap());
        }
    }
}

#[test]
fn characteristic_examples() {
    assert!(is_characteristic_pair(&addr("| 0 1"), &addr("| 1 0")).unwrap());
    assert!(!is_characteristic_pair(&addr("| 0 1"), &addr("| 2 1")).unwrap());
    assert!(is_characteristic_pair(&addr("| 0"), &addr("| 0")).is_err());
    assert!(matches!(
        is_characteristic_pair(&addr("| 0"), &addr("| 0 1")),
        Err(CombinatoricsError::PeriodMismatch { .. })
    ));
}

#[test]
fn embed_examples() {
    assert_eq!(embed(&addr("| 0 1"), 5).unwrap(), poly("| 0 1", 5));
    assert!(matches!(
        embed(&addr("| 0 2"), 5),
        Err(CombinatoricsError::DegreeTooSmall { .. })
    ));
    let base = addr("1 | -1");
    for r in ["| 0 1", "-1 | 1 0", "| 1 1 -1", "0 | -1"] {
        let r = addr(r);
        let lhs = itinerary(&embed(&r, 7).unwrap(), &embed(&base, 7).unwrap()).unwrap();
        let rhs = itinerary(&r, &base).unwrap();
        assert_eq!(lhs.entries(), rhs.entries());
    }
}

/// Accepted characteristic pairs over `𝒮_D` with period `n`, counted over
/// ordered pairs of distinct addresses.
fn characteristic_count(degree: u32, n: usize) -> i64 {
    let symbols = Alphabet::PolynomialCyclic(degree).symbols().unwrap();
    let addresses: Vec<ExternalAddress> = naive_periodic(&symbols, n)
        .iter()
        .map(|a| ExternalAddress::parse_with(&a.to_string(), Alphabet::PolynomialCyclic(degree)).unwrap())
        .collect();
    let mut count = 0;
    for a in &addresses {
        for b in &addresses {
            if a != b && is_characteristic_pair(a, b).unwrap() {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn characteristic_pairs_match_wake_counts() {
    for (degree, max_n) in [(2, 5), (3, 5), (4, 4)] {
        for n in 2..=max_n {
            assert_eq!(
                characteristic_count(degree, n),
                wake_count(degree as u64, n as u64),
                "degree {degree}, period {n}"
            );
        }
    }
}

#[test]
fn portraits_match_naive_grouper() {
    for base in ["1 | 0", "1 | -1", "0 1 | 1", "1 0 0 | 0 0 1", "-1 | 0 1"] {
        let base = addr(base);
        for n in 1..=3 {
            let ps = portrait_classes(n, 1, &base).unwrap();
            let mut ours: Vec<Vec<String>> = ps
                .iter()
                .flat_map(|p| p.classes())
                .map(|c| {
                    let mut v: Vec<String> = c.iter().map(|a| a.to_string()).collect();
                    v.sort();
                    v
                })
                .collect();
            ours.sort();
            let theirs = naive_classes(&naive_periodic(&[-1, 0, 1], n), &base, 2 * n + 2);
            assert_eq!(ours, theirs, "base {base}, period {n}");
        }
    }
}

fn check_portrait(p: &OrbitPortrait) {
    let classes = p.classes();
    let n = classes.len();
    assert_eq!(p.orbit_period(), n);
    let period = classes[0][0].period_len();
    assert_eq!(period, p.address_period());
    for (i, class) in classes.iter().enumerate() {
        let next: BTreeSet<_> = classes[(i + 1) % n].iter().cloned().collect();
        let image: BTreeSet<_> = class.iter().map(|a| a.shift()).collect();
        assert_eq!(image.len(), class.len());
        assert_eq!(image, next);
        for a in class {
            assert!(a.is_periodic());
            assert_eq!(a.period_len(), period);
        }
    }
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            assert!(!classes_linked(a, b).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compare_matches_prefix_oracle(a in address(2, 3, 4), b in address(2, 3, 4)) {
        prop_assert_eq!(a.compare(&b).unwrap(), naive_cmp(&a, &b));
    }

    #[test]
    fn dist_is_a_metric(a in address(2, 3, 3), b in address(2, 3, 3), c in address(2, 3, 3)) {
        let ab = a.dist(&b).unwrap();
        prop_assert_eq!(&ab, &b.dist(&a).unwrap());
        prop_assert!(ab <= a.dist(&c).unwrap() + c.dist(&b).unwrap());
        prop_assert!(ab >= rational(0, 1) && ab <= rational(1, 1));
        prop_assert_eq!(ab == rational(0, 1), a.compare(&b).unwrap() == Ordering::Equal);
        prop_assert!((a.dist_f64(&b).unwrap() - naive_dist(&a, &b)).abs() < 1e-15);
    }

    #[test]
    fn small_dist_forces_common_prefix(a in address(2, 3, 3), b in address(2, 3, 3), n in 1usize..12) {
        let d = a.dist(&b).unwrap();
        let bound = rational(1, 1 << n);
        let same_prefix = expand(&a, n) == expand(&b, n);
        if d < bound {
            prop_assert!(same_prefix);
        }
        if same_prefix {
            prop_assert!(d <= bound);
        }
    }

    #[test]
    fn sector_index_matches_boundary_count(r in address(2, 3, 3), base in misiurewicz_base(2)) {
        let window = r.max_abs().max(base.max_abs()) + 2;
        let expected = naive_sector_of(&expand(&r, HORIZON), &expand(&base, HORIZON + 1), window);
        match sector_index(&r, &base) {
            Ok(j) => prop_assert_eq!(j, expected),
            Err(CombinatoricsError::BoundaryHit(_)) => {
                let hit = (-window..=window).any(|j| base.prepend(j).unwrap() == r);
                prop_assert!(hit);
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn itinerary_is_shift_equivariant(r in address(2, 3, 3), base in misiurewicz_base(2)) {
        let it = itinerary(&r, &base).unwrap();
        if let Some(entries) = it.entries() {
            let next = itinerary(&r.shift(), &base).unwrap();
            prop_assert_eq!(next.entries(), Some(&entries.shift()));
            let naive = naive_itinerary(&r, &base, 12);
            let ours: Vec<i64> = (0..12).map(|k| entries.entry(k)).collect();
            prop_assert_eq!(ours, naive);
        }
    }

    #[test]
    fn landing_class_is_an_equivalence(
        a in periodic(1, 4),
        b in periodic(1, 4),
        c in periodic(1, 4),
        base in misiurewicz_base(1),
    ) {
        let rel = |x: &ExternalAddress, y: &ExternalAddress| same_landing_class(x, y, &base).unwrap();
        prop_assert!(rel(&a, &a));
        prop_assert_eq!(rel(&a, &b), rel(&b, &a));
        if rel(&a, &b) && rel(&b, &c) {
            prop_assert!(rel(&a, &c));
        }
    }

    #[test]
    fn accepted_pairs_obey_preimage_law(words in prop::collection::vec(-2i64..=2, 2..=8)) {
        let n = words.len() / 2;
        let a = ExternalAddress::exp(&[], &words[..n]).unwrap();
        let b = ExternalAddress::exp(&[], &words[n..2 * n]).unwrap();
        prop_assume!(a.period_len() == n && b.period_len() == n && a < b);
        if is_characteristic_pair(&a, &b).unwrap() {
            prop_assert_eq!(a.entry(n - 1), b.entry(n - 1) + 1);
            for k in 1..n {
                for x in [a.shift_by(k), b.shift_by(k)] {
                    prop_assert!(!cyclic_between(&a, &x, &b).unwrap());
                }
            }
            let pair = CharacteristicPair::new(a.clone(), b.clone()).unwrap();
            let beta = pair.witness_base();
            prop_assert_eq!(defined_itinerary(&a, &beta).unwrap(), defined_itinerary(&b, &beta).unwrap());
        }
    }

    #[test]
    fn embedding_is_functorial(a in address(1, 3, 3), b in address(1, 3, 3), extra in 0u32..3) {
        let degree = 5 + extra;
        let (ea, eb) = (embed(&a, degree).unwrap(), embed(&b, degree).unwrap());
        prop_assert_eq!(embed(&a.shift(), degree).unwrap(), ea.shift());
        prop_assert_eq!(ea.compare(&eb).unwrap(), a.compare(&b).unwrap());
        prop_assert_eq!(project(&ea), a);
    }

    #[test]
    fn portrait_laws_hold(n in 1usize..=3, base in misiurewicz_base(1)) {
        for p in portrait_classes(n, 1, &base).unwrap() {
            check_portrait(&p);
        }
    }
}
