//! Randomized property suites: ring axioms, unit-series inversion,
//! bundle arithmetic, pullback functoriality, tensor formulas, spectrum
//! normalization, and certificate replay. Every suite is seeded, so runs
//! are reproducible.

use smithcalc_core::bundles::{
    classify, maps, pullback, sigma, tensor_line, twist_equivalent, v_so, NamedMap, Space,
    VirtualBundle,
};
use smithcalc_core::f2algebra::{invert_unit, F2Element, Ring, UnitSeries};
use smithcalc_core::rewriter::{
    normalize, replay, verify_main_theorem, verify_spinc_spinh, SpectrumExpr, SpectrumName,
    Witness, RULE_REL_THOM,
};
use smithcalc_core::rng::SplitMix64;

const T: u32 = 12;

fn test_rings() -> Vec<Ring> {
    vec![
        Space::bz2().cohomology(T),
        Space::bo(3).cohomology(T),
        Space::bz2().product(&Space::bso(3)).cohomology(T),
        Space::bu1().cohomology(T),
    ]
}

/// A random element: up to `max_terms` random monomials within truncation.
fn random_element(rng: &mut SplitMix64, ring: &Ring, max_terms: u64) -> F2Element {
    let gens: Vec<(String, u32)> = ring
        .generators()
        .map(|(n, d)| (n.to_string(), d))
        .collect();
    let mut acc = F2Element::zero(ring);
    for _ in 0..rng.below(max_terms + 1) {
        let mut budget = ring.truncation();
        let mut powers: Vec<(&str, u32)> = Vec::new();
        for (name, degree) in &gens {
            let max_pow = budget / degree.max(&1);
            let p = rng.below(u64::from(max_pow.min(4)) + 1) as u32;
            if p > 0 {
                powers.push((name, p));
                budget -= p * degree;
            }
        }
        let monomial = F2Element::monomial(ring, &powers).expect("valid powers");
        acc = acc.add(&monomial).expect("same ring");
    }
    acc
}

/// A random unit series: constant term forced to 1.
fn random_unit(rng: &mut SplitMix64, ring: &Ring) -> UnitSeries {
    let mut e = random_element(rng, ring, 6);
    if e.support_degrees().contains(&0) {
        e = e.add(&F2Element::one(ring)).expect("same ring");
    }
    let total = e.add(&F2Element::one(ring)).expect("same ring");
    UnitSeries::from_total(total).expect("constant term is 1")
}

fn random_bundle_at(rng: &mut SplitMix64, base: &Space, truncation: u32) -> VirtualBundle {
    let ring = base.cohomology(truncation);
    let rank = rng.below(9) as i64 - 4;
    VirtualBundle::from_parts(base.clone(), rank, random_unit(rng, &ring))
        .expect("series lives in the base ring")
}

fn random_bundle(rng: &mut SplitMix64, base: &Space) -> VirtualBundle {
    random_bundle_at(rng, base, T)
}

#[test]
fn ring_axioms_hold_on_random_elements() {
    let mut rng = SplitMix64::new(0xa1b2_c3d4);
    for ring in test_rings() {
        let one = F2Element::one(&ring);
        let zero = F2Element::zero(&ring);
        for _ in 0..60 {
            let a = random_element(&mut rng, &ring, 5);
            let b = random_element(&mut rng, &ring, 5);
            let c = random_element(&mut rng, &ring, 5);
            let add = |x: &F2Element, y: &F2Element| x.add(y).unwrap();
            let mul = |x: &F2Element, y: &F2Element| x.mul(y).unwrap();
            assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
            assert_eq!(add(&a, &b), add(&b, &a));
            assert!(add(&a, &a).is_zero(), "characteristic 2");
            assert_eq!(add(&a, &zero), a);
            assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
            assert_eq!(mul(&a, &b), mul(&b, &a));
            assert_eq!(mul(&a, &one), a);
            assert!(mul(&a, &zero).is_zero());
            assert_eq!(
                mul(&a, &add(&b, &c)),
                add(&mul(&a, &b), &mul(&a, &c)),
                "distributivity"
            );
        }
    }
}

#[test]
fn unit_series_inverse_round_trips_500_times() {
    let mut rng = SplitMix64::new(0x5eed_0001);
    let rings = test_rings();
    for i in 0..500 {
        let ring = &rings[(i % rings.len()) as usize];
        let u = random_unit(&mut rng, ring);
        let inv = u.invert();
        assert!(
            u.mul(&inv).expect("same ring").total().is_one(),
            "u * u^-1 = 1"
        );
        assert_eq!(inv.invert().total(), u.total(), "double inversion");
        // The standalone unit inverter agrees with the series method.
        let direct = invert_unit(u.total()).expect("unit");
        assert_eq!(&direct, inv.total());
    }
}

#[test]
fn negate_is_an_involution_and_sums_to_zero() {
    let mut rng = SplitMix64::new(0x6e67_0002);
    for base in [Space::bz2(), Space::bso(3), Space::bz2().product(&Space::bu1())] {
        for _ in 0..50 {
            let e = random_bundle(&mut rng, &base);
            assert_eq!(e.negate().negate(), e);
            let cancel = e.sum(&e.negate()).expect("same base");
            assert_eq!(cancel.rank(), 0);
            assert!(cancel.total_sw().total().is_one(), "E + (-E) is trivial");
        }
    }
}

#[test]
fn catalog_homs_are_ring_homomorphisms() {
    let mut rng = SplitMix64::new(0x686f_6d03);
    let catalog: Vec<NamedMap> = vec![maps::phi(T), maps::phi_inverse(T), maps::i1(T), maps::i2(T), maps::p(T)];
    for map in &catalog {
        let ring = map.target().cohomology(T);
        for _ in 0..40 {
            let a = random_element(&mut rng, &ring, 4);
            let b = random_element(&mut rng, &ring, 4);
            let hom = map.hom();
            let image_sum = hom.apply(&a.add(&b).unwrap()).unwrap();
            assert_eq!(
                image_sum,
                hom.apply(&a).unwrap().add(&hom.apply(&b).unwrap()).unwrap(),
                "{} is additive",
                map.name()
            );
            let image_prod = hom.apply(&a.mul(&b).unwrap()).unwrap();
            assert_eq!(
                image_prod,
                hom.apply(&a).unwrap().mul(&hom.apply(&b).unwrap()).unwrap(),
                "{} is multiplicative",
                map.name()
            );
        }
    }
}

#[test]
fn pullback_is_additive_and_multiplicative() {
    let mut rng = SplitMix64::new(0x7075_6c04);
    let bo3 = Space::bo(3);
    for map in [maps::phi(T), maps::i1(T), maps::i2(T)] {
        for _ in 0..40 {
            let e = random_bundle(&mut rng, &bo3);
            let f = random_bundle(&mut rng, &bo3);
            // Whitney sums pull back to Whitney sums.
            let lhs = pullback(&map, &e.sum(&f).unwrap()).unwrap();
            let rhs = pullback(&map, &e)
                .unwrap()
                .sum(&pullback(&map, &f).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "pullback along {} is additive", map.name());
            // The total class pulls back multiplicatively: the hom applied
            // to w(E)w(F) matches w(phi^* E) w(phi^* F).
            let product = e
                .total_sw()
                .total()
                .mul(f.total_sw().total())
                .unwrap();
            let pulled = map.hom().apply(&product).unwrap();
            assert_eq!(
                &pulled,
                lhs.total_sw().total(),
                "total classes multiply under pullback along {}",
                map.name()
            );
        }
    }
}

#[test]
fn tensor_line_formulas() {
    let mut rng = SplitMix64::new(0x7465_6e05);
    let bz2 = Space::bz2();
    let line = sigma(T);
    let trivial_line = VirtualBundle::trivial(&bz2, 1, T);
    let l = line.w(1);
    for _ in 0..60 {
        // A random genuine bundle over BZ2: j sigma + k R, so no class
        // appears above the rank.
        let j = rng.below(5) as u32;
        let k = rng.below(4) as i64;
        let e = sigma(T)
            .pow_sum(j)
            .sum(&VirtualBundle::trivial(&bz2, k, T))
            .unwrap();
        let n = e.rank() as u32;
        let twisted = tensor_line(&e, &line).expect("genuine bundle");
        assert_eq!(twisted.rank(), e.rank());
        // w1(E (x) L) = w1(E) + n * w1(L).
        let mut expected_w1 = e.w(1);
        if n % 2 == 1 {
            expected_w1 = expected_w1.add(&l).unwrap();
        }
        assert_eq!(twisted.w(1), expected_w1);
        // Tensoring with the trivial line changes nothing.
        assert_eq!(tensor_line(&e, &trivial_line).unwrap(), e);
    }
}

#[test]
fn twist_equivalence_is_an_equivalence_relation() {
    let mut rng = SplitMix64::new(0x6571_7506);
    let bz2 = Space::bz2();
    // 4 sigma - 4 is a rank-0 spin bundle; adding multiples of it preserves
    // the twist class.
    let four_sigma = sigma(T)
        .pow_sum(4)
        .sum(&VirtualBundle::trivial(&bz2, -4, T))
        .unwrap();
    assert!(classify(&four_sigma).spin);
    for _ in 0..40 {
        let e = random_bundle(&mut rng, &bz2);
        let f = e.sum(&four_sigma).unwrap();
        let g = f.sum(&four_sigma.pow_sum(2)).unwrap();
        // Reflexive.
        assert!(twist_equivalent(&e, &e).unwrap().equivalent);
        // Symmetric.
        assert_eq!(
            twist_equivalent(&e, &f).unwrap().equivalent,
            twist_equivalent(&f, &e).unwrap().equivalent
        );
        // Transitive along the sampled chain.
        assert!(twist_equivalent(&e, &f).unwrap().equivalent);
        assert!(twist_equivalent(&f, &g).unwrap().equivalent);
        assert!(twist_equivalent(&e, &g).unwrap().equivalent);
        // A rank perturbation breaks equivalence.
        let shifted = e.sum(&VirtualBundle::trivial(&bz2, 1, T)).unwrap();
        assert!(!twist_equivalent(&e, &shifted).unwrap().equivalent);
        // The witness difference reported really has vanishing w1, w2.
        let report = twist_equivalent(&e, &f).unwrap();
        assert!(report.w1.is_zero() && report.w2.is_zero());
    }
}

/// A random spectrum expression over the catalog spaces.
fn random_spectrum(rng: &mut SplitMix64, depth: u32) -> SpectrumExpr {
    let spaces = [Space::bz2(), Space::bso(3), Space::bu1()];
    if depth == 0 || rng.below(3) == 0 {
        return match rng.below(4) {
            0 => SpectrumExpr::Named(
                SpectrumName::ALL[rng.below(SpectrumName::ALL.len() as u64) as usize],
            ),
            1 => SpectrumExpr::Sphere,
            2 => SpectrumExpr::PlusPoint(spaces[rng.below(3) as usize].clone()),
            _ => {
                let base = spaces[rng.below(3) as usize].clone();
                let ring = base.cohomology(T);
                let rank = rng.below(7) as i64 - 3;
                SpectrumExpr::thom(
                    VirtualBundle::from_parts(base, rank, random_unit(rng, &ring)).unwrap(),
                )
            }
        };
    }
    match rng.below(3) {
        0 => SpectrumExpr::suspend(rng.below(9) as i64 - 4, random_spectrum(rng, depth - 1)),
        1 => SpectrumExpr::smash(
            random_spectrum(rng, depth - 1),
            random_spectrum(rng, depth - 1),
        ),
        _ => SpectrumExpr::SmashMTSpin(Box::new(random_spectrum(rng, depth - 1))),
    }
}

#[test]
fn normalization_is_idempotent_on_random_spectra() {
    let mut rng = SplitMix64::new(0x6e6f_7207);
    for _ in 0..200 {
        let e = random_spectrum(&mut rng, 3);
        let nf = normalize(&e);
        assert_eq!(normalize(&nf.to_expr()), nf, "normalize(nf(e)) = nf(e)");
    }
}

#[test]
fn certificate_replay_is_deterministic() {
    let main = verify_main_theorem(16);
    let smith = verify_spinc_spinh(16);
    for cert in [
        &main.certificate,
        &main.crush_certificate,
        &smith.fiber_certificate,
        &smith.total_certificate,
        &smith.base_certificate,
    ] {
        let first = replay(cert).expect("certificate replays");
        let second = replay(cert).expect("certificate replays");
        assert_eq!(first, second, "replay is a pure function");
        let third = replay(&cert.clone()).expect("certificate replays");
        assert_eq!(first, third);
    }
}

#[test]
fn rel_thom_witness_tampering_is_always_rejected() {
    let mut rng = SplitMix64::new(0x6675_7a08);
    let report = verify_main_theorem(16);
    let cert = report.certificate;
    let positions: Vec<usize> = cert
        .steps
        .iter()
        .enumerate()
        .filter(|(_, s)| s.rule == RULE_REL_THOM)
        .map(|(i, _)| i)
        .collect();
    assert!(!positions.is_empty());
    for _ in 0..40 {
        let target = positions[rng.below(positions.len() as u64) as usize];
        let mut tampered = cert.clone();
        let Witness::Bundle(b) = &tampered.steps[target].witness else {
            panic!("REL_THOM always carries a bundle witness");
        };
        let trunc = b.truncation();
        let bad = match rng.below(3) {
            // Break the rank-0 side condition.
            0 => b
                .sum(&VirtualBundle::trivial(b.base(), 1 + rng.below(3) as i64, trunc))
                .unwrap(),
            // Break the spin side condition with a fresh non-spin summand
            // over the same base (v_so(3) over BSO3, random otherwise).
            1 => {
                let perturbation = if *b.base() == Space::bso(3) {
                    v_so(3, trunc)
                        .sum(&VirtualBundle::trivial(b.base(), -3, trunc))
                        .unwrap()
                } else {
                    random_bundle_at(&mut rng, b.base(), trunc)
                };
                b.sum(&perturbation).unwrap()
            }
            // Replace the witness wholesale.
            _ => random_bundle_at(&mut rng, b.base(), trunc),
        };
        // Skip the rare draw that happens to stay a rank-0 spin bundle
        // equal in effect to the original: those must still replay.
        let still_valid = bad.rank() == 0 && classify(&bad).spin
            && bad.total_sw() == b.total_sw();
        tampered.steps[target].witness = Witness::Bundle(bad);
        match replay(&tampered) {
            Ok(_) => assert!(still_valid, "only a genuinely equivalent witness may pass"),
            Err(_) => {}
        }
    }
}
