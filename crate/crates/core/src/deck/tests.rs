use super::*;
use crate::algebra::monomial;
use crate::maps::{blaschke, parse_map};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn fit_recovers_an_automorphism() {
    let h = Mobius::from_descriptor(c(0.3, -0.4), 1.1);
    let src = [c(0.1, 0.2), c(-0.5, 0.1), c(0.0, -0.7)];
    let dst = src.map(|z| h.apply(z));
    let g = Mobius::fit(src, dst).unwrap();
    assert!(g.is_disc_automorphism(1e-10));
    let d = g.descriptor();
    assert!((d.a[0] - 0.3).abs() < 1e-12 && (d.a[1] + 0.4).abs() < 1e-12);
    assert!((d.theta - 1.1).abs() < 1e-12);
}

#[test]
fn fit_rejects_non_automorphisms() {
    let src = [c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)];
    let dst = src.map(|z| z * 0.5);
    assert!(!Mobius::fit(src, dst).unwrap().is_disc_automorphism(1e-8));
}

#[test]
fn composition_matches_pointwise() {
    let a = Mobius::from_descriptor(c(0.2, 0.1), 0.4);
    let b = Mobius::from_descriptor(c(-0.5, 0.3), -2.0);
    let z = c(0.3, -0.6);
    assert!((a.compose(&b).apply(z) - a.apply(b.apply(z))).norm() < 1e-14);
    let h = 1e-6;
    let numeric = (a.apply(z + h) - a.apply(z - h)) / (2.0 * h);
    assert!((numeric - a.derivative(z)).norm() < 1e-8);
}

#[test]
fn powers_have_rotation_groups() {
    for n in 1..=5u32 {
        let g = deck_group_blaschke(&parse_map(&format!("power:{n}")).unwrap(), 1e-8).unwrap();
        assert_eq!(g.order(), n as usize);
        assert!(g.is_galois());
        for (k, e) in g.elements.iter().enumerate() {
            let d = e.maps[0].descriptor();
            assert!(d.a[0].hypot(d.a[1]) < 1e-10);
            let theta = d.theta.rem_euclid(TAU);
            let expected = TAU * k as f64 / n as f64;
            assert!((theta - expected).abs() < 1e-8 || (theta - expected).abs() > TAU - 1e-8, "n={n} k={k}");
        }
    }
}

#[test]
fn catalog_blaschke_products_have_trivial_deck() {
    for name in ["b1", "b2"] {
        let g = deck_group_blaschke(&parse_map(name).unwrap(), 1e-8).unwrap();
        assert_eq!(g.order(), 1, "{name}");
        assert!(!g.is_galois());
        let d = g.elements[0].maps[0].descriptor();
        assert!(d.a[0].hypot(d.a[1]) < 1e-10 && d.theta.abs() < 1e-10);
    }
}

#[test]
fn squared_automorphism_has_a_non_rotation_deck() {
    let a = c(0.3, 0.2);
    let b = blaschke(&[a], &[2], 0.0).unwrap();
    let g = deck_group_blaschke(&b, 1e-8).unwrap();
    assert_eq!(g.order(), 2);
    assert!(g.is_galois());
    let phi = Mobius::from_descriptor(a, 0.0);
    let inv = Mobius::from_descriptor(-a, 0.0);
    let expected = inv.compose(&Mobius::from_descriptor(c(0.0, 0.0), std::f64::consts::PI)).compose(&phi);
    assert!(g.elements.iter().any(|e| e.maps[0].distance(&expected) < 1e-8));
    assert!(g.soundness(200, 1).unwrap() < 1e-7);
}

#[test]
fn polydisc_products() {
    let cases = [("prod", 1, false), ("prod:power:2|power:2", 4, true), ("prod:power:2|power:3", 6, true), ("prod:b1|power:2", 2, false)];
    for (name, order, galois) in cases {
        let g = deck_group_polydisc(&parse_map(name).unwrap()).unwrap();
        assert_eq!(g.order(), order, "{name}");
        assert_eq!(g.is_galois(), galois, "{name}");
        assert!(g.elements.iter().all(|e| e.perm == vec![0, 1]), "{name}");
    }
}

#[test]
fn symmetrized_products() {
    let g = deck_group_symmetrized(&parse_map("ez:b2:2").unwrap()).unwrap();
    assert_eq!(g.order(), 1);
    let g = deck_group_symmetrized(&parse_map("ez:power:2:2").unwrap()).unwrap();
    assert_eq!(g.order(), 2);
    assert_eq!(g.report().fiber_size, 4);
    assert!(!g.is_galois());
    let w = symmetrize(&[c(0.3, 0.1), c(-0.2, 0.4)], 2);
    let moved = g.elements[1].apply(&w).unwrap();
    assert!((moved[0] + w[0]).norm() < 1e-12 && (moved[1] - w[1]).norm() < 1e-12);
}

#[test]
fn symmetrization_deck_is_the_symmetric_group() {
    for (d, order) in [(2, 2), (3, 6)] {
        let g = deck_group(&parse_map(&format!("sym:{d}")).unwrap()).unwrap();
        assert_eq!(g.order(), order);
        assert!(g.is_galois());
    }
}

#[test]
fn groups_are_sound_closed_and_transitive_iff_galois() {
    for name in ["b1", "b2", "power:3", "prod", "prod:power:2|power:2", "sym:2", "sym:3", "ez:b2:2", "ez:power:2:2"] {
        let g = deck_group(&parse_map(name).unwrap()).unwrap();
        assert!(g.soundness(200, 99).unwrap() < 1e-7, "{name}");
        assert!(g.is_group(), "{name}");
        assert_eq!(g.is_transitive(5, 7).unwrap(), g.is_galois(), "{name}");
    }
}

#[test]
fn galois_averaging_is_the_fiber_projection() {
    for name in ["power:3", "prod:power:2|power:3", "sym:2", "sym:3"] {
        let f = parse_map(name).unwrap();
        let g = deck_group(&f).unwrap();
        let phi = match f.dim() {
            1 => monomial(&[4]),
            2 => monomial(&[2, 1]),
            _ => monomial(&[2, 1, 0]),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<_> = (0..20).map(|_| f.source().sample(&mut rng, 0.85)).collect();
        assert!(g.factorization_residual(&phi, &pts).unwrap() < 1e-7, "{name}");
    }
}

#[test]
fn report_serializes() {
    let g = deck_group(&parse_map("power:2").unwrap()).unwrap();
    let v = serde_json::to_value(g.report()).unwrap();
    assert_eq!(v["fiber_size"], 2);
    assert_eq!(v["is_galois"], true);
    assert_eq!(v["elements"].as_array().unwrap().len(), 2);
    assert!(format_group(&g).contains("order 2"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn fit_inverts_random_automorphisms(r in 0.0..0.9f64, t in 0.0..TAU, theta in -3.0..3.0f64) {
        let h = Mobius::from_descriptor(Complex64::from_polar(r, t), theta);
        let src = [c(0.05, 0.1), c(-0.4, 0.3), c(0.2, -0.6)];
        let g = Mobius::fit(src, src.map(|z| h.apply(z))).unwrap();
        prop_assert!(g.is_disc_automorphism(1e-8));
        prop_assert!(g.distance(&h) < 1e-8);
    }
}
