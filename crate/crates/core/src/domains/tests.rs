use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{compose, jacobian_det, RationalFunction};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn membership_examples() {
    assert!(Domain::UnitDisc.contains(&[c(0.99, 0.0)]).unwrap());
    assert!(!Domain::UnitDisc.contains(&[c(0.8, 0.7)]).unwrap());
    assert!(Domain::SymmetrizedPolydisc(2).contains(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap());
    // t² − 2t + 1 has the double root 1
    assert!(!Domain::SymmetrizedPolydisc(2).contains(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap());
    assert!(matches!(
        Domain::Polydisc(2).contains(&[c(0.0, 0.0)]),
        Err(LabError::DimensionMismatch { .. })
    ));
}

#[test]
fn gauss_legendre_is_exact_for_polynomials() {
    let (x, w) = gauss_legendre(7);
    for k in 0..=13 {
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
        let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
        assert!((q - exact).abs() < 1e-14, "k={k}: {q} vs {exact}");
    }
}

#[test]
fn disc_rule_basic_integrals() {
    let rule = quadrature(Domain::UnitDisc, 4);
    assert!((rule.total_weight() - 1.0).abs() < 1e-14);
    let m2 = rule.integrate(|z| Ok(Complex64::new(z[0].norm_sqr(), 0.0))).unwrap();
    assert!((m2 - c(0.5, 0.0)).norm() < 1e-14);
    assert!(rule.nodes.iter().all(|z| z[0].norm() < 1.0));
}

#[test]
fn polydisc_moments() {
    let level = 6;
    let rule = quadrature(Domain::Polydisc(2), level);
    let idx = MultiIndex::up_to_degree(2, (level / 2) as u32);
    for a in &idx {
        for b in &idx {
            let v = rule
                .integrate(|z| {
                    let za = z[0].powu(a.0[0]) * z[1].powu(a.0[1]);
                    let zb = z[0].powu(b.0[0]) * z[1].powu(b.0[1]);
                    Ok(za * zb.conj())
                })
                .unwrap();
            let expect = if a == b {
                a.0.iter().map(|&k| 1.0 / (k as f64 + 1.0)).product::<f64>()
            } else {
                0.0
            };
            assert!((v - c(expect, 0.0)).norm() < 1e-12, "{a} {b}: {v}");
        }
    }
}

#[test]
fn symmetrized_volume_matches_polydisc_oracle() {
    // oracle: (1/2!) ∫_{D²} |z1 − z2|² dμ on the plain polydisc rule
    let poly_rule = quadrature(Domain::Polydisc(2), 4);
    let oracle = poly_rule
        .integrate(|z| Ok(Complex64::new(0.5 * (z[0] - z[1]).norm_sqr(), 0.0)))
        .unwrap()
        .re;
    assert!((oracle - 0.5).abs() < 1e-14, "oracle {oracle}");
    const G2_VOLUME: f64 = 0.5;
    let push = quadrature(Domain::SymmetrizedPolydisc(2), 4);
    assert!((push.total_weight() - G2_VOLUME).abs() < 1e-14);
    assert!(push.nodes.iter().all(|w| Domain::SymmetrizedPolydisc(2).contains(w).unwrap()));
}

#[test]
fn monomial_norm_examples() {
    let d = Domain::UnitDisc;
    assert_eq!(d.monomial_norm(&MultiIndex(vec![0])).unwrap(), 1.0);
    for n in 0..10u32 {
        let v = d.monomial_norm(&MultiIndex(vec![n])).unwrap();
        assert!((v - 1.0 / ((n + 1) as f64).sqrt()).abs() < 1e-15);
    }
    let alpha = MultiIndex(vec![1, 2]);
    let v = Domain::Polydisc(2).monomial_norm(&alpha).unwrap();
    assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    let rule = quadrature(Domain::Polydisc(2), 6);
    let q = rule
        .integrate(|z| Ok(Complex64::new((z[0] * z[1].powu(2)).norm_sqr(), 0.0)))
        .unwrap();
    assert!((q.re.sqrt() - v).abs() < 1e-12);
    assert_eq!(
        Domain::SymmetrizedPolydisc(2).monomial_norm(&MultiIndex(vec![0, 0])),
        Err(LabError::NotReinhardt)
    );
}

#[test]
fn level_refinement_is_consistent() {
    for domain in [Domain::UnitDisc, Domain::Polydisc(2), Domain::SymmetrizedPolydisc(2)] {
        let level = 6;
        let a = quadrature(domain, level);
        let b = quadrature(domain, level + 2);
        for alpha in MultiIndex::up_to_degree(domain.dim(), (level / 2) as u32) {
            let p = Polynomial::monomial(alpha.clone(), c(1.0, 0.0));
            let na = a.norm_sq(&a.sample(&p).unwrap());
            let nb = b.norm_sq(&b.sample(&p).unwrap());
            assert!((na - nb).abs() < 1e-10, "{domain:?} {alpha}: {na} vs {nb}");
        }
    }
}

#[test]
fn pushforward_matches_direct_polydisc_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [2usize, 3] {
        let s: Vec<RationalFunction> =
            symmetrization_polys(d).into_iter().map(Into::into).collect();
        let js = jacobian_det(&s).unwrap().as_polynomial().unwrap();
        let fact: f64 = (1..=d).map(|k| k as f64).product();
        let push = quadrature(Domain::SymmetrizedPolydisc(d), 8);
        let flat = quadrature(Domain::Polydisc(d), 8);
        for _ in 0..10 {
            let g = random_poly(&mut rng, d, 2);
            let lhs = push.norm_sq(&push.sample(&g).unwrap());
            let gs = compose(&g, &s).unwrap().as_polynomial().unwrap();
            let integrand = &gs * &js;
            let rhs = flat.norm_sq(&flat.sample(&integrand).unwrap()) / fact;
            assert!((lhs - rhs).abs() < 1e-10, "d={d}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn symmetrized_membership_agrees_with_root_multiset() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2usize, 3] {
        let g = Domain::SymmetrizedPolydisc(d);
        for _ in 0..100 {
            let z: Vec<Complex64> = (0..d).map(|_| sample_disc(&mut rng, 0.999)).collect();
            assert!(g.contains(&symmetrize(&z, d)).unwrap());
        }
        for _ in 0..100 {
            let mut z: Vec<Complex64> = (0..d).map(|_| sample_disc(&mut rng, 0.999)).collect();
            let k = rng.gen_range(0..d);
            let m = z[k].norm().max(1e-3);
            z[k] *= 1.02 / m;
            let inside = z.iter().all(|x| x.norm() < 1.0);
            assert_eq!(g.contains(&symmetrize(&z, d)).unwrap(), inside);
        }
    }
}

#[test]
fn symmetrize_matches_elementary_polynomials() {
    let z = [c(0.1, 0.2), c(-0.3, 0.4), c(0.5, -0.1)];
    let direct: Vec<Complex64> =
        symmetrization_polys(3).iter().map(|p| p.eval(&z).unwrap()).collect();
    let fast = symmetrize(&z, 3);
    for (a, b) in direct.iter().zip(&fast) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn csv_dump_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rule.csv");
    let rule = quadrature(Domain::Polydisc(2), 1);
    rule.dump_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re_z1,im_z1,re_z2,im_z2,weight");
    assert_eq!(lines.count(), rule.len());
}

pub(crate) fn random_poly<R: Rng>(rng: &mut R, dim: usize, deg: u32) -> Polynomial {
    Polynomial::from_terms(
        dim,
        MultiIndex::up_to_degree(dim, deg)
            .into_iter()
            .map(|a| (a, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
    )
}
