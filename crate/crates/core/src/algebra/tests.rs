use num_complex::Complex64;
use proptest::prelude::*;

use super::symmetric::elementary;
use super::*;
use crate::error::LabError;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(re: f64) -> Complex64 {
    c(re, 0.0)
}

fn blaschke_factor(a: Complex64) -> RationalFunction {
    let z = Polynomial::variable(1, 0);
    let num = &z - &Polynomial::constant(1, a);
    let den = &Polynomial::one(1) - &z.scale(a.conj());
    RationalFunction::new(num, den).unwrap()
}

#[test]
fn eval_examples() {
    let p = &monomial(&[1, 1]) + &Polynomial::one(2);
    assert_eq!(p.eval(&[r(2.0), r(3.0)]).unwrap(), r(7.0));

    let b = blaschke_factor(r(0.5));
    assert!(b.eval(&[r(0.5)]).unwrap().norm() < 1e-16);

    let s2 = elementary(3, 2);
    assert_eq!(s2.eval(&[r(1.0), r(1.0), r(1.0)]).unwrap(), r(3.0));
}

#[test]
fn eval_errors() {
    let p = monomial(&[1, 1]);
    assert_eq!(
        p.eval(&[r(1.0)]),
        Err(LabError::DimensionMismatch { expected: 2, found: 1 })
    );
    // pole of (z − 1/2)/(1 − z/2) sits at z = 2
    let b = blaschke_factor(r(0.5));
    assert!(matches!(b.eval(&[r(2.0)]), Err(LabError::PoleEvaluation { .. })));
}

#[test]
fn zero_polynomial_has_degree_minus_one() {
    assert_eq!(Polynomial::zero(2).degree(), -1);
    assert_eq!(Polynomial::one(2).degree(), 0);
    let p = &monomial(&[2, 1]) - &monomial(&[2, 1]);
    assert!(p.is_zero());
}

#[test]
fn compose_examples() {
    let f = monomial(&[2]);
    let g = RationalFunction::from_poly(monomial(&[3]));
    let h = compose(&f, &[g]).unwrap();
    assert!(h.is_polynomial());
    assert!(h.as_polynomial().unwrap().approx_eq(&monomial(&[6]), 0.0));

    let f = &monomial(&[1, 0]) + &monomial(&[0, 1]);
    let g: Vec<RationalFunction> = (1..=2).map(|k| elementary(2, k).into()).collect();
    let h = compose(&f, &g).unwrap().as_polynomial().unwrap();
    let expect = &(&monomial(&[1, 0]) + &monomial(&[0, 1])) + &monomial(&[1, 1]);
    assert!(h.approx_eq(&expect, 1e-15));
}

#[test]
fn compose_identity_into_rudin_product() {
    let zeros = [r(-0.5), r(0.0), r(0.75)];
    let mut b = RationalFunction::from_poly(Polynomial::one(1));
    for a in zeros {
        b = b.mul(&blaschke_factor(a));
    }
    let id = monomial(&[1]);
    let h = compose(&id, &[b.clone()]).unwrap();
    assert!(h.approx_eq(&b, 1e-14));
    // denominator is ∏ (1 − ā_j z)
    let mut den = Polynomial::one(1);
    for a in zeros {
        den = &den * &(&Polynomial::one(1) - &monomial(&[1]).scale(a.conj()));
    }
    assert!(h.denominator().approx_eq(&den, 1e-14));
}

#[test]
fn partial_examples() {
    let p = monomial(&[2, 1]);
    assert!(p.partial(0).approx_eq(&monomial(&[1, 1]).scale_real(2.0), 0.0));
    assert!(Polynomial::constant(3, r(4.0)).partial(2).is_zero());
}

#[test]
fn partial_of_blaschke_factor_matches_difference_quotient() {
    // oracle: central difference quotient, step 1e-6
    let a = c(0.3, -0.4);
    let b = blaschke_factor(a);
    let db = b.partial(0);
    let closed = |z: Complex64| (1.0 - a.norm_sqr()) / (r(1.0) - a.conj() * z).powi(2);
    let h = 1e-6;
    for z in [c(0.1, 0.2), c(-0.5, 0.1), c(0.0, -0.7), c(0.6, 0.6), c(-0.2, -0.3)] {
        let fd = (b.eval(&[z + h]).unwrap() - b.eval(&[z - h]).unwrap()) / (2.0 * h);
        let sym = db.eval(&[z]).unwrap();
        assert!((sym - fd).norm() < 1e-6, "{sym} vs {fd}");
        assert!((sym - closed(z)).norm() < 1e-12);
    }
}

#[test]
fn jacobian_examples() {
    let s: Vec<RationalFunction> = (1..=2).map(|k| elementary(2, k).into()).collect();
    let j = jacobian_det(&s).unwrap().as_polynomial().unwrap();
    let expect = &monomial(&[1, 0]) - &monomial(&[0, 1]);
    assert!(j.approx_eq(&expect, 1e-15), "{j}");

    let j = jacobian_det(&[monomial(&[5]).into()]).unwrap().as_polynomial().unwrap();
    assert!(j.approx_eq(&monomial(&[4]).scale_real(5.0), 1e-15));

    let id: Vec<RationalFunction> =
        (0..3).map(|i| Polynomial::variable(3, i).into()).collect();
    let j = jacobian_det(&id).unwrap().as_polynomial().unwrap();
    assert!(j.approx_eq(&Polynomial::one(3), 1e-15));
}

#[test]
fn jacobian_rejects_non_square() {
    let g: Vec<RationalFunction> = vec![monomial(&[1, 1]).into()];
    assert!(matches!(jacobian_det(&g), Err(LabError::DimensionMismatch { .. })));
}

#[test]
fn polynomial_json_wire_format() {
    let p = Polynomial::from_terms(2, [(MultiIndex(vec![1, 2]), c(1.5, -2.0))]);
    let json = serde_json::to_value(&p).unwrap();
    assert_eq!(
        json,
        serde_json::json!({"dim": 2, "terms": [{"alpha": [1, 2], "re": 1.5, "im": -2.0}]})
    );
    let bad = serde_json::json!({"dim": 2, "terms": [{"alpha": [1], "re": 1.0, "im": 0.0}]});
    assert!(serde_json::from_value::<Polynomial>(bad).is_err());
}

#[test]
fn division_by_linear_factor() {
    let z1 = Polynomial::variable(2, 0);
    let z2 = Polynomial::variable(2, 1);
    let num = &z1.pow(2) - &z2.pow(2);
    let (q, rem) = num.div_rem_in(0, &(&z1 - &z2)).unwrap();
    assert!(q.approx_eq(&(&z1 + &z2), 1e-15));
    assert!(rem.is_zero());
    let (_, rem) = (&z1 + &Polynomial::one(2)).div_rem_in(0, &(&z1 - &z2)).unwrap();
    assert!(!rem.is_zero());
}

// ---- property tests ----

fn arb_poly(dim: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let idx = MultiIndex::up_to_degree(dim, max_deg);
    let n = idx.len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, prop::bool::weighted(0.6)), n).prop_map(
        move |cs| {
            Polynomial::from_terms(
                dim,
                idx.iter()
                    .zip(cs)
                    .filter(|(_, (_, _, keep))| *keep)
                    .map(|(a, (re, im, _))| (a.clone(), c(re, im))),
            )
        },
    )
}

fn arb_point(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-0.9f64..0.9, -0.9f64..0.9).prop_map(|(a, b)| c(a, b)), dim)
}

fn arb_rational(dim: usize) -> impl Strategy<Value = RationalFunction> {
    // denominators 1 + small perturbation keep poles away from the sample box
    (arb_poly(dim, 2), arb_poly(dim, 1)).prop_map(move |(n, d)| {
        let den = &Polynomial::constant(dim, r(2.0)) + &d.scale_real(0.3);
        RationalFunction::new(n, den).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compose_agrees_with_pointwise(
        f in arb_poly(2, 3),
        g1 in arb_rational(2),
        g2 in arb_rational(2),
        pts in prop::collection::vec(arb_point(2), 20),
    ) {
        let h = compose(&f, &[g1.clone(), g2.clone()]).unwrap();
        for z in &pts {
            let direct = f.eval(&[g1.eval(z).unwrap(), g2.eval(z).unwrap()]).unwrap();
            let via = h.eval(z).unwrap();
            prop_assert!((direct - via).norm() < 1e-10, "{} vs {}", direct, via);
        }
    }

    #[test]
    fn partials_commute(f in arb_poly(3, 5), i in 0usize..3, j in 0usize..3) {
        let a = f.partial(i).partial(j);
        let b = f.partial(j).partial(i);
        prop_assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn product_rule(f in arb_poly(2, 4), g in arb_poly(2, 4), i in 0usize..2) {
        let lhs = (&f * &g).partial(i);
        let rhs = &(&f.partial(i) * &g) + &(&f * &g.partial(i));
        prop_assert!(lhs.approx_eq(&rhs, 1e-11));
    }

    #[test]
    fn jacobian_chain_rule(
        g in prop::collection::vec(arb_poly(2, 2), 2),
        h in prop::collection::vec(arb_poly(2, 2), 2),
        pts in prop::collection::vec(arb_point(2), 20),
    ) {
        let hr: Vec<RationalFunction> = h.iter().cloned().map(Into::into).collect();
        let gr: Vec<RationalFunction> = g.iter().cloned().map(Into::into).collect();
        let gh: Vec<RationalFunction> = g.iter().map(|gi| compose(gi, &hr).unwrap()).collect();
        let j_gh = jacobian_det(&gh).unwrap();
        let j_g = jacobian_det(&gr).unwrap();
        let j_h = jacobian_det(&hr).unwrap();
        for z in &pts {
            let hz: Vec<Complex64> = hr.iter().map(|f| f.eval(z).unwrap()).collect();
            let lhs = j_gh.eval(z).unwrap();
            let rhs = j_g.eval(&hz).unwrap() * j_h.eval(z).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9, "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn json_round_trip(p in arb_poly(3, 4)) {
        let s = serde_json::to_string(&p).unwrap();
        let q: Polynomial = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(p, q);
    }
}
