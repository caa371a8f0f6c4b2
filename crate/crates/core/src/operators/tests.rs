use super::*;
use crate::algebra::monomial;
use crate::groups::{cyclic_group, symmetric_group};
use crate::maps::parse_map;
use crate::algebra::MultiIndex;
use crate::spaces::random_polynomial;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn points(f: &ProperMap, n: usize, radius: f64, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| f.source().sample(&mut rng, radius)).collect()
}

#[test]
fn disc_shift_matches_weights() {
    let m = mult_matrix(&Polynomial::variable(1, 0), Domain::UnitDisc, 4, 5).unwrap();
    let expected = multishift_matrix(Domain::UnitDisc, 0, 4, 5).unwrap();
    assert!(m.max_deviation(&expected) < 1e-12);
    assert!((m.entries[(1, 0)].re - (0.5f64).sqrt()).abs() < 1e-12);
    assert!((m.entries[(2, 1)].re - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
}

#[test]
fn polydisc_shift_matches_weights() {
    for i in 0..2 {
        let m = mult_matrix(&Polynomial::variable(2, i), Domain::Polydisc(2), 3, 4).unwrap();
        let expected = multishift_matrix(Domain::Polydisc(2), i, 3, 4).unwrap();
        assert!(m.max_deviation(&expected) < 1e-12);
    }
}

#[test]
fn short_rows_are_refused() {
    let sym = Polynomial::variable(1, 0).pow(2);
    assert!(matches!(
        mult_matrix(&sym, Domain::UnitDisc, 4, 5),
        Err(LabError::TruncationUnsafe { row_cap: 5, needed: 6 })
    ));
    assert!(matches!(
        multishift_matrix(Domain::SymmetrizedPolydisc(2), 0, 2, 3),
        Err(LabError::NotReinhardt)
    ));
}

#[test]
fn fiber_projection_fixes_pullbacks() {
    for name in ["b2", "power:3", "sym:2", "prod"] {
        let f = parse_map(name).unwrap();
        let psi = match f.dim() {
            1 => Polynomial::from_terms(1, [(MultiIndex(vec![0]), c(0.3, 0.1)), (MultiIndex(vec![2]), c(-0.7, 0.2))]),
            _ => Polynomial::from_terms(2, [(MultiIndex(vec![1, 0]), c(0.5, 0.0)), (MultiIndex(vec![1, 1]), c(0.1, -0.4))]),
        };
        let g = crate::spaces::gamma_apply(&f, Function::Poly(psi));
        for z in points(&f, 10, 0.85, 3) {
            let p = project_fiber(&f, &g, &z).unwrap();
            assert!((p - g.eval(&z).unwrap()).norm() < 1e-9, "{name}");
        }
    }
}

#[test]
fn fiber_projection_is_idempotent() {
    let f = parse_map("b1").unwrap();
    let phi = monomial(&[3]);
    let once = FnHolomorphic::new(1, |z: &[Complex64]| project_fiber(&f, &phi, z));
    for z in points(&f, 8, 0.8, 5) {
        let a = project_fiber(&f, &once, &z).unwrap();
        let b = once.eval(&z).unwrap();
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn fiber_projection_matches_group_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases = [("sym:2", symmetric_group(2)), ("sym:3", symmetric_group(3)), ("power:3", cyclic_group(3))];
    for (name, g) in cases {
        let f = parse_map(name).unwrap();
        let phi = random_polynomial(&mut rng, f.dim(), 4);
        let exact = project_group(&g, &phi).unwrap();
        for z in points(&f, 6, 0.8, 7) {
            let a = project_fiber(&f, &phi, &z).unwrap();
            let b = project_group_at(&g, &phi, &z).unwrap();
            assert!((a - b).norm() < 1e-9, "{name}");
            assert!((b - exact.eval(&z).unwrap()).norm() < 1e-12, "{name}");
        }
    }
}

#[test]
fn fiber_projection_matches_gram_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (name, deg, cap) in [("b2", 4, 5), ("b1", 5, 2), ("prod", 2, 3), ("sym:2", 3, 3)] {
        let f = parse_map(name).unwrap();
        let phi = random_polynomial(&mut rng, f.dim(), deg);
        let oracle = GramProjector::new(&f, cap, deg).unwrap();
        let reference = oracle.project(&phi).unwrap();
        let mut worst: f64 = 0.0;
        for z in points(&f, 8, 0.8, 19) {
            let a = project_fiber(&f, &phi, &z).unwrap();
            worst = worst.max((a - reference.eval(&z).unwrap()).norm());
        }
        assert!(worst < 1e-8, "{name}: {worst:e}");
    }
}

#[test]
fn projection_commutes_with_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for name in ["b1", "b2", "prod", "sym:2", "ez:b2:2"] {
        let f = parse_map(name).unwrap();
        let phi = random_polynomial(&mut rng, f.dim(), 3);
        let pts = points(&f, 5, 0.8, 29);
        let r = commutator_residual(&f, &[&phi], &pts).unwrap();
        assert!(r < 1e-8, "{name}: {r:e}");
    }
}

#[test]
fn branch_points_are_refused() {
    let f = parse_map("power:2").unwrap();
    let phi = monomial(&[1]);
    assert!(project_fiber(&f, &phi, &[c(1e-9, 0.0)]).is_err());
}

#[test]
fn restriction_is_the_target_shift() {
    for (name, cap) in [("power:2", 5), ("b2", 4), ("b1", 3), ("prod", 2), ("sym:2", 3)] {
        let f = parse_map(name).unwrap();
        let lifted = restriction_matrix(&f, cap).unwrap();
        let target = bergman_operator_matrices(f.target(), cap).unwrap();
        for (a, b) in lifted.iter().zip(&target) {
            let dev = a.max_deviation(&b.entries);
            assert!(dev < 1e-8, "{name}: {dev:e}");
        }
    }
}

#[test]
fn compressed_shifts_are_irreducible() {
    let f = parse_map("b2").unwrap();
    let mats: Vec<_> = restriction_matrix(&f, 5).unwrap().iter().map(|m| m.compressed()).collect();
    assert_eq!(commutant_dimension(&mats, 1e-8), 1);
    let g = parse_map("sym:2").unwrap();
    let mats: Vec<_> = restriction_matrix(&g, 3).unwrap().iter().map(|m| m.compressed()).collect();
    assert_eq!(commutant_dimension(&mats, 1e-8), 1);
}

#[test]
fn direct_sums_have_larger_commutant() {
    let s = multishift_matrix(Domain::UnitDisc, 0, 3, 4).unwrap();
    let t = s.rows(0, 4).into_owned();
    let mut sum = DMatrix::zeros(8, 8);
    sum.view_mut((0, 0), (4, 4)).copy_from(&t);
    sum.view_mut((4, 4), (4, 4)).copy_from(&t);
    assert_eq!(commutant_dimension(&[t], 1e-8), 1);
    assert_eq!(commutant_dimension(&[sum], 1e-8), 4);
}

#[test]
fn csv_lists_every_entry() {
    let m = mult_matrix(&Polynomial::variable(1, 0), Domain::UnitDisc, 2, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    m.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 4);
}

#[test]
fn summary_serializes() {
    let s = ResidualSummary { check: "reducing".into(), max_residual: 1e-12, seed: 7 };
    let v: serde_json::Value = serde_json::to_value(&s).unwrap();
    assert_eq!(v["check"], "reducing");
    assert_eq!(v["seed"], 7);
}

#[test]
fn constant_symbol_is_identity() {
    let one = Polynomial::monomial(MultiIndex(vec![0]), c(1.0, 0.0));
    let m = mult_matrix(&one, Domain::UnitDisc, 5, 5).unwrap();
    assert!(m.max_deviation(&DMatrix::identity(6, 6)) < 1e-12);
}

#[test]
fn squaring_keeps_odd_and_kills_even() {
    let f = parse_map("power:2").unwrap();
    let oracle = GramProjector::new(&f, 12, 2).unwrap();
    let z = monomial(&[1]);
    let one = monomial(&[0]);
    let pz = oracle.project(&z).unwrap();
    let p1 = oracle.project(&one).unwrap();
    for p in points(&f, 20, 0.9, 31) {
        let a = project_fiber(&f, &z, &p).unwrap();
        assert!((a - p[0]).norm() < 1e-12);
        assert!((a - pz.eval(&p).unwrap()).norm() < 1e-7);
        let b = project_fiber(&f, &one, &p).unwrap();
        assert!(b.norm() < 1e-12);
        assert!(p1.eval(&p).unwrap().norm() < 1e-7);
    }
}

#[test]
fn fiber_projection_is_self_adjoint() {
    let f = parse_map("b2").unwrap();
    let rule = QuadratureRule::tensor(Domain::UnitDisc, 40, 96);
    let phi = Polynomial::from_terms(1, [(MultiIndex(vec![1]), c(0.4, -0.2)), (MultiIndex(vec![3]), c(1.0, 0.5))]);
    let psi = Polynomial::from_terms(1, [(MultiIndex(vec![0]), c(0.3, 0.0)), (MultiIndex(vec![2]), c(-0.6, 0.8))]);
    let pphi = FnHolomorphic::new(1, |z: &[Complex64]| project_fiber(&f, &phi, z));
    let ppsi = FnHolomorphic::new(1, |z: &[Complex64]| project_fiber(&f, &psi, z));
    let lhs = rule.inner(&rule.sample(&pphi).unwrap(), &rule.sample(&psi).unwrap());
    let rhs = rule.inner(&rule.sample(&phi).unwrap(), &rule.sample(&ppsi).unwrap());
    assert!((lhs - rhs).norm() < 1e-7, "{:e}", (lhs - rhs).norm());
}

#[test]
fn group_projection_commutes_exactly() {
    let g = symmetric_group(2);
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let f = parse_map("sym:2").unwrap();
    for _ in 0..5 {
        let phi = random_polynomial(&mut rng, 2, 4);
        let p = project_group(&g, &phi).unwrap();
        for comp in f.components() {
            let s = comp.as_polynomial().unwrap();
            let lhs = project_group(&g, &(&s * &phi)).unwrap();
            assert!(lhs.approx_eq(&(&s * &p), 1e-12));
        }
    }
}

#[test]
fn symmetrized_pullbacks_are_antisymmetric() {
    let f = parse_map("sym:3").unwrap();
    let g = symmetric_group(3);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let psi = random_polynomial(&mut rng, 3, 2);
    let lifted = crate::spaces::gamma_polynomial(&f, &psi).unwrap();
    assert!(project_group(&g, &lifted).unwrap().approx_eq(&lifted, 1e-12));
    for z in points(&f, 20, 0.9, 43) {
        let base = lifted.eval(&z).unwrap();
        for k in 0..g.order() {
            let moved = lifted.eval(&g.act_point(k, &z)).unwrap();
            let sign = g.character(k);
            assert!((moved - sign * base).norm() < 1e-10);
        }
    }
}
