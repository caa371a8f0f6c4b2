//! Elementary symmetric polynomials and the rewrite of symmetric
//! polynomials in terms of them.

use num_complex::Complex64;

use super::multi_index::MultiIndex;
use super::polynomial::Polynomial;
use crate::error::{LabError, Result};

/// `e_k(z_1..z_d)`, the sum of all products of `k` distinct variables.
pub fn elementary(d: usize, k: usize) -> Polynomial {
    assert!(k <= d, "e_{k} undefined in {d} variables");
    let mut terms = Vec::new();
    let mut pick = vec![0u32; d];
    fn rec(start: usize, left: usize, pick: &mut Vec<u32>, out: &mut Vec<(MultiIndex, Complex64)>) {
        if left == 0 {
            out.push((MultiIndex(pick.clone()), Complex64::new(1.0, 0.0)));
            return;
        }
        for i in start..pick.len() {
            if pick.len() - i < left {
                break;
            }
            pick[i] = 1;
            rec(i + 1, left - 1, pick, out);
            pick[i] = 0;
        }
    }
    rec(0, k, &mut pick, &mut terms);
    Polynomial::from_terms(d, terms)
}

/// `(e_1, …, e_d)`.
pub fn elementary_all(d: usize) -> Vec<Polynomial> {
    (1..=d).map(|k| elementary(d, k)).collect()
}

/// `∏_{i<j} (z_i − z_j)`.
pub fn vandermonde(d: usize) -> Polynomial {
    let mut v = Polynomial::one(d);
    for i in 0..d {
        for j in (i + 1)..d {
            let f = &Polynomial::variable(d, i) - &Polynomial::variable(d, j);
            v = &v * &f;
        }
    }
    v
}

/// Rewrites a symmetric polynomial `p(z)` as `q(e_1(z), …, e_d(z))`.
///
/// Leading-term reduction in lex order: the lex-largest exponent `a` of a
/// symmetric polynomial is non-increasing and is removed by subtracting
/// `c · e_1^{a_1−a_2} ⋯ e_d^{a_d}`. Coefficients below `tol` times the
/// largest input coefficient are treated as zero.
pub fn symmetric_to_elementary(p: &Polynomial, tol: f64) -> Result<Polynomial> {
    let d = p.dim();
    let floor = tol * p.max_abs_coeff().max(f64::MIN_POSITIVE);
    let es = elementary_all(d);
    let mut rest = p.chop(floor);
    let mut out: Vec<(MultiIndex, Complex64)> = Vec::new();
    let mut guard = 0usize;
    while !rest.is_zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(LabError::NotSymmetric);
        }
        let (lead, c) = rest
            .terms()
            .max_by(|(a, _), (b, _)| a.0.cmp(&b.0))
            .map(|(a, c)| (a.clone(), *c))
            .expect("non-empty");
        let a = &lead.0;
        if a.windows(2).any(|w| w[0] < w[1]) {
            return Err(LabError::NotSymmetric);
        }
        let w_exp: Vec<u32> = (0..d)
            .map(|k| a[k] - if k + 1 < d { a[k + 1] } else { 0 })
            .collect();
        let mut prod = Polynomial::constant(d, c);
        for (k, &e) in w_exp.iter().enumerate() {
            if e > 0 {
                prod = &prod * &es[k].pow(e);
            }
        }
        rest = (&rest - &prod).chop(floor);
        out.push((MultiIndex(w_exp), c));
    }
    Ok(Polynomial::from_terms(d, out))
}
