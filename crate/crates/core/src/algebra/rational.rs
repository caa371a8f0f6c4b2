use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::multi_index::MultiIndex;
use super::polynomial::Polynomial;
use crate::error::{LabError, Result};

/// Denominators smaller than this in magnitude count as a pole.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// Quotient of two polynomials, kept unreduced.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if num.dim() != den.dim() {
            return Err(LabError::DimensionMismatch { expected: num.dim(), found: den.dim() });
        }
        if den.is_zero() {
            return Err(LabError::PoleEvaluation { magnitude: 0.0 });
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let dim = p.dim();
        RationalFunction { num: p, den: Polynomial::one(dim) }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    /// True when the denominator is a nonzero constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Returns the polynomial this function equals when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if self.is_polynomial() {
            let c = self.den.coeff(&MultiIndex::zero(self.dim()));
            Some(self.num.scale(c.inv()))
        } else {
            None
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: z.len() });
        }
        let d = self.den.eval_unchecked(z);
        if d.norm() < POLE_TOLERANCE {
            return Err(LabError::PoleEvaluation { magnitude: d.norm() });
        }
        Ok(self.num.eval_unchecked(z) / d)
    }

    pub fn scale(&self, c: Complex64) -> RationalFunction {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &(&self.num * &other.den) - &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction { num: &self.num * &other.num, den: &self.den * &other.den }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunction {
        RationalFunction { num: &self.num * p, den: self.den.clone() }
    }

    pub fn pow(&self, k: u32) -> RationalFunction {
        RationalFunction { num: self.num.pow(k), den: self.den.pow(k) }
    }

    /// Quotient rule, unreduced: `(N' D − N D') / D²`.
    pub fn partial(&self, i: usize) -> RationalFunction {
        if self.is_polynomial() {
            return RationalFunction { num: self.num.partial(i), den: self.den.clone() };
        }
        RationalFunction {
            num: &(&self.num.partial(i) * &self.den) - &(&self.num * &self.den.partial(i)),
            den: &self.den * &self.den,
        }
    }

    /// Cross-multiplied comparison `N₁D₂ = N₂D₁` with a tolerance relative
    /// to the larger product.
    pub fn approx_eq(&self, other: &RationalFunction, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let lhs = &self.num * &other.den;
        let rhs = &other.num * &self.den;
        let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff()).max(1.0);
        (&lhs - &rhs).max_abs_coeff() <= tol * scale
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, 1e-12)
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Substitutes rational functions for the variables of `f`.
///
/// The result has denominator `∏ D_i^{e_i}` where `D_i` is the denominator of
/// `g_i` and `e_i` the largest exponent of `z_i` in `f`.
pub fn compose(f: &Polynomial, g: &[RationalFunction]) -> Result<RationalFunction> {
    if g.len() != f.dim() {
        return Err(LabError::DimensionMismatch { expected: f.dim(), found: g.len() });
    }
    let src = g[0].dim();
    if let Some(bad) = g.iter().find(|gi| gi.dim() != src) {
        return Err(LabError::DimensionMismatch { expected: src, found: bad.dim() });
    }
    // constant denominators are folded into the numerators up front
    let g: Vec<RationalFunction> = g
        .iter()
        .map(|gi| match gi.as_polynomial() {
            Some(p) => RationalFunction::from_poly(p),
            None => gi.clone(),
        })
        .collect();
    let tops: Vec<u32> = (0..f.dim()).map(|i| f.degree_in(i)).collect();
    let num_pows: Vec<Vec<Polynomial>> = g
        .iter()
        .zip(&tops)
        .map(|(gi, &t)| powers(&gi.num, t))
        .collect();
    let den_pows: Vec<Vec<Polynomial>> = g
        .iter()
        .zip(&tops)
        .map(|(gi, &t)| if gi.is_polynomial() { vec![] } else { powers(&gi.den, t) })
        .collect();

    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for (alpha, c) in f.terms() {
        let mut t = Polynomial::constant(src, *c);
        for i in 0..f.dim() {
            let a = alpha.0[i] as usize;
            if a > 0 {
                t = &t * &num_pows[i][a];
            }
            if !den_pows[i].is_empty() {
                let rest = tops[i] as usize - a;
                if rest > 0 {
                    t = &t * &den_pows[i][rest];
                }
            }
        }
        for (b, v) in t.terms() {
            *acc.entry(b.clone()).or_default() += v;
        }
    }
    let num = Polynomial::from_terms(src, acc);

    let mut den = Polynomial::one(src);
    for i in 0..f.dim() {
        if !den_pows[i].is_empty() && tops[i] > 0 {
            den = &den * &den_pows[i][tops[i] as usize];
        }
    }
    RationalFunction::new(num, den)
}

fn powers(p: &Polynomial, top: u32) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one(p.dim())];
    for k in 1..=top as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}

/// Determinant of the matrix `(∂g_i/∂z_j)`, row `i` holding the partials of `g_i`.
///
/// Each row shares the denominator `D_i²`, so the determinant is the
/// determinant of the numerator matrix over `∏ D_i²`.
pub fn jacobian_det(g: &[RationalFunction]) -> Result<RationalFunction> {
    let d = g.len();
    if d == 0 {
        return Err(LabError::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(bad) = g.iter().find(|gi| gi.dim() != d) {
        return Err(LabError::DimensionMismatch { expected: d, found: bad.dim() });
    }
    let mut rows: Vec<Vec<Polynomial>> = Vec::with_capacity(d);
    let mut den = Polynomial::one(d);
    for gi in g {
        if gi.is_polynomial() {
            let c = gi.den.coeff(&MultiIndex::zero(d)).inv();
            rows.push((0..d).map(|j| gi.num.partial(j).scale(c)).collect());
        } else {
            rows.push(
                (0..d)
                    .map(|j| &(&gi.num.partial(j) * &gi.den) - &(&gi.num * &gi.den.partial(j)))
                    .collect(),
            );
            den = &den * &(&gi.den * &gi.den);
        }
    }
    let num = poly_det(&rows);
    RationalFunction::new(num, den)
}

/// Laplace expansion along the first row; matrices here are at most 4×4.
pub fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    let dim = m[0][0].dim();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(dim);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &poly_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}
