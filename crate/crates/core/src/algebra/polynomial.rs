use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multi_index::MultiIndex;
use crate::error::{LabError, Result};

/// Coefficients below this fraction of the largest coefficient are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-13;

/// Sparse multivariate polynomial with complex coefficients.
///
/// Terms are kept in canonical form: no stored coefficient is zero and
/// coefficients negligible relative to the largest one are pruned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolynomialJson", try_from = "PolynomialJson")]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "polynomials need at least one variable");
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `z_i` (0-based).
    pub fn variable(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dimension {dim}");
        Self::monomial(MultiIndex::unit(dim, i), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let dim = alpha.dim();
        let mut p = Polynomial::zero(dim);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(alpha, c);
        }
        p
    }

    /// Builds a polynomial, summing repeated exponents.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut p = Polynomial::zero(dim);
        for (alpha, c) in terms {
            assert_eq!(alpha.dim(), dim, "exponent dimension mismatch");
            *p.terms.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.canonicalize();
        p
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn from_univariate(coeffs: &[Complex64]) -> Self {
        Self::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (MultiIndex(vec![k as u32]), *c)),
        )
    }

    /// Ascending coefficient vector of a univariate polynomial.
    pub fn to_univariate(&self) -> Vec<Complex64> {
        assert_eq!(self.dim, 1, "to_univariate needs a one-variable polynomial");
        let n = (self.degree().max(0) + 1) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (alpha, c) in &self.terms {
            out[alpha.0[0] as usize] = *c;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    /// Total degree; the zero polynomial has degree −1.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|a| a.total() as i64).max().unwrap_or(-1)
    }

    /// Largest exponent of variable `i` over all terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|a| a.0[i]).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn canonicalize(&mut self) {
        let max = self.max_abs_coeff();
        let floor = max * PRUNE_RELATIVE;
        self.terms.retain(|_, c| c.norm() > floor && *c != Complex64::new(0.0, 0.0));
    }

    /// Drops every coefficient with magnitude at most `tol`.
    pub fn chop(&self, tol: f64) -> Polynomial {
        let mut p = self.clone();
        p.terms.retain(|_, c| c.norm() > tol);
        p
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(LabError::DimensionMismatch { expected: self.dim, found: z.len() });
        }
        Ok(self.eval_unchecked(z))
    }

    /// Evaluation without the length check; `z` must have length `dim`.
    pub fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        if self.terms.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        // power table per variable
        let mut powers: Vec<Vec<Complex64>> = Vec::with_capacity(self.dim);
        for (i, zi) in z.iter().enumerate().take(self.dim) {
            let top = self.degree_in(i) as usize;
            let mut row = Vec::with_capacity(top + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            row.push(acc);
            for _ in 0..top {
                acc *= zi;
                row.push(acc);
            }
            powers.push(row);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut t = *c;
            for (i, &a) in alpha.0.iter().enumerate() {
                if a > 0 {
                    t *= powers[i][a as usize];
                }
            }
            sum += t;
        }
        sum
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        let mut p = Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        };
        p.canonicalize();
        p
    }

    pub fn scale_real(&self, c: f64) -> Polynomial {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Polynomial with conjugated coefficients.
    pub fn conj_coeffs(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v.conj())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(self.dim);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative in variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Polynomial {
        assert!(i < self.dim, "partial index {i} out of range for dimension {}", self.dim);
        let terms = self.terms.iter().filter(|(a, _)| a.0[i] > 0).map(|(a, c)| {
            let mut b = a.clone();
            let e = b.0[i];
            b.0[i] -= 1;
            (b, c * e as f64)
        });
        Polynomial::from_terms(self.dim, terms)
    }

    /// Substitutes polynomials `g_1..g_d` for the variables.
    pub fn compose_poly(&self, g: &[Polynomial]) -> Result<Polynomial> {
        if g.len() != self.dim {
            return Err(LabError::DimensionMismatch { expected: self.dim, found: g.len() });
        }
        let src = g.first().map(|p| p.dim).unwrap_or(1);
        if let Some(bad) = g.iter().find(|p| p.dim != src) {
            return Err(LabError::DimensionMismatch { expected: src, found: bad.dim });
        }
        let powers: Vec<Vec<Polynomial>> = g
            .iter()
            .enumerate()
            .map(|(i, gi)| power_table(gi, self.degree_in(i)))
            .collect();
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, c) in &self.terms {
            let mut t = Polynomial::constant(src, *c);
            for (i, &a) in alpha.0.iter().enumerate() {
                if a > 0 {
                    t = &t * &powers[i][a as usize];
                }
            }
            for (b, v) in t.terms {
                *acc.entry(b).or_default() += v;
            }
        }
        let mut p = Polynomial { dim: src, terms: acc };
        p.canonicalize();
        Ok(p)
    }

    /// `z ↦ self(A z)` for a square matrix given row-major.
    pub fn substitute_linear(&self, rows: &[Vec<Complex64>]) -> Result<Polynomial> {
        let forms: Vec<Polynomial> = rows
            .iter()
            .map(|row| {
                Polynomial::from_terms(
                    self.dim,
                    row.iter().enumerate().map(|(j, a)| (MultiIndex::unit(self.dim, j), *a)),
                )
            })
            .collect();
        self.compose_poly(&forms)
    }

    /// Coefficientwise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &Polynomial, tol: f64) -> bool {
        self.dim == other.dim && (self - other).max_abs_coeff() <= tol
    }

    /// Division treating both operands as polynomials in variable `var` with
    /// coefficients in the remaining variables.
    ///
    /// The divisor's highest power of `var` must appear only as a bare
    /// monomial `c·z_var^k`, which makes the division exact-step (no
    /// coefficient-ring inverses needed). Returns `(quotient, remainder)`.
    pub fn div_rem_in(&self, var: usize, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        if divisor.dim != self.dim {
            return Err(LabError::DimensionMismatch { expected: self.dim, found: divisor.dim });
        }
        if divisor.is_zero() {
            return Err(LabError::NotDivisible { remainder: f64::INFINITY });
        }
        let k = divisor.degree_in(var);
        let leading: Vec<(&MultiIndex, &Complex64)> =
            divisor.terms.iter().filter(|(a, _)| a.0[var] == k).collect();
        let lead_alpha = MultiIndex::unit(self.dim, var);
        let lead_alpha = MultiIndex(lead_alpha.0.iter().map(|e| e * k).collect());
        if leading.len() != 1 || *leading[0].0 != lead_alpha {
            return Err(LabError::NotDivisible { remainder: f64::NAN });
        }
        let lc = *leading[0].1;
        let rest: Vec<(MultiIndex, Complex64)> = divisor
            .terms
            .iter()
            .filter(|(a, _)| **a != lead_alpha)
            .map(|(a, c)| (a.clone(), *c))
            .collect();

        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        loop {
            // highest power of var still dividable
            let pick = rem
                .iter()
                .filter(|(a, _)| a.0[var] >= k)
                .max_by(|(a, _), (b, _)| a.0[var].cmp(&b.0[var]).then_with(|| a.cmp(b)))
                .map(|(a, c)| (a.clone(), *c));
            let Some((beta, c)) = pick else { break };
            rem.remove(&beta);
            let shift = beta.checked_sub(&lead_alpha).expect("exponent dominates leading term");
            let qc = c / lc;
            *quot.entry(shift.clone()).or_default() += qc;
            for (gamma, dc) in &rest {
                let target = shift.add(gamma);
                let v = rem.entry(target.clone()).or_default();
                *v -= qc * dc;
                if *v == Complex64::new(0.0, 0.0) {
                    rem.remove(&target);
                }
            }
        }
        let mut q = Polynomial { dim: self.dim, terms: quot };
        q.canonicalize();
        let r = Polynomial { dim: self.dim, terms: rem };
        Ok((q, r))
    }
}

fn power_table(g: &Polynomial, top: u32) -> Vec<Polynomial> {
    let mut out = Vec::with_capacity(top as usize + 1);
    out.push(Polynomial::one(g.dim));
    for k in 1..=top as usize {
        let next = &out[k - 1] * g;
        out.push(next);
    }
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "adding polynomials of different dimension");
        let mut terms = self.terms.clone();
        for (a, c) in &rhs.terms {
            *terms.entry(a.clone()).or_default() += c;
        }
        let mut p = Polynomial { dim: self.dim, terms };
        p.canonicalize();
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "subtracting polynomials of different dimension");
        let mut terms = self.terms.clone();
        for (a, c) in &rhs.terms {
            *terms.entry(a.clone()).or_default() -= c;
        }
        let mut p = Polynomial { dim: self.dim, terms };
        p.canonicalize();
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "multiplying polynomials of different dimension");
        let mut terms: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                *terms.entry(a.add(b)).or_default() += c * d;
            }
        }
        let mut p = Polynomial { dim: self.dim, terms };
        p.canonicalize();
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (i, &e) in alpha.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·z{}", i + 1)?,
                    _ => write!(f, "·z{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

/// Wire form: `{"dim": d, "terms": [{"alpha": [..], "re": .., "im": ..}]}`.
#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl From<Polynomial> for PolynomialJson {
    fn from(p: Polynomial) -> Self {
        PolynomialJson {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(a, c)| TermJson { alpha: a.0, re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = LabError;
    fn try_from(j: PolynomialJson) -> Result<Self> {
        if j.dim == 0 {
            return Err(LabError::Parse("polynomial dimension must be positive".into()));
        }
        if let Some(t) = j.terms.iter().find(|t| t.alpha.len() != j.dim) {
            return Err(LabError::DimensionMismatch { expected: j.dim, found: t.alpha.len() });
        }
        Ok(Polynomial::from_terms(
            j.dim,
            j.terms
                .into_iter()
                .map(|t| (MultiIndex(t.alpha), Complex64::new(t.re, t.im))),
        ))
    }
}
