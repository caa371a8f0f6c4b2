//! Bergman-space model: truncated orthonormal bases, Gram matrices, the
//! isometry `Γ_f` and reproducing kernels.

mod kernel;
mod separable;

pub use kernel::{
    parse_kernel, pin_symdisc_normalization, reproduce_check, symdisc_kernel_lifted, KernelModel,
};
pub use separable::{Atom, AtomTable, LiftedModel, SepFn};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::symmetric::symmetric_to_elementary;
use crate::algebra::{compose, Holomorphic, MultiIndex, Polynomial, RationalFunction};
use crate::domains::{quadrature, Domain, QuadratureRule};
use crate::error::{LabError, Result};
use crate::maps::{permutation_sign, permutations, symmetrization, ProperMap};

/// A function on a domain, either explicit or built from other functions.
#[derive(Clone, Debug)]
pub enum Function {
    Poly(Polynomial),
    Rational(RationalFunction),
    /// `z ↦ (1/√m) ψ(f(z)) J_f(z)`.
    Gamma { map: Arc<ProperMap>, inner: Arc<Function> },
    /// `Σ c_k g_k`.
    Combination { dim: usize, terms: Vec<(Complex64, Function)> },
}

impl Holomorphic for Function {
    fn dim(&self) -> usize {
        match self {
            Function::Poly(p) => p.dim(),
            Function::Rational(r) => r.dim(),
            Function::Gamma { map, .. } => map.dim(),
            Function::Combination { dim, .. } => *dim,
        }
    }

    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        match self {
            Function::Poly(p) => p.eval(z),
            Function::Rational(r) => r.eval(z),
            Function::Gamma { map, inner } => {
                let w = map.eval(z)?;
                let j = map.jacobian_at(z)?;
                Ok(inner.eval(&w)? * j / (map.multiplicity() as f64).sqrt())
            }
            Function::Combination { terms, .. } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, g) in terms {
                    acc += c * g.eval(z)?;
                }
                Ok(acc)
            }
        }
    }
}

impl From<Polynomial> for Function {
    fn from(p: Polynomial) -> Self {
        Function::Poly(p)
    }
}

impl From<RationalFunction> for Function {
    fn from(r: RationalFunction) -> Self {
        Function::Rational(r)
    }
}

/// `Γ_f ψ` as a pointwise evaluator.
pub fn gamma_apply(f: &ProperMap, psi: Function) -> Function {
    Function::Gamma { map: Arc::new(f.clone()), inner: Arc::new(psi) }
}

/// `Γ_f ψ = (1/√m)(ψ∘f) J_f` as an explicit rational function.
pub fn gamma_rational(f: &ProperMap, psi: &Polynomial) -> Result<RationalFunction> {
    if psi.dim() != f.dim() {
        return Err(LabError::DimensionMismatch { expected: f.dim(), found: psi.dim() });
    }
    let composed = compose(psi, f.components())?;
    Ok(composed.mul(f.jacobian()).scale(Complex64::new(1.0 / (f.multiplicity() as f64).sqrt(), 0.0)))
}

/// `Γ_f ψ` for a polynomial map, as a polynomial.
pub fn gamma_polynomial(f: &ProperMap, psi: &Polynomial) -> Result<Polynomial> {
    let comps: Vec<Polynomial> = f
        .components()
        .iter()
        .map(|c| c.as_polynomial().ok_or_else(|| LabError::UnknownMap(f.name().into())))
        .collect::<Result<_>>()?;
    let j = f.jacobian().as_polynomial().ok_or_else(|| LabError::UnknownMap(f.name().into()))?;
    let composed = psi.compose_poly(&comps)?;
    Ok((&composed * &j).scale_real(1.0 / (f.multiplicity() as f64).sqrt()))
}

/// Truncated orthonormal basis of `A²(domain)`.
#[derive(Clone, Debug)]
pub struct BasisSet {
    pub domain: Domain,
    pub degree_cap: usize,
    pub labels: Vec<MultiIndex>,
    pub elements: Vec<Polynomial>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, label: &MultiIndex) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn functions(&self) -> Vec<Function> {
        self.elements.iter().cloned().map(Function::Poly).collect()
    }
}

/// Normalized monomials on Reinhardt domains; on `G_d` the functions `ĥ_μ`
/// with `ĥ_μ ∘ s = √(d!) a_{μ+δ} / (‖a_{μ+δ}‖ J_s)`, labelled by partitions
/// `μ` with `μ_1 ≤ degree_cap`. These span the polynomials in `w` of degree
/// at most `degree_cap`.
pub fn onb(domain: Domain, degree_cap: usize) -> Result<BasisSet> {
    match domain {
        Domain::UnitDisc | Domain::Polydisc(_) => {
            let labels = MultiIndex::up_to_degree(domain.dim(), degree_cap as u32);
            let elements = labels
                .iter()
                .map(|a| {
                    let n = domain.monomial_norm(a)?;
                    Ok(Polynomial::monomial(a.clone(), Complex64::new(1.0 / n, 0.0)))
                })
                .collect::<Result<_>>()?;
            Ok(BasisSet { domain, degree_cap, labels, elements })
        }
        Domain::SymmetrizedPolydisc(d) => {
            let mut labels = partitions(d, degree_cap as u32);
            labels.sort();
            let elements = labels.iter().map(|mu| symmetrized_basis_element(d, mu)).collect::<Result<_>>()?;
            Ok(BasisSet { domain, degree_cap, labels, elements })
        }
    }
}

/// Partitions `μ_1 ≥ … ≥ μ_d ≥ 0` with `μ_1 ≤ cap`.
fn partitions(d: usize, cap: u32) -> Vec<MultiIndex> {
    fn rec(d: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() == d {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for v in 0..=max {
            cur.push(v);
            rec(d, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, cap, &mut Vec::new(), &mut out);
    out
}

/// `a_λ = Σ_σ sgn(σ) z^{σλ}`.
pub fn antisymmetrized_monomial(lambda: &[u32]) -> Polynomial {
    let d = lambda.len();
    Polynomial::from_terms(
        d,
        permutations(d).into_iter().map(|perm| {
            let mut alpha = vec![0u32; d];
            for (i, &p) in perm.iter().enumerate() {
                alpha[p] = lambda[i];
            }
            (MultiIndex(alpha), Complex64::new(permutation_sign(&perm), 0.0))
        }),
    )
}

/// `p / ∏_{i<j}(z_i − z_j)` by successive exact divisions.
pub fn divide_by_vandermonde(p: &Polynomial) -> Result<Polynomial> {
    let d = p.dim();
    let scale = p.max_abs_coeff().max(1.0);
    let mut q = p.clone();
    for i in 0..d {
        for j in (i + 1)..d {
            let factor = &Polynomial::variable(d, i) - &Polynomial::variable(d, j);
            let (quot, rem) = q.div_rem_in(i, &factor)?;
            let r = rem.max_abs_coeff();
            if r > 1e-10 * scale {
                return Err(LabError::NotDivisible { remainder: r });
            }
            q = quot;
        }
    }
    Ok(q)
}

fn symmetrized_basis_element(d: usize, mu: &MultiIndex) -> Result<Polynomial> {
    let lambda: Vec<u32> = mu.0.iter().enumerate().map(|(i, m)| m + (d - 1 - i) as u32).collect();
    let a = antisymmetrized_monomial(&lambda);
    let schur = divide_by_vandermonde(&a)?;
    let norm_sq: f64 = (1..=d).map(|k| k as f64).product::<f64>()
        * lambda.iter().map(|l| 1.0 / (*l as f64 + 1.0)).product::<f64>();
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let sign = jacobian_sign(d);
    let h = symmetric_to_elementary(&schur, 1e-12)?;
    Ok(h.scale_real(sign * fact.sqrt() / norm_sq.sqrt()))
}

/// `J_s = sign · ∏_{i<j}(z_i − z_j)`.
pub fn jacobian_sign(d: usize) -> f64 {
    static SIGNS: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = SIGNS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("sign cache").get(&d) {
        return *s;
    }
    let j = symmetrization(d).jacobian().as_polynomial().expect("polynomial jacobian");
    let delta = MultiIndex((0..d).map(|i| (d - 1 - i) as u32).collect());
    let sign = j.coeff(&delta).re.signum();
    cache.lock().expect("sign cache").insert(d, sign);
    sign
}

/// Hermitian Gram matrix `G_{jk} = ⟨f_j, f_k⟩` of sampled functions.
pub fn gram_with_rule(functions: &[&dyn Holomorphic], rule: &QuadratureRule) -> Result<DMatrix<Complex64>> {
    let samples: Vec<Vec<Complex64>> = functions.iter().map(|f| rule.sample(*f)).collect::<Result<_>>()?;
    Ok(gram_of_samples(&samples, rule))
}

/// Gram matrix at the default rule of the given level.
pub fn gram(functions: &[&dyn Holomorphic], domain: Domain, level: usize) -> Result<DMatrix<Complex64>> {
    gram_with_rule(functions, &quadrature(domain, level))
}

pub fn gram_of_samples(samples: &[Vec<Complex64>], rule: &QuadratureRule) -> DMatrix<Complex64> {
    let n = samples.len();
    let mut g = DMatrix::from_fn(n, n, |j, k| rule.inner(&samples[j], &samples[k]));
    hermitian_average(&mut g);
    g
}

pub(crate) fn hermitian_average(g: &mut DMatrix<Complex64>) {
    let h = (&*g + g.adjoint()) * Complex64::new(0.5, 0.0);
    *g = h;
}

/// Largest entrywise deviation from the identity.
pub fn identity_residual(g: &DMatrix<Complex64>) -> f64 {
    let mut r: f64 = 0.0;
    for j in 0..g.nrows() {
        for k in 0..g.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            r = r.max((g[(j, k)] - target).norm());
        }
    }
    r
}

/// Quadrature rule on the source of `f` that integrates `|Γ_f ψ|²` for
/// `deg ψ ≤ degree` to working precision.
pub fn source_rule(f: &ProperMap, degree: usize) -> QuadratureRule {
    let m = f.multiplicity().max(1);
    match f.source() {
        Domain::UnitDisc if f.is_polynomial() => quadrature(Domain::UnitDisc, degree * m + m),
        Domain::UnitDisc => {
            let deg = degree * m + 2 * m;
            QuadratureRule::tensor(Domain::UnitDisc, deg / 2 + 16, 2 * deg + 96)
        }
        domain => {
            let per_var = degree + domain.dim();
            quadrature(domain, per_var)
        }
    }
}

/// `‖ψ‖²` in `A²(domain)`: monomial norms on Reinhardt domains, an exact
/// pushforward rule on `G_d`.
pub fn polynomial_norm_sq(domain: Domain, psi: &Polynomial) -> Result<f64> {
    if domain.is_reinhardt() {
        let mut acc = 0.0;
        for (a, c) in psi.terms() {
            acc += c.norm_sqr() * domain.monomial_norm(a)?.powi(2);
        }
        return Ok(acc);
    }
    let rule = quadrature(domain, psi.degree().max(0) as usize + domain.dim());
    Ok(rule.norm_sq(&rule.sample(psi)?))
}

/// Random polynomial with `dim` variables, total degree ≤ `degree` and
/// coefficients uniform in the unit square.
pub fn random_polynomial<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize) -> Polynomial {
    Polynomial::from_terms(
        dim,
        MultiIndex::up_to_degree(dim, degree as u32).into_iter().map(|a| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (a, c)
        }),
    )
}
