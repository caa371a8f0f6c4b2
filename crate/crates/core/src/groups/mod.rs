//! Finite unitary pseudoreflection groups with the character
//! `χ_μ = det⁻¹`, relative invariants and the projection `P_μ`.
//!
//! A group element `ρ` acts on points by `ρ·z = ρ⁻¹z`, so `φ∘ρ⁻¹` is the
//! function `z ↦ φ(ρz)`. With this convention `f_μ` satisfies
//! `f_μ(ρz) = χ_μ(ρ) f_μ(z)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::symmetric::{elementary_all, vandermonde};
use crate::algebra::{jacobian_det, MultiIndex, Polynomial, RationalFunction};
use crate::domains::{quadrature, Domain};
use crate::error::{LabError, Result};
use crate::maps::{permutations, polydisc_product, power, symmetrization, ProperMap};
use crate::spaces::{gamma_polynomial, onb};

/// Tolerance for matching products against the element list.
pub const MATCH_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GroupKind {
    Symmetric(usize),
    Cyclic(usize),
    Product,
}

#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    name: String,
    kind: GroupKind,
    dim: usize,
    elements: Vec<DMatrix<Complex64>>,
    generators: Vec<usize>,
    hsop: Vec<Polynomial>,
    f_mu: Polynomial,
    /// Linear factors of `f_μ` with multiplicity, each paired with a
    /// variable in which it is monic of degree one.
    fmu_factors: Vec<(usize, Polynomial)>,
    theta: ProperMap,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Permutation matrices `(P z)_i = z_{σ(i)}` with `χ_μ = sgn`.
pub fn symmetric_group(d: usize) -> ReflectionGroup {
    assert!(d >= 1, "symmetric group needs d >= 1");
    let perms = permutations(d);
    let elements: Vec<DMatrix<Complex64>> = perms
        .iter()
        .map(|p| DMatrix::from_fn(d, d, |i, j| if p[i] == j { one() } else { Complex64::new(0.0, 0.0) }))
        .collect();
    let generators = perms
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let moved: Vec<usize> = (0..d).filter(|&i| p[i] != i).collect();
            moved.len() == 2 && moved[1] == moved[0] + 1
        })
        .map(|(k, _)| k)
        .collect();
    let mut fmu_factors = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            fmu_factors.push((i, &Polynomial::variable(d, i) - &Polynomial::variable(d, j)));
        }
    }
    ReflectionGroup {
        name: format!("sym:{d}"),
        kind: GroupKind::Symmetric(d),
        dim: d,
        elements,
        generators,
        hsop: elementary_all(d),
        f_mu: vandermonde(d),
        fmu_factors,
        theta: symmetrization(d),
    }
}

/// `{ω^k}` acting on `C`, `ω = e^{2πi/m}`.
pub fn cyclic_group(m: usize) -> ReflectionGroup {
    assert!(m >= 2, "cyclic group needs m >= 2");
    let elements = (0..m)
        .map(|k| DMatrix::from_element(1, 1, Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)))
        .collect();
    let z = Polynomial::variable(1, 0);
    ReflectionGroup {
        name: format!("cyc:{m}"),
        kind: GroupKind::Cyclic(m),
        dim: 1,
        elements,
        generators: vec![1],
        hsop: vec![z.pow(m as u32)],
        f_mu: z.pow(m as u32 - 1),
        fmu_factors: vec![(0, z); m - 1],
        theta: power(m as u32),
    }
}

fn shift(p: &Polynomial, total: usize, offset: usize) -> Polynomial {
    let vars: Vec<Polynomial> = (0..p.dim()).map(|k| Polynomial::variable(total, offset + k)).collect();
    p.compose_poly(&vars).expect("variable shift")
}

/// Direct product acting block-diagonally; factors must have disc targets.
pub fn product_group(factors: &[ReflectionGroup]) -> Result<ReflectionGroup> {
    if factors.len() < 2 {
        return Err(LabError::InvalidScenario("a product group needs two factors".into()));
    }
    if factors.iter().any(|g| !matches!(g.theta.target(), Domain::UnitDisc)) {
        return Err(LabError::InvalidScenario("product groups take cyclic factors".into()));
    }
    let dim: usize = factors.iter().map(|g| g.dim).sum();
    let mut elements = vec![DMatrix::<Complex64>::identity(0, 0)];
    let mut generators = Vec::new();
    let mut hsop = Vec::new();
    let mut f_mu = Polynomial::one(dim);
    let mut fmu_factors = Vec::new();
    let mut offset = 0;
    for g in factors {
        let mut next = Vec::with_capacity(elements.len() * g.order());
        for a in &elements {
            for b in &g.elements {
                let n = a.nrows() + b.nrows();
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                m.view_mut((0, 0), (a.nrows(), a.nrows())).copy_from(a);
                m.view_mut((a.nrows(), a.nrows()), (b.nrows(), b.nrows())).copy_from(b);
                next.push(m);
            }
        }
        elements = next;
        hsop.extend(g.hsop.iter().map(|p| shift(p, dim, offset)));
        f_mu = &f_mu * &shift(&g.f_mu, dim, offset);
        fmu_factors.extend(g.fmu_factors.iter().map(|(v, l)| (v + offset, shift(l, dim, offset))));
        offset += g.dim;
    }
    let id = DMatrix::<Complex64>::identity(dim, dim);
    for (k, e) in elements.iter().enumerate() {
        if rank_one(&(&id - e)) {
            generators.push(k);
        }
    }
    let theta = polydisc_product(&factors.iter().map(|g| g.theta.clone()).collect::<Vec<_>>())?;
    Ok(ReflectionGroup {
        name: factors.iter().map(|g| g.name.clone()).collect::<Vec<_>>().join("x"),
        kind: GroupKind::Product,
        dim,
        elements,
        generators,
        hsop,
        f_mu,
        fmu_factors,
        theta,
    })
}

fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    s
}

fn rank_one(m: &DMatrix<Complex64>) -> bool {
    let s = singular_values(m);
    s[0] > MATCH_TOLERANCE && s.get(1).copied().unwrap_or(0.0) < MATCH_TOLERANCE
}

/// `sym:<d>`, `cyc:<m>`, `prod:<g>|<g>|…`.
pub fn parse_group(name: &str) -> Result<ReflectionGroup> {
    let bad = || LabError::Parse(format!("unknown group {name:?}"));
    let (head, rest) = name.split_once(':').ok_or_else(bad)?;
    let n = || rest.parse::<usize>().map_err(|_| bad());
    match head {
        "sym" => Ok(symmetric_group(n()?.max(1))),
        "cyc" => match n()? {
            m if m >= 2 => Ok(cyclic_group(m)),
            _ => Err(bad()),
        },
        "prod" => product_group(&rest.split('|').map(parse_group).collect::<Result<Vec<_>>>()?),
        _ => Err(bad()),
    }
}

/// The group whose invariant map is `f`, if the catalog map is one.
pub fn group_for_map(f: &ProperMap) -> Option<ReflectionGroup> {
    if let Some(d) = f.symmetrization_dim() {
        return Some(symmetric_group(d));
    }
    let power_of = |g: &ProperMap| -> Option<usize> {
        let b = g.blaschke_data()?;
        (g.kind() == crate::maps::MapKind::Power && b.powers[0] >= 2).then_some(b.powers[0] as usize)
    };
    if let Some(m) = power_of(f) {
        return Some(cyclic_group(m));
    }
    let factors = f.factors()?;
    let groups = factors.iter().map(|g| power_of(g).map(cyclic_group)).collect::<Option<Vec<_>>>()?;
    product_group(&groups).ok()
}

impl ReflectionGroup {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    pub fn hsop(&self) -> &[Polynomial] {
        &self.hsop
    }

    pub fn f_mu(&self) -> &Polynomial {
        &self.f_mu
    }

    /// The invariant map `θ = (θ_1, …, θ_d)` as a proper map.
    pub fn theta(&self) -> &ProperMap {
        &self.theta
    }

    /// Domain on which the group acts.
    pub fn domain(&self) -> Domain {
        self.theta.source()
    }

    /// `χ_μ(ρ) = det(ρ)⁻¹`.
    pub fn character(&self, k: usize) -> Complex64 {
        self.elements[k].determinant().inv()
    }

    /// Index of the element matching `m`.
    pub fn find(&self, m: &DMatrix<Complex64>) -> Option<usize> {
        self.elements.iter().position(|e| (e - m).camax() < MATCH_TOLERANCE)
    }

    pub fn inverse(&self, k: usize) -> usize {
        self.find(&self.elements[k].adjoint()).expect("unitary elements invert by adjoint")
    }

    /// `z ↦ φ(ρ_k z)`, i.e. `φ∘ρ_k⁻¹` under the action convention.
    pub fn act(&self, k: usize, phi: &Polynomial) -> Result<Polynomial> {
        let e = &self.elements[k];
        let rows: Vec<Vec<Complex64>> = (0..self.dim).map(|i| (0..self.dim).map(|j| e[(i, j)]).collect()).collect();
        phi.substitute_linear(&rows)
    }

    /// Point action `ρ_k·z = ρ_k⁻¹ z`.
    pub fn act_point(&self, k: usize, z: &[Complex64]) -> Vec<Complex64> {
        let inv = self.elements[k].adjoint();
        (0..self.dim).map(|i| (0..self.dim).map(|j| inv[(i, j)] * z[j]).sum()).collect()
    }

    /// `P_μ φ = (1/|G|) Σ_ρ χ_μ(ρ⁻¹) φ∘ρ⁻¹`, on coefficients.
    pub fn project(&self, phi: &Polynomial) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.dim);
        for k in 0..self.order() {
            let weight = self.character(k).inv();
            acc = &acc + &self.act(k, phi)?.scale(weight);
        }
        // cancelled characters leave rounding-level coefficients behind
        Ok(acc.scale_real(1.0 / self.order() as f64).chop(1e-13 * phi.max_abs_coeff()))
    }

    /// Largest distance from a product of two elements to the element list.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.elements {
            for b in &self.elements {
                let p = a * b;
                let best = self.elements.iter().map(|e| (e - &p).camax()).fold(f64::INFINITY, f64::min);
                worst = worst.max(best);
            }
        }
        worst
    }

    /// Second-largest singular value of `I − ρ` over the generators.
    pub fn pseudoreflection_residual(&self) -> f64 {
        let id = DMatrix::<Complex64>::identity(self.dim, self.dim);
        self.generators
            .iter()
            .map(|&k| singular_values(&(&id - &self.elements[k])).get(1).copied().unwrap_or(0.0))
            .fold(0.0, f64::max)
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Largest coefficient of `θ_i∘ρ − θ_i`.
    pub fn hsop_invariance_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..self.order() {
            for t in &self.hsop {
                worst = worst.max((&self.act(k, t)? - t).max_abs_coeff());
            }
        }
        Ok(worst)
    }

    /// `c` with `J_θ = c·f_μ`, and the coefficient residual of that identity.
    pub fn jacobian_constant(&self) -> Result<(Complex64, f64)> {
        let comps: Vec<RationalFunction> = self.hsop.iter().cloned().map(Into::into).collect();
        let j = jacobian_det(&comps)?
            .as_polynomial()
            .ok_or_else(|| LabError::InvalidScenario("hsop jacobian is not polynomial".into()))?;
        let (alpha, lead) = self.f_mu.terms().next().expect("nonzero f_mu");
        let c = j.coeff(alpha) / lead;
        let r = (&j - &self.f_mu.scale(c)).max_abs_coeff();
        Ok((c, r))
    }
}

/// `φ∘ρ⁻¹ = χ_μ(ρ) φ` for every `ρ`, on coefficients.
pub fn relative_invariant_check(phi: &Polynomial, g: &ReflectionGroup) -> Result<bool> {
    if phi.dim() != g.dim {
        return Err(LabError::DimensionMismatch { expected: g.dim, found: phi.dim() });
    }
    let tol = 1e-12 * phi.max_abs_coeff().max(1.0);
    for k in 0..g.order() {
        let moved = g.act(k, phi)?;
        if (&moved - &phi.scale(g.character(k))).max_abs_coeff() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact quotient `φ / f_μ` for a relative invariant `φ`.
pub fn divide_by_fmu(phi: &Polynomial, g: &ReflectionGroup) -> Result<Polynomial> {
    if phi.dim() != g.dim {
        return Err(LabError::DimensionMismatch { expected: g.dim, found: phi.dim() });
    }
    let scale = phi.max_abs_coeff().max(f64::MIN_POSITIVE);
    let mut q = phi.clone();
    for (var, factor) in &g.fmu_factors {
        let (quot, rem) = q.div_rem_in(*var, factor)?;
        let r = rem.max_abs_coeff();
        if r > 1e-10 * scale {
            return Err(LabError::NotDivisible { remainder: r / scale });
        }
        q = quot;
    }
    Ok(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivReport {
    pub group: String,
    pub cap: usize,
    /// Sine of the largest principal angle between the two spans.
    pub principal_angle: f64,
    pub dim_gamma_range: usize,
    pub dim_projection_range: usize,
    pub pass: bool,
}

/// Weighted modified Gram–Schmidt; vectors whose residual norm falls below
/// `drop` times their original norm are discarded.
pub fn orthonormalize(vectors: &[Vec<Complex64>], weights: &[f64], drop: f64) -> Vec<Vec<Complex64>> {
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).zip(weights).map(|((x, y), w)| x * y.conj() * *w).sum()
    };
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let n0 = inner(v, v).re.sqrt();
        if n0 == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = inner(&r, q);
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let n = inner(&r, &r).re.sqrt();
        if n > drop * n0 {
            out.push(r.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Sine of the largest principal angle between two weighted-orthonormal
/// families of equal size, from explicit residual vectors.
pub fn largest_angle_sine(a: &[Vec<Complex64>], b: &[Vec<Complex64>], weights: &[f64]) -> f64 {
    let inner = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        x.iter().zip(y).zip(weights).map(|((p, q), w)| p * q.conj() * *w).sum()
    };
    let one_way = |from: &[Vec<Complex64>], onto: &[Vec<Complex64>]| -> f64 {
        let residuals: Vec<Vec<Complex64>> = from
            .iter()
            .map(|v| {
                let mut r = v.clone();
                for q in onto {
                    let c = inner(v, q);
                    for (x, y) in r.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
                r
            })
            .collect();
        let k = residuals.len();
        if k == 0 {
            return 0.0;
        }
        let m = DMatrix::from_fn(k, k, |i, j| inner(&residuals[j], &residuals[i]));
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let top = nalgebra::SymmetricEigen::new(h).eigenvalues.max();
        top.max(0.0).sqrt()
    };
    one_way(a, b).max(one_way(b, a))
}

/// Compares `ran Γ_θ` (images of `onb(θ(Ω), cap)`) with `ran P_μ`
/// (projections of the monomials occurring in those images).
pub fn verify_equiv(g: &ReflectionGroup, cap: usize) -> Result<EquivReport> {
    let theta = &g.theta;
    let basis = onb(theta.target(), cap)?;
    let s1: Vec<Polynomial> = basis.elements.iter().map(|b| gamma_polynomial(theta, b)).collect::<Result<_>>()?;
    let mut support: Vec<MultiIndex> = s1.iter().flat_map(|p| p.terms().map(|(a, _)| a.clone())).collect();
    support.sort();
    support.dedup();
    let mut s2: Vec<Polynomial> = Vec::new();
    for alpha in support {
        let p = g.project(&Polynomial::monomial(alpha, Complex64::new(1.0, 0.0)))?;
        if p.is_zero() || s2.iter().any(|q| proportional(q, &p)) {
            continue;
        }
        s2.push(p);
    }
    let level = s1
        .iter()
        .chain(&s2)
        .map(|p| (0..g.dim).map(|i| p.degree_in(i) as usize).max().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let rule = quadrature(g.domain(), level.max(1));
    let sample = |ps: &[Polynomial]| -> Result<Vec<Vec<Complex64>>> { ps.iter().map(|p| rule.sample(p)).collect() };
    let q1 = orthonormalize(&sample(&s1)?, &rule.weights, 1e-8);
    let q2 = orthonormalize(&sample(&s2)?, &rule.weights, 1e-8);
    let angle = if q1.len() == q2.len() { largest_angle_sine(&q1, &q2, &rule.weights) } else { 1.0 };
    Ok(EquivReport {
        group: g.name.clone(),
        cap,
        principal_angle: angle,
        dim_gamma_range: q1.len(),
        dim_projection_range: q2.len(),
        pass: q1.len() == q2.len() && angle < 1e-6,
    })
}

fn proportional(a: &Polynomial, b: &Polynomial) -> bool {
    let Some((alpha, ca)) = a.terms().next() else { return b.is_zero() };
    let cb = b.coeff(alpha);
    if cb.norm() < 1e-14 {
        return false;
    }
    a.scale(cb / ca).approx_eq(b, 1e-12 * b.max_abs_coeff())
}
