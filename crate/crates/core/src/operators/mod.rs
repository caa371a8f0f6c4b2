//! Compressions of multiplication tuples, the reducing projection `P`
//! (through fibers, group averaging and Gram projection) and the
//! restriction-equals-shift comparison.
//!
//! The fiber form of `P` uses the local inverses only through their
//! jacobians: from `f ∘ f^k = id` one gets `J_{f^k}(f(z)) = 1 / J_f(w_k)`,
//! hence `J_{f^k ∘ f}(z) = J_f(z) / J_f(w_k)` with `w_k = f^k(f(z))` running
//! over the fiber `f⁻¹(f(z))`.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{FnHolomorphic, Holomorphic, Polynomial};
use crate::domains::{quadrature, Domain, QuadratureRule};
use crate::error::{LabError, Result};
use crate::groups::ReflectionGroup;
use crate::maps::ProperMap;
use crate::spaces::{onb, BasisSet, Function, LiftedModel, SepFn};

/// Fiber points with `|J_f| ≤ BRANCH_GUARD` are refused by [`project_fiber`].
pub const BRANCH_GUARD: f64 = 1e-6;

/// Matrix of `T` with entries `⟨T b_col, b_row⟩`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub rows: BasisSet,
    pub cols: BasisSet,
    pub entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    /// Largest entrywise difference to another matrix of the same shape.
    pub fn max_deviation(&self, other: &DMatrix<Complex64>) -> f64 {
        if self.entries.shape() != other.shape() {
            return f64::INFINITY;
        }
        (&self.entries - other).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Square part indexed by the column labels.
    pub fn compressed(&self) -> DMatrix<Complex64> {
        let pos: Vec<usize> = self
            .cols
            .labels
            .iter()
            .map(|l| self.rows.position(l).expect("column labels appear among row labels"))
            .collect();
        DMatrix::from_fn(pos.len(), pos.len(), |i, j| self.entries[(pos[i], j)])
    }

    /// CSV with column labels in the header and the row label first.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header: Vec<String> = self.cols.labels.iter().map(|l| format!("\"{l}\"")).collect();
        writeln!(out, "row,{}", header.join(","))?;
        for (r, label) in self.rows.labels.iter().enumerate() {
            let cells: Vec<String> = (0..self.cols.len())
                .map(|c| {
                    let x = self.entries[(r, c)];
                    format!("{:.12e}{:+.12e}i", x.re, x.im)
                })
                .collect();
            writeln!(out, "\"{label}\",{}", cells.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `{"check": name, "max_residual": x, "seed": s}`.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualSummary {
    pub check: String,
    pub max_residual: f64,
    pub seed: u64,
}

/// `√((n+1)/(n+2))`.
pub fn shift_weight(n: u32) -> f64 {
    ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt()
}

fn rule_for(domain: Domain, row_cap: usize) -> QuadratureRule {
    match domain {
        Domain::SymmetrizedPolydisc(d) => quadrature(domain, row_cap + d),
        _ => quadrature(domain, row_cap.max(1)),
    }
}

/// Matrix of `M_{f_i}` from `onb(domain, col_cap)` to `onb(domain, row_cap)`.
pub fn mult_matrix(symbol: &Polynomial, domain: Domain, col_cap: usize, row_cap: usize) -> Result<OperatorMatrix> {
    let needed = col_cap + symbol.degree().max(0) as usize;
    if row_cap < needed {
        return Err(LabError::TruncationUnsafe { row_cap, needed });
    }
    let cols = onb(domain, col_cap)?;
    let rows = onb(domain, row_cap)?;
    mult_matrix_with_rule(symbol, rows, cols, &rule_for(domain, row_cap))
}

/// Entries `⟨f·b_col, b_row⟩` on a given rule, for any evaluable symbol.
pub fn mult_matrix_with_rule(
    symbol: &dyn Holomorphic,
    rows: BasisSet,
    cols: BasisSet,
    rule: &QuadratureRule,
) -> Result<OperatorMatrix> {
    let s = rule.sample(symbol)?;
    let col_vals: Vec<Vec<Complex64>> = cols
        .elements
        .iter()
        .map(|b| Ok(rule.sample(b)?.iter().zip(&s).map(|(x, y)| x * y).collect()))
        .collect::<Result<_>>()?;
    let row_vals: Vec<Vec<Complex64>> = rows.elements.iter().map(|b| rule.sample(b)).collect::<Result<_>>()?;
    let entries = DMatrix::from_fn(rows.len(), cols.len(), |r, c| rule.inner(&col_vals[c], &row_vals[r]));
    Ok(OperatorMatrix { rows, cols, entries })
}

/// Closed-form matrix of `M_{z_i}` on `D^d` (or `D`) between the given caps:
/// `z_i e_α = √((α_i+1)/(α_i+2)) e_{α+ε_i}`.
pub fn multishift_matrix(domain: Domain, i: usize, col_cap: usize, row_cap: usize) -> Result<DMatrix<Complex64>> {
    if !domain.is_reinhardt() {
        return Err(LabError::NotReinhardt);
    }
    let cols = onb(domain, col_cap)?;
    let rows = onb(domain, row_cap)?;
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (c, alpha) in cols.labels.iter().enumerate() {
        let mut beta = alpha.clone();
        beta.0[i] += 1;
        if let Some(r) = rows.position(&beta) {
            m[(r, c)] = Complex64::new(shift_weight(alpha.0[i]), 0.0);
        }
    }
    Ok(m)
}

/// `Pφ(z) = (1/m) Σ_k φ(w_k) J_f(z) / J_f(w_k)` over `w_k ∈ f⁻¹(f(z))`.
pub fn project_fiber(f: &ProperMap, phi: &dyn Holomorphic, z: &[Complex64]) -> Result<Complex64> {
    let fiber = f.fiber(&f.eval(z)?)?;
    let jz = f.jacobian_at(z)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &fiber.preimages {
        let jp = f.jacobian_at(p)?;
        if jp.norm() <= BRANCH_GUARD {
            return Err(LabError::NearBranchLocus { jacobian: jp.norm() });
        }
        acc += phi.eval(p)? * jz / jp;
    }
    Ok(acc / f.multiplicity() as f64)
}

/// `P_μ φ` on coefficients.
pub fn project_group(g: &ReflectionGroup, phi: &Polynomial) -> Result<Polynomial> {
    g.project(phi)
}

/// `P_μ φ(z) = (1/|G|) Σ_ρ χ_μ(ρ⁻¹) φ(ρ⁻¹·z)` for a black-box `φ`.
pub fn project_group_at(g: &ReflectionGroup, phi: &dyn Holomorphic, z: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..g.order() {
        let inv = g.inverse(k);
        acc += g.character(inv) * phi.eval(&g.act_point(inv, z))?;
    }
    Ok(acc / g.order() as f64)
}

/// `f_i · φ` as a black box.
pub fn times_component<'a>(
    f: &'a ProperMap,
    i: usize,
    phi: &'a dyn Holomorphic,
) -> FnHolomorphic<impl Fn(&[Complex64]) -> Result<Complex64> + Sync + 'a> {
    FnHolomorphic::new(f.dim(), move |z: &[Complex64]| Ok(f.components()[i].eval(z)? * phi.eval(z)?))
}

/// Largest `|P(f_i φ)(z) − f_i(z) Pφ(z)|` with `P` from fibers.
pub fn commutator_residual(f: &ProperMap, tests: &[&dyn Holomorphic], points: &[Vec<Complex64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for phi in tests {
        for z in points {
            let p = project_fiber(f, *phi, z)?;
            for i in 0..f.dim() {
                let fi = f.components()[i].eval(z)?;
                let lhs = project_fiber(f, &times_component(f, i, *phi), z)?;
                worst = worst.max((lhs - fi * p).norm());
            }
        }
    }
    Ok(worst)
}

/// Orthogonal projection onto `span{Γ_f b : b ∈ onb(target, cap)}` from the
/// Gram system, used as the reference for the fiber formula. The projection
/// of a polynomial is a finite combination only when `f` has a pole at
/// infinity in every coordinate (e.g. a Blaschke product vanishing at 0).
pub struct GramProjector {
    map: Arc<ProperMap>,
    model: LiftedModel,
    basis: Vec<Polynomial>,
    lifts: Vec<SepFn>,
    gram: DMatrix<Complex64>,
}

impl GramProjector {
    /// `source_degree` bounds the polynomials that will be projected.
    pub fn new(f: &ProperMap, cap: usize, source_degree: usize) -> Result<GramProjector> {
        let model = LiftedModel::new(f, source_degree, cap)?;
        let basis = onb(f.target(), cap)?.elements;
        let lifts: Vec<SepFn> = basis.iter().map(|b| model.gamma_fn(b)).collect::<Result<_>>()?;
        let gram = model.gram(&lifts);
        Ok(GramProjector { map: Arc::new(f.clone()), model, basis, lifts, gram })
    }

    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    /// Coefficients `c` of `Pφ = Σ c_k Γ_f b_k`.
    pub fn coefficients(&self, phi: &Polynomial) -> Result<Vec<Complex64>> {
        let lifted = self.model.source_fn(phi)?;
        let rhs = nalgebra::DVector::from_iterator(
            self.lifts.len(),
            self.lifts.iter().map(|l| self.model.inner(&lifted, l)),
        );
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| LabError::InvalidScenario("Gram matrix is not positive definite".into()))?;
        Ok(chol.solve(&rhs).iter().copied().collect())
    }

    pub fn project(&self, phi: &Polynomial) -> Result<Function> {
        let c = self.coefficients(phi)?;
        let terms = c
            .into_iter()
            .zip(&self.basis)
            .map(|(c, b)| {
                (c, Function::Gamma { map: self.map.clone(), inner: Arc::new(Function::Poly(b.clone())) })
            })
            .collect();
        Ok(Function::Combination { dim: self.map.dim(), terms })
    }
}

/// Matrices of `M_{f_i}` restricted to `ran Γ_f`, in the basis
/// `{Γ_f b_α}`: columns `|α| ≤ cap`, rows up to `cap + 1`.
pub fn restriction_matrix(f: &ProperMap, cap: usize) -> Result<Vec<OperatorMatrix>> {
    if cap < 1 {
        return Err(LabError::TruncationUnsafe { row_cap: cap, needed: 1 });
    }
    let model = LiftedModel::new(f, 0, cap + 1)?;
    let cols = onb(f.target(), cap)?;
    let rows = onb(f.target(), cap + 1)?;
    let col_lifts: Vec<SepFn> = cols.elements.iter().map(|b| model.gamma_fn(b)).collect::<Result<_>>()?;
    let row_lifts: Vec<SepFn> = rows.elements.iter().map(|b| model.gamma_fn(b)).collect::<Result<_>>()?;
    (0..f.dim())
        .map(|i| {
            let moved: Vec<SepFn> = col_lifts.iter().map(|l| model.mul_component(i, l)).collect::<Result<_>>()?;
            let entries = DMatrix::from_fn(rows.len(), cols.len(), |r, c| model.inner(&moved[c], &row_lifts[r]));
            Ok(OperatorMatrix { rows: rows.clone(), cols: cols.clone(), entries })
        })
        .collect()
}

/// Matrices of the coordinate multipliers on `A²(target)` between the same caps.
pub fn bergman_operator_matrices(target: Domain, cap: usize) -> Result<Vec<OperatorMatrix>> {
    (0..target.dim())
        .map(|i| mult_matrix(&Polynomial::variable(target.dim(), i), target, cap, cap + 1))
        .collect()
}

/// Dimension of `{X : [X, T_i] = [X, T_i*] = 0 for all i}`, counting
/// singular values of the stacked linear map below `tol` (relative).
pub fn commutant_dimension(mats: &[DMatrix<Complex64>], tol: f64) -> usize {
    let n = mats[0].nrows();
    let n2 = n * n;
    let mut blocks: Vec<DMatrix<Complex64>> = Vec::new();
    let id = DMatrix::<Complex64>::identity(n, n);
    for t in mats {
        for a in [t.clone(), t.adjoint()] {
            // vec(AX − XA) = (I ⊗ A − Aᵀ ⊗ I) vec(X) in column-major order
            blocks.push(id.kronecker(&a) - a.transpose().kronecker(&id));
        }
    }
    let mut stacked = DMatrix::<Complex64>::zeros(blocks.len() * n2, n2);
    for (k, b) in blocks.iter().enumerate() {
        stacked.view_mut((k * n2, 0), (n2, n2)).copy_from(b);
    }
    let sv = stacked.svd(false, false).singular_values;
    let top = sv.max().max(1.0);
    sv.iter().filter(|s| **s < tol * top).count()
}

#[cfg(test)]
mod tests;
