//! The named checks a scenario can run. Each returns its largest residual
//! together with CSV tables; nothing here touches the filesystem.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{monomial, Holomorphic};
use crate::deck::deck_group;
use crate::domains::{quadrature, symmetrize, Domain, QuadratureRule};
use crate::error::{LabError, Result};
use crate::groups::{group_for_map, verify_equiv};
use crate::maps::{permutations, ProperMap};
use crate::operators::{
    bergman_operator_matrices, commutant_dimension, commutator_residual, multishift_matrix, project_fiber,
    restriction_matrix, GramProjector, OperatorMatrix,
};
use crate::spaces::{
    gram, identity_residual, onb, pin_symdisc_normalization, polynomial_norm_sq, random_polynomial,
    reproduce_check, symdisc_kernel_lifted, KernelModel, LiftedModel, SepFn,
};

/// Kernel truncations never go below this cap.
pub const KERNEL_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Isometry,
    Reducing,
    RestrictionShift,
    KernelPullback,
    KernelSymdisc,
    Deck,
    Equiv,
    OnbGram,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Isometry,
        Check::Reducing,
        Check::RestrictionShift,
        Check::KernelPullback,
        Check::KernelSymdisc,
        Check::Deck,
        Check::Equiv,
        Check::OnbGram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Isometry => "isometry",
            Check::Reducing => "reducing",
            Check::RestrictionShift => "restriction-shift",
            Check::KernelPullback => "kernel-pullback",
            Check::KernelSymdisc => "kernel-symdisc",
            Check::Deck => "deck",
            Check::Equiv => "equiv",
            Check::OnbGram => "onb-gram",
        }
    }

    pub fn parse(name: &str) -> Result<Check> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| LabError::UnknownCheck(name.to_string()))
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Isometry | Check::OnbGram => 1e-8,
            Check::Reducing | Check::RestrictionShift | Check::Deck => 1e-7,
            Check::KernelPullback | Check::KernelSymdisc | Check::Equiv => 1e-6,
        }
    }

    pub fn applies_to(self, f: &ProperMap) -> bool {
        match self {
            Check::KernelSymdisc => symdisc_dim(f).is_some(),
            Check::Equiv => group_for_map(f).is_some(),
            _ => true,
        }
    }
}

/// A CSV table: header plus rows of already formatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&str]) -> Table {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn from_matrix(name: impl Into<String>, m: &OperatorMatrix) -> Table {
        let mut header = vec!["row".to_string()];
        header.extend(m.cols.labels.iter().map(|l| l.to_string()));
        let rows = m
            .rows
            .labels
            .iter()
            .enumerate()
            .map(|(r, label)| {
                let mut row = vec![label.to_string()];
                row.extend((0..m.cols.len()).map(|c| complex_cell(m.entries[(r, c)])));
                row
            })
            .collect();
        Table { name: name.into(), header, rows }
    }
}

pub fn complex_cell(z: Complex64) -> String {
    format!("{:.15e}{:+.15e}i", z.re, z.im)
}

fn point_cell(z: &[Complex64]) -> String {
    z.iter().map(|x| complex_cell(*x)).collect::<Vec<_>>().join(";")
}

fn real_cell(x: f64) -> String {
    format!("{x:.6e}")
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub max_residual: f64,
    pub details: String,
    pub tables: Vec<Table>,
}

/// Settings shared by all checks of one scenario.
#[derive(Clone, Copy, Debug)]
pub struct CheckContext {
    pub degree_cap: usize,
    pub quadrature_level: Option<usize>,
    pub seed: u64,
}

pub fn run_check(check: Check, f: &ProperMap, ctx: &CheckContext) -> Result<Outcome> {
    if !check.applies_to(f) {
        return Err(LabError::CheckNotApplicable { check: check.name().into(), map: f.name().into() });
    }
    match check {
        Check::Isometry => isometry(f, ctx.degree_cap, 10, ctx.seed),
        Check::Reducing => reducing(f, ctx.degree_cap.min(3), 3, 10, ctx.seed),
        Check::RestrictionShift => restriction_shift(f, ctx.degree_cap),
        Check::KernelPullback => kernel_pullback(f, ctx.degree_cap.max(KERNEL_CAP), 200, ctx.seed),
        Check::KernelSymdisc => kernel_symdisc(f, ctx.degree_cap.min(3), 10, ctx.seed),
        Check::Deck => deck(f, ctx.seed),
        Check::Equiv => equiv(f, ctx.degree_cap),
        Check::OnbGram => onb_gram(f, ctx.degree_cap, ctx.quadrature_level),
    }
}

/// `|‖Γ_f ψ‖ − ‖ψ‖|` for random polynomials `ψ` of degree `degree`.
pub fn isometry(f: &ProperMap, degree: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let model = LiftedModel::new(f, 0, degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new("isometry", &["sample", "target_norm", "source_norm", "residual"]);
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let psi = random_polynomial(&mut rng, f.dim(), degree);
        let target = polynomial_norm_sq(f.target(), &psi)?.sqrt();
        let lifted = model.gamma_fn(&psi)?;
        let source = model.inner(&lifted, &lifted).re.max(0.0).sqrt();
        let r = (source - target).abs();
        worst = worst.max(r);
        table.rows.push(vec![k.to_string(), real_cell(target), real_cell(source), real_cell(r)]);
    }
    Ok(Outcome { max_residual: worst, details: format!("{samples} polynomials of degree {degree}"), tables: vec![table] })
}

/// Commutation `P(f_i φ) = f_i Pφ` plus agreement of the fiber formula with
/// the Gram projection onto `span{Γ_f b_α : |α| ≤ degree + 1}`.
pub fn reducing(f: &ProperMap, degree: usize, functions: usize, points: usize, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tests: Vec<_> = (0..functions).map(|_| random_polynomial(&mut rng, f.dim(), degree)).collect();
    let pts: Vec<Vec<Complex64>> = (0..points).map(|_| f.source().sample(&mut rng, 0.8)).collect();
    let refs: Vec<&dyn Holomorphic> = tests.iter().map(|p| p as &dyn Holomorphic).collect();
    let commutator = commutator_residual(f, &refs, &pts)?;
    let oracle = GramProjector::new(f, degree + 1, degree)?;
    let mut table = Table::new("reducing", &["function", "point", "fiber", "gram", "difference"]);
    let mut agreement: f64 = 0.0;
    for (k, phi) in tests.iter().enumerate() {
        let reference = oracle.project(phi)?;
        for z in &pts {
            let a = project_fiber(f, phi, z)?;
            let b = reference.eval(z)?;
            let r = (a - b).norm();
            agreement = agreement.max(r);
            table.rows.push(vec![k.to_string(), point_cell(z), complex_cell(a), complex_cell(b), real_cell(r)]);
        }
    }
    Ok(Outcome {
        max_residual: commutator.max(agreement),
        details: format!("commutator {commutator:.3e}, fiber vs Gram {agreement:.3e}"),
        tables: vec![table],
    })
}

/// Restricted multipliers against the Bergman operator on the target, and
/// against closed-form shift weights when the target is Reinhardt.
pub fn restriction_shift(f: &ProperMap, cap: usize) -> Result<Outcome> {
    let lifted = restriction_matrix(f, cap)?;
    let target = bergman_operator_matrices(f.target(), cap)?;
    let mut worst: f64 = 0.0;
    let mut tables = Vec::new();
    for (i, (a, b)) in lifted.iter().zip(&target).enumerate() {
        worst = worst.max(a.max_deviation(&b.entries));
        if f.target().is_reinhardt() {
            worst = worst.max(a.max_deviation(&multishift_matrix(f.target(), i, cap, cap + 1)?));
        }
        tables.push(Table::from_matrix(format!("restriction_{i}"), a));
    }
    let compressed: Vec<_> = lifted.iter().map(OperatorMatrix::compressed).collect();
    let commutant = commutant_dimension(&compressed, 1e-7);
    Ok(Outcome { max_residual: worst, details: format!("cap {cap}, compressed commutant dimension {commutant}"), tables })
}

/// Pulled-back closed-form kernel against the truncated sum over the image
/// basis at point pairs with coordinates of modulus at most 0.7.
pub fn kernel_pullback(f: &ProperMap, cap: usize, pairs: usize, seed: u64) -> Result<Outcome> {
    let pulled = KernelModel::pulled_back(f)?;
    let truncated = KernelModel::truncated_image(f, cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new("kernel_pullback", &["z", "w", "pulled_back", "truncated", "difference"]);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let z = f.source().sample(&mut rng, 0.7);
        let w = f.source().sample(&mut rng, 0.7);
        let a = pulled.eval(&z, &w)?;
        let b = truncated.eval(&z, &w)?;
        let r = (a - b).norm();
        worst = worst.max(r);
        table.rows.push(vec![point_cell(&z), point_cell(&w), complex_cell(a), complex_cell(b), real_cell(r)]);
    }
    Ok(Outcome { max_residual: worst, details: format!("{pairs} pairs, truncation cap {cap}"), tables: vec![table] })
}

fn symdisc_dim(f: &ProperMap) -> Option<usize> {
    [f.source(), f.target()].into_iter().find_map(|d| match d {
        Domain::SymmetrizedPolydisc(d) => Some(d),
        _ => None,
    })
}

/// Determinant kernel on `G_d`: pinned constant, reproduction of random
/// polynomials and invariance under permuting preimages.
pub fn kernel_symdisc(f: &ProperMap, degree: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let d = symdisc_dim(f).ok_or_else(|| LabError::CheckNotApplicable { check: "kernel-symdisc".into(), map: f.name().into() })?;
    kernel_symdisc_on(d, degree, samples, seed)
}

pub fn kernel_symdisc_on(d: usize, degree: usize, samples: usize, seed: u64) -> Result<Outcome> {
    let domain = Domain::SymmetrizedPolydisc(d);
    let (constant, spread) = pin_symdisc_normalization(d)?;
    let model = KernelModel::ClosedForm { domain, normalization: constant };
    // base points far from the boundary keep angular aliasing negligible
    let (radius, rule) = if d == 2 {
        (0.7, QuadratureRule::tensor(domain, degree / 2 + 3, 80))
    } else {
        (0.4, QuadratureRule::tensor(domain, degree / 2 + 2, 40))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table::new("kernel_symdisc", &["sample", "w", "reproduction_residual"]);
    let mut reproduce: f64 = 0.0;
    for k in 0..samples {
        let phi = random_polynomial(&mut rng, d, degree);
        let roots: Vec<Complex64> = (0..d).map(|_| crate::domains::sample_disc(&mut rng, radius)).collect();
        let w = symmetrize(&roots, d);
        let r = reproduce_check(&model, &phi, &w, &rule)?;
        reproduce = reproduce.max(r);
        table.rows.push(vec![k.to_string(), point_cell(&w), real_cell(r)]);
    }
    let mut invariance: f64 = 0.0;
    for _ in 0..20 {
        let x: Vec<Complex64> = (0..d).map(|_| crate::domains::sample_disc(&mut rng, 0.9)).collect();
        let y: Vec<Complex64> = (0..d).map(|_| crate::domains::sample_disc(&mut rng, 0.9)).collect();
        let base = symdisc_kernel_lifted(&x, &y)?;
        for perm in permutations(d) {
            let px: Vec<Complex64> = perm.iter().map(|&i| x[i]).collect();
            let moved = symdisc_kernel_lifted(&px, &y)?;
            invariance = invariance.max((moved - base).norm() / base.norm().max(1.0));
        }
    }
    Ok(Outcome {
        max_residual: reproduce.max(invariance).max(spread),
        details: format!(
            "constant {constant:.12}, spread {spread:.3e}, reproduction {reproduce:.3e}, permutation {invariance:.3e}"
        ),
        tables: vec![table],
    })
}

/// Soundness on fresh points, group axioms, transitivity versus the Galois
/// property and, for Galois maps, deck averaging versus the fiber formula.
pub fn deck(f: &ProperMap, seed: u64) -> Result<Outcome> {
    let g = deck_group(f)?;
    let mut worst = g.soundness(200, seed)?;
    let mut notes = vec![format!("order {}, fiber size {}, galois {}", g.order(), f.multiplicity(), g.is_galois())];
    if !g.is_group() {
        worst = 1.0;
        notes.push("not closed under composition".into());
    }
    if g.is_transitive(5, seed)? != g.is_galois() {
        worst = 1.0;
        notes.push("transitivity disagrees with the Galois property".into());
    }
    if g.is_galois() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<_> = (0..20).map(|_| f.source().sample(&mut rng, 0.85)).collect();
        let degrees = vec![2; f.source().dim()];
        worst = worst.max(g.factorization_residual(&monomial(&degrees), &pts)?);
    }
    let mut table = Table::new("deck", &["element", "permutation", "component", "a", "theta"]);
    for (k, e) in g.elements.iter().enumerate() {
        for (i, m) in e.maps.iter().enumerate() {
            let d = m.descriptor();
            let perm = e.perm.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
            table.rows.push(vec![
                k.to_string(),
                perm,
                i.to_string(),
                complex_cell(Complex64::new(d.a[0], d.a[1])),
                format!("{:.15e}", d.theta),
            ]);
        }
    }
    Ok(Outcome { max_residual: worst, details: notes.join("; "), tables: vec![table] })
}

/// Largest principal angle between `ran Γ_θ` and `ran P_μ` at the given cap.
pub fn equiv(f: &ProperMap, cap: usize) -> Result<Outcome> {
    let g = group_for_map(f).ok_or_else(|| LabError::CheckNotApplicable { check: "equiv".into(), map: f.name().into() })?;
    let report = verify_equiv(&g, cap)?;
    Ok(Outcome {
        max_residual: report.principal_angle,
        details: format!(
            "group {}, dimensions {} and {}",
            report.group, report.dim_gamma_range, report.dim_projection_range
        ),
        tables: Vec::new(),
    })
}

/// Orthonormality of the target basis (by quadrature) and of its image
/// under `Γ_f` (lifted model).
pub fn onb_gram(f: &ProperMap, cap: usize, level: Option<usize>) -> Result<Outcome> {
    let target = onb(f.target(), cap)?;
    let needed = match f.target() {
        Domain::SymmetrizedPolydisc(d) => cap + d,
        _ => cap,
    };
    let functions = target.functions();
    let refs: Vec<&dyn Holomorphic> = functions.iter().map(|b| b as &dyn Holomorphic).collect();
    let g_target = gram(&refs, f.target(), level.unwrap_or(needed).max(1))?;
    let model = LiftedModel::new(f, 0, cap)?;
    let lifted: Vec<SepFn> = target.elements.iter().map(|b| model.gamma_fn(b)).collect::<Result<_>>()?;
    let g_image = model.gram(&lifted);
    let (a, b) = (identity_residual(&g_target), identity_residual(&g_image));
    let mut table = Table::new("onb_gram", &["row", "column", "target", "image"]);
    for r in 0..g_image.nrows() {
        for c in 0..g_image.ncols() {
            table.rows.push(vec![r.to_string(), c.to_string(), complex_cell(g_target[(r, c)]), complex_cell(g_image[(r, c)])]);
        }
    }
    Ok(Outcome {
        max_residual: a.max(b),
        details: format!("{} basis elements, target {a:.3e}, image {b:.3e}", target.len()),
        tables: vec![table],
    })
}

/// Quadrature rule a scenario would dump for `domain`.
pub fn scenario_rule(domain: Domain, level: usize) -> QuadratureRule {
    quadrature(domain, level)
}
