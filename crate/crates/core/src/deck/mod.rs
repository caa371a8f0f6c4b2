//! Deck transformation groups of catalog maps.
//!
//! Disc automorphisms are stored as `y = (αz + β)/(γz + 1)`; a fit through
//! three point pairs is a 3×3 linear system in `(α, β, γ)`. The fitted map is
//! an automorphism of `D` iff `|α| = 1`, `β = α·γ̄` and `|γ| < 1`, in which
//! case it equals `e^{iθ}(z − a)/(1 − āz)` with `a = −γ̄`, `θ = arg α`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::Holomorphic;
use crate::domains::symmetrize;
use crate::error::{LabError, Result};
use crate::maps::{permutation_sign, permutations, symmetric_roots, ProperMap};
use crate::operators::project_fiber;

/// Tolerance of the automorphism test on fitted coefficients.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-8;
/// Regular values are drawn at most this many times.
pub const REGULAR_DRAWS: usize = 20;
const SEED: u64 = 0x5eed_dec4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0), gamma: Complex64::new(0.0, 0.0) }
    }

    /// `e^{iθ}(z − a)/(1 − āz)`.
    pub fn from_descriptor(a: Complex64, theta: f64) -> Mobius {
        let rot = Complex64::from_polar(1.0, theta);
        Mobius { alpha: rot, beta: -rot * a, gamma: -a.conj() }
    }

    /// Map sending `src[k]` to `dst[k]`; `None` for a singular system.
    pub fn fit(src: [Complex64; 3], dst: [Complex64; 3]) -> Option<Mobius> {
        let one = Complex64::new(1.0, 0.0);
        let a = Matrix3::from_fn(|r, c| match c {
            0 => src[r],
            1 => one,
            _ => -src[r] * dst[r],
        });
        let b = Vector3::from_fn(|r, _| dst[r]);
        let x = a.lu().solve(&b)?;
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(Mobius { alpha: x[0], beta: x[1], gamma: x[2] })
    }

    pub fn is_disc_automorphism(&self, tol: f64) -> bool {
        (self.alpha.norm() - 1.0).abs() < tol
            && (self.beta - self.alpha * self.gamma.conj()).norm() < tol
            && self.gamma.norm() < 1.0 - tol
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / (self.gamma * z + 1.0)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.gamma * z + 1.0;
        (self.alpha - self.beta * self.gamma) / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let a = self.alpha * other.alpha + self.beta * other.gamma;
        let b = self.alpha * other.beta + self.beta;
        let c = self.gamma * other.alpha + other.gamma;
        let d = self.gamma * other.beta + 1.0;
        Mobius { alpha: a / d, beta: b / d, gamma: c / d }
    }

    pub fn descriptor(&self) -> MobiusDescriptor {
        let a = -self.gamma.conj();
        MobiusDescriptor { a: [a.re, a.im], theta: self.alpha.arg() }
    }

    fn distance(&self, other: &Mobius) -> f64 {
        (self.alpha - other.alpha).norm() + (self.beta - other.beta).norm() + (self.gamma - other.gamma).norm()
    }
}

/// `(a, θ)` of `e^{iθ}(z − a)/(1 − āz)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MobiusDescriptor {
    pub a: [f64; 2],
    pub theta: f64,
}

/// `h(z)_i = φ_i(z_{perm[i]})` on `D^d`; with `lifted` set, the same action
/// is transported to `G_d` through the roots of `w`.
#[derive(Clone, Debug)]
pub struct DeckElement {
    pub perm: Vec<usize>,
    pub maps: Vec<Mobius>,
    pub lifted: bool,
}

impl DeckElement {
    fn identity(d: usize, lifted: bool) -> DeckElement {
        DeckElement { perm: (0..d).collect(), maps: vec![Mobius::identity(); d], lifted }
    }

    fn act_polydisc(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.perm.iter().zip(&self.maps).map(|(&p, m)| m.apply(z[p])).collect()
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.lifted {
            let roots = symmetric_roots(z)?;
            let moved: Vec<Complex64> = roots.iter().map(|r| self.maps[0].apply(*r)).collect();
            Ok(symmetrize(&moved, moved.len()))
        } else {
            Ok(self.act_polydisc(z))
        }
    }

    /// Jacobian of the action on `D^d`; lifted elements use `J_f(z)/J_f(h z)`.
    pub fn jacobian_at(&self, f: &ProperMap, z: &[Complex64]) -> Result<Complex64> {
        if self.lifted {
            return Ok(f.jacobian_at(z)? / f.jacobian_at(&self.apply(z)?)?);
        }
        let prod: Complex64 = self.perm.iter().zip(&self.maps).map(|(&p, m)| m.derivative(z[p])).product();
        Ok(prod * permutation_sign(&self.perm))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DeckElement) -> DeckElement {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let maps = self.perm.iter().zip(&self.maps).map(|(&p, m)| m.compose(&other.maps[p])).collect();
        DeckElement { perm, maps, lifted: self.lifted }
    }

    fn distance(&self, other: &DeckElement) -> f64 {
        if self.perm != other.perm {
            return f64::INFINITY;
        }
        self.maps.iter().zip(&other.maps).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    pub fn descriptor(&self) -> ElementDescriptor {
        ElementDescriptor {
            permutation: self.perm.clone(),
            mobius: self.maps.iter().map(Mobius::descriptor).collect(),
            lifted: self.lifted,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementDescriptor {
    pub permutation: Vec<usize>,
    pub mobius: Vec<MobiusDescriptor>,
    pub lifted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeckReport {
    pub map_name: String,
    pub elements: Vec<ElementDescriptor>,
    pub is_galois: bool,
    pub fiber_size: usize,
}

/// A verified deck group together with its map.
#[derive(Clone, Debug)]
pub struct DeckGroup {
    pub map: ProperMap,
    pub elements: Vec<DeckElement>,
}

impl DeckGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_galois(&self) -> bool {
        self.order() == self.map.multiplicity()
    }

    pub fn report(&self) -> DeckReport {
        DeckReport {
            map_name: self.map.name().to_string(),
            elements: self.elements.iter().map(DeckElement::descriptor).collect(),
            is_galois: self.is_galois(),
            fiber_size: self.map.multiplicity(),
        }
    }

    /// Largest `|f(h z) − f(z)|` over `n` fresh source points.
    pub fn soundness(&self, n: usize, seed: u64) -> Result<f64> {
        let points = source_points(&self.map, n, 0.95, seed);
        max_identity_residual(&self.map, &self.elements, &points)
    }

    /// Index of the element agreeing with `h` at the probe points.
    pub fn find(&self, h: &DeckElement) -> Option<usize> {
        self.elements.iter().position(|e| e.distance(h) < 1e-7)
    }

    /// `table[i][j] = k` with `e_i ∘ e_j = e_k`; `None` if not closed.
    pub fn composition_table(&self) -> Option<Vec<Vec<usize>>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| self.find(&a.compose(b))).collect())
            .collect()
    }

    /// Closure plus a two-sided identity in every row of the table.
    pub fn is_group(&self) -> bool {
        let Some(table) = self.composition_table() else {
            return false;
        };
        let Some(e) = self.find(&DeckElement::identity(self.map.dim(), self.is_lifted())) else {
            return false;
        };
        table.iter().all(|row| row.contains(&e))
    }

    fn is_lifted(&self) -> bool {
        self.elements.first().is_some_and(|e| e.lifted)
    }

    /// Whether every fiber over `fibers` random regular values is one orbit.
    pub fn is_transitive(&self, fibers: usize, seed: u64) -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..fibers {
            let fiber = regular_fiber(&self.map, &mut rng)?;
            let start = &fiber[0];
            let mut hit = vec![false; fiber.len()];
            for e in &self.elements {
                let image = e.apply(start)?;
                if let Some(k) = fiber.iter().position(|p| crate::maps::dist(p, &image) < 1e-7) {
                    hit[k] = true;
                }
            }
            if !hit.iter().all(|h| *h) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(1/m) Σ_h φ(h z) J_h(z)`; equals `Pφ(z)` exactly when `f` is Galois.
    pub fn average(&self, phi: &dyn Holomorphic, z: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for e in &self.elements {
            acc += phi.eval(&e.apply(z)?)? * e.jacobian_at(&self.map, z)?;
        }
        Ok(acc / self.map.multiplicity() as f64)
    }

    /// Largest `|Pφ(z) − average(φ)(z)|` over the given points.
    pub fn factorization_residual(&self, phi: &dyn Holomorphic, points: &[Vec<Complex64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for z in points {
            worst = worst.max((project_fiber(&self.map, phi, z)? - self.average(phi, z)?).norm());
        }
        Ok(worst)
    }
}

fn source_points(f: &ProperMap, n: usize, radius: f64, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| f.source().sample(&mut rng, radius)).collect()
}

fn max_identity_residual(f: &ProperMap, elements: &[DeckElement], points: &[Vec<Complex64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in points {
        let fz = f.eval(z)?;
        for e in elements {
            let fh = f.eval(&e.apply(z)?)?;
            worst = worst.max(crate::maps::dist(&fz, &fh));
        }
    }
    Ok(worst)
}

fn regular_fiber(f: &ProperMap, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<Complex64>>> {
    for _ in 0..REGULAR_DRAWS {
        let z = f.source().sample(rng, 0.8);
        let fiber = f.fiber(&f.eval(&z)?)?;
        if fiber.regular && fiber.distinct_count() == f.multiplicity() && fiber.is_trusted(f.source()) {
            return Ok(fiber.preimages);
        }
    }
    Err(LabError::NoRegularValue { attempts: REGULAR_DRAWS })
}

/// Deck group of a finite Blaschke product by fiber-permutation search.
pub fn deck_group_blaschke(b: &ProperMap, tol: f64) -> Result<DeckGroup> {
    if b.blaschke_data().is_none() {
        return Err(LabError::CheckNotApplicable { check: "deck".into(), map: b.name().into() });
    }
    let m = b.multiplicity();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let fibers: Vec<Vec<Complex64>> = (0..3usize.div_ceil(m))
        .map(|_| Ok(regular_fiber(b, &mut rng)?.into_iter().map(|p| p[0]).collect()))
        .collect::<Result<_>>()?;
    // three anchor points, each tagged with its fiber
    let anchors: Vec<(usize, usize)> = fibers
        .iter()
        .enumerate()
        .flat_map(|(f, pts)| (0..pts.len()).map(move |k| (f, k)))
        .take(3)
        .collect();
    let grid = source_points(b, 100, 0.95, SEED + 1);
    let mut found: Vec<DeckElement> = Vec::new();
    for images in anchor_images(&anchors, &fibers) {
        let src = [0, 1, 2].map(|i| fibers[anchors[i].0][anchors[i].1]);
        let dst = [0, 1, 2].map(|i| fibers[anchors[i].0][images[i]]);
        let Some(h) = Mobius::fit(src, dst) else { continue };
        if !h.is_disc_automorphism(UNIMODULAR_TOLERANCE) {
            continue;
        }
        let e = DeckElement { perm: vec![0], maps: vec![h], lifted: false };
        if max_identity_residual(b, std::slice::from_ref(&e), &grid)? < tol
            && found.iter().all(|g| g.distance(&e) > 1e-7)
        {
            found.push(e);
        }
    }
    sort_elements(&mut found);
    Ok(DeckGroup { map: b.clone(), elements: found })
}

/// Injective assignments of anchor images, fiber by fiber.
fn anchor_images(anchors: &[(usize, usize)], fibers: &[Vec<Complex64>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for (i, &(f, _)) in anchors.iter().enumerate() {
        let mut next = Vec::new();
        for partial in &out {
            for k in 0..fibers[f].len() {
                let taken = (0..i).any(|j| anchors[j].0 == f && partial[j] == k);
                if !taken {
                    let mut p = partial.clone();
                    p.push(k);
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

fn sort_elements(elements: &mut [DeckElement]) {
    let key = |e: &DeckElement| -> (Vec<usize>, Vec<i64>) {
        let angles = e
            .maps
            .iter()
            .flat_map(|m| {
                let d = m.descriptor();
                let theta = if d.theta < -1e-9 { d.theta + std::f64::consts::TAU } else { d.theta.max(0.0) };
                [(d.a[0].hypot(d.a[1]) * 1e6).round() as i64, (theta * 1e6).round() as i64]
            })
            .collect();
        (e.perm.clone(), angles)
    };
    elements.sort_by_key(key);
}

/// Deck group of a product map: coordinate permutations with per-factor
/// deck elements, every candidate checked pointwise.
pub fn deck_group_polydisc(f: &ProperMap) -> Result<DeckGroup> {
    let factors = f
        .factors()
        .ok_or_else(|| LabError::CheckNotApplicable { check: "deck".into(), map: f.name().into() })?;
    let d = factors.len();
    let per_factor: Vec<DeckGroup> =
        factors.iter().map(|b| deck_group_blaschke(b, 1e-8)).collect::<Result<_>>()?;
    let grid = source_points(f, 50, 0.95, SEED + 2);
    let mut found = Vec::new();
    for perm in permutations(d) {
        if (0..d).any(|i| factors[i].name() != factors[perm[i]].name()) {
            continue;
        }
        let mut combos: Vec<Vec<Mobius>> = vec![Vec::new()];
        for i in 0..d {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    per_factor[perm[i]].elements.iter().map(move |e| {
                        let mut c = c.clone();
                        c.push(e.maps[0]);
                        c
                    })
                })
                .collect();
        }
        for maps in combos {
            let e = DeckElement { perm: perm.clone(), maps, lifted: false };
            if max_identity_residual(f, std::slice::from_ref(&e), &grid)? < 1e-8 {
                found.push(e);
            }
        }
    }
    sort_elements(&mut found);
    Ok(DeckGroup { map: f.clone(), elements: found })
}

/// Deck group on `G_d`: deck elements of the base lifted through the roots.
pub fn deck_group_symmetrized(f: &ProperMap) -> Result<DeckGroup> {
    let (base, d) = f
        .ez_base()
        .ok_or_else(|| LabError::CheckNotApplicable { check: "deck".into(), map: f.name().into() })?;
    let base_group = deck_group_blaschke(base, 1e-8)?;
    let grid = source_points(f, 50, 0.95, SEED + 3);
    let mut found = Vec::new();
    for e in &base_group.elements {
        let lifted = DeckElement { perm: (0..d).collect(), maps: vec![e.maps[0]; d], lifted: true };
        if max_identity_residual(f, std::slice::from_ref(&lifted), &grid)? < 1e-8 {
            found.push(lifted);
        }
    }
    Ok(DeckGroup { map: f.clone(), elements: found })
}

/// Deck group of the symmetrization map: all coordinate permutations that
/// pass the pointwise check.
pub fn deck_group_symmetrization(f: &ProperMap) -> Result<DeckGroup> {
    let d = f
        .symmetrization_dim()
        .ok_or_else(|| LabError::CheckNotApplicable { check: "deck".into(), map: f.name().into() })?;
    let grid = source_points(f, 50, 0.95, SEED + 4);
    let mut found = Vec::new();
    for perm in permutations(d) {
        let e = DeckElement { perm, maps: vec![Mobius::identity(); d], lifted: false };
        if max_identity_residual(f, std::slice::from_ref(&e), &grid)? < 1e-8 {
            found.push(e);
        }
    }
    Ok(DeckGroup { map: f.clone(), elements: found })
}

/// Dispatch on the structure of a catalog map.
pub fn deck_group(f: &ProperMap) -> Result<DeckGroup> {
    if f.blaschke_data().is_some() {
        deck_group_blaschke(f, 1e-8)
    } else if f.factors().is_some() {
        deck_group_polydisc(f)
    } else if f.ez_base().is_some() {
        deck_group_symmetrized(f)
    } else if f.symmetrization_dim().is_some() {
        deck_group_symmetrization(f)
    } else {
        Err(LabError::CheckNotApplicable { check: "deck".into(), map: f.name().into() })
    }
}

/// Plain-text group table: one line per element, then the composition table.
pub fn format_group(g: &DeckGroup) -> String {
    let mut out = format!(
        "deck({}) order {} fiber size {} galois {}\n",
        g.map.name(),
        g.order(),
        g.map.multiplicity(),
        g.is_galois()
    );
    for (k, e) in g.elements.iter().enumerate() {
        let parts: Vec<String> = e
            .maps
            .iter()
            .map(|m| {
                let d = m.descriptor();
                format!("a={:+.6}{:+.6}i theta={:+.6}", d.a[0], d.a[1], d.theta)
            })
            .collect();
        out.push_str(&format!("h{k}: perm {:?} {}\n", e.perm, parts.join(" ; ")));
    }
    if let Some(table) = g.composition_table() {
        for row in table {
            let cells: Vec<String> = row.iter().map(|k| format!("h{k}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests;
