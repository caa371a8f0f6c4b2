//! Catalog of proper holomorphic maps with jacobians, fibers and
//! multiplicity certification.
//!
//! Local inverses are never continued analytically. Everything that needs
//! `f^k ∘ f` goes through the fiber `f⁻¹(f(z))`, solved algebraically, and
//! the chain-rule identity `J_{f^k∘f}(z) = J_f(z) / J_f(w_k)` that follows
//! from `f ∘ f^k = id`.

mod catalog;

pub use catalog::{catalog_entries, list_catalog, parse_complex, parse_map};

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::symmetric::{elementary, elementary_all, symmetric_to_elementary};
use crate::algebra::{compose, jacobian_det, MultiIndex, Polynomial, RationalFunction};
use crate::domains::{symmetrize, Domain};
use crate::error::{LabError, Result};
use crate::roots::all_roots;

/// Preimages with `|J_f| <= REGULAR_JACOBIAN` mark a fiber as non-regular.
pub const REGULAR_JACOBIAN: f64 = 1e-10;
/// Fibers are only trusted when every disc coordinate keeps `1 − |z_i|` above this.
pub const BOUNDARY_GUARD: f64 = 1e-6;
/// Two preimages closer than this count as one.
pub const DISTINCT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum MapKind {
    Blaschke,
    PolydiscProduct,
    Symmetrization,
    EdigarianZwonek,
    Power,
}

/// Zeros, multiplicities and unimodular phase of a finite Blaschke product
/// `e^{iθ} ∏ ((z − a_j)/(1 − ā_j z))^{k_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeData {
    pub zeros: Vec<Complex64>,
    pub powers: Vec<u32>,
    pub phase: f64,
}

#[derive(Clone, Debug)]
enum Structure {
    Blaschke(BlaschkeData),
    Product(Vec<ProperMap>),
    Symmetrization(usize),
    EdigarianZwonek { base: Box<ProperMap>, d: usize },
}

#[derive(Clone, Debug)]
pub struct ProperMap {
    name: String,
    kind: MapKind,
    source: Domain,
    target: Domain,
    components: Vec<RationalFunction>,
    jacobian: RationalFunction,
    multiplicity: usize,
    structure: Structure,
}

/// `f⁻¹(w)` together with regularity information.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub base_point: Vec<Complex64>,
    pub preimages: Vec<Vec<Complex64>>,
    /// Every preimage has `|J_f| > REGULAR_JACOBIAN`.
    pub regular: bool,
}

impl Fiber {
    /// Boundary-distance guard on the disc coordinates of the preimages (or
    /// of their polydisc lifts for `G_d` sources).
    pub fn is_trusted(&self, source: Domain) -> bool {
        self.preimages.iter().all(|p| match source {
            Domain::SymmetrizedPolydisc(_) => crate::domains::companion_roots(p)
                .is_some_and(|r| r.iter().all(|x| 1.0 - x.norm() > BOUNDARY_GUARD)),
            _ => p.iter().all(|x| 1.0 - x.norm() > BOUNDARY_GUARD),
        })
    }

    /// Number of pairwise distinct preimages.
    pub fn distinct_count(&self) -> usize {
        let mut kept: Vec<&Vec<Complex64>> = Vec::new();
        for p in &self.preimages {
            if !kept.iter().any(|q| dist(p, q) < DISTINCT_TOLERANCE) {
                kept.push(p);
            }
        }
        kept.len()
    }
}

pub(crate) fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn lift_univariate(p: &Polynomial, dim: usize, var: usize) -> Polynomial {
    p.compose_poly(&[Polynomial::variable(dim, var)])
        .expect("univariate composition")
}

fn lift_rational(f: &RationalFunction, dim: usize, var: usize) -> RationalFunction {
    RationalFunction::new(
        lift_univariate(f.numerator(), dim, var),
        lift_univariate(f.denominator(), dim, var),
    )
    .expect("lifted denominator is nonzero")
}

/// `e^{iθ} ∏ ((z − a_j)/(1 − ā_j z))^{k_j}` on the unit disc.
pub fn blaschke(zeros: &[Complex64], powers: &[u32], phase: f64) -> Result<ProperMap> {
    if zeros.len() != powers.len() || zeros.is_empty() {
        return Err(LabError::DimensionMismatch { expected: zeros.len(), found: powers.len() });
    }
    if let Some(a) = zeros.iter().find(|a| a.norm() >= 1.0) {
        return Err(LabError::ZeroOutsideDisc(format!("{a}")));
    }
    if powers.contains(&0) {
        return Err(LabError::Parse("Blaschke powers must be positive".into()));
    }
    let z = Polynomial::variable(1, 0);
    let one = Polynomial::one(1);
    let mut num = Polynomial::constant(1, Complex64::from_polar(1.0, phase));
    let mut den = Polynomial::one(1);
    for (a, &k) in zeros.iter().zip(powers) {
        let top = &z - &Polynomial::constant(1, *a);
        num = &num * &top.pow(k);
        if *a != Complex64::new(0.0, 0.0) {
            let bottom = &one - &z.scale(a.conj());
            den = &den * &bottom.pow(k);
        }
    }
    let b = RationalFunction::new(num, den)?;
    let jacobian = b.partial(0);
    let multiplicity = powers.iter().sum::<u32>() as usize;
    let data = BlaschkeData { zeros: zeros.to_vec(), powers: powers.to_vec(), phase };
    let is_power = zeros.len() == 1 && zeros[0] == Complex64::new(0.0, 0.0) && phase == 0.0;
    let name = if is_power {
        format!("power:{}", powers[0])
    } else {
        format!("blaschke:{}", catalog::format_blaschke(&data))
    };
    Ok(ProperMap {
        name,
        kind: if is_power { MapKind::Power } else { MapKind::Blaschke },
        source: Domain::UnitDisc,
        target: Domain::UnitDisc,
        components: vec![b],
        jacobian,
        multiplicity,
        structure: Structure::Blaschke(data),
    })
}

/// `z ↦ z^n`.
pub fn power(n: u32) -> ProperMap {
    blaschke(&[Complex64::new(0.0, 0.0)], &[n], 0.0).expect("zero at the origin")
}

/// `𝐁(z) = (B_1(z_1), …, B_d(z_d))` on `D^d`.
pub fn polydisc_product(factors: &[ProperMap]) -> Result<ProperMap> {
    if factors.is_empty() {
        return Err(LabError::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(bad) = factors.iter().find(|f| f.blaschke_data().is_none()) {
        return Err(LabError::UnknownMap(format!("{} is not a Blaschke product", bad.name)));
    }
    let d = factors.len();
    if d == 1 {
        return Ok(factors[0].clone());
    }
    let components: Vec<RationalFunction> = factors
        .iter()
        .enumerate()
        .map(|(i, f)| lift_rational(&f.components[0], d, i))
        .collect();
    let jacobian = jacobian_det(&components)?;
    let multiplicity = factors.iter().map(|f| f.multiplicity).product();
    let name = format!(
        "prod:{}",
        factors.iter().map(|f| f.name.clone()).collect::<Vec<_>>().join("|")
    );
    Ok(ProperMap {
        name,
        kind: MapKind::PolydiscProduct,
        source: Domain::Polydisc(d),
        target: Domain::Polydisc(d),
        components,
        jacobian,
        multiplicity,
        structure: Structure::Product(factors.to_vec()),
    })
}

/// `s = (e_1, …, e_d)` from `D^d` onto `G_d`; multiplicity `d!`.
pub fn symmetrization(d: usize) -> ProperMap {
    assert!(d >= 1, "symmetrization needs d >= 1");
    let components: Vec<RationalFunction> =
        elementary_all(d).into_iter().map(Into::into).collect();
    let jacobian = jacobian_det(&components).expect("square system");
    let (source, target) = if d == 1 {
        (Domain::UnitDisc, Domain::UnitDisc)
    } else {
        (Domain::Polydisc(d), Domain::SymmetrizedPolydisc(d))
    };
    ProperMap {
        name: format!("sym:{d}"),
        kind: MapKind::Symmetrization,
        source,
        target,
        components,
        jacobian,
        multiplicity: (1..=d).product(),
        structure: Structure::Symmetrization(d),
    }
}

/// The proper self-map of `G_d` with `f(s(z)) = s(B(z_1), …, B(z_d))`.
///
/// Components are kept as exact rational functions of `w`: each
/// `e_k(B(z_1), …, B(z_d))` is a symmetric rational function of `z` with
/// denominator `∏ q(z_i)`, and both numerator and denominator are rewritten
/// in the elementary symmetric polynomials. Root-finding evaluation is
/// available separately through [`ProperMap::eval_via_roots`].
pub fn edigarian_zwonek(base: &ProperMap, d: usize) -> Result<ProperMap> {
    if base.blaschke_data().is_none() {
        return Err(LabError::UnknownMap(format!("{} is not a Blaschke product", base.name)));
    }
    if d < 2 {
        return Err(LabError::InvalidScenario("ez maps need d >= 2".into()));
    }
    let b = &base.components[0];
    let lifted: Vec<RationalFunction> = (0..d).map(|i| lift_rational(b, d, i)).collect();
    let mut components = Vec::with_capacity(d);
    for k in 1..=d {
        let ek = elementary(d, k);
        let sym = compose(&ek, &lifted)?;
        let num = symmetric_to_elementary(sym.numerator(), 1e-12)?;
        let den = symmetric_to_elementary(sym.denominator(), 1e-12)?;
        components.push(RationalFunction::new(num, den)?);
    }
    let jacobian = jacobian_det(&components)?;
    Ok(ProperMap {
        name: format!("ez:{}:{d}", base.name),
        kind: MapKind::EdigarianZwonek,
        source: Domain::SymmetrizedPolydisc(d),
        target: Domain::SymmetrizedPolydisc(d),
        components,
        jacobian,
        multiplicity: base.multiplicity.pow(d as u32),
        structure: Structure::EdigarianZwonek { base: Box::new(base.clone()), d },
    })
}

impl ProperMap {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn source(&self) -> Domain {
        self.source
    }

    pub fn target(&self) -> Domain {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    pub fn jacobian(&self) -> &RationalFunction {
        &self.jacobian
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn blaschke_data(&self) -> Option<&BlaschkeData> {
        match &self.structure {
            Structure::Blaschke(b) => Some(b),
            _ => None,
        }
    }

    /// Factor maps of a polydisc product.
    pub fn factors(&self) -> Option<&[ProperMap]> {
        match &self.structure {
            Structure::Product(f) => Some(f),
            _ => None,
        }
    }

    /// Underlying Blaschke product and dimension of an Edigarian–Zwonek map.
    pub fn ez_base(&self) -> Option<(&ProperMap, usize)> {
        match &self.structure {
            Structure::EdigarianZwonek { base, d } => Some((base, *d)),
            _ => None,
        }
    }

    pub fn symmetrization_dim(&self) -> Option<usize> {
        match &self.structure {
            Structure::Symmetrization(d) => Some(*d),
            _ => None,
        }
    }

    /// True when every component is a polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(|c| c.is_polynomial())
    }

    /// Largest total degree of the component numerators (polynomial maps).
    pub fn component_degree(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.numerator().degree().max(0) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: z.len() });
        }
        match &self.structure {
            Structure::Symmetrization(d) => Ok(symmetrize(z, *d)),
            Structure::Product(factors) => factors
                .iter()
                .zip(z)
                .map(|(f, x)| f.components[0].eval(std::slice::from_ref(x)))
                .collect(),
            _ => self.components.iter().map(|c| c.eval(z)).collect(),
        }
    }

    pub fn jacobian_at(&self, z: &[Complex64]) -> Result<Complex64> {
        match &self.structure {
            Structure::Product(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for (f, x) in factors.iter().zip(z) {
                    acc *= f.jacobian.eval(std::slice::from_ref(x))?;
                }
                Ok(acc)
            }
            Structure::Symmetrization(d) if z.len() == *d => {
                let delta = MultiIndex((0..*d).map(|i| (d - 1 - i) as u32).collect());
                let sign = self.jacobian.numerator().coeff(&delta) / self.jacobian.denominator().coeff(&MultiIndex::zero(*d));
                Ok(sign * vandermonde_value(z))
            }
            _ => self.jacobian.eval(z),
        }
    }

    /// Edigarian–Zwonek evaluation by recovering `z` from `w = s(z)`,
    /// applying `B` coordinatewise and symmetrizing again.
    pub fn eval_via_roots(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        let Structure::EdigarianZwonek { base, d } = &self.structure else {
            return self.eval(w);
        };
        let z = symmetric_roots(w)?;
        let bz: Vec<Complex64> = z
            .iter()
            .map(|x| base.components[0].eval(std::slice::from_ref(x)))
            .collect::<Result<_>>()?;
        Ok(symmetrize(&bz, *d))
    }

    pub fn fiber(&self, w: &[Complex64]) -> Result<Fiber> {
        if w.len() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: w.len() });
        }
        if !self.target.contains(w)? {
            return Err(LabError::TargetMiss);
        }
        let preimages = self.preimages(w)?;
        let mut regular = true;
        for p in &preimages {
            let j = self.jacobian_at(p).map(|j| j.norm()).unwrap_or(0.0);
            if j <= REGULAR_JACOBIAN {
                regular = false;
                break;
            }
        }
        Ok(Fiber { base_point: w.to_vec(), preimages, regular })
    }

    fn preimages(&self, w: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        match &self.structure {
            Structure::Blaschke(_) => {
                let b = &self.components[0];
                let num = b.numerator().to_univariate();
                let den = b.denominator().to_univariate();
                let n = num.len().max(den.len());
                let coeffs: Vec<Complex64> = (0..n)
                    .map(|k| {
                        num.get(k).copied().unwrap_or_default()
                            - w[0] * den.get(k).copied().unwrap_or_default()
                    })
                    .collect();
                Ok(all_roots(&coeffs)?.roots.into_iter().map(|r| vec![r]).collect())
            }
            Structure::Product(factors) => {
                let mut acc: Vec<Vec<Complex64>> = vec![vec![]];
                for (f, wi) in factors.iter().zip(w) {
                    let part = f.preimages(std::slice::from_ref(wi))?;
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for p in &part {
                            let mut v = a.clone();
                            v.extend_from_slice(p);
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            Structure::Symmetrization(_) => {
                let roots = symmetric_roots(w)?;
                Ok(permutations(roots.len())
                    .into_iter()
                    .map(|perm| perm.iter().map(|&i| roots[i]).collect())
                    .collect())
            }
            Structure::EdigarianZwonek { base, d } => {
                let y = symmetric_roots(w)?;
                let mut acc: Vec<Vec<Complex64>> = vec![vec![]];
                for yi in &y {
                    let part = base.preimages(std::slice::from_ref(yi))?;
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for a in &acc {
                        for p in &part {
                            let mut v = a.clone();
                            v.push(p[0]);
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                Ok(acc.iter().map(|x| symmetrize(x, *d)).collect())
            }
        }
    }

    /// Counts regular fiber sizes at `trials` random target points and
    /// returns the common count.
    pub fn multiplicity_certify<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> Result<usize> {
        let mut counts = Vec::with_capacity(trials);
        let max_attempts = 20 * trials.max(1);
        let mut attempts = 0;
        while counts.len() < trials {
            if attempts >= max_attempts {
                return Err(LabError::NoRegularValue { attempts });
            }
            attempts += 1;
            let w = self.target.sample(rng, 0.9);
            let fiber = match self.fiber(&w) {
                Ok(f) => f,
                Err(LabError::TargetMiss) => continue,
                Err(e) => return Err(e),
            };
            if !fiber.regular || !fiber.is_trusted(self.source) {
                continue;
            }
            let inside = Fiber {
                preimages: fiber
                    .preimages
                    .iter()
                    .filter(|p| self.source.contains(p).unwrap_or(false))
                    .cloned()
                    .collect(),
                ..fiber
            };
            counts.push(inside.distinct_count());
        }
        if counts.windows(2).any(|w| w[0] != w[1]) {
            return Err(LabError::InconsistentFiberCount { counts });
        }
        Ok(counts[0])
    }
}

/// `∏_{i<j}(z_i − z_j)`.
pub fn vandermonde_value(z: &[Complex64]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            v *= z[i] - z[j];
        }
    }
    v
}

/// Roots `z` of `t^d − w_1 t^{d−1} + … + (−1)^d w_d`, i.e. a point with `s(z) = w`.
pub fn symmetric_roots(w: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = w.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
    coeffs[d] = Complex64::new(1.0, 0.0);
    for k in 1..=d {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[d - k] = w[k - 1] * sign;
    }
    Ok(all_roots(&coeffs)?.roots)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Sign of a permutation given as an index vector.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
