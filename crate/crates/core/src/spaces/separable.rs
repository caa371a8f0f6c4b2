//! Inner products on `D^d` for sums of products of univariate atoms.
//!
//! Tensor-product rules factor: for `F = Σ c_t ∏_i u_{t_i}(z_i)` and
//! `G = Σ e_s ∏_i u_{s_i}(z_i)`, the rule gives
//! `⟨F, G⟩ = Σ c_t conj(e_s) ∏_i g[t_i][s_i]` with `g` the one-dimensional
//! Gram table of the atoms. Integrals over `G_d` are lifted to `D^d`
//! through the isometry `Γ_s`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{gamma_polynomial, hermitian_average};
use crate::algebra::{MultiIndex, Polynomial, RationalFunction};
use crate::domains::{quadrature, Domain, QuadratureRule};
use crate::error::{LabError, Result};
use crate::maps::{symmetrization, MapKind, ProperMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `z^k`.
    Power(u32),
    /// `B(z)^k B'(z)` for the given factor `B`.
    Pulled { factor: usize, power: u32 },
}

/// Univariate atoms sampled on a disc rule, with their Gram table.
#[derive(Clone, Debug)]
pub struct AtomTable {
    factors: Vec<RationalFunction>,
    derivatives: Vec<RationalFunction>,
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    gram: DMatrix<Complex64>,
    rule_size: usize,
}

impl AtomTable {
    pub fn new(
        factors: Vec<RationalFunction>,
        max_power: u32,
        max_pulled: u32,
        rule: &QuadratureRule,
    ) -> Result<AtomTable> {
        let derivatives: Vec<RationalFunction> = factors.iter().map(|b| b.partial(0)).collect();
        let mut atoms: Vec<Atom> = (0..=max_power).map(Atom::Power).collect();
        for f in 0..factors.len() {
            atoms.extend((0..=max_pulled).map(|power| Atom::Pulled { factor: f, power }));
        }
        let index = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let mut table = AtomTable {
            factors,
            derivatives,
            atoms,
            index,
            gram: DMatrix::zeros(0, 0),
            rule_size: rule.len(),
        };
        let samples: Vec<Vec<Complex64>> = table
            .atoms
            .iter()
            .map(|a| rule.nodes.iter().map(|z| table.eval_atom(*a, z[0])).collect())
            .collect::<Result<_>>()?;
        let n = samples.len();
        let mut g = DMatrix::from_fn(n, n, |j, k| rule.inner(&samples[j], &samples[k]));
        hermitian_average(&mut g);
        table.gram = g;
        Ok(table)
    }

    pub fn eval_atom(&self, atom: Atom, z: Complex64) -> Result<Complex64> {
        match atom {
            Atom::Power(k) => Ok(z.powu(k)),
            Atom::Pulled { factor, power } => {
                let b = self.factors[factor].eval(&[z])?;
                let db = self.derivatives[factor].eval(&[z])?;
                Ok(b.powu(power) * db)
            }
        }
    }

    pub fn index(&self, atom: Atom) -> Result<usize> {
        self.index.get(&atom).copied().ok_or(LabError::TruncationUnsafe {
            row_cap: self.atoms.len(),
            needed: match atom {
                Atom::Power(k) => k as usize,
                Atom::Pulled { power, .. } => power as usize,
            },
        })
    }

    pub fn atom(&self, i: usize) -> Atom {
        self.atoms[i]
    }

    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    pub fn rule_size(&self) -> usize {
        self.rule_size
    }
}

/// `Σ c · ∏_i atom_{t_i}(z_i)` with atoms addressed by table index.
#[derive(Clone, Debug, Default)]
pub struct SepFn {
    pub terms: Vec<(Vec<usize>, Complex64)>,
}

impl SepFn {
    fn from_map(map: BTreeMap<Vec<usize>, Complex64>) -> SepFn {
        SepFn { terms: map.into_iter().filter(|(_, c)| c.norm() > 0.0).collect() }
    }

    pub fn scale(&self, c: Complex64) -> SepFn {
        SepFn { terms: self.terms.iter().map(|(t, x)| (t.clone(), x * c)).collect() }
    }
}

#[derive(Clone, Copy, Debug)]
enum Style {
    Disc,
    Product,
    Polynomial,
    Ez { d: usize },
}

/// Lifted representation of source-side functions for a catalog map.
///
/// Sources `D` and `D^d` are used as they are; a `G_d` source is lifted to
/// `D^d` by `Γ_s`. Images `Γ_f ψ` of polynomials become combinations of
/// `∏ B(z_i)^{k_i} B'(z_i)`, using `Γ_s Γ_f = Γ_𝐁 Γ_s` for the
/// Edigarian–Zwonek maps.
#[derive(Clone, Debug)]
pub struct LiftedModel {
    map: ProperMap,
    style: Style,
    lift_dim: usize,
    table: AtomTable,
}

impl LiftedModel {
    /// `source_degree` bounds test functions in source coordinates,
    /// `target_degree` bounds the polynomials fed to `Γ_f` (one extra degree
    /// is reserved for multiplication by a component).
    pub fn new(map: &ProperMap, source_degree: usize, target_degree: usize) -> Result<LiftedModel> {
        let (style, factors, max_power, max_pulled) = match (map.kind(), map.source()) {
            (MapKind::Blaschke | MapKind::Power, Domain::UnitDisc) => (
                Style::Disc,
                vec![map.components()[0].clone()],
                source_degree,
                target_degree + 1,
            ),
            (MapKind::PolydiscProduct, _) => (
                Style::Product,
                map.factors().expect("product map").iter().map(|f| f.components()[0].clone()).collect(),
                source_degree,
                target_degree + 1,
            ),
            (MapKind::Symmetrization, _) => {
                let d = map.dim();
                (Style::Polynomial, vec![], source_degree.max(target_degree + d), 0)
            }
            (MapKind::EdigarianZwonek, _) => {
                let (base, d) = map.ez_base().expect("ez map");
                (
                    Style::Ez { d },
                    vec![base.components()[0].clone()],
                    source_degree + d - 1,
                    target_degree + d,
                )
            }
            _ => return Err(LabError::UnknownMap(map.name().into())),
        };
        let lift_dim = match map.source() {
            Domain::UnitDisc => 1,
            Domain::Polydisc(d) | Domain::SymmetrizedPolydisc(d) => d,
        };
        let polynomial = factors.iter().all(|b| b.is_polynomial());
        let m = factors
            .iter()
            .map(|b| b.numerator().degree().max(b.denominator().degree()).max(1) as usize)
            .max()
            .unwrap_or(1);
        let rule = if polynomial {
            let deg = max_power.max(max_pulled * m + m);
            quadrature(Domain::UnitDisc, deg)
        } else {
            let deg = max_power.max(max_pulled * m + 2 * m);
            QuadratureRule::tensor(Domain::UnitDisc, deg / 2 + 16, 2 * deg + 96)
        };
        let table = AtomTable::new(factors, max_power as u32, max_pulled as u32, &rule)?;
        Ok(LiftedModel { map: map.clone(), style, lift_dim, table })
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn lift_dim(&self) -> usize {
        self.lift_dim
    }

    fn poly_to_sep(&self, p: &Polynomial) -> Result<SepFn> {
        let mut acc = BTreeMap::new();
        for (alpha, c) in p.terms() {
            let idx = alpha
                .as_slice()
                .iter()
                .map(|&k| self.table.index(Atom::Power(k)))
                .collect::<Result<Vec<_>>>()?;
            *acc.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(SepFn::from_map(acc))
    }

    fn pulled(&self, p: &Polynomial, factor_of: &[usize], scale: f64) -> Result<SepFn> {
        let mut acc = BTreeMap::new();
        for (alpha, c) in p.terms() {
            let idx = alpha
                .as_slice()
                .iter()
                .zip(factor_of)
                .map(|(&k, &factor)| self.table.index(Atom::Pulled { factor, power: k }))
                .collect::<Result<Vec<_>>>()?;
            *acc.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c * scale;
        }
        Ok(SepFn::from_map(acc))
    }

    /// Lift of a polynomial given in source coordinates.
    pub fn source_fn(&self, phi: &Polynomial) -> Result<SepFn> {
        match self.style {
            Style::Ez { d } => self.poly_to_sep(&gamma_polynomial(&symmetrization(d), phi)?),
            _ => self.poly_to_sep(phi),
        }
    }

    /// Lift of `Γ_f ψ` for a polynomial `ψ` in target coordinates.
    pub fn gamma_fn(&self, psi: &Polynomial) -> Result<SepFn> {
        let scale = 1.0 / (self.map.multiplicity() as f64).sqrt();
        match self.style {
            Style::Disc => self.pulled(psi, &[0], scale),
            Style::Product => {
                let factor_of: Vec<usize> = (0..self.lift_dim).collect();
                self.pulled(psi, &factor_of, scale)
            }
            Style::Polynomial => self.poly_to_sep(&gamma_polynomial(&self.map, psi)?),
            Style::Ez { d } => {
                let (base, _) = self.map.ez_base().expect("ez map");
                let lifted = gamma_polynomial(&symmetrization(d), psi)?;
                let n = base.multiplicity() as f64;
                self.pulled(&lifted, &vec![0; d], 1.0 / n.powi(d as i32).sqrt())
            }
        }
    }

    fn bump(&self, idx: usize) -> Result<usize> {
        match self.table.atom(idx) {
            Atom::Pulled { factor, power } => self.table.index(Atom::Pulled { factor, power: power + 1 }),
            Atom::Power(_) => Err(LabError::UnknownMap(self.map.name().into())),
        }
    }

    /// Lift of `f_i · g` given the lift of `g`.
    pub fn mul_component(&self, i: usize, g: &SepFn) -> Result<SepFn> {
        let mut acc = BTreeMap::new();
        match self.style {
            Style::Disc | Style::Product => {
                for (t, c) in &g.terms {
                    let mut t = t.clone();
                    t[i] = self.bump(t[i])?;
                    *acc.entry(t).or_insert(Complex64::new(0.0, 0.0)) += c;
                }
            }
            Style::Polynomial => {
                let comp = self.map.components()[i].as_polynomial().expect("polynomial component");
                for (t, c) in &g.terms {
                    for (beta, b) in comp.terms() {
                        let t2 = t
                            .iter()
                            .zip(beta.as_slice())
                            .map(|(&k, &e)| match self.table.atom(k) {
                                Atom::Power(p) => self.table.index(Atom::Power(p + e)),
                                Atom::Pulled { .. } => Err(LabError::UnknownMap(self.map.name().into())),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        *acc.entry(t2).or_insert(Complex64::new(0.0, 0.0)) += c * b;
                    }
                }
            }
            Style::Ez { d } => {
                // e_{i+1}(B(z_1), …, B(z_d)) raises the power in each chosen slot
                let subsets = MultiIndex::of_degree(d, (i + 1) as u32)
                    .into_iter()
                    .filter(|a| a.as_slice().iter().all(|&e| e <= 1));
                let subsets: Vec<MultiIndex> = subsets.collect();
                for (t, c) in &g.terms {
                    for s in &subsets {
                        let mut t2 = t.clone();
                        for (slot, &e) in s.as_slice().iter().enumerate() {
                            if e == 1 {
                                t2[slot] = self.bump(t2[slot])?;
                            }
                        }
                        *acc.entry(t2).or_insert(Complex64::new(0.0, 0.0)) += c;
                    }
                }
            }
        }
        Ok(SepFn::from_map(acc))
    }

    pub fn inner(&self, a: &SepFn, b: &SepFn) -> Complex64 {
        let g = self.table.gram();
        let mut acc = Complex64::new(0.0, 0.0);
        for (ta, ca) in &a.terms {
            for (tb, cb) in &b.terms {
                let mut prod = ca * cb.conj();
                for (i, j) in ta.iter().zip(tb) {
                    prod *= g[(*i, *j)];
                }
                acc += prod;
            }
        }
        acc
    }

    /// Hermitian Gram matrix `G_{jk} = ⟨F_j, F_k⟩`.
    pub fn gram(&self, fs: &[SepFn]) -> DMatrix<Complex64> {
        let n = fs.len();
        let mut g = DMatrix::from_fn(n, n, |j, k| self.inner(&fs[j], &fs[k]));
        hermitian_average(&mut g);
        g
    }

    /// Pointwise value of a lifted function at a point of `D^d`.
    pub fn eval(&self, f: &SepFn, z: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, c) in &f.terms {
            let mut prod = *c;
            for (i, zi) in t.iter().zip(z) {
                prod *= self.table.eval_atom(self.table.atom(*i), *zi)?;
            }
            acc += prod;
        }
        Ok(acc)
    }
}
