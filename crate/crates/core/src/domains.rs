//! Bounded domains, their normalized volume measure, and quadrature rules.
//!
//! All integrals use normalized Lebesgue measure: `dA/π` on the disc,
//! `dV/π^d` on the polydisc, and on the symmetrized polydisc `G_d` the
//! measure for which `∫_{G_d} g = (1/d!) ∫_{D^d} (g∘s)|J_s|²`. Under this
//! convention `e_n = √(n+1) z^n` is orthonormal on the disc.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::symmetric::elementary_all;
use crate::algebra::{Holomorphic, MultiIndex, Polynomial};
use crate::error::{LabError, Result};

/// Strict-inequality margin for the symmetrized-polydisc root test.
pub const MEMBERSHIP_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    UnitDisc,
    Polydisc(usize),
    SymmetrizedPolydisc(usize),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match *self {
            Domain::UnitDisc => 1,
            Domain::Polydisc(d) | Domain::SymmetrizedPolydisc(d) => d,
        }
    }

    pub fn is_reinhardt(&self) -> bool {
        !matches!(self, Domain::SymmetrizedPolydisc(_))
    }

    pub fn name(&self) -> String {
        match *self {
            Domain::UnitDisc => "D".into(),
            Domain::Polydisc(d) => format!("D^{d}"),
            Domain::SymmetrizedPolydisc(d) => format!("G_{d}"),
        }
    }

    pub fn contains(&self, z: &[Complex64]) -> Result<bool> {
        if z.len() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: z.len() });
        }
        Ok(match self {
            Domain::UnitDisc | Domain::Polydisc(_) => z.iter().all(|x| x.norm() < 1.0),
            Domain::SymmetrizedPolydisc(_) => companion_roots(z)
                .map(|roots| roots.iter().all(|r| r.norm() < 1.0 - MEMBERSHIP_MARGIN))
                .unwrap_or(false),
        })
    }

    /// `‖z^α‖` under the normalized measure: `∏ (α_i+1)^{-1/2}`.
    pub fn monomial_norm(&self, alpha: &MultiIndex) -> Result<f64> {
        if !self.is_reinhardt() {
            return Err(LabError::NotReinhardt);
        }
        if alpha.dim() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), found: alpha.dim() });
        }
        Ok(alpha.0.iter().map(|&a| 1.0 / (a as f64 + 1.0)).product::<f64>().sqrt())
    }

    /// A random interior point; every disc coordinate has modulus below `radius`.
    ///
    /// Disc coordinates are area-uniform. For `G_d` the point is `s(z)` with
    /// `z` drawn that way in `D^d`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> Vec<Complex64> {
        let z: Vec<Complex64> = (0..self.dim()).map(|_| sample_disc(rng, radius)).collect();
        match self {
            Domain::SymmetrizedPolydisc(d) => symmetrize(&z, *d),
            _ => z,
        }
    }

    /// Default quadrature rule at `level`.
    pub fn quadrature(&self, level: usize) -> QuadratureRule {
        quadrature(*self, level)
    }
}

pub fn sample_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    Complex64::from_polar(r, theta)
}

/// `s(z) = (e_1(z), …, e_d(z))` evaluated by the product expansion of
/// `∏ (t + z_i)`.
pub fn symmetrize(z: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); d + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, zi) in z.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let prev = e[k - 1];
            e[k] += prev * zi;
        }
    }
    e[1..].to_vec()
}

/// Roots of `t^d − w_1 t^{d−1} + … + (−1)^d w_d` as eigenvalues of the
/// companion matrix.
pub fn companion_roots(w: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = w.len();
    if d == 1 {
        return Some(vec![w[0]]);
    }
    // monic coefficients a_k of t^k, k < d: a_{d-k} = (−1)^k w_k
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 1..=d {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let a = w[k - 1] * sign;
        m[(d - k, d - 1)] = -a;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..d).map(|i| t[(i, i)]).collect())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// Nodes and weights on the disc: Gauss–Legendre in `t = r²` times a uniform
/// trapezoid in angle. Weights sum to one.
pub fn disc_rule(radial: usize, angular: usize) -> (Vec<Complex64>, Vec<f64>) {
    let (x, w) = gauss_legendre(radial);
    let mut nodes = Vec::with_capacity(radial * angular);
    let mut weights = Vec::with_capacity(radial * angular);
    for (xi, wi) in x.iter().zip(&w) {
        let t = 0.5 * (xi + 1.0);
        let r = t.sqrt();
        for k in 0..angular {
            let theta = 2.0 * PI * k as f64 / angular as f64;
            nodes.push(Complex64::from_polar(r, theta));
            weights.push(0.5 * wi / angular as f64);
        }
    }
    (nodes, weights)
}

/// A positive-weight cubature rule on a domain.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub domain: Domain,
    pub nodes: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
    /// Per-coordinate degree bound: `z^α z̄^β` is integrated exactly when
    /// every `α_i, β_i ≤ exact_degree / 2` (for `G_d`, in the lifted
    /// polydisc coordinates).
    pub exact_degree: usize,
    /// Polydisc preimages of the nodes, kept for pushforward rules.
    pub preimages: Option<Vec<Vec<Complex64>>>,
}

/// Rule at `level`: `⌈(level+1)/2⌉` radial points and `2·level+1` angles per
/// disc factor, exact for `z^α z̄^β` with `α, β ≤ level`.
pub fn quadrature(domain: Domain, level: usize) -> QuadratureRule {
    let level = level.max(1);
    QuadratureRule::tensor(domain, level / 2 + 1, 2 * level + 1)
        .with_exact_degree(2 * level)
}

impl QuadratureRule {
    /// Tensor rule with explicit radial and angular counts per disc factor.
    /// For `G_d` this is the pushforward of the polydisc rule under `s`.
    pub fn tensor(domain: Domain, radial: usize, angular: usize) -> QuadratureRule {
        let (disc_nodes, disc_weights) = disc_rule(radial, angular);
        let exact_degree = 2 * (2 * radial - 1).min(angular - 1);
        match domain {
            Domain::UnitDisc => QuadratureRule {
                domain,
                nodes: disc_nodes.iter().map(|z| vec![*z]).collect(),
                weights: disc_weights,
                exact_degree,
                preimages: None,
            },
            Domain::Polydisc(d) => {
                let (nodes, weights) = tensor_power(&disc_nodes, &disc_weights, d);
                QuadratureRule { domain, nodes, weights, exact_degree, preimages: None }
            }
            Domain::SymmetrizedPolydisc(d) => {
                // Each point of G_d is hit by the d! orderings of a node tuple;
                // only strictly increasing index tuples are kept, with the
                // 1/d! of the pushforward cancelled.
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                let mut preimages = Vec::new();
                for idx in increasing_tuples(disc_nodes.len(), d) {
                    let z: Vec<Complex64> = idx.iter().map(|&i| disc_nodes[i]).collect();
                    let vdm = vandermonde_abs(&z);
                    if vdm < 1e-10 {
                        continue;
                    }
                    let wz: f64 = idx.iter().map(|&i| disc_weights[i]).product();
                    nodes.push(symmetrize(&z, d));
                    weights.push(wz * vdm * vdm);
                    preimages.push(z);
                }
                QuadratureRule { domain, nodes, weights, exact_degree, preimages: Some(preimages) }
            }
        }
    }

    fn with_exact_degree(mut self, deg: usize) -> Self {
        self.exact_degree = deg;
        self
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Values of `f` at every node, in node order.
    pub fn sample(&self, f: &dyn Holomorphic) -> Result<Vec<Complex64>> {
        if f.dim() != self.domain.dim() {
            return Err(LabError::DimensionMismatch { expected: self.domain.dim(), found: f.dim() });
        }
        self.nodes.par_iter().map(|z| f.eval(z)).collect()
    }

    /// `∫ g dμ` with ascending-node-order summation.
    pub fn integrate<F>(&self, g: F) -> Result<Complex64>
    where
        F: Fn(&[Complex64]) -> Result<Complex64> + Sync,
    {
        let values: Vec<Complex64> = self.nodes.par_iter().map(|z| g(z)).collect::<Result<_>>()?;
        Ok(values.iter().zip(&self.weights).map(|(v, w)| v * *w).sum())
    }

    /// `⟨a, b⟩ = Σ w_j a_j conj(b_j)` for sampled values.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter()
            .zip(b)
            .zip(&self.weights)
            .map(|((x, y), w)| x * y.conj() * *w)
            .sum()
    }

    pub fn norm_sq(&self, a: &[Complex64]) -> f64 {
        a.iter().zip(&self.weights).map(|(x, w)| x.norm_sqr() * w).sum()
    }

    /// Writes one row per node: coordinates as `re_k, im_k` pairs, then the weight.
    pub fn dump_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let d = self.domain.dim();
        let mut header: Vec<String> = Vec::new();
        for k in 1..=d {
            header.push(format!("re_z{k}"));
            header.push(format!("im_z{k}"));
        }
        header.push("weight".into());
        writeln!(out, "{}", header.join(","))?;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            let mut row: Vec<String> = Vec::with_capacity(2 * d + 1);
            for x in z {
                row.push(format!("{:e}", x.re));
                row.push(format!("{:e}", x.im));
            }
            row.push(format!("{w:e}"));
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn tensor_power(
    nodes: &[Complex64],
    weights: &[f64],
    d: usize,
) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let mut out_nodes: Vec<Vec<Complex64>> = vec![vec![]];
    let mut out_weights = vec![1.0];
    for _ in 0..d {
        let mut nn = Vec::with_capacity(out_nodes.len() * nodes.len());
        let mut nw = Vec::with_capacity(out_nodes.len() * nodes.len());
        for (z, w) in out_nodes.iter().zip(&out_weights) {
            for (x, wx) in nodes.iter().zip(weights) {
                let mut p = z.clone();
                p.push(*x);
                nn.push(p);
                nw.push(w * wx);
            }
        }
        out_nodes = nn;
        out_weights = nw;
    }
    (out_nodes, out_weights)
}

fn increasing_tuples(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    if d > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..d).rev().find(|&i| cur[i] < n - d + i) else {
            break;
        };
        cur[i] += 1;
        for j in (i + 1)..d {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

fn vandermonde_abs(z: &[Complex64]) -> f64 {
    let mut v = 1.0;
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            v *= (z[i] - z[j]).norm();
        }
    }
    v
}

/// The symmetrization map as polynomials `(e_1, …, e_d)`.
pub fn symmetrization_polys(d: usize) -> Vec<Polynomial> {
    elementary_all(d)
}

#[cfg(test)]
mod tests;
