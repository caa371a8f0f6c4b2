use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{gamma_apply, jacobian_sign, onb, Function};
use crate::algebra::Holomorphic;
use crate::domains::{companion_roots, Domain, QuadratureRule};
use crate::error::{LabError, Result};
use crate::maps::{parse_map, vandermonde_value, ProperMap};

/// Refusal threshold for `|J_s|` in the determinant formula on `G_d`.
pub const BRANCH_GUARD: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum KernelModel {
    /// Closed-form Bergman kernel; `normalization` multiplies the formula.
    ClosedForm { domain: Domain, normalization: f64 },
    /// `Σ b(z) conj(b(w))` over a finite orthonormal family.
    TruncatedSum { domain: Domain, basis: Vec<Function> },
    /// `(1/m) J_f(z) K(f(z), f(w)) conj(J_f(w))`.
    PulledBack { map: Arc<ProperMap>, inner: Box<KernelModel> },
}

impl KernelModel {
    /// Closed form on `domain`. On `G_d` the overall constant is pinned
    /// first by reproducing constants.
    pub fn closed_form(domain: Domain) -> Result<KernelModel> {
        let normalization = match domain {
            Domain::SymmetrizedPolydisc(d) => pin_symdisc_normalization(d)?.0,
            _ => 1.0,
        };
        Ok(KernelModel::ClosedForm { domain, normalization })
    }

    /// Truncated sum over `onb(domain, cap)`.
    pub fn truncated(domain: Domain, cap: usize) -> Result<KernelModel> {
        Ok(KernelModel::TruncatedSum { domain, basis: onb(domain, cap)?.functions() })
    }

    /// Truncated sum over `{Γ_f b : b ∈ onb(target, cap)}`.
    pub fn truncated_image(f: &ProperMap, cap: usize) -> Result<KernelModel> {
        let basis = onb(f.target(), cap)?
            .functions()
            .into_iter()
            .map(|b| gamma_apply(f, b))
            .collect();
        Ok(KernelModel::TruncatedSum { domain: f.source(), basis })
    }

    /// `K_f` built from the closed-form kernel of the target.
    pub fn pulled_back(f: &ProperMap) -> Result<KernelModel> {
        Ok(KernelModel::PulledBack {
            map: Arc::new(f.clone()),
            inner: Box::new(KernelModel::closed_form(f.target())?),
        })
    }

    pub fn domain(&self) -> Domain {
        match self {
            KernelModel::ClosedForm { domain, .. } | KernelModel::TruncatedSum { domain, .. } => *domain,
            KernelModel::PulledBack { map, .. } => map.source(),
        }
    }

    pub fn eval(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        let dim = self.domain().dim();
        for p in [z, w] {
            if p.len() != dim {
                return Err(LabError::DimensionMismatch { expected: dim, found: p.len() });
            }
        }
        match self {
            KernelModel::ClosedForm { domain, normalization } => match domain {
                Domain::UnitDisc | Domain::Polydisc(_) => {
                    let mut k = Complex64::new(*normalization, 0.0);
                    for (a, b) in z.iter().zip(w) {
                        let den = Complex64::new(1.0, 0.0) - a * b.conj();
                        k /= den * den;
                    }
                    Ok(k)
                }
                Domain::SymmetrizedPolydisc(_) => {
                    let x = companion_roots(z).ok_or(LabError::RootFindingDiverged { residual: f64::NAN })?;
                    let y = companion_roots(w).ok_or(LabError::RootFindingDiverged { residual: f64::NAN })?;
                    Ok(symdisc_kernel_lifted(&x, &y)? * *normalization)
                }
            },
            KernelModel::TruncatedSum { basis, .. } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in basis {
                    acc += b.eval(z)? * b.eval(w)?.conj();
                }
                Ok(acc)
            }
            KernelModel::PulledBack { map, inner } => {
                let fz = map.eval(z)?;
                let fw = map.eval(w)?;
                let jz = map.jacobian_at(z)?;
                let jw = map.jacobian_at(w)?;
                Ok(jz * inner.eval(&fz, &fw)? * jw.conj() / map.multiplicity() as f64)
            }
        }
    }
}

/// `det[(1 − x_i conj(y_j))^{-2}] / (J_s(x) conj(J_s(y)))` in preimage
/// coordinates `x, y ∈ D^d`, without the normalization constant.
pub fn symdisc_kernel_lifted(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    let d = x.len();
    let sign = jacobian_sign(d);
    let jx = vandermonde_value(x) * sign;
    let jy = vandermonde_value(y) * sign;
    let smallest = jx.norm().min(jy.norm());
    if smallest < BRANCH_GUARD {
        return Err(LabError::PoleEvaluation { magnitude: smallest });
    }
    let m = DMatrix::from_fn(d, d, |i, j| {
        let den = Complex64::new(1.0, 0.0) - x[i] * y[j].conj();
        (den * den).inv()
    });
    Ok(m.determinant() / (jx * jy.conj()))
}

/// Pins the constant in front of the determinant formula on `G_d` by
/// requiring `∫ K(z, w) dμ(z) = 1` (reproduction of constants) at a few
/// base points. Returns the constant and the spread between base points.
pub fn pin_symdisc_normalization(d: usize) -> Result<(f64, f64)> {
    // Base points with small preimages keep the integrand's angular content
    // low, so a modest rule is exact to rounding.
    let bases: [&[f64]; 3] = [&[0.1, -0.2, 0.15, 0.05], &[0.2, 0.05, -0.1, 0.12], &[-0.15, 0.1, 0.2, -0.05]];
    let rule = QuadratureRule::tensor(Domain::SymmetrizedPolydisc(d), d / 2 + 2, 24 + 2 * d);
    let pre = rule.preimages.as_ref().expect("pushforward rule keeps preimages");
    let mut values = Vec::new();
    for b in bases {
        let y: Vec<Complex64> = (0..d)
            .map(|i| Complex64::from_polar(b[i % 4].abs() + 0.01 * i as f64, 0.7 * i as f64 + b[i % 4]))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in pre.iter().zip(&rule.weights) {
            acc += symdisc_kernel_lifted(x, &y)? * *w;
        }
        values.push(acc);
    }
    let c = 1.0 / values[0].re;
    let spread = values.iter().map(|v| (v * c - 1.0).norm()).fold(0.0, f64::max);
    Ok((c, spread))
}

/// `|∫ φ(z) conj(K(z, w)) dμ(z) − φ(w)|`.
pub fn reproduce_check(
    model: &KernelModel,
    phi: &dyn Holomorphic,
    w: &[Complex64],
    rule: &QuadratureRule,
) -> Result<f64> {
    let target = phi.eval(w)?;
    let mut acc = Complex64::new(0.0, 0.0);
    match (model, &rule.preimages) {
        (KernelModel::ClosedForm { domain: Domain::SymmetrizedPolydisc(_), normalization }, Some(pre)) => {
            let y = companion_roots(w).ok_or(LabError::RootFindingDiverged { residual: f64::NAN })?;
            for ((x, z), wt) in pre.iter().zip(&rule.nodes).zip(&rule.weights) {
                let k = symdisc_kernel_lifted(x, &y)? * *normalization;
                acc += phi.eval(z)? * k.conj() * *wt;
            }
        }
        _ => {
            for (z, wt) in rule.nodes.iter().zip(&rule.weights) {
                acc += phi.eval(z)? * model.eval(z, w)?.conj() * *wt;
            }
        }
    }
    Ok((acc - target).norm())
}

/// `kernel:disc`, `kernel:polydisc:<d>`, `kernel:symdisc:<d>`, `pullback:<map>`.
pub fn parse_kernel(name: &str) -> Result<KernelModel> {
    let unknown = || LabError::UnknownKernel(name.to_string());
    if let Some(map) = name.strip_prefix("pullback:") {
        return KernelModel::pulled_back(&parse_map(map)?);
    }
    let rest = name.strip_prefix("kernel:").ok_or_else(unknown)?;
    let dim = |t: &str| t.parse::<usize>().ok().filter(|d| *d >= 1).ok_or_else(unknown);
    let domain = match rest.split_once(':') {
        None if rest == "disc" => Domain::UnitDisc,
        Some(("polydisc", d)) => Domain::Polydisc(dim(d)?),
        Some(("symdisc", d)) => {
            let d = dim(d)?;
            if d == 1 {
                Domain::UnitDisc
            } else {
                Domain::SymmetrizedPolydisc(d)
            }
        }
        _ => return Err(unknown()),
    };
    KernelModel::closed_form(domain)
}

