//! Simultaneous all-roots solver for univariate complex polynomials
//! (Aberth–Ehrlich iteration with a Newton polish).

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub const MAX_ITERATIONS: usize = 500;
/// Acceptable backward error `|p(z)| / Σ|c_k||z|^k` for every returned root.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Roots {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    /// Largest relative backward error over the roots.
    pub residual: f64,
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // value and derivative
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn backward_error(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = horner(coeffs, z);
    let r = z.norm();
    let mut scale = 0.0;
    let mut rk = 1.0;
    for c in coeffs {
        scale += c.norm() * rk;
        rk *= r;
    }
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All roots of `Σ c_k z^k` (ascending coefficients), with multiplicity.
pub fn all_roots(coeffs: &[Complex64]) -> Result<Roots> {
    let mut coeffs: Vec<Complex64> = coeffs.to_vec();
    while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Ok(Roots { roots: vec![], iterations: 0, residual: 0.0 });
    }
    // exact zero roots
    let zeros = coeffs.iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count();
    let reduced: Vec<Complex64> = coeffs[zeros..].to_vec();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let mut iterations = 0;
    let n = reduced.len() - 1;
    if n > 0 {
        let (found, its) = aberth(&reduced)?;
        iterations = its;
        roots.extend(found);
    }
    let residual = roots
        .iter()
        .map(|z| backward_error(&coeffs, *z))
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOLERANCE || !residual.is_finite() {
        return Err(LabError::RootFindingDiverged { residual });
    }
    Ok(Roots { roots, iterations, residual })
}

fn aberth(coeffs: &[Complex64]) -> Result<(Vec<Complex64>, usize)> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let deriv: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();

    // initial guesses on a circle whose radius is the geometric mean of the
    // root moduli, rotated off the real axis
    let radius = monic[0].norm().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            p = p * x + c;
        }
        let mut dp = Complex64::new(0.0, 0.0);
        for c in deriv.iter().rev() {
            dp = dp * x + c;
        }
        (p, dp)
    };

    let mut its = 0;
    for it in 0..MAX_ITERATIONS {
        its = it + 1;
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff != Complex64::new(0.0, 0.0) {
                        s += diff.inv();
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish
    for _ in 0..3 {
        for zi in z.iter_mut() {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.is_finite() {
                    *zi -= step;
                }
            }
        }
    }
    Ok((z, its))
}
