//! Exact (up to rounding) multivariate polynomial and rational-function
//! arithmetic over complex coefficients.

mod multi_index;
mod polynomial;
mod rational;
pub mod symmetric;

pub use multi_index::MultiIndex;
pub use polynomial::{Polynomial, PRUNE_RELATIVE};
pub use rational::{compose, jacobian_det, poly_det, RationalFunction, POLE_TOLERANCE};

use num_complex::Complex64;

use crate::error::Result;

/// Anything that can be evaluated at a point of `C^d`.
pub trait Holomorphic: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, z: &[Complex64]) -> Result<Complex64>;
}

impl Holomorphic for Polynomial {
    fn dim(&self) -> usize {
        Polynomial::dim(self)
    }
    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        Polynomial::eval(self, z)
    }
}

impl Holomorphic for RationalFunction {
    fn dim(&self) -> usize {
        RationalFunction::dim(self)
    }
    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        RationalFunction::eval(self, z)
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        (**self).eval(z)
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        (**self).eval(z)
    }
}

/// Black-box function of `dim` variables backed by a closure.
pub struct FnHolomorphic<F> {
    dim: usize,
    f: F,
}

impl<F> FnHolomorphic<F>
where
    F: Fn(&[Complex64]) -> Result<Complex64> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnHolomorphic { dim, f }
    }
}

impl<F> Holomorphic for FnHolomorphic<F>
where
    F: Fn(&[Complex64]) -> Result<Complex64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        (self.f)(z)
    }
}

/// `z1^a1 ⋯` as a shorthand for tests and catalog construction.
pub fn monomial(alpha: &[u32]) -> Polynomial {
    Polynomial::monomial(MultiIndex(alpha.to_vec()), Complex64::new(1.0, 0.0))
}

#[cfg(test)]
mod tests;
