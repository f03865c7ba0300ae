//! Far-field values and the evaluator contract shared by all field models.

use std::ops::{Add, Mul};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::SphereGrid;
use crate::scalar::Real;

/// Complex (E_θ, E_φ) far-field pair, unnormalised.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex2Vec<T> {
    pub e_theta: Complex<T>,
    pub e_phi: Complex<T>,
}

impl<T: Real> Complex2Vec<T> {
    pub fn new(e_theta: Complex<T>, e_phi: Complex<T>) -> Self {
        Self { e_theta, e_phi }
    }

    pub fn zero() -> Self {
        Self { e_theta: Complex::new(T::zero(), T::zero()), e_phi: Complex::new(T::zero(), T::zero()) }
    }

    /// |E_θ|² + |E_φ|².
    #[inline]
    pub fn power(&self) -> T {
        self.e_theta.norm_sqr() + self.e_phi.norm_sqr()
    }

    /// Σ over both polarisations of `self · conj(other)`.
    #[inline]
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.e_theta * other.e_theta.conj() + self.e_phi * other.e_phi.conj()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { e_theta: self.e_theta * s, e_phi: self.e_phi * s }
    }

    pub fn is_finite(&self) -> bool {
        self.e_theta.re.is_finite()
            && self.e_theta.im.is_finite()
            && self.e_phi.re.is_finite()
            && self.e_phi.im.is_finite()
    }
}

impl<T: Real> Add for Complex2Vec<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { e_theta: self.e_theta + rhs.e_theta, e_phi: self.e_phi + rhs.e_phi }
    }
}

impl<T: Real> Mul<Complex<T>> for Complex2Vec<T> {
    type Output = Self;
    fn mul(self, w: Complex<T>) -> Self {
        Self { e_theta: self.e_theta * w, e_phi: self.e_phi * w }
    }
}

/// Anything that yields a far field at a direction (θ, φ) in radians.
pub trait FarField<T: Real>: Send + Sync {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T>;

    fn power(&self, theta: T, phi: T) -> T {
        self.field(theta, phi).power()
    }
}

impl<T: Real, F: FarField<T> + ?Sized> FarField<T> for &F {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        (**self).field(theta, phi)
    }
}

impl<T: Real, F: FarField<T> + ?Sized> FarField<T> for Box<F> {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        (**self).field(theta, phi)
    }
}

/// Adapts a closure into a [`FarField`].
pub struct FnField<F>(pub F);

impl<T: Real, F> FarField<T> for FnField<F>
where
    F: Fn(T, T) -> Complex2Vec<T> + Send + Sync,
{
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        (self.0)(theta, phi)
    }
}

/// A far field tabulated on a sphere grid (node order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField<T> {
    pub grid: SphereGrid<T>,
    pub values: Vec<Complex2Vec<T>>,
}

impl<T: Real> SampledField<T> {
    /// Evaluates `field` at every node. Runs in parallel; the result does not
    /// depend on scheduling because each node is computed independently.
    pub fn sample<F: FarField<T> + ?Sized>(field: &F, grid: &SphereGrid<T>) -> Self {
        let values = grid.nodes.par_iter().map(|n| field.field(n.theta, n.phi)).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn powers(&self) -> Vec<T> {
        self.values.iter().map(Complex2Vec::power).collect()
    }

    /// ∮ (|E_θ|² + |E_φ|²) dΩ.
    pub fn total_power(&self) -> T {
        self.grid.integrate_values(&self.powers())
    }
}
