//! Far fields of bent antennas from a discretised equivalent magnetic
//! current ring.
//!
//! Each sample is a short magnetic current element tangent to the mode's
//! ring. Bending moves the element with [`bend_map`] and rotates its
//! tangent and local normal with the bend frame. An element radiates
//! `j m (r̂ × t̂) e^{jk r̂·r}`, attenuated by the back-lobe factor measured
//! from its own local normal. Where an element's arc straddles a corner of
//! the back-lobe taper, the factor is averaged over normals along that arc
//! so the ring sum keeps converging quickly. With the moments `m = g (2/N) cos(nφ')` the
//! flat ring sums to the closed-form modal field of [`crate::modes`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Complex2Vec, FarField};
use crate::geometry::{bend_map, AntennaLayout, BendSpec, Frame, Vec3};
use crate::modes::{back_lobe_factor, ModeSpec, Orientation, BACK_LOBE_FACTOR, BACK_LOBE_TAPER_DEG};
use crate::scalar::{wavenumber, Real};

/// Default number of ring samples per mode.
pub const DEFAULT_APERTURE_SAMPLES: usize = 256;

/// One element of a discretised aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureSample<T> {
    /// mm
    pub position: Vec3<T>,
    /// Complex magnetic moment along `tangent`.
    pub moment: Complex<T>,
    pub tangent: Vec3<T>,
    pub normal: Vec3<T>,
}

/// Sub-arc normals per element used to average the back-lobe factor.
pub const NORMAL_SUBSAMPLES: usize = 8;

/// An aperture sample carried onto the bent board.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BentElement<T> {
    pub position: Vec3<T>,
    pub moment: Complex<T>,
    pub tangent: Vec3<T>,
    pub normal: Vec3<T>,
    /// Normals at the midpoints of equal sub-arcs of this element's arc.
    pub sub_normals: Vec<Vec3<T>>,
    /// Sine of the largest angle between `normal` and any sub-normal.
    pub spread: T,
}

impl<T: Real> BentElement<T> {
    fn back_lobe(&self, r_hat: &Vec3<T>) -> T {
        let c = r_hat.dot(&self.normal);
        let taper_edge = -(T::lit(BACK_LOBE_TAPER_DEG).to_radians() + self.spread.asin()).sin();
        if c >= self.spread {
            T::one()
        } else if c <= taper_edge {
            T::lit(BACK_LOBE_FACTOR)
        } else {
            let sum: T = self.sub_normals.iter().map(|n| back_lobe_factor(r_hat.dot(n))).sum();
            sum / T::from_count(self.sub_normals.len())
        }
    }
}

/// Ring samples representing one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApertureSampleSet<T> {
    pub samples: Vec<ApertureSample<T>>,
    pub mode: ModeSpec<T>,
    pub sample_count: usize,
}

/// Smallest accepted sample count for a mode of azimuthal order `n`.
pub fn min_samples(order: i32) -> usize {
    16 * (order.unsigned_abs() as usize + 1)
}

/// Samples the mode's equivalent current ring at `n_samples` equally spaced
/// angles starting at φ' = 0.
pub fn sample_aperture<T: Real>(
    _layout: &AntennaLayout<T>,
    mode: &ModeSpec<T>,
    n_samples: usize,
) -> Result<ApertureSampleSet<T>> {
    mode.validate()?;
    if n_samples < min_samples(mode.order) {
        return Err(Error::Config(format!(
            "{n_samples} aperture samples undersample an order-{} mode (need {})",
            mode.order,
            min_samples(mode.order)
        )));
    }
    let n = T::from_i32(mode.order).unwrap();
    let a = mode.effective_radius;
    let step = T::TAU() / T::from_count(n_samples);
    let scale = mode.gain_scale * T::lit(2.0) / T::from_count(n_samples);
    let samples = (0..n_samples)
        .map(|i| {
            let phi = step * T::from_count(i);
            let (s, c) = phi.sin_cos();
            let weight = match mode.orientation {
                Orientation::Cos => (n * phi).cos(),
                Orientation::Sin => (n * phi).sin(),
            };
            ApertureSample {
                position: Vec3::new(a * c, a * s, T::zero()),
                moment: Complex::new(scale * weight, T::zero()),
                tangent: Vec3::new(-s, c, T::zero()),
                normal: Vec3::new(T::zero(), T::zero(), T::one()),
            }
        })
        .collect();
    Ok(ApertureSampleSet { samples, mode: *mode, sample_count: n_samples })
}

impl<T: Real> ApertureSampleSet<T> {
    /// Rigid rotation of every sample about ẑ by `angle`.
    pub fn rotated_about_z(&self, angle: T) -> Self {
        let r = Frame::about_z(angle);
        let samples = self
            .samples
            .iter()
            .map(|s| ApertureSample {
                position: r.apply(&s.position),
                moment: s.moment,
                tangent: r.apply(&s.tangent),
                normal: r.apply(&s.normal),
            })
            .collect();
        Self { samples, mode: self.mode, sample_count: self.sample_count }
    }
}

/// Radiating element set placed on the (possibly bent) board.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalField<T> {
    pub elements: Vec<BentElement<T>>,
    pub frequency: T,
    wavenumber: T,
}

/// Applies `bend` to every sample and returns the resulting far-field
/// evaluator at frequency `f` (GHz).
pub fn conformal_farfield<T: Real>(
    set: &ApertureSampleSet<T>,
    bend: &BendSpec<T>,
    f: T,
) -> Result<ConformalField<T>> {
    bend.validate()?;
    if !(f > T::zero()) {
        return Err(Error::Config(format!("frequency must be positive, got {f}")));
    }
    let arc = T::TAU() / T::from_count(set.sample_count.max(1));
    let k = NORMAL_SUBSAMPLES;
    let elements = set
        .samples
        .iter()
        .map(|s| {
            let (position, frame) = bend_map(s.position, bend)?;
            let normal = frame.apply(&s.normal);
            let radius = s.position.x.hypot(s.position.y);
            let phi = s.position.y.atan2(s.position.x);
            let sub_normals = (0..k)
                .map(|i| {
                    let t = (T::from_count(i) + T::lit(0.5)) / T::from_count(k) - T::lit(0.5);
                    let (ps, pc) = (phi + arc * t).sin_cos();
                    let p = Vec3::new(radius * pc, radius * ps, s.position.z);
                    Ok(bend_map(p, bend)?.1.apply(&s.normal))
                })
                .collect::<Result<Vec<_>>>()?;
            let spread = sub_normals
                .iter()
                .map(|n| {
                    let d = n.sub(&normal);
                    // chord length 2 sin(angle/2) to sine of the angle
                    let half = (d.norm() * T::lit(0.5)).min(T::one()).asin();
                    (half * T::lit(2.0)).sin()
                })
                .fold(T::zero(), |m, v| m.max(v));
            Ok(BentElement {
                position,
                moment: s.moment,
                tangent: frame.apply(&s.tangent),
                normal,
                sub_normals,
                spread,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConformalField { elements, frequency: f, wavenumber: wavenumber(f) })
}

impl<T: Real> FarField<T> for ConformalField<T> {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let r_hat = Vec3::new(st * cp, st * sp, ct);
        let theta_hat = Vec3::new(ct * cp, ct * sp, -st);
        let phi_hat = Vec3::new(-sp, cp, T::zero());
        let mut acc = Complex2Vec::zero();
        for e in &self.elements {
            let phase = self.wavenumber * r_hat.dot(&e.position);
            let (s, c) = phase.sin_cos();
            let w = e.moment * Complex::new(c, s) * e.back_lobe(&r_hat);
            // j (r̂ × t̂) = j [(t̂·θ̂) φ̂ − (t̂·φ̂) θ̂]
            let jw = Complex::new(-w.im, w.re);
            acc.e_theta = acc.e_theta - jw * e.tangent.dot(&phi_hat);
            acc.e_phi = acc.e_phi + jw * e.tangent.dot(&theta_hat);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_antenna1, build_antenna2, PortId};

    #[test]
    fn monopole_ring_has_uniform_moments() {
        let a2 = build_antenna2::<f64>();
        let set = sample_aperture(&a2, a2.mode(PortId::F1).unwrap(), 64).unwrap();
        let m0 = set.samples[0].moment;
        assert!(set.samples.iter().all(|s| (s.moment - m0).norm() < 1e-15));
    }

    #[test]
    fn tm21_cos_moment_vanishes_at_45_degrees() {
        let a1 = build_antenna1::<f64>();
        let set = sample_aperture(&a1, a1.mode(PortId::F3).unwrap(), 64).unwrap();
        // sample 8 of 64 sits at 45°
        assert!(set.samples[8].moment.norm() < 1e-15);
        assert!(set.samples[0].moment.re > 0.0);
    }

    #[test]
    fn undersampling_rejected() {
        let a1 = build_antenna1::<f64>();
        let m = a1.mode(PortId::F3).unwrap();
        assert!(matches!(sample_aperture(&a1, m, 47), Err(Error::Config(_))));
        assert!(sample_aperture(&a1, m, 48).is_ok());
    }

    #[test]
    fn flat_samples_lie_in_plane() {
        let a1 = build_antenna1::<f64>();
        for m in &a1.modes {
            let set = sample_aperture(&a1, m, 64).unwrap();
            assert!(set.samples.iter().all(|s| s.position.z == 0.0));
        }
    }
}
