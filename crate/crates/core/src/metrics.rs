//! Pattern cuts and the figures of merit computed from them.

use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Complex2Vec, FarField, SampledField};
use crate::geometry::PortId;
use crate::numerics::SphereGrid;
use crate::scalar::Real;

/// Power floor applied before dB conversion.
pub const POWER_FLOOR_DB: f64 = -60.0;

/// Cut plane. Elevation cuts use a signed angle α: θ = |α| on the half
/// plane φ = φ_plane for α ≥ 0 and φ = φ_plane + π for α < 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CutPlane {
    Xz,
    Yz,
    /// Conical cut at fixed colatitude (degrees), angle is φ.
    Horizontal { theta_deg: f64 },
}

impl CutPlane {
    /// Azimuth (rad) of the positive half of an elevation plane.
    pub fn plane_phi<T: Real>(&self) -> T {
        match self {
            CutPlane::Xz => T::zero(),
            CutPlane::Yz => T::FRAC_PI_2(),
            CutPlane::Horizontal { .. } => T::zero(),
        }
    }

    pub fn is_elevation(&self) -> bool {
        !matches!(self, CutPlane::Horizontal { .. })
    }

    /// Direction (θ, φ) in radians for a cut angle in degrees.
    pub fn direction<T: Real>(&self, angle_deg: T) -> (T, T) {
        match self {
            CutPlane::Horizontal { theta_deg } => (T::lit(*theta_deg).to_radians(), angle_deg.to_radians()),
            _ => {
                let a = angle_deg.to_radians();
                let base = self.plane_phi::<T>();
                if a >= T::zero() {
                    (a, base)
                } else {
                    (-a, base + T::PI())
                }
            }
        }
    }

    /// Full-circle angle grid for this plane at `step_deg`.
    pub fn angles<T: Real>(&self, step_deg: T) -> Vec<T> {
        let n = (T::lit(360.0) / step_deg).round().to_usize().unwrap_or(360).max(1);
        let start = if self.is_elevation() { T::lit(-180.0) } else { T::zero() };
        (0..n).map(|i| start + step_deg * T::from_count(i)).collect()
    }
}

impl fmt::Display for CutPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutPlane::Xz => f.write_str("xz"),
            CutPlane::Yz => f.write_str("yz"),
            CutPlane::Horizontal { theta_deg } => write!(f, "horizontal@{theta_deg}"),
        }
    }
}

/// Peak-normalised power versus angle along one cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCut<T> {
    pub plane: CutPlane,
    /// Degrees, strictly increasing, uniform step.
    pub angles: Vec<T>,
    /// dB relative to the largest sample, floored at [`POWER_FLOOR_DB`].
    pub power: Vec<T>,
    pub fields: Option<Vec<Complex2Vec<T>>>,
}

impl<T: Real> PatternCut<T> {
    /// Builds a cut from linear power samples.
    pub fn from_linear(plane: CutPlane, angles: Vec<T>, linear: &[T], fields: Option<Vec<Complex2Vec<T>>>) -> Result<Self> {
        if angles.len() != linear.len() || angles.len() < 3 {
            return Err(Error::Config("cut needs matching angle/power arrays of length >= 3".into()));
        }
        if angles.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("cut angles must be strictly increasing".into()));
        }
        let max = linear.iter().fold(T::zero(), |m, &p| m.max(p));
        if !(max > T::zero()) || !max.is_finite() {
            return Err(Error::Degenerate("cut has no radiated power".into()));
        }
        let floor = T::lit(POWER_FLOOR_DB);
        let power = linear.iter().map(|&p| (T::lit(10.0) * (p / max).log10()).max(floor)).collect();
        Ok(Self { plane, angles, power, fields })
    }

    /// Samples `field` along `plane` over a full circle at `step_deg`.
    pub fn sample<F: FarField<T> + ?Sized>(field: &F, plane: CutPlane, step_deg: T, keep_fields: bool) -> Result<Self> {
        let angles = plane.angles(step_deg);
        let values: Vec<Complex2Vec<T>> = angles
            .par_iter()
            .map(|&a| {
                let (th, ph) = plane.direction(a);
                field.field(th, ph)
            })
            .collect();
        let linear: Vec<T> = values.iter().map(Complex2Vec::power).collect();
        Self::from_linear(plane, angles, &linear, keep_fields.then_some(values))
    }

    pub fn step(&self) -> T {
        self.angles[1] - self.angles[0]
    }

    /// Covered span including the final step.
    pub fn span(&self) -> T {
        self.angles[self.angles.len() - 1] - self.angles[0] + self.step()
    }

    /// True when the samples close a full 360° circle.
    pub fn is_full_circle(&self) -> bool {
        (self.span() - T::lit(360.0)).abs() <= self.step() * T::lit(1e-6)
    }

    fn linear(&self, i: usize) -> T {
        T::lit(10.0).powf(self.power[i] / T::lit(10.0))
    }

    fn wrap_angle(&self, a: T) -> T {
        if !self.is_full_circle() {
            return a;
        }
        let start = self.angles[0];
        let full = T::lit(360.0);
        let mut x = (a - start) % full;
        if x < T::zero() {
            x = x + full;
        }
        // a tiny negative remainder rounds up to a full turn
        if x >= full {
            x = x - full;
        }
        start + x
    }

    /// Power in dB at an arbitrary angle by linear interpolation.
    pub fn power_at(&self, angle: T) -> T {
        let n = self.angles.len();
        let a = self.wrap_angle(angle);
        let pos = (a - self.angles[0]) / self.step();
        let i = pos.floor().to_isize().unwrap_or(0);
        let frac = pos - pos.floor();
        let idx = |k: isize| -> Option<usize> {
            if self.is_full_circle() {
                Some(k.rem_euclid(n as isize) as usize)
            } else if k >= 0 && (k as usize) < n {
                Some(k as usize)
            } else {
                None
            }
        };
        match (idx(i), idx(i + 1)) {
            (Some(i0), Some(i1)) => self.power[i0] * (T::one() - frac) + self.power[i1] * frac,
            (Some(i0), None) => self.power[i0],
            (None, Some(i1)) => self.power[i1],
            (None, None) => T::lit(POWER_FLOOR_DB),
        }
    }
}

fn peak_index<T: Real>(cut: &PatternCut<T>) -> Result<usize> {
    let first = cut.power[0];
    if cut.power.iter().all(|&p| p == first) {
        return Err(Error::Degenerate("all cut samples have equal power".into()));
    }
    let mut best = 0;
    for (i, &p) in cut.power.iter().enumerate() {
        if p > cut.power[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Angle of maximum power, refined by a parabola through the peak sample
/// and its neighbours. Ties go to the smaller angle.
pub fn peak_direction<T: Real>(cut: &PatternCut<T>) -> Result<T> {
    let i = peak_index(cut)?;
    let n = cut.angles.len();
    let neighbours = if cut.is_full_circle() {
        Some(((i + n - 1) % n, (i + 1) % n))
    } else if i > 0 && i + 1 < n {
        Some((i - 1, i + 1))
    } else {
        None
    };
    let mut angle = cut.angles[i];
    if let Some((l, r)) = neighbours {
        let (pl, pc, pr) = (cut.power[l], cut.power[i], cut.power[r]);
        let denom = pl - T::lit(2.0) * pc + pr;
        if denom < T::zero() {
            let offset = T::lit(0.5) * (pl - pr) / denom;
            angle = angle + offset.max(T::lit(-0.5)).min(T::lit(0.5)) * cut.step();
        }
    }
    Ok(cut.wrap_angle(angle))
}

/// Width between the half-power crossings bracketing the main peak, each
/// located by linear interpolation of linear power.
pub fn hpbw<T: Real>(cut: &PatternCut<T>) -> Result<T> {
    let i = peak_index(cut)?;
    let n = cut.angles.len();
    let circle = cut.is_full_circle();
    let half = T::lit(0.5) * cut.linear(i);
    let step = cut.step();
    let walk = |dir: isize| -> Result<T> {
        let mut prev = i;
        for k in 1..n {
            let idx = i as isize + dir * k as isize;
            let j = if circle {
                idx.rem_euclid(n as isize) as usize
            } else if idx < 0 || idx as usize >= n {
                break;
            } else {
                idx as usize
            };
            let pj = cut.linear(j);
            if pj < half {
                let pp = cut.linear(prev);
                let frac = (pp - half) / (pp - pj);
                return Ok(T::from_count(k - 1) * step + frac * step);
            }
            prev = j;
        }
        Err(Error::OpenBeam(if dir < 0 { "below" } else { "above" }))
    };
    let right = walk(1)?;
    let left = walk(-1)?;
    let width = left + right;
    if circle && width >= T::lit(360.0) {
        return Err(Error::OpenBeam("around"));
    }
    Ok(width)
}

/// Peak power minus the power 180° away, in dB.
pub fn front_to_back<T: Real>(cut: &PatternCut<T>) -> Result<T> {
    if !cut.is_full_circle() {
        return Err(Error::InsufficientSpan { span_deg: cut.span().to_f64_lossy() });
    }
    let i = peak_index(cut)?;
    let peak = cut.angles[i];
    Ok(cut.power[i] - cut.power_at(peak + T::lit(180.0)))
}

/// Largest radiation intensity over the grid nodes and both poles.
fn max_intensity<T: Real, F: FarField<T> + ?Sized>(field: &F, grid: &SphereGrid<T>, sampled: &[T]) -> T {
    let (mut m, mut best) = (T::zero(), 0);
    for (i, &p) in sampled.iter().enumerate() {
        if p > m {
            m = p;
            best = i;
        }
    }
    for k in 0..8 {
        let phi = T::TAU() * T::from_count(k) / T::lit(8.0);
        m = m.max(field.power(T::zero(), phi)).max(field.power(T::PI(), phi));
    }
    // Off-node maxima: coordinate ascent from the best node, one grid cell each way.
    let Some(node) = grid.nodes.get(best) else { return m };
    let (mut theta, mut phi) = (node.theta, node.phi);
    let dt = T::PI() / T::from_count(grid.n_theta);
    let dp = T::TAU() / T::from_count(grid.n_phi);
    for _ in 0..3 {
        theta = golden_max(|t| field.power(t, phi), (theta - dt).max(T::zero()), (theta + dt).min(T::PI()));
        phi = golden_max(|p| field.power(theta, p), phi - dp, phi + dp);
    }
    m.max(field.power(theta, phi))
}

/// Golden-section search for the maximiser of a unimodal `f` on `[lo, hi]`.
fn golden_max<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let r = T::lit(0.618_033_988_749_894_9);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    if fa >= fb { a } else { b }
}

/// Directivity `10 log10(4π max U / ∮U dΩ)` in dBi.
pub fn directivity<T: Real, F: FarField<T> + ?Sized>(field: &F, grid: &SphereGrid<T>) -> Result<T> {
    let sampled = SampledField::sample(field, grid);
    let u = sampled.powers();
    let total = grid.integrate_values(&u);
    if !(total > T::zero()) {
        return Err(Error::Degenerate("field radiates no power".into()));
    }
    let umax = max_intensity(field, grid, &u);
    Ok(T::lit(10.0) * (T::lit(4.0) * T::PI() * umax / total).log10())
}

/// Envelope correlation of two vector far fields over the full sphere.
pub fn ecc<T: Real, A: FarField<T> + ?Sized, B: FarField<T> + ?Sized>(
    field_i: &A,
    field_j: &B,
    grid: &SphereGrid<T>,
) -> Result<T> {
    let a = SampledField::sample(field_i, grid);
    let b = SampledField::sample(field_j, grid);
    ecc_sampled(&a, &b)
}

/// [`ecc`] on fields already tabulated on the same grid.
pub fn ecc_sampled<T: Real>(a: &SampledField<T>, b: &SampledField<T>) -> Result<T> {
    if a.values.len() != b.values.len() {
        return Err(Error::Config("fields sampled on different grids".into()));
    }
    let mut cross = Complex::new(T::zero(), T::zero());
    let mut pa = T::zero();
    let mut pb = T::zero();
    for ((node, ea), eb) in a.grid.nodes.iter().zip(&a.values).zip(&b.values) {
        cross = cross + ea.inner(eb) * node.weight;
        pa = pa + ea.power() * node.weight;
        pb = pb + eb.power() * node.weight;
    }
    if !(pa > T::zero()) || !(pb > T::zero()) {
        return Err(Error::Degenerate("zero-power field in correlation".into()));
    }
    Ok((cross.norm_sqr() / (pa * pb)).max(T::zero()).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccEntry<T> {
    pub a: PortId,
    pub b: PortId,
    pub value: T,
}

/// Pattern figures of merit for one synthesized beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<T> {
    pub peak_direction: T,
    /// `None` when the main beam never drops 3 dB inside the cut.
    pub hpbw: Option<T>,
    pub front_to_back: T,
    pub directivity: T,
    pub ecc_matrix: Vec<EccEntry<T>>,
}

impl<T: Real> MetricsReport<T> {
    /// Computes peak, beamwidth and front-to-back from `cut`, directivity of
    /// `field` over `grid`, and attaches a precomputed ECC table.
    pub fn evaluate<F: FarField<T> + ?Sized>(
        cut: &PatternCut<T>,
        field: &F,
        grid: &SphereGrid<T>,
        ecc_matrix: Vec<EccEntry<T>>,
    ) -> Result<Self> {
        Ok(Self {
            peak_direction: peak_direction(cut)?,
            hpbw: match hpbw(cut) {
                Ok(w) => Some(w),
                Err(Error::OpenBeam(_)) => None,
                Err(e) => return Err(e),
            },
            front_to_back: front_to_back(cut)?,
            directivity: directivity(field, grid)?,
            ecc_matrix,
        })
    }
}
