//! Cavity-model modal far fields and resonance estimates.
//!
//! Each mode is the field of an equivalent magnetic current ring of radius
//! `a` carrying `cos(nφ')` (or `sin(nφ')`) along the ring tangent. With
//! `u = k a sin θ` and the convention `J_{-1} = -J_1`, the cos-oriented field is
//!
//! ```text
//! E_θ = g jⁿ [J_{n+1}(u) − J_{n−1}(u)] cos nφ
//! E_φ = g jⁿ [J_{n+1}(u) + J_{n−1}(u)] cos θ sin nφ
//! ```
//!
//! and the sin orientation replaces `cos nφ → sin nφ`, `sin nφ → −cos nφ`.
//! Directions below the ground plane are attenuated by [`back_lobe_factor`].

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Complex2Vec, FarField, SampledField};
use crate::geometry::{AntennaKind, AntennaLayout, BendSpec, PortId, Radiator};
use crate::numerics::{
    bessel_deriv, bessel_j_signed, first_root_in, make_sphere_grid, BesselKind, DEFAULT_PHI_NODES,
    DEFAULT_THETA_NODES,
};
use crate::scalar::{wavenumber, Real, SPEED_OF_LIGHT_MM_GHZ};

/// Field amplitude factor applied well below the ground plane (−14 dB).
pub const BACK_LOBE_FACTOR: f64 = 0.2;
/// Width in degrees of the linear taper from 1 to [`BACK_LOBE_FACTOR`]
/// starting at the horizon.
pub const BACK_LOBE_TAPER_DEG: f64 = 5.0;

/// First zero of J1', the TM11 eigenvalue of a circular cavity.
pub const TM11_EIGENVALUE: f64 = 1.841_183_781_340_659_3;
/// First non-trivial zero of J0' (= first zero of J1), the TM01 eigenvalue.
pub const TM01_EIGENVALUE: f64 = 3.831_705_970_207_512_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFamily {
    PatchTm11,
    RingTm21,
    PatchTm01Monopole,
}

impl ModeFamily {
    pub fn order(self) -> i32 {
        match self {
            ModeFamily::PatchTm11 => 1,
            ModeFamily::RingTm21 => 2,
            ModeFamily::PatchTm01Monopole => 0,
        }
    }

    pub fn radiator(self) -> Radiator {
        match self {
            ModeFamily::RingTm21 => Radiator::Ring,
            _ => Radiator::Patch,
        }
    }

    /// Broadside modes peak at zenith; the others are conical.
    pub fn is_broadside(self) -> bool {
        self == ModeFamily::PatchTm11
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Cos,
    Sin,
}

/// One radiating mode attached to a feed port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec<T> {
    pub port: PortId,
    pub family: ModeFamily,
    pub order: i32,
    pub orientation: Orientation,
    /// Radius of the equivalent magnetic current ring, mm.
    pub effective_radius: T,
    pub gain_scale: T,
}

impl<T: Real> ModeSpec<T> {
    pub fn new(port: PortId, family: ModeFamily, orientation: Orientation, effective_radius: T) -> Self {
        Self { port, family, order: family.order(), orientation, effective_radius, gain_scale: T::one() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != self.family.order() {
            return Err(Error::Config(format!(
                "mode on {} has order {} but family {:?} needs {}",
                self.port,
                self.order,
                self.family,
                self.family.order()
            )));
        }
        if self.order == 0 && self.orientation == Orientation::Sin {
            return Err(Error::Config("an n=0 mode has no sin orientation".into()));
        }
        if !(self.effective_radius > T::zero()) || !(self.gain_scale > T::zero()) {
            return Err(Error::Config("effective radius and gain scale must be positive".into()));
        }
        Ok(())
    }

    /// Azimuthal weights `(A(φ), B(φ))` multiplying the E_θ and E_φ terms.
    #[inline]
    pub fn azimuthal(&self, phi: T) -> (T, T) {
        let (s, c) = (T::from_i32(self.order).unwrap() * phi).sin_cos();
        match self.orientation {
            Orientation::Cos => (c, s),
            Orientation::Sin => (s, -c),
        }
    }
}

/// How the per-mode `gain_scale` is chosen for preset layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Every mode has the same equivalent ring current amplitude (`g = 1`).
    #[default]
    UnitAperture,
    /// Every mode radiates 4π (unit average intensity) at the design frequency.
    EqualPower,
}

/// Amplitude factor for a direction whose angle from the local surface
/// normal has cosine `cos_local`: 1 in the front half-space, a linear taper
/// over the first [`BACK_LOBE_TAPER_DEG`] past the horizon, then
/// [`BACK_LOBE_FACTOR`].
#[inline]
pub fn back_lobe_factor<T: Real>(cos_local: T) -> T {
    if cos_local >= T::zero() {
        return T::one();
    }
    let past = (-cos_local).min(T::one()).asin().to_degrees();
    let taper = T::lit(BACK_LOBE_TAPER_DEG);
    let floor = T::lit(BACK_LOBE_FACTOR);
    if past >= taper {
        floor
    } else {
        T::one() - (T::one() - floor) * past / taper
    }
}

/// Ring-current Bessel combinations `(J_{n+1}(u) − J_{n−1}(u), J_{n+1}(u) + J_{n−1}(u))`.
#[inline]
fn bessel_pair<T: Real>(n: i32, u: T) -> (T, T) {
    let jp = bessel_j_signed(n + 1, u);
    let jm = bessel_j_signed(n - 1, u);
    (jp - jm, jp + jm)
}

/// `jⁿ` for small non-negative `n`.
#[inline]
pub(crate) fn j_pow<T: Real>(n: i32) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match n.rem_euclid(4) {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// Closed-form modal far field of `mode` at frequency `f` (GHz), direction
/// (θ, φ) in radians, θ ∈ [0, π].
pub fn eval_mode_farfield<T: Real>(mode: &ModeSpec<T>, f: T, theta: T, phi: T) -> Complex2Vec<T> {
    let (st, ct) = theta.sin_cos();
    let u = wavenumber(f) * mode.effective_radius * st.abs();
    let (diff, sum) = bessel_pair(mode.order, u);
    let (a, b) = mode.azimuthal(phi);
    let jn = j_pow::<T>(mode.order) * (mode.gain_scale * back_lobe_factor(ct));
    Complex2Vec::new(jn * (diff * a), jn * (sum * ct * b))
}

/// A single mode's closed-form field at a fixed frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalField<T> {
    pub mode: ModeSpec<T>,
    pub frequency: T,
}

impl<T: Real> FarField<T> for ModalField<T> {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        eval_mode_farfield(&self.mode, self.frequency, theta, phi)
    }
}

/// Unwrapped phase (rad) versus φ of the dominant polarisation of the
/// weighted mode combination `Σ w_i · mode_i` at colatitude `theta`.
pub fn mode_phase_profile<T: Real>(
    components: &[(ModeSpec<T>, Complex<T>)],
    f: T,
    theta: T,
    phis: &[T],
) -> Vec<T> {
    let fields: Vec<Complex2Vec<T>> = phis
        .iter()
        .map(|&phi| {
            components
                .iter()
                .fold(Complex2Vec::zero(), |acc, (m, w)| acc + eval_mode_farfield(m, f, theta, phi) * *w)
        })
        .collect();
    let p_theta: T = fields.iter().map(|e| e.e_theta.norm_sqr()).sum();
    let p_phi: T = fields.iter().map(|e| e.e_phi.norm_sqr()).sum();
    let raw: Vec<T> =
        fields.iter().map(|e| if p_theta >= p_phi { e.e_theta.arg() } else { e.e_phi.arg() }).collect();
    unwrap_phase(&raw)
}

/// Removes 2π jumps between consecutive samples.
pub fn unwrap_phase<T: Real>(raw: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = T::zero();
    for (i, &p) in raw.iter().enumerate() {
        if i > 0 {
            let d = p - raw[i - 1];
            if d > T::PI() {
                offset = offset - T::TAU();
            } else if d < -T::PI() {
                offset = offset + T::TAU();
            }
        }
        out.push(p + offset);
    }
    out
}

/// Modes for a preset layout, with gain scales set by `normalization`.
pub fn default_modes<T: Real>(layout: &AntennaLayout<T>, normalization: Normalization) -> Vec<ModeSpec<T>> {
    use ModeFamily::*;
    use Orientation::*;
    let patch = layout.patch_radius();
    let ring = layout.ring_outer_radius();
    let mut modes = match layout.name {
        AntennaKind::Antenna1 => vec![
            ModeSpec::new(PortId::F1, PatchTm11, Cos, patch),
            ModeSpec::new(PortId::F2, PatchTm11, Sin, patch),
            ModeSpec::new(PortId::F3, RingTm21, Cos, ring),
            ModeSpec::new(PortId::F4, RingTm21, Sin, ring),
        ],
        AntennaKind::Antenna2 => vec![
            ModeSpec::new(PortId::F1, PatchTm01Monopole, Cos, patch),
            ModeSpec::new(PortId::F2, RingTm21, Cos, ring),
            ModeSpec::new(PortId::F3, RingTm21, Sin, ring),
        ],
    };
    if normalization == Normalization::EqualPower {
        for m in modes.iter_mut() {
            m.gain_scale = equal_power_gain(m, layout.design_frequency);
        }
    }
    modes
}

/// Gain scale giving `mode` a total radiated power of 4π at `f`.
pub fn equal_power_gain<T: Real>(mode: &ModeSpec<T>, f: T) -> T {
    let grid = make_sphere_grid::<T>(DEFAULT_THETA_NODES, DEFAULT_PHI_NODES).expect("default grid");
    let unit = ModeSpec { gain_scale: T::one(), ..*mode };
    let power = SampledField::sample(&ModalField { mode: unit, frequency: f }, &grid).total_power();
    (T::lit(4.0) * T::PI() / power).sqrt()
}

/// Per-radiator calibration factors multiplying the cavity resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotLoading<T> {
    pub patch: T,
    pub ring: T,
}

/// Substrate and calibration parameters of the resonance model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceModel<T> {
    pub eps_r: T,
    pub loss_tangent: T,
    pub slot_loading: SlotLoading<T>,
    /// Curvature coefficient κ_f of the bent-frequency law.
    pub bend_coefficient: T,
}

/// Default relative permittivity of the PDMS substrate.
pub const DEFAULT_EPS_R: f64 = 2.72;
pub const DEFAULT_LOSS_TANGENT: f64 = 0.02;

/// Flat and bent centre frequency (GHz) and bend radius (mm) the curvature
/// coefficient is calibrated against, for the 34 mm elevation antenna.
pub const BEND_ANCHOR_FLAT_GHZ: f64 = 5.7;
pub const BEND_ANCHOR_BENT_GHZ: f64 = 5.45;
pub const BEND_ANCHOR_RADIUS_MM: f64 = 10.0;
pub const BEND_ANCHOR_BOARD_MM: f64 = 34.0;

impl<T: Real> Default for ResonanceModel<T> {
    fn default() -> Self {
        Self {
            eps_r: T::lit(DEFAULT_EPS_R),
            loss_tangent: T::lit(DEFAULT_LOSS_TANGENT),
            slot_loading: SlotLoading { patch: T::one(), ring: T::one() },
            bend_coefficient: calibrate_bend_coefficient(
                T::lit(BEND_ANCHOR_FLAT_GHZ),
                T::lit(BEND_ANCHOR_BENT_GHZ),
                T::lit(BEND_ANCHOR_BOARD_MM),
                T::lit(BEND_ANCHOR_RADIUS_MM),
            ),
        }
    }
}

impl<T: Real> ResonanceModel<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_r >= T::one()) {
            return Err(Error::Config(format!("eps_r must be >= 1, got {}", self.eps_r)));
        }
        if !(self.loss_tangent >= T::zero()) {
            return Err(Error::Config("loss tangent must be non-negative".into()));
        }
        if !(self.slot_loading.patch > T::zero()) || !(self.slot_loading.ring > T::zero()) {
            return Err(Error::Config("slot loading factors must be positive".into()));
        }
        if !(self.bend_coefficient >= T::zero()) {
            return Err(Error::Config("bend coefficient must be non-negative".into()));
        }
        Ok(())
    }

    pub fn loading_for(&self, radiator: Radiator) -> T {
        match radiator {
            Radiator::Patch => self.slot_loading.patch,
            Radiator::Ring => self.slot_loading.ring,
        }
    }

    /// Copy of `self` whose slot loading puts every radiator of `layout` at
    /// the layout's design frequency.
    pub fn calibrated(&self, layout: &AntennaLayout<T>) -> Result<Self> {
        let mut out = *self;
        out.slot_loading = SlotLoading { patch: T::one(), ring: T::one() };
        let mut patch = None;
        let mut ring = None;
        for m in &layout.modes {
            let raw = resonant_frequency(layout, m, &out)?;
            let factor = layout.design_frequency / raw;
            match m.family.radiator() {
                Radiator::Patch => patch = Some(factor),
                Radiator::Ring => ring = Some(factor),
            }
        }
        out.slot_loading = SlotLoading { patch: patch.unwrap_or(T::one()), ring: ring.unwrap_or(T::one()) };
        Ok(out)
    }
}

/// κ_f such that `f_flat (1 − κ_f (L/2R)²) = f_bent`.
pub fn calibrate_bend_coefficient<T: Real>(f_flat: T, f_bent: T, board_side: T, radius: T) -> T {
    let x = board_side / (T::lit(2.0) * radius);
    (T::one() - f_bent / f_flat) / (x * x)
}

/// Magnetic-wall characteristic function of the annular ring for order `n`
/// at wavenumber `k` (rad/mm), inner radius `a`, outer radius `b`.
pub fn ring_characteristic<T: Real>(n: i32, k: T, a: T, b: T) -> T {
    let jd = |x: T| bessel_deriv(BesselKind::J, n, x).unwrap_or(T::nan());
    let yd = |x: T| bessel_deriv(BesselKind::Y, n, x).unwrap_or(T::nan());
    jd(k * a) * yd(k * b) - jd(k * b) * yd(k * a)
}

/// Lower and upper end (rad/mm) of the wavenumber search for ring resonances.
pub const RING_K_BRACKET: (f64, f64) = (0.1, 1.0);

/// Cavity-model resonance (GHz) of `mode` on `layout`.
pub fn resonant_frequency<T: Real>(
    layout: &AntennaLayout<T>,
    mode: &ModeSpec<T>,
    model: &ResonanceModel<T>,
) -> Result<T> {
    model.validate()?;
    let c = T::lit(SPEED_OF_LIGHT_MM_GHZ);
    let sqrt_eps = model.eps_r.sqrt();
    let loading = model.loading_for(mode.family.radiator());
    let f = match mode.family {
        ModeFamily::PatchTm11 | ModeFamily::PatchTm01Monopole => {
            let chi = if mode.family == ModeFamily::PatchTm11 { TM11_EIGENVALUE } else { TM01_EIGENVALUE };
            T::lit(chi) * c / (T::TAU() * layout.patch_radius() * sqrt_eps)
        }
        ModeFamily::RingTm21 => {
            let a = layout.ring_inner_radius();
            let b = layout.ring_outer_radius();
            let k = ring_wavenumber(mode.order, a, b)?;
            k * c / (T::TAU() * sqrt_eps)
        }
    };
    Ok(f * loading)
}

/// First root of the ring characteristic equation inside [`RING_K_BRACKET`].
pub fn ring_wavenumber<T: Real>(n: i32, a: T, b: T) -> Result<T> {
    let (lo, hi) = (T::lit(RING_K_BRACKET.0), T::lit(RING_K_BRACKET.1));
    first_root_in(|k| ring_characteristic(n, k, a, b), lo, hi, 900, T::epsilon() * T::lit(16.0))
        .map_err(|e| Error::Resonance(format!("ring TM{n}1 root not found: {e}")))
}

/// Bent centre frequency `f_flat (1 − κ_f (L/2R)²)`, `L` = board side.
pub fn bent_frequency<T: Real>(
    f_flat: T,
    layout: &AntennaLayout<T>,
    bend: &BendSpec<T>,
    model: &ResonanceModel<T>,
) -> Result<T> {
    bend.validate()?;
    if !(f_flat > T::zero()) {
        return Err(Error::Config(format!("flat frequency must be positive, got {f_flat}")));
    }
    if bend.flat {
        return Ok(f_flat);
    }
    let x = layout.board_side / (T::lit(2.0) * bend.radius);
    Ok(f_flat * (T::one() - model.bend_coefficient * x * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_antenna1, build_antenna2};

    #[test]
    fn back_lobe_taper() {
        assert_eq!(back_lobe_factor(1.0_f64), 1.0);
        assert_eq!(back_lobe_factor(0.0_f64), 1.0);
        assert!((back_lobe_factor((92.5_f64).to_radians().cos()) - 0.6).abs() < 1e-12);
        assert!((back_lobe_factor(-1.0_f64) - 0.2).abs() < 1e-15);
        assert!((back_lobe_factor((120.0_f64).to_radians().cos()) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn mode_spec_validation() {
        let mut m = ModeSpec::new(PortId::F1, ModeFamily::PatchTm01Monopole, Orientation::Sin, 8.0_f64);
        assert!(m.validate().is_err());
        m.orientation = Orientation::Cos;
        assert!(m.validate().is_ok());
        m.order = 2;
        assert!(m.validate().is_err());
    }

    #[test]
    fn preset_mode_assignments() {
        let a1 = build_antenna1::<f64>();
        let fam: Vec<_> = a1.modes.iter().map(|m| (m.port, m.family, m.orientation)).collect();
        assert_eq!(
            fam,
            vec![
                (PortId::F1, ModeFamily::PatchTm11, Orientation::Cos),
                (PortId::F2, ModeFamily::PatchTm11, Orientation::Sin),
                (PortId::F3, ModeFamily::RingTm21, Orientation::Cos),
                (PortId::F4, ModeFamily::RingTm21, Orientation::Sin),
            ]
        );
        let a2 = build_antenna2::<f64>();
        assert_eq!(a2.modes[0].family, ModeFamily::PatchTm01Monopole);
        assert_eq!(a2.modes[1].orientation, Orientation::Cos);
        assert_eq!(a2.modes[2].orientation, Orientation::Sin);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw = [3.0, -3.0, -2.5];
        let u = unwrap_phase(&raw);
        assert!((u[1] - (-3.0 + std::f64::consts::TAU)).abs() < 1e-15);
        assert!(u[2] > u[1]);
    }
}
