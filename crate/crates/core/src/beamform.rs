//! Port-weighted superposition of modal fields and the steering solvers.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::conformal::{conformal_farfield, sample_aperture, ConformalField, DEFAULT_APERTURE_SAMPLES};
use crate::error::{Error, Result};
use crate::field::{Complex2Vec, FarField};
use crate::geometry::{AntennaLayout, BendSpec, PortId};
use crate::metrics::{peak_direction, CutPlane, PatternCut};
use crate::modes::{ModalField, ModeFamily, Orientation};
use crate::scalar::Real;

/// Complex weight per port; ports absent from the map carry exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationVector<T> {
    pub weights: BTreeMap<PortId, Complex<T>>,
}

impl<T: Real> ExcitationVector<T> {
    pub fn new() -> Self {
        Self { weights: BTreeMap::new() }
    }

    pub fn single(port: PortId) -> Self {
        Self::new().with(port, Complex::new(T::one(), T::zero()))
    }

    pub fn with(mut self, port: PortId, w: Complex<T>) -> Self {
        self.weights.insert(port, w);
        self
    }

    /// Weight with amplitude `amp` and phase `phase_rad`.
    pub fn with_polar(self, port: PortId, amp: T, phase_rad: T) -> Self {
        self.with(port, Complex::from_polar(amp, phase_rad))
    }

    pub fn weight(&self, port: PortId) -> Complex<T> {
        self.weights.get(&port).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self { weights: self.weights.iter().map(|(p, w)| (*p, *w * factor)).collect() }
    }

    pub fn validate(&self, layout: &AntennaLayout<T>) -> Result<()> {
        for p in self.weights.keys() {
            if layout.mode(*p).is_none() {
                return Err(Error::UnknownPort(format!("{p} on {}", layout.name)));
            }
        }
        if !self.weights.values().any(|w| w.norm_sqr() > T::zero()) {
            return Err(Error::Config("excitation has no nonzero weight".into()));
        }
        Ok(())
    }
}

impl<T: Real> Default for ExcitationVector<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Field model behind one port: closed form when flat, conformal when bent.
#[derive(Debug, Clone, PartialEq)]
pub enum PortField<T> {
    Closed(ModalField<T>),
    Conformal(ConformalField<T>),
}

impl<T: Real> FarField<T> for PortField<T> {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        match self {
            PortField::Closed(m) => m.field(theta, phi),
            PortField::Conformal(c) => c.field(theta, phi),
        }
    }
}

/// Options shared by synthesis and the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    /// Ring samples per mode for bent evaluations.
    pub aperture_samples: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { aperture_samples: DEFAULT_APERTURE_SAMPLES }
    }
}

/// Field of one port with unit weight.
pub fn port_field<T: Real>(
    layout: &AntennaLayout<T>,
    port: PortId,
    f: T,
    bend: &BendSpec<T>,
    opts: &SynthesisOptions,
) -> Result<PortField<T>> {
    let mode = layout.mode(port).ok_or_else(|| Error::UnknownPort(format!("{port} on {}", layout.name)))?;
    bend.validate()?;
    if bend.flat {
        Ok(PortField::Closed(ModalField { mode: *mode, frequency: f }))
    } else {
        let set = sample_aperture(layout, mode, opts.aperture_samples)?;
        Ok(PortField::Conformal(conformal_farfield(&set, bend, f)?))
    }
}

/// `Σ_p w_p E_p(θ, φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedField<T> {
    pub terms: Vec<(PortId, Complex<T>, PortField<T>)>,
    pub frequency: T,
}

impl<T: Real> FarField<T> for SynthesizedField<T> {
    fn field(&self, theta: T, phi: T) -> Complex2Vec<T> {
        self.terms.iter().fold(Complex2Vec::zero(), |acc, (_, w, f)| acc + f.field(theta, phi) * *w)
    }
}

pub fn synthesize<T: Real>(
    layout: &AntennaLayout<T>,
    exc: &ExcitationVector<T>,
    f: T,
    bend: &BendSpec<T>,
) -> Result<SynthesizedField<T>> {
    synthesize_with(layout, exc, f, bend, &SynthesisOptions::default())
}

pub fn synthesize_with<T: Real>(
    layout: &AntennaLayout<T>,
    exc: &ExcitationVector<T>,
    f: T,
    bend: &BendSpec<T>,
    opts: &SynthesisOptions,
) -> Result<SynthesizedField<T>> {
    exc.validate(layout)?;
    let terms = exc
        .weights
        .iter()
        .filter(|(_, w)| w.norm_sqr() > T::zero())
        .map(|(p, w)| Ok((*p, *w, port_field(layout, *p, f, bend, opts)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SynthesizedField { terms, frequency: f })
}

/// What a steering solve aims at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SteeringTarget {
    /// Signed elevation angle in an xz or yz cut.
    Elevation { plane: CutPlane, theta_deg: f64 },
    /// Azimuth of a horizontal cut at the solver's evaluation elevation.
    Azimuth { phi_deg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub candidates: usize,
    pub phase_step_deg: f64,
    pub refine_step_deg: f64,
    pub cut_step_deg: f64,
    /// Whether the selected candidate met the peak tolerance.
    pub within_tolerance: bool,
    pub cut_plane: CutPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringSolution<T> {
    pub excitation: ExcitationVector<T>,
    pub target: SteeringTarget,
    /// Peak of the synthesized cut, degrees.
    pub achieved_peak: T,
    /// Peak power relative to the strongest single reference port, dB.
    pub peak_gain_rel: T,
    pub frequency: T,
    pub trace: SolverTrace,
}

/// Elevation solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElevationOptions {
    pub phase_step_deg: f64,
    pub refine_step_deg: f64,
    pub refine_half_width_deg: f64,
    pub cut_step_deg: f64,
    /// A candidate counts as pointing at the target when its cut peak is
    /// within this many degrees.
    pub peak_tolerance_deg: f64,
    pub max_abs_theta_deg: f64,
    pub synthesis: SynthesisOptions,
}

impl Default for ElevationOptions {
    fn default() -> Self {
        Self {
            phase_step_deg: 2.0,
            refine_step_deg: 0.1,
            refine_half_width_deg: 2.0,
            cut_step_deg: 0.5,
            peak_tolerance_deg: 1.0,
            max_abs_theta_deg: 60.0,
            synthesis: SynthesisOptions::default(),
        }
    }
}

/// Azimuth solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AzimuthOptions {
    /// Colatitude of the horizontal cut, degrees.
    pub evaluation_theta_deg: f64,
    pub phase_step_deg: f64,
    pub cut_step_deg: f64,
    pub synthesis: SynthesisOptions,
}

impl Default for AzimuthOptions {
    fn default() -> Self {
        Self { evaluation_theta_deg: 60.0, phase_step_deg: 1.0, cut_step_deg: 0.5, synthesis: SynthesisOptions::default() }
    }
}

/// Port fields tabulated along a cut plus at one extra direction.
struct Tabulated<T> {
    angles: Vec<T>,
    cut: Vec<Complex2Vec<T>>,
    at_target: Complex2Vec<T>,
}

fn tabulate<T: Real>(field: &PortField<T>, plane: CutPlane, step: T, target_angle: T) -> Tabulated<T> {
    let angles = plane.angles(step);
    let cut = angles
        .iter()
        .map(|&a| {
            let (th, ph) = plane.direction(a);
            field.field(th, ph)
        })
        .collect();
    let (th, ph) = plane.direction(target_angle);
    Tabulated { angles, cut, at_target: field.field(th, ph) }
}

fn combine<T: Real>(parts: &[(&Tabulated<T>, Complex<T>)]) -> (Vec<T>, T) {
    let n = parts[0].0.cut.len();
    let mut power = Vec::with_capacity(n);
    for i in 0..n {
        let e = parts.iter().fold(Complex2Vec::zero(), |acc, (t, w)| acc + t.cut[i] * *w);
        power.push(e.power());
    }
    let target = parts.iter().fold(Complex2Vec::zero(), |acc, (t, w)| acc + t.at_target * *w).power();
    (power, target)
}

fn cut_peak<T: Real>(plane: CutPlane, angles: &[T], power: &[T]) -> Result<(T, T)> {
    let cut = PatternCut::from_linear(plane, angles.to_vec(), power, None)?;
    let peak = peak_direction(&cut)?;
    let max = power.iter().fold(T::zero(), |m, &p| m.max(p));
    Ok((peak, max))
}

/// Signed angular difference `a − b` wrapped to (−180, 180].
pub fn angle_diff<T: Real>(a: T, b: T) -> T {
    let full = T::lit(360.0);
    let mut d = (a - b) % full;
    if d > T::lit(180.0) {
        d = d - full;
    } else if d <= T::lit(-180.0) {
        d = d + full;
    }
    d
}

#[derive(Clone, Copy)]
struct Candidate<T> {
    broadside: PortId,
    ring: Option<PortId>,
    psi_deg: T,
    error: T,
    target_power: T,
    peak: T,
    peak_power: T,
}

impl<T: Real> Candidate<T> {
    /// Strictly better under the selection rule: inside tolerance beats
    /// outside; inside, more power at the target wins; outside, smaller
    /// pointing error wins. Equal candidates keep enumeration order.
    fn beats(&self, other: &Self, tol: T) -> bool {
        let a_ok = self.error <= tol;
        let b_ok = other.error <= tol;
        match (a_ok, b_ok) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.target_power > other.target_power * (T::one() + T::lit(1e-12)),
            (false, false) => {
                self.error < other.error - T::lit(1e-9)
                    || ((self.error - other.error).abs() <= T::lit(1e-9)
                        && self.target_power > other.target_power * (T::one() + T::lit(1e-12)))
            }
        }
    }
}

/// Elevation steering for a layout carrying broadside TM11 and TM21 modes.
/// Searches single broadside ports and (TM11, TM21) pairs with equal
/// amplitudes over the TM21 phase ψ, keeping the candidate whose cut peak
/// lies within tolerance of `theta0_deg` with the most power there.
pub fn steer_elevation<T: Real>(
    layout: &AntennaLayout<T>,
    plane: CutPlane,
    theta0_deg: T,
    f: T,
    bend: &BendSpec<T>,
    allowed_ports: &[PortId],
) -> Result<SteeringSolution<T>> {
    steer_elevation_with(layout, plane, theta0_deg, f, bend, allowed_ports, &ElevationOptions::default())
}

pub fn steer_elevation_with<T: Real>(
    layout: &AntennaLayout<T>,
    plane: CutPlane,
    theta0_deg: T,
    f: T,
    bend: &BendSpec<T>,
    allowed_ports: &[PortId],
    opts: &ElevationOptions,
) -> Result<SteeringSolution<T>> {
    if !plane.is_elevation() {
        return Err(Error::Config("elevation steering needs an xz or yz plane".into()));
    }
    if theta0_deg.abs() > T::lit(opts.max_abs_theta_deg) {
        return Err(Error::Config(format!(
            "target {theta0_deg} deg beyond +/-{} deg",
            opts.max_abs_theta_deg
        )));
    }
    let mut allowed: Vec<PortId> = allowed_ports.to_vec();
    allowed.sort();
    allowed.dedup();
    for p in &allowed {
        if layout.mode(*p).is_none() {
            return Err(Error::UnknownPort(format!("{p} on {}", layout.name)));
        }
    }
    let of_family = |fam: ModeFamily| -> Vec<PortId> {
        allowed.iter().copied().filter(|p| layout.mode(*p).map(|m| m.family) == Some(fam)).collect()
    };
    let broadside = of_family(ModeFamily::PatchTm11);
    let rings = of_family(ModeFamily::RingTm21);
    if broadside.is_empty() || rings.is_empty() {
        return Err(Error::Infeasible(format!(
            "allowed ports {allowed:?} need at least one TM11 and one TM21 port"
        )));
    }

    let step = T::lit(opts.cut_step_deg);
    let mut tables = BTreeMap::new();
    for p in broadside.iter().chain(&rings) {
        let field = port_field(layout, *p, f, bend, &opts.synthesis)?;
        tables.insert(*p, tabulate(&field, plane, step, theta0_deg));
    }
    let angles = tables[&broadside[0]].angles.clone();
    let tol = T::lit(opts.peak_tolerance_deg);
    let one = Complex::new(T::one(), T::zero());

    let mut evaluated = 0usize;
    let mut evaluate = |b: PortId, r: Option<PortId>, psi_deg: T| -> Result<Candidate<T>> {
        evaluated += 1;
        let mut parts = vec![(&tables[&b], one)];
        if let Some(r) = r {
            parts.push((&tables[&r], Complex::from_polar(T::one(), psi_deg.to_radians())));
        }
        let (power, target_power) = combine(&parts);
        let (peak, peak_power) = cut_peak(plane, &angles, &power)?;
        Ok(Candidate {
            broadside: b,
            ring: r,
            psi_deg,
            error: angle_diff(peak, theta0_deg).abs(),
            target_power,
            peak,
            peak_power,
        })
    };

    let mut best: Option<Candidate<T>> = None;
    let consider = |c: Candidate<T>, best: &mut Option<Candidate<T>>| {
        if best.as_ref().is_none_or(|b| c.beats(b, tol)) {
            *best = Some(c);
        }
    };
    for &b in &broadside {
        let c = evaluate(b, None, T::zero())?;
        consider(c, &mut best);
    }
    let n_psi = (360.0 / opts.phase_step_deg).round() as usize;
    for &b in &broadside {
        for &r in &rings {
            for k in 0..n_psi {
                let c = evaluate(b, Some(r), T::lit(opts.phase_step_deg * k as f64))?;
                consider(c, &mut best);
            }
        }
    }
    let coarse = best.expect("at least one candidate");
    if let Some(r) = coarse.ring {
        let n_ref = (opts.refine_half_width_deg / opts.refine_step_deg).round() as i64;
        for k in -n_ref..=n_ref {
            if k == 0 {
                continue;
            }
            let psi = coarse.psi_deg + T::lit(opts.refine_step_deg * k as f64);
            let c = evaluate(coarse.broadside, Some(r), psi)?;
            consider(c, &mut best);
        }
    }
    let chosen = best.expect("at least one candidate");

    // Reference: strongest single broadside port at zenith.
    let reference = broadside
        .iter()
        .map(|p| tables[p].cut[angles.len() / 2].power())
        .fold(T::zero(), |m, p| m.max(p));
    let mut excitation = ExcitationVector::single(chosen.broadside);
    if let Some(r) = chosen.ring {
        let psi = wrap_degrees(chosen.psi_deg);
        excitation = excitation.with_polar(r, T::one(), psi.to_radians());
    }
    Ok(SteeringSolution {
        excitation,
        target: SteeringTarget::Elevation { plane, theta_deg: theta0_deg.to_f64_lossy() },
        achieved_peak: chosen.peak,
        peak_gain_rel: T::lit(10.0) * (chosen.peak_power / reference).log10(),
        frequency: f,
        trace: SolverTrace {
            candidates: evaluated,
            phase_step_deg: opts.phase_step_deg,
            refine_step_deg: opts.refine_step_deg,
            cut_step_deg: opts.cut_step_deg,
            within_tolerance: chosen.error <= tol,
            cut_plane: plane,
        },
    })
}

/// Wraps degrees into [0, 360).
pub fn wrap_degrees<T: Real>(a: T) -> T {
    let full = T::lit(360.0);
    let mut x = a % full;
    if x < T::zero() {
        x = x + full;
    }
    if x >= full {
        x = x - full;
    }
    x
}

fn azimuth_ports<T: Real>(layout: &AntennaLayout<T>) -> Result<(PortId, PortId, PortId)> {
    let find = |fam: ModeFamily, o: Orientation| {
        layout.modes.iter().find(|m| m.family == fam && m.orientation == o).map(|m| m.port)
    };
    match (
        find(ModeFamily::PatchTm01Monopole, Orientation::Cos),
        find(ModeFamily::RingTm21, Orientation::Cos),
        find(ModeFamily::RingTm21, Orientation::Sin),
    ) {
        (Some(m), Some(c), Some(s)) => Ok((m, c, s)),
        _ => Err(Error::Config(format!("{} lacks the n=0 and TM21 cos/sin modes azimuth steering needs", layout.name))),
    }
}

/// Azimuth steering: TM21 pair weighted `(cos 2φ0, sin 2φ0)`, n=0 port at
/// the phase maximising power at (θ_eval, φ0).
pub fn steer_azimuth<T: Real>(
    layout: &AntennaLayout<T>,
    phi0_deg: T,
    f: T,
    bend: &BendSpec<T>,
) -> Result<SteeringSolution<T>> {
    steer_azimuth_with(layout, phi0_deg, f, bend, &AzimuthOptions::default())
}

/// Closed-form TM21 ring weights `(w_cos, w_sin)` for azimuth `phi0_deg`.
pub fn ring_weights<T: Real>(phi0_deg: T) -> (T, T) {
    let (s, c) = (T::lit(2.0) * phi0_deg.to_radians()).sin_cos();
    (c, s)
}

pub fn steer_azimuth_with<T: Real>(
    layout: &AntennaLayout<T>,
    phi0_deg: T,
    f: T,
    bend: &BendSpec<T>,
    opts: &AzimuthOptions,
) -> Result<SteeringSolution<T>> {
    let (mono, cos_port, sin_port) = azimuth_ports(layout)?;
    let plane = CutPlane::Horizontal { theta_deg: opts.evaluation_theta_deg };
    let step = T::lit(opts.cut_step_deg);
    let tab = |p| -> Result<Tabulated<T>> {
        Ok(tabulate(&port_field(layout, p, f, bend, &opts.synthesis)?, plane, step, phi0_deg))
    };
    let (tm, tc, ts) = (tab(mono)?, tab(cos_port)?, tab(sin_port)?);
    let (wc, ws) = ring_weights(phi0_deg);
    let ring = tc.at_target * Complex::new(wc, T::zero()) + ts.at_target * Complex::new(ws, T::zero());
    let target_power = |psi_deg: T| (ring + tm.at_target * Complex::from_polar(T::one(), psi_deg.to_radians())).power();

    let n_psi = (360.0 / opts.phase_step_deg).round() as usize;
    let h = T::lit(opts.phase_step_deg);
    let samples: Vec<T> = (0..n_psi).map(|k| target_power(h * T::from_count(k))).collect();
    let mut k_best = 0;
    for (k, &p) in samples.iter().enumerate() {
        if p > samples[k_best] * (T::one() + T::lit(1e-12)) {
            k_best = k;
        }
    }
    let (pl, pc, pr) = (samples[(k_best + n_psi - 1) % n_psi], samples[k_best], samples[(k_best + 1) % n_psi]);
    let denom = pl - T::lit(2.0) * pc + pr;
    let mut psi = h * T::from_count(k_best);
    if denom < T::zero() {
        let refined = psi + h * T::lit(0.5) * (pl - pr) / denom;
        if target_power(refined) >= pc {
            psi = refined;
        }
    }
    let psi = wrap_degrees(psi);

    let wm = Complex::from_polar(T::one(), psi.to_radians());
    let parts = [
        (&tm, wm),
        (&tc, Complex::new(wc, T::zero())),
        (&ts, Complex::new(ws, T::zero())),
    ];
    let (power, _) = combine(&parts);
    let (peak, peak_power) = cut_peak(plane, &tm.angles, &power)?;
    let reference = [&tm, &tc, &ts]
        .iter()
        .map(|t| t.cut.iter().fold(T::zero(), |m, e| m.max(e.power())))
        .fold(T::zero(), |m, p| m.max(p));
    let excitation = ExcitationVector::new()
        .with(mono, wm)
        .with(cos_port, Complex::new(wc, T::zero()))
        .with(sin_port, Complex::new(ws, T::zero()));
    let ambiguous_error = angle_diff(peak, phi0_deg).abs().min(angle_diff(peak, phi0_deg + T::lit(180.0)).abs());
    Ok(SteeringSolution {
        excitation,
        target: SteeringTarget::Azimuth { phi_deg: phi0_deg.to_f64_lossy() },
        achieved_peak: peak,
        peak_gain_rel: T::lit(10.0) * (peak_power / reference).log10(),
        frequency: f,
        trace: SolverTrace {
            candidates: n_psi + 1,
            phase_step_deg: opts.phase_step_deg,
            refine_step_deg: 0.0,
            cut_step_deg: opts.cut_step_deg,
            within_tolerance: ambiguous_error <= T::lit(2.0),
            cut_plane: plane,
        },
    })
}

/// Peak direction of the `plane` cut while the phase of `port` steps
/// through `n_steps` equally spaced values starting at its base phase.
pub fn phase_sweep<T: Real>(
    layout: &AntennaLayout<T>,
    base: &ExcitationVector<T>,
    port: PortId,
    f: T,
    bend: &BendSpec<T>,
    n_steps: usize,
    plane: CutPlane,
) -> Result<Vec<(T, T)>> {
    phase_sweep_with(layout, base, port, f, bend, n_steps, plane, 0.5, &SynthesisOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn phase_sweep_with<T: Real>(
    layout: &AntennaLayout<T>,
    base: &ExcitationVector<T>,
    port: PortId,
    f: T,
    bend: &BendSpec<T>,
    n_steps: usize,
    plane: CutPlane,
    cut_step_deg: f64,
    opts: &SynthesisOptions,
) -> Result<Vec<(T, T)>> {
    base.validate(layout)?;
    if layout.mode(port).is_none() {
        return Err(Error::UnknownPort(format!("{port} on {}", layout.name)));
    }
    if n_steps == 0 {
        return Err(Error::Config("phase sweep needs at least one step".into()));
    }
    let step = T::lit(cut_step_deg);
    let mut ports: Vec<PortId> = base.weights.keys().copied().collect();
    if !ports.contains(&port) {
        ports.push(port);
    }
    let tables = ports
        .iter()
        .map(|p| Ok((*p, tabulate(&port_field(layout, *p, f, bend, opts)?, plane, step, T::zero()))))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let w0 = base.weight(port);
    let amp = w0.norm();
    let phase0 = w0.arg();
    let angles = tables[&port].angles.clone();
    (0..n_steps)
        .map(|k| {
            let phase = phase0 + T::TAU() * T::from_count(k) / T::from_count(n_steps);
            let parts: Vec<_> = ports
                .iter()
                .map(|p| {
                    let w = if *p == port { Complex::from_polar(amp, phase) } else { base.weight(*p) };
                    (&tables[p], w)
                })
                .collect();
            let (power, _) = combine(&parts);
            let (peak, _) = cut_peak(plane, &angles, &power)?;
            Ok((phase, peak))
        })
        .collect()
}
