//! Scenario execution: resonance, steering, cuts, metrics and ECC.

use std::collections::BTreeSet;

use modebeam::beamform::{
    port_field, steer_azimuth_with, steer_elevation, synthesize, AzimuthOptions, ExcitationVector,
    SteeringSolution, SynthesisOptions, SynthesizedField,
};
use modebeam::field::SampledField;
use modebeam::geometry::{build_preset, AntennaKind, AntennaLayout, BendSpec, PortId};
use modebeam::metrics::{ecc_sampled, CutPlane, EccEntry, MetricsReport, PatternCut};
use modebeam::modes::{bent_frequency, resonant_frequency, ModeFamily, ResonanceModel};
use modebeam::numerics::{make_sphere_grid, SphereGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::scenario::{Scenario, Target};

/// Angular step of emitted cuts, degrees.
pub const CUT_STEP_DEG: f64 = 1.0;

pub fn layout_for(kind: AntennaKind) -> AntennaLayout<f64> {
    build_preset(kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSize {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSize {
    fn default() -> Self {
        Self { n_theta: 64, n_phi: 128 }
    }
}

impl std::str::FromStr for GridSize {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("grid must look like <n_theta>x<n_phi>, got `{s}`"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let grid = Self { n_theta: a.trim().parse().map_err(|_| bad())?, n_phi: b.trim().parse().map_err(|_| bad())? };
        grid.build()?;
        Ok(grid)
    }
}

impl GridSize {
    pub fn build(&self) -> Result<SphereGrid<f64>, CliError> {
        make_sphere_grid(self.n_theta, self.n_phi).map_err(|e| CliError::Config(format!("grid: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunOptions {
    pub grid: GridSize,
    /// Treat steering solutions outside the solver tolerance as infeasible.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResonance {
    pub port: PortId,
    pub family: ModeFamily,
    pub flat_ghz: f64,
}

/// Flat and bent centre frequencies plus the frequency actually simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSummary {
    pub antenna: AntennaKind,
    pub modes: Vec<ModeResonance>,
    pub flat_center_ghz: f64,
    /// `None` for the flat configuration.
    pub bent_center_ghz: Option<f64>,
    pub operating_ghz: f64,
    pub model: ResonanceModel<f64>,
}

/// Everything derived from a scenario before any steering happens.
#[derive(Debug, Clone)]
pub struct Setup {
    pub layout: AntennaLayout<f64>,
    pub bend: BendSpec<f64>,
    pub resonance: ResonanceSummary,
}

impl Setup {
    pub fn new(s: &Scenario) -> Result<Self, CliError> {
        let layout = layout_for(s.antenna);
        let bend = s.bend()?;
        let model = s.resonance_model()?;
        let modes = layout
            .modes
            .iter()
            .map(|m| {
                Ok(ModeResonance {
                    port: m.port,
                    family: m.family,
                    flat_ghz: resonant_frequency(&layout, m, &model).map_err(CliError::from_core)?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        // The patch radiator sets the centre frequency of both layouts.
        let flat_center_ghz = modes
            .iter()
            .find(|m| m.family.radiator() == modebeam::geometry::Radiator::Patch)
            .map(|m| m.flat_ghz)
            .ok_or_else(|| CliError::Config("layout has no patch mode".into()))?;
        let bent_center_ghz = if bend.flat {
            None
        } else {
            Some(bent_frequency(flat_center_ghz, &layout, &bend, &model).map_err(CliError::from_core)?)
        };
        let operating_ghz = s.frequency.unwrap_or(bent_center_ghz.unwrap_or(flat_center_ghz));
        if !(operating_ghz > 0.0) {
            return Err(CliError::Numeric(format!("operating frequency {operating_ghz} GHz is not positive")));
        }
        Ok(Self {
            layout,
            bend,
            resonance: ResonanceSummary { antenna: s.antenna, modes, flat_center_ghz, bent_center_ghz, operating_ghz, model },
        })
    }

    pub fn frequency(&self) -> f64 {
        self.resonance.operating_ghz
    }
}

/// Cut plane on which `target` is evaluated.
pub fn target_plane(s: &Scenario, target: &Target) -> CutPlane {
    match *target {
        Target::Elevation { plane, .. } => plane,
        Target::Azimuth { .. } => CutPlane::Horizontal { theta_deg: s.azimuth_cut_theta },
    }
}

/// Solves one steering target under the scenario's port restrictions.
pub fn solve_target(s: &Scenario, setup: &Setup, target: &Target, opts: &RunOptions) -> Result<SteeringSolution<f64>, CliError> {
    let allowed: Vec<PortId> = s.allowed_ports.iter().copied().collect();
    let solution = match *target {
        Target::Elevation { plane, theta_deg } => {
            steer_elevation(&setup.layout, plane, theta_deg, setup.frequency(), &setup.bend, &allowed)
                .map_err(CliError::from_core)?
        }
        Target::Azimuth { phi_deg } => {
            let az = AzimuthOptions { evaluation_theta_deg: s.azimuth_cut_theta, ..Default::default() };
            let sol = steer_azimuth_with(&setup.layout, phi_deg, setup.frequency(), &setup.bend, &az)
                .map_err(CliError::from_core)?;
            let missing: BTreeSet<PortId> =
                sol.excitation.weights.keys().copied().filter(|p| !s.allowed_ports.contains(p)).collect();
            if !missing.is_empty() {
                return Err(CliError::Infeasible(format!("azimuth steering needs ports {missing:?}, which are not allowed")));
            }
            sol
        }
    };
    if opts.strict && !solution.trace.within_tolerance {
        return Err(CliError::Infeasible(format!(
            "best solution for {target:?} peaks at {:.2} deg, outside the solver tolerance",
            solution.achieved_peak
        )));
    }
    Ok(solution)
}

/// Pairwise ECC of every port of the layout at the operating point.
pub fn ecc_table(setup: &Setup, grid: &SphereGrid<f64>) -> Result<Vec<EccEntry<f64>>, CliError> {
    let opts = SynthesisOptions::default();
    let sampled = setup
        .layout
        .port_ids()
        .into_iter()
        .map(|p| {
            let f = port_field(&setup.layout, p, setup.frequency(), &setup.bend, &opts).map_err(CliError::from_core)?;
            Ok((p, SampledField::sample(&f, grid)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out = Vec::new();
    for (i, (a, fa)) in sampled.iter().enumerate() {
        for (b, fb) in &sampled[i + 1..] {
            out.push(EccEntry { a: *a, b: *b, value: ecc_sampled(fa, fb).map_err(CliError::from_core)? });
        }
    }
    Ok(out)
}

/// A solved target with its cut and metrics.
#[derive(Debug, Clone)]
pub struct TargetResult {
    pub target: Target,
    pub solution: SteeringSolution<f64>,
    pub cut: PatternCut<f64>,
    pub metrics: MetricsReport<f64>,
}

pub fn evaluate_target(
    s: &Scenario,
    setup: &Setup,
    target: &Target,
    grid: &SphereGrid<f64>,
    ecc: &[EccEntry<f64>],
    opts: &RunOptions,
) -> Result<TargetResult, CliError> {
    let solution = solve_target(s, setup, target, opts)?;
    let field = synthesize_solution(setup, &solution.excitation)?;
    let cut = PatternCut::sample(&field, target_plane(s, target), CUT_STEP_DEG, true).map_err(CliError::from_core)?;
    let metrics = MetricsReport::evaluate(&cut, &field, grid, ecc.to_vec()).map_err(CliError::from_core)?;
    Ok(TargetResult { target: *target, solution, cut, metrics })
}

pub fn synthesize_solution(setup: &Setup, exc: &ExcitationVector<f64>) -> Result<SynthesizedField<f64>, CliError> {
    synthesize(&setup.layout, exc, setup.frequency(), &setup.bend).map_err(CliError::from_core)
}
