//! Scenario files: strict JSON, validated and resolved with defaults.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use modebeam::geometry::{AntennaKind, BendAxis, BendSpec, PortId};
use modebeam::metrics::CutPlane;
use modebeam::modes::{ResonanceModel, SlotLoading};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Bend radius applied to configurations B and C when none is given, mm.
pub const DEFAULT_BEND_RADIUS_MM: f64 = 10.0;
/// Colatitude of horizontal cuts for azimuth targets, degrees.
pub const DEFAULT_AZIMUTH_CUT_THETA_DEG: f64 = 60.0;

const TOP_KEYS: &[&str] = &[
    "antenna",
    "configuration",
    "bend_radius",
    "frequency",
    "steering",
    "allowed_ports",
    "resonance",
    "output_dir",
    "azimuth_cut_theta",
];
const TARGET_KEYS: &[&str] = &["plane", "theta", "phi"];
const RESONANCE_KEYS: &[&str] = &["eps_r", "slot_loading", "kappa_f"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Configuration {
    A,
    B,
    C,
}

impl Configuration {
    pub fn bend(self, radius: f64) -> Result<BendSpec<f64>, CliError> {
        let axis = match self {
            Configuration::A => return Ok(BendSpec::flat()),
            Configuration::B => BendAxis::X,
            Configuration::C => BendAxis::Y,
        };
        BendSpec::new(axis, radius).map_err(|e| CliError::Config(format!("bend_radius: {e}")))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawFrequency {
    Ghz(f64),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawPorts {
    Word(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawLoading {
    Both(f64),
    Split { patch: f64, ring: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    plane: Option<String>,
    theta: Option<f64>,
    phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResonance {
    eps_r: Option<f64>,
    slot_loading: Option<RawLoading>,
    kappa_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    antenna: AntennaKind,
    configuration: Configuration,
    bend_radius: Option<f64>,
    frequency: Option<RawFrequency>,
    #[serde(default)]
    steering: Vec<RawTarget>,
    allowed_ports: Option<RawPorts>,
    resonance: Option<RawResonance>,
    output_dir: Option<PathBuf>,
    azimuth_cut_theta: Option<f64>,
}

/// One steering request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    /// Signed elevation angle in the xz or yz plane.
    Elevation { plane: CutPlane, theta_deg: f64 },
    Azimuth { phi_deg: f64 },
}

impl Target {
    /// Stem used for this target's CSV file.
    pub fn label(&self) -> String {
        match self {
            Target::Elevation { plane, theta_deg } => format!("{plane}_theta{theta_deg:+}"),
            Target::Azimuth { phi_deg } => format!("az_phi{phi_deg}"),
        }
    }
}

/// Resonance-model overrides; `None` keeps the calibrated default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResonanceOverrides {
    pub eps_r: Option<f64>,
    pub slot_loading: Option<SlotLoading<f64>>,
    pub kappa_f: Option<f64>,
}

/// A validated scenario with every default resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub antenna: AntennaKind,
    pub configuration: Configuration,
    /// `None` for the flat configuration.
    pub bend_radius: Option<f64>,
    /// Explicit frequency in GHz, or `None` for automatic.
    pub frequency: Option<f64>,
    pub steering: Vec<Target>,
    pub allowed_ports: BTreeSet<PortId>,
    pub resonance: ResonanceOverrides,
    pub output_dir: Option<PathBuf>,
    pub azimuth_cut_theta: f64,
}

impl Scenario {
    /// Flat default scenario for `antenna`.
    pub fn minimal(antenna: AntennaKind) -> Self {
        Self {
            antenna,
            configuration: Configuration::A,
            bend_radius: None,
            frequency: None,
            steering: Vec::new(),
            allowed_ports: crate::runner::layout_for(antenna).port_ids().into_iter().collect(),
            resonance: ResonanceOverrides::default(),
            output_dir: None,
            azimuth_cut_theta: DEFAULT_AZIMUTH_CUT_THETA_DEG,
        }
    }

    pub fn bend(&self) -> Result<BendSpec<f64>, CliError> {
        self.configuration.bend(self.bend_radius.unwrap_or(DEFAULT_BEND_RADIUS_MM))
    }

    /// Default resonance model with the overrides applied.
    pub fn resonance_model(&self) -> Result<ResonanceModel<f64>, CliError> {
        let layout = crate::runner::layout_for(self.antenna);
        let mut model = ResonanceModel::<f64>::default();
        if let Some(e) = self.resonance.eps_r {
            model.eps_r = e;
        }
        if let Some(k) = self.resonance.kappa_f {
            model.bend_coefficient = k;
        }
        model = match self.resonance.slot_loading {
            Some(l) => ResonanceModel { slot_loading: l, ..model },
            None => model.calibrated(&layout).map_err(CliError::from_core)?,
        };
        model.validate().map_err(|e| CliError::Config(format!("resonance: {e}")))?;
        Ok(model)
    }
}

/// Reads and validates a scenario file. With `strict`, unknown keys are
/// errors; otherwise they are reported through `warn` and dropped.
pub fn parse_scenario(path: &Path, strict: bool, warn: &mut dyn FnMut(String)) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read scenario {}: {e}", path.display())))?;
    parse_scenario_str(&text, strict, warn)
}

pub fn parse_scenario_str(text: &str, strict: bool, warn: &mut dyn FnMut(String)) -> Result<Scenario, CliError> {
    let mut value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("scenario JSON error at line {} column {}: {e}", e.line(), e.column())))?;
    prune_unknown(&mut value, strict, warn)?;
    let raw: RawScenario =
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("scenario: {e}")))?;
    resolve(raw)
}

fn prune_object(obj: &mut serde_json::Map<String, Value>, known: &[&str], at: &str, strict: bool, warn: &mut dyn FnMut(String)) -> Result<(), CliError> {
    let unknown: Vec<String> = obj.keys().filter(|k| !known.contains(&k.as_str())).cloned().collect();
    for k in unknown {
        if strict {
            return Err(CliError::Config(format!("unknown key `{at}{k}`")));
        }
        warn(format!("ignoring unknown key `{at}{k}`"));
        obj.remove(&k);
    }
    Ok(())
}

fn prune_unknown(value: &mut Value, strict: bool, warn: &mut dyn FnMut(String)) -> Result<(), CliError> {
    let Value::Object(top) = value else {
        return Err(CliError::Config("scenario must be a JSON object".into()));
    };
    prune_object(top, TOP_KEYS, "", strict, warn)?;
    if let Some(Value::Array(targets)) = top.get_mut("steering") {
        for (i, t) in targets.iter_mut().enumerate() {
            if let Value::Object(o) = t {
                prune_object(o, TARGET_KEYS, &format!("steering[{i}]."), strict, warn)?;
            }
        }
    }
    if let Some(Value::Object(o)) = top.get_mut("resonance") {
        prune_object(o, RESONANCE_KEYS, "resonance.", strict, warn)?;
    }
    Ok(())
}

fn resolve(raw: RawScenario) -> Result<Scenario, CliError> {
    let layout = crate::runner::layout_for(raw.antenna);
    let bend_radius = match (raw.configuration, raw.bend_radius) {
        (Configuration::A, Some(r)) => {
            return Err(CliError::Config(format!("configuration A is flat but bend_radius {r} was given")))
        }
        (Configuration::A, None) => None,
        (c, r) => {
            let r = r.unwrap_or(DEFAULT_BEND_RADIUS_MM);
            c.bend(r)?;
            Some(r)
        }
    };
    let frequency = match raw.frequency {
        None => None,
        Some(RawFrequency::Word(w)) if w == "auto" => None,
        Some(RawFrequency::Word(w)) => {
            return Err(CliError::Config(format!("frequency must be a number or \"auto\", got \"{w}\"")))
        }
        Some(RawFrequency::Ghz(f)) if f > 0.0 && f.is_finite() => Some(f),
        Some(RawFrequency::Ghz(f)) => return Err(CliError::Config(format!("frequency must be positive, got {f}"))),
    };
    let allowed_ports = match raw.allowed_ports {
        None => layout.port_ids().into_iter().collect(),
        Some(RawPorts::Word(w)) if w == "all" => layout.port_ids().into_iter().collect(),
        Some(RawPorts::Word(w)) => {
            return Err(CliError::Config(format!("allowed_ports must be a list or \"all\", got \"{w}\"")))
        }
        Some(RawPorts::List(list)) => {
            let mut set = BTreeSet::new();
            for name in list {
                let p: PortId = name
                    .parse()
                    .map_err(|_| CliError::Config(format!("allowed_ports: unknown port `{name}`")))?;
                if layout.port(p).is_none() {
                    return Err(CliError::Config(format!("allowed_ports: {} has no port {p}", raw.antenna)));
                }
                set.insert(p);
            }
            if set.is_empty() {
                return Err(CliError::Config("allowed_ports is empty".into()));
            }
            set
        }
    };
    let azimuth_cut_theta = raw.azimuth_cut_theta.unwrap_or(DEFAULT_AZIMUTH_CUT_THETA_DEG);
    if !(azimuth_cut_theta > 0.0 && azimuth_cut_theta < 180.0) {
        return Err(CliError::Config(format!("azimuth_cut_theta must lie in (0, 180), got {azimuth_cut_theta}")));
    }
    let steering = raw
        .steering
        .iter()
        .enumerate()
        .map(|(i, t)| resolve_target(i, t))
        .collect::<Result<Vec<_>, _>>()?;
    let r = raw.resonance.unwrap_or_default();
    let resonance = ResonanceOverrides {
        eps_r: r.eps_r,
        slot_loading: r.slot_loading.map(|l| match l {
            RawLoading::Both(v) => SlotLoading { patch: v, ring: v },
            RawLoading::Split { patch, ring } => SlotLoading { patch, ring },
        }),
        kappa_f: r.kappa_f,
    };
    let scenario = Scenario {
        antenna: raw.antenna,
        configuration: raw.configuration,
        bend_radius,
        frequency,
        steering,
        allowed_ports,
        resonance,
        output_dir: raw.output_dir,
        azimuth_cut_theta,
    };
    scenario.resonance_model()?;
    Ok(scenario)
}

fn resolve_target(i: usize, t: &RawTarget) -> Result<Target, CliError> {
    let bad = |msg: &str| CliError::Config(format!("steering[{i}]: {msg}"));
    let finite = |v: f64| if v.is_finite() { Ok(v) } else { Err(bad("angle must be finite")) };
    match (t.plane.as_deref(), t.theta, t.phi) {
        (Some("xz"), Some(th), None) => Ok(Target::Elevation { plane: CutPlane::Xz, theta_deg: finite(th)? }),
        (Some("yz"), Some(th), None) => Ok(Target::Elevation { plane: CutPlane::Yz, theta_deg: finite(th)? }),
        (Some("azimuth") | None, None, Some(ph)) => Ok(Target::Azimuth { phi_deg: finite(ph)? }),
        (Some(p), _, _) if !matches!(p, "xz" | "yz" | "azimuth") => {
            Err(bad(&format!("plane must be xz, yz or azimuth, got `{p}`")))
        }
        _ => Err(bad("give `plane` with `theta` for elevation or `phi` for azimuth")),
    }
}
