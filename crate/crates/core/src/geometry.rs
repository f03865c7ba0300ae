//! Antenna layouts and the cylindrical bending transform.
//!
//! Coordinates are in millimetres with the board centred on the origin and
//! the radiating side facing +z. A bend wraps the board around a cylinder of
//! radius `R` whose axis is parallel to x (or y) and which touches the board
//! along its centre line; the board centre line therefore does not move.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{default_modes, ModeSpec, Normalization};
use crate::scalar::{wavelength, Real};

/// Smallest accepted bend radius in mm.
pub const MIN_BEND_RADIUS_MM: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Rotation matrix, row major. Columns are the images of x̂, ŷ, ẑ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Frame<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { m: [[o, z, z], [z, o, z], [z, z, o]] }
    }

    /// Right-handed rotation by `angle` about x̂.
    pub fn about_x(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { m: [[o, z, z], [z, c, -s], [z, s, c]] }
    }

    /// Right-handed rotation by `angle` about ŷ.
    pub fn about_y(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { m: [[c, z, s], [z, o, z], [-s, z, c]] }
    }

    /// Right-handed rotation by `angle` about ẑ.
    pub fn about_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self { m: [[c, -s, z], [s, c, z], [z, z, o]] }
    }

    pub fn apply(&self, v: &Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn compose(&self, inner: &Self) -> Self {
        let mut out = [[T::zero(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).fold(T::zero(), |acc, k| acc + self.m[i][k] * inner.m[k][j]);
            }
        }
        Self { m: out }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PortId {
    F1,
    F2,
    F3,
    F4,
}

impl PortId {
    pub const ALL: [PortId; 4] = [PortId::F1, PortId::F2, PortId::F3, PortId::F4];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.index() + 1)
    }
}

impl FromStr for PortId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "F1" | "f1" => Ok(PortId::F1),
            "F2" | "f2" => Ok(PortId::F2),
            "F3" | "f3" => Ok(PortId::F3),
            "F4" | "f4" => Ok(PortId::F4),
            other => Err(Error::UnknownPort(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Radiator {
    Patch,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortDef<T> {
    pub id: PortId,
    /// Feed position (x, y) in mm on the top metallisation.
    pub position: (T, T),
    pub radiator: Radiator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AntennaKind {
    Antenna1,
    Antenna2,
}

impl fmt::Display for AntennaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AntennaKind::Antenna1 => "antenna1",
            AntennaKind::Antenna2 => "antenna2",
        })
    }
}

/// Full description of one multimode antenna.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaLayout<T> {
    pub name: AntennaKind,
    pub board_side: T,
    pub substrate_thickness: T,
    /// Carried for completeness; the field models treat the metal as thin.
    pub metallization_thickness: T,
    pub patch_diameter: T,
    pub ring_inner_diameter: T,
    pub ring_outer_diameter: T,
    pub ports: Vec<PortDef<T>>,
    pub modes: Vec<ModeSpec<T>>,
    /// GHz.
    pub design_frequency: T,
    /// Slots, vias and other details that only enter through calibration.
    pub features: Vec<String>,
}

impl<T: Real> AntennaLayout<T> {
    pub fn port(&self, id: PortId) -> Option<&PortDef<T>> {
        self.ports.iter().find(|p| p.id == id)
    }

    pub fn mode(&self, id: PortId) -> Option<&ModeSpec<T>> {
        self.modes.iter().find(|m| m.port == id)
    }

    pub fn port_ids(&self) -> Vec<PortId> {
        self.ports.iter().map(|p| p.id).collect()
    }

    pub fn patch_radius(&self) -> T {
        self.patch_diameter * T::lit(0.5)
    }

    pub fn ring_inner_radius(&self) -> T {
        self.ring_inner_diameter * T::lit(0.5)
    }

    pub fn ring_outer_radius(&self) -> T {
        self.ring_outer_diameter * T::lit(0.5)
    }

    /// Board side measured in free-space wavelengths at the design frequency.
    pub fn electrical_size(&self) -> T {
        self.board_side / wavelength(self.design_frequency)
    }

    /// Checks the structural invariants of a layout.
    pub fn validate(&self) -> Result<()> {
        if !(self.ring_inner_diameter > self.patch_diameter) {
            return Err(Error::Config("ring inner diameter must exceed patch diameter".into()));
        }
        if self.ring_outer_diameter > self.board_side {
            return Err(Error::Config("ring outer diameter exceeds board side".into()));
        }
        let expected_ports = match self.name {
            AntennaKind::Antenna1 => 4,
            AntennaKind::Antenna2 => 3,
        };
        if self.ports.len() != expected_ports {
            return Err(Error::Config(format!(
                "{} needs {expected_ports} ports, found {}",
                self.name,
                self.ports.len()
            )));
        }
        for p in &self.ports {
            let r = p.position.0.hypot(p.position.1);
            let inside = match p.radiator {
                Radiator::Patch => r <= self.patch_radius(),
                Radiator::Ring => r >= self.ring_inner_radius() && r <= self.ring_outer_radius(),
            };
            if !inside {
                return Err(Error::Config(format!("port {} lies outside its radiator", p.id)));
            }
        }
        for m in &self.modes {
            if self.port(m.port).is_none() {
                return Err(Error::Config(format!("mode attached to missing port {}", m.port)));
            }
        }
        Ok(())
    }
}

fn port<T: Real>(id: PortId, x: f64, y: f64, radiator: Radiator) -> PortDef<T> {
    PortDef { id, position: (T::lit(x), T::lit(y)), radiator }
}

/// Four-port elevation-steering antenna: patch TM11 pair plus shorted-ring
/// TM21 pair, 34 mm board, 5.7 GHz.
pub fn build_antenna1<T: Real>() -> AntennaLayout<T> {
    build_antenna1_with(Normalization::default())
}

pub fn build_antenna1_with<T: Real>(normalization: Normalization) -> AntennaLayout<T> {
    let mut layout = AntennaLayout {
        name: AntennaKind::Antenna1,
        board_side: T::lit(34.0),
        substrate_thickness: T::lit(0.5),
        metallization_thickness: T::lit(0.06),
        patch_diameter: T::lit(17.0),
        ring_inner_diameter: T::lit(18.0),
        ring_outer_diameter: T::lit(34.0),
        ports: vec![
            port(PortId::F1, 3.5, 0.0, Radiator::Patch),
            port(PortId::F2, 0.0, 3.5, Radiator::Patch),
            port(PortId::F3, 13.0, 0.0, Radiator::Ring),
            port(PortId::F4, -9.2, 9.2, Radiator::Ring),
        ],
        modes: Vec::new(),
        design_frequency: T::lit(5.7),
        features: vec![
            "patch: four T-shaped slots rotated by 90 deg (l1=3 mm, w1=0.6 mm, l2=1.49 mm, w2=0.6 mm)".into(),
            "ring: shorted by 8 vias r=0.25 mm, 0.6 mm from inner edge, rotated by 45 deg".into(),
            "ring: eight tuning slots 2.2 mm x 0.6 mm".into(),
        ],
    };
    layout.modes = default_modes(&layout, normalization);
    layout
}

/// Three-port azimuth-steering antenna: shorted patch monopole-like TM01
/// mode plus shorted-ring TM21 pair, 37 mm board, 5.76 GHz.
pub fn build_antenna2<T: Real>() -> AntennaLayout<T> {
    build_antenna2_with(Normalization::default())
}

pub fn build_antenna2_with<T: Real>(normalization: Normalization) -> AntennaLayout<T> {
    let mut layout = AntennaLayout {
        name: AntennaKind::Antenna2,
        board_side: T::lit(37.0),
        substrate_thickness: T::lit(0.5),
        metallization_thickness: T::lit(0.06),
        patch_diameter: T::lit(17.3),
        ring_inner_diameter: T::lit(19.0),
        ring_outer_diameter: T::lit(34.0),
        ports: vec![
            port(PortId::F1, 0.0, 0.0, Radiator::Patch),
            port(PortId::F2, -13.5, 0.0, Radiator::Ring),
            port(PortId::F3, 9.5, -9.5, Radiator::Ring),
        ],
        modes: Vec::new(),
        design_frequency: T::lit(5.76),
        features: vec![
            "patch: shorted by 4 vias r=0.25 mm, 5 mm from centre, rotated by 90 deg".into(),
            "ring: vias 0.6 mm from inner edge, rotated by 45 deg".into(),
        ],
    };
    layout.modes = default_modes(&layout, normalization);
    layout
}

pub fn build_preset<T: Real>(kind: AntennaKind) -> AntennaLayout<T> {
    match kind {
        AntennaKind::Antenna1 => build_antenna1(),
        AntennaKind::Antenna2 => build_antenna2(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BendAxis {
    X,
    Y,
}

/// Cylindrical bend: cylinder axis, radius in mm, or flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BendSpec<T> {
    pub axis: BendAxis,
    pub radius: T,
    pub flat: bool,
}

impl<T: Real> BendSpec<T> {
    pub fn flat() -> Self {
        Self { axis: BendAxis::X, radius: T::infinity(), flat: true }
    }

    pub fn new(axis: BendAxis, radius: T) -> Result<Self> {
        let spec = Self { axis, radius, flat: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.flat {
            return Ok(());
        }
        if !(self.radius >= T::lit(MIN_BEND_RADIUS_MM)) || !self.radius.is_finite() {
            return Err(Error::Geometry(format!(
                "bend radius {} mm below minimum {MIN_BEND_RADIUS_MM} mm",
                self.radius
            )));
        }
        Ok(())
    }

    /// Curvature 1/R in 1/mm (zero when flat).
    pub fn curvature(&self) -> T {
        if self.flat {
            T::zero()
        } else {
            self.radius.recip()
        }
    }
}

/// Maps a flat-board point (x, y, z) onto the bent board. `z` is a height
/// along the local surface normal. Returns the bent position and the local
/// frame rotation, a rotation by `s/R` about the bend axis, where `s` is the
/// coordinate transverse to that axis.
pub fn bend_map<T: Real>(p: Vec3<T>, bend: &BendSpec<T>) -> Result<(Vec3<T>, Frame<T>)> {
    bend.validate()?;
    if bend.flat {
        return Ok((p, Frame::identity()));
    }
    let r = bend.radius;
    let s = match bend.axis {
        BendAxis::X => p.y,
        BendAxis::Y => p.x,
    };
    if s.abs() > T::PI() * r {
        return Err(Error::Geometry(format!(
            "transverse coordinate {s} mm wraps past half a turn of radius {r} mm"
        )));
    }
    let alpha = s / r;
    let (sa, ca) = alpha.sin_cos();
    let lateral = (r - p.z) * sa;
    let height = r * (T::one() - ca) + p.z * ca;
    Ok(match bend.axis {
        BendAxis::X => (Vec3::new(p.x, lateral, height), Frame::about_x(alpha)),
        // Rotation about ŷ by -α takes x̂ to (cos α, 0, sin α).
        BendAxis::Y => (Vec3::new(lateral, p.y, height), Frame::about_y(-alpha)),
    })
}

/// Inverse of [`bend_map`] for points within half a turn of the centre line.
pub fn bend_unmap<T: Real>(q: Vec3<T>, bend: &BendSpec<T>) -> Result<Vec3<T>> {
    bend.validate()?;
    if bend.flat {
        return Ok(q);
    }
    let r = bend.radius;
    let lateral = match bend.axis {
        BendAxis::X => q.y,
        BendAxis::Y => q.x,
    };
    let depth = r - q.z;
    let alpha = lateral.atan2(depth);
    let z = r - lateral.hypot(depth);
    let s = alpha * r;
    Ok(match bend.axis {
        BendAxis::X => Vec3::new(q.x, s, z),
        BendAxis::Y => Vec3::new(s, q.y, z),
    })
}

/// Chord-to-arc ratio `2R sin(L/2R) / L` of the bent board, `L` = board side.
pub fn chord_factor<T: Real>(layout: &AntennaLayout<T>, bend: &BendSpec<T>) -> Result<T> {
    bend.validate()?;
    if bend.flat {
        return Ok(T::one());
    }
    let l = layout.board_side;
    let r = bend.radius;
    Ok(T::lit(2.0) * r * (l / (T::lit(2.0) * r)).sin() / l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centre_line_is_fixed() {
        let bend = BendSpec::new(BendAxis::X, 10.0).unwrap();
        let (q, frame) = bend_map(Vec3::new(5.0, 0.0, 0.0), &bend).unwrap();
        assert_eq!(q, Vec3::new(5.0, 0.0, 0.0));
        assert_eq!(frame, Frame::identity());
    }

    #[test]
    fn quarter_turn_about_x() {
        let bend = BendSpec::new(BendAxis::X, 10.0).unwrap();
        let (q, frame) = bend_map(Vec3::new(0.0, std::f64::consts::PI * 10.0 / 2.0, 0.0), &bend).unwrap();
        assert!(q.x.abs() < 1e-12 && (q.y - 10.0).abs() < 1e-12 && (q.z - 10.0).abs() < 1e-12);
        let expected = Frame::<f64>::about_x(std::f64::consts::FRAC_PI_2);
        for i in 0..3 {
            for j in 0..3 {
                assert!((frame.m[i][j] - expected.m[i][j]).abs() < 1e-15);
            }
        }
        // tangent ŷ now points along +z, normal ẑ along -y
        let t = frame.apply(&Vec3::new(0.0, 1.0, 0.0));
        assert!((t.z - 1.0).abs() < 1e-15);
        let n = frame.apply(&Vec3::new(0.0, 0.0, 1.0));
        assert!((n.y + 1.0).abs() < 1e-15);
    }

    #[test]
    fn y_axis_mirrors_x_axis() {
        let bx = BendSpec::<f64>::new(BendAxis::X, 12.0).unwrap();
        let by = BendSpec::<f64>::new(BendAxis::Y, 12.0).unwrap();
        let (qx, fx) = bend_map(Vec3::new(2.0, 7.0, 0.3), &bx).unwrap();
        let (qy, fy) = bend_map(Vec3::new(7.0, 2.0, 0.3), &by).unwrap();
        assert!((qx.x - qy.y).abs() < 1e-14 && (qx.y - qy.x).abs() < 1e-14 && (qx.z - qy.z).abs() < 1e-14);
        let nx = fx.apply(&Vec3::new(0.0, 0.0, 1.0));
        let ny = fy.apply(&Vec3::new(0.0, 0.0, 1.0));
        assert!((nx.y - ny.x).abs() < 1e-15 && (nx.z - ny.z).abs() < 1e-15);
    }

    #[test]
    fn flat_bypass_and_overwrap() {
        let flat = BendSpec::<f64>::flat();
        let p = Vec3::new(1.0, 300.0, 0.0);
        assert_eq!(bend_map(p, &flat).unwrap().0, p);
        let bend = BendSpec::new(BendAxis::X, 5.0).unwrap();
        assert!(matches!(bend_map(Vec3::new(0.0, 16.0, 0.0), &bend), Err(Error::Geometry(_))));
    }

    #[test]
    fn radius_below_minimum_rejected() {
        assert!(matches!(BendSpec::new(BendAxis::Y, 4.9_f64), Err(Error::Geometry(_))));
        assert!(BendSpec::new(BendAxis::Y, 5.0_f64).is_ok());
    }

    #[test]
    fn port_ids_parse_and_print() {
        for id in PortId::ALL {
            assert_eq!(id.to_string().parse::<PortId>().unwrap(), id);
        }
        assert!(matches!("F9".parse::<PortId>(), Err(Error::UnknownPort(_))));
    }
}
