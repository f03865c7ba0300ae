//! Analytical simulator for compact multimode MIMO antennas.
//!
//! Orthogonal cavity modes on a concentric patch and shorted ring are
//! combined with per-port complex weights to steer the beam, either on the
//! flat board or after wrapping it around a cylinder. The crate is generic
//! over the scalar type ([`Real`]); the aliases below fix it to `f64`.

// `!(x > 0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamform;
pub mod conformal;
pub mod error;
pub mod field;
pub mod geometry;
pub mod metrics;
pub mod modes;
pub mod numerics;
pub mod scalar;

pub use error::{Error, Result};
pub use field::{Complex2Vec, FarField, FnField, SampledField};
pub use scalar::Real;

pub type Layout = geometry::AntennaLayout<f64>;
pub type Bend = geometry::BendSpec<f64>;
pub type Mode = modes::ModeSpec<f64>;
pub type Resonance = modes::ResonanceModel<f64>;
pub type Field = field::Complex2Vec<f64>;
pub type Grid = numerics::SphereGrid<f64>;
pub type Cut = metrics::PatternCut<f64>;
pub type Report = metrics::MetricsReport<f64>;
pub type Excitation = beamform::ExcitationVector<f64>;
pub type Steering = beamform::SteeringSolution<f64>;
pub type Apertures = conformal::ApertureSampleSet<f64>;
