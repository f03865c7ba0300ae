use thiserror::Error;

/// Errors raised by the modal simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("resonance error: {0}")]
    Resonance(String),
    #[error("infeasible steering problem: {0}")]
    Infeasible(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("open beam: no -3 dB crossing {0} of the peak within the cut span")]
    OpenBeam(&'static str),
    #[error("cut spans {span_deg} deg, a full 360 deg is required")]
    InsufficientSpan { span_deg: f64 },
    #[error("unknown port {0}")]
    UnknownPort(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
