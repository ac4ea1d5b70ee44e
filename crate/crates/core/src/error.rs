use thiserror::Error;

use crate::lattice::CenterSpec;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a documented validity requirement.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Matrix or vector dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Wave vector outside the open band (0, pi): the leads carry no
    /// propagating state there.
    #[error("wave vector k = {k} lies outside the open band (0, pi)")]
    OutsideBand { k: f64 },

    /// The scattering denominator vanished: reflection and transmission
    /// diverge. Carries the center parameters when they are known.
    #[error("spectral singularity at k = {k}{}", spec_suffix(.spec))]
    SpectralSingularity { spec: Option<CenterSpec>, k: f64 },

    /// A linear system was singular to working precision.
    #[error("linear system singular to working precision (rcond = {rcond:.3e})")]
    SingularSystem { rcond: f64 },

    /// An operator expected to square to +/-identity does not.
    #[error("operator squared is not proportional to the identity")]
    IndefiniteParity,
}

fn spec_suffix(spec: &Option<CenterSpec>) -> String {
    match spec {
        Some(s) => format!(
            " (kind = {:?}, kappa = {}, V = {}, J = {})",
            s.kind, s.kappa, s.v, s.j
        ),
        None => String::new(),
    }
}
