//! Transverse-momentum coincidence distributions of non-collinear type-II
//! SPDC photon pairs at the Fourier plane of the crystal.
//!
//! The crate is layered bottom-up:
//!
//! - [`dispersion`]: Sellmeier curves, effective index, walk-off and group index.
//! - [`kernel`]: the biphoton mode function and its phase-matching terms.
//! - [`trace`]: the frequency trace over the detection filters (closed form
//!   and quadrature), the lens mapping, and pinhole smoothing.
//! - [`correlation`]: detector scans, Pearson/principal-axis summaries,
//!   waist sweeps and sign-transition search.
//! - [`config`]: the TOML run configuration, resolved into SI physics inputs.

pub mod config;
pub mod correlation;
pub mod dispersion;
pub mod error;
pub mod kernel;
pub mod roots;
pub mod trace;

pub use config::{load_config, ResolvedConfig, RunConfig};
pub use correlation::{
    assignment_sensitivity, find_sign_transition, run_scan, summarize, waist_sweep, CorrelationSummary,
    JointDistribution, ScanAxis, ScanPlan, ScanRange,
};
pub use dispersion::{CrystalModel, Polarization, SellmeierSet, Wavelengths};
pub use error::{Error, Result};
pub use kernel::{ModeKind, PumpEnvelope, PumpSpectrum, SpdcGeometry, TransverseWavevector};
pub use trace::{coincidence_rate, spatial_biphoton, DetectionAssignment, Setup, SpectralFilter};
