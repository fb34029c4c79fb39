//! Frequency trace of the mode function and the Fourier-plane coincidence rate.

pub mod aperture;
pub mod gaussian;
pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::kernel::{ModeKind, PumpEnvelope, SpdcGeometry, TransverseWavevector};

pub use aperture::smooth_grid;
pub use gaussian::{build_quadratic_form, integrate_gaussian_closed_form, ComplexQuadraticForm, TraceForm};
pub use quadrature::{integrate_quadrature_oracle, QuadratureResult, QuadratureSettings};

/// Paraxial fraction `|q| / k0` above which a warning is logged.
const PARAXIAL_WARN: f64 = 0.1;

/// Gaussian spectral filter `f(Omega) = exp[-Omega^2 / (4 sigma^2)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralFilter {
    /// Centre wavelength, m.
    pub center_wavelength: f64,
    /// Amplitude width parameter, rad/s.
    pub sigma: f64,
}

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3; // 2 sqrt(2 ln 2)

impl SpectralFilter {
    pub fn new(center_wavelength: f64, sigma: f64) -> Self {
        SpectralFilter {
            center_wavelength,
            sigma,
        }
    }

    /// From a transmission (intensity) FWHM given in wavelength, both in metres.
    ///
    /// `d_omega = 2 pi c d_lambda / lambda_c^2`, and `|f|^2` has FWHM `2 sigma sqrt(2 ln 2)`.
    pub fn from_fwhm(center_wavelength: f64, fwhm: f64) -> Result<Self> {
        if !(center_wavelength > 0.0 && fwhm > 0.0) {
            return Err(Error::invalid("filters.fwhm_nm", "centre and bandwidth must be > 0"));
        }
        let d_omega = 2.0 * PI * SPEED_OF_LIGHT * fwhm / (center_wavelength * center_wavelength);
        Ok(SpectralFilter::new(center_wavelength, d_omega / FWHM_PER_SIGMA))
    }

    /// Inverse of [`SpectralFilter::from_fwhm`], m.
    pub fn fwhm_wavelength(&self) -> f64 {
        self.sigma * FWHM_PER_SIGMA * self.center_wavelength * self.center_wavelength / (2.0 * PI * SPEED_OF_LIGHT)
    }

    pub fn response(&self, omega: f64) -> f64 {
        (-omega * omega / (4.0 * self.sigma * self.sigma)).exp()
    }
}

/// Which polarization the polarizers send to detector A.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectionAssignment {
    /// e-photon at A, o-photon at B: `S(q_e; q_o)`.
    EAtA,
    /// o-photon at A, e-photon at B: `S(q_o; q_e)`.
    OAtA,
}

impl DetectionAssignment {
    /// `(q_e, q_o)` from detector-ordered `(q_A, q_B)`.
    pub fn split<T>(self, a: T, b: T) -> (T, T) {
        match self {
            DetectionAssignment::EAtA => (a, b),
            DetectionAssignment::OAtA => (b, a),
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            DetectionAssignment::EAtA => DetectionAssignment::OAtA,
            DetectionAssignment::OAtA => DetectionAssignment::EAtA,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DetectionAssignment::EAtA => "ea",
            DetectionAssignment::OAtA => "oa",
        }
    }
}

impl std::str::FromStr for DetectionAssignment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ea" | "EA" | "e_at_a" => Ok(DetectionAssignment::EAtA),
            "oa" | "OA" | "o_at_a" => Ok(DetectionAssignment::OAtA),
            other => Err(Error::invalid("assignment", format!("expected `ea` or `oa`, got `{other}`"))),
        }
    }
}

/// Lens mapping between Fourier-plane position and transverse momentum,
/// `q = 2 pi x / (lambda0 f)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierPlaneMap {
    pub focal_length: f64,
    pub wavelength_e: f64,
    pub wavelength_o: f64,
}

impl FourierPlaneMap {
    pub fn scale(&self, wavelength: f64) -> f64 {
        2.0 * PI / (wavelength * self.focal_length)
    }

    pub fn momentum(&self, position: [f64; 2], wavelength: f64) -> TransverseWavevector {
        let s = self.scale(wavelength);
        TransverseWavevector::new(position[0] * s, position[1] * s)
    }

    /// Central wavelengths of the photons reaching `(A, B)`.
    pub fn arm_wavelengths(&self, assignment: DetectionAssignment) -> (f64, f64) {
        match assignment {
            DetectionAssignment::EAtA => (self.wavelength_e, self.wavelength_o),
            DetectionAssignment::OAtA => (self.wavelength_o, self.wavelength_e),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_length > 0.0 && self.focal_length.is_finite()) {
            return Err(Error::invalid("optics.focal_mm", "must be > 0"));
        }
        Ok(())
    }
}

/// Fully resolved physical configuration consumed by the trace and the scans.
#[derive(Clone, Debug, PartialEq)]
pub struct Setup {
    pub geometry: SpdcGeometry,
    pub pump: PumpEnvelope,
    pub filter_e: SpectralFilter,
    pub filter_o: SpectralFilter,
    pub map: FourierPlaneMap,
    pub mode: ModeKind,
    pub quadrature: QuadratureSettings,
    /// Pinhole diameter applied to scans, m; zero disables smoothing.
    pub pinhole_diameter: f64,
}

impl Setup {
    pub fn with_mode(&self, mode: ModeKind) -> Self {
        Setup { mode, ..self.clone() }
    }
}

/// Spatial biphoton at detector-ordered momenta: closed form for the
/// Gaussian mode, quadrature for the exact sinc.
pub fn spatial_biphoton(
    q_a: TransverseWavevector,
    q_b: TransverseWavevector,
    assignment: DetectionAssignment,
    setup: &Setup,
) -> Result<Complex64> {
    match setup.mode {
        ModeKind::GaussianApprox => build_quadratic_form(q_a, q_b, assignment, setup)?.integrate(),
        ModeKind::ExactSinc => {
            let r = integrate_quadrature_oracle(q_a, q_b, assignment, setup, ModeKind::ExactSinc);
            if let Some(w) = &r.warning {
                log::warn!("{w} at q_A={q_a:?}, q_B={q_b:?}");
            }
            Ok(r.value)
        }
    }
}

/// Unnormalised coincidence rate `|Phi~|^2` for detector positions in the
/// Fourier plane (m).
pub fn coincidence_rate(
    x_a: [f64; 2],
    x_b: [f64; 2],
    assignment: DetectionAssignment,
    setup: &Setup,
) -> Result<f64> {
    let (lambda_a, lambda_b) = setup.map.arm_wavelengths(assignment);
    let q_a = setup.map.momentum(x_a, lambda_a);
    let q_b = setup.map.momentum(x_b, lambda_b);
    for (q, l) in [(q_a, lambda_a), (q_b, lambda_b)] {
        if q.paraxial_fraction(l) > PARAXIAL_WARN {
            log::warn!("|q| = {:.3e} rad/m is beyond 10% of k0; paraxial model is unreliable", q.norm());
        }
    }
    Ok(spatial_biphoton(q_a, q_b, assignment, setup)?.norm_sqr())
}
