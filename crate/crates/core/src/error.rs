use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_um:.6} um outside valid range [{min_um}, {max_um}] um")]
    WavelengthOutOfRange {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },

    #[error("wavelength {wavelength_um:.6} um too close to the range edge [{min_um}, {max_um}] um for a derivative")]
    DerivativeStencil {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },

    #[error("propagation angle {0} rad outside [0, pi/2]")]
    AngleOutOfRange(f64),

    #[error("material data: {0}")]
    Material(String),

    #[error("quadratic form is not integrable: {0}")]
    DivergingIntegral(String),

    #[error("quadratic form is singular")]
    SingularForm,

    #[error("closed-form trace requires the Gaussian-approximated mode function")]
    ClosedFormNeedsGaussian,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("bracket [{lo}, {hi}] does not enclose a sign change (values {f_lo}, {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
