//! Uniaxial crystal dispersion: ordinary and effective extraordinary
//! indices, walk-off angles, group (inverse-velocity) indices, and the
//! non-collinear type-II phase-matching condition built from them.
//!
//! Wavelengths passed to the public API are in metres; the material data is
//! tabulated in micrometres, as is conventional for Sellmeier fits.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::roots::bisect;

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Bundled BBO data file.
pub const BBO_DATA: &str = include_str!("../data/bbo.toml");

/// Relative step of the stencil that group-index evaluation must fit inside
/// the valid range.
const STENCIL_REL: f64 = 1e-6;

/// Number of samples used to validate a curve over its range at load time.
const VALIDATION_SAMPLES: usize = 257;

/// Closed forms understood by the material-data loader.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaId {
    /// `n^2 = A + B / (l^2 - C) - D l^2`, `l` in micrometres. Four coefficients.
    SellmeierAbcd,
    /// `n = A`. One coefficient; a dispersionless reference material.
    Constant,
}

impl FormulaId {
    pub fn coefficient_count(self) -> usize {
        match self {
            FormulaId::SellmeierAbcd => 4,
            FormulaId::Constant => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::SellmeierAbcd => "sellmeier_abcd",
            FormulaId::Constant => "constant",
        }
    }

    /// Index and its wavelength derivative (per micrometre) at `l_um`.
    fn eval(self, c: &[f64], l_um: f64) -> (f64, f64) {
        match self {
            FormulaId::SellmeierAbcd => {
                let l2 = l_um * l_um;
                let denom = l2 - c[2];
                let n2 = c[0] + c[1] / denom - c[3] * l2;
                let n = n2.sqrt();
                let dn2 = -2.0 * c[1] * l_um / (denom * denom) - 2.0 * c[3] * l_um;
                (n, dn2 / (2.0 * n))
            }
            FormulaId::Constant => (c[0], 0.0),
        }
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sellmeier_abcd" => Ok(FormulaId::SellmeierAbcd),
            "constant" => Ok(FormulaId::Constant),
            other => Err(Error::Material(format!("unknown formula_id `{other}`"))),
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    name: String,
    provenance: String,
    #[serde(default)]
    version: Option<u32>,
    formula_id: String,
    valid_range_um: [f64; 2],
    ordinary_coeffs: Vec<f64>,
    extraordinary_coeffs: Vec<f64>,
}

/// Ordinary and principal-extraordinary index curves of a uniaxial crystal.
#[derive(Clone, Debug, PartialEq)]
pub struct SellmeierSet {
    pub name: String,
    pub provenance: String,
    pub version: Option<u32>,
    formula: FormulaId,
    ordinary: Vec<f64>,
    extraordinary: Vec<f64>,
    range_um: (f64, f64),
}

impl SellmeierSet {
    /// Builds a set and checks that both curves are finite and above unity
    /// across the whole valid range.
    pub fn new(
        name: impl Into<String>,
        provenance: impl Into<String>,
        formula: FormulaId,
        ordinary: Vec<f64>,
        extraordinary: Vec<f64>,
        range_um: (f64, f64),
    ) -> Result<Self> {
        let (lo, hi) = range_um;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Material(format!(
                "valid_range_um must satisfy 0 < min < max, got [{lo}, {hi}]"
            )));
        }
        for (label, coeffs) in [("ordinary_coeffs", &ordinary), ("extraordinary_coeffs", &extraordinary)] {
            if coeffs.len() != formula.coefficient_count() {
                return Err(Error::Material(format!(
                    "{label}: formula `{formula}` takes {} coefficients, got {}",
                    formula.coefficient_count(),
                    coeffs.len()
                )));
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Material(format!("{label}: non-finite coefficient")));
            }
        }
        let set = SellmeierSet {
            name: name.into(),
            provenance: provenance.into(),
            version: None,
            formula,
            ordinary,
            extraordinary,
            range_um,
        };
        for i in 0..VALIDATION_SAMPLES {
            let l = lo + (hi - lo) * i as f64 / (VALIDATION_SAMPLES - 1) as f64;
            for (label, coeffs) in [("ordinary", &set.ordinary), ("extraordinary", &set.extraordinary)] {
                let (n, dn) = formula.eval(coeffs, l);
                if !(n.is_finite() && dn.is_finite() && n > 1.0) {
                    return Err(Error::Material(format!(
                        "{label} index is {n} at {l} um; must be real and > 1 over the valid range"
                    )));
                }
            }
        }
        Ok(set)
    }

    /// Parses the structured-text material format.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: MaterialFile =
            toml::from_str(text).map_err(|e| Error::Material(e.to_string().trim_end().to_owned()))?;
        let formula: FormulaId = raw.formula_id.parse()?;
        let mut set = SellmeierSet::new(
            raw.name,
            raw.provenance,
            formula,
            raw.ordinary_coeffs,
            raw.extraordinary_coeffs,
            (raw.valid_range_um[0], raw.valid_range_um[1]),
        )?;
        set.version = raw.version;
        Ok(set)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Material(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Material(m) => Error::Material(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The bundled BBO coefficients.
    pub fn bbo() -> Self {
        Self::from_toml_str(BBO_DATA).expect("bundled BBO data is valid")
    }

    /// A dispersionless uniaxial material with fixed indices.
    pub fn constant(n_o: f64, n_e: f64, range_um: (f64, f64)) -> Result<Self> {
        Self::new(
            "constant",
            "synthetic",
            FormulaId::Constant,
            vec![n_o],
            vec![n_e],
            range_um,
        )
    }

    pub fn formula(&self) -> FormulaId {
        self.formula
    }

    pub fn ordinary_coeffs(&self) -> &[f64] {
        &self.ordinary
    }

    pub fn extraordinary_coeffs(&self) -> &[f64] {
        &self.extraordinary
    }

    /// Valid wavelength interval in micrometres.
    pub fn valid_range_um(&self) -> (f64, f64) {
        self.range_um
    }

    fn to_um(&self, wavelength: f64) -> Result<f64> {
        let l = wavelength * 1e6;
        let (lo, hi) = self.range_um;
        if !(l >= lo && l <= hi) {
            return Err(Error::WavelengthOutOfRange {
                wavelength_um: l,
                min_um: lo,
                max_um: hi,
            });
        }
        Ok(l)
    }

    /// `(n_o, dn_o/dl)` with the derivative per micrometre.
    fn ordinary_at(&self, l_um: f64) -> (f64, f64) {
        self.formula.eval(&self.ordinary, l_um)
    }

    fn extraordinary_at(&self, l_um: f64) -> (f64, f64) {
        self.formula.eval(&self.extraordinary, l_um)
    }

    /// Principal extraordinary index n_e(l) (propagation normal to the optic axis).
    pub fn principal_extraordinary(&self, wavelength: f64) -> Result<f64> {
        Ok(self.extraordinary_at(self.to_um(wavelength)?).0)
    }
}

/// Which index surface a photon sees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Polarization {
    Ordinary,
    /// Extraordinary wave whose wavevector makes `theta` (rad) with the optic axis.
    Extraordinary { theta: f64 },
}

/// A uniaxial crystal cut so that the nominal pump direction makes
/// `cut_angle` (rad) with the optic axis.
#[derive(Clone, Debug, PartialEq)]
pub struct CrystalModel {
    pub sellmeier: SellmeierSet,
    pub cut_angle: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta))
    }
}

fn effective(n_o: f64, n_e: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (c * c / (n_o * n_o) + s * s / (n_e * n_e)).powf(-0.5)
}

impl CrystalModel {
    pub fn new(sellmeier: SellmeierSet, cut_angle: f64) -> Self {
        CrystalModel {
            sellmeier,
            cut_angle,
        }
    }

    pub fn index_ordinary(&self, wavelength: f64) -> Result<f64> {
        let l = self.sellmeier.to_um(wavelength)?;
        Ok(self.sellmeier.ordinary_at(l).0)
    }

    /// `n(theta) = [cos^2/n_o^2 + sin^2/n_e^2]^(-1/2)`.
    pub fn index_extraordinary_effective(&self, wavelength: f64, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        let l = self.sellmeier.to_um(wavelength)?;
        let n_o = self.sellmeier.ordinary_at(l).0;
        let n_e = self.sellmeier.extraordinary_at(l).0;
        Ok(effective(n_o, n_e, theta))
    }

    pub fn index(&self, wavelength: f64, pol: Polarization) -> Result<f64> {
        match pol {
            Polarization::Ordinary => self.index_ordinary(wavelength),
            Polarization::Extraordinary { theta } => self.index_extraordinary_effective(wavelength, theta),
        }
    }

    /// Walk-off angle `rho = -(1/n) dn/dtheta` of the extraordinary wave.
    ///
    /// Uses the analytic derivative `dn/dtheta = -n^3 sin cos (1/n_e^2 - 1/n_o^2)`,
    /// so `rho = n^2 sin(theta) cos(theta) (1/n_e^2 - 1/n_o^2)`; positive for
    /// a negative uniaxial crystal.
    pub fn walkoff_angle(&self, wavelength: f64, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        let l = self.sellmeier.to_um(wavelength)?;
        let n_o = self.sellmeier.ordinary_at(l).0;
        let n_e = self.sellmeier.extraordinary_at(l).0;
        let n = effective(n_o, n_e, theta);
        let (s, c) = theta.sin_cos();
        Ok(n * n * s * c * (1.0 / (n_e * n_e) - 1.0 / (n_o * n_o)))
    }

    /// Inverse group velocity `N = d(n omega)/d omega / c = (n - l dn/dl) / c`, in s/m.
    ///
    /// Extraordinary waves are evaluated at the fixed angle carried by the
    /// polarization; the frequency dependence of the propagation angle is
    /// neglected.
    pub fn group_index(&self, wavelength: f64, pol: Polarization) -> Result<f64> {
        let l = self.sellmeier.to_um(wavelength)?;
        let (lo, hi) = self.sellmeier.range_um;
        if l * (1.0 - STENCIL_REL) <= lo || l * (1.0 + STENCIL_REL) >= hi {
            return Err(Error::DerivativeStencil {
                wavelength_um: l,
                min_um: lo,
                max_um: hi,
            });
        }
        let (n, dn) = match pol {
            Polarization::Ordinary => self.sellmeier.ordinary_at(l),
            Polarization::Extraordinary { theta } => {
                check_theta(theta)?;
                let (n_o, dn_o) = self.sellmeier.ordinary_at(l);
                let (n_e, dn_e) = self.sellmeier.extraordinary_at(l);
                let n = effective(n_o, n_e, theta);
                let (s, c) = theta.sin_cos();
                let dn = n.powi(3) * (c * c * dn_o / n_o.powi(3) + s * s * dn_e / n_e.powi(3));
                (n, dn)
            }
        };
        Ok((n - l * dn) / SPEED_OF_LIGHT)
    }

    /// Angle between the extraordinary photon's wavevector and the optic axis
    /// when it is emitted at internal angle `phi_e` in the plane normal to
    /// the walk-off plane: `cos(theta_e) = cos(theta_cut) cos(phi_e)`.
    pub fn extraordinary_photon_angle(&self, phi_e: f64) -> f64 {
        (self.cut_angle.cos() * phi_e.cos()).clamp(-1.0, 1.0).acos()
    }
}

/// Wavelengths of the three interacting fields, in metres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavelengths {
    pub pump: f64,
    pub extraordinary: f64,
    pub ordinary: f64,
}

impl Wavelengths {
    /// Degenerate down-conversion: both photons at twice the pump wavelength.
    pub fn degenerate(pump: f64) -> Self {
        Wavelengths {
            pump,
            extraordinary: 2.0 * pump,
            ordinary: 2.0 * pump,
        }
    }
}

/// Longitudinal wavevector mismatch `k_p - k_e cos(phi_e) - k_o cos(phi_o)` (rad/m)
/// for an extraordinary pump along the cut direction at angle `theta`.
pub fn longitudinal_mismatch(
    sellmeier: &SellmeierSet,
    lambdas: Wavelengths,
    theta: f64,
    phi_e: f64,
    phi_o: f64,
) -> Result<f64> {
    let model = CrystalModel::new(sellmeier.clone(), theta);
    let two_pi = 2.0 * std::f64::consts::PI;
    let k_p = two_pi * model.index_extraordinary_effective(lambdas.pump, theta)? / lambdas.pump;
    let theta_e = model.extraordinary_photon_angle(phi_e);
    let k_e = two_pi * model.index_extraordinary_effective(lambdas.extraordinary, theta_e)? / lambdas.extraordinary;
    let k_o = two_pi * model.index_ordinary(lambdas.ordinary)? / lambdas.ordinary;
    Ok(k_p - k_e * phi_e.cos() - k_o * phi_o.cos())
}

const ANGLE_SAMPLES: usize = 900;

/// Cut angles for which non-collinear type-II emission can be phase matched,
/// i.e. where the collinear mismatch is non-positive. Returned as `(min, max)` in rad.
pub fn phase_matchable_range(sellmeier: &SellmeierSet, lambdas: Wavelengths) -> Result<(f64, f64)> {
    let f = |t: f64| longitudinal_mismatch(sellmeier, lambdas, t, 0.0, 0.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut prev_t = 0.0;
    if f(prev_t)? <= 0.0 {
        return Ok((0.0, half_pi));
    }
    for i in 1..=ANGLE_SAMPLES {
        let t = half_pi * i as f64 / ANGLE_SAMPLES as f64;
        let v = f(t)?;
        if v <= 0.0 {
            let start = bisect(f, prev_t, t, 1e-12)?;
            return Ok((start, half_pi));
        }
        prev_t = t;
    }
    Err(Error::invalid(
        "crystal.cut_angle_deg",
        format!(
            "no phase-matchable cut angle for pump {:.1} nm in {}",
            lambdas.pump * 1e9,
            sellmeier.name
        ),
    ))
}

/// Cut angle at which the given internal emission angles are phase matched.
pub fn solve_cut_angle(sellmeier: &SellmeierSet, lambdas: Wavelengths, phi_e: f64, phi_o: f64) -> Result<f64> {
    let f = |t: f64| longitudinal_mismatch(sellmeier, lambdas, t, phi_e, phi_o);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut prev_t = 0.0;
    let mut prev = f(prev_t)?;
    for i in 1..=ANGLE_SAMPLES {
        let t = half_pi * i as f64 / ANGLE_SAMPLES as f64;
        let v = f(t)?;
        if prev.signum() != v.signum() {
            return bisect(f, prev_t, t, 1e-13);
        }
        prev_t = t;
        prev = v;
    }
    Err(Error::invalid(
        "geometry",
        "emission angles cannot be phase matched at any cut angle",
    ))
}
