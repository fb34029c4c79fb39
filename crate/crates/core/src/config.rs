//! Run configuration.
//!
//! Values are written in lab units (nm, um, mm, deg) and converted to SI once,
//! in [`RunConfig::resolve`]. Absent keys take the lab defaults: 407 nm pump
//! with 42 x 31 um waists, 4 mm BBO, 6 deg external half-opening angle,
//! 814 nm / 5 nm filters, 750 mm lenses, 2 mm pinholes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correlation::{ScanAxis, ScanPlan, ScanRange};
use crate::dispersion::{
    phase_matchable_range, solve_cut_angle, CrystalModel, Polarization, SellmeierSet, Wavelengths, BBO_DATA,
};
use crate::error::{Error, Result};
use crate::kernel::{ModeKind, PumpEnvelope, PumpSpectrum, SpdcGeometry};
use crate::trace::{DetectionAssignment, FourierPlaneMap, QuadratureSettings, Setup, SpectralFilter};

const NM: f64 = 1e-9;
const UM: f64 = 1e-6;
const MM: f64 = 1e-3;
/// Relative tolerance on `1/lambda_p = 1/lambda_e + 1/lambda_o`.
const ENERGY_TOL: f64 = 1e-6;
const REFRACTION_ITERATIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpConfig {
    pub wavelength_nm: f64,
    pub waist_x_um: f64,
    pub waist_y_um: f64,
    /// `monochromatic` or `gaussian`.
    pub spectral_mode: String,
    /// Intensity FWHM, required for a Gaussian spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_nm: Option<f64>,
}

impl Default for PumpConfig {
    fn default() -> Self {
        PumpConfig {
            wavelength_nm: 407.0,
            waist_x_um: 42.0,
            waist_y_um: 31.0,
            spectral_mode: "monochromatic".into(),
            bandwidth_nm: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrystalConfig {
    /// Material-data file; the bundled BBO data when absent. Relative paths
    /// are taken from the config file's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<PathBuf>,
    pub length_mm: f64,
    /// Solved from phase matching at the emission angles when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut_angle_deg: Option<f64>,
}

impl Default for CrystalConfig {
    fn default() -> Self {
        CrystalConfig {
            material: None,
            length_mm: 4.0,
            cut_angle_deg: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// External half-opening angle of the emission cones; 6 deg when neither
    /// this nor the internal pair is set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_open_angle_ext_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_e_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_o_deg: Option<f64>,
    /// Refract each arm with its own index instead of `n_o` at the filter centre.
    pub per_polarization_refraction: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiltersConfig {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_e_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_o_nm: Option<f64>,
}

impl Default for FiltersConfig {
    fn default() -> Self {
        FiltersConfig {
            center_nm: 814.0,
            fwhm_nm: 5.0,
            center_e_nm: None,
            center_o_nm: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsConfig {
    pub focal_mm: f64,
    pub pinhole_mm: f64,
    /// Convolve scans with the pinhole aperture.
    pub apply_pinhole: bool,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        OpticsConfig {
            focal_mm: 750.0,
            pinhole_mm: 2.0,
            apply_pinhole: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub axis: String,
    pub assignment: String,
    pub points: usize,
    /// Fourier-plane position range for both detectors; auto-sized when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range_mm: Option<[f64; 2]>,
    pub orthogonal_mm: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            axis: "y".into(),
            assignment: "ea".into(),
            points: 64,
            range_mm: None,
            orthogonal_mm: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// `gaussian_approx` or `exact_sinc`.
    pub mode: String,
    pub quadrature_nodes: usize,
    pub window_sigmas: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let q = QuadratureSettings::default();
        ModelConfig {
            mode: "gaussian_approx".into(),
            quadrature_nodes: q.nodes,
            window_sigmas: q.window_sigmas,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pump: PumpConfig,
    pub crystal: CrystalConfig,
    pub geometry: GeometryConfig,
    pub filters: FiltersConfig,
    pub optics: OpticsConfig,
    pub scan: ScanConfig,
    pub model: ModelConfig,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Everything a run needs, in SI units.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub setup: Setup,
    pub plan: ScanPlan,
    pub crystal: CrystalModel,
    pub wavelengths: Wavelengths,
    /// sha256 of the canonical config text and the material data.
    pub digest: String,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be > 0, got {v}")))
    }
}

fn angle_deg(field: &str, v: f64) -> Result<()> {
    if (0.0..90.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must lie in [0, 90) deg, got {v}")))
    }
}

/// Reads and validates a config file. Parse errors carry line information.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_toml_str(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    Ok(cfg)
}

enum AngleSpec {
    External(f64),
    Internal(f64, f64),
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical text with every default filled in.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.pump;
        positive("pump.wavelength_nm", p.wavelength_nm)?;
        positive("pump.waist_x_um", p.waist_x_um)?;
        positive("pump.waist_y_um", p.waist_y_um)?;
        self.pump_spectrum_kind()?;
        if let Some(b) = p.bandwidth_nm {
            positive("pump.bandwidth_nm", b)?;
        }

        positive("crystal.length_mm", self.crystal.length_mm)?;
        if let Some(t) = self.crystal.cut_angle_deg {
            if !(t > 0.0 && t < 90.0) {
                return Err(Error::invalid("crystal.cut_angle_deg", format!("must lie in (0, 90) deg, got {t}")));
            }
        }
        self.angle_spec()?;

        let f = &self.filters;
        positive("filters.center_nm", f.center_nm)?;
        positive("filters.fwhm_nm", f.fwhm_nm)?;
        if let Some(v) = f.center_e_nm {
            positive("filters.center_e_nm", v)?;
        }
        if let Some(v) = f.center_o_nm {
            positive("filters.center_o_nm", v)?;
        }
        let (le, lo) = self.arm_centers_nm();
        let mismatch = (1.0 / p.wavelength_nm - 1.0 / le - 1.0 / lo).abs() * p.wavelength_nm;
        if mismatch > ENERGY_TOL {
            return Err(Error::invalid(
                "filters.center_nm",
                format!(
                    "filter centres {le} nm and {lo} nm violate energy conservation with the {} nm pump",
                    p.wavelength_nm
                ),
            ));
        }

        positive("optics.focal_mm", self.optics.focal_mm)?;
        if !(self.optics.pinhole_mm >= 0.0 && self.optics.pinhole_mm.is_finite()) {
            return Err(Error::invalid("optics.pinhole_mm", "must be >= 0"));
        }

        self.scan_axis()?;
        self.scan_assignment()?;
        if self.scan.points < 8 {
            return Err(Error::invalid("scan.points", format!("need at least 8, got {}", self.scan.points)));
        }
        if let Some([a, b]) = self.scan.range_mm {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(Error::invalid("scan.range_mm", format!("need min < max, got [{a}, {b}]")));
            }
        }
        if !self.scan.orthogonal_mm.is_finite() {
            return Err(Error::invalid("scan.orthogonal_mm", "must be finite"));
        }

        self.mode()?;
        if self.model.quadrature_nodes < 3 {
            return Err(Error::invalid("model.quadrature_nodes", "need at least 3"));
        }
        positive("model.window_sigmas", self.model.window_sigmas)?;
        Ok(())
    }

    fn angle_spec(&self) -> Result<AngleSpec> {
        let g = &self.geometry;
        match (g.half_open_angle_ext_deg, g.phi_e_deg, g.phi_o_deg) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::invalid(
                "geometry",
                "give either half_open_angle_ext_deg or phi_e_deg/phi_o_deg, not both",
            )),
            (Some(ext), None, None) => {
                if !(ext > 0.0 && ext < 90.0) {
                    return Err(Error::invalid(
                        "geometry.half_open_angle_ext_deg",
                        format!("must lie in (0, 90) deg, got {ext}"),
                    ));
                }
                Ok(AngleSpec::External(ext))
            }
            (None, Some(e), Some(o)) => {
                angle_deg("geometry.phi_e_deg", e)?;
                angle_deg("geometry.phi_o_deg", o)?;
                Ok(AngleSpec::Internal(e, o))
            }
            (None, Some(_), None) => Err(Error::invalid("geometry.phi_o_deg", "missing; phi_e_deg needs a partner")),
            (None, None, Some(_)) => Err(Error::invalid("geometry.phi_e_deg", "missing; phi_o_deg needs a partner")),
            (None, None, None) => Ok(AngleSpec::External(6.0)),
        }
    }

    fn arm_centers_nm(&self) -> (f64, f64) {
        let f = &self.filters;
        (f.center_e_nm.unwrap_or(f.center_nm), f.center_o_nm.unwrap_or(f.center_nm))
    }

    fn pump_spectrum_kind(&self) -> Result<bool> {
        match self.pump.spectral_mode.as_str() {
            "monochromatic" => Ok(false),
            "gaussian" => {
                if self.pump.bandwidth_nm.is_none() {
                    return Err(Error::invalid("pump.bandwidth_nm", "required when spectral_mode = \"gaussian\""));
                }
                Ok(true)
            }
            other => Err(Error::invalid(
                "pump.spectral_mode",
                format!("expected `monochromatic` or `gaussian`, got `{other}`"),
            )),
        }
    }

    pub fn scan_axis(&self) -> Result<ScanAxis> {
        self.scan.axis.parse().map_err(|_| {
            Error::invalid("scan.axis", format!("expected `x` or `y`, got `{}`", self.scan.axis))
        })
    }

    pub fn scan_assignment(&self) -> Result<DetectionAssignment> {
        self.scan.assignment.parse().map_err(|_| {
            Error::invalid("scan.assignment", format!("expected `ea` or `oa`, got `{}`", self.scan.assignment))
        })
    }

    pub fn mode(&self) -> Result<ModeKind> {
        match self.model.mode.as_str() {
            "gaussian_approx" => Ok(ModeKind::GaussianApprox),
            "exact_sinc" => Ok(ModeKind::ExactSinc),
            other => Err(Error::invalid(
                "model.mode",
                format!("expected `gaussian_approx` or `exact_sinc`, got `{other}`"),
            )),
        }
    }

    /// Path of the configured material file, if any, relative paths joined to
    /// the config's directory.
    pub fn material_path(&self) -> Option<PathBuf> {
        self.crystal.material.as_ref().map(|p| match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    }

    /// Raw text of the material data in use.
    pub fn material_text(&self) -> Result<String> {
        match self.material_path() {
            None => Ok(BBO_DATA.to_owned()),
            Some(p) => {
                std::fs::read_to_string(&p).map_err(|e| Error::Material(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn load_material(&self) -> Result<SellmeierSet> {
        match self.material_path() {
            None => Ok(SellmeierSet::bbo()),
            Some(p) => SellmeierSet::from_file(p),
        }
    }

    pub fn digest(&self) -> Result<String> {
        let mut h = Sha256::new();
        h.update(self.to_toml_string().as_bytes());
        h.update(b"\n--material--\n");
        h.update(self.material_text()?.as_bytes());
        Ok(hex::encode(h.finalize()))
    }

    /// Converts to SI and derives the crystal-dependent geometry.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        self.validate()?;
        let sellmeier = self.load_material()?;
        let (le, lo) = self.arm_centers_nm();
        let lambdas = Wavelengths {
            pump: self.pump.wavelength_nm * NM,
            extraordinary: le * NM,
            ordinary: lo * NM,
        };

        let (phi_e, phi_o, cut) = self.resolve_angles(&sellmeier, lambdas)?;
        let crystal = CrystalModel::new(sellmeier, cut);
        let theta_e = crystal.extraordinary_photon_angle(phi_e);
        let geometry = SpdcGeometry {
            phi_e,
            phi_o,
            rho_p: crystal.walkoff_angle(lambdas.pump, cut)?,
            rho_e: crystal.walkoff_angle(lambdas.extraordinary, theta_e)?,
            group_p: crystal.group_index(lambdas.pump, Polarization::Extraordinary { theta: cut })?,
            group_e: crystal.group_index(lambdas.extraordinary, Polarization::Extraordinary { theta: cut })?,
            group_o: crystal.group_index(lambdas.ordinary, Polarization::Ordinary)?,
            length: self.crystal.length_mm * MM,
        };
        geometry.validate()?;

        let fwhm = self.filters.fwhm_nm * NM;
        let filter_e = SpectralFilter::from_fwhm(lambdas.extraordinary, fwhm)?;
        let filter_o = SpectralFilter::from_fwhm(lambdas.ordinary, fwhm)?;
        let spectrum = if self.pump_spectrum_kind()? {
            let bw = self.pump.bandwidth_nm.unwrap_or_default() * NM;
            PumpSpectrum::Gaussian {
                sigma: SpectralFilter::from_fwhm(lambdas.pump, bw)?.sigma,
            }
        } else {
            PumpSpectrum::Monochromatic
        };
        let pump = PumpEnvelope {
            waist_x: self.pump.waist_x_um * UM,
            waist_y: self.pump.waist_y_um * UM,
            spectrum,
        };
        pump.validate()?;
        let map = FourierPlaneMap {
            focal_length: self.optics.focal_mm * MM,
            wavelength_e: lambdas.extraordinary,
            wavelength_o: lambdas.ordinary,
        };
        map.validate()?;
        let setup = Setup {
            geometry,
            pump,
            filter_e,
            filter_o,
            map,
            mode: self.mode()?,
            quadrature: QuadratureSettings {
                nodes: self.model.quadrature_nodes,
                window_sigmas: self.model.window_sigmas,
                ..QuadratureSettings::default()
            },
            pinhole_diameter: if self.optics.apply_pinhole {
                self.optics.pinhole_mm * MM
            } else {
                0.0
            },
        };

        let range = match self.scan.range_mm {
            Some([a, b]) => ScanRange::Fixed {
                a: (a * MM, b * MM),
                b: (a * MM, b * MM),
            },
            None => ScanRange::Auto,
        };
        let plan = ScanPlan {
            axis: self.scan_axis()?,
            assignment: self.scan_assignment()?,
            range,
            points: self.scan.points,
            orthogonal: self.scan.orthogonal_mm * MM,
        };
        plan.validate()?;

        Ok(ResolvedConfig {
            setup,
            plan,
            crystal,
            wavelengths: lambdas,
            digest: self.digest()?,
        })
    }

    /// Internal emission angles and cut angle, rad.
    ///
    /// External angles are refracted with `sin(ext) = n sin(phi)`, using
    /// `n_o` at each arm's filter centre, or each arm's own index when
    /// `per_polarization_refraction` is set. The cut angle, when not given,
    /// is the one that phase matches the resulting internal angles.
    fn resolve_angles(&self, sellmeier: &SellmeierSet, lambdas: Wavelengths) -> Result<(f64, f64, f64)> {
        let given_cut = self.crystal.cut_angle_deg.map(f64::to_radians);
        if let Some(cut) = given_cut {
            let (lo, hi) = phase_matchable_range(sellmeier, lambdas)?;
            if cut < lo || cut > hi {
                return Err(Error::invalid(
                    "crystal.cut_angle_deg",
                    format!(
                        "{:.4} deg is outside the phase-matchable range [{:.4}, {:.4}] deg",
                        cut.to_degrees(),
                        lo.to_degrees(),
                        hi.to_degrees()
                    ),
                ));
            }
        }
        let cut_for = |phi_e: f64, phi_o: f64| match given_cut {
            Some(c) => Ok(c),
            None => solve_cut_angle(sellmeier, lambdas, phi_e, phi_o),
        };
        match self.angle_spec()? {
            AngleSpec::Internal(e, o) => {
                let (phi_e, phi_o) = (e.to_radians(), o.to_radians());
                Ok((phi_e, phi_o, cut_for(phi_e, phi_o)?))
            }
            AngleSpec::External(ext) => {
                let s = ext.to_radians().sin();
                let probe = CrystalModel::new(sellmeier.clone(), 0.0);
                let n_o_e = probe.index_ordinary(lambdas.extraordinary)?;
                let n_o_o = probe.index_ordinary(lambdas.ordinary)?;
                let phi_o = (s / n_o_o).asin();
                let mut phi_e = (s / n_o_e).asin();
                let mut cut = cut_for(phi_e, phi_o)?;
                if self.geometry.per_polarization_refraction {
                    for _ in 0..REFRACTION_ITERATIONS {
                        let model = CrystalModel::new(sellmeier.clone(), cut);
                        let theta_e = model.extraordinary_photon_angle(phi_e);
                        let n_e = model.index_extraordinary_effective(lambdas.extraordinary, theta_e)?;
                        phi_e = (s / n_e).asin();
                        cut = cut_for(phi_e, phi_o)?;
                    }
                }
                Ok((phi_e, phi_o, cut))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_field(text: &str) -> String {
        match RunConfig::from_toml_str(text).unwrap_err() {
            Error::InvalidParameter { field, .. } => field,
            other => panic!("expected a field error, got {other}"),
        }
    }

    #[test]
    fn empty_file_gives_lab_defaults() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.pump.wavelength_nm, 407.0);
        assert_eq!((c.pump.waist_x_um, c.pump.waist_y_um), (42.0, 31.0));
        assert_eq!(c.crystal.length_mm, 4.0);
        assert_eq!(c.filters.center_nm, 814.0);
        assert_eq!(c.filters.fwhm_nm, 5.0);
        assert_eq!(c.optics.focal_mm, 750.0);
        assert_eq!(c.optics.pinhole_mm, 2.0);
        let empty_sections = "[pump]\n[crystal]\n[geometry]\n[filters]\n[optics]\n[scan]\n[model]\n";
        assert_eq!(RunConfig::from_toml_str(empty_sections).unwrap(), c);
    }

    #[test]
    fn defaults_resolve_to_si() {
        let r = RunConfig::default().resolve().unwrap();
        let s = &r.setup;
        assert!((s.pump.waist_y - 31e-6).abs() < 1e-18);
        assert!((s.geometry.length - 4e-3).abs() < 1e-15);
        assert!((s.map.focal_length - 0.75).abs() < 1e-15);
        // 6 deg external refracted with n_o ~ 1.66
        let phi = s.geometry.phi_e.to_degrees();
        assert!(phi > 3.0 && phi < 4.0, "{phi}");
        assert_eq!(s.geometry.phi_e, s.geometry.phi_o);
        let cut = r.crystal.cut_angle.to_degrees();
        assert!(cut > 40.0 && cut < 50.0, "{cut}");
        assert!(s.geometry.rho_p > 0.0 && s.geometry.rho_e > 0.0);
        assert_eq!(r.digest.len(), 64);
    }

    #[test]
    fn negative_length_names_the_field() {
        assert_eq!(err_field("[crystal]\nlength_mm = -4\n"), "crystal.length_mm");
    }

    #[test]
    fn both_angle_specs_are_rejected() {
        let f = err_field("[geometry]\nhalf_open_angle_ext_deg = 6\nphi_e_deg = 3.6\nphi_o_deg = 3.6\n");
        assert_eq!(f, "geometry");
        assert_eq!(err_field("[geometry]\nphi_e_deg = 3.6\n"), "geometry.phi_o_deg");
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let e = RunConfig::from_toml_str("[pump]\nwavelenght_nm = 407\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("wavelenght_nm"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        assert!(RunConfig::from_toml_str("[nonsense]\n").is_err());
    }

    #[test]
    fn energy_conservation_is_checked() {
        assert_eq!(err_field("[filters]\ncenter_e_nm = 810\n"), "filters.center_nm");
        let ok = "[filters]\ncenter_e_nm = 810\ncenter_o_nm = 818.0393120393121\n";
        assert!(RunConfig::from_toml_str(ok).is_ok());
    }

    #[test]
    fn explicit_internal_angles_pass_through() {
        let c = RunConfig::from_toml_str("[geometry]\nphi_e_deg = 3.5\nphi_o_deg = 3.7\n").unwrap();
        let r = c.resolve().unwrap();
        assert!((r.setup.geometry.phi_e - 3.5f64.to_radians()).abs() < 1e-15);
        assert!((r.setup.geometry.phi_o - 3.7f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn cut_angle_outside_phase_matching_is_rejected() {
        let c = RunConfig::from_toml_str("[crystal]\ncut_angle_deg = 20\n").unwrap();
        match c.resolve().unwrap_err() {
            Error::InvalidParameter { field, .. } => assert_eq!(field, "crystal.cut_angle_deg"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn per_polarization_refraction_bends_the_e_arm_less() {
        let c = RunConfig::from_toml_str("[geometry]\nper_polarization_refraction = true\n").unwrap();
        let g = c.resolve().unwrap().setup.geometry;
        // n_e(theta) < n_o in a negative crystal
        assert!(g.phi_e > g.phi_o);
    }

    #[test]
    fn gaussian_pump_needs_bandwidth() {
        assert_eq!(err_field("[pump]\nspectral_mode = \"gaussian\"\n"), "pump.bandwidth_nm");
        let c = RunConfig::from_toml_str("[pump]\nspectral_mode = \"gaussian\"\nbandwidth_nm = 0.1\n").unwrap();
        assert!(matches!(c.resolve().unwrap().setup.pump.spectrum, PumpSpectrum::Gaussian { .. }));
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunConfig::default().digest().unwrap();
        let b = RunConfig::from_toml_str("[scan]\npoints = 65\n").unwrap().digest().unwrap();
        assert_ne!(a, b);
        assert_eq!(a, RunConfig::from_toml_str("").unwrap().digest().unwrap());
    }

    #[test]
    fn relative_material_path_and_corrupt_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.toml"), "name = \"x\"\n").unwrap();
        let cfg_path = dir.path().join("run.toml");
        std::fs::write(&cfg_path, "[crystal]\nmaterial = \"bad.toml\"\n").unwrap();
        let c = load_config(&cfg_path).unwrap();
        assert_eq!(c.material_path().unwrap(), dir.path().join("bad.toml"));
        assert!(matches!(c.resolve().unwrap_err(), Error::Material(_)));
    }
}
