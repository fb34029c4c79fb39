//! Phase-matching functions and the biphoton mode function.
//!
//! All quantities are SI: transverse wavevectors in rad/m, detunings in
//! rad/s, group indices as inverse velocities in s/m, lengths in m. The
//! functions are pure and carry no unit constants, so any consistent unit
//! system works.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::dispersion::SPEED_OF_LIGHT;

/// Width-matching constant of the Gaussian stand-in `sinc(x) ~ exp(-gamma x^2)`.
pub const SINC_GAUSSIAN_GAMMA: f64 = 0.193;

/// Complex biphoton amplitude; unity at the all-zero argument.
pub type BiphotonAmplitude = Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TransverseWavevector {
    pub qx: f64,
    pub qy: f64,
}

impl TransverseWavevector {
    pub const ZERO: TransverseWavevector = TransverseWavevector { qx: 0.0, qy: 0.0 };

    pub fn new(qx: f64, qy: f64) -> Self {
        TransverseWavevector { qx, qy }
    }

    pub fn norm(&self) -> f64 {
        self.qx.hypot(self.qy)
    }

    /// `|q| / k0` for a photon of vacuum wavelength `wavelength`.
    pub fn paraxial_fraction(&self, wavelength: f64) -> f64 {
        self.norm() * wavelength / (2.0 * std::f64::consts::PI)
    }

    pub fn scaled(&self, s: f64) -> Self {
        TransverseWavevector::new(self.qx * s, self.qy * s)
    }
}

/// Everything the phase-matching functions consume.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdcGeometry {
    /// Internal emission angle of the extraordinary photon (rad, magnitude).
    pub phi_e: f64,
    /// Internal emission angle of the ordinary photon (rad, magnitude).
    pub phi_o: f64,
    /// Pump walk-off (rad).
    pub rho_p: f64,
    /// Extraordinary-photon walk-off (rad).
    pub rho_e: f64,
    /// Inverse group velocities, s/m.
    pub group_p: f64,
    pub group_e: f64,
    pub group_o: f64,
    /// Crystal length, m.
    pub length: f64,
}

impl SpdcGeometry {
    /// SI sanity checks; the kernel itself never calls this.
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::invalid("geometry.length", "must be > 0"));
        }
        for (name, phi) in [("geometry.phi_e", self.phi_e), ("geometry.phi_o", self.phi_o)] {
            if !(0.0..std::f64::consts::FRAC_PI_2).contains(&phi) {
                return Err(Error::invalid(name, "must lie in [0, pi/2)"));
            }
        }
        for (name, n) in [
            ("geometry.group_p", self.group_p),
            ("geometry.group_e", self.group_e),
            ("geometry.group_o", self.group_o),
        ] {
            if !(n > 1.0 / SPEED_OF_LIGHT && n.is_finite()) {
                return Err(Error::invalid(name, "inverse group velocity must exceed 1/c"));
            }
        }
        if !(self.rho_p.is_finite() && self.rho_e.is_finite()) {
            return Err(Error::invalid("geometry.rho", "walk-off angles must be finite"));
        }
        Ok(())
    }

    /// Same geometry with both walk-off angles removed.
    pub fn without_walkoff(&self) -> Self {
        SpdcGeometry {
            rho_p: 0.0,
            rho_e: 0.0,
            ..*self
        }
    }

    /// Coefficients of `(Omega_e, Omega_o)` in `delta1` and `delta_k`.
    pub fn frequency_coefficients(&self) -> ([f64; 2], [f64; 2]) {
        let (se, ce) = self.phi_e.sin_cos();
        let (so, co) = self.phi_o.sin_cos();
        (
            [-self.group_e * se, self.group_o * so],
            [self.group_p - self.group_e * ce, self.group_p - self.group_o * co],
        )
    }
}

/// Spectral profile of the pump, entering as `beta(Omega_e, Omega_o)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PumpSpectrum {
    /// CW pump: the trace is restricted to `Omega_o = -Omega_e` and beta is 1 on it.
    Monochromatic,
    /// `beta = exp[-(Omega_e + Omega_o)^2 / (4 sigma^2)]`, sigma in rad/s.
    Gaussian { sigma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PumpEnvelope {
    /// Waist multiplying `delta0` (x, walk-off plane), m.
    pub waist_x: f64,
    /// Waist multiplying `delta1` (y, emission plane), m.
    pub waist_y: f64,
    pub spectrum: PumpSpectrum,
}

impl PumpEnvelope {
    pub fn isotropic(waist: f64, spectrum: PumpSpectrum) -> Self {
        PumpEnvelope {
            waist_x: waist,
            waist_y: waist,
            spectrum,
        }
    }

    pub fn with_waist(&self, waist: f64) -> Self {
        PumpEnvelope::isotropic(waist, self.spectrum)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist_x > 0.0 && self.waist_x.is_finite()) {
            return Err(Error::invalid("pump.waist_x", "must be > 0"));
        }
        if !(self.waist_y > 0.0 && self.waist_y.is_finite()) {
            return Err(Error::invalid("pump.waist_y", "must be > 0"));
        }
        if let PumpSpectrum::Gaussian { sigma } = self.spectrum {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::invalid("pump.bandwidth", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Which longitudinal factor the mode function uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    ExactSinc,
    GaussianApprox,
}

pub fn delta0(q_e: TransverseWavevector, q_o: TransverseWavevector) -> f64 {
    q_e.qx + q_o.qx
}

pub fn delta1(
    q_e: TransverseWavevector,
    omega_e: f64,
    q_o: TransverseWavevector,
    omega_o: f64,
    geom: &SpdcGeometry,
) -> f64 {
    let (se, ce) = geom.phi_e.sin_cos();
    let (so, co) = geom.phi_o.sin_cos();
    q_e.qy * ce + q_o.qy * co - geom.group_e * omega_e * se + geom.group_o * omega_o * so
        - geom.rho_e * q_e.qx * se
}

pub fn delta_k(
    q_e: TransverseWavevector,
    omega_e: f64,
    q_o: TransverseWavevector,
    omega_o: f64,
    geom: &SpdcGeometry,
) -> f64 {
    let (se, ce) = geom.phi_e.sin_cos();
    let (so, co) = geom.phi_o.sin_cos();
    geom.group_p * (omega_e + omega_o) - geom.group_e * omega_e * ce - geom.group_o * omega_o * co
        - q_e.qy * se
        + q_o.qy * so
        + geom.rho_p * delta0(q_e, q_o)
        - geom.rho_e * q_e.qx * ce
}

/// Transverse pump profile `exp[-(w_x^2 d0^2 + w_y^2 d1^2) / 4]`.
pub fn pump_alpha(d0: f64, d1: f64, pump: &PumpEnvelope) -> f64 {
    let a = pump.waist_x * d0;
    let b = pump.waist_y * d1;
    (-(a * a + b * b) / 4.0).exp()
}

pub fn pump_beta(omega_e: f64, omega_o: f64, pump: &PumpEnvelope) -> f64 {
    match pump.spectrum {
        PumpSpectrum::Monochromatic => 1.0,
        PumpSpectrum::Gaussian { sigma } => {
            let s = omega_e + omega_o;
            (-s * s / (4.0 * sigma * sigma)).exp()
        }
    }
}

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Longitudinal factor at `x = delta_k L / 2`, without the phase.
pub fn longitudinal_envelope(x: f64, mode: ModeKind) -> f64 {
    match mode {
        ModeKind::ExactSinc => sinc(x),
        ModeKind::GaussianApprox => (-SINC_GAUSSIAN_GAMMA * x * x).exp(),
    }
}

/// Peak-normalised mode function
/// `alpha(d0, d1) beta(Oe, Oo) F(dk L/2) exp(i dk L/2)`, with `F` the sinc or
/// its Gaussian stand-in.
pub fn mode_function(
    q_e: TransverseWavevector,
    omega_e: f64,
    q_o: TransverseWavevector,
    omega_o: f64,
    geom: &SpdcGeometry,
    pump: &PumpEnvelope,
    mode: ModeKind,
) -> BiphotonAmplitude {
    let d0 = delta0(q_e, q_o);
    let d1 = delta1(q_e, omega_e, q_o, omega_o, geom);
    let x = 0.5 * delta_k(q_e, omega_e, q_o, omega_o, geom) * geom.length;
    let magnitude = pump_alpha(d0, d1, pump) * pump_beta(omega_e, omega_o, pump) * longitudinal_envelope(x, mode);
    Complex64::from_polar(magnitude, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn test_geometry() -> SpdcGeometry {
        SpdcGeometry {
            phi_e: 0.065,
            phi_o: 0.063,
            rho_p: 0.0765,
            rho_e: 0.0724,
            group_p: 1.6986 / SPEED_OF_LIGHT,
            group_e: 1.6212 / SPEED_OF_LIGHT,
            group_o: 1.6836 / SPEED_OF_LIGHT,
            length: 4e-3,
        }
    }

    /// Written out from the printed expressions, sharing nothing with the
    /// implementation above.
    fn delta1_oracle(qex: f64, qey: f64, we: f64, qox: f64, qoy: f64, wo: f64, g: &SpdcGeometry) -> f64 {
        let _ = qox;
        let terms = [
            qey * g.phi_e.cos(),
            qoy * g.phi_o.cos(),
            -(g.group_e * we * g.phi_e.sin()),
            g.group_o * wo * g.phi_o.sin(),
            -(g.rho_e * qex * g.phi_e.sin()),
        ];
        terms.iter().sum()
    }

    fn delta_k_oracle(qex: f64, qey: f64, we: f64, qox: f64, qoy: f64, wo: f64, g: &SpdcGeometry) -> f64 {
        let d0 = qex + qox;
        let terms = [
            g.group_p * (we + wo),
            -(g.group_e * we * g.phi_e.cos()),
            -(g.group_o * wo * g.phi_o.cos()),
            -(qey * g.phi_e.sin()),
            qoy * g.phi_o.sin(),
            g.rho_p * d0,
            -(g.rho_e * qex * g.phi_e.cos()),
        ];
        terms.iter().sum()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn delta0_cases() {
        let z = TransverseWavevector::ZERO;
        assert_eq!(delta0(z, z), 0.0);
        let k = 12345.0;
        assert_eq!(delta0(TransverseWavevector::new(k, 3.0), TransverseWavevector::new(-k, 7.0)), 0.0);
        assert_eq!(
            delta0(TransverseWavevector::new(1000.0, 0.0), TransverseWavevector::new(500.0, 0.0)),
            1500.0
        );
    }

    #[test]
    fn deltas_vanish_at_origin() {
        let g = test_geometry();
        let z = TransverseWavevector::ZERO;
        assert_eq!(delta1(z, 0.0, z, 0.0, &g), 0.0);
        assert_eq!(delta_k(z, 0.0, z, 0.0, &g), 0.0);
    }

    #[test]
    fn reduced_forms() {
        let phi = 0.07;
        let g = SpdcGeometry {
            phi_e: phi,
            phi_o: phi,
            rho_p: 0.0,
            rho_e: 0.0,
            ..test_geometry()
        };
        let qe = TransverseWavevector::new(2.0e3, 3.0e4);
        let qo = TransverseWavevector::new(-1.0e3, -1.1e4);
        let d1 = delta1(qe, 0.0, qo, 0.0, &g);
        assert!(rel(d1, (qe.qy + qo.qy) * phi.cos()) < 1e-14);
        let dk = delta_k(qe, 0.0, qo, 0.0, &g);
        assert!(rel(dk, (qo.qy - qe.qy) * phi.sin()) < 1e-14);
    }

    #[test]
    fn pump_alpha_cases() {
        let iso = PumpEnvelope::isotropic(31e-6, PumpSpectrum::Monochromatic);
        assert_eq!(pump_alpha(0.0, 0.0, &iso), 1.0);
        // d0^2 + d1^2 = 4 / w^2
        let w = iso.waist_x;
        let d = (2.0f64).sqrt() / w;
        assert!((pump_alpha(d, d, &iso) - (-1.0f64).exp()).abs() < 1e-15);

        let aniso = PumpEnvelope {
            waist_x: 42e-6,
            waist_y: 31e-6,
            spectrum: PumpSpectrum::Monochromatic,
        };
        let (d0, d1) = (1.7e4, -2.3e4);
        let expected = (-((42e-6f64 * 1.7e4).powi(2) + (31e-6f64 * 2.3e4).powi(2)) / 4.0).exp();
        assert!(rel(pump_alpha(d0, d1, &aniso), expected) < 1e-12);
    }

    #[test]
    fn peak_normalisation() {
        let g = test_geometry();
        let z = TransverseWavevector::ZERO;
        for spectrum in [PumpSpectrum::Monochromatic, PumpSpectrum::Gaussian { sigma: 1e12 }] {
            let pump = PumpEnvelope::isotropic(31e-6, spectrum);
            for mode in [ModeKind::ExactSinc, ModeKind::GaussianApprox] {
                assert_eq!(mode_function(z, 0.0, z, 0.0, &g, &pump, mode), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn gamma_is_verbatim() {
        assert_eq!(SINC_GAUSSIAN_GAMMA, 0.193);
    }

    #[test]
    fn gaussian_tracks_sinc_near_phase_matching() {
        for i in 0..=600 {
            let x = -0.3 + 0.6 * i as f64 / 600.0;
            let s = sinc(x);
            let g = longitudinal_envelope(x, ModeKind::GaussianApprox);
            assert!(((g - s) / s).abs() < 0.01, "x={x}");
        }
    }

    #[test]
    fn modes_agree_when_phase_matched() {
        let g = test_geometry();
        let pump = PumpEnvelope::isotropic(31e-6, PumpSpectrum::Monochromatic);
        // choose q_o^y so that delta_k = 0 with everything else fixed
        let qe = TransverseWavevector::new(0.0, 2.0e4);
        let qo_y = qe.qy * g.phi_e.sin() / g.phi_o.sin();
        let qo = TransverseWavevector::new(0.0, qo_y);
        assert!(delta_k(qe, 0.0, qo, 0.0, &g).abs() < 1e-9);
        let a = mode_function(qe, 0.0, qo, 0.0, &g, &pump, ModeKind::ExactSinc);
        let b = mode_function(qe, 0.0, qo, 0.0, &g, &pump, ModeKind::GaussianApprox);
        assert!((a - b).norm() < 1e-12);
    }

    fn arb_point() -> impl Strategy<Value = [f64; 6]> {
        [
            -1e5..1e5f64,
            -1e5..1e5f64,
            -1e13..1e13f64,
            -1e5..1e5f64,
            -1e5..1e5f64,
            -1e13..1e13f64,
        ]
    }

    fn eval(f: fn(TransverseWavevector, f64, TransverseWavevector, f64, &SpdcGeometry) -> f64, p: [f64; 6]) -> f64 {
        f(
            TransverseWavevector::new(p[0], p[1]),
            p[2],
            TransverseWavevector::new(p[3], p[4]),
            p[5],
            &test_geometry(),
        )
    }

    proptest! {
        #[test]
        fn deltas_match_term_by_term(p in arb_point()) {
            let g = test_geometry();
            let d1 = eval(delta1, p);
            let dk = eval(delta_k, p);
            let o1 = delta1_oracle(p[0], p[1], p[2], p[3], p[4], p[5], &g);
            let ok = delta_k_oracle(p[0], p[1], p[2], p[3], p[4], p[5], &g);
            // relative to the largest term so cancellation does not inflate the ratio
            let scale = 1e5 + 1e13 * 2.0 / SPEED_OF_LIGHT;
            prop_assert!((d1 - o1).abs() <= 1e-12 * scale.max(o1.abs()));
            prop_assert!((dk - ok).abs() <= 1e-12 * scale.max(ok.abs()));
        }

        #[test]
        fn deltas_are_linear(p in arb_point(), r in arb_point(), a in -3.0..3.0f64) {
            for f in [delta1 as fn(_, _, _, _, &_) -> f64, delta_k] {
                let fp = eval(f, p);
                let fr = eval(f, r);
                let sum: [f64; 6] = std::array::from_fn(|i| p[i] + r[i]);
                let scaled: [f64; 6] = std::array::from_fn(|i| a * p[i]);
                let scale = 4.0 * (1e5 + 1e13 * 2.0 / SPEED_OF_LIGHT);
                prop_assert!((eval(f, sum) - (fp + fr)).abs() <= 1e-12 * scale);
                prop_assert!((eval(f, scaled) - a * fp).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn modulus_is_bounded(p in arb_point(), sinc_mode in any::<bool>()) {
            let g = test_geometry();
            let pump = PumpEnvelope { waist_x: 42e-6, waist_y: 31e-6, spectrum: PumpSpectrum::Gaussian { sigma: 3e12 } };
            let mode = if sinc_mode { ModeKind::ExactSinc } else { ModeKind::GaussianApprox };
            let v = mode_function(
                TransverseWavevector::new(p[0], p[1]), p[2],
                TransverseWavevector::new(p[3], p[4]), p[5], &g, &pump, mode);
            prop_assert!(v.norm() <= 1.0 + 1e-15);
        }

        #[test]
        fn symmetric_configuration_is_parity_invariant(p in arb_point(), sinc_mode in any::<bool>()) {
            let phi = 0.064;
            let n = 1.65 / SPEED_OF_LIGHT;
            let g = SpdcGeometry { phi_e: phi, phi_o: phi, rho_p: 0.0, rho_e: 0.0,
                group_p: n, group_e: n, group_o: n, length: 4e-3 };
            let pump = PumpEnvelope { waist_x: 42e-6, waist_y: 31e-6, spectrum: PumpSpectrum::Gaussian { sigma: 3e12 } };
            let mode = if sinc_mode { ModeKind::ExactSinc } else { ModeKind::GaussianApprox };
            let qe = TransverseWavevector::new(p[0], p[1]);
            let qo = TransverseWavevector::new(p[3], p[4]);
            let a = mode_function(qe, p[2], qo, p[5], &g, &pump, mode);
            let b = mode_function(qe.scaled(-1.0), -p[2], qo.scaled(-1.0), -p[5], &g, &pump, mode);
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-12);
        }
    }
}
