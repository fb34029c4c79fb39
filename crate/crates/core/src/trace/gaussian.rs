//! Closed-form frequency trace for the all-Gaussian integrand.
//!
//! With the Gaussian stand-in for the sinc, Gaussian filters and a Gaussian
//! (or monochromatic) pump, the integrand over `(Omega_e, Omega_o)` is
//! `exp(-1/2 W^T M W + b^T W + c)` and integrates exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{delta0, delta1, delta_k, ModeKind, PumpSpectrum, TransverseWavevector, SINC_GAUSSIAN_GAMMA};

use super::{DetectionAssignment, Setup};

/// `exp(-1/2 W^T M W + b^T W + c)` over `W` in `R^N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexQuadraticForm<const N: usize> {
    pub m: [[Complex64; N]; N],
    pub b: [Complex64; N],
    pub c: Complex64,
}

impl<const N: usize> ComplexQuadraticForm<N> {
    /// Value of the exponent at a real point.
    pub fn exponent(&self, w: &[f64; N]) -> Complex64 {
        let mut quad = Complex64::new(0.0, 0.0);
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..N {
            lin += self.b[i] * w[i];
            for j in 0..N {
                quad += self.m[i][j] * w[i] * w[j];
            }
        }
        -0.5 * quad + lin + self.c
    }

    /// Leading principal minors of `Re(M)`.
    pub fn real_minors(&self) -> [f64; N] {
        let mut out = [0.0; N];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = match k {
                0 => self.m[0][0].re,
                1 => self.m[0][0].re * self.m[1][1].re - self.m[0][1].re * self.m[1][0].re,
                _ => unreachable!("forms above two dimensions are not used"),
            };
        }
        out
    }

    pub fn check_integrable(&self) -> Result<()> {
        let minors = self.real_minors();
        if minors.iter().all(|&m| m > 0.0 && m.is_finite()) {
            Ok(())
        } else {
            Err(Error::DivergingIntegral(format!(
                "Re(M) is not positive definite (leading minors {minors:?})"
            )))
        }
    }
}

impl ComplexQuadraticForm<1> {
    /// `sqrt(2 pi / m) exp(b^2 / (2m) + c)`.
    pub fn integrate(&self) -> Result<Complex64> {
        self.check_integrable()?;
        let m = self.m[0][0];
        let b = self.b[0];
        let two_pi = 2.0 * std::f64::consts::PI;
        // Re(m) > 0 keeps the principal root on the branch continuous from the real axis.
        Ok((two_pi / m).sqrt() * (b * b / (2.0 * m) + self.c).exp())
    }
}

impl ComplexQuadraticForm<2> {
    pub fn determinant(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `sqrt(det M)` as the product of principal roots of the eigenvalues,
    /// which all lie in the right half-plane when `Re(M)` is positive definite.
    fn sqrt_det(&self) -> Complex64 {
        let half_tr = 0.5 * (self.m[0][0] + self.m[1][1]);
        let disc = (half_tr * half_tr - self.determinant()).sqrt();
        let l1 = half_tr + disc;
        let l2 = half_tr - disc;
        l1.sqrt() * l2.sqrt()
    }

    /// `(2 pi / sqrt(det M)) exp(1/2 b^T M^-1 b + c)`.
    pub fn integrate(&self) -> Result<Complex64> {
        self.check_integrable()?;
        let det = self.determinant();
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(Error::SingularForm);
        }
        let [b0, b1] = self.b;
        let m = &self.m;
        // b^T adj(M) b / det
        let quad = (m[1][1] * b0 * b0 - (m[0][1] + m[1][0]) * b0 * b1 + m[0][0] * b1 * b1) / det;
        Ok(2.0 * std::f64::consts::PI / self.sqrt_det() * (0.5 * quad + self.c).exp())
    }
}

/// The integrand of the frequency trace for one pair of transverse momenta.
///
/// A monochromatic pump collapses the trace onto `Omega_o = -Omega_e`, leaving a
/// one-dimensional form in `Omega_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceForm {
    Monochromatic(ComplexQuadraticForm<1>),
    Broadband(ComplexQuadraticForm<2>),
}

impl TraceForm {
    pub fn integrate(&self) -> Result<Complex64> {
        match self {
            TraceForm::Monochromatic(f) => f.integrate(),
            TraceForm::Broadband(f) => f.integrate(),
        }
    }

    pub fn check_integrable(&self) -> Result<()> {
        match self {
            TraceForm::Monochromatic(f) => f.check_integrable(),
            TraceForm::Broadband(f) => f.check_integrable(),
        }
    }

    /// Integrand at `(Omega_e, Omega_o)`; the monochromatic form reads only `Omega_e`.
    pub fn integrand(&self, omega_e: f64, omega_o: f64) -> Complex64 {
        match self {
            TraceForm::Monochromatic(f) => f.exponent(&[omega_e]).exp(),
            TraceForm::Broadband(f) => f.exponent(&[omega_e, omega_o]).exp(),
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Assembles `f_e f_o Phi` (Gaussian mode) as a quadratic form in the detunings.
pub fn build_quadratic_form(
    q_a: TransverseWavevector,
    q_b: TransverseWavevector,
    assignment: DetectionAssignment,
    setup: &Setup,
) -> Result<TraceForm> {
    if setup.mode != ModeKind::GaussianApprox {
        return Err(Error::ClosedFormNeedsGaussian);
    }
    let (q_e, q_o) = assignment.split(q_a, q_b);
    let geom = &setup.geometry;
    let pump = &setup.pump;

    let d0 = delta0(q_e, q_o);
    let a1 = delta1(q_e, 0.0, q_o, 0.0, geom);
    let ak = delta_k(q_e, 0.0, q_o, 0.0, geom);
    let (g1, gk) = geom.frequency_coefficients();

    let h = 0.5 * geom.length;
    let wy2 = pump.waist_y * pump.waist_y;
    let wx2 = pump.waist_x * pump.waist_x;
    let gh2 = SINC_GAUSSIAN_GAMMA * h * h;

    let c = Complex64::new(-(wx2 * d0 * d0 + wy2 * a1 * a1) / 4.0 - gh2 * ak * ak, h * ak);
    let filt_e = 1.0 / (2.0 * setup.filter_e.sigma * setup.filter_e.sigma);
    let filt_o = 1.0 / (2.0 * setup.filter_o.sigma * setup.filter_o.sigma);

    let form = match pump.spectrum {
        PumpSpectrum::Monochromatic => {
            let g1 = g1[0] - g1[1];
            let gk = gk[0] - gk[1];
            let m = 0.5 * wy2 * g1 * g1 + 2.0 * gh2 * gk * gk + filt_e + filt_o;
            let b = Complex64::new(-0.5 * wy2 * a1 * g1 - 2.0 * gh2 * ak * gk, h * gk);
            TraceForm::Monochromatic(ComplexQuadraticForm {
                m: [[real(m)]],
                b: [b],
                c,
            })
        }
        PumpSpectrum::Gaussian { sigma } => {
            let pump_term = 1.0 / (2.0 * sigma * sigma);
            let filt = [filt_e, filt_o];
            let mut m = [[real(0.0); 2]; 2];
            let mut b = [real(0.0); 2];
            for i in 0..2 {
                for j in 0..2 {
                    let diag = if i == j { filt[i] } else { 0.0 };
                    m[i][j] = real(0.5 * wy2 * g1[i] * g1[j] + 2.0 * gh2 * gk[i] * gk[j] + diag + pump_term);
                }
                b[i] = Complex64::new(-0.5 * wy2 * a1 * g1[i] - 2.0 * gh2 * ak * gk[i], h * gk[i]);
            }
            TraceForm::Broadband(ComplexQuadraticForm { m, b, c })
        }
    };
    form.check_integrable()?;
    Ok(form)
}

/// Closed-form spatial biphoton at a detector-ordered momentum pair.
pub fn integrate_gaussian_closed_form(form: &TraceForm) -> Result<Complex64> {
    form.integrate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{mode_function, PumpEnvelope};
    use crate::trace::test_support::default_setup;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn separable_case() {
        let a = 0.7;
        let f = ComplexQuadraticForm::<2> {
            m: [[c(2.0 * a, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(2.0 * a, 0.0)]],
            b: [c(0.0, 0.0); 2],
            c: c(0.0, 0.0),
        };
        let v = f.integrate().unwrap();
        assert!((v - c(std::f64::consts::PI / a, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn scaling_m_scales_result_inversely() {
        let base = ComplexQuadraticForm::<2> {
            m: [[c(1.3, 0.4), c(0.2, -0.1)], [c(0.2, -0.1), c(0.9, 0.7)]],
            b: [c(0.0, 0.0); 2],
            c: c(0.0, 0.0),
        };
        let s = 3.7;
        let mut scaled = base;
        for row in scaled.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        let r = scaled.integrate().unwrap() / base.integrate().unwrap();
        assert!((r - c(1.0 / s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_branch_is_continuous() {
        // M = (1 + i t) I: integral is 2 pi / (1 + i t) for every t, including |t| > 1
        for t in [-5.0, -1.0, 0.0, 0.5, 3.0, 40.0] {
            let d = c(1.0, t);
            let f = ComplexQuadraticForm::<2> {
                m: [[d, c(0.0, 0.0)], [c(0.0, 0.0), d]],
                b: [c(0.0, 0.0); 2],
                c: c(0.0, 0.0),
            };
            let v = f.integrate().unwrap();
            let expected = 2.0 * std::f64::consts::PI / d;
            assert!((v - expected).norm() < 1e-13, "t={t}: {v} vs {expected}");
        }
    }

    #[test]
    fn one_dimensional_matches_trapezoid() {
        let f = ComplexQuadraticForm::<1> {
            m: [[c(1.4, 0.8)]],
            b: [c(0.3, -1.1)],
            c: c(-0.2, 0.5),
        };
        let n = 4001;
        let (lo, hi) = (-20.0, 20.0);
        let h = (hi - lo) / (n - 1) as f64;
        let mut s = c(0.0, 0.0);
        for i in 0..n {
            let w = lo + h * i as f64;
            let wt = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += f.exponent(&[w]).exp() * wt;
        }
        s *= h;
        let v = f.integrate().unwrap();
        assert!((v - s).norm() / v.norm() < 1e-10);
    }

    #[test]
    fn indefinite_real_part_is_rejected() {
        let f = ComplexQuadraticForm::<2> {
            m: [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(1.0, 0.0)]],
            b: [c(0.0, 0.0); 2],
            c: c(0.0, 0.0),
        };
        assert!(matches!(f.integrate(), Err(Error::DivergingIntegral(_))));
    }

    #[test]
    fn no_linear_term_at_origin() {
        let mut setup = default_setup();
        setup.pump = PumpEnvelope::isotropic(31e-6, PumpSpectrum::Gaussian { sigma: 2e12 });
        let z = TransverseWavevector::ZERO;
        match build_quadratic_form(z, z, DetectionAssignment::EAtA, &setup).unwrap() {
            TraceForm::Broadband(f) => {
                // only the phase term h*gk survives; it has no real part
                assert!(f.b.iter().all(|b| b.re == 0.0));
                assert_eq!(f.c, c(0.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_parameters_give_positive_definite_form() {
        let setup = default_setup();
        let q = TransverseWavevector::new(1e4, -2e4);
        for spectrum in [PumpSpectrum::Monochromatic, PumpSpectrum::Gaussian { sigma: 1e12 }] {
            let mut s = setup.clone();
            s.pump.spectrum = spectrum;
            let form = build_quadratic_form(q, q.scaled(0.5), DetectionAssignment::OAtA, &s).unwrap();
            match form {
                TraceForm::Monochromatic(f) => assert!(f.real_minors()[0] > 0.0),
                TraceForm::Broadband(f) => {
                    let mr = f.real_minors();
                    assert!(mr[0] > 0.0 && mr[1] > 0.0);
                    // eigenvalues of the real symmetric part
                    let (a, b, d) = (f.m[0][0].re, f.m[0][1].re, f.m[1][1].re);
                    let disc = ((a - d).powi(2) / 4.0 + b * b).sqrt();
                    assert!((a + d) / 2.0 - disc > 0.0);
                }
            }
        }
    }

    #[test]
    fn integrand_matches_filters_times_mode_pointwise() {
        let base = default_setup();
        let qa = TransverseWavevector::new(1.3e4, -2.1e4);
        let qb = TransverseWavevector::new(-0.4e4, 3.2e4);
        for spectrum in [PumpSpectrum::Monochromatic, PumpSpectrum::Gaussian { sigma: 4e12 }] {
            for assignment in [DetectionAssignment::EAtA, DetectionAssignment::OAtA] {
                let mut setup = base.clone();
                setup.pump.spectrum = spectrum;
                let form = build_quadratic_form(qa, qb, assignment, &setup).unwrap();
                let (qe, qo) = assignment.split(qa, qb);
                for &(we, wo) in &[(0.0, 0.0), (3e12, -1e12), (-7e12, 2e12), (1e13, 5e12)] {
                    let wo = if spectrum == PumpSpectrum::Monochromatic { -we } else { wo };
                    let direct = setup.filter_e.response(we)
                        * setup.filter_o.response(wo)
                        * mode_function(qe, we, qo, wo, &setup.geometry, &setup.pump, ModeKind::GaussianApprox);
                    let via_form = form.integrand(we, wo);
                    assert!(
                        (direct - via_form).norm() <= 1e-12 * direct.norm(),
                        "{direct} vs {via_form}"
                    );
                }
            }
        }
    }

    #[test]
    fn sinc_mode_is_refused() {
        let mut setup = default_setup();
        setup.mode = ModeKind::ExactSinc;
        let z = TransverseWavevector::ZERO;
        assert!(matches!(
            build_quadratic_form(z, z, DetectionAssignment::EAtA, &setup),
            Err(Error::ClosedFormNeedsGaussian)
        ));
    }
}
