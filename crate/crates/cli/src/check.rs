//! Self-test report: each check re-derives a quantity by an independent
//! route and compares.

use spdc_core::config::{ResolvedConfig, RunConfig};
use spdc_core::dispersion::Polarization;
use spdc_core::kernel::{delta_k, longitudinal_envelope, sinc, ModeKind, PumpSpectrum, TransverseWavevector};
use spdc_core::trace::{build_quadratic_form, integrate_quadrature_oracle, DetectionAssignment};
use spdc_core::CrystalModel;

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckResult = std::result::Result<String, String>;

fn outcome(name: &'static str, r: CheckResult) -> CheckOutcome {
    match r {
        Ok(detail) => CheckOutcome { name, passed: true, detail },
        Err(detail) => CheckOutcome { name, passed: false, detail },
    }
}

pub fn run_checks(cfg: &RunConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let material = cfg.load_material();
    out.push(outcome(
        "material-file",
        match &material {
            Ok(m) => Ok(format!("{} loaded", m.name)),
            Err(e) => Err(e.to_string()),
        },
    ));
    let resolved = cfg.resolve();
    out.push(outcome(
        "config-resolve",
        match &resolved {
            Ok(r) => Ok(format!(
                "cut angle {:.4} deg, phi_e {:.4} deg, phi_o {:.4} deg",
                r.crystal.cut_angle.to_degrees(),
                r.setup.geometry.phi_e.to_degrees(),
                r.setup.geometry.phi_o.to_degrees()
            )),
            Err(e) => Err(e.to_string()),
        },
    ));

    let needs = |f: &dyn Fn(&ResolvedConfig) -> CheckResult| match &resolved {
        Ok(r) => f(r),
        Err(_) => Err("not run: configuration did not resolve".to_owned()),
    };
    out.push(outcome("walkoff-vs-finite-difference", needs(&|r| walkoff_fd(&r.crystal, r.wavelengths.pump))));
    out.push(outcome("group-index-vs-finite-difference", needs(&group_index_fd)));
    out.push(outcome("phase-mismatch-reevaluation", needs(&mismatch_terms)));
    out.push(outcome("closed-form-vs-quadrature", needs(&closed_vs_quadrature)));
    out.push(outcome("sinc-gaussian-approximation", sinc_approx()));
    out
}

fn walkoff_fd(crystal: &CrystalModel, lambda: f64) -> CheckResult {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for deg in (5..=85).step_by(5) {
        let t = (deg as f64).to_radians();
        let n = |t| crystal.index_extraordinary_effective(lambda, t).map_err(|e| e.to_string());
        let fd = -(n(t + h)? - n(t - h)?) / (2.0 * h) / n(t)?;
        let rho = crystal.walkoff_angle(lambda, t).map_err(|e| e.to_string())?;
        worst = worst.max((rho - fd).abs());
    }
    if worst < 1e-8 {
        Ok(format!("max |rho - fd| = {worst:.2e} over 5..85 deg"))
    } else {
        Err(format!("max |rho - fd| = {worst:.2e} exceeds 1e-8"))
    }
}

fn group_index_fd(r: &ResolvedConfig) -> CheckResult {
    let c = 299_792_458.0;
    let two_pi_c = 2.0 * std::f64::consts::PI * c;
    let theta = r.crystal.cut_angle;
    let mut worst = 0.0f64;
    for (lambda, pol) in [
        (r.wavelengths.ordinary, Polarization::Ordinary),
        (r.wavelengths.extraordinary, Polarization::Extraordinary { theta }),
        (r.wavelengths.pump, Polarization::Extraordinary { theta }),
    ] {
        let w0 = two_pi_c / lambda;
        let h = 1e-5 * w0;
        let nw = |w: f64| {
            r.crystal
                .index(two_pi_c / w, pol)
                .map(|n| n * w)
                .map_err(|e| e.to_string())
        };
        let fd = (nw(w0 + h)? - nw(w0 - h)?) / (2.0 * h) / c;
        let g = r.crystal.group_index(lambda, pol).map_err(|e| e.to_string())?;
        worst = worst.max(((g - fd) / fd).abs());
    }
    if worst < 1e-6 {
        Ok(format!("max relative deviation {worst:.2e}"))
    } else {
        Err(format!("max relative deviation {worst:.2e} exceeds 1e-6"))
    }
}

fn mismatch_terms(r: &ResolvedConfig) -> CheckResult {
    let g = &r.setup.geometry;
    let mut worst = 0.0f64;
    for k in 0..25 {
        let t = k as f64;
        let qe = TransverseWavevector::new(3e4 * (0.7 * t).sin(), 2e4 * (1.3 * t).cos());
        let qo = TransverseWavevector::new(-1e4 * (0.4 * t).cos(), 5e4 * (0.9 * t).sin());
        let (we, wo) = (4e12 * (0.5 * t).sin(), -3e12 * (1.1 * t).cos());
        let terms = [
            g.group_p * (we + wo),
            -g.group_e * we * g.phi_e.cos(),
            -g.group_o * wo * g.phi_o.cos(),
            -qe.qy * g.phi_e.sin(),
            qo.qy * g.phi_o.sin(),
            g.rho_p * (qe.qx + qo.qx),
            -g.rho_e * qe.qx * g.phi_e.cos(),
        ];
        let oracle: f64 = terms.iter().sum();
        let scale = terms.iter().map(|v| v.abs()).sum::<f64>();
        let v = delta_k(qe, we, qo, wo, g);
        worst = worst.max((v - oracle).abs() / scale);
    }
    if worst < 1e-12 {
        Ok(format!("max relative deviation {worst:.2e} over 25 points"))
    } else {
        Err(format!("max relative deviation {worst:.2e} exceeds 1e-12"))
    }
}

fn closed_vs_quadrature(r: &ResolvedConfig) -> CheckResult {
    let mut worst = 0.0f64;
    let setup = &r.setup;
    for i in 0..5 {
        for j in 0..5 {
            let a = -6e4 + 3e4 * i as f64;
            let b = -6e4 + 3e4 * j as f64;
            for (qa, qb) in [
                (TransverseWavevector::new(0.0, a), TransverseWavevector::new(0.0, b)),
                (TransverseWavevector::new(a, 0.0), TransverseWavevector::new(b, 0.0)),
            ] {
                let closed = build_quadratic_form(qa, qb, DetectionAssignment::EAtA, setup)
                    .and_then(|f| f.integrate())
                    .map_err(|e| e.to_string())?;
                let quad = integrate_quadrature_oracle(qa, qb, DetectionAssignment::EAtA, setup, ModeKind::GaussianApprox);
                worst = worst.max((closed - quad.value).norm() / closed.norm());
            }
        }
    }
    let kind = match setup.pump.spectrum {
        PumpSpectrum::Monochromatic => "1-D",
        PumpSpectrum::Gaussian { .. } => "2-D",
    };
    if worst < 1e-6 {
        Ok(format!("{kind} trace, max relative deviation {worst:.2e} on 5x5 x/y samples"))
    } else {
        Err(format!("{kind} trace, max relative deviation {worst:.2e} exceeds 1e-6"))
    }
}

fn sinc_approx() -> CheckResult {
    let mut worst = 0.0f64;
    for k in 0..=300 {
        let x = 0.3 * k as f64 / 300.0;
        let s = sinc(x);
        worst = worst.max((longitudinal_envelope(x, ModeKind::GaussianApprox) - s).abs() / s);
    }
    if worst < 0.01 {
        Ok(format!("max relative modulus gap {worst:.2e} for |x| <= 0.3"))
    } else {
        Err(format!("max relative modulus gap {worst:.2e} exceeds 1%"))
    }
}

