//! Direct numerical frequency trace. Works for either longitudinal factor and
//! serves as the independent check on the closed form.

use num_complex::Complex64;

use crate::kernel::{mode_function, ModeKind, PumpSpectrum, TransverseWavevector};

use super::{DetectionAssignment, Setup};

/// Relative change under node doubling above which a result carries a warning.
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    /// Trapezoid nodes per frequency axis.
    pub nodes: usize,
    /// Half-width of the window in units of the effective filter width.
    pub window_sigmas: f64,
    /// Coarse samples per axis used to centre the window on the integrand peak.
    pub search_nodes: usize,
    /// Half-width of the centring search, in effective widths.
    pub search_sigmas: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            nodes: 201,
            window_sigmas: 6.0,
            search_nodes: 97,
            search_sigmas: 12.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// `|I(2n-1) - I(n)| / |I(n)|`.
    pub refinement_change: f64,
    pub warning: Option<String>,
}

fn trapezoid_1d<F: Fn(f64) -> Complex64>(f: &F, center: f64, half: f64, nodes: usize) -> Complex64 {
    let n = nodes.max(2);
    let h = 2.0 * half / (n - 1) as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += f(center - half + h * i as f64) * w;
    }
    s * h
}

fn trapezoid_2d<F: Fn(f64, f64) -> Complex64>(f: &F, center: [f64; 2], half: [f64; 2], nodes: usize) -> Complex64 {
    let n = nodes.max(2);
    let h = [2.0 * half[0] / (n - 1) as f64, 2.0 * half[1] / (n - 1) as f64];
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let wi = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let x = center[0] - half[0] + h[0] * i as f64;
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let wj = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            row += f(x, center[1] - half[1] + h[1] * j as f64) * wj;
        }
        s += row * wi;
    }
    s * h[0] * h[1]
}

fn argmax_1d<F: Fn(f64) -> Complex64>(f: &F, half: f64, samples: usize) -> f64 {
    let n = samples.max(3);
    let mut best = (0.0, f(0.0).norm());
    for i in 0..n {
        let w = -half + 2.0 * half * i as f64 / (n - 1) as f64;
        let v = f(w).norm();
        if v > best.1 {
            best = (w, v);
        }
    }
    best.0
}

fn argmax_2d<F: Fn(f64, f64) -> Complex64>(f: &F, half: [f64; 2], samples: usize) -> [f64; 2] {
    let n = samples.max(3);
    let mut best = ([0.0, 0.0], f(0.0, 0.0).norm());
    for i in 0..n {
        let x = -half[0] + 2.0 * half[0] * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let y = -half[1] + 2.0 * half[1] * j as f64 / (n - 1) as f64;
            let v = f(x, y).norm();
            if v > best.1 {
                best = ([x, y], v);
            }
        }
    }
    best.0
}

fn finish(coarse: Complex64, fine: Complex64) -> QuadratureResult {
    let scale = coarse.norm().max(f64::MIN_POSITIVE);
    let change = (fine - coarse).norm() / scale;
    let warning = (change >= CONVERGENCE_TOL || !change.is_finite()).then(|| {
        format!("quadrature not converged: node doubling changes the result by {change:.3e} (relative)")
    });
    QuadratureResult {
        value: coarse,
        refinement_change: change,
        warning,
    }
}

/// Trapezoid evaluation of `int f_e f_o Phi dOmega` for detector-ordered momenta.
///
/// The window is `+-window_sigmas` effective filter widths around the peak of
/// `|integrand|` (found on a coarse grid). A monochromatic pump integrates
/// along `Omega_o = -Omega_e` only.
pub fn integrate_quadrature_oracle(
    q_a: TransverseWavevector,
    q_b: TransverseWavevector,
    assignment: DetectionAssignment,
    setup: &Setup,
    mode: ModeKind,
) -> QuadratureResult {
    let (q_e, q_o) = assignment.split(q_a, q_b);
    let s = &setup.quadrature;
    let (fe, fo) = (setup.filter_e, setup.filter_o);
    let geom = &setup.geometry;
    let pump = &setup.pump;
    let integrand = move |we: f64, wo: f64| {
        fe.response(we) * fo.response(wo) * mode_function(q_e, we, q_o, wo, geom, pump, mode)
    };
    let refined = 2 * s.nodes.max(2) - 1;
    match pump.spectrum {
        PumpSpectrum::Monochromatic => {
            // envelope of f_e(W) f_o(-W) is exp(-W^2 / (2 s^2))
            let inv = 1.0 / (2.0 * fe.sigma * fe.sigma) + 1.0 / (2.0 * fo.sigma * fo.sigma);
            let width = inv.sqrt().recip();
            let f = |w: f64| integrand(w, -w);
            let center = argmax_1d(&f, s.search_sigmas * width, s.search_nodes);
            let half = s.window_sigmas * width;
            finish(
                trapezoid_1d(&f, center, half, s.nodes),
                trapezoid_1d(&f, center, half, refined),
            )
        }
        PumpSpectrum::Gaussian { .. } => {
            // each filter alone is exp(-W^2 / (2 (sqrt2 sigma)^2))
            let width = [
                std::f64::consts::SQRT_2 * fe.sigma,
                std::f64::consts::SQRT_2 * fo.sigma,
            ];
            let f = |a: f64, b: f64| integrand(a, b);
            let search = [s.search_sigmas * width[0], s.search_sigmas * width[1]];
            let search_n = (s.search_nodes / 2).max(3) | 1;
            let center = argmax_2d(&f, search, search_n);
            let half = [s.window_sigmas * width[0], s.window_sigmas * width[1]];
            finish(
                trapezoid_2d(&f, center, half, s.nodes),
                trapezoid_2d(&f, center, half, refined),
            )
        }
    }
}
