//! One-dimensional detector scans, their joint distributions, and the
//! statistics used to classify the correlation: Pearson coefficient,
//! covariance, principal-axis orientation. Also the pump-waist sweep and the
//! search for the waist at which the correlation changes sign.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{ModeKind, TransverseWavevector};
use crate::roots::bisect;
use crate::trace::{coincidence_rate, smooth_grid, spatial_biphoton, DetectionAssignment, Setup};

/// Points per axis of the window-estimation pre-scan.
pub const PRESCAN_POINTS: usize = 16;
/// Scan half-width in marginal standard deviations.
pub const WINDOW_SIGMAS: f64 = 3.0;
/// Pre-scan half-width accepted when it covers this many marginal deviations...
const PRESCAN_MIN_SIGMAS: f64 = 5.0;
/// ...without exceeding this many (coarse sampling).
const PRESCAN_MAX_SIGMAS: f64 = 10.0;
const PRESCAN_TARGET_SIGMAS: f64 = 8.0;
const PRESCAN_ITERATIONS: usize = 8;
/// Largest half-width, as a fraction of the photon wavenumber.
const MAX_WINDOW_FRACTION_OF_K0: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScanAxis {
    X,
    Y,
}

impl ScanAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanAxis::X => "x",
            ScanAxis::Y => "y",
        }
    }

    /// Detector position with `along` on the scan axis and `orthogonal` on the other.
    pub fn point(self, along: f64, orthogonal: f64) -> [f64; 2] {
        match self {
            ScanAxis::X => [along, orthogonal],
            ScanAxis::Y => [orthogonal, along],
        }
    }

    fn wavevector(self, along: f64, orthogonal: f64) -> TransverseWavevector {
        let p = self.point(along, orthogonal);
        TransverseWavevector::new(p[0], p[1])
    }
}

impl std::str::FromStr for ScanAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(ScanAxis::X),
            "y" | "Y" => Ok(ScanAxis::Y),
            other => Err(Error::invalid("scan.axis", format!("expected `x` or `y`, got `{other}`"))),
        }
    }
}

/// Detector position ranges in the Fourier plane, m.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanRange {
    /// Estimated from a coarse pre-scan of the Gaussian model.
    Auto,
    Fixed { a: (f64, f64), b: (f64, f64) },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanPlan {
    pub axis: ScanAxis,
    pub assignment: DetectionAssignment,
    pub range: ScanRange,
    pub points: usize,
    /// Fixed value of the coordinate not being scanned, m.
    pub orthogonal: f64,
}

impl ScanPlan {
    pub fn new(axis: ScanAxis, assignment: DetectionAssignment, points: usize) -> Self {
        ScanPlan {
            axis,
            assignment,
            range: ScanRange::Auto,
            points,
            orthogonal: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 8 {
            return Err(Error::invalid("scan.points", "need at least 8 points per axis"));
        }
        if let ScanRange::Fixed { a, b } = self.range {
            for (name, (lo, hi)) in [("scan.range_a", a), ("scan.range_b", b)] {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::invalid(name, format!("empty or degenerate range [{lo}, {hi}]")));
                }
            }
        }
        if !self.orthogonal.is_finite() {
            return Err(Error::invalid("scan.orthogonal_mm", "must be finite"));
        }
        Ok(())
    }
}

/// Coincidence grid over detector A (rows) by detector B (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    pub axis: ScanAxis,
    pub assignment: DetectionAssignment,
    pub positions_a: Vec<f64>,
    pub positions_b: Vec<f64>,
    pub momenta_a: Vec<f64>,
    pub momenta_b: Vec<f64>,
    /// Row-major, `values[i * n_b + j]` at `(a_i, b_j)`.
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl JointDistribution {
    pub fn n_a(&self) -> usize {
        self.positions_a.len()
    }

    pub fn n_b(&self) -> usize {
        self.positions_b.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_b() + j]
    }

    /// Swaps the roles of the two detectors.
    pub fn transposed(&self) -> Self {
        let (n_a, n_b) = (self.n_a(), self.n_b());
        let mut values = vec![0.0; self.values.len()];
        for i in 0..n_a {
            for j in 0..n_b {
                values[j * n_a + i] = self.values[i * n_b + j];
            }
        }
        JointDistribution {
            axis: self.axis,
            assignment: self.assignment.swapped(),
            positions_a: self.positions_b.clone(),
            positions_b: self.positions_a.clone(),
            momenta_a: self.momenta_b.clone(),
            momenta_b: self.momenta_a.clone(),
            values,
            normalized: self.normalized,
        }
    }

    /// Scales the grid so its maximum is one.
    pub fn normalize(&mut self) -> Result<()> {
        let max = self.values.iter().cloned().fold(0.0, f64::max);
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::Degenerate("coincidence grid has no positive finite entry".into()));
        }
        self.values.iter_mut().for_each(|v| *v /= max);
        self.normalized = true;
        Ok(())
    }

    /// Builds a distribution directly from momentum axes and a density
    /// function; used for synthetic checks.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(momenta_a: Vec<f64>, momenta_b: Vec<f64>, f: F) -> Self {
        let values = momenta_a
            .iter()
            .flat_map(|&a| momenta_b.iter().map(move |&b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        JointDistribution {
            axis: ScanAxis::Y,
            assignment: DetectionAssignment::EAtA,
            positions_a: momenta_a.clone(),
            positions_b: momenta_b.clone(),
            momenta_a,
            momenta_b,
            values,
            normalized: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationSummary {
    pub pearson: f64,
    /// Covariance of `(q_A, q_B)`, rad^2/m^2.
    pub covariance: [[f64; 2]; 2],
    /// Orientation of the major principal axis in the `(q_A, q_B)` plane, in `(-pi/2, pi/2]`.
    pub angle: f64,
    pub mean: [f64; 2],
    /// Momenta of the grid maximum.
    pub peak: [f64; 2],
}

/// Mirror image of an axial angle under exchange of the two coordinates.
pub fn reflect_angle(angle: f64) -> f64 {
    wrap_axial(FRAC_PI_2 - angle)
}

fn wrap_axial(mut a: f64) -> f64 {
    while a > FRAC_PI_2 {
        a -= PI;
    }
    while a <= -FRAC_PI_2 {
        a += PI;
    }
    a
}

/// Smallest difference between two axial angles, in `[0, pi/2]`.
pub fn axial_difference(a: f64, b: f64) -> f64 {
    wrap_axial(a - b).abs()
}

/// Grid-weighted moments, treating the grid as a probability mass function.
pub fn summarize(dist: &JointDistribution) -> Result<CorrelationSummary> {
    let (n_a, n_b) = (dist.n_a(), dist.n_b());
    if dist.values.len() != n_a * n_b || n_a < 2 || n_b < 2 {
        return Err(Error::Degenerate("grid must be at least 2 x 2".into()));
    }
    if dist.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Degenerate("grid entries must be finite and non-negative".into()));
    }
    let rows_with_mass = (0..n_a).filter(|&i| (0..n_b).any(|j| dist.value(i, j) > 0.0)).count();
    let cols_with_mass = (0..n_b).filter(|&j| (0..n_a).any(|i| dist.value(i, j) > 0.0)).count();
    if rows_with_mass < 2 || cols_with_mass < 2 {
        return Err(Error::Degenerate("support narrower than 2 x 2".into()));
    }

    let total: f64 = dist.values.iter().sum();
    let (qa, qb) = (&dist.momenta_a, &dist.momenta_b);
    let mut mean = [0.0; 2];
    let mut peak = ([qa[0], qb[0]], f64::NEG_INFINITY);
    for i in 0..n_a {
        for j in 0..n_b {
            let v = dist.value(i, j);
            let p = v / total;
            mean[0] += p * qa[i];
            mean[1] += p * qb[j];
            if v > peak.1 {
                peak = ([qa[i], qb[j]], v);
            }
        }
    }
    let (mut caa, mut cbb, mut cab) = (0.0, 0.0, 0.0);
    for i in 0..n_a {
        let da = qa[i] - mean[0];
        for j in 0..n_b {
            let p = dist.value(i, j) / total;
            let db = qb[j] - mean[1];
            caa += p * da * da;
            cbb += p * db * db;
            cab += p * da * db;
        }
    }
    if !(caa > 0.0 && cbb > 0.0) {
        return Err(Error::Degenerate("zero variance along a detector axis".into()));
    }
    let pearson = (cab / (caa * cbb).sqrt()).clamp(-1.0, 1.0);
    let angle = wrap_axial(0.5 * (2.0 * cab).atan2(caa - cbb));
    Ok(CorrelationSummary {
        pearson,
        covariance: [[caa, cab], [cab, cbb]],
        angle,
        mean,
        peak: peak.0,
    })
}

/// Momentum window `(lo, hi)` per detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanWindow {
    pub momentum_a: (f64, f64),
    pub momentum_b: (f64, f64),
}

struct Marginals {
    mean: [f64; 2],
    std: [f64; 2],
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn prescan(
    axis: ScanAxis,
    assignment: DetectionAssignment,
    setup: &Setup,
    orthogonal_q: (f64, f64),
    center: [f64; 2],
    half: [f64; 2],
) -> Result<Marginals> {
    let qa = linspace(center[0] - half[0], center[0] + half[0], PRESCAN_POINTS);
    let qb = linspace(center[1] - half[1], center[1] + half[1], PRESCAN_POINTS);
    let mut values = Vec::with_capacity(PRESCAN_POINTS * PRESCAN_POINTS);
    for &a in &qa {
        for &b in &qb {
            let v = spatial_biphoton(
                axis.wavevector(a, orthogonal_q.0),
                axis.wavevector(b, orthogonal_q.1),
                assignment,
                setup,
            )?;
            values.push(v.norm_sqr());
        }
    }
    let total: f64 = values.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Degenerate("pre-scan found no coincidences".into()));
    }
    let mut mean = [0.0; 2];
    for (i, &a) in qa.iter().enumerate() {
        for (j, &b) in qb.iter().enumerate() {
            let p = values[i * PRESCAN_POINTS + j] / total;
            mean[0] += p * a;
            mean[1] += p * b;
        }
    }
    let mut var = [0.0; 2];
    for (i, &a) in qa.iter().enumerate() {
        for (j, &b) in qb.iter().enumerate() {
            let p = values[i * PRESCAN_POINTS + j] / total;
            var[0] += p * (a - mean[0]).powi(2);
            var[1] += p * (b - mean[1]).powi(2);
        }
    }
    Ok(Marginals {
        mean,
        std: [var[0].sqrt(), var[1].sqrt()],
    })
}

/// Momentum window of `+-WINDOW_SIGMAS` marginal deviations around the centroid.
///
/// The marginals come from an iterated 16 x 16 pre-scan of the Gaussian model,
/// regardless of the configured mode, so both modes see the same window. The
/// pre-scan window is grown or shrunk until it spans 5-10 deviations.
pub fn auto_window(
    axis: ScanAxis,
    assignment: DetectionAssignment,
    setup: &Setup,
    orthogonal: f64,
) -> Result<ScanWindow> {
    let gaussian = setup.with_mode(ModeKind::GaussianApprox);
    let (lambda_a, lambda_b) = setup.map.arm_wavelengths(assignment);
    let orth_q = (orthogonal * setup.map.scale(lambda_a), orthogonal * setup.map.scale(lambda_b));
    let k0 = 2.0 * PI / lambda_a.max(lambda_b);
    let cap = MAX_WINDOW_FRACTION_OF_K0 * k0;
    let start = (4.0 / setup.pump.waist_x.min(setup.pump.waist_y)).min(cap);

    let mut center = [0.0, 0.0];
    let mut half = [start, start];
    let mut m = prescan(axis, assignment, &gaussian, orth_q, center, half)?;
    for _ in 0..PRESCAN_ITERATIONS {
        let settled = (0..2).all(|k| {
            let s = m.std[k];
            (half[k] >= PRESCAN_MIN_SIGMAS * s || half[k] >= cap) && half[k] <= PRESCAN_MAX_SIGMAS * s
        });
        if settled {
            break;
        }
        for k in 0..2 {
            if !(m.std[k] > 0.0) {
                return Err(Error::Degenerate("pre-scan marginal has zero width".into()));
            }
            half[k] = (PRESCAN_TARGET_SIGMAS * m.std[k]).min(cap);
        }
        center = m.mean;
        m = prescan(axis, assignment, &gaussian, orth_q, center, half)?;
    }
    let ha = (WINDOW_SIGMAS * m.std[0]).min(cap);
    let hb = (WINDOW_SIGMAS * m.std[1]).min(cap);
    Ok(ScanWindow {
        momentum_a: (m.mean[0] - ha, m.mean[0] + ha),
        momentum_b: (m.mean[1] - hb, m.mean[1] + hb),
    })
}

/// Evaluates the coincidence rate over the plan's grid, applies pinhole
/// smoothing when configured, and normalises the maximum to one.
pub fn run_scan(plan: &ScanPlan, setup: &Setup) -> Result<JointDistribution> {
    plan.validate()?;
    let (lambda_a, lambda_b) = setup.map.arm_wavelengths(plan.assignment);
    let (sa, sb) = (setup.map.scale(lambda_a), setup.map.scale(lambda_b));
    let (range_a, range_b) = match plan.range {
        ScanRange::Fixed { a, b } => (a, b),
        ScanRange::Auto => {
            let w = auto_window(plan.axis, plan.assignment, setup, plan.orthogonal)?;
            (
                (w.momentum_a.0 / sa, w.momentum_a.1 / sa),
                (w.momentum_b.0 / sb, w.momentum_b.1 / sb),
            )
        }
    };
    let n = plan.points;
    let positions_a = linspace(range_a.0, range_a.1, n);
    let positions_b = linspace(range_b.0, range_b.1, n);

    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            coincidence_rate(
                plan.axis.point(positions_a[i], plan.orthogonal),
                plan.axis.point(positions_b[j], plan.orthogonal),
                plan.assignment,
                setup,
            )
        })
        .collect::<Result<_>>()?;

    let values = if setup.pinhole_diameter > 0.0 {
        let step_a = (range_a.1 - range_a.0) / (n - 1) as f64;
        let step_b = (range_b.1 - range_b.0) / (n - 1) as f64;
        smooth_grid(&values, n, n, step_a, step_b, setup.pinhole_diameter)?
    } else {
        values
    };

    let mut dist = JointDistribution {
        axis: plan.axis,
        assignment: plan.assignment,
        momenta_a: positions_a.iter().map(|x| x * sa).collect(),
        momenta_b: positions_b.iter().map(|x| x * sb).collect(),
        positions_a,
        positions_b,
        values,
        normalized: false,
    };
    dist.normalize()?;
    Ok(dist)
}

/// Summaries of the same scan under both detection assignments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssignmentSensitivity {
    pub e_at_a: CorrelationSummary,
    pub o_at_a: CorrelationSummary,
}

impl AssignmentSensitivity {
    pub fn pearson_ea(&self) -> f64 {
        self.e_at_a.pearson
    }

    pub fn pearson_oa(&self) -> f64 {
        self.o_at_a.pearson
    }

    pub fn angle_ea(&self) -> f64 {
        self.e_at_a.angle
    }

    pub fn angle_oa(&self) -> f64 {
        self.o_at_a.angle
    }

    /// Axial difference between the two principal-axis orientations, rad.
    pub fn angle_difference(&self) -> f64 {
        axial_difference(self.e_at_a.angle, self.o_at_a.angle)
    }

    /// Largest discrepancy between the two summaries (pearson and angle).
    pub fn summary_difference(&self) -> f64 {
        (self.e_at_a.pearson - self.o_at_a.pearson)
            .abs()
            .max(self.angle_difference())
    }
}

pub fn assignment_sensitivity(axis: ScanAxis, base: &ScanPlan, setup: &Setup) -> Result<AssignmentSensitivity> {
    let summary = |assignment| {
        let plan = ScanPlan {
            axis,
            assignment,
            ..*base
        };
        summarize(&run_scan(&plan, setup)?)
    };
    let (ea, oa) = rayon::join(
        || summary(DetectionAssignment::EAtA),
        || summary(DetectionAssignment::OAtA),
    );
    Ok(AssignmentSensitivity {
        e_at_a: ea?,
        o_at_a: oa?,
    })
}

/// Pearson coefficient of a scan with an isotropic pump of the given waist.
pub fn pearson_at_waist(axis: ScanAxis, waist: f64, base: &ScanPlan, setup: &Setup) -> Result<f64> {
    if !(waist > 0.0 && waist.is_finite()) {
        return Err(Error::invalid("waist", format!("must be > 0, got {waist}")));
    }
    let mut s = setup.clone();
    s.pump = setup.pump.with_waist(waist);
    let plan = ScanPlan { axis, ..*base };
    Ok(summarize(&run_scan(&plan, &s)?)?.pearson)
}

pub fn waist_sweep(axis: ScanAxis, waists: &[f64], base: &ScanPlan, setup: &Setup) -> Result<Vec<(f64, f64)>> {
    waists
        .par_iter()
        .map(|&w| Ok((w, pearson_at_waist(axis, w, base, setup)?)))
        .collect()
}

/// Waist (m) at which the scan's Pearson coefficient crosses zero, by
/// bisection to `tol`.
pub fn find_sign_transition(
    axis: ScanAxis,
    w_lo: f64,
    w_hi: f64,
    tol: f64,
    base: &ScanPlan,
    setup: &Setup,
) -> Result<f64> {
    bisect(|w| pearson_at_waist(axis, w, base, setup), w_lo, w_hi, tol)
}
