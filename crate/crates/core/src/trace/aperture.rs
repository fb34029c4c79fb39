//! Finite-pinhole smoothing of a scanned coincidence grid.
//!
//! Each detector integrates over a disc. On a 1-D scan line the disc reduces
//! to its chord-length profile along the scan axis, which is applied as a
//! separable kernel over the A and B axes. Boundaries are mirrored (half-sample
//! symmetric), making the operator doubly stochastic: the grid sum is kept and
//! the maximum cannot grow.

use crate::error::{Error, Result};

/// `int_{-r}^{t} 2 sqrt(r^2 - s^2) ds` up to a constant.
fn disc_primitive(t: f64, r: f64) -> f64 {
    let t = t.clamp(-r, r);
    t * (r * r - t * t).max(0.0).sqrt() + r * r * (t / r).asin()
}

/// Normalised 1-D weights of a disc of `diameter` projected on a grid of `step`.
pub fn disc_kernel(diameter: f64, step: f64) -> Vec<f64> {
    let r = 0.5 * diameter;
    if r <= 0.0 {
        return vec![1.0];
    }
    let half = (r / step + 0.5).floor() as usize;
    let mut w: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let k = i as f64 - half as f64;
            let lo = (k - 0.5) * step;
            let hi = (k + 0.5) * step;
            disc_primitive(hi, r) - disc_primitive(lo, r)
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut j = i;
    loop {
        if j < 0 {
            j = -1 - j;
        } else if j >= n {
            j = 2 * n - 1 - j;
        } else {
            return j as usize;
        }
    }
}

fn convolve_axis(values: &[f64], n_a: usize, n_b: usize, kernel: &[f64], along_a: bool) -> Vec<f64> {
    let half = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; values.len()];
    for i in 0..n_a {
        for j in 0..n_b {
            let mut acc = 0.0;
            for (t, w) in kernel.iter().enumerate() {
                let off = t as isize - half;
                let (ii, jj) = if along_a {
                    (mirror(i as isize + off, n_a), j)
                } else {
                    (i, mirror(j as isize + off, n_b))
                };
                acc += w * values[ii * n_b + jj];
            }
            out[i * n_b + j] = acc;
        }
    }
    out
}

/// Smooths a row-major `n_a x n_b` grid with a pinhole of `diameter` in both
/// detector planes. `step_a`, `step_b` are the position spacings (same unit
/// as `diameter`). A zero diameter returns the grid unchanged.
pub fn smooth_grid(
    values: &[f64],
    n_a: usize,
    n_b: usize,
    step_a: f64,
    step_b: f64,
    diameter: f64,
) -> Result<Vec<f64>> {
    if values.len() != n_a * n_b {
        return Err(Error::invalid("grid", "value count does not match shape"));
    }
    if !(diameter >= 0.0) {
        return Err(Error::invalid("optics.pinhole_mm", "diameter must be >= 0"));
    }
    if diameter == 0.0 {
        return Ok(values.to_vec());
    }
    let span_a = step_a * (n_a.saturating_sub(1)) as f64;
    let span_b = step_b * (n_b.saturating_sub(1)) as f64;
    if diameter > span_a || diameter > span_b {
        return Err(Error::invalid(
            "optics.pinhole_mm",
            format!(
                "pinhole diameter {diameter:e} exceeds the scan window ({span_a:e} x {span_b:e})"
            ),
        ));
    }
    let ka = disc_kernel(diameter, step_a);
    let kb = disc_kernel(diameter, step_b);
    let pass = convolve_axis(values, n_a, n_b, &ka, true);
    Ok(convolve_axis(&pass, n_a, n_b, &kb, false))
}
