//! Text formats for grids, summaries and sweep tables.

use std::fmt::Write as _;

use spdc_core::correlation::{CorrelationSummary, JointDistribution};

/// Locale-free number text: plain decimal inside `[1e-3, 1e4]`, exponent
/// notation outside, and a bare `0` for zero.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".to_owned()
    } else if (1e-3..=1e4).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn digest_line(digest: &str) -> String {
    format!("# config-digest: sha256:{digest}\n")
}

pub fn grid(dist: &JointDistribution, digest: &str, mode: &str) -> String {
    let mut s = digest_line(digest);
    let _ = writeln!(
        s,
        "# scan axis={} assignment={} points={}x{} mode={}",
        dist.axis.as_str(),
        dist.assignment.as_str(),
        dist.n_a(),
        dist.n_b(),
        mode
    );
    s.push_str("# units: x in m, q in rad/m, S normalised to a maximum of 1\n");
    s.push_str("# columns: x_A,x_B,q_A,q_B,S\n");
    for i in 0..dist.n_a() {
        for j in 0..dist.n_b() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                number(dist.positions_a[i]),
                number(dist.positions_b[j]),
                number(dist.momenta_a[i]),
                number(dist.momenta_b[j]),
                number(dist.value(i, j))
            );
        }
    }
    s
}

pub fn summary(dist: &JointDistribution, sum: &CorrelationSummary, digest: &str) -> String {
    let c = sum.covariance;
    let mut s = digest_line(digest);
    let _ = writeln!(s, "axis = \"{}\"", dist.axis.as_str());
    let _ = writeln!(s, "assignment = \"{}\"", dist.assignment.as_str());
    let _ = writeln!(s, "points = {}", dist.n_a());
    let _ = writeln!(s, "pearson = {:?}", sum.pearson);
    let _ = writeln!(s, "angle_rad = {:?}", sum.angle);
    let _ = writeln!(s, "angle_deg = {:?}", sum.angle.to_degrees());
    let _ = writeln!(s, "peak_q = [{:?}, {:?}]", sum.peak[0], sum.peak[1]);
    let _ = writeln!(s, "mean_q = [{:?}, {:?}]", sum.mean[0], sum.mean[1]);
    let _ = writeln!(s, "covariance = [[{:?}, {:?}], [{:?}, {:?}]]", c[0][0], c[0][1], c[1][0], c[1][1]);
    s
}

pub fn sweep(rows: &[(f64, f64)], axis: &str, digest: &str) -> String {
    let mut s = digest_line(digest);
    let _ = writeln!(s, "# waist sweep axis={axis}, isotropic pump");
    s.push_str("# columns: waist_um,pearson\n");
    for &(w, p) in rows {
        let _ = writeln!(s, "{},{}", number(w * 1e6), number(p));
    }
    s
}
