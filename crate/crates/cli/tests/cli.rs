use std::path::Path;
use std::process::{Command, Output};

fn spdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdc")).args(args).output().unwrap()
}

fn text(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn summary_value(summary: &str, key: &str) -> f64 {
    summary
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap()
        .parse()
        .unwrap()
}

fn scan(dir: &Path, axis: &str, assignment: &str, extra: &[&str]) -> (String, String) {
    let out = dir.join(format!("{axis}_{assignment}.csv"));
    let mut args = vec!["scan", "--axis", axis, "--assignment", assignment, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = spdc(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = dir.join(format!("{axis}_{assignment}.csv.summary.toml"));
    (text(&out), text(&summary))
}

#[test]
fn scan_signs_and_format() {
    let dir = tempfile::tempdir().unwrap();
    let (grid, ys) = scan(dir.path(), "y", "ea", &[]);
    assert!(summary_value(&ys, "pearson") > 0.0);
    let (_, xs) = scan(dir.path(), "x", "oa", &[]);
    assert!(summary_value(&xs, "pearson") < 0.0);

    assert!(grid.starts_with("# config-digest: sha256:"));
    assert!(ys.starts_with("# config-digest: sha256:"));
    let rows: Vec<&str> = grid.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 64 * 64);
    for r in &rows {
        let v: Vec<f64> = r.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(v.len(), 5);
        assert!(v[4] >= 0.0);
        for cell in r.split(',') {
            let a = cell.parse::<f64>().unwrap().abs();
            let exp = cell.contains('e');
            assert_eq!(exp, a != 0.0 && !(1e-3..=1e4).contains(&a), "{cell}");
        }
    }
}

#[test]
fn identical_runs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = scan(a.path(), "x", "ea", &["--points", "12"]);
    let rb = scan(b.path(), "x", "ea", &["--points", "12"]);
    assert_eq!(ra, rb);
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[scan]\npoints = 10\n[pump]\nwaist_x_um = 500\nwaist_y_um = 500\n").unwrap();
    let (grid, s) = scan(dir.path(), "y", "ea", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(grid.lines().filter(|l| !l.starts_with('#')).count(), 100);
    assert!(summary_value(&s, "pearson") < 0.0);
}

#[test]
fn bad_config_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[crystal]\nlength_mm = -4\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = spdc(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("crystal.length_mm"), "{err}");
    assert!(!out.exists());
}

#[test]
fn sweep_table() {
    let o = spdc(&["sweep", "--axis", "y", "--wmin", "31", "--wmax", "500", "--steps", "4"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("# config-digest: sha256:"));
    let rows: Vec<(f64, f64)> = s
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (w, p) = l.split_once(',').unwrap();
            (w.parse().unwrap(), p.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(rows[0].1 > 0.0 && rows[3].1 < 0.0);
    assert!(!spdc(&["sweep", "--wmin", "50", "--wmax", "40", "--steps", "3"]).status.success());
    assert!(!spdc(&["sweep", "--wmin", "40", "--wmax", "50", "--steps", "1"]).status.success());
}

#[test]
fn transition_inside_bracket_and_bracket_error() {
    let o = spdc(&["transition", "--axis", "y", "--wlo", "31", "--whi", "500", "--tol", "1"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    let w: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("transition_waist_um = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(w > 31.0 && w < 500.0);
    let bad = spdc(&["transition", "--axis", "y", "--wlo", "300", "--whi", "500"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8(bad.stderr).unwrap().contains("bracket"));
}

#[test]
fn check_passes_on_defaults() {
    let o = spdc(&["check"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(o.status.success(), "{s}");
    let checks = s.lines().filter(|l| l.starts_with("PASS ")).count();
    assert!(checks >= 4, "{s}");
    assert!(!s.contains("FAIL "));
}

#[test]
fn check_names_a_corrupt_material_file() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("bbo.toml");
    std::fs::write(&mat, "name = \"BBO\"\nformula_id = \"mystery\"\n").unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[crystal]\nmaterial = \"bbo.toml\"\n").unwrap();
    let o = spdc(&["check", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("FAIL material-file")), "{s}");
}
