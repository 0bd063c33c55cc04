use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn willis(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_willis"))
        .args(args)
        .current_dir(dir)
        .env_remove("WILLIS_CONFIG")
        .env_remove("WILLIS_METHOD")
        .env_remove("WILLIS_WEIGHT")
        .env_remove("WILLIS_OUT")
        .env_remove("WILLIS_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(p).unwrap()
}

const SMALL: &str = "[numerics]\nelements = 32\nsample_points = 64\nrealizations = 4\nmodes = 16\n";

#[test]
fn exact_grid_has_one_row_per_point_and_a_static_row() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "method = \"exact\"\n[sweep]\nzeta = [0.0]\n");
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "effective"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(d.path().join("o/effective.csv"));
    let golden = read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/effective_header.csv"));
    assert_eq!(csv.lines().next().unwrap(), golden.trim_end());
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 26);
    let s = &rows[0];
    let f = |i: usize| s[i].parse::<f64>().unwrap();
    assert_eq!(s[2], "0.0");
    assert!((f(5) - 0.116).abs() / 0.116 < 5e-3);
    assert!((f(11) - 1.0).abs() < 5e-3);
    assert!(f(7).abs() < 1e-6 && f(8).abs() < 1e-6);
    assert!(rows.iter().all(|r| r[13] == "ok"));
}

#[test]
fn all_methods_emit_three_rows_in_order() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", &format!("[sweep]\nomega_bar = [0.1, 0.3]\nzeta = [0.0, 1.0]\n{SMALL}"));
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "effective"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(d.path().join("o/effective.csv"));
    let keys: Vec<String> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            format!("{} {} {}", c[2], c[3], c[0])
        })
        .collect();
    let want: Vec<String> = ["0.1", "0.3"]
        .iter()
        .flat_map(|w| ["0.0", "1.0"].map(move |z| (w, z)))
        .flat_map(|(w, z)| ["eim", "exact", "brm"].map(move |m| format!("{w} {z} {m}")))
        .collect();
    assert_eq!(keys, want);
}

#[test]
fn reruns_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", &format!("[sweep]\nomega_bar = [0.05, 0.2]\nzeta = [1.0]\n{SMALL}"));
    let run = || {
        let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "--threads", "3", "effective"]);
        assert_eq!(o.status.code(), Some(0));
        ["effective.csv", "effective.json", "run.json", "config.toml"].map(|f| read(d.path().join("o").join(f)))
    };
    assert_eq!(run(), run());
}

#[test]
fn written_config_round_trips() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "method = \"exact\"\n[sweep]\nomega_bar = [0.2]\n");
    assert_eq!(willis(d.path(), &["--config", "c.toml", "--out", "a", "effective"]).status.code(), Some(0));
    let explicit = read(d.path().join("a/config.toml"));
    assert!(explicit.contains("realizations = 100") && explicit.contains("alpha = 0.75"));
    let csv = read(d.path().join("a/effective.csv"));
    assert_eq!(willis(d.path(), &["--config", "a/config.toml", "effective"]).status.code(), Some(0));
    assert_eq!(explicit, read(d.path().join("a/config.toml")));
    assert_eq!(csv, read(d.path().join("a/effective.csv")));
}

#[test]
fn unknown_config_key_exits_2_naming_the_key() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "[cell]\nconductivity_one = 0.05\n");
    let o = willis(d.path(), &["--config", "c.toml", "effective"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("conductivity_one"));
}

#[test]
fn out_of_range_knob_exits_2() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "[numerics]\nmodes = 4\n");
    let o = willis(d.path(), &["--config", "c.toml", "effective"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_overrides_the_method() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "[sweep]\nomega_bar = [0.2]\nzeta = [1.0]\n");
    let o = Command::new(env!("CARGO_BIN_EXE_willis"))
        .args(["--config", "c.toml", "--out", "o", "effective"])
        .current_dir(d.path())
        .env("WILLIS_METHOD", "exact")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(d.path().join("o/effective.csv")).lines().count(), 2);
}

#[test]
fn all_rows_failing_exits_1() {
    let d = tempfile::tempdir().unwrap();
    // Boundary retrieval has no masked variant, so every row is flagged.
    write(
        d.path(),
        "c.toml",
        &format!("method = \"brm\"\nweight = \"masked2\"\n[sweep]\nomega_bar = [0.2]\nzeta = [1.0]\n{SMALL}"),
    );
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "effective"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(read(d.path().join("o/effective.csv")).contains("unsupported_weight"));
}

#[test]
fn single_uniform_realization_warns() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.toml",
        "method = \"eim\"\nweight = \"uniform\"\n[sweep]\nomega_bar = [0.2]\nzeta = [1.0]\n[numerics]\nrealizations = 1\n",
    );
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "effective"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NY = 1"));
}

#[test]
fn floquet_reports_normalization() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "[sweep]\nomega_bar = [0.01]\n");
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "floquet"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(d.path().join("o/floquet.csv"));
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').take(7).map(|v| v.parse().unwrap()).collect();
    let (dr, di) = (row[4] - 14.841, row[5] - 14.488);
    assert!((dr * dr + di * di).sqrt() / 20.74 < 1e-2, "{csv}");
}

#[test]
fn homogeneous_floquet_number_is_the_phase_wavenumber() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.toml",
        "[cell]\nconductivity_1 = 0.5\ncapacity_1 = 0.5\nconductivity_2 = 0.5\ncapacity_2 = 0.5\npoint_capacity = 0.0\n[sweep]\nomega_bar = [0.2]\n",
    );
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "floquet"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(d.path().join("o/floquet.csv"));
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').take(4).map(|v| v.parse().unwrap()).collect();
    // Homogeneous: mu^2 = +-i omega C / K with Re mu = |Im mu|.
    let mu = num_complex::Complex64::new(row[2], row[3]);
    assert!((mu.norm_sqr() - row[1]).abs() < 1e-10 * row[1], "{csv}");
    assert!((mu.re - mu.im.abs()).abs() < 1e-10 * mu.norm(), "{csv}");
}

#[test]
fn impedance_phase_is_minus_pi_without_offset() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "method = \"exact\"\n[sweep]\nomega_bar = [0.1, 0.3, 0.625]\nzeta = [1.0]\nalpha = [0.0, 0.75]\n");
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "impedance"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = read(d.path().join("o/impedance.csv"));
    for line in csv.lines().skip(1).filter(|l| l.split(',').nth(4) == Some("0.0")) {
        let db: f64 = line.split(',').nth(9).unwrap().parse().unwrap();
        assert!((db + std::f64::consts::PI).abs() < 1e-6, "{line}");
    }
}

#[test]
fn plot_contract() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", "method = \"exact\"\n[sweep]\nomega_bar_range = { start = 0.0, stop = 0.625, count = 6 }\n");
    assert_eq!(willis(d.path(), &["--config", "c.toml", "--out", "o", "effective"]).status.code(), Some(0));
    let o = willis(d.path(), &["--out", "p", "plot", "o/effective.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let svgs: Vec<_> = std::fs::read_dir(d.path().join("p")).unwrap().collect();
    assert_eq!(svgs.len(), 3);
    let first = read(d.path().join("p/effective_ReC_ImC.svg"));
    assert!(first.starts_with("<svg") && first.contains("ω̄"));
    let again = willis(d.path(), &["--out", "q", "plot", "o/effective.csv"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(first, read(d.path().join("q/effective_ReC_ImC.svg")));

    let bad = willis(d.path(), &["--out", "p", "plot", "o/effective.csv", "--panel", "ReQ"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ReQ"));
    write(d.path(), "empty.csv", "");
    assert_eq!(willis(d.path(), &["--out", "p", "plot", "empty.csv"]).status.code(), Some(2));
}

#[test]
fn validate_flags_a_wrong_volume_fraction() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "c.toml", &format!("[cell]\nvolume_fraction = 0.5\n{SMALL}"));
    let o = willis(d.path(), &["--config", "c.toml", "--out", "o", "validate"]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8_lossy(&o.stdout);
    let line = out.lines().find(|l| l.contains("[1] ")).unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
    assert!(out.contains("K = 0.0952"), "{out}");
    let report = read(d.path().join("o/validate.json"));
    assert!(report.contains("\"passed\": false"));
}
