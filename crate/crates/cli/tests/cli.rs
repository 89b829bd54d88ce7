use std::path::Path;
use std::process::{Command, Output};

fn raimsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raimsim"))
        .current_dir(dir)
        .env_remove("RAIMSIM_CONFIG_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn crit_map_is_deterministic_and_headed() {
    let d = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = raimsim(d.path(), &["crit-map", "--q", "0.1", "--ion", "Be9", "--omega-range-mhz", "1:1000", "--points", "50", "--out", name]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read(&d.path().join("a.csv"));
    let b = read(&d.path().join("b.csv"));
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# command")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));
    assert!(a.starts_with("# raimsim "));
    assert!(a.contains("# config-sha256: "));
    assert!(a.contains("omega_rf_mhz [MHz]"));
    let rows = data_rows(&a);
    assert_eq!(rows.len(), 50);
    // critical n falls with drive frequency
    assert!(rows[0][1] > rows[49][1]);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    for sub in ["one", "two"] {
        let o = raimsim(d.path(), &["--out-dir", sub, "modes"]);
        assert!(o.status.success());
    }
    assert_eq!(read(&d.path().join("one/modes.csv")), read(&d.path().join("two/modes.csv")));
}

#[test]
fn missing_defect_table_exits_with_config_code() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("run.toml"), "[atom]\ndefects = \"missing_defects.txt\"\n").unwrap();
    let o = raimsim(d.path(), &["--config", "run.toml", "stark-map", "--n", "22", "--rmin", "180", "--rmax", "181", "--step", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing_defects.txt"));
}

#[test]
fn bad_config_reports_the_line() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("run.toml"), "[trap]\nq = 0.1\nnot_a_key = 3\n").unwrap();
    let o = raimsim(d.path(), &["--config", "run.toml", "crit-map"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn config_directory_variable_is_searched() {
    let d = tempfile::tempdir().unwrap();
    let cfgdir = d.path().join("configs");
    std::fs::create_dir(&cfgdir).unwrap();
    std::fs::write(cfgdir.join("run.toml"), "[trap]\nq = 0.2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_raimsim"))
        .current_dir(d.path())
        .env("RAIMSIM_CONFIG_DIR", &cfgdir)
        .args(["--config", "run.toml", "crit-map", "--points", "3"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(&d.path().join("critmap.csv")).contains("q = 0.2"));
}

#[test]
fn outputs_stay_inside_the_output_directory() {
    let d = tempfile::tempdir().unwrap();
    let o = raimsim(d.path(), &["crit-map", "--out", "../escape.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!d.path().parent().unwrap().join("escape.csv").exists());
}

#[test]
fn modes_honour_a_geometry_file() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("geom.cfg"),
        "[geometry]\nm_ion = 9.012\nm_atom = 86.909\nomega_ion = 1.0\nomega_tweezer = 0.3\nomega_m = 36.0\nd = 1.735\n",
    )
    .unwrap();
    let o = raimsim(d.path(), &["modes", "--geometry", "geom.cfg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&d.path().join("modes.csv"));
    let gg: Vec<f64> = text.lines().filter(|l| l.starts_with("gg,")).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(gg.len(), 4);
    assert!((gg[2] - 0.3).abs() < 1e-9 && (gg[3] - 0.3).abs() < 1e-9);
    std::fs::write(d.path().join("bad.cfg"), "m_ion = -1.0\n").unwrap();
    assert_eq!(raimsim(d.path(), &["modes", "--geometry", "bad.cfg"]).status.code(), Some(2));
}

#[test]
fn small_overlap_and_blockade_runs() {
    let d = tempfile::tempdir().unwrap();
    let small = ["--cutoff-spec", "bus=1,high=0", "--order", "16"];
    let mut args = vec!["overlaps"];
    args.extend(small);
    let o = raimsim(d.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&d.path().join("overlaps.csv"));
    assert!(text.contains("gg-gR,0000,0010,"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 4 * 9);

    let mut args = vec!["blockade", "--tf-us", "2"];
    args.extend(small);
    let o = raimsim(d.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&read(&d.path().join("traj.csv")));
    assert!((rows.last().unwrap()[0] - 2.0).abs() < 1e-9);
    for r in &rows {
        assert!((r[1] + r[2] + r[3] + r[4] - 1.0).abs() < 1e-6);
        assert!((r[2] - r[3]).abs() < 1e-6);
    }
}

#[test]
fn antiblockade_writes_both_files() {
    let d = tempfile::tempdir().unwrap();
    let o = raimsim(
        d.path(),
        &[
            "antiblockade", "--cutoff-spec", "bus=1,high=0", "--order", "16", "--tf-us", "1", "--dt-ns", "4", "--draws", "2",
            "--np", "2", "--seed", "7", "--out", "t.csv", "p.csv",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pulses = data_rows(&read(&d.path().join("p.csv")));
    assert!(pulses.iter().all(|r| (0.0..=1.0 + 1e-9).contains(&r[1]) && (0.0..=1.0 + 1e-9).contains(&r[2])));
    assert_eq!(pulses.len(), data_rows(&read(&d.path().join("t.csv"))).len());
}

#[test]
fn fig3a_keeps_double_excitation_small() {
    let d = tempfile::tempdir().unwrap();
    let o = raimsim(d.path(), &["repro", "fig3a"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&read(&d.path().join("fig3a.csv")));
    let max_rr = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    assert!(max_rr <= 0.01, "{max_rr}");
}
