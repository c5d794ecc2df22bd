use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_optomech"));
    cmd.env_remove("OPTOMECH_CONFIG");
    cmd
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("optomech-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn mos_point_prints_named_values() {
    let o = run(bin().args(["mos", "--set", "mos.phi_ratio=0"]));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("g_omega0_over_g00 = 1.0000000000000000e0"),
        "{text}"
    );
}

#[test]
fn sweep_is_byte_identical_across_runs_and_workers() {
    let dir = scratch("determinism");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for (path, workers) in [(&a, "1"), (&b, "3")] {
        let o = run(bin()
            .args([
                "mate",
                "--sweep",
                "x=1e-6:1.1e-6:33",
                "--workers",
                workers,
                "--out",
            ])
            .arg(path));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let meta =
        |p: &PathBuf| std::fs::read(PathBuf::from(format!("{}.meta.toml", p.display()))).unwrap();
    assert_eq!(meta(&a), meta(&b));
}

#[test]
fn figure_writes_dataset_and_sidecar() {
    let dir = scratch("figure");
    let path = dir.join("fig3.csv");
    let o = run(bin().args(["figure", "--id", "fig3", "--out"]).arg(&path));
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("phi_ratio,gamma_over_gamma0"));
    assert_eq!(lines.count(), 801);
    let meta: toml::Table = std::fs::read_to_string(dir.join("fig3.csv.meta.toml"))
        .unwrap()
        .parse()
        .unwrap();
    for key in ["phi0", "gamma0", "g00"] {
        assert!(meta["normalizers"][key].as_float().unwrap() > 0.0);
    }
}

#[test]
fn config_file_from_environment() {
    let dir = scratch("env");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "[mos]\nt = 0.01\nphi_ratio = 0.0\n").unwrap();
    let o = run(bin().env("OPTOMECH_CONFIG", &cfg).arg("mos"));
    assert!(o.status.success());
    let with_env = stdout(&o);
    let o = run(bin()
        .arg("mos")
        .args(["--set", "mos.t=0.01", "--set", "mos.phi_ratio=0"]));
    assert_eq!(with_env, stdout(&o));
}

#[test]
fn scan_table_in_config() {
    let dir = scratch("scan");
    let cfg = dir.join("scan.toml");
    std::fs::write(
        &cfg,
        "[scan]\nparameter = \"noise.xi\"\nstart = -1.0\nstop = 1.0\npoints = 5\n",
    )
    .unwrap();
    let o = run(bin().arg("--config").arg(&cfg).arg("noise"));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("xi,gamma3_ratio,product"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn config_errors_exit_with_one() {
    for args in [
        vec!["mos", "--sweep", "phi_ratio=-4:4:1"],
        vec!["mos", "--set", "mos.nonsense=1"],
        vec!["mos", "--set", "mos.t=2"],
        vec!["mos", "--workers", "0"],
        vec!["mos", "--config", "/nonexistent/optomech.toml"],
    ] {
        let o = run(bin().args(&args));
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn sweep_errors_name_the_point() {
    let o = run(bin().args(["mos", "--sweep", "t=0.5:1.5:3"]));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("mos.t = 1.5e0"), "{err}");
}

#[test]
fn validate_passes_then_fails_with_corrupted_tolerance() {
    let o = run(bin().args(["validate", "--suite", "fast"]));
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(bin().args(["validate", "--set", "tolerances.unitarity=1e-20"]));
    assert_eq!(o.status.code(), Some(2));
    let line = stdout(&o)
        .lines()
        .find(|l| l.contains("unitarity"))
        .unwrap()
        .to_string();
    assert!(line.starts_with("FAIL"), "{line}");
    assert!(line.contains("e-1"), "measured error missing: {line}");
}

#[test]
fn validate_report_file() {
    let dir = scratch("report");
    let path = dir.join("report.toml");
    let o = run(bin()
        .args(["validate", "--tolerance-profile", "strict", "--out"])
        .arg(&path));
    assert!(o.status.success(), "{}", stdout(&o));
    let report: toml::Table = std::fs::read_to_string(&path).unwrap().parse().unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"].as_bool() == Some(true)));
    let unitarity = checks
        .iter()
        .find(|c| c["name"].as_str() == Some("unitarity"))
        .unwrap();
    assert_eq!(unitarity["tolerance"].as_float(), Some(1e-12));
}

#[test]
fn compare_table_and_missing_point() {
    let o = run(bin().arg("compare"));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("MATE") && text.contains("2.0000e3"), "{text}");
    let o = run(bin().args(["compare", "--set", "mos.t=0.2"]));
    assert!(o.status.success());
    assert!(stdout(&o).contains("no zero-dispersive point"));
}
