use std::path::Path;
use std::process::{Command, Output};

fn hspot(args: &[&str], cwd: &Path, env_out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hspot"));
    c.args(args).current_dir(cwd).env_remove("HSPOT_OUT");
    if let Some(p) = env_out {
        c.env("HSPOT_OUT", p);
    }
    c.output().expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn passing_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = hspot(&["--out", "o", "verify", "gegenbauer"], dir.path(), None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("o/verify-gegenbauer.csv")).unwrap();
    assert!(csv.starts_with("check,lhs,rhs,abs_err,rel_err,pass\n"));
    assert!(csv.lines().any(|l| l.starts_with("generating-sum lambda=1 r=0.5") && l.contains(",4,")), "{csv}");
}

#[test]
fn refused_probe_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_scenario(dir.path(), "bad.scn", "name = bad\noperation = growth\n[parameters]\nm = 0\ndata = abs-power\npower = 3\n");
    let out = hspot(&["--out", "o", "probe", "growth", &s], dir.path(), None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    assert!(dir.path().join("o/bad.report.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "nonsense"],
        vec!["kernel", "plane", "--z", "0,-1", "--t", "0"],
        vec!["--tol", "-1", "verify", "mobius"],
        vec!["probe", "growth", "missing.scn"],
    ] {
        let out = hspot(&args, dir.path(), None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error"), "{args:?}");
    }
    let s = write_scenario(dir.path(), "lb.scn", "operation = lower-bound\n");
    assert_eq!(hspot(&["probe", "growth", &s], dir.path(), None).status.code(), Some(2));
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let s = write_scenario(dir.path(), "e.scn", "name = e\noperation = growth\n[parameters]\ndata = zero\nk_max = 2\n");
    assert_eq!(hspot(&["probe", "growth", &s], dir.path(), Some(&env_dir)).status.code(), Some(0));
    assert!(env_dir.join("e.csv").exists());
    assert_eq!(hspot(&["--out", "flag", "probe", "growth", &s], dir.path(), Some(&env_dir)).status.code(), Some(0));
    assert!(dir.path().join("flag/e.csv").exists());
    assert_eq!(hspot(&["probe", "growth", &s], dir.path(), None).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(dir.path().join("hspot-out/e.csv")).unwrap(), "R,ratio\n2,0\n4,0\n");
}

#[test]
fn kernel_and_gegenbauer_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = hspot(&["kernel", "plane", "--z", "0,1", "--t", "0"], dir.path(), None);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.318309886183791");
    let out = hspot(&["--json", "gegenbauer", "--lambda", "1.5", "--k", "2", "--max"], dir.path(), None);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 6.0);
}

#[test]
fn json_report_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = hspot(&["--json", "--out", "o", "--seed", "2", "verify", "mobius"], dir.path(), None);
    assert_eq!(out.status.code(), Some(0));
    let printed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/verify-mobius.report.json")).unwrap()).unwrap();
    assert_eq!(printed, file);
    assert_eq!(file["config"]["seed"], 2);
    assert_eq!(file["pass"], true);
}
