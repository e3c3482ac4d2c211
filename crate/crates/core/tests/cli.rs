//! End-to-end checks of the `lab` binary: exit-code contract, output files
//! and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to launch lab")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const AUDIT_CFG: &str = "resolution = 6\nseed_count = 2\nspectrum_slope = 3\n\
                         s_values = 0.75, 1.5\ndealias = none\nout_dir = out_audit\n";

const EVOLVE_CFG: &str = "resolution = 8\nviscosity = 1\ndt = 1e-3\nt_end = 0.03\n\
                          s_values = 1.5\ndealias = two-thirds\ninitial = taylor_green\n\
                          amplitude = 1e-4\nsample_every = 5\nout_dir = out_evolve\n";

#[test]
fn audit_runs_green_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "audit.cfg", AUDIT_CFG);
    let out = lab(&["audit", "audit.cfg"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv1 = fs::read(tmp.path().join("out_audit/audits.csv")).unwrap();
    let manifest = fs::read_to_string(tmp.path().join("out_audit/manifest.txt")).unwrap();
    assert!(manifest.contains("command = audit"));
    assert!(manifest.contains("pass = true"));
    assert!(manifest.contains("digest = "));

    // Exploratory rows exist for s = 0.75 and never fail the suite.
    let text = String::from_utf8(csv1.clone()).unwrap();
    assert!(text.lines().any(|l| l.contains("lemma_chain") && l.contains(",7.5000000000000000e-1,")));

    let out = lab(&["audit", "audit.cfg"], tmp.path());
    assert!(out.status.success());
    let csv2 = fs::read(tmp.path().join("out_audit/audits.csv")).unwrap();
    assert_eq!(csv1, csv2, "identical configs must produce byte-identical CSVs");
}

#[test]
fn evolve_runs_green_with_monotone_l2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "evolve.cfg", EVOLVE_CFG);
    let out = lab(&["evolve", "evolve.cfg"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("existence time bound"));

    let csv = fs::read_to_string(tmp.path().join("out_evolve/trajectory.csv")).unwrap();
    let mut l2: Vec<f64> = Vec::new();
    for line in csv.lines().skip(2) {
        l2.push(line.split(',').nth(1).unwrap().parse().unwrap());
    }
    assert!(l2.len() >= 3);
    assert!(l2.windows(2).all(|w| w[1] < w[0]), "viscous L2 must decrease");
    assert!(tmp.path().join("out_evolve/snapshot_initial.specfield").exists());
    assert!(tmp.path().join("out_evolve/snapshot_final.specfield").exists());

    // Determinism of the trajectory file.
    let first = fs::read(tmp.path().join("out_evolve/trajectory.csv")).unwrap();
    let out = lab(&["evolve", "evolve.cfg"], tmp.path());
    assert!(out.status.success());
    let second = fs::read(tmp.path().join("out_evolve/trajectory.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn evolve_euler_branch_emits_rate_rows() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "euler.cfg",
        "resolution = 8\nviscosity = 0\ndt = 1e-3\nt_end = 0.03\ns_values = 3.0\n\
         dealias = two-thirds\ninitial = taylor_green\namplitude = 1.0\n\
         sample_every = 5\nout_dir = out_euler\n",
    );
    let out = lab(&["evolve", "euler.cfg"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("euler rate inequality"));
    let audits = fs::read_to_string(tmp.path().join("out_euler/audits.csv")).unwrap();
    assert!(audits.contains("euler_rate_inequality"));
}

#[test]
fn missing_config_exits_two_and_names_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(&["audit", "no_such_file.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("no_such_file.cfg"), "{stderr}");
}

#[test]
fn malformed_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.cfg", "nonsense_key = 12\n");
    let out = lab(&["evolve", "bad.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cfl_violation_exits_one_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "cfl.cfg",
        "resolution = 8\nviscosity = 0\ndt = 0.2\nt_end = 1.0\ns_values = 1.5\n\
         dealias = two-thirds\ninitial = taylor_green\namplitude = 1.0\n\
         sample_every = 1\nout_dir = out_cfl\n",
    );
    let out = lab(&["evolve", "cfl.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("CFL"), "{stderr}");
}

#[test]
fn constants_and_oracle_exit_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(&["constants", "1.5"], tmp.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("K_s"));
    assert!(stdout.contains("note (young)"));

    let out = lab(&["oracle", "--resolution", "5", "--seeds", "2"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("T_blow = 0.5"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn evolve_accepts_snapshot_initial_condition() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "evolve.cfg", EVOLVE_CFG);
    let out = lab(&["evolve", "evolve.cfg"], tmp.path());
    assert!(out.status.success());
    write(
        tmp.path(),
        "resume.cfg",
        "resolution = 8\nviscosity = 1\ndt = 1e-3\nt_end = 0.02\ns_values = 1.5\n\
         dealias = two-thirds\ninitial = file:out_evolve/snapshot_final.specfield\n\
         amplitude = 1.0\nsample_every = 5\nout_dir = out_resume\n",
    );
    let out = lab(&["evolve", "resume.cfg"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
