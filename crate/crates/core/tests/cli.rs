use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use fracphase::spectral::Field2D;

fn fracphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_ch_run(out: &Path) -> Output {
    fracphase(&[
        "run",
        "--preset",
        "ch_random",
        "--grid",
        "16",
        "--nsteps",
        "20",
        "--seed",
        "3",
        "--set",
        "snapshots=4",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_artifacts_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_ch_run(dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("result PASS"));
    assert!(stdout.contains("PASS mass_conservation"));

    let csv = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,t,E,E_modified,fracDE,D_m,E_weighted,max_abs,mean"));
    assert_eq!(lines.count(), 21);
    assert_eq!(
        fs::read_to_string(dir.path().join("summary.txt")).unwrap(),
        stdout.as_ref()
    );

    let snaps: Vec<_> = fs::read_dir(dir.path().join("snapshots")).unwrap().collect();
    assert_eq!(snaps.len(), 5);
    let f = fs::File::open(dir.path().join("snapshots/step_000020.bin")).unwrap();
    let (field, t) = Field2D::read_snapshot(BufReader::new(f)).unwrap();
    assert_eq!((field.grid().nx, field.grid().ny), (16, 16));
    assert!((t - 0.2).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    small_ch_run(a.path());
    small_ch_run(b.path());
    for name in ["energy.csv", "snapshots/step_000020.bin"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# smooth start\npreset = ac_smooth\nnsteps = 5\nscheme = sav1\n").unwrap();
    let out = fracphase(&["run", "--config", cfg.to_str().unwrap(), "--alpha", "0.7"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.starts_with("model ac scheme sav1 alpha 0.7 grid 16x16 steps 5"), "{stdout}");
}

#[test]
fn bad_input_exits_with_two() {
    let out = fracphase(&["run", "--preset", "ac_smooth", "--set", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let out = fracphase(&["run", "--preset", "ac_smooth", "--set", "S=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fracphase(&["run", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_of_order_one() {
    let out = fracphase(&["sweep-matrices", "--nmax", "1", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "n,alpha,mesh_kind,matrix,P1,P2,P3,Q1,Q2,min_eig");
    assert_eq!(lines.len(), 7);
    assert!(lines[1..].iter().all(|l| l.contains("true,true,true,true,true")));
}

#[test]
fn sweep_writes_file_with_several_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = fracphase(&[
        "sweep-matrices",
        "--nmax",
        "20",
        "--alpha",
        "0.2,0.7",
        "--mesh",
        "graded:2",
        "--mesh",
        "random:4",
        "--nested",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // 2 meshes x 2 orders x 2 nonuniform families x 20 sizes
    assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 1 + 160);
}

#[test]
fn convergence_exit_code_follows_expectation() {
    let ok = fracphase(&["convergence", "--alpha", "0.5", "--expect", "1.5", "--tol", "0.1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("order 1.4"));
    let off = fracphase(&["convergence", "--alpha", "0.5", "--expect", "2.5"]);
    assert_eq!(off.status.code(), Some(1));
}
