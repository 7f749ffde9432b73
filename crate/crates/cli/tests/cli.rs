use std::fs;
use std::path::Path;
use std::process::Command;

use fracab_cli::{parse_config, read_csv, run_simulation};

fn fracab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fracab")).args(args).output().unwrap()
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let cfg = write_cfg(
        dir.path(),
        "a.cfg",
        &format!(
            "problem=advection\nc=1\nnx=101\nx_min=0\nx_max=1\nt_end=0.5\nnt=400\noutput_path={}\n",
            csv.display()
        ),
    );
    let out = fracab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("max abs error"));
    assert!(stdout.contains("4/(3c)"));
    let rows = read_csv(fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 51 * 101);
    let last = rows.iter().filter(|r| r.t == 0.5).map(|r| r.abs_err.unwrap()).fold(0.0, f64::max);
    assert!(last <= 0.05);
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["one.csv", "two.csv"] {
        let src = format!(
            "problem=fractional_diffusion\nalpha=0.8\nd=0.1\nx_min=0\nx_max=3.141592653589793\nnx=21\nt_end=0.2\nnt=200\noutput_path={}\n",
            dir.path().join(name).display()
        );
        run_simulation(&parse_config(&src).unwrap()).unwrap();
        bytes.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn halted_run_exits_two_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("blow.csv");
    let cfg = write_cfg(
        dir.path(),
        "u.cfg",
        &format!(
            "problem=advection\nc=1\nnx=101\nx_min=0\nx_max=1\nt_end=20\nnt=1000\noutput_path={}\n",
            csv.display()
        ),
    );
    let out = fracab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("HALTED"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
    let rows = read_csv(fs::File::open(&csv).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.u_numeric.is_finite()));
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "bad.cfg", "problem=fractional_diffusion\nt_end=1\nnt=10\n");
    let out = fracab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("'d'"));

    let cfg = write_cfg(dir.path(), "ok.cfg", "problem=ode_caputo\nalpha=0.7\nt_end=1\nnt=10\n");
    assert_eq!(fracab(&["converge", &cfg, "--levels", "2"]).status.code(), Some(1));
    assert_eq!(fracab(&["sweep", &cfg, "--margins", "0.4"]).status.code(), Some(1));
    assert_eq!(fracab(&["run", "/nonexistent/path.cfg"]).status.code(), Some(1));
}

#[test]
fn converge_sweep_check_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "a.cfg",
        "problem=advection\nc=1\nnx=51\nx_min=0\nx_max=1\nt_end=0.5\nnt=200\n",
    );
    let out = fracab(&["converge", &cfg, "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);

    let out = fracab(&["sweep", &cfg, "--margins", "0.4,2.0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);

    let out = fracab(&["check", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("residual bound"));
}

#[test]
fn zero_initial_data_stays_zero() {
    let cfg = parse_config("problem=ode_caputo\nalpha=0.3\nu0=0\nlambda=-4\nt_end=2\nnt=64\n").unwrap();
    let report = run_simulation(&cfg).unwrap();
    assert_eq!(report.max_abs_error_final, Some(0.0));
    assert_eq!(report.final_solution, vec![0.0]);
}
