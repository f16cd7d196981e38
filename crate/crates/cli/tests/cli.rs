use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn wqed(dir: &Path, args: &[&str]) -> Output {
    wqed_env(dir, args, &[])
}

fn wqed_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wqed"));
    cmd.current_dir(dir).args(args).env_remove("WQED_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn help_and_version_exit_zero() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&wqed(dir.path(), &["--help"])), 0);
    assert_eq!(code(&wqed(dir.path(), &["--version"])), 0);
    let help = wqed(dir.path(), &["variances", "--help"]);
    assert_eq!(code(&help), 0);
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("n0,n_r,var_nr,n_l,var_nl"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&wqed(dir.path(), &[])), 1);
    assert_eq!(code(&wqed(dir.path(), &["no-such-kind"])), 1);
    assert_eq!(code(&wqed(dir.path(), &["sigma", "--bogus", "1"])), 1);
    assert_eq!(code(&wqed(dir.path(), &["sigma", "--gamma", "abc"])), 1);
    assert_eq!(code(&wqed(dir.path(), &["sigma", "--x0", "5"])), 1);
    assert_eq!(code(&wqed(dir.path(), &["variances", "--n0-sweep", "1:2:0"])), 1);
    assert_eq!(code(&wqed(dir.path(), &["sigma", "--solver", "euler"])), 1);
    assert_eq!(code(&wqed(dir.path(), &["sigma", "-o", "missing/dir/out.csv"])), 1);
    assert!(files(dir.path()).is_empty());
}

#[test]
fn malformed_config_exits_one_without_files() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    for body in [
        "gamma = 1\nthis line is broken\n",
        "gamma = 1\nwidth = 2\n",
        "n0 = 1\nn0 = 2\n",
        "kind = sigma\n",
    ] {
        fs::write(&cfg, body).unwrap();
        let out = wqed(
            dir.path(),
            &["fock-dist", "--config", "bad.cfg", "--x-count", "8", "--q-count", "8"],
        );
        assert_eq!(code(&out), 1, "{body:?}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
        assert_eq!(files(dir.path()), vec!["bad.cfg"]);
    }
    let out = wqed(dir.path(), &["sigma", "--config", "absent.cfg"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn numerical_failures_exit_two_without_files() {
    let dir = TempDir::new().unwrap();
    let out = wqed(dir.path(), &["sigma", "--gamma", "1e200", "--samples", "11"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = wqed(dir.path(), &["fock-spectrum", "--gamma", "1e300", "--q-count", "5"]);
    assert_eq!(code(&out), 2);
    assert!(files(dir.path()).is_empty());
}

#[test]
fn bad_thread_count_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = wqed_env(
        dir.path(),
        &["fock-spectrum", "--q-count", "5"],
        &[("WQED_THREADS", "0")],
    );
    assert_eq!(code(&out), 1);
    let out = wqed_env(
        dir.path(),
        &["fock-spectrum", "--q-count", "5"],
        &[("WQED_THREADS", "many")],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let args = [
        "variances",
        "--n0-sweep",
        "0.5,3,12",
        "--tau-samples",
        "200",
        "--samples",
        "1001",
    ];
    let mut outputs = Vec::new();
    for threads in ["1", "3", "3"] {
        let out = wqed_env(dir.path(), &args, &[("WQED_THREADS", threads)]);
        assert_eq!(code(&out), 0);
        outputs.push(fs::read(dir.path().join("variances.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn spectrum_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let out = wqed(
        dir.path(),
        &[
            "fock-spectrum",
            "--gamma-sweep",
            "0.5,1,10",
            "--omega",
            "0.5",
            "--q-min",
            "-2",
            "--q-max",
            "2",
            "--q-count",
            "9",
        ],
    );
    assert_eq!(code(&out), 0);
    let got = fs::read_to_string(dir.path().join("fock-spectrum.csv")).unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fock_spectrum.csv");
    let golden = fs::read_to_string(golden_path).unwrap();
    let strip = |s: &str| s.lines().skip(1).map(str::to_string).collect::<Vec<_>>();
    // the metadata line carries the version; compare it without the version token
    let meta = |s: &str| {
        s.lines()
            .next()
            .unwrap()
            .split(' ')
            .skip(3)
            .map(str::to_string)
            .collect::<Vec<_>>()
    };
    assert_eq!(meta(&got), meta(&golden));
    assert_eq!(strip(&got), strip(&golden));
}

#[test]
fn metadata_line_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let out = wqed(
        dir.path(),
        &[
            "photon-numbers",
            "--gamma",
            "0.5",
            "--n0-sweep",
            "1:4:3",
            "--omega",
            "0.3",
            "-o",
            "first.csv",
        ],
    );
    assert_eq!(code(&out), 0);
    let first = fs::read_to_string(dir.path().join("first.csv")).unwrap();
    let meta = first.lines().next().unwrap();
    assert!(meta.starts_with("# wqed ") && meta.contains("kind=photon-numbers"));
    let config: String = meta
        .split(' ')
        .skip(3)
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            format!("{k} = {v}\n")
        })
        .collect();
    fs::write(dir.path().join("replay.cfg"), config).unwrap();
    let out = wqed(
        dir.path(),
        &["photon-numbers", "--config", "replay.cfg", "-o", "second.csv"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(first, fs::read_to_string(dir.path().join("second.csv")).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.cfg"), "gamma = 2\nq-count = 3\noutput = cfg.csv\n").unwrap();
    let out = wqed(dir.path(), &["fock-spectrum", "--config", "run.cfg", "--gamma", "4"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("cfg.csv")).unwrap();
    assert!(text.lines().next().unwrap().contains(" gamma=4 "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[0] == 4.0));
}

#[test]
fn distribution_files_show_reflected_negativity() {
    let dir = TempDir::new().unwrap();
    let out = wqed(
        dir.path(),
        &[
            "fock-dist",
            "-o",
            "out.csv",
            "--x-min",
            "-12",
            "--x-max",
            "-2",
            "--x-count",
            "41",
            "--q-min",
            "-2",
            "--q-max",
            "1",
            "--q-count",
            "31",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(files(dir.path()), vec!["out_reflected.csv", "out_transmitted.csv"]);
    let rows = data_rows(&fs::read_to_string(dir.path().join("out_reflected.csv")).unwrap());
    assert_eq!(rows.len(), 41 * 31);
    let min = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    assert!(min < -1e-4, "{min}");
}

#[test]
fn variance_sweep_has_expected_shape() {
    let dir = TempDir::new().unwrap();
    let out = wqed(dir.path(), &["variances", "--gamma", "1", "--n0-sweep", "0.5:50:20"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("variances.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "n0,n_r,var_nr,n_l,var_nl");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[0][0], 0.5);
    assert_eq!(rows[19][0], 50.0);
    for r in &rows {
        assert!((r[1] + r[3] - r[0]).abs() < 1e-8);
        assert!(r[2] >= 0.0 && r[4] >= 0.0);
    }
    // reflection saturates while the transmitted number keeps growing
    assert!(rows[19][3] > rows[0][3]);
}

#[test]
fn log_sweep_is_geometric() {
    let dir = TempDir::new().unwrap();
    let out = wqed(dir.path(), &["photon-numbers", "--n0-sweep", "0.1:10:3", "--log"]);
    assert_eq!(code(&out), 0);
    let rows = data_rows(&fs::read_to_string(dir.path().join("photon-numbers.csv")).unwrap());
    let n0: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(n0[0], 0.1);
    assert!((n0[1] - 1.0).abs() < 1e-12);
    assert_eq!(n0[2], 10.0);
}
