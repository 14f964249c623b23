use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coopsim::cli::{read_csv_table, read_frames_csv, FRAMES_HEADER, SUMMARY_HEADER, SWEEP_HEADER};
use coopsim::config::RunConfig;
use coopsim::sim::run_episode;

const REFERENCE: &str = "lambda_pu = 0.5
lambda_su = 0.5
phi_nc = 0.6
phi_c = 0.8
p_avg = 0.5
p_max = 1
frames = 200
seed = 11
v = 100
";

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(&path, body).unwrap();
    path
}

fn coopsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopsim")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_both_csvs_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), REFERENCE);
    let out = dir.path().join("out");
    let o = coopsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("policy=fbdpp"));

    let text = std::fs::read_to_string(out.join("frames.csv")).unwrap();
    assert!(text.starts_with("# coopsim generator=chacha8 seed=11\n"));
    let (header, _) = read_csv_table(&out.join("frames.csv")).unwrap();
    assert_eq!(header, FRAMES_HEADER);

    let expected = run_episode(&RunConfig::parse(REFERENCE).unwrap().scenario()).unwrap();
    let frames = read_frames_csv(&out.join("frames.csv")).unwrap();
    assert_eq!(frames.len(), expected.frames.len());
    for (a, b) in frames.iter().zip(&expected.frames) {
        assert_eq!(
            (
                a.frame,
                a.frame_len,
                a.admitted,
                a.served,
                a.power_idle,
                a.power_coop,
                a.q_su_end,
                a.x_su_end
            ),
            (
                b.frame,
                b.frame_len,
                b.admitted,
                b.served,
                b.power_idle,
                b.power_coop,
                b.q_su_end,
                b.x_su_end
            )
        );
    }

    let (header, rows) = read_csv_table(&out.join("summary.csv")).unwrap();
    assert_eq!(header, SUMMARY_HEADER);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), expected.throughput_admitted());
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), expected.avg_power());
}

#[test]
fn seed_override_reaches_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), REFERENCE);
    let out = dir.path().join("out");
    let o = coopsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "4242",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (_, rows) = read_csv_table(&out.join("summary.csv")).unwrap();
    assert_eq!(rows[0][6], "4242");
}

#[test]
fn unstable_primary_queue_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &REFERENCE.replace("lambda_pu = 0.5", "lambda_pu = 0.6"));
    let out = dir.path().join("out");
    let o = coopsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unstable primary queue"));
    assert!(!out.exists(), "nothing should be written");
}

#[test]
fn bad_flags_and_missing_files_exit_with_one() {
    let o = coopsim(&["run", "--config", "/nonexistent/run.conf"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), REFERENCE);
    let o = coopsim(&["run", "--config", config.to_str().unwrap(), "--policy", "greedy"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(coopsim(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), REFERENCE);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = coopsim(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), REFERENCE);
    let mut files = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let o = Command::new(env!("CARGO_BIN_EXE_coopsim"))
            .args(["sweep", "--config", config.to_str().unwrap(), "--v-list", "10,50,100"])
            .args(["--out-dir", out.to_str().unwrap()])
            .env("COOPSIM_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{o:?}");
        files.push(std::fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let (header, rows) = read_csv_table(&dir.path().join("out0/sweep.csv")).unwrap();
    assert_eq!(header, SWEEP_HEADER);
    assert_eq!(
        rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(),
        ["10", "50", "100"]
    );

    let out = dir.path().join("single");
    let o = coopsim(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--v-list",
        "100",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(read_csv_table(&out.join("sweep.csv")).unwrap().1.len(), 1);
}

#[test]
fn oracle_reports_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), REFERENCE);
    let out = dir.path().join("out");
    let o = coopsim(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let ups: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("upsilon_star="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((ups - 0.25).abs() < 1e-12);
    assert!(out.join("oracle.csv").exists());

    let o = coopsim(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--coop-prob",
        "0",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    let ups: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("upsilon_star="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((ups - 1.0 / 6.0).abs() < 1e-3, "{ups}");

    let zero = write_config(dir.path(), &REFERENCE.replace("lambda_su = 0.5", "lambda_su = 0"));
    let o = coopsim(&[
        "oracle",
        "--config",
        zero.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(stdout(&o).contains("upsilon_star=0\n"));
}

#[test]
fn oracle_rejects_grids_without_a_step() {
    let dir = tempfile::tempdir().unwrap();
    let body = "lambda_pu = 0.3\nlambda_su = 0.4\np_avg = 0.4\np_max = 1\n\
                power_levels = 0, 0.5, 1\nphi_levels = 0.5, 0.7, 0.8\nmu_su_levels = 0, 0.8, 1\n";
    let config = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let o = coopsim(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--grid-step"));
    let o = coopsim(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--grid-step",
        "0.01",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
}

#[test]
fn analyze_prints_the_constants() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{REFERENCE}v_list = 500\n"));
    let o = coopsim(&["analyze", "--config", config.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let get = |k: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{k}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("d") - 902.6667).abs() < 1e-3);
    assert!((get("t_min") - 16.0 / 3.0).abs() < 1e-9);
    assert!((get("t_max") - 12.0).abs() < 1e-9);
    let bound = text
        .lines()
        .find(|l| l.starts_with("throughput_lower_bound v=500"))
        .unwrap();
    assert!(bound.ends_with("vacuous"), "{bound}");

    let equal = write_config(dir.path(), &REFERENCE.replace("phi_c = 0.8", "phi_c = 0.6"));
    let text = stdout(&coopsim(&["analyze", "--config", equal.to_str().unwrap()]));
    let t_min = text.lines().find(|l| l.starts_with("t_min=")).unwrap();
    let t_max = text.lines().find(|l| l.starts_with("t_max=")).unwrap();
    assert_eq!(t_min[6..], t_max[6..]);
}

#[test]
fn adaptive_and_baselines_commands() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{REFERENCE}lambda_schedule = 50:0.2, 120:0.55\n"));
    let out = dir.path().join("out");
    let o = coopsim(&[
        "adaptive",
        "--config",
        config.to_str().unwrap(),
        "--window",
        "20",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let (header, rows) = read_csv_table(&out.join("moving_average.csv")).unwrap();
    assert_eq!(header[1], "lambda_pu");
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[60][1], "0.2");

    let o = coopsim(&[
        "baselines",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (_, rows) = read_csv_table(&out.join("baselines.csv")).unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["fbdpp", "no-coop", "always-coop", "counter"]);
}
