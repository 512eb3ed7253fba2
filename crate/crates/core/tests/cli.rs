//! End-to-end runs through the command-line entry point.

use std::path::PathBuf;

use wmem::cli::{self, main_with_args, read_snapshot};

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("wmem-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn args(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

#[test]
fn linear_preset_writes_one_row_per_step() {
    let d = scratch("rows");
    let csv = d.join("out.csv");
    let code = main_with_args(&args(&[
        "--preset",
        "uz-linear-gaussian",
        "--nx=32",
        "--nxi=32",
        "--dt",
        "0.125",
        "--csv",
        csv.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), wmem::diagnostics::CSV_HEADER);
    // t = 0 plus eight steps of 1/8
    assert_eq!(lines.count(), 9);
    std::fs::remove_dir_all(d).ok();
}

#[test]
fn config_file_and_flag_override() {
    let d = scratch("file");
    let cfg = d.join("run.cfg");
    let csv = d.join("run.csv");
    std::fs::write(
        &cfg,
        format!(
            "# small linear run\nmodel = uz\ngamma = 0.5 cutoff = 0.2\ndim = 1\nnx = 16 nxi = 16\ndt = 0.25\nt_end = 1\nnonlinear = false\ncsv = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let code = main_with_args(&args(&["--config", cfg.to_str().unwrap(), "--t_end=0.5"]));
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 3);
    std::fs::remove_dir_all(d).ok();
}

#[test]
fn configuration_errors_exit_one() {
    assert_eq!(main_with_args(&args(&["--model", "hpz", "--delta", "1", "--cutoff", "0.1", "--omega", "0.05"])), 1);
    assert_eq!(main_with_args(&args(&["--preset", "uz-linear-gaussian", "--bogus", "3"])), 1);
    assert_eq!(main_with_args(&args(&["--preset", "no-such-preset"])), 1);
    assert_eq!(main_with_args(&args(&["--preset", "uz-linear-gaussian", "--dt", "-1"])), 1);
    assert_eq!(main_with_args(&args(&["--config", "/nonexistent/wmem.cfg"])), 1);
}

#[test]
fn missing_key_is_named() {
    let err = cli::parse_config("model=hpz delta=1 cutoff=0.1 omega=0.05", &[]).unwrap_err();
    assert!(err.to_string().contains("beta"), "{err}");
}

#[test]
fn hpz_past_horizon_exits_two() {
    let code = main_with_args(&args(&["--preset", "hpz-nonlinear-horizon", "--nx=16", "--nxi=16", "--dt=0.25"]));
    assert_eq!(code, 2);
}

#[test]
fn snapshots_follow_stride_and_final() {
    let d = scratch("snap");
    let tpl = d.join("w_{step}.bin");
    let code = main_with_args(&args(&[
        "--preset",
        "uz-nonlinear-gaussian",
        "--nx=16",
        "--nxi=16",
        "--dt=0.125",
        "--t_end=0.5",
        "--snapshot",
        tpl.to_str().unwrap(),
        "--snapshot_stride=2",
    ]));
    assert_eq!(code, 0);
    for k in [0, 2, 4] {
        assert!(d.join(format!("w_{k:06}.bin")).exists(), "step {k}");
    }
    assert!(!d.join("w_000001.bin").exists());
    let last = read_snapshot(&d.join("w_final.bin")).unwrap();
    assert!((last.time - 0.5).abs() < 1e-12);

    // restart from the final snapshot on the same grid
    let code = main_with_args(&args(&[
        "--preset",
        "uz-nonlinear-gaussian",
        "--nx=16",
        "--nxi=16",
        "--dt=0.125",
        "--t_end=0.25",
        "--init=snapshot",
        "--init_snapshot",
        d.join("w_final.bin").to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    // a mismatched grid is refused
    let code = main_with_args(&args(&[
        "--preset",
        "uz-nonlinear-gaussian",
        "--nx=32",
        "--nxi=16",
        "--init=snapshot",
        "--init_snapshot",
        d.join("w_final.bin").to_str().unwrap(),
    ]));
    assert_eq!(code, 1);
    std::fs::remove_dir_all(d).ok();
}
