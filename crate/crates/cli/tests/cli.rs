use std::path::Path;
use std::process::{Command, Output};

fn ctrw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctrw"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env("CTRW_WORKERS", "1")
        .output()
        .expect("spawn ctrw")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&ctrw(tmp.path(), &["simulate", "--rho", "1.5"])), 2);
    assert_eq!(code(&ctrw(tmp.path(), &["simulate"])), 64);
    assert_eq!(code(&ctrw(tmp.path(), &["simulate", "--rho", "2.5", "--psi", "pareto:1"])), 64);
    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(code(&ctrw(tmp.path(), &["analyze", "--input", empty.to_str().unwrap()])), 2);
}

#[test]
fn halfgauss_increments_are_positive() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ctrw(tmp.path(), &["simulate", "--rho", "2.5", "--n-events", "2000", "--h", "halfgauss:0:1"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(tmp.path().join("events.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let dx: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(dx >= 0.0);
        rows += 1;
    }
    assert_eq!(rows, 2000);
}

#[test]
fn config_flags_are_overridden_by_the_command_line() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    std::fs::write(&conf, "rho = 3.5\nmax_lag = 5\n").unwrap();
    let o = ctrw(tmp.path(), &["predict", "--config", conf.to_str().unwrap(), "--rho", "2.25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let acf = std::fs::read_to_string(tmp.path().join("analytic_step_acf.csv")).unwrap();
    assert!(acf.starts_with("# asymptotic_slope=-0.25"), "{acf}");
    // lag 0..=5 plus two header lines
    assert_eq!(acf.lines().count(), 8);
}

#[test]
fn predicted_mean_drift_is_linear_for_finite_variance_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ctrw(tmp.path(), &["predict", "--rho", "3.5", "--h", "gauss:1:1", "--t-min", "100", "--t-max", "1000"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(tmp.path().join("moments.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').take(2).map(|v| v.parse().unwrap()).collect();
    assert!((cols[1] / cols[0] - 1.0).abs() < 0.01, "{last}");
}

#[test]
fn analyze_reads_tick_files() {
    let tmp = tempfile::tempdir().unwrap();
    let ticks = tmp.path().join("ticks.csv");
    let mut text = String::new();
    // Monday 1970-01-05, one tick every 7 s from 09:00 for two hours, on five weekdays
    for day in 0..5u32 {
        let open = (4 + day) as f64 * 86_400.0 + 9.0 * 3600.0;
        for i in 0..1000u32 {
            let price = 100.0 + ((i * 37 + day) % 11) as f64 * 0.01;
            text.push_str(&format!("{},{price}\n", open + 7.0 * i as f64 + (i % 3) as f64));
        }
    }
    std::fs::write(&ticks, text).unwrap();
    let o = ctrw(tmp.path(), &["analyze", "--input", ticks.to_str().unwrap(), "--max-lag", "50", "--bootstrap", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fits: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("fits.json")).unwrap()).unwrap();
    assert_eq!(fits["input"]["format"], "ticks");
    assert_eq!(fits["input"]["stationarized"], true);
    assert_eq!(fits["joined"], true);
    assert!(tmp.path().join("seasonal_profile.csv").exists());
    assert!(tmp.path().join("step_acf.csv").exists());
}
