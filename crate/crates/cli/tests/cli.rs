use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;

use cqed_cli::config::{Config, FluxConfig, Grid, PAPER_DEFAULTS_TOML};

fn cqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(cmd: &str, config: &Path, out: &Path) {
    let o = cqed(&[
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
}

fn write_config(dir: &Path, cfg: &Config) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    path
}

/// Header plus rows parsed as floats; empty fields become NaN.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|f| f.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn help_exits_zero() {
    assert_eq!(cqed(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_flag_is_a_config_error() {
    assert_eq!(cqed(&["fluxmap", "--frobnicate"]).status.code(), Some(1));
}

#[test]
fn invalid_field_reports_path_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, PAPER_DEFAULTS_TOML.replace("dim = 5", "dim = 1")).unwrap();
    let o = cqed(&["fluxmap", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("right.dim"));
}

#[test]
fn unknown_key_rejected() {
    let text = format!("{PAPER_DEFAULTS_TOML}\n[fluxmap.extra]\nx = 1\n");
    let err = Config::from_toml(&text).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn missing_config_file_is_io_error() {
    let o = cqed(&["fluxmap", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = cqed(&["fluxmap", "--paper-defaults", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn floquet_tolerance_breach_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::paper_defaults();
    cfg.floquet_check.amplitudes = vec![0.005];
    cfg.floquet_check.tolerance = 1e-9;
    let path = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    let o = cqed(&["floquet-check", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    // the comparison is still written before failing
    let (header, rows) = read_csv(&out.join("floquet_check.csv"));
    assert_eq!(rows.len(), 1);
    let dev = rows[0][column(&header, "dev_floquet_diag")];
    assert!(dev.abs() < 0.1);
}

#[test]
fn fluxmap_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::paper_defaults();
    cfg.fluxmap.flux = Grid::new(-1.0, 1.0, 2001);
    let path = write_config(dir.path(), &cfg);
    run_ok("fluxmap", &path, dir.path());
    let (h, rows) = read_csv(&dir.path().join("fluxmap.csv"));
    assert!(h.iter().all(|c| c.contains('_')), "headers carry units: {h:?}");

    let at = |phi: f64| rows.iter().find(|r| (r[0] - phi).abs() < 1e-9).unwrap();
    let zero = at(0.0);
    assert!((zero[column(&h, "f_C_GHz")] - 9.4).abs() < 1e-9);
    assert!((zero[column(&h, "f_R_GHz")] - 6.4).abs() < 1e-9);
    assert!((zero[column(&h, "f_L_GHz")] - 5.9).abs() < 1e-9);

    let cancel = at(-0.386);
    assert!((cancel[column(&h, "chi_sR_MHz")].abs() - 0.3).abs() < 0.003);
    assert!((cancel[column(&h, "chi_sL_MHz")].abs() - 0.15).abs() < 0.0015);

    // rows one flux quantum apart agree
    for (a, b) in rows.iter().zip(&rows[1000..]) {
        for (x, y) in a[1..].iter().zip(&b[1..]) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn dephasing_round_trip_and_background() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &Config::paper_defaults());
    run_ok("dephasing", &path, dir.path());
    let (h, rows) = read_csv(&dir.path().join("dephasing.csv"));
    let (n, chi, gn, total, t2, back) = (
        column(&h, "n_bar"),
        column(&h, "chi_MHz"),
        column(&h, "gamma_n_MHz"),
        column(&h, "gamma_total_MHz"),
        column(&h, "t2_us"),
        column(&h, "chi_extracted_MHz"),
    );
    assert_eq!(rows.len(), 31 * 4);
    for block in rows.chunks(4) {
        let background = block[0][total];
        assert_eq!(block[0][n], 0.0);
        assert_eq!(block[0][gn], 0.0);
        for r in block {
            assert!((r[back] - r[chi].abs()).abs() <= 1e-6 * r[chi].abs());
            assert!((r[total] - background - r[gn]).abs() <= 1e-12 * r[total]);
            // 1 / (2 pi * rate in MHz) microseconds
            assert!((r[t2] * 2.0 * std::f64::consts::PI * r[total] - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn spectrum_one_file_per_state() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config::paper_defaults();
    cfg.spectrum.pump_detuning_mhz = Grid::new(-20.0, 20.0, 9);
    cfg.spectrum.probe_offset_mhz = Grid::new(-20.0, 20.0, 11);
    let path = write_config(dir.path(), &cfg);
    let o = cqed(&[
        "spectrum",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--plot",
    ]);
    assert!(o.status.success());
    for s in ["g", "e", "f"] {
        let (h, rows) = read_csv(&dir.path().join(format!("spectrum_{s}.csv")));
        assert_eq!(h, ["pump_freq_GHz", "probe_freq_GHz", "re", "im", "phase_rad"]);
        assert_eq!(rows.len(), 99);
        for r in &rows {
            assert!((r[2].hypot(r[3]) - 1.0) <= 1e-12);
            assert!((r[3].atan2(r[2]) - r[4]).abs() < 1e-12);
        }
        assert!(dir.path().join(format!("spectrum_{s}.svg")).exists());
    }
}

#[test]
fn chi_sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &Config::paper_defaults());
    run_ok("chi-sweep", &path, dir.path());
    let (h, rows) = read_csv(&dir.path().join("chi_sweep.csv"));
    assert_eq!(rows.len(), 6 * 241);
    // smallest amplitude, far detuning: shift nearly vanishes
    let far = rows
        .iter()
        .find(|r| r[column(&h, "amplitude_mV")] == 50.0 && r[column(&h, "delta_p_MHz")] == -600.0)
        .unwrap();
    assert!(far[column(&h, "chi_diag_MHz")].abs() < 0.01);
    assert!(far[column(&h, "chi_series_MHz")].abs() < 0.01);

    let (h, gp) = read_csv(&dir.path().join("chi_sweep_gp.csv"));
    let (model, fit) = (column(&h, "g_p_model_MHz"), column(&h, "g_p_fit_MHz"));
    for r in &gp {
        assert!((r[fit] / r[model] - 1.0).abs() < 0.01, "fit {} model {}", r[fit], r[model]);
    }
    let (h, lin) = read_csv(&dir.path().join("chi_sweep_gp_fit.csv"));
    assert!(lin[0][column(&h, "r_squared")] > 0.999);
}

#[test]
fn calibrate_flattens_ripple() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &Config::paper_defaults());
    run_ok("calibrate", &path, dir.path());
    let (h, rows) = read_csv(&dir.path().join("calibration_summary.csv"));
    assert!(rows[0][column(&h, "flatness_before")] > 0.5);
    assert!(rows[0][column(&h, "flatness_after")] < 0.01);
    let (h, rows) = read_csv(&dir.path().join("calibration.csv"));
    assert_eq!(rows.len(), 91);
    let anchor = rows.iter().find(|r| (r[0] - 3.03).abs() < 1e-9).unwrap();
    assert!((anchor[column(&h, "lambda")] - 1.0).abs() < 1e-9);
}

#[test]
fn csv_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &Config::paper_defaults());
    for (sub, jobs) in [("a", "1"), ("b", "4")] {
        let out = dir.path().join(sub);
        let o = cqed(&[
            "chi-sweep",
            "--config",
            path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert!(o.status.success());
    }
    for f in ["chi_sweep.csv", "chi_sweep_gp.csv", "chi_sweep_gp_fit.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn bundled_sections_equal_builtin_defaults() {
    let cfg = Config::paper_defaults();
    let defaults = Config {
        system: cfg.system.clone(),
        spectrum: Default::default(),
        chi_sweep: Default::default(),
        fluxmap: Default::default(),
        dephasing: Default::default(),
        calibrate: Default::default(),
        floquet_check: Default::default(),
    };
    assert_eq!(cfg, defaults);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trip(
        f_max in 4.0f64..10.0,
        asym in 0.05f64..1.0,
        kappa in 0.1f64..50.0,
        residual in 0.0f64..200.0,
        points in 1usize..400,
        amps in proptest::collection::vec(0.0f64..500.0, 1..8),
    ) {
        let mut cfg = Config::paper_defaults();
        cfg.system.right.flux = FluxConfig::SquidLike { f_max_ghz: f_max.min(9.0), asymmetry: asym, offset: 0.0 };
        cfg.system.kappa_mhz = kappa;
        cfg.system.coupler.right.residual_mhz = residual;
        cfg.fluxmap.flux = Grid::new(-0.5, 0.5, points.max(2));
        cfg.chi_sweep.amplitudes_mv = amps;
        let text = cfg.to_toml().unwrap();
        let parsed: Config = toml::from_str(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_toml().unwrap(), text);
    }
}
