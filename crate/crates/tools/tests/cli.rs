use std::path::Path;
use std::process::{Command, Output};

fn muscle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muscle")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of a `key value` line of a report.
fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("no {key} in {report}"))
}

const SWEEP: [&str; 9] = [
    "eval-sweep", "--model", "wkm", "--case", "UTCAF", "--state", "passive", "--grid", "0.7:1.3:0.05",
];

#[test]
fn sweep_has_one_row_per_grid_point_and_is_deterministic() {
    let a = stdout(&muscle(&SWEEP));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "value,p_analytical_kpa");
    assert_eq!(lines.len(), 14);
    assert!(lines[13].starts_with("1.3,"));
    assert_eq!(a, stdout(&muscle(&SWEEP)));
}

#[test]
fn sweep_with_element_adds_a_close_column() {
    let out = stdout(&muscle(&[
        "eval-sweep", "--model", "giant", "--case", "PSTF", "--grid", "1.0:1.2:0.1", "--with-element",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("value,p_analytical_kpa,p_element_kpa"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - v[1]).abs() <= 0.02 * v[1].abs() + 1e-9, "{line}");
    }
}

#[test]
fn active_sweeps_cross_zero_near_the_stress_free_stretch() {
    for (model, root) in [("ble", 0.68), ("wkm", 0.71), ("giant", 0.71), ("combi", 0.71)] {
        let out = stdout(&muscle(&[
            "eval-sweep", "--model", model, "--case", "UTCAF", "--state", "active", "--grid", "0.6:0.8:0.01",
        ]));
        let rows: Vec<(f64, f64)> = out
            .lines()
            .skip(1)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        let cross = rows.windows(2).find(|w| w[0].1 < 0.0 && w[1].1 >= 0.0).unwrap();
        assert!((cross[0].0 - root).abs() <= 0.015, "{model}: {cross:?}");
    }
}

#[test]
fn invalid_input_exits_with_two_and_names_the_flag() {
    let mut args = SWEEP.to_vec();
    args.push("--bogus");
    let o = muscle(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));
    let bad_grid = muscle(&["eval-sweep", "--model", "wkm", "--case", "UTCAF", "--grid", "1.3:0.7:0.05"]);
    assert_eq!(bad_grid.status.code(), Some(2));
    let active_shear = muscle(&["eval-sweep", "--model", "wkm", "--case", "SAF", "--state", "active", "--grid", "0:0.5:0.1"]);
    assert_eq!(active_shear.status.code(), Some(2));
    let missing = muscle(&["eval-sweep", "--model", "wkm", "--params", "/nonexistent.json", "--case", "UTCAF", "--grid", "1:1.1:0.1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn help_lists_the_flags() {
    let help = stdout(&muscle(&["eval-sweep", "--help"]));
    for flag in ["--model", "--params", "--case", "--state", "--grid", "--kappa", "--out", "--with-element"] {
        assert!(help.contains(flag), "{flag}");
    }
    let help = stdout(&muscle(&["gen-synthetic", "--help"]));
    assert!(help.contains("--seed"));
}

#[test]
fn element_verification_matches_the_closed_form() {
    let out = stdout(&muscle(&[
        "verify-element", "--model", "wkm", "--case", "UTCAF", "--state", "passive", "--value", "1.2", "--kappa", "1000",
    ]));
    assert!(field(&out, "relative_deviation") <= 0.02, "{out}");
    assert!(field(&out, "volume_change").abs() < 5e-3);

    let rest = stdout(&muscle(&["verify-element", "--model", "wkm", "--case", "UTCAF", "--value", "1"]));
    assert_eq!(field(&rest, "analytical_kpa").abs(), 0.0);
    assert_eq!(field(&rest, "element_kpa").abs(), 0.0);
    assert!(field(&rest, "relative_deviation") < 1e-9);
}

#[test]
fn free_contraction_reports_the_final_stretch() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = stdout(&muscle(&["verify-element", "--model", "combi", "--out", csv.to_str().unwrap()]));
    assert!((field(&out, "fiber_stretch") - 0.71).abs() < 0.02, "{out}");
    let traj = std::fs::read_to_string(&csv).unwrap();
    assert!(traj.starts_with("step,time,load_value,p_kpa,fiber_stretch,volume_change,iterations\n"));
}

#[test]
fn stress_free_stretch_lists_every_model() {
    let out = stdout(&muscle(&["stress-free-stretch"]));
    let values: Vec<(String, f64)> = out
        .lines()
        .map(|l| {
            let (m, v) = l.split_once(' ').unwrap();
            (m.to_owned(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(values.len(), 4);
    assert!((values[0].1 - 0.68).abs() <= 0.01);
    for (_, v) in &values[1..] {
        assert!((v - 0.71).abs() <= 0.01);
    }
}

#[test]
fn activation_curves_export_fixed_columns() {
    let s = stdout(&muscle(&["activation-curves", "--grid", "0.5:1.8:0.1"]));
    assert!(s.starts_with("lambda,f_xi,f_active,f_passive\n"));
    assert_eq!(s.lines().count(), 15);
    let t = stdout(&muscle(&["activation-curves", "--grid", "0:0.5:0.01", "--time"]));
    assert!(t.starts_with("time,f_t_twitch,f_t_tanh\n"));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn synthetic_data_feeds_a_converging_fit() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let gen = [
        "gen-synthetic", "--model", "wkm", "--case", "UTCAF,UTCTF", "--case", "PSAF", "--grid", "0.8:1.2:0.05",
        "--noise", "0.01", "--seed", "5", "--out", data.to_str().unwrap(),
    ];
    stdout(&muscle(&gen));
    let first = std::fs::read(&data).unwrap();
    stdout(&muscle(&gen));
    assert_eq!(first, std::fs::read(&data).unwrap());
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 1 + 3 * 9);

    let config = dir.path().join("fit.json");
    write(
        &config,
        r#"{"model": "wkm", "stage": "passive",
            "free": {"alpha": {"start": 2.8}, "gamma": {"start": 20.0, "lower": 1.0, "upper": 100.0}},
            "datasets": ["data.csv"]}"#,
    );
    let report = dir.path().join("report.json");
    let o = muscle(&["fit", "--config", config.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    let table = stdout(&o);
    assert!(table.contains("converged true"), "{table}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["converged"], true);
    let alpha = json["params"].as_array().unwrap().iter().find(|p| p["name"] == "alpha").unwrap();
    assert!((alpha["value"].as_f64().unwrap() - 2.3796).abs() < 0.1 * 2.3796);
    assert_eq!(json["datasets"].as_array().unwrap().len(), 3);

    // an iteration budget too small to converge exits with 3
    write(
        &config,
        r#"{"model": "wkm", "stage": "passive", "free": {"alpha": {"start": 2.8}},
            "datasets": ["data.csv"], "max_iterations": 1}"#,
    );
    let o = muscle(&["fit", "--config", config.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
