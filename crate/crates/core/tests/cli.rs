use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eoi-force"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// A shortened copy of the default scenario written into `dir`.
fn short_scenario(dir: &Path, duration: f64) -> PathBuf {
    let text = std::fs::read_to_string(scenario("paper-default.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["sampling"]["duration"] = duration.into();
    let path = dir.join("short.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

fn simulate_into(dir: &Path, duration: f64) -> (PathBuf, PathBuf) {
    let scen = short_scenario(dir, duration);
    let data = dir.join("data.csv");
    let out = run(&[
        "simulate",
        scen.to_str().unwrap(),
        "--out",
        data.to_str().unwrap(),
        "-q",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (scen, data)
}

#[test]
fn simulate_writes_one_row_per_sample() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    let out = run(&[
        "simulate",
        scenario("paper-default.json").to_str().unwrap(),
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 60_001);
    let header = text.lines().next().unwrap();
    for col in ["t", "u", "sigma_meas", "f2_ref"] {
        assert!(header.split(',').any(|h| h == col), "{header}");
    }
}

#[test]
fn malformed_scenario_is_a_parse_error_without_output() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"plant\": ").unwrap();
    let data = dir.path().join("d.csv");
    let out = run(&["simulate", bad.to_str().unwrap(), "--out", data.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!data.exists());
    assert_eq!(code(&run(&["identify", "--mode", "nonsense", "x.csv"])), 2);
}

#[test]
fn invalid_values_are_validation_errors() {
    let dir = TempDir::new().unwrap();
    let scen = short_scenario(dir.path(), 0.0);
    let data = dir.path().join("d.csv");
    assert_eq!(
        code(&run(&[
            "simulate",
            scen.to_str().unwrap(),
            "--out",
            data.to_str().unwrap()
        ])),
        3
    );
    assert!(!data.exists());

    let text = std::fs::read_to_string(scenario("paper-default.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["plant"]["surprise"] = 1.into();
    std::fs::write(&scen, doc.to_string()).unwrap();
    assert_eq!(
        code(&run(&[
            "simulate",
            scen.to_str().unwrap(),
            "--out",
            data.to_str().unwrap()
        ])),
        3
    );
}

#[test]
fn missing_channels_are_channel_errors() {
    let dir = TempDir::new().unwrap();
    let (scen, data) = simulate_into(dir.path(), 2.0);
    let text = std::fs::read_to_string(&data).unwrap();

    // drop sigma_meas
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let drop = header.iter().position(|h| *h == "sigma_meas").unwrap();
    let stripped: String = text
        .lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| v)
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect();
    let no_sigma = dir.path().join("no_sigma.csv");
    std::fs::write(&no_sigma, stripped).unwrap();
    let out_csv = dir.path().join("est.csv");
    let out = run(&[
        "estimate",
        no_sigma.to_str().unwrap(),
        "--config",
        scen.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);

    // keep only t, u, sigma_meas
    let keep: Vec<usize> = ["t", "u", "sigma_meas"]
        .iter()
        .map(|c| header.iter().position(|h| h == c).unwrap())
        .collect();
    let measured: String = text
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            keep.iter().map(|&i| f[i]).collect::<Vec<_>>().join(",") + "\n"
        })
        .collect();
    let measured_path = dir.path().join("measured.csv");
    std::fs::write(&measured_path, measured).unwrap();
    let report = dir.path().join("fit.json");
    let out = run(&[
        "identify",
        "--mode",
        "shaper",
        measured_path.to_str().unwrap(),
        "--config",
        scen.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!report.exists());

    // estimation itself needs no truth channels
    let out = run(&[
        "estimate",
        measured_path.to_str().unwrap(),
        "--config",
        scen.to_str().unwrap(),
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn empty_grid_is_rejected() {
    let dir = TempDir::new().unwrap();
    let (_, data) = simulate_into(dir.path(), 2.0);
    let report = dir.path().join("l.json");
    let out = run(&[
        "identify",
        "--mode",
        "L",
        data.to_str().unwrap(),
        "--grid",
        "1:10:0",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(!report.exists());
}

#[test]
fn identify_l_writes_report_and_curve() {
    let dir = TempDir::new().unwrap();
    let (_, data) = simulate_into(dir.path(), 4.0);
    let report = dir.path().join("l.json");
    let out = run(&[
        "identify",
        "--mode",
        "L",
        data.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let best = doc["objective"].as_f64().unwrap();
    let samples = doc["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 30);
    assert!(samples.iter().all(|s| s["objective"].as_f64().unwrap() >= best));
    let curve = std::fs::read_to_string(report.with_extension("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 31);
    assert_eq!(curve.lines().next().unwrap(), "L,sse");
}

#[test]
fn commands_are_idempotent() {
    let dir = TempDir::new().unwrap();
    let (scen, data) = simulate_into(dir.path(), 3.0);
    let first = std::fs::read(&data).unwrap();
    simulate_into(dir.path(), 3.0);
    assert_eq!(std::fs::read(&data).unwrap(), first);

    let runs = |args: &[&str], out: &Path| {
        let a = run(args);
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        let bytes_a = std::fs::read(out).unwrap();
        let b = run(args);
        assert_eq!(stdout(&a), stdout(&b));
        assert_eq!(bytes_a, std::fs::read(out).unwrap());
    };
    let est = dir.path().join("est.csv");
    runs(
        &[
            "estimate",
            data.to_str().unwrap(),
            "--config",
            scen.to_str().unwrap(),
            "--out",
            est.to_str().unwrap(),
            "--plot",
        ],
        &est,
    );
    let rep = dir.path().join("l.json");
    runs(
        &[
            "identify",
            "--mode",
            "L",
            data.to_str().unwrap(),
            "--grid",
            "1:100:8",
            "--out",
            rep.to_str().unwrap(),
        ],
        &rep,
    );
    let fr = dir.path().join("fr.csv");
    let coupling = r#"{"a": 1.0, "stages": [{"b": 1.37e-3, "c": 2.84e-5}, {"b": 1.284e-2, "c": 2.38e-5}]}"#;
    runs(
        &["freqresp", coupling, "--invert", "1.7", "--out", fr.to_str().unwrap()],
        &fr,
    );
}

#[test]
fn seed_override_changes_the_output() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let short = short_scenario(dir.path(), 1.0);
    assert_eq!(
        code(&run(&[
            "simulate",
            short.to_str().unwrap(),
            "--out",
            a.to_str().unwrap(),
            "-q"
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "simulate",
            short.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
            "-q",
            "--seed-override",
            "99"
        ])),
        0
    );
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn plot_is_written_only_on_request() {
    let dir = TempDir::new().unwrap();
    let (scen, data) = simulate_into(dir.path(), 2.0);
    let est = dir.path().join("est.csv");
    let args = [
        "estimate",
        data.to_str().unwrap(),
        "--config",
        scen.to_str().unwrap(),
        "--out",
        est.to_str().unwrap(),
    ];
    assert_eq!(code(&run(&args)), 0);
    assert!(!est.with_extension("svg").exists());
    let mut with_plot = args.to_vec();
    with_plot.push("--plot");
    assert_eq!(code(&run(&with_plot)), 0);
    let svg = std::fs::read_to_string(est.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("F2 reference"));
}

#[test]
fn freqresp_reports_static_and_high_frequency_gain() {
    let out = run(&[
        "freqresp",
        r#"{"a": 1.0, "stages": [{"b": 1.37e-3, "c": 2.84e-5}]}"#,
        "--invert",
        "1.7",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.lines()
            .any(|l| l.starts_with("dc gain") && l.trim_end().ends_with("1.7")),
        "{text}"
    );

    let out = run(&["freqresp", r#"{"a": 1.0, "stages": [{"b": 1.0, "c": 0.1}]}"#]);
    let text = stdout(&out);
    assert!(
        text.lines()
            .any(|l| l.starts_with("high-frequency gain") && l.trim_end().ends_with("10")),
        "{text}"
    );

    assert_eq!(code(&run(&["freqresp", r#"{"a": -1.0, "stages": []}"#])), 3);
}
