use std::fs;
use std::path::Path;
use std::process::Command;

use resonance_core::cli::{classify_regime, run_solve, run_sweep, ConfigMap, ResultRecord, RunConfig};
use resonance_core::dispersion::ModelParams;
use resonance_core::riemann::Dimension;
use resonance_core::rootfinder::{SignClass, SingularityKind};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_resonance-solver");

fn cli(args: &[&str], threads: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("RESONANCE_SOLVER_THREADS", t),
        None => cmd.env_remove("RESONANCE_SOLVER_THREADS"),
    };
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn config(text: &str) -> RunConfig {
    RunConfig::from_map(&ConfigMap::parse(text).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classification_examples() {
    let r = classify_regime(&ModelParams::new(Dimension::One, 1.0, -1.0, 1e-3));
    assert_eq!(r.cell(), 1);
    let r = classify_regime(&ModelParams::new(Dimension::Three, 0.5, 0.0, 1e-3));
    assert_eq!(r.cell(), 6);
    let r = classify_regime(&ModelParams::new(Dimension::Two, 0.0, 0.0, 1e-3));
    assert_eq!((r.cell(), r.theta0_class), (5, SignClass::Zero));
}

#[test]
fn solve_cell1_reports_empty_window() {
    let rec = run_solve(&config("dimension = 1\ntheta0 = 1\nc = -1\nepsilon = 1e-3\n")).unwrap();
    assert!(rec.error.is_none());
    assert_eq!(rec.singularities.len(), 1);
    let s = &rec.singularities[0];
    assert_eq!(s.kind, SingularityKind::Resonance);
    assert!(s.residual.is_finite());
    assert!(rec.notes.iter().any(|n| n.starts_with("no isolated eigenvalue")));
    assert!(rec.expansion.is_some());
    assert!(!rec.version.is_empty());
}

#[test]
fn solve_cluster_record() {
    let rec = run_solve(&config("dimension = 1\ntheta0 = 0\nc = 0\nepsilon = 1e-3\n")).unwrap();
    assert_eq!(rec.singularities.len(), 3);
    let kinds: Vec<_> = rec.singularities.iter().map(|s| s.kind).collect();
    assert_eq!(kinds.iter().filter(|k| **k == SingularityKind::Resonance).count(), 2);
    assert_eq!(
        kinds
            .iter()
            .filter(|k| **k == SingularityKind::IsolatedEigenvalue)
            .count(),
        1
    );
}

#[test]
fn config_echo_reruns_bit_identically() {
    for text in [
        "dimension = 1\ntheta0 = 0.3\nc = -1.7\nepsilon = 0.0031\n",
        "dimension = 2\ntheta0 = 54.19738775513589\nc = 0\nepsilon = 1e-3\n",
        "dimension = 3\ntheta0 = -1\nc = -6.283185307179586\nepsilon = 2e-3\nb = 1\n",
    ] {
        let first = run_solve(&config(text)).unwrap();
        let again = run_solve(&config(
            &RunConfig::from_map(&ConfigMap(first.config.clone()))
                .unwrap()
                .echo_text(),
        ))
        .unwrap();
        assert_eq!(first.config, again.config);
        let locs = |r: &ResultRecord| {
            r.singularities
                .iter()
                .map(|s| (s.location.re.to_bits(), s.location.im.to_bits()))
                .collect::<Vec<_>>()
        };
        assert_eq!(locs(&first), locs(&again));
        assert!(!first.singularities.is_empty());
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("s.csv");
    let json_path = dir.path().join("s.json");
    let base = [
        "sweep",
        "--dimension",
        "1",
        "--theta0",
        "0",
        "--c=0",
        "--eps-ladder",
        "1e-2,3e-3,1e-3",
    ];
    for (p, f) in [(&csv_path, "csv"), (&json_path, "json")] {
        let mut args = base.to_vec();
        args.extend(["--out", path_str(p), "--format", f]);
        assert_eq!(cli(&args, None).0, 0);
    }
    let mut from_csv = Vec::new();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    for row in reader.records() {
        let row = row.unwrap();
        let f = |name: &str| row[col(name)].parse::<f64>().unwrap();
        from_csv.push((f("epsilon"), f("re_location"), f("im_location"), f("residual")));
    }
    let json: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    let mut from_json = Vec::new();
    for rec in json.as_array().unwrap() {
        for s in rec["singularities"].as_array().unwrap() {
            from_json.push((
                rec["epsilon"].as_f64().unwrap(),
                s["location"]["re"].as_f64().unwrap(),
                s["location"]["im"].as_f64().unwrap(),
                s["residual"].as_f64().unwrap(),
            ));
        }
    }
    assert_eq!(from_csv.len(), 9);
    assert_eq!(from_csv, from_json);
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# sweep\ndimension = 2\ntheta0 = 0\nc = -1\neps_ladder = 1e-2:1e-4:5\nformat = csv\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in [Some("1"), Some("4"), None].into_iter().enumerate() {
        let out = dir.path().join(format!("out{k}.csv"));
        let (code, _) = cli(&["sweep", "--config", path_str(&cfg), "--out", path_str(&out)], threads);
        assert_eq!(code, 0);
        outputs.push(fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.ends_with('\n') && !text.contains('\r'));
    // the threshold eigenvalues underflow f64 on this ladder
    assert_eq!(text.lines().count(), 1 + 5);
}

#[test]
fn library_sweep_keeps_ladder_order() {
    let recs = run_sweep(&config(
        "dimension = 1\ntheta0 = 1\nc = -1\neps_ladder = 1e-2,1e-3,1e-4\n",
    ))
    .unwrap();
    let eps: Vec<f64> = recs.iter().map(|r| r.epsilon).collect();
    assert_eq!(eps, vec![1e-2, 1e-3, 1e-4]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.json");
    fs::write(&cfg, "dimension = 1\ntheta0 = 1\nc = -1\nepsilon = 1e-2\n").unwrap();
    let code = cli(
        &[
            "solve",
            "--config",
            path_str(&cfg),
            "--epsilon",
            "1e-3",
            "--format",
            "json",
            "--out",
            path_str(&out),
        ],
        None,
    )
    .0;
    assert_eq!(code, 0);
    let json: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["epsilon"].as_f64(), Some(1e-3));
    assert_eq!(json["config"]["epsilon"].as_str(), Some("0.001"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let o = path_str(&out);
    let ok = cli(
        &[
            "solve",
            "--dimension",
            "3",
            "--theta0",
            "0",
            "--c=-6.283185307179586",
            "--epsilon",
            "1e-3",
            "--out",
            o,
        ],
        None,
    );
    assert_eq!(ok.0, 0, "{}", ok.1);
    let failing = cli(
        &[
            "solve",
            "--dimension",
            "1",
            "--theta0",
            "1",
            "--c=-1",
            "--epsilon",
            "1e-3",
            "--max-iter",
            "1",
            "--out",
            o,
        ],
        None,
    );
    assert_eq!(failing.0, 1);
    assert!(fs::read_to_string(&out).unwrap().contains("did not converge"));
    let invalid: [&[&str]; 7] = [
        &[
            "solve",
            "--dimension",
            "4",
            "--theta0",
            "1",
            "--c=-1",
            "--epsilon",
            "1e-3",
        ],
        &["solve", "--dimension", "1", "--theta0", "1", "--c=-1"],
        &[
            "sweep",
            "--dimension",
            "1",
            "--theta0",
            "1",
            "--c=-1",
            "--eps-ladder",
            "1e-3,1e-2",
        ],
        &[
            "scan",
            "--dimension",
            "1",
            "--theta0",
            "1",
            "--c=-1",
            "--epsilon",
            "1e-3",
            "--grid-n",
            "8",
        ],
        &[
            "solve",
            "--dimension",
            "1",
            "--theta0",
            "1",
            "--c=-1",
            "--epsilon",
            "1e-3",
            "--tol",
            "0",
        ],
        &[
            "solve",
            "--dimension",
            "1",
            "--theta0",
            "1",
            "--c=-1",
            "--epsilon",
            "1e-3",
            "--format",
            "xml",
        ],
        &["frobnicate"],
    ];
    for args in invalid {
        assert_eq!(cli(args, None).0, 2, "{args:?}");
    }
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "dimension = 1\ncolour = blue\n").unwrap();
    assert_eq!(cli(&["solve", "--config", path_str(&cfg)], None).0, 2);
    let sweep = [
        "sweep",
        "--dimension",
        "1",
        "--theta0",
        "1",
        "--c=-1",
        "--eps-ladder",
        "1e-2,1e-3",
        "--out",
        o,
    ];
    assert_eq!(cli(&sweep, Some("many")).0, 2);
}

#[test]
fn scan_and_kernel_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let o = path_str(&out);
    let base = [
        "--dimension",
        "1",
        "--theta0",
        "1",
        "--c=-1",
        "--epsilon",
        "0.1",
        "--grid-n",
        "16",
        "--out",
        o,
    ];
    let mut scan = vec!["scan"];
    scan.extend(base);
    assert_eq!(cli(&scan, None).0, 0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 17);
    let mut kernel = vec!["kernel", "--energy-re=-0.3", "--energy-im", "0.1"];
    kernel.extend(base);
    assert_eq!(cli(&kernel, None).0, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 16 * 16);
    assert!(text.starts_with("x,x_prime,i,j,re_kernel,im_kernel\n"));
}

#[test]
fn verify_reports_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let args = [
        "verify",
        "--dimension",
        "1",
        "--theta0",
        "0",
        "--c=0",
        "--eps-ladder",
        "1e-2:1e-4:5",
        "--format",
        "json",
        "--out",
        path_str(&out),
    ];
    assert_eq!(cli(&args, None).0, 0);
    let json: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let slope = json["fit"][0]["fitted_slope"].as_f64().unwrap();
    assert!((slope - 8.0 / 3.0).abs() < 0.3, "{slope}");
    assert_eq!(json["ladder"].as_array().unwrap().len(), 5);
}
