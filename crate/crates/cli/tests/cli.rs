use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nccs(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nccs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn state_command() {
    let d = tempfile::tempdir().unwrap();
    let o = nccs(
        &["state", "--family", "glauber", "--alpha-re", "1", "--nmax", "32"],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(d.path().join("state.json").exists());
    assert!(d.path().join("photon_distribution.csv").exists());
    assert!(stdout(&o).contains("tail_mass"));

    let o = nccs(
        &["state", "--family", "nlcs", "--tau", "0.1", "--alpha-re", "1"],
        d.path(),
    );
    assert_eq!(code(&o), 0);

    let o = nccs(
        &[
            "state",
            "--family",
            "cat",
            "--parity",
            "odd",
            "--alpha-re",
            "0",
            "--q",
            "0.9",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn state_json_reads_back() {
    let d = tempfile::tempdir().unwrap();
    let o = nccs(
        &[
            "state",
            "--family",
            "nc-squeezed",
            "--tau",
            "0.5",
            "--zeta",
            "0.25",
            "--alpha-re",
            "0.8",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    let s = nccs::fock_io::read_state_json(&d.path().join("state.json")).unwrap();
    assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn validation_and_truncation_codes() {
    let d = tempfile::tempdir().unwrap();
    let contradictory = nccs(
        &["state", "--family", "nlcs", "--tau", "0.1", "--q", "0.9"],
        d.path(),
    );
    assert_eq!(code(&contradictory), 2);
    let missing = nccs(&["state", "--family", "q-coherent", "--alpha-re", "1"], d.path());
    assert_eq!(code(&missing), 2);
    let divergent = nccs(
        &["state", "--family", "q-coherent", "--q", "0.5", "--alpha-re", "2"],
        d.path(),
    );
    assert_eq!(code(&divergent), 2);
    let heavy = nccs(
        &["state", "--family", "glauber", "--alpha-re", "5", "--nmax", "16"],
        d.path(),
    );
    assert_eq!(code(&heavy), 3);
    let bad_flag = nccs(&["state", "--family", "nope"], d.path());
    assert_eq!(code(&bad_flag), 2);
}

#[test]
fn io_failure_is_code_1() {
    let d = tempfile::tempdir().unwrap();
    let blocker = d.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = nccs(
        &["state", "--family", "glauber", "--alpha-re", "1"],
        &blocker.join("sub"),
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn metrics_command() {
    let d = tempfile::tempdir().unwrap();
    let o = nccs(
        &[
            "metrics",
            "--family",
            "q-coherent",
            "--q",
            "0.9",
            "--alpha-re",
            "1",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("report.json")).unwrap()).unwrap();
    assert!((r["mandel_q"].as_f64().unwrap() + 0.19).abs() < 1e-8);

    let o = nccs(&["metrics", "--family", "glauber", "--alpha-re", "1.2"], d.path());
    assert_eq!(code(&o), 0);
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("report.json")).unwrap()).unwrap();
    assert!(r["mandel_q"].as_f64().unwrap().abs() < 1e-10);
    assert!((r["g2_zero"].as_f64().unwrap() - 1.0).abs() < 1e-10);

    let o = nccs(&["metrics", "--family", "vacuum"], d.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn autocorr_command() {
    let d = tempfile::tempdir().unwrap();
    let o = nccs(
        &["autocorr", "--J", "1.5", "--tau", "0.1", "--t-steps", "2001"],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("t_rev      251.33"));
    assert!(d.path().join("autocorrelation.csv").exists());
    assert!(d.path().join("autocorrelation.svg").exists());

    let o = nccs(
        &["autocorr", "--J", "6", "--tau", "0.01", "--t-steps", "2001"],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("t_rev      2513.27"));

    let o = nccs(
        &[
            "autocorr",
            "--J",
            "1.5",
            "--tau",
            "0.1",
            "--t-start",
            "3",
            "--t-end",
            "3",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn entropy_scan_command() {
    let d = tempfile::tempdir().unwrap();
    let o = nccs(
        &[
            "entropy-scan",
            "--family",
            "nlcs",
            "--alpha-grid",
            "0.5,1,2",
            "--tau-grid",
            "0,1,2",
            "--nmax",
            "20",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    let t = nccs::fock_io::read_csv(&d.path().join("entropy_scan.csv")).unwrap();
    assert_eq!(
        t.columns,
        ["alpha", "tau", "zeta", "S_direct", "S_closed", "flag"]
    );
    assert_eq!(t.rows.len(), 9);
    for r in &t.rows {
        assert!((r[3] - r[4]).abs() < 1e-9);
    }
    assert!(d.path().join("entropy_scan.svg").exists());

    let o = nccs(&["entropy-scan", "--alpha-grid", ""], d.path());
    assert_eq!(code(&o), 2);
    let o = nccs(
        &["entropy-scan", "--family", "cat", "--alpha-grid", "1"],
        d.path(),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn measure_check_command() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&nccs(&["measure-check", "--tau", "0.1"], d.path())), 0);
    assert_eq!(code(&nccs(&["measure-check", "--tau", "2"], d.path())), 0);
    assert_eq!(code(&nccs(&["measure-check", "--tau", "0"], d.path())), 2);
    let t = nccs::fock_io::read_csv(&d.path().join("moments.csv")).unwrap();
    assert_eq!(t.rows.len(), 11);
    let o = nccs(&["measure-check", "--tau", "1", "--tolerance", "1e-30"], d.path());
    assert_eq!(code(&o), 4);
}

#[test]
fn config_file_merges_under_flags() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.json");
    fs::write(&cfg, r#"{"family": "glauber", "alpha-re": 3.0, "nmax": 40}"#).unwrap();
    let out = d.path().join("o");
    let o = nccs(
        &["state", "--config", cfg.to_str().unwrap(), "--alpha-re", "1"],
        &out,
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("alpha=1+0i"));
    assert!(stdout(&o).contains("n_max      40"));

    fs::write(&cfg, r#"{"family": "glauber", "colour": 1}"#).unwrap();
    assert_eq!(
        code(&nccs(&["state", "--config", cfg.to_str().unwrap()], &out)),
        2
    );
    let missing = d.path().join("absent.json");
    assert_eq!(
        code(&nccs(&["state", "--config", missing.to_str().unwrap()], &out)),
        1
    );
}

#[test]
fn runs_are_byte_identical() {
    let runs: [&[&str]; 4] = [
        &[
            "state",
            "--family",
            "nc-squeezed",
            "--tau",
            "0.5",
            "--zeta",
            "0.25",
            "--alpha-re",
            "1.1",
        ],
        &[
            "metrics",
            "--family",
            "nlcs",
            "--tau",
            "0.05",
            "--alpha-re",
            "1",
            "--alpha-im",
            "-0.3",
        ],
        &["autocorr", "--J", "1.5", "--tau", "0.1", "--t-steps", "3001"],
        &[
            "entropy-scan",
            "--family",
            "nc-squeezed",
            "--tau",
            "0.5",
            "--zeta",
            "0.25",
            "--alpha-grid",
            "0:2.5:6",
        ],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let oa = nccs(args, a.path());
        let mut with_workers = args.to_vec();
        with_workers.extend(["--workers", "3"]);
        let ob = nccs(&with_workers, b.path());
        assert_eq!(code(&oa), 0, "{args:?}");
        assert_eq!(oa.stdout, ob.stdout, "{args:?}");
        assert_eq!(dir_contents(a.path()), dir_contents(b.path()), "{args:?}");
    }
}
