use std::process::{Command, Output};

use serde_json::Value;

fn expsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsum"))
        .args(args)
        .env_remove("EXPSUM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn orbit_of_quadratic_residues() {
    let o = expsum(&["orbit", "--family", "quadratic-residue", "--p", "7"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["group_order"], 3);
    assert_eq!(v["points"], serde_json::json!([[1], [2], [4]]));
    let csv = expsum(&["--out", "csv", "orbit", "--p", "7"]);
    assert_eq!(stdout(&csv), "x0\n1\n2\n4\n");
}

#[test]
fn profile_of_unipotent_line() {
    let o = expsum(&[
        "profile",
        "--family",
        "unipotent-counterexample",
        "--p",
        "11",
        "--d",
        "2",
    ]);
    let v = json(&o);
    assert_eq!(v["beta_eff"], 0.0);
    assert_eq!(v["lies_in_hyperplane"], true);
}

#[test]
fn spectrum_and_growth() {
    let s = json(&expsum(&[
        "spectrum", "--p", "7", "--alpha", "0.4", "--exact",
    ]));
    assert_eq!(s["size"], 7);
    let g = json(&expsum(&["growth", "--p", "7", "--alpha", "0.4"]));
    assert_eq!(
        (
            g["size"].as_u64(),
            g["size_sq"].as_u64(),
            g["covering_k"].as_u64()
        ),
        (Some(21), Some(21), Some(1))
    );
    let it = json(&expsum(&[
        "iterate",
        "--p",
        "11",
        "--eps-prime",
        "0.5",
        "--exact",
    ]));
    assert_eq!(it["verdict"], "pass");
    assert_eq!(it["schedule"]["j_max"], 4);
}

#[test]
fn verify_all_on_qr7_passes() {
    let o = expsum(&["--out", "csv", "verify", "all", "--p", "7", "--exact"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 18);
    assert!(
        rows.iter().all(|r| r.split(',').nth(1) == Some("pass")),
        "{text}"
    );
}

#[test]
fn verify_single_check_and_unknown_name() {
    let v = json(&expsum(&[
        "verify",
        "trend",
        "--family",
        "unipotent-counterexample",
        "--p",
        "11",
        "--d",
        "2",
    ]));
    assert_eq!(v["checks"][0]["verdict"], "hypotheses-unmet");
    assert_eq!(expsum(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn invalid_family_parameters_are_rejected() {
    let o = expsum(&[
        "orbit",
        "--family",
        "quadratic-residue",
        "--p",
        "7",
        "--d",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d = 1"));
}

#[test]
fn cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_expsum"))
        .args([
            "profile",
            "--family",
            "diagonal-torus",
            "--p",
            "101",
            "--d",
            "2",
        ])
        .env("EXPSUM_CAP", "space=100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap 100"));
}

#[test]
fn empty_sweep_prints_header() {
    let o = expsum(&["--out", "csv", "sweep"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "family,p,d,seed,group_order,orbit_size,delta_eff,beta_eff,max_nonzero_ratio,log_p_ratio,\
         pass,fail,hypotheses_unmet,inconclusive,failed_checks,error\n"
    );
}

#[test]
fn qr_sweep_ratio_column() {
    let o = expsum(&[
        "--out",
        "csv",
        "sweep",
        "--family",
        "quadratic-residue",
        "--p",
        "23,7,19,11,31",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut last = f64::INFINITY;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let p: f64 = cols[1].parse().unwrap();
        let ratio: f64 = cols[8].parse().unwrap();
        assert!(
            (ratio - (p + 1.0).sqrt() / (p - 1.0)).abs() < 1e-9,
            "{line}"
        );
        assert!(ratio < last);
        last = ratio;
        assert_eq!(cols[11], "0", "{line}");
    }
}

#[test]
fn sweep_is_independent_of_jobs() {
    let base = [
        "--out",
        "csv",
        "sweep",
        "--family",
        "cyclic-random",
        "--p",
        "5,7",
        "--d",
        "2",
        "--seeds",
        "3",
    ];
    let one = expsum(&[&base[..], &["--jobs", "1"]].concat());
    let eight = expsum(&[&base[..], &["--jobs", "8"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn sweep_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        r#"
schema_version = 1
[battery]
alphas = [0.3, 0.6]
[[instance]]
family = "diagonal-torus"
p = 5
d = 2
[[instance]]
family = "quadratic-residue"
p = 11
d = 1
"#,
    )
    .unwrap();
    let csv_path = dir.path().join("out.csv");
    let json_path = dir.path().join("out.json");
    let o = expsum(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--csv-file",
        csv_path.to_str().unwrap(),
        "--json-file",
        json_path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("diagonal-torus,5,2,"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["rows"][0]["timing_ms"].is_number());
    assert_eq!(v["rows"][1]["checks"]["gauss-sum"], "pass");

    std::fs::write(&cfg, "schema_version = 9\n").unwrap();
    assert_eq!(
        expsum(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
