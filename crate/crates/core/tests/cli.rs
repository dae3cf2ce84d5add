use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rdcarleman"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["audit", ""]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["run", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["run", "fig4b_n16", "--set", "n_list=[2]", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("R = 1.4924"));
    let out = bin()
        .args(["resources", "fig4b_n16", "--N", "2", "--eps", "0.01", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["R_gt_1"], true);
    assert_eq!(v["R_D_lt_1"], true);
    let out = bin()
        .args(["resources", "fig4b_n16", "--N", "4", "--eps", "0.01", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_checks_exit_one() {
    // a reference tolerance below rounding level cannot be met
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "fig4b_n16", "--set", "tol=1e-30", "--set", "n_list=[2]", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectral_subcommand_reads_a_history() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let mut s = String::from("k,l,value\n");
    for k in 0..4 {
        for l in 0..8 {
            let x = l as f64 / 8.0;
            s.push_str(&format!("{k},{l},{}\n", (-(k as f64)).exp() * (2.0 * std::f64::consts::PI * x).sin()));
        }
    }
    std::fs::write(&path, s).unwrap();
    let out = bin()
        .arg("spectral")
        .arg(&path)
        .args(["--theta", "4", "--domain", "0,1,0,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["mean_square_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["n"], 8);
    let out = bin().arg("spectral").arg(&path).args(["--theta", "4", "--domain", "0,1,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
