use rdcarleman::experiments::*;
use rdcarleman::grid::norm2;
use rdcarleman::Error;
use std::fs;

#[test]
fn every_builtin_preset_parses_and_round_trips() {
    for name in PRESET_NAMES {
        let p = Preset::builtin(name).unwrap();
        assert_eq!(p.name, name);
        let back = Preset::parse(&p.to_toml().unwrap()).unwrap();
        assert_eq!(back, p);
    }
    assert!(matches!(Preset::builtin("fig9"), Err(Error::Config(_))));
}

#[test]
fn dot_path_overrides() {
    let p = Preset::builtin("fig2").unwrap();
    let q = p
        .with_overrides(&["rd.D=0.3".into(), "grid.n=8".into(), "n_list=[1, 3]".into(), "lambda.breakpoint=loose".into()])
        .unwrap();
    assert_eq!(q.rd.d, 0.3);
    assert_eq!(q.grid.n, 8);
    assert_eq!(q.n_list, vec![1, 3]);
    assert_eq!(q.rd.a, p.rd.a);
    for bad in ["rd.D", "rd.X=1", "grid.n=abc", "rd.D=-1", "=3", "rd..D=1"] {
        assert!(p.with_overrides(&[bad.into()]).is_err(), "{bad}");
    }
}

#[test]
fn fig4b_run_writes_artifacts_and_is_reproducible() {
    let p = Preset::builtin("fig4b_n16").unwrap().with_overrides(&["n_list=[1, 2, 4]".into()]).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_preset(&p, a.path()).unwrap();
    run_preset(&p, b.path()).unwrap();
    for f in ["reference.csv", "truncation.csv", "max_error.csv", "state_stats.csv", "radii.json", "history.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let radii: serde_json::Value = serde_json::from_slice(&fs::read(a.path().join("radii.json")).unwrap()).unwrap();
    assert!((radii["R"].as_f64().unwrap() - 1.4924).abs() <= 5e-4);
    assert!((radii["R_D"].as_f64().unwrap() - 0.9299).abs() <= 5e-4);
    let svg = fs::read_to_string(a.path().join("convergence.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.trim_end().ends_with("</svg>"));
    let csv = fs::read_to_string(a.path().join("max_error.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(ra.checks.all_ok(), "{}", ra.checks.summary_table());
    assert_eq!(load_history(a.path(), 2).unwrap().unwrap(), ra.history()[1]);
    assert!(load_history(a.path(), 5).unwrap().is_none());
}

#[test]
fn positive_lambda1_preset_reports_instead_of_failing() {
    let p = Preset::builtin("fig4a").unwrap().with_overrides(&["n_list=[1, 2]".into()]).unwrap();
    let art = compute_preset(&p).unwrap();
    assert!(art.radii.is_none());
    assert!(art.radii_error.as_deref().unwrap().contains("not negative"));
    assert!(art.max_errors()[0].1 < 1e-3);
    assert!(art.checks.all_ok());
}

#[test]
fn resource_report_scalings() {
    let p = Preset::builtin("fig4b_n16").unwrap();
    let hs = HistoryStats { n_trunc: 2, g: 0.3, max_yhat: 0.6 };
    let r1 = resource_report(&p, 2, 0.01, Some(hs)).unwrap();
    let r2 = resource_report(&p, 2, 0.005, Some(hs)).unwrap();
    assert!((r2.query.value / r1.query.value - 2.0).abs() < 1e-12);
    assert!(r1.r_gt_1 && r1.r_d_lt_1);
    let json = serde_json::to_value(&r1).unwrap();
    assert!(json["resources"]["G"].as_f64().is_some());
    let u = norm2(&p.initial_field().unwrap().values);
    let h1 = HistoryStats { n_trunc: 1, ..hs };
    let r = resource_report(&p, 1, 0.01, Some(h1)).unwrap();
    assert!((r.query.prefactor_uin_2n - u * u).abs() < 1e-15);
    match resource_report(&p, 2, 0.01, None) {
        Err(Error::Config(m)) => assert!(m.contains("run")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn audit_scopes() {
    assert!(matches!(audit_bounds(""), Err(Error::InvalidArgument(_))));
    assert!(audit_bounds("grids").is_err());
    for scope in ["heatdecay", "linsys", "spectral"] {
        let reps = audit_bounds(scope).unwrap();
        assert!(!reps.is_empty());
        for r in reps {
            assert!(r.all_ok(), "{}", r.summary_table());
        }
    }
}
