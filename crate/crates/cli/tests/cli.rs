use std::process::{Command, Output};

fn wgquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgquant"))
        .args(args)
        .env_remove("WGQUANT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv(o: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn modes_rect_lists_cutoffs() {
    let o = wgquant(&[
        "modes", "--kind", "rect", "--w", "0.02", "--d", "0.01", "--fmax", "2.5e10",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    // the family label contains a comma and is quoted
    assert!(first.starts_with("\"TErect(0,1)\",0,1,"));
    let omega_c: f64 = first.rsplit(',').nth(1).unwrap().parse().unwrap();
    let want = 299_792_458.0 * std::f64::consts::PI / 0.02;
    assert!((omega_c - want).abs() <= 1e-14 * want);
    assert!(text.contains("TMrect(1,1)"));
    assert!(text.lines().skip(1).all(|l| {
        let f: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        f <= 2.5e10
    }));
}

#[test]
fn modes_plates_below_first_cutoff() {
    let o = wgquant(&["modes", "--kind", "plates", "--d", "0.01", "--fmax", "1e9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("\"TEM\","));
}

#[test]
fn malformed_geometry_exits_2() {
    let o = wgquant(&["modes", "--d", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    let o = wgquant(&[
        "field", "--kind", "plates", "--family", "TMrect", "--n", "1", "--m", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tem_field_and_potentials() {
    let q = json(&wgquant(&[
        "quantize", "--kind", "plates", "--family", "TEM",
    ]));
    let e_m = q["amplitudes"]["e_m"].as_f64().unwrap();
    let o = wgquant(&[
        "field",
        "--kind",
        "plates",
        "--family",
        "TEM",
        "--nz",
        "1",
        "--t",
        "0",
        "--x",
        "1",
        "--y",
        "0",
        "--with-potentials",
    ]);
    assert!(o.status.success());
    let (h, rows) = csv(&o);
    assert_eq!(&h[..4], ["x", "y", "z", "t"]);
    assert_eq!(rows.len(), 25);
    // x varies fastest
    assert!(rows[0][0] < rows[1][0] && rows[0][1] == rows[1][1]);
    let (ey, v, y) = (col(&h, "Ey"), col(&h, "V"), col(&h, "y"));
    for r in &rows {
        assert!((r[ey] + e_m).abs() <= 1e-15 * e_m);
        if r[y] != 0.0 {
            let k = rows[0][v] / rows[0][y];
            assert!((r[v] / r[y] - k).abs() <= 1e-12 * k.abs());
        }
    }
}

#[test]
fn tm_rect_ez_vanishes_on_walls() {
    let o = wgquant(&[
        "field", "--family", "TMrect", "--n", "1", "--m", "1", "--nx", "7", "--ny", "6", "--nz",
        "3", "--t", "3e-12", "--y", "0.4",
    ]);
    assert!(o.status.success());
    let (h, rows) = csv(&o);
    let (x, y, ez) = (col(&h, "x"), col(&h, "y"), col(&h, "Ez"));
    let w = rows.iter().map(|r| r[x]).fold(0.0, f64::max);
    let d = rows.iter().map(|r| r[y]).fold(0.0, f64::max);
    let scale = rows.iter().map(|r| r[ez].abs()).fold(0.0, f64::max);
    assert!(scale > 0.0);
    let mut wall = 0;
    for r in rows.iter().filter(|r| r[x].abs() == w || r[y].abs() == d) {
        assert!(r[ez].abs() <= 1e-15 * scale);
        wall += 1;
    }
    assert_eq!(wall, 3 * (2 * 7 + 2 * 4));
}

#[test]
fn verify_reports() {
    let o = wgquant(&["verify", "--kind", "plates", "--family", "TEM"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let r = json(&o);
    let names: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "maxwell",
            "boundary",
            "conservation",
            "lorenz",
            "reconstruction",
            "flux_link",
            "propagation",
            "motion_equality",
            "pair_equivalence",
            "quantization_closure"
        ]
    );

    let o = wgquant(&["verify", "--family", "TErect", "--n", "1", "--m", "1"]);
    assert!(o.status.success());
    let r = json(&o);
    let prop = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "propagation")
        .unwrap()
        .clone();
    assert_eq!(prop["detail"], "klein-gordon");

    let o = wgquant(&[
        "verify",
        "--family",
        "TErect",
        "--n",
        "1",
        "--m",
        "1",
        "--fault",
        "drop-kc-term",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["propagation"]);
}

#[test]
fn hidden_fault_flag_not_in_help() {
    let o = wgquant(&["verify", "--help"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("--fault"));
}

#[test]
fn zpf_sweep_asymptotes() {
    let o = wgquant(&[
        "zpf", "--family", "TMrect", "--n", "1", "--m", "1", "--w", "0.01", "--d", "0.01",
        "--length", "1", "--l-min", "1", "--l-max", "10000",
    ]);
    assert!(o.status.success());
    let (h, rows) = csv(&o);
    assert_eq!(h, ["l", "ratio"]);
    assert_eq!(rows.len(), 10_000);
    assert!((rows[0][1] / 0.02 - 1.0).abs() < 0.02);
    assert!((rows[9_999][1] / std::f64::consts::SQRT_2 - 1.0).abs() < 1e-3);

    let o = wgquant(&[
        "zpf", "--kind", "plates", "--family", "TEM", "--l-min", "-3", "--l-max", "3",
    ]);
    let (_, rows) = csv(&o);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[1] == 1.0));
}

#[test]
fn config_file_with_flag_override_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "rect", "w": 0.03, "d": 0.01, "length": 0.2, "family": "TMrect", "n": 1, "m": 1, "l": 2}"#,
    )
    .unwrap();
    let out = dir.path().join("q.json");
    let c = cfg.to_str().unwrap();
    let o = wgquant(&[
        "quantize",
        "--config",
        c,
        "--l",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let q: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(q["mode"], "TMrect(1,1) l=5");

    std::fs::write(&cfg, r#"{"widht": 0.03}"#).unwrap();
    assert_eq!(wgquant(&["quantize", "--config", c]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "verify", "--family", "TMrect", "--n", "2", "--m", "1", "--l", "-2", "--x", "0.3", "--y",
        "1.1",
    ];
    let a = wgquant(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_wgquant"))
        .args(args)
        .env("WGQUANT_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_wgquant"))
        .args(["modes"])
        .env("WGQUANT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
