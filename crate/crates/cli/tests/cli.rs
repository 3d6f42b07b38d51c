use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn glie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glie"))
        .args(args)
        .output()
        .expect("spawn glie")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header plus data rows, footer lines dropped.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn field_map_lia_grid_is_pure_binormal() {
    let out = glie(&[
        "field-map",
        "--evaluator",
        "lia",
        "--eps-range",
        "0.01:0.03:3",
        "--gamma1-range",
        "0.2:1.2:3",
        "--gamma2-range",
        "0.5pi",
    ]);
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(num(&r[col(&header, "lia_v_t")]), 0.0);
        assert_eq!(num(&r[col(&header, "lia_v_n")]), 0.0);
        assert!(num(&r[col(&header, "lia_v_b")]) != 0.0);
    }
}

#[test]
fn field_map_oracle_tracks_elliptic_within_tolerance_column() {
    let out = glie(&[
        "field-map",
        "--evaluator",
        "oracle,elliptic",
        "--eps-range",
        "0.2:0.5:3",
        "--gamma1-range",
        "0:pi:4",
        "--gamma2-range",
        "0.2pi:0.8pi:3",
        "--half-angle",
        "0.5pi",
        "--tol",
        "1e-10",
    ]);
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(rows.len(), 36);
    for r in &rows {
        let tol = num(&r[col(&header, "tol")]);
        for c in ["v_t", "v_n", "v_b"] {
            let d = num(&r[col(&header, &format!("oracle_{c}"))]) - num(&r[col(&header, &format!("elliptic_{c}"))]);
            assert!(d.abs() <= tol, "{c}: delta {d:e} > {tol:e}");
        }
    }
}

#[test]
fn field_map_header_is_stable() {
    let out = glie(&["field-map", "--evaluator", "elliptic,glie", "--eps-range", "0.02"]);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "x1,x2,x3,epsilon,tol,elliptic_v_t,elliptic_v_n,elliptic_v_b,elliptic_v_norm,\
         glie_v_t,glie_v_n,glie_v_b,glie_v_norm"
    );
}

#[test]
fn field_map_inside_core_fails_without_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = glie(&[
        "field-map",
        "--eps-range",
        "1e-9:2e-9:2",
        "--gamma1-range",
        "0",
        "--gamma2-range",
        "0.5pi",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!path.exists());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon = 1e-9"));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["field-map", "--tol", "0.5"],
        vec!["field-map", "--tol", "0"],
        vec!["field-map", "--evaluator", "vortex"],
        vec!["field-map", "--eps-range", "0.1:0.2:0"],
        vec!["field-map", "--eps-range", "0:0.2:3"],
        vec!["field-map", "--half-angle", "4"],
        vec!["field-map", "--radius", "-1"],
        vec!["field-map", "--evaluator", "oracle", "--tol", "1e-4"],
        vec!["field-map", "--samples", "0"],
        vec!["converge", "--k-range", "0:1:3"],
        vec!["converge", "--lambda-range", "0.5:1:2"],
        vec!["converge", "--max-order", "40"],
        vec!["node-velocity", "--position", "0,0.1,0", "--tangent", "1,1,0"],
        vec!["node-velocity"],
    ] {
        let out = glie(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn converge_rows() {
    let out = glie(&[
        "converge",
        "--lambda-range",
        "0:0.9:4",
        "--k-range",
        "0.5:1:3",
        "--max-order",
        "4",
    ]);
    let (header, rows) = csv(&stdout(&out));
    assert_eq!(
        header,
        ["lambda", "k", "N", "series", "lo", "hi", "F_quad", "in_bracket"]
    );
    assert_eq!(rows.len(), 4 * 3 * 4);
    for r in &rows {
        assert_eq!(r[7], "true", "{r:?}");
        let (lambda, k) = (num(&r[0]), num(&r[1]));
        if k == 1.0 {
            assert_eq!(num(&r[4]), 0.0);
            assert_eq!(num(&r[5]), 0.0);
            assert_eq!(num(&r[3]), lambda.atanh());
        }
        if lambda == 0.0 {
            assert!(r[3..7].iter().all(|v| num(v) == 0.0), "{r:?}");
        }
    }
}

#[test]
fn converge_bracket_shrinks_with_order() {
    let out = glie(&[
        "converge",
        "--lambda-range",
        "0.3",
        "--k-range",
        "0.9",
        "--max-order",
        "4",
    ]);
    let (_, rows) = csv(&stdout(&out));
    let widths: Vec<f64> = rows.iter().map(|r| num(&r[5]) - num(&r[4])).collect();
    assert_eq!(widths.len(), 4);
    assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
}

#[test]
fn compare_self_reference_and_footer() {
    let base = [
        "compare",
        "--eps-range",
        "0.005:0.04:4",
        "--gamma1-range",
        "0.5pi",
        "--gamma2-range",
        "0.5pi",
    ];
    let text = stdout(&glie(&[&base[..], &["--evaluator", "lia"]].concat()));
    let (header, rows) = csv(&text);
    assert_eq!(
        header.join(","),
        "x1,x2,x3,epsilon,lia_b,glie_b,local_b,oracle_b,lia_rel_dev,glie_rel_dev,local_rel_dev,oracle_rel_dev"
    );
    for r in &rows {
        assert_eq!(num(&r[col(&header, "lia_rel_dev")]), 0.0);
    }
    let footer: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(footer.len(), 4);
    assert!(footer[0].starts_with("# fit=abs_b_vs_ln_inv_eps,evaluator=lia,slope="));

    // LIA is exactly affine in ln(1/ε) with slope κ.
    let slope: f64 = footer[0]
        .split(',')
        .find_map(|f| f.strip_prefix("slope="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 1.0).abs() < 1e-12);

    let (header, rows) = csv(&stdout(&glie(&base)));
    for r in &rows {
        assert_eq!(num(&r[col(&header, "oracle_rel_dev")]), 0.0);
        // Oracle-anchored deviation of the local field stays small on the normal axis.
        assert!(num(&r[col(&header, "local_rel_dev")]).abs() < 0.05);
    }
}

#[test]
fn compare_empty_grid_exits_three() {
    let out = glie(&[
        "compare",
        "--eps-range",
        "1e-9",
        "--gamma1-range",
        "0",
        "--gamma2-range",
        "0.5pi",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

fn node_row(extra: &[&str]) -> Vec<f64> {
    let mut args = vec!["node-velocity", "--position", "0.01,0.05,0.02"];
    args.extend_from_slice(extra);
    let (header, rows) = csv(&stdout(&glie(&args)));
    assert_eq!(
        header.join(","),
        "x1,x2,x3,v_i_1,v_i_2,v_i_3,dxi_dt_1,dxi_dt_2,dxi_dt_3"
    );
    assert_eq!(rows.len(), 1);
    rows[0].iter().map(|v| num(v)).collect()
}

#[test]
fn node_velocity_echoes_induced_velocity() {
    let r = node_row(&["--beta", "0", "--beta-prime", "0"]);
    assert_eq!(&r[3..6], &r[6..9]);
    let r2 = node_row(&["--v-n", "1,2,3", "--beta", "0", "--beta-prime", "0"]);
    assert_eq!(&r2[6..9], &r[3..6]);
}

#[test]
fn node_velocity_friction_vanishes_without_slip() {
    let vi = node_row(&[]);
    let vs = [0.5, -0.25, 1.0];
    let vn = format!("{},{},{}", vs[0] + vi[3], vs[1] + vi[4], vs[2] + vi[5]);
    let r = node_row(&[
        "--v-s",
        "0.5,-0.25,1",
        "--v-n",
        &vn,
        "--beta",
        "0.3",
        "--beta-prime",
        "0.1",
        "--tangent",
        "0,0.6,0.8",
    ]);
    for i in 0..3 {
        assert!((r[6 + i] - (vs[i] + vi[3 + i])).abs() < 1e-12 * (1.0 + vi[3 + i].abs()));
    }
}

#[test]
fn node_velocity_generic_case() {
    let r = node_row(&[
        "--v-s",
        "0.1,0.2,0.3",
        "--v-n",
        "-1,0.5,2",
        "--beta",
        "0.3",
        "--beta-prime",
        "0.05",
        "--tangent",
        "0.6,0,-0.8",
    ]);
    let t = [0.6, 0.0, -0.8];
    let w = [-1.1 - r[3], 0.3 - r[4], 1.7 - r[5]];
    // ξ′×w by components, and ξ′×(ξ′×w) = ξ′(ξ′·w) − w for unit ξ′.
    let c = [
        t[1] * w[2] - t[2] * w[1],
        t[2] * w[0] - t[0] * w[2],
        t[0] * w[1] - t[1] * w[0],
    ];
    let tw = t[0] * w[0] + t[1] * w[1] + t[2] * w[2];
    let vs = [0.1, 0.2, 0.3];
    for i in 0..3 {
        let want = vs[i] + r[3 + i] + 0.3 * c[i] - 0.05 * (t[i] * tw - w[i]);
        assert!(
            (r[6 + i] - want).abs() < 1e-12 * (1.0 + want.abs()),
            "{i}: {} vs {want}",
            r[6 + i]
        );
    }
}

fn run_to(path: &Path, format: &str, seed: &str) -> Vec<u8> {
    let out = glie(&[
        "field-map",
        "--evaluator",
        "elliptic,glie,lia",
        "--samples",
        "64",
        "--seed",
        seed,
        "--eps-range",
        "0.01:0.2:2",
        "--format",
        format,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let a = run_to(&dir.path().join("a"), format, "7");
        let b = run_to(&dir.path().join("b"), format, "7");
        let c = run_to(&dir.path().join("c"), format, "8");
        assert_eq!(a, b, "{format}");
        assert_ne!(a, c, "{format}");
    }
}

#[test]
fn json_mirrors_csv() {
    let args = [
        "field-map",
        "--evaluator",
        "elliptic",
        "--eps-range",
        "0.02:0.04:2",
        "--gamma1-range",
        "0:1:2",
    ];
    let text = stdout(&glie(&args));
    let (header, rows) = csv(&text);
    let json: Value = serde_json::from_str(&stdout(&glie(&[&args[..], &["--format", "json"]].concat()))).unwrap();
    assert_eq!(json["metadata"]["command"], "field-map");
    assert_eq!(json["metadata"]["evaluators"][0], "elliptic");
    let cols: Vec<&str> = json["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(cols, header);
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (jr, r) in jrows.iter().zip(&rows) {
        let keys: Vec<&String> = jr.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        for (name, v) in header.iter().zip(r) {
            assert_eq!(jr[name].as_f64().unwrap(), num(v), "{name}");
        }
    }
}
