//! Command outputs: formats, round trips, determinism and exit status.

use qminkowski::cli::{
    cmd_dump_op, cmd_obstruction, cmd_spectrum, cmd_tensors, cmd_verify, collect_spectrum, parse_spectrum_csv,
    OutputFormat, RunConfig,
};
use qminkowski::hilbert::{SectorKind, TruncationWindow};
use std::process::Command;

fn fig1_config(format: OutputFormat) -> RunConfig {
    let mut c = RunConfig::for_sector(SectorKind::TimeLikeForward);
    c.window = TruncationWindow::new(0, (-10, 10), (-4, 4), 0).unwrap();
    c.format = format;
    c
}

const FIG1: [SectorKind; 2] = [SectorKind::TimeLikeForward, SectorKind::SpaceLike];

#[test]
fn csv_round_trip_keeps_the_invariant_length() {
    let c = fig1_config(OutputFormat::Csv);
    let text = cmd_spectrum(&c, &FIG1).unwrap();
    assert!(text.starts_with("sector,M,n,t,r\n"));
    let back = parse_spectrum_csv(&text).unwrap();
    assert_eq!(back, collect_spectrum(&c, &FIG1).unwrap());
    for pt in &back {
        let q2m = 1.1f64.powi(2 * pt.level as i32);
        let expect = if pt.sector == SectorKind::SpaceLike { -q2m } else { q2m };
        assert!(((pt.t * pt.t - pt.r * pt.r) - expect).abs() <= 1e-12 * q2m.max(pt.t * pt.t));
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    for f in [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg] {
        let c = fig1_config(f);
        assert_eq!(cmd_spectrum(&c, &FIG1).unwrap(), cmd_spectrum(&c, &FIG1).unwrap());
    }
    let mut c = RunConfig::for_sector(SectorKind::LightLike);
    c.window = TruncationWindow::new(2, (-3, 3), (0, 0), 0).unwrap();
    c.format = OutputFormat::Json;
    assert_eq!(cmd_dump_op(&c, "R+").unwrap(), cmd_dump_op(&c, "R+").unwrap());
    assert_eq!(cmd_verify(&c).unwrap().0, cmd_verify(&c).unwrap().0);
}

#[test]
fn svg_has_one_marker_per_point_and_light_cone_lines() {
    let c = fig1_config(OutputFormat::Svg);
    let svg = cmd_spectrum(&c, &FIG1).unwrap();
    let n = collect_spectrum(&c, &FIG1).unwrap().len();
    assert_eq!(svg.matches("<circle class=\"point\"").count(), n);
    assert_eq!(svg.matches("class=\"light-cone\"").count(), 2);
    assert!(svg.contains(">r</text>") && svg.contains(">t</text>"));
}

#[test]
fn json_documents_carry_the_schema_version() {
    let c = fig1_config(OutputFormat::Json);
    let v: serde_json::Value = serde_json::from_str(&cmd_spectrum(&c, &FIG1).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    let apex = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["sector"] == "TimeLikeForward" && p["n"] == 0 && p["M"] == 0)
        .expect("apex present");
    assert!((apex["t"].as_f64().unwrap() - 1.0).abs() < 1e-14);

    let t: serde_json::Value = serde_json::from_str(&cmd_tensors(&c, "P+").unwrap()).unwrap();
    assert_eq!(t["schema"], 1);
    assert_eq!(t["component_order"].as_array().unwrap().len(), 4);
    assert_eq!(t["data"].as_array().unwrap().len(), 4);
    assert!(cmd_tensors(&c, "nonsense").is_err());
}

#[test]
fn dump_op_lists_labelled_triples() {
    let mut c = RunConfig::for_sector(SectorKind::TimeLikeForward);
    c.window = TruncationWindow::new(1, (0, 2), (0, 0), 0).unwrap();
    c.format = OutputFormat::Json;
    let v: serde_json::Value = serde_json::from_str(&cmd_dump_op(&c, "X0").unwrap()).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), v["dim"].as_u64().unwrap() as usize);
    assert_eq!(entries[0]["row"], "|j=0,m=0,n=0,M=0>");
    assert!((entries[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!(cmd_dump_op(&c, "nonsense").is_err());
    let mut light = RunConfig::for_sector(SectorKind::LightLike);
    light.window = TruncationWindow::new(1, (-2, 2), (0, 0), 0).unwrap();
    assert!(cmd_dump_op(&light, "P0").is_err());
}

#[test]
fn verify_reports_failures_at_an_unreachable_tolerance() {
    let mut c = RunConfig::for_sector(SectorKind::SpaceLike);
    c.window = TruncationWindow::new(3, (-4, 4), (-2, 2), 0).unwrap();
    let (_, ok) = cmd_verify(&c).unwrap();
    assert!(ok);
    c.tol = 1e-17;
    let (text, ok) = cmd_verify(&c).unwrap();
    assert!(!ok);
    assert!(text.contains("FAIL"));
}

#[test]
fn light_cone_verify_lists_momentum_relations_as_not_representable() {
    let mut c = RunConfig::for_sector(SectorKind::LightLike);
    c.window = TruncationWindow::new(3, (-4, 4), (0, 0), 0).unwrap();
    let (text, ok) = cmd_verify(&c).unwrap();
    assert!(ok);
    assert!(text.contains("XP-time-time") && text.contains("not representable"));
}

#[test]
fn tiny_window_forces_failure() {
    let mut c = RunConfig::for_sector(SectorKind::SpaceLike);
    c.window = TruncationWindow::new(0, (0, 0), (0, 0), 2).unwrap();
    let (text, ok) = cmd_verify(&c).unwrap();
    assert!(!ok);
    assert!(text.contains("INCONCLUSIVE"));
}

#[test]
fn obstruction_report_and_sector_check() {
    let mut c = RunConfig::for_sector(SectorKind::LightLike);
    c.window = TruncationWindow::new(2, (-4, 4), (0, 0), 0).unwrap();
    let text = cmd_obstruction(&c).unwrap();
    assert!(text.contains("verdict: no representation"));
    c.sector = SectorKind::SpaceLike;
    assert!(cmd_obstruction(&c).is_err());
}

#[test]
fn invalid_configurations_are_rejected() {
    let mut c = RunConfig::for_sector(SectorKind::SpaceLike);
    c.scale = 1.2; // outside [1, q)
    assert!(cmd_verify(&c).is_err());
    let mut c = RunConfig::for_sector(SectorKind::SpaceLike);
    c.q = 0.9;
    assert!(cmd_spectrum(&c, &[SectorKind::SpaceLike]).is_err());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qmink");
    let ok = Command::new(bin)
        .args(["verify", "--sector", "light", "--jmax", "2", "--nrange", "-3:3"])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let strict = Command::new(bin)
        .args([
            "verify", "--sector", "light", "--jmax", "2", "--nrange", "-3:3", "--tol", "1e-17",
        ])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
    let bad = Command::new(bin)
        .args(["obstruction", "--sector", "time+"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("light-like"));
    let csv = Command::new(bin)
        .args([
            "spectrum",
            "--sector",
            "time+,space",
            "--nrange",
            "-2:2",
            "--Mrange",
            "0:0",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 + 5);
}
