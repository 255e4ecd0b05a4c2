use std::path::PathBuf;
use std::process::Command;

use heisenflow::axisym::GridFn;
use heisenflow::cli::{parse_config, run, write_outputs, Format};
use heisenflow::exact::extinction_time;
use heisenflow::flow::{extract_zero_level, FlowReport, LevelCurve};
use heisenflow::game::Trajectory;

const COARSE: &str = "[grid]\nnr = 41\nnz = 81\n";

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("heisenflow-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heisenflow"))
}

#[test]
fn config_errors_name_the_offender() {
    let e = parse_config("initial = \"sphere 1.0\"\neps = 0.05\nhorizon = 0.3\nsnapshots = [0.0, 0.45]\n").unwrap_err();
    assert!(e.to_string().contains("0.45"), "{e}");
    assert_eq!(e.exit_code(), 2);
    let e = parse_config("initial = \"sphere -1\"\neps = 0.05\nhorizon = 0.3\n").unwrap_err();
    assert!(e.to_string().contains("radius must be positive"), "{e}");
    let e = parse_config("initial = \"sphere 1\"\nbackend = \"pde\"\nhorizon = 0.3\n[grid]\nnr = 1\n").unwrap_err();
    assert!(e.to_string().contains("[grid]"), "{e}");
}

#[test]
fn truncation_defaults_to_ten_r4() {
    let c = parse_config("initial = \"sphere 0.5\"\neps = 0.05\nhorizon = 0.1\n").unwrap();
    let u0 = c.initial.sample(&c.grid).unwrap();
    assert_eq!(u0.spec.far_field, 10.0 * 0.5f64.powi(4));
}

#[test]
fn initial_snapshot_echoes_the_initial_curve() {
    let text = format!("initial = \"sphere 1.0\"\neps = 0.1\nhorizon = 0.2\nsnapshots = [0.0]\n{COARSE}");
    let c = parse_config(&text).unwrap();
    let out = run(&c).unwrap();
    assert_eq!(out.report.times, vec![0.0]);
    let u0 = c.initial.sample(&c.grid).unwrap();
    assert_eq!(out.report.curves, vec![extract_zero_level(&u0)]);
    assert_eq!(out.snapshots[0].1, u0);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for backend in ["game", "pde"] {
        let text = format!("initial = \"sphere 1.0\"\nbackend = \"{backend}\"\neps = 0.1\nhorizon = 0.1\nsnapshots = [0.0, 0.05, 0.1]\n{COARSE}");
        let c = parse_config(&text).unwrap();
        let a = run(&c).unwrap().report.to_json().unwrap();
        let b = run(&c).unwrap().report.to_json().unwrap();
        assert_eq!(a, b, "{backend}");
    }
}

#[test]
fn game_sphere_extinction_near_reference() {
    let text = "initial = \"sphere 1.0\"\neps = 0.08\nhorizon = 0.35\n[grid]\nnr = 81\nnz = 161\n";
    let out = run(&parse_config(text).unwrap()).unwrap();
    let t = out.report.extinction_estimate.expect("the sphere vanishes before the horizon");
    let reference = extinction_time(1.0).unwrap();
    assert!((t - reference).abs() <= 0.1 * reference, "estimate {t} vs {reference}");
    assert!(out.report.profile_error.is_some());
}

#[test]
fn written_files_round_trip() {
    let dir = scratch("roundtrip");
    let text = format!("initial = \"sphere 1.0\"\neps = 0.1\nhorizon = 0.1\nsnapshots = [0.0, 0.1]\nformats = [\"csv\", \"json\", \"svg\"]\n{COARSE}");
    let c = parse_config(&text).unwrap();
    assert_eq!(c.formats, vec![Format::Csv, Format::Json, Format::Svg]);
    let out = run(&c).unwrap();
    let written = write_outputs(&out, &c, &dir).unwrap();
    assert!(written.iter().any(|p| p.ends_with("overlay.svg")));
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
    assert_eq!(FlowReport::from_json(&read("report.json")).unwrap(), out.report);
    for (k, ((_, u), curve)) in out.snapshots.iter().zip(&out.report.curves).enumerate() {
        assert_eq!(&GridFn::from_json(&read(&format!("field_{k:03}.json"))).unwrap(), u);
        assert_eq!(&GridFn::from_csv(&read(&format!("field_{k:03}.csv"))).unwrap(), u);
        assert_eq!(&GridFn::read(&dir.join(format!("field_{k:03}.csv"))).unwrap(), u);
        let from_json: LevelCurve = serde_json::from_str(&read(&format!("curve_{k:03}.json"))).unwrap();
        assert_eq!(&from_json, curve);
        assert_eq!(&LevelCurve::from_csv(&read(&format!("curve_{k:03}.csv"))).unwrap(), curve);
    }
    assert!(read("overlay.svg").starts_with("<svg"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn file_initial_field_reproduces_the_sphere_run() {
    let dir = scratch("file");
    let base = format!("eps = 0.1\nhorizon = 0.05\n{COARSE}");
    let c = parse_config(&format!("initial = \"sphere 1.0\"\n{base}")).unwrap();
    let u0 = c.initial.sample(&c.grid).unwrap();
    let path = dir.join("u0.json");
    std::fs::write(&path, u0.to_json().unwrap()).unwrap();
    let from_file = parse_config(&format!("initial = \"file {}\"\n{base}", path.display())).unwrap();
    assert_eq!(run(&from_file).unwrap().report.curves, run(&c).unwrap().report.curves);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_validate_passes() {
    let out = bin().args(["validate", "--seed", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{stdout}");
}

#[test]
fn binary_play_writes_a_trajectory() {
    let dir = scratch("play");
    let path = dir.join("traj.json");
    let out = bin()
        .args(["play", "--start", "0.5,0.2,0.1", "--eps", "0.05", "--steps", "20", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let traj = Trajectory::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(traj.rows().len(), 21);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let dir = scratch("exit");
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let code = |args: &[&std::ffi::OsStr]| bin().args(args).output().unwrap().status.code();

    let bad = write("bad.toml", "initial = \"sphere -1\"\neps = 0.1\nhorizon = 0.1\n");
    assert_eq!(code(&["evolve".as_ref(), "--config".as_ref(), bad.as_os_str()]), Some(2));
    assert_eq!(code(&["evolve".as_ref(), "--config".as_ref(), dir.join("missing.toml").as_os_str()]), Some(2));
    assert_eq!(code(&["frobnicate".as_ref()]), Some(2));

    let cfl = write("cfl.toml", &format!("initial = \"sphere 1.0\"\nbackend = \"pde\"\ndt = 0.5\nhorizon = 1.0\n{COARSE}"));
    assert_eq!(code(&["evolve".as_ref(), "--config".as_ref(), cfl.as_os_str()]), Some(3));

    let ok = write("ok.toml", &format!("initial = \"sphere 1.0\"\neps = 0.1\nhorizon = 0.02\n{COARSE}"));
    let blocker = write("not-a-dir", "");
    let out_dir = blocker.join("out");
    assert_eq!(
        code(&["evolve".as_ref(), "--config".as_ref(), ok.as_os_str(), "--out".as_ref(), out_dir.as_os_str()]),
        Some(4)
    );
    assert_eq!(code(&["evolve".as_ref(), "--config".as_ref(), ok.as_os_str()]), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}
