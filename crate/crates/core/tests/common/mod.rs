#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rangeloc::geometry::collinearity_measure;
use rangeloc::{SensorConfig, Vec2, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random length scale spread over several decades.
pub fn random_scale(r: &mut ChaCha8Rng) -> f64 {
    10f64.powf(r.random_range(-2.0..3.0))
}

pub fn random_point(r: &mut ChaCha8Rng, half: f64) -> Vec2 {
    Vec2::new(r.random_range(-half..half), r.random_range(-half..half))
}

/// Receiver triangle away from collinear: collinearity measure at least 0.05.
pub fn random_triangle(r: &mut ChaCha8Rng) -> SensorConfig {
    let l = random_scale(r);
    loop {
        let m = [random_point(r, l), random_point(r, l), random_point(r, l)];
        let m3 = m.map(|p| p.extend(0.0));
        if collinearity_measure(&m3) < 0.05 {
            continue;
        }
        if let Ok(c) = SensorConfig::planar(&m) {
            return c;
        }
    }
}

pub fn random_pair(r: &mut ChaCha8Rng) -> SensorConfig {
    let l = random_scale(r);
    loop {
        let (a, b) = (random_point(r, l), random_point(r, l));
        if a.dist(b) > 1e-3 * l {
            return SensorConfig::planar(&[a, b]).unwrap();
        }
    }
}

/// Source in a box twice the size of the receiver spread, away from receivers.
pub fn random_source(r: &mut ChaCha8Rng, config: &SensorConfig) -> Vec2 {
    let pts: Vec<Vec2> = config.receivers().iter().map(|m| m.xy()).collect();
    let c = pts.iter().fold(Vec2::ZERO, |a, p| a + *p) / pts.len() as f64;
    let l = 2.0 * config.d_max();
    loop {
        let x = c + random_point(r, l);
        if pts.iter().all(|p| p.dist(x) > 1e-3 * config.d_max()) {
            return x;
        }
    }
}

pub fn random_spatial_triangle(r: &mut ChaCha8Rng) -> SensorConfig {
    let l = random_scale(r);
    let mut p = || Vec3::new(r.random_range(-l..l), r.random_range(-l..l), r.random_range(-l..l));
    loop {
        let m = [p(), p(), p()];
        if collinearity_measure(&m) < 0.05 {
            continue;
        }
        if let Ok(c) = SensorConfig::spatial(&m) {
            return c;
        }
    }
}

pub const TRIANGLE: &str = r#"{"receivers":[[0,0],[1,0],[0,1]]}"#;
pub const COLLINEAR: &str = r#"{"receivers":[[0,0],[1,0],[0.5,0]]}"#;

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// `(golden file name, config, arguments)` for every subcommand on both configurations.
pub fn golden_cases() -> Vec<(String, &'static str, Vec<&'static str>)> {
    let mut out = Vec::new();
    for (tag, cfg) in [("triangle", TRIANGLE), ("collinear", COLLINEAR)] {
        let per_config: Vec<(&str, Vec<&str>)> = if tag == "triangle" {
            vec![
                ("localize_toa.json", vec!["localize-toa", "--toa", "0.5,0.80622577482985502,0.67082039324993692"]),
                ("localize_toa.csv", vec!["localize-toa", "--toa", "0,1,1", "--format", "csv"]),
                ("localize_tdoa.json", vec!["localize-tdoa", "--tdoa", "-0.17082039324993692,0.13540538157991810"]),
                ("classify_toa.json", vec!["classify", "--toa", "1,1,1"]),
                ("classify_tdoa.json", vec!["classify", "--tdoa", "0,0"]),
                ("classify_tdoa.csv", vec!["classify", "--tdoa", "0,0", "--format", "csv"]),
                ("surface_sample.csv", vec!["surface-sample", "--range=-2:3", "--resolution", "6", "--format", "csv"]),
                ("features.json", vec!["features"]),
                ("params.json", vec!["params"]),
                (
                    "simulate.csv",
                    vec![
                        "simulate",
                        "--source",
                        "0.3,0.4",
                        "--sigma",
                        "0.01",
                        "--bias",
                        "0.3",
                        "--seed",
                        "7",
                        "--samples",
                        "4",
                        "--format",
                        "csv",
                    ],
                ),
            ]
        } else {
            vec![
                ("localize_toa.json", vec!["localize-toa", "--toa", "0.70710678118654757,0.70710678118654757,0.5"]),
                ("localize_tdoa.json", vec!["localize-tdoa", "--tdoa", "0.20710678118654757,0.20710678118654757"]),
                ("classify_toa.json", vec!["classify", "--toa", "0.70710678118654757,0.70710678118654757,0.5"]),
                ("classify_tdoa.json", vec!["classify", "--tdoa", "-0.5,0.5"]),
                ("surface_sample.csv", vec!["surface-sample", "--range=-1:2", "--resolution", "4", "--format", "csv"]),
                ("features.json", vec!["features"]),
                ("params.json", vec!["params", "--abc", "0.5,0.5,2"]),
                ("simulate.json", vec!["simulate", "--source", "0.5,0.5", "--samples", "2"]),
            ]
        };
        for (name, args) in per_config {
            out.push((format!("{tag}_{name}"), cfg, args));
        }
    }
    out
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(config: Option<&str>, args: &[&str], threads: Option<usize>) -> CliRun {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rangeloc"));
    cmd.args(args);
    if let Some(c) = config {
        cmd.args(["--config", c]);
    }
    if let Some(n) = threads {
        cmd.env("RAYON_NUM_THREADS", n.to_string());
    }
    let out = cmd.output().expect("failed to launch rangeloc");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Compares every golden case with the stored output; with `UPDATE_GOLDEN=1`
/// rewrites the files instead. Returns the mismatching case names.
pub fn check_goldens() -> Vec<String> {
    let update = std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let dir = golden_dir();
    let mut bad = Vec::new();
    for (name, cfg, args) in golden_cases() {
        let run = run_cli(Some(cfg), &args, None);
        if run.code != 0 {
            bad.push(format!("{name}: exit {} {}", run.code, run.stderr.trim()));
            continue;
        }
        let path = dir.join(&name);
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &run.stdout).unwrap();
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(expected) if expected == run.stdout => {}
            Ok(_) => bad.push(format!("{name}: output differs")),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    bad
}
