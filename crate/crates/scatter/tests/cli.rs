//! Configuration parsing, the verification suite, determinism of the CSV
//! output and the `scatter` binary's exit codes.

use scatter::assembly::{Formulation, IeContext, RadialBasis};
use scatter::cli::*;
use scatter::postprocess::{direction_from_angles, kirchhoff_far, target_strength};
use std::path::PathBuf;
use std::process::Command as Process;

const MANUFACTURED: &str = "
[problem]
kind = manufactured
source = 0.25, 0.25, 0.25
[geometry]
r0 = 1
r_a_factor = 1.2
[mesh]
degree = 2
levels = 1, 2
[ie]
n = 2
[wave]
k = 2
";

const RIGID: &str = "
[problem]
kind = shbc
[geometry]
r0 = 1
r_a = 1.2
[mesh]
levels = 1
[ie]
n = 3
[wave]
k = 1.5
[farfield]
alpha_start = 0
alpha_end = 270
count = 4
beta = 0
";

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scatter-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_scatter"))
}

#[test]
fn configuration_errors_are_reported() {
    let missing = MANUFACTURED.replace("r_a_factor = 1.2", "");
    assert!(RunConfig::parse(&missing).unwrap_err().to_string().contains("r_a"));
    let both = MANUFACTURED.replace("r_a_factor = 1.2", "r_a_factor = 1.2\nr_a = 1.3");
    assert!(RunConfig::parse(&both).is_err());
    let unknown = MANUFACTURED.replace("n = 2", "n = 2\nbogus = 1");
    assert!(RunConfig::parse(&unknown).unwrap_err().to_string().contains("bogus"));
    let duplicate = MANUFACTURED.replace("k = 2", "k = 2\nk = 3");
    assert!(RunConfig::parse(&duplicate).is_err());
    let bad_number = MANUFACTURED.replace("k = 2", "k = two");
    assert!(RunConfig::parse(&bad_number).is_err());
    assert!(Ini::parse("[wave\nk = 1").is_err());
}

#[test]
fn configuration_defaults() {
    let cfg = RunConfig::parse(MANUFACTURED).unwrap();
    assert!((cfg.r_a - 1.2).abs() < 1e-15);
    assert_eq!(cfg.levels, vec![1, 2]);
    assert_eq!(cfg.continuity, 1);
    assert_eq!(cfg.formulation, Formulation::Bgu);
    assert_eq!(cfg.k_list, vec![2.0]);
    let d = cfg.incident_direction();
    assert!((d[2] - 1.0).abs() < 1e-15 && d[0].abs() < 1e-15 && d[1].abs() < 1e-15);
    let ts = cfg.ts_direction();
    assert!((0..3).all(|i| (ts[i] + d[i]).abs() < 1e-15));
    let grid = AngleGrid { alpha_start: 30.0, alpha_end: 90.0, count: 1, beta: 0.0 };
    assert_eq!(grid.alphas_deg(), vec![30.0]);
    let grid = AngleGrid { count: 4, ..grid };
    assert_eq!(grid.alphas_deg(), vec![30.0, 50.0, 70.0, 90.0]);
}

#[test]
fn verification_suite_passes() {
    let checks = cmd_verify(DEFAULT_SEED);
    assert!(checks.len() >= 20);
    for c in &checks {
        assert!(c.passed, "{}", c.line());
    }
}

#[test]
fn corrupted_radial_coefficients_fail_by_name() {
    let mut ie = IeContext::new(Formulation::Bgu, 4, RadialBasis::Chebyshev, 1.0, 2.0, 0.0, None).unwrap();
    assert!(check_radial_coefficients(&ie).passed);
    ie.d[2][1] += 1e-6;
    let r = check_radial_coefficients(&ie);
    assert!(!r.passed);
    assert_eq!(r.name, "radial_delta_chebyshev_4");
    assert!(r.line().starts_with("FAIL radial_delta_chebyshev_4"));
}

#[test]
fn deterministic_csv_is_byte_identical() {
    let cfg = RunConfig::parse(MANUFACTURED).unwrap();
    let a = execute(Command::Converge, Some(&cfg), true).unwrap();
    let b = execute(Command::Converge, Some(&cfg), true).unwrap();
    assert_eq!(a.csv, b.csv);
    let lines: Vec<&str> = a.csv.lines().collect();
    assert_eq!(lines[0], "mesh,n_el,n_dof,h_max,energy_rel_err,h1_rel_err,t_sys,t_sol,slope");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].ends_with(",0.0000000000000000e0,0.0000000000000000e0,"));
    let slope: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
    assert!(slope > 0.0);
}

#[test]
fn single_wave_number_sweep_matches_direct_solve() {
    let cfg = RunConfig::parse(RIGID).unwrap();
    let rows = cmd_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    let case = solve_case(&cfg, 1, 1.5).unwrap();
    let dir = cfg.ts_direction();
    let p0 = kirchhoff_far(&case.traces().unwrap(), 1.5, dir).unwrap();
    assert_eq!(rows[0].ts_numeric, target_strength(p0, cfg.p_inc));
    assert_eq!(rows[0].k_r0, 1.5);
}

#[test]
fn axisymmetric_pattern_is_invariant_under_quarter_turns() {
    let cfg = RunConfig::parse(RIGID).unwrap();
    let rows = cmd_farfield(&cfg).unwrap();
    assert_eq!(rows.iter().map(|r| r.alpha_deg).collect::<Vec<_>>(), vec![0.0, 90.0, 180.0, 270.0]);
    for r in &rows {
        assert!((r.abs_p0 - rows[0].abs_p0).abs() < 1e-10 * rows[0].abs_p0);
        assert!((r.ts_analytic - rows[0].ts_analytic).abs() < 1e-10);
        assert!(r.rel_err < 0.1);
    }
    let single = RunConfig::parse(&RIGID.replace("count = 4", "count = 1")).unwrap();
    let one = cmd_farfield(&single).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0], rows[0]);
    let d = direction_from_angles(0.0, 0.0);
    assert_eq!(d, [1.0, 0.0, 0.0]);
}

#[test]
fn check_flag_sets_the_exit_code() {
    let cfg = scratch("strict.ini");
    std::fs::write(&cfg, format!("{MANUFACTURED}\n[check]\nenergy_max = 1e-12\n")).unwrap();
    let out = scratch("strict.csv");
    let status = binary()
        .args(["converge", "--deterministic", "--check", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("mesh,"));
    let status = binary().args(["converge", "--deterministic", "--config"]).arg(&cfg).arg("--output").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn binary_reports_configuration_errors() {
    let cfg = scratch("broken.ini");
    std::fs::write(&cfg, "[geometry]\nr0 = 1\n").unwrap();
    let out = binary().args(["converge", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = binary().args(["sweep"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_verify_writes_csv() {
    let out = binary().args(["verify", "--check", "--deterministic"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,value,tolerance,passed\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
