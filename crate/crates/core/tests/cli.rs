use std::path::PathBuf;
use std::process::{Command, Output};

use casimir_shear::cli::{parse_config, parse_config_str, RunConfig, SweepParameter, SweepSpec, Spacing};
use casimir_shear::materials::{Material, Response};
use casimir_shear::quadrature::QuadSpec;
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_casimir-shear"))
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn mirror_force_matches_ideal_value() {
    let o = run(&["force", "--config", &config("mirror.json")]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.starts_with("a_m,beta,F_Pa,F_dimensionless,quad_error,imag_residual\n"));
    let f = column(&csv, "F_dimensionless");
    assert_eq!(f.len(), 1);
    assert!((f[0] - 1.0).abs() < 5e-3, "{}", f[0]);
    assert!(column(&csv, "F_Pa")[0] > 0.0);
}

#[test]
fn beta_sweep_mirror_is_flat() {
    let o = run(&["sweep", "--config", &config("sweep_beta_mirror.json")]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let beta = column(&csv, "beta");
    assert_eq!(beta.len(), 10);
    assert_eq!((beta[0], beta[9]), (0.0, 0.9));
    let f = column(&csv, "F_Pa");
    let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((hi - lo) / f[0] < 1e-6, "spread {}", (hi - lo) / f[0]);
}

#[test]
fn gap_profile_is_diagonal() {
    let cfg = r#"{"separation":1e-7,"beta":0.5,
        "plate1":{"electric":{"kind":"constant","value":2.0}},
        "plate2":{"electric":{"kind":"drude","omega_p":1.37e16,"gamma":5.32e13}},
        "profile":{"count":3}}"#;
    let o = run(&["stress-profile", "--config", cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert!(csv.starts_with("x_m,sigma_xx,sigma_yy,sigma_zz,offdiag_max\n"));
    let xx = column(&csv, "sigma_xx");
    let off = column(&csv, "offdiag_max");
    assert_eq!(xx.len(), 3);
    for (s, o) in xx.iter().zip(&off) {
        assert!(*o < 1e-10 * s.abs(), "{o} vs {s}");
    }
    // the normal stress does not depend on position in the gap
    assert!((xx[0] - xx[2]).abs() < 1e-4 * xx[0].abs());
}

#[test]
fn serial_runs_are_byte_identical() {
    let args = ["force", "--config", &config("dielectric_eps2.json"), "--serial", "--quad-rel-tol", "1e-4"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let threaded = bin()
        .args(&args[..3])
        .args(["--quad-rel-tol", "1e-4"])
        .env("CASIMIR_SHEAR_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(threaded.stdout, a.stdout);
}

#[test]
fn green_dump_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&[
        "green-dump",
        "--config",
        &config("green_dump_gold.json"),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|l| l.split(',').count() == 24));
    assert!(lines[0].starts_with("kappa,u,v,beta,x,x_p,g_xx_re,g_xx_im"));
}

#[test]
fn validation_errors_exit_2_with_pointer() {
    let o = run(&["force", "--config", r#"{"separation":1e-7,"beta":1.2,"plate1":{},"plate2":{}}"#]);
    assert_eq!(o.status.code(), Some(2));
    let csv = stdout(&o);
    assert!(csv.starts_with("error_kind,path,message\nValidationError,/beta,"), "{csv}");

    let o = run(&[
        "force",
        "--config",
        r#"{"separation":1e-7,"plate1":{"electric":{"kind":"drude","omega_p":1e16,"gamma":-1}},"plate2":{}}"#,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("ValidationError,/plate1/electric/gamma,"));

    let o = run(&["force", "--config", r#"{"separation":1e-7,"plate1":{},"plate2":{},"colour":1}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("SchemaError,/colour,"));

    let o = run(&["force", "--config", "/no/such/file.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("IoError"));

    let o = run(&["force"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["sweep", "--config", &config("mirror.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("SchemaError,/sweep,"));

    let o = bin()
        .args(["force", "--config", &config("mirror.json")])
        .env("CASIMIR_SHEAR_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["force", "--config", &config("mirror.json"), "--quad-max-level", "40"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("/quad/max_level"));
}

#[test]
fn numerical_failure_exit_3() {
    let o = run(&[
        "force",
        "--config",
        &config("gold_drude.json"),
        "--quad-rel-tol",
        "1e-13",
        "--quad-max-level",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("error_kind,path,message\nQuadratureDivergence,,"));
}

#[test]
fn overrides_apply() {
    let cli = casimir_shear::cli::Cli {
        command: casimir_shear::cli::Command::Force,
        config: Some(config("mirror.json")),
        output: None,
        quad_rel_tol: Some(1e-6),
        quad_max_level: Some(9),
        serial: true,
    };
    let c = casimir_shear::cli::load_config(&cli).unwrap().unwrap();
    assert_eq!((c.quad.rel_tol, c.quad.max_level), (1e-6, 9));
}

fn response() -> impl Strategy<Value = Response> {
    prop_oneof![
        Just(Response::Vacuum),
        (1.0..20.0f64).prop_map(|value| Response::Constant { value }),
        (1e14..1e17f64).prop_map(|omega_p| Response::Plasma { omega_p }),
        (1e14..1e17f64, 1e11..1e15f64).prop_map(|(omega_p, gamma)| Response::Drude { omega_p, gamma }),
        (1e14..1e17f64, 1e14..1e16f64, 1e11..1e15f64)
            .prop_map(|(omega_p, omega_0, gamma)| Response::Lorentz { omega_p, omega_0, gamma }),
        (1e6..1e18f64).prop_map(|surrogate| Response::PerfectMirror { surrogate }),
    ]
}

fn material() -> impl Strategy<Value = Material> {
    (response(), response()).prop_map(|(electric, magnetic)| Material { electric, magnetic })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trip(
        a in 1e-9..1e-5f64,
        beta in 0.0..0.99f64,
        p1 in material(),
        p2 in material(),
        rel_tol in 1e-10..1e-2f64,
        sweep in proptest::option::of((0.0..0.5f64, 0.5..0.99f64, 2usize..40)),
        log in any::<bool>(),
    ) {
        let cfg = RunConfig {
            separation: a,
            beta,
            plate1: p1,
            plate2: p2,
            quad: QuadSpec::with_rel_tol(rel_tol),
            sweep: sweep.map(|(start, stop, count)| SweepSpec {
                parameter: SweepParameter::Beta,
                start: start.max(1e-3),
                stop,
                count,
                spacing: if log { Spacing::Log } else { Spacing::Linear },
            }),
            profile: None,
            green_dump: None,
            output: None,
        };
        cfg.validate().unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        prop_assert_eq!(&parse_config(&text).unwrap(), &cfg);
        prop_assert_eq!(&parse_config_str(&serde_json::to_string(&cfg).unwrap()).unwrap(), &cfg);
    }
}
