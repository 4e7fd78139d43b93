use std::path::Path;
use std::process::{Command, Output};

fn wg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wg"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("wg runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn run_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wg(&["run", "--case", "1a", "--levels", "3", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let errors = read(&dir.path().join("1a_errors.csv"));
    let lines: Vec<&str> = errors.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("rate,,,,"), "{}", lines[4]);
    assert_eq!(
        lines[0],
        "level,h,cells,dofs,grad_d_e_h,e_0,e_b,grad_d_u_h_minus_grad_u,u_0_minus_u,e_0_max"
    );
    assert!(lines[1].starts_with("0,1.25000e-01,128,"), "{}", lines[1]);
    let rates = read(&dir.path().join("1a_rates.csv"));
    let lines: Vec<&str> = rates.lines().collect();
    assert_eq!(lines[0], "metric,rate,rate_0_1,rate_1_2");
    assert_eq!(lines.len(), 7);
    let grad_rate: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((grad_rate - 1.0).abs() < 0.1, "{grad_rate}");
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = wg(&[
            "run",
            "--case",
            "3a",
            "--levels",
            "3",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for f in ["3a_errors.csv", "3a_rates.csv"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
}

#[test]
fn mesh_dumps_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let o = wg(&[
        "run",
        "--case",
        "6",
        "--levels",
        "2",
        "--dump-mesh",
        "--compare",
        "paper",
        "--solver",
        "cg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("computed / published"), "{stdout}");
    for level in 0..2 {
        let dump = read(&dir.path().join(format!("6_mesh_{level}.txt")));
        let mesh = wgfem::mesh::parse_mesh_dump(&dump).unwrap();
        assert_eq!(mesh.dim(), 3);
    }
}

#[test]
fn config_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("robin.json");
    std::fs::write(
        &config,
        r#"{
            "name": "robin",
            "mesh": { "kind": "triangles", "levels": [4, 8] },
            "coefficients": { "f": "0" },
            "exact": { "u": "sin(pi*y) * exp(-x)" },
            "boundary": { "xmax": { "type": "robin", "alpha": "1" } }
        }"#,
    )
    .unwrap();
    let o = wg(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read(&dir.path().join("robin_errors.csv")).lines().count(),
        4
    );
}

#[test]
fn list_names_every_case() {
    let o = wg(&["list"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    for id in wgfem::cli::CASE_IDS {
        assert!(
            stdout.lines().any(|l| l.trim_start().starts_with(id)),
            "{id}"
        );
    }
}

#[test]
fn bad_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = dir.path().join("missing.json");
    let cases: [&[&str]; 6] = [
        &["run", "--case", "7z", "--out", out],
        &["run", "--case", "1a", "--levels", "0", "--out", out],
        &[
            "run", "--case", "1a", "--order", "1", "--levels", "1", "--out", out,
        ],
        &["run", "--case", "1a", "--tol", "2", "--out", out],
        &["run", "--case", "1a", "--kellogg-extra", "2", "--out", out],
        &["run", "--config", missing.to_str().unwrap(), "--out", out],
    ];
    for args in cases {
        let o = wg(args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("error"),
            "{args:?}"
        );
    }
    assert!(!wg(&["run"]).status.success());
}
