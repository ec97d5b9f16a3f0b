use std::path::Path;
use std::process::{Command, Output};

fn curlfem(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_curlfem"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("CURLFEM_THREADS", t),
        None => cmd.env_remove("CURLFEM_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn csv_is_identical_across_thread_counts() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (dir, threads) in dirs.iter().zip(["1", "3"]) {
        let out = curlfem(
            &[
                "--study",
                "ball-convergence",
                "--k",
                "2",
                "--geo-order",
                "2",
                "--levels",
                "2",
                "--first-level",
                "0",
                "--pullback",
                "--out",
                dir.path().to_str().unwrap(),
            ],
            Some(threads),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let name = "ball-convergence_k2_order2.csv";
    assert_eq!(read(dirs[0].path(), name), read(dirs[1].path(), name));
    let json: serde_json::Value = serde_json::from_str(&read(dirs[0].path(), "ball-convergence_k2_order2.json")).unwrap();
    assert_eq!(json["config"]["k"], 2);
    assert_eq!(json["timings"].as_array().unwrap().len(), 2);
    assert!(json["slopes"]["hcurl_error"].as_f64().unwrap() > 0.0);
    assert!(read(dirs[0].path(), "ball-convergence_k2_order2.svg").contains("<svg"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.json");
    std::fs::write(
        &config,
        r#"{"study": "interpolation-rates", "k": 2, "geo_order": 1, "levels": 5, "first_level": 0}"#,
    )
    .unwrap();
    let out = curlfem(&["--config", config.to_str().unwrap(), "--levels", "2", "--k", "1"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("0,"));
    assert!(stdout.contains("eoc hcurl_error"));
}

#[test]
fn degraded_pairing_warns_but_succeeds() {
    let out = curlfem(
        &["--study", "interpolation-rates", "--k", "2", "--geo-order", "1", "--levels", "2", "--first-level", "0"],
        None,
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: k = 2 exceeds the geometric order 1"));
}

#[test]
fn failures_exit_nonzero() {
    let out = curlfem(&["--k", "3"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Nedelec degree 3"));
    let out = curlfem(&["--gmsh-pattern", "/nonexistent/ball_{level}.msh"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("level 1"));
    let out = curlfem(&["--solver", "cholesky"], None);
    assert!(!out.status.success());
    let out = curlfem(&["--levels", "2"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gmsh_meshes_reproduce_the_builtin_study() {
    let dir = tempfile::tempdir().unwrap();
    for level in 0..2 {
        let mesh = curlfem::mesh::generate_ball_mesh(level, 2).unwrap();
        curlfem::mesh::write_gmsh(&mesh, dir.path().join(format!("ball_{level}.msh"))).unwrap();
    }
    let pattern = dir.path().join("ball_{level}.msh");
    let common = ["--k", "1", "--geo-order", "2", "--levels", "2", "--first-level", "0"];
    let builtin = curlfem(&common, None);
    assert!(builtin.status.success());
    let mut args = common.to_vec();
    args.extend(["--gmsh-pattern", pattern.to_str().unwrap()]);
    let gmsh = curlfem(&args, None);
    assert!(gmsh.status.success(), "{}", String::from_utf8_lossy(&gmsh.stderr));
    let csv = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .take(3)
            .map(|l| l.split(',').skip(1).map(|v| v.parse::<f64>().unwrap_or(0.0)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    for (a, b) in csv(&builtin).iter().zip(csv(&gmsh)).skip(1) {
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}
