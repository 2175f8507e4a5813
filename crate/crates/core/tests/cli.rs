use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nullfront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullfront")).args(args).output().expect("binary runs")
}

fn report(dir: &Path, name: &str, extra: &[&str]) -> Value {
    let path = dir.join(format!("{name}.json"));
    let mut args = vec!["run", "--example", name, "--report", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = nullfront(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ellipse_and_limacon_counts() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(dir.path(), "ellipse", &[]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["non_cuspidal_count"], 4);
    assert_eq!(r["counts"]["cuspidal_arcs"], 4);
    assert_eq!(r["completeness"]["verdict"], "complete");
    let r = report(dir.path(), "limacon", &[]);
    assert_eq!(r["non_cuspidal_count"], 2);
    assert_eq!(r["embedded"], false);
}

#[test]
fn lightcone_reconstruction_flags_double_cover() {
    let out = nullfront(&["run", "--example", "lightcone", "--mode", "reconstruct"]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["reconstruction"]["double_cover"], true);
    assert_eq!(r["reconstruction"]["lift_embedded"], false);
    assert_eq!(r["reconstruction"]["max_null_violation"], 0.0);
}

#[test]
fn glue_mode_reports_atlas() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(dir.path(), "ellipse", &["--mode", "glue", "--grid", "128,16"]);
    let g = &r["gluing"];
    assert_eq!(g["patch_count"], 3);
    assert_eq!(g["class_count"], 128);
    assert_eq!(g["closed"], true);
    assert_eq!(g["admissibility"], "admissible");
    let r = report(dir.path(), "spiral", &["--mode", "glue"]);
    assert_eq!(r["gluing"]["hausdorff"], false);
    assert_eq!(r["gluing"]["admissibility"], "inadmissible");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nullfront(&["run", "--example", "nope"]).status.code(), Some(3));
    let mesh = dir.path().join("m.obj");
    let out = nullfront(&["run", "--example", "circle", "--t-window", "2,0", "--mesh", mesh.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!mesh.exists(), "nothing may be written for an empty window");
    let bad = dir.path().join("missing").join("r.json");
    assert_eq!(nullfront(&["run", "--example", "circle", "--report", bad.to_str().unwrap()]).status.code(), Some(5));
    assert_eq!(nullfront(&["run", "--frobnicate"]).status.code(), Some(2));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[front]\ngrid = 4\n[generator]\nname = \"ellipse\"\n").unwrap();
    assert_eq!(nullfront(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = dir.path().join("job.toml");
    std::fs::write(
        &cfg,
        format!(
            "[generator]\nname = \"ellipse\"\nsemi_axes = [3.0, 1.0]\n[front]\nsigma = \"-\"\nt_window = [-5.0, 1.0]\ngrid = 256\nt_count = 16\n[output]\nreport = {:?}\n",
            out_path.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = nullfront(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(r["generator"]["sigma"], "-");
    assert_eq!(r["generator"]["nodes"], 256);
    assert_eq!(r["non_cuspidal_count"], 4);
}

#[test]
fn artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let p = |f: &str| dir.path().join(format!("{tag}-{f}")).to_str().unwrap().to_string();
        let (mesh, locus, rep, slices) = (p("m.obj"), p("l.csv"), p("r.json"), p("s.csv"));
        let out = nullfront(&[
            "run", "--example", "ellipse", "--mode", "reconstruct", "--seed", "7", "--grid", "64,16", "--mesh", &mesh,
            "--locus", &locus, "--report", &rep, "--slices", &slices,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        [mesh, locus, rep, slices].map(|f| std::fs::read(f).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let mesh = String::from_utf8(a[0].clone()).unwrap();
    assert!(!mesh.contains('\r'));
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 64 * 16);
    assert_eq!(mesh.lines().filter(|l| l.starts_with("f ")).count(), 64 * 15);
    let v: Vec<&str> = mesh.lines().find(|l| l.starts_with("v ")).unwrap().split(' ').collect();
    // 17 significant digits: d.dddddddddddddddde+x
    assert!(v[1..].iter().all(|x| x.split('e').next().unwrap().trim_start_matches('-').len() == 18));
}

#[test]
fn raw_axes_reorder_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.obj"), dir.path().join("b.obj"));
    let base = ["run", "--example", "circle", "--grid", "16,16", "--mode", "generate"];
    let mut args = base.to_vec();
    args.extend(["--mesh", a.to_str().unwrap()]);
    assert!(nullfront(&args).status.success());
    let mut args = base.to_vec();
    args.extend(["--mesh", b.to_str().unwrap(), "--raw-axes"]);
    assert!(nullfront(&args).status.success());
    let first = |p: &Path| -> Vec<String> {
        let text = std::fs::read_to_string(p).unwrap();
        text.lines().find(|l| l.starts_with("v ")).unwrap().split(' ').skip(1).map(String::from).collect()
    };
    let (xa, xb) = (first(&a), first(&b));
    assert_eq!(xa, vec![xb[1].clone(), xb[2].clone(), xb[0].clone()]);
}
