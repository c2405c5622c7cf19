use std::path::Path;
use std::process::{Command, Output};

fn omnitrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omnitrack"))
        .args(args)
        .env_remove("OMNITRACK_RASTER")
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn omnitrack")
}

fn ok(args: &[&str]) -> Output {
    let out = omnitrack(args);
    assert!(
        out.status.success(),
        "omnitrack {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, kind: &str, frames: &str) {
    ok(&[
        "synth",
        "--kind",
        kind,
        "--frames",
        frames,
        "--height",
        "240",
        "--seed",
        "1",
        "--out",
        s(dir),
    ]);
}

#[test]
fn help_lists_subcommands_and_flags() {
    let out = ok(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["convert", "unwarp", "track", "eval", "synth"] {
        assert!(text.contains(sub), "missing {sub} in help");
    }
    let out = ok(&["eval", "--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--results", "--masks", "--raster", "--contour-tol", "--angle", "--jobs"] {
        assert!(text.contains(flag), "missing {flag} in eval help");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(omnitrack(&["eval", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(
        omnitrack(&["synth", "--kind", "spiral", "--out", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = omnitrack(&["convert", s(&dir.path().join("missing"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn synth_convert_eval_self_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq");
    synth(&seq, "border_cross", "6");
    ok(&["convert", s(&seq)]);
    let report = dir.path().join("report.json");
    let out = ok(&[
        "eval",
        s(&seq),
        "--results",
        s(&seq),
        "--raster",
        "360x180",
        "--out",
        s(&report),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("S_dual 1.0000"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    for key in ["S_dual_auc", "P_dual_20", "Pnorm_dual_auc", "P_angle_3", "S_sphere_auc"] {
        assert_eq!(json["aggregate"][key], 1.0, "{key}");
    }
    assert_eq!(json["per_sequence"]["seq"]["attributes"]["CB"], true);
    assert!(dir.path().join("curves.csv").is_file());
}

#[test]
fn track_then_eval_with_masks() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("cap");
    synth(&seq, "great_circle", "20");
    let res = dir.path().join("res");
    ok(&[
        "track",
        s(&seq),
        "--tracker",
        "oracle",
        "--local-size",
        "128",
        "--out",
        s(&res),
    ]);
    assert!(res.join("cap/bfov.txt").is_file());
    let report = dir.path().join("r.json");
    ok(&[
        "eval",
        s(&seq),
        "--results",
        s(&res),
        "--masks",
        "--raster",
        "360x180",
        "--out",
        s(&report),
    ]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json["aggregate"]["J"].as_f64().unwrap() > 0.95);
    assert!(json["aggregate"]["S_sphere_auc"].as_f64().unwrap() > 0.9);
}

#[test]
fn unwarp_reports_surface_branch() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq");
    synth(&seq, "static", "1");
    let frame = seq.join("frames/000000.png");
    let wide = dir.path().join("wide.png");
    let out = ok(&[
        "unwarp",
        s(&frame),
        "--bfov",
        "0,0,120,60,0",
        "--size",
        "64",
        "--out",
        s(&wide),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("surface branch: spherical"));
    assert!(wide.is_file());
    let out = ok(&[
        "unwarp",
        s(&frame),
        "--bfov",
        "-10,5,40,30,0",
        "--size",
        "64",
        "--out",
        s(&wide),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("surface branch: tangent"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        synth(d, "pole_cross", "4");
        ok(&[
            "track",
            s(d),
            "--tracker",
            "ncc",
            "--local-size",
            "128",
            "--out",
            s(&d.join("res")),
        ]);
    }
    for rel in [
        "frames/000003.png",
        "mask/000003.png",
        "bfov.txt",
        "rbbox.txt",
        "res/a/bfov.txt",
    ] {
        let rel_b = rel.replace("res/a", "res/b");
        let x = std::fs::read(a.join(rel)).unwrap();
        let y = std::fs::read(b.join(rel_b)).unwrap();
        assert_eq!(x, y, "{rel} differs");
    }
}
