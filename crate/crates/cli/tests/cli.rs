use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn tendon_arm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tendon-arm"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TENDON_ARM_CONFIG_DIR")
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn lists_all_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let out = tendon_arm(&["list-experiments"], dir.path());
    assert!(out.status.success());
    let listing = text(&out.stdout);
    for name in ["force_displacement", "stiffness_range", "workspace", "lift", "torque_surface"] {
        assert!(listing.contains(name), "{listing}");
    }
    assert_eq!(listing.lines().count(), 8);
}

#[test]
fn validates_bundled_configs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ica.cfg", "eca.cfg", "misa_like.cfg", "ica_pair.cfg", "eca_pair.cfg", "arm.cfg", "lift.cfg"] {
        let path = configs().join(name);
        let out = tendon_arm(&["--strict", "validate", path.to_str().unwrap()], dir.path());
        assert!(out.status.success(), "{name}: {}", text(&out.stderr));
    }
    let ica = tendon_arm(&["validate", configs().join("ica.cfg").to_str().unwrap()], dir.path());
    assert!(text(&ica.stdout).contains("actuator ICA"));
}

#[test]
fn invalid_config_fails_with_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(
        &bad,
        "[actuator]\nk_t = 30.0\nrated_force = 125.0\nrated_speed = 220.0\n\n[element]\n\
         kind = \"torsion_spring_internal\"\nk_e = 508.0\npulley_radius = 5.0\nmu_p = 1.2\nd_max = 34.8\nf_tm = 112.4\n",
    )
    .unwrap();
    let out = tendon_arm(&["validate", bad.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let err = text(&out.stderr);
    assert!(err.contains("mu_p") && err.contains(":10:"), "{err}");
}

#[test]
fn strict_mode_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eca.cfg");
    let body = std::fs::read_to_string(configs().join("eca.cfg")).unwrap() + "colour = \"red\"\n";
    std::fs::write(&cfg, body).unwrap();
    let lenient = tendon_arm(&["validate", cfg.to_str().unwrap()], dir.path());
    assert!(lenient.status.success());
    let strict = tendon_arm(&["--strict", "validate", cfg.to_str().unwrap()], dir.path());
    assert!(!strict.status.success());
    assert!(text(&strict.stderr).contains("colour"));
}

#[test]
fn config_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let joint = dir.path().join("joint.cfg");
    std::fs::write(
        &joint,
        "[joint]\nactuator_1 = \"eca.cfg\"\nactuator_2 = \"eca.cfg\"\nmoment_arm = 10.0\nmu_s = 0.1\ninertia = 0.001\n",
    )
    .unwrap();
    let missing = tendon_arm(&["validate", joint.to_str().unwrap()], dir.path());
    assert!(!missing.status.success());
    let found = Command::new(env!("CARGO_BIN_EXE_tendon-arm"))
        .args(["validate", joint.to_str().unwrap()])
        .env("TENDON_ARM_CONFIG_DIR", configs())
        .output()
        .unwrap();
    assert!(found.status.success(), "{}", text(&found.stderr));
}

#[test]
fn run_is_deterministic_and_honours_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = configs().join("experiments/workspace.toml");
    let spec = spec.to_str().unwrap();
    let run = |out: &str, seed: &str| {
        let o = tendon_arm(&["run", spec, "--out", out, "--seed", seed], dir.path());
        assert!(o.status.success(), "{}", text(&o.stderr));
        (std::fs::read(dir.path().join(out)).unwrap(), o.stdout)
    };
    let (a, summary_a) = run("a.csv", "7");
    let (b, summary_b) = run("b.csv", "7");
    let (c, _) = run("c.csv", "8");
    assert_eq!(a, b);
    assert_eq!(summary_a, summary_b);
    assert_ne!(a, c);
    assert!(dir.path().join("a.summary.json").exists());

    let j = tendon_arm(&["run", spec, "--out", "w.json", "--format", "json"], dir.path());
    assert!(j.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(doc["columns"][0], "x_m");
}

#[test]
fn failing_sweep_point_exits_nonzero_with_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("too_far.toml");
    std::fs::write(
        &spec,
        format!(
            "[experiment]\nkind = \"max_torque_vs_pretension\"\nconfigs = [\"{}\"]\n\n[sweep.d_s]\nstart = 0.0\nstop = 40.0\nstep = 1.0\n",
            configs().join("eca_pair.cfg").display()
        ),
    )
    .unwrap();
    let out = tendon_arm(&["run", spec.to_str().unwrap(), "--out", "t.csv"], dir.path());
    assert!(!out.status.success());
    let err = text(&out.stderr);
    assert!(err.contains("d_s=29"), "{err}");
}

#[test]
fn unknown_experiment_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("x.toml");
    std::fs::write(&spec, "[experiment]\nkind = \"door_opening\"\n").unwrap();
    let out = tendon_arm(&["validate", spec.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("door_opening"));
}
