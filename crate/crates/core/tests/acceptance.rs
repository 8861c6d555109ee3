//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so the
//! report is printed even when cargo captures test output.

mod common;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{bisect, LinearOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tendon_arm::config::{self, ParseOptions};
use tendon_arm::dynamics::{mechanical_power, saturated_joint_speed};
use tendon_arm::elastic::{ActuatorModel, ElasticElementSpec, ForceTable};
use tendon_arm::experiment::{check_csv_schema, run_experiment, summary_path_for, RunOptions};
use tendon_arm::joint::{AntagonisticJointConfig, RangeUpperBound};
use tendon_arm::kinematics::{full_extension, RomMode};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn opts() -> ParseOptions {
    ParseOptions { strict: true }
}

fn actuator(name: &str) -> ActuatorModel {
    config::load_actuator(configs_dir().join(name), opts()).unwrap()
}

fn joint(name: &str) -> (AntagonisticJointConfig, f64) {
    let s = config::load_joint(configs_dir().join(name), opts()).unwrap();
    (s.joint, s.delta)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Locates the slope change of a sampled curve as the point where the
/// left and right finite-difference slopes differ most.
fn breakpoint(a: &ActuatorModel, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let h = (hi - lo) / n as f64;
    let f = |d: f64| a.force_from_displacement(d).unwrap();
    let mut best = (lo, 0.0);
    for i in 1..n {
        let d = lo + i as f64 * h;
        let jump = ((f(d + h) - f(d)) - (f(d) - f(d - h))).abs();
        if jump > best.1 {
            best = (d, jump);
        }
    }
    // Refine: the two linear pieces intersect at the kink.
    let (d0, k1) = (best.0 - 3.0 * h, (f(best.0 - 3.0 * h) - f(best.0 - 4.0 * h)) / h);
    let (d1, k2) = (best.0 + 3.0 * h, (f(best.0 + 4.0 * h) - f(best.0 + 3.0 * h)) / h);
    let x = (f(d1) - f(d0) + k1 * d0 - k2 * d1) / (k1 - k2);
    (x, f(x))
}

fn c1_force_displacement() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (file, d_ref, f_ref) in [("ica.cfg", 34.8, 112.4), ("eca.cfg", 28.5, 252.9)] {
        let a = actuator(file);
        let (d, f) = breakpoint(&a, 0.0, 45.0, 4500);
        let (ed, ef) = (rel(d, d_ref), rel(f, f_ref));
        ok &= ed < 0.02 && ef < 0.02;
        lines.push(format!("{}: ({d:.3} mm, {f:.2} N) vs ({d_ref}, {f_ref}) err {:.2}%/{:.2}%", a.label(), ed * 100.0, ef * 100.0));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    check(ok, format!("{}; {:.0} ms", lines.join("; "), elapsed.as_secs_f64() * 1e3))
}

fn c2_stage_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for file in ["ica_pair.cfg", "eca_pair.cfg"] {
        let (j, _) = joint(file);
        let a = j.actuator();
        let k = a.effective_stiffness().unwrap();
        let (k_t, f_tm, d_m, mu, r) = (a.tendon_stiffness(), a.limit_force(), j.limit_displacement(), j.static_friction(), j.moment_arm());
        for _ in 0..1000 {
            let delta = rng.random_range(0.01..0.3);
            let dr = delta * r;
            let s1 = rng.random_range(0.0..=dr);
            let closed1 = k * dr + (1.0 + mu) * k * s1;
            let s2 = rng.random_range(dr..(d_m - dr));
            let closed2 = 2.0 * k * dr + mu * k * s2;
            let s5 = d_m + dr + rng.random_range(1e-6..40.0);
            let closed5 = 2.0 * dr * k_t + mu * (f_tm + k_t * (s5 - d_m));
            for (d_s, closed) in [(s1, closed1), (s2, closed2), (s5, closed5)] {
                worst = worst.max(rel(j.external_force(delta, d_s).unwrap(), closed));
                count += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("{count} samples over S1/S2/S5, worst relative error {worst:.2e}; {:.0} ms", elapsed.as_secs_f64() * 1e3),
    )
}

fn c3_continuity() -> Outcome {
    let mut worst: f64 = 0.0;
    for file in ["ica_pair.cfg", "eca_pair.cfg"] {
        let (j, _) = joint(file);
        let delta = 0.087;
        for b in j.stage_boundaries(delta) {
            let eps = 1e-10;
            let f = |d: f64| j.external_force(delta, d).unwrap();
            worst = worst.max((f(b + eps) - f(b - eps)).abs()).max((f(b) - f(b - eps)).abs());
        }
    }
    check(worst <= 1e-6, format!("largest jump across the 8 boundaries {worst:.2e} N"))
}

fn c4_stiffness_range() -> Outcome {
    let (ica, delta) = joint("ica_pair.cfg");
    let (eca, _) = joint("eca_pair.cfg");
    let nm = |j: &AntagonisticJointConfig, b| j.controllable_stiffness_range_with(delta, b).unwrap().in_newton_meters();
    let (i_lo, i_hi, _) = nm(&ica, RangeUpperBound::SlackFreeDrive);
    let (_, i_hi_end, _) = nm(&ica, RangeUpperBound::StageTwoEnd);
    let (e_lo, e_hi_drive, _) = nm(&eca, RangeUpperBound::SlackFreeDrive);
    let range = eca.controllable_stiffness_range(delta).unwrap();

    // Closed-form stage-two stiffness at the upper end.
    let a = eca.actuator();
    let k = a.effective_stiffness().unwrap();
    let r = eca.moment_arm();
    let closed = (2.0 * k * delta * r + eca.static_friction() * k * range.d_s_max) * r / delta;
    let ok = rel(i_lo, 0.60) <= 0.15
        && rel(i_hi, 1.15) <= 0.15
        && rel(e_lo, 1.82) <= 0.05
        && rel(range.k_max, closed) < 1e-12;
    check(
        ok,
        format!(
            "ICA ({i_lo:.3}, {i_hi:.3}) N·m/rad vs (0.60, 1.15) [K_smax at d_m-δR would be {i_hi_end:.3}]; \
             ECA K_smin {e_lo:.3} vs 1.82; ECA K_smax {:.0} N·mm/rad at d_m-δR (text value 4507), \
             {:.3} N·m/rad at d_m/2 (table value 3.12)",
            range.k_max, e_hi_drive
        ),
    )
}

fn c5_torque() -> Outcome {
    let (j, _) = joint("ica_pair.cfg");
    let abs = j.absolute_max_torque() * 1e-3;
    let mut nonincreasing = true;
    for (file, pair) in [("ica", &j), ("eca", &joint("eca_pair.cfg").0)] {
        let d_m = pair.limit_displacement();
        let grid: Vec<f64> = (0..100).map(|i| d_m * i as f64 / 99.0).collect();
        let taus: Vec<f64> = grid.iter().map(|&d| pair.max_controllable_torque(d).unwrap()).collect();
        let mono = taus.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        if !mono {
            eprintln!("  {file}: tau_tm increases somewhere on the grid");
        }
        nonincreasing &= mono;
    }
    check(
        rel(abs, 1.12) <= 0.01 && nonincreasing,
        format!("ICA R·F_tm = {abs:.4} N·m vs 1.12; tau_tm nonincreasing on 100-point grids: {nonincreasing}"),
    )
}

fn c6_acceleration_kink() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (file, expected) in [("ica_pair.cfg", 17.4), ("eca_pair.cfg", 14.25)] {
        let (j, _) = joint(file);
        let kink = 0.5 * j.limit_displacement();
        let h = 0.05;
        let a = |d: f64| j.max_allowable_acceleration(d).unwrap();
        let left = (a(kink) - a(kink - h)) / h;
        let right = (a(kink + h) - a(kink)) / h;
        let ratio = right / left;
        // The slope must be flat on each side away from the kink.
        let left_far = (a(kink - 2.0 * h) - a(kink - 3.0 * h)) / h;
        let right_far = (a(kink + 3.0 * h) - a(kink + 2.0 * h)) / h;
        let sharp = rel(left_far, left) < 1e-6 && rel(right_far, right) < 1e-6;
        ok &= ratio > 2.0 && sharp && rel(kink, expected) < 0.02;
        parts.push(format!("{}: kink at {kink:.3} mm (expected {expected}), slope ratio {ratio:.2}", j.actuator().label()));
    }
    check(ok, parts.join("; "))
}

fn random_linear(rng: &mut ChaCha8Rng) -> (ActuatorModel, LinearOracle) {
    let k_t = rng.random_range(5.0..300.0);
    let f_tm = rng.random_range(10.0..600.0);
    if rng.random_bool(0.5) {
        let r: f64 = rng.random_range(2.0..20.0);
        let k_e = rng.random_range(1.0..60.0) * 2.0 * PI * r * r;
        let mu_p = rng.random_range(0.0..0.6);
        let o = LinearOracle::torsion(k_e, r, mu_p, k_t, f_tm);
        let el = ElasticElementSpec::torsion_spring(k_e, r, mu_p, o.stop(), f_tm).unwrap();
        (ActuatorModel::new(el, k_t, f_tm, 100.0, "t").unwrap(), o)
    } else {
        let k_cs = rng.random_range(1.0..60.0);
        let o = LinearOracle::compression(k_cs, k_t, f_tm);
        let el = ElasticElementSpec::compression_spring(k_cs, o.stop(), f_tm).unwrap();
        (ActuatorModel::new(el, k_t, f_tm, 100.0, "c").unwrap(), o)
    }
}

fn c7_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut trip, mut oracle): (f64, f64) = (0.0, 0.0);
    for i in 0..1000 {
        if i % 4 == 3 {
            // Tabulated element checked against bisection of its own forward map.
            let mut pts = vec![(0.0, 0.0)];
            for _ in 0..rng.random_range(1..10) {
                let (d, f) = *pts.last().unwrap();
                pts.push((d + rng.random_range(0.1..10.0), f + rng.random_range(0.5..80.0)));
            }
            let f_max = pts.last().unwrap().1;
            let k_t = rng.random_range(5.0..200.0);
            let table = ForceTable::new(pts.clone()).unwrap();
            let a = ActuatorModel::new(ElasticElementSpec::tabulated(table), k_t, f_max, 100.0, "tab").unwrap();
            let forward = |force: f64| {
                let seg = pts.windows(2).find(|w| force <= w[1].1).unwrap();
                let ((d0, f0), (d1, f1)) = (seg[0], seg[1]);
                d0 + (force - f0) * (d1 - d0) / (f1 - f0) + force / k_t
            };
            let d = rng.random_range(0.0..forward(f_max));
            let f_lib = a.force_from_displacement(d).unwrap();
            oracle = oracle.max(rel(f_lib, bisect(forward, d, 0.0, f_max)));
            trip = trip.max(rel(a.displacement_from_force(f_lib).unwrap(), d));
            continue;
        }
        let (a, o) = random_linear(&mut rng);
        let f = rng.random_range(0.0..2.0) * o.f_tm;
        let back = a.force_from_displacement(a.displacement_from_force(f).unwrap()).unwrap();
        trip = trip.max(rel(back, f));
        let d = rng.random_range(0.0..2.0) * o.stop();
        let f_lib = a.force_from_displacement(d).unwrap();
        let f_oracle = bisect(|x| o.displacement(x), d, 0.0, o.f_tm + o.k_t * d + 1.0);
        oracle = oracle.max(rel(f_lib, f_oracle));
    }
    check(
        trip <= 1e-6 && oracle <= 1e-6,
        format!("1000 parameterizations: worst round-trip {trip:.2e}, worst vs bisection {oracle:.2e}"),
    )
}

fn c8_kinematics() -> Outcome {
    let chain = config::load_chain(configs_dir().join("arm.cfg"), opts()).unwrap();
    let total = chain.links().total();
    let reach = chain.forward_kinematics(&full_extension(), RomMode::Strict).unwrap().position.norm();
    let reach_err = (reach - total).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ortho: f64 = 0.0;
    for _ in 0..10_000 {
        let q: [f64; 7] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let t = chain.transforms(&q).iter().fold(nalgebra::Matrix4::identity(), |acc, m| acc * m);
        let r = t.fixed_view::<3, 3>(0, 0).into_owned();
        ortho = ortho.max((r.transpose() * r - nalgebra::Matrix3::identity()).abs().max());
    }

    let dir = tempfile::tempdir().unwrap();
    let spec = config::load_experiment(configs_dir().join("experiments/workspace.toml"), opts()).unwrap();
    let mut bytes = Vec::new();
    let mut max_reach = 0.0;
    for run in 0..2 {
        let out = dir.path().join(format!("ws{run}.csv"));
        let report = run_experiment(&spec, &RunOptions { out: Some(out.clone()), ..Default::default() }).unwrap();
        max_reach = report.summary["stats"]["max_reach"].as_f64().unwrap();
        bytes.push(std::fs::read(out).unwrap());
    }
    let identical = bytes[0] == bytes[1];
    let ratio = max_reach / total;
    check(
        reach_err <= 1e-9 && ortho <= 1e-12 && identical && spec.samples == Some(100_000) && (0.95..=1.0).contains(&ratio),
        format!(
            "full extension |p| - (b+c+d) = {reach_err:.1e}; orthonormality {ortho:.1e} over 1e4 poses; \
             n=1e5 seed {} identical: {identical}; max reach {ratio:.4}·(b+c+d)",
            spec.seed
        ),
    )
}

fn c9_lift() -> Outcome {
    let omega = saturated_joint_speed(110.0, 0.0367);
    let power = mechanical_power(12.0, 3.0);
    let scenario = config::load_lift(configs_dir().join("lift.cfg"), opts()).unwrap();
    let trace = scenario.simulate_lift().unwrap();
    let bound_ok = trace.peak_power <= 2.0 * 250.0 * 0.110 + 1e-9;

    let mut s = scenario.clone();
    s.dt = 5e-5;
    let halved = s.simulate_lift().unwrap();
    let conv = rel(halved.peak_power, trace.peak_power);

    let mut calm = scenario.clone();
    calm.commanded_speed = Some(60.0);
    calm.payload_mass = 1.0;
    let t = calm.simulate_lift().unwrap();
    let unsaturated = t.samples.iter().all(|x| x.tendon_forces.iter().all(|&f| f > 0.0 && f < 250.0));
    let last = t.samples.last().unwrap();
    let energy = 0.5 * calm.inertia() * last.omega.powi(2) + calm.potential_energy(last.theta)
        - calm.potential_energy(calm.theta_start);
    let balance = rel(t.work(calm.dt), energy);

    check(
        rel(omega, 3.0) <= 0.02 && rel(power, 36.0) <= 0.05 && bound_ok && conv < 0.005 && unsaturated && balance < 0.02,
        format!(
            "omega_sat {omega:.4} rad/s; P(12 N·m, 3 rad/s) = {power} W; simulated peak {:.2} W <= 55 W; \
             dt halving changes peak by {:.3}%; energy balance error {:.3}%",
            trace.peak_power,
            conv * 100.0,
            balance * 100.0
        ),
    )
}

fn c10_cli_outputs() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut specs: Vec<PathBuf> = std::fs::read_dir(configs_dir().join("experiments"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    specs.sort();
    let mut failures = Vec::new();
    for path in &specs {
        let spec = config::load_experiment(path, opts()).unwrap();
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{stem}.{run}.csv"));
            let ro = RunOptions { out: Some(out.clone()), seed: Some(spec.seed), strict: true, ..Default::default() };
            if let Err(e) = run_experiment(&spec, &ro) {
                failures.push(format!("{stem}: {e}"));
                break;
            }
            outputs.push((std::fs::read(&out).unwrap(), std::fs::read(summary_path_for(&out)).unwrap()));
        }
        if outputs.len() == 2 {
            if outputs[0] != outputs[1] {
                failures.push(format!("{stem}: outputs differ between runs"));
            }
            if let Err(e) = check_csv_schema(std::str::from_utf8(&outputs[0].0).unwrap()) {
                failures.push(format!("{stem}: {e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{} bundled specs byte-identical across runs; all CSVs pass the unit-header check", specs.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("force-displacement breakpoints", c1_force_displacement),
        ("stage closed-form equivalence", c2_stage_oracles),
        ("stage continuity", c3_continuity),
        ("controllable stiffness range", c4_stiffness_range),
        ("torque maxima", c5_torque),
        ("acceleration kink", c6_acceleration_kink),
        ("round-trip and inversion oracle", c7_round_trip),
        ("kinematics and workspace", c8_kinematics),
        ("lift arithmetic and energy", c9_lift),
        ("CLI determinism and schema", c10_cli_outputs),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
