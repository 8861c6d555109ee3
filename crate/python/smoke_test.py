"""Smoke test for the tendon_arm Python bindings.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/tendon_arm-*.whl
"""
import math
import pathlib
import tempfile

import tendon_arm as ta

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"


def close(a, b, tol):
    return abs(a - b) <= tol * abs(b)


def main():
    ica = ta.Actuator.from_config(str(CONFIGS / "ica.cfg"), strict=True)
    eca = ta.Actuator.compression_spring(10.44, 60.0, 28.5, 252.9, 250.0, 110.0)
    assert close(ica.limit_displacement, 34.8, 0.02), ica
    assert close(eca.limit_displacement, 28.5, 0.02), eca
    f = eca.force_from_displacement(12.0)
    assert close(eca.displacement_from_force(f), 12.0, 1e-9)
    try:
        ta.Actuator.torsion_spring(508.0, 5.0, 1.2, 30.0, 34.8, 112.4, 125.0, 220.0)
    except ValueError as e:
        assert "mu_p" in str(e)
    else:
        raise AssertionError("mu_p = 1.2 accepted")

    joint = ta.Joint.from_config(str(CONFIGS / "eca_pair.cfg"))
    k_min, k_max, span = joint.stiffness_range()
    assert close(k_min, 1.82, 0.05), k_min
    assert joint.classify_stage(0.5, 0.087) == 1
    assert joint.classify_stage(40.0, 0.087) == 5
    assert close(ta.Joint(ica, 10.0, 0.1, 1e-3).absolute_max_torque(), 1124.0, 1e-9)

    chain = ta.Chain()
    p = chain.forward_kinematics(ta.Chain.full_extension())
    assert abs(math.sqrt(sum(x * x for x in p)) - chain.reach) < 1e-9
    assert chain.sample_workspace(200, 42) == chain.sample_workspace(200, 42)

    lift = ta.LiftScenario(3.0, 1.2, 0.13, 0.28, 0.0367, [eca, eca])
    trace = lift.simulate()
    assert trace["peak_power"] <= lift.power_bound() + 1e-9
    assert trace["time_to_target"] is not None

    assert len(ta.list_experiments()) == 8
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "fd.csv"
        summary = ta.run_experiment(str(CONFIGS / "experiments" / "force_displacement.toml"), out=str(out))
        assert summary["experiment"] == "force_displacement"
        assert out.read_text().splitlines()[1].startswith("d_mm,")
    print("python smoke test ok")


if __name__ == "__main__":
    main()
