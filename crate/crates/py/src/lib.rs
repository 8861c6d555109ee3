//! Python bindings. Model objects are immutable wrappers around the core types;
//! errors surface as `ValueError` with the core message.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tendon_arm::config::{self, ParseOptions};
use tendon_arm::dynamics::{LiftScenario, TraceSample};
use tendon_arm::elastic::{ActuatorModel, ElasticElementSpec, ForceTable};
use tendon_arm::experiment::{self, OutputFormat, RunOptions};
use tendon_arm::joint::{AntagonisticJointConfig, RangeUpperBound, DEFAULT_DELTA};
use tendon_arm::kinematics::{full_extension, KinematicChain, LinkLengths, RomMode};

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn opts(strict: bool) -> ParseOptions {
    ParseOptions { strict }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

#[pyclass(name = "Actuator", module = "tendon_arm", frozen, from_py_object)]
#[derive(Clone)]
struct PyActuator {
    inner: ActuatorModel,
}

#[pymethods]
impl PyActuator {
    /// Compression spring in series with the tendon.
    #[staticmethod]
    #[pyo3(signature = (k_cs, k_t, d_max, f_tm, rated_force, rated_speed, label = "ECA"))]
    fn compression_spring(
        k_cs: f64,
        k_t: f64,
        d_max: f64,
        f_tm: f64,
        rated_force: f64,
        rated_speed: f64,
        label: &str,
    ) -> PyResult<Self> {
        let el = ElasticElementSpec::compression_spring(k_cs, d_max, f_tm).map_err(err)?;
        let inner = ActuatorModel::new(el, k_t, rated_force, rated_speed, label).map_err(err)?;
        Ok(Self { inner })
    }

    /// Torsion spring of rate `k_e` (N·mm/rad) behind a pulley of radius `pulley_radius` (mm).
    #[staticmethod]
    #[pyo3(signature = (k_e, pulley_radius, mu_p, k_t, d_max, f_tm, rated_force, rated_speed, label = "ICA"))]
    #[allow(clippy::too_many_arguments)]
    fn torsion_spring(
        k_e: f64,
        pulley_radius: f64,
        mu_p: f64,
        k_t: f64,
        d_max: f64,
        f_tm: f64,
        rated_force: f64,
        rated_speed: f64,
        label: &str,
    ) -> PyResult<Self> {
        let el = ElasticElementSpec::torsion_spring(k_e, pulley_radius, mu_p, d_max, f_tm).map_err(err)?;
        let inner = ActuatorModel::new(el, k_t, rated_force, rated_speed, label).map_err(err)?;
        Ok(Self { inner })
    }

    /// Element given as (deflection mm, force N) points starting at (0, 0).
    #[staticmethod]
    #[pyo3(signature = (points, k_t, rated_force, rated_speed, label = "tabulated"))]
    fn tabulated(points: Vec<(f64, f64)>, k_t: f64, rated_force: f64, rated_speed: f64, label: &str) -> PyResult<Self> {
        let table = ForceTable::new(points).map_err(err)?;
        let inner =
            ActuatorModel::new(ElasticElementSpec::tabulated(table), k_t, rated_force, rated_speed, label).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, strict = false))]
    fn from_config(path: PathBuf, strict: bool) -> PyResult<Self> {
        Ok(Self { inner: config::load_actuator(path, opts(strict)).map_err(err)? })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_owned()
    }

    #[getter]
    fn limit_force(&self) -> f64 {
        self.inner.limit_force()
    }

    #[getter]
    fn limit_displacement(&self) -> f64 {
        self.inner.limit_displacement()
    }

    #[getter]
    fn tendon_stiffness(&self) -> f64 {
        self.inner.tendon_stiffness()
    }

    #[getter]
    fn rated_force(&self) -> f64 {
        self.inner.rated_force()
    }

    #[getter]
    fn rated_speed(&self) -> f64 {
        self.inner.rated_speed()
    }

    fn force_from_displacement(&self, d: f64) -> PyResult<f64> {
        self.inner.force_from_displacement(d).map_err(err)
    }

    fn displacement_from_force(&self, force: f64) -> PyResult<f64> {
        self.inner.displacement_from_force(force).map_err(err)
    }

    fn force_curve(&self, displacements: Vec<f64>) -> PyResult<Vec<f64>> {
        displacements.iter().map(|&d| self.inner.force_from_displacement(d).map_err(err)).collect()
    }

    fn effective_stiffness(&self) -> PyResult<f64> {
        self.inner.effective_stiffness().map_err(err)
    }

    fn effective_stiffness_at(&self, d: f64) -> PyResult<f64> {
        self.inner.effective_stiffness_at(d).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Actuator(label={:?}, d_m={:.4}, F_tm={}, k_t={})",
            self.inner.label(),
            self.inner.limit_displacement(),
            self.inner.limit_force(),
            self.inner.tendon_stiffness()
        )
    }
}

#[pyclass(name = "Joint", module = "tendon_arm", frozen)]
struct PyJoint {
    inner: AntagonisticJointConfig,
    #[pyo3(get)]
    delta: f64,
}

#[pymethods]
impl PyJoint {
    #[new]
    #[pyo3(signature = (actuator, moment_arm, mu_s, inertia, delta = DEFAULT_DELTA))]
    fn new(actuator: &PyActuator, moment_arm: f64, mu_s: f64, inertia: f64, delta: f64) -> PyResult<Self> {
        let inner = AntagonisticJointConfig::symmetric(actuator.inner.clone(), moment_arm, mu_s, inertia).map_err(err)?;
        Ok(Self { inner, delta })
    }

    #[staticmethod]
    #[pyo3(signature = (path, strict = false))]
    fn from_config(path: PathBuf, strict: bool) -> PyResult<Self> {
        let s = config::load_joint(path, opts(strict)).map_err(err)?;
        Ok(Self { inner: s.joint, delta: s.delta })
    }

    #[getter]
    fn actuator(&self) -> PyActuator {
        PyActuator { inner: self.inner.actuator().clone() }
    }

    #[getter]
    fn moment_arm(&self) -> f64 {
        self.inner.moment_arm()
    }

    #[getter]
    fn limit_displacement(&self) -> f64 {
        self.inner.limit_displacement()
    }

    fn stage_boundaries(&self, delta: f64) -> [f64; 4] {
        self.inner.stage_boundaries(delta)
    }

    /// Stage number 1-5.
    fn classify_stage(&self, d_s: f64, delta: f64) -> PyResult<u8> {
        Ok(self.inner.classify_stage(d_s, delta).map_err(err)?.number())
    }

    fn pretension_force(&self, d_s: f64) -> PyResult<f64> {
        self.inner.pretension_force(d_s).map_err(err)
    }

    fn external_force(&self, delta: f64, d_s: f64) -> PyResult<f64> {
        self.inner.external_force(delta, d_s).map_err(err)
    }

    fn joint_stiffness(&self, delta: f64, d_s: f64) -> PyResult<f64> {
        self.inner.joint_stiffness(delta, d_s).map_err(err)
    }

    /// `(K_smin, K_smax, span)` in N·m/rad. `upper` is "stage_two_end" or "slack_free_drive".
    #[pyo3(signature = (delta = None, upper = "stage_two_end"))]
    fn stiffness_range(&self, delta: Option<f64>, upper: &str) -> PyResult<(f64, f64, f64)> {
        let bound = match upper {
            "stage_two_end" => RangeUpperBound::StageTwoEnd,
            "slack_free_drive" => RangeUpperBound::SlackFreeDrive,
            other => return Err(err(format!("unknown upper bound `{other}`"))),
        };
        let r = self
            .inner
            .controllable_stiffness_range_with(delta.unwrap_or(self.delta), bound)
            .map_err(err)?;
        Ok(r.in_newton_meters())
    }

    fn max_allowable_acceleration(&self, d_s: f64) -> PyResult<f64> {
        self.inner.max_allowable_acceleration(d_s).map_err(err)
    }

    fn joint_torque(&self, d_s: f64, d_t: f64) -> PyResult<f64> {
        self.inner.joint_torque(d_s, d_t).map_err(err)
    }

    fn max_controllable_torque(&self, d_s: f64) -> PyResult<f64> {
        self.inner.max_controllable_torque(d_s).map_err(err)
    }

    fn absolute_max_torque(&self) -> f64 {
        self.inner.absolute_max_torque()
    }
}

#[pyclass(name = "Chain", module = "tendon_arm", frozen)]
struct PyChain {
    inner: KinematicChain,
}

#[pymethods]
impl PyChain {
    #[new]
    #[pyo3(signature = (b = 0.30, c = 0.25, d = 0.08))]
    fn new(b: f64, c: f64, d: f64) -> Self {
        Self { inner: KinematicChain::arm(LinkLengths { b, c, d }) }
    }

    #[staticmethod]
    #[pyo3(signature = (path, strict = false))]
    fn from_config(path: PathBuf, strict: bool) -> PyResult<Self> {
        Ok(Self { inner: config::load_chain(path, opts(strict)).map_err(err)? })
    }

    #[getter]
    fn reach(&self) -> f64 {
        self.inner.links().total()
    }

    /// End-effector position (m) for joint values in chain order
    /// (theta_31, theta_32, theta_33, theta_21, theta_22, theta_11, theta_12).
    #[pyo3(signature = (q, clamp = false))]
    fn forward_kinematics(&self, q: [f64; 7], clamp: bool) -> PyResult<[f64; 3]> {
        let mode = if clamp { RomMode::Clamp } else { RomMode::Strict };
        let p = self.inner.forward_kinematics(&q, mode).map_err(err)?.position;
        Ok([p.x, p.y, p.z])
    }

    /// Homogeneous end-effector transform as four rows.
    #[pyo3(signature = (q, clamp = false))]
    fn transform(&self, q: [f64; 7], clamp: bool) -> PyResult<[[f64; 4]; 4]> {
        let mode = if clamp { RomMode::Clamp } else { RomMode::Strict };
        let t = self.inner.forward_kinematics(&q, mode).map_err(err)?.transform;
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| t[(i, j)])))
    }

    #[staticmethod]
    fn full_extension() -> [f64; 7] {
        full_extension()
    }

    fn sample_workspace(&self, n: usize, seed: u64) -> PyResult<Vec<[f64; 3]>> {
        Ok(self.inner.sample_workspace(n, seed).map_err(err)?.points)
    }
}

#[pyclass(name = "LiftScenario", module = "tendon_arm", frozen)]
struct PyLift {
    inner: LiftScenario,
}

#[pymethods]
impl PyLift {
    #[new]
    #[pyo3(signature = (payload_mass, limb_mass, limb_com_distance, payload_distance, joint_moment_arm, actuators))]
    fn new(
        payload_mass: f64,
        limb_mass: f64,
        limb_com_distance: f64,
        payload_distance: f64,
        joint_moment_arm: f64,
        actuators: Vec<PyRef<'_, PyActuator>>,
    ) -> PyResult<Self> {
        let inner = LiftScenario::new(
            payload_mass,
            limb_mass,
            limb_com_distance,
            payload_distance,
            joint_moment_arm,
            actuators.iter().map(|a| a.inner.clone()).collect(),
        );
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, strict = false))]
    fn from_config(path: PathBuf, strict: bool) -> PyResult<Self> {
        Ok(Self { inner: config::load_lift(path, opts(strict)).map_err(err)? })
    }

    fn power_bound(&self) -> f64 {
        self.inner.power_bound()
    }

    fn max_joint_speed(&self) -> f64 {
        self.inner.max_joint_speed()
    }

    /// Runs the lift. Returns a dict of trace columns and scalars; a timeout
    /// raises `ValueError`.
    fn simulate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let trace = self.inner.simulate_lift().map_err(err)?;
        let d = PyDict::new(py);
        let col = |f: fn(&TraceSample) -> f64| trace.samples.iter().map(f).collect::<Vec<_>>();
        d.set_item("t", col(|s| s.t))?;
        d.set_item("theta", col(|s| s.theta))?;
        d.set_item("omega", col(|s| s.omega))?;
        d.set_item("torque", col(|s| s.torque))?;
        d.set_item("gravity_torque", col(|s| s.gravity_torque))?;
        d.set_item("power", col(|s| s.power))?;
        d.set_item("peak_power", trace.peak_power)?;
        d.set_item("peak_torque", trace.peak_torque)?;
        d.set_item("time_to_target", trace.time_to_target)?;
        Ok(d)
    }
}

/// Parses any supported config file and returns its kind name.
#[pyfunction]
#[pyo3(signature = (path, strict = false))]
fn validate(path: PathBuf, strict: bool) -> PyResult<&'static str> {
    Ok(config::parse_config(path, opts(strict)).map_err(err)?.kind_name())
}

/// Runs an experiment spec; returns the summary as a dict.
#[pyfunction]
#[pyo3(signature = (spec, out = None, format = None, seed = None, strict = false))]
fn run_experiment<'py>(
    py: Python<'py>,
    spec: PathBuf,
    out: Option<PathBuf>,
    format: Option<&str>,
    seed: Option<u64>,
    strict: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = config::load_experiment(spec, opts(strict)).map_err(err)?;
    let format = match format {
        None => None,
        Some("csv") => Some(OutputFormat::Csv),
        Some("json") => Some(OutputFormat::Json),
        Some(other) => return Err(err(format!("unknown format `{other}`"))),
    };
    let report = experiment::run_experiment(&spec, &RunOptions { out, format, seed, strict }).map_err(err)?;
    json_to_py(py, &report.summary)
}

#[pyfunction]
fn list_experiments() -> Vec<(&'static str, &'static str)> {
    experiment::list_experiments()
}

#[pymodule]
#[pyo3(name = "tendon_arm")]
fn tendon_arm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyActuator>()?;
    m.add_class::<PyJoint>()?;
    m.add_class::<PyChain>()?;
    m.add_class::<PyLift>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    Ok(())
}
