//! Experiment orchestration: uniform sweeps over the model operations, written
//! out as plot-ready CSV (or JSON) plus a JSON summary.
//!
//! CSV dialect: comma separated, `\n` line endings, `.` decimal point. The first
//! line is a `#` comment naming the experiment and the operation evaluated; the
//! second line is the mandatory header, where every column name ends in a unit
//! suffix from [`UNIT_SUFFIXES`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{self, ConfigError, ParseOptions};
use crate::dynamics::DynamicsError;
use crate::joint::RangeUpperBound;

/// Unit suffixes accepted in CSV headers.
pub const UNIT_SUFFIXES: &[&str] = &[
    "mm",
    "N",
    "N_mm",
    "N_per_mm",
    "N_mm_per_rad",
    "N_m_per_rad",
    "N_m",
    "rad",
    "rad_per_s",
    "rad_per_s2",
    "mm_per_s",
    "m",
    "s",
    "W",
];

pub const DEFAULT_WORKSPACE_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ForceDisplacement,
    StiffnessVsPretension,
    MaxAcceleration,
    TorqueSurface,
    MaxTorqueVsPretension,
    StiffnessRange,
    Workspace,
    Lift,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::ForceDisplacement,
        Self::StiffnessVsPretension,
        Self::MaxAcceleration,
        Self::TorqueSurface,
        Self::MaxTorqueVsPretension,
        Self::StiffnessRange,
        Self::Workspace,
        Self::Lift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ForceDisplacement => "force_displacement",
            Self::StiffnessVsPretension => "stiffness_vs_pretension",
            Self::MaxAcceleration => "max_acceleration",
            Self::TorqueSurface => "torque_surface",
            Self::MaxTorqueVsPretension => "max_torque_vs_pretension",
            Self::StiffnessRange => "stiffness_range",
            Self::Workspace => "workspace",
            Self::Lift => "lift",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::ForceDisplacement => "tendon tension vs tendon displacement for 1-4 actuators [sweep d]",
            Self::StiffnessVsPretension => "external force and joint stiffness vs pre-tension at fixed deflection [sweep d_s]",
            Self::MaxAcceleration => "maximum slack-free joint acceleration vs pre-tension [sweep d_s]",
            Self::TorqueSurface => "restrained-joint torque over pre-tension and torque displacement [sweep d_s, d_t]",
            Self::MaxTorqueVsPretension => "maximum controllable torque vs pre-tension [sweep d_s]",
            Self::StiffnessRange => "controllable stiffness range for 1-4 joints [optional sweep delta]",
            Self::Workspace => "Monte Carlo end-effector workspace of the arm [samples, seed]",
            Self::Lift => "single-joint lift under actuator force and speed saturation",
        }
    }

    pub fn operation(self) -> &'static str {
        match self {
            Self::ForceDisplacement => "ActuatorModel::force_from_displacement",
            Self::StiffnessVsPretension => "AntagonisticJointConfig::external_force, joint_stiffness",
            Self::MaxAcceleration => "AntagonisticJointConfig::max_allowable_acceleration",
            Self::TorqueSurface => "AntagonisticJointConfig::joint_torque",
            Self::MaxTorqueVsPretension => "AntagonisticJointConfig::max_controllable_torque",
            Self::StiffnessRange => "AntagonisticJointConfig::controllable_stiffness_range_with",
            Self::Workspace => "KinematicChain::sample_workspace",
            Self::Lift => "LiftScenario::simulate_lift",
        }
    }

    pub fn config_count(self) -> RangeInclusive<usize> {
        match self {
            Self::ForceDisplacement | Self::StiffnessRange => 1..=4,
            _ => 1..=1,
        }
    }

    pub fn sweep_variables(self) -> &'static [&'static str] {
        match self {
            Self::ForceDisplacement => &["d"],
            Self::StiffnessVsPretension | Self::MaxAcceleration | Self::MaxTorqueVsPretension => &["d_s"],
            Self::TorqueSurface => &["d_s", "d_t"],
            Self::StiffnessRange | Self::Workspace | Self::Lift => &[],
        }
    }

    pub fn optional_sweeps(self) -> &'static [&'static str] {
        match self {
            Self::StiffnessRange => &["delta"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if self.step <= 0.0 {
            return Err(format!("step must be > 0, got {}", self.step));
        }
        if self.stop < self.start {
            return Err(format!("empty grid: stop {} < start {}", self.stop, self.start));
        }
        Ok(())
    }

    /// Grid points `start + i·step` up to and including `stop` (within 1e-9 steps).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Resolved model config paths.
    pub configs: Vec<PathBuf>,
    pub sweeps: BTreeMap<String, SweepGrid>,
    /// Data output; relative paths resolve against the working directory.
    pub output: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    pub samples: Option<usize>,
    pub delta: Option<f64>,
    /// Directory of the spec file.
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub strict: bool,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{experiment} failed at {coordinate}: {message}")]
    Point {
        experiment: &'static str,
        coordinate: String,
        message: String,
    },
    #[error("{experiment}: {message}")]
    Model { experiment: &'static str, message: String },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub output: PathBuf,
    pub summary_path: PathBuf,
    pub summary: Value,
    pub rows: usize,
}

/// Column-major-free numeric table with unit-suffixed column names.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn to_csv(&self, kind: ExperimentKind) -> String {
        let mut out = format!("# experiment={} operation={}\n", kind.name(), kind.operation());
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, kind: ExperimentKind) -> String {
        let doc = json!({
            "experiment": kind.name(),
            "operation": kind.operation(),
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).unwrap();
        s.push('\n');
        s
    }
}

/// Validates an emitted CSV: optional leading `#` lines, a header whose
/// columns all carry a unit suffix, and rectangular numeric rows.
pub fn check_csv_schema(text: &str) -> Result<(), String> {
    if text.contains('\r') {
        return Err("CRLF line endings".into());
    }
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    let header = lines.next().ok_or("missing header row")?;
    let columns: Vec<&str> = header.split(',').collect();
    for c in &columns {
        let ok = UNIT_SUFFIXES.iter().any(|u| c.len() > u.len() + 1 && c.ends_with(&format!("_{u}")));
        if !ok {
            return Err(format!("column `{c}` has no unit suffix"));
        }
    }
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(format!("data row {} has {} fields, header has {}", i + 1, fields.len(), columns.len()));
        }
        if let Some(bad) = fields.iter().find(|f| f.parse::<f64>().is_err()) {
            return Err(format!("data row {}: `{bad}` is not a number", i + 1));
        }
    }
    Ok(())
}

pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    ExperimentKind::ALL.iter().map(|k| (k.name(), k.description())).collect()
}

fn column_label(label: &str, index: usize) -> String {
    let clean: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if clean.is_empty() {
        format!("actuator{}", index + 1)
    } else {
        clean
    }
}

fn point_err(kind: ExperimentKind, coords: &[(&str, f64)], e: impl ToString) -> ExperimentError {
    let coordinate = coords.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
    ExperimentError::Point { experiment: kind.name(), coordinate, message: e.to_string() }
}

fn model_err(kind: ExperimentKind, e: impl ToString) -> ExperimentError {
    ExperimentError::Model { experiment: kind.name(), message: e.to_string() }
}

fn min_max(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Runs one experiment and writes its data file and `<stem>.summary.json`.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentReport, ExperimentError> {
    let parse = ParseOptions { strict: opts.strict };
    let kind = spec.kind;
    let format = opts.format.unwrap_or(spec.format);
    let seed = opts.seed.unwrap_or(spec.seed);
    let output = match (&opts.out, opts.format) {
        (Some(out), _) => out.clone(),
        (None, Some(f)) => spec.output.with_extension(f.extension()),
        (None, None) => spec.output.clone(),
    };

    let mut partial: Option<ExperimentError> = None;
    let (table, mut summary) = match kind {
        ExperimentKind::ForceDisplacement => force_displacement(spec, parse)?,
        ExperimentKind::StiffnessVsPretension => stiffness_vs_pretension(spec, parse)?,
        ExperimentKind::MaxAcceleration => max_acceleration(spec, parse)?,
        ExperimentKind::TorqueSurface => torque_surface(spec, parse)?,
        ExperimentKind::MaxTorqueVsPretension => max_torque(spec, parse)?,
        ExperimentKind::StiffnessRange => stiffness_range(spec, parse)?,
        ExperimentKind::Workspace => workspace(spec, parse, seed)?,
        ExperimentKind::Lift => {
            let (table, summary, err) = lift(spec, parse)?;
            partial = err;
            (table, summary)
        }
    };

    if let Value::Object(map) = &mut summary {
        map.insert("experiment".into(), json!(kind.name()));
        map.insert("operation".into(), json!(kind.operation()));
        map.insert("rows".into(), json!(table.rows.len()));
        if kind == ExperimentKind::Workspace {
            map.insert("seed".into(), json!(seed));
        }
    }
    let body = match format {
        OutputFormat::Csv => table.to_csv(kind),
        OutputFormat::Json => table.to_json(kind),
    };
    write_file(&output, &body)?;
    let summary_path = summary_path_for(&output);
    let mut summary_text = serde_json::to_string_pretty(&summary).unwrap();
    summary_text.push('\n');
    write_file(&summary_path, &summary_text)?;
    if let Some(e) = partial {
        return Err(e);
    }
    Ok(ExperimentReport { output, summary_path, summary, rows: table.rows.len() })
}

pub fn summary_path_for(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.summary.json"))
}

fn write_file(path: &Path, body: &str) -> Result<(), ExperimentError> {
    let io = |source| ExperimentError::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, body).map_err(io)
}

fn grid(spec: &ExperimentSpec, name: &str) -> Vec<f64> {
    spec.sweeps.get(name).map(SweepGrid::values).unwrap_or_default()
}

fn joint_setup(spec: &ExperimentSpec, parse: ParseOptions) -> Result<config::JointSetup, ExperimentError> {
    let mut setup = config::load_joint(&spec.configs[0], parse)?;
    if let Some(d) = spec.delta {
        setup.delta = d;
    }
    Ok(setup)
}

type Output = (DataTable, Value);

fn force_displacement(spec: &ExperimentSpec, parse: ParseOptions) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::ForceDisplacement;
    let actuators = spec
        .configs
        .iter()
        .map(|p| config::load_actuator(p, parse))
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = vec!["d_mm".to_owned()];
    columns.extend(actuators.iter().enumerate().map(|(i, a)| format!("{}_force_N", column_label(a.label(), i))));
    let mut table = DataTable::new(columns);
    for d in grid(spec, "d") {
        let mut row = vec![d];
        for a in &actuators {
            row.push(a.force_from_displacement(d).map_err(|e| point_err(kind, &[("d", d)], e))?);
        }
        table.rows.push(row);
    }
    let per: Vec<Value> = actuators
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (_, max_force) = min_max(table.rows.iter().map(|r| r[i + 1]));
            json!({
                "label": a.label(),
                "kind": a.element().kind(),
                "limit_displacement_mm": a.limit_displacement(),
                "limit_force_N": a.limit_force(),
                "working_stiffness_N_per_mm": a.effective_stiffness().ok(),
                "tendon_stiffness_N_per_mm": a.tendon_stiffness(),
                "max_force_N": max_force,
            })
        })
        .collect();
    Ok((table, json!({ "actuators": per })))
}

fn stiffness_vs_pretension(spec: &ExperimentSpec, parse: ParseOptions) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::StiffnessVsPretension;
    let config::JointSetup { joint, delta } = joint_setup(spec, parse)?;
    let mut table = DataTable::new(vec!["d_s_mm".into(), "F_e_N".into(), "K_s_N_mm_per_rad".into()]);
    for d_s in grid(spec, "d_s") {
        let at = |e| point_err(kind, &[("d_s", d_s), ("delta", delta)], e);
        let f_e = joint.external_force(delta, d_s).map_err(at)?;
        let k_s = joint.joint_stiffness(delta, d_s).map_err(at)?;
        table.rows.push(vec![d_s, f_e, k_s]);
    }
    let [b1, b2, b3, b4] = joint.stage_boundaries(delta);
    let (k_lo, k_hi) = min_max(table.rows.iter().map(|r| r[2]));
    let ranges = stiffness_ranges_json(&joint, delta);
    Ok((
        table,
        json!({
            "actuator": joint.actuator().label(),
            "delta_rad": delta,
            "stage_boundaries_mm": { "s1_s2": b1, "s2_s3": b2, "s3_s4": b3, "s4_s5": b4 },
            "K_s_min_on_grid_N_mm_per_rad": k_lo,
            "K_s_max_on_grid_N_mm_per_rad": k_hi,
            "controllable_range": ranges,
        }),
    ))
}

fn stiffness_ranges_json(joint: &crate::joint::AntagonisticJointConfig, delta: f64) -> Value {
    let mut out = serde_json::Map::new();
    for (name, bound) in [
        ("stage_two_end", RangeUpperBound::StageTwoEnd),
        ("slack_free_drive", RangeUpperBound::SlackFreeDrive),
    ] {
        let v = match joint.controllable_stiffness_range_with(delta, bound) {
            Ok(r) => {
                let (lo, hi, span) = r.in_newton_meters();
                json!({
                    "K_smin_N_m_per_rad": lo,
                    "K_smax_N_m_per_rad": hi,
                    "dK_s_N_m_per_rad": span,
                    "d_s_min_mm": r.d_s_min,
                    "d_s_max_mm": r.d_s_max,
                })
            }
            Err(e) => json!({ "error": e.to_string() }),
        };
        out.insert(name.into(), v);
    }
    Value::Object(out)
}

fn max_acceleration(spec: &ExperimentSpec, parse: ParseOptions) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::MaxAcceleration;
    let config::JointSetup { joint, .. } = joint_setup(spec, parse)?;
    let mut table = DataTable::new(vec!["d_s_mm".into(), "theta_ddot_max_rad_per_s2".into()]);
    for d_s in grid(spec, "d_s") {
        let a = joint.max_allowable_acceleration(d_s).map_err(|e| point_err(kind, &[("d_s", d_s)], e))?;
        table.rows.push(vec![d_s, a]);
    }
    let (_, peak) = min_max(table.rows.iter().map(|r| r[1]));
    let d_m = joint.limit_displacement();
    Ok((
        table,
        json!({
            "actuator": joint.actuator().label(),
            "limit_displacement_mm": d_m,
            "slope_change_d_s_mm": 0.5 * d_m,
            "max_on_grid_rad_per_s2": peak,
            "inertia_kg_m2": joint.inertia(),
        }),
    ))
}

fn torque_surface(spec: &ExperimentSpec, parse: ParseOptions) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::TorqueSurface;
    let config::JointSetup { joint, .. } = joint_setup(spec, parse)?;
    let mut table = DataTable::new(vec!["d_s_mm".into(), "d_t_mm".into(), "tau_t_N_mm".into()]);
    let d_ts = grid(spec, "d_t");
    for d_s in grid(spec, "d_s") {
        for &d_t in &d_ts {
            let tau = joint
                .joint_torque(d_s, d_t)
                .map_err(|e| point_err(kind, &[("d_s", d_s), ("d_t", d_t)], e))?;
            table.rows.push(vec![d_s, d_t, tau]);
        }
    }
    let (_, peak) = min_max(table.rows.iter().map(|r| r[2]));
    Ok((
        table,
        json!({
            "actuator": joint.actuator().label(),
            "max_on_grid_N_mm": peak,
            "absolute_max_torque_N_mm": joint.absolute_max_torque(),
            "limit_displacement_mm": joint.limit_displacement(),
        }),
    ))
}

fn max_torque(spec: &ExperimentSpec, parse: ParseOptions) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::MaxTorqueVsPretension;
    let config::JointSetup { joint, .. } = joint_setup(spec, parse)?;
    let mut table = DataTable::new(vec!["d_s_mm".into(), "tau_tm_N_mm".into()]);
    for d_s in grid(spec, "d_s") {
        let tau = joint.max_controllable_torque(d_s).map_err(|e| point_err(kind, &[("d_s", d_s)], e))?;
        table.rows.push(vec![d_s, tau]);
    }
    let nonincreasing = table.rows.windows(2).all(|w| w[1][1] <= w[0][1] + 1e-9);
    Ok((
        table,
        json!({
            "actuator": joint.actuator().label(),
            "absolute_max_torque_N_mm": joint.absolute_max_torque(),
            "limit_displacement_mm": joint.limit_displacement(),
            "nonincreasing": nonincreasing,
        }),
    ))
}

fn stiffness_range(spec: &ExperimentSpec, parse: ParseOptions) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::StiffnessRange;
    let setups = spec
        .configs
        .iter()
        .map(|p| {
            let mut s = config::load_joint(p, parse)?;
            if let Some(d) = spec.delta {
                s.delta = d;
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let deltas = match spec.sweeps.get("delta") {
        Some(g) => g.values(),
        None => vec![setups[0].delta],
    };
    let mut columns = vec!["delta_rad".to_owned()];
    for (i, s) in setups.iter().enumerate() {
        let l = column_label(s.joint.actuator().label(), i);
        for c in ["K_smin", "K_smax", "dK_s", "K_smax_drive", "dK_s_drive"] {
            columns.push(format!("{l}_{c}_N_m_per_rad"));
        }
    }
    let mut table = DataTable::new(columns);
    for &delta in &deltas {
        let mut row = vec![delta];
        for s in &setups {
            let at = |e| point_err(kind, &[("delta", delta)], e);
            let end = s.joint.controllable_stiffness_range_with(delta, RangeUpperBound::StageTwoEnd).map_err(at)?;
            let drive = s
                .joint
                .controllable_stiffness_range_with(delta, RangeUpperBound::SlackFreeDrive)
                .map_err(at)?;
            let (lo, hi, span) = end.in_newton_meters();
            let (_, hi_d, span_d) = drive.in_newton_meters();
            row.extend([lo, hi, span, hi_d, span_d]);
        }
        table.rows.push(row);
    }
    let joints: Vec<Value> = setups
        .iter()
        .map(|s| {
            json!({
                "actuator": s.joint.actuator().label(),
                "moment_arm_mm": s.joint.moment_arm(),
                "mu_s": s.joint.static_friction(),
                "delta_rad": s.delta,
                "ranges": stiffness_ranges_json(&s.joint, s.delta),
            })
        })
        .collect();
    Ok((table, json!({ "joints": joints })))
}

fn workspace(spec: &ExperimentSpec, parse: ParseOptions, seed: u64) -> Result<Output, ExperimentError> {
    let kind = ExperimentKind::Workspace;
    let chain = config::load_chain(&spec.configs[0], parse)?;
    let n = spec.samples.unwrap_or(DEFAULT_WORKSPACE_SAMPLES);
    let cloud = chain.sample_workspace(n, seed).map_err(|e| model_err(kind, e))?;
    let mut table = DataTable::new(vec!["x_m".into(), "y_m".into(), "z_m".into()]);
    table.rows = cloud.points.iter().map(|p| p.to_vec()).collect();
    Ok((
        table,
        json!({
            "n_samples": cloud.n_samples,
            "link_total_m": chain.links().total(),
            "stats": cloud.stats,
        }),
    ))
}

fn lift(spec: &ExperimentSpec, parse: ParseOptions) -> Result<(DataTable, Value, Option<ExperimentError>), ExperimentError> {
    let kind = ExperimentKind::Lift;
    let scenario = config::load_lift(&spec.configs[0], parse)?;
    let (trace, err) = match scenario.simulate_lift() {
        Ok(t) => (t, None),
        Err(DynamicsError::Timeout { t_max, trace }) => {
            (*trace, Some(model_err(kind, format!("target not reached within t_max = {t_max} s"))))
        }
        Err(e) => return Err(model_err(kind, e)),
    };
    let mut columns: Vec<String> = [
        "t_s",
        "theta_rad",
        "omega_rad_per_s",
        "tau_N_m",
        "tau_gravity_N_m",
        "power_W",
        "tendon_speed_mm_per_s",
    ]
    .map(String::from)
    .to_vec();
    columns.extend((1..=scenario.actuators.len()).map(|i| format!("force_{i}_N")));
    let mut table = DataTable::new(columns);
    for s in &trace.samples {
        let mut row = vec![
            s.t,
            s.theta,
            s.omega,
            s.torque,
            s.gravity_torque,
            s.power,
            s.tendon_speed(scenario.joint_moment_arm),
        ];
        row.extend(&s.tendon_forces);
        table.rows.push(row);
    }
    let summary = json!({
        "peak_power_W": trace.peak_power,
        "peak_torque_N_m": trace.peak_torque,
        "time_to_target_s": trace.time_to_target,
        "power_bound_W": scenario.power_bound(),
        "max_joint_speed_rad_per_s": scenario.max_joint_speed(),
        "dt_s": scenario.dt,
        "reached_target": trace.time_to_target.is_some(),
    });
    Ok((table, summary, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_stop() {
        let g = SweepGrid { start: 0.0, stop: 45.0, step: 0.1 };
        let v = g.values();
        assert_eq!(v.len(), 451);
        assert!((v[450] - 45.0).abs() < 1e-9);
        assert_eq!(SweepGrid { start: 1.0, stop: 1.0, step: 0.5 }.values(), vec![1.0]);
        assert!(SweepGrid { start: 0.0, stop: 1.0, step: 0.0 }.validate().is_err());
        assert!(SweepGrid { start: 2.0, stop: 1.0, step: 0.1 }.validate().is_err());
    }

    #[test]
    fn schema_check() {
        assert!(check_csv_schema("# meta\nd_mm,F_N\n0,0\n1,2.5\n").is_ok());
        assert!(check_csv_schema("d,F_N\n0,0\n").is_err());
        assert!(check_csv_schema("d_mm,F_N\n0\n").is_err());
        assert!(check_csv_schema("d_mm,F_N\r\n0,0\r\n").is_err());
        assert!(check_csv_schema("# only a comment\n").is_err());
        assert!(check_csv_schema("d_mm,F_N\n0,abc\n").is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::from_name(k.name()), Some(k));
        }
        assert_eq!(list_experiments().len(), 8);
    }

    #[test]
    fn summary_path() {
        assert_eq!(summary_path_for(Path::new("out/fd.csv")), PathBuf::from("out/fd.summary.json"));
    }
}
