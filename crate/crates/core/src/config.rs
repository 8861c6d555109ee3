//! Config files for actuators, joints, kinematic chains, lift scenarios and
//! experiment specs.
//!
//! Every file is TOML; the top-level table name selects the kind:
//! `[actuator]` + `[element]`, `[joint]`, `[links]`/`[rom]`/`[[row]]` for a
//! chain, `[lift]`, or `[experiment]` (+ `[sweep.<var>]`). Relative paths inside
//! a file resolve against that file's directory first, then against
//! `$TENDON_ARM_CONFIG_DIR`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::LiftScenario;
use crate::elastic::{ActuatorModel, ElasticElementSpec, ForceTable};
use crate::experiment::{ExperimentKind, ExperimentSpec, OutputFormat, SweepGrid};
use crate::joint::{AntagonisticJointConfig, DEFAULT_DELTA};
use crate::kinematics::{
    arm_rows, default_rom, DHRow, JointVariable, KinematicChain, LinkLengths, RomInterval, JOINT_COUNT,
};

/// Fallback directory for relative config references.
pub const CONFIG_DIR_ENV: &str = "TENDON_ARM_CONFIG_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ": `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Reject keys the schema does not know.
    pub strict: bool,
}

/// A joint together with the passive deflection its experiments use.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSetup {
    pub joint: AntagonisticJointConfig,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Actuator(ActuatorModel),
    Joint(JointSetup),
    Chain(KinematicChain),
    Lift(LiftScenario),
    Experiment(ExperimentSpec),
}

impl ModelConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Actuator(_) => "actuator",
            Self::Joint(_) => "joint",
            Self::Chain(_) => "chain",
            Self::Lift(_) => "lift",
            Self::Experiment(_) => "experiment",
        }
    }
}

/// Source text plus the location it came from, for error reporting.
struct Source<'a> {
    path: &'a Path,
    text: String,
}

impl Source<'_> {
    fn read(path: &Path) -> Result<Source<'_>, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.to_path_buf(),
            line: None,
            field: None,
            message: format!("cannot read: {e}"),
        })?;
        Ok(Source { path, text })
    }

    fn error(&self, section: &str, field: Option<&str>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            path: self.path.to_path_buf(),
            line: field.and_then(|k| locate(&self.text, section, k)),
            field: field.map(|k| match section {
                "" => k.to_owned(),
                s => format!("{s}.{k}"),
            }),
            message: message.into(),
        }
    }

    fn parse<'de, T: Deserialize<'de>>(&'de self) -> Result<T, ConfigError> {
        toml::from_str(&self.text).map_err(|e| ConfigError {
            path: self.path.to_path_buf(),
            line: e.span().map(|s| line_at(&self.text, s.start)),
            field: None,
            message: e.message().trim().to_owned(),
        })
    }

    fn dir(&self) -> PathBuf {
        self.path.parent().map(Path::to_path_buf).unwrap_or_default()
    }

    fn resolve(&self, section: &str, field: &str, rel: &str) -> Result<PathBuf, ConfigError> {
        resolve_path(&self.dir(), rel).ok_or_else(|| {
            self.error(section, Some(field), format!("referenced file `{rel}` not found"))
        })
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line of `key = ...` inside `[section]` (or before any header when `section` is empty).
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_owned();
            continue;
        }
        if current != section {
            continue;
        }
        if let Some((k, _)) = line.split_once('=') {
            if k.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    None
}

pub fn resolve_path(base: &Path, rel: &str) -> Option<PathBuf> {
    let p = Path::new(rel);
    if p.is_absolute() {
        return p.exists().then(|| p.to_path_buf());
    }
    let local = base.join(p);
    if local.exists() {
        return Some(local);
    }
    let env_dir = std::env::var_os(CONFIG_DIR_ENV)?;
    let fallback = Path::new(&env_dir).join(p);
    fallback.exists().then_some(fallback)
}

fn check_known(
    src: &Source<'_>,
    table: &toml::Table,
    section: &str,
    known: &[&str],
) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !known.contains(&key.as_str()) {
            return Err(src.error(section, Some(key), "unknown key"));
        }
    }
    Ok(())
}

fn sub_table<'t>(table: &'t toml::Table, key: &str) -> Option<&'t toml::Table> {
    table.get(key).and_then(toml::Value::as_table)
}

const ACTUATOR_KEYS: &[&str] = &["label", "k_t", "rated_force", "rated_speed"];
const ELEMENT_KEYS: &[&str] = &["kind", "k_e", "k_ts", "pulley_radius", "mu_p", "d_max", "f_tm", "table"];
const JOINT_KEYS: &[&str] = &["actuator_1", "actuator_2", "moment_arm", "mu_s", "inertia", "delta"];
const LINK_KEYS: &[&str] = &["b", "c", "d"];
const ROW_KEYS: &[&str] = &["variable", "a", "d", "alpha_deg", "theta_offset_deg", "joint_sign"];
const LIFT_KEYS: &[&str] = &[
    "actuators",
    "payload_mass",
    "limb_mass",
    "limb_com_distance",
    "payload_distance",
    "joint_moment_arm",
    "gravity",
    "theta_start_deg",
    "theta_target_deg",
    "dt",
    "t_max",
    "speed_time_constant",
    "commanded_speed",
];
const EXPERIMENT_KEYS: &[&str] = &["kind", "configs", "output", "format", "seed", "samples", "delta"];
const SWEEP_KEYS: &[&str] = &["start", "stop", "step"];

/// Reads and validates any supported config file.
pub fn parse_config(path: impl AsRef<Path>, opts: ParseOptions) -> Result<ModelConfig, ConfigError> {
    let path = path.as_ref();
    let src = Source::read(path)?;
    let table: toml::Table = src.parse()?;
    let has = |k: &str| table.contains_key(k);
    if has("experiment") {
        parse_experiment_src(&src, &table, opts).map(ModelConfig::Experiment)
    } else if has("actuator") || has("element") {
        parse_actuator_src(&src, &table, opts).map(ModelConfig::Actuator)
    } else if has("joint") {
        parse_joint_src(&src, &table, opts).map(ModelConfig::Joint)
    } else if has("lift") {
        parse_lift_src(&src, &table, opts).map(ModelConfig::Lift)
    } else if has("links") || has("rom") || has("row") {
        parse_chain_src(&src, &table, opts).map(ModelConfig::Chain)
    } else {
        Err(src.error(
            "",
            None,
            "no recognised top-level table (actuator, joint, links/rom/row, lift, experiment)",
        ))
    }
}

fn expect<T>(src: &Source<'_>, kind: &str, parsed: ModelConfig, pick: impl FnOnce(ModelConfig) -> Option<T>) -> Result<T, ConfigError> {
    let found = parsed.kind_name();
    pick(parsed).ok_or_else(|| src.error("", None, format!("expected a {kind} config, found a {found} config")))
}

pub fn load_actuator(path: impl AsRef<Path>, opts: ParseOptions) -> Result<ActuatorModel, ConfigError> {
    let path = path.as_ref();
    let src = Source { path, text: String::new() };
    expect(&src, "actuator", parse_config(path, opts)?, |m| match m {
        ModelConfig::Actuator(a) => Some(a),
        _ => None,
    })
}

pub fn load_joint(path: impl AsRef<Path>, opts: ParseOptions) -> Result<JointSetup, ConfigError> {
    let path = path.as_ref();
    let src = Source { path, text: String::new() };
    expect(&src, "joint", parse_config(path, opts)?, |m| match m {
        ModelConfig::Joint(j) => Some(j),
        _ => None,
    })
}

pub fn load_chain(path: impl AsRef<Path>, opts: ParseOptions) -> Result<KinematicChain, ConfigError> {
    let path = path.as_ref();
    let src = Source { path, text: String::new() };
    expect(&src, "chain", parse_config(path, opts)?, |m| match m {
        ModelConfig::Chain(c) => Some(c),
        _ => None,
    })
}

pub fn load_lift(path: impl AsRef<Path>, opts: ParseOptions) -> Result<LiftScenario, ConfigError> {
    let path = path.as_ref();
    let src = Source { path, text: String::new() };
    expect(&src, "lift", parse_config(path, opts)?, |m| match m {
        ModelConfig::Lift(l) => Some(l),
        _ => None,
    })
}

pub fn load_experiment(path: impl AsRef<Path>, opts: ParseOptions) -> Result<ExperimentSpec, ConfigError> {
    let path = path.as_ref();
    let src = Source { path, text: String::new() };
    expect(&src, "experiment", parse_config(path, opts)?, |m| match m {
        ModelConfig::Experiment(e) => Some(e),
        _ => None,
    })
}

#[derive(Deserialize)]
struct ActuatorFile {
    actuator: ActuatorSection,
    element: ElementSection,
}

#[derive(Deserialize)]
struct ActuatorSection {
    label: Option<String>,
    k_t: Option<f64>,
    rated_force: Option<f64>,
    rated_speed: Option<f64>,
}

#[derive(Deserialize)]
struct ElementSection {
    kind: Option<String>,
    k_e: Option<f64>,
    k_ts: Option<f64>,
    pulley_radius: Option<f64>,
    mu_p: Option<f64>,
    d_max: Option<f64>,
    f_tm: Option<f64>,
    table: Option<String>,
}

fn required<T: Copy>(src: &Source<'_>, section: &str, key: &str, v: Option<T>) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError {
        path: src.path.to_path_buf(),
        line: None,
        field: Some(format!("{section}.{key}")),
        message: "missing required field".into(),
    })
}

fn elastic_error(src: &Source<'_>, section: &str, e: crate::elastic::ElasticError) -> ConfigError {
    use crate::elastic::ElasticError::*;
    match &e {
        InvalidParameter { field, reason } => {
            let section = if matches!(*field, "k_t" | "rated_force" | "rated_speed") { "actuator" } else { section };
            src.error(section, Some(field), reason.clone())
        }
        other => src.error(section, None, other.to_string()),
    }
}

fn parse_actuator_src(src: &Source<'_>, table: &toml::Table, opts: ParseOptions) -> Result<ActuatorModel, ConfigError> {
    if opts.strict {
        check_known(src, table, "", &["actuator", "element"])?;
        if let Some(t) = sub_table(table, "actuator") {
            check_known(src, t, "actuator", ACTUATOR_KEYS)?;
        }
        if let Some(t) = sub_table(table, "element") {
            check_known(src, t, "element", ELEMENT_KEYS)?;
        }
    }
    let file: ActuatorFile = src.parse()?;
    let el = &file.element;
    let kind = el.kind.as_deref().ok_or_else(|| src.error("element", None, "missing required field `element.kind`"))?;
    let element = match kind {
        "torsion_spring_internal" => {
            let r = required(src, "element", "pulley_radius", el.pulley_radius)?;
            let mu_p = el.mu_p.unwrap_or(0.0);
            let d_max = required(src, "element", "d_max", el.d_max)?;
            let f_tm = required(src, "element", "f_tm", el.f_tm)?;
            match (el.k_e, el.k_ts) {
                (Some(k_e), None) => ElasticElementSpec::torsion_spring(k_e, r, mu_p, d_max, f_tm),
                (None, Some(k_ts)) => {
                    ElasticElementSpec::torsion_spring_from_tendon_stiffness(k_ts, r, mu_p, d_max, f_tm)
                }
                _ => return Err(src.error("element", Some("k_e"), "give exactly one of `k_e` or `k_ts`")),
            }
        }
        "compression_spring_external" => {
            if el.mu_p.is_some_and(|m| m != 0.0) {
                return Err(src.error("element", Some("mu_p"), "only torsion-spring elements carry pulley friction"));
            }
            ElasticElementSpec::compression_spring(
                required(src, "element", "k_e", el.k_e)?,
                required(src, "element", "d_max", el.d_max)?,
                required(src, "element", "f_tm", el.f_tm)?,
            )
        }
        "tabulated" => {
            let rel = el
                .table
                .as_deref()
                .ok_or_else(|| src.error("element", None, "missing required field `element.table`"))?;
            let path = src.resolve("element", "table", rel)?;
            let table = ForceTable::from_csv_path(&path).map_err(|e| src.error("element", Some("table"), e.to_string()))?;
            let spec = ElasticElementSpec::tabulated(table);
            if let Some(f_tm) = el.f_tm {
                if (f_tm - spec.limit_force()).abs() > 1e-9 * f_tm.abs().max(1.0) {
                    return Err(src.error(
                        "element",
                        Some("f_tm"),
                        format!("tabulated curves end at {} N; f_tm must match", spec.limit_force()),
                    ));
                }
            }
            match el.d_max {
                Some(d) => spec.with_nominal_limit(d),
                None => Ok(spec),
            }
        }
        other => {
            return Err(src.error(
                "element",
                Some("kind"),
                format!(
                    "unknown element kind `{other}` (expected torsion_spring_internal, \
                     compression_spring_external or tabulated)"
                ),
            ))
        }
    }
    .map_err(|e| elastic_error(src, "element", e))?;
    let a = &file.actuator;
    ActuatorModel::new(
        element,
        required(src, "actuator", "k_t", a.k_t)?,
        required(src, "actuator", "rated_force", a.rated_force)?,
        required(src, "actuator", "rated_speed", a.rated_speed)?,
        a.label.clone().unwrap_or_else(|| {
            src.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        }),
    )
    .map_err(|e| elastic_error(src, "element", e))
}

#[derive(Deserialize)]
struct JointFile {
    joint: JointSection,
}

#[derive(Deserialize)]
struct JointSection {
    actuator_1: Option<String>,
    actuator_2: Option<String>,
    moment_arm: Option<f64>,
    mu_s: Option<f64>,
    inertia: Option<f64>,
    delta: Option<f64>,
}

fn parse_joint_src(src: &Source<'_>, table: &toml::Table, opts: ParseOptions) -> Result<JointSetup, ConfigError> {
    if opts.strict {
        check_known(src, table, "", &["joint"])?;
        if let Some(t) = sub_table(table, "joint") {
            check_known(src, t, "joint", JOINT_KEYS)?;
        }
    }
    let file: JointFile = src.parse()?;
    let j = &file.joint;
    let load = |key: &str, rel: &Option<String>| -> Result<ActuatorModel, ConfigError> {
        let rel = rel.as_deref().ok_or_else(|| src.error("joint", None, format!("missing required field `joint.{key}`")))?;
        load_actuator(src.resolve("joint", key, rel)?, opts)
    };
    let a1 = load("actuator_1", &j.actuator_1)?;
    let a2 = load("actuator_2", &j.actuator_2)?;
    let delta = j.delta.unwrap_or(DEFAULT_DELTA);
    if !(delta.is_finite() && delta > 0.0) {
        return Err(src.error("joint", Some("delta"), format!("must be > 0, got {delta}")));
    }
    let joint = AntagonisticJointConfig::new(
        a1,
        a2,
        required(src, "joint", "moment_arm", j.moment_arm)?,
        j.mu_s.unwrap_or(0.0),
        required(src, "joint", "inertia", j.inertia)?,
    )
    .map_err(|e| match &e {
        crate::joint::JointError::InvalidParameter { field, reason } => src.error("joint", Some(field), reason.clone()),
        other => src.error("joint", None, other.to_string()),
    })?;
    Ok(JointSetup { joint, delta })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LengthExpr {
    Value(f64),
    Link(String),
}

#[derive(Deserialize)]
struct RowSection {
    variable: String,
    a: Option<LengthExpr>,
    d: Option<LengthExpr>,
    alpha_deg: f64,
    theta_offset_deg: Option<f64>,
    joint_sign: Option<f64>,
}

#[derive(Deserialize)]
struct ChainFile {
    links: Option<LinkLengths>,
    #[serde(default)]
    row: Vec<RowSection>,
    #[serde(default)]
    rom: BTreeMap<String, [f64; 2]>,
}

fn parse_chain_src(src: &Source<'_>, table: &toml::Table, opts: ParseOptions) -> Result<KinematicChain, ConfigError> {
    if opts.strict {
        check_known(src, table, "", &["links", "row", "rom"])?;
        if let Some(t) = sub_table(table, "links") {
            check_known(src, t, "links", LINK_KEYS)?;
        }
        if let Some(rows) = table.get("row").and_then(toml::Value::as_array) {
            for r in rows.iter().filter_map(toml::Value::as_table) {
                check_known(src, r, "[row]", ROW_KEYS)?;
            }
        }
    }
    let file: ChainFile = src.parse()?;
    let links = file.links.unwrap_or_default();
    let length = |e: &Option<LengthExpr>| -> Result<f64, ConfigError> {
        Ok(match e {
            None => 0.0,
            Some(LengthExpr::Value(v)) => *v,
            Some(LengthExpr::Link(name)) => match name.as_str() {
                "b" => links.b,
                "c" => links.c,
                "d" => links.d,
                other => return Err(src.error("[row]", None, format!("unknown link length `{other}`"))),
            },
        })
    };
    let rows = if file.row.is_empty() {
        arm_rows(&links)
    } else {
        file.row
            .iter()
            .map(|r| {
                let variable = JointVariable::from_symbol(&r.variable)
                    .ok_or_else(|| src.error("[row]", Some("variable"), format!("unknown joint variable `{}`", r.variable)))?;
                Ok(DHRow {
                    a: length(&r.a)?,
                    d: length(&r.d)?,
                    alpha: r.alpha_deg.to_radians(),
                    theta_offset: r.theta_offset_deg.unwrap_or(0.0).to_radians(),
                    joint_sign: r.joint_sign.unwrap_or(1.0),
                    variable,
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?
    };
    let mut rom = default_rom();
    for (name, [lo, hi]) in &file.rom {
        let var = JointVariable::from_symbol(name)
            .ok_or_else(|| src.error("rom", Some(name), format!("unknown joint variable `{name}`")))?;
        rom[var.index()] = RomInterval::degrees(*lo, *hi).map_err(|e| src.error("rom", Some(name), e.to_string()))?;
    }
    if opts.strict && !file.rom.is_empty() && file.rom.len() != JOINT_COUNT {
        let missing: Vec<_> = JointVariable::ALL
            .iter()
            .filter(|v| !file.rom.contains_key(v.symbol()))
            .map(|v| v.symbol())
            .collect();
        return Err(src.error("rom", None, format!("strict mode requires every joint range; missing {missing:?}")));
    }
    KinematicChain::new(rows, links, rom).map_err(|e| src.error("", None, e.to_string()))
}

#[derive(Deserialize)]
struct LiftFile {
    lift: LiftSection,
}

#[derive(Deserialize)]
struct LiftSection {
    actuators: Vec<String>,
    payload_mass: Option<f64>,
    limb_mass: Option<f64>,
    limb_com_distance: Option<f64>,
    payload_distance: Option<f64>,
    joint_moment_arm: Option<f64>,
    gravity: Option<f64>,
    theta_start_deg: Option<f64>,
    theta_target_deg: Option<f64>,
    dt: Option<f64>,
    t_max: Option<f64>,
    speed_time_constant: Option<f64>,
    commanded_speed: Option<f64>,
}

fn parse_lift_src(src: &Source<'_>, table: &toml::Table, opts: ParseOptions) -> Result<LiftScenario, ConfigError> {
    if opts.strict {
        check_known(src, table, "", &["lift"])?;
        if let Some(t) = sub_table(table, "lift") {
            check_known(src, t, "lift", LIFT_KEYS)?;
        }
    }
    let file: LiftFile = src.parse()?;
    let l = &file.lift;
    let actuators = l
        .actuators
        .iter()
        .map(|rel| load_actuator(src.resolve("lift", "actuators", rel)?, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = LiftScenario::new(
        required(src, "lift", "payload_mass", l.payload_mass)?,
        required(src, "lift", "limb_mass", l.limb_mass)?,
        required(src, "lift", "limb_com_distance", l.limb_com_distance)?,
        required(src, "lift", "payload_distance", l.payload_distance)?,
        required(src, "lift", "joint_moment_arm", l.joint_moment_arm)?,
        actuators,
    );
    if let Some(g) = l.gravity {
        s.gravity = g;
    }
    if let Some(v) = l.theta_start_deg {
        s.theta_start = v.to_radians();
    }
    if let Some(v) = l.theta_target_deg {
        s.theta_target = v.to_radians();
    }
    if let Some(v) = l.dt {
        s.dt = v;
    }
    if let Some(v) = l.t_max {
        s.t_max = v;
    }
    if let Some(v) = l.speed_time_constant {
        s.speed_time_constant = v;
    }
    s.commanded_speed = l.commanded_speed;
    s.validate().map_err(|e| match &e {
        crate::dynamics::DynamicsError::InvalidScenario { field, reason } => {
            let key = match *field {
                "theta_target" => "theta_target_deg",
                other => other,
            };
            src.error("lift", Some(key), reason.clone())
        }
        other => src.error("lift", None, other.to_string()),
    })?;
    Ok(s)
}

#[derive(Deserialize)]
struct ExperimentFile {
    experiment: ExperimentSection,
    #[serde(default)]
    sweep: BTreeMap<String, SweepGrid>,
}

#[derive(Deserialize)]
struct ExperimentSection {
    kind: String,
    #[serde(default)]
    configs: Vec<String>,
    output: Option<String>,
    format: Option<String>,
    seed: Option<u64>,
    samples: Option<usize>,
    delta: Option<f64>,
}

fn parse_experiment_src(src: &Source<'_>, table: &toml::Table, opts: ParseOptions) -> Result<ExperimentSpec, ConfigError> {
    if opts.strict {
        check_known(src, table, "", &["experiment", "sweep"])?;
        if let Some(t) = sub_table(table, "experiment") {
            check_known(src, t, "experiment", EXPERIMENT_KEYS)?;
        }
        if let Some(sweeps) = sub_table(table, "sweep") {
            for (name, t) in sweeps {
                if let Some(t) = t.as_table() {
                    check_known(src, t, &format!("sweep.{name}"), SWEEP_KEYS)?;
                }
            }
        }
    }
    let file: ExperimentFile = src.parse()?;
    let e = &file.experiment;
    let kind = ExperimentKind::from_name(&e.kind).ok_or_else(|| {
        src.error(
            "experiment",
            Some("kind"),
            format!("unknown experiment `{}`; see `list-experiments`", e.kind),
        )
    })?;
    let format = match e.format.as_deref() {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(src.error("experiment", Some("format"), format!("unknown format `{other}`"))),
    };
    let configs = e
        .configs
        .iter()
        .map(|rel| src.resolve("experiment", "configs", rel))
        .collect::<Result<Vec<_>, _>>()?;
    let expected = kind.config_count();
    if !expected.contains(&configs.len()) {
        return Err(src.error(
            "experiment",
            Some("configs"),
            format!("{} takes {:?} config files, got {}", kind.name(), expected, configs.len()),
        ));
    }
    for name in kind.sweep_variables() {
        if !file.sweep.contains_key(*name) {
            return Err(src.error("", None, format!("missing sweep grid `[sweep.{name}]` for {}", kind.name())));
        }
    }
    for (name, grid) in &file.sweep {
        if !kind.sweep_variables().contains(&name.as_str()) && !kind.optional_sweeps().contains(&name.as_str()) {
            return Err(src.error("", None, format!("{} has no sweep variable `{name}`", kind.name())));
        }
        grid.validate().map_err(|m| src.error(&format!("sweep.{name}"), Some("step"), m))?;
    }
    if let Some(d) = e.delta {
        if !(d.is_finite() && d > 0.0) {
            return Err(src.error("experiment", Some("delta"), format!("must be > 0, got {d}")));
        }
    }
    if e.samples == Some(0) {
        return Err(src.error("experiment", Some("samples"), "must be >= 1"));
    }
    let output = e
        .output
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", kind.name(), format.extension())));
    Ok(ExperimentSpec {
        kind,
        configs,
        sweeps: file.sweep,
        output,
        format,
        seed: e.seed.unwrap_or(0),
        samples: e.samples,
        delta: e.delta,
        base_dir: src.dir(),
    })
}
