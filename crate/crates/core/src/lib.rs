//! Models of tendon-driven actuators with a series elastic element, the
//! antagonistic joints built from pairs of them, the arm's forward kinematics
//! and a single-joint lift simulation.
//!
//! Lengths are in mm and forces in N unless a name says otherwise; the
//! kinematics and dynamics modules work in SI units.

pub mod config;
pub mod dynamics;
pub mod elastic;
pub mod experiment;
pub mod joint;
pub mod kinematics;

pub use config::{parse_config, ConfigError, ModelConfig, ParseOptions};
pub use dynamics::{DynamicsError, LiftScenario, LiftTrace};
pub use elastic::{ActuatorModel, ElasticElementSpec, ElasticError, ElementKind, ForceTable};
pub use experiment::{run_experiment, ExperimentError, ExperimentKind, ExperimentSpec, OutputFormat, RunOptions};
pub use joint::{AntagonisticJointConfig, JointError, JointState, RangeUpperBound, StageLabel, StiffnessRange};
pub use kinematics::{KinematicChain, KinematicsError, LinkLengths, Pose, RomMode};
