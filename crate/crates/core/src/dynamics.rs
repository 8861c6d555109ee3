//! Single-joint lift: a forearm with a payload, flexed by one or two tendon
//! actuators that saturate at their rated force and rated tendon speed.
//!
//! SI units throughout (m, kg, s, N·m, W) except actuator ratings, which keep
//! the actuator's own N and mm/s. The joint angle is elbow flexion measured
//! from the forearm hanging straight down, so gravity loads the joint with
//! `g·(m_limb·L_com + m_payload·L_payload)·sin θ`.

use serde::Serialize;
use thiserror::Error;

use crate::elastic::ActuatorModel;

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid lift scenario `{field}`: {reason}")]
    InvalidScenario { field: &'static str, reason: String },
    #[error("commanded tendon speed {commanded} mm/s exceeds the rated {rated} mm/s")]
    SpeedCommand { commanded: f64, rated: f64 },
    #[error("integration produced a non-finite state at t = {t} s")]
    IntegrationFault { t: f64 },
    #[error("target not reached within t_max = {t_max} s")]
    Timeout { t_max: f64, trace: Box<LiftTrace> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftScenario {
    pub payload_mass: f64,
    pub limb_mass: f64,
    pub limb_com_distance: f64,
    pub payload_distance: f64,
    /// Actuator moment arm at the joint (m).
    pub joint_moment_arm: f64,
    pub actuators: Vec<ActuatorModel>,
    pub gravity: f64,
    pub theta_start: f64,
    pub theta_target: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Time constant of the joint speed loop (s).
    pub speed_time_constant: f64,
    /// Tendon speed commanded during the lift (mm/s); `None` means the rated speed.
    pub commanded_speed: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftState {
    pub theta: f64,
    pub omega: f64,
}

/// What the actuators did over one integration step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: LiftState,
    pub torque: f64,
    pub gravity_torque: f64,
    pub tendon_forces: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: f64,
    pub theta: f64,
    pub omega: f64,
    pub torque: f64,
    pub gravity_torque: f64,
    pub power: f64,
    pub tendon_forces: Vec<f64>,
}

impl TraceSample {
    /// Tendon speed in mm/s implied by the joint speed.
    pub fn tendon_speed(&self, moment_arm: f64) -> f64 {
        self.omega.abs() * moment_arm * 1e3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftTrace {
    pub samples: Vec<TraceSample>,
    pub peak_power: f64,
    pub peak_torque: f64,
    pub time_to_target: Option<f64>,
}

impl LiftTrace {
    fn from_samples(samples: Vec<TraceSample>, time_to_target: Option<f64>) -> Self {
        let peak_power = samples.iter().map(|s| s.power).fold(0.0, f64::max);
        let peak_torque = samples.iter().map(|s| s.torque.abs()).fold(0.0, f64::max);
        Self { samples, peak_power, peak_torque, time_to_target }
    }

    /// Trapezoid-free work sum `Σ P·dt` (J), matching the integrator's update.
    pub fn work(&self, dt: f64) -> f64 {
        self.samples.iter().map(|s| s.power * dt).sum()
    }
}

fn require(field: &'static str, ok: bool, reason: impl FnOnce() -> String) -> Result<(), DynamicsError> {
    if ok {
        Ok(())
    } else {
        Err(DynamicsError::InvalidScenario { field, reason: reason() })
    }
}

impl LiftScenario {
    /// A forearm-and-dumbbell scenario with the controller defaults filled in.
    pub fn new(
        payload_mass: f64,
        limb_mass: f64,
        limb_com_distance: f64,
        payload_distance: f64,
        joint_moment_arm: f64,
        actuators: Vec<ActuatorModel>,
    ) -> Self {
        Self {
            payload_mass,
            limb_mass,
            limb_com_distance,
            payload_distance,
            joint_moment_arm,
            actuators,
            gravity: STANDARD_GRAVITY,
            theta_start: 0.0,
            theta_target: 120f64.to_radians(),
            dt: 1e-4,
            t_max: 5.0,
            speed_time_constant: 0.02,
            commanded_speed: None,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        require("payload_mass", self.payload_mass.is_finite() && self.payload_mass >= 0.0, || {
            format!("must be >= 0, got {}", self.payload_mass)
        })?;
        require("limb_mass", self.limb_mass.is_finite() && self.limb_mass >= 0.0, || {
            format!("must be >= 0, got {}", self.limb_mass)
        })?;
        for (field, v) in [
            ("limb_com_distance", self.limb_com_distance),
            ("payload_distance", self.payload_distance),
            ("joint_moment_arm", self.joint_moment_arm),
            ("dt", self.dt),
            ("t_max", self.t_max),
            ("speed_time_constant", self.speed_time_constant),
        ] {
            require(field, v.is_finite() && v > 0.0, || format!("must be > 0, got {v}"))?;
        }
        require("gravity", self.gravity.is_finite() && self.gravity >= 0.0, || {
            format!("must be >= 0, got {}", self.gravity)
        })?;
        require("actuators", (1..=2).contains(&self.actuators.len()), || {
            format!("expected 1 or 2 actuators, got {}", self.actuators.len())
        })?;
        require(
            "theta_target",
            self.theta_start.is_finite() && self.theta_target.is_finite() && self.theta_start != self.theta_target,
            || "theta_start and theta_target must be finite and distinct".into(),
        )?;
        require("inertia", self.inertia() > 0.0, || {
            "limb and payload masses give zero rotational inertia".into()
        })?;
        if let Some(v) = self.commanded_speed {
            require("commanded_speed", v.is_finite() && v > 0.0 && v <= self.rated_speed(), || {
                format!("must be in (0, {}] mm/s, got {v}", self.rated_speed())
            })?;
        }
        Ok(())
    }

    /// Point-mass rotational inertia about the joint (kg·m²).
    pub fn inertia(&self) -> f64 {
        self.limb_mass * self.limb_com_distance.powi(2) + self.payload_mass * self.payload_distance.powi(2)
    }

    pub fn gravity_torque(&self, theta: f64) -> f64 {
        self.gravity
            * (self.limb_mass * self.limb_com_distance + self.payload_mass * self.payload_distance)
            * theta.sin()
    }

    /// Potential energy relative to the hanging pose (J).
    pub fn potential_energy(&self, theta: f64) -> f64 {
        self.gravity
            * (self.limb_mass * self.limb_com_distance + self.payload_mass * self.payload_distance)
            * (1.0 - theta.cos())
    }

    /// Tendons move together, so the slowest actuator sets the speed limit (mm/s).
    pub fn rated_speed(&self) -> f64 {
        self.actuators.iter().map(ActuatorModel::rated_speed).fold(f64::INFINITY, f64::min)
    }

    pub fn max_joint_speed(&self) -> f64 {
        saturated_joint_speed(self.rated_speed(), self.joint_moment_arm)
    }

    /// Upper bound on delivered mechanical power, `Σ F_rated · v_rated` (W).
    pub fn power_bound(&self) -> f64 {
        let v = self.rated_speed() * 1e-3;
        self.actuators.iter().map(|a| a.rated_force() * v).sum()
    }

    /// Advances one explicit step. The speed loop asks for the torque that closes
    /// the gap to the commanded joint speed within `speed_time_constant`, plus
    /// gravity compensation; tendons can only pull, each up to its rated force,
    /// sharing load in proportion to rating. The resulting joint speed is capped
    /// at the rated tendon speed.
    pub fn step_dynamics(&self, state: LiftState, commanded_tendon_speed: f64) -> Result<StepOutcome, DynamicsError> {
        let rated = self.rated_speed();
        if !commanded_tendon_speed.is_finite() || commanded_tendon_speed.abs() > rated * (1.0 + 1e-12) {
            return Err(DynamicsError::SpeedCommand { commanded: commanded_tendon_speed, rated });
        }
        let arm = self.joint_moment_arm;
        let inertia = self.inertia();
        let omega_cmd = commanded_tendon_speed * 1e-3 / arm;
        let gravity_torque = self.gravity_torque(state.theta);
        let torque_demand = inertia * (omega_cmd - state.omega) / self.speed_time_constant + gravity_torque;
        let force_demand = torque_demand / arm;
        let total_rating: f64 = self.actuators.iter().map(ActuatorModel::rated_force).sum();
        let tendon_forces: Vec<f64> = self
            .actuators
            .iter()
            .map(|a| (force_demand * a.rated_force() / total_rating).clamp(0.0, a.rated_force()))
            .collect();
        let torque = tendon_forces.iter().sum::<f64>() * arm;

        let omega_max = self.max_joint_speed();
        let omega = (state.omega + (torque - gravity_torque) / inertia * self.dt).clamp(-omega_max, omega_max);
        let next = LiftState { theta: state.theta + omega * self.dt, omega };
        if !(next.theta.is_finite() && next.omega.is_finite()) {
            return Err(DynamicsError::IntegrationFault { t: f64::NAN });
        }
        Ok(StepOutcome { next, torque, gravity_torque, tendon_forces })
    }

    /// Integrates from rest at `theta_start` until `theta_target` is crossed.
    pub fn simulate_lift(&self) -> Result<LiftTrace, DynamicsError> {
        self.validate()?;
        let direction = (self.theta_target - self.theta_start).signum();
        let command = direction * self.commanded_speed.unwrap_or_else(|| self.rated_speed());
        let mut state = LiftState { theta: self.theta_start, omega: 0.0 };
        let max_steps = (self.t_max / self.dt).ceil() as usize;
        let mut samples = Vec::with_capacity(max_steps.min(1 << 20));
        for step in 1..=max_steps {
            let t = step as f64 * self.dt;
            let out = self
                .step_dynamics(state, command)
                .map_err(|e| match e {
                    DynamicsError::IntegrationFault { .. } => DynamicsError::IntegrationFault { t },
                    other => other,
                })?;
            state = out.next;
            samples.push(TraceSample {
                t,
                theta: state.theta,
                omega: state.omega,
                torque: out.torque,
                gravity_torque: out.gravity_torque,
                power: out.torque * state.omega,
                tendon_forces: out.tendon_forces,
            });
            if (state.theta - self.theta_target) * direction >= 0.0 {
                return Ok(LiftTrace::from_samples(samples, Some(t)));
            }
        }
        Err(DynamicsError::Timeout {
            t_max: self.t_max,
            trace: Box::new(LiftTrace::from_samples(samples, None)),
        })
    }
}

/// Joint speed (rad/s) when the tendon runs at `tendon_speed` mm/s on a moment arm in m.
pub fn saturated_joint_speed(tendon_speed: f64, moment_arm: f64) -> f64 {
    tendon_speed * 1e-3 / moment_arm
}

pub fn mechanical_power(torque: f64, omega: f64) -> f64 {
    torque * omega
}

/// Linear speed of a point `lever` metres from the joint.
pub fn end_effector_speed(omega: f64, lever: f64) -> f64 {
    omega * lever
}
