//! Statics of a joint driven by an antagonistic pair of identical actuators.
//!
//! Units: tendon displacements and moment arm in mm, forces in N, stiffness in
//! N·mm/rad and torque in N·mm. Only [`AntagonisticJointConfig::max_allowable_acceleration`]
//! converts to SI.
//!
//! Every passive-deflection quantity goes through one expression,
//! `F_e = f_d(d_s + δR) − f_d(d_s − δR) + μ_s·f_d(d_s)`, for all five stages.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elastic::ActuatorModel;

/// The passive deflection used for reported stiffness ranges: 5° in radians.
pub const DEFAULT_DELTA: f64 = 0.087;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JointError {
    #[error("{quantity} must be {expected}, got {value}")]
    Domain {
        quantity: &'static str,
        expected: &'static str,
        value: f64,
    },
    #[error("invalid joint parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("actuators `{0}` and `{1}` differ; the pair must share identical parameters")]
    MismatchedActuators(String, String),
    #[error("pre-tension {d_s} mm exceeds the elastic working range d_m = {d_m} mm")]
    OutOfModel { d_s: f64, d_m: f64 },
    #[error("deflection δ = {delta} rad leaves no controllable stage (δR = {delta_r} mm, upper bound {upper} mm)")]
    EmptyControllableStage { delta: f64, delta_r: f64, upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StageLabel {
    /// Opposing actuator returns to rest: `d_s ≤ δR`.
    S1OpposingSlack,
    /// Both elements still working: `δR < d_s ≤ d_m − δR`.
    S2Controllable,
    /// Driving element pushed to its stop: `d_m − δR < d_s ≤ d_m`.
    S3DrivingAtLimit,
    /// Pre-tension already past the stop: `d_m < d_s ≤ d_m + δR`.
    S4PretensionPastLimit,
    /// Only tendons deform: `d_s > d_m + δR`.
    S5TendonOnly,
}

impl StageLabel {
    pub fn number(self) -> u8 {
        match self {
            Self::S1OpposingSlack => 1,
            Self::S2Controllable => 2,
            Self::S3DrivingAtLimit => 3,
            Self::S4PretensionPastLimit => 4,
            Self::S5TendonOnly => 5,
        }
    }
}

/// Where the top of the controllable-stiffness range is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeUpperBound {
    /// End of stage 2, `d_s = d_m − δR`.
    #[default]
    StageTwoEnd,
    /// `d_s = d_m / 2`: the largest pre-tension at which the slack-limited drive
    /// deflection `δ_r = d_s / R` keeps the driving element off its stop.
    SlackFreeDrive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    /// Pre-tension tendon displacement d_s (mm).
    pub d_s: f64,
    /// Joint angle (rad).
    pub theta: f64,
    /// Torque displacement d_t (mm).
    pub d_t: f64,
}

impl JointState {
    pub fn new(d_s: f64, theta: f64, d_t: f64) -> Result<Self, JointError> {
        non_negative("d_s", d_s)?;
        non_negative("d_t", d_t)?;
        if !theta.is_finite() {
            return Err(JointError::Domain { quantity: "theta", expected: "finite", value: theta });
        }
        Ok(Self { d_s, theta, d_t })
    }
}

/// Stiffness range in N·mm/rad together with the pre-tensions it was taken at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessRange {
    pub k_min: f64,
    pub k_max: f64,
    pub span: f64,
    pub d_s_min: f64,
    pub d_s_max: f64,
    pub upper_bound: RangeUpperBound,
}

impl StiffnessRange {
    /// `(K_smin, K_smax, ΔK_s)` in N·m/rad.
    pub fn in_newton_meters(&self) -> (f64, f64, f64) {
        (self.k_min * 1e-3, self.k_max * 1e-3, self.span * 1e-3)
    }
}

fn non_negative(quantity: &'static str, value: f64) -> Result<(), JointError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(JointError::Domain { quantity, expected: "finite and >= 0", value })
    }
}

fn positive(quantity: &'static str, value: f64) -> Result<(), JointError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(JointError::Domain { quantity, expected: "finite and > 0", value })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntagonisticJointConfig {
    actuator_1: ActuatorModel,
    actuator_2: ActuatorModel,
    moment_arm: f64,
    mu_s: f64,
    inertia: f64,
}

impl AntagonisticJointConfig {
    /// `moment_arm` R in mm, `inertia` I in kg·m².
    pub fn new(
        actuator_1: ActuatorModel,
        actuator_2: ActuatorModel,
        moment_arm: f64,
        mu_s: f64,
        inertia: f64,
    ) -> Result<Self, JointError> {
        if !actuator_1.same_parameters(&actuator_2) {
            return Err(JointError::MismatchedActuators(
                actuator_1.label().to_owned(),
                actuator_2.label().to_owned(),
            ));
        }
        if !(moment_arm.is_finite() && moment_arm > 0.0) {
            return Err(JointError::InvalidParameter {
                field: "moment_arm",
                reason: format!("must be > 0, got {moment_arm}"),
            });
        }
        if !(mu_s.is_finite() && (0.0..1.0).contains(&mu_s)) {
            return Err(JointError::InvalidParameter {
                field: "mu_s",
                reason: format!("must satisfy 0 <= mu_s < 1, got {mu_s}"),
            });
        }
        if !(inertia.is_finite() && inertia > 0.0) {
            return Err(JointError::InvalidParameter {
                field: "inertia",
                reason: format!("must be > 0, got {inertia}"),
            });
        }
        Ok(Self { actuator_1, actuator_2, moment_arm, mu_s, inertia })
    }

    /// A pair of copies of one actuator.
    pub fn symmetric(
        actuator: ActuatorModel,
        moment_arm: f64,
        mu_s: f64,
        inertia: f64,
    ) -> Result<Self, JointError> {
        Self::new(actuator.clone(), actuator, moment_arm, mu_s, inertia)
    }

    pub fn actuator(&self) -> &ActuatorModel {
        &self.actuator_1
    }

    pub fn actuators(&self) -> (&ActuatorModel, &ActuatorModel) {
        (&self.actuator_1, &self.actuator_2)
    }

    pub fn moment_arm(&self) -> f64 {
        self.moment_arm
    }

    pub fn static_friction(&self) -> f64 {
        self.mu_s
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// d_m: tendon displacement at the element stop (mm).
    pub fn limit_displacement(&self) -> f64 {
        self.actuator_1.limit_displacement()
    }

    fn f_d(&self, d: f64) -> f64 {
        self.actuator_1.tension(d)
    }

    /// F_tj: tension on each actuator at pre-tension `d_s`.
    pub fn pretension_force(&self, d_s: f64) -> Result<f64, JointError> {
        non_negative("pre-tension d_s", d_s)?;
        Ok(self.f_d(d_s))
    }

    /// Stage boundaries in d_s for deflection δ: `[δR, d_m − δR, d_m, d_m + δR]`.
    pub fn stage_boundaries(&self, delta: f64) -> [f64; 4] {
        let dr = delta * self.moment_arm;
        let d_m = self.limit_displacement();
        [dr, d_m - dr, d_m, d_m + dr]
    }

    /// Boundaries go to the lower-numbered stage.
    pub fn classify_stage(&self, d_s: f64, delta: f64) -> Result<StageLabel, JointError> {
        non_negative("pre-tension d_s", d_s)?;
        positive("deflection delta", delta)?;
        let [b1, b2, b3, b4] = self.stage_boundaries(delta);
        Ok(if d_s <= b1 {
            StageLabel::S1OpposingSlack
        } else if d_s <= b2 {
            StageLabel::S2Controllable
        } else if d_s <= b3 {
            StageLabel::S3DrivingAtLimit
        } else if d_s <= b4 {
            StageLabel::S4PretensionPastLimit
        } else {
            StageLabel::S5TendonOnly
        })
    }

    /// F_e: virtual external force (N) that deflects the joint by `delta` at pre-tension `d_s`.
    pub fn external_force(&self, delta: f64, d_s: f64) -> Result<f64, JointError> {
        positive("deflection delta", delta)?;
        non_negative("pre-tension d_s", d_s)?;
        let dr = delta * self.moment_arm;
        Ok(self.f_d(d_s + dr) - self.f_d(d_s - dr) + self.mu_s * self.f_d(d_s))
    }

    /// K_s = F_e·R/δ in N·mm/rad.
    pub fn joint_stiffness(&self, delta: f64, d_s: f64) -> Result<f64, JointError> {
        Ok(self.external_force(delta, d_s)? * self.moment_arm / delta)
    }

    /// Stiffness range over stage 2, ending at `d_m − δR`.
    pub fn controllable_stiffness_range(&self, delta: f64) -> Result<StiffnessRange, JointError> {
        self.controllable_stiffness_range_with(delta, RangeUpperBound::StageTwoEnd)
    }

    pub fn controllable_stiffness_range_with(
        &self,
        delta: f64,
        upper_bound: RangeUpperBound,
    ) -> Result<StiffnessRange, JointError> {
        positive("deflection delta", delta)?;
        let dr = delta * self.moment_arm;
        let d_m = self.limit_displacement();
        let upper = match upper_bound {
            RangeUpperBound::StageTwoEnd => d_m - dr,
            RangeUpperBound::SlackFreeDrive => 0.5 * d_m,
        };
        if dr >= upper {
            return Err(JointError::EmptyControllableStage { delta, delta_r: dr, upper });
        }
        let k_min = self.joint_stiffness(delta, dr)?;
        let k_max = self.joint_stiffness(delta, upper)?;
        Ok(StiffnessRange {
            k_min,
            k_max,
            span: k_max - k_min,
            d_s_min: dr,
            d_s_max: upper,
            upper_bound,
        })
    }

    /// Largest angular acceleration (rad/s²) that keeps the opposing tendon taut
    /// at pre-tension `d_s`, i.e. with the drive deflection `δ_r = d_s / R`.
    pub fn max_allowable_acceleration(&self, d_s: f64) -> Result<f64, JointError> {
        non_negative("pre-tension d_s", d_s)?;
        let d_m = self.limit_displacement();
        if d_s > d_m {
            return Err(JointError::OutOfModel { d_s, d_m });
        }
        if d_s == 0.0 {
            return Ok(0.0);
        }
        let f_e = self.external_force(d_s / self.moment_arm, d_s)?;
        Ok(f_e * (self.moment_arm * 1e-3) / self.inertia)
    }

    /// `(f_d(d_1) − f_d(d_2))·R` in N·mm, friction-free.
    pub fn tendon_pair_torque(&self, d_1: f64, d_2: f64) -> Result<f64, JointError> {
        for (q, v) in [("d_1", d_1), ("d_2", d_2)] {
            if !v.is_finite() {
                return Err(JointError::Domain { quantity: q, expected: "finite", value: v });
            }
        }
        Ok((self.f_d(d_1) - self.f_d(d_2)) * self.moment_arm)
    }

    /// Torque on a restrained joint before clamping; can be negative when friction
    /// exceeds the tension difference.
    pub fn signed_joint_torque(&self, d_s: f64, d_t: f64) -> Result<f64, JointError> {
        non_negative("pre-tension d_s", d_s)?;
        non_negative("torque displacement d_t", d_t)?;
        let pair = self.tendon_pair_torque(d_s + d_t, d_s - d_t)?;
        Ok(pair - self.mu_s * self.f_d(d_s) * self.moment_arm)
    }

    /// τ_t in N·mm. Clamped at zero: static friction resists but cannot drive.
    pub fn joint_torque(&self, d_s: f64, d_t: f64) -> Result<f64, JointError> {
        Ok(self.signed_joint_torque(d_s, d_t)?.max(0.0))
    }

    /// τ_tm: torque with the driving actuator taken to its element stop, `d_t = d_m − d_s`.
    pub fn max_controllable_torque(&self, d_s: f64) -> Result<f64, JointError> {
        non_negative("pre-tension d_s", d_s)?;
        let d_m = self.limit_displacement();
        if d_s > d_m {
            return Err(JointError::OutOfModel { d_s, d_m });
        }
        self.joint_torque(d_s, d_m - d_s)
    }

    /// R·F_tm in N·mm.
    pub fn absolute_max_torque(&self) -> f64 {
        self.moment_arm * self.actuator_1.limit_force()
    }
}
