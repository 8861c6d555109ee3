//! Seven-revolute-joint arm: standard (distal) Denavit-Hartenberg chain,
//! range-of-motion limits and Monte Carlo workspace sampling.
//!
//! Joint variables are named after the motion they describe: three at the
//! glenohumeral joint, elbow flexion, forearm rotation and a two-axis wrist.
//! Each D-H row maps its variable to `θ_i = theta_offset + joint_sign·q`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::{Matrix3, Matrix4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const JOINT_COUNT: usize = 7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("joint {joint} = {value} rad is outside its range of motion [{lo}, {hi}]")]
    RomViolation { joint: JointVariable, value: f64, lo: f64, hi: f64 },
    #[error("joint {joint} value {value} is not finite")]
    NonFinite { joint: JointVariable, value: f64 },
    #[error("invalid chain: {0}")]
    InvalidChain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JointVariable {
    /// θ₃₁: glenohumeral extension (−) / flexion (+).
    #[serde(rename = "theta_31")]
    GlenohumeralFlexion,
    /// θ₃₂: glenohumeral adduction (−) / abduction (+).
    #[serde(rename = "theta_32")]
    GlenohumeralAbduction,
    /// θ₃₃: glenohumeral internal (−) / external (+) rotation.
    #[serde(rename = "theta_33")]
    GlenohumeralRotation,
    /// θ₂₁: elbow extension (−) / flexion (+).
    #[serde(rename = "theta_21")]
    ElbowFlexion,
    /// θ₂₂: forearm pronation (−) / supination (+).
    #[serde(rename = "theta_22")]
    ForearmSupination,
    /// θ₁₁: wrist flexion axis.
    #[serde(rename = "theta_11")]
    WristFlexion,
    /// θ₁₂: wrist deviation axis.
    #[serde(rename = "theta_12")]
    WristDeviation,
}

impl JointVariable {
    pub const ALL: [JointVariable; JOINT_COUNT] = [
        Self::GlenohumeralFlexion,
        Self::GlenohumeralAbduction,
        Self::GlenohumeralRotation,
        Self::ElbowFlexion,
        Self::ForearmSupination,
        Self::WristFlexion,
        Self::WristDeviation,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Self::GlenohumeralFlexion => "theta_31",
            Self::GlenohumeralAbduction => "theta_32",
            Self::GlenohumeralRotation => "theta_33",
            Self::ElbowFlexion => "theta_21",
            Self::ForearmSupination => "theta_22",
            Self::WristFlexion => "theta_11",
            Self::WristDeviation => "theta_12",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.symbol() == s)
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&v| v == self).unwrap()
    }
}

impl fmt::Display for JointVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DHRow {
    /// Link length (m).
    pub a: f64,
    /// Link offset (m).
    pub d: f64,
    /// Twist (rad).
    pub alpha: f64,
    pub theta_offset: f64,
    pub joint_sign: f64,
    pub variable: JointVariable,
}

impl DHRow {
    pub fn theta(&self, joint_value: f64) -> f64 {
        self.theta_offset + self.joint_sign * joint_value
    }
}

/// Standard D-H transform `Rot_z(θ)·Trans_z(d)·Trans_x(a)·Rot_x(α)`.
pub fn dh_transform(row: &DHRow, joint_value: f64) -> Matrix4<f64> {
    let (st, ct) = row.theta(joint_value).sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    Matrix4::new(
        ct, -st * ca, st * sa, row.a * ct,
        st, ct * ca, -ct * sa, row.a * st,
        0.0, sa, ca, row.d,
        0.0, 0.0, 0.0, 1.0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkLengths {
    /// Shoulder to elbow (m).
    pub b: f64,
    /// Elbow to wrist (m).
    pub c: f64,
    /// Wrist to hand point (m).
    pub d: f64,
}

impl Default for LinkLengths {
    fn default() -> Self {
        Self { b: 0.30, c: 0.25, d: 0.08 }
    }
}

impl LinkLengths {
    pub fn total(&self) -> f64 {
        self.b + self.c + self.d
    }
}

/// Closed joint interval in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RomInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RomInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, KinematicsError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(KinematicsError::InvalidChain(format!("empty ROM interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn degrees(lo: f64, hi: f64) -> Result<Self, KinematicsError> {
        Self::new(lo.to_radians(), hi.to_radians())
    }

    pub fn contains(&self, q: f64) -> bool {
        (self.lo..=self.hi).contains(&q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RomMode {
    #[default]
    Strict,
    Clamp,
}

/// Joint values in chain order (see [`JointVariable::ALL`]).
pub type JointValues = [f64; JOINT_COUNT];

#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub rotation: Matrix3<f64>,
    pub transform: Matrix4<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicChain {
    rows: Vec<DHRow>,
    links: LinkLengths,
    rom: [RomInterval; JOINT_COUNT],
}

impl KinematicChain {
    pub fn new(
        rows: Vec<DHRow>,
        links: LinkLengths,
        rom: [RomInterval; JOINT_COUNT],
    ) -> Result<Self, KinematicsError> {
        if rows.len() != JOINT_COUNT {
            return Err(KinematicsError::InvalidChain(format!(
                "expected {JOINT_COUNT} revolute joints, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.variable != JointVariable::ALL[i] {
                return Err(KinematicsError::InvalidChain(format!(
                    "row {} drives {}, expected {}",
                    i + 1,
                    row.variable,
                    JointVariable::ALL[i]
                )));
            }
            if row.joint_sign != 1.0 && row.joint_sign != -1.0 {
                return Err(KinematicsError::InvalidChain(format!(
                    "row {} joint_sign must be ±1, got {}",
                    i + 1,
                    row.joint_sign
                )));
            }
            let twist_ok = [0.0, FRAC_PI_2, -FRAC_PI_2]
                .iter()
                .any(|t| (row.alpha - t).abs() < 1e-12);
            if !twist_ok {
                return Err(KinematicsError::InvalidChain(format!(
                    "row {} twist must be 0 or ±π/2, got {}",
                    i + 1,
                    row.alpha
                )));
            }
        }
        for (name, v) in [("b", links.b), ("c", links.c), ("d", links.d)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(KinematicsError::InvalidChain(format!(
                    "link length {name} must be >= 0, got {v}"
                )));
            }
        }
        for r in &rom {
            RomInterval::new(r.lo, r.hi)?;
        }
        Ok(Self { rows, links, rom })
    }

    /// The arm's D-H table with the given link lengths and the default ROM.
    pub fn arm(links: LinkLengths) -> Self {
        Self::new(arm_rows(&links), links, default_rom()).expect("built-in chain is valid")
    }

    pub fn rows(&self) -> &[DHRow] {
        &self.rows
    }

    pub fn links(&self) -> LinkLengths {
        self.links
    }

    pub fn rom(&self) -> &[RomInterval; JOINT_COUNT] {
        &self.rom
    }

    pub fn with_rom(mut self, rom: [RomInterval; JOINT_COUNT]) -> Self {
        self.rom = rom;
        self
    }

    /// Per-joint transforms `T_{i−1,i}` for the given joint values.
    pub fn transforms(&self, q: &JointValues) -> Vec<Matrix4<f64>> {
        self.rows.iter().zip(q).map(|(row, &v)| dh_transform(row, v)).collect()
    }

    fn admit(&self, q: &JointValues, mode: RomMode) -> Result<JointValues, KinematicsError> {
        let mut out = *q;
        for (i, (v, r)) in out.iter_mut().zip(&self.rom).enumerate() {
            let joint = JointVariable::ALL[i];
            if !v.is_finite() {
                return Err(KinematicsError::NonFinite { joint, value: *v });
            }
            if !r.contains(*v) {
                match mode {
                    RomMode::Strict => {
                        return Err(KinematicsError::RomViolation { joint, value: *v, lo: r.lo, hi: r.hi })
                    }
                    RomMode::Clamp => *v = v.clamp(r.lo, r.hi),
                }
            }
        }
        Ok(out)
    }

    pub fn forward_kinematics(&self, q: &JointValues, mode: RomMode) -> Result<Pose, KinematicsError> {
        let q = self.admit(q, mode)?;
        let transform = self
            .transforms(&q)
            .into_iter()
            .fold(Matrix4::identity(), |acc, t| acc * t);
        Ok(Pose {
            position: transform.fixed_view::<3, 1>(0, 3).into_owned(),
            rotation: transform.fixed_view::<3, 3>(0, 0).into_owned(),
            transform,
        })
    }

    /// Deterministic stream of joint tuples drawn uniformly over each ROM interval.
    pub fn joint_sampler(&self, seed: u64) -> JointSampler<'_> {
        JointSampler { rom: &self.rom, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample_workspace(&self, n: usize, seed: u64) -> Result<WorkspaceCloud, KinematicsError> {
        if n == 0 {
            return Err(KinematicsError::InvalidChain("workspace sample count must be >= 1".into()));
        }
        let points: Vec<[f64; 3]> = self
            .joint_sampler(seed)
            .take(n)
            .map(|q| {
                let p = self.forward_kinematics(&q, RomMode::Strict)?.position;
                Ok([p.x, p.y, p.z])
            })
            .collect::<Result<_, KinematicsError>>()?;
        let stats = WorkspaceStats::from_points(&points);
        Ok(WorkspaceCloud { points, seed, n_samples: n, stats })
    }
}

pub struct JointSampler<'a> {
    rom: &'a [RomInterval; JOINT_COUNT],
    rng: ChaCha8Rng,
}

impl Iterator for JointSampler<'_> {
    type Item = JointValues;

    fn next(&mut self) -> Option<JointValues> {
        let mut q = [0.0; JOINT_COUNT];
        for (v, r) in q.iter_mut().zip(self.rom) {
            *v = if r.lo == r.hi { r.lo } else { self.rng.random_range(r.lo..=r.hi) };
        }
        Some(q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceStats {
    /// Largest distance from the shoulder origin (m).
    pub max_reach: f64,
    pub bbox_min: [f64; 3],
    pub bbox_max: [f64; 3],
    pub centroid: [f64; 3],
}

impl WorkspaceStats {
    fn from_points(points: &[[f64; 3]]) -> Self {
        let mut bbox_min = [f64::INFINITY; 3];
        let mut bbox_max = [f64::NEG_INFINITY; 3];
        let mut sum = [0.0; 3];
        let mut max_reach = 0.0_f64;
        for p in points {
            for k in 0..3 {
                bbox_min[k] = bbox_min[k].min(p[k]);
                bbox_max[k] = bbox_max[k].max(p[k]);
                sum[k] += p[k];
            }
            max_reach = max_reach.max((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt());
        }
        let n = points.len() as f64;
        Self { max_reach, bbox_min, bbox_max, centroid: sum.map(|s| s / n) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceCloud {
    pub points: Vec<[f64; 3]>,
    pub seed: u64,
    pub n_samples: usize,
    pub stats: WorkspaceStats,
}

/// The arm's D-H table; offsets and signs encode the joint-variable expressions
/// literally (e.g. `θ₂ = π/2 − θ₃₂`, `θ₆ = −π/2 − θ₁₁`).
pub fn arm_rows(links: &LinkLengths) -> Vec<DHRow> {
    use JointVariable::*;
    let row = |d, alpha, theta_offset, joint_sign, variable| DHRow {
        a: 0.0,
        d,
        alpha,
        theta_offset,
        joint_sign,
        variable,
    };
    vec![
        row(0.0, FRAC_PI_2, 0.0, 1.0, GlenohumeralFlexion),
        row(0.0, -FRAC_PI_2, FRAC_PI_2, -1.0, GlenohumeralAbduction),
        row(links.b, FRAC_PI_2, FRAC_PI_2, 1.0, GlenohumeralRotation),
        row(0.0, -FRAC_PI_2, 0.0, 1.0, ElbowFlexion),
        row(links.c, -FRAC_PI_2, PI, 1.0, ForearmSupination),
        row(0.0, -FRAC_PI_2, -FRAC_PI_2, -1.0, WristFlexion),
        row(links.d, FRAC_PI_2, 0.0, 1.0, WristDeviation),
    ]
}

/// Wrist flexion value at which the hand lines up with the forearm under the
/// `θ₆ = −π/2 − θ₁₁` mapping.
pub const WRIST_ALIGNED: f64 = FRAC_PI_2;

/// Measured ROM of the prototype for the shoulder, elbow and forearm. The
/// shoulder extension bound was measured on the skeletal system. Wrist
/// ranges (±70° flexion about the aligned pose, −20°..30° deviation) are
/// human-typical placeholders.
pub fn default_rom() -> [RomInterval; JOINT_COUNT] {
    let deg = |lo, hi| RomInterval::degrees(lo, hi).unwrap();
    let aligned = WRIST_ALIGNED.to_degrees();
    [
        deg(-40.0, 65.0),
        deg(-32.0, 104.0),
        deg(-90.0, 40.0),
        deg(0.0, 138.0),
        deg(-60.0, 65.0),
        deg(aligned - 70.0, aligned + 70.0),
        deg(-20.0, 30.0),
    ]
}

/// A pose with the humerus, forearm and hand collinear.
pub fn full_extension() -> JointValues {
    [0.0, 0.0, 0.0, 0.0, 0.0, WRIST_ALIGNED, 0.0]
}
