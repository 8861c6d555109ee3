//! Series elasticity of a single tendon-driven compliant actuator.
//!
//! An actuator is an elastic element (torsion spring behind an output pulley,
//! compression spring around the motor shell, or a measured curve) in series
//! with a tendon. Below the element's travel limit both deform; past it only
//! the tendon stretches. [`ActuatorModel`] owns the resulting invertible map
//! between tendon tension (N) and tendon displacement (mm).

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative mismatch allowed between a quoted travel limit and the one implied
/// by the element law at the quoted limit force.
pub const LIMIT_CONSISTENCY_TOLERANCE: f64 = 0.02;

/// Target residual of the tabulated inverse, in mm of tendon displacement.
pub const TABULATED_INVERSE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElasticError {
    #[error("{quantity} must be finite and non-negative, got {value}")]
    Domain { quantity: &'static str, value: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("tabulated curve: {0}")]
    Table(String),
    #[error("{0}")]
    Usage(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    /// Torsion spring inside the shell; the tendon runs over supporting pulleys.
    TorsionSpringInternal,
    /// Compression spring sleeved over the motor; friction neglected.
    CompressionSpringExternal,
    /// Measured or synthetic force-displacement curve of the element.
    Tabulated,
}

/// Strictly monotone element curve: `(displacement mm, force N)` pairs starting at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceTable {
    points: Vec<(f64, f64)>,
}

impl ForceTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ElasticError> {
        if points.len() < 2 {
            return Err(ElasticError::Table("needs at least two points".into()));
        }
        if points[0] != (0.0, 0.0) {
            return Err(ElasticError::Table(format!(
                "must start at (0, 0), starts at ({}, {})",
                points[0].0, points[0].1
            )));
        }
        for (i, w) in points.windows(2).enumerate() {
            let ((d0, f0), (d1, f1)) = (w[0], w[1]);
            if !(d1.is_finite() && f1.is_finite()) {
                return Err(ElasticError::Table(format!("row {} is not finite", i + 1)));
            }
            if d1 <= d0 || f1 <= f0 {
                return Err(ElasticError::Table(format!(
                    "row {} ({d1}, {f1}) does not strictly increase over ({d0}, {f0})",
                    i + 1
                )));
            }
        }
        Ok(Self { points })
    }

    /// Reads a two-column CSV with a mandatory header row (`displacement_mm,force_N`).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, ElasticError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| ElasticError::Table(e.to_string()))?
            .clone();
        if headers.len() != 2 || headers[0].parse::<f64>().is_ok() {
            return Err(ElasticError::Table(
                "expected a header row `displacement_mm,force_N`".into(),
            ));
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| ElasticError::Table(e.to_string()))?;
            let parse = |j: usize| {
                rec.get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| ElasticError::Table(format!("data row {} is malformed", i + 1)))
            };
            points.push((parse(0)?, parse(1)?));
        }
        Self::new(points)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, ElasticError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| ElasticError::Table(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn max_force(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    pub fn max_deflection(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Element deflection carrying `force`, by piecewise-linear interpolation.
    /// Forces past the last row are clamped to the last deflection.
    pub fn deflection_at(&self, force: f64) -> f64 {
        if force <= 0.0 {
            return 0.0;
        }
        let idx = self.points.partition_point(|&(_, f)| f < force);
        if idx >= self.points.len() {
            return self.max_deflection();
        }
        let (d1, f1) = self.points[idx];
        let (d0, f0) = self.points[idx - 1];
        d0 + (force - f0) * (d1 - d0) / (f1 - f0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementLaw {
    TorsionSpring {
        /// Torsional stiffness, N·mm/rad.
        k_e: f64,
        /// Output pulley radius, mm.
        pulley_radius: f64,
        /// Internal pulley friction coefficient.
        mu_p: f64,
    },
    CompressionSpring {
        /// Spring rate, N/mm.
        k_e: f64,
    },
    Tabulated(ForceTable),
}

/// The elastic stage of one actuator: its law, its limit force and the quoted
/// tendon displacement at that limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticElementSpec {
    law: ElementLaw,
    limit_force: f64,
    nominal_limit: Option<f64>,
}

fn check_positive(field: &'static str, value: f64) -> Result<(), ElasticError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ElasticError::InvalidParameter {
            field,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl ElasticElementSpec {
    /// Internal torsion spring. `d_max` is the quoted tendon displacement (tendon
    /// stretch included) at which the spring reaches its stop under `f_tm`.
    pub fn torsion_spring(
        k_e: f64,
        pulley_radius: f64,
        mu_p: f64,
        d_max: f64,
        f_tm: f64,
    ) -> Result<Self, ElasticError> {
        check_positive("k_e", k_e)?;
        check_positive("pulley_radius", pulley_radius)?;
        if !(mu_p.is_finite() && (0.0..1.0).contains(&mu_p)) {
            return Err(ElasticError::InvalidParameter {
                field: "mu_p",
                reason: format!("must satisfy 0 <= mu_p < 1, got {mu_p}"),
            });
        }
        check_positive("d_max", d_max)?;
        check_positive("f_tm", f_tm)?;
        Ok(Self {
            law: ElementLaw::TorsionSpring { k_e, pulley_radius, mu_p },
            limit_force: f_tm,
            nominal_limit: Some(d_max),
        })
    }

    /// Torsion spring specified through its equivalent tendon stiffness `k_ts` (N/mm).
    pub fn torsion_spring_from_tendon_stiffness(
        k_ts: f64,
        pulley_radius: f64,
        mu_p: f64,
        d_max: f64,
        f_tm: f64,
    ) -> Result<Self, ElasticError> {
        check_positive("k_ts", k_ts)?;
        let k_e = k_ts * 2.0 * PI * pulley_radius * pulley_radius;
        Self::torsion_spring(k_e, pulley_radius, mu_p, d_max, f_tm)
    }

    pub fn compression_spring(k_cs: f64, d_max: f64, f_tm: f64) -> Result<Self, ElasticError> {
        check_positive("k_e", k_cs)?;
        check_positive("d_max", d_max)?;
        check_positive("f_tm", f_tm)?;
        Ok(Self {
            law: ElementLaw::CompressionSpring { k_e: k_cs },
            limit_force: f_tm,
            nominal_limit: Some(d_max),
        })
    }

    /// Tabulated element; the limit force is the last tabulated force.
    pub fn tabulated(table: ForceTable) -> Self {
        Self {
            limit_force: table.max_force(),
            law: ElementLaw::Tabulated(table),
            nominal_limit: None,
        }
    }

    /// Attaches a quoted travel limit to be checked when the actuator is assembled.
    pub fn with_nominal_limit(mut self, d_max: f64) -> Result<Self, ElasticError> {
        check_positive("d_max", d_max)?;
        self.nominal_limit = Some(d_max);
        Ok(self)
    }

    pub fn kind(&self) -> ElementKind {
        match self.law {
            ElementLaw::TorsionSpring { .. } => ElementKind::TorsionSpringInternal,
            ElementLaw::CompressionSpring { .. } => ElementKind::CompressionSpringExternal,
            ElementLaw::Tabulated(_) => ElementKind::Tabulated,
        }
    }

    pub fn law(&self) -> &ElementLaw {
        &self.law
    }

    /// F_tm: tension at which the element reaches its stop (N).
    pub fn limit_force(&self) -> f64 {
        self.limit_force
    }

    pub fn nominal_limit(&self) -> Option<f64> {
        self.nominal_limit
    }

    pub fn pulley_friction(&self) -> f64 {
        match self.law {
            ElementLaw::TorsionSpring { mu_p, .. } => mu_p,
            _ => 0.0,
        }
    }

    /// Stiffness of the element expressed against tendon displacement (N/mm):
    /// `k_e / (2π r²)` for the torsion spring, the spring rate for the
    /// compression spring, `None` for tabulated curves.
    pub fn tendon_stiffness(&self) -> Option<f64> {
        match self.law {
            ElementLaw::TorsionSpring { k_e, pulley_radius, .. } => {
                Some(k_e / (2.0 * PI * pulley_radius * pulley_radius))
            }
            ElementLaw::CompressionSpring { k_e } => Some(k_e),
            ElementLaw::Tabulated(_) => None,
        }
    }

    /// Element share of the tendon displacement at tension `force` ≤ F_tm.
    /// Pulley friction takes `mu_p · force` off the load reaching the torsion spring.
    fn deflection(&self, force: f64) -> f64 {
        match &self.law {
            ElementLaw::TorsionSpring { mu_p, .. } => {
                (force - mu_p * force) / self.tendon_stiffness().unwrap_or(f64::NAN)
            }
            ElementLaw::CompressionSpring { k_e } => force / k_e,
            ElementLaw::Tabulated(table) => table.deflection_at(force),
        }
    }
}

/// One compliant actuator: elastic element in series with its tendon.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorModel {
    element: ElasticElementSpec,
    k_t: f64,
    rated_force: f64,
    rated_speed: f64,
    label: String,
    limit_displacement: f64,
}

impl ActuatorModel {
    /// `k_t` in N/mm, `rated_force` in N, `rated_speed` in mm/s.
    ///
    /// The displacement at the element stop is derived from F_tm through the
    /// element law; a quoted `d_max` must agree with it within 2 %.
    pub fn new(
        element: ElasticElementSpec,
        k_t: f64,
        rated_force: f64,
        rated_speed: f64,
        label: impl Into<String>,
    ) -> Result<Self, ElasticError> {
        check_positive("k_t", k_t)?;
        check_positive("rated_force", rated_force)?;
        check_positive("rated_speed", rated_speed)?;
        let f_tm = element.limit_force();
        let limit_displacement = element.deflection(f_tm) + f_tm / k_t;
        match (element.kind(), element.nominal_limit()) {
            (ElementKind::Tabulated, None) => {}
            (_, Some(quoted)) => {
                let rel = (limit_displacement - quoted).abs() / quoted;
                if rel > LIMIT_CONSISTENCY_TOLERANCE {
                    return Err(ElasticError::InvalidParameter {
                        field: "d_max",
                        reason: format!(
                            "quoted limit {quoted} mm disagrees with {limit_displacement:.4} mm \
                             implied by f_tm = {f_tm} N ({:.2}% > 2%)",
                            rel * 100.0
                        ),
                    });
                }
            }
            (_, None) => {
                return Err(ElasticError::InvalidParameter {
                    field: "d_max",
                    reason: "required for spring elements".into(),
                })
            }
        }
        Ok(Self {
            element,
            k_t,
            rated_force,
            rated_speed,
            label: label.into(),
            limit_displacement,
        })
    }

    pub fn element(&self) -> &ElasticElementSpec {
        &self.element
    }

    pub fn tendon_stiffness(&self) -> f64 {
        self.k_t
    }

    pub fn rated_force(&self) -> f64 {
        self.rated_force
    }

    pub fn rated_speed(&self) -> f64 {
        self.rated_speed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn limit_force(&self) -> f64 {
        self.element.limit_force()
    }

    /// Tendon displacement at the element stop, tendon stretch included (mm).
    pub fn limit_displacement(&self) -> f64 {
        self.limit_displacement
    }

    /// Whether two actuators share every physical parameter (labels ignored).
    pub fn same_parameters(&self, other: &Self) -> bool {
        self.element == other.element
            && self.k_t == other.k_t
            && self.rated_force == other.rated_force
            && self.rated_speed == other.rated_speed
    }

    /// Tendon displacement (mm) produced by tension `force` (N).
    pub fn displacement_from_force(&self, force: f64) -> Result<f64, ElasticError> {
        if !force.is_finite() || force < 0.0 {
            return Err(ElasticError::Domain { quantity: "tendon force", value: force });
        }
        let f_tm = self.limit_force();
        Ok(if force <= f_tm {
            self.element.deflection(force) + force / self.k_t
        } else {
            self.limit_displacement + (force - f_tm) / self.k_t
        })
    }

    /// Tension (N) at tendon displacement `d` (mm). Slack tendons (`d < 0`) carry nothing.
    pub fn force_from_displacement(&self, d: f64) -> Result<f64, ElasticError> {
        if !d.is_finite() {
            return Err(ElasticError::Domain { quantity: "tendon displacement", value: d });
        }
        Ok(self.tension(d))
    }

    /// Unchecked f_d; callers guarantee a finite `d`.
    pub(crate) fn tension(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        if d > self.limit_displacement {
            return self.limit_force() + (d - self.limit_displacement) * self.k_t;
        }
        match self.working_stiffness() {
            Some(k) => d * k,
            None => self.invert_by_bisection(d),
        }
    }

    fn invert_by_bisection(&self, d: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.limit_force());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let d_mid = self.element.deflection(mid) + mid / self.k_t;
            if (d_mid - d).abs() <= TABULATED_INVERSE_TOLERANCE {
                return mid;
            }
            if d_mid < d {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Series stiffness below the stop for spring elements.
    fn working_stiffness(&self) -> Option<f64> {
        let k_s = self.element.tendon_stiffness()?;
        let mu_p = self.element.pulley_friction();
        Some(k_s * self.k_t / (self.k_t * (1.0 - mu_p) + k_s))
    }

    /// k_et: combined element and tendon stiffness while the element is working (N/mm).
    pub fn effective_stiffness(&self) -> Result<f64, ElasticError> {
        self.working_stiffness().ok_or(ElasticError::Usage(
            "tabulated actuators have no single working stiffness; use effective_stiffness_at",
        ))
    }

    /// Local stiffness of f_d at displacement `d` (N/mm). For tabulated curves this
    /// is the secant slope of the curve segment containing `d`.
    pub fn effective_stiffness_at(&self, d: f64) -> Result<f64, ElasticError> {
        if !d.is_finite() {
            return Err(ElasticError::Domain { quantity: "tendon displacement", value: d });
        }
        if d < 0.0 {
            return Ok(0.0);
        }
        if d > self.limit_displacement {
            return Ok(self.k_t);
        }
        if let Some(k) = self.working_stiffness() {
            return Ok(k);
        }
        let ElementLaw::Tabulated(table) = self.element.law() else {
            unreachable!("only tabulated elements lack a working stiffness");
        };
        let knots: Vec<(f64, f64)> = table
            .points()
            .iter()
            .map(|&(e, f)| (e + f / self.k_t, f))
            .collect();
        let idx = knots.partition_point(|&(x, _)| x < d).clamp(1, knots.len() - 1);
        let ((x0, f0), (x1, f1)) = (knots[idx - 1], knots[idx]);
        Ok((f1 - f0) / (x1 - x0))
    }
}
