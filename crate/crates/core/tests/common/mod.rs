//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's own evaluation paths.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Linear actuator described by its series element rate `k_el` (N/mm of tendon
/// travel), tendon stiffness `k_t` and element stop force `f_tm`.
#[derive(Debug, Clone, Copy)]
pub struct LinearOracle {
    pub k_el: f64,
    pub k_t: f64,
    pub f_tm: f64,
}

impl LinearOracle {
    pub fn compression(k_cs: f64, k_t: f64, f_tm: f64) -> Self {
        Self { k_el: k_cs, k_t, f_tm }
    }

    /// Torsion spring of rate `k_e` (N·mm/rad) on a pulley of radius `r`; pulley
    /// friction scales the element's share of the travel by `1 − μ_p`.
    pub fn torsion(k_e: f64, r: f64, mu_p: f64, k_t: f64, f_tm: f64) -> Self {
        let k_ts = k_e / (2.0 * PI * r * r);
        Self { k_el: k_ts / (1.0 - mu_p), k_t, f_tm }
    }

    pub fn series_rate(&self) -> f64 {
        1.0 / (1.0 / self.k_el + 1.0 / self.k_t)
    }

    pub fn stop(&self) -> f64 {
        self.f_tm / self.k_el + self.f_tm / self.k_t
    }

    pub fn displacement(&self, f: f64) -> f64 {
        if f <= self.f_tm {
            f / self.k_el + f / self.k_t
        } else {
            self.stop() + (f - self.f_tm) / self.k_t
        }
    }

    pub fn force(&self, d: f64) -> f64 {
        if d <= 0.0 {
            0.0
        } else if d <= self.stop() {
            self.series_rate() * d
        } else {
            self.f_tm + self.k_t * (d - self.stop())
        }
    }
}

/// Root of a nondecreasing `g` with `g(lo) <= target <= g(hi)` by plain bisection.
pub fn bisect(g: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub type M4 = [[f64; 4]; 4];

pub fn identity() -> M4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn matmul(a: &M4, b: &M4) -> M4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Classic D-H link transform written out element by element.
pub fn dh(a: f64, d: f64, alpha: f64, theta: f64) -> M4 {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    [
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ]
}
