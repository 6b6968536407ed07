//! Model parameters, state, the right-hand side of the retrovirus system and
//! its linearization.
//!
//! The system is
//!
//! ```text
//! C' = a C (1 - b11 C - b12 I) - alpha C V
//! I' = a_I I (1 - b21 C - b22 I) + alpha C V - m I
//! V' = k m I - sigma V
//! ```
//!
//! where `C` are uninfected cells, `I` infected (reproducing) cells and `V`
//! free virions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rate and competition constants of the model.
///
/// `alpha = 0` is admitted (the infection decouples), as are vanishing
/// cross-competition terms `b12`, `b21`; every other constant must be
/// strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Uninfected-cell reproduction rate.
    pub a: f64,
    /// Infected-cell reproduction rate.
    #[serde(rename = "a_I")]
    pub a_i: f64,
    pub b11: f64,
    pub b12: f64,
    pub b21: f64,
    pub b22: f64,
    /// Infection rate.
    pub alpha: f64,
    /// Infected-cell death rate.
    pub m: f64,
    /// Burst factor: virions released per dead infected cell.
    pub k: f64,
    /// Virion clearance rate.
    pub sigma: f64,
}

impl ModelParams {
    /// Parameter names as they appear in configuration files, in field order.
    pub const NAMES: [&'static str; 10] = [
        "a", "a_I", "b11", "b12", "b21", "b22", "alpha", "m", "k", "sigma",
    ];

    pub fn values(&self) -> [f64; 10] {
        [
            self.a, self.a_i, self.b11, self.b12, self.b21, self.b22, self.alpha, self.m, self.k,
            self.sigma,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in Self::NAMES.into_iter().zip(self.values()) {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
            if matches!(name, "alpha" | "b12" | "b21") {
                if value < 0.0 {
                    return Err(Error::InvalidParameter {
                        name,
                        value,
                        reason: "must be nonnegative",
                    });
                }
            } else if value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be strictly positive",
                });
            }
        }
        Ok(())
    }

    /// Copy of `self` with the infection rate and burst factor replaced.
    pub fn with_alpha_k(&self, alpha: f64, k: f64) -> Self {
        Self { alpha, k, ..*self }
    }
}

/// Concentrations of uninfected cells, infected cells and free virions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

impl State {
    pub const fn new(c: f64, i: f64, v: f64) -> Self {
        Self { c, i, v }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c, self.i, self.v]
    }

    pub fn from_array([c, i, v]: [f64; 3]) -> Self {
        Self { c, i, v }
    }

    pub fn is_finite(&self) -> bool {
        self.c.is_finite() && self.i.is_finite() && self.v.is_finite()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.c > 0.0 && self.i > 0.0 && self.v > 0.0
    }

    pub fn min_coord(&self) -> f64 {
        self.c.min(self.i).min(self.v)
    }

    /// Max-norm.
    pub fn norm_inf(&self) -> f64 {
        self.c.abs().max(self.i.abs()).max(self.v.abs())
    }

    pub fn scale(self, f: f64) -> Self {
        Self::new(self.c * f, self.i * f, self.v * f)
    }

    /// `self + h * d`
    pub fn advanced(self, d: Derivative, h: f64) -> Self {
        Self::new(self.c + h * d.dc, self.i + h * d.di, self.v + h * d.dv)
    }
}

/// Time derivative of a [`State`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Derivative {
    pub dc: f64,
    pub di: f64,
    pub dv: f64,
}

impl Derivative {
    pub fn to_array(self) -> [f64; 3] {
        [self.dc, self.di, self.dv]
    }

    pub fn norm_inf(&self) -> f64 {
        self.dc.abs().max(self.di.abs()).max(self.dv.abs())
    }
}

/// Row-major 3x3 matrix in the `(C, I, V)` ordering.
pub type Matrix3 = [[f64; 3]; 3];

/// Coefficients of the monic cubic `λ³ + pλ² + qλ + r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl CubicCoeffs {
    pub fn eval(&self, lambda: f64) -> f64 {
        ((lambda + self.p) * lambda + self.q) * lambda + self.r
    }
}

pub fn vector_field(params: &ModelParams, s: &State) -> Derivative {
    let ModelParams {
        a,
        a_i,
        b11,
        b12,
        b21,
        b22,
        alpha,
        m,
        k,
        sigma,
    } = *params;
    let State { c, i, v } = *s;
    let infection = alpha * c * v;
    Derivative {
        dc: a * c * (1.0 - b11 * c - b12 * i) - infection,
        di: a_i * i * (1.0 - b21 * c - b22 * i) + infection - m * i,
        dv: k * m * i - sigma * v,
    }
}

/// Analytic Jacobian of [`vector_field`] with respect to `(C, I, V)`.
pub fn jacobian(params: &ModelParams, s: &State) -> Matrix3 {
    let ModelParams {
        a,
        a_i,
        b11,
        b12,
        b21,
        b22,
        alpha,
        m,
        k,
        sigma,
    } = *params;
    let State { c, i, v } = *s;
    [
        [
            a * (1.0 - 2.0 * b11 * c - b12 * i) - alpha * v,
            -a * b12 * c,
            -alpha * c,
        ],
        [
            -a_i * b21 * i + alpha * v,
            a_i * (1.0 - b21 * c - 2.0 * b22 * i) - m,
            alpha * c,
        ],
        [0.0, k * m, -sigma],
    ]
}

/// Characteristic polynomial `det(λ I - J)` of a 3x3 matrix.
pub fn char_cubic(j: &Matrix3) -> CubicCoeffs {
    let trace = j[0][0] + j[1][1] + j[2][2];
    let minors = (j[0][0] * j[1][1] - j[0][1] * j[1][0])
        + (j[0][0] * j[2][2] - j[0][2] * j[2][0])
        + (j[1][1] * j[2][2] - j[1][2] * j[2][1]);
    CubicCoeffs {
        p: -trace,
        q: minors,
        r: -det3(j),
    }
}

pub fn det3(m: &Matrix3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
