//! Stationary points of the model.
//!
//! The inner equilibrium is found by substituting `V = k m I / sigma` into
//! the first two stationarity conditions and dividing them by `C` and `I`,
//! which leaves the linear system
//!
//! ```text
//! b11 C + (b12 + alpha k m / (a sigma)) I = 1
//! (a_I b21 - alpha k m / sigma) C + a_I b22 I = a_I - m
//! ```
//!
//! solved by Cramer's rule.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{vector_field, ModelParams, State};

/// Coordinates at or below this value do not count as positive.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Relative threshold on the 2x2 determinant below which the reduced
/// system is treated as singular.
pub const SINGULAR_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Inner,
    Extinction,
    UninfectedOnly,
    InfectedOnly,
}

impl EquilibriumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Inner => "inner",
            Self::Extinction => "extinction",
            Self::UninfectedOnly => "uninfected_only",
            Self::InfectedOnly => "infected_only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub point: State,
    pub kind: EquilibriumKind,
    /// Max-norm of the vector field at `point`.
    pub residual: f64,
}

impl Equilibrium {
    fn new(params: &ModelParams, point: State, kind: EquilibriumKind) -> Self {
        Self {
            point,
            kind,
            residual: residual(params, &point),
        }
    }
}

/// Flat record used in CLI output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub kind: EquilibriumKind,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub residual: f64,
}

impl From<&Equilibrium> for EquilibriumRecord {
    fn from(eq: &Equilibrium) -> Self {
        Self {
            kind: eq.kind,
            c: eq.point.c,
            i: eq.point.i,
            v: eq.point.v,
            residual: eq.residual,
        }
    }
}

/// The unique equilibrium with all coordinates positive, if the reduced
/// linear system has a positive solution.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn inner_equilibrium(params: &ModelParams) -> Result<Option<Equilibrium>> {
    params.validate()?;
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

    let coupling = alpha * k * m / sigma;
    let (m11, m12) = (b11, b12 + coupling / a);
    let (m21, m22) = (a_i * b21 - coupling, a_i * b22);
    let (r1, r2) = (1.0, a_i - m);

    let det = m11 * m22 - m12 * m21;
    let scale = (m11 * m22).abs().max((m12 * m21).abs());
    if !(det.abs() >= SINGULAR_REL_TOL * scale) || det == 0.0 {
        return Ok(None);
    }
    let c = (r1 * m22 - m12 * r2) / det;
    let i = (m11 * r2 - m21 * r1) / det;
    if !(c > POSITIVITY_FLOOR && i > POSITIVITY_FLOOR) {
        return Ok(None);
    }
    let v = k * m * i / sigma;
    if !(v > POSITIVITY_FLOOR) {
        return Ok(None);
    }
    Ok(Some(Equilibrium::new(
        params,
        State::new(c, i, v),
        EquilibriumKind::Inner,
    )))
}

/// Equilibria with at least one zero coordinate.
///
/// The infected-only point exists only when `a_I > m`.
pub fn boundary_equilibria(params: &ModelParams) -> Vec<Equilibrium> {
    let mut out = vec![
        Equilibrium::new(params, State::default(), EquilibriumKind::Extinction),
        Equilibrium::new(
            params,
            State::new(1.0 / params.b11, 0.0, 0.0),
            EquilibriumKind::UninfectedOnly,
        ),
    ];
    if params.a_i > params.m {
        let i = (params.a_i - params.m) / (params.a_i * params.b22);
        let v = params.k * params.m * i / params.sigma;
        out.push(Equilibrium::new(
            params,
            State::new(0.0, i, v),
            EquilibriumKind::InfectedOnly,
        ));
    }
    out
}

/// All equilibria, inner first when present.
pub fn all_equilibria(params: &ModelParams) -> Result<Vec<Equilibrium>> {
    let mut out: Vec<_> = inner_equilibrium(params)?.into_iter().collect();
    out.extend(boundary_equilibria(params));
    Ok(out)
}

pub fn residual(params: &ModelParams, point: &State) -> f64 {
    vector_field(params, point).norm_inf()
}
