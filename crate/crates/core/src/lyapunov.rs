//! Volterra-type Lyapunov functional around the inner equilibrium.
//!
//! `W = A v(C/Ĉ) + B v(I/Î) + D v(V/V̂)` with `v(s) = s - ln s - 1`. Its
//! derivative along solutions is rewritten as `-Ẇ = dᵀ Ω d` where
//! `d = (V - V̂, I - Î, C - Ĉ)` and the symmetric matrix `Ω` depends on the
//! current state. Freezing `Ω` at a point gives a quadratic form whose
//! positive definiteness (checked via Sylvester's leading principal minors)
//! makes `Ẇ < 0` there.

use serde::{Deserialize, Serialize};

use crate::equilibria::{Equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::model::{det3, vector_field, Matrix3, ModelParams, State};

/// Positive weights of the three Volterra terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LyapunovCoeffs {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl LyapunovCoeffs {
    pub const fn new(a: f64, b: f64, d: f64) -> Self {
        Self { a, b, d }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("A", self.a), ("B", self.b), ("D", self.d)] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Domain(format!(
                    "Lyapunov weight {name} = {w} must be positive and finite"
                )));
            }
        }
        Ok(())
    }
}

impl Default for LyapunovCoeffs {
    fn default() -> Self {
        Self::new(1.0, 1.0, 1.0)
    }
}

/// Leading principal minors of a symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SylvesterMinors {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl SylvesterMinors {
    pub fn of(m: &Matrix3) -> Self {
        Self {
            d1: m[0][0],
            d2: m[0][0] * m[1][1] - m[0][1] * m[1][0],
            d3: det3(m),
        }
    }

    pub fn min(&self) -> f64 {
        self.d1.min(self.d2).min(self.d3)
    }

    /// All three minors exceed `threshold`.
    pub fn exceed(&self, threshold: f64) -> bool {
        self.min() > threshold
    }

    pub fn is_positive_definite(&self) -> bool {
        self.exceed(0.0)
    }
}

/// The symmetric coefficient matrix of `-Ẇ` in deviation coordinates
/// ordered `(V, I, C)`, frozen at `evaluated_at`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaForm {
    pub w11: f64,
    pub w22: f64,
    pub w33: f64,
    pub w12: f64,
    pub w13: f64,
    pub w23: f64,
    pub evaluated_at: State,
    pub minors: SylvesterMinors,
}

impl OmegaForm {
    pub fn from_entries(
        [w11, w22, w33]: [f64; 3],
        [w12, w13, w23]: [f64; 3],
        evaluated_at: State,
    ) -> Self {
        let mut form = Self {
            w11,
            w22,
            w33,
            w12,
            w13,
            w23,
            evaluated_at,
            minors: SylvesterMinors {
                d1: 0.0,
                d2: 0.0,
                d3: 0.0,
            },
        };
        form.minors = sylvester_minors(&form);
        form
    }

    pub fn matrix(&self) -> Matrix3 {
        [
            [self.w11, self.w12, self.w13],
            [self.w12, self.w22, self.w23],
            [self.w13, self.w23, self.w33],
        ]
    }

    /// `dᵀ Ω d` for a deviation vector ordered `(V, I, C)`.
    pub fn quadratic(&self, [dv, di, dc]: [f64; 3]) -> f64 {
        self.w11 * dv * dv
            + self.w22 * di * di
            + self.w33 * dc * dc
            + 2.0 * self.w12 * dv * di
            + 2.0 * self.w13 * dv * dc
            + 2.0 * self.w23 * dc * di
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition4Variant {
    /// Right-hand side with `V̂²`, exactly as printed.
    AsWritten,
    /// Right-hand side with `alpha V̂`.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition4Report {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub variant: Condition4Variant,
}

/// Grid used by [`search_coeffs_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for CoeffGrid {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 1e3,
            points: 41,
        }
    }
}

impl CoeffGrid {
    pub fn values(&self) -> Vec<f64> {
        log_space(self.lo, self.hi, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffSearchOutcome {
    pub coeffs: LyapunovCoeffs,
    pub form: OmegaForm,
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l, h) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        (l + (h - l) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

pub fn volterra(s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!(
            "Volterra function needs a positive argument, got {s}"
        )));
    }
    Ok(s - s.ln() - 1.0)
}

fn require_inner(eq: &Equilibrium) -> Result<()> {
    if eq.kind != EquilibriumKind::Inner || !eq.point.is_strictly_positive() {
        return Err(Error::Precondition(format!(
            "Lyapunov analysis needs the inner equilibrium, got {}",
            eq.kind.as_str()
        )));
    }
    Ok(())
}

fn require_positive(s: &State) -> Result<()> {
    if !(s.is_strictly_positive() && s.is_finite()) {
        return Err(Error::Domain(format!(
            "Lyapunov functional undefined at non-positive state ({}, {}, {})",
            s.c, s.i, s.v
        )));
    }
    Ok(())
}

pub fn w_value(coeffs: &LyapunovCoeffs, eq: &Equilibrium, s: &State) -> Result<f64> {
    require_inner(eq)?;
    require_positive(s)?;
    let e = eq.point;
    Ok(coeffs.a * volterra(s.c / e.c)?
        + coeffs.b * volterra(s.i / e.i)?
        + coeffs.d * volterra(s.v / e.v)?)
}

/// Derivative of `W` along the flow, by the chain rule.
pub fn w_dot(
    params: &ModelParams,
    coeffs: &LyapunovCoeffs,
    eq: &Equilibrium,
    s: &State,
) -> Result<f64> {
    require_inner(eq)?;
    require_positive(s)?;
    let e = eq.point;
    let f = vector_field(params, s);
    Ok(coeffs.a * (1.0 - e.c / s.c) * f.dc / e.c
        + coeffs.b * (1.0 - e.i / s.i) * f.di / e.i
        + coeffs.d * (1.0 - e.v / s.v) * f.dv / e.v)
}

/// Coefficients of `-Ẇ` as a quadratic form in `(V - V̂, I - Î, C - Ĉ)`,
/// evaluated at `s`.
///
/// The bilinear infection term is split as
/// `CV - ĈV̂ = Ĉ (V - V̂) + V (C - Ĉ)`, which fixes the otherwise ambiguous
/// allocation between the `VI` and `CI` cross coefficients.
pub fn omega_at(
    params: &ModelParams,
    coeffs: &LyapunovCoeffs,
    eq: &Equilibrium,
    s: &State,
) -> Result<OmegaForm> {
    require_inner(eq)?;
    require_positive(s)?;
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
    let LyapunovCoeffs {
        a: wa,
        b: wb,
        d: wd,
    } = *coeffs;
    let (ch, ih, vh) = (eq.point.c, eq.point.i, eq.point.v);
    let State { i, v, .. } = *s;

    let w11 = wd * sigma / (v * vh);
    let w22 = wb * a_i * b22 / ih + wb * alpha * ch * vh / (i * ih * ih);
    let w33 = wa * a * b11 / ch;
    let w12 = -0.5 * (wb * alpha * ch / (i * ih) + wd * k * m / (v * vh));
    let w13 = 0.5 * wa * alpha / ch;
    let w23 = 0.5 * (wa * a * b12 / ch + wb * a_i * b21 / ih - wb * alpha * v / (i * ih));

    Ok(OmegaForm::from_entries(
        [w11, w22, w33],
        [w12, w13, w23],
        *s,
    ))
}

pub fn sylvester_minors(form: &OmegaForm) -> SylvesterMinors {
    SylvesterMinors::of(&form.matrix())
}

/// The sufficient parameter condition for local stability, evaluated
/// at the inner equilibrium.
pub fn condition4(
    params: &ModelParams,
    eq: &Equilibrium,
    variant: Condition4Variant,
) -> Result<Condition4Report> {
    require_inner(eq)?;
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
        ..
    } = *params;
    let (ch, ih, vh) = (eq.point.c, eq.point.i, eq.point.v);

    let infected = (1.0 / ih) * (a_i * b22 - (1.0 / ih) * a_i * (1.0 - b21 * ch - b22 * ih) + m);
    let uninfected = (1.0 / ch) * (a * b11 - (1.0 / ch) * a * (1.0 - b11 * ch - b12 * ih));
    let lhs = infected * uninfected;

    let cross = match variant {
        Condition4Variant::AsWritten => vh * vh,
        Condition4Variant::Corrected => alpha * vh,
    };
    let rhs = 0.25 * (a * b12 / ch + b21 / ih - cross).powi(2);

    Ok(Condition4Report {
        lhs,
        rhs,
        holds: lhs > rhs,
        variant,
    })
}

/// Grid search over `(A, B)` with `D = 1` for weights making `Ω` positive
/// definite at the equilibrium. Uses the default 41x41 grid on `[1e-3, 1e3]`.
pub fn search_coeffs(params: &ModelParams, eq: &Equilibrium) -> Result<Option<CoeffSearchOutcome>> {
    search_coeffs_with(params, eq, &CoeffGrid::default())
}

/// Maximizes `min(Δ1, Δ2, Δ3)` over the grid; returns the maximizer when
/// that minimum is positive.
///
/// Fixing `D = 1` loses nothing: scaling all weights by `c > 0` scales the
/// minors by `c`, `c²`, `c³`.
pub fn search_coeffs_with(
    params: &ModelParams,
    eq: &Equilibrium,
    grid: &CoeffGrid,
) -> Result<Option<CoeffSearchOutcome>> {
    require_inner(eq)?;
    params.validate()?;
    let values = grid.values();
    let mut best: Option<CoeffSearchOutcome> = None;
    for &wa in &values {
        for &wb in &values {
            let coeffs = LyapunovCoeffs::new(wa, wb, 1.0);
            let form = omega_at(params, &coeffs, eq, &eq.point)?;
            let better = match &best {
                None => true,
                Some(b) => form.minors.min() > b.form.minors.min(),
            };
            if better {
                best = Some(CoeffSearchOutcome { coeffs, form });
            }
        }
    }
    Ok(best.filter(|b| b.form.minors.min() > 0.0))
}
