//! `#[repr(C)]` mirrors of the library types.

use retrovir::equilibria::{Equilibrium, EquilibriumKind};
use retrovir::integrator::{IntegrationMode, IntegrationOptions};
use retrovir::lyapunov::{Condition4Report, Condition4Variant, LyapunovCoeffs, OmegaForm};
use retrovir::stability::{StabilityReport, Verdict};
use retrovir::sweep::SweepCell;
use retrovir::{ModelParams, State};

/// Result code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvStatus {
    Ok = 0,
    /// The parameters admit no equilibrium with all coordinates positive.
    NoInnerEquilibrium = 1,
    InvalidArgument = 2,
    NullPointer = 3,
    /// A Lyapunov quantity was requested at a non-positive state.
    DomainError = 4,
    IntegrationFailed = 5,
    IndexOutOfRange = 6,
    /// The requested object does not exist (no Lyapunov weights, empty
    /// stable region, ...).
    NotFound = 7,
    BufferTooSmall = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvVerdict {
    Stable = 0,
    Unstable = 1,
    Marginal = 2,
    /// No inner equilibrium to classify.
    None = 3,
}

impl From<Verdict> for RvVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Stable => Self::Stable,
            Verdict::Unstable => Self::Unstable,
            Verdict::Marginal => Self::Marginal,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvEquilibriumKind {
    Inner = 0,
    Extinction = 1,
    UninfectedOnly = 2,
    InfectedOnly = 3,
}

impl From<EquilibriumKind> for RvEquilibriumKind {
    fn from(k: EquilibriumKind) -> Self {
        match k {
            EquilibriumKind::Inner => Self::Inner,
            EquilibriumKind::Extinction => Self::Extinction,
            EquilibriumKind::UninfectedOnly => Self::UninfectedOnly,
            EquilibriumKind::InfectedOnly => Self::InfectedOnly,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvCondition4Variant {
    Corrected = 0,
    AsWritten = 1,
}

impl From<RvCondition4Variant> for Condition4Variant {
    fn from(v: RvCondition4Variant) -> Self {
        match v {
            RvCondition4Variant::Corrected => Condition4Variant::Corrected,
            RvCondition4Variant::AsWritten => Condition4Variant::AsWritten,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvIntegrationMode {
    FixedRk4 = 0,
    AdaptiveRk4 = 1,
}

/// Model constants; field names follow the configuration keys.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvParams {
    pub a: f64,
    pub a_i: f64,
    pub b11: f64,
    pub b12: f64,
    pub b21: f64,
    pub b22: f64,
    pub alpha: f64,
    pub m: f64,
    pub k: f64,
    pub sigma: f64,
}

impl From<RvParams> for ModelParams {
    fn from(p: RvParams) -> Self {
        ModelParams {
            a: p.a,
            a_i: p.a_i,
            b11: p.b11,
            b12: p.b12,
            b21: p.b21,
            b22: p.b22,
            alpha: p.alpha,
            m: p.m,
            k: p.k,
            sigma: p.sigma,
        }
    }
}

impl From<ModelParams> for RvParams {
    fn from(p: ModelParams) -> Self {
        RvParams {
            a: p.a,
            a_i: p.a_i,
            b11: p.b11,
            b12: p.b12,
            b21: p.b21,
            b22: p.b22,
            alpha: p.alpha,
            m: p.m,
            k: p.k,
            sigma: p.sigma,
        }
    }
}

/// `(C, I, V)` triple; also used for derivatives.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RvState {
    pub c: f64,
    pub i: f64,
    pub v: f64,
}

impl From<RvState> for State {
    fn from(s: RvState) -> Self {
        State::new(s.c, s.i, s.v)
    }
}

impl From<State> for RvState {
    fn from(s: State) -> Self {
        RvState {
            c: s.c,
            i: s.i,
            v: s.v,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvEquilibrium {
    pub point: RvState,
    pub kind: RvEquilibriumKind,
    pub residual: f64,
}

impl From<&Equilibrium> for RvEquilibrium {
    fn from(e: &Equilibrium) -> Self {
        RvEquilibrium {
            point: e.point.into(),
            kind: e.kind.into(),
            residual: e.residual,
        }
    }
}

/// Characteristic cubic `λ³ + pλ² + qλ + r` with its Routh–Hurwitz verdict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvStabilityReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub verdict: RvVerdict,
    pub margin_p: f64,
    pub margin_r: f64,
    pub margin_pq_minus_r: f64,
}

impl From<&StabilityReport> for RvStabilityReport {
    fn from(s: &StabilityReport) -> Self {
        RvStabilityReport {
            p: s.cubic.p,
            q: s.cubic.q,
            r: s.cubic.r,
            verdict: s.verdict.into(),
            margin_p: s.margins.p,
            margin_r: s.margins.r,
            margin_pq_minus_r: s.margins.pq_minus_r,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvLyapunovCoeffs {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl From<RvLyapunovCoeffs> for LyapunovCoeffs {
    fn from(c: RvLyapunovCoeffs) -> Self {
        LyapunovCoeffs::new(c.a, c.b, c.d)
    }
}

impl From<LyapunovCoeffs> for RvLyapunovCoeffs {
    fn from(c: LyapunovCoeffs) -> Self {
        RvLyapunovCoeffs {
            a: c.a,
            b: c.b,
            d: c.d,
        }
    }
}

/// Symmetric form in `(V, I, C)` deviation order with its leading minors.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RvOmegaForm {
    pub w11: f64,
    pub w22: f64,
    pub w33: f64,
    pub w12: f64,
    pub w13: f64,
    pub w23: f64,
    pub evaluated_at: RvState,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl From<&OmegaForm> for RvOmegaForm {
    fn from(f: &OmegaForm) -> Self {
        RvOmegaForm {
            w11: f.w11,
            w22: f.w22,
            w33: f.w33,
            w12: f.w12,
            w13: f.w13,
            w23: f.w23,
            evaluated_at: f.evaluated_at.into(),
            d1: f.minors.d1,
            d2: f.minors.d2,
            d3: f.minors.d3,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvCondition4 {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub variant: RvCondition4Variant,
}

impl From<&Condition4Report> for RvCondition4 {
    fn from(c: &Condition4Report) -> Self {
        RvCondition4 {
            lhs: c.lhs,
            rhs: c.rhs,
            holds: c.holds,
            variant: match c.variant {
                Condition4Variant::Corrected => RvCondition4Variant::Corrected,
                Condition4Variant::AsWritten => RvCondition4Variant::AsWritten,
            },
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvIntegrationOptions {
    pub t_end: f64,
    pub dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub mode: RvIntegrationMode,
    pub max_steps: u64,
}

impl From<RvIntegrationOptions> for IntegrationOptions {
    fn from(o: RvIntegrationOptions) -> Self {
        IntegrationOptions {
            t_end: o.t_end,
            dt: o.dt,
            rel_tol: o.rel_tol,
            abs_tol: o.abs_tol,
            mode: match o.mode {
                RvIntegrationMode::FixedRk4 => IntegrationMode::FixedRk4,
                RvIntegrationMode::AdaptiveRk4 => IntegrationMode::AdaptiveRk4,
            },
            max_steps: usize::try_from(o.max_steps).unwrap_or(usize::MAX),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvSweepCell {
    pub alpha: f64,
    pub k: f64,
    pub inner_exists: bool,
    pub rh_verdict: RvVerdict,
    pub sylvester_pd: bool,
    pub cond4_as_written: bool,
    pub cond4_corrected: bool,
}

impl From<&SweepCell> for RvSweepCell {
    fn from(c: &SweepCell) -> Self {
        RvSweepCell {
            alpha: c.alpha,
            k: c.k,
            inner_exists: c.inner_exists,
            rh_verdict: c.rh_verdict.map_or(RvVerdict::None, Into::into),
            sylvester_pd: c.sylvester_pd,
            cond4_as_written: c.cond4_as_written,
            cond4_corrected: c.cond4_corrected,
        }
    }
}
