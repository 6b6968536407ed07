//! Local stability of an equilibrium from its linearization, decided by the
//! Routh–Hurwitz conditions for a monic cubic.

use serde::{Deserialize, Serialize};

use crate::equilibria::Equilibrium;
use crate::error::Result;
use crate::model::{char_cubic, jacobian, CubicCoeffs, ModelParams};

/// Width of the band around zero in which a Routh–Hurwitz quantity counts
/// as zero.
pub const MARGINAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
            Self::Marginal => "marginal",
        }
    }
}

/// The three Routh–Hurwitz quantities `p`, `r` and `pq - r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurwitzMargins {
    pub p: f64,
    pub r: f64,
    pub pq_minus_r: f64,
}

impl HurwitzMargins {
    pub fn as_array(&self) -> [f64; 3] {
        [self.p, self.r, self.pq_minus_r]
    }

    /// Smallest of the three quantities.
    pub fn min(&self) -> f64 {
        self.p.min(self.r).min(self.pq_minus_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub cubic: CubicCoeffs,
    pub verdict: Verdict,
    pub margins: HurwitzMargins,
}

/// Serialized form: `{p, q, r, verdict, margins}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub verdict: Verdict,
    pub margins: HurwitzMargins,
}

impl From<&StabilityReport> for StabilityRecord {
    fn from(rep: &StabilityReport) -> Self {
        Self {
            p: rep.cubic.p,
            q: rep.cubic.q,
            r: rep.cubic.r,
            verdict: rep.verdict,
            margins: rep.margins,
        }
    }
}

/// All roots of `λ³ + pλ² + qλ + r` lie in the open left half-plane iff
/// `p > 0`, `r > 0` and `pq > r`.
pub fn routh_hurwitz_cubic(cubic: CubicCoeffs) -> StabilityReport {
    let margins = HurwitzMargins {
        p: cubic.p,
        r: cubic.r,
        pq_minus_r: cubic.p * cubic.q - cubic.r,
    };
    let values = margins.as_array();
    let verdict = if values.iter().any(|&x| x < -MARGINAL_TOL) {
        Verdict::Unstable
    } else if values.iter().all(|&x| x > MARGINAL_TOL) {
        Verdict::Stable
    } else {
        Verdict::Marginal
    };
    StabilityReport {
        cubic,
        verdict,
        margins,
    }
}

pub fn classify_equilibrium(params: &ModelParams, eq: &Equilibrium) -> Result<StabilityReport> {
    params.validate()?;
    Ok(routh_hurwitz_cubic(char_cubic(&jacobian(
        params, &eq.point,
    ))))
}
