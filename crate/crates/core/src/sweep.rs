//! Stability map over the `(alpha, k)` plane and empirical margins below
//! which the inner equilibrium is stable.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::inner_equilibrium;
use crate::error::{Error, Result};
use crate::lyapunov::{condition4, log_space, search_coeffs, Condition4Variant};
use crate::model::ModelParams;
use crate::stability::{classify_equilibrium, Verdict};

/// Lower end of the `alpha` range scanned by [`find_alpha_margin`].
pub const ALPHA_LO: f64 = 1e-6;

/// Number of log-spaced probes used to locate the first transition before
/// bisecting.
pub const MARGIN_SCAN_POINTS: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub alpha_values: Vec<f64>,
    pub k_values: Vec<f64>,
    /// Parameters shared by all cells; `alpha` and `k` are overridden.
    pub base: ModelParams,
}

impl SweepGrid {
    pub fn new(base: ModelParams, alpha_values: Vec<f64>, k_values: Vec<f64>) -> Self {
        Self {
            alpha_values,
            k_values,
            base,
        }
    }

    /// `na x nk` grid with both axes log-spaced between their end points.
    pub fn log_spaced(base: ModelParams, alpha: (f64, f64, usize), k: (f64, f64, usize)) -> Self {
        Self::new(
            base,
            log_space(alpha.0, alpha.1, alpha.2),
            log_space(k.0, k.1, k.2),
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for (name, axis) in [("alpha", &self.alpha_values), ("k", &self.k_values)] {
            if axis.is_empty() {
                return Err(Error::InvalidGrid(format!("{name} axis is empty")));
            }
            if axis.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidGrid(format!(
                    "{name} axis values must be positive and finite"
                )));
            }
            if axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidGrid(format!(
                    "{name} axis must be strictly increasing"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub k: f64,
    pub inner_exists: bool,
    /// `None` when there is no inner equilibrium.
    pub rh_verdict: Option<Verdict>,
    pub sylvester_pd: bool,
    pub cond4_as_written: bool,
    pub cond4_corrected: bool,
}

impl SweepCell {
    pub fn is_stable(&self) -> bool {
        self.inner_exists && self.rh_verdict == Some(Verdict::Stable)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub alpha_values: Vec<f64>,
    pub k_values: Vec<f64>,
    /// `cells[ia][ik]`
    pub cells: Vec<Vec<SweepCell>>,
    pub alpha0: Option<f64>,
    pub k0: Option<f64>,
}

impl SweepResult {
    pub fn cell(&self, ia: usize, ik: usize) -> &SweepCell {
        &self.cells[ia][ik]
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().flatten()
    }

    /// Header, one row per cell in row-major (`alpha` outer) order, then
    /// `# alpha0=…,k0=…` when the stable rectangle is nonempty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "alpha,k,inner_exists,rh_verdict,sylvester_pd,cond4_as_written,cond4_corrected"
        )?;
        for cell in self.iter_cells() {
            writeln!(
                out,
                "{:.16e},{:.16e},{},{},{},{},{}",
                cell.alpha,
                cell.k,
                cell.inner_exists,
                cell.rh_verdict.map_or("none", Verdict::as_str),
                cell.sylvester_pd,
                cell.cond4_as_written,
                cell.cond4_corrected
            )?;
        }
        if let (Some(a0), Some(k0)) = (self.alpha0, self.k0) {
            writeln!(out, "# alpha0={a0:.16e},k0={k0:.16e}")?;
        }
        Ok(())
    }
}

/// Full analysis of a single parameter set.
pub fn evaluate_cell(params: &ModelParams) -> Result<SweepCell> {
    let mut cell = SweepCell {
        alpha: params.alpha,
        k: params.k,
        inner_exists: false,
        rh_verdict: None,
        sylvester_pd: false,
        cond4_as_written: false,
        cond4_corrected: false,
    };
    let Some(eq) = inner_equilibrium(params)? else {
        return Ok(cell);
    };
    cell.inner_exists = true;
    cell.rh_verdict = Some(classify_equilibrium(params, &eq)?.verdict);
    cell.sylvester_pd = search_coeffs(params, &eq)?.is_some();
    cell.cond4_as_written = condition4(params, &eq, Condition4Variant::AsWritten)?.holds;
    cell.cond4_corrected = condition4(params, &eq, Condition4Variant::Corrected)?.holds;
    Ok(cell)
}

pub fn stability_map(grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    let (na, nk) = (grid.alpha_values.len(), grid.k_values.len());
    let flat = (0..na * nk)
        .into_par_iter()
        .map(|idx| {
            let (ia, ik) = (idx / nk, idx % nk);
            evaluate_cell(
                &grid
                    .base
                    .with_alpha_k(grid.alpha_values[ia], grid.k_values[ik]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<Vec<SweepCell>> = flat.chunks(nk).map(<[SweepCell]>::to_vec).collect();

    let (alpha0, k0) = match stable_rectangle(&cells) {
        Some((ia, ik)) => (Some(grid.alpha_values[ia]), Some(grid.k_values[ik])),
        None => (None, None),
    };
    Ok(SweepResult {
        alpha_values: grid.alpha_values.clone(),
        k_values: grid.k_values.clone(),
        cells,
        alpha0,
        k0,
    })
}

/// Largest all-stable index rectangle `[0..=ia] x [0..=ik]` by cell count;
/// ties go to the one with fewer `alpha` rows.
fn stable_rectangle(cells: &[Vec<SweepCell>]) -> Option<(usize, usize)> {
    let mut width = usize::MAX;
    let mut best: Option<(usize, usize, usize)> = None;
    for (ia, row) in cells.iter().enumerate() {
        let run = row.iter().take_while(|c| c.is_stable()).count();
        width = width.min(run);
        if width == 0 {
            break;
        }
        let area = (ia + 1) * width;
        if best.is_none_or(|(a, _, _)| area > a) {
            best = Some((area, ia, width - 1));
        }
    }
    best.map(|(_, ia, ik)| (ia, ik))
}

fn stable_at(base: &ModelParams, alpha: f64, k: f64) -> Result<bool> {
    let params = base.with_alpha_k(alpha, k);
    Ok(match inner_equilibrium(&params)? {
        Some(eq) => classify_equilibrium(&params, &eq)?.verdict == Verdict::Stable,
        None => false,
    })
}

/// Largest `alpha` before the first loss of a stable inner equilibrium on
/// `[1e-6, alpha_hi]` at fixed `k`.
///
/// A log-spaced scan locates the first unstable probe, then bisection
/// narrows the bracket to `1e-6 * alpha_hi`. Returns `alpha_hi` when every
/// probe is stable and `None` when `alpha = 1e-6` is already not stable.
pub fn find_alpha_margin(base: &ModelParams, k_fixed: f64, alpha_hi: f64) -> Result<Option<f64>> {
    base.validate()?;
    if !(k_fixed > 0.0 && k_fixed.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "k must be positive, got {k_fixed}"
        )));
    }
    if !(alpha_hi > ALPHA_LO && alpha_hi.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "alpha_hi must exceed {ALPHA_LO}, got {alpha_hi}"
        )));
    }
    if !stable_at(base, ALPHA_LO, k_fixed)? {
        return Ok(None);
    }
    let probes = log_space(ALPHA_LO, alpha_hi, MARGIN_SCAN_POINTS);
    let mut lo = ALPHA_LO;
    let mut hi = None;
    for &alpha in &probes[1..] {
        if stable_at(base, alpha, k_fixed)? {
            lo = alpha;
        } else {
            hi = Some(alpha);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(Some(alpha_hi));
    };
    let width = 1e-6 * alpha_hi;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if stable_at(base, mid, k_fixed)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}
