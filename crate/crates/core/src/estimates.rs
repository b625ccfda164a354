//! Error functionals: modulus of continuity, the `[1 + T_n(φ_x)(x)/δ]·ω₁`
//! bound, the Choquet–Chebyshev inequality and Feller-scheme moments.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::capacity::{Capacity, DiscreteCapacity};
use crate::discrete::{
    choquet_expectance, choquet_integral, choquet_variance, ChoquetError, DiscreteFunction,
};
use crate::function::FunctionSpec;
use crate::operators::{Domain, FellerScheme, Operator, OperatorError};

/// Smallest accepted grid for the sampled modulus.
pub const MIN_RESOLUTION: usize = 1000;
pub const CHEBYSHEV_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Choquet(#[from] ChoquetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    /// `ω₁(f; δ)` on the window, from the function's exact rule.
    pub value: f64,
    /// Grid supremum; never above `value`.
    pub grid_value: f64,
    /// Change of the grid supremum when the grid is refined once.
    pub refinement_delta: f64,
    pub window: (f64, f64),
    pub resolution: usize,
}

/// `sup{|f(t_i) − f(t_j)| : |i − j|·h ≤ δ}` on `resolution` equispaced points.
pub fn grid_modulus(
    f: impl Fn(f64) -> f64,
    delta: f64,
    window: (f64, f64),
    resolution: usize,
) -> f64 {
    let (a, b) = window;
    let h = (b - a) / (resolution - 1) as f64;
    let w = ((delta / h) * (1.0 + 1e-12)).floor() as usize;
    let vals: Vec<f64> = (0..resolution).map(|k| f(a + k as f64 * h)).collect();
    let mut hi: VecDeque<usize> = VecDeque::new();
    let mut lo: VecDeque<usize> = VecDeque::new();
    let mut best: f64 = 0.0;
    for (j, &v) in vals.iter().enumerate() {
        while hi.back().is_some_and(|&k| vals[k] <= v) {
            hi.pop_back();
        }
        hi.push_back(j);
        while lo.back().is_some_and(|&k| vals[k] >= v) {
            lo.pop_back();
        }
        lo.push_back(j);
        let start = j.saturating_sub(w);
        while hi.front().is_some_and(|&k| k < start) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&k| k < start) {
            lo.pop_front();
        }
        best = best.max(vals[hi[0]] - vals[lo[0]]);
    }
    best
}

/// `ω₁(f; δ)` on `window`, with a grid cross-check.
pub fn modulus_of_continuity(
    f: &FunctionSpec,
    delta: f64,
    window: (f64, f64),
    resolution: usize,
) -> Result<ModulusEstimate, EstimateError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(EstimateError::Domain(format!(
            "δ must be positive, got {delta}"
        )));
    }
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(EstimateError::Domain(format!(
            "window [{a}, {b}] must be a nonempty bounded interval"
        )));
    }
    if resolution < MIN_RESOLUTION {
        return Err(EstimateError::Domain(format!(
            "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let coarse = grid_modulus(|t| f.eval(t), delta, window, resolution);
    let fine = grid_modulus(|t| f.eval(t), delta, window, 2 * resolution - 1);
    Ok(ModulusEstimate {
        value: f.modulus(delta, a, b).max(fine),
        grid_value: fine,
        refinement_delta: fine - coarse,
        window,
        resolution: 2 * resolution - 1,
    })
}

/// `[1 + T_n(φ_x)(x)/δ]·ω₁(f; δ)`.
pub fn quantitative_bound(tn_phi_x: f64, delta: f64, omega: f64) -> Result<f64, EstimateError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(EstimateError::Domain(format!(
            "δ must be positive, got {delta}"
        )));
    }
    Ok((1.0 + tn_phi_x / delta) * omega)
}

/// `δ = T_n(φ_x)(x)` when positive, else `1/n`.
pub fn select_delta(tn_phi_x: f64, n: usize) -> f64 {
    if tn_phi_x > 0.0 {
        tn_phi_x
    } else {
        1.0 / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevOutcome {
    /// `μ({|X − E_Ch X| ≥ r})`
    pub lhs: f64,
    /// `VAR_Ch(X) / r²`
    pub rhs: f64,
    pub holds: bool,
}

pub fn chebyshev_check(
    x: &DiscreteFunction,
    mu: &DiscreteCapacity,
    r: f64,
) -> Result<ChebyshevOutcome, EstimateError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(EstimateError::Domain(format!(
            "r must be positive, got {r}"
        )));
    }
    let mean = choquet_expectance(x, mu)?;
    let far = x
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| (*v - mean).abs() >= r)
        .map(|(i, _)| i)
        .collect();
    let lhs = mu.measure(far);
    let rhs = choquet_variance(x, mu)? / (r * r);
    Ok(ChebyshevOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + CHEBYSHEV_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FellerDiagnostics {
    /// `α_{n,x} = E_Ch(Z(n,x))`
    pub alpha_nx: f64,
    /// `σ²_{n,x} = (C)∫ (Z(n,x) − α_{n,x})² dμ_{n,x}`
    pub sigma2_nx: f64,
}

pub fn feller_diagnostics<S: FellerScheme + ?Sized>(
    scheme: &S,
    n: usize,
    x: f64,
) -> Result<FellerDiagnostics, EstimateError> {
    let mu = scheme.capacity(n, x)?;
    if !mu.is_normalized() {
        return Err(EstimateError::Domain(format!(
            "{} capacity at n = {n}, x = {x} is not normalized",
            scheme.name()
        )));
    }
    let z = scheme.variable(n, x)?;
    let alpha = choquet_expectance(&z, &mu)?;
    let sigma2 = choquet_integral(&z.map(|v| (v - alpha).powi(2))?, &mu)?;
    Ok(FellerDiagnostics {
        alpha_nx: alpha,
        sigma2_nx: sigma2.max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub n: usize,
    pub x: f64,
    pub value: f64,
    pub f_x: f64,
    pub abs_error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub operator: String,
    pub function: String,
    /// Window on which `ω₁` is taken.
    pub window: (f64, f64),
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// `(n, max_x |T_n(f)(x) − f(x)|)` in the order the degrees were given.
    pub fn max_errors(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for row in &self.rows {
            match out.iter_mut().find(|(n, _)| *n == row.n) {
                Some(slot) => slot.1 = slot.1.max(row.abs_error),
                None => out.push((row.n, row.abs_error)),
            }
        }
        out
    }

    /// Consecutive degree pairs along which the max error failed to drop.
    pub fn non_decreasing_steps(&self) -> Vec<(usize, usize)> {
        self.max_errors()
            .windows(2)
            .filter(|w| w[1].1 >= w[0].1)
            .map(|w| (w[0].0, w[1].0))
            .collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.non_decreasing_steps().is_empty()
    }

    /// Rows where the error exceeds the bound by more than `tol`.
    pub fn bound_violations(&self, tol: f64) -> Vec<&ErrorRow> {
        self.rows
            .iter()
            .filter(|r| r.abs_error > r.bound + tol)
            .collect()
    }
}

/// Window for `ω₁`: the hull of the grid and the kinks of `f`, widened by 1
/// on both sides, clipped to the operator's domain.
pub fn modulus_window(domain: Domain, xs: &[f64], f: &FunctionSpec) -> (f64, f64) {
    let kinks = f.kinks();
    let points = xs.iter().chain(&kinks).copied();
    let lo = points.clone().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = points.fold(f64::NEG_INFINITY, f64::max) + 1.0;
    match domain {
        Domain::UnitInterval => (lo.max(0.0), hi.min(1.0)),
        Domain::RealLine => (lo, hi),
    }
}

/// One row per `(n, x)`, degrees outermost.
pub fn convergence_report(
    op: &dyn Operator,
    f: &FunctionSpec,
    n_list: &[usize],
    xs: &[f64],
) -> Result<ErrorTable, EstimateError> {
    if n_list.is_empty() || xs.is_empty() {
        return Err(EstimateError::Domain("empty degree list or grid".into()));
    }
    for &x in xs {
        op.domain().check(x)?;
    }
    let window = modulus_window(op.domain(), xs, f);
    let mut rows = Vec::with_capacity(n_list.len() * xs.len());
    for &n in n_list {
        for &x in xs {
            rows.push(error_row(op, f, n, x, window)?);
        }
    }
    Ok(ErrorTable {
        operator: op.name().to_string(),
        function: f.name().to_string(),
        window,
        rows,
    })
}

/// A single `(n, x)` row of [`convergence_report`].
pub fn error_row(
    op: &dyn Operator,
    f: &FunctionSpec,
    n: usize,
    x: f64,
    window: (f64, f64),
) -> Result<ErrorRow, EstimateError> {
    let value = op.apply(f, n, x)?;
    let f_x = f.eval(x);
    let tn = op.absolute_moment(n, x)?;
    let delta = select_delta(tn, n);
    let omega = modulus_of_continuity(f, delta, window, MIN_RESOLUTION)?.value;
    Ok(ErrorRow {
        n,
        x,
        value,
        f_x,
        abs_error: (value - f_x).abs(),
        bound: quantitative_bound(tn, delta, omega)?,
    })
}
