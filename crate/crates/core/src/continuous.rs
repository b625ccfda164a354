//! Choquet integrals of nonnegative functions on the real line.
//!
//! `(C)∫ g dμ = ∫_0^{sup g} μ({g ≥ α}) dα`, evaluated by adaptive quadrature
//! in `s = −ln α` so that the logarithmic growth of the level sets near
//! `α = 0` turns into an exponentially decaying integrand.

use std::cell::RefCell;

use thiserror::Error;

use crate::capacity::{CapacityError, Interval, IntervalUnion, Kernel, KernelFamily, RealCapacity};
use crate::function::{FunctionError, FunctionSpec};
use crate::quadrature::{self, Estimate, QuadratureConfig, QuadratureError};
use crate::special::{lambert_w0, lambert_wm1};

/// Span of `s = −ln α` covered below `−ln sup g`; the neglected tail weighs
/// `e^{-60}` relative to the peak.
pub const LOG_SPAN: f64 = 60.0;

const ROOT_TOL: f64 = 1e-12;
const MAX_REACH: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuousError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported integrand: {0}")]
    Capability(String),
    #[error("divergent integral: {0}")]
    Divergence(String),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaScale {
    Linear,
    Log,
}

/// A nonnegative function known through its values and its upper level
/// sets `{t : g(t) ≥ α}`.
pub trait LevelSetFunction {
    fn value(&self, t: f64) -> f64;

    /// `{t : g(t) ≥ α}` for `α > 0`.
    fn level_set(&self, alpha: f64) -> Result<IntervalUnion, ContinuousError>;

    fn sup_value(&self) -> f64;

    /// Levels at which the level set changes shape (components appear or
    /// merge, endpoints cross a kink).
    fn alpha_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn scale(&self) -> AlphaScale {
        AlphaScale::Log
    }
}

fn check_alpha(alpha: f64) -> Result<(), ContinuousError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(ContinuousError::Domain(format!(
            "level must be positive, got {alpha}"
        )));
    }
    Ok(())
}

fn check_kernel(n: f64, x: f64) -> Result<(), ContinuousError> {
    if !(n.is_finite() && n > 0.0 && x.is_finite()) {
        return Err(ContinuousError::Domain(format!(
            "kernel needs n > 0 and finite x, got n = {n}, x = {x}"
        )));
    }
    Ok(())
}

fn symmetric(x: f64, r: f64) -> IntervalUnion {
    IntervalUnion::from_intervals(vec![Interval {
        lo: x - r,
        hi: x + r,
    }])
}

/// `{t : e^{-n|t−x|} ≥ α}`.
pub fn level_set_laplace(n: f64, x: f64, alpha: f64) -> Result<IntervalUnion, ContinuousError> {
    check_kernel(n, x)?;
    check_alpha(alpha)?;
    if alpha > 1.0 {
        return Ok(IntervalUnion::empty());
    }
    Ok(symmetric(x, -alpha.ln() / n))
}

/// `{t : e^{-n(t−x)²} ≥ α}`.
pub fn level_set_gauss(n: f64, x: f64, alpha: f64) -> Result<IntervalUnion, ContinuousError> {
    check_kernel(n, x)?;
    check_alpha(alpha)?;
    if alpha > 1.0 {
        return Ok(IntervalUnion::empty());
    }
    Ok(symmetric(x, (-alpha.ln() / n).sqrt()))
}

pub fn kernel_level_set(kernel: &Kernel, alpha: f64) -> Result<IntervalUnion, ContinuousError> {
    match kernel.family {
        KernelFamily::Laplace => level_set_laplace(kernel.n, kernel.x, alpha),
        KernelFamily::Gauss => level_set_gauss(kernel.n, kernel.x, alpha),
    }
}

/// `{t : f(t)·K(t) ≥ α}`.
pub fn level_set_product(
    f: &FunctionSpec,
    kernel: &Kernel,
    alpha: f64,
) -> Result<IntervalUnion, ContinuousError> {
    KernelProduct::new(f.clone(), *kernel)?.level_set(alpha)
}

/// The bare kernel as an integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelFunction(pub Kernel);

impl LevelSetFunction for KernelFunction {
    fn value(&self, t: f64) -> f64 {
        self.0.value(t)
    }

    fn level_set(&self, alpha: f64) -> Result<IntervalUnion, ContinuousError> {
        kernel_level_set(&self.0, alpha)
    }

    fn sup_value(&self) -> f64 {
        1.0
    }
}

/// `height` on `[lo, hi]`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    height: f64,
    support: Interval,
}

impl Plateau {
    pub fn new(height: f64, lo: f64, hi: f64) -> Result<Self, ContinuousError> {
        if !(height.is_finite() && height >= 0.0) {
            return Err(ContinuousError::Domain(format!(
                "height must be finite and nonnegative, got {height}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(ContinuousError::Domain("support must be bounded".into()));
        }
        Ok(Plateau {
            height,
            support: Interval::new(lo, hi)?,
        })
    }
}

impl LevelSetFunction for Plateau {
    fn value(&self, t: f64) -> f64 {
        if self.support.contains(t) {
            self.height
        } else {
            0.0
        }
    }

    fn level_set(&self, alpha: f64) -> Result<IntervalUnion, ContinuousError> {
        check_alpha(alpha)?;
        if alpha > self.height {
            return Ok(IntervalUnion::empty());
        }
        Ok(IntervalUnion::from_intervals(vec![self.support]))
    }

    fn sup_value(&self) -> f64 {
        self.height
    }

    fn scale(&self) -> AlphaScale {
        AlphaScale::Linear
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    peak: f64,
    ln_peak: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Path {
    Scaled(f64),
    ExpLaplace { c: f64, lambda: f64 },
    ExpGauss { c: f64, lambda: f64 },
    Deviation,
    Generic(Vec<Piece>),
}

/// `g(t) = f(t)·K(t)` for a registered `f ≥ 0` and a Laplace or Gauss kernel.
///
/// Constants, exponentials and the deviation `|t − x|` centered at the
/// kernel peak have closed-form level sets. Every other admissible `f` is
/// log-concave between its kinks, so on each piece `g` is unimodal and the
/// level set is bracketed by bisection around the piece maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProduct {
    f: FunctionSpec,
    kernel: Kernel,
    path: Path,
    sup: f64,
}

impl KernelProduct {
    pub fn new(f: FunctionSpec, kernel: Kernel) -> Result<Self, ContinuousError> {
        Self::admissible(&f, &kernel)?;
        let (n, x) = (kernel.n, kernel.x);
        let closed = match (&f, kernel.family) {
            (FunctionSpec::Constant { value }, _) => Some((Path::Scaled(*value), *value)),
            (FunctionSpec::E0, _) => Some((Path::Scaled(1.0), 1.0)),
            (FunctionSpec::ExpNeg { scale, .. }, _) if *scale == 0.0 => {
                Some((Path::Scaled(0.0), 0.0))
            }
            (FunctionSpec::ExpNeg { lambda, scale }, KernelFamily::Laplace) => Some((
                Path::ExpLaplace {
                    c: *scale,
                    lambda: *lambda,
                },
                scale * (-lambda * x).exp(),
            )),
            (FunctionSpec::ExpNeg { lambda, scale }, KernelFamily::Gauss) => Some((
                Path::ExpGauss {
                    c: *scale,
                    lambda: *lambda,
                },
                scale * (-lambda * x + lambda * lambda / (4.0 * n)).exp(),
            )),
            (FunctionSpec::AbsDev { center }, family) if *center == x => {
                let sup = match family {
                    KernelFamily::Laplace => 1.0 / (n * std::f64::consts::E),
                    KernelFamily::Gauss => (-0.5f64).exp() / (2.0 * n).sqrt(),
                };
                Some((Path::Deviation, sup))
            }
            _ => None,
        };
        match closed {
            Some((path, sup)) => Ok(KernelProduct {
                f,
                kernel,
                path,
                sup,
            }),
            None => Self::with_generic_solver(f, kernel),
        }
    }

    /// Skips the closed forms and always brackets level sets numerically.
    pub fn with_generic_solver(f: FunctionSpec, kernel: Kernel) -> Result<Self, ContinuousError> {
        Self::admissible(&f, &kernel)?;
        let mut product = KernelProduct {
            f,
            kernel,
            path: Path::Generic(Vec::new()),
            sup: 0.0,
        };
        let pieces = product.pieces()?;
        product.sup = pieces.iter().map(|p| p.ln_peak.exp()).fold(0.0, f64::max);
        product.path = Path::Generic(pieces);
        Ok(product)
    }

    fn admissible(f: &FunctionSpec, kernel: &Kernel) -> Result<(), ContinuousError> {
        f.validate()?;
        check_kernel(kernel.n, kernel.x)?;
        if !f.nonnegative_on_real() {
            return Err(ContinuousError::Capability(format!(
                "`{}` takes negative values on the real line",
                f.name()
            )));
        }
        if let (FunctionSpec::ExpNeg { lambda, scale }, KernelFamily::Laplace) = (f, kernel.family)
        {
            if *scale > 0.0 && *lambda >= kernel.n {
                return Err(ContinuousError::Divergence(format!(
                    "e^(-{lambda}t)·e^(-{}|t-x|) does not decay as t → -∞; need n > {lambda}",
                    kernel.n
                )));
            }
        }
        Ok(())
    }

    pub fn function(&self) -> &FunctionSpec {
        &self.f
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Whether the level sets come from a closed form.
    pub fn is_closed_form(&self) -> bool {
        !matches!(self.path, Path::Generic(_))
    }

    fn ln_value(&self, t: f64) -> f64 {
        self.f.ln_eval(t) - self.kernel.log_decay((t - self.kernel.x).abs())
    }

    fn pieces(&self) -> Result<Vec<Piece>, ContinuousError> {
        let mut cuts = self.f.kinks();
        cuts.push(self.kernel.x);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(cuts);
        edges.push(f64::INFINITY);

        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let probe = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (false, true) => hi - 1.0,
                (true, false) => lo + 1.0,
                (false, false) => 0.0,
            };
            // an admissible f vanishing inside a piece vanishes on all of it
            if self.f.eval(probe) <= 0.0 {
                continue;
            }
            let (a, b) = self.bracket_peak(lo, hi, probe)?;
            let mut peak = golden_max(|t| self.ln_value(t), a, b);
            for end in [lo, hi] {
                if end.is_finite() && self.ln_value(end) > self.ln_value(peak) {
                    peak = end;
                }
            }
            pieces.push(Piece {
                lo,
                hi,
                peak,
                ln_peak: self.ln_value(peak),
            });
        }
        Ok(pieces)
    }

    /// Finite interval known to contain the maximum of the piece.
    fn bracket_peak(&self, lo: f64, hi: f64, probe: f64) -> Result<(f64, f64), ContinuousError> {
        let mut a = lo;
        let mut b = hi;
        if !b.is_finite() {
            let base = if a.is_finite() { a } else { probe };
            b = self.walk_until_descent(base, 1.0)?;
        }
        if !a.is_finite() {
            a = self.walk_until_descent(b, -1.0)?;
        }
        Ok((a, b))
    }

    fn walk_until_descent(&self, from: f64, dir: f64) -> Result<f64, ContinuousError> {
        let mut step = 1.0;
        while step < MAX_REACH {
            let near = self.ln_value(from + dir * step);
            let far = self.ln_value(from + dir * 2.0 * step);
            if far <= near {
                return Ok(from + dir * 2.0 * step);
            }
            step *= 2.0;
        }
        Err(ContinuousError::Divergence(format!(
            "{}·kernel keeps growing as t → {}",
            self.f.name(),
            if dir > 0.0 { "+∞" } else { "-∞" }
        )))
    }

    /// Outermost point on the ray from `peak` in direction `dir` (up to
    /// `limit`) where `ln g ≥ target`.
    fn crossing(
        &self,
        peak: f64,
        limit: f64,
        dir: f64,
        target: f64,
    ) -> Result<f64, ContinuousError> {
        if limit.is_finite() && self.ln_value(limit) >= target {
            return Ok(limit);
        }
        let mut outside = limit;
        if !limit.is_finite() {
            let mut step = 1.0;
            loop {
                let t = peak + dir * step;
                if self.ln_value(t) < target {
                    outside = t;
                    break;
                }
                step *= 2.0;
                if step > MAX_REACH {
                    return Err(ContinuousError::Divergence(format!(
                        "level set of {}·kernel is unbounded",
                        self.f.name()
                    )));
                }
            }
        }
        let mut inside = peak;
        while (outside - inside).abs() > ROOT_TOL * inside.abs().max(outside.abs()).max(1.0) {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if self.ln_value(mid) >= target {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    }

    fn generic_level_set(
        &self,
        pieces: &[Piece],
        alpha: f64,
    ) -> Result<IntervalUnion, ContinuousError> {
        let target = alpha.ln();
        let mut parts = Vec::new();
        for p in pieces {
            if p.ln_peak < target {
                continue;
            }
            let lo = self.crossing(p.peak, p.lo, -1.0, target)?;
            let hi = self.crossing(p.peak, p.hi, 1.0, target)?;
            parts.push(Interval { lo, hi });
        }
        Ok(IntervalUnion::from_intervals(parts))
    }

    fn deviation_level_set(&self, alpha: f64) -> IntervalUnion {
        let Kernel { family, n, x } = self.kernel;
        let (near, far) = match family {
            KernelFamily::Laplace => {
                let z = -n * alpha;
                (-lambert_w0(z) / n, -lambert_wm1(z) / n)
            }
            KernelFamily::Gauss => {
                let z = -2.0 * n * alpha * alpha;
                let y = |w: f64| (-w / (2.0 * n)).max(0.0).sqrt();
                (y(lambert_w0(z)), y(lambert_wm1(z)))
            }
        };
        if !(near.is_finite() && far.is_finite()) {
            return IntervalUnion::empty();
        }
        let near = near.min(far);
        IntervalUnion::from_intervals(vec![
            Interval {
                lo: x - far,
                hi: x - near,
            },
            Interval {
                lo: x + near,
                hi: x + far,
            },
        ])
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

impl LevelSetFunction for KernelProduct {
    fn value(&self, t: f64) -> f64 {
        self.f.eval(t) * self.kernel.value(t)
    }

    fn level_set(&self, alpha: f64) -> Result<IntervalUnion, ContinuousError> {
        check_alpha(alpha)?;
        if alpha > self.sup {
            return Ok(IntervalUnion::empty());
        }
        let Kernel { n, x, .. } = self.kernel;
        match &self.path {
            Path::Scaled(c) => kernel_level_set(&self.kernel, alpha / c),
            Path::ExpLaplace { c, lambda } => {
                let l = (alpha / c).ln();
                let lo = (n * x + l) / (n - lambda);
                let hi = (n * x - l) / (n + lambda);
                Ok(IntervalUnion::from_intervals(vec![Interval {
                    lo: lo.min(hi),
                    hi,
                }]))
            }
            Path::ExpGauss { c, lambda } => {
                let l = (c / alpha).ln();
                let r2 = (l - lambda * x + lambda * lambda / (4.0 * n)) / n;
                if r2 < 0.0 {
                    return Ok(IntervalUnion::empty());
                }
                Ok(symmetric(x - lambda / (2.0 * n), r2.sqrt()))
            }
            Path::Deviation => Ok(self.deviation_level_set(alpha)),
            Path::Generic(pieces) => self.generic_level_set(pieces, alpha),
        }
    }

    fn sup_value(&self) -> f64 {
        self.sup
    }

    fn alpha_breakpoints(&self) -> Vec<f64> {
        match &self.path {
            Path::Generic(pieces) => {
                let mut out: Vec<f64> = pieces.iter().map(|p| p.ln_peak.exp()).collect();
                for p in pieces {
                    for end in [p.lo, p.hi] {
                        if end.is_finite() {
                            out.push(self.value(end));
                        }
                    }
                }
                out.retain(|a| *a > 0.0 && *a < self.sup);
                out
            }
            _ => Vec::new(),
        }
    }
}

/// `(C)∫ g dμ = ∫_0^{sup g} μ({g ≥ α}) dα`.
pub fn choquet_integral_real<G: LevelSetFunction + ?Sized>(
    g: &G,
    mu: &RealCapacity,
    q: &QuadratureConfig,
) -> Result<Estimate, ContinuousError> {
    q.validate()?;
    let sup = g.sup_value();
    if !sup.is_finite() {
        return Err(ContinuousError::Divergence(format!(
            "integrand supremum is {sup}"
        )));
    }
    if sup <= 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    let failure = RefCell::new(None);
    let h = |alpha: f64| match g.level_set(alpha) {
        Ok(set) => mu.evaluate(&set),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut breaks = g.alpha_breakpoints();
    // μ(F_α) has a kink where the level set starts to cover the peak of μ
    if let RealCapacity::Possibility { kernel } = mu {
        let at_peak = g.value(kernel.x);
        if at_peak > 0.0 && at_peak < sup {
            breaks.push(at_peak);
        }
    }
    let result = match g.scale() {
        AlphaScale::Linear => quadrature::integrate(h, 0.0, sup, &breaks, q),
        AlphaScale::Log => {
            let s0 = -sup.ln();
            let cuts: Vec<f64> = breaks.iter().map(|a| -a.ln()).collect();
            quadrature::integrate(
                |s: f64| {
                    let alpha = (-s).exp();
                    h(alpha) * alpha
                },
                s0,
                s0 + LOG_SPAN,
                &cuts,
                q,
            )
        }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(result?)
}

/// `c(n, x) = (C)∫ K dμ`, the normalizer of a kernel operator.
///
/// A possibility capacity peaking at the kernel center gives every level set
/// full measure, so the value is exactly 1.
pub fn normalizer_c(
    kernel: &Kernel,
    mu: &RealCapacity,
    q: &QuadratureConfig,
) -> Result<f64, ContinuousError> {
    check_kernel(kernel.n, kernel.x)?;
    if let RealCapacity::Possibility { kernel: k } = mu {
        if k.x == kernel.x {
            return Ok(1.0);
        }
    }
    Ok(choquet_integral_real(&KernelFunction(*kernel), mu, q)?.value)
}

/// Whether `f·K` has a finite Choquet integral against bounded capacities.
pub fn decays(f: &FunctionSpec, kernel: &Kernel) -> bool {
    KernelProduct::new(f.clone(), *kernel).is_ok()
}
