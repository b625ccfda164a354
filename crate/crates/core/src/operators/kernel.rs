use crate::capacity::{Kernel, RealCapacity};
use crate::continuous::{choquet_integral_real, normalizer_c, ContinuousError, KernelProduct};
use crate::function::FunctionSpec;
use crate::quadrature::{self, QuadratureConfig};

use super::OperatorError;

/// The classical Picard integral is taken on `|t − x| ≤ PICARD_WINDOW / r`
/// where `r` is the decay rate of `f·K`; the discarded tail is below
/// `e^{-PICARD_WINDOW}` relative to the integrand scale.
pub const PICARD_WINDOW: f64 = 40.0;

/// `(1/c(n,x))·(C)∫ f(t) K(t) dμ(t)` for any kernel.
pub fn kernel_choquet(
    f: &FunctionSpec,
    kernel: Kernel,
    mu: &RealCapacity,
    q: &QuadratureConfig,
) -> Result<f64, OperatorError> {
    let g = KernelProduct::new(f.clone(), kernel)?;
    let num = choquet_integral_real(&g, mu, q)?.value;
    let c = normalizer_c(&kernel, mu, q)?;
    Ok(num / c)
}

/// `T_n(f)(x)` with the kernel `e^{-n|t−x|}`.
pub fn picard_choquet(
    f: &FunctionSpec,
    n: f64,
    x: f64,
    mu: &RealCapacity,
    q: &QuadratureConfig,
) -> Result<f64, OperatorError> {
    kernel_choquet(f, Kernel::laplace(n, x)?, mu, q)
}

/// `W_n(f)(x)` with the kernel `e^{-n(t−x)²}`.
pub fn weierstrass_choquet(
    f: &FunctionSpec,
    n: f64,
    x: f64,
    mu: &RealCapacity,
    q: &QuadratureConfig,
) -> Result<f64, OperatorError> {
    kernel_choquet(f, Kernel::gauss(n, x)?, mu, q)
}

/// `P_n(f)(x) = (n/2)∫ f(t) e^{-n|t−x|} dt`.
pub fn picard_classical(
    f: &FunctionSpec,
    n: f64,
    x: f64,
    q: &QuadratureConfig,
) -> Result<f64, OperatorError> {
    let k = Kernel::laplace(n, x)?;
    f.validate()?;
    let rate = match f {
        FunctionSpec::ExpNeg { lambda, .. } => n - lambda.max(0.0),
        _ => n,
    };
    if rate <= 0.0 {
        return Err(ContinuousError::Divergence(format!(
            "{}·e^(-{n}|t-x|) is not integrable; need n > growth rate",
            f.name()
        ))
        .into());
    }
    let r = PICARD_WINDOW / rate;
    let mut cuts = f.kinks();
    cuts.push(x);
    let est = quadrature::integrate(|t| 0.5 * n * f.eval(t) * k.value(t), x - r, x + r, &cuts, q)?;
    Ok(est.value)
}
