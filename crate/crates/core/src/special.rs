//! Real branches of the Lambert W function, used to invert `y·e^{-ny} = α`.

use std::f64::consts::E;

const BRANCH_POINT: f64 = -1.0 / E;

fn halley(z: f64, mut w: f64) -> f64 {
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

fn branch_series(z: f64, sign: f64) -> f64 {
    let p = sign * (2.0 * (E * z + 1.0)).max(0.0).sqrt();
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
}

/// Principal branch `W_0` on `[-1/e, ∞)`; NaN below the branch point.
pub fn lambert_w0(z: f64) -> f64 {
    if z.is_nan() || z < BRANCH_POINT - 1e-15 {
        return f64::NAN;
    }
    if z <= BRANCH_POINT {
        return -1.0;
    }
    if z == 0.0 {
        return 0.0;
    }
    let guess = if z < -0.25 {
        branch_series(z, 1.0)
    } else if z < 3.0 {
        // Padé-like start that is good on [-0.25, 3]
        z / (1.0 + z).max(0.3).sqrt()
    } else {
        let l = z.ln();
        l - l.ln()
    };
    halley(z, guess)
}

/// Lower branch `W_{-1}` on `[-1/e, 0)`; NaN elsewhere.
pub fn lambert_wm1(z: f64) -> f64 {
    if !(BRANCH_POINT - 1e-15..0.0).contains(&z) {
        return f64::NAN;
    }
    if z <= BRANCH_POINT {
        return -1.0;
    }
    let guess = if z < -0.25 {
        branch_series(z, -1.0)
    } else {
        let l = (-z).ln();
        l - (-l).ln()
    };
    halley(z, guess)
}
