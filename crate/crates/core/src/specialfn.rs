//! Scalar special functions evaluated in log space.

use crate::error::{domain, Error, Result};

const MAX_HALLEY_ITERS: usize = 50;

/// Branch selector for the real Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambertBranch {
    /// `W_0`, defined on `[-1/e, inf)`.
    Principal,
    /// `W_{-1}`, defined on `[-1/e, 0)`, values `<= -1`.
    Lower,
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma needs a finite x > 0, got {x}"));
    }
    Ok(libm::lgamma(x))
}

/// `ln n!`.
pub fn log_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln (2k-1)!!`, with `(-1)!! = 1`.
pub fn log_double_factorial_odd(k: u64) -> f64 {
    let k = k as f64;
    libm::lgamma(2.0 * k + 1.0) - k * std::f64::consts::LN_2 - libm::lgamma(k + 1.0)
}

/// `ln C(n, k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return domain(format!("log_binomial needs k <= n, got n={n}, k={k}"));
    }
    let m = k.min(n - k);
    if m < 64 {
        // Short products are summed directly; the gamma difference would
        // cancel badly for large n.
        let base = (n - m) as f64;
        let mut acc = 0.0;
        for i in 1..=m {
            acc += ((base + i as f64) / i as f64).ln();
        }
        return Ok(acc);
    }
    let (n, k) = (n as f64, k as f64);
    Ok(libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0))
}

/// Real Lambert W: the `w` on the requested branch with `w e^w = x`.
pub fn lambert_w(branch: LambertBranch, x: f64) -> Result<f64> {
    let branch_point = -(-1.0f64).exp();
    if !x.is_finite() || x < branch_point {
        return domain(format!("lambert_w argument {x} is below -1/e or not finite"));
    }
    if branch == LambertBranch::Lower && x >= 0.0 {
        return domain(format!("lower Lambert branch needs x in [-1/e, 0), got {x}"));
    }
    if x == branch_point {
        return Ok(-1.0);
    }
    if branch == LambertBranch::Principal && x == 0.0 {
        return Ok(0.0);
    }

    // Distance to the branch point, scaled so that the series in `q` is the
    // standard one around w = -1.
    let q = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
    let mut w = match branch {
        LambertBranch::Principal => {
            if x < -0.25 {
                -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q
            } else if x < 3.0 {
                // ln(1 + x) is a serviceable start on (-0.25, 3).
                x.ln_1p()
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        LambertBranch::Lower => {
            if x < -0.25 {
                -1.0 - q - q * q / 3.0 - 11.0 / 72.0 * q * q * q
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    };

    for _ in 0..MAX_HALLEY_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = w - step;
        let next = match branch {
            // Keep iterates on the requested side of the branch point.
            LambertBranch::Lower if next > -1.0 => (w - 1.0) / 2.0,
            LambertBranch::Principal if next < -1.0 => (w - 1.0) / 2.0,
            _ => next,
        };
        let done = (next - w).abs() <= 1e-14 * next.abs().max(1.0);
        w = next;
        if done {
            break;
        }
    }
    if !w.is_finite() {
        return Err(Error::Domain(format!("lambert_w failed to converge at x = {x}")));
    }
    Ok(w)
}

/// `ln Σ exp(v_i)`, computed with the maximum factored out.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return domain("log_sum_exp of an empty list");
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if max == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    Ok(max + sum.ln())
}
