//! Chi-squared tail probabilities in log space.

use crate::error::{Error, Result};

const MAX_ITER: usize = 1_000_000;
const FPMIN: f64 = 1e-300;

/// `ln Gamma(x)` for `x > 0`.
///
/// Stirling series for `x >= 15`; smaller arguments are shifted up with the
/// recurrence `Gamma(x + 1) = x Gamma(x)`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    (z - 0.5) * z.ln() - z + 0.5 * (std::f64::consts::TAU).ln() + series - shift
}

/// `(ln P(a, x), ln Q(a, x))` for the regularized incomplete gamma functions.
///
/// The series for `P` is used when `x < a + 1` and the continued fraction for
/// `Q` otherwise; the complementary value comes from `ln_1p(-exp(.))`.
pub fn ln_gamma_inc_pair(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x == f64::INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    let ln_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let ln_p = ln_prefactor + series_sum(a, x).ln();
        (ln_p, ln_1m_exp(ln_p))
    } else {
        let ln_q = ln_prefactor + continued_fraction(a, x).ln();
        (ln_1m_exp(ln_q), ln_q)
    }
}

/// `sum_{n>=0} x^n / (a (a+1) ... (a+n))`.
fn series_sum(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the continued fraction for `Q(a, x) e^x x^-a Gamma(a)`.
fn continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// `ln(1 - e^l)` for `l <= 0`.
fn ln_1m_exp(l: f64) -> f64 {
    if l > -std::f64::consts::LN_2 {
        (-l.exp_m1()).ln()
    } else {
        (-l.exp()).ln_1p()
    }
}

fn check_chi2_args(t: f64, dof: usize) -> Result<()> {
    if dof == 0 {
        return Err(Error::invalid(
            "dof",
            "degrees of freedom must be at least 1",
        ));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::invalid(
            "t",
            format!("{t} is not a non-negative number"),
        ));
    }
    Ok(())
}

/// `ln P(chi^2(dof) <= t)`; `-inf` at `t = 0`.
pub fn chi2_log_cdf(t: f64, dof: usize) -> Result<f64> {
    check_chi2_args(t, dof)?;
    Ok(ln_gamma_inc_pair(dof as f64 / 2.0, t / 2.0).0)
}

/// `ln P(chi^2(dof) > t)`; `0` at `t = 0`.
pub fn chi2_log_sf(t: f64, dof: usize) -> Result<f64> {
    check_chi2_args(t, dof)?;
    Ok(ln_gamma_inc_pair(dof as f64 / 2.0, t / 2.0).1)
}

/// Mode of `chi^2(dof)`, which is `dof - 2`. Rejects `dof < 3`, where the
/// density peaks at 0 or is unbounded.
pub fn chi2_mode(dof: usize) -> Result<f64> {
    if dof < 3 {
        return Err(Error::invalid(
            "dof",
            format!("chi-squared mode is only taken for D >= 3, got {dof}"),
        ));
    }
    Ok((dof - 2) as f64)
}

/// `ln` of the `chi^2(dof)` density at `t > 0`.
pub fn chi2_log_pdf(t: f64, dof: usize) -> f64 {
    let k = dof as f64 / 2.0;
    (k - 1.0) * t.ln() - t / 2.0 - k * std::f64::consts::LN_2 - ln_gamma(k)
}
