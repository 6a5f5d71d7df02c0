//! Statistical checks on latents: norm typicality under `chi^2(D)`, Gaussian
//! log-densities, the spread of SLERP's `beta` for random endpoints, and Monte
//! Carlo checks that corrected combinations follow the prescribed law.
//!
//! Every seeded operation draws from [`rng`] substreams indexed by sample or
//! trial number, so results do not depend on how rayon schedules the work.

pub mod rng;
pub mod special;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::latent::{cog_transform, linear_combine, GaussianSpec, Latent, WeightVec, BETA_MIN};
use crate::schemes::slerp_weights;
use rng::SplitMix64;
pub use special::{chi2_log_cdf, chi2_log_sf, chi2_mode};

/// Trials accumulated per parallel work unit in [`check_cog_distribution`].
const TRIAL_CHUNK: usize = 64;

/// Norm and density diagnostics of one latent, in standardized coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypicalityReport {
    pub norm: f64,
    pub norm_sq: f64,
    pub norm_log_cdf: f64,
    pub norm_log_sf: f64,
    pub log_density: f64,
    /// Probability that a sample has log-density at or below this one.
    pub density_percentile: f64,
}

impl TypicalityReport {
    pub fn to_kv_line(&self) -> String {
        format!(
            "norm={} norm_sq={} norm_log_cdf={} norm_log_sf={} log_density={} density_percentile={}",
            fmt_f64(self.norm),
            fmt_f64(self.norm_sq),
            fmt_f64(self.norm_log_cdf),
            fmt_f64(self.norm_log_sf),
            fmt_f64(self.log_density),
            fmt_f64(self.density_percentile),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalEstimate {
    pub lo: f64,
    pub hi: f64,
    pub confidence: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl IntervalEstimate {
    pub fn to_kv_line(&self) -> String {
        format!(
            "lo={} hi={} confidence={} n_samples={} seed={}",
            fmt_f64(self.lo),
            fmt_f64(self.hi),
            fmt_f64(self.confidence),
            self.n_samples,
            self.seed
        )
    }
}

/// Outcome of a Monte Carlo distribution check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionCheck {
    pub dim: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub corrected: bool,
    pub alpha: f64,
    pub beta: f64,
    /// `max_d |mean_d - mu_d| / sigma_d`.
    pub max_std_mean_error: f64,
    /// `max_d |var_d / Sigma_dd - 1|`.
    pub max_rel_var_error: f64,
    pub mean_threshold: f64,
    pub var_threshold: f64,
    pub passed: bool,
    pub component_means: Vec<f64>,
    pub component_variances: Vec<f64>,
}

impl DistributionCheck {
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim={}", self.dim);
        let _ = writeln!(out, "n_trials={}", self.n_trials);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "corrected={}", self.corrected);
        let _ = writeln!(out, "alpha={}", fmt_f64(self.alpha));
        let _ = writeln!(out, "beta={}", fmt_f64(self.beta));
        let _ = writeln!(
            out,
            "max_std_mean_error={}",
            fmt_f64(self.max_std_mean_error)
        );
        let _ = writeln!(out, "max_rel_var_error={}", fmt_f64(self.max_rel_var_error));
        let _ = writeln!(out, "mean_threshold={}", fmt_f64(self.mean_threshold));
        let _ = writeln!(out, "var_threshold={}", fmt_f64(self.var_threshold));
        let _ = writeln!(out, "passed={}", self.passed);
        out
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// `ln N(x; mu, Sigma)` for diagonal `Sigma`.
pub fn gaussian_log_density(x: &Latent, spec: &GaussianSpec) -> Result<f64> {
    check_dim(spec.dim(), x.dim())?;
    let ln_tau = std::f64::consts::TAU.ln();
    let mut acc = 0.0;
    for (d, &v) in x.as_slice().iter().enumerate() {
        let var = spec.var_at(d);
        let diff = v - spec.mean_at(d);
        acc += ln_tau + var.ln() + diff * diff / var;
    }
    Ok(-0.5 * acc)
}

/// `sum_d (x_d - mu_d)^2 / Sigma_dd`.
fn standardized_norm_sq(x: &Latent, spec: &GaussianSpec) -> f64 {
    x.as_slice()
        .iter()
        .enumerate()
        .map(|(d, &v)| {
            let diff = v - spec.mean_at(d);
            diff * diff / spec.var_at(d)
        })
        .sum()
}

/// Typicality of `x` under `spec`.
///
/// The squared standardized norm of a sample follows `chi^2(D)`, and the
/// log-density is a decreasing function of it, so the density percentile is
/// the `chi^2(D)` upper tail at the observed squared norm.
pub fn typicality_report(x: &Latent, spec: &GaussianSpec) -> Result<TypicalityReport> {
    check_dim(spec.dim(), x.dim())?;
    let norm_sq = standardized_norm_sq(x, spec);
    let dof = spec.dim();
    let norm_log_cdf = chi2_log_cdf(norm_sq, dof)?;
    let norm_log_sf = chi2_log_sf(norm_sq, dof)?;
    Ok(TypicalityReport {
        norm: norm_sq.sqrt(),
        norm_sq,
        norm_log_cdf,
        norm_log_sf,
        log_density: gaussian_log_density(x, spec)?,
        density_percentile: norm_log_sf.exp(),
    })
}

/// `count` i.i.d. draws from `spec`; latent `i` uses substream `i` of `seed`.
pub fn sample_latents(spec: &GaussianSpec, count: usize, seed: u64) -> Vec<Latent> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut g = SplitMix64::substream(seed, i as u64);
            draw(spec, &mut g)
        })
        .collect()
}

fn draw(spec: &GaussianSpec, g: &mut SplitMix64) -> Latent {
    let mut v = vec![0.0; spec.dim()];
    g.fill_normal(&mut v);
    for (d, x) in v.iter_mut().enumerate() {
        *x = spec.mean_at(d) + spec.std_at(d) * *x;
    }
    Latent::from_raw(v)
}

/// Empirical quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Central `confidence` interval of the SLERP `beta` at parameter `v` for
/// endpoint pairs drawn from `N(0, I_dim)`.
///
/// Pair `i` draws `x1` then `x2` from substream `i` of `seed`. The interval is
/// the empirical `(1 - c)/2` and `(1 + c)/2` quantiles of the sampled `beta`s.
pub fn estimate_slerp_beta_ci(
    dim: usize,
    n_samples: usize,
    v: f64,
    confidence: f64,
    seed: u64,
) -> Result<IntervalEstimate> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be at least 1"));
    }
    if n_samples < 100 {
        return Err(Error::invalid(
            "n_samples",
            format!("need at least 100, got {n_samples}"),
        ));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(
            "confidence",
            format!("{confidence} is not in (0, 1)"),
        ));
    }
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid("v", format!("{v} is outside [0, 1]")));
    }
    let mut betas = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut g = SplitMix64::substream(seed, i as u64);
            let mut a = vec![0.0; dim];
            let mut b = vec![0.0; dim];
            g.fill_normal(&mut a);
            g.fill_normal(&mut b);
            let w = slerp_weights(v, &Latent::from_raw(a), &Latent::from_raw(b))?;
            Ok(w.beta())
        })
        .collect::<Result<Vec<f64>>>()?;
    betas.sort_by(f64::total_cmp);
    Ok(IntervalEstimate {
        lo: quantile_sorted(&betas, (1.0 - confidence) / 2.0),
        hi: quantile_sorted(&betas, (1.0 + confidence) / 2.0),
        confidence,
        n_samples,
        seed,
    })
}

/// Monte Carlo check that the corrected combination with weights `w` of
/// fresh i.i.d. draws follows `spec`.
///
/// Passes iff the largest standardized mean error is at most `5 / sqrt(n)`
/// and the largest relative variance error is at most 0.1. The thresholds are
/// calibrated for `n_trials >= 20000`.
pub fn check_cog_distribution(
    spec: &GaussianSpec,
    w: &[f64],
    n_trials: usize,
    seed: u64,
) -> Result<DistributionCheck> {
    check_distribution(spec, w, n_trials, seed, true)
}

/// Same as [`check_cog_distribution`] on the raw, uncorrected combination.
/// Fails whenever `beta` is far from 1 or `alpha mu` differs from `mu`.
pub fn check_uncorrected_distribution(
    spec: &GaussianSpec,
    w: &[f64],
    n_trials: usize,
    seed: u64,
) -> Result<DistributionCheck> {
    check_distribution(spec, w, n_trials, seed, false)
}

fn check_distribution(
    spec: &GaussianSpec,
    w: &[f64],
    n_trials: usize,
    seed: u64,
    corrected: bool,
) -> Result<DistributionCheck> {
    let weights = WeightVec::new(w.to_vec())?;
    if weights.beta() <= BETA_MIN {
        return Err(Error::DegenerateWeights {
            beta: weights.beta(),
            min: BETA_MIN,
        });
    }
    if n_trials < 2 {
        return Err(Error::invalid("n_trials", "need at least 2 trials"));
    }
    let dim = spec.dim();
    let k = weights.len();
    let n_chunks = n_trials.div_ceil(TRIAL_CHUNK);

    // Per chunk: sums of (z - mu) and (z - mu)^2 per component.
    let partials = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut s1 = vec![0.0; dim];
            let mut s2 = vec![0.0; dim];
            let start = c * TRIAL_CHUNK;
            let end = (start + TRIAL_CHUNK).min(n_trials);
            for t in start..end {
                let mut g = SplitMix64::substream(seed, t as u64);
                let xs: Vec<Latent> = (0..k).map(|_| draw(spec, &mut g)).collect();
                let y = linear_combine(&xs, &weights)?;
                let z = if corrected {
                    cog_transform(&y, &weights, spec)?
                } else {
                    y
                };
                for (d, &v) in z.as_slice().iter().enumerate() {
                    let diff = v - spec.mean_at(d);
                    s1[d] += diff;
                    s2[d] += diff * diff;
                }
            }
            Ok((s1, s2))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut s1 = vec![0.0; dim];
    let mut s2 = vec![0.0; dim];
    for (p1, p2) in &partials {
        for d in 0..dim {
            s1[d] += p1[d];
            s2[d] += p2[d];
        }
    }

    let n = n_trials as f64;
    let mut means = Vec::with_capacity(dim);
    let mut vars = Vec::with_capacity(dim);
    let mut max_mean_err = 0.0f64;
    let mut max_var_err = 0.0f64;
    for d in 0..dim {
        let centered_mean = s1[d] / n;
        let var = (s2[d] - n * centered_mean * centered_mean) / (n - 1.0);
        means.push(spec.mean_at(d) + centered_mean);
        vars.push(var);
        max_mean_err = max_mean_err.max(centered_mean.abs() / spec.std_at(d));
        max_var_err = max_var_err.max((var / spec.var_at(d) - 1.0).abs());
    }
    let mean_threshold = 5.0 / n.sqrt();
    let var_threshold = 0.1;
    Ok(DistributionCheck {
        dim,
        n_trials,
        seed,
        corrected,
        alpha: weights.alpha(),
        beta: weights.beta(),
        max_std_mean_error: max_mean_err,
        max_rel_var_error: max_var_err,
        mean_threshold,
        var_threshold,
        passed: max_mean_err <= mean_threshold && max_var_err <= var_threshold,
        component_means: means,
        component_variances: vars,
    })
}
