//! Gaussian latent distributions, latent vectors, combination weights and
//! the distribution-preserving correction of linear combinations.
//!
//! Given i.i.d. latents `x_k ~ N(mu, Sigma)` and weights `w`, the combination
//! `y = sum_k w_k x_k` is distributed as `N(alpha mu, beta Sigma)` with
//! `alpha = sum_k w_k` and `beta = sum_k w_k^2`. The correction
//!
//! ```text
//! z = (1 - alpha / sqrt(beta)) mu + y / sqrt(beta)
//! ```
//!
//! maps `y` back to `N(mu, Sigma)` for any weights with `beta > 0`.

use crate::error::{check_dim, Error, Result};

/// Smallest accepted `beta` for the correction; at or below it the weights
/// carry no sample information.
pub const BETA_MIN: f64 = 1e-12;

/// Mean of a [`GaussianSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Mean {
    /// Same value for every component.
    Scalar(f64),
    /// One value per component.
    Vector(Vec<f64>),
}

/// Covariance of a [`GaussianSpec`]. Only diagonal forms are supported.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    /// `sigma^2 I`.
    Isotropic(f64),
    /// `diag(v_1, ..., v_D)`.
    Diagonal(Vec<f64>),
}

/// The prescribed latent distribution `N(mu, Sigma)` with diagonal `Sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    dim: usize,
    mean: Mean,
    cov: Covariance,
}

impl GaussianSpec {
    pub fn new(dim: usize, mean: Mean, cov: Covariance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        match &mean {
            Mean::Scalar(m) => {
                if !m.is_finite() {
                    return Err(Error::invalid("mean", "must be finite"));
                }
            }
            Mean::Vector(v) => {
                check_dim(dim, v.len())?;
                if let Some(index) = v.iter().position(|m| !m.is_finite()) {
                    return Err(Error::NonFinite { index });
                }
            }
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match &cov {
            Covariance::Isotropic(v) => {
                if !positive(*v) {
                    return Err(Error::invalid(
                        "cov",
                        "variance must be finite and positive",
                    ));
                }
            }
            Covariance::Diagonal(vs) => {
                check_dim(dim, vs.len())?;
                if let Some(i) = vs.iter().position(|v| !positive(*v)) {
                    return Err(Error::invalid(
                        "cov",
                        format!("variance at index {i} must be finite and positive"),
                    ));
                }
            }
        }
        Ok(Self { dim, mean, cov })
    }

    /// `N(0, I_dim)`.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(dim, Mean::Scalar(0.0), Covariance::Isotropic(1.0))
    }

    /// `N(mean * 1, variance * I)`.
    pub fn isotropic(dim: usize, mean: f64, variance: f64) -> Result<Self> {
        Self::new(dim, Mean::Scalar(mean), Covariance::Isotropic(variance))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mean(&self) -> &Mean {
        &self.mean
    }

    pub fn cov(&self) -> &Covariance {
        &self.cov
    }

    #[inline]
    pub fn mean_at(&self, d: usize) -> f64 {
        match &self.mean {
            Mean::Scalar(m) => *m,
            Mean::Vector(v) => v[d],
        }
    }

    #[inline]
    pub fn var_at(&self, d: usize) -> f64 {
        match &self.cov {
            Covariance::Isotropic(v) => *v,
            Covariance::Diagonal(vs) => vs[d],
        }
    }

    #[inline]
    pub fn std_at(&self, d: usize) -> f64 {
        self.var_at(d).sqrt()
    }

    pub fn is_zero_mean(&self) -> bool {
        match &self.mean {
            Mean::Scalar(m) => *m == 0.0,
            Mean::Vector(v) => v.iter().all(|m| *m == 0.0),
        }
    }

    /// True for `N(0, I)`, in either storage form.
    pub fn is_standard(&self) -> bool {
        self.is_zero_mean()
            && match &self.cov {
                Covariance::Isotropic(v) => *v == 1.0,
                Covariance::Diagonal(vs) => vs.iter().all(|v| *v == 1.0),
            }
    }
}

/// A real latent vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent(Vec<f64>);

impl Latent {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("latent", "must have at least one component"));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    /// Wraps values produced by arithmetic on already-validated latents.
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Latent) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

impl AsRef<[f64]> for Latent {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Combination weights together with their sum `alpha` and sum of squares `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVec {
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl WeightVec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut alpha = 0.0;
        let mut beta = 0.0;
        for &w in &weights {
            alpha += w;
            beta += w * w;
        }
        Ok(Self {
            weights,
            alpha,
            beta,
        })
    }

    /// The `k`-th unit vector of length `len`.
    pub fn selector(len: usize, k: usize) -> Result<Self> {
        if k >= len {
            return Err(Error::IndexOutOfRange { index: k, len });
        }
        let mut w = vec![0.0; len];
        w[k] = 1.0;
        Self::new(w)
    }

    /// `[1/K; K]`.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyWeights);
        }
        Self::new(vec![1.0 / len as f64; len])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Builds a [`WeightVec`], computing `alpha` and `beta` by sequential summation.
pub fn combination_stats(weights: &[f64]) -> Result<WeightVec> {
    WeightVec::new(weights.to_vec())
}

/// `y = sum_k w_k x_k`, summed in index order.
pub fn linear_combine(latents: &[Latent], weights: &WeightVec) -> Result<Latent> {
    if latents.len() != weights.len() {
        return Err(Error::CountMismatch {
            expected: latents.len(),
            found: weights.len(),
        });
    }
    let dim = latents[0].dim();
    for x in latents {
        check_dim(dim, x.dim())?;
    }
    let mut y = vec![0.0; dim];
    for (x, &w) in latents.iter().zip(weights.weights()) {
        for (acc, &v) in y.iter_mut().zip(x.as_slice()) {
            *acc += w * v;
        }
    }
    Ok(Latent::from_raw(y))
}

/// Maps a combination `y` with weight statistics `weights` back to `spec`.
pub fn cog_transform(y: &Latent, weights: &WeightVec, spec: &GaussianSpec) -> Result<Latent> {
    check_dim(spec.dim(), y.dim())?;
    let beta = weights.beta();
    if beta <= BETA_MIN {
        return Err(Error::DegenerateWeights {
            beta,
            min: BETA_MIN,
        });
    }
    let scale = 1.0 / beta.sqrt();
    let shift = 1.0 - weights.alpha() * scale;
    let z = y
        .as_slice()
        .iter()
        .enumerate()
        .map(|(d, &v)| shift * spec.mean_at(d) + v * scale)
        .collect();
    Ok(Latent::from_raw(z))
}

/// Corrected linear combination of `latents` with raw `weights`.
pub fn cog_combine(latents: &[Latent], weights: &[f64], spec: &GaussianSpec) -> Result<Latent> {
    let w = combination_stats(weights)?;
    let y = linear_combine(latents, &w)?;
    cog_transform(&y, &w, spec)
}
