//! Interpolation and centroid schemes: the classical baselines and the
//! corrected combination.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::latent::{cog_combine, linear_combine, GaussianSpec, Latent, WeightVec};

/// Below this `sin(theta)` the SLERP closed form is treated as 0/0 and LERP weights are used.
pub const SLERP_MIN_SIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterpolationMethod {
    Lerp,
    Slerp,
    Cog,
}

impl InterpolationMethod {
    pub const ALL: [InterpolationMethod; 3] = [Self::Lerp, Self::Slerp, Self::Cog];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lerp => "lerp",
            Self::Slerp => "slerp",
            Self::Cog => "cog",
        }
    }
}

impl FromStr for InterpolationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lerp" => Ok(Self::Lerp),
            "slerp" => Ok(Self::Slerp),
            "cog" => Ok(Self::Cog),
            _ => Err(Error::invalid(
                "method",
                format!("unknown interpolation method `{s}` (expected lerp, slerp or cog)"),
            )),
        }
    }
}

impl fmt::Display for InterpolationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentroidMethod {
    /// Plain arithmetic mean.
    Euclidean,
    /// Mean, then standardized over its components to mean 0 and variance 1.
    StandardizedEuclidean,
    /// Mean, then rescaled to norm `sqrt(D - 2)`.
    ModeNormEuclidean,
    /// Corrected combination with uniform weights.
    Cog,
}

impl CentroidMethod {
    pub const ALL: [CentroidMethod; 4] = [
        Self::Euclidean,
        Self::StandardizedEuclidean,
        Self::ModeNormEuclidean,
        Self::Cog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::StandardizedEuclidean => "std-euclidean",
            Self::ModeNormEuclidean => "mode-norm",
            Self::Cog => "cog",
        }
    }

    /// The two transformed-Euclidean baselines, which are defined for `N(0, I)`.
    pub fn is_transformed_baseline(self) -> bool {
        matches!(self, Self::StandardizedEuclidean | Self::ModeNormEuclidean)
    }
}

impl FromStr for CentroidMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Self::Euclidean),
            "std-euclidean" | "standardized-euclidean" | "standardizedeuclidean" => {
                Ok(Self::StandardizedEuclidean)
            }
            "mode-norm" | "mode-norm-euclidean" | "modenormeuclidean" => {
                Ok(Self::ModeNormEuclidean)
            }
            "cog" => Ok(Self::Cog),
            _ => Err(Error::invalid(
                "method",
                format!(
                    "unknown centroid method `{s}` (expected euclidean, std-euclidean, mode-norm or cog)"
                ),
            )),
        }
    }
}

impl fmt::Display for CentroidMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_unit_interval(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid("v", format!("{v} is outside [0, 1]")))
    }
}

/// `[v, 1 - v]`.
pub fn lerp_weights(v: f64) -> Result<WeightVec> {
    check_unit_interval(v)?;
    WeightVec::new(vec![v, 1.0 - v])
}

/// `[sin(v theta) / sin(theta), sin((1 - v) theta) / sin(theta)]` where `theta`
/// is the angle between `x1` and `x2`.
///
/// Falls back to [`lerp_weights`] when `sin(theta) < SLERP_MIN_SIN`.
pub fn slerp_weights(v: f64, x1: &Latent, x2: &Latent) -> Result<WeightVec> {
    check_unit_interval(v)?;
    check_dim(x1.dim(), x2.dim())?;
    let n1 = x1.norm();
    let n2 = x2.norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let cos = x1.dot(x2) / (n1 * n2);
    slerp_weights_from_cos(v, cos)
}

/// SLERP weights given the cosine similarity of the endpoints.
pub fn slerp_weights_from_cos(v: f64, cos_theta: f64) -> Result<WeightVec> {
    check_unit_interval(v)?;
    let theta = cos_theta.clamp(-1.0, 1.0).acos();
    let sin = theta.sin();
    if sin < SLERP_MIN_SIN {
        return lerp_weights(v);
    }
    WeightVec::new(vec![
        (v * theta).sin() / sin,
        ((1.0 - v) * theta).sin() / sin,
    ])
}

/// Interpolates between `x1` (at `v = 1`) and `x2` (at `v = 0`).
///
/// SLERP is the uncorrected classical scheme; `Cog` corrects the LERP combination.
pub fn interpolate(
    x1: &Latent,
    x2: &Latent,
    v: f64,
    method: InterpolationMethod,
    spec: &GaussianSpec,
) -> Result<Latent> {
    check_dim(x1.dim(), x2.dim())?;
    check_dim(spec.dim(), x1.dim())?;
    let pair = [x1.clone(), x2.clone()];
    match method {
        InterpolationMethod::Lerp => linear_combine(&pair, &lerp_weights(v)?),
        InterpolationMethod::Slerp => linear_combine(&pair, &slerp_weights(v, x1, x2)?),
        InterpolationMethod::Cog => cog_combine(&pair, lerp_weights(v)?.weights(), spec),
    }
}

/// Returns the latents in canonical order: lexicographic over components
/// under `f64::total_cmp`. Centroids sum in this order so they do not depend
/// on the order of their inputs.
pub fn canonical_order(latents: &[Latent]) -> Vec<Latent> {
    let mut sorted = latents.to_vec();
    sorted.sort_by(|a, b| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or_else(|| a.dim().cmp(&b.dim()))
    });
    sorted
}

/// Centroid of `latents` under `method`.
///
/// The transformed baselines work in standardized coordinates `(x - mu) / sigma`
/// and map their result back with `u * sigma + mu`, so for `N(0, I)` they
/// reduce to the plain transforms of the Euclidean mean.
pub fn centroid(latents: &[Latent], method: CentroidMethod, spec: &GaussianSpec) -> Result<Latent> {
    if latents.is_empty() {
        return Err(Error::invalid("latents", "centroid of an empty group"));
    }
    let dim = spec.dim();
    for x in latents {
        check_dim(dim, x.dim())?;
    }
    let ordered = canonical_order(latents);
    let k = ordered.len();
    let uniform = WeightVec::uniform(k)?;

    if method == CentroidMethod::Cog {
        return cog_combine(&ordered, uniform.weights(), spec);
    }
    let mean = linear_combine(&ordered, &uniform)?;
    if method == CentroidMethod::Euclidean {
        return Ok(mean);
    }

    let standardized: Vec<f64> = mean
        .as_slice()
        .iter()
        .enumerate()
        .map(|(d, &x)| (x - spec.mean_at(d)) / spec.std_at(d))
        .collect();
    let transformed = match method {
        CentroidMethod::StandardizedEuclidean => standardize_components(&standardized)?,
        CentroidMethod::ModeNormEuclidean => rescale_to_mode_norm(&standardized)?,
        CentroidMethod::Euclidean | CentroidMethod::Cog => unreachable!(),
    };
    let mapped = transformed
        .iter()
        .enumerate()
        .map(|(d, &u)| u * spec.std_at(d) + spec.mean_at(d))
        .collect();
    Latent::new(mapped)
}

/// `(x - m) / s` with `m` the mean and `s` the population standard deviation of the components.
pub fn standardize_components(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    let s = var.sqrt();
    if s == 0.0 || !s.is_finite() {
        return Err(Error::ConstantCentroid);
    }
    Ok(x.iter().map(|v| (v - m) / s).collect())
}

/// Rescales `x` to norm `sqrt(D - 2)`, the square root of the mode of `chi^2(D)`.
pub fn rescale_to_mode_norm(x: &[f64]) -> Result<Vec<f64>> {
    let d = x.len();
    if d < 3 {
        return Err(Error::invalid(
            "dim",
            format!("mode-norm rescaling needs D >= 3, got {d}"),
        ));
    }
    let norm = crate::latent::dot(x, x).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let scale = ((d - 2) as f64).sqrt() / norm;
    Ok(x.iter().map(|v| v * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn lat(v: &[f64]) -> Latent {
        Latent::new(v.to_vec()).unwrap()
    }

    #[test]
    fn method_names_parse_case_insensitively() {
        for m in InterpolationMethod::ALL {
            assert_eq!(
                m.name()
                    .to_uppercase()
                    .parse::<InterpolationMethod>()
                    .unwrap(),
                m
            );
        }
        for m in CentroidMethod::ALL {
            assert_eq!(m.name().parse::<CentroidMethod>().unwrap(), m);
        }
        assert!("nao".parse::<InterpolationMethod>().is_err());
    }

    #[test]
    fn lerp_examples() {
        assert_eq!(lerp_weights(1.0).unwrap().weights(), &[1.0, 0.0]);
        assert_eq!(lerp_weights(0.0).unwrap().weights(), &[0.0, 1.0]);
        let w = lerp_weights(0.5).unwrap();
        assert_eq!(w.weights(), &[0.5, 0.5]);
        assert_eq!(w.beta(), 0.5);
        assert!(lerp_weights(1.01).is_err());
        assert!(lerp_weights(-0.1).is_err());
        assert!(lerp_weights(f64::NAN).is_err());
    }

    #[test]
    fn slerp_examples() {
        let x1 = lat(&[3.0, 1.0]);
        let x2 = lat(&[-1.0, 2.0]);
        assert_eq!(slerp_weights(1.0, &x1, &x2).unwrap().weights(), &[1.0, 0.0]);

        let w = slerp_weights(0.5, &lat(&[1.0, 0.0]), &lat(&[0.0, 1.0])).unwrap();
        for v in w.weights() {
            assert!((v - FRAC_1_SQRT_2).abs() < 1e-15);
        }

        // theta = pi/4: sin(pi/8) / sin(pi/4), evaluated to 50 digits.
        let w = slerp_weights(
            0.5,
            &lat(&[1.0, 0.0]),
            &lat(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        )
        .unwrap();
        for v in w.weights() {
            assert!((v - 0.541_196_100_146_197).abs() < 1e-14);
        }
    }

    #[test]
    fn slerp_degenerate_angle_falls_back_to_lerp() {
        let x = lat(&[1.0, 2.0, 3.0]);
        let w = slerp_weights(0.3, &x, &x).unwrap();
        assert_eq!(w, lerp_weights(0.3).unwrap());
        let neg = lat(&[-1.0, -2.0, -3.0]);
        assert_eq!(
            slerp_weights(0.3, &x, &neg).unwrap(),
            lerp_weights(0.3).unwrap()
        );
        assert_eq!(
            slerp_weights_from_cos(0.3, 1.0 + 1e-15).unwrap(),
            lerp_weights(0.3).unwrap()
        );
    }

    #[test]
    fn slerp_zero_norm_is_an_error() {
        assert!(matches!(
            slerp_weights(0.5, &lat(&[0.0, 0.0]), &lat(&[1.0, 0.0])),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn interpolate_examples() {
        let spec = GaussianSpec::standard(2).unwrap();
        let x1 = lat(&[0.2, -1.3]);
        let x2 = lat(&[1.7, 0.4]);
        for m in InterpolationMethod::ALL {
            assert_eq!(interpolate(&x1, &x2, 1.0, m, &spec).unwrap(), x1);
            assert_eq!(interpolate(&x1, &x2, 0.0, m, &spec).unwrap(), x2);
        }

        let a = lat(&[3.0, 0.0]);
        let b = lat(&[0.0, 3.0]);
        let s = interpolate(&a, &b, 0.5, InterpolationMethod::Slerp, &spec).unwrap();
        assert!((s.norm() - 3.0).abs() < 1e-14);

        let c = interpolate(&x1, &x2, 0.5, InterpolationMethod::Cog, &spec).unwrap();
        for d in 0..2 {
            let expect = (x1.as_slice()[d] + x2.as_slice()[d]) / SQRT_2;
            assert!((c.as_slice()[d] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn centroid_single_latent() {
        let spec = GaussianSpec::standard(4).unwrap();
        let x = lat(&[0.5, -1.0, 2.0, 0.1]);
        let group = [x.clone()];
        assert_eq!(
            centroid(&group, CentroidMethod::Euclidean, &spec).unwrap(),
            x
        );
        assert_eq!(centroid(&group, CentroidMethod::Cog, &spec).unwrap(), x);
        let m = centroid(&group, CentroidMethod::ModeNormEuclidean, &spec).unwrap();
        assert!((m.norm() - 2f64.sqrt()).abs() < 1e-14);
        let ratio = m.as_slice()[0] / x.as_slice()[0];
        for (a, b) in m.as_slice().iter().zip(x.as_slice()) {
            assert!((a - ratio * b).abs() < 1e-14);
        }
    }

    #[test]
    fn cog_centroid_of_four_doubles_the_mean() {
        let spec = GaussianSpec::standard(3).unwrap();
        let xs = vec![
            lat(&[1.0, 2.0, 3.0]),
            lat(&[-1.0, 0.5, 0.0]),
            lat(&[0.25, 0.25, -4.0]),
            lat(&[2.0, -1.0, 1.0]),
        ];
        let mean = centroid(&xs, CentroidMethod::Euclidean, &spec).unwrap();
        let cog = centroid(&xs, CentroidMethod::Cog, &spec).unwrap();
        for (c, m) in cog.as_slice().iter().zip(mean.as_slice()) {
            assert!((c - 2.0 * m).abs() < 1e-14);
        }
    }

    #[test]
    fn mode_norm_in_high_dimension() {
        let d = 36864;
        let spec = GaussianSpec::standard(d).unwrap();
        let x = Latent::new((0..d).map(|i| ((i * 7919) % 113) as f64 - 50.0).collect()).unwrap();
        let m = centroid(&[x], CentroidMethod::ModeNormEuclidean, &spec).unwrap();
        // sqrt(36862), evaluated to 50 digits.
        assert!((m.norm() - 191.994_791_596_022_2).abs() < 1e-9);
    }

    #[test]
    fn centroid_errors() {
        let spec = GaussianSpec::standard(2).unwrap();
        assert!(centroid(&[], CentroidMethod::Euclidean, &spec).is_err());
        let c = lat(&[1.0, 1.0]);
        assert!(matches!(
            centroid(&[c], CentroidMethod::StandardizedEuclidean, &spec),
            Err(Error::ConstantCentroid)
        ));
        let x = lat(&[1.0, 2.0]);
        assert!(matches!(
            centroid(&[x], CentroidMethod::ModeNormEuclidean, &spec),
            Err(Error::InvalidParameter { .. })
        ));
        let spec3 = GaussianSpec::standard(3).unwrap();
        assert!(matches!(
            centroid(
                &[lat(&[1.0, 0.0, 0.0]), lat(&[-1.0, 0.0, 0.0])],
                CentroidMethod::ModeNormEuclidean,
                &spec3
            ),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn standardized_centroid_is_standardized() {
        let spec = GaussianSpec::standard(5).unwrap();
        let xs = vec![
            lat(&[1.0, 2.0, 3.0, 4.0, 9.0]),
            lat(&[0.0, -2.0, 1.0, 4.0, 1.0]),
        ];
        let c = centroid(&xs, CentroidMethod::StandardizedEuclidean, &spec).unwrap();
        let n = c.dim() as f64;
        let m = c.as_slice().iter().sum::<f64>() / n;
        let var = c.as_slice().iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        assert!(m.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transformed_baselines_map_to_general_spec() {
        let spec = GaussianSpec::isotropic(4, 2.0, 9.0).unwrap();
        let xs = vec![lat(&[1.0, 5.0, -3.0, 2.5])];
        let c = centroid(&xs, CentroidMethod::ModeNormEuclidean, &spec).unwrap();
        let u: Vec<f64> = c.as_slice().iter().map(|v| (v - 2.0) / 3.0).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 2f64.sqrt()).abs() < 1e-12);
    }
}
