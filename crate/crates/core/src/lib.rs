//! Linear combinations of Gaussian latent vectors that stay distributed as
//! the prescribed latent law: interpolation, centroids and navigable
//! subspaces, with the classical baselines and statistical diagnostics.

pub mod diagnostics;
pub mod error;
pub mod io;
pub mod latent;
pub mod schemes;
pub mod subspace;

pub use error::{Error, Result};
pub use latent::{
    cog_combine, cog_transform, combination_stats, linear_combine, Covariance, GaussianSpec,
    Latent, Mean, WeightVec, BETA_MIN,
};
pub use schemes::{
    centroid, interpolate, lerp_weights, slerp_weights, CentroidMethod, InterpolationMethod,
};
pub use subspace::{build_basis, SubspaceBasis, SubspaceCoords};
