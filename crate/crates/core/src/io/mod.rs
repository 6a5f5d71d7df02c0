//! File formats: the binary latent container and JSON spec configs.
//!
//! A subspace basis is stored as the latent file of its spanning latents;
//! the factorization is rebuilt deterministically on load.

pub mod latent_file;
pub mod spec_config;

pub use latent_file::{decode_latents, encode_latents, read_latents, write_latents, Dtype};
pub use spec_config::{parse_spec_str, read_spec, spec_to_value};

use std::path::Path;

use crate::error::Result;
use crate::subspace::SubspaceBasis;

pub fn write_basis(path: impl AsRef<Path>, basis: &SubspaceBasis) -> Result<()> {
    write_latents(path, basis.latents(), Dtype::F64)
}

pub fn read_basis(path: impl AsRef<Path>) -> Result<SubspaceBasis> {
    SubspaceBasis::build(&read_latents(path)?)
}
