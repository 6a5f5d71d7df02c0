#![allow(dead_code)]

use cog_latent::diagnostics::rng::SplitMix64;
use cog_latent::{GaussianSpec, Latent, SubspaceBasis};
use nalgebra::{DMatrix, DVector};

/// Random full-rank subspace instance with D in [4, 64] and K in [1, min(D, 8)].
pub struct Instance {
    pub dim: usize,
    pub latents: Vec<Latent>,
}

pub fn random_instance(seed: u64, index: u64) -> Instance {
    let mut g = SplitMix64::substream(seed, index);
    let dim = 4 + (g.next_u64() % 61) as usize;
    let k = 1 + (g.next_u64() % dim.min(8) as u64) as usize;
    let latents = (0..k)
        .map(|_| {
            let mut v = vec![0.0; dim];
            g.fill_normal(&mut v);
            Latent::new(v).unwrap()
        })
        .collect();
    Instance { dim, latents }
}

pub fn random_vec(g: &mut SplitMix64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    g.fill_normal(&mut v);
    v
}

pub fn matrix_of(latents: &[Latent]) -> DMatrix<f64> {
    let d = latents[0].dim();
    DMatrix::from_fn(d, latents.len(), |r, c| latents[c].as_slice()[r])
}

/// `(A^T A)^{-1} A^T`.
pub fn normal_equations_pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = a.transpose() * a;
    gram.cholesky().expect("full rank").inverse() * a.transpose()
}

pub fn u_matrix(basis: &SubspaceBasis) -> DMatrix<f64> {
    let cols = basis.u_columns();
    DMatrix::from_fn(basis.dim(), basis.rank(), |r, c| cols[c][r])
}

pub fn r_matrix(basis: &SubspaceBasis) -> DMatrix<f64> {
    let r = basis.r();
    DMatrix::from_fn(basis.rank(), basis.rank(), |i, j| r[i][j])
}

pub fn pinv_matrix(basis: &SubspaceBasis) -> DMatrix<f64> {
    let p = basis.pinv();
    DMatrix::from_fn(basis.rank(), basis.dim(), |i, j| p[i][j])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

pub fn dvec(x: &Latent) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

pub fn max_abs_diff_slices(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Failures of the subspace checks on one instance, empty when all hold.
pub fn subspace_failures(inst: &Instance, seed: u64) -> Vec<String> {
    let mut out = Vec::new();
    let basis = match SubspaceBasis::build(&inst.latents) {
        Ok(b) => b,
        Err(e) => return vec![format!("build failed: {e}")],
    };
    let k = basis.rank();
    let a = matrix_of(&inst.latents);
    let u = u_matrix(&basis);
    let r = r_matrix(&basis);

    let orth = max_abs_diff(&(u.transpose() * &u), &DMatrix::identity(k, k));
    if orth > 1e-10 {
        out.push(format!("U^T U deviates from I by {orth:e}"));
    }
    let fact = max_abs_diff(&(&u * &r), &a);
    if fact > 1e-10 {
        out.push(format!("A - U R deviates by {fact:e}"));
    }
    if (0..k).any(|i| r[(i, i)] <= 0.0) {
        out.push("R has a non-positive diagonal".into());
    }

    let oracle = normal_equations_pinv(&a);
    let mut g = SplitMix64::substream(seed ^ 0x5eed, inst.dim as u64 * 16 + k as u64);
    let x = Latent::new(random_vec(&mut g, inst.dim)).unwrap();
    let s = basis.project(&x).unwrap();
    let w = basis.recover_weights(&s).unwrap();
    let w_oracle = &oracle * dvec(&s);
    let dw = max_abs_diff_slices(w.weights(), w_oracle.as_slice());
    if dw > 1e-9 {
        out.push(format!("recovered weights differ from oracle by {dw:e}"));
    }
    let recon = &a * DVector::from_column_slice(w.weights());
    let rel = (recon - dvec(&s)).norm() / s.norm();
    if rel > 1e-8 {
        out.push(format!("A w reconstructs s(x) with relative error {rel:e}"));
    }

    let spec = GaussianSpec::isotropic(inst.dim, 0.25, 1.5).unwrap();
    for (i, xk) in inst.latents.iter().enumerate() {
        let h = basis.coords(xk).unwrap();
        let back = basis.latent_at(&h, &spec).unwrap();
        let d = max_abs_diff_slices(back.as_slice(), xk.as_slice());
        if d > 1e-9 {
            out.push(format!("fixpoint {i} off by {d:e}"));
        }
    }
    out
}
