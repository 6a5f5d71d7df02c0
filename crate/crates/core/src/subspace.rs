//! Navigable subspaces spanned by a group of latents.
//!
//! The latents `x_1..x_K` form the columns of `A` (D x K). A thin Householder
//! QR gives `A = U R` with `U` semi-orthonormal and `R` upper triangular with a
//! positive diagonal. Points of the subspace are addressed by coordinates
//! `h = U^T x`; the combination weights of a subspace point `s` are
//! `w = A^+ s` with `A^+ = R^{-1} U^T`, which feed the corrected combination.

use crate::error::{check_dim, Error, Result};
use crate::latent::{cog_transform, dot, GaussianSpec, Latent, WeightVec};

/// Relative per-column threshold on `|R_kk|` for full column rank.
pub const RANK_TOL: f64 = 1e-10;
/// Relative residual allowed when recovering weights for a subspace point.
pub const RESID_TOL: f64 = 1e-8;

/// Coordinates of a point in the orthonormal basis of a [`SubspaceBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceCoords(Vec<f64>);

impl SubspaceCoords {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if let Some(index) = h.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(h))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    /// Columns of `A`.
    latents: Vec<Latent>,
    /// Columns of `U`.
    u: Vec<Vec<f64>>,
    /// `R`, row-major K x K.
    r: Vec<Vec<f64>>,
    /// Rows of `A^+`, each of length D.
    pinv: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    /// Factorizes the latents with Householder QR.
    pub fn build(latents: &[Latent]) -> Result<Self> {
        let k = latents.len();
        if k == 0 {
            return Err(Error::invalid(
                "latents",
                "subspace needs at least one latent",
            ));
        }
        let d = latents[0].dim();
        for x in latents {
            check_dim(d, x.dim())?;
        }
        if k > d {
            return Err(Error::invalid(
                "latents",
                format!("{k} latents cannot be independent in dimension {d}"),
            ));
        }

        let mut work: Vec<Vec<f64>> = latents.iter().map(|x| x.as_slice().to_vec()).collect();
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for col in 0..k {
            let x = &work[col][col..];
            let norm = dot(x, x).sqrt();
            let mut v = x.to_vec();
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vtv = dot(&v, &v);
            if vtv > 0.0 {
                for w in work.iter_mut().skip(col) {
                    reflect(&v, vtv, &mut w[col..]);
                }
            }
            reflectors.push(v);
        }

        let mut r = vec![vec![0.0; k]; k];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, rij) in row.iter_mut().enumerate().skip(i) {
                *rij = work[j][i];
            }
        }

        let mut u: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                let mut e = vec![0.0; d];
                e[c] = 1.0;
                for (j, v) in reflectors.iter().enumerate().rev() {
                    let vtv = dot(v, v);
                    if vtv > 0.0 {
                        reflect(v, vtv, &mut e[j..]);
                    }
                }
                e
            })
            .collect();

        for i in 0..k {
            if r[i][i] < 0.0 {
                for rij in r[i].iter_mut() {
                    *rij = -*rij;
                }
                for uj in u[i].iter_mut() {
                    *uj = -*uj;
                }
            }
        }

        for (i, x) in latents.iter().enumerate() {
            let diag = r[i][i];
            if diag == 0.0 || diag.is_nan() || diag.abs() < RANK_TOL * x.norm() {
                return Err(Error::RankDeficient { column: i, diag });
            }
        }

        let pinv = upper_solve(&r, &u);
        Ok(Self {
            latents: latents.to_vec(),
            u,
            r,
            pinv,
        })
    }

    /// Ambient dimension D.
    pub fn dim(&self) -> usize {
        self.u[0].len()
    }

    /// Number of spanning latents K.
    pub fn rank(&self) -> usize {
        self.u.len()
    }

    pub fn latents(&self) -> &[Latent] {
        &self.latents
    }

    /// Columns of the semi-orthonormal factor `U`.
    pub fn u_columns(&self) -> &[Vec<f64>] {
        &self.u
    }

    /// Row-major upper-triangular factor `R`.
    pub fn r(&self) -> &[Vec<f64>] {
        &self.r
    }

    /// Rows of the pseudoinverse `A^+`.
    pub fn pinv(&self) -> &[Vec<f64>] {
        &self.pinv
    }

    /// Lower bound `1 / ||R^{-1}||_F` on the smallest singular value of `A`.
    pub fn sigma_min_lower_bound(&self) -> f64 {
        let k = self.rank();
        let identity: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                let mut e = vec![0.0; k];
                e[c] = 1.0;
                e
            })
            .collect();
        let r_inv = upper_solve(&self.r, &identity);
        let fro = r_inv.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        1.0 / fro
    }

    /// `h = U^T x`.
    pub fn coords(&self, x: &Latent) -> Result<SubspaceCoords> {
        check_dim(self.dim(), x.dim())?;
        Ok(SubspaceCoords(
            self.u.iter().map(|col| dot(col, x.as_slice())).collect(),
        ))
    }

    /// `y = U h`.
    pub fn ambient(&self, h: &SubspaceCoords) -> Result<Latent> {
        check_dim(self.rank(), h.len())?;
        let mut y = vec![0.0; self.dim()];
        for (col, &hi) in self.u.iter().zip(h.as_slice()) {
            for (acc, &c) in y.iter_mut().zip(col) {
                *acc += hi * c;
            }
        }
        Ok(Latent::from_raw(y))
    }

    /// Orthogonal projection `U U^T x`.
    pub fn project(&self, x: &Latent) -> Result<Latent> {
        self.ambient(&self.coords(x)?)
    }

    /// Weights `w = A^+ s` expressing the subspace point `s` in terms of the
    /// original latents.
    pub fn recover_weights(&self, s: &Latent) -> Result<WeightVec> {
        check_dim(self.dim(), s.dim())?;
        let w: Vec<f64> = self.pinv.iter().map(|row| dot(row, s.as_slice())).collect();
        let mut recon = vec![0.0; self.dim()];
        for (x, &wk) in self.latents.iter().zip(&w) {
            for (acc, &v) in recon.iter_mut().zip(x.as_slice()) {
                *acc += wk * v;
            }
        }
        let resid = recon
            .iter()
            .zip(s.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = s.norm();
        if resid > RESID_TOL * scale {
            let residual = if scale > 0.0 {
                resid / scale
            } else {
                f64::INFINITY
            };
            return Err(Error::NotInSubspace { residual });
        }
        WeightVec::new(w)
    }

    /// Corrected latent at subspace coordinates `h`.
    pub fn latent_at(&self, h: &SubspaceCoords, spec: &GaussianSpec) -> Result<Latent> {
        check_dim(self.rank(), h.len())?;
        check_dim(spec.dim(), self.dim())?;
        let y = self.ambient(h)?;
        let w: Vec<f64> = self.pinv.iter().map(|row| dot(row, y.as_slice())).collect();
        cog_transform(&y, &WeightVec::new(w)?, spec)
    }

    /// A `rows x cols` grid of coordinates around `center`, sweeping
    /// component `dim_i` down the rows and `dim_j` across the columns over
    /// `[h0 - half_extent, h0 + half_extent]`. Row-major order.
    pub fn grid_coords(
        &self,
        center: &Latent,
        dim_i: usize,
        dim_j: usize,
        half_extent: f64,
        rows: usize,
        cols: usize,
    ) -> Result<Vec<SubspaceCoords>> {
        let k = self.rank();
        for idx in [dim_i, dim_j] {
            if idx >= k {
                return Err(Error::IndexOutOfRange { index: idx, len: k });
            }
        }
        if dim_i == dim_j {
            return Err(Error::invalid("dims", "swept dimensions must differ"));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::invalid("half_extent", "must be finite and positive"));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("rows/cols", "must be at least 1"));
        }
        let h0 = self.coords(center)?;
        let row_off = linspace_offsets(half_extent, rows);
        let col_off = linspace_offsets(half_extent, cols);
        let mut grid = Vec::with_capacity(rows * cols);
        for ro in &row_off {
            for co in &col_off {
                let mut h = h0.0.clone();
                h[dim_i] += ro;
                h[dim_j] += co;
                grid.push(SubspaceCoords(h));
            }
        }
        Ok(grid)
    }
}

/// `build_basis`: see [`SubspaceBasis::build`].
pub fn build_basis(latents: &[Latent]) -> Result<SubspaceBasis> {
    SubspaceBasis::build(latents)
}

/// Offsets of an `n`-point linspace over `[-e, e]`; a single point sits at 0,
/// and the middle point of an odd count is exactly 0.
fn linspace_offsets(e: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let span = (n - 1) as f64;
    (0..n).map(|i| e * (2.0 * i as f64 - span) / span).collect()
}

/// Applies `I - 2 v v^T / (v^T v)` to `x` in place.
fn reflect(v: &[f64], vtv: f64, x: &mut [f64]) {
    let s = 2.0 * dot(v, x) / vtv;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

/// Solves `R X = B` for upper-triangular `R` (row-major), where `B` is given
/// by its rows. Returns the rows of `X`.
fn upper_solve(r: &[Vec<f64>], b_rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = r.len();
    let width = b_rows[0].len();
    let mut x = vec![vec![0.0; width]; k];
    for i in (0..k).rev() {
        let mut row = b_rows[i].clone();
        for j in (i + 1)..k {
            let rij = r[i][j];
            for (acc, &xj) in row.iter_mut().zip(&x[j]) {
                *acc -= rij * xj;
            }
        }
        for v in row.iter_mut() {
            *v /= r[i][i];
        }
        x[i] = row;
    }
    x
}
