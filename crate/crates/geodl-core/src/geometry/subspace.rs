//! Points on the Grassmann manifold: orthonormal bases, PCA subspaces, and
//! orthogonal complements.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

/// An n-dimensional linear subspace of R^d, represented by a d×n matrix with
/// orthonormal columns. Requires 0 < n < d.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wraps a basis matrix, checking the Grassmann invariants:
    /// 0 < n < d, finite entries, and `BᵀB = I` within `tol::ORTHONORMAL`.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (d, n) = (basis.nrows(), basis.ncols());
        if n == 0 || n >= d {
            return Err(Error::InvalidArgument(format!(
                "subspace dimension must satisfy 0 < n < d, got n={n}, d={d}"
            )));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("subspace basis".into()));
        }
        let gram = basis.transpose() * &basis;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > tol::ORTHONORMAL {
                    return Err(Error::InvalidArgument(format!(
                        "basis columns not orthonormal: |(BᵀB)[{i},{j}] - {expect}| = {:.3e}",
                        (gram[(i, j)] - expect).abs()
                    )));
                }
            }
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The orthogonal projector `P Pᵀ` onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// Flips `v` so that its entry of largest magnitude is positive. The first
/// such entry wins ties, which makes computed bases reproducible.
pub(crate) fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Modified Gram-Schmidt with a second reorthogonalization pass.
/// Returns the accepted orthonormal columns, skipping columns whose residual
/// drops below `rel_tol` times their original norm.
fn gram_schmidt(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let mut accepted: Vec<DVector<f64>> = Vec::new();
    for j in 0..m.ncols() {
        let col = m.column(j).into_owned();
        let scale = col.norm();
        if scale == 0.0 {
            continue;
        }
        let mut r = col;
        for _ in 0..2 {
            for q in &accepted {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let norm = r.norm();
        if norm > rel_tol * scale {
            r /= norm;
            canonical_sign(&mut r);
            accepted.push(r);
        }
    }
    accepted
}

/// Builds an orthonormal basis for the column span of `m`.
///
/// Columns are processed left to right; linearly dependent columns are
/// dropped, so the achieved dimension is the rank of `m` and is reported by
/// the returned subspace.
pub fn orthonormalize(m: &DMatrix<f64>) -> Result<Subspace> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("orthonormalize input".into()));
    }
    let accepted = gram_schmidt(m, tol::RANK_REL);
    if accepted.is_empty() {
        return Err(Error::DegenerateSpan(
            "input matrix has no nonzero independent columns".into(),
        ));
    }
    if accepted.len() >= m.nrows() {
        return Err(Error::InvalidArgument(format!(
            "span is full-dimensional (rank {} of R^{}); no proper subspace",
            accepted.len(),
            m.nrows()
        )));
    }
    Subspace::new(DMatrix::from_columns(&accepted))
}

/// A PCA basis together with the dimension that was asked for, so callers can
/// tell when rank deficiency forced a reduction.
#[derive(Debug, Clone)]
pub struct PcaSubspace {
    pub subspace: Subspace,
    pub requested_dim: usize,
}

impl PcaSubspace {
    pub fn was_reduced(&self) -> bool {
        self.subspace.dim() < self.requested_dim
    }
}

/// Top-n left singular directions of a d×B feature batch.
///
/// With `center` set, the per-feature batch mean is subtracted first. Each
/// basis vector's sign is fixed so its largest-magnitude entry is positive.
/// If the (centered) batch has rank below `n`, the subspace dimension is
/// reduced to the achieved rank.
pub fn pca_subspace(z: &DMatrix<f64>, n: usize, center: bool) -> Result<PcaSubspace> {
    let (d, b) = (z.nrows(), z.ncols());
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("pca input".into()));
    }
    if b < 2 {
        return Err(Error::InvalidArgument(format!(
            "pca needs a batch of at least 2 samples, got {b}"
        )));
    }
    let max_n = d.min(if center { b - 1 } else { b });
    if n == 0 || n > max_n {
        return Err(Error::InvalidArgument(format!(
            "pca dimension {n} outside [1, {max_n}] for a {d}×{b} batch (center={center})"
        )));
    }
    if n >= d {
        return Err(Error::InvalidArgument(format!(
            "pca dimension {n} would span all of R^{d}; need n < d"
        )));
    }

    let mut zc = z.clone();
    if center {
        for i in 0..d {
            let mean = zc.row(i).sum() / b as f64;
            for j in 0..b {
                zc[(i, j)] -= mean;
            }
        }
    }

    let svd = zc.svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let sv = &svd.singular_values;
    let rank_tol = sv.max() * d.max(b) as f64 * f64::EPSILON;
    let rank = sv.iter().take(n).filter(|&&s| s > rank_tol).count();
    if rank == 0 {
        return Err(Error::DegenerateSpan(
            "feature batch has rank 0 after centering".into(),
        ));
    }

    let mut cols = Vec::with_capacity(rank);
    for j in 0..rank {
        let mut c = u.column(j).into_owned();
        canonical_sign(&mut c);
        cols.push(c);
    }
    Ok(PcaSubspace {
        subspace: Subspace::new(DMatrix::from_columns(&cols))?,
        requested_dim: n,
    })
}

/// Deterministic orthonormal basis R of the orthogonal complement of `p`,
/// with `RᵀR = I` and `RᵀP = 0`.
///
/// The completion orthonormalizes the residuals of the standard basis vectors
/// against P (and against already-accepted directions), skipping near-zero
/// residuals. A unit vector missed by every standard direction would need all
/// its coordinates below the residual threshold, which is impossible, so the
/// scan always yields exactly d − n columns.
pub fn orthogonal_complement(p: &Subspace) -> DMatrix<f64> {
    let d = p.ambient_dim();
    let n = p.dim();
    let want = d - n;
    let basis = p.basis();

    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(want);
    for j in 0..d {
        if accepted.len() == want {
            break;
        }
        let mut r = DVector::zeros(d);
        r[j] = 1.0;
        for _ in 0..2 {
            let coeffs = basis.transpose() * &r;
            r -= basis * coeffs;
            for q in &accepted {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let norm = r.norm();
        if norm > tol::COMPLEMENT_RESIDUAL {
            r /= norm;
            canonical_sign(&mut r);
            accepted.push(r);
        }
    }
    assert_eq!(
        accepted.len(),
        want,
        "standard-basis completion must span the complement"
    );
    DMatrix::from_columns(&accepted)
}
