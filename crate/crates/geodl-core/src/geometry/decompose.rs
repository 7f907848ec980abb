//! Joint decomposition of a subspace pair into principal angles and the
//! rotations that generate the geodesic flow between them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::subspace::{orthogonal_complement, Subspace};
use crate::tol;

/// The decomposition of `P_oldᵀ P_new` and `Rᵀ P_new` into shared right
/// singular vectors, from which every intermediate subspace of the geodesic
/// between `p_old` and `p_new` is generated.
///
/// Writing `Γ(ν) = diag(cos ν ωᵢ)` and `Σ(ν) = diag(sin ν ωᵢ)`:
///
/// ```text
/// P_oldᵀ P_new =  U1 Γ(1) Vᵀ
/// Rᵀ    P_new = −U2 Σ(1) Vᵀ
/// ```
#[derive(Debug, Clone)]
pub struct GeodesicDecomposition {
    p_old: Subspace,
    p_new: Subspace,
    complement: DMatrix<f64>,
    u1: DMatrix<f64>,
    u2: DMatrix<f64>,
    v: DMatrix<f64>,
    omegas: Vec<f64>,
}

impl GeodesicDecomposition {
    pub fn p_old(&self) -> &Subspace {
        &self.p_old
    }

    pub fn p_new(&self) -> &Subspace {
        &self.p_new
    }

    /// Orthogonal complement R of `p_old`, d×(d−n).
    pub fn complement(&self) -> &DMatrix<f64> {
        &self.complement
    }

    pub fn u1(&self) -> &DMatrix<f64> {
        &self.u1
    }

    /// (d−n)×n; columns with `sin ωᵢ` below the recovery threshold are zero.
    pub fn u2(&self) -> &DMatrix<f64> {
        &self.u2
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Principal angles in [0, π/2], nondecreasing.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn ambient_dim(&self) -> usize {
        self.p_old.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.p_old.dim()
    }

    /// The intermediate subspace basis Π(ν) on the geodesic, with
    /// Π(0) spanning `p_old` and Π(1) spanning `p_new` (Π(1) = P_new·V).
    pub fn point(&self, nu: f64) -> Result<DMatrix<f64>> {
        if !nu.is_finite() || !(0.0..=1.0).contains(&nu) {
            return Err(Error::InvalidArgument(format!(
                "geodesic parameter must lie in [0, 1], got {nu}"
            )));
        }
        let mut top = self.u1.clone();
        let mut bottom = self.u2.clone();
        for (i, &w) in self.omegas.iter().enumerate() {
            let (sin, cos) = (nu * w).sin_cos();
            top.column_mut(i).scale_mut(cos);
            bottom.column_mut(i).scale_mut(sin);
        }
        Ok(self.p_old.basis() * top - &self.complement * bottom)
    }
}

fn largest_entry_negative(v: &DVector<f64>) -> bool {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    v[best] < 0.0
}

/// Decomposes a pair of subspaces into principal angles ωᵢ and the rotations
/// U1, U2, V generating the geodesic flow.
///
/// Cosines are clamped to [−1, 1] before `arccos`; any negative cosine is
/// flipped back into [0, 1] by negating the corresponding V column, so all
/// angles land in [0, π/2]. U2 is recovered column-wise from
/// `−Rᵀ P_new V / sin ωᵢ`; columns with `sin ωᵢ` below the σ-threshold are
/// zeroed (their geodesic contribution vanishes). When a cosine is exactly
/// degenerate (γᵢ ≈ 0) the U1/V pairing no longer constrains the orientation,
/// and the sign of the (V, U2) pair is fixed from U2 instead.
pub fn cs_decompose(p_old: &Subspace, p_new: &Subspace) -> Result<GeodesicDecomposition> {
    if p_old.ambient_dim() != p_new.ambient_dim() || p_old.dim() != p_new.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live on different Grassmannians: G({},{}) vs G({},{})",
            p_old.dim(),
            p_old.ambient_dim(),
            p_new.dim(),
            p_new.ambient_dim()
        )));
    }
    let n = p_old.dim();
    let complement = orthogonal_complement(p_old);

    let a = p_old.basis().transpose() * p_new.basis();
    let svd = a.svd(true, true);
    let u = svd.u.expect("svd with u requested");
    let vt = svd.v_t.expect("svd with v requested");

    let mut gammas = Vec::with_capacity(n);
    let mut u1_cols = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut u1c = u.column(i).into_owned();
        let mut vc = vt.row(i).transpose();
        let mut gamma = svd.singular_values[i].clamp(-1.0, 1.0);
        if gamma < 0.0 {
            gamma = -gamma;
            vc.neg_mut();
        }
        if largest_entry_negative(&u1c) {
            u1c.neg_mut();
            vc.neg_mut();
        }
        gammas.push(gamma);
        u1_cols.push(u1c);
        v_cols.push(vc);
    }

    // Ascending angles == descending cosines.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gammas[j].partial_cmp(&gammas[i]).expect("finite cosines"));
    let gammas: Vec<f64> = order.iter().map(|&i| gammas[i]).collect();
    let u1 = DMatrix::from_columns(&order.iter().map(|&i| u1_cols[i].clone()).collect::<Vec<_>>());
    let mut v =
        DMatrix::from_columns(&order.iter().map(|&i| v_cols[i].clone()).collect::<Vec<_>>());

    let omegas: Vec<f64> = gammas.iter().map(|g| g.acos()).collect();

    let b = complement.transpose() * p_new.basis();
    let bv = &b * &v;
    let mut u2 = DMatrix::zeros(p_old.ambient_dim() - n, n);
    for i in 0..n {
        let sigma = omegas[i].sin();
        if sigma < tol::SIGMA_MIN {
            continue;
        }
        let mut u2c = bv.column(i) * (-1.0 / sigma);
        if gammas[i] <= tol::GAMMA_DEGENERATE && largest_entry_negative(&u2c) {
            u2c.neg_mut();
            v.column_mut(i).neg_mut();
        }
        u2.set_column(i, &u2c);
    }

    Ok(GeodesicDecomposition {
        p_old: p_old.clone(),
        p_new: p_new.clone(),
        complement,
        u1,
        u2,
        v,
        omegas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::random_subspace;
    use nalgebra::dmatrix;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn line(v: DVector<f64>) -> Subspace {
        let n = v.norm();
        Subspace::new(DMatrix::from_columns(&[v / n])).unwrap()
    }

    #[test]
    fn identical_subspaces_have_zero_angles() {
        let p = Subspace::new(DMatrix::identity(4, 4).columns(0, 2).into_owned()).unwrap();
        let dec = cs_decompose(&p, &p).unwrap();
        assert!(dec.omegas().iter().all(|&w| w.abs() < 1e-7));
        assert!((dec.u1() * dec.v().transpose() - DMatrix::identity(2, 2)).norm() < 1e-10);
        assert!(dec.u2().norm() < 1e-7);
    }

    #[test]
    fn orthogonal_lines_have_right_angle() {
        let p_old = line(DVector::from_vec(vec![1.0, 0.0]));
        let p_new = line(DVector::from_vec(vec![0.0, 1.0]));
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        assert_eq!(dec.omegas().len(), 1);
        assert!((dec.omegas()[0] - FRAC_PI_2).abs() < 1e-14);
        assert!((dec.omegas()[0].cos()).abs() < 1e-14);
        assert!((dec.omegas()[0].sin() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_line_gives_quarter_angle() {
        let p_old = line(DVector::from_vec(vec![1.0, 0.0, 0.0]));
        let p_new = line(DVector::from_vec(vec![1.0, 1.0, 0.0]));
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        assert!((dec.omegas()[0] - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p_old = random_subspace(6, 2, 1);
        let p_new = random_subspace(6, 3, 2);
        assert!(matches!(
            cs_decompose(&p_old, &p_new),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn decomposition_reproduces_both_products() {
        for seed in 0..20u64 {
            let p_old = random_subspace(9, 4, 1000 + seed);
            let p_new = random_subspace(9, 4, 2000 + seed);
            let dec = cs_decompose(&p_old, &p_new).unwrap();

            let n = dec.dim();
            let gamma = DMatrix::from_diagonal(&DVector::from_iterator(
                n,
                dec.omegas().iter().map(|w| w.cos()),
            ));
            let sigma = DMatrix::from_diagonal(&DVector::from_iterator(
                n,
                dec.omegas().iter().map(|w| w.sin()),
            ));

            let a = p_old.basis().transpose() * p_new.basis();
            let a_rebuilt = dec.u1() * &gamma * dec.v().transpose();
            assert!((a - a_rebuilt).norm() < 1e-8);

            let b = dec.complement().transpose() * p_new.basis();
            let b_rebuilt = -(dec.u2() * &sigma * dec.v().transpose());
            assert!((b - b_rebuilt).norm() < 1e-8);

            for &w in dec.omegas() {
                assert!((0.0..=FRAC_PI_2 + 1e-12).contains(&w));
                assert!((w.cos().powi(2) + w.sin().powi(2) - 1.0).abs() < 1e-14);
            }
            assert!(dec.omegas().windows(2).all(|p| p[0] <= p[1] + 1e-12));
        }
    }

    #[test]
    fn swapping_roles_preserves_angles() {
        for seed in 0..10u64 {
            let p_old = random_subspace(11, 4, 300 + seed);
            let p_new = random_subspace(11, 4, 400 + seed);
            let fwd = cs_decompose(&p_old, &p_new).unwrap();
            let rev = cs_decompose(&p_new, &p_old).unwrap();
            for (a, b) in fwd.omegas().iter().zip(rev.omegas()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn more_than_half_dimension_forces_zero_angles() {
        // In G(5, 8) the complement has rank 3, so at least 2 angles vanish.
        let p_old = random_subspace(8, 5, 77);
        let p_new = random_subspace(8, 5, 78);
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        let zero_angles = dec.omegas().iter().filter(|&&w| w.sin() < 1e-6).count();
        assert!(zero_angles >= 2, "expected ≥ 2 zero angles, got {zero_angles}");
    }

    #[test]
    fn point_at_zero_is_old_projector() {
        let p_old = random_subspace(7, 3, 11);
        let p_new = random_subspace(7, 3, 12);
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        let pi0 = dec.point(0.0).unwrap();
        assert!((&pi0 * pi0.transpose() - p_old.projector()).norm() < 1e-10);
    }

    #[test]
    fn point_at_one_spans_new_subspace() {
        let p_old = line(DVector::from_vec(vec![1.0, 0.0]));
        let p_new = line(DVector::from_vec(vec![0.0, 1.0]));
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        let pi1 = dec.point(1.0).unwrap();
        assert!((pi1[(0, 0)].abs() - 0.0).abs() < 1e-12);
        assert!((pi1[(1, 0)].abs() - 1.0).abs() < 1e-12);
        // Π(1) equals P_new·V exactly.
        let pv = p_new.basis() * dec.v();
        assert!((&pi1 - pv).norm() < 1e-10);
    }

    #[test]
    fn midpoint_of_orthogonal_lines_bisects_them() {
        let p_old = line(DVector::from_vec(vec![1.0, 0.0]));
        let p_new = line(DVector::from_vec(vec![0.0, 1.0]));
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        let mid = dec.point(0.5).unwrap();
        let c = FRAC_PI_4.cos();
        // Equal angles to both endpoint lines: |⟨Π(½), e1⟩| = |⟨Π(½), e2⟩| = cos(π/4).
        assert!((mid[(0, 0)].abs() - c).abs() < 1e-12);
        assert!((mid[(1, 0)].abs() - c).abs() < 1e-12);
    }

    #[test]
    fn point_rejects_parameter_outside_unit_interval() {
        let p_old = random_subspace(5, 2, 21);
        let p_new = random_subspace(5, 2, 22);
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        assert!(dec.point(-0.1).is_err());
        assert!(dec.point(1.1).is_err());
        assert!(dec.point(f64::NAN).is_err());
    }

    #[test]
    fn flow_columns_stay_orthonormal() {
        let p_old = random_subspace(10, 4, 31);
        let p_new = random_subspace(10, 4, 32);
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        for k in 0..=8 {
            let pi = dec.point(k as f64 / 8.0).unwrap();
            let gram = pi.transpose() * &pi;
            assert!((gram - DMatrix::identity(4, 4)).norm() < 1e-8);
        }
    }

    #[test]
    fn full_frame_is_orthogonal() {
        let p_old = random_subspace(12, 5, 41);
        let p_new = random_subspace(12, 5, 42);
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        let d = dec.ambient_dim();
        let mut frame = DMatrix::zeros(d, d);
        frame.columns_mut(0, 5).copy_from(dec.p_old().basis());
        frame.columns_mut(5, d - 5).copy_from(dec.complement());
        assert!((frame.transpose() * &frame - DMatrix::identity(d, d)).norm() < 1e-8);
    }

    #[test]
    fn example_micro_case_orientation() {
        // For perpendicular lines the cosine degenerates and the orientation
        // is fixed from U2, giving U1 = U2 = 1 and Δ = [e1 | e2].
        let p_old = line(DVector::from_vec(vec![1.0, 0.0]));
        let p_new = line(DVector::from_vec(vec![0.0, 1.0]));
        let dec = cs_decompose(&p_old, &p_new).unwrap();
        assert!((dec.u1()[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((dec.u2()[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((dec.complement()[(1, 0)] - 1.0).abs() < 1e-14);
    }
}
