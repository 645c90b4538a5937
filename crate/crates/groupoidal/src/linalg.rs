//! Dense complex linear algebra helpers used by the representation and
//! block-decomposition code: hermitian eigendecomposition, singular values,
//! ranks and nullspaces, and eigenvalue clustering.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Largest singular value; zero for empty matrices.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Largest pairwise deviation `|a - b|` over matched entries of two equally
/// shaped matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors of a hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Rank with a tolerance relative to the largest singular value.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > max * rel_tol).count()
}

/// Orthonormal basis of the (right) nullspace, via SVD. Wide matrices are
/// padded with zero rows first so that `V^T` carries all column directions.
pub fn nullspace(m: &CMat, rel_tol: f64) -> Vec<CVec> {
    if m.ncols() == 0 {
        return Vec::new();
    }
    let max = m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max);
    nullspace_abs(m, max * rel_tol)
}

/// Nullspace with an absolute singular-value threshold; needed when the
/// matrix may be close to zero overall (so a relative threshold would be
/// meaningless).
pub fn nullspace_abs(m: &CMat, abs_tol: f64) -> Vec<CVec> {
    if m.ncols() == 0 {
        return Vec::new();
    }
    let padded;
    let work = if m.nrows() < m.ncols() {
        let mut p = CMat::zeros(m.ncols(), m.ncols());
        p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = work.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut basis = Vec::new();
    for i in 0..vt.nrows() {
        if svd.singular_values[i] <= abs_tol {
            basis.push(vt.row(i).conjugate().transpose());
        }
    }
    basis
}

/// Groups sorted real values into clusters separated by gaps larger than
/// `rel_gap` times the spectral scale (the diameter, or the magnitude when
/// the diameter degenerates). Returns the (value, multiplicity) list, one
/// entry per cluster.
pub fn cluster_eigenvalues(sorted: &[f64], rel_gap: f64) -> Vec<(f64, usize)> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let diameter = sorted[sorted.len() - 1] - sorted[0];
    let magnitude = sorted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = diameter.max(magnitude).max(1e-300) * rel_gap;
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap {
            let slice = &sorted[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            clusters.push((mean, slice.len()));
            start = i;
        }
    }
    clusters
}

/// Eigenvalues of a general complex matrix via its Schur form.
pub fn complex_eigenvalues(m: &CMat) -> Vec<C64> {
    let schur = m.clone().schur();
    let t = schur.unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn norm_of_unitary_is_one() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!((operator_norm(&m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_recovers_spectrum() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-10);
        assert!((vals[1] - 3.0).abs() < 1e-10);
        // Reconstruct.
        let d = CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|&v| c(v, 0.0))));
        let rec = &vecs * d * vecs.adjoint();
        assert!(max_abs_diff(&rec, &m) < 1e-10);
    }

    #[test]
    fn nullspace_of_projection() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert!(ns[0][0].norm() < 1e-12);
        assert!((ns[0][1].norm() - 1.0).abs() < 1e-12);
        assert_eq!(rank(&m, 1e-12), 1);
    }

    #[test]
    fn clustering_separates_well_spaced_values() {
        let vals = [1.0, 1.0 + 1e-12, 2.0, 2.0, 2.0 - 1e-13, 5.0];
        let mut sorted = vals.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let clusters = cluster_eigenvalues(&sorted, 1e-8);
        let sizes: Vec<usize> = clusters.iter().map(|&(_, n)| n).collect();
        assert_eq!(sizes, vec![2, 3, 1]);
    }

    #[test]
    fn complex_eigenvalues_of_rotation() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let mut eigs = complex_eigenvalues(&m);
        eigs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((eigs[0] - c(0.0, -1.0)).norm() < 1e-10);
        assert!((eigs[1] - c(0.0, 1.0)).norm() < 1e-10);
    }
}
