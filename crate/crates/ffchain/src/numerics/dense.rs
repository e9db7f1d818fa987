use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest matrix dimension accepted by the dense solvers.
pub const DENSE_CAP: usize = 1 << 13;

pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// eigenvectors stored as columns.
pub fn eig_hermitian_dense(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut pairs: Vec<(f64, usize, Vec<C64>)> = Vec::with_capacity(n);
    for block in connected_blocks(a) {
        let sub = a.submatrix(&block, &block);
        let (vals, vecs) = eig_block(&sub, true)?;
        let vecs = vecs.expect("eigenvectors requested");
        for (k, &val) in vals.iter().enumerate() {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (r, &idx) in block.iter().enumerate() {
                v[idx] = vecs[(r, k)];
            }
            pairs.push((val, block[0], v));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let values = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<&[C64]> = pairs.iter().map(|p| p.2.as_slice()).collect();
    Ok((values, ComplexMatrix::from_columns(&cols)?))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvals_hermitian_dense(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let mut values = Vec::with_capacity(a.rows());
    for block in connected_blocks(a) {
        let sub = a.submatrix(&block, &block);
        values.extend(eig_block(&sub, false)?.0);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
    }
    if a.rows() > DENSE_CAP {
        return Err(Error::DimensionTooLarge { dim: a.rows(), cap: DENSE_CAP });
    }
    let dev = a.hermitian_deviation();
    if dev > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NonHermitian(dev));
    }
    Ok(())
}

/// Index sets of the connected components of the nonzero pattern. A chain
/// Hamiltonian that conserves Hamming weight splits into its weight sectors.
pub fn connected_blocks(a: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        let row = a.row(i);
        for j in (i + 1)..n {
            if row[j] != C64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

fn eig_block(a: &ComplexMatrix, vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.rows();
    let backend = |e: faer::linalg::evd::EvdError| Error::Backend(format!("{e:?}"));
    if a.is_real() {
        let m = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (a[(i, j)].re + a[(j, i)].re));
        if !vectors {
            return Ok((m.self_adjoint_eigenvalues(Side::Lower).map_err(backend)?, None));
        }
        let e = m.self_adjoint_eigen(Side::Lower).map_err(backend)?;
        let s = e.S().column_vector();
        let vals = (0..n).map(|i| s[i]).collect();
        let u = e.U();
        Ok((vals, Some(ComplexMatrix::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0)))))
    } else {
        let m = Mat::<C64>::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
        if !vectors {
            return Ok((m.self_adjoint_eigenvalues(Side::Lower).map_err(backend)?, None));
        }
        let e = m.self_adjoint_eigen(Side::Lower).map_err(backend)?;
        let s = e.S().column_vector();
        let vals = (0..n).map(|i| s[i].re).collect();
        let u = e.U();
        Ok((vals, Some(ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)]))))
    }
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    let m = Mat::<C64>::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)]);
    m.singular_values().map_err(|e| Error::Backend(format!("{e:?}")))
}

/// Orthonormal basis (as columns) of the null space of a Hermitian matrix:
/// eigenvectors whose eigenvalue magnitude is at most `tol` times the largest.
pub fn hermitian_null_space(a: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, Vec<f64>)> {
    let (vals, vecs) = eig_hermitian_dense(a)?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].abs() <= tol * scale).collect();
    let rows: Vec<usize> = (0..a.rows()).collect();
    Ok((vecs.submatrix(&rows, &keep), vals))
}

/// Inverse of a Hermitian positive-definite matrix together with its
/// condition number.
pub fn hermitian_pd_inverse(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let (vals, vecs) = eig_hermitian_dense(a)?;
    let lo = vals.first().copied().unwrap_or(0.0);
    let hi = vals.last().copied().unwrap_or(0.0);
    if lo <= 0.0 {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    let cond = hi / lo;
    let n = a.rows();
    let inv = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| vecs[(i, k)] * vecs[(j, k)].conj() / vals[k]).sum()
    });
    Ok((inv, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(d.len(), d.len(), |i, j| {
            if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) }
        })
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let (vals, _) = eig_hermitian_dense(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_z_spectrum() {
        let vals = eigvals_hermitian_dense(&diag(&[1.0, -1.0])).unwrap();
        assert_eq!(vals, vec![-1.0, 1.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = diag(&[1.0, 1.0]);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(eig_hermitian_dense(&m), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn complex_hermitian_residuals() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| {
            let x = ((i * 7 + j * 3) % 5) as f64;
            let y = ((i * 2 + j * 5) % 7) as f64 - 3.0;
            if i == j { C64::new(x, 0.0) } else if i < j { C64::new(x, y) } else { C64::new(0.0, 0.0) }
        });
        let m = m.add(&m.adjoint()).unwrap();
        let (vals, vecs) = eig_hermitian_dense(&m).unwrap();
        for k in 0..5 {
            let v = vecs.column(k);
            let mv = m.matvec(&v).unwrap();
            let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - b * vals[k]).norm_sqr()).sum();
            assert!(res.sqrt() < 1e-10);
        }
    }

    #[test]
    fn blocks_found_for_block_diagonal() {
        let mut m = diag(&[1.0, 2.0, 3.0, 4.0]);
        m[(0, 3)] = C64::new(0.5, 0.0);
        m[(3, 0)] = C64::new(0.5, 0.0);
        let blocks = connected_blocks(&m);
        assert_eq!(blocks, vec![vec![0, 3], vec![1], vec![2]]);
    }

    #[test]
    fn pd_inverse_condition() {
        let (inv, cond) = hermitian_pd_inverse(&diag(&[2.0, 4.0])).unwrap();
        assert!((inv[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((cond - 2.0).abs() < 1e-12);
    }
}
