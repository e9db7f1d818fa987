use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{axpy, inner, norm, StateVector};
use crate::error::{Error, Result};

const MAX_BASIS: usize = 160;
const MAX_RESTARTS: usize = 60;
const CHECK_EVERY: usize = 4;
const START_SEED: u64 = 0x5eed_1a2c;
// Absolute residual floor for adjoint∘apply; rounding in differences of
// projectors stops relative convergence near zero norm.
const OP_NORM_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    pub vector: Vec<C64>,
    /// ||A x - value x|| for the returned unit vector.
    pub residual: f64,
    pub matvecs: usize,
}

/// Extremal eigenpair of a Hermitian action restricted to the orthogonal
/// complement of `deflate` (orthonormal vectors). Lanczos with full
/// reorthogonalization; restarts from the current Ritz vector when the
/// basis cap is hit.
pub fn lanczos_extreme<F>(
    apply: F,
    dim: usize,
    deflate: &[&[C64]],
    which: Extreme,
    tol: f64,
    abs_floor: f64,
) -> Result<RitzPair>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    if deflate.len() >= dim {
        return Err(Error::RangeViolation("deflation space fills the whole space".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut start: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut matvecs = 0;
    let cap = MAX_BASIS.min(dim - deflate.len());

    for _ in 0..MAX_RESTARTS {
        project_out(&mut start, deflate);
        let nrm = norm(&start);
        if nrm == 0.0 {
            return Err(Error::NoConvergence(matvecs));
        }
        start.iter_mut().for_each(|x| *x /= nrm);

        let mut basis: Vec<Vec<C64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut scale = 0.0f64;
        loop {
            let j = basis.len() - 1;
            let mut w = apply(&basis[j]);
            matvecs += 1;
            let alpha = inner(&basis[j], &w).re;
            axpy(C64::new(-alpha, 0.0), &basis[j], &mut w);
            if j > 0 {
                axpy(C64::new(-betas[j - 1], 0.0), &basis[j - 1], &mut w);
            }
            for _ in 0..2 {
                project_out(&mut w, deflate);
                for b in &basis {
                    let c = inner(b, &w);
                    axpy(-c, b, &mut w);
                }
            }
            alphas.push(alpha);
            let beta = norm(&w);
            scale = scale.max(alpha.abs()).max(beta);

            let size = alphas.len();
            let breakdown = beta <= 1e-14 * scale.max(f64::MIN_POSITIVE);
            let full = size >= cap;
            if scale == 0.0 {
                return Ok(RitzPair { value: 0.0, vector: basis.swap_remove(0), residual: 0.0, matvecs });
            }
            if breakdown || full || size % CHECK_EVERY == 0 {
                let (theta, y, spread) = tridiagonal_extreme(&alphas, &betas, which)?;
                let bound = beta * y[size - 1].abs();
                let tol_abs = (tol.max(1e-13) * spread.max(theta.abs())).max(abs_floor).max(f64::MIN_POSITIVE);
                if breakdown || bound <= tol_abs || full {
                    let mut x = vec![C64::new(0.0, 0.0); dim];
                    for (k, b) in basis.iter().enumerate() {
                        axpy(C64::new(y[k], 0.0), b, &mut x);
                    }
                    project_out(&mut x, deflate);
                    let xn = norm(&x);
                    x.iter_mut().for_each(|v| *v /= xn);
                    let ax = apply(&x);
                    matvecs += 1;
                    let value = inner(&x, &ax).re;
                    let residual = norm(
                        &ax.iter().zip(&x).map(|(a, b)| a - b * value).collect::<Vec<_>>(),
                    );
                    if residual <= tol_abs {
                        return Ok(RitzPair { value, vector: x, residual, matvecs });
                    }
                    start = x;
                    break;
                }
            }
            let next: Vec<C64> = w.iter().map(|v| v / beta).collect();
            betas.push(beta);
            basis.push(next);
        }
    }
    Err(Error::NoConvergence(matvecs))
}

fn project_out(w: &mut [C64], deflate: &[&[C64]]) {
    for k in deflate {
        let c = inner(k, w);
        axpy(-c, k, w);
    }
}

/// Extremal eigenpair of the symmetric tridiagonal matrix; also returns the
/// spectral spread max|eigenvalue| used to scale tolerances.
fn tridiagonal_extreme(alphas: &[f64], betas: &[f64], which: Extreme) -> Result<(f64, Vec<f64>, f64)> {
    let m = alphas.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let e = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| Error::Backend(format!("{err:?}")))?;
    let s = e.S().column_vector();
    let k = match which {
        Extreme::Smallest => 0,
        Extreme::Largest => m - 1,
    };
    let spread = s[0].abs().max(s[m - 1].abs());
    let u = e.U();
    Ok((s[k], (0..m).map(|i| u[(i, k)]).collect(), spread))
}

/// Smallest eigenvalue of a Hermitian positive semidefinite action on the
/// orthogonal complement of a known kernel.
pub fn smallest_nonzero_deflated<F>(apply: F, dim: usize, kernel: &[StateVector], tol: f64) -> Result<f64>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    Ok(deflated_lowest(apply, dim, kernel, tol)?.value)
}

/// As [`smallest_nonzero_deflated`], returning the full Ritz pair.
pub fn deflated_lowest<F>(apply: F, dim: usize, kernel: &[StateVector], tol: f64) -> Result<RitzPair>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    for (index, k) in kernel.iter().enumerate() {
        if k.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: k.dim() });
        }
        let residual = norm(&apply(k.amps()));
        if residual > 10.0 * tol {
            return Err(Error::KernelNotAnnihilated { index, residual });
        }
    }
    let deflate: Vec<&[C64]> = kernel.iter().map(StateVector::amps).collect();
    lanczos_extreme(apply, dim, &deflate, Extreme::Smallest, tol, 0.0)
}

/// Largest singular value of a linear action, from Lanczos on adjoint∘apply.
/// Values below about 1e-12 are resolved only to that level.
pub fn op_two_norm<F, G>(apply: F, adjoint: G, dim: usize, tol: f64) -> Result<f64>
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    let gram = |x: &[C64]| adjoint(&apply(x));
    let top = lanczos_extreme(gram, dim, &[], Extreme::Largest, tol, OP_NORM_FLOOR)?;
    Ok(top.value.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_apply(d: Vec<f64>) -> impl Fn(&[C64]) -> Vec<C64> {
        move |x: &[C64]| x.iter().zip(&d).map(|(a, b)| a * b).collect()
    }

    #[test]
    fn deflated_diagonal() {
        let kernel = vec![StateVector::basis(2, 0), StateVector::basis(2, 1)];
        let v = smallest_nonzero_deflated(diag_apply(vec![0.0, 0.0, 3.0, 5.0]), 4, &kernel, 1e-12).unwrap();
        assert!((v - 3.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_check_rejects_bad_vector() {
        let kernel = vec![StateVector::basis(2, 2)];
        let r = smallest_nonzero_deflated(diag_apply(vec![0.0, 0.0, 3.0, 5.0]), 4, &kernel, 1e-10);
        assert!(matches!(r, Err(Error::KernelNotAnnihilated { .. })));
    }

    #[test]
    fn identity_norm_is_one() {
        let id = |x: &[C64]| x.to_vec();
        let v = op_two_norm(id, id, 8, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rank_one_norm() {
        let u: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 1.0)).collect();
        let w: Vec<C64> = (0..6).map(|k| C64::new(1.0, -(k as f64))).collect();
        let (un, wn) = (norm(&u), norm(&w));
        let u: Vec<C64> = u.iter().map(|x| x / un).collect();
        let w: Vec<C64> = w.iter().map(|x| x / wn).collect();
        let (u2, w2) = (u.clone(), w.clone());
        let a = move |x: &[C64]| {
            let c = inner(&w, x);
            u.iter().map(|ui| ui * c).collect::<Vec<_>>()
        };
        let at = move |x: &[C64]| {
            let c = inner(&u2, x);
            w2.iter().map(|wi| wi * c).collect::<Vec<_>>()
        };
        assert!((op_two_norm(a, at, 6, 1e-12).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_operator_norm() {
        let z = |x: &[C64]| vec![C64::new(0.0, 0.0); x.len()];
        assert_eq!(op_two_norm(z, z, 4, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn large_diagonal_needs_restart() {
        let d: Vec<f64> = (0..600).map(|k| 1.0 + k as f64 * 0.01).collect();
        let v = lanczos_extreme(diag_apply(d), 600, &[], Extreme::Smallest, 1e-10, 0.0).unwrap();
        assert!((v.value - 1.0).abs() < 1e-8, "{}", v.value);
    }
}
