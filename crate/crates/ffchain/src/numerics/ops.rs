use num_complex::Complex64 as C64;

use super::matrix::{axpy, inner, norm, ComplexMatrix, StateVector};
use crate::error::{Error, Result};

/// Bit mask of a site in an n-qubit index (site 0 is the most significant bit).
#[inline]
pub fn site_bit(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// Trace out the listed qubits of a 2^n × 2^n operator.
pub fn partial_trace(rho: &ComplexMatrix, n: usize, traced: &[usize]) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: rho.rows() });
    }
    if let Some(&bad) = traced.iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let mut traced: Vec<usize> = traced.to_vec();
    traced.sort_unstable();
    traced.dedup();
    let kept: Vec<usize> = (0..n).filter(|s| !traced.contains(s)).collect();
    let compose = |k: usize, t: usize| -> usize {
        let mut idx = 0;
        for (pos, &s) in kept.iter().enumerate() {
            if k & (1 << (kept.len() - 1 - pos)) != 0 {
                idx |= site_bit(n, s);
            }
        }
        for (pos, &s) in traced.iter().enumerate() {
            if t & (1 << (traced.len() - 1 - pos)) != 0 {
                idx |= site_bit(n, s);
            }
        }
        idx
    };
    let (dk, dt) = (1usize << kept.len(), 1usize << traced.len());
    Ok(ComplexMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| rho[(compose(i, t), compose(j, t))]).sum()
    }))
}

/// Orthonormal basis of the span of `vectors` by twice-iterated Gram-Schmidt.
/// A vector is dropped when its residual after projection is below `tol`
/// times its original norm.
pub fn orthonormalize(vectors: &[StateVector], tol: f64) -> Vec<StateVector> {
    let mut out: Vec<StateVector> = Vec::new();
    for v in vectors {
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        let mut w = v.amps().to_vec();
        for _ in 0..2 {
            for q in &out {
                let c = inner(q.amps(), &w);
                axpy(-c, q.amps(), &mut w);
            }
        }
        let r = norm(&w);
        if r < tol * original {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= r);
        out.push(StateVector::new(w).expect("dimension preserved"));
    }
    out
}

/// Apply a 2^k × 2^k operator to the listed sites of an n-qubit vector.
/// The first listed site is the most significant index of the operator.
pub fn apply_on_sites(op: &ComplexMatrix, sites: &[usize], x: &[C64], n: usize) -> Vec<C64> {
    let k = sites.len();
    debug_assert_eq!(op.rows(), 1 << k);
    let bits: Vec<usize> = sites.iter().map(|&s| site_bit(n, s)).collect();
    let mask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|a| {
            (0..k)
                .filter(|&p| a & (1 << (k - 1 - p)) != 0)
                .map(|p| bits[p])
                .sum()
        })
        .collect();
    let mut y = vec![C64::new(0.0, 0.0); x.len()];
    let mut local = vec![C64::new(0.0, 0.0); 1 << k];
    for base in 0..x.len() {
        if base & mask != 0 {
            continue;
        }
        for (a, off) in offsets.iter().enumerate() {
            local[a] = x[base + off];
        }
        for (a, off) in offsets.iter().enumerate() {
            let row = op.row(a);
            y[base + off] = row.iter().zip(&local).map(|(m, v)| m * v).sum();
        }
    }
    y
}

/// Dense matrix of `op` acting on `sites` of an n-qubit register, identity elsewhere.
pub fn embed_operator(op: &ComplexMatrix, sites: &[usize], n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = apply_on_sites(op, sites, &StateVector::basis(n, j).into_amps(), n);
        for (i, v) in col.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    out
}

/// Projector onto the span of orthonormal vectors.
pub fn projector(vectors: &[StateVector]) -> ComplexMatrix {
    let dim = vectors.first().map_or(1, StateVector::dim);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for v in vectors {
        let a = v.amps();
        for i in 0..dim {
            if a[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                p[(i, j)] += a[i] * a[j].conj();
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let s = 0.5f64.sqrt();
        let bell = StateVector::new(vec![c(s), c(0.0), c(0.0), c(s)]).unwrap();
        let rho = projector(&[bell]);
        let red = partial_trace(&rho, 2, &[1]).unwrap();
        assert!((red[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(red[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn product_reduction() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.7), c(0.1)], vec![c(0.1), c(0.3)]]).unwrap();
        let b = ComplexMatrix::from_rows(&[vec![c(0.4), C64::new(0.0, 0.2)], vec![C64::new(0.0, -0.2), c(0.6)]]).unwrap();
        let red = partial_trace(&a.kron(&b), 2, &[1]).unwrap();
        assert!(red.sub(&a).unwrap().max_abs() < 1e-15);
        let red_b = partial_trace(&a.kron(&b), 2, &[0]).unwrap();
        assert!(red_b.sub(&b).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn trace_out_of_range() {
        let r = partial_trace(&ComplexMatrix::identity(4), 2, &[2]);
        assert!(matches!(r, Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn duplicates_removed() {
        let e1 = StateVector::basis(1, 0);
        let e2 = StateVector::basis(1, 1);
        assert_eq!(orthonormalize(&[e1.clone(), e1, e2], 1e-10).len(), 2);
    }

    #[test]
    fn near_duplicate_dropped() {
        let e1 = StateVector::basis(1, 0);
        let e1b = StateVector::new(vec![c(1.0), c(1e-14)]).unwrap();
        assert_eq!(orthonormalize(&[e1, e1b], 1e-10).len(), 1);
    }

    #[test]
    fn apply_on_sites_matches_embedding() {
        let x_gate = ComplexMatrix::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let v = StateVector::basis(3, 0);
        let y = apply_on_sites(&x_gate, &[1], v.amps(), 3);
        assert_eq!(y[2], c(1.0));
        let e = embed_operator(&x_gate, &[2], 3);
        assert_eq!(e[(1, 0)], c(1.0));
    }
}
