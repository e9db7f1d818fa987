use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::{norm, ComplexMatrix, StateVector};

/// Deterministic RNG for a seed and a stream label.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_complex(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random unit vector of dimension `dim`.
pub fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, n_qubits: usize) -> StateVector {
    StateVector::new(unit_vector(rng, 1 << n_qubits)).expect("power of two")
}

/// Haar-random d × d unitary (QR of a Ginibre matrix with phase fix).
pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian_complex(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let c: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}
