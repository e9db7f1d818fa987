use num_complex::Complex64 as C64;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::groundspace::region_basis;
use crate::numerics::{
    eigvals_hermitian_dense, hermitian_pd_inverse, inner, orthonormalize, random, ComplexMatrix, StateVector,
};
use crate::states::{schmidt, TwoQubitState};

pub const MONOTONICITY_MAX_N: usize = 10;
/// Closed-form R_n is not reported above this condition number.
pub const CONDITION_CAP: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RnBranch {
    ClosedForm,
    /// Last bond is a product state; only the direct construction applies.
    ProductLastBond,
    IllConditioned,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub n: usize,
    /// Smallest eigenvalue of Tr_n(G_n) on the support of G_{n−1}.
    pub min_nonzero_eig: f64,
    /// Tr((I − G_{n−1}) Tr_n(G_n)).
    pub off_support: f64,
    pub rn_norm_def: f64,
    pub rn_norm_formula: Option<f64>,
    pub agreement: Option<f64>,
    /// max |M₀†M₀ + M₁†M₁ − I|
    pub m_identity_dev: Option<f64>,
    /// Smallest eigenvalue of M₀M₀† + M₁M₁†.
    pub m_gram_min_eig: Option<f64>,
    pub condition: Option<f64>,
    pub branch: RnBranch,
}

impl MonotonicityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_nonzero_eig >= 1.0 - tol
            && self.off_support <= tol
            && self.rn_norm_def <= 1.0 + tol
            && self.agreement.is_none_or(|a| a <= tol)
            && self.m_identity_dev.is_none_or(|d| d <= tol)
            && self.m_gram_min_eig.is_none_or(|e| e >= 1.0 - tol)
    }
}

/// Split g (n qubits) by the value of its last qubit.
fn halves(g: &[C64]) -> [Vec<C64>; 2] {
    [g.iter().step_by(2).copied().collect(), g.iter().skip(1).step_by(2).copied().collect()]
}

fn gram(rows: &[StateVector], cols: &[&[C64]]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |a, b| inner(rows[a].amps(), cols[b]))
}

/// (min eigenvalue of B, off-support mass, R_n = 2I − B), with B the matrix of
/// Tr_n(G_n) in the orthonormal basis `h` of G_{n−1}.
fn traced_block(h: &[StateVector], g: &[StateVector]) -> Result<(f64, f64, ComplexMatrix)> {
    let parts: Vec<[Vec<C64>; 2]> = g.iter().map(|v| halves(v.amps())).collect();
    let s = h.len();
    let mut b = ComplexMatrix::zeros(s, s);
    for part in &parts {
        for half in part {
            let proj: Vec<C64> = h.iter().map(|hk| inner(hk.amps(), half)).collect();
            for k in 0..s {
                for l in 0..s {
                    b[(k, l)] += proj[k] * proj[l].conj();
                }
            }
        }
    }
    let off_support = (g.len() as f64 - b.trace().re).max(0.0);
    let min = eigvals_hermitian_dense(&b)?.first().copied().unwrap_or(f64::INFINITY);
    let r = ComplexMatrix::identity(s).scale(C64::new(2.0, 0.0)).sub(&b)?;
    Ok((min, off_support, r))
}

fn hermitian_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_hermitian_dense(&m.hermitian_part())?.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

/// Partial-trace checks for the open chain with bonds ψ₁, …, ψ_{n−1}.
pub fn monotonicity_check(bonds: &[TwoQubitState]) -> Result<MonotonicityReport> {
    let n = bonds.len() + 1;
    if bonds.is_empty() {
        return Err(Error::InvalidSpec("at least one bond is required".into()));
    }
    if n > MONOTONICITY_MAX_N {
        return Err(Error::DimensionTooLarge { dim: 1 << n, cap: 1 << MONOTONICITY_MAX_N });
    }
    let spec = ChainSpec::inhomogeneous(bonds.to_vec());
    let g_n = region_basis(&spec, 0..n)?.vectors;
    let h = region_basis(&spec, 0..n - 1)?.vectors;
    let gprev = region_basis(&spec, 0..n.saturating_sub(2))?.vectors;
    let (min_nonzero_eig, off_support, r_def) = traced_block(&h, &g_n)?;
    let rn_norm_def = hermitian_norm(&r_def)?;

    let sd = schmidt(&bonds[n - 2]);
    let ms: Vec<ComplexMatrix> = [sd.w0, sd.w1]
        .iter()
        .map(|w| {
            let rows: Vec<StateVector> = gprev.iter().map(|g| g.kron(&StateVector::product(&[*w]))).collect();
            let cols: Vec<&[C64]> = h.iter().map(StateVector::amps).collect();
            gram(&rows, &cols)
        })
        .collect();
    let (m0, m1) = (&ms[0], &ms[1]);
    let id_sum = m0.adjoint().matmul(m0)?.add(&m1.adjoint().matmul(m1)?)?;
    let m_identity_dev = id_sum.sub(&ComplexMatrix::identity(h.len()))?.max_abs();
    let gram_sum = m0.matmul(&m0.adjoint())?.add(&m1.matmul(&m1.adjoint())?)?;
    let m_gram_min_eig = eigvals_hermitian_dense(&gram_sum.hermitian_part())?.first().copied().unwrap_or(f64::INFINITY);

    let mut report = MonotonicityReport {
        n,
        min_nonzero_eig,
        off_support,
        rn_norm_def,
        rn_norm_formula: None,
        agreement: None,
        m_identity_dev: Some(m_identity_dev),
        m_gram_min_eig: Some(m_gram_min_eig),
        condition: None,
        branch: RnBranch::ProductLastBond,
    };
    if sd.product {
        return Ok(report);
    }
    let (p0, p1) = (C64::new(sd.p0, 0.0), C64::new(sd.p1, 0.0));
    let x = m0.matmul(&m0.adjoint())?.scale(p0).add(&m1.matmul(&m1.adjoint())?.scale(p1))?;
    let (inv, cond) = match hermitian_pd_inverse(&x.hermitian_part()) {
        Ok(v) => v,
        Err(Error::IllConditioned(c)) => (ComplexMatrix::zeros(0, 0), c),
        Err(e) => return Err(e),
    };
    report.condition = Some(cond);
    if !(cond <= CONDITION_CAP) {
        report.branch = RnBranch::IllConditioned;
        return Ok(report);
    }
    let term = |m: &ComplexMatrix, p: C64| -> Result<ComplexMatrix> { Ok(m.adjoint().matmul(&inv)?.matmul(m)?.scale(p)) };
    let r_formula = term(m0, p0)?.add(&term(m1, p1)?)?;
    report.rn_norm_formula = Some(hermitian_norm(&r_formula)?);
    report.agreement = Some(r_formula.sub(&r_def)?.op_norm()?);
    report.branch = RnBranch::ClosedForm;
    Ok(report)
}

/// Reports for every prefix length n = 2..=bonds.len()+1.
pub fn monotonicity_prefixes(bonds: &[TwoQubitState]) -> Result<Vec<MonotonicityReport>> {
    (1..=bonds.len()).map(|k| monotonicity_check(&bonds[..k])).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceGuard {
    pub n: usize,
    pub dim_prev: usize,
    pub dim_n: usize,
    pub min_eig: f64,
    /// Whether Tr_n(G_n) ≥ G_{n−1} fails for this instance.
    pub violated: bool,
}

/// Tr_n(G_n) ≥ G_{n−1} for random subspaces 𝒢_{n−1} ⊆ (ℂ²)^{⊗(n−1)} and
/// 𝒢_n ⊆ 𝒢_{n−1} ⊗ ℂ² of the given dimensions.
pub fn random_subspace_guard(rng: &mut ChaCha8Rng, n: usize, dim_prev: usize, dim_n: usize) -> Result<SubspaceGuard> {
    if n < 2 || dim_prev > 1 << (n - 1) || dim_n > 2 * dim_prev {
        return Err(Error::InvalidSpec(format!("dimensions {dim_prev}, {dim_n} do not fit n = {n}")));
    }
    let draw = |rng: &mut ChaCha8Rng, count: usize, qubits: usize| -> Vec<StateVector> {
        loop {
            let raw: Vec<StateVector> = (0..count).map(|_| random::random_state(rng, qubits)).collect();
            let basis = orthonormalize(&raw, 1e-8);
            if basis.len() == count {
                return basis;
            }
        }
    };
    let h = draw(rng, dim_prev, n - 1);
    let ext: Vec<StateVector> = h
        .iter()
        .flat_map(|v| (0..2).map(move |b| v.kron(&StateVector::basis(1, b))))
        .collect();
    let g: Vec<StateVector> = {
        let mut raw = Vec::with_capacity(dim_n);
        for _ in 0..dim_n {
            let c = random::unit_vector(rng, ext.len());
            let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
            for (ck, e) in c.iter().zip(&ext) {
                for (a, x) in amps.iter_mut().zip(e.amps()) {
                    *a += ck * x;
                }
            }
            raw.push(StateVector::new(amps)?);
        }
        orthonormalize(&raw, 1e-8)
    };
    let (min_eig, _, _) = traced_block(&h, &g)?;
    Ok(SubspaceGuard { n, dim_prev, dim_n: g.len(), min_eig, violated: min_eig < 1.0 - 1e-8 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{partial_trace, projector};
    use crate::states::random_state;

    fn bonds(seed: u64, count: usize) -> Vec<TwoQubitState> {
        let mut r = random::rng(seed, 11);
        (0..count).map(|_| random_state(&mut r)).collect()
    }

    #[test]
    fn two_sites_gives_reduced_density() {
        let psi = TwoQubitState::xxz(2.0);
        let r = monotonicity_check(&[psi]).unwrap();
        // ρ₁ = diag(1, 4)/5
        assert!((r.rn_norm_def - 0.8).abs() < 1e-12);
        assert!((r.min_nonzero_eig - 1.2).abs() < 1e-12);
        assert!(r.agreement.unwrap() < 1e-10);
    }

    #[test]
    fn random_chains_satisfy_invariants() {
        for seed in 0..6 {
            for rep in monotonicity_prefixes(&bonds(seed, 5)).unwrap() {
                assert!(rep.passes(1e-8), "seed {seed}: {rep:?}");
                assert_eq!(rep.branch, RnBranch::ClosedForm);
            }
        }
    }

    #[test]
    fn traced_block_matches_dense_partial_trace() {
        let b = bonds(42, 3);
        let spec = ChainSpec::inhomogeneous(b.clone());
        let g = region_basis(&spec, 0..4).unwrap().vectors;
        let h = region_basis(&spec, 0..3).unwrap().vectors;
        let tr = partial_trace(&projector(&g), 4, &[3]).unwrap();
        let hp = projector(&h);
        let b_dense = hp.matmul(&tr).unwrap().matmul(&hp).unwrap();
        let want = eigvals_hermitian_dense(&b_dense).unwrap();
        let nonzero: Vec<f64> = want.into_iter().filter(|v| v.abs() > 1e-8).collect();
        let (min, off, _) = traced_block(&h, &g).unwrap();
        assert!((nonzero[0] - min).abs() < 1e-10);
        assert!(off < 1e-10);
    }

    #[test]
    fn product_last_bond_takes_trivial_branch() {
        let mut b = bonds(3, 3);
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        b.push(TwoQubitState::product([one, z], [C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap());
        let rep = monotonicity_check(&b).unwrap();
        assert_eq!(rep.branch, RnBranch::ProductLastBond);
        assert!(rep.min_nonzero_eig >= 1.0 - 1e-8);
        assert!(rep.agreement.is_none());
    }

    #[test]
    fn random_subspaces_can_violate() {
        let mut r = random::rng(5, 0);
        let hits = (0..50)
            .filter(|_| random_subspace_guard(&mut r, 4, 4, 5).unwrap().violated)
            .count();
        assert!(hits >= 1);
    }
}
