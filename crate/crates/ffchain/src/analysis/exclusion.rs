use std::ops::Range;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::correlation::ket_bra;
use super::gauge::gauge;
use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::groundspace::{region_basis, region_projector_apply, GroundSpaceBasis, NUMERIC_MAX_N};
use crate::numerics::{apply_on_sites, op_two_norm, ComplexMatrix, StateVector};
use crate::states::{TwoQubitState, Vec2};

const NORM_TOL: f64 = 1e-10;

enum Factor {
    Ground(GroundSpaceBasis),
    /// |u⟩⟨u| on every site of the range.
    Product(Range<usize>, ComplexMatrix),
}

/// Σ_k c_k F_{k,1} F_{k,2} ⋯ with Hermitian factors.
struct OpExpr {
    n: usize,
    factors: Vec<Factor>,
    terms: Vec<(f64, Vec<usize>)>,
}

impl OpExpr {
    fn new(n: usize) -> Self {
        Self { n, factors: Vec::new(), terms: Vec::new() }
    }

    fn ground(&mut self, spec: &ChainSpec, region: Range<usize>) -> Result<usize> {
        self.factors.push(Factor::Ground(region_basis(spec, region)?));
        Ok(self.factors.len() - 1)
    }

    fn product(&mut self, region: Range<usize>, u: &Vec2) -> usize {
        let p = ket_bra(u);
        self.factors.push(Factor::Product(region, ComplexMatrix::from_fn(2, 2, |r, c| p[r][c])));
        self.factors.len() - 1
    }

    fn term(&mut self, coef: f64, factors: &[usize]) {
        self.terms.push((coef, factors.to_vec()));
    }

    fn apply_factor(&self, k: usize, x: Vec<C64>) -> Vec<C64> {
        match &self.factors[k] {
            Factor::Ground(b) => {
                let sv = StateVector::new(x).expect("power of two");
                region_projector_apply(b, &sv).expect("region inside register").into_amps()
            }
            Factor::Product(r, p) => r.clone().fold(x, |acc, s| apply_on_sites(p, &[s], &acc, self.n)),
        }
    }

    fn apply_with(&self, x: &[C64], adjoint: bool) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        for (coef, fs) in &self.terms {
            let y = if adjoint {
                fs.iter().fold(x.to_vec(), |acc, &k| self.apply_factor(k, acc))
            } else {
                fs.iter().rev().fold(x.to_vec(), |acc, &k| self.apply_factor(k, acc))
            };
            out.iter_mut().zip(&y).for_each(|(o, v)| *o += v * coef);
        }
        out
    }

    fn norm(&self) -> Result<f64> {
        op_two_norm(|x| self.apply_with(x, false), |x| self.apply_with(x, true), 1 << self.n, NORM_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExclusionLemma {
    C1,
    C2,
    X1,
    X2,
}

impl ExclusionLemma {
    pub fn regions(self) -> usize {
        if self == Self::C2 {
            4
        } else {
            3
        }
    }
}

fn check_partition(n: usize, sizes: &[usize], expected: usize) -> Result<Vec<Range<usize>>> {
    if sizes.len() != expected || sizes.contains(&0) || sizes.iter().sum::<usize>() != n {
        return Err(Error::PartitionInvalid(format!("{sizes:?} is not a partition of {n} sites into {expected} regions")));
    }
    if n > NUMERIC_MAX_N {
        return Err(Error::DimensionTooLarge { dim: 1 << n, cap: 1 << NUMERIC_MAX_N });
    }
    let mut start = 0;
    Ok(sizes
        .iter()
        .map(|&len| {
            start += len;
            start - len..start
        })
        .collect())
}

fn join(a: &Range<usize>, b: &Range<usize>) -> Range<usize> {
    a.start..b.end
}

/// Left-hand-side norm of the chosen region-exclusion estimate, in the gauge
/// where the μ₁-eigenvector of T is |0⟩.
pub fn region_exclusion(psi: &TwoQubitState, n: usize, lemma: ExclusionLemma, sizes: &[usize]) -> Result<f64> {
    let r = check_partition(n, sizes, lemma.regions())?;
    let g = gauge(psi)?;
    let spec = ChainSpec::open(g.state, n);
    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let mut e = OpExpr::new(n);
    match lemma {
        ExclusionLemma::C1 => {
            // (G_ABC − G_AB ⊗ I)|v⟩⟨v|_BC
            let (a, b, c) = (&r[0], &r[1], &r[2]);
            let gabc = e.ground(&spec, join(a, c))?;
            let gab = e.ground(&spec, join(a, b))?;
            let vbc = e.product(join(b, c), &g.v);
            e.term(1.0, &[gabc, vbc]);
            e.term(-1.0, &[gab, vbc]);
        }
        ExclusionLemma::C2 => {
            // (G_ABCD − |0⟩⟨0|_A ⊗ G_BCD)(I − |v⟩⟨v|_C)
            let (a, b, c, d) = (&r[0], &r[1], &r[2], &r[3]);
            let gall = e.ground(&spec, join(a, d))?;
            let gbcd = e.ground(&spec, join(b, d))?;
            let z = e.product(a.clone(), &zero);
            let vc = e.product(c.clone(), &g.v);
            e.term(1.0, &[gall]);
            e.term(-1.0, &[gall, vc]);
            e.term(-1.0, &[z, gbcd]);
            e.term(1.0, &[z, gbcd, vc]);
        }
        ExclusionLemma::X1 => {
            // G_{AB>C} − |0⟩⟨0|_A ⊗ G_{B>C}, with G_{X>Y} = G_X ⊗ |v⟩⟨v|_Y − G_XY
            let (a, b, c) = (&r[0], &r[1], &r[2]);
            let gab = e.ground(&spec, join(a, b))?;
            let gabc = e.ground(&spec, join(a, c))?;
            let gb = e.ground(&spec, b.clone())?;
            let gbc = e.ground(&spec, join(b, c))?;
            let vc = e.product(c.clone(), &g.v);
            let z = e.product(a.clone(), &zero);
            e.term(1.0, &[gab, vc]);
            e.term(-1.0, &[gabc]);
            e.term(-1.0, &[z, gb, vc]);
            e.term(1.0, &[z, gbc]);
        }
        ExclusionLemma::X2 => {
            // G_{A<BC} − G_{A<B} ⊗ |v⟩⟨v|_C, with G_{X<Y} = |0⟩⟨0|_X ⊗ G_Y − G_XY
            let (a, b, c) = (&r[0], &r[1], &r[2]);
            let z = e.product(a.clone(), &zero);
            let gbc = e.ground(&spec, join(b, c))?;
            let gabc = e.ground(&spec, join(a, c))?;
            let gb = e.ground(&spec, b.clone())?;
            let gab = e.ground(&spec, join(a, b))?;
            let vc = e.product(c.clone(), &g.v);
            e.term(1.0, &[z, gbc]);
            e.term(-1.0, &[gabc]);
            e.term(-1.0, &[z, gb, vc]);
            e.term(1.0, &[gab, vc]);
        }
    }
    e.norm()
}

/// ‖G_ABC − G_AB G_BC‖ with |C| = 1 and |B| = b_size.
pub fn nachtergaele_overlap(psi: &TwoQubitState, n: usize, b_size: usize) -> Result<f64> {
    if b_size == 0 || b_size + 2 > n {
        return Err(Error::PartitionInvalid(format!("|B| = {b_size} leaves no room for A and C in {n} sites")));
    }
    let r = check_partition(n, &[n - b_size - 1, b_size, 1], 3)?;
    let spec = ChainSpec::open(*psi, n);
    let mut e = OpExpr::new(n);
    let gabc = e.ground(&spec, 0..n)?;
    let gab = e.ground(&spec, join(&r[0], &r[1]))?;
    let gbc = e.ground(&spec, join(&r[1], &r[2]))?;
    e.term(1.0, &[gabc]);
    e.term(-1.0, &[gab, gbc]);
    e.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundspace::{kernel_basis, KernelMethod};
    use crate::numerics::{embed_operator, singular_values};

    fn product_psi() -> TwoQubitState {
        let (s, c) = (0.6, C64::new(0.48, 0.64));
        TwoQubitState::product([C64::new(0.0, 0.0), C64::new(1.0, 0.0)], [C64::new(s, 0.0), -c.conj()]).unwrap()
    }

    fn dense_ground(psi: &TwoQubitState, n: usize, region: Range<usize>) -> ComplexMatrix {
        let len = region.len();
        let local = if len <= 1 {
            ComplexMatrix::identity(1 << len)
        } else {
            kernel_basis(&ChainSpec::open(*psi, len), KernelMethod::Numeric).unwrap().projector()
        };
        let sites: Vec<usize> = region.collect();
        embed_operator(&local, &sites, n)
    }

    #[test]
    fn product_state_identities_are_exact() {
        let psi = product_psi();
        assert!(region_exclusion(&psi, 6, ExclusionLemma::C1, &[2, 2, 2]).unwrap() < 1e-10);
        assert!(region_exclusion(&psi, 6, ExclusionLemma::C2, &[1, 2, 2, 1]).unwrap() < 1e-10);
        assert!(region_exclusion(&psi, 6, ExclusionLemma::X1, &[2, 2, 2]).unwrap() < 1e-10);
        assert!(region_exclusion(&psi, 6, ExclusionLemma::X2, &[2, 2, 2]).unwrap() < 1e-10);
    }

    #[test]
    fn overlap_matches_dense_oracle() {
        let psi = TwoQubitState::xxz(1.5);
        let n = 6;
        let got = nachtergaele_overlap(&psi, n, 2).unwrap();
        let gabc = dense_ground(&psi, n, 0..6);
        let gab = dense_ground(&psi, n, 0..5);
        let gbc = dense_ground(&psi, n, 3..6);
        let diff = gabc.sub(&gab.matmul(&gbc).unwrap()).unwrap();
        let want = singular_values(&diff).unwrap().into_iter().fold(0.0, f64::max);
        assert!((got - want).abs() < 1e-8, "{got} {want}");
    }

    #[test]
    fn c1_matches_dense_oracle() {
        let psi = TwoQubitState::xxz(2.0);
        let g = gauge(&psi).unwrap();
        let n = 5;
        let got = region_exclusion(&psi, n, ExclusionLemma::C1, &[2, 2, 1]).unwrap();
        let vv = ComplexMatrix::from_fn(2, 2, |r, c| ket_bra(&g.v)[r][c]);
        let pv = embed_operator(&vv.kron(&vv).kron(&vv), &[2, 3, 4], n);
        let lhs = dense_ground(&g.state, n, 0..5).sub(&dense_ground(&g.state, n, 0..4)).unwrap();
        let want = singular_values(&lhs.matmul(&pv).unwrap()).unwrap().into_iter().fold(0.0, f64::max);
        assert!((got - want).abs() < 1e-8, "{got} {want}");
    }

    #[test]
    fn bad_partitions() {
        let psi = TwoQubitState::xxz(2.0);
        assert!(matches!(region_exclusion(&psi, 6, ExclusionLemma::C1, &[2, 2]), Err(Error::PartitionInvalid(_))));
        assert!(matches!(region_exclusion(&psi, 6, ExclusionLemma::C2, &[2, 2, 1, 2]), Err(Error::PartitionInvalid(_))));
        assert!(matches!(nachtergaele_overlap(&psi, 6, 5), Err(Error::PartitionInvalid(_))));
        let singlet = TwoQubitState::singlet();
        assert_eq!(region_exclusion(&singlet, 6, ExclusionLemma::X1, &[2, 2, 2]), Err(Error::GaugeUnavailable));
    }
}
