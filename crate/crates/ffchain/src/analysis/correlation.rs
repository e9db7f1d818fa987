use num_complex::Complex64 as C64;
use serde::Serialize;

use super::gauge::{gauge, Gauge};
use crate::chain::{Bonds, ChainSpec};
use crate::error::{Error, Result};
use crate::groundspace::ground_basis;
use crate::numerics::{apply_on_sites, eigvals_hermitian_dense, inner, ComplexMatrix};
use crate::states::{Mat2, TwoQubitState, Vec2};

pub type Observable = (usize, Mat2);

pub fn ket_bra(v: &Vec2) -> Mat2 {
    [[v[0] * v[0].conj(), v[0] * v[1].conj()], [v[1] * v[0].conj(), v[1] * v[1].conj()]]
}

fn to_matrix(m: &Mat2) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| m[r][c])
}

fn apply_observables(obs: &[(usize, ComplexMatrix)], x: &[C64], n: usize) -> Vec<C64> {
    obs.iter().fold(x.to_vec(), |acc, (site, m)| apply_on_sites(m, &[*site], &acc, n))
}

fn checked_observables(obs: &[Observable], n: usize) -> Result<Vec<(usize, ComplexMatrix)>> {
    let mut seen = vec![false; n];
    obs.iter()
        .map(|(site, m)| {
            if *site >= n {
                return Err(Error::IndexOutOfRange { index: *site, n });
            }
            if std::mem::replace(&mut seen[*site], true) {
                return Err(Error::SiteCollision(*site));
            }
            Ok((*site, to_matrix(m)))
        })
        .collect()
}

/// Tr(G_n ⊗ observables) = Σ_a ⟨g_a|O|g_a⟩.
pub fn ground_expectation(spec: &ChainSpec, observables: &[Observable]) -> Result<f64> {
    let obs = checked_observables(observables, spec.n)?;
    let basis = ground_basis(spec)?;
    Ok(basis
        .vectors
        .iter()
        .map(|g| inner(g.amps(), &apply_observables(&obs, g.amps(), spec.n)).re)
        .sum())
}

/// Largest eigenvalue of the observable compressed to the ground space.
fn ground_max(spec: &ChainSpec, observables: &[Observable]) -> Result<f64> {
    let obs = checked_observables(observables, spec.n)?;
    let basis = ground_basis(spec)?;
    let images: Vec<Vec<C64>> = basis.vectors.iter().map(|g| apply_observables(&obs, g.amps(), spec.n)).collect();
    let k = ComplexMatrix::from_fn(basis.dim(), basis.dim(), |a, b| inner(basis.vectors[a].amps(), &images[b]));
    Ok(eigvals_hermitian_dense(&k.hermitian_part())?.last().copied().unwrap_or(0.0))
}

fn gauged(spec: &ChainSpec) -> Result<(Gauge, ChainSpec)> {
    let psi = spec
        .homogeneous_state()
        .ok_or_else(|| Error::InvalidSpec("correlation functions need a homogeneous chain".into()))?;
    let g = gauge(psi)?;
    let out = ChainSpec { n: spec.n, boundary: spec.boundary, bonds: Bonds::Homogeneous(g.state) };
    Ok((g, out))
}

fn pair_observables(g: &Gauge, i: usize, j: usize, n: usize) -> Result<Vec<Observable>> {
    if !(i < j && j < n) {
        return Err(Error::RangeViolation(format!("need i < j < n, got i = {i}, j = {j}, n = {n}")));
    }
    let one = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    Ok(vec![(i, ket_bra(&one)), (j, ket_bra(&g.v_perp))])
}

/// τ(i,j,n) = Tr(G_n |1⟩⟨1|_i ⊗ |v⊥⟩⟨v⊥|_j) in the gauge of the chain's state.
pub fn tau_pair(spec: &ChainSpec, i: usize, j: usize) -> Result<f64> {
    let (g, s) = gauged(spec)?;
    ground_expectation(&s, &pair_observables(&g, i, j, spec.n)?)
}

/// τ(n) = Tr(G_n |v⊥⟩⟨v⊥|) on the last site.
pub fn tau_single(spec: &ChainSpec) -> Result<f64> {
    let (g, s) = gauged(spec)?;
    ground_expectation(&s, &[(spec.n - 1, ket_bra(&g.v_perp))])
}

/// σ(i,j,n): maximum of ⟨φ|1⟩⟨1|_i ⊗ |v⊥⟩⟨v⊥|_j|φ⟩ over normalized ground states.
pub fn sigma_max(spec: &ChainSpec, i: usize, j: usize) -> Result<f64> {
    let (g, s) = gauged(spec)?;
    ground_max(&s, &pair_observables(&g, i, j, spec.n)?)
}

/// θ(n,r) = Tr(G_n I ⊗ |v⟩⟨v|^{⊗r}) on the last r sites.
pub fn theta(spec: &ChainSpec, r: usize) -> Result<f64> {
    let (g, s) = gauged(spec)?;
    let obs: Vec<Observable> = (spec.n - r.min(spec.n)..spec.n).map(|k| (k, ket_bra(&g.v))).collect();
    ground_expectation(&s, &obs)
}

/// ξ(n,r) = Tr(G_n I ⊗ |v⟩⟨v|^{⊗r} ⊗ |v⊥⟩⟨v⊥|).
pub fn xi(spec: &ChainSpec, r: usize) -> Result<f64> {
    if r + 1 > spec.n {
        return Err(Error::RangeViolation(format!("r = {r} needs more than {} sites", spec.n)));
    }
    let (g, s) = gauged(spec)?;
    let mut obs: Vec<Observable> = (spec.n - r - 1..spec.n - 1).map(|k| (k, ket_bra(&g.v))).collect();
    obs.push((spec.n - 1, ket_bra(&g.v_perp)));
    ground_expectation(&s, &obs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    pub n: usize,
    pub tau: f64,
    pub sigma: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    /// (n, τ(n))
    pub tau_single: Vec<(usize, f64)>,
    pub pairs: Vec<PairEntry>,
    pub gauge: Gauge,
}

impl CorrelationTable {
    /// Largest drop τ(n−1) − τ(n); non-positive for a non-decreasing sequence.
    pub fn max_decrease(&self) -> f64 {
        self.tau_single.windows(2).map(|w| w[0].1 - w[1].1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest σ − bound over all pairs.
    pub fn max_sigma_excess(&self) -> f64 {
        self.pairs.iter().map(|p| p.sigma - p.bound).fold(f64::NEG_INFINITY, f64::max)
    }

    /// τ(i,j,n) keyed by distance j−i for a fixed i and n.
    pub fn tau_by_distance(&self, n: usize, i: usize) -> Vec<(f64, f64)> {
        self.pairs.iter().filter(|p| p.n == n && p.i == i).map(|p| ((p.j - p.i) as f64, p.tau)).collect()
    }
}

/// τ(n) for every n in `single_ns`, and τ, σ for all pairs i < j at each n in `pair_ns`.
pub fn correlation_table(psi: &TwoQubitState, single_ns: &[usize], pair_ns: &[usize]) -> Result<CorrelationTable> {
    let g = gauge(psi)?;
    let tau_single = single_ns
        .iter()
        .map(|&n| Ok((n, tau_single(&ChainSpec::open(*psi, n))?)))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for &n in pair_ns {
        let spec = ChainSpec::open(g.state, n);
        let basis = ground_basis(&spec)?;
        for i in 0..n {
            for j in i + 1..n {
                let obs = checked_observables(&pair_observables(&g, i, j, n)?, n)?;
                let images: Vec<Vec<C64>> =
                    basis.vectors.iter().map(|v| apply_observables(&obs, v.amps(), n)).collect();
                let k = ComplexMatrix::from_fn(basis.dim(), basis.dim(), |a, b| {
                    inner(basis.vectors[a].amps(), &images[b])
                });
                let tau = k.trace().re;
                let sigma = eigvals_hermitian_dense(&k.hermitian_part())?.last().copied().unwrap_or(0.0);
                pairs.push(PairEntry { i, j, n, tau, sigma, bound: g.sigma_bound(j - i) });
            }
        }
    }
    Ok(CorrelationTable { tau_single, pairs, gauge: g })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    /// RMS deviation of the logarithms.
    pub residual: f64,
}

/// Least-squares fit of log(value) = log(prefactor) − rate·distance.
pub fn decay_fit(values: &[(f64, f64)]) -> Result<DecayFit> {
    if values.len() < 3 {
        return Err(Error::InvalidSpec(format!("decay fit needs at least 3 points, got {}", values.len())));
    }
    if let Some(&(_, bad)) = values.iter().find(|(_, y)| !(*y > 0.0)) {
        return Err(Error::NonPositiveValue(bad));
    }
    let m = values.len() as f64;
    let xs: Vec<f64> = values.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = values.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidSpec("decay fit needs distinct distances".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    Ok(DecayFit { rate: -slope, prefactor: intercept.exp(), residual })
}

/// Dense Tr(G O) with G built from a numeric kernel; used as an independent check.
pub fn dense_trace_expectation(spec: &ChainSpec, observables: &[Observable]) -> Result<f64> {
    use crate::groundspace::{kernel_basis, KernelMethod};
    use crate::numerics::embed_operator;
    let basis = kernel_basis(spec, KernelMethod::Numeric)?;
    let mut op = ComplexMatrix::identity(1 << spec.n);
    for (site, m) in checked_observables(observables, spec.n)? {
        op = embed_operator(&m, &[site], spec.n).matmul(&op)?;
    }
    Ok(basis.projector().matmul(&op)?.trace().re)
}
