//! Spectral gaps, low spectra, Knabe and Weyl checks, and continued-fraction
//! convergents.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chain::{build_chain, Boundary, ChainSpec};
use crate::error::{Error, Result};
use crate::groundspace::{has_analytic_basis, kernel_basis, numeric_kernel, KernelMethod, NUMERIC_MAX_N, RANK_TOL};
use crate::numerics::{deflated_lowest, eigvals_hermitian_dense};
use crate::states::{classify_phase, transfer_matrix, PhaseKind, TwoQubitState, CLASSIFY_TOL};

/// Chains up to this length use the dense solver by default.
pub const DENSE_AUTO_MAX_N: usize = 10;
pub const ITERATIVE_MAX_N: usize = 22;
pub const LANCZOS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMethod {
    Dense,
    DeflatedIterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    #[serde(rename = "gap")]
    pub value: f64,
    pub n: usize,
    pub boundary: Boundary,
    pub method: GapMethod,
    pub kernel_dim: usize,
    pub residual: f64,
}

/// Smallest nonzero eigenvalue, dense for short chains and deflated Lanczos above.
pub fn spectral_gap(spec: &ChainSpec) -> Result<GapResult> {
    let method = if spec.n <= DENSE_AUTO_MAX_N { GapMethod::Dense } else { GapMethod::DeflatedIterative };
    spectral_gap_with(spec, method)
}

pub fn spectral_gap_with(spec: &ChainSpec, method: GapMethod) -> Result<GapResult> {
    match method {
        GapMethod::Dense => dense_gap(spec),
        GapMethod::DeflatedIterative => iterative_gap(spec),
    }
}

fn dense_gap(spec: &ChainSpec) -> Result<GapResult> {
    if spec.n > NUMERIC_MAX_N {
        return Err(Error::DimensionTooLarge { dim: 1 << spec.n, cap: 1 << NUMERIC_MAX_N });
    }
    let vals = eigvals_hermitian_dense(&build_chain(spec)?.dense())?;
    let top = vals.last().copied().unwrap_or(0.0).abs();
    let thr = RANK_TOL * top.max(f64::MIN_POSITIVE);
    let kernel_dim = vals.iter().take_while(|v| v.abs() <= thr).count();
    let value = *vals
        .get(kernel_dim)
        .ok_or_else(|| Error::KernelUnavailable("operator has no nonzero eigenvalue".into()))?;
    let residual = vals[..kernel_dim].iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(GapResult { value, n: spec.n, boundary: spec.boundary, method: GapMethod::Dense, kernel_dim, residual })
}

fn iterative_gap(spec: &ChainSpec) -> Result<GapResult> {
    if spec.n > ITERATIVE_MAX_N {
        return Err(Error::DimensionTooLarge { dim: 1 << spec.n, cap: 1 << ITERATIVE_MAX_N });
    }
    let op = build_chain(spec)?;
    let (kernel, kernel_residual) = if has_analytic_basis(spec) {
        let b = kernel_basis(spec, KernelMethod::Analytic)?;
        let r = b.residual;
        (b.vectors, r)
    } else if spec.n <= NUMERIC_MAX_N {
        (numeric_kernel(&op)?, 0.0)
    } else {
        return Err(Error::KernelUnavailable(format!("n = {} without an analytic kernel", spec.n)));
    };
    let ritz = deflated_lowest(|x| op.apply_slice(x), op.dim(), &kernel, LANCZOS_TOL)?;
    Ok(GapResult {
        value: ritz.value,
        n: spec.n,
        boundary: spec.boundary,
        method: GapMethod::DeflatedIterative,
        kernel_dim: kernel.len(),
        residual: ritz.residual.max(kernel_residual),
    })
}

/// The k smallest eigenvalues, ascending.
pub fn eigenvalues_lowest(spec: &ChainSpec, k: usize) -> Result<Vec<f64>> {
    if spec.n > NUMERIC_MAX_N {
        return Err(Error::DimensionTooLarge { dim: 1 << spec.n, cap: 1 << NUMERIC_MAX_N });
    }
    let mut vals = eigvals_hermitian_dense(&build_chain(spec)?.dense())?;
    vals.truncate(k);
    Ok(vals)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnabeReport {
    pub n: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// γ°(ψ,m) ≥ ((n−1)/(n−2))(γ(ψ,n) − 1/(n−1)).
pub fn knabe_check(psi: &TwoQubitState, n: usize, m: usize) -> Result<KnabeReport> {
    check_knabe_range(n, m)?;
    let open = spectral_gap(&ChainSpec::open(*psi, n))?.value;
    let periodic = spectral_gap(&ChainSpec::periodic(*psi, m))?.value;
    Ok(knabe_report(n, m, open, periodic))
}

fn check_knabe_range(n: usize, m: usize) -> Result<()> {
    if !(m >= n && n > 2) {
        return Err(Error::RangeViolation(format!("need m >= n > 2, got n = {n}, m = {m}")));
    }
    Ok(())
}

fn knabe_report(n: usize, m: usize, open_gap: f64, periodic_gap: f64) -> KnabeReport {
    let nf = n as f64;
    let rhs = (nf - 1.0) / (nf - 2.0) * (open_gap - 1.0 / (nf - 1.0));
    KnabeReport { n, m, lhs: periodic_gap, rhs, holds: periodic_gap >= rhs - 1e-9 }
}

/// Knabe reports for every 3 < n ≤ m with n ≤ n_max, m ≤ m_max; each gap is computed once.
pub fn knabe_grid(psi: &TwoQubitState, n_max: usize, m_max: usize) -> Result<Vec<KnabeReport>> {
    let open: Vec<f64> = (4..=n_max)
        .map(|n| spectral_gap(&ChainSpec::open(*psi, n)).map(|g| g.value))
        .collect::<Result<_>>()?;
    let periodic: Vec<f64> = (4..=m_max)
        .map(|m| spectral_gap(&ChainSpec::periodic(*psi, m)).map(|g| g.value))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for n in 4..=n_max {
        for m in n..=m_max {
            out.push(knabe_report(n, m, open[n - 4], periodic[m - 4]));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylReport {
    pub n: usize,
    pub max_dev_open: f64,
    pub max_dev_periodic: f64,
    pub max_dev: f64,
    pub bound: f64,
    pub holds: bool,
}

/// max_j |e_j(ψ,n) − e_j(φ,n)| against 2n‖ψ−φ‖, open and periodic.
pub fn weyl_check(psi: &TwoQubitState, phi: &TwoQubitState, n: usize) -> Result<WeylReport> {
    let dev = |boundary: Boundary| -> Result<f64> {
        let s = |st: &TwoQubitState| ChainSpec { n, boundary, bonds: crate::chain::Bonds::Homogeneous(*st) };
        let a = eigvals_hermitian_dense(&build_chain(&s(psi))?.dense())?;
        let b = eigvals_hermitian_dense(&build_chain(&s(phi))?.dense())?;
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    };
    let (open, periodic) = (dev(Boundary::Open)?, dev(Boundary::Periodic)?);
    let bound = 2.0 * n as f64 * psi.distance(phi);
    let max_dev = open.max(periodic);
    Ok(WeylReport { n, max_dev_open: open, max_dev_periodic: periodic, max_dev, bound, holds: max_dev <= bound + 1e-9 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergent {
    pub p: u64,
    pub q: u64,
    pub value: f64,
}

impl Convergent {
    /// |p/q − θ| ≤ 1/q²
    pub fn satisfies_dirichlet(&self, theta: f64) -> bool {
        (self.value - theta).abs() <= 1.0 / (self.q as f64).powi(2)
    }
}

/// Continued-fraction convergents of θ > 0 with the first two omitted.
/// A rational θ whose expansion ends within the first two terms still yields
/// its exact fraction when the denominator is at least 2.
pub fn convergents(theta: f64, count: usize) -> Vec<Convergent> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Vec::new();
    }
    let (mut p2, mut p1) = (0u64, 1u64);
    let (mut q2, mut q1) = (1u64, 0u64);
    let mut x = theta;
    let mut all = Vec::new();
    let mut exact = false;
    loop {
        let a = x.floor();
        if a > u64::MAX as f64 {
            break;
        }
        let a = a as u64;
        let next = a
            .checked_mul(p1)
            .and_then(|v| v.checked_add(p2))
            .zip(a.checked_mul(q1).and_then(|v| v.checked_add(q2)));
        let Some((p, q)) = next else { break };
        all.push(Convergent { p, q, value: p as f64 / q as f64 });
        (p2, p1, q2, q1) = (p1, p, q1, q);
        if (p as f64 / q as f64 - theta).abs() <= 1e-15 * theta {
            exact = true;
            break;
        }
        let frac = x - a as f64;
        if frac <= 0.0 {
            exact = true;
            break;
        }
        x = 1.0 / frac;
    }
    let mut out: Vec<Convergent> = all.iter().skip(2).copied().collect();
    if out.is_empty() && exact {
        if let Some(last) = all.last().filter(|c| c.q >= 2 && c.p >= 1) {
            out.push(*last);
        }
    }
    out.truncate(count);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRow {
    pub n: usize,
    pub gap: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// γ(ψ,n) against 1/(n−1) for a state in the gapless class.
pub fn gapless_witness(psi: &TwoQubitState, n_list: &[usize]) -> Result<Vec<WitnessRow>> {
    if classify_phase(psi, CLASSIFY_TOL).kind != PhaseKind::GaplessEqualModuli {
        return Err(Error::NotGaplessClass);
    }
    n_list
        .iter()
        .map(|&n| {
            let gap = spectral_gap(&ChainSpec::open(*psi, n))?.value;
            let bound = 1.0 / (n as f64 - 1.0);
            Ok(WitnessRow { n, gap, bound, satisfied: gap <= bound + 1e-9 })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergentGap {
    pub convergent: Convergent,
    /// γ°(ψ, q) when q is small enough for a dense solve.
    pub periodic_gap: Option<f64>,
}

/// Convergents of φ/2π, where μ₂/μ₁ = e^{iφ}, with periodic gaps at chain
/// length q for the small denominators.
pub fn convergent_gaps(psi: &TwoQubitState, count: usize, max_q: usize) -> Result<Vec<ConvergentGap>> {
    if classify_phase(psi, CLASSIFY_TOL).kind != PhaseKind::GaplessEqualModuli {
        return Err(Error::NotGaplessClass);
    }
    let t = transfer_matrix(psi);
    let theta = (t.mu2 / t.mu1).arg().abs() / (2.0 * PI);
    convergents(theta, count)
        .into_iter()
        .map(|c| {
            let periodic_gap = if (c.q as usize) <= max_q.min(NUMERIC_MAX_N) && c.q >= 3 {
                Some(spectral_gap(&ChainSpec::periodic(*psi, c.q as usize))?.value)
            } else {
                None
            };
            Ok(ConvergentGap { convergent: c, periodic_gap })
        })
        .collect()
}
