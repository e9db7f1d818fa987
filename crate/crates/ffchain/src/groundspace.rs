//! Ground-space bases, ground projectors on sub-regions, and degeneracy counts.

use std::ops::Range;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chain::{build_chain, Bonds, Boundary, ChainOperator, ChainSpec};
use crate::error::{Error, Result};
use crate::numerics::{
    apply_on_sites, hermitian_null_space, inner, norm, orthonormalize, site_bit, ComplexMatrix, StateVector,
};
use crate::states::{
    dot, matmul2, norm2, perp, schmidt, tpow_prop_identity, transfer_matrix, Mat2, TransferMatrix, TwoQubitState, Vec2,
};

/// Largest chain length handled by dense nullspace computations.
pub const NUMERIC_MAX_N: usize = 12;
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    AnalyticSymmetricImage,
    AnalyticDomainWall,
    NumericNullspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundSpaceBasis {
    /// Qubits in the region.
    pub n: usize,
    pub vectors: Vec<StateVector>,
    pub origin: Origin,
    /// Sites of the full chain covered by the basis.
    pub region: Range<usize>,
    /// max ‖H g‖ over basis vectors.
    pub residual: f64,
}

impl GroundSpaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn projector(&self) -> ComplexMatrix {
        crate::numerics::projector(&self.vectors)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let amps: Vec<Vec<[f64; 2]>> = self
            .vectors
            .iter()
            .map(|v| v.amps().iter().map(|a| [a.re, a.im]).collect())
            .collect();
        serde_json::json!({
            "vectors": amps,
            "origin": self.origin,
            "residual": self.residual,
            "region": [self.region.start, self.region.end],
        })
    }
}

/// Normalized Dicke states |D_n^k⟩, k = 0..n.
pub fn symmetric_basis(n: usize) -> Vec<StateVector> {
    (0..=n)
        .map(|k| {
            let count = binomial(n, k);
            let amp = C64::new(1.0 / count.sqrt(), 0.0);
            let amps = (0..1usize << n)
                .map(|i| if i.count_ones() as usize == k { amp } else { C64::new(0.0, 0.0) })
                .collect();
            StateVector::new(amps).expect("power of two")
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Kernel basis of a chain, analytic or by dense nullspace.
pub fn kernel_basis(spec: &ChainSpec, method: KernelMethod) -> Result<GroundSpaceBasis> {
    let op = build_chain(spec)?;
    let (vectors, origin) = match method {
        KernelMethod::Numeric => (numeric_kernel(&op)?, Origin::NumericNullspace),
        KernelMethod::Analytic => {
            if spec.boundary != Boundary::Open {
                return Err(Error::MethodUnavailable("periodic chain".into()));
            }
            let psi = spec
                .homogeneous_state()
                .ok_or_else(|| Error::MethodUnavailable("not a homogeneous state chain".into()))?;
            analytic_open_basis(psi, spec.n)?
        }
    };
    let residual = max_residual(&op, &vectors);
    Ok(GroundSpaceBasis { n: spec.n, vectors, origin, region: 0..spec.n, residual })
}

/// Analytic basis when the chain admits one, numeric nullspace otherwise.
pub fn ground_basis(spec: &ChainSpec) -> Result<GroundSpaceBasis> {
    match kernel_basis(spec, KernelMethod::Analytic) {
        Err(Error::MethodUnavailable(_)) => kernel_basis(spec, KernelMethod::Numeric),
        other => other,
    }
}

/// Whether `ground_basis` would take the analytic route.
pub fn has_analytic_basis(spec: &ChainSpec) -> bool {
    spec.boundary == Boundary::Open
        && spec.homogeneous_state().is_some_and(|s| s.is_entangled() || domain_wall_factors(s).is_some())
}

/// Ground space of the chain restricted to `region`, embedded at that region.
/// An empty region gives the one-dimensional space of a zero-qubit register.
pub fn region_basis(spec: &ChainSpec, region: Range<usize>) -> Result<GroundSpaceBasis> {
    if region.end > spec.n || region.start > region.end {
        return Err(Error::NonConsecutiveRegion { start: region.start, end: region.end, n: spec.n });
    }
    let len = region.len();
    if len <= 1 {
        let vectors = (0..1usize << len).map(|i| StateVector::basis(len, i)).collect();
        return Ok(GroundSpaceBasis { n: len, vectors, origin: Origin::NumericNullspace, region, residual: 0.0 });
    }
    let sub = match &spec.bonds {
        Bonds::Inhomogeneous(states) => ChainSpec::inhomogeneous(states[region.start..region.end - 1].to_vec()),
        _ => ChainSpec { n: len, boundary: Boundary::Open, bonds: spec.bonds.clone() },
    };
    let mut basis = ground_basis(&sub)?;
    basis.region = region;
    Ok(basis)
}

fn analytic_open_basis(psi: &TwoQubitState, n: usize) -> Result<(Vec<StateVector>, Origin)> {
    if psi.is_entangled() {
        return Ok((symmetric_image(psi, n)?, Origin::AnalyticSymmetricImage));
    }
    let (a, b) = domain_wall_factors(psi)
        .ok_or_else(|| Error::MethodUnavailable("symmetric product forbidden state".into()))?;
    Ok((domain_walls(a, b, n), Origin::AnalyticDomainWall))
}

/// cond(S)^n above which the eigenbasis route is not trusted.
const EIGEN_ROUTE_MAX_COND: f64 = 1e6;

/// Orthonormalized image of the symmetric subspace under I⊗T⊗T²⊗…⊗T^{n−1}.
fn symmetric_image(psi: &TwoQubitState, n: usize) -> Result<Vec<StateVector>> {
    let tm = transfer_matrix(psi);
    if let Some(basis) = symmetric_image_eigen(&tm, n) {
        return Ok(basis);
    }
    symmetric_image_powers(&tm.entries, n)
}

/// With T = S D S⁻¹ the image is S^{⊗n} applied to the mutually orthogonal
/// vectors Σ_{|x|=m} r^{Σ_{k: x_k=0} k}|x⟩, r = μ₁/μ₂, since Sym_n is
/// invariant under S^{⊗n}. Conditioning is cond(S)^n rather than the
/// |r|^{−n²/2} spread of the powers themselves.
fn symmetric_image_eigen(t: &TransferMatrix, n: usize) -> Option<Vec<StateVector>> {
    if t.defective {
        return None;
    }
    let overlap = dot(&t.eigvec1, &t.eigvec2).norm();
    let cond = ((1.0 + overlap) / (1.0 - overlap).max(f64::MIN_POSITIVE)).sqrt();
    if cond.powi(n as i32) > EIGEN_ROUTE_MAX_COND {
        return None;
    }
    let r = t.mu1 / t.mu2;
    let s = ComplexMatrix::from_fn(2, 2, |row, col| if col == 0 { t.eigvec1[row] } else { t.eigvec2[row] });
    let mut raw = vec![vec![C64::new(0.0, 0.0); 1 << n]; n + 1];
    for i in 0..1usize << n {
        let zeros: Vec<usize> = (0..n).filter(|&k| i & site_bit(n, k) == 0).collect();
        let m = n - zeros.len();
        // smallest exponent among weight-m strings is 0 + 1 + … + (n−m−1)
        let shift = (n - m) * (n - m).saturating_sub(1) / 2;
        let e = zeros.iter().sum::<usize>() - shift;
        raw[m][i] = r.powu(e as u32);
    }
    let images: Vec<StateVector> = raw
        .into_iter()
        .map(|u| {
            let amps = (0..n).fold(u, |acc, site| apply_on_sites(&s, &[site], &acc, n));
            StateVector::new(amps).expect("power of two")
        })
        .collect();
    let basis = orthonormalize(&images, RANK_TOL);
    (basis.len() == n + 1).then_some(basis)
}

/// Images of the Dicke states under the powers of T, each rescaled to unit
/// spectral norm. Used for defective or nearly defective T, where |μ₁| = |μ₂|.
fn symmetric_image_powers(t: &Mat2, n: usize) -> Result<Vec<StateVector>> {
    let t = *t;
    let mut powers: Vec<Mat2> = Vec::with_capacity(n);
    let mut p: Mat2 = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
    for _ in 0..n {
        powers.push(p);
        let next = matmul2(&p, &t);
        let s = norm2(&next);
        p = next.map(|r| r.map(|x| x / s));
    }
    let images: Vec<StateVector> = symmetric_basis(n)
        .into_iter()
        .map(|d| {
            let mut amps = d.into_amps();
            for (site, pk) in powers.iter().enumerate().skip(1) {
                let m = ComplexMatrix::from_rows(&[pk[0].to_vec(), pk[1].to_vec()]).expect("2×2");
                amps = apply_on_sites(&m, &[site], &amps, n);
            }
            StateVector::new(amps).expect("power of two")
        })
        .collect();
    let basis = orthonormalize(&images, RANK_TOL);
    if basis.len() != n + 1 {
        return Err(Error::Conditioning { expected: n + 1, got: basis.len() });
    }
    Ok(basis)
}

/// Factors (a, b) of a product forbidden state a⊗b, provided b is not
/// parallel to a.
pub fn domain_wall_factors(psi: &TwoQubitState) -> Option<(Vec2, Vec2)> {
    let sd = schmidt(psi);
    if !sd.product {
        return None;
    }
    let (a, b) = (sd.w0, sd.v0);
    (dot(&a, &b).norm() < 1.0 - 1e-10).then_some((a, b))
}

/// g₀ = b⊥^{⊗n}, g_i = a⊥^{⊗(i−1)} ⊗ b ⊗ b⊥^{⊗(n−i)}.
fn domain_walls(a: Vec2, b: Vec2, n: usize) -> Vec<StateVector> {
    let (ap, bp) = (perp(&a), perp(&b));
    let mut out = vec![StateVector::product(&vec![bp; n])];
    for i in 1..=n {
        let sites: Vec<Vec2> = (1..=n)
            .map(|k| match k.cmp(&i) {
                std::cmp::Ordering::Less => ap,
                std::cmp::Ordering::Equal => b,
                std::cmp::Ordering::Greater => bp,
            })
            .collect();
        out.push(StateVector::product(&sites));
    }
    out
}

/// Orthonormal kernel of an operator by dense nullspace.
pub fn numeric_kernel(op: &ChainOperator) -> Result<Vec<StateVector>> {
    if op.n() > NUMERIC_MAX_N {
        return Err(Error::DimensionTooLarge { dim: op.dim(), cap: 1 << NUMERIC_MAX_N });
    }
    if op.terms().is_empty() {
        return Ok((0..op.dim()).map(|i| StateVector::basis(op.n(), i)).collect());
    }
    let (null, _) = hermitian_null_space(&op.dense(), RANK_TOL)?;
    Ok((0..null.cols())
        .map(|k| StateVector::new(null.column(k)).expect("power of two"))
        .collect())
}

fn max_residual(op: &ChainOperator, vectors: &[StateVector]) -> f64 {
    vectors.iter().map(|v| norm(&op.apply_slice(v.amps()))).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegeneracyBranch {
    OpenAnalytic,
    PeriodicAnalytic,
    Numeric,
}

/// Ground-space dimension and the route used to obtain it.
pub fn degeneracy(spec: &ChainSpec) -> Result<(usize, DegeneracyBranch)> {
    spec.validate()?;
    if let Some(psi) = spec.homogeneous_state() {
        match spec.boundary {
            Boundary::Open if psi.is_entangled() || domain_wall_factors(psi).is_some() => {
                return Ok((spec.n + 1, DegeneracyBranch::OpenAnalytic));
            }
            Boundary::Periodic if psi.is_entangled() => {
                let d = if tpow_prop_identity(psi, spec.n, 1e-9)? { spec.n + 1 } else { 2 };
                return Ok((d, DegeneracyBranch::PeriodicAnalytic));
            }
            _ => {}
        }
    }
    Ok((numeric_nullity(spec)?, DegeneracyBranch::Numeric))
}

pub fn numeric_nullity(spec: &ChainSpec) -> Result<usize> {
    Ok(numeric_kernel(&build_chain(spec)?)?.len())
}

/// (G_S ⊗ I) x, with S = `basis.region` inside the register of x.
pub fn region_projector_apply(basis: &GroundSpaceBasis, x: &StateVector) -> Result<StateVector> {
    let n = x.n_qubits();
    let r = &basis.region;
    if r.end > n || r.len() != basis.n {
        return Err(Error::EmbeddingMismatch { start: r.start, end: r.end, n });
    }
    let inner_dim = 1usize << r.len();
    let tail = 1usize << (n - r.end);
    let head = 1usize << r.start;
    let xa = x.amps();
    let mut y = vec![C64::new(0.0, 0.0); xa.len()];
    let mut fiber = vec![C64::new(0.0, 0.0); inner_dim];
    for h in 0..head {
        for t in 0..tail {
            let at = |k: usize| (h * inner_dim + k) * tail + t;
            for (k, f) in fiber.iter_mut().enumerate() {
                *f = xa[at(k)];
            }
            for g in &basis.vectors {
                let c = inner(g.amps(), &fiber);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, ga) in g.amps().iter().enumerate() {
                    y[at(k)] += ga * c;
                }
            }
        }
    }
    Ok(StateVector::new(y).expect("power of two"))
}

/// D_1, …, D_{n_max} for the open chain with the given bond sequence; D_1 = 2.
pub fn dimension_sequence(bonds: &[TwoQubitState], n_max: usize) -> Result<Vec<usize>> {
    if n_max > NUMERIC_MAX_N {
        return Err(Error::DimensionTooLarge { dim: 1 << n_max, cap: 1 << NUMERIC_MAX_N });
    }
    if bonds.len() + 1 < n_max {
        return Err(Error::InvalidSpec(format!("{} bonds cannot reach n = {n_max}", bonds.len())));
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        out.push(if n == 1 { 2 } else { numeric_nullity(&ChainSpec::inhomogeneous(bonds[..n - 1].to_vec()))? });
    }
    Ok(out)
}
