//! Open, periodic and inhomogeneous chain Hamiltonians as matrix-free operators.

use std::ops::Range;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{site_bit, ComplexMatrix, StateVector};
use crate::states::TwoQubitState;

pub type Mat4 = [[C64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

/// Bond terms of a chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Bonds {
    /// |ψ⟩⟨ψ| on every bond.
    Homogeneous(TwoQubitState),
    /// |ψ_k⟩⟨ψ_k| on bond (k, k+1); open chains only.
    Inhomogeneous(Vec<TwoQubitState>),
    /// A rank 1-3 projector Π on every bond.
    Projector(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    pub boundary: Boundary,
    pub bonds: Bonds,
}

impl ChainSpec {
    pub fn open(psi: TwoQubitState, n: usize) -> Self {
        Self { n, boundary: Boundary::Open, bonds: Bonds::Homogeneous(psi) }
    }

    pub fn periodic(psi: TwoQubitState, n: usize) -> Self {
        Self { n, boundary: Boundary::Periodic, bonds: Bonds::Homogeneous(psi) }
    }

    pub fn inhomogeneous(states: Vec<TwoQubitState>) -> Self {
        Self { n: states.len() + 1, boundary: Boundary::Open, bonds: Bonds::Inhomogeneous(states) }
    }

    pub fn projector(p: ComplexMatrix, n: usize, boundary: Boundary) -> Self {
        Self { n, boundary, bonds: Bonds::Projector(p) }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    pub fn homogeneous_state(&self) -> Option<&TwoQubitState> {
        match &self.bonds {
            Bonds::Homogeneous(s) => Some(s),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("n = {} < 2", self.n)));
        }
        match &self.bonds {
            Bonds::Homogeneous(_) => Ok(()),
            Bonds::Inhomogeneous(states) => {
                if self.boundary == Boundary::Periodic {
                    return Err(Error::InvalidSpec("inhomogeneous bonds require an open chain".into()));
                }
                if states.len() != self.n - 1 {
                    return Err(Error::InvalidSpec(format!(
                        "{} bond states for {} sites",
                        states.len(),
                        self.n
                    )));
                }
                Ok(())
            }
            Bonds::Projector(p) => check_projector(p).map(|_| ()),
        }
    }

    /// 4×4 term on bond k (sites k, k+1 mod n).
    pub fn bond_matrix(&self, k: usize) -> Mat4 {
        match &self.bonds {
            Bonds::Homogeneous(s) => state_projector(s),
            Bonds::Inhomogeneous(states) => state_projector(&states[k]),
            Bonds::Projector(p) => to_mat4(p),
        }
    }

    fn bond_rank1(&self, k: usize) -> Option<[C64; 4]> {
        match &self.bonds {
            Bonds::Homogeneous(s) => Some(s.amps()),
            Bonds::Inhomogeneous(states) => Some(states[k].amps()),
            Bonds::Projector(_) => None,
        }
    }

    pub fn bond_count(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.n - 1,
            Boundary::Periodic => self.n,
        }
    }
}

/// Checks that a 4×4 matrix is a Hermitian idempotent of rank 1-3 and returns the rank.
pub fn check_projector(p: &ComplexMatrix) -> Result<usize> {
    if p.rows() != 4 || p.cols() != 4 {
        return Err(Error::InvalidSpec("projector must be 4×4".into()));
    }
    let herm = p.hermitian_deviation();
    if herm > 1e-10 {
        return Err(Error::NonHermitian(herm));
    }
    let sq = p.matmul(p)?.sub(p)?.max_abs();
    if sq > 1e-10 {
        return Err(Error::NotIdempotent(sq));
    }
    let rank = p.trace().re.round() as usize;
    if !(1..=3).contains(&rank) {
        return Err(Error::InvalidSpec(format!("projector rank {rank} outside 1..=3")));
    }
    Ok(rank)
}

pub fn state_projector(s: &TwoQubitState) -> Mat4 {
    let a = s.amps();
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i] * a[j].conj();
        }
    }
    m
}

pub fn to_mat4(p: &ComplexMatrix) -> Mat4 {
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = p[(i, j)];
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct BondTerm {
    /// (left, right) sites; `left` is the more significant factor of the 4×4 term.
    pub sites: (usize, usize),
    pub matrix: Mat4,
    rank1: Option<[C64; 4]>,
}

impl BondTerm {
    pub fn new(sites: (usize, usize), matrix: Mat4) -> Self {
        Self { sites, matrix, rank1: None }
    }

    pub fn from_state(sites: (usize, usize), s: &TwoQubitState) -> Self {
        Self { sites, matrix: state_projector(s), rank1: Some(s.amps()) }
    }
}

/// Σ of bond terms on n qubits, applied without materializing the full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    n: usize,
    boundary: Boundary,
    terms: Vec<BondTerm>,
}

pub fn build_chain(spec: &ChainSpec) -> Result<ChainOperator> {
    spec.validate()?;
    let n = spec.n;
    let terms = (0..spec.bond_count())
        .map(|k| {
            let sites = (k, (k + 1) % n);
            match spec.bond_rank1(k) {
                Some(a) => BondTerm { sites, matrix: spec.bond_matrix(k), rank1: Some(a) },
                None => BondTerm::new(sites, spec.bond_matrix(k)),
            }
        })
        .collect();
    Ok(ChainOperator { n, boundary: spec.boundary, terms })
}

/// Operator on the sites of `region` keeping only bonds interior to it.
pub fn restrict_region(spec: &ChainSpec, region: Range<usize>) -> Result<ChainOperator> {
    if spec.boundary == Boundary::Periodic {
        return Err(Error::InvalidSpec("periodic chains cannot be restricted".into()));
    }
    spec.validate()?;
    if region.start >= region.end || region.end > spec.n {
        return Err(Error::NonConsecutiveRegion { start: region.start, end: region.end, n: spec.n });
    }
    let terms = (region.start..region.end - 1)
        .map(|k| {
            let sites = (k - region.start, k + 1 - region.start);
            match spec.bond_rank1(k) {
                Some(a) => BondTerm { sites, matrix: spec.bond_matrix(k), rank1: Some(a) },
                None => BondTerm::new(sites, spec.bond_matrix(k)),
            }
        })
        .collect();
    Ok(ChainOperator { n: region.len(), boundary: Boundary::Open, terms })
}

impl ChainOperator {
    pub fn from_terms(n: usize, terms: Vec<BondTerm>) -> Self {
        Self { n, boundary: Boundary::Open, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn terms(&self) -> &[BondTerm] {
        &self.terms
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        Ok(StateVector::new(self.apply_slice(x.amps())).expect("power of two"))
    }

    /// y = H x on raw amplitudes; `x.len()` must equal `dim()`.
    pub fn apply_slice(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        for term in &self.terms {
            let (bl, br) = (site_bit(self.n, term.sites.0), site_bit(self.n, term.sites.1));
            let offs = [0, br, bl, bl | br];
            let mask = bl | br;
            let mut base = 0usize;
            while base < x.len() {
                if base & mask == 0 {
                    let v = [x[base], x[base + offs[1]], x[base + offs[2]], x[base + offs[3]]];
                    match &term.rank1 {
                        Some(a) => {
                            let c: C64 = (0..4).map(|k| a[k].conj() * v[k]).sum();
                            for k in 0..4 {
                                y[base + offs[k]] += a[k] * c;
                            }
                        }
                        None => {
                            for (k, row) in term.matrix.iter().enumerate() {
                                y[base + offs[k]] +=
                                    row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
                            }
                        }
                    }
                }
                base += 1;
            }
        }
        y
    }

    /// Dense matrix of the operator.
    pub fn dense(&self) -> ComplexMatrix {
        let dim = self.dim();
        let mut h = ComplexMatrix::zeros(dim, dim);
        for term in &self.terms {
            let (bl, br) = (site_bit(self.n, term.sites.0), site_bit(self.n, term.sites.1));
            let offs = [0, br, bl, bl | br];
            for base in (0..dim).filter(|b| b & (bl | br) == 0) {
                for a in 0..4 {
                    for b in 0..4 {
                        h[(base + offs[a], base + offs[b])] += term.matrix[a][b];
                    }
                }
            }
        }
        h
    }
}

#[derive(Serialize, Deserialize)]
struct ChainSpecJson {
    n: usize,
    boundary: Boundary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    state: Option<TwoQubitState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<Vec<TwoQubitState>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    projector: Option<Vec<Vec<[f64; 2]>>>,
}

impl ChainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ChainSpecJson = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let bonds = match (raw.state, raw.states, raw.projector) {
            (_, _, Some(rows)) => {
                let rows: Vec<Vec<C64>> =
                    rows.iter().map(|r| r.iter().map(|p| C64::new(p[0], p[1])).collect()).collect();
                Bonds::Projector(ComplexMatrix::from_rows(&rows)?)
            }
            (Some(s), None, None) => Bonds::Homogeneous(s),
            (None, Some(v), None) => Bonds::Inhomogeneous(v),
            _ => return Err(Error::Input("chain spec needs exactly one of state, states, projector".into())),
        };
        let spec = ChainSpec { n: raw.n, boundary: raw.boundary, bonds };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut raw = ChainSpecJson { n: self.n, boundary: self.boundary, state: None, states: None, projector: None };
        match &self.bonds {
            Bonds::Homogeneous(s) => raw.state = Some(*s),
            Bonds::Inhomogeneous(v) => raw.states = Some(v.clone()),
            Bonds::Projector(p) => {
                raw.projector = Some(
                    (0..4).map(|i| (0..4).map(|j| [p[(i, j)].re, p[(i, j)].im]).collect()).collect(),
                )
            }
        }
        serde_json::to_string(&raw).expect("serializable")
    }
}
