//! Seeded verification suites. Each suite produces a flat list of checks
//! `{name, n, value, bound, pass, seed}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    correlation_table, decay_fit, monotonicity_check, nachtergaele_overlap, random_subspace_guard, region_exclusion,
    ExclusionLemma,
};
use crate::chain::{Boundary, ChainSpec};
use crate::error::{Error, Result};
use crate::groundspace::{dimension_sequence, numeric_nullity};
use crate::numerics::{random, ComplexMatrix};
use crate::rank_class::{
    case4_projector, classify_rank2, classify_rank3, nullities, rank2_gapless_block, validate_projector,
    ProjectorMode,
};
use crate::spectral::{knabe_grid, spectral_gap, weyl_check};
use crate::states::{
    classify_phase, from_canonical, make_state, random_state, random_unitary, tpow_prop_identity,
    Mat2, PhaseKind, TwoQubitState, CLASSIFY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Monotonicity,
    Knabe,
    Weyl,
    Decay,
    RegionExclusion,
    Rank2,
    Degeneracy,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Monotonicity,
        Suite::Knabe,
        Suite::Weyl,
        Suite::Decay,
        Suite::RegionExclusion,
        Suite::Rank2,
        Suite::Degeneracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Monotonicity => "monotonicity",
            Suite::Knabe => "knabe",
            Suite::Weyl => "weyl",
            Suite::Decay => "decay",
            Suite::RegionExclusion => "region-exclusion",
            Suite::Rank2 => "rank2",
            Suite::Degeneracy => "degeneracy",
        }
    }

    /// Default chain-length range.
    pub fn default_range(self) -> (usize, usize) {
        match self {
            Suite::Monotonicity => (3, 6),
            Suite::Knabe => (4, 10),
            Suite::Weyl => (4, 7),
            Suite::Decay => (3, 9),
            Suite::RegionExclusion => (6, 8),
            Suite::Rank2 => (4, 8),
            Suite::Degeneracy => (2, 9),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    /// Overrides keyed by check name; `tol` applies to every check without its own entry.
    pub tolerances: BTreeMap<String, f64>,
}

impl SuiteConfig {
    pub fn new(suite: Suite, trials: usize, seed: u64) -> Self {
        let (n_min, n_max) = suite.default_range();
        Self { suite, trials, seed, n_min, n_max, tolerances: BTreeMap::new() }
    }

    pub fn with_range(mut self, n_min: usize, n_max: usize) -> Self {
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).or_else(|| self.tolerances.get("tol")).copied().unwrap_or(default)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        if self.n_min > self.n_max {
            return Err(Error::Input(format!("empty range {}:{}", self.n_min, self.n_max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub seed: Option<u64>,
}

impl Check {
    fn at_most(name: &str, n: usize, value: f64, bound: f64, seed: Option<u64>) -> Self {
        Self { name: name.into(), n, value, bound, pass: value <= bound, seed }
    }

    fn at_least(name: &str, n: usize, value: f64, bound: f64, seed: Option<u64>) -> Self {
        Self { name: name.into(), n, value, bound, pass: value >= bound, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

impl SuiteReport {
    fn new(config: &SuiteConfig, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let failed = checks.len() - passed;
        Self { suite: config.suite, config: config.clone(), checks, passed, failed, all_pass: failed == 0 }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let checks = match config.suite {
        Suite::Monotonicity => monotonicity_suite(config)?,
        Suite::Knabe => knabe_suite(config)?,
        Suite::Weyl => weyl_suite(config)?,
        Suite::Decay => decay_suite(config)?,
        Suite::RegionExclusion => region_exclusion_suite(config)?,
        Suite::Rank2 => rank2_suite(config)?,
        Suite::Degeneracy => degeneracy_suite(config)?,
    };
    Ok(SuiteReport::new(config, checks))
}

fn trial_seed(config: &SuiteConfig, trial: usize) -> u64 {
    config.seed.wrapping_mul(1_000_003).wrapping_add(trial as u64)
}

fn per_trial<F>(config: &SuiteConfig, f: F) -> Result<Vec<Check>>
where
    F: Fn(u64) -> Result<Vec<Check>> + Sync,
{
    let parts: Vec<Vec<Check>> =
        (0..config.trials).into_par_iter().map(|t| f(trial_seed(config, t))).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn random_bonds(seed: u64, count: usize) -> Vec<TwoQubitState> {
    let mut rng = random::rng(seed, 1);
    (0..count).map(|_| random_state(&mut rng)).collect()
}

fn monotonicity_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("monotonicity", 1e-8);
    let n_min = cfg.n_min.max(2);
    let mut checks = per_trial(cfg, |seed| {
        let bonds = random_bonds(seed, cfg.n_max - 1);
        let mut out = Vec::new();
        for n in n_min..=cfg.n_max {
            let r = monotonicity_check(&bonds[..n - 1])?;
            let s = Some(seed);
            out.push(Check::at_least("min_nonzero_eig", n, r.min_nonzero_eig, 1.0 - tol, s));
            out.push(Check::at_most("off_support", n, r.off_support, tol, s));
            out.push(Check::at_most("rn_norm", n, r.rn_norm_def, 1.0 + tol, s));
            if let Some(a) = r.agreement {
                out.push(Check::at_most("rn_agreement", n, a, tol, s));
            }
            if let Some(d) = r.m_identity_dev {
                out.push(Check::at_most("m_identity", n, d, tol, s));
            }
            if let Some(e) = r.m_gram_min_eig {
                out.push(Check::at_least("m_gram_min_eig", n, e, 1.0 - tol, s));
            }
        }
        Ok(out)
    })?;
    let n = cfg.n_max.clamp(3, 6);
    let mut rng = random::rng(cfg.seed, 2);
    let violations = (0..cfg.trials.max(50))
        .map(|_| random_subspace_guard(&mut rng, n, n, n + 1).map(|g| g.violated as usize))
        .sum::<Result<usize>>()?;
    checks.push(Check::at_least("random_subspace_detects_violation", n, violations as f64, 1.0, Some(cfg.seed)));
    Ok(checks)
}

fn knabe_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("knabe", 1e-9);
    let m_max = cfg.n_max;
    let n_max = m_max.min(6);
    let named = [TwoQubitState::singlet(), TwoQubitState::xxz(2.0)];
    let mut checks = Vec::new();
    for psi in named {
        for r in knabe_grid(&psi, n_max, m_max)? {
            checks.push(Check::at_least("knabe", r.n, r.lhs, r.rhs - tol, None));
        }
    }
    checks.extend(per_trial(cfg, |seed| {
        let psi = random_state(&mut random::rng(seed, 3));
        Ok(knabe_grid(&psi, n_max, m_max)?
            .into_iter()
            .map(|r| Check::at_least("knabe", r.n, r.lhs, r.rhs - tol, Some(seed)))
            .collect())
    })?);
    Ok(checks)
}

fn weyl_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("weyl", 1e-9);
    per_trial(cfg, |seed| {
        let mut rng = random::rng(seed, 4);
        let psi = random_state(&mut rng);
        let eps = 10f64.powf(-3.0 * rng.random::<f64>());
        let kick = random_state(&mut rng);
        let amps: Vec<C64> = psi.amps().iter().zip(kick.amps()).map(|(a, b)| a + b * eps).collect();
        let phi = make_state([amps[0], amps[1], amps[2], amps[3]])?;
        (cfg.n_min.max(2)..=cfg.n_max)
            .map(|n| {
                let r = weyl_check(&psi, &phi, n)?;
                Ok(Check::at_most("weyl", n, r.max_dev, r.bound + tol, Some(seed)))
            })
            .collect()
    })
}

/// Named gapped states whose decay rate is asserted against 2 log|λ| − slack.
pub fn decay_states() -> Vec<(&'static str, TwoQubitState)> {
    vec![("xxz-2", TwoQubitState::xxz(2.0)), ("xxz-1.5", TwoQubitState::xxz(1.5))]
}

fn decay_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("sigma", 1e-9);
    let slack = cfg.tol("decay_slack", 0.5);
    let ns: Vec<usize> = (cfg.n_min.max(2)..=cfg.n_max).collect();
    let pair_n = cfg.n_max.min(8);
    let correlation_checks = |psi: &TwoQubitState, seed: Option<u64>, fit: bool| -> Result<Vec<Check>> {
        let table = correlation_table(psi, &ns, &[pair_n])?;
        let mut out = Vec::new();
        for w in table.tau_single.windows(2) {
            out.push(Check::at_most("tau_non_decreasing", w[1].0, w[0].1 - w[1].1, 1e-10, seed));
        }
        for p in &table.pairs {
            out.push(Check::at_most("sigma_bound", p.n, p.sigma, p.bound + tol, seed));
        }
        if fit && pair_n >= 7 {
            let data: Vec<(f64, f64)> =
                table.tau_by_distance(pair_n, 0).into_iter().filter(|(d, _)| (2.0..=6.0).contains(d)).collect();
            let f = decay_fit(&data)?;
            let want = 2.0 * table.gauge.lambda_abs.ln() - slack;
            out.push(Check::at_least("tau_decay_rate", pair_n, f.rate, want, seed));
            // |τ(n) − τ(n−1)| against the n|λ|^{−2n} envelope, normalized at the smallest n
            let lam = table.gauge.lambda_abs;
            let ratios: Vec<(usize, f64)> = table
                .tau_single
                .windows(2)
                .map(|w| (w[1].0, (w[1].1 - w[0].1) / (w[1].0 as f64 * lam.powi(-2 * w[1].0 as i32))))
                .collect();
            if let Some(&(_, first)) = ratios.first() {
                for (n, r) in &ratios[1..] {
                    out.push(Check::at_most("tau_increment_envelope", *n, *r, 10.0 * first, seed));
                }
            }
        }
        Ok(out)
    };
    let mut checks = Vec::new();
    for (_, psi) in decay_states() {
        checks.extend(correlation_checks(&psi, None, true)?);
    }
    checks.extend(per_trial(cfg, |seed| {
        let mut rng = random::rng(seed, 5);
        let psi = loop {
            let s = random_state(&mut rng);
            if classify_phase(&s, CLASSIFY_TOL).kind == PhaseKind::GappedDistinctModuli {
                break s;
            }
        };
        correlation_checks(&psi, Some(seed), false)
    })?);
    Ok(checks)
}

/// |a⟩⊗|b⟩ with a, b drawn at random (generically s ≠ 0).
fn random_product(seed: u64) -> Result<TwoQubitState> {
    let mut rng = random::rng(seed, 6);
    let a = random::unit_vector(&mut rng, 2);
    let b = random::unit_vector(&mut rng, 2);
    TwoQubitState::product([a[0], a[1]], [b[0], b[1]])
}

fn region_exclusion_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("exclusion", 1e-10);
    let n = cfg.n_min.max(4);
    let (a, rest) = (n / 3, n - n / 3);
    let three = [a, rest - rest / 2, rest / 2];
    let four = [1, (n - 2) / 2, n - 2 - (n - 2) / 2, 1];
    let mut checks = per_trial(cfg, |seed| {
        let psi = random_product(seed)?;
        [(ExclusionLemma::C1, &three[..]), (ExclusionLemma::C2, &four[..]), (ExclusionLemma::X1, &three[..]), (ExclusionLemma::X2, &three[..])]
            .into_iter()
            .map(|(lemma, sizes)| {
                let v = region_exclusion(&psi, n, lemma, sizes)?;
                Ok(Check::at_most(&format!("product_{lemma:?}").to_lowercase(), n, v, tol, Some(seed)))
            })
            .collect()
    })?;
    let m = cfg.n_max.max(8);
    let xxz = TwoQubitState::xxz(2.0);
    let o2 = nachtergaele_overlap(&xxz, m, 2)?;
    let o5 = nachtergaele_overlap(&xxz, m, 5)?;
    checks.push(Check::at_most("overlap_ratio_b5_b2", m, o5 / o2, 0.5, None));
    let c1 = |b: usize| region_exclusion(&xxz, m, ExclusionLemma::C1, &[(m - b) / 2, b, m - b - (m - b) / 2]);
    let (c2, c4) = (c1(2)?, c1(4)?);
    checks.push(Check::at_most("c1_decreasing_in_b", m, c4, c2, None));
    Ok(checks)
}

fn span_projector(states: &[[C64; 4]]) -> Result<ComplexMatrix> {
    let svs: Vec<_> = states
        .iter()
        .map(|s| crate::numerics::StateVector::new(s.to_vec()))
        .collect::<Result<_>>()?;
    Ok(crate::numerics::projector(&crate::numerics::orthonormalize(&svs, 1e-10)))
}

fn conjugate(p: &ComplexMatrix, u: &Mat2) -> Result<ComplexMatrix> {
    let um = ComplexMatrix::from_fn(2, 2, |r, c| u[r][c]);
    let uu = um.kron(&um);
    uu.matmul(p)?.matmul(&uu.adjoint())
}

/// Reference rank-2 projectors: (label, projector, expected case).
pub fn rank2_examples() -> Result<Vec<(String, ComplexMatrix, u8)>> {
    let c = |x: f64| C64::new(x, 0.0);
    let nu = [c(0.0), c(1.0 / 5f64.sqrt()), c(-2.0 / 5f64.sqrt()), c(0.0)];
    let e11 = [c(0.0), c(0.0), c(0.0), c(1.0)];
    let e00 = [c(1.0), c(0.0), c(0.0), c(0.0)];
    let w = [c(0.3), c(0.5), C64::new(0.0, -0.2), c(0.7)];
    let mut out = vec![
        ("case1".to_string(), ComplexMatrix::identity(4).sub(&span_projector(&[e00, w])?)?, 1),
        ("case2".to_string(), span_projector(&[TwoQubitState::singlet().amps(), nu])?, 2),
        ("case3".to_string(), span_projector(&[e00, e11])?, 3),
        ("case4-f2".to_string(), span_projector(&[e11, nu])?, 4),
        (
            "case5".to_string(),
            span_projector(&[[c(-1.0), c(0.0), c(-1.0), c(1.0)], [c(-1.0), c(0.0), c(-0.5), c(0.5)]])?,
            5,
        ),
    ];
    for f in [c(0.5), c(1.0), C64::from_polar(1.0, PI / 3.0)] {
        out.push((format!("case4-f{:.3}@{:.3}", f.norm(), f.arg()), case4_projector(f), 4));
    }
    Ok(out)
}

fn rank2_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let tol = cfg.tol("rank2", 1e-9);
    let block_tol = cfg.tol("gapless_block", 1e-10);
    let ns = cfg.n_min.max(2)..=cfg.n_max;
    let mut checks = Vec::new();
    let strict = |p: &ComplexMatrix| validate_projector(p, ProjectorMode::Strict);
    for (label, p, case) in rank2_examples()? {
        let v = classify_rank2(&strict(&p)?)?;
        checks.push(Check::at_most(&format!("{label}:case"), 4, (v.case as f64 - case as f64).abs(), 0.0, None));
        let want = v.predicted_dim();
        for (n, d) in nullities(&p, ns.clone().filter(|&n| n >= 4 || v.case != 5))? {
            checks.push(Check::at_most(&format!("{label}:nullity"), n, (d as f64 - want as f64).abs(), 0.0, None));
        }
        if let Some(f) = v.f {
            let unit = (f.norm() - 1.0).abs() <= 1e-10;
            for n in 4..=10 {
                let gap = spectral_gap(&ChainSpec::projector(p.clone(), n, Boundary::Open))?.value;
                if unit {
                    let bound = 1.0 - (PI / n as f64).cos();
                    checks.push(Check::at_most(&format!("{label}:gap_upper"), n, gap, bound + tol, None));
                } else {
                    let g10 = spectral_gap(&ChainSpec::projector(p.clone(), 10, Boundary::Open))?.value;
                    checks.push(Check::at_least(&format!("{label}:gap_lower"), n, gap, 0.5 * g10, None));
                }
            }
            if unit {
                for n in 2..=12 {
                    let (_, lam) = rank2_gapless_block(f, n)?;
                    let want = 1.0 - (PI / n as f64).cos();
                    checks.push(Check::at_most(&format!("{label}:block_gap"), n, (lam - want).abs(), block_tol, None));
                }
            }
        }
    }
    let tt = [C64::new(0.5, 0.0); 4];
    let p3 = ComplexMatrix::identity(4).sub(&ComplexMatrix::outer(&tt, &tt))?;
    let v3 = classify_rank3(&strict(&p3)?)?;
    checks.push(Check::at_least("rank3:frustration_free", 2, v3.frustration_free as u8 as f64, 1.0, None));
    for n in 2..=8 {
        let gap = spectral_gap(&ChainSpec::projector(p3.clone(), n, Boundary::Open))?.value;
        checks.push(Check::at_most("rank3:gap_is_one", n, (gap - 1.0).abs(), tol, None));
    }
    let examples = rank2_examples()?;
    checks.extend(per_trial(cfg, |seed| {
        let u = random_unitary(&mut random::rng(seed, 7));
        examples
            .iter()
            .map(|(label, p, _)| {
                let base = classify_rank2(&validate_projector(p, ProjectorMode::Strict)?)?;
                let rot = classify_rank2(&validate_projector(&conjugate(p, &u)?, ProjectorMode::Strict)?)?;
                let df = match (base.f, rot.f) {
                    (Some(a), Some(b)) => (a.norm() - b.norm()).abs(),
                    _ => 0.0,
                };
                let diff = (base.case as f64 - rot.case as f64).abs() + df;
                Ok(Check::at_most(&format!("{label}:conjugation_invariant"), 4, diff, 1e-8, Some(seed)))
            })
            .collect()
    })?);
    Ok(checks)
}

/// A canonical-form state with γ = β, for which T² ∝ I.
pub fn engineered_even_state() -> TwoQubitState {
    from_canonical(0.4, 0.4, 0.4, 0.1).expect("nonzero amplitudes")
}

fn degeneracy_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ns: Vec<usize> = (cfg.n_min.max(2)..=cfg.n_max).collect();
    let exact = |name: &str, n: usize, got: usize, want: usize, seed: Option<u64>| {
        Check::at_most(name, n, (got as f64 - want as f64).abs(), 0.0, seed)
    };
    let periodic_checks = |psi: &TwoQubitState, seed: Option<u64>, force_true: bool| -> Result<Vec<Check>> {
        let mut out = Vec::new();
        for &n in &ns {
            out.push(exact("open_nullity", n, numeric_nullity(&ChainSpec::open(*psi, n))?, n + 1, seed));
            let prop = tpow_prop_identity(psi, n, 1e-9)?;
            if force_true && n % 2 == 0 {
                out.push(Check::at_least("engineered_identity", n, prop as u8 as f64, 1.0, seed));
            }
            let want = if prop { n + 1 } else { 2 };
            out.push(exact("periodic_nullity", n, numeric_nullity(&ChainSpec::periodic(*psi, n))?, want, seed));
        }
        Ok(out)
    };
    let mut checks = periodic_checks(&TwoQubitState::singlet(), None, true)?;
    checks.extend(periodic_checks(&engineered_even_state(), None, true)?);
    checks.extend(per_trial(cfg, |seed| {
        let mut rng = random::rng(seed, 8);
        let psi = random_state(&mut rng);
        let mut out = periodic_checks(&psi, Some(seed), false)?;
        let n_dims = cfg.n_max.min(8);
        let bonds: Vec<TwoQubitState> = (0..n_dims).map(|_| random_state(&mut rng)).collect();
        let d = dimension_sequence(&bonds, n_dims)?;
        for n in 2..=n_dims {
            out.push(Check::at_least("dn_strict_increase", n, d[n - 1] as f64, d[n - 2] as f64 + 1.0, Some(seed)));
            if n >= 3 {
                let rhs = 2.0 * d[n - 2] as f64 - d[n - 3] as f64;
                out.push(Check::at_least("dn_convex", n, d[n - 1] as f64, rhs, Some(seed)));
            }
        }
        Ok(out)
    })?);
    Ok(checks)
}
