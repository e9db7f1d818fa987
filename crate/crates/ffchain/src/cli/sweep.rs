//! Phase-diagram sweeps over the real families R(θ₁)⊗R(θ₂)[√(1−p)|00⟩ ± √p|11⟩].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::groundspace::numeric_nullity;
use crate::numerics::random;
use crate::spectral::spectral_gap;
use crate::states::{
    classify_phase, gapless_region_real, real_family, tpow_prop_identity, transfer_matrix, PhaseKind, Sign,
    TwoQubitState, CLASSIFY_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "FFCHAIN_WORKERS";
/// Largest n for which curve points are checked against the numeric nullity.
pub const SPOT_MAX_N: usize = 8;
const SWEEP_MAX_N: usize = 12;
const TPOW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RealPlus,
    RealMinus,
}

impl Family {
    fn sign(self) -> Sign {
        match self {
            Family::RealPlus => Sign::Plus,
            Family::RealMinus => Sign::Minus,
        }
    }

    pub fn state(self, p: f64, dtheta: f64) -> Result<TwoQubitState> {
        real_family(p, 0.0, dtheta, self.sign())
    }
}

/// Inclusive linear grid written `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i + 1 == self.steps { self.max } else { self.min + h * i as f64 }).collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("grid '{s}' is not min:max:steps"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, k] = parts[..] else { return Err(bad()) };
        let grid = Grid {
            min: a.trim().parse().map_err(|_| bad())?,
            max: b.trim().parse().map_err(|_| bad())?,
            steps: k.trim().parse().map_err(|_| bad())?,
        };
        if grid.steps == 0 || !(grid.min <= grid.max) || !grid.max.is_finite() {
            return Err(Error::Input(format!("grid '{s}' is empty")));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: Family,
    pub p_grid: Grid,
    pub dtheta_grid: Grid,
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub curves: bool,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_grid.min < 0.0 || self.p_grid.max > 0.5 {
            return Err(Error::Input(format!("p grid {:?} leaves [0, 1/2]", self.p_grid)));
        }
        if self.n_list.is_empty() {
            return Err(Error::Input("empty n list".into()));
        }
        let cap = if self.curves { usize::MAX } else { SWEEP_MAX_N };
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 3 || n > cap) {
            return Err(Error::Input(format!("n = {n} outside 3..={SWEEP_MAX_N}")));
        }
        if self.workers == Some(0) {
            return Err(Error::Input("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of every output-determining field.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("plain data");
        Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn manifest_path(&self) -> PathBuf {
        sibling(&self.out, "manifest.json")
    }

    pub fn plot_script_path(&self) -> PathBuf {
        sibling(&self.out, "plot.py")
    }

    pub fn curves_path(&self, n: usize) -> PathBuf {
        sibling(&self.out, &format!("curves_n{n}.csv"))
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NColumns {
    pub n: usize,
    pub tpow: Option<bool>,
    pub gap: f64,
    pub within_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub dtheta: f64,
    pub analytic_gapless: bool,
    pub numeric_gapless: bool,
    pub per_n: Vec<NColumns>,
}

fn phase_word(gapless: bool) -> &'static str {
    if gapless {
        "gapless"
    } else {
        "gapped"
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn gap_bound(n: usize) -> f64 {
    1.0 / (n as f64 - 1.0)
}

fn numeric_gapless(psi: &TwoQubitState) -> bool {
    classify_phase(psi, CLASSIFY_TOL).kind == PhaseKind::GaplessEqualModuli
}

fn tpow(psi: &TwoQubitState, n: usize) -> Result<Option<bool>> {
    match tpow_prop_identity(psi, n, TPOW_TOL) {
        Ok(b) => Ok(Some(b)),
        Err(Error::ProductState) => Ok(None),
        Err(e) => Err(e),
    }
}

fn sweep_point(cfg: &SweepConfig, p: f64, dtheta: f64) -> Result<SweepRow> {
    let psi = cfg.family.state(p, dtheta)?;
    let analytic = gapless_region_real(p, dtheta, cfg.family.sign())?;
    let per_n = cfg
        .n_list
        .iter()
        .map(|&n| {
            let gap = spectral_gap(&ChainSpec::open(psi, n))?.value;
            Ok(NColumns {
                n,
                tpow: tpow(&psi, n)?,
                gap,
                within_bound: analytic.then(|| gap <= gap_bound(n) + 1e-9),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepRow { p, dtheta, analytic_gapless: analytic, numeric_gapless: numeric_gapless(&psi), per_n })
}

fn grid_points(cfg: &SweepConfig) -> Vec<(f64, f64)> {
    let ds = cfg.dtheta_grid.values();
    cfg.p_grid.values().into_iter().flat_map(|p| ds.iter().map(move |&d| (p, d))).collect()
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let workers = workers.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Backend(e.to_string()))?;
    Ok(pool.install(f))
}

/// Every grid point, sorted by (p, dθ).
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let points = grid_points(cfg);
    let mut rows = in_pool(cfg.workers, || {
        points.par_iter().map(|&(p, d)| sweep_point(cfg, p, d)).collect::<Result<Vec<_>>>()
    })??;
    rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.dtheta.total_cmp(&b.dtheta)));
    Ok(rows)
}

pub fn sweep_csv(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut head = vec!["p".to_string(), "dtheta".into(), "analytic_phase".into(), "numeric_phase".into()];
    for prefix in ["tn_prop_identity", "gap", "gap_bound_1_over_n_minus_1", "within_bound"] {
        head.extend(cfg.n_list.iter().map(|n| format!("{prefix}_n{n}")));
    }
    let mut out = head.join(",");
    out.push('\n');
    for r in rows {
        let mut cells = vec![
            r.p.to_string(),
            r.dtheta.to_string(),
            phase_word(r.analytic_gapless).into(),
            phase_word(r.numeric_gapless).into(),
        ];
        cells.extend(r.per_n.iter().map(|c| opt(c.tpow)));
        cells.extend(r.per_n.iter().map(|c| c.gap.to_string()));
        cells.extend(r.per_n.iter().map(|c| opt(r.analytic_gapless.then(|| gap_bound(c.n)))));
        cells.extend(r.per_n.iter().map(|c| opt(c.within_bound)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    pub dtheta: f64,
    pub gapless: bool,
    /// n·|arg(μ₂/μ₁)|/2π, defined in the gapless region.
    pub winding: Option<f64>,
    pub tpow: Option<bool>,
    pub periodic_degeneracy: Option<usize>,
    /// The point is on a curve or a curve passes between it and a grid neighbour.
    pub near_curve: bool,
}

fn winding(psi: &TwoQubitState, n: usize) -> Option<f64> {
    if !numeric_gapless(psi) {
        return None;
    }
    let t = transfer_matrix(psi);
    if t.mu1.norm() == 0.0 {
        return None;
    }
    Some(n as f64 * (t.mu2 / t.mu1).arg().abs() / (2.0 * std::f64::consts::PI))
}

fn curve_point(family: Family, n: usize, p: f64, dtheta: f64) -> Result<CurvePoint> {
    let psi = family.state(p, dtheta)?;
    let tp = tpow(&psi, n)?;
    Ok(CurvePoint {
        p,
        dtheta,
        gapless: gapless_region_real(p, dtheta, family.sign())?,
        winding: winding(&psi, n),
        tpow: tp,
        periodic_degeneracy: tp.map(|b| if b { n + 1 } else { 2 }),
        near_curve: tp == Some(true),
    })
}

fn crosses(a: &CurvePoint, b: &CurvePoint) -> bool {
    matches!((a.winding, b.winding), (Some(x), Some(y)) if x.floor() != y.floor())
}

/// Curve data for one n over the (p, dθ) grid, row-major in p.
pub fn degeneracy_curves(cfg: &SweepConfig, n: usize) -> Result<Vec<CurvePoint>> {
    if cfg.family != Family::RealPlus {
        return Err(Error::Input("degeneracy curves are defined for real-plus".into()));
    }
    let (ps, ds) = (cfg.p_grid.values(), cfg.dtheta_grid.values());
    let cols = ds.len();
    let points = grid_points(cfg);
    let mut grid = in_pool(cfg.workers, || {
        points.par_iter().map(|&(p, d)| curve_point(cfg.family, n, p, d)).collect::<Result<Vec<_>>>()
    })??;
    let mut marks = vec![false; grid.len()];
    for i in 0..ps.len() {
        for j in 0..cols {
            let k = i * cols + j;
            for nb in [(i + 1 < ps.len()).then(|| k + cols), (j + 1 < cols).then(|| k + 1)].into_iter().flatten() {
                if crosses(&grid[k], &grid[nb]) {
                    marks[k] = true;
                    marks[nb] = true;
                }
            }
        }
    }
    grid.iter_mut().zip(marks).for_each(|(g, m)| g.near_curve |= m);
    Ok(grid)
}

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("p,dtheta,analytic_phase,winding,tn_prop_identity,periodic_degeneracy,near_curve\n");
    for c in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.p,
            c.dtheta,
            phase_word(c.gapless),
            opt(c.winding),
            opt(c.tpow),
            opt(c.periodic_degeneracy),
            c.near_curve
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheck {
    pub n: usize,
    pub p: f64,
    pub dtheta: f64,
    pub on_curve: bool,
    pub predicted: usize,
    pub numeric: usize,
    pub pass: bool,
}

/// Point on the segment a→b where the winding hits an integer, by bisection.
fn refine_crossing(family: Family, n: usize, a: &CurvePoint, b: &CurvePoint) -> Result<Option<(f64, f64)>> {
    let (wa, wb) = (a.winding.unwrap_or(0.0), b.winding.unwrap_or(0.0));
    let k = wa.max(wb).floor();
    let at = |t: f64| (a.p + t * (b.p - a.p), a.dtheta + t * (b.dtheta - a.dtheta));
    let f = |t: f64| -> Result<Option<f64>> {
        let (p, d) = at(t);
        Ok(winding(&family.state(p, d)?, n).map(|w| w - k))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let lo_sign = wa - k < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let Some(v) = f(mid)? else { return Ok(None) };
        if (v < 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(Some(at(0.5 * (lo + hi))))
}

/// Five on-curve and five off-curve points checked against the numeric
/// periodic nullity. On-curve points are refined onto the curve.
pub fn spot_validate(cfg: &SweepConfig, n: usize, grid: &[CurvePoint]) -> Result<Vec<SpotCheck>> {
    let cols = cfg.dtheta_grid.values().len();
    let mut rng = random::rng(cfg.seed, n as u64);
    let mut on: Vec<(f64, f64)> = grid.iter().filter(|c| c.tpow == Some(true)).map(|c| (c.p, c.dtheta)).collect();
    let mut pairs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|k| [(k, k + 1), (k, k + cols)])
        .filter(|&(a, b)| b < grid.len() && (b != a + 1 || b % cols != 0) && crosses(&grid[a], &grid[b]))
        .collect();
    pairs.shuffle(&mut rng);
    for (a, b) in pairs {
        if on.len() >= 5 {
            break;
        }
        if let Some(pt) = refine_crossing(cfg.family, n, &grid[a], &grid[b])? {
            on.push(pt);
        }
    }
    on.shuffle(&mut rng);
    on.truncate(5);
    let mut off: Vec<(f64, f64)> = grid
        .iter()
        .filter(|c| c.tpow == Some(false) && c.winding.is_none_or(|w| (w - w.round()).abs() > 0.05))
        .map(|c| (c.p, c.dtheta))
        .collect();
    off.shuffle(&mut rng);
    off.truncate(5);
    let check = |(p, dtheta): (f64, f64), on_curve: bool| -> Result<SpotCheck> {
        let psi = cfg.family.state(p, dtheta)?;
        let predicted = if tpow(&psi, n)? == Some(true) { n + 1 } else { 2 };
        let numeric = numeric_nullity(&ChainSpec::periodic(psi, n))?;
        let expected_branch = if on_curve { n + 1 } else { 2 };
        Ok(SpotCheck { n, p, dtheta, on_curve, predicted, numeric, pass: numeric == predicted && predicted == expected_branch })
    };
    on.into_iter().map(|pt| check(pt, true)).chain(off.into_iter().map(|pt| check(pt, false))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub config: SweepConfig,
    pub config_hash: String,
    pub build_id: String,
    pub rows: usize,
    pub outputs: Vec<String>,
    pub curve_points: Vec<(usize, usize)>,
    pub spot_checks: Vec<SpotCheck>,
}

pub fn build_id() -> String {
    match option_env!("FFCHAIN_BUILD_ID") {
        Some(id) => id.to_string(),
        None => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

fn plot_script(csv: &str) -> String {
    format!(
        "# Phase diagram from {csv}; columns are documented in the sweep manifest.\n\
         import sys\n\
         import pandas as pd\n\
         import matplotlib.pyplot as plt\n\n\
         df = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else \"{csv}\")\n\
         colors = df[\"analytic_phase\"].map({{\"gapless\": \"tab:blue\", \"gapped\": \"tab:red\"}})\n\
         plt.scatter(df[\"dtheta\"], df[\"p\"], c=colors, s=8)\n\
         plt.xlabel(\"theta2 - theta1\")\n\
         plt.ylabel(\"p\")\n\
         plt.savefig(\"{csv}.png\", dpi=150)\n"
    )
}

/// Runs the sweep (and curves if requested) and writes every output file.
pub fn write_sweep(cfg: &SweepConfig) -> Result<Manifest> {
    let io = |e: std::io::Error| Error::Input(e.to_string());
    let rows = run_sweep(cfg)?;
    fs::write(&cfg.out, sweep_csv(cfg, &rows)).map_err(io)?;
    let csv_name = file_name(&cfg.out);
    fs::write(cfg.plot_script_path(), plot_script(&csv_name)).map_err(io)?;
    let mut outputs = vec![csv_name, file_name(&cfg.plot_script_path())];
    let mut curve_points = Vec::new();
    let mut spot_checks = Vec::new();
    if cfg.curves && cfg.family == Family::RealPlus {
        for &n in &cfg.n_list {
            let grid = degeneracy_curves(cfg, n)?;
            fs::write(cfg.curves_path(n), curves_csv(&grid)).map_err(io)?;
            outputs.push(file_name(&cfg.curves_path(n)));
            curve_points.push((n, grid.iter().filter(|c| c.near_curve).count()));
            if n <= SPOT_MAX_N {
                spot_checks.extend(spot_validate(cfg, n, &grid)?);
            }
        }
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        config_hash: cfg.hash(),
        build_id: build_id(),
        rows: rows.len(),
        outputs,
        curve_points,
        spot_checks,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Input(e.to_string()))?;
    fs::write(cfg.manifest_path(), text + "\n").map_err(io)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: &str, d: &str, ns: Vec<usize>) -> SweepConfig {
        SweepConfig {
            family: Family::RealPlus,
            p_grid: p.parse().unwrap(),
            dtheta_grid: d.parse().unwrap(),
            n_list: ns,
            seed: 3,
            curves: false,
            out: PathBuf::from("sweep.csv"),
            workers: Some(2),
        }
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!("0.3:0.3:1".parse::<Grid>().unwrap().values(), vec![0.3]);
        assert!("1:0:3".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
    }

    #[test]
    fn sweep_rows_sorted_and_bounded() {
        let c = cfg("0.1:0.5:4", "0:1.5:4", vec![4, 6]);
        let rows = run_sweep(&c).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.windows(2).all(|w| (w[0].p, w[0].dtheta) < (w[1].p, w[1].dtheta)));
        for r in &rows {
            assert_eq!(r.analytic_gapless, r.numeric_gapless, "{} {}", r.p, r.dtheta);
            assert!(r.per_n.iter().all(|c| c.within_bound != Some(false)));
        }
        let csv = sweep_csv(&c, &rows);
        assert!(csv.starts_with("p,dtheta,analytic_phase,numeric_phase,tn_prop_identity_n4,tn_prop_identity_n6,gap_n4"));
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn p_outside_family_rejected() {
        assert!(run_sweep(&cfg("0:0.7:3", "0:1:2", vec![4])).is_err());
        assert!(run_sweep(&cfg("0:0.5:3", "0:1:2", vec![2])).is_err());
    }

    #[test]
    fn hash_ignores_paths_and_workers() {
        let a = cfg("0:0.5:3", "0:1:2", vec![4]);
        let mut b = a.clone();
        b.out = PathBuf::from("elsewhere/x.csv");
        b.workers = Some(7);
        assert_eq!(a.hash(), b.hash());
        b.seed = 4;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn singlet_point_on_every_curve() {
        let c = cfg("0.5:0.5:1", "1.5707963267948966:1.5707963267948966:1", vec![3]);
        for n in 3..=9 {
            let g = degeneracy_curves(&c, n).unwrap();
            assert_eq!(g[0].tpow, Some(true));
            assert_eq!(g[0].periodic_degeneracy, Some(n + 1));
        }
    }

    #[test]
    fn curves_densify_and_spot_checks_pass() {
        let c = cfg("0.02:0.5:30", "0:1.5707963267948966:30", vec![4]);
        let count = |n| degeneracy_curves(&c, n).unwrap().iter().filter(|p| p.near_curve).count();
        assert!(count(10) > count(4));
        let grid = degeneracy_curves(&c, 6).unwrap();
        let spots = spot_validate(&c, 6, &grid).unwrap();
        assert_eq!(spots.iter().filter(|s| s.on_curve).count(), 5);
        assert_eq!(spots.iter().filter(|s| !s.on_curve).count(), 5);
        assert!(spots.iter().all(|s| s.pass), "{spots:?}");
    }
}
