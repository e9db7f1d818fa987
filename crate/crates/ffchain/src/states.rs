//! Forbidden-state algebra: T_ψ, its spectral data, phase classification,
//! canonical form, Schmidt decomposition and the real two-parameter family.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::random::gaussian_complex;

pub type Vec2 = [C64; 2];
pub type Mat2 = [[C64; 2]; 2];

const Z: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub const CLASSIFY_TOL: f64 = 1e-9;
/// |det T| below this marks a product state.
pub const PRODUCT_TOL: f64 = 1e-12;

/// Normalized two-qubit state; amplitudes ordered a00, a01, a10, a11 with the
/// first qubit most significant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [C64; 4],
}

impl TwoQubitState {
    pub fn amps(&self) -> [C64; 4] {
        self.amps
    }

    pub fn a(&self, x: usize, y: usize) -> C64 {
        self.amps[2 * x + y]
    }

    pub fn singlet() -> Self {
        make_state([Z, ONE, -ONE, Z]).expect("nonzero")
    }

    /// (|01⟩ − q|10⟩)/√(1+q²)
    pub fn xxz(q: f64) -> Self {
        make_state([Z, ONE, C64::new(-q, 0.0), Z]).expect("nonzero")
    }

    pub fn product(a: Vec2, b: Vec2) -> Result<Self> {
        make_state([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    /// (U⊗U)ψ
    pub fn rotated(&self, u: &Mat2) -> Self {
        let mut out = [Z; 4];
        for x in 0..2 {
            for y in 0..2 {
                let mut acc = Z;
                for xp in 0..2 {
                    for yp in 0..2 {
                        acc += u[x][xp] * u[y][yp] * self.a(xp, yp);
                    }
                }
                out[2 * x + y] = acc;
            }
        }
        Self { amps: out }
    }

    /// Swap the two qubits (left-right flip of a chain).
    pub fn swapped(&self) -> Self {
        let a = self.amps;
        Self { amps: [a[0], a[2], a[1], a[3]] }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_entangled(&self) -> bool {
        (self.a(0, 0) * self.a(1, 1) - self.a(0, 1) * self.a(1, 0)).norm() > PRODUCT_TOL
    }
}

/// Normalize four amplitudes into a state.
pub fn make_state(amps: [C64; 4]) -> Result<TwoQubitState> {
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(TwoQubitState { amps: amps.map(|a| a / n) })
}

/// Haar-random two-qubit state.
pub fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    loop {
        let amps = [(); 4].map(|_| gaussian_complex(rng));
        if let Ok(s) = make_state(amps) {
            return s;
        }
    }
}

/// Haar-random 2×2 unitary.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2 {
    let m = crate::numerics::random::unitary(rng, 2);
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

#[derive(Serialize, Deserialize)]
struct StateLiteral {
    a00: [f64; 2],
    a01: [f64; 2],
    a10: [f64; 2],
    a11: [f64; 2],
}

impl Serialize for TwoQubitState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c = |z: C64| [z.re, z.im];
        StateLiteral {
            a00: c(self.amps[0]),
            a01: c(self.amps[1]),
            a10: c(self.amps[2]),
            a11: c(self.amps[3]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwoQubitState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lit = StateLiteral::deserialize(d)?;
        let c = |p: [f64; 2]| C64::new(p[0], p[1]);
        make_state([c(lit.a00), c(lit.a01), c(lit.a10), c(lit.a11)]).map_err(serde::de::Error::custom)
    }
}

/// T_ψ together with its eigen-data. Eigenvalues are ordered |μ₁| ≤ |μ₂|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub entries: Mat2,
    pub mu1: C64,
    pub mu2: C64,
    pub eigvec1: Vec2,
    /// Phase fixed so the |1⟩ component is real and non-negative.
    pub eigvec2: Vec2,
    pub defective: bool,
    /// ⟨eigvec1|eigvec2⟩
    pub c: C64,
    /// μ₂/μ₁, when μ₁ ≠ 0.
    pub lambda: Option<C64>,
    pub det: C64,
    pub entangled: bool,
}

pub fn transfer_matrix(psi: &TwoQubitState) -> TransferMatrix {
    let a = |x, y| psi.a(x, y).conj();
    let t: Mat2 = [[a(0, 1), a(1, 1)], [-a(0, 0), -a(1, 0)]];
    let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
    let (mu1, mu2, eigvec1, mut eigvec2, defective) = eig2(&t);
    if eigvec2[1].norm() > 0.0 {
        let ph = eigvec2[1].conj() / eigvec2[1].norm();
        eigvec2 = [eigvec2[0] * ph, eigvec2[1] * ph];
    }
    let c = dot(&eigvec1, &eigvec2);
    let lambda = (mu1.norm() > PRODUCT_TOL).then(|| mu2 / mu1);
    TransferMatrix {
        entries: t,
        mu1,
        mu2,
        eigvec1,
        eigvec2,
        defective,
        c,
        lambda,
        det,
        entangled: det.norm() > PRODUCT_TOL,
    }
}

/// ⟨u|w⟩
pub fn dot(u: &Vec2, w: &Vec2) -> C64 {
    u[0].conj() * w[0] + u[1].conj() * w[1]
}

pub fn normalize2(v: Vec2) -> Vec2 {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Unit vector orthogonal to v: (−v₁*, v₀*).
pub fn perp(v: &Vec2) -> Vec2 {
    [-v[1].conj(), v[0].conj()]
}

pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn matvec2(a: &Mat2, v: &Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn adjoint2(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Spectral norm of a 2×2 matrix.
pub fn norm2(a: &Mat2) -> f64 {
    let fro: f64 = a.iter().flatten().map(|x| x.norm_sqr()).sum();
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (fro + disc)).sqrt()
}

/// Eigen-decomposition of a 2×2 matrix: (μ₁, μ₂, v₁, v₂, defective) with
/// |μ₁| ≤ |μ₂|. A defective matrix returns its single eigenvector twice.
pub fn eig2(t: &Mat2) -> (C64, C64, Vec2, Vec2, bool) {
    let scale = t.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let half_tr = (t[0][0] + t[1][1]) * 0.5;
    let disc = (((t[0][0] - t[1][1]) * 0.5).powi(2) + t[0][1] * t[1][0]).sqrt();
    let (mut m1, mut m2) = (half_tr - disc, half_tr + disc);
    if m1.norm() > m2.norm() || (m1.norm() == m2.norm() && m1.arg() > m2.arg()) {
        std::mem::swap(&mut m1, &mut m2);
    }
    let scalar = t[0][1].norm() <= 1e-14 * scale
        && t[1][0].norm() <= 1e-14 * scale
        && (t[0][0] - t[1][1]).norm() <= 1e-14 * scale;
    if scalar {
        return (m1, m2, [ONE, Z], [Z, ONE], false);
    }
    let vec_for = |mu: C64| -> Vec2 {
        let r1 = [t[0][1], mu - t[0][0]];
        let r2 = [mu - t[1][1], t[1][0]];
        let n1 = r1[0].norm_sqr() + r1[1].norm_sqr();
        let n2 = r2[0].norm_sqr() + r2[1].norm_sqr();
        normalize2(if n1 >= n2 { r1 } else { r2 })
    };
    let v1 = vec_for(m1);
    if (m1 - m2).norm() <= 1e-9 * scale {
        let mu = (m1 + m2) * 0.5;
        let v = vec_for(mu);
        return (mu, mu, v, v, true);
    }
    (m1, m2, v1, vec_for(m2), false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseKind {
    GaplessEqualModuli,
    GappedDistinctModuli,
    GappedCommuting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseVerdict {
    pub kind: PhaseKind,
    #[serde(serialize_with = "ser_c64")]
    pub mu1: C64,
    #[serde(serialize_with = "ser_c64")]
    pub mu2: C64,
    /// Moduli differ but fall inside the tolerance band.
    pub boundary: bool,
    pub detail: String,
}

pub fn ser_c64<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Gapped/gapless verdict from the eigenvalue moduli of T_ψ.
pub fn classify_phase(psi: &TwoQubitState, tol: f64) -> PhaseVerdict {
    let t = transfer_matrix(psi);
    let (m1, m2) = (t.mu1.norm(), t.mu2.norm());
    let diff = (m1 - m2).abs();
    let kind = if m2 <= tol {
        PhaseKind::GappedCommuting
    } else if diff <= tol * m2.max(1.0) {
        PhaseKind::GaplessEqualModuli
    } else {
        PhaseKind::GappedDistinctModuli
    };
    let boundary = kind == PhaseKind::GaplessEqualModuli && diff > 1e-13 * m2.max(1.0);
    let mut detail = format!("|mu1| = {m1:.12}, |mu2| = {m2:.12}");
    if psi.a(0, 1).norm() <= 1e-14 && psi.a(1, 0).norm() <= 1e-14 && t.entangled {
        let p = psi.a(1, 1).norm_sqr();
        let q = p * (1.0 - p);
        detail.push_str(&format!(
            "; sqrt(1-p)|00>+sqrt(p)|11> form with p = {p:.12}: eigenvalues of T are \
             ±i(p(1-p))^(1/4) = ±i{:.12}; the reading ±i sqrt(p(1-p)) would give ±i{:.12}; \
             both have equal moduli",
            q.powf(0.25),
            q.sqrt()
        ));
    }
    PhaseVerdict { kind, mu1: t.mu1, mu2: t.mu2, boundary, detail }
}

/// Result of bringing ψ to the form (α+iβ)|01⟩+(α+iγ)|10⟩+δ|11⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub u: Mat2,
    pub psi_prime: TwoQubitState,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn canonical_form(psi: &TwoQubitState) -> CanonicalForm {
    // Step 1: send the μ₁ eigenvector to |0⟩; T becomes upper triangular.
    let e1 = transfer_matrix(psi).eigvec1;
    let e1p = perp(&e1);
    let u1: Mat2 = [[e1[0].conj(), e1[1].conj()], [e1p[0].conj(), e1p[1].conj()]];
    let s1 = psi.rotated(&u1);
    // Step 2: global phase so that μ₁ + μ₂ is purely imaginary.
    let t1 = transfer_matrix(&s1);
    let sum = t1.entries[0][0] + t1.entries[1][1];
    let theta = if sum.norm() <= 1e-14 { 0.0 } else { FRAC_PI_2 - sum.arg() };
    let g = C64::from_polar(1.0, -theta / 2.0);
    let u2: Mat2 = [[g, Z], [Z, g]];
    // Step 3: diagonal phase so that δ is real and non-negative.
    let s2 = s1.rotated(&u2);
    let d = s2.a(1, 1);
    let phi = if d.norm() <= 1e-14 { 0.0 } else { d.arg() / 2.0 };
    let u3: Mat2 = [[C64::from_polar(1.0, phi), Z], [Z, C64::from_polar(1.0, -phi)]];
    let u = matmul2(&u3, &matmul2(&u2, &u1));
    let psi_prime = psi.rotated(&u);
    let (a01, a10) = (psi_prime.a(0, 1), psi_prime.a(1, 0));
    CanonicalForm {
        u,
        psi_prime,
        alpha: 0.5 * (a01.re + a10.re),
        beta: a01.im,
        gamma: a10.im,
        delta: psi_prime.a(1, 1).re,
    }
}

/// State (α+iβ)|01⟩+(α+iγ)|10⟩+δ|11⟩, normalized.
pub fn from_canonical(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<TwoQubitState> {
    make_state([Z, C64::new(alpha, beta), C64::new(alpha, gamma), C64::new(delta, 0.0)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[C64::new(c, 0.0), C64::new(s, 0.0)], [C64::new(-s, 0.0), C64::new(c, 0.0)]]
}

/// R(θ₁)⊗R(θ₂)[√(1−p)|00⟩ ± √p|11⟩]
pub fn real_family(p: f64, theta1: f64, theta2: f64, sign: Sign) -> Result<TwoQubitState> {
    check_p(p)?;
    let sgn = if sign == Sign::Plus { 1.0 } else { -1.0 };
    let (r1, r2) = (rotation(theta1), rotation(theta2));
    let base = [(1.0 - p).sqrt(), 0.0, 0.0, sgn * p.sqrt()];
    let mut out = [Z; 4];
    for x in 0..2 {
        for y in 0..2 {
            for xp in 0..2 {
                for yp in 0..2 {
                    out[2 * x + y] += r1[x][xp] * r2[y][yp] * base[2 * xp + yp];
                }
            }
        }
    }
    make_state(out)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::ParameterOutOfRange(format!("p = {p} not in [0, 1/2]")));
    }
    Ok(())
}

/// Analytic gapless condition for the real family.
pub fn gapless_region_real(p: f64, dtheta: f64, sign: Sign) -> Result<bool> {
    check_p(p)?;
    const EPS: f64 = 1e-12;
    Ok(match sign {
        Sign::Plus => {
            p > EPS && dtheta.sin().powi(2) <= 4.0 / (2.0 + (p * (1.0 - p)).powf(-0.5)) + EPS
        }
        Sign::Minus => (p - 0.5).abs() <= EPS || (dtheta.sin().abs() <= EPS && p > EPS),
    })
}

/// Whether T_ψ^n is proportional to the identity.
pub fn tpow_prop_identity(psi: &TwoQubitState, n: usize, tol: f64) -> Result<bool> {
    let t = transfer_matrix(psi);
    if !t.entangled {
        return Err(Error::ProductState);
    }
    if t.defective {
        let p = matrix_power_normalized(&t.entries, n);
        let scale = p.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
        return Ok(p[0][1].norm() <= tol * scale
            && p[1][0].norm() <= tol * scale
            && (p[0][0] - p[1][1]).norm() <= tol * scale);
    }
    let ratio = t.mu1 / t.mu2;
    Ok((ratio.powi(n as i32) - 1.0).norm() <= tol)
}

/// T^n rescaled to unit spectral norm, by repeated squaring.
pub fn matrix_power_normalized(t: &Mat2, n: usize) -> Mat2 {
    let rescale = |m: Mat2| -> Mat2 {
        let s = norm2(&m);
        if s == 0.0 { m } else { m.map(|r| r.map(|x| x / s)) }
    };
    let mut result: Mat2 = [[ONE, Z], [Z, ONE]];
    let mut base = rescale(*t);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = rescale(matmul2(&result, &base));
        }
        base = rescale(matmul2(&base, &base));
        k >>= 1;
    }
    result
}

/// √p₀|w₀v₀⟩ + √p₁|w₁v₁⟩ with p₀ ≥ p₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtData {
    pub p0: f64,
    pub p1: f64,
    pub w0: Vec2,
    pub w1: Vec2,
    pub v0: Vec2,
    pub v1: Vec2,
    pub product: bool,
}

pub fn schmidt(psi: &TwoQubitState) -> SchmidtData {
    let m = [[psi.a(0, 0), psi.a(0, 1)], [psi.a(1, 0), psi.a(1, 1)]];
    let mmd = matmul2(&m, &adjoint2(&m));
    let (a, b, d) = (mmd[0][0].re, mmd[0][1], mmd[1][1].re);
    let mean = 0.5 * (a + d);
    let rad = ((0.5 * (a - d)).powi(2) + b.norm_sqr()).sqrt();
    let (p0, p1) = (mean + rad, (mean - rad).max(0.0));
    let mut w0 = if b.norm() > 1e-15 {
        normalize2([b, C64::new(p0 - a, 0.0)])
    } else if a >= d {
        [ONE, Z]
    } else {
        [Z, ONE]
    };
    let lead = if w0[0].norm() > 1e-12 { w0[0] } else { w0[1] };
    let ph = lead.conj() / lead.norm();
    w0 = [w0[0] * ph, w0[1] * ph];
    let w1 = perp(&w0);
    let right = |w: &Vec2, p: f64| -> Vec2 {
        let s = p.sqrt();
        [
            (m[0][0] * w[0].conj() + m[1][0] * w[1].conj()) / s,
            (m[0][1] * w[0].conj() + m[1][1] * w[1].conj()) / s,
        ]
    };
    let v0 = normalize2(right(&w0, p0));
    let product = p1 <= PRODUCT_TOL;
    let v1 = if product { perp(&v0) } else { normalize2(right(&w1, p1)) };
    SchmidtData { p0, p1, w0, w1, v0, v1, product }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn singlet_transfer_matrix() {
        let t = transfer_matrix(&TwoQubitState::singlet());
        let s = 0.5f64.sqrt();
        assert!(close(t.entries[0][0], C64::new(s, 0.0), 1e-15));
        assert!(close(t.entries[1][1], C64::new(s, 0.0), 1e-15));
        assert!(t.entries[0][1].norm() < 1e-15 && t.entries[1][0].norm() < 1e-15);
        assert!(!t.defective);
    }

    #[test]
    fn xxz_eigenvalues() {
        let t = transfer_matrix(&TwoQubitState::xxz(2.0));
        let s = 5f64.sqrt();
        assert!(close(t.mu1, C64::new(1.0 / s, 0.0), 1e-14));
        assert!(close(t.mu2, C64::new(2.0 / s, 0.0), 1e-14));
        assert!(close(t.lambda.unwrap(), C64::new(2.0, 0.0), 1e-13));
    }

    #[test]
    fn eleven_is_defective_commuting() {
        let s = make_state([Z, Z, Z, ONE]).unwrap();
        let t = transfer_matrix(&s);
        assert!(t.defective);
        assert_eq!(t.mu2.norm(), 0.0);
        assert!(close(t.entries[0][1], ONE, 0.0));
        assert_eq!(classify_phase(&s, CLASSIFY_TOL).kind, PhaseKind::GappedCommuting);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_phase(&TwoQubitState::singlet(), CLASSIFY_TOL).kind, PhaseKind::GaplessEqualModuli);
        assert_eq!(classify_phase(&TwoQubitState::xxz(2.0), CLASSIFY_TOL).kind, PhaseKind::GappedDistinctModuli);
        let s = make_state([C64::new(0.7f64.sqrt(), 0.0), Z, Z, C64::new(0.3f64.sqrt(), 0.0)]).unwrap();
        let v = classify_phase(&s, CLASSIFY_TOL);
        assert_eq!(v.kind, PhaseKind::GaplessEqualModuli);
        assert!((v.mu1.norm() - 0.21f64.powf(0.25)).abs() < 1e-12);
        assert!(v.detail.contains("(p(1-p))^(1/4)"));
    }

    #[test]
    fn canonical_singlet() {
        let cf = canonical_form(&TwoQubitState::singlet());
        let s = 0.5f64.sqrt();
        assert!(cf.alpha.abs() < 1e-14);
        assert!((cf.beta + s).abs() < 1e-14);
        assert!((cf.gamma - s).abs() < 1e-14);
        assert!(cf.delta.abs() < 1e-14);
    }

    #[test]
    fn canonical_eleven_is_identity() {
        let cf = canonical_form(&make_state([Z, Z, Z, ONE]).unwrap());
        assert!(close(cf.u[0][0], ONE, 1e-15) && close(cf.u[1][1], ONE, 1e-15));
        assert!((cf.delta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_family_examples() {
        let s = real_family(0.5, 0.0, 0.0, Sign::Plus).unwrap();
        assert!((s.a(0, 0).re - 0.5f64.sqrt()).abs() < 1e-15);
        let g = real_family(0.3, 0.0, 0.0, Sign::Plus).unwrap();
        assert_eq!(classify_phase(&g, CLASSIFY_TOL).kind, PhaseKind::GaplessEqualModuli);
        let h = real_family(0.3, 0.0, FRAC_PI_2, Sign::Plus).unwrap();
        assert_eq!(classify_phase(&h, CLASSIFY_TOL).kind, PhaseKind::GappedDistinctModuli);
        assert!(real_family(0.6, 0.0, 0.0, Sign::Plus).is_err());
    }

    #[test]
    fn region_predicate_examples() {
        assert!(gapless_region_real(0.5, 1.3, Sign::Plus).unwrap());
        assert!(!gapless_region_real(0.0, 0.2, Sign::Plus).unwrap());
        assert!(gapless_region_real(0.25, 0.0, Sign::Minus).unwrap());
        assert!(!gapless_region_real(0.25, 0.3, Sign::Minus).unwrap());
    }

    #[test]
    fn tpow_examples() {
        assert!(tpow_prop_identity(&TwoQubitState::singlet(), 7, 1e-9).unwrap());
        assert!(!tpow_prop_identity(&TwoQubitState::xxz(2.0), 6, 1e-9).unwrap());
        let gb = from_canonical(0.3, 0.5, 0.5, 0.4).unwrap();
        assert!(tpow_prop_identity(&gb, 4, 1e-9).unwrap());
        assert!(!tpow_prop_identity(&gb, 3, 1e-9).unwrap());
        let prod = make_state([Z, Z, Z, ONE]).unwrap();
        assert_eq!(tpow_prop_identity(&prod, 3, 1e-9), Err(Error::ProductState));
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt(&TwoQubitState::singlet());
        assert!((s.p0 - 0.5).abs() < 1e-14 && (s.p1 - 0.5).abs() < 1e-14);
        let e = schmidt(&make_state([Z, Z, Z, ONE]).unwrap());
        assert!(e.product && (e.p0 - 1.0).abs() < 1e-15);
        let r = schmidt(&make_state([C64::new(0.7f64.sqrt(), 0.0), Z, Z, C64::new(0.3f64.sqrt(), 0.0)]).unwrap());
        assert!((r.p0 - 0.7).abs() < 1e-14);
        assert!(close(r.w0[0], ONE, 1e-14) && close(r.v0[0], ONE, 1e-14));
        assert!(close(r.w1[1].conj() * r.v1[1], ONE, 1e-14));
    }

    #[test]
    fn state_literal_round_trip() {
        let s = TwoQubitState::xxz(1.5);
        let j = serde_json::to_string(&s).unwrap();
        let back: TwoQubitState = serde_json::from_str(&j).unwrap();
        assert!(s.distance(&back) < 1e-15);
        let raw: TwoQubitState = serde_json::from_str(r#"{"a00":[0,0],"a01":[1,0],"a10":[-1,0],"a11":[0,0]}"#).unwrap();
        assert!(raw.distance(&TwoQubitState::singlet()) < 1e-15);
    }
}
