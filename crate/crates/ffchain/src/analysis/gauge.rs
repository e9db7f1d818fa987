use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{dot, matvec2, perp, ser_c64, transfer_matrix, Mat2, TwoQubitState, Vec2};

/// Basis in which the μ₁-eigenvector of T is |0⟩ and the μ₂-eigenvector is
/// |v⟩ = c|0⟩ + s|1⟩ with s > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gauge {
    #[serde(serialize_with = "ser_mat2")]
    pub u: Mat2,
    #[serde(serialize_with = "ser_c64")]
    pub mu1: C64,
    #[serde(serialize_with = "ser_c64")]
    pub mu2: C64,
    /// |μ₂/μ₁|; infinite for a product state.
    pub lambda_abs: f64,
    #[serde(serialize_with = "ser_c64")]
    pub c: C64,
    pub s: f64,
    #[serde(serialize_with = "ser_vec2")]
    pub v: Vec2,
    #[serde(serialize_with = "ser_vec2")]
    pub v_perp: Vec2,
    /// (U⊗U)ψ
    pub state: TwoQubitState,
}

fn ser_vec2<S: serde::Serializer>(v: &Vec2, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    v.map(|z| [z.re, z.im]).serialize(s)
}

fn ser_mat2<S: serde::Serializer>(m: &Mat2, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.map(|r| r.map(|z| [z.re, z.im])).serialize(s)
}

impl Gauge {
    /// |λ|^{−2d} s²/(1−|c|)
    pub fn sigma_bound(&self, distance: usize) -> f64 {
        self.lambda_abs.powi(-2 * distance as i32) * self.s * self.s / (1.0 - self.c.norm())
    }
}

/// Gauge for ψ; requires |μ₁| < |μ₂|.
pub fn gauge(psi: &TwoQubitState) -> Result<Gauge> {
    let t = transfer_matrix(psi);
    let (m1, m2) = (t.mu1.norm(), t.mu2.norm());
    if t.defective || m2 - m1 <= 1e-9 * m2.max(1.0) {
        return Err(Error::GaugeUnavailable);
    }
    let e1 = t.eigvec1;
    let e1p = perp(&e1);
    let u: Mat2 = [[e1[0].conj(), e1[1].conj()], [e1p[0].conj(), e1p[1].conj()]];
    let overlap = dot(&e1p, &t.eigvec2);
    let ph = overlap.conj() / overlap.norm();
    let e2 = [t.eigvec2[0] * ph, t.eigvec2[1] * ph];
    let v = matvec2(&u, &e2);
    let c = v[0];
    let s = v[1].re;
    let v_perp = [C64::new(s, 0.0), -c.conj()];
    Ok(Gauge {
        u,
        mu1: t.mu1,
        mu2: t.mu2,
        lambda_abs: if m1 > 0.0 { m2 / m1 } else { f64::INFINITY },
        c,
        s,
        v,
        v_perp,
        state: psi.rotated(&u),
    })
}
