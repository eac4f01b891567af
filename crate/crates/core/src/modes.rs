//! One Fourier mode `(κ, u, v)` at imaginary frequency, its Lorentz boost into the
//! frame of plate 2, and the polarization vectors used by the reflection operators.

use crate::error::{Error, Result};
use crate::linalg::{c, dot, principal_sqrt, rx, Vec3, C64, I};

/// Mode geometry. `kappa = ξ/c`; `u`, `v` are the wavevector components along y, z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub kappa: f64,
    pub u: f64,
    pub v: f64,
    pub beta: f64,
    /// `√(u² + v²)`
    pub q: f64,
    /// `√(u² + v² + κ²)`
    pub w: f64,
    pub gamma: f64,
    /// `γ(κ + iβu)`
    pub kappa_p: C64,
    /// `γ(u − iβκ)`
    pub u_p: C64,
}

impl Mode {
    pub fn new(kappa: f64, u: f64, v: f64, beta: f64) -> Result<Mode> {
        if !(beta >= 0.0 && beta < 1.0) {
            return Err(Error::InvalidBeta(beta));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidMode(format!("kappa = {kappa}")));
        }
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::InvalidMode(format!("u = {u}, v = {v}")));
        }
        let q = u.hypot(v);
        if q == 0.0 {
            return Err(Error::DegenerateMode);
        }
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        Ok(Mode {
            kappa,
            u,
            v,
            beta,
            q,
            w: q.hypot(kappa),
            gamma,
            kappa_p: gamma * C64::new(kappa, beta * u),
            u_p: gamma * C64::new(u, -beta * kappa),
        })
    }

    /// Same `(κ, v, β)` with `u → su·u`, `v → sv·v`.
    pub fn reflected(&self, su: f64, sv: f64) -> Mode {
        Mode {
            u: su * self.u,
            v: sv * self.v,
            kappa_p: self.gamma * C64::new(self.kappa, self.beta * su * self.u),
            u_p: self.gamma * C64::new(su * self.u, -self.beta * self.kappa),
            ..*self
        }
    }

    pub fn with_beta(&self, beta: f64) -> Result<Mode> {
        Mode::new(self.kappa, self.u, self.v, beta)
    }

    /// `√(u² + v² − 2iβκu − β²(κ² + v²))`, principal root. Equals `q′/γ`.
    pub fn boosted_root(&self) -> C64 {
        let (k, u, v, b) = (self.kappa, self.u, self.v, self.beta);
        principal_sqrt(C64::new(
            self.q * self.q - b * b * (k * k + v * v),
            -2.0 * b * k * u,
        ))
    }

    pub fn basis(&self) -> Result<PolarizationBasis> {
        PolarizationBasis::new(self)
    }
}

/// Bilinearly normalized polarization vectors: `E1`, `B1` for left-moving waves at
/// plate 1, `E2`, `B2` for right-moving waves at plate 2 (boosted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    pub n_e1: Vec3,
    pub n_b1: Vec3,
    pub n_e2: Vec3,
    pub n_b2: Vec3,
    /// `n_E1 · n_E2`
    pub lambda: C64,
    /// `n_E2 · (R_x n_B1)`, satisfying `ν² = 1 − λ²`.
    pub nu: C64,
}

impl PolarizationBasis {
    pub fn new(m: &Mode) -> Result<PolarizationBasis> {
        let (k, u, v, b, w, q) = (m.kappa, m.u, m.v, m.beta, m.w, m.q);
        let d = m.boosted_root();
        if d.norm() <= 1e-14 * m.w {
            return Err(Error::DegenerateMode);
        }
        let n_e1 = Vec3::new(c(0.0), c(-v / q), c(u / q));
        let n_b1 = Vec3::new(I * (q / k), c(-u * w / (k * q)), c(-v * w / (k * q)));
        let kd = k * d;
        let n_e2 = Vec3::new(
            c(b * v * w),
            -v * C64::new(k, b * u),
            C64::new(k * u, -b * (k * k + v * v)),
        ) / kd;
        let n_b2 = Vec3::new(
            C64::new(b * k * u, q * q),
            w * C64::new(u, -b * k),
            c(v * w),
        ) / kd;
        let qd = q * d;
        Ok(PolarizationBasis {
            n_e1,
            n_b1,
            n_e2,
            n_b2,
            lambda: C64::new(q * q, -b * k * u) / qd,
            nu: C64::new(0.0, b * v * w) / qd,
        })
    }

    /// `λ` from the vectors themselves.
    pub fn lambda_from_vectors(&self) -> C64 {
        dot(&self.n_e1, &self.n_e2)
    }

    /// `ν` from the vectors themselves.
    pub fn nu_from_vectors(&self) -> C64 {
        dot(&self.n_e2, &(rx() * self.n_b1))
    }
}
