//! Fresnel coefficients and the 3×3 reflection operators of the two plates.
//!
//! `omega_scale` converts the wavenumber `κ` into the material argument `ζ`:
//! `ζ = omega_scale · κ`. In SI units it is `c`; with lengths measured in units
//! of the separation `a` it is `c/a`.

use crate::error::{Error, Result};
use crate::linalg::{outer, principal_sqrt, rx, Mat3, Vec3, C64, I};
use crate::materials::Material;
use crate::modes::{Mode, PolarizationBasis};

/// Denominators smaller than this relative to their terms raise `PoleProximity`.
pub const POLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelSet {
    pub r_e: C64,
    pub r_b: C64,
    /// Decay constant in the medium, `w₁` or `w₂`.
    pub w_med: C64,
    pub eps: C64,
    pub mu: C64,
}

fn ratio(num: C64, den: C64, scale: f64, context: &'static str) -> Result<C64> {
    let relative = den.norm() / scale;
    if !(relative >= POLE_TOLERANCE) {
        return Err(Error::PoleProximity { context, relative });
    }
    Ok(num / den)
}

/// Fresnel pair for a half space with response `(eps, mu)` seen by a vacuum wave
/// with decay `w`; `kk`, `uu` are the medium-frame `κ`, `u`.
fn fresnel(
    eps: C64,
    mu: C64,
    w: f64,
    kk: C64,
    uu: C64,
    v: f64,
    name: &'static str,
) -> Result<FresnelSet> {
    let w_med = principal_sqrt(uu * uu + v * v + eps * mu * kk * kk);
    if !(w_med.re > 0.0) {
        return Err(Error::BranchViolation { name, re: w_med.re });
    }
    let (mw, ew) = (mu * w, eps * w);
    let r_e = ratio(mw - w_med, mw + w_med, mw.norm() + w_med.norm(), "TE reflection")?;
    let r_b = -ratio(ew - w_med, ew + w_med, ew.norm() + w_med.norm(), "TM reflection")?;
    Ok(FresnelSet {
        r_e,
        r_b,
        w_med,
        eps,
        mu,
    })
}

/// Plate 1 at rest: material evaluated at `ζ = omega_scale · κ`.
pub fn fresnel_plate1(mat: &Material, mode: &Mode, omega_scale: f64) -> Result<FresnelSet> {
    let (eps, mu) = mat.eval_response(C64::new(omega_scale * mode.kappa, 0.0))?;
    fresnel(
        eps,
        mu,
        mode.w,
        C64::new(mode.kappa, 0.0),
        C64::new(mode.u, 0.0),
        mode.v,
        "w1",
    )
}

/// Plate 2 moving along +y: material evaluated at the boosted `ζ = omega_scale · κ′`
/// and `w₂ = √(u′² + v² + ε₂μ₂κ′²)`, while the vacuum side keeps the lab-frame `w`.
pub fn fresnel_plate2(mat: &Material, mode: &Mode, omega_scale: f64) -> Result<FresnelSet> {
    let (eps, mu) = mat.eval_response(omega_scale * mode.kappa_p)?;
    fresnel(eps, mu, mode.w, mode.kappa_p, mode.u_p, mode.v, "w2")
}

/// `R₁ = r_E1 n_E1⊗n_E1 + r_B1 R_x n_B1⊗n_B1`.
pub fn operator_r1(f: &FresnelSet, p: &PolarizationBasis) -> Mat3 {
    outer(&p.n_e1, &p.n_e1) * f.r_e + rx() * outer(&p.n_b1, &p.n_b1) * f.r_b
}

/// `R₂ = R_x (r_E2 n_E2⊗n_E2 + r_B2 n_B2⊗n_B2)`.
pub fn operator_r2(f: &FresnelSet, p: &PolarizationBasis) -> Mat3 {
    rx() * (outer(&p.n_e2, &p.n_e2) * f.r_e + outer(&p.n_b2, &p.n_b2) * f.r_b)
}

/// Operators at the inner face of plate 1 seen from inside the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceOperators {
    /// Reflection of a right-moving wave inside the plate.
    pub r_m: Mat3,
    /// Transmission of that wave into the gap.
    pub t_m: Mat3,
    /// Transmission of a left-moving gap wave into the plate.
    pub t_1: Mat3,
    pub r_em: C64,
    pub r_bm: C64,
    pub t_em: C64,
    pub t_bm: C64,
    pub t_e1: C64,
    pub t_b1: C64,
    pub n_em: Vec3,
    pub n_bm_plus: Vec3,
    pub n_bm_minus: Vec3,
    pub fresnel: FresnelSet,
}

pub fn interface_operators_plate1(
    mat: &Material,
    mode: &Mode,
    omega_scale: f64,
) -> Result<InterfaceOperators> {
    let f = fresnel_plate1(mat, mode, omega_scale)?;
    let p = mode.basis()?;
    let (u, v, q) = (mode.u, mode.v, mode.q);
    let n = f.eps * f.mu;
    let norm = mode.kappa * principal_sqrt(n) * q;
    let n_bm_plus = Vec3::new(I * q * q, f.w_med * u, f.w_med * v) / norm;
    let n_bm_minus = Vec3::new(I * q * q, -f.w_med * u, -f.w_med * v) / norm;
    let n_em = p.n_e1;

    let r_em = -f.r_e;
    let r_bm = -f.r_b;
    let t_em = 1.0 - f.r_e;
    let t_bm = principal_sqrt(f.eps / f.mu) * (1.0 + f.r_b);
    let t_e1 = 1.0 + f.r_e;
    let t_b1 = principal_sqrt(f.mu / f.eps) * (1.0 - f.r_b);

    let r_m = outer(&n_em, &n_em) * r_em + outer(&(rx() * n_bm_plus), &n_bm_plus) * r_bm;
    let t_m = outer(&n_em, &n_em) * t_em - outer(&(rx() * p.n_b1), &n_bm_plus) * t_bm;
    let t_1 = outer(&p.n_e1, &p.n_e1) * t_e1 + outer(&n_bm_minus, &p.n_b1) * t_b1;
    Ok(InterfaceOperators {
        r_m,
        t_m,
        t_1,
        r_em,
        r_bm,
        t_em,
        t_bm,
        t_e1,
        t_b1,
        n_em,
        n_bm_plus,
        n_bm_minus,
        fresnel: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, dot, max_abs};
    use crate::materials::Response;
    use proptest::prelude::*;

    const C: f64 = 299_792_458.0;

    fn drude() -> Material {
        Material::dielectric(Response::Drude {
            omega_p: 1.37e16,
            gamma: 5.32e13,
        })
    }

    #[test]
    fn vacuum_plates_do_not_reflect() {
        let m = Mode::new(1e7, 3e6, -2e6, 0.7).unwrap();
        for f in [
            fresnel_plate1(&Material::VACUUM, &m, C).unwrap(),
            fresnel_plate2(&Material::VACUUM, &m, C).unwrap(),
        ] {
            assert!(f.r_e.norm() < 1e-15 && f.r_b.norm() < 1e-15);
        }
        let p = m.basis().unwrap();
        let f = fresnel_plate2(&Material::VACUUM, &m, C).unwrap();
        assert!(max_abs(&operator_r2(&f, &p)) < 1e-14);
    }

    #[test]
    fn mirror_limit() {
        let m = Mode::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let f = fresnel_plate1(&Material::constant(1e8), &m, 1.0).unwrap();
        assert!((f.r_e + 1.0).norm() < 1e-3);
        assert!((f.r_b + 1.0).norm() < 1e-3);
    }

    #[test]
    fn static_plate2_equals_plate1() {
        let m = Mode::new(2e7, -1e7, 5e6, 0.0).unwrap();
        let a = fresnel_plate1(&drude(), &m, C).unwrap();
        let b = fresnel_plate2(&drude(), &m, C).unwrap();
        assert!((a.r_e - b.r_e).norm() < 1e-15);
        assert!((a.r_b - b.r_b).norm() < 1e-15);
    }

    #[test]
    fn rx_literal() {
        assert_eq!(rx(), Mat3::from_diagonal(&Vec3::new(c(-1.0), c(1.0), c(1.0))));
    }

    #[test]
    fn static_r2_is_r1_with_w_flipped() {
        let m = Mode::new(0.8, 0.3, -1.1, 0.0).unwrap();
        let mat = Material::constant(3.0);
        let p = m.basis().unwrap();
        let r1 = operator_r1(&fresnel_plate1(&mat, &m, 1.0).unwrap(), &p);
        let r2 = operator_r2(&fresnel_plate2(&mat, &m, 1.0).unwrap(), &p);
        // flipping w maps n_B1 to -R_x n_B1 and leaves n_E1 alone, so R₂ = R_x R₁ R_x
        assert!(max_abs(&(r2 - rx() * r1 * rx())) < 1e-14);
    }

    #[test]
    fn mirror_r1_preserves_norm_of_left_moving_waves() {
        let m = Mode::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let p = m.basis().unwrap();
        let f = FresnelSet {
            r_e: c(-1.0),
            r_b: c(-1.0),
            w_med: c(1e8),
            eps: c(1e16),
            mu: c(1.0),
        };
        let r1 = operator_r1(&f, &p);
        assert!(max_abs(&(r1 + outer(&p.n_e1, &p.n_e1) + rx() * outer(&p.n_b1, &p.n_b1))) < 1e-15);
        for (ae, ab) in [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8)] {
            let incident = p.n_e1 * c(ae) + p.n_b1 * c(ab);
            let out = r1 * incident;
            assert!((dot(&out, &out) - dot(&incident, &incident)).norm() < 1e-14);
        }
    }

    #[test]
    fn transparent_interface() {
        let m = Mode::new(1.3, 0.4, 0.9, 0.0).unwrap();
        let ops = interface_operators_plate1(&Material::VACUUM, &m, 1.0).unwrap();
        let p = m.basis().unwrap();
        assert!(max_abs(&ops.r_m) < 1e-15);
        for n in [p.n_e1, p.n_b1] {
            assert!((ops.t_1 * n - n).norm() < 1e-14);
        }
        let right = [ops.n_em, ops.n_bm_plus];
        let gap_right = [p.n_e1, -(rx() * p.n_b1)];
        for (n, expect) in right.iter().zip(gap_right) {
            assert!((ops.t_m * n - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn interface_scalars_match_closed_forms() {
        let m = Mode::new(0.6, -0.7, 0.2, 0.0).unwrap();
        let mat = Material {
            electric: Response::Constant { value: 2.0 },
            magnetic: Response::Constant { value: 1.5 },
        };
        let ops = interface_operators_plate1(&mat, &m, 1.0).unwrap();
        let f = ops.fresnel;
        let (w, w1, e, mu) = (c(m.w), f.w_med, f.eps, f.mu);
        let close = |a: C64, b: C64| (a - b).norm() < 1e-14;
        assert!(close(ops.r_em, (w1 - mu * w) / (w1 + mu * w)));
        assert!(close(ops.r_bm, -(w1 - e * w) / (w1 + e * w)));
        assert!(close(ops.t_em, 2.0 * w1 / (w1 + mu * w)));
        assert!(close(ops.t_bm, 2.0 * (e * mu).sqrt() * w1 / (mu * w1 + e * mu * w)));
        assert!(close(ops.t_e1, 2.0 * mu * w / (w1 + mu * w)));
        assert!(close(ops.t_b1, 2.0 * (e * mu).sqrt() * w / (w1 + e * w)));
        assert!(close(ops.t_e1 - ops.t_em, 2.0 * f.r_e));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn passive_static_coefficients_bounded(
            k in 1e-3f64..1e2, u in -1e2f64..1e2, v in -1e2f64..1e2,
            eps in 1.0f64..1e6, mu in 1.0f64..1e2,
        ) {
            let m = Mode::new(k, u, v, 0.0).unwrap();
            let mat = Material {
                electric: Response::Constant { value: eps },
                magnetic: Response::Constant { value: mu },
            };
            let f = fresnel_plate1(&mat, &m, 1.0).unwrap();
            prop_assert!(f.r_e.im == 0.0 && f.r_b.im == 0.0);
            prop_assert!(f.r_e.norm() <= 1.0 && f.r_b.norm() <= 1.0);
            prop_assert!(f.w_med.re > 0.0);
        }

        #[test]
        fn boosted_branch_stays_decaying(
            k in 1e-2f64..50.0, u in -50.0f64..50.0, v in -50.0f64..50.0, beta in 0.0f64..0.99,
        ) {
            let m = Mode::new(k, u, v, beta).unwrap();
            for mat in [drude(), Material::dielectric(Response::Plasma { omega_p: 1.37e16 }), Material::constant(2.0)] {
                let f = fresnel_plate2(&mat, &m, C / 1e-7).unwrap();
                prop_assert!(f.w_med.re > 0.0);
            }
        }
    }
}
