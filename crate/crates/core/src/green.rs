//! Fourier-space Green tensor for the vector potential, between the plates
//! (`0 < x, x′ < a`) and inside plate 1 (`x, x′ < 0`).
//!
//! Transverse dependence is `e^{iu(y−y′) + iv(z−z′)}`, so `∂_y → iu` acts on the
//! first index and `∂_{y′} → −iu` on the second. Every reflected contribution is
//! a [`WaveTerm`]: an exponential in `x` and `x′` times a constant matrix.

use nalgebra::LU;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, outer, rx, Mat3, Vec3, C64, I};
use crate::materials::Material;
use crate::modes::{Mode, PolarizationBasis};
use crate::reflection::{
    fresnel_plate1, fresnel_plate2, interface_operators_plate1, operator_r1, operator_r2,
    FresnelSet, InterfaceOperators, POLE_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenBlock {
    pub matrix: Mat3,
    pub x: f64,
    pub x_p: f64,
    pub mode: Mode,
    /// Bare (plate-free) part subtracted.
    pub regularized: bool,
}

/// `exp(kx·x + kxp·x′ + offset) · k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveTerm {
    pub kx: C64,
    pub kxp: C64,
    pub offset: C64,
    pub k: Mat3,
}

impl WaveTerm {
    #[inline]
    pub fn factor(&self, x: f64, x_p: f64) -> C64 {
        (self.kx * x + self.kxp * x_p + self.offset).exp()
    }

    #[inline]
    pub fn eval(&self, x: f64, x_p: f64) -> Mat3 {
        self.k * self.factor(x, x_p)
    }
}

/// A reflected term written in polarization bases:
/// `exp(kx·x + kxp·x′ + offset) · pref · Σ_ab coef[a][b] left[a] ⊗ right[b]`.
///
/// `left_curl[a] = (kx, iu, iv) × left[a]` and `right_curl[b] = (kxp, −iu, −iv) × right[b]`
/// are stored in closed form (each is `±κ√(εμ)` times the partner vector), which avoids
/// the cancellation of the explicit cross products when `κ ≪ √(u² + v²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarTerm {
    pub kx: C64,
    pub kxp: C64,
    pub offset: C64,
    pub pref: C64,
    pub coef: [[C64; 2]; 2],
    pub left: [Vec3; 2],
    pub right: [Vec3; 2],
    pub left_curl: [Vec3; 2],
    pub right_curl: [Vec3; 2],
}

impl PolarTerm {
    #[inline]
    pub fn factor(&self, x: f64, x_p: f64) -> C64 {
        (self.kx * x + self.kxp * x_p + self.offset).exp()
    }

    fn combine(&self, l: &[Vec3; 2], r: &[Vec3; 2]) -> Mat3 {
        let mut m = Mat3::zeros();
        for a in 0..2 {
            for b in 0..2 {
                if self.coef[a][b] != C64::new(0.0, 0.0) {
                    m += outer(&l[a], &r[b]) * self.coef[a][b];
                }
            }
        }
        m * self.pref
    }

    /// Constant matrix of the term.
    pub fn matrix(&self) -> Mat3 {
        self.combine(&self.left, &self.right)
    }

    /// Constant matrix of `∇ × term × ∇′`.
    pub fn curl_matrix(&self) -> Mat3 {
        self.combine(&self.left_curl, &self.right_curl)
    }

    pub fn to_wave_term(&self) -> WaveTerm {
        WaveTerm {
            kx: self.kx,
            kxp: self.kxp,
            offset: self.offset,
            k: self.matrix(),
        }
    }
}

fn mat2_mul(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

fn diag2(a: C64, b: C64) -> [[C64; 2]; 2] {
    [[a, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), b]]
}

pub fn sum_terms(terms: &[WaveTerm], x: f64, x_p: f64) -> Mat3 {
    terms.iter().fold(Mat3::zeros(), |acc, t| acc + t.eval(x, x_p))
}

/// `𝒢±` for vacuum: `−[d⊗d − κ²𝟙]/(2wκ²)` with `d = (∓w, iu, iv)`, the gradient of
/// `e^{∓wx}` in Fourier space. `sign = +1` is the wave decaying to the right.
pub fn bare_factor(mode: &Mode, sign: f64) -> Mat3 {
    medium_bare_factor(mode, C64::new(mode.w, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), sign)
}

/// In-medium `𝒢m±`: `−[d⊗d − εμκ²𝟙]/(2εw_mκ²)` with `d = (∓w_m, iu, iv)`.
pub fn medium_bare_factor(mode: &Mode, w_m: C64, eps: C64, mu: C64, sign: f64) -> Mat3 {
    let k2 = mode.kappa * mode.kappa;
    let d = Vec3::new(-sign * w_m, I * mode.u, I * mode.v);
    let mass = Mat3::identity() * (eps * mu * k2);
    (outer(&d, &d) - mass) * (-1.0 / (2.0 * eps * w_m * k2))
}

/// Plate-free Green tensor, `x ≠ x′`.
pub fn bare_green(x: f64, x_p: f64, mode: &Mode) -> Result<GreenBlock> {
    if x == x_p {
        return Err(Error::CoincidenceUnregularized);
    }
    let s = (x - x_p).signum();
    let matrix = bare_factor(mode, s) * C64::new((-s * mode.w * (x - x_p)).exp(), 0.0);
    Ok(GreenBlock {
        matrix,
        x,
        x_p,
        mode: *mode,
        regularized: false,
    })
}

/// Per-mode cavity data: materials evaluated, Fresnel sets and reflection operators built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity {
    pub mode: Mode,
    pub a: f64,
    pub basis: PolarizationBasis,
    pub f1: FresnelSet,
    pub f2: FresnelSet,
    pub r1: Mat3,
    pub r2: Mat3,
}

impl Cavity {
    pub fn new(
        mode: &Mode,
        plate1: &Material,
        plate2: &Material,
        a: f64,
        omega_scale: f64,
    ) -> Result<Cavity> {
        let basis = mode.basis()?;
        let f1 = fresnel_plate1(plate1, mode, omega_scale)?;
        let f2 = fresnel_plate2(plate2, mode, omega_scale)?;
        Ok(Cavity::from_fresnel(mode, basis, f1, f2, a))
    }

    pub fn from_fresnel(
        mode: &Mode,
        basis: PolarizationBasis,
        f1: FresnelSet,
        f2: FresnelSet,
        a: f64,
    ) -> Cavity {
        Cavity {
            mode: *mode,
            a,
            r1: operator_r1(&f1, &basis),
            r2: operator_r2(&f2, &basis),
            basis,
            f1,
            f2,
        }
    }

    /// `e^{−2wa}`
    pub fn round_trip(&self) -> f64 {
        (-2.0 * self.mode.w * self.a).exp()
    }

    /// `(𝟙 − e^{−2wa} R₁R₂)⁻¹` and `(𝟙 − e^{−2wa} R₂R₁)⁻¹`.
    pub fn inverses(&self) -> Result<(Mat3, Mat3)> {
        let e = self.round_trip();
        let fail = || Error::InversionFailure {
            kappa: self.mode.kappa,
            u: self.mode.u,
            v: self.mode.v,
        };
        let invert = |m: Mat3| -> Result<Mat3> {
            let lu = LU::new(m);
            let u = lu.u();
            let pivot = (0..3).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
            if !(pivot > 1e-13 * max_abs(&m)) {
                return Err(fail());
            }
            lu.try_inverse().ok_or_else(fail)
        };
        let id = Mat3::identity();
        Ok((
            invert(id - self.r1 * self.r2 * C64::new(e, 0.0))?,
            invert(id - self.r2 * self.r1 * C64::new(e, 0.0))?,
        ))
    }

    /// Reflected part of the gap Green tensor in the direct resummed form.
    pub fn direct_terms(&self) -> Result<[WaveTerm; 4]> {
        let (i12, i21) = self.inverses()?;
        let e = C64::new(self.round_trip(), 0.0);
        // (𝟙 − X)⁻¹ − 𝟙 = (𝟙 − X)⁻¹X
        let m2 = i12 * self.r1 * self.r2 * e;
        let m1 = i21 * self.r2 * self.r1 * e;
        Ok(self.assemble(m2, m1, i12 * self.r1, i21 * self.r2))
    }

    /// Reflected part of the gap Green tensor built from the expansion coefficients.
    pub fn expanded_terms(&self) -> Result<[WaveTerm; 4]> {
        let ec = self.expansion_coefficients()?;
        let ops = ec.operators(&self.basis);
        Ok(self.assemble(ops.m2, ops.m1, rx() * ops.n1, rx() * ops.n2))
    }

    /// `[e^{−w(x−x′)}M₂ + e^{w(x+x′−2a)}R_xN₂]𝒢₊ + [e^{w(x−x′)}M₁ + e^{−w(x+x′)}R_xN₁]𝒢₋`.
    ///
    /// `M₂, R_xN₂` end in `R₂`, whose right vectors are transverse to `(−w, iu, iv)`, and
    /// `M₁, R_xN₁` end in `R₁`, transverse to `(w, iu, iv)`; the `d⊗d/κ²` part of `𝒢±`
    /// is annihilated and each product reduces to `·/(2w)`. Multiplying by the full `𝒢±`
    /// instead loses digits like `(w/κ)²` at small `κ`.
    fn assemble(&self, m2: Mat3, m1: Mat3, rxn1: Mat3, rxn2: Mat3) -> [WaveTerm; 4] {
        let w = C64::new(self.mode.w, 0.0);
        let zero = C64::new(0.0, 0.0);
        let gp = C64::new(0.5 / self.mode.w, 0.0);
        let gm = gp;
        [
            WaveTerm { kx: -w, kxp: w, offset: zero, k: m2 * gp },
            WaveTerm { kx: w, kxp: w, offset: -2.0 * w * self.a, k: rxn2 * gp },
            WaveTerm { kx: w, kxp: -w, offset: zero, k: m1 * gm },
            WaveTerm { kx: -w, kxp: -w, offset: zero, k: rxn1 * gm },
        ]
    }

    /// The expanded reflected terms in polarization form. Each bare factor reduces to
    /// `𝒢± → 1/(2w)` because the right-hand polarization vectors are transverse to the
    /// wave vector of `𝒢±`.
    pub fn polar_terms(&self) -> Result<[PolarTerm; 4]> {
        let ec = self.expansion_coefficients()?;
        let b = &self.basis;
        let k = C64::new(self.mode.kappa, 0.0);
        let w = C64::new(self.mode.w, 0.0);
        let zero = C64::new(0.0, 0.0);
        let pref = C64::new(0.5 / self.mode.w, 0.0);
        let r = rx();
        let (e1, b1, e2, b2) = (b.n_e1, b.n_b1, b.n_e2, b.n_b2);
        let (rxe1, rxb1, rxe2, rxb2) = (r * e1, r * b1, r * e2, r * b2);
        let term = |kx: C64, kxp: C64, offset: C64, coef, left, right, left_curl, right_curl| PolarTerm {
            kx,
            kxp,
            offset,
            pref,
            coef,
            left,
            right,
            left_curl,
            right_curl,
        };
        Ok([
            // e^{−w(x−x′)} M₂
            term(
                -w,
                w,
                zero,
                [[ec.c2_ee, ec.c2_eb], [ec.c2_be, ec.c2_bb]],
                [e2, b2],
                [e2, b2],
                [b2 * k, e2 * -k],
                [b2 * -k, e2 * k],
            ),
            // e^{w(x+x′−2a)} R_x N₂
            term(
                w,
                w,
                -2.0 * w * self.a,
                [[ec.d2_ee, ec.d2_eb], [ec.d2_be, ec.d2_bb]],
                [rxe2, rxb2],
                [e2, b2],
                [rxb2 * -k, rxe2 * k],
                [b2 * -k, e2 * k],
            ),
            // e^{w(x−x′)} M₁
            term(
                w,
                -w,
                zero,
                [[ec.c1_ee, ec.c1_eb], [ec.c1_be, ec.c1_bb]],
                [e1, b1],
                [e1, b1],
                [b1 * k, e1 * -k],
                [b1 * -k, e1 * k],
            ),
            // e^{−w(x+x′)} R_x N₁
            term(
                -w,
                -w,
                zero,
                [[ec.d1_ee, ec.d1_eb], [ec.d1_be, ec.d1_bb]],
                [rxe1, rxb1],
                [e1, b1],
                [rxb1 * -k, rxe1 * k],
                [b1 * -k, e1 * k],
            ),
        ])
    }

    pub fn expansion_coefficients(&self) -> Result<ExpansionCoefficients> {
        ExpansionCoefficients::new(&self.f1, &self.f2, &self.basis, self.round_trip())
    }

    fn block(&self, matrix: Mat3, x: f64, x_p: f64, regularized: bool) -> Result<GreenBlock> {
        let matrix = if regularized {
            matrix
        } else {
            matrix + bare_green(x, x_p, &self.mode)?.matrix
        };
        Ok(GreenBlock {
            matrix,
            x,
            x_p,
            mode: self.mode,
            regularized,
        })
    }

    pub fn green_direct(&self, x: f64, x_p: f64, regularized: bool) -> Result<GreenBlock> {
        self.block(sum_terms(&self.direct_terms()?, x, x_p), x, x_p, regularized)
    }

    pub fn green_expanded(&self, x: f64, x_p: f64, regularized: bool) -> Result<GreenBlock> {
        self.block(sum_terms(&self.expanded_terms()?, x, x_p), x, x_p, regularized)
    }
}

/// Coefficients of the closed-form inverses, stored in scaled form so that large
/// `wa` never overflows: with `E = e^{−2wa}` every coefficient is a ratio of
/// polynomials in `E` with the common denominator
/// `1 + r_E1 r_B1 r_E2 r_B2 E² − E[λ²(r_E1 r_E2 + r_B1 r_B2) + ν²(r_E2 r_B1 + r_E1 r_B2)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    pub alpha: C64,
    pub lambda: C64,
    pub nu: C64,
    pub c2_ee: C64,
    pub c2_bb: C64,
    pub c2_eb: C64,
    pub c2_be: C64,
    pub c1_ee: C64,
    pub c1_bb: C64,
    pub c1_eb: C64,
    pub c1_be: C64,
    pub d1_ee: C64,
    pub d1_bb: C64,
    pub d1_eb: C64,
    pub d1_be: C64,
    pub d2_ee: C64,
    pub d2_bb: C64,
    pub d2_eb: C64,
    pub d2_be: C64,
}

/// `M₁, M₂, N₁, N₂` with `𝟙 + M₂ = (𝟙 − E R₁R₂)⁻¹`, `𝟙 + M₁ = (𝟙 − E R₂R₁)⁻¹`,
/// `R_x N₁ = (𝟙 − E R₁R₂)⁻¹R₁`, `R_x N₂ = (𝟙 − E R₂R₁)⁻¹R₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandedOperators {
    pub m1: Mat3,
    pub m2: Mat3,
    pub n1: Mat3,
    pub n2: Mat3,
}

impl ExpansionCoefficients {
    pub fn new(
        f1: &FresnelSet,
        f2: &FresnelSet,
        basis: &PolarizationBasis,
        e: f64,
    ) -> Result<ExpansionCoefficients> {
        let (re1, rb1, re2, rb2) = (f1.r_e, f1.r_b, f2.r_e, f2.r_b);
        let (lam, nu) = (basis.lambda, basis.nu);
        let (l2, n2, ln) = (lam * lam, nu * nu, lam * nu);
        let p = re1 * rb1 * re2 * rb2;
        let e2 = e * e;
        let mixed = l2 * (re1 * re2 + rb1 * rb2) + n2 * (re2 * rb1 + re1 * rb2);
        let den = 1.0 + p * e2 - mixed * e;
        let scale = 1.0 + p.norm() * e2 + (l2.norm() * (re1 * re2).norm()
            + l2.norm() * (rb1 * rb2).norm()
            + n2.norm() * (re2 * rb1).norm()
            + n2.norm() * (re1 * rb2).norm())
            * e;
        let relative = den.norm() / scale;
        if !(relative >= POLE_TOLERANCE) {
            return Err(Error::PoleProximity {
                context: "round-trip denominator",
                relative,
            });
        }
        let inv = 1.0 / den;
        let d1x = e * re1 * rb1 * (re2 - rb2) * ln * inv;
        let d2x = e * re2 * rb2 * (re1 - rb1) * ln * inv;
        Ok(ExpansionCoefficients {
            alpha: e2 * inv,
            lambda: lam,
            nu,
            c2_ee: re2 * (e * (re1 * l2 + rb1 * n2) - re1 * rb1 * rb2 * e2) * inv,
            c2_bb: rb2 * (e * (rb1 * l2 + re1 * n2) - re1 * re2 * rb1 * e2) * inv,
            c2_eb: e * rb2 * (re1 - rb1) * ln * inv,
            c2_be: e * re2 * (re1 - rb1) * ln * inv,
            c1_ee: re1 * (e * (re2 * l2 + rb2 * n2) - re2 * rb1 * rb2 * e2) * inv,
            c1_bb: rb1 * (e * (rb2 * l2 + re2 * n2) - re1 * re2 * rb2 * e2) * inv,
            c1_eb: e * rb1 * (re2 - rb2) * ln * inv,
            c1_be: e * re1 * (re2 - rb2) * ln * inv,
            d1_ee: re1 * (1.0 - e * rb1 * (rb2 * l2 + re2 * n2)) * inv,
            d1_bb: rb1 * (1.0 - e * re1 * (re2 * l2 + rb2 * n2)) * inv,
            d1_eb: d1x,
            d1_be: d1x,
            d2_ee: re2 * (1.0 - e * rb2 * (rb1 * l2 + re1 * n2)) * inv,
            d2_bb: rb2 * (1.0 - e * re2 * (re1 * l2 + rb1 * n2)) * inv,
            d2_eb: d2x,
            d2_be: d2x,
        })
    }

    pub fn operators(&self, b: &PolarizationBasis) -> ExpandedOperators {
        let o = outer;
        let (e1, b1, e2, b2) = (&b.n_e1, &b.n_b1, &b.n_e2, &b.n_b2);
        ExpandedOperators {
            m2: o(e2, e2) * self.c2_ee
                + o(b2, b2) * self.c2_bb
                + o(e2, b2) * self.c2_eb
                + o(b2, e2) * self.c2_be,
            m1: o(e1, e1) * self.c1_ee
                + o(b1, b1) * self.c1_bb
                + o(e1, b1) * self.c1_eb
                + o(b1, e1) * self.c1_be,
            n1: o(e1, e1) * self.d1_ee
                + o(b1, b1) * self.d1_bb
                + o(e1, b1) * self.d1_eb
                + o(b1, e1) * self.d1_be,
            n2: o(e2, e2) * self.d2_ee
                + o(b2, b2) * self.d2_bb
                + o(e2, b2) * self.d2_eb
                + o(b2, e2) * self.d2_be,
        }
    }
}

/// `G^S_ij = (G_ij(x, x′) + G_ji(x′, x))/2`.
pub fn symmetrize(g: &GreenBlock, g_t: &GreenBlock) -> Result<GreenBlock> {
    if g.mode != g_t.mode || g.x != g_t.x_p || g.x_p != g_t.x || g.regularized != g_t.regularized {
        return Err(Error::MismatchedMode);
    }
    Ok(GreenBlock {
        matrix: (g.matrix + g_t.matrix.transpose()) * C64::new(0.5, 0.0),
        ..*g
    })
}

/// Green tensor with both points inside plate 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InPlate {
    pub cavity: Cavity,
    pub interface: InterfaceOperators,
    /// `e^{w₁(x+x′)}[R_m + e^{−2wa} T₁ R_x N₂ T_m] 𝒢m₊`
    pub reflected: WaveTerm,
    /// The same term in the bases `{n_Em, n⁻_Bm}` (left) and `{n_Em, n⁺_Bm}` (right).
    pub polar: PolarTerm,
}

impl InPlate {
    pub fn new(
        mode: &Mode,
        plate1: &Material,
        plate2: &Material,
        a: f64,
        omega_scale: f64,
    ) -> Result<InPlate> {
        let cavity = Cavity::new(mode, plate1, plate2, a, omega_scale)?;
        let interface = interface_operators_plate1(plate1, mode, omega_scale)?;
        let ops = cavity.expansion_coefficients()?.operators(&cavity.basis);
        let f = &interface.fresnel;
        let gmp = medium_bare_factor(mode, f.w_med, f.eps, f.mu, 1.0);
        let e = C64::new(cavity.round_trip(), 0.0);
        let k = (interface.r_m + interface.t_1 * rx() * ops.n2 * interface.t_m * e) * gmp;

        // Gap vectors in the static bases: R_x n_E2 = λ n_E1 + ν n_B1,
        // R_x n_B2 = ν n_E1 − λ n_B1, so R_x N₂ maps {n_E1, R_x n_B1} to {n_E1, n_B1}
        // with coefficients Uᵀ D₂ U, U = [[λ, ν], [ν, −λ]].
        let ec = cavity.expansion_coefficients()?;
        let (lam, nu) = (ec.lambda, ec.nu);
        let u = [[lam, nu], [nu, -lam]];
        let d2 = [[ec.d2_ee, ec.d2_eb], [ec.d2_be, ec.d2_bb]];
        let rxn2 = mat2_mul(&u, &mat2_mul(&d2, &u));
        let i = &interface;
        let through = mat2_mul(
            &diag2(i.t_e1, i.t_b1),
            &mat2_mul(&rxn2, &diag2(i.t_em, -i.t_bm)),
        );
        let mut coef = diag2(i.r_em, -i.r_bm);
        for a in 0..2 {
            for b in 0..2 {
                coef[a][b] += e * through[a][b];
            }
        }
        let ks = mode.kappa * crate::linalg::principal_sqrt(f.eps * f.mu);
        let (ne, nbm, nbp) = (i.n_em, i.n_bm_minus, i.n_bm_plus);
        let polar = PolarTerm {
            kx: f.w_med,
            kxp: f.w_med,
            offset: C64::new(0.0, 0.0),
            pref: f.mu / (2.0 * f.w_med),
            coef,
            left: [ne, nbm],
            right: [ne, nbp],
            left_curl: [nbm * ks, ne * -ks],
            right_curl: [nbp * -ks, ne * ks],
        };
        Ok(InPlate {
            cavity,
            interface,
            reflected: WaveTerm {
                kx: f.w_med,
                kxp: f.w_med,
                offset: C64::new(0.0, 0.0),
                k,
            },
            polar,
        })
    }

    pub fn bare(&self, x: f64, x_p: f64) -> Result<Mat3> {
        if x == x_p {
            return Err(Error::CoincidenceUnregularized);
        }
        let f = &self.interface.fresnel;
        let s = (x - x_p).signum();
        Ok(medium_bare_factor(&self.cavity.mode, f.w_med, f.eps, f.mu, s) * (-s * f.w_med * (x - x_p)).exp())
    }

    pub fn green(&self, x: f64, x_p: f64, regularized: bool) -> Result<GreenBlock> {
        if !(x < 0.0 && x_p < 0.0) {
            return Err(Error::InvalidMode(format!("in-plate points must be negative, got x = {x}, x' = {x_p}")));
        }
        let mut matrix = self.reflected.eval(x, x_p);
        if !regularized {
            matrix += self.bare(x, x_p)?;
        }
        Ok(GreenBlock {
            matrix,
            x,
            x_p,
            mode: self.cavity.mode,
            regularized,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, rel_deviation};
    use crate::materials::Response;

    fn drude() -> Material {
        Material::dielectric(Response::Drude {
            omega_p: 1.37e16,
            gamma: 5.32e13,
        })
    }

    const SCALE: f64 = 299_792_458.0 / 1e-7;

    #[test]
    fn bare_factor_small_transverse_limit() {
        let m = Mode::new(1.0, 1e-9, 0.0, 0.0).unwrap();
        let g = bare_factor(&m, 1.0);
        let expect = Mat3::from_diagonal(&Vec3::new(c(0.0), c(0.5), c(0.5)));
        // off-diagonal xy entry is w·u/2
        assert!(max_abs(&(g - expect)) < 1e-9);
    }

    #[test]
    fn bare_factor_sign_structure() {
        let m = Mode::new(0.8, 0.3, -0.5, 0.0).unwrap();
        let (gp, gm) = (bare_factor(&m, 1.0), bare_factor(&m, -1.0));
        for i in 0..3 {
            for j in 0..3 {
                let flip = if (i == 0) != (j == 0) { -1.0 } else { 1.0 };
                assert!((gm[(i, j)] - gp[(i, j)] * flip).norm() < 1e-15);
            }
        }
        assert!(bare_green(0.3, 0.3, &m).is_err());
        let below = bare_green(0.2, 0.5, &m).unwrap().matrix;
        assert!(max_abs(&(below - gm * C64::new((-0.3 * m.w).exp(), 0.0))) < 1e-15);
    }

    #[test]
    fn vacuum_plates_have_no_reflected_part() {
        let m = Mode::new(0.9, -0.4, 0.7, 0.5).unwrap();
        let cav = Cavity::new(&m, &Material::VACUUM, &Material::VACUUM, 1.0, 1.0).unwrap();
        let g = cav.green_direct(0.3, 0.6, false).unwrap();
        let b = bare_green(0.3, 0.6, &m).unwrap();
        assert!(rel_deviation(&g.matrix, &b.matrix) < 1e-15);
        let ec = cav.expansion_coefficients().unwrap();
        assert!((ec.alpha - (-4.0 * m.w).exp()).norm() < 1e-18);
        for z in [ec.c1_ee, ec.c2_bb, ec.c1_be, ec.d1_ee, ec.d2_bb, ec.d2_eb] {
            assert_eq!(z, c(0.0));
        }
        let e = cav.green_expanded(0.3, 0.6, true).unwrap();
        assert_eq!(max_abs(&e.matrix), 0.0);
    }

    #[test]
    fn static_cross_channels_vanish() {
        let m = Mode::new(0.9, -0.4, 0.7, 0.0).unwrap();
        let cav = Cavity::new(&m, &Material::constant(2.0), &drude(), 1e-7, 299_792_458.0).unwrap();
        let ec = cav.expansion_coefficients().unwrap();
        assert_eq!((ec.c2_eb, ec.c2_be, ec.d1_eb, ec.d2_be), (c(0.0), c(0.0), c(0.0), c(0.0)));
    }

    #[test]
    fn reconstruction_identity() {
        for (k, u, v, b) in [(0.7, 0.4, 0.3, 0.6), (1.1, -0.5, 0.8, 0.9), (0.2, 1.5, -0.1, 0.3)] {
            let m = Mode::new(k, u, v, b).unwrap();
            let cav = Cavity::new(&m, &Material::constant(2.5), &drude(), 0.8, SCALE).unwrap();
            let (i12, i21) = cav.inverses().unwrap();
            let ops = cav.expansion_coefficients().unwrap().operators(&cav.basis);
            let id = Mat3::identity();
            let e = C64::new(cav.round_trip(), 0.0);
            assert!(max_abs(&((id + ops.m2) * (id - cav.r1 * cav.r2 * e) - id)) < 1e-12);
            assert!(rel_deviation(&(id + ops.m1), &i21) < 1e-12);
            assert!(rel_deviation(&(rx() * ops.n1), &(i12 * cav.r1)) < 1e-12);
            assert!(rel_deviation(&(rx() * ops.n2), &(i21 * cav.r2)) < 1e-12);
        }
    }

    fn cross_curls(t: &WaveTerm, m: &Mode) -> Mat3 {
        use crate::linalg::cross_matrix;
        let d = Vec3::new(t.kx, I * m.u, I * m.v);
        let dp = Vec3::new(t.kxp, -I * m.u, -I * m.v);
        cross_matrix(&d) * t.k * cross_matrix(&dp).transpose()
    }

    #[test]
    fn polar_terms_match_matrix_terms() {
        for (k, u, v, b) in [(0.7, 0.4, 0.3, 0.6), (1.1, -0.5, 0.8, 0.0), (0.3, 1.5, -0.1, 0.9)] {
            let m = Mode::new(k, u, v, b).unwrap();
            let cav = Cavity::new(&m, &Material::constant(2.5), &drude(), 0.8, SCALE).unwrap();
            let plain = cav.expanded_terms().unwrap();
            let polar = cav.polar_terms().unwrap();
            for (p, t) in polar.iter().zip(plain.iter()) {
                assert_eq!((p.kx, p.kxp, p.offset), (t.kx, t.kxp, t.offset));
                assert!(rel_deviation(&p.matrix(), &t.k) < 1e-12);
                assert!(rel_deviation(&p.curl_matrix(), &cross_curls(t, &m)) < 1e-11);
            }
            let ip = InPlate::new(&m, &Material::constant(2.5), &drude(), 0.8, SCALE).unwrap();
            assert!(rel_deviation(&ip.polar.matrix(), &ip.reflected.k) < 1e-12);
            assert!(rel_deviation(&ip.polar.curl_matrix(), &cross_curls(&ip.reflected, &m)) < 1e-11);
        }
    }

    #[test]
    fn symmetrize_rules() {
        let m = Mode::new(0.9, -0.4, 0.7, 0.5).unwrap();
        let cav = Cavity::new(&m, &Material::constant(3.0), &drude(), 1.0, SCALE).unwrap();
        let g = cav.green_direct(0.2, 0.7, true).unwrap();
        let gt = cav.green_direct(0.7, 0.2, true).unwrap();
        let s = symmetrize(&g, &gt).unwrap();
        assert!(max_abs(&(s.matrix * C64::new(2.0, 0.0) - g.matrix - gt.matrix.transpose())) < 1e-15);
        let again = symmetrize(&s, &GreenBlock { x: s.x_p, x_p: s.x, matrix: s.matrix.transpose(), ..s }).unwrap();
        assert!(max_abs(&(again.matrix - s.matrix)) < 1e-16);
        assert_eq!(symmetrize(&g, &g), Err(Error::MismatchedMode));
        let other = Cavity::new(&m.reflected(-1.0, 1.0), &Material::constant(3.0), &drude(), 1.0, SCALE).unwrap();
        assert_eq!(symmetrize(&g, &other.green_direct(0.7, 0.2, true).unwrap()), Err(Error::MismatchedMode));
        let coincident = bare_factor(&m, 1.0);
        assert!(max_abs(&(coincident - coincident.transpose())) < 1e-16);
    }

    #[test]
    fn in_plate_transparent_limits() {
        let m = Mode::new(0.9, -0.4, 0.7, 0.3).unwrap();
        let vac = InPlate::new(&m, &Material::VACUUM, &Material::VACUUM, 1.0, 1.0).unwrap();
        assert!(max_abs(&vac.reflected.k) < 1e-15);
        let g = vac.green(-0.5, -0.2, false).unwrap();
        assert!(rel_deviation(&g.matrix, &bare_green(-0.5, -0.2, &m).unwrap().matrix) < 1e-15);

        // transparent plate 1 in front of a mirror: the in-plate tensor is the gap tensor
        let mirror = Material::constant(1e8);
        let ip = InPlate::new(&m, &Material::VACUUM, &mirror, 1.0, 1.0).unwrap();
        let cav = Cavity::new(&m, &Material::VACUUM, &mirror, 1.0, 1.0).unwrap();
        let a = ip.green(-0.5, -0.2, true).unwrap().matrix;
        let b = cav.green_direct(-0.5, -0.2, true).unwrap().matrix;
        assert!(rel_deviation(&a, &b) < 1e-12);
    }
}
