//! Stress tensor and perpendicular force.
//!
//! Integrals are done in units of the separation: `(κ, u, v) → (κ, u, v)/a`, so every
//! result is `ħc/(4π³a⁴)` times a dimensionless integral of a per-mode density.
//! Materials still see physical frequencies through `ζ = (c/a)·κ`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::{Cavity, InPlate, PolarTerm, WaveTerm};
use crate::linalg::{cross_matrix, Mat3, Vec3, C64, I};
use crate::materials::Material;
use crate::modes::Mode;
use crate::quadrature::{integrate_adaptive, Grid, Integrand, QuadResult, QuadSpec};
use crate::reflection::{fresnel_plate1, fresnel_plate2, FresnelSet};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const C_LIGHT: f64 = 299_792_458.0;
pub const EPSILON_0: f64 = 8.854_187_8128e-12;
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Two plates: plate 1 fills `x < 0` at rest, plate 2 fills `x > a` moving along `+y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateSystem {
    pub plate1: Material,
    pub plate2: Material,
    /// Separation [m].
    pub a: f64,
    #[serde(default)]
    pub beta: f64,
}

impl PlateSystem {
    pub fn new(plate1: Material, plate2: Material, a: f64, beta: f64) -> PlateSystem {
        PlateSystem {
            plate1,
            plate2,
            a,
            beta,
        }
    }

    pub fn with_beta(&self, beta: f64) -> PlateSystem {
        PlateSystem { beta, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidModel(format!("separation a = {}", self.a)));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidBeta(self.beta));
        }
        for m in [&self.plate1, &self.plate2] {
            for r in [&m.electric, &m.magnetic] {
                if let Err((field, value)) = r.validate() {
                    return Err(Error::InvalidModel(format!("{field} = {value}")));
                }
            }
        }
        Ok(())
    }

    /// `c/a`: converts the dimensionless `κ` into `ζ` [rad/s].
    pub fn omega_scale(&self) -> f64 {
        C_LIGHT / self.a
    }

    /// `ħc/(4π³a⁴)` [Pa].
    pub fn pressure_unit(&self) -> f64 {
        HBAR * C_LIGHT / (4.0 * std::f64::consts::PI.powi(3) * self.a.powi(4))
    }

    /// `π²ħc/(240a⁴)` [Pa], the ideal-mirror force.
    pub fn mirror_force(&self) -> f64 {
        std::f64::consts::PI.powi(2) * HBAR * C_LIGHT / (240.0 * self.a.powi(4))
    }

    fn mode(&self, kappa: f64, u: f64, v: f64) -> Result<Mode> {
        Mode::new(kappa, u, v, self.beta)
    }

    pub fn fresnel(&self, mode: &Mode) -> Result<(FresnelSet, FresnelSet)> {
        let s = self.omega_scale();
        Ok((
            fresnel_plate1(&self.plate1, mode, s)?,
            fresnel_plate2(&self.plate2, mode, s)?,
        ))
    }

    pub fn cavity(&self, mode: &Mode) -> Result<Cavity> {
        Cavity::new(mode, &self.plate1, &self.plate2, 1.0, self.omega_scale())
    }
}

/// Channel factors in scaled form: `b_XY = 1 − r_X1 r_Y2 e^{−2aw} = e^{−2aw} B_XY`,
/// where `B_XY = e^{2aw} − r_X1 r_Y2 = r_X1 r_Y2 A_XY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelFactors {
    pub b_ee: C64,
    pub b_bb: C64,
    pub b_eb: C64,
    pub b_be: C64,
}

impl ChannelFactors {
    pub fn new(f1: &FresnelSet, f2: &FresnelSet, e: f64) -> ChannelFactors {
        let b = |x: C64, y: C64| 1.0 - x * y * e;
        ChannelFactors {
            b_ee: b(f1.r_e, f2.r_e),
            b_bb: b(f1.r_b, f2.r_b),
            b_eb: b(f1.r_e, f2.r_b),
            b_be: b(f1.r_b, f2.r_e),
        }
    }
}

/// `A_XY = e^{2aw}/(r_X1 r_Y2) − 1`, in the order `[EE, BB, EB, BE]`.
pub fn a_quantities(f1: &FresnelSet, f2: &FresnelSet, w: f64, a: f64) -> [C64; 4] {
    let e = (2.0 * a * w).exp();
    let q = |x: C64, y: C64| e / (x * y) - 1.0;
    [
        q(f1.r_e, f2.r_e),
        q(f1.r_b, f2.r_b),
        q(f1.r_e, f2.r_b),
        q(f1.r_b, f2.r_e),
    ]
}

/// Density of the moving-plate force integral (dimensionless, `a = 1`).
pub fn force_density(mode: &Mode, f1: &FresnelSet, f2: &FresnelSet) -> Result<C64> {
    let (w, k, u, v, b) = (mode.w, mode.kappa, mode.u, mode.v, mode.beta);
    let e = (-2.0 * w).exp();
    let ch = ChannelFactors::new(f1, f2, e);
    let (re1, rb1, re2, rb2) = (f1.r_e, f1.r_b, f2.r_e, f2.r_b);
    let x = C64::new(mode.q * mode.q, -k * u * b);
    let x2 = x * x;
    let y = w * w * v * v * b * b;
    let num = (ch.b_ee * rb1 * rb2 + ch.b_bb * re1 * re2) * x2 - (ch.b_eb * rb1 * re2 + ch.b_be * re1 * rb2) * y;
    if num == C64::new(0.0, 0.0) {
        return Ok(num);
    }
    let d1 = ch.b_ee * ch.b_bb * x2;
    let d2 = ch.b_eb * ch.b_be * y;
    let den = d1 - d2;
    let relative = den.norm() / (d1.norm() + d2.norm());
    if !(relative >= 1e-14) {
        return Err(Error::PoleProximity {
            context: "force denominator",
            relative,
        });
    }
    Ok(w * e * num / den)
}

/// Static (Lifshitz) density: `w e^{−2w}(r_E1 r_E2/b_EE + r_B1 r_B2/b_BB)`.
pub fn force_density_static(mode: &Mode, f1: &FresnelSet, f2: &FresnelSet) -> C64 {
    let e = (-2.0 * mode.w).exp();
    let ch = ChannelFactors::new(f1, f2, e);
    mode.w * e * (f1.r_e * f2.r_e / ch.b_ee + f1.r_b * f2.r_b / ch.b_bb)
}

/// Coefficient of `β²` in the force density for non-dispersive plates, with static
/// reflection coefficients.
pub fn force_density_beta2(mode: &Mode, f1: &FresnelSet, f2: &FresnelSet) -> C64 {
    let (w, v, q) = (mode.w, mode.v, mode.q);
    let e = (-2.0 * w).exp();
    let ch = ChannelFactors::new(f1, f2, e);
    let p = f1.r_e * f1.r_b * f2.r_e * f2.r_b;
    let bb = ch.b_ee * ch.b_bb;
    w.powi(3) * v * v * e * (f1.r_e - f1.r_b) * (f2.r_e - f2.r_b) * (1.0 - p * e * e)
        / (q.powi(4) * bb * bb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceKind {
    Moving,
    Static,
    Beta2,
}

/// Scalar force density as a quadrature integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceIntegrand {
    pub system: PlateSystem,
    pub kind: ForceKind,
}

impl Integrand for ForceIntegrand {
    fn components(&self) -> usize {
        1
    }

    fn eval(&self, kappa: f64, u: f64, v: f64, out: &mut [C64]) -> Result<()> {
        let beta = match self.kind {
            ForceKind::Moving => self.system.beta,
            _ => 0.0,
        };
        let mode = Mode::new(kappa, u, v, beta)?;
        let (f1, f2) = self.system.fresnel(&mode)?;
        out[0] = match self.kind {
            ForceKind::Moving => force_density(&mode, &f1, &f2)?,
            ForceKind::Static => force_density_static(&mode, &f1, &f2),
            ForceKind::Beta2 => force_density_beta2(&mode, &f1, &f2),
        };
        Ok(())
    }

    fn parity_checked(&self, _component: usize) -> bool {
        true
    }
}

/// Per-mode stress density from the reflected Green terms:
/// `S = −εκ²G^S + (∇×G×∇′)^S/μ − ½ tr(·)𝟙` at coincidence `x = x′`.
/// `d_y = d_z` factors follow `∂_y → iu` on the first index and `−iu` on the second.
pub fn stress_density(mode: &Mode, terms: &[WaveTerm], x: f64, eps: C64, mu: C64) -> Mat3 {
    let k2 = mode.kappa * mode.kappa;
    let mut g = Mat3::zeros();
    let mut cc = Mat3::zeros();
    for t in terms {
        let f = t.factor(x, x);
        let d = Vec3::new(t.kx, I * mode.u, I * mode.v);
        let dp = Vec3::new(t.kxp, -I * mode.u, -I * mode.v);
        g += t.k * f;
        cc += cross_matrix(&d) * t.k * cross_matrix(&dp).transpose() * f;
    }
    let half = C64::new(0.5, 0.0);
    let g = (g + g.transpose()) * half;
    let cc = (cc + cc.transpose()) * half;
    let s = g * (-eps * k2) + cc / mu;
    let tr = s.trace();
    s - Mat3::identity() * (tr * 0.5)
}

/// [`stress_density`] from polarization-form terms, using the closed-form curls.
pub fn stress_density_polar(mode: &Mode, terms: &[PolarTerm], x: f64, eps: C64, mu: C64) -> Mat3 {
    let k2 = mode.kappa * mode.kappa;
    let mut g = Mat3::zeros();
    let mut cc = Mat3::zeros();
    for t in terms {
        let f = t.factor(x, x);
        g += t.matrix() * f;
        cc += t.curl_matrix() * f;
    }
    let half = C64::new(0.5, 0.0);
    let g = (g + g.transpose()) * half;
    let cc = (cc + cc.transpose()) * half;
    let s = g * (-eps * k2) + cc / mu;
    let tr = s.trace();
    s - Mat3::identity() * (tr * 0.5)
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn write_components(s: &Mat3, out: &mut [C64]) {
    for (o, (i, j)) in out.iter_mut().zip(PAIRS) {
        *o = s[(i, j)];
    }
}

/// Between-plate stress density at `x/a`, components `[xx, yy, zz, xy, xz, yz]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressIntegrand {
    pub system: PlateSystem,
    pub x: f64,
}

impl Integrand for StressIntegrand {
    fn components(&self) -> usize {
        6
    }

    fn eval(&self, kappa: f64, u: f64, v: f64, out: &mut [C64]) -> Result<()> {
        let mode = self.system.mode(kappa, u, v)?;
        let terms = self.system.cavity(&mode)?.polar_terms()?;
        let one = C64::new(1.0, 0.0);
        write_components(&stress_density_polar(&mode, &terms, self.x, one, one), out);
        Ok(())
    }

    fn parity_checked(&self, component: usize) -> bool {
        component < 3
    }
}

/// Stress density inside plate 1 at `x/a < 0`, components `[xx, yy, zz, xy, xz, yz]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InPlateStressIntegrand {
    pub system: PlateSystem,
    pub x: f64,
}

impl Integrand for InPlateStressIntegrand {
    fn components(&self) -> usize {
        6
    }

    fn eval(&self, kappa: f64, u: f64, v: f64, out: &mut [C64]) -> Result<()> {
        let s = &self.system;
        let mode = s.mode(kappa, u, v)?;
        let ip = InPlate::new(&mode, &s.plate1, &s.plate2, 1.0, s.omega_scale())?;
        let f = &ip.interface.fresnel;
        write_components(&stress_density_polar(&mode, &[ip.polar], self.x, f.eps, f.mu), out);
        Ok(())
    }

    fn parity_checked(&self, component: usize) -> bool {
        component < 3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceResult {
    /// Force per unit area [Pa], positive when attractive.
    pub f_pa: f64,
    /// `F / (π²ħc/240a⁴)`
    pub dimensionless: f64,
    /// The dimensionless integral `I`, `F = ħc I/(4π³a⁴)`.
    pub integral: f64,
    /// Estimated absolute quadrature error [Pa].
    pub quad_error: f64,
    /// Integrated magnitude of the discarded imaginary part [Pa].
    pub imag_residual: f64,
    pub cells: usize,
}

impl ForceResult {
    fn from_quad(system: &PlateSystem, r: &QuadResult) -> ForceResult {
        let unit = system.pressure_unit();
        let f_pa = r.value[0] * unit;
        ForceResult {
            f_pa,
            dimensionless: f_pa / system.mirror_force(),
            integral: r.value[0],
            quad_error: r.error[0] * unit,
            imag_residual: r.imag_residual[0] * unit,
            cells: r.cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressResult {
    /// Position [m].
    pub x: f64,
    /// Symmetric stress tensor [Pa].
    pub sigma: Matrix3<f64>,
    /// Largest per-component quadrature error estimate [Pa].
    pub quad_error: f64,
    /// Largest per-component discarded imaginary magnitude [Pa].
    pub imag_residual: f64,
    pub cells: usize,
}

impl StressResult {
    fn from_quad(system: &PlateSystem, x: f64, r: &QuadResult) -> StressResult {
        let unit = system.pressure_unit();
        let mut sigma = Matrix3::zeros();
        for (c, (i, j)) in PAIRS.into_iter().enumerate() {
            sigma[(i, j)] = r.value[c] * unit;
            sigma[(j, i)] = r.value[c] * unit;
        }
        StressResult {
            x,
            sigma,
            quad_error: r.max_error() * unit,
            imag_residual: r.imag_residual.iter().cloned().fold(0.0, f64::max) * unit,
            cells: r.cells,
        }
    }

    pub fn offdiag_max(&self) -> f64 {
        let s = &self.sigma;
        s[(0, 1)].abs().max(s[(0, 2)].abs()).max(s[(1, 2)].abs())
    }
}

fn check_system(system: &PlateSystem, kind: ForceKind) -> Result<()> {
    system.validate()?;
    if kind == ForceKind::Beta2 && (system.plate1.is_dispersive() || system.plate2.is_dispersive()) {
        return Err(Error::DispersionNotSupported);
    }
    Ok(())
}

/// Adaptive force integral; also returns the grid for reuse.
pub fn force_adaptive(system: &PlateSystem, kind: ForceKind, quad: &QuadSpec) -> Result<(ForceResult, Grid)> {
    check_system(system, kind)?;
    let f = ForceIntegrand { system: *system, kind };
    let (r, grid) = integrate_adaptive(&f, quad)?;
    Ok((ForceResult::from_quad(system, &r), grid))
}

/// Force on a fixed grid.
pub fn force_on_grid(system: &PlateSystem, kind: ForceKind, grid: &Grid) -> Result<ForceResult> {
    check_system(system, kind)?;
    let f = ForceIntegrand { system: *system, kind };
    Ok(ForceResult::from_quad(system, &grid.integrate(&f)?))
}

pub fn force_moving(system: &PlateSystem, quad: &QuadSpec) -> Result<ForceResult> {
    force_adaptive(system, ForceKind::Moving, quad).map(|r| r.0)
}

pub fn force_static(system: &PlateSystem, quad: &QuadSpec) -> Result<ForceResult> {
    force_adaptive(system, ForceKind::Static, quad).map(|r| r.0)
}

/// `dF/d(β²)` at `β = 0` [Pa]; only for non-dispersive plates.
pub fn force_beta2(system: &PlateSystem, quad: &QuadSpec) -> Result<ForceResult> {
    force_adaptive(system, ForceKind::Beta2, quad).map(|r| r.0)
}

/// Raises the mapping scale to `0.5/d` for a point at distance `d` (units of `a`)
/// from the nearest interface, where the integrand peaks near `κ ~ 1/(2d)`.
fn positional(quad: &QuadSpec, d: f64) -> QuadSpec {
    QuadSpec {
        scale: quad.scale.max(0.5 / d),
        ..*quad
    }
}

fn check_gap_position(system: &PlateSystem, x: f64) -> Result<f64> {
    let xr = x / system.a;
    if !(xr > 0.0 && xr < 1.0) {
        return Err(Error::OutOfRegion(x));
    }
    Ok(xr)
}

/// Stress tensor at `0 < x < a` [m].
pub fn stress_tensor(x: f64, system: &PlateSystem, quad: &QuadSpec) -> Result<StressResult> {
    system.validate()?;
    let xr = check_gap_position(system, x)?;
    let quad = positional(quad, xr.min(1.0 - xr));
    let (r, _) = integrate_adaptive(&StressIntegrand { system: *system, x: xr }, &quad)?;
    Ok(StressResult::from_quad(system, x, &r))
}

/// Stress at several gap positions on one shared grid, adapted at the point
/// closest to a plate.
pub fn stress_profile(xs: &[f64], system: &PlateSystem, quad: &QuadSpec) -> Result<Vec<StressResult>> {
    system.validate()?;
    let xr = xs
        .iter()
        .map(|&x| check_gap_position(system, x))
        .collect::<Result<Vec<f64>>>()?;
    let dist = |x: f64| x.min(1.0 - x);
    let Some(hard) = (0..xr.len()).min_by(|&i, &j| dist(xr[i]).total_cmp(&dist(xr[j]))) else {
        return Ok(Vec::new());
    };
    let quad = positional(quad, dist(xr[hard]));
    let (r0, grid) = integrate_adaptive(&StressIntegrand { system: *system, x: xr[hard] }, &quad)?;
    xs.iter()
        .zip(&xr)
        .enumerate()
        .map(|(i, (&x, &x_rel))| {
            if i == hard {
                return Ok(StressResult::from_quad(system, x, &r0));
            }
            let r = grid.integrate(&StressIntegrand { system: *system, x: x_rel })?;
            Ok(StressResult::from_quad(system, x, &r))
        })
        .collect()
}

/// Stress tensor inside plate 1 at `x < 0` [m], bare in-medium part dropped.
pub fn stress_in_plate(x: f64, system: &PlateSystem, quad: &QuadSpec) -> Result<StressResult> {
    system.validate()?;
    if !(x < 0.0) {
        return Err(Error::OutOfRegion(x));
    }
    let f = InPlateStressIntegrand {
        system: *system,
        x: x / system.a,
    };
    let (r, _) = integrate_adaptive(&f, &positional(quad, -f.x))?;
    Ok(StressResult::from_quad(system, x, &r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::Response;
    use std::f64::consts::PI;

    fn drude() -> Material {
        Material::dielectric(Response::Drude {
            omega_p: 1.37e16,
            gamma: 5.32e13,
        })
    }

    fn sys(p1: Material, p2: Material, beta: f64) -> PlateSystem {
        PlateSystem::new(p1, p2, 1e-7, beta)
    }

    fn folded(system: &PlateSystem, k: f64, u: f64, v: f64, x: f64) -> Mat3 {
        let mut total = Mat3::zeros();
        for (su, sv) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let m = Mode::new(k, su * u, sv * v, system.beta).unwrap();
            let terms = system.cavity(&m).unwrap().polar_terms().unwrap();
            total += stress_density_polar(&m, &terms, x, C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        }
        total
    }

    #[test]
    fn stress_xx_equals_force_density_per_mode() {
        for beta in [0.0, 0.5, 0.9] {
            let s = sys(Material::constant(2.0), drude(), beta);
            for (k, u, v) in [(0.7, 0.4, 0.3), (1.1, -0.5, 0.8), (0.05, 2.0, -1.1)] {
                let m = Mode::new(k, u, v, beta).unwrap();
                let (f1, f2) = s.fresnel(&m).unwrap();
                let f = force_density(&m, &f1, &f2).unwrap();
                let cav = s.cavity(&m).unwrap();
                let polar = cav.polar_terms().unwrap();
                let plain = cav.expanded_terms().unwrap();
                let one = C64::new(1.0, 0.0);
                for x in [0.1, 0.5, 0.9] {
                    let sxx = stress_density_polar(&m, &polar, x, one, one)[(0, 0)];
                    assert!((sxx - f).norm() < 1e-13 * f.norm(), "{beta} {x}: {sxx} vs {f}");
                    // explicit cross products lose digits like (w/κ)⁴ at small κ
                    let literal = stress_density(&m, &plain, x, one, one)[(0, 0)];
                    assert!((literal - f).norm() < 1e-5 * f.norm());
                }
            }
        }
    }

    #[test]
    fn folded_off_diagonals_vanish_pointwise() {
        let s = sys(drude(), Material::dielectric(Response::Plasma { omega_p: 9e15 }), 0.5);
        for (k, u, v) in [(0.7, 0.4, 0.3), (1.1, 0.5, 0.8)] {
            let t = folded(&s, k, u, v, 0.3);
            let scale = t[(0, 0)].norm();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                assert!(t[(i, j)].norm() < 1e-12 * scale);
            }
            for i in 0..3 {
                assert!(t[(i, i)].im.abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn mirror_density_limit() {
        let m = Mode::new(0.6, 0.3, 0.4, 0.0).unwrap();
        let f = FresnelSet {
            r_e: C64::new(-1.0, 0.0),
            r_b: C64::new(-1.0, 0.0),
            w_med: C64::new(1.0, 0.0),
            eps: C64::new(1.0, 0.0),
            mu: C64::new(1.0, 0.0),
        };
        let expect = 2.0 * m.w / (2.0 * m.w).exp_m1();
        assert!((force_density_static(&m, &f, &f).re - expect).abs() < 1e-15);
        for beta in [0.3, 0.9] {
            let mb = m.with_beta(beta).unwrap();
            assert!((force_density(&mb, &f, &f).unwrap().re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn b_variant_matches_literal_a_form() {
        let s = sys(Material::constant(3.0), drude(), 0.4);
        let m = Mode::new(0.4, 0.9, -0.6, 0.4).unwrap();
        let (f1, f2) = s.fresnel(&m).unwrap();
        let [aee, abb, aeb, abe] = a_quantities(&f1, &f2, m.w, 1.0);
        let x = C64::new(m.q * m.q, -m.kappa * m.u * m.beta);
        let y = m.w * m.w * m.v * m.v * m.beta * m.beta;
        let literal = m.w * ((aee + abb) * x * x - (aeb + abe) * y) / (aee * abb * x * x - aeb * abe * y);
        let b = force_density(&m, &f1, &f2).unwrap();
        assert!((literal - b).norm() < 1e-12 * b.norm());
        let ch = ChannelFactors::new(&f1, &f2, (-2.0 * m.w).exp());
        let e = (2.0 * m.w).exp();
        assert!((aee * f1.r_e * f2.r_e - ch.b_ee * e).norm() < 1e-12 * e);
    }

    #[test]
    fn static_density_is_beta_zero_density() {
        let s = sys(drude(), Material::dielectric(Response::Plasma { omega_p: 9e15 }), 0.0);
        let m = Mode::new(0.8, 0.2, 0.5, 0.0).unwrap();
        let (f1, f2) = s.fresnel(&m).unwrap();
        let a = force_density(&m, &f1, &f2).unwrap();
        let b = force_density_static(&m, &f1, &f2);
        assert!((a - b).norm() < 1e-15 * b.norm());
    }

    #[test]
    fn vacuum_plates_give_zero() {
        let s = sys(Material::VACUUM, Material::VACUUM, 0.3);
        let m = Mode::new(0.8, 0.2, 0.5, 0.3).unwrap();
        let (f1, f2) = s.fresnel(&m).unwrap();
        assert_eq!(force_density(&m, &f1, &f2).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(force_density_beta2(&m, &f1, &f2), C64::new(0.0, 0.0));
        let terms = s.cavity(&m).unwrap().polar_terms().unwrap();
        let one = C64::new(1.0, 0.0);
        assert!(crate::linalg::max_abs(&stress_density_polar(&m, &terms, 0.4, one, one)) < 1e-30);
    }

    #[test]
    fn dispersive_beta2_rejected() {
        let s = sys(drude(), drude(), 0.0);
        assert_eq!(force_beta2(&s, &QuadSpec::default()), Err(Error::DispersionNotSupported));
    }

    #[test]
    fn in_plate_density_has_no_xx_component() {
        let s = sys(Material::constant(2.0), drude(), 0.3);
        for (k, u, v) in [(0.7, 0.4, 0.3), (1.1, -0.5, 0.8)] {
            let mut total = Mat3::zeros();
            for (su, sv) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let m = Mode::new(k, su * u, sv * v, s.beta).unwrap();
                let ip = InPlate::new(&m, &s.plate1, &s.plate2, 1.0, s.omega_scale()).unwrap();
                let f = &ip.interface.fresnel;
                total += stress_density_polar(&m, &[ip.polar], -0.37, f.eps, f.mu);
            }
            let scale = total[(1, 1)].norm();
            assert!(scale > 0.0);
            assert!(total[(0, 0)].norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn units() {
        let s = sys(Material::VACUUM, Material::VACUUM, 0.0);
        let ratio = s.pressure_unit() * PI.powi(5) / 60.0 / s.mirror_force();
        assert!((ratio - 1.0).abs() < 1e-15);
    }
}
