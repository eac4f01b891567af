//! Brute-force checks of the analytic Green tensor and reflection coefficients.
//!
//! Nothing here calls the resummed Green tensor or its expanded form. The series
//! oracle does take the two reflection operators as input, since resumming them is
//! what it checks.

use nalgebra::{DMatrix, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::green::{bare_green, GreenBlock};
use crate::linalg::{c, max_abs, principal_sqrt, rx, Mat3, Vec3, C64, I};
use crate::materials::Material;
use crate::modes::Mode;
use crate::reflection::{fresnel_plate1, fresnel_plate2, operator_r1, operator_r2};

type Mat4 = Matrix4<C64>;
type Vec4 = Vector4<C64>;

/// Condition numbers above this raise `IllConditioned`.
pub const MAX_CONDITION: f64 = 1e13;

pub fn spectral_radius(m: &Mat3) -> f64 {
    match m.schur().eigenvalues() {
        Some(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => f64::INFINITY,
    }
}

/// Reflected waves summed explicitly up to `n` double reflections, plus the bare
/// tensor unless `regularized`.
///
/// Waves are traced as amplitudes `K e^{−wx}` (right-moving) and `K e^{wx}`
/// (left-moving). A right-moving wave reflects at `x = a` into `e^{−2wa} R₂ K`, a
/// left-moving one at `x = 0` into `R₁ K`. The two waves leaving the source are not
/// counted as reflected.
pub fn series_green(
    x: f64,
    x_p: f64,
    mode: &Mode,
    plate1: &Material,
    plate2: &Material,
    a: f64,
    omega_scale: f64,
    n: usize,
    regularized: bool,
) -> Result<GreenBlock> {
    let basis = mode.basis()?;
    let r1 = operator_r1(&fresnel_plate1(plate1, mode, omega_scale)?, &basis);
    let r2 = operator_r2(&fresnel_plate2(plate2, mode, omega_scale)?, &basis);
    let w = mode.w;
    let e = c((-2.0 * w * a).exp());
    let rho = spectral_radius(&(r1 * r2 * e));
    if !(rho < 1.0) {
        return Err(Error::SeriesNotConvergent(rho));
    }

    let gp = bare_tensor(mode, 1.0);
    let gm = bare_tensor(mode, -1.0);
    let right_at = c((-w * x).exp());
    let left_at = c((w * x).exp());
    let mut right = gp * c((w * x_p).exp());
    let mut left = gm * c((-w * x_p).exp());
    let mut matrix = Mat3::zeros();
    for k in 0..=n {
        let from_right = r2 * right * e;
        let from_left = r1 * left;
        matrix += from_right * left_at + from_left * right_at;
        if k == n {
            break;
        }
        right = r1 * from_right;
        left = r2 * from_left * e;
        matrix += right * right_at + left * left_at;
    }
    if !regularized {
        matrix += bare_green(x, x_p, mode)?.matrix;
    }
    Ok(GreenBlock {
        matrix,
        x,
        x_p,
        mode: *mode,
        regularized,
    })
}

/// `−[d⊗d − κ²𝟙]/(2wκ²)`, `d = (∓w, iu, iv)`, rebuilt here from the definition.
fn bare_tensor(mode: &Mode, sign: f64) -> Mat3 {
    let d = Vec3::new(c(-sign * mode.w), I * mode.u, I * mode.v);
    let k2 = mode.kappa * mode.kappa;
    (d * d.transpose() - Mat3::identity() * c(k2)) * c(-1.0 / (2.0 * mode.w * k2))
}

/// `‖(∇×∇× + κ²) G‖_max` in the vacuum gap, with `∂_x` replaced by centered
/// differences of step `h` and `∂_y, ∂_z → iu, iv`.
pub fn pde_residual(
    g: &dyn Fn(f64) -> Result<Mat3>,
    x: f64,
    x_p: f64,
    mode: &Mode,
    a: f64,
    h: f64,
) -> Result<f64> {
    let margin = (x - x_p).abs().min(x).min(a - x);
    if !(h > 0.0) || h > a / 10.0 || margin <= 3.0 * h {
        return Err(Error::StepTooLarge { h, margin });
    }
    let (gm, g0, gp) = (g(x - h)?, g(x)?, g(x + h)?);
    let d1 = (gp - gm) * c(0.5 / h);
    let d2 = (gp - g0 * c(2.0) + gm) * c(1.0 / (h * h));
    Ok(max_abs(&curl_curl(mode, &g0, &d1, &d2)))
}

/// `D(D·G) − (D·D)G + κ²G` from `G`, `∂_xG`, `∂²_xG`.
fn curl_curl(mode: &Mode, g0: &Mat3, d1: &Mat3, d2: &Mat3) -> Mat3 {
    let t = [c(0.0), I * mode.u, I * mode.v];
    let mut out = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut s = c(0.0);
            for k in 0..3 {
                s += match (i, k) {
                    (0, 0) => d2[(0, j)],
                    (0, _) => t[k] * d1[(k, j)],
                    (_, 0) => t[i] * d1[(0, j)],
                    _ => t[i] * t[k] * g0[(k, j)],
                };
            }
            let lap = d2[(i, j)] - g0[(i, j)] * (mode.q * mode.q);
            out[(i, j)] = s - lap + g0[(i, j)] * (mode.kappa * mode.kappa);
        }
    }
    out
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    Vec3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)
}

/// Tangential state `ψ = (A_y, A_z, H_y, H_z)` of one homogeneous region.
#[derive(Debug, Clone, Copy)]
struct Layer {
    eps: C64,
    w: C64,
    /// `ψ′ = Lψ`
    l: Mat4,
    /// Two states growing like `e^{wx}` (columns 0, 1) and two like `e^{−wx}` (2, 3).
    modes: Mat4,
}

impl Layer {
    fn new(eps: C64, mu: C64, mode_k: (C64, C64, f64)) -> Result<Layer> {
        let (k, u, v) = mode_k;
        let k2 = k * k;
        let deriv = |p: &Vec4| -> Vec4 {
            let (ay, az, hy, hz) = (p[0], p[1], p[2], p[3]);
            let ax = (-I * u * hz + I * v * hy) / (eps * k2);
            let hx = (I * u * az - I * v * ay) / mu;
            Vec4::new(
                mu * hz + I * u * ax,
                -mu * hy + I * v * ax,
                I * u * hx - eps * k2 * az,
                I * v * hx + eps * k2 * ay,
            )
        };
        let mut l = Mat4::zeros();
        for j in 0..4 {
            let mut e = Vec4::zeros();
            e[j] = c(1.0);
            l.set_column(j, &deriv(&e));
        }
        let w = principal_sqrt(u * u + v * v + eps * mu * k2);
        if !(w.re > 0.0) {
            return Err(Error::BranchViolation { name: "w_layer", re: w.re });
        }
        let mut layer = Layer {
            eps,
            w,
            l,
            modes: Mat4::zeros(),
        };
        // TE ∝ (0, −v, u) and TM ∝ d × n_E for d = (±w, iu, iv)
        let n_e = Vec3::new(c(0.0), c(-v), u);
        for (s, sign) in [(0, 1.0), (2, -1.0)] {
            let d = Vec3::new(w * sign, I * u, I * v);
            for (k, n) in [n_e, cross(&d, &n_e)].iter().enumerate() {
                let h = cross(&d, n) / mu;
                let psi = Vec4::new(n.y, n.z, h.y, h.z);
                let scale = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
                layer.modes.set_column(s + k, &(psi / c(scale)));
            }
        }
        debug_assert!({
            let mut ok = true;
            for k in 0..4 {
                let sgn = if k < 2 { 1.0 } else { -1.0 };
                let col = layer.modes.column(k).into_owned();
                ok &= (layer.l * col - col * (w * sgn)).norm() <= 1e-10 * (1.0 + layer.l.norm());
            }
            ok
        });
        Ok(layer)
    }

    fn a_x(&self, p: &Vec4, k2: C64, u: C64, v: f64) -> C64 {
        (-I * u * p[3] + I * v * p[2]) / (self.eps * k2)
    }
}

/// Jump of `ψ` across a unit point source along each axis in a region of permittivity `eps`.
fn source_jumps(eps: C64, k2: C64, u: C64, v: f64) -> [Vec4; 3] {
    let z = c(0.0);
    [
        Vec4::new(I * u / (eps * k2), I * v / (eps * k2), z, z),
        Vec4::new(z, z, z, c(-1.0)),
        Vec4::new(z, z, c(1.0), z),
    ]
}

/// Piecewise solution on the intervals cut by `breaks`. On interval `j = [l, r]` the
/// state is `V₊ α e^{w(x−r)} + V₋ β e^{−w(x−l)}`, each exponential referenced where it
/// is largest, so no amplitude exceeds its own physical size. The outer intervals keep
/// only the decaying pair.
struct Piecewise {
    breaks: Vec<f64>,
    layers: Vec<Layer>,
}

impl Piecewise {
    fn amplitudes_len(&self) -> usize {
        4 * self.breaks.len()
    }

    /// Index of the interval holding `x` (interval `j` lies left of `breaks[j]`).
    fn interval(&self, x: f64) -> usize {
        self.breaks.iter().position(|&b| x < b).unwrap_or(self.breaks.len())
    }

    /// First amplitude index of interval `j`: the left tail carries two, the others four.
    fn offset(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            2 + 4 * (j - 1)
        }
    }

    /// `∂ψ(x)/∂(amplitudes)` on interval `j`.
    fn state_map(&self, j: usize, x: f64) -> Vec<(usize, Vec4)> {
        let n = self.breaks.len();
        let layer = &self.layers[j];
        let mut out = Vec::with_capacity(4);
        let o = self.offset(j);
        let grow = |r: f64| (layer.w * (x - r)).exp();
        let decay = |l: f64| (-layer.w * (x - l)).exp();
        if j == 0 {
            let e = grow(self.breaks[0]);
            for k in 0..2 {
                out.push((o + k, layer.modes.column(k) * e));
            }
        } else if j == n {
            let e = decay(self.breaks[n - 1]);
            for k in 0..2 {
                out.push((o + k, layer.modes.column(2 + k) * e));
            }
        } else {
            let (l, r) = (self.breaks[j - 1], self.breaks[j]);
            let (eg, ed) = (grow(r), decay(l));
            for k in 0..2 {
                out.push((o + k, layer.modes.column(k) * eg));
                out.push((o + 2 + k, layer.modes.column(2 + k) * ed));
            }
        }
        out
    }
}

/// Green tensor of the static layered problem: plate 1 on `x < 0`, vacuum gap,
/// plate 2 on `x > a`. Tangential `(A, H)` are matched at both surfaces, the source
/// enters as a jump at `x_p`, and every region decays away from it. `x`, `x_p` may
/// lie in the gap or inside plate 1.
pub fn static_bvp_green(
    x: f64,
    x_p: f64,
    mode: &Mode,
    plate1: &Material,
    plate2: &Material,
    a: f64,
    omega_scale: f64,
) -> Result<GreenBlock> {
    if mode.beta != 0.0 {
        return Err(Error::InvalidBeta(mode.beta));
    }
    if x == x_p {
        return Err(Error::CoincidenceUnregularized);
    }
    if !(x_p < a) || x_p == 0.0 {
        return Err(Error::OutOfRegion(x_p));
    }
    if !(x <= a) {
        return Err(Error::OutOfRegion(x));
    }
    let zeta = c(omega_scale * mode.kappa);
    let kk = (c(mode.kappa), c(mode.u), mode.v);
    let (e1, m1) = plate1.eval_response(zeta)?;
    let (e2, m2) = plate2.eval_response(zeta)?;
    let (p1, gap, p2) = (
        Layer::new(e1, m1, kk)?,
        Layer::new(c(1.0), c(1.0), kk)?,
        Layer::new(e2, m2, kk)?,
    );
    let (breaks, layers) = if x_p < 0.0 {
        (vec![x_p, 0.0, a], vec![p1, p1, gap, p2])
    } else {
        (vec![0.0, x_p, a], vec![p1, gap, gap, p2])
    };
    let src_break = breaks.iter().position(|&b| b == x_p).unwrap();
    let pw = Piecewise { breaks, layers };
    let n = pw.amplitudes_len();
    let k2 = kk.0 * kk.0;
    let src_layer = if x_p < 0.0 { &p1 } else { &gap };
    let jumps = source_jumps(src_layer.eps, k2, kk.1, mode.v);

    // ψ(b⁺) − ψ(b⁻) = J at the source, 0 elsewhere.
    let mut sys = DMatrix::<C64>::zeros(n, n);
    let mut rhs = DMatrix::<C64>::zeros(n, 3);
    for (i, &b) in pw.breaks.iter().enumerate() {
        for (col, vec) in pw.state_map(i + 1, b) {
            for r in 0..4 {
                sys[(4 * i + r, col)] += vec[r];
            }
        }
        for (col, vec) in pw.state_map(i, b) {
            for r in 0..4 {
                sys[(4 * i + r, col)] -= vec[r];
            }
        }
        if i == src_break {
            for (j, jump) in jumps.iter().enumerate() {
                for r in 0..4 {
                    rhs[(4 * i + r, j)] = jump[r];
                }
            }
        }
    }
    if !sys.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    let svd = sys.svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !(cond < MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let sol = svd.solve(&rhs, 0.0).map_err(|_| Error::IllConditioned(cond))?;

    let j = pw.interval(x);
    let obs = &pw.layers[j];
    let map = pw.state_map(j, x);
    let mut matrix = Mat3::zeros();
    for s in 0..3 {
        let mut p = Vec4::zeros();
        for (col, vec) in &map {
            p += vec * sol[(*col, s)];
        }
        matrix[(0, s)] = obs.a_x(&p, k2, kk.1, mode.v);
        matrix[(1, s)] = p[0];
        matrix[(2, s)] = p[1];
    }
    Ok(GreenBlock {
        matrix,
        x,
        x_p,
        mode: *mode,
        regularized: false,
    })
}

/// Reflection amplitudes of a half space `x < 0` with response `(eps, mu)` for waves
/// `∝ e^{wx + iuy + ivz}` arriving from vacuum, from tangential `A` and `H`
/// continuity. `κ`, `u` may be complex (frame of a moving plate).
///
/// The TE vector is `(0, −v, u)`; the incident TM vector is `d × n_E` and the
/// reflected one its x-flip, so `r_B` is the amplitude of `R_x n_B` for incident `n_B`.
pub fn interface_matching(eps: C64, mu: C64, kappa: C64, u: C64, v: f64) -> Result<(C64, C64)> {
    let q2 = u * u + v * v;
    let w = principal_sqrt(q2 + kappa * kappa);
    let wm = principal_sqrt(q2 + eps * mu * kappa * kappa);
    if !(w.re > 0.0 && wm.re > 0.0) {
        return Err(Error::BranchViolation { name: "interface w", re: w.re.min(wm.re) });
    }
    let d_in = Vec3::new(w, I * u, I * v);
    let d_out = Vec3::new(-w, I * u, I * v);
    let d_med = Vec3::new(wm, I * u, I * v);
    let n_e = Vec3::new(c(0.0), c(-v), u);
    let n_b = cross(&d_in, &n_e);
    let n_b_out = rx() * n_b;
    let n_bm = cross(&d_med, &n_e);
    let state = |d: &Vec3, n: &Vec3, mu: C64| -> Vec4 {
        let h = cross(d, n) / mu;
        Vec4::new(n.y, n.z, h.y, h.z)
    };
    let one = c(1.0);
    let cols = [
        state(&d_out, &n_e, one),
        state(&d_out, &n_b_out, one),
        -state(&d_med, &n_e, mu),
        -state(&d_med, &n_bm, mu),
    ];
    let m = Mat4::from_columns(&cols);
    let scale = max_abs4(&m);
    let lu = m.lu();
    let pivot = (0..4).map(|i| lu.u()[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(pivot > 1e-12 * scale) {
        return Err(Error::SingularMatching);
    }
    let te = lu
        .solve(&-state(&d_in, &n_e, one))
        .ok_or(Error::SingularMatching)?;
    let tm = lu
        .solve(&-state(&d_in, &n_b, one))
        .ok_or(Error::SingularMatching)?;
    Ok((te[0], tm[1]))
}

fn max_abs4(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Static interface oracle for plate material `mat` at mode `mode`.
pub fn interface_matching_oracle(mat: &Material, mode: &Mode, omega_scale: f64) -> Result<(C64, C64)> {
    let (eps, mu) = mat.eval_response(c(omega_scale * mode.kappa))?;
    interface_matching(eps, mu, c(mode.kappa), c(mode.u), mode.v)
}

/// Plate-2 coefficients from the static matching problem posed in the co-moving
/// frame, `(κ, u) → (κ′, u′)`, with the material evaluated at `ζ′ = omega_scale·κ′`.
pub fn comoving_oracle(mat: &Material, mode: &Mode, omega_scale: f64) -> Result<(C64, C64)> {
    let (eps, mu) = mat.eval_response(mode.kappa_p * omega_scale)?;
    interface_matching(eps, mu, mode.kappa_p, mode.u_p, mode.v)
}
