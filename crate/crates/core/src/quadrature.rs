//! Adaptive tensor Gauss–Legendre quadrature over `κ > 0` and the transverse plane.
//!
//! The transverse plane is integrated in polar coordinates over the first quadrant,
//! with the integrand folded over `(±u, ±v)`; the real part of the fold is kept and
//! the magnitude of its imaginary part is accumulated separately as a diagnostic.
//! Semi-infinite ranges are mapped onto the unit cube by
//! `κ = Λt/(1−t)`, `q = Λs/(1−s)`, `φ = πp/2`.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{KahanSum, C64};

fn default_rel_tol() -> f64 {
    1e-5
}
fn default_abs_floor() -> f64 {
    1e-14
}
fn default_max_level() -> u32 {
    16
}
fn default_scale() -> f64 {
    0.5
}
fn default_max_cells() -> usize {
    16384
}

/// Quadrature controls. `scale` is the mapping scale `Λ` in units of `1/a`;
/// stress evaluations at distance `d` from a plate use at least `0.5/d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_floor")]
    pub abs_floor: f64,
    /// Deepest dyadic level along any one axis.
    #[serde(default = "default_max_level")]
    pub max_level: u32,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: default_rel_tol(),
            abs_floor: default_abs_floor(),
            max_level: default_max_level(),
            scale: default_scale(),
            max_cells: default_max_cells(),
        }
    }
}

impl QuadSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadSpec {
            rel_tol,
            ..QuadSpec::default()
        }
    }

    /// Returns the offending field name on failure.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, f64)> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(("rel_tol", self.rel_tol));
        }
        if !(self.abs_floor >= 0.0 && self.abs_floor.is_finite()) {
            return Err(("abs_floor", self.abs_floor));
        }
        if !(3..=20).contains(&self.max_level) {
            return Err(("max_level", self.max_level as f64));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(("scale", self.scale));
        }
        if self.max_cells < 8 {
            return Err(("max_cells", self.max_cells as f64));
        }
        Ok(())
    }
}

/// A vector-valued mode density `f(κ, u, v)`.
pub trait Integrand: Sync {
    fn components(&self) -> usize;

    fn eval(&self, kappa: f64, u: f64, v: f64, out: &mut [C64]) -> Result<()>;

    /// Components that must satisfy `f(κ,−u,v) = f(κ,u,v)*` and `f(κ,u,−v) = f(κ,u,v)`.
    fn parity_checked(&self, _component: usize) -> bool {
        false
    }
}

impl<F> Integrand for F
where
    F: Fn(f64, f64, f64) -> Result<C64> + Sync,
{
    fn components(&self) -> usize {
        1
    }

    fn eval(&self, kappa: f64, u: f64, v: f64, out: &mut [C64]) -> Result<()> {
        out[0] = self(kappa, u, v)?;
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| {
        let (x16, w16) = gauss_legendre(16);
        let (x8, w8) = gauss_legendre(8);
        (Rule { x: x16, w: w16 }, Rule { x: x8, w: w8 })
    })
}

/// Dyadic box in the unit cube `(t, s, p)`: `[idx/2^level, (idx+1)/2^level]` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub level: [u32; 3],
    pub idx: [u64; 3],
}

impl Cell {
    /// Halves the cell along every axis in `axes`.
    fn split(&self, axes: &[usize]) -> Vec<Cell> {
        let mut out = vec![*self];
        for &d in axes {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..2u64).map(move |b| {
                        let mut k = c;
                        k.level[d] += 1;
                        k.idx[d] = 2 * c.idx[d] + b;
                        k
                    })
                })
                .collect();
        }
        out
    }

    fn bounds(&self, axis: usize) -> (f64, f64) {
        let h = 1.0 / (1u64 << self.level[axis]) as f64;
        (self.idx[axis] as f64 * h, (self.idx[axis] + 1) as f64 * h)
    }
}

/// Per-cell contribution: high-order value, `|GL16 − GL8|`, imaginary residual.
#[derive(Debug, Clone)]
struct CellResult {
    value: Vec<f64>,
    error: Vec<f64>,
    imag: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: Vec<f64>,
    /// Sum over cells of `|GL16 − GL8|`, per component.
    pub error: Vec<f64>,
    /// Integral of `|Im f_fold|`, per component.
    pub imag_residual: Vec<f64>,
    pub cells: usize,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn max_error(&self) -> f64 {
        self.error.iter().cloned().fold(0.0, f64::max)
    }
}

fn fold_at(f: &dyn Integrand, kappa: f64, u: f64, v: f64, tmp: &mut [C64], acc: &mut [C64]) -> Result<()> {
    acc.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    for (su, sv) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        f.eval(kappa, su * u, sv * v, tmp)?;
        for (a, t) in acc.iter_mut().zip(tmp.iter()) {
            *a += *t;
        }
    }
    for z in acc.iter() {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::QuadratureDivergence {
                error: f64::NAN,
                target: 0.0,
                cells: 0,
            });
        }
    }
    Ok(())
}

fn apply_rule(
    f: &dyn Integrand,
    cell: &Cell,
    rule: [&Rule; 3],
    lambda: f64,
    value: &mut [f64],
    imag: &mut [f64],
) -> Result<()> {
    let n = f.components();
    let (t0, t1) = cell.bounds(0);
    let (s0, s1) = cell.bounds(1);
    let (p0, p1) = cell.bounds(2);
    let map = |lo: f64, hi: f64, x: f64| lo + 0.5 * (hi - lo) * (x + 1.0);
    let (ht, hs, hp) = (0.5 * (t1 - t0), 0.5 * (s1 - s0), 0.5 * (p1 - p0));
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut acc = vec![C64::new(0.0, 0.0); n];
    let mut sums: Vec<KahanSum> = vec![KahanSum::default(); n];
    let mut isums: Vec<KahanSum> = vec![KahanSum::default(); n];
    for (xt, wt) in rule[0].x.iter().zip(&rule[0].w) {
        let t = map(t0, t1, *xt);
        let kappa = lambda * t / (1.0 - t);
        let jk = lambda / ((1.0 - t) * (1.0 - t));
        for (xs, ws) in rule[1].x.iter().zip(&rule[1].w) {
            let s = map(s0, s1, *xs);
            let q = lambda * s / (1.0 - s);
            let jq = lambda / ((1.0 - s) * (1.0 - s)) * q;
            for (xp, wp) in rule[2].x.iter().zip(&rule[2].w) {
                let phi = FRAC_PI_2 * map(p0, p1, *xp);
                let weight = wt * ws * wp * ht * hs * hp * jk * jq * FRAC_PI_2;
                if weight == 0.0 || !weight.is_finite() {
                    continue;
                }
                fold_at(f, kappa, q * phi.cos(), q * phi.sin(), &mut tmp, &mut acc)?;
                for c in 0..n {
                    sums[c].add(weight * acc[c].re);
                    isums[c].add(weight * acc[c].im.abs());
                }
            }
        }
    }
    for c in 0..n {
        value[c] = sums[c].value();
        imag[c] = isums[c].value();
    }
    Ok(())
}

fn eval_cell(f: &dyn Integrand, cell: &Cell, lambda: f64, with_error: bool) -> Result<CellResult> {
    let n = f.components();
    let (hi, lo) = rules();
    let mut value = vec![0.0; n];
    let mut imag = vec![0.0; n];
    apply_rule(f, cell, [hi; 3], lambda, &mut value, &mut imag)?;
    let mut error = vec![0.0; n];
    if with_error {
        let mut coarse = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        apply_rule(f, cell, [lo; 3], lambda, &mut coarse, &mut scratch)?;
        for c in 0..n {
            error[c] = (value[c] - coarse[c]).abs();
        }
    }
    Ok(CellResult { value, error, imag })
}

/// Per-axis error indicator: the change when only that axis drops to the low rule.
fn axis_errors(f: &dyn Integrand, cell: &Cell, lambda: f64, fine: &[f64]) -> Result<[f64; 3]> {
    let n = f.components();
    let (hi, lo) = rules();
    let mut out = [0.0; 3];
    let mut v = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for (d, e) in out.iter_mut().enumerate() {
        let mut r = [hi; 3];
        r[d] = lo;
        apply_rule(f, cell, r, lambda, &mut v, &mut scratch)?;
        *e = v.iter().zip(fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    }
    Ok(out)
}

fn eval_cells(f: &dyn Integrand, cells: &[Cell], lambda: f64, with_error: bool) -> Result<Vec<CellResult>> {
    cells
        .par_iter()
        .map(|c| eval_cell(f, c, lambda, with_error))
        .collect()
}

fn total(results: &[(Cell, CellResult)], n: usize, evaluations: usize) -> QuadResult {
    let mut ordered: Vec<&(Cell, CellResult)> = results.iter().collect();
    ordered.sort_by(|a, b| a.0.cmp(&b.0));
    let mut v = vec![KahanSum::default(); n];
    let mut e = vec![KahanSum::default(); n];
    let mut im = vec![KahanSum::default(); n];
    for (_, r) in ordered {
        for c in 0..n {
            v[c].add(r.value[c]);
            e[c].add(r.error[c]);
            im[c].add(r.imag[c]);
        }
    }
    QuadResult {
        value: v.iter().map(KahanSum::value).collect(),
        error: e.iter().map(KahanSum::value).collect(),
        imag_residual: im.iter().map(KahanSum::value).collect(),
        cells: results.len(),
        evaluations,
    }
}

/// A frozen set of cells, reusable so that several integrands share identical nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub cells: Vec<Cell>,
    pub scale: f64,
}

impl Grid {
    /// Integrates on this grid; the error is still the `|GL16 − GL8|` estimate.
    pub fn integrate(&self, f: &dyn Integrand) -> Result<QuadResult> {
        let results = eval_cells(f, &self.cells, self.scale, true)?;
        let n = f.components();
        let paired: Vec<(Cell, CellResult)> = self.cells.iter().cloned().zip(results).collect();
        let evals = paired.len() * evaluations_per_cell();
        Ok(total(&paired, n, evals))
    }

    /// Uniform grid at `level` (8^level cells).
    pub fn uniform(level: u32, scale: f64) -> Grid {
        let m = 1u64 << level;
        let mut cells = Vec::with_capacity((m * m * m) as usize);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    cells.push(Cell {
                        level: [level; 3],
                        idx: [i, j, k],
                    });
                }
            }
        }
        Grid { cells, scale }
    }
}

fn evaluations_per_cell() -> usize {
    4 * (16usize.pow(3) + 8usize.pow(3))
}

/// Spot-checks the parity contract at a few fixed modes.
pub fn check_parity(f: &dyn Integrand, scale: f64) -> Result<()> {
    let n = f.components();
    if !(0..n).any(|c| f.parity_checked(c)) {
        return Ok(());
    }
    let mut base = vec![C64::new(0.0, 0.0); n];
    let mut mu = vec![C64::new(0.0, 0.0); n];
    let mut mv = vec![C64::new(0.0, 0.0); n];
    for (k, u, v) in [(0.37, 0.61, 0.23), (1.3, -0.2, 0.9), (0.11, 0.05, 0.41)] {
        let (k, u, v) = (k * scale * 2.0, u * scale * 2.0, v * scale * 2.0);
        f.eval(k, u, v, &mut base)?;
        f.eval(k, -u, v, &mut mu)?;
        f.eval(k, u, -v, &mut mv)?;
        for c in (0..n).filter(|&c| f.parity_checked(c)) {
            let size = base[c].norm().max(f64::MIN_POSITIVE);
            let dev = ((mu[c] - base[c].conj()).norm() / size).max((mv[c] - base[c]).norm() / size);
            if dev > 1e-10 {
                return Err(Error::ParityViolation(dev));
            }
        }
    }
    Ok(())
}

/// Adaptive integration; returns the result and the final grid.
pub fn integrate_adaptive(f: &dyn Integrand, spec: &QuadSpec) -> Result<(QuadResult, Grid)> {
    if let Err((field, value)) = spec.validate() {
        return Err(Error::InvalidModel(format!("quadrature {field} = {value}")));
    }
    check_parity(f, spec.scale)?;
    let n = f.components();
    let lambda = spec.scale;
    let mut active: Vec<(Cell, CellResult)> = Vec::new();
    let initial: Vec<Cell> = Grid::uniform(1, lambda).cells;
    for (c, r) in initial.iter().cloned().zip(eval_cells(f, &initial, lambda, true)?) {
        active.push((c, r));
    }
    let mut evaluations = active.len() * evaluations_per_cell();
    loop {
        let res = total(&active, n, evaluations);
        let scale = res.value.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let target = (spec.rel_tol * scale).max(spec.abs_floor);
        let err = res.max_error();
        if err <= target {
            let grid = Grid {
                cells: active.iter().map(|(c, _)| *c).collect(),
                scale: lambda,
            };
            return Ok((res, grid));
        }
        // worst cells first, by their largest component error
        let cell_err = |r: &CellResult| r.error.iter().cloned().fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..active.len()).collect();
        order.sort_by(|&a, &b| {
            cell_err(&active[b].1)
                .partial_cmp(&cell_err(&active[a].1))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(active[a].0.cmp(&active[b].0))
        });
        let mut chosen = Vec::new();
        let mut removed = 0.0;
        for &i in &order {
            if chosen.len() >= 8 || removed >= 0.5 * (err - target) {
                break;
            }
            removed += cell_err(&active[i].1);
            chosen.push(i);
        }
        chosen.sort_unstable();
        // split each chosen cell along the axes carrying at least half its worst axis error
        let indicators = chosen
            .par_iter()
            .map(|&i| axis_errors(f, &active[i].0, lambda, &active[i].1.value))
            .collect::<Result<Vec<_>>>()?;
        evaluations += chosen.len() * 4 * 3 * 16usize.pow(2) * 8;
        let mut children = Vec::new();
        for (&i, e) in chosen.iter().zip(&indicators) {
            let cell = active[i].0;
            let open: Vec<usize> = (0..3).filter(|&d| cell.level[d] < spec.max_level).collect();
            let worst = open.iter().map(|&d| e[d]).fold(0.0, f64::max);
            let axes: Vec<usize> = open.into_iter().filter(|&d| e[d] >= 0.5 * worst).collect();
            if axes.is_empty() {
                return Err(Error::QuadratureDivergence {
                    error: err,
                    target,
                    cells: active.len(),
                });
            }
            children.extend(cell.split(&axes));
        }
        if active.len() + children.len() - chosen.len() > spec.max_cells {
            return Err(Error::QuadratureDivergence {
                error: err,
                target,
                cells: active.len(),
            });
        }
        let fresh = eval_cells(f, &children, lambda, true)?;
        evaluations += children.len() * evaluations_per_cell();
        for &i in chosen.iter().rev() {
            active.swap_remove(i);
        }
        active.extend(children.into_iter().zip(fresh));
    }
}

/// Adaptive integration of a scalar or vector integrand; `(value, error)` per component.
pub fn integrate3d(f: &dyn Integrand, spec: &QuadSpec) -> Result<QuadResult> {
    integrate_adaptive(f, spec).map(|(r, _)| r)
}
