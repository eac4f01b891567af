//! Complex 3-vectors and 3×3 matrices with the bilinear (unconjugated) algebra
//! used throughout: `a·b = Σ aᵢbᵢ`, `a⊗b = a bᵀ`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec3 = Vector3<C64>;
pub type Mat3 = Matrix3<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> C64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

#[inline]
pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    a * b.transpose()
}

/// `diag(-1, 1, 1)`: flips the x-component.
pub fn rx() -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(c(-1.0), c(1.0), c(1.0)))
}

/// Matrix of `d × (·)`, so that `cross_matrix(d) * k == d × k`.
pub fn cross_matrix(d: &Vec3) -> Mat3 {
    let z = C64::new(0.0, 0.0);
    Mat3::new(z, -d.z, d.y, d.z, z, -d.x, -d.y, d.x, z)
}

pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max_ij |a_ij - b_ij| / max_ij |b_ij|`.
pub fn rel_deviation(a: &Mat3, b: &Mat3) -> f64 {
    let scale = max_abs(b);
    if scale == 0.0 {
        max_abs(a)
    } else {
        max_abs(&(a - b)) / scale
    }
}

/// Principal square root, `Re ≥ 0`, with `Im ≥ 0` on the negative real axis.
#[inline]
pub fn principal_sqrt(z: C64) -> C64 {
    let r = z.sqrt();
    if r.re == 0.0 && r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
