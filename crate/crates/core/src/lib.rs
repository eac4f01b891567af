//! Exact zero-temperature Casimir stress between two magnetodielectric plates
//! in uniform parallel (shear) motion.
//!
//! Plate 1 fills `x < 0` and is at rest; plate 2 fills `x > a` and slides along
//! `+y` with speed `βc`. Everything is evaluated on the imaginary frequency
//! axis, one transverse Fourier mode `(κ, u, v)` at a time:
//!
//! * [`materials`] gives ε and μ at (possibly complex, boosted) imaginary frequency,
//! * [`modes`] holds the mode kinematics, the Lorentz boost and the four
//!   polarization vectors,
//! * [`reflection`] builds Fresnel coefficients and the 3×3 reflection operators,
//! * [`green`] assembles the Fourier-space Green tensor between and inside the plates,
//! * [`stress`] turns it into the stress tensor and the closed-form forces,
//! * [`quadrature`] integrates mode densities over `κ > 0` and the transverse plane,
//! * [`oracle`] holds independent brute-force checks of the analytic pieces,
//! * [`cli`] drives configuration, sweeps and CSV output.

pub mod cli;
pub mod error;
pub mod green;
pub mod linalg;
pub mod materials;
pub mod modes;
pub mod oracle;
pub mod quadrature;
pub mod reflection;
pub mod stress;
pub mod verify;

pub use error::{Error, Result};
pub use materials::{Material, Response};
pub use modes::{Mode, PolarizationBasis};
pub use quadrature::QuadSpec;
pub use stress::PlateSystem;
