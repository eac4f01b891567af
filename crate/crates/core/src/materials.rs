//! Electric and magnetic response on the imaginary frequency axis.
//!
//! All models are rational functions of the imaginary-frequency argument `ζ`
//! (`ω = iζ`), so they continue analytically into `Re ζ > 0`; that is where the
//! moving plate is sampled, at `ζ = c κ′` with complex `κ′`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Permittivity used for `perfect_mirror` unless configured otherwise.
///
/// The finite-ε deviation of the force from its ideal-mirror value scales like
/// `1/√ε`; at this value it is ~1e-8 relative.
pub const DEFAULT_MIRROR_SURROGATE: f64 = 1e16;

fn default_surrogate() -> f64 {
    DEFAULT_MIRROR_SURROGATE
}

/// One scalar response function (ε or μ). Frequencies are in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Response {
    Vacuum,
    Constant {
        value: f64,
    },
    /// `1 + ω_p²/ζ²`
    Plasma {
        omega_p: f64,
    },
    /// `1 + ω_p²/(ζ(ζ + γ))`
    Drude {
        omega_p: f64,
        gamma: f64,
    },
    /// `1 + ω_p²/(ω_0² + γζ + ζ²)`
    Lorentz {
        omega_p: f64,
        omega_0: f64,
        gamma: f64,
    },
    /// Large constant standing in for an ideal conductor.
    PerfectMirror {
        #[serde(default = "default_surrogate")]
        surrogate: f64,
    },
}

impl Default for Response {
    fn default() -> Self {
        Response::Vacuum
    }
}

impl Response {
    pub fn perfect_mirror() -> Self {
        Response::PerfectMirror {
            surrogate: DEFAULT_MIRROR_SURROGATE,
        }
    }

    /// Checks parameter positivity. Returns the name of the offending field on failure.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, f64)> {
        fn positive(name: &'static str, x: f64) -> std::result::Result<(), (&'static str, f64)> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err((name, x))
            }
        }
        match *self {
            Response::Vacuum => Ok(()),
            Response::Constant { value } => {
                if value.is_finite() && value >= 1.0 {
                    Ok(())
                } else {
                    Err(("value", value))
                }
            }
            Response::Plasma { omega_p } => positive("omega_p", omega_p),
            Response::Drude { omega_p, gamma } => {
                positive("omega_p", omega_p)?;
                positive("gamma", gamma)
            }
            Response::Lorentz {
                omega_p,
                omega_0,
                gamma,
            } => {
                positive("omega_p", omega_p)?;
                positive("omega_0", omega_0)?;
                positive("gamma", gamma)
            }
            Response::PerfectMirror { surrogate } => {
                if surrogate.is_finite() && surrogate >= 1.0 {
                    Ok(())
                } else {
                    Err(("surrogate", surrogate))
                }
            }
        }
    }

    /// Response at imaginary-frequency argument `zeta` [rad/s], `Re zeta > 0`.
    pub fn eval(&self, zeta: C64) -> Result<C64> {
        if !(zeta.re > 0.0) {
            return Err(Error::NonPositiveFrequency(zeta.re));
        }
        if let Err((field, value)) = self.validate() {
            return Err(Error::InvalidModel(format!("{field} = {value}")));
        }
        Ok(match *self {
            Response::Vacuum => c(1.0),
            Response::Constant { value } => c(value),
            Response::PerfectMirror { surrogate } => c(surrogate),
            Response::Plasma { omega_p } => 1.0 + omega_p * omega_p / (zeta * zeta),
            Response::Drude { omega_p, gamma } => 1.0 + omega_p * omega_p / (zeta * (zeta + gamma)),
            Response::Lorentz {
                omega_p,
                omega_0,
                gamma,
            } => 1.0 + omega_p * omega_p / (omega_0 * omega_0 + gamma * zeta + zeta * zeta),
        })
    }

    pub fn is_dispersive(&self) -> bool {
        matches!(
            self,
            Response::Plasma { .. } | Response::Drude { .. } | Response::Lorentz { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Response::Vacuum => "vacuum",
            Response::Constant { .. } => "constant",
            Response::Plasma { .. } => "plasma",
            Response::Drude { .. } => "drude",
            Response::Lorentz { .. } => "lorentz",
            Response::PerfectMirror { .. } => "perfect_mirror",
        }
    }
}

/// Electric and magnetic response of one plate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    #[serde(default)]
    pub electric: Response,
    #[serde(default)]
    pub magnetic: Response,
}

impl Material {
    pub const VACUUM: Material = Material {
        electric: Response::Vacuum,
        magnetic: Response::Vacuum,
    };

    pub fn dielectric(electric: Response) -> Self {
        Material {
            electric,
            magnetic: Response::Vacuum,
        }
    }

    pub fn constant(eps: f64) -> Self {
        Material::dielectric(Response::Constant { value: eps })
    }

    pub fn mirror() -> Self {
        Material::dielectric(Response::perfect_mirror())
    }

    /// `(ε(ζ), μ(ζ))`.
    pub fn eval_response(&self, zeta: C64) -> Result<(C64, C64)> {
        Ok((self.electric.eval(zeta)?, self.magnetic.eval(zeta)?))
    }

    pub fn is_dispersive(&self) -> bool {
        self.electric.is_dispersive() || self.magnetic.is_dispersive()
    }

    pub fn is_vacuum(&self) -> bool {
        self.electric == Response::Vacuum && self.magnetic == Response::Vacuum
    }

    /// Short identifier such as `drude` or `constant/lorentz` (electric/magnetic).
    pub fn label(&self) -> String {
        match self.magnetic {
            Response::Vacuum => self.electric.label().to_string(),
            m => format!("{}/{}", self.electric.label(), m.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GOLD: Response = Response::Drude {
        omega_p: 1.37e16,
        gamma: 5.32e13,
    };

    #[test]
    fn vacuum_is_identity() {
        let (e, m) = Material::VACUUM.eval_response(c(1e15)).unwrap();
        assert_eq!((e, m), (c(1.0), c(1.0)));
    }

    #[test]
    fn plasma_direct_substitution() {
        let e = Response::Plasma { omega_p: 1e16 }.eval(c(1e16)).unwrap();
        assert!((e - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn drude_matches_exact_rational_evaluation() {
        // ε = 1 + ω_p²/(ζ² + γζ) evaluated exactly with integers scaled by 1e13:
        // ω_p = 1370, γ = 5.32, ζ = 100  ->  1 + 1876900/(10000 + 532) = 1 + 1876900/10532
        let expect = 1.0 + 1_876_900.0 / 10_532.0;
        let e = GOLD.eval(c(1e15)).unwrap();
        assert!((e.re - expect).abs() / expect < 1e-14);
        assert_eq!(e.im, 0.0);
    }

    #[test]
    fn rejects_non_positive_frequency() {
        assert!(matches!(
            GOLD.eval(C64::new(0.0, 1.0)),
            Err(Error::NonPositiveFrequency(_))
        ));
        assert!(matches!(
            Response::Vacuum.eval(c(-1.0)),
            Err(Error::NonPositiveFrequency(_))
        ));
    }

    #[test]
    fn rejects_invalid_parameters() {
        let bad = Response::Drude {
            omega_p: 1e16,
            gamma: -1.0,
        };
        assert_eq!(bad.validate(), Err(("gamma", -1.0)));
        assert!(matches!(bad.eval(c(1e15)), Err(Error::InvalidModel(_))));
        assert!(Response::Constant { value: 0.5 }.validate().is_err());
    }

    #[test]
    fn serde_shape() {
        let m: Material = serde_json::from_str(
            r#"{"electric":{"kind":"drude","omega_p":1.0e16,"gamma":1.0e14}}"#,
        )
        .unwrap();
        assert_eq!(m.magnetic, Response::Vacuum);
        let mirror: Response = serde_json::from_str(r#"{"kind":"perfect_mirror"}"#).unwrap();
        assert_eq!(mirror, Response::perfect_mirror());
        assert!(serde_json::from_str::<Response>(r#"{"kind":"plasma","omega_p":1,"x":2}"#).is_err());
    }

    fn any_model() -> impl Strategy<Value = Response> {
        prop_oneof![
            Just(Response::Vacuum),
            (1.0f64..100.0).prop_map(|value| Response::Constant { value }),
            (1e14f64..1e17).prop_map(|omega_p| Response::Plasma { omega_p }),
            (1e14f64..1e17, 1e12f64..1e15).prop_map(|(omega_p, gamma)| Response::Drude { omega_p, gamma }),
            (1e14f64..1e17, 1e14f64..1e16, 1e12f64..1e15).prop_map(|(omega_p, omega_0, gamma)| {
                Response::Lorentz {
                    omega_p,
                    omega_0,
                    gamma,
                }
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn real_and_at_least_one_on_imaginary_axis(m in any_model(), xi in 1e12f64..1e18) {
            let e = m.eval(c(xi)).unwrap();
            prop_assert_eq!(e.im, 0.0);
            prop_assert!(e.re >= 1.0);
        }

        #[test]
        fn monotone_non_increasing(m in any_model(), xi in 1e12f64..1e18, f in 1.0f64..100.0) {
            let lo = m.eval(c(xi)).unwrap().re;
            let hi = m.eval(c(xi * f)).unwrap().re;
            prop_assert!(lo >= hi);
        }

        #[test]
        fn schwarz_reflection(m in any_model(), re in 1e12f64..1e17, im in -1e17f64..1e17) {
            let z = C64::new(re, im);
            let a = m.eval(z.conj()).unwrap();
            let b = m.eval(z).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-15 * b.norm());
        }
    }
}
