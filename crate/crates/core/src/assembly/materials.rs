use crate::fields::{ball_current_real, CubeSolution};
use crate::{complexify, CMat3, CVec3, Error, Result, Vec3, C64};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Sign of the zero-order term of the bilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// `(μ⁻¹ curl E, curl V) - ω² (ε E, V)`.
    Maxwell,
    /// `(μ⁻¹ curl E, curl V) + ω² (ε E, V)`.
    Coercive,
}

type MatrixFn = Arc<dyn Fn(&Vec3) -> CMat3 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&Vec3) -> CVec3 + Send + Sync>;

/// Coefficients `μ⁻¹`, `ε`, `ω` and current `J` of the cavity problem.
///
/// The assembled load is `-iω (J, V)`.
#[derive(Clone)]
pub struct MaterialCoefficients {
    pub name: String,
    pub mu_inv: MatrixFn,
    pub eps: MatrixFn,
    pub omega: f64,
    pub current: VectorFn,
    pub formulation: Formulation,
}

impl fmt::Debug for MaterialCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaterialCoefficients")
            .field("name", &self.name)
            .field("omega", &self.omega)
            .field("formulation", &self.formulation)
            .finish_non_exhaustive()
    }
}

fn scalar(c: f64) -> MatrixFn {
    Arc::new(move |_| CMat3::identity() * C64::from(c))
}

/// Names accepted by [`MaterialCoefficients::preset`].
pub const PRESETS: [&str; 3] = ["ball", "ball-maxwell", "cube"];

impl MaterialCoefficients {
    /// Constant isotropic coefficients and no current.
    pub fn homogeneous(mu_inv: f64, eps: f64, omega: f64, formulation: Formulation) -> Self {
        MaterialCoefficients {
            name: "homogeneous".into(),
            mu_inv: scalar(mu_inv),
            eps: scalar(eps),
            omega,
            current: Arc::new(|_| CVec3::zeros()),
            formulation,
        }
    }

    /// `μ₀ = 2`, `ε₀ = 1`, `ω = 1` and `J = i [J1, J2, J3]` on the ball.
    ///
    /// With this current the field `E = (x1, x2 + cos(π|x|²/2)/4, x3)` solves
    /// the coercive problem `curl (1/2) curl E + E = [J1, J2, J3]`.
    pub fn ball() -> Self {
        MaterialCoefficients {
            name: "ball".into(),
            mu_inv: scalar(0.5),
            eps: scalar(1.0),
            omega: 1.0,
            current: Arc::new(|x| complexify(&ball_current_real(x)) * C64::i()),
            formulation: Formulation::Coercive,
        }
    }

    /// Same data as [`Self::ball`] with the `-ω² ε` sign.
    pub fn ball_maxwell() -> Self {
        MaterialCoefficients {
            name: "ball-maxwell".into(),
            formulation: Formulation::Maxwell,
            ..Self::ball()
        }
    }

    /// `μ₀ = 2`, `ε₀ = 1`, `ω = 1` on the unit cube with a current making
    /// [`CubeSolution`] exact for the coercive problem.
    pub fn cube() -> Self {
        MaterialCoefficients {
            name: "cube".into(),
            mu_inv: scalar(0.5),
            eps: scalar(1.0),
            omega: 1.0,
            current: Arc::new(|x| {
                complexify(&CubeSolution::real_value(x)) * C64::new(0.0, PI * PI + 1.0)
            }),
            formulation: Formulation::Coercive,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "ball" => Ok(Self::ball()),
            "ball-maxwell" => Ok(Self::ball_maxwell()),
            "cube" => Ok(Self::cube()),
            other => Err(Error::InvalidInput(format!(
                "unknown material preset {other:?} (known: {})",
                PRESETS.join(", ")
            ))),
        }
    }

    /// Factor of `(ε E, V)` in the bilinear form.
    pub fn mass_factor(&self) -> f64 {
        match self.formulation {
            Formulation::Maxwell => -self.omega * self.omega,
            Formulation::Coercive => self.omega * self.omega,
        }
    }

    /// `-iω J(x)`.
    pub fn load(&self, x: &Vec3) -> CVec3 {
        (self.current)(x) * C64::new(0.0, -self.omega)
    }

    /// Largest asymmetry of `μ⁻¹` and `ε` at `x`.
    pub fn asymmetry(&self, x: &Vec3) -> f64 {
        let a = (self.mu_inv)(x);
        let b = (self.eps)(x);
        (a - a.transpose()).norm().max((b - b.transpose()).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_load_is_real() {
        let m = MaterialCoefficients::ball();
        let x = Vec3::new(0.2, -0.3, 0.5);
        let l = m.load(&x);
        assert!(l.iter().all(|z| z.im.abs() < 1e-15));
        assert!((l.map(|z| z.re) - ball_current_real(&x)).norm() < 1e-15);
        assert_eq!(m.asymmetry(&x), 0.0);
    }

    #[test]
    fn presets_by_name() {
        for n in PRESETS {
            assert_eq!(MaterialCoefficients::preset(n).unwrap().name, n);
        }
        assert!(MaterialCoefficients::preset("vacuum").is_err());
        assert_eq!(MaterialCoefficients::ball_maxwell().mass_factor(), -1.0);
    }
}
