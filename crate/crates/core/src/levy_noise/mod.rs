//! Lévy white noise: the characteristic triplet, the Lévy symbol ψ, the
//! discretized characteristic functional, grid sampling, weight functions for
//! the ultradistribution setting and distribution functions.

mod distribution;
mod sampler;
mod weight;

pub use distribution::{
    distribution_function, exponential_profile_distribution, unit_ball_volume, weight_profile_distribution,
};
pub use sampler::{sample_noise, NoiseRealization, NoiseSampler, NOISE_KIND};
pub use weight::{ultra_admissibility, WeightFunction, WeightReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_field::{Domain, Field};
use crate::levy_measure::LevyMeasure;
use crate::quadrature::Integral;

/// Characteristic triplet `(a, γ, ν)`: Gaussian variance, drift and jump measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripletSpec", into = "TripletSpec")]
pub struct LevyTriplet {
    a: f64,
    gamma: f64,
    nu: LevyMeasure,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripletSpec {
    a: f64,
    gamma: f64,
    #[serde(default = "LevyMeasure::zero")]
    nu: LevyMeasure,
}

impl TryFrom<TripletSpec> for LevyTriplet {
    type Error = Error;
    fn try_from(s: TripletSpec) -> Result<Self> {
        LevyTriplet::new(s.a, s.gamma, s.nu)
    }
}

impl From<LevyTriplet> for TripletSpec {
    fn from(t: LevyTriplet) -> Self {
        TripletSpec {
            a: t.a,
            gamma: t.gamma,
            nu: t.nu,
        }
    }
}

impl LevyTriplet {
    pub fn new(a: f64, gamma: f64, nu: LevyMeasure) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(format!("Gaussian variance a = {a} must be finite and >= 0")));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter("drift must be finite".into()));
        }
        Ok(LevyTriplet { a, gamma, nu })
    }

    pub fn gaussian(a: f64) -> Result<Self> {
        LevyTriplet::new(a, 0.0, LevyMeasure::zero())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> &LevyMeasure {
        &self.nu
    }

    /// Mean of the noise per unit volume, `γ + ∫_{|x|>1} x ν(dx)`, when the
    /// large-jump first moment exists.
    pub fn mean_rate(&self) -> Option<f64> {
        self.nu.tail_abs_moment().value()?;
        Some(self.gamma + self.nu.tail_first_moment().value()?)
    }

    /// Variance of the noise per unit volume, `a + ∫ x² ν(dx)`.
    pub fn variance_rate(&self) -> Integral {
        self.nu.second_moment().map(|m| self.a + m)
    }
}

/// `sin(y) - y` without cancellation for small `y`.
fn sin_minus_id(y: f64) -> f64 {
    if y.abs() < 1e-2 {
        let y2 = y * y;
        -y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0))
    } else {
        y.sin() - y
    }
}

/// Lévy symbol `ψ(z) = iγz − az²/2 + ∫ (e^{ixz} − 1 − ixz·1_{|x|≤1}) ν(dx)`.
pub fn levy_symbol(triplet: &LevyTriplet, z: f64) -> Result<Complex64> {
    if z == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let whole_line = [(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)];
    let everywhere = |_: f64| true;
    let re = triplet.nu.integrate_with(
        &|x: f64| {
            let s = (0.5 * x * z).sin();
            -2.0 * s * s
        },
        &whole_line,
        &everywhere,
    );
    let im = triplet.nu.integrate_with(
        &|x: f64| {
            if x.abs() <= 1.0 {
                sin_minus_id(x * z)
            } else {
                (x * z).sin()
            }
        },
        &whole_line,
        &everywhere,
    );
    match (re, im) {
        (Integral::Finite(re), Integral::Finite(im)) => Ok(Complex64::new(
            -0.5 * triplet.a * z * z + re,
            triplet.gamma * z + im,
        )),
        _ => Err(Error::DivergentIntegral(format!("jump integral of ψ at z = {z}"))),
    }
}

/// `exp(Σ_i ψ(φ(x_i)) h^d)`, the midpoint discretization of `exp(∫ ψ(φ(x)) dx)`.
pub fn characteristic_functional(triplet: &LevyTriplet, phi: &Field) -> Result<Complex64> {
    phi.require(Domain::Physical)?;
    let scale = 1.0 + phi.max_abs();
    if phi.max_abs_imag() > 1e-9 * scale {
        return Err(Error::InvalidParameter("test function must be real-valued".into()));
    }
    let h = phi.grid().cell_volume();
    let mut exponent = Complex64::new(0.0, 0.0);
    for v in phi.values() {
        if v.re != 0.0 {
            exponent += levy_symbol(triplet, v.re)?;
        }
    }
    Ok((exponent * h).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::Grid;
    use crate::levy_measure::Density;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn symbol_examples() {
        let gauss = LevyTriplet::gaussian(1.0).unwrap();
        assert!(close(levy_symbol(&gauss, 2.0).unwrap(), Complex64::new(-2.0, 0.0), 1e-15));
        let drift = LevyTriplet::new(0.0, 3.0, LevyMeasure::zero()).unwrap();
        assert!(close(levy_symbol(&drift, 1.0).unwrap(), Complex64::new(0.0, 3.0), 1e-15));
        let atom = LevyTriplet::new(0.0, 0.0, LevyMeasure::atom(1.0, 1.0).unwrap()).unwrap();
        assert!(close(levy_symbol(&atom, PI).unwrap(), Complex64::new(-2.0, -PI), 1e-12));
    }

    #[test]
    fn symbol_of_density_matches_atom_sum() {
        // Density 1 on [1, 2] versus its midpoint-rule approximation by many atoms.
        let dens = LevyTriplet::new(0.0, 0.0, LevyMeasure::density(Density::power(1.0, 0.0, 1.0, 2.0)).unwrap()).unwrap();
        let n = 4000;
        let atoms: Vec<_> = (0..n)
            .map(|i| crate::levy_measure::Atom {
                location: 1.0 + (i as f64 + 0.5) / n as f64,
                weight: 1.0 / n as f64,
            })
            .collect();
        let disc = LevyTriplet::new(0.0, 0.0, LevyMeasure::new(atoms, vec![]).unwrap()).unwrap();
        for z in [0.3, 1.7, -4.0] {
            let a = levy_symbol(&dens, z).unwrap();
            let b = levy_symbol(&disc, z).unwrap();
            assert!(close(a, b, 1e-6), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn symbol_small_jumps_are_stable() {
        // ν = x^{-2.5} on (0, 1]: ψ(z) has a finite limit structure, and
        // the real part equals −∫ 2 sin²(xz/2) x^{-2.5} dx.
        let nu = LevyMeasure::density(Density::power(1.0, 2.5, 0.0, 1.0)).unwrap();
        let t = LevyTriplet::new(0.0, 0.0, nu).unwrap();
        let psi = levy_symbol(&t, 3.0).unwrap();
        assert!(psi.re.is_finite() && psi.re < 0.0);
        assert!(psi.im.is_finite());
    }

    #[test]
    fn functional_of_zero_is_one() {
        let g = Grid::cube(1, 16, 4.0).unwrap();
        let t = LevyTriplet::new(0.5, 1.0, LevyMeasure::atom(2.0, 1.0).unwrap()).unwrap();
        let v = characteristic_functional(&t, &Field::zeros(&g, Domain::Physical)).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gaussian_functional_closed_form() {
        let g = Grid::cube(1, 64, 8.0).unwrap();
        let phi = Field::from_fn(&g, |x| (-x[0] * x[0]).exp());
        let t = LevyTriplet::gaussian(1.0).unwrap();
        let v = characteristic_functional(&t, &phi).unwrap();
        let norm2 = phi.l2_norm().powi(2);
        assert!(close(v, Complex64::new((-0.5 * norm2).exp(), 0.0), 1e-14));
    }

    #[test]
    fn triplet_serde() {
        let json = r#"{"a": 1.0, "gamma": 0.5, "nu": [{"atom": [2.0, 1.0]}]}"#;
        let t: LevyTriplet = serde_json::from_str(json).unwrap();
        assert_eq!(t.nu().atoms().len(), 1);
        assert!(serde_json::from_str::<LevyTriplet>(r#"{"a": -1.0, "gamma": 0.0}"#).is_err());
    }
}
