use std::f64::consts::PI;

use super::WeightFunction;
use crate::error::{Error, Result};
use crate::grid_field::{Domain, Field};

/// Grid estimate of `λ^d({|f| > α})`: cells above the level times `h^d`.
pub fn distribution_function(f: &Field, alpha: f64) -> Result<f64> {
    f.require(Domain::Physical)?;
    check_level(alpha)?;
    let count = f.values().iter().filter(|v| v.norm() > alpha).count();
    Ok(count as f64 * f.grid().cell_volume())
}

/// Volume of the unit ball in `d = 1, 2, 3`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    match d {
        1 => Ok(2.0),
        2 => Ok(PI),
        3 => Ok(4.0 * PI / 3.0),
        _ => Err(Error::DimensionMismatch { expected: 3, got: d }),
    }
}

/// Exact distribution function of `D·exp(−rate·‖x‖)`: a ball of radius `ln(D/α)/rate`.
pub fn exponential_profile_distribution(scale: f64, rate: f64, d: usize, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    if !(scale > 0.0 && rate > 0.0) {
        return Err(Error::InvalidParameter("profile scale and rate must be > 0".into()));
    }
    if alpha == 0.0 {
        return Ok(f64::INFINITY);
    }
    let radius = (scale / alpha).ln() / rate;
    if radius <= 0.0 {
        return Ok(0.0);
    }
    Ok(unit_ball_volume(d)? * radius.powi(d as i32))
}

/// Distribution function of `exp(−η·ω(x))`: the ball of radius `ω^→(ln(1/α)/η)`.
pub fn weight_profile_distribution(w: &WeightFunction, eta: f64, d: usize, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be > 0")));
    }
    if alpha >= 1.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(f64::INFINITY);
    }
    let radius = w.omega_inverse((1.0 / alpha).ln() / eta)?;
    Ok(unit_ball_volume(d)? * radius.powi(d as i32))
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && !alpha.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("level {alpha} must be >= 0")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::Grid;

    #[test]
    fn zero_field() {
        let g = Grid::cube(2, 8, 4.0).unwrap();
        assert_eq!(distribution_function(&Field::zeros(&g, Domain::Physical), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn exponential_profile() {
        let v = exponential_profile_distribution(1.0, 1.0, 1, (-2f64).exp()).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        assert_eq!(exponential_profile_distribution(1.0, 1.0, 2, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn grid_matches_exact_profile() {
        let g = Grid::cube(1, 1024, 16.0).unwrap();
        let f = Field::from_fn(&g, |x| (-x[0].abs()).exp());
        let alpha = (-2.5f64).exp();
        let exact = exponential_profile_distribution(1.0, 1.0, 1, alpha).unwrap();
        let est = distribution_function(&f, alpha).unwrap();
        assert!((est - exact).abs() <= 2.0 * g.cell_volume());
    }

    #[test]
    fn smooth_bump_within_one_cell() {
        let bump = |x: &[f64]| {
            let r2 = x[0] * x[0];
            if r2 < 1.0 {
                (1.0 - 1.0 / (1.0 - r2)).exp()
            } else {
                0.0
            }
        };
        for alpha in [0.1, 0.5, 0.9] {
            // e^{1 - 1/(1-r²)} > α  iff  r² < 1 - 1/(1 - ln α).
            let exact = 2.0 * (1.0 - 1.0 / (1.0 - f64::ln(alpha))).sqrt();
            let coarse = Grid::cube(1, 64, 4.0).unwrap();
            let fine = Grid::cube(1, 256, 4.0).unwrap();
            let a = distribution_function(&Field::from_fn(&coarse, bump), alpha).unwrap();
            let b = distribution_function(&Field::from_fn(&fine, bump), alpha).unwrap();
            assert!((a - exact).abs() <= coarse.cell_volume(), "{alpha}: {a} vs {exact}");
            assert!((a - b).abs() <= coarse.cell_volume() + fine.cell_volume());
        }
    }

    #[test]
    fn weight_profile_radius() {
        let w = WeightFunction::log_power(1.0).unwrap();
        // exp(−ln(1+|x|)) = 1/(1+|x|) exceeds α on |x| < 1/α − 1.
        let v = weight_profile_distribution(&w, 1.0, 1, 0.25).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
    }
}
