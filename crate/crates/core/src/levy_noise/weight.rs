use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::defaults;
use crate::error::{Error, Result};
use crate::levy_measure::LevyMeasure;
use crate::quadrature::{integrate, Integral, QuadConfig};

/// Radial weight `ω(x) = σ(‖x‖)` defining the ultradistribution space.
#[derive(Clone)]
pub enum WeightFunction {
    /// `σ(t) = m·ln(1 + t)`.
    LogPower { m: f64 },
    /// `σ(t) = t^β`, `0 < β < 1`.
    PowerBeta { beta: f64 },
    /// User-supplied increasing concave `σ` with `σ(0) = 0`.
    Custom { label: String, sigma: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::LogPower { m } => write!(f, "LogPower(m={m})"),
            WeightFunction::PowerBeta { beta } => write!(f, "PowerBeta(beta={beta})"),
            WeightFunction::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::LogPower { m } => write!(f, "log_power:{m}"),
            WeightFunction::PowerBeta { beta } => write!(f, "power_beta:{beta}"),
            WeightFunction::Custom { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

/// Parses `log_power:<m>` or `power_beta:<beta>`.
impl FromStr for WeightFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("weight {s:?} is not kind:value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("weight parameter {value:?} is not a number")))?;
        match kind.trim() {
            "log_power" => WeightFunction::log_power(value),
            "power_beta" => WeightFunction::power_beta(value),
            other => Err(Error::Config(format!("unknown weight kind {other:?}"))),
        }
    }
}

/// Numerical checks of the weight-function conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub sigma_at_zero: f64,
    pub nondecreasing: bool,
    /// `∫₀^∞ σ(t)/(1+t²) dt`.
    pub integrability: Integral,
    /// Smallest `σ(t)/ln(1+t)` over sampled `t ≥ 1`; positive means a
    /// logarithmic lower bound holds on the sample.
    pub log_growth_rate: f64,
}

impl WeightReport {
    pub fn is_admissible(&self) -> bool {
        self.sigma_at_zero.abs() < 1e-12 && self.nondecreasing && self.integrability.is_finite() && self.log_growth_rate > 0.0
    }
}

impl WeightFunction {
    pub fn log_power(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("log-power weight needs m > 0, got {m}")));
        }
        Ok(WeightFunction::LogPower { m })
    }

    pub fn power_beta(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!("power weight needs 0 < beta < 1, got {beta}")));
        }
        Ok(WeightFunction::PowerBeta { beta })
    }

    pub fn custom(label: impl Into<String>, sigma: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        WeightFunction::Custom {
            label: label.into(),
            sigma: Arc::new(sigma),
        }
    }

    /// The same `σ` wrapped as a custom weight, so the generic inverse applies.
    pub fn as_custom(&self) -> WeightFunction {
        let w = self.clone();
        WeightFunction::custom(format!("{self:?}"), move |t| w.sigma(t))
    }

    pub fn sigma(&self, t: f64) -> f64 {
        match self {
            WeightFunction::LogPower { m } => m * t.ln_1p(),
            WeightFunction::PowerBeta { beta } => t.powf(*beta),
            WeightFunction::Custom { sigma, .. } => sigma(t),
        }
    }

    /// `ω(x) = σ(‖x‖)`.
    pub fn omega(&self, x: &[f64]) -> f64 {
        self.sigma(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `ω^→(α) = sup{x ≥ 0 : σ(x) < α}`, closed form where available.
    pub fn omega_inverse(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        match self {
            WeightFunction::LogPower { m } => Ok((alpha / m).exp_m1()),
            WeightFunction::PowerBeta { beta } => Ok(alpha.powf(1.0 / beta)),
            WeightFunction::Custom { .. } => self.omega_inverse_bisection(alpha),
        }
    }

    /// Generic inverse by bracket doubling and bisection.
    pub fn omega_inverse_bisection(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        if !(self.sigma(0.0) < alpha) {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.sigma(hi) < alpha {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Unbounded(alpha));
            }
        }
        while hi - lo > defaults::OMEGA_BISECTION_TOL * hi.max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if self.sigma(mid) < alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn admissibility_report(&self) -> WeightReport {
        let ts: Vec<f64> = (0..=400).map(|k| 10f64.powf(-3.0 + 9.0 * k as f64 / 400.0)).collect();
        let values: Vec<f64> = ts.iter().map(|&t| self.sigma(t)).collect();
        let nondecreasing = self.sigma(0.0) <= values[0] && values.windows(2).all(|w| w[1] >= w[0]);
        let integrability = integrate(|t| self.sigma(t) / (1.0 + t * t), 0.0, f64::INFINITY, &QuadConfig::default());
        let log_growth_rate = ts
            .iter()
            .zip(&values)
            .filter(|(t, _)| **t >= 1.0)
            .map(|(t, v)| v / t.ln_1p())
            .fold(f64::INFINITY, f64::min);
        WeightReport {
            sigma_at_zero: self.sigma(0.0),
            nondecreasing,
            integrability,
            log_growth_rate,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha = {alpha} must be finite and > 0")))
    }
}

/// `I(R) = ∫₀^{1/R} ω^→(c·ln(1/α))^d dα`, written with `α = e^{-t}` as
/// `∫_{ln R}^∞ ω^→(c t)^d e^{-t} dt`.
fn inner_integral(w: &WeightFunction, c: f64, d: u32, r: f64) -> Integral {
    let integrand = |t: f64| {
        let arg = c * t;
        if arg <= 0.0 {
            return 0.0;
        }
        match w.omega_inverse(arg) {
            Ok(v) => {
                let log_term = d as f64 * v.ln() - t;
                if v == 0.0 {
                    0.0
                } else {
                    log_term.exp()
                }
            }
            Err(_) => f64::INFINITY,
        }
    };
    integrate(integrand, r.ln().max(0.0), f64::INFINITY, &QuadConfig::default())
}

/// `∫_{|r|>1} |r| ∫₀^{1/|r|} ω^→(c·ln(1/α))^d dα ν(dr)`; finite means the
/// noise lives in the ultradistribution space of `w`.
pub fn ultra_admissibility(nu: &LevyMeasure, w: &WeightFunction, c: f64, d: u32) -> Result<Integral> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be finite and > 0")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let tail = nu.tail_mass_and_compensator(1.0)?.0;
    if tail == 0.0 {
        return Ok(Integral::Finite(0.0));
    }
    if !inner_integral(w, c, d, 1.0).is_finite() {
        return Ok(Integral::Divergent);
    }
    let outer = nu.integrate_with(
        &|r: f64| {
            let a = r.abs();
            a * inner_integral(w, c, d, a).or_infinity()
        },
        &[(f64::NEG_INFINITY, -1.0), (1.0, f64::INFINITY)],
        &|r: f64| r.abs() > 1.0,
    );
    Ok(outer)
}
