//! Adaptive Gauss–Kronrod quadrature with divergence detection.
//!
//! Finite intervals are integrated by globally adaptive G7/K15 bisection.
//! Intervals touching 0 or reaching to infinity are cut into dyadic panels
//! (infinite ends after the substitution `x = 1/u`), and the panel series is
//! summed until a Cauchy criterion holds. Geometrically decaying panel series
//! are closed with their exact geometric remainder. A series that has not
//! settled after the panel budget is reported as [`Integral::Divergent`].

use serde::{Deserialize, Serialize};

use crate::defaults;

/// Outcome of an integral that may legitimately diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integral {
    Finite(f64),
    Divergent,
}

impl Integral {
    pub fn value(self) -> Option<f64> {
        match self {
            Integral::Finite(v) => Some(v),
            Integral::Divergent => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Integral::Finite(_))
    }

    /// `+inf` for divergent integrals.
    pub fn or_infinity(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Integral {
        match self {
            Integral::Finite(v) => Integral::Finite(f(v)),
            Integral::Divergent => Integral::Divergent,
        }
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;

    fn add(self, rhs: Integral) -> Integral {
        match (self, rhs) {
            (Integral::Finite(a), Integral::Finite(b)) => Integral::Finite(a + b),
            _ => Integral::Divergent,
        }
    }
}

impl std::iter::Sum for Integral {
    fn sum<I: Iterator<Item = Integral>>(iter: I) -> Integral {
        iter.fold(Integral::Finite(0.0), |acc, x| acc + x)
    }
}

impl std::fmt::Display for Integral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Integral::Finite(v) => write!(f, "{v:?} (finite)"),
            Integral::Divergent => write!(f, "inf (divergent)"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Relative tolerance of the panel-series Cauchy criterion.
    pub tol: f64,
    /// Maximum number of dyadic panels toward a singular or infinite end.
    pub panel_budget: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: defaults::QUAD_TOL,
            panel_budget: defaults::QUAD_PANEL_BUDGET,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 rule on `[a, b]`: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive integration over a finite interval.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    const MAX_INTERVALS: usize = 400;
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while parts.len() < MAX_INTERVALS {
        if err <= (rel_tol * total.abs()).max(1e-300) || !total.is_finite() {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| {
                if p.3 > best.1 {
                    (i, p.3)
                } else {
                    best
                }
            });
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    // Re-sum to shed accumulated cancellation in the running total.
    parts.iter().map(|p| p.2).sum()
}

/// Sum a series of panel integrals `panel(0), panel(1), ...`.
fn panel_series(panel: impl Fn(usize) -> f64, cfg: &QuadConfig) -> Integral {
    let tol = cfg.tol;
    let mut terms: Vec<f64> = Vec::with_capacity(cfg.panel_budget);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev_extrapolated: Option<f64> = None;
    let mut agreements = 0;
    for k in 0..cfg.panel_budget {
        let a = panel(k);
        if !a.is_finite() {
            return Integral::Divergent;
        }
        sum += a;
        abs_sum += a.abs();
        terms.push(a);
        if k < 2 {
            continue;
        }
        let a1 = terms[k - 1];
        let a2 = terms[k - 2];
        if a.abs() <= tol * abs_sum && a1.abs() <= tol * abs_sum {
            return Integral::Finite(sum);
        }
        let geometric = a1 != 0.0 && a2 != 0.0 && {
            let r = a / a1;
            let r_prev = a1 / a2;
            r > 0.0 && r < 1.0 - 1e-6 && r_prev > 0.0 && (r - r_prev).abs() <= 0.1 * (1.0 - r)
        };
        if geometric {
            let r = a / a1;
            let extrapolated = sum + a * r / (1.0 - r);
            match prev_extrapolated {
                Some(prev) if (extrapolated - prev).abs() <= tol * extrapolated.abs() => {
                    agreements += 1;
                    if agreements >= 2 {
                        return Integral::Finite(extrapolated);
                    }
                }
                _ => agreements = 0,
            }
            prev_extrapolated = Some(extrapolated);
        } else {
            prev_extrapolated = None;
            agreements = 0;
        }
    }
    Integral::Divergent
}

fn inner_tol(cfg: &QuadConfig) -> f64 {
    (cfg.tol * 1e-2).max(1e-14)
}

/// ∫_0^c f with dyadic panels accumulating at 0.
fn near_zero<F: Fn(f64) -> f64>(f: &F, c: f64, cfg: &QuadConfig) -> Integral {
    let t = inner_tol(cfg);
    panel_series(
        |k| {
            let hi = c * 0.5f64.powi(k as i32);
            gauss_kronrod(f, 0.5 * hi, hi, t)
        },
        cfg,
    )
}

/// ∫_a^∞ f for a > 0, mapped to ∫_0^{1/a} f(1/u) / u² du.
fn to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, cfg: &QuadConfig) -> Integral {
    let mapped = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            f(1.0 / u) / (u * u)
        }
    };
    near_zero(&mapped, 1.0 / a, cfg)
}

/// ∫_a^b f over `0 <= a < b <= inf`.
fn integrate_nonnegative<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadConfig) -> Integral {
    debug_assert!(a >= 0.0 && b > a);
    if a == 0.0 {
        let c = b.min(1.0);
        let head = near_zero(f, c, cfg);
        if b > c {
            head + integrate_nonnegative(f, c, b, cfg)
        } else {
            head
        }
    } else if b.is_infinite() {
        to_infinity(f, a, cfg)
    } else {
        let v = gauss_kronrod(f, a, b, inner_tol(cfg));
        if v.is_finite() {
            Integral::Finite(v)
        } else {
            Integral::Divergent
        }
    }
}

/// ∫_a^b f(x) dx for `a < b`, either end possibly infinite.
///
/// The point 0 is treated as a potential integrable singularity: an interval
/// containing it is split there and each side is resolved with dyadic panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Integral {
    if !(a < b) {
        return Integral::Finite(0.0);
    }
    if a >= 0.0 {
        integrate_nonnegative(&f, a, b, cfg)
    } else if b <= 0.0 {
        let reflected = |x: f64| f(-x);
        integrate_nonnegative(&reflected, -b, -a, cfg)
    } else {
        let reflected = |x: f64| f(-x);
        integrate_nonnegative(&reflected, 0.0, -a, cfg) + integrate_nonnegative(&f, 0.0, b, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let v = gauss_kronrod(&|x: f64| x * x * x - 2.0 * x, -1.0, 3.0, 1e-12);
        assert!((v - 12.0).abs() < 1e-12);
    }

    #[test]
    fn power_tail_converges() {
        // ∫_1^∞ x^{-1.5} dx = 2
        let v = integrate(|x: f64| x.powf(-1.5), 1.0, f64::INFINITY, &cfg());
        let v = v.value().unwrap();
        assert!((v - 2.0).abs() < 2e-8, "{v}");
    }

    #[test]
    fn log_tail_converges() {
        let v = integrate(|x: f64| x.ln() / (x * x), 1.0, f64::INFINITY, &cfg());
        assert!((v.value().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn harmonic_tail_diverges() {
        let v = integrate(|x: f64| 1.0 / x, 1.0, f64::INFINITY, &cfg());
        assert_eq!(v, Integral::Divergent);
    }

    #[test]
    fn singular_origin() {
        // ∫_0^1 x^{-1/2} = 2 ; ∫_0^1 x^{-1} diverges
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &cfg());
        assert!((v.value().unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(integrate(|x: f64| 1.0 / x, 0.0, 1.0, &cfg()), Integral::Divergent);
    }

    #[test]
    fn reflection_and_split() {
        let v = integrate(|x: f64| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &cfg());
        assert!((v.value().unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn zero_integrand() {
        assert_eq!(integrate(|_| 0.0, 0.0, f64::INFINITY, &cfg()), Integral::Finite(0.0));
    }
}
