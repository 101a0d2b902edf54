//! Real multivariate polynomials, their values on the imaginary axis and the
//! rational symbol `q(iξ)/p(iξ)`, plus an empirical estimate of the symbol's
//! decay order κ.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::grid_field::Grid;

/// `Σ p_α z^α` with real coefficients in `d` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

/// One `{alpha, coeff}` entry of the config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

impl TryFrom<Vec<Term>> for MultiPoly {
    type Error = Error;
    fn try_from(terms: Vec<Term>) -> Result<Self> {
        let dim = terms
            .first()
            .map(|t| t.alpha.len())
            .ok_or_else(|| Error::Config("polynomial needs at least one term".into()))?;
        let mut p = MultiPoly::zero(dim)?;
        for t in terms {
            if t.alpha.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.alpha.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::Config(format!("coefficient {} is not finite", t.coeff)));
            }
            *p.terms.entry(t.alpha).or_insert(0.0) += t.coeff;
        }
        Ok(p)
    }
}

impl From<MultiPoly> for Vec<Term> {
    fn from(p: MultiPoly) -> Self {
        if p.terms.is_empty() {
            return vec![Term {
                alpha: vec![0; p.dim],
                coeff: 0.0,
            }];
        }
        p.terms.into_iter().map(|(alpha, coeff)| Term { alpha, coeff }).collect()
    }
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!("polynomial dimension {dim} not in 1..=3")));
        }
        Ok(MultiPoly {
            dim,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::monomial(vec![0; dim], c)
    }

    pub fn monomial(alpha: Vec<u32>, coeff: f64) -> Result<Self> {
        let mut p = Self::zero(alpha.len())?;
        if coeff != 0.0 {
            p.terms.insert(alpha, coeff);
        }
        Ok(p)
    }

    /// `λ − Σ z_j²`, so that `p(iξ) = λ + ‖ξ‖²`: the symbol of `λ − Δ`.
    pub fn shifted_laplacian(lambda: f64, dim: usize) -> Result<Self> {
        let mut p = Self::constant(dim, lambda)?;
        for j in 0..dim {
            let mut alpha = vec![0; dim];
            alpha[j] = 2;
            p = p.add(&Self::monomial(alpha, -1.0)?)?;
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|&c| c == 0.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(a, _)| a.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// `Σ |p_α|`.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Modulus below which `p(iξ)` counts as a zero on the imaginary axis.
    pub fn zero_threshold(&self) -> f64 {
        defaults::ZERO_THRESHOLD * (1.0 + self.coeff_l1())
    }

    fn check_dim(&self, other: &MultiPoly) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            })
        }
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| *c != 0.0);
        self
    }

    pub fn add(&self, other: &MultiPoly) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            *out.terms.entry(a.clone()).or_insert(0.0) += c;
        }
        Ok(out.pruned())
    }

    pub fn scale(&self, s: f64) -> Self {
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect(),
        }
        .pruned()
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = MultiPoly::zero(self.dim)?;
        for (a, c) in &self.terms {
            for (b, e) in &other.terms {
                let alpha: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *out.terms.entry(alpha).or_insert(0.0) += c * e;
            }
        }
        Ok(out.pruned())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = MultiPoly::constant(self.dim, 1.0).expect("valid dimension");
        for _ in 0..n {
            out = out.mul(self).expect("same dimension");
        }
        out
    }

    /// `p(iξ) = Σ p_α (iξ)^α`.
    pub fn eval_at_i_xi(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        Ok(self.eval_unchecked(xi))
    }

    fn eval_unchecked(&self, xi: &[f64]) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (alpha, &c) in &self.terms {
            let mut mono = c;
            let mut order = 0;
            for (x, &k) in xi.iter().zip(alpha) {
                mono *= x.powi(k as i32);
                order += k;
            }
            // i^order
            match order % 4 {
                0 => re += mono,
                1 => im += mono,
                2 => re -= mono,
                _ => im -= mono,
            }
        }
        Complex64::new(re, im)
    }
}

/// `min |p(iξ)|` over a frequency set, with a minimizing frequency.
pub fn min_modulus_on_grid(poly: &MultiPoly, freqs: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let mut best = (f64::INFINITY, Vec::new());
    for xi in freqs {
        let m = poly.eval_at_i_xi(xi)?.norm();
        if m < best.0 {
            best = (m, xi.clone());
        }
    }
    if best.1.is_empty() {
        return Err(Error::InvalidParameter("empty frequency set".into()));
    }
    Ok(best)
}

/// The symbol `q(iξ)/p(iξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMultiplier {
    q: MultiPoly,
    p: MultiPoly,
}

impl RationalMultiplier {
    pub fn new(q: MultiPoly, p: MultiPoly) -> Result<Self> {
        q.check_dim(&p)?;
        if p.is_zero() {
            return Err(Error::InvalidParameter("denominator polynomial is zero".into()));
        }
        Ok(RationalMultiplier { q, p })
    }

    /// `1/p(iξ)`.
    pub fn inverse_of(p: MultiPoly) -> Result<Self> {
        let one = MultiPoly::constant(p.dim(), 1.0)?;
        Self::new(one, p)
    }

    pub fn q(&self) -> &MultiPoly {
        &self.q
    }

    pub fn p(&self) -> &MultiPoly {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.dim
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        Ok(self.q.eval_at_i_xi(xi)? / self.p.eval_at_i_xi(xi)?)
    }

    /// Fails with [`Error::ZeroOnAxis`] if `p(iξ)` is below threshold at a grid frequency.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        check_nonvanishing(&self.p, grid)
    }
}

/// [`Error::ZeroOnAxis`] at the frequency of smallest `|p(iξ)|` if it is below threshold.
pub fn check_nonvanishing(p: &MultiPoly, grid: &Grid) -> Result<()> {
    if p.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: p.dim(),
        });
    }
    let (modulus, xi) = min_modulus_on_grid(p, &grid.frequencies())?;
    let threshold = p.zero_threshold();
    if modulus < threshold {
        return Err(Error::ZeroOnAxis { xi, modulus, threshold });
    }
    Ok(())
}

/// Result of [`estimate_kappa`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaEstimate {
    /// Fitted decay order: `|m(iξ)| ≈ C ⟨ξ⟩^{-κ}`.
    pub kappa: f64,
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
    pub constants: Vec<DerivativeBound>,
}

/// `c_γ = max |D^γ m(ξ)| ⟨ξ⟩^{κ+|γ|}` over the sampled frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeBound {
    pub gamma: Vec<u32>,
    pub constant: f64,
    /// Log-log slope of the scaled derivative over the upper half of the
    /// shells; near zero when the bound holds uniformly.
    pub tail_growth: f64,
}

impl DerivativeBound {
    pub fn holds(&self) -> bool {
        self.tail_growth <= defaults::KAPPA_FIT_RESIDUAL
    }
}

fn directions(d: usize) -> Vec<Vec<f64>> {
    let k = defaults::KAPPA_DIRECTIONS;
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..k)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / k as f64 + 0.1;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci points on the sphere.
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..k)
                .map(|j| {
                    let z = 1.0 - (2.0 * j as f64 + 1.0) / k as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * j as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
    }
}

fn multi_indices(d: usize, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                let used: u32 = prefix.iter().sum();
                (0..=max_order - used).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out.sort_by_key(|g| (g.iter().sum::<u32>(), g.clone()));
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Tensor-product central difference of order `gamma` with step `h`.
fn central_difference(f: &dyn Fn(&[f64]) -> Complex64, xi: &[f64], gamma: &[u32], h: f64) -> Complex64 {
    let mut stencil: Vec<(Vec<f64>, f64)> = vec![(xi.to_vec(), 1.0)];
    for (axis, &g) in gamma.iter().enumerate() {
        if g == 0 {
            continue;
        }
        let scale = h.powi(-(g as i32));
        stencil = stencil
            .into_iter()
            .flat_map(|(pt, w)| {
                (0..=g).map(move |k| {
                    let mut p = pt.clone();
                    p[axis] += (g as f64 / 2.0 - k as f64) * h;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    (p, w * sign * binomial(g, k) * scale)
                })
            })
            .collect();
    }
    stencil.iter().map(|(p, w)| f(p) * *w).sum()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Decay order of `m = q/p`: least-squares slope of `log|m(iξ)|` against
/// `log⟨ξ⟩` over log-spaced shells `1 ≤ ‖ξ‖ ≤ xi_range`, one intercept per
/// direction, followed by finite-difference derivative constants for
/// `|γ| ≤ gamma_max`. Differences of order above 3 lose most digits to rounding.
pub fn estimate_kappa(m: &RationalMultiplier, gamma_max: u32, xi_range: f64) -> Result<KappaEstimate> {
    let p = m.p();
    let threshold = p.zero_threshold();
    let eval = |xi: &[f64]| -> Result<Complex64> {
        let den = p.eval_unchecked(xi);
        if den.norm() < threshold {
            return Err(Error::ZeroOnAxis {
                xi: xi.to_vec(),
                modulus: den.norm(),
                threshold,
            });
        }
        Ok(m.q().eval_unchecked(xi) / den)
    };
    estimate_kappa_with(m.dim(), &eval, gamma_max, xi_range)
}

/// [`estimate_kappa`] for an arbitrary symbol in `d` variables.
pub fn estimate_kappa_with(
    d: usize,
    symbol: &dyn Fn(&[f64]) -> Result<Complex64>,
    gamma_max: u32,
    xi_range: f64,
) -> Result<KappaEstimate> {
    if !(xi_range > 1.0) {
        return Err(Error::InvalidParameter(format!("xi_range = {xi_range} must exceed 1")));
    }
    let shells = defaults::KAPPA_SHELLS;
    let radii: Vec<f64> = (0..shells)
        .map(|s| xi_range.powf(s as f64 / (shells - 1) as f64))
        .collect();
    let dirs = directions(d);
    let log_bracket: Vec<f64> = radii.iter().map(|r| 0.5 * (1.0 + r * r).ln()).collect();

    // Centred regression within each direction shares one slope.
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut series = Vec::new();
    for dir in &dirs {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (r, lb) in radii.iter().zip(&log_bracket) {
            let xi: Vec<f64> = dir.iter().map(|c| c * r).collect();
            let v = symbol(&xi)?.norm();
            if v > 0.0 && v.is_finite() {
                xs.push(*lb);
                ys.push(v.ln());
            }
        }
        if xs.len() < 2 {
            continue;
        }
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        for (x, y) in xs.iter().zip(&ys) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
        }
        series.push((xs, ys, mx, my));
    }
    if series.is_empty() || sxx == 0.0 {
        return Err(Error::FitFailed {
            residual: f64::INFINITY,
            threshold: defaults::KAPPA_FIT_RESIDUAL,
        });
    }
    let fitted_slope = sxy / sxx;
    let mut sq = 0.0;
    let mut count = 0usize;
    for (xs, ys, mx, my) in &series {
        for (x, y) in xs.iter().zip(ys) {
            sq += (y - my - fitted_slope * (x - mx)).powi(2);
            count += 1;
        }
    }
    let fit_residual = (sq / count as f64).sqrt();
    if fit_residual > defaults::KAPPA_FIT_RESIDUAL {
        return Err(Error::FitFailed {
            residual: fit_residual,
            threshold: defaults::KAPPA_FIT_RESIDUAL,
        });
    }
    let kappa = -fitted_slope;

    // A symbol evaluation failure inside a stencil is treated as unbounded.
    let f = |xi: &[f64]| symbol(xi).unwrap_or(Complex64::new(f64::INFINITY, 0.0));
    let mut constants = Vec::new();
    for gamma in multi_indices(d, gamma_max) {
        let order: u32 = gamma.iter().sum();
        let mut per_shell = vec![0.0f64; shells];
        for dir in &dirs {
            for (s, r) in radii.iter().enumerate() {
                let xi: Vec<f64> = dir.iter().map(|c| c * r).collect();
                let bracket = (1.0 + r * r).sqrt();
                let dv = if order == 0 {
                    f(&xi).norm()
                } else {
                    central_difference(&f, &xi, &gamma, 1e-4 * bracket).norm()
                };
                per_shell[s] = per_shell[s].max(dv * bracket.powf(kappa + order as f64));
            }
        }
        let constant = per_shell.iter().cloned().fold(0.0, f64::max);
        let upper: Vec<(f64, f64)> = log_bracket
            .iter()
            .zip(&per_shell)
            .skip(shells / 2)
            .filter(|(_, v)| **v > 0.0)
            .map(|(x, v)| (*x, v.ln()))
            .collect();
        let tail_growth = if upper.len() >= 2 && constant.is_finite() {
            let (xs, ys): (Vec<f64>, Vec<f64>) = upper.into_iter().unzip();
            slope(&xs, &ys)
        } else if constant.is_finite() {
            0.0
        } else {
            f64::INFINITY
        };
        constants.push(DerivativeBound {
            gamma,
            constant,
            tail_growth,
        });
    }
    Ok(KappaEstimate {
        kappa,
        fit_residual,
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent evaluator: multiply out `(iξ_j)` factor by factor.
    fn naive_eval(p: &MultiPoly, xi: &[f64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (alpha, c) in p.terms() {
            let mut mono = Complex64::new(c, 0.0);
            for (x, &k) in xi.iter().zip(alpha) {
                for _ in 0..k {
                    mono *= Complex64::new(0.0, *x);
                }
            }
            total += mono;
        }
        total
    }

    fn random_poly(rng: &mut ChaCha8Rng, d: usize) -> MultiPoly {
        let mut p = MultiPoly::zero(d).unwrap();
        for _ in 0..6 {
            let alpha: Vec<u32> = (0..d).map(|_| rng.random_range(0..4)).collect();
            p = p.add(&MultiPoly::monomial(alpha, rng.random_range(-2.0..2.0)).unwrap()).unwrap();
        }
        p
    }

    #[test]
    fn examples() {
        let p = MultiPoly::shifted_laplacian(1.0, 2).unwrap();
        assert_eq!(p.eval_at_i_xi(&[1.0, 1.0]).unwrap(), Complex64::new(3.0, 0.0));
        let z1 = MultiPoly::monomial(vec![1], 1.0).unwrap();
        assert_eq!(z1.eval_at_i_xi(&[2.0]).unwrap(), Complex64::new(0.0, 2.0));
        assert!(matches!(
            z1.eval_at_i_xi(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn matches_naive_evaluator() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=3 {
            let p = random_poly(&mut rng, d);
            for _ in 0..100 {
                let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                let a = p.eval_at_i_xi(&xi).unwrap();
                let b = naive_eval(&p, &xi);
                assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn min_modulus_examples() {
        let g = Grid::cube(2, 16, 8.0).unwrap();
        let freqs = g.frequencies();
        let p = MultiPoly::shifted_laplacian(1.0, 2).unwrap();
        let (m, at) = min_modulus_on_grid(&p, &freqs).unwrap();
        assert_eq!(m, 1.0);
        assert_eq!(at, vec![0.0, 0.0]);
        let z1 = MultiPoly::monomial(vec![1, 0], 1.0).unwrap();
        assert_eq!(min_modulus_on_grid(&z1, &freqs).unwrap().0, 0.0);
        assert!(matches!(check_nonvanishing(&z1, &g), Err(Error::ZeroOnAxis { .. })));
    }

    #[test]
    fn helmholtz_near_unit_sphere() {
        // p(iξ) = 1 − ‖ξ‖²; the lattice 2πk/L with L = 2π hits ‖ξ‖ = 1 exactly.
        let p = MultiPoly::shifted_laplacian(-1.0, 2).unwrap().scale(-1.0);
        let g = Grid::cube(2, 16, 2.0 * PI).unwrap();
        let freqs = g.frequencies();
        let (m, at) = min_modulus_on_grid(&p, &freqs).unwrap();
        let scan = freqs
            .iter()
            .map(|x| (1.0 - x.iter().map(|v| v * v).sum::<f64>()).abs())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(m, scan);
        assert!(m < 1e-12);
        assert!((at.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let json = r#"[{"alpha": [0, 0], "coeff": 1.0}, {"alpha": [2, 0], "coeff": -1.0}, {"alpha": [0, 2], "coeff": -1.0}]"#;
        let p: MultiPoly = serde_json::from_str(json).unwrap();
        assert_eq!(p, MultiPoly::shifted_laplacian(1.0, 2).unwrap());
        let back: MultiPoly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<MultiPoly>("[]").is_err());
        assert!(serde_json::from_str::<MultiPoly>(r#"[{"alpha": [1], "coeff": 1.0}, {"alpha": [1, 0], "coeff": 1.0}]"#).is_err());
    }

    #[test]
    fn kappa_of_powers() {
        for d in 1..=2 {
            for alpha in 1..=2u32 {
                let p = MultiPoly::shifted_laplacian(1.0, d).unwrap().pow(alpha);
                let est = estimate_kappa(&RationalMultiplier::inverse_of(p).unwrap(), 2, 4096.0).unwrap();
                assert!((est.kappa - 2.0 * alpha as f64).abs() < 0.1, "{d} {alpha}: {}", est.kappa);
                assert!(est.constants.iter().all(DerivativeBound::holds), "{:?}", est.constants);
            }
        }
    }

    #[test]
    fn kappa_of_identity() {
        let p = MultiPoly::shifted_laplacian(2.0, 2).unwrap();
        let est = estimate_kappa(&RationalMultiplier::new(p.clone(), p).unwrap(), 1, 4096.0).unwrap();
        assert!(est.kappa.abs() < 0.05);
    }

    #[test]
    fn kappa_anisotropic_matches_ray_slopes() {
        // p(iξ) = 1 + ξ₁⁴ + ξ₂⁴: along any ray the slope tends to −4.
        let p = MultiPoly::constant(2, 1.0)
            .unwrap()
            .add(&MultiPoly::monomial(vec![4, 0], 1.0).unwrap())
            .unwrap()
            .add(&MultiPoly::monomial(vec![0, 4], 1.0).unwrap())
            .unwrap();
        let m = RationalMultiplier::inverse_of(p.clone()).unwrap();
        let est = estimate_kappa(&m, 1, 4096.0).unwrap();
        let ray_slope = |dir: [f64; 2]| {
            let pts: Vec<(f64, f64)> = (0..64)
                .map(|s| {
                    let r = 4096f64.powf(s as f64 / 63.0);
                    let xi = [dir[0] * r, dir[1] * r];
                    (0.5 * (1.0 + r * r).ln(), m.eval(&xi).unwrap().norm().ln())
                })
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            -slope(&xs, &ys)
        };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let oracle = 0.5 * (ray_slope([1.0, 0.0]) + ray_slope([s, s]));
        assert!((est.kappa - oracle).abs() < 0.1, "{} vs {oracle}", est.kappa);
    }

    #[test]
    fn kappa_zero_on_axis() {
        // iξ vanishes only at the origin, which the shells never touch.
        let m = RationalMultiplier::inverse_of(MultiPoly::monomial(vec![1], 1.0).unwrap()).unwrap();
        assert!((estimate_kappa(&m, 1, 4096.0).unwrap().kappa - 1.0).abs() < 0.1);
        // ξ² − 1 vanishes on the first shell.
        let bad = RationalMultiplier::inverse_of(MultiPoly::shifted_laplacian(-1.0, 1).unwrap()).unwrap();
        assert!(matches!(estimate_kappa(&bad, 1, 4096.0), Err(Error::ZeroOnAxis { .. })));
    }

    #[test]
    fn kappa_fit_failure() {
        // 1 + 10^{-24} ξ^8 is flat up to ‖ξ‖ ≈ 1000 and then drops like ξ^{-8}.
        let p = MultiPoly::constant(1, 1.0)
            .unwrap()
            .add(&MultiPoly::monomial(vec![8], 1e-24).unwrap())
            .unwrap();
        let m = RationalMultiplier::inverse_of(p).unwrap();
        assert!(matches!(estimate_kappa(&m, 1, 4096.0), Err(Error::FitFailed { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eval_is_linear(seed in any::<u64>(), x in -5.0..5.0f64, y in -5.0..5.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_poly(&mut rng, 2);
            let q = random_poly(&mut rng, 2);
            let s = p.add(&q).unwrap().eval_at_i_xi(&[x, y]).unwrap();
            let t = p.eval_at_i_xi(&[x, y]).unwrap() + q.eval_at_i_xi(&[x, y]).unwrap();
            prop_assert!((s - t).norm() <= 1e-12 * (1.0 + t.norm()));
        }

        #[test]
        fn conjugate_symmetry(seed in any::<u64>(), x in -5.0..5.0f64, y in -5.0..5.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_poly(&mut rng, 2);
            let a = p.eval_at_i_xi(&[-x, -y]).unwrap();
            let b = p.eval_at_i_xi(&[x, y]).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }

        #[test]
        fn kappa_scale_invariant(scale in 1e-3..1e3f64, lambda in 0.5..4.0f64) {
            let p = MultiPoly::shifted_laplacian(lambda, 1).unwrap();
            let q = MultiPoly::constant(1, 1.0).unwrap();
            let a = estimate_kappa(&RationalMultiplier::new(q.clone(), p.clone()).unwrap(), 0, 4096.0).unwrap();
            let b = estimate_kappa(&RationalMultiplier::new(q.scale(scale), p).unwrap(), 0, 4096.0).unwrap();
            prop_assert!((a.kappa - b.kappa).abs() <= 0.02);
        }
    }
}
