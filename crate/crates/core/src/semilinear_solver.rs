//! Semilinear equations `p(D)s = g(·, s) + L̇` by splitting `s = u + v` with
//! `p(D)u = L̇` and the Picard iteration `v ← p(D)^{-1} g(·, u + v)`.
//!
//! Iteration starts only when the estimated contraction ratio
//! `‖p(D)^{-1}‖·‖id‖·Lip(g)` is below one. The two operator norms are
//! estimated by random probing with a safety factor; for `r = 2, ρ = 0` the
//! exact grid values are reported alongside.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::defaults;
use crate::error::{Error, Result};
use crate::grid_field::{dft, idft, Domain, Field, Grid};
use crate::levy_noise::NoiseRealization;
use crate::linear_solver::{DiscretePoly, SpectralMultiplier};
use crate::lp_besov::{BesovEvaluator, BesovParams, DyadicPartition};
use crate::poly_multiplier::{estimate_kappa, MultiPoly, RationalMultiplier};

type GFn = dyn Fn(&[f64], f64) -> f64 + Send + Sync;

/// `g(x, y)` with a declared Lipschitz constant in `y` and growth constant
/// `C` such that `|g(x, y)| ≤ C(1 + |y|)`.
#[derive(Clone)]
pub struct Nonlinearity {
    label: String,
    g: Arc<GFn>,
    lip: f64,
    growth: f64,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nonlinearity({}, lip={}, growth={})", self.label, self.lip, self.growth)
    }
}

/// Outcome of sampling difference quotients and growth ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearityCheck {
    pub max_quotient: f64,
    pub max_growth_ratio: f64,
    pub lipschitz_ok: bool,
    pub growth_ok: bool,
}

impl Nonlinearity {
    pub fn custom(
        label: impl Into<String>,
        g: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
        lip: f64,
        growth: f64,
    ) -> Result<Self> {
        if !(lip >= 0.0 && lip.is_finite() && growth >= 0.0 && growth.is_finite()) {
            return Err(Error::InvalidParameter("Lipschitz and growth constants must be finite and >= 0".into()));
        }
        Ok(Nonlinearity {
            label: label.into(),
            g: Arc::new(g),
            lip,
            growth,
        })
    }

    pub fn zero() -> Self {
        Self::custom("zero", |_, _| 0.0, 0.0, 0.0).expect("valid constants")
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::custom(format!("constant({c})"), move |_, _| c, 0.0, c.abs())
    }

    /// `g(y) = −c·sin(y)`, so the equation reads `p(D)s + c·sin(s) = L̇`.
    pub fn sin(c: f64) -> Result<Self> {
        Self::custom(format!("sin({c})"), move |_, y| -c * y.sin(), c.abs(), c.abs())
    }

    /// `g(y) = −c·tanh(y)`.
    pub fn tanh(c: f64) -> Result<Self> {
        Self::custom(format!("tanh({c})"), move |_, y| -c * y.tanh(), c.abs(), c.abs())
    }

    /// Piecewise-linear `g(y)` through `(y, value)` nodes, constant beyond the ends.
    pub fn tabulated(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 2 || points.windows(2).any(|w| !(w[0][0] < w[1][0])) {
            return Err(Error::InvalidParameter("tabulated nonlinearity needs increasing nodes".into()));
        }
        if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::InvalidParameter("tabulated nodes must be finite".into()));
        }
        let lip = points
            .windows(2)
            .map(|w| ((w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).abs())
            .fold(0.0, f64::max);
        let growth = points.iter().map(|p| p[1].abs()).fold(0.0, f64::max);
        let table = points.clone();
        Self::custom(
            format!("tabulated({} nodes)", points.len()),
            move |_, y| {
                let n = table.len();
                if y <= table[0][0] {
                    return table[0][1];
                }
                if y >= table[n - 1][0] {
                    return table[n - 1][1];
                }
                let i = table.partition_point(|p| p[0] <= y);
                let [y0, g0] = table[i - 1];
                let [y1, g1] = table[i];
                g0 + (g1 - g0) * (y - y0) / (y1 - y0)
            },
            lip,
            growth,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn eval(&self, x: &[f64], y: f64) -> f64 {
        (self.g)(x, y)
    }

    /// Sample `LIPSCHITZ_SAMPLES` pairs: half spread out, half at small separations.
    pub fn check(&self, d: usize, seed: u64) -> NonlinearityCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_quotient: f64 = 0.0;
        let mut max_growth: f64 = 0.0;
        for k in 0..defaults::LIPSCHITZ_SAMPLES {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
            let y1: f64 = rng.random_range(-20.0..20.0);
            let y2 = if k % 2 == 0 {
                rng.random_range(-20.0..20.0)
            } else {
                let sep: f64 = 10f64.powf(-rng.random_range(0.0..6.0));
                y1 + sep * if rng.random::<bool>() { 1.0 } else { -1.0 }
            };
            let (g1, g2) = (self.eval(&x, y1), self.eval(&x, y2));
            if y1 != y2 {
                max_quotient = max_quotient.max((g1 - g2).abs() / (y1 - y2).abs());
            }
            max_growth = max_growth.max(g1.abs() / (1.0 + y1.abs()));
        }
        NonlinearityCheck {
            max_quotient,
            max_growth_ratio: max_growth,
            lipschitz_ok: max_quotient <= self.lip * (1.0 + 1e-6) + 1e-12,
            growth_ok: max_growth <= self.growth * (1.0 + 1e-6) + 1e-12,
        }
    }

    fn verified(&self, d: usize) -> Result<()> {
        let c = self.check(d, 0);
        if !c.lipschitz_ok {
            return Err(Error::InvalidParameter(format!(
                "{}: sampled difference quotient {} exceeds declared Lipschitz constant {}",
                self.label, c.max_quotient, self.lip
            )));
        }
        if !c.growth_ok {
            return Err(Error::InvalidParameter(format!(
                "{}: sampled growth ratio {} exceeds declared growth constant {}",
                self.label, c.max_growth_ratio, self.growth
            )));
        }
        Ok(())
    }

    /// `x ↦ g(x, f(x))` on the grid, using the real part of `f`.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        f.require(Domain::Physical)?;
        let grid = f.grid();
        let values: Vec<f64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| self.eval(&grid.coordinate(i), v.re))
            .collect();
        Field::from_real(grid, &values)
    }
}

/// Probe estimates of `‖p(D)^{-1}‖_{L^r(ρ) → B^β_{r,r}(ρ)}` and `‖id‖_{B^β_{r,r}(ρ) → L^r(ρ)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNorms {
    /// Largest probe ratio times the safety factor.
    pub op_norm_est: f64,
    pub embed_norm_est: f64,
    /// Largest probe ratios without the safety factor.
    pub op_norm_probe: f64,
    pub embed_norm_probe: f64,
    /// Exact grid values `max √W_β/|p|` and `max 1/√W_β`, `W_β = Σ 2^{2βk} φ_k²`,
    /// available for `r = 2, ρ = 0`.
    pub op_norm_exact: Option<f64>,
    pub embed_norm_exact: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionCertificate {
    pub op_norm_est: f64,
    pub embed_norm_est: f64,
    pub lip: f64,
    pub ratio: f64,
}

impl ContractionCertificate {
    pub fn new(norms: &OperatorNorms, lip: f64) -> Self {
        ContractionCertificate {
            op_norm_est: norms.op_norm_est,
            embed_norm_est: norms.embed_norm_est,
            lip,
            ratio: norms.op_norm_est * norms.embed_norm_est * lip,
        }
    }

    pub fn require_contraction(&self) -> Result<()> {
        if self.ratio < 1.0 {
            Ok(())
        } else {
            Err(Error::NotAContraction { ratio: self.ratio })
        }
    }

    /// Bound on `‖v₁ − v₂‖_B / ‖u₁ − u₂‖_B` for fixed points from two inputs, with slack.
    pub fn continuity_bound(&self) -> f64 {
        self.ratio / (1.0 - self.ratio) + 0.1
    }
}

/// `W_β(ξ) = Σ_k 2^{2βk} φ_k(ξ)²` at every lattice frequency.
fn besov_symbol_weight(grid: &Grid, beta: f64, part: &DyadicPartition) -> Vec<f64> {
    let kmax = part.k_max(grid);
    grid.frequency_norms()
        .iter()
        .map(|&t| {
            (0..=kmax)
                .map(|k| (2.0 * beta * k as f64).exp2() * part.phi(k, t).powi(2))
                .sum()
        })
        .collect()
}

/// Narrow-band random probe centred at radius `centre`, optionally windowed
/// to a Gaussian packet around `window.0` with width `window.1`.
fn probe(grid: &Grid, centre: f64, width: f64, window: Option<(&[f64], f64)>, rng: &mut ChaCha8Rng) -> Result<Field> {
    let norms = grid.frequency_norms();
    let nearest = norms
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - centre).abs().total_cmp(&(b.1 - centre).abs()))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let values: Vec<Complex64> = norms
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if (t - centre).abs() <= width || i == nearest {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut f = idft(&Field::new(grid.clone(), values, Domain::Spectral)?)?.real();
    if let Some((x0, sigma)) = window {
        let win = Field::from_fn(grid, |x| {
            let r2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum();
            (-0.5 * r2 / (sigma * sigma)).exp()
        });
        f = Field::new(
            grid.clone(),
            f.values().iter().zip(win.values()).map(|(a, b)| a * b.re).collect(),
            Domain::Physical,
        )?;
    }
    Ok(f)
}

/// Operator norm estimates from `n_probes` seeded probes: half are global
/// narrow-band fields with centres from 0 to the Nyquist radius, half are the
/// same bands windowed to random wave packets.
pub fn estimate_operator_norms(
    p: &MultiPoly,
    params: &BesovParams,
    grid: &Grid,
    n_probes: usize,
    seed: u64,
) -> Result<OperatorNorms> {
    if n_probes == 0 {
        return Err(Error::InvalidParameter("need at least one probe".into()));
    }
    let inv = SpectralMultiplier::inverse(p, grid, false)?;
    let part = DyadicPartition::default();
    let eval = BesovEvaluator::new(grid, *params, part);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nyq = grid.nyquist_radius();
    let dxi = grid
        .box_length()
        .iter()
        .map(|l| 2.0 * std::f64::consts::PI / l)
        .fold(f64::INFINITY, f64::min);
    let global = n_probes.div_ceil(2);
    let mut op: f64 = 0.0;
    let mut embed: f64 = 0.0;
    for j in 0..n_probes {
        let slot = j % global;
        let frac = if global > 1 { slot as f64 / (global - 1) as f64 } else { 0.0 };
        let centre = nyq * frac * frac;
        let width = (2.0 * dxi).max(0.02 * nyq);
        let w = if j < global {
            probe(grid, centre, width, None, &mut rng)?
        } else {
            let x0: Vec<f64> = grid.box_length().iter().map(|l| rng.random_range(-0.4..0.4) * l).collect();
            let min_l = grid.box_length().iter().cloned().fold(f64::INFINITY, f64::min);
            let sigma = min_l * rng.random_range(0.03..0.15);
            probe(grid, centre, width, Some((&x0, sigma)), &mut rng)?
        };
        let lr = eval.lr_norm(&w)?;
        if lr == 0.0 {
            continue;
        }
        let b = eval.norm(&w)?;
        let pw = inv.apply(&w)?;
        op = op.max(eval.norm(&pw)? / lr);
        if b > 0.0 {
            embed = embed.max(lr / b);
        }
    }
    let (op_exact, embed_exact) = if params.r == 2.0 && params.rho == 0.0 {
        let w = besov_symbol_weight(grid, params.l, &part);
        let pv = DiscretePoly::new(p, grid)?;
        let op_exact = w
            .iter()
            .zip(pv.values())
            .map(|(w, p)| w.sqrt() / p.norm())
            .fold(0.0, f64::max);
        let embed_exact = w.iter().map(|w| 1.0 / w.sqrt()).fold(0.0, f64::max);
        (Some(op_exact), Some(embed_exact))
    } else {
        (None, None)
    };
    Ok(OperatorNorms {
        op_norm_est: defaults::PROBE_SAFETY * op,
        embed_norm_est: defaults::PROBE_SAFETY * embed,
        op_norm_probe: op,
        embed_norm_probe: embed,
        op_norm_exact: op_exact,
        embed_norm_exact: embed_exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardOptions {
    /// `(β, r, r, ρ)`; the summability index is taken equal to `r`.
    pub beta: f64,
    pub r: f64,
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub n_probes: usize,
    pub probe_seed: u64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            beta: 0.0,
            r: 2.0,
            rho: 0.0,
            tol: defaults::TOL,
            max_iter: defaults::MAX_ITER,
            n_probes: defaults::N_PROBES,
            probe_seed: 0,
        }
    }
}

impl PicardOptions {
    pub fn params(&self) -> Result<BesovParams> {
        BesovParams::new(self.beta, self.r, self.r, self.rho)
    }
}

/// The continuum condition `β − κ + d(1/2 − 1/r) < −d/2`, reported only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumCheck {
    pub kappa: Option<f64>,
    pub exponent: Option<f64>,
    pub satisfied: Option<bool>,
}

pub fn continuum_condition(p: &MultiPoly, beta: f64, r: f64) -> ContinuumCheck {
    let d = p.dim() as f64;
    let kappa = RationalMultiplier::inverse_of(p.clone())
        .and_then(|m| estimate_kappa(&m, 0, defaults::KAPPA_XI_RANGE))
        .ok()
        .map(|k| k.kappa);
    let exponent = kappa.map(|k| beta - k + d * (0.5 - 1.0 / r));
    ContinuumCheck {
        kappa,
        exponent,
        satisfied: exponent.map(|l| l < -d / 2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub n: usize,
    pub increment: f64,
    /// `increment_n / increment_{n-1}`, absent for the first step.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    pub s: Field,
    pub u: Field,
    pub v: Field,
    pub iterations: usize,
    pub certificate: ContractionCertificate,
    pub norms: OperatorNorms,
    pub history: Vec<IterationRecord>,
    /// `‖p ŝ − ĝ(·, s) − L̂‖ / ‖p ŝ‖` in spectral `L²`.
    pub residual: f64,
    /// `‖v − p(D)^{-1} g(·, u + v)‖_B` at termination.
    pub fixed_point_residual: f64,
    pub continuum: ContinuumCheck,
}

impl PicardSolution {
    pub fn write_iterations_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "n,increment,ratio")?;
        for r in &self.history {
            let ratio = r.ratio.map_or(String::new(), |x| format!("{x:?}"));
            writeln!(out, "{},{:?},{}", r.n, r.increment, ratio)?;
        }
        Ok(())
    }
}

/// Certified fixed-point machinery shared by the solver and the continuity probe.
struct FixedPoint<'a> {
    g: &'a Nonlinearity,
    inv: SpectralMultiplier,
    eval: BesovEvaluator,
    certificate: ContractionCertificate,
    tol: f64,
    max_iter: usize,
}

impl<'a> FixedPoint<'a> {
    fn new(p: &MultiPoly, g: &'a Nonlinearity, grid: &Grid, opts: &PicardOptions) -> Result<(Self, OperatorNorms)> {
        if p.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: p.dim(),
            });
        }
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol = {} must be > 0", opts.tol)));
        }
        let params = opts.params()?;
        g.verified(grid.dim())?;
        let inv = SpectralMultiplier::inverse(p, grid, false)?;
        let norms = estimate_operator_norms(p, &params, grid, opts.n_probes, opts.probe_seed)?;
        let certificate = ContractionCertificate::new(&norms, g.lip());
        certificate.require_contraction()?;
        Ok((
            FixedPoint {
                g,
                inv,
                eval: BesovEvaluator::new(grid, params, DyadicPartition::default()),
                certificate,
                tol: opts.tol,
                max_iter: opts.max_iter,
            },
            norms,
        ))
    }

    fn step(&self, u: &Field, v: &Field) -> Result<Field> {
        Ok(self.inv.apply(&self.g.apply(&u.add(v)?)?)?.real())
    }

    fn solve(&self, u: &Field) -> Result<(Field, Vec<IterationRecord>)> {
        let bound = self.certificate.ratio * (1.0 + defaults::RATIO_SLACK);
        let mut v = Field::zeros(u.grid(), Domain::Physical);
        let mut history: Vec<IterationRecord> = Vec::new();
        for n in 1..=self.max_iter {
            let next = self.step(u, &v)?;
            let increment = self.eval.norm(&next.sub(&v)?)?;
            let prev = history.last().map(|r| r.increment);
            let ratio = prev.filter(|&p| p > 0.0).map(|p| increment / p);
            history.push(IterationRecord { n, increment, ratio });
            v = next;
            if increment <= self.tol {
                return Ok((v, history));
            }
            // Ratios of increments near rounding level carry no information.
            let floor = 1e3 * f64::EPSILON * self.eval.norm(&v)?.max(1.0);
            if let (Some(r), Some(p)) = (ratio, prev) {
                if r > bound && p > floor {
                    return Err(Error::ContractionViolated {
                        iteration: n,
                        observed: r,
                        bound,
                    });
                }
            }
        }
        let last = history.last().expect("at least one iteration");
        Err(Error::MaxIterExceeded {
            iterations: self.max_iter,
            last_increment: last.increment,
            observed_ratio: last.ratio.unwrap_or(f64::NAN),
        })
    }
}

/// Solve `p(D)s = g(·, s) + L̇`.
pub fn picard_solve(
    p: &MultiPoly,
    g: &Nonlinearity,
    noise: &NoiseRealization,
    opts: &PicardOptions,
) -> Result<PicardSolution> {
    let grid = &noise.grid;
    let (fp, norms) = FixedPoint::new(p, g, grid, opts)?;
    let density = noise.density_field();
    let u = fp.inv.apply(&density)?.real();
    let (v, history) = fp.solve(&u)?;
    let s = u.add(&v)?;

    let p_disc = DiscretePoly::new(p, grid)?;
    let s_hat = dft(&s)?;
    let g_hat = dft(&g.apply(&s)?)?;
    let l_hat = dft(&density)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (((sv, gv), lv), pv) in s_hat
        .values()
        .iter()
        .zip(g_hat.values())
        .zip(l_hat.values())
        .zip(p_disc.values())
    {
        let lhs = pv * sv;
        num += (lhs - gv - lv).norm_sqr();
        den += lhs.norm_sqr();
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    let fixed_point_residual = fp.eval.norm(&v.sub(&fp.step(&u, &v)?)?)?;

    Ok(PicardSolution {
        iterations: history.len(),
        s,
        u,
        v,
        certificate: fp.certificate,
        norms,
        history,
        residual,
        fixed_point_residual,
        continuum: continuum_condition(p, opts.beta, opts.r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityProbe {
    /// `‖v₁ − v₂‖_B / ‖u₁ − u₂‖_B`, zero when the inputs coincide.
    pub value: f64,
    pub bound: f64,
}

/// Fixed points `v_i = p(D)^{-1} g(·, u_i + v_i)` for two inputs and their
/// Lipschitz quotient.
pub fn solution_continuity_probe(
    p: &MultiPoly,
    g: &Nonlinearity,
    opts: &PicardOptions,
    u1: &Field,
    u2: &Field,
) -> Result<ContinuityProbe> {
    let (fp, _) = FixedPoint::new(p, g, u1.grid(), opts)?;
    let du = fp.eval.norm(&u1.sub(u2)?)?;
    let bound = fp.certificate.continuity_bound();
    if du == 0.0 {
        return Ok(ContinuityProbe { value: 0.0, bound });
    }
    let (v1, _) = fp.solve(&u1.real())?;
    let (v2, _) = fp.solve(&u2.real())?;
    Ok(ContinuityProbe {
        value: fp.eval.norm(&v1.sub(&v2)?)? / du,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_noise::{sample_noise, LevyTriplet};
    use crate::lp_besov::sobolev_equivalence_bracket;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::cube(1, 128, 16.0).unwrap()
    }

    fn helmholtz(lambda: f64) -> MultiPoly {
        MultiPoly::shifted_laplacian(lambda, 1).unwrap()
    }

    fn noise(seed: u64) -> NoiseRealization {
        sample_noise(&LevyTriplet::gaussian(1.0).unwrap(), &grid(), 0.01, seed).unwrap()
    }

    fn opts() -> PicardOptions {
        PicardOptions {
            n_probes: 16,
            ..PicardOptions::default()
        }
    }

    #[test]
    fn builtin_checks_pass() {
        for g in [
            Nonlinearity::sin(0.3).unwrap(),
            Nonlinearity::tanh(-2.0).unwrap(),
            Nonlinearity::constant(1.5).unwrap(),
            Nonlinearity::tabulated(vec![[-1.0, 0.0], [0.0, 1.0], [2.0, 0.0]]).unwrap(),
        ] {
            let c = g.check(2, 1);
            assert!(c.lipschitz_ok && c.growth_ok, "{g:?}: {c:?}");
        }
    }

    #[test]
    fn understated_lipschitz_is_caught() {
        let g = Nonlinearity::custom("cubic-ish", |_, y| 2.0 * y, 1.0, 2.0).unwrap();
        assert!(!g.check(1, 0).lipschitz_ok);
        assert!(matches!(picard_solve(&helmholtz(1.0), &g, &noise(0), &opts()), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn identity_operator_against_equivalence_constant() {
        let g = grid();
        let params = BesovParams::new(0.0, 2.0, 2.0, 0.0).unwrap();
        let one = MultiPoly::constant(1, 1.0).unwrap();
        let n = estimate_operator_norms(&one, &params, &g, 32, 3).unwrap();
        let (_, hi) = sobolev_equivalence_bracket(&g, 0.0, &DyadicPartition::default());
        assert!(n.op_norm_est >= hi && n.op_norm_est <= 1.5 * hi * (1.0 + 1e-12), "{n:?} vs {hi}");
    }

    #[test]
    fn probe_estimate_against_exact_l2_value() {
        let g = grid();
        for beta in [0.0, 0.5, 1.0] {
            let params = BesovParams::new(beta, 2.0, 2.0, 0.0).unwrap();
            let n = estimate_operator_norms(&helmholtz(1.0), &params, &g, 64, 0).unwrap();
            let exact = n.op_norm_exact.unwrap();
            assert!(n.op_norm_probe <= exact * (1.0 + 1e-12) && n.op_norm_probe >= 0.5 * exact, "{beta}: {n:?}");
            let e = n.embed_norm_exact.unwrap();
            assert!(n.embed_norm_probe <= e * (1.0 + 1e-12) && n.embed_norm_probe >= 0.5 * e);
        }
    }

    #[test]
    fn larger_shift_does_not_increase_estimate() {
        let g = grid();
        let params = BesovParams::new(0.25, 2.0, 2.0, -1.0).unwrap();
        let a = estimate_operator_norms(&helmholtz(1.0), &params, &g, 16, 5).unwrap();
        let b = estimate_operator_norms(&helmholtz(2.0), &params, &g, 16, 5).unwrap();
        assert!(b.op_norm_est <= a.op_norm_est);
    }

    #[test]
    fn zero_nonlinearity_is_linear_solve() {
        let n = noise(1);
        let sol = picard_solve(&helmholtz(1.0), &Nonlinearity::zero(), &n, &opts()).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.v.max_abs(), 0.0);
        assert_eq!(sol.s, sol.u);
    }

    #[test]
    fn constant_nonlinearity() {
        let sol = picard_solve(&helmholtz(2.0), &Nonlinearity::constant(0.5).unwrap(), &noise(2), &opts()).unwrap();
        assert_eq!(sol.iterations, 2);
        for v in sol.v.values() {
            assert!((v.re - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn sin_converges_geometrically() {
        let sol = picard_solve(&helmholtz(1.0), &Nonlinearity::sin(0.2).unwrap(), &noise(3), &opts()).unwrap();
        let bound = sol.certificate.ratio;
        assert!(bound < 1.0);
        for r in sol.history.iter().skip(1) {
            assert!(r.ratio.unwrap() <= bound, "{r:?} vs {bound}");
        }
        assert!(sol.residual <= 10.0 * opts().tol);
        assert!(sol.fixed_point_residual <= 2.0 * opts().tol);
        assert_eq!(sol.continuum.satisfied, Some(true));
    }

    #[test]
    fn refuses_non_contraction() {
        let err = picard_solve(&helmholtz(1.0), &Nonlinearity::sin(5.0).unwrap(), &noise(4), &opts()).unwrap_err();
        assert!(matches!(err, Error::NotAContraction { ratio } if ratio >= 1.0));
    }

    #[test]
    fn max_iter_reports_diagnostics() {
        let o = PicardOptions { max_iter: 3, tol: 1e-14, ..opts() };
        match picard_solve(&helmholtz(1.0), &Nonlinearity::sin(0.4).unwrap(), &noise(5), &o) {
            Err(Error::MaxIterExceeded { iterations: 3, last_increment, observed_ratio }) => {
                assert!(last_increment > 0.0 && observed_ratio < 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_nonlinearity_without_noise_vanishes() {
        let zero = sample_noise(&LevyTriplet::gaussian(0.0).unwrap(), &grid(), 0.01, 0).unwrap();
        let sol = picard_solve(&helmholtz(1.0), &Nonlinearity::tanh(0.3).unwrap(), &zero, &opts()).unwrap();
        assert_eq!(sol.s.max_abs(), 0.0);
    }

    #[test]
    fn deterministic() {
        let g = Nonlinearity::sin(0.3).unwrap();
        let a = picard_solve(&helmholtz(1.0), &g, &noise(6), &opts()).unwrap();
        let b = picard_solve(&helmholtz(1.0), &g, &noise(6), &opts()).unwrap();
        assert_eq!(a.s, b.s);
    }

    #[test]
    fn continuity_probe() {
        let g = grid();
        let p = helmholtz(1.0);
        let sin = Nonlinearity::sin(0.3).unwrap();
        let u1 = Field::from_fn(&g, |x| (x[0] * PI / 8.0).sin());
        let u2 = Field::from_fn(&g, |x| 0.5 * (x[0] * PI / 4.0).cos());
        assert_eq!(solution_continuity_probe(&p, &sin, &opts(), &u1, &u1).unwrap().value, 0.0);
        assert_eq!(solution_continuity_probe(&p, &Nonlinearity::zero(), &opts(), &u1, &u2).unwrap().value, 0.0);
        let c = solution_continuity_probe(&p, &sin, &opts(), &u1, &u2).unwrap();
        assert!(c.value > 0.0 && c.value <= c.bound, "{c:?}");
    }
}
