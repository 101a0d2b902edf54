//! Spectral solution of `p(D)s = q(D)L̇` on the periodic grid.
//!
//! On a lattice with even `n` the Nyquist frequency `−πn/L` has no partner
//! `+πn/L`. A symbol evaluated there as-is breaks the conjugate symmetry that
//! keeps real fields real, so at every mode with Nyquist components the
//! discrete symbol is the average over the sign flips of those components.
//! Elsewhere it is the plain symbol value.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid_field::{dft, idft, Domain, Field, Grid};
use crate::levy_noise::{LevyTriplet, NoiseRealization, NoiseSampler};
use crate::poly_multiplier::{check_nonvanishing, MultiPoly, RationalMultiplier};
use crate::stats::{ks_two_sample, KsResult};

/// Evaluate `symbol` at every lattice frequency, averaging over Nyquist sign flips.
pub fn discrete_symbol(grid: &Grid, symbol: impl Fn(&[f64]) -> Complex64) -> Vec<Complex64> {
    (0..grid.len())
        .map(|i| {
            let xi = grid.frequency(i);
            let axes = grid.nyquist_axes(i);
            if axes.is_empty() {
                return symbol(&xi);
            }
            let flips = 1usize << axes.len();
            let mut acc = Complex64::new(0.0, 0.0);
            for mask in 0..flips {
                let mut x = xi.clone();
                for (b, &a) in axes.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        x[a] = -x[a];
                    }
                }
                acc += symbol(&x);
            }
            acc / flips as f64
        })
        .collect()
}

/// A Fourier multiplier tabulated on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    grid: Grid,
    values: Vec<Complex64>,
    gauged: bool,
}

impl SpectralMultiplier {
    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} multiplier values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(SpectralMultiplier {
            grid: grid.clone(),
            values,
            gauged: false,
        })
    }

    /// Discrete `q(iξ)/p(iξ)`. With `zero_mean_gauge`, a denominator that
    /// vanishes only at `ξ = 0` is accepted and the zero mode is set to 0.
    pub fn rational(m: &RationalMultiplier, grid: &Grid, zero_mean_gauge: bool) -> Result<Self> {
        let p = DiscretePoly::new(m.p(), grid)?;
        let q = DiscretePoly::new(m.q(), grid)?;
        let gauged = p.check(zero_mean_gauge)?;
        let mut values: Vec<Complex64> = q.values.iter().zip(&p.values).map(|(a, b)| a / b).collect();
        if gauged {
            values[0] = Complex64::new(0.0, 0.0);
        }
        Ok(SpectralMultiplier {
            grid: grid.clone(),
            values,
            gauged,
        })
    }

    /// Discrete `1/p(iξ)`.
    pub fn inverse(p: &MultiPoly, grid: &Grid, zero_mean_gauge: bool) -> Result<Self> {
        Self::rational(&RationalMultiplier::inverse_of(p.clone())?, grid, zero_mean_gauge)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Whether the zero mode was removed by the gauge.
    pub fn gauged(&self) -> bool {
        self.gauged
    }

    pub fn apply_spectral(&self, spec: &Field) -> Result<Field> {
        spec.require(Domain::Spectral)?;
        if spec.grid() != &self.grid {
            return Err(Error::ShapeMismatch("field grid differs from multiplier grid".into()));
        }
        let mut out = spec.clone();
        for (v, m) in out.values_mut().iter_mut().zip(&self.values) {
            *v *= m;
        }
        Ok(out)
    }

    /// `F^{-1}(m · F f)` for a physical field.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        f.require(Domain::Physical)?;
        idft(&self.apply_spectral(&dft(f)?)?)
    }
}

/// A polynomial's discrete symbol on a grid.
#[derive(Debug, Clone)]
pub struct DiscretePoly {
    poly: MultiPoly,
    grid: Grid,
    values: Vec<Complex64>,
}

impl DiscretePoly {
    pub fn new(poly: &MultiPoly, grid: &Grid) -> Result<Self> {
        if poly.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: poly.dim(),
            });
        }
        let values = discrete_symbol(grid, |xi| poly.eval_at_i_xi(xi).expect("dimension checked"));
        Ok(DiscretePoly {
            poly: poly.clone(),
            grid: grid.clone(),
            values,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Rejects zeros on the axis; returns whether the zero-mean gauge was needed.
    fn check(&self, zero_mean_gauge: bool) -> Result<bool> {
        let threshold = self.poly.zero_threshold();
        let result = check_nonvanishing(&self.poly, &self.grid).and_then(|_| {
            // Averaging can cancel at Nyquist modes even when p itself does not vanish.
            match self
                .values
                .iter()
                .enumerate()
                .find(|(_, v)| v.norm() < threshold)
            {
                Some((i, v)) => Err(Error::ZeroOnAxis {
                    xi: self.grid.frequency(i),
                    modulus: v.norm(),
                    threshold,
                }),
                None => Ok(()),
            }
        });
        match result {
            Ok(()) => Ok(false),
            Err(Error::ZeroOnAxis { xi, modulus, threshold })
                if zero_mean_gauge && xi.iter().all(|&x| x == 0.0) =>
            {
                let others_ok = self.values[1..].iter().all(|v| v.norm() >= threshold);
                if others_ok {
                    Ok(true)
                } else {
                    let i = 1 + self.values[1..]
                        .iter()
                        .position(|v| v.norm() < threshold)
                        .expect("some value below threshold");
                    Err(Error::ZeroOnAxis {
                        xi: self.grid.frequency(i),
                        modulus: self.values[i].norm().min(modulus),
                        threshold,
                    })
                }
            }
            Err(e) => Err(e),
        }
    }
}

/// `F^{-1}((q/p)(i·) F f)`.
pub fn apply_multiplier(m: &RationalMultiplier, f: &Field) -> Result<Field> {
    SpectralMultiplier::rational(m, f.grid(), false)?.apply(f)
}

/// A solved linear field with the spectra that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub field: Field,
    pub spectrum: Field,
    pub noise_spectrum: Field,
    pub gauged: bool,
}

/// Reusable solver for `p(D)s = q(D)L̇` on one grid.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    p: DiscretePoly,
    q: DiscretePoly,
    multiplier: SpectralMultiplier,
}

impl LinearSolver {
    pub fn new(p: &MultiPoly, q: &MultiPoly, grid: &Grid, zero_mean_gauge: bool) -> Result<Self> {
        let m = RationalMultiplier::new(q.clone(), p.clone())?;
        Ok(LinearSolver {
            p: DiscretePoly::new(p, grid)?,
            q: DiscretePoly::new(q, grid)?,
            multiplier: SpectralMultiplier::rational(&m, grid, zero_mean_gauge)?,
        })
    }

    pub fn multiplier(&self) -> &SpectralMultiplier {
        &self.multiplier
    }

    /// Solve with right-hand side the density field `X_i / h^d` of the noise.
    pub fn solve(&self, noise: &NoiseRealization) -> Result<LinearSolution> {
        self.solve_density(&noise.density_field())
    }

    pub fn solve_density(&self, density: &Field) -> Result<LinearSolution> {
        let noise_spectrum = dft(density)?;
        let spectrum = self.multiplier.apply_spectral(&noise_spectrum)?;
        Ok(LinearSolution {
            field: idft(&spectrum)?,
            spectrum,
            noise_spectrum,
            gauged: self.multiplier.gauged,
        })
    }

    /// Largest per-mode relative residual `|p ŝ − q L̂| / max(|p ŝ|, |q L̂|)`,
    /// skipping a gauged zero mode.
    pub fn residual(&self, sol: &LinearSolution) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, ((s, l), (p, q))) in sol
            .spectrum
            .values()
            .iter()
            .zip(sol.noise_spectrum.values())
            .zip(self.p.values.iter().zip(&self.q.values))
            .enumerate()
        {
            if i == 0 && sol.gauged {
                continue;
            }
            let lhs = p * s;
            let rhs = q * l;
            let scale = lhs.norm().max(rhs.norm());
            if scale > 0.0 {
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
        worst
    }
}

/// `s` with `p(D)s = q(D)L̇` for one noise realization.
pub fn solve_linear(p: &MultiPoly, q: &MultiPoly, noise: &NoiseRealization) -> Result<Field> {
    Ok(LinearSolver::new(p, q, &noise.grid, false)?.solve(noise)?.field)
}

/// Per-mode variance of `ŝ` over replicates, normalized by the box volume.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceSpectrum {
    pub frequencies: Vec<Vec<f64>>,
    pub empirical: Vec<f64>,
    /// `(a + ∫x²ν)|q/p|²`, absent when the second moment diverges.
    pub theoretical: Option<Vec<f64>>,
}

impl VarianceSpectrum {
    pub fn write_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        let d = self.frequencies.first().map_or(0, Vec::len);
        let cols: Vec<String> = (1..=d).map(|j| format!("xi{j}")).collect();
        writeln!(out, "{},empirical,theoretical", cols.join(","))?;
        for (i, xi) in self.frequencies.iter().enumerate() {
            let coords: Vec<String> = xi.iter().map(|x| format!("{x:?}")).collect();
            let theo = self
                .theoretical
                .as_ref()
                .map_or_else(|| "inf".to_string(), |t| format!("{:?}", t[i]));
            writeln!(out, "{},{:?},{}", coords.join(","), self.empirical[i], theo)?;
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
pub fn variance_spectrum(
    p: &MultiPoly,
    q: &MultiPoly,
    triplet: &LevyTriplet,
    grid: &Grid,
    delta: f64,
    n_reps: usize,
    base_seed: u64,
) -> Result<VarianceSpectrum> {
    if n_reps < 2 {
        return Err(Error::InvalidParameter("variance spectrum needs at least 2 replicates".into()));
    }
    let solver = LinearSolver::new(p, q, grid, false)?;
    let sampler = NoiseSampler::new(triplet, grid, delta)?;
    let n = grid.len();
    let mut sum = vec![Complex64::new(0.0, 0.0); n];
    let mut sum_sq = vec![0.0; n];
    for i in 0..n_reps as u64 {
        let sol = solver.solve(&sampler.sample(base_seed.wrapping_add(i)))?;
        for (k, v) in sol.spectrum.values().iter().enumerate() {
            sum[k] += v;
            sum_sq[k] += v.norm_sqr();
        }
    }
    let reps = n_reps as f64;
    let vol = grid.volume();
    let empirical = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, sq)| ((sq - s.norm_sqr() / reps) / (reps - 1.0)).max(0.0) / vol)
        .collect();
    let theoretical = triplet.variance_rate().value().map(|v| {
        solver
            .multiplier
            .values
            .iter()
            .map(|m| v * m.norm_sqr())
            .collect()
    });
    Ok(VarianceSpectrum {
        frequencies: grid.frequencies(),
        empirical,
        theoretical,
    })
}

/// The fixed battery of five compactly supported test functions.
pub fn stationarity_test_functions(grid: &Grid) -> Vec<Field> {
    let half: Vec<f64> = grid.box_length().iter().map(|l| 0.5 * l).collect();
    let specs: [(f64, f64, f64); 5] = [
        // (centre as a fraction of L/2, radius as a fraction of L/2, oscillation)
        (0.0, 0.25, 0.0),
        (0.3, 0.15, 0.0),
        (-0.4, 0.3, 0.0),
        (0.1, 0.4, 3.0),
        (-0.2, 0.1, 0.0),
    ];
    specs
        .iter()
        .map(|&(c, r, osc)| {
            Field::from_fn(grid, |x| {
                let mut q = 0.0;
                for (a, xa) in x.iter().enumerate() {
                    let u = (xa - c * half[a]) / (r * half[a]);
                    q += u * u;
                }
                if q >= 1.0 {
                    return 0.0;
                }
                let bump = (1.0 - 1.0 / (1.0 - q)).exp();
                bump * (osc * q.sqrt()).cos()
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftResult {
    pub shift: Vec<i64>,
    pub statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub shifts: Vec<ShiftResult>,
    pub passed: bool,
}

impl StationarityReport {
    pub fn write_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(out, "shift,test_function,statistic,p_value")?;
        for s in &self.shifts {
            let shift: Vec<String> = s.shift.iter().map(i64::to_string).collect();
            for (j, (d, p)) in s.statistics.iter().zip(&s.p_values).enumerate() {
                writeln!(out, "{},{j},{d:?},{p:?}", shift.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Minimum p-value for a test function to pass.
pub const STATIONARITY_LEVEL: f64 = 0.01;
/// Test functions out of five that must pass for a shift to pass.
pub const STATIONARITY_QUORUM: usize = 4;

/// KS comparison of `⟨s, φ⟩` against `⟨s(·+t), φ⟩` using independent
/// replicate sets: seeds `base..base+N` unshifted, `base+N..base+2N` shifted.
pub fn stationarity_test_with(
    grid: &Grid,
    generator: &dyn Fn(u64) -> Result<Field>,
    shifts: &[Vec<i64>],
    n_reps: usize,
    base_seed: u64,
) -> Result<StationarityReport> {
    let tests = stationarity_test_functions(grid);
    let pair = |f: &Field, phi: &Field| -> Result<f64> { Ok(f.pairing(phi)?.re) };
    let mut plain: Vec<Vec<f64>> = vec![Vec::with_capacity(n_reps); tests.len()];
    let mut fields_b = Vec::with_capacity(n_reps);
    for i in 0..n_reps as u64 {
        let a = generator(base_seed.wrapping_add(i))?;
        for (j, phi) in tests.iter().enumerate() {
            plain[j].push(pair(&a, phi)?);
        }
        fields_b.push(generator(base_seed.wrapping_add(n_reps as u64 + i))?);
    }
    let mut results = Vec::with_capacity(shifts.len());
    for shift in shifts {
        let mut shifted: Vec<Vec<f64>> = vec![Vec::with_capacity(n_reps); tests.len()];
        for b in &fields_b {
            let moved = b.shifted(shift)?;
            for (j, phi) in tests.iter().enumerate() {
                shifted[j].push(pair(&moved, phi)?);
            }
        }
        let ks: Vec<KsResult> = plain.iter().zip(&shifted).map(|(a, b)| ks_two_sample(a, b)).collect();
        let passing = ks.iter().filter(|r| r.p_value > STATIONARITY_LEVEL).count();
        results.push(ShiftResult {
            shift: shift.clone(),
            statistics: ks.iter().map(|r| r.statistic).collect(),
            p_values: ks.iter().map(|r| r.p_value).collect(),
            passed: passing >= STATIONARITY_QUORUM,
        });
    }
    let passed = results.iter().all(|r| r.passed);
    Ok(StationarityReport {
        shifts: results,
        passed,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn stationarity_test(
    p: &MultiPoly,
    q: &MultiPoly,
    triplet: &LevyTriplet,
    grid: &Grid,
    delta: f64,
    shifts: &[Vec<i64>],
    n_reps: usize,
    base_seed: u64,
) -> Result<StationarityReport> {
    let solver = LinearSolver::new(p, q, grid, false)?;
    let sampler = NoiseSampler::new(triplet, grid, delta)?;
    let generator = |seed: u64| -> Result<Field> { Ok(solver.solve(&sampler.sample(seed))?.field) };
    stationarity_test_with(grid, &generator, shifts, n_reps, base_seed)
}
