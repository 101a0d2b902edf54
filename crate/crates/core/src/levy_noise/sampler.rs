use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::LevyTriplet;
use crate::error::{Error, Result};
use crate::grid_field::{read_field_with_meta, write_field_with_meta, Domain, Field, Grid};
use crate::levy_measure::{check_delta, Density};

/// Value of the `x-kind` header line for noise files.
pub const NOISE_KIND: &str = "noise-cell-integrals";

/// One draw of the discretized white noise: the integral of `L̇` over each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub grid: Grid,
    pub cell_integrals: Vec<f64>,
    pub seed: u64,
    pub triplet: LevyTriplet,
    pub delta: f64,
}

impl NoiseRealization {
    /// `Σ φ(x_i) X_i`, the discrete pairing `⟨L̇, φ⟩`.
    pub fn pairing(&self, phi: &Field) -> Result<f64> {
        phi.require(Domain::Physical)?;
        if phi.grid() != &self.grid {
            return Err(Error::ShapeMismatch("test function grid differs from noise grid".into()));
        }
        Ok(phi
            .values()
            .iter()
            .zip(&self.cell_integrals)
            .map(|(p, x)| p.re * x)
            .sum())
    }

    /// The cell integrals as a physical field.
    pub fn to_field(&self) -> Field {
        Field::from_real(&self.grid, &self.cell_integrals).expect("length matches grid")
    }

    /// Cell integrals divided by the cell volume: the noise as a grid density,
    /// suitable as a right-hand side.
    pub fn density_field(&self) -> Field {
        self.to_field().scale(1.0 / self.grid.cell_volume())
    }

    fn meta(&self) -> Vec<(String, String)> {
        vec![
            ("kind".into(), NOISE_KIND.into()),
            ("seed".into(), self.seed.to_string()),
            ("delta".into(), format!("{:?}", self.delta)),
            (
                "triplet".into(),
                serde_json::to_string(&self.triplet).expect("triplet serializes"),
            ),
        ]
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_field_with_meta(&self.to_field(), &self.meta(), path)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let (field, meta) = read_field_with_meta(path)?;
        Self::from_field(field, &meta)
    }

    pub fn from_field(field: Field, meta: &[(String, String)]) -> Result<Self> {
        let get = |k: &str| {
            meta.iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::MalformedHeader(format!("noise file lacks x-{k}")))
        };
        if get("kind")? != NOISE_KIND {
            return Err(Error::MalformedHeader("x-kind is not a noise realization".into()));
        }
        let bad = |k: &str| Error::MalformedHeader(format!("bad x-{k} value"));
        let seed = get("seed")?.parse().map_err(|_| bad("seed"))?;
        let delta = get("delta")?.parse().map_err(|_| bad("delta"))?;
        let triplet = serde_json::from_str(get("triplet")?).map_err(|_| bad("triplet"))?;
        field.require(Domain::Physical)?;
        Ok(NoiseRealization {
            grid: field.grid().clone(),
            cell_integrals: field.real_parts(),
            seed,
            triplet,
            delta,
        })
    }
}

/// A jump-law piece: normalized sampling from one part of `ν` restricted to `|x| > δ`.
#[derive(Debug, Clone)]
enum JumpPiece {
    Atom(f64),
    /// `coeff·t^{-p}` for magnitude `t` in `[lo, hi]`, reflected when `negative`.
    Power { exponent: f64, lo: f64, hi: f64, negative: bool },
    /// Linear segment from `(x0, y0)` to `(x1, y1)`.
    Linear { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl JumpPiece {
    fn sample(&self, u: f64) -> f64 {
        match *self {
            JumpPiece::Atom(x) => x,
            JumpPiece::Power { exponent, lo, hi, negative } => {
                let t = if (exponent - 1.0).abs() < 1e-12 {
                    lo * (hi / lo).powf(u)
                } else {
                    let q = 1.0 - exponent;
                    let a = lo.powf(q);
                    let b = hi.powf(q);
                    (a + u * (b - a)).powf(1.0 / q).clamp(lo, hi)
                };
                if negative {
                    -t
                } else {
                    t
                }
            }
            JumpPiece::Linear { x0, y0, x1, y1 } => {
                let w = x1 - x0;
                let slope = (y1 - y0) / w;
                let m = u * 0.5 * (y0 + y1) * w;
                let disc = (y0 * y0 + 2.0 * slope * m).max(0.0);
                let denom = y0 + disc.sqrt();
                let t = if denom > 0.0 { 2.0 * m / denom } else { 0.0 };
                x0 + t.clamp(0.0, w)
            }
        }
    }
}

fn power_mass(coeff: f64, exponent: f64, lo: f64, hi: f64) -> f64 {
    if (exponent - 1.0).abs() < 1e-12 {
        coeff * (hi / lo).ln()
    } else {
        let q = 1.0 - exponent;
        coeff * (hi.powf(q) - lo.powf(q)) / q
    }
}

/// Pieces of `ν` on `|x| > δ` with their masses.
fn jump_pieces(triplet: &LevyTriplet, delta: f64) -> Vec<(f64, JumpPiece)> {
    let mut out = Vec::new();
    for a in triplet.nu().atoms() {
        if a.location.abs() > delta && a.weight > 0.0 {
            out.push((a.weight, JumpPiece::Atom(a.location)));
        }
    }
    for d in triplet.nu().densities() {
        match d {
            Density::Power { coeff, exponent, lower, upper } => {
                let negative = *upper <= 0.0;
                let (mut lo, hi) = if negative { (-upper, -lower) } else { (*lower, *upper) };
                lo = lo.max(delta);
                if lo < hi && *coeff > 0.0 {
                    let mass = power_mass(*coeff, *exponent, lo, hi);
                    if mass > 0.0 && mass.is_finite() {
                        out.push((mass, JumpPiece::Power { exponent: *exponent, lo, hi, negative }));
                    }
                }
            }
            Density::Tabulated { points } => {
                for seg in points.windows(2) {
                    let [mut x0, mut y0] = seg[0];
                    let [mut x1, mut y1] = seg[1];
                    let interp = |x: f64| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
                    if x0 >= 0.0 {
                        if x1 <= delta {
                            continue;
                        }
                        if x0 < delta {
                            y0 = interp(delta);
                            x0 = delta;
                        }
                    } else {
                        if x0 >= -delta {
                            continue;
                        }
                        if x1 > -delta {
                            y1 = interp(-delta);
                            x1 = -delta;
                        }
                    }
                    let mass = 0.5 * (y0 + y1) * (x1 - x0);
                    if mass > 0.0 {
                        out.push((mass, JumpPiece::Linear { x0, y0, x1, y1 }));
                    }
                }
            }
        }
    }
    out
}

/// Precomputed per-cell law; draws many realizations on one grid cheaply.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    triplet: LevyTriplet,
    grid: Grid,
    delta: f64,
    drift: f64,
    sd: f64,
    intensity: f64,
    pieces: Vec<JumpPiece>,
    cumulative: Vec<f64>,
}

impl NoiseSampler {
    pub fn new(triplet: &LevyTriplet, grid: &Grid, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        let nu = triplet.nu();
        let small_var = nu.small_jump_variance(delta)?;
        let (tail_mass, comp_mean) = nu.tail_mass_and_compensator(delta)?;
        let h = grid.cell_volume();
        let weighted = jump_pieces(triplet, delta);
        let total: f64 = weighted.iter().map(|(m, _)| m).sum();
        let mut acc = 0.0;
        let cumulative = weighted
            .iter()
            .map(|(m, _)| {
                acc += m / total;
                acc
            })
            .collect();
        Ok(NoiseSampler {
            triplet: triplet.clone(),
            grid: grid.clone(),
            delta,
            drift: h * (triplet.gamma() - comp_mean),
            sd: (h * (triplet.a() + small_var)).sqrt(),
            intensity: if weighted.is_empty() { 0.0 } else { h * tail_mass },
            pieces: weighted.into_iter().map(|(_, p)| p).collect(),
            cumulative,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Poisson intensity of jumps per cell.
    pub fn cell_jump_intensity(&self) -> f64 {
        self.intensity
    }

    fn jump(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        let k = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.pieces.len() - 1);
        self.pieces[k].sample(rng.random())
    }

    fn cell(&self, rng: &mut ChaCha8Rng, poisson: Option<&Poisson<f64>>) -> f64 {
        let mut v = self.drift;
        if self.sd > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            v += self.sd * z;
        }
        if let Some(p) = poisson {
            let n = p.sample(rng) as u64;
            for _ in 0..n {
                v += self.jump(rng);
            }
        }
        v
    }

    pub fn sample(&self, seed: u64) -> NoiseRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poisson = (self.intensity > 0.0).then(|| Poisson::new(self.intensity).expect("positive intensity"));
        let cell_integrals = (0..self.grid.len())
            .map(|_| self.cell(&mut rng, poisson.as_ref()))
            .collect();
        NoiseRealization {
            grid: self.grid.clone(),
            cell_integrals,
            seed,
            triplet: self.triplet.clone(),
            delta: self.delta,
        }
    }

    /// Realizations for seeds `base_seed + i`, `i < count`.
    pub fn replicates(&self, base_seed: u64, count: usize) -> Vec<NoiseRealization> {
        (0..count as u64).map(|i| self.sample(base_seed.wrapping_add(i))).collect()
    }

    /// Characteristic function of one cell integral, `exp(h^d ψ(z))`.
    pub fn cell_characteristic_function(&self, z: f64) -> Result<Complex64> {
        Ok((super::levy_symbol(&self.triplet, z)? * self.grid.cell_volume()).exp())
    }
}

/// Draw one realization; identical arguments give bit-identical output.
pub fn sample_noise(triplet: &LevyTriplet, grid: &Grid, delta: f64, seed: u64) -> Result<NoiseRealization> {
    Ok(NoiseSampler::new(triplet, grid, delta)?.sample(seed))
}
