//! Dyadic partition of unity, Littlewood–Paley blocks and weighted Besov norms.
//!
//! `φ₀` is radial, equal to 1 on `‖ξ‖ ≤ 1` and 0 on `‖ξ‖ ≥ 3/2`, with the
//! C^∞ transition `S(3 − 2t)`, `S(s) = g(s)/(g(s) + g(1 − s))`,
//! `g(s) = exp(−sharpness/s)`. Higher blocks are `φ_k(ξ) = φ₀(2^{-k}ξ) − φ₀(2^{1-k}ξ)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::grid_field::{dft, idft, japanese_brackets, weighted_lr, Domain, Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicPartition {
    sharpness: f64,
}

impl Default for DyadicPartition {
    fn default() -> Self {
        DyadicPartition {
            sharpness: defaults::PARTITION_SHARPNESS,
        }
    }
}

pub fn make_partition(sharpness: f64) -> Result<DyadicPartition> {
    if !(sharpness > 0.0 && sharpness.is_finite()) {
        return Err(Error::InvalidParameter(format!("partition sharpness {sharpness} must be > 0")));
    }
    Ok(DyadicPartition { sharpness })
}

impl DyadicPartition {
    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    fn step(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        let g = |u: f64| (-self.sharpness / u).exp();
        let a = g(s);
        a / (a + g(1.0 - s))
    }

    /// `φ₀` at radius `t = ‖ξ‖`.
    pub fn phi0(&self, t: f64) -> f64 {
        if t <= 1.0 {
            1.0
        } else if t >= 1.5 {
            0.0
        } else {
            self.step(3.0 - 2.0 * t)
        }
    }

    /// `φ_k` at radius `t`.
    pub fn phi(&self, k: u32, t: f64) -> f64 {
        if k == 0 {
            self.phi0(t)
        } else {
            let s = (-(k as i32) as f64).exp2() * t;
            self.phi0(s) - self.phi0(2.0 * s)
        }
    }

    /// Smallest `K` with `2^K ≥ max‖ξ‖` on the lattice: blocks `0..=K`
    /// sum to one at every grid frequency.
    pub fn k_max(&self, grid: &Grid) -> u32 {
        let m = grid.max_frequency_norm();
        if m <= 1.0 {
            0
        } else {
            m.log2().ceil() as u32
        }
    }

    /// Whether the support of `φ_k` reaches past the Nyquist radius.
    pub fn is_truncated(&self, k: u32, grid: &Grid) -> bool {
        let outer = if k == 0 { 1.5 } else { 3.0 * (k as f64 - 1.0).exp2() };
        outer > grid.nyquist_radius()
    }
}

/// One Littlewood–Paley block `Δ_k f` with its truncation flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub k: u32,
    pub field: Field,
    pub truncated: bool,
}

/// `Δ_k f = F^{-1}(φ_k F f)`.
pub fn lp_block(f: &Field, k: u32, part: &DyadicPartition) -> Result<Block> {
    f.require(Domain::Physical)?;
    let spec = dft(f)?;
    block_from_spectrum(&spec, &spec.grid().frequency_norms(), k, part)
}

fn block_from_spectrum(spec: &Field, norms: &[f64], k: u32, part: &DyadicPartition) -> Result<Block> {
    let mut filtered = spec.clone();
    for (v, &t) in filtered.values_mut().iter_mut().zip(norms) {
        *v *= part.phi(k, t);
    }
    Ok(Block {
        k,
        field: idft(&filtered)?,
        truncated: part.is_truncated(k, spec.grid()),
    })
}

/// All blocks `Δ_0 f, …, Δ_{K_max} f` from one forward transform.
pub fn lp_blocks(f: &Field, part: &DyadicPartition) -> Result<Vec<Block>> {
    f.require(Domain::Physical)?;
    let spec = dft(f)?;
    let norms = spec.grid().frequency_norms();
    (0..=part.k_max(f.grid()))
        .map(|k| block_from_spectrum(&spec, &norms, k, part))
        .collect()
}

/// `(l, r, t, ρ)`: smoothness, integrability, summability and weight exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BesovSpec", into = "BesovSpec")]
pub struct BesovParams {
    pub l: f64,
    pub r: f64,
    pub t: f64,
    pub rho: f64,
}

#[derive(Serialize, Deserialize)]
struct BesovSpec {
    l: f64,
    r: f64,
    t: f64,
    rho: f64,
}

impl TryFrom<BesovSpec> for BesovParams {
    type Error = Error;
    fn try_from(s: BesovSpec) -> Result<Self> {
        BesovParams::new(s.l, s.r, s.t, s.rho)
    }
}

impl From<BesovParams> for BesovSpec {
    fn from(p: BesovParams) -> Self {
        BesovSpec {
            l: p.l,
            r: p.r,
            t: p.t,
            rho: p.rho,
        }
    }
}

impl BesovParams {
    pub fn new(l: f64, r: f64, t: f64, rho: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidR(r));
        }
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("summability t = {t} must be > 0")));
        }
        if !(l.is_finite() && rho.is_finite()) {
            return Err(Error::InvalidParameter("smoothness and weight must be finite".into()));
        }
        Ok(BesovParams { l, r, t, rho })
    }
}

/// A Besov norm with its per-block terms `2^{lk}‖Δ_k f‖_{L^r(ρ)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovNorm {
    pub value: f64,
    pub terms: Vec<f64>,
    pub truncated: Vec<bool>,
}

impl BesovNorm {
    pub fn any_truncated(&self) -> bool {
        self.truncated.iter().any(|&t| t)
    }
}

fn lt_aggregate(terms: &[f64], t: f64) -> f64 {
    if t.is_infinite() {
        terms.iter().cloned().fold(0.0, f64::max)
    } else {
        terms.iter().map(|x| x.powf(t)).sum::<f64>().powf(1.0 / t)
    }
}

/// `‖(2^{lk}‖Δ_k f‖_{L^r(ρ)})_k‖_{ℓ^t}` over blocks `0..=K_max`.
pub fn besov_norm(f: &Field, params: &BesovParams, part: &DyadicPartition) -> Result<BesovNorm> {
    let blocks = lp_blocks(f, part)?;
    let brackets = japanese_brackets(f.grid());
    Ok(norm_from_blocks(&blocks, &brackets, params))
}

fn norm_from_blocks(blocks: &[Block], brackets: &[f64], params: &BesovParams) -> BesovNorm {
    let terms: Vec<f64> = blocks
        .iter()
        .map(|b| (params.l * b.k as f64).exp2() * weighted_lr(&b.field, brackets, params.r, params.rho))
        .collect();
    BesovNorm {
        value: lt_aggregate(&terms, params.t),
        terms,
        truncated: blocks.iter().map(|b| b.truncated).collect(),
    }
}

/// Reusable evaluator for repeated Besov norms on one grid.
#[derive(Debug, Clone)]
pub struct BesovEvaluator {
    grid: Grid,
    params: BesovParams,
    part: DyadicPartition,
    norms: Vec<f64>,
    brackets: Vec<f64>,
}

impl BesovEvaluator {
    pub fn new(grid: &Grid, params: BesovParams, part: DyadicPartition) -> Self {
        BesovEvaluator {
            grid: grid.clone(),
            params,
            part,
            norms: grid.frequency_norms(),
            brackets: japanese_brackets(grid),
        }
    }

    pub fn params(&self) -> &BesovParams {
        &self.params
    }

    pub fn brackets(&self) -> &[f64] {
        &self.brackets
    }

    /// Norm of a field given in either domain.
    pub fn norm(&self, f: &Field) -> Result<f64> {
        Ok(self.detailed(f)?.value)
    }

    pub fn detailed(&self, f: &Field) -> Result<BesovNorm> {
        if f.grid() != &self.grid {
            return Err(Error::ShapeMismatch("field grid differs from evaluator grid".into()));
        }
        let spec = match f.domain() {
            Domain::Physical => dft(f)?,
            Domain::Spectral => f.clone(),
        };
        let blocks = (0..=self.part.k_max(&self.grid))
            .map(|k| block_from_spectrum(&spec, &self.norms, k, &self.part))
            .collect::<Result<Vec<_>>>()?;
        Ok(norm_from_blocks(&blocks, &self.brackets, &self.params))
    }

    /// `‖f‖_{L^r(ρ)}` with the evaluator's `r` and `ρ`.
    pub fn lr_norm(&self, f: &Field) -> Result<f64> {
        f.require(Domain::Physical)?;
        Ok(weighted_lr(f, &self.brackets, self.params.r, self.params.rho))
    }
}

/// Squared `L²` norms `‖Δ_k f‖²` of every block.
pub fn block_energies(f: &Field, part: &DyadicPartition) -> Result<Vec<f64>> {
    Ok(lp_blocks(f, part)?
        .iter()
        .map(|b| b.field.l2_norm().powi(2))
        .collect())
}

/// CSV `k,value,truncated` of the Besov terms.
pub fn write_block_csv(norm: &BesovNorm, mut out: impl Write) -> Result<()> {
    writeln!(out, "k,value,truncated")?;
    for (k, (v, t)) in norm.terms.iter().zip(&norm.truncated).enumerate() {
        writeln!(out, "{k},{v:?},{t}")?;
    }
    Ok(())
}

/// `W^l_2` norm in its Besov form and, for `ρ = 0`, the spectral form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SobolevNorm {
    pub besov: f64,
    /// `(Σ ⟨ξ⟩^{2l} |f̂(ξ)|² Δξ^d/(2π)^d)^{1/2}`.
    pub spectral: Option<f64>,
    /// Range of `besov/spectral` over all fields on this grid.
    pub bracket: Option<(f64, f64)>,
}

/// Exact range of the ratio between the Besov and spectral Sobolev forms on a
/// grid: `sqrt` of the extremes of `Σ_k 2^{2lk} φ_k(ξ)² / ⟨ξ⟩^{2l}` over lattice `ξ`.
pub fn sobolev_equivalence_bracket(grid: &Grid, l: f64, part: &DyadicPartition) -> (f64, f64) {
    let kmax = part.k_max(grid);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for t in grid.frequency_norms() {
        let w: f64 = (0..=kmax)
            .map(|k| (2.0 * l * k as f64).exp2() * part.phi(k, t).powi(2))
            .sum();
        let ratio = w / (1.0 + t * t).powf(l);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo.sqrt(), hi.sqrt())
}

pub fn sobolev_norm(f: &Field, l: f64, rho: f64, part: &DyadicPartition) -> Result<SobolevNorm> {
    let besov = besov_norm(f, &BesovParams::new(l, 2.0, 2.0, rho)?, part)?.value;
    if rho != 0.0 {
        return Ok(SobolevNorm {
            besov,
            spectral: None,
            bracket: None,
        });
    }
    let spec = dft(f)?;
    let grid = f.grid();
    let weight = grid.frequency_cell() / (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
    let sum: f64 = spec
        .values()
        .iter()
        .zip(grid.frequency_norms())
        .map(|(v, t)| (1.0 + t * t).powf(l) * v.norm_sqr())
        .sum();
    Ok(SobolevNorm {
        besov,
        spectral: Some((sum * weight).sqrt()),
        bracket: Some(sobolev_equivalence_bracket(grid, l, part)),
    })
}

/// `(τ, p, ρ)` describing `B^τ_{p,·}(ℝ^d, ρ)`; `p` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceIndex {
    pub tau: f64,
    pub p: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingVerdict {
    Embedded,
    CompactlyEmbedded,
    NotImplied,
}

impl std::fmt::Display for EmbeddingVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EmbeddingVerdict::Embedded => "embedded",
            EmbeddingVerdict::CompactlyEmbedded => "compactly_embedded",
            EmbeddingVerdict::NotImplied => "not_implied",
        })
    }
}

/// Sufficient conditions for `B^{τ₀}_{p₀}(ρ₀) ↪ B^{τ₁}_{p₁}(ρ₁)`:
/// `τ₀ − τ₁ ≥ d/p₀ − d/p₁`, `p₁ ≥ p₀`, `ρ₀ ≥ ρ₁`; compact when all are strict.
pub fn embedding_check(src: SpaceIndex, dst: SpaceIndex, d: usize) -> Result<EmbeddingVerdict> {
    for s in [src, dst] {
        if !(s.p > 0.0) {
            return Err(Error::InvalidR(s.p));
        }
    }
    if src.tau < dst.tau {
        return Err(Error::PreconditionViolated(format!(
            "source smoothness {} is below target smoothness {}",
            src.tau, dst.tau
        )));
    }
    let d = d as f64;
    let gap = src.tau - dst.tau;
    let needed = d / src.p - d / dst.p;
    let conditions = [(gap, needed), (dst.p, src.p), (src.rho, dst.rho)];
    if conditions.iter().any(|(a, b)| a < b) {
        Ok(EmbeddingVerdict::NotImplied)
    } else if conditions.iter().all(|(a, b)| a > b) {
        Ok(EmbeddingVerdict::CompactlyEmbedded)
    } else {
        Ok(EmbeddingVerdict::Embedded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn part() -> DyadicPartition {
        DyadicPartition::default()
    }

    /// Real field with random Fourier coefficients on `‖ξ‖ ≤ cutoff`.
    fn band_limited(grid: &Grid, cutoff: f64, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = Field::spectral_from_fn(grid, |xi| {
            let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if n <= cutoff {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        idft(&spec).unwrap().real()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn profile_examples() {
        let p = part();
        assert_eq!(p.phi0(0.9), 1.0);
        assert_eq!(p.phi0(1.6), 0.0);
        assert_eq!(p.phi0(1.0), 1.0);
        assert_eq!(p.phi0(1.5), 0.0);
        assert!((p.phi0(1.25) - 0.5).abs() < 1e-15);
        for i in 0..=1000 {
            let t = 2.0 * i as f64 / 1000.0;
            let v = p.phi0(t);
            assert!((0.0..=1.0).contains(&v));
        }
        assert!(make_partition(0.0).is_err());
    }

    #[test]
    fn telescoping_to_64() {
        let p = part();
        let g = Grid::cube(2, 128, 2.0 * PI).unwrap();
        for t in g.frequency_norms() {
            if t <= 64.0 {
                let s: f64 = (0..=6).map(|k| p.phi(k, t)).sum();
                assert!((s - 1.0).abs() < 1e-12, "{t}: {s}");
            }
        }
    }

    #[test]
    fn block_supports() {
        let p = part();
        for k in 1..8u32 {
            let lo = (k as f64 - 1.0).exp2();
            for i in 0..200 {
                let t = 4.0 * lo * i as f64 / 200.0;
                if t < lo || t > 3.0 * lo {
                    assert_eq!(p.phi(k, t), 0.0);
                }
            }
        }
    }

    #[test]
    fn low_band_field_is_block_zero() {
        let g = Grid::cube(1, 64, 2.0 * PI).unwrap();
        let f = band_limited(&g, 1.0, 1);
        let blocks = lp_blocks(&f, &part()).unwrap();
        assert!(max_diff(&blocks[0].field, &f) < 1e-12);
        for b in &blocks[1..] {
            assert!(b.field.max_abs() < 1e-10);
        }
        let params = BesovParams::new(1.7, 2.0, 1.0, 0.0).unwrap();
        let n = besov_norm(&f, &params, &part()).unwrap().value;
        let direct = crate::grid_field::weighted_lr_norm(&f, 2.0, 0.0).unwrap();
        assert!((n - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn single_mode_at_three() {
        let g = Grid::cube(1, 64, 2.0 * PI).unwrap();
        let f = Field::from_fn(&g, |x| (3.0 * x[0]).cos());
        let p = part();
        let blocks = lp_blocks(&f, &p).unwrap();
        for b in &blocks {
            let expected = p.phi(b.k, 3.0) * f.max_abs();
            assert!((b.field.max_abs() - expected).abs() < 1e-10, "{}", b.k);
            if b.k != 1 && b.k != 2 {
                assert!(b.field.max_abs() < 1e-12);
            }
        }
        // ‖ξ‖ = 3 is the outer edge of block 1, so block 2 carries all of it.
        assert!((p.phi(1, 3.0) + p.phi(2, 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_field_norms() {
        let g = Grid::cube(2, 16, 4.0).unwrap();
        let z = Field::zeros(&g, Domain::Physical);
        assert_eq!(besov_norm(&z, &BesovParams::new(1.0, 2.0, 2.0, 0.0).unwrap(), &part()).unwrap().value, 0.0);
        assert_eq!(sobolev_norm(&z, 1.0, 0.0, &part()).unwrap().besov, 0.0);
    }

    #[test]
    fn gaussian_refinement() {
        let params = BesovParams::new(1.0, 2.0, 2.0, 0.0).unwrap();
        let norm = |n: usize| {
            let g = Grid::cube(1, n, 16.0).unwrap();
            let f = Field::from_fn(&g, |x| (-x[0] * x[0]).exp());
            besov_norm(&f, &params, &part()).unwrap().value
        };
        let (a, b) = (norm(128), norm(256));
        assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
    }

    #[test]
    fn sobolev_bracket_for_l_zero() {
        let g = Grid::cube(2, 32, 8.0).unwrap();
        let (lo, hi) = sobolev_equivalence_bracket(&g, 0.0, &part());
        assert!(lo >= std::f64::consts::FRAC_1_SQRT_2 - 1e-12 && hi <= 1.0 + 1e-12);
        for seed in 0..5 {
            let f = band_limited(&g, 20.0, seed);
            let s = sobolev_norm(&f, 0.0, 0.0, &part()).unwrap();
            let l2 = f.l2_norm();
            assert!((s.spectral.unwrap() - l2).abs() < 1e-10 * l2);
            let ratio = s.besov / l2;
            assert!(ratio >= lo - 1e-12 && ratio <= hi + 1e-12);
            assert!((0.5..=2.0).contains(&ratio));
        }
    }

    #[test]
    fn sobolev_single_mode_homogeneous() {
        let g = Grid::cube(1, 64, 2.0 * PI).unwrap();
        let ratios: Vec<f64> = [0.5, 1.0, 7.0]
            .iter()
            .map(|&a| {
                let f = Field::from_fn(&g, |x| a * (4.0 * x[0]).cos());
                let s = sobolev_norm(&f, 1.0, 0.0, &part()).unwrap();
                s.besov / s.spectral.unwrap()
            })
            .collect();
        assert!((ratios[0] - ratios[1]).abs() < 1e-12 && (ratios[1] - ratios[2]).abs() < 1e-12);
    }

    #[test]
    fn embedding_examples() {
        let s = |tau, p, rho| SpaceIndex { tau, p, rho };
        assert_eq!(
            embedding_check(s(1.0, 2.0, 0.0), s(0.0, f64::INFINITY, -1.0), 1).unwrap(),
            EmbeddingVerdict::CompactlyEmbedded
        );
        assert_eq!(
            embedding_check(s(1.0, 2.0, 0.0), s(1.0, 2.0, 0.0), 3).unwrap(),
            EmbeddingVerdict::Embedded
        );
        assert_eq!(
            embedding_check(s(1.0, 4.0, 0.0), s(0.0, 2.0, 0.0), 1).unwrap(),
            EmbeddingVerdict::NotImplied
        );
        assert!(matches!(
            embedding_check(s(0.0, 2.0, 0.0), s(1.0, 2.0, 0.0), 1),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn truncation_flags() {
        let g = Grid::cube(1, 64, 2.0 * PI).unwrap();
        let p = part();
        // Nyquist radius 32: block 5 reaches 48, block 4 reaches 24.
        assert!(!p.is_truncated(4, &g));
        assert!(p.is_truncated(5, &g));
        assert_eq!(p.k_max(&g), 5);
    }

    #[test]
    fn block_csv() {
        let n = BesovNorm {
            value: 1.0,
            terms: vec![0.5, 0.25],
            truncated: vec![false, true],
        };
        let mut out = Vec::new();
        write_block_csv(&n, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "k,value,truncated\n0,0.5,false\n1,0.25,true\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn telescoping_pointwise(t in 0.0..5000.0f64, sharp in 0.2..4.0f64) {
            let p = make_partition(sharp).unwrap();
            for kk in 0..14u32 {
                let s: f64 = (0..=kk).map(|k| p.phi(k, t)).sum();
                prop_assert!((s - p.phi0((-(kk as f64)).exp2() * t)).abs() < 1e-12);
            }
        }

        #[test]
        fn reconstruction(seed in any::<u64>(), d in 1usize..=2) {
            let n = if d == 1 { 64 } else { 16 };
            let g = Grid::cube(d, n, 5.0).unwrap();
            let f = band_limited(&g, g.nyquist_radius() * 0.9, seed);
            let blocks = lp_blocks(&f, &part()).unwrap();
            let mut sum = Field::zeros(&g, Domain::Physical);
            for b in &blocks {
                sum = sum.add(&b.field).unwrap();
            }
            prop_assert!(max_diff(&sum, &f) < 1e-10);
        }

        #[test]
        fn far_blocks_orthogonal(seed in any::<u64>()) {
            let g = Grid::cube(1, 256, 8.0).unwrap();
            let f = band_limited(&g, 90.0, seed);
            let p = part();
            let kmax = p.k_max(&g);
            for k in 0..=kmax {
                let bk = lp_block(&f, k, &p).unwrap().field;
                for j in 0..=kmax {
                    if (j as i64 - k as i64).abs() >= 2 {
                        prop_assert!(lp_block(&bk, j, &p).unwrap().field.max_abs() < 1e-10);
                    }
                }
            }
        }

        #[test]
        fn monotone_in_smoothness_and_weight(seed in any::<u64>(), l in -1.0..2.0f64, rho in -1.0..1.0f64, dl in 0.0..1.0f64, drho in 0.0..1.0f64) {
            let g = Grid::cube(1, 64, 8.0).unwrap();
            let f = band_limited(&g, 20.0, seed);
            let n = |l, rho| besov_norm(&f, &BesovParams::new(l, 2.0, 1.0, rho).unwrap(), &part()).unwrap().value;
            let base = n(l, rho);
            prop_assert!(n(l + dl, rho) >= base * (1.0 - 1e-12));
            prop_assert!(n(l, rho + drho) >= base * (1.0 - 1e-12));
        }

        #[test]
        fn homogeneous(seed in any::<u64>(), c in -10.0..10.0f64, r in 1.0..4.0f64, t in 1.0..4.0f64) {
            let g = Grid::cube(1, 64, 8.0).unwrap();
            let f = band_limited(&g, 20.0, seed);
            let params = BesovParams::new(0.5, r, t, 0.3).unwrap();
            let a = besov_norm(&f.scale(c), &params, &part()).unwrap().value;
            let b = besov_norm(&f, &params, &part()).unwrap().value;
            prop_assert!((a - c.abs() * b).abs() <= 1e-10 * (1.0 + a));
        }
    }
}
