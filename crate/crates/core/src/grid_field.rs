//! Periodic grids, sampled fields, the discrete Fourier transform and the
//! field file format.
//!
//! A [`Grid`] is a uniform lattice on the torus `Π [-L_j/2, L_j/2)`; point
//! `i` on axis `j` sits at `x = -L_j/2 + i·h_j`. The transform follows the
//! continuum convention `F f(ξ) = ∫ e^{-i⟨ξ,x⟩} f(x) dx`, discretized with
//! weight `h^d`; the inverse carries `(2π)^{-d} Δξ^d`. Spectral values are
//! stored in FFT order: index `j` on an axis holds the integer frequency
//! `k = j` for `j < n/2` and `k = j - n` otherwise, at `ξ = 2πk/L`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic uniform lattice in 1 to 3 dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    shape: Vec<usize>,
    box_length: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    shape: Vec<usize>,
    box_length: Vec<f64>,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Grid> {
        Grid::new(s.shape, s.box_length)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> GridSpec {
        GridSpec {
            shape: g.shape,
            box_length: g.box_length,
        }
    }
}

impl Grid {
    pub fn new(shape: Vec<usize>, box_length: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::InvalidGrid(format!("dimension {} not in 1..=3", shape.len())));
        }
        if shape.len() != box_length.len() {
            return Err(Error::InvalidGrid("shape and box have different lengths".into()));
        }
        for &n in &shape {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!("axis size {n} must be a power of two >= 4")));
            }
        }
        for &l in &box_length {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("box length {l} must be finite and > 0")));
            }
        }
        Ok(Grid { shape, box_length })
    }

    /// Cubic grid with `n` points and extent `l` on each of `d` axes.
    pub fn cube(d: usize, n: usize, l: f64) -> Result<Self> {
        Grid::new(vec![n; d], vec![l; d])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn box_length(&self) -> &[f64] {
        &self.box_length
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.box_length[axis] / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.spacing(j)).product()
    }

    pub fn volume(&self) -> f64 {
        self.box_length.iter().product()
    }

    /// Frequency-lattice cell `Π 2π/L_j`.
    pub fn frequency_cell(&self) -> f64 {
        self.box_length.iter().map(|l| 2.0 * std::f64::consts::PI / l).product()
    }

    /// Row-major multi-index of flat index `i` (last axis fastest).
    pub fn unflatten(&self, mut i: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for axis in (0..self.dim()).rev() {
            idx[axis] = i % self.shape[axis];
            i /= self.shape[axis];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Signed integer frequency of FFT index `j` on `axis`.
    pub fn wavenumber(&self, axis: usize, j: usize) -> i64 {
        let n = self.shape[axis];
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Physical coordinate of lattice index `i` on `axis`.
    pub fn axis_coordinate(&self, axis: usize, i: usize) -> f64 {
        -0.5 * self.box_length[axis] + i as f64 * self.spacing(axis)
    }

    /// Angular frequency of FFT index `j` on `axis`.
    pub fn axis_frequency(&self, axis: usize, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.wavenumber(axis, j) as f64 / self.box_length[axis]
    }

    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        let idx = self.unflatten(i);
        (0..self.dim()).map(|a| self.axis_coordinate(a, idx[a])).collect()
    }

    pub fn frequency(&self, i: usize) -> Vec<f64> {
        let idx = self.unflatten(i);
        (0..self.dim()).map(|a| self.axis_frequency(a, idx[a])).collect()
    }

    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.coordinate(i)).collect()
    }

    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.frequency(i)).collect()
    }

    /// `‖ξ‖` at every spectral index.
    pub fn frequency_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.frequency(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// Axes on which spectral index `i` sits at the unpaired Nyquist frequency.
    pub fn nyquist_axes(&self, i: usize) -> Vec<usize> {
        let idx = self.unflatten(i);
        (0..self.dim()).filter(|&a| idx[a] == self.shape[a] / 2).collect()
    }

    /// Largest radius of a ball centred at 0 inside the frequency box.
    pub fn nyquist_radius(&self) -> f64 {
        (0..self.dim())
            .map(|a| std::f64::consts::PI * self.shape[a] as f64 / self.box_length[a])
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `‖ξ‖` on the frequency lattice.
    pub fn max_frequency_norm(&self) -> f64 {
        (0..self.dim())
            .map(|a| (std::f64::consts::PI * self.shape[a] as f64 / self.box_length[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for Grid {
    /// Compact form `n1xn2@L1xL2`, parsed back by [`Grid::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ns: Vec<String> = self.shape.iter().map(|n| n.to_string()).collect();
        let ls: Vec<String> = self.box_length.iter().map(|l| format!("{l:?}")).collect();
        write!(f, "{}@{}", ns.join("x"), ls.join("x"))
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Grid> {
        let (ns, ls) = s
            .split_once('@')
            .ok_or_else(|| Error::InvalidGrid(format!("{s:?}: expected <n1>x..@<L1>x..")))?;
        let shape = ns
            .split('x')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidGrid(format!("{s:?}: {e}")))?;
        let mut box_length = ls
            .split('x')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidGrid(format!("{s:?}: {e}")))?;
        if box_length.len() == 1 && shape.len() > 1 {
            box_length = vec![box_length[0]; shape.len()];
        }
        Grid::new(shape, box_length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Physical,
    Spectral,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Physical => "physical",
            Domain::Spectral => "spectral",
        }
    }
}

/// Complex samples on a grid, tagged physical or spectral.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    domain: Domain,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values, domain })
    }

    pub fn zeros(grid: &Grid, domain: Domain) -> Self {
        Field {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
            domain,
        }
    }

    pub fn from_real(grid: &Grid, values: &[f64]) -> Result<Self> {
        Field::new(
            grid.clone(),
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Domain::Physical,
        )
    }

    /// Physical field sampled from `f(x)` at the lattice points.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| Complex64::new(f(&grid.coordinate(i)), 0.0))
            .collect();
        Field {
            grid: grid.clone(),
            values,
            domain: Domain::Physical,
        }
    }

    /// Spectral field with values `F(ξ)` at the lattice frequencies.
    pub fn spectral_from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.frequency(i))).collect();
        Field {
            grid: grid.clone(),
            values,
            domain: Domain::Spectral,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Drop imaginary parts.
    pub fn real(&self) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
            domain: self.domain,
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            domain: self.domain,
        }
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| v * c)
    }

    fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        self.check_compatible(other)?;
        Ok(Field {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            domain: self.domain,
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("fields live on different grids".into()));
        }
        if self.domain != other.domain {
            return Err(Error::DomainTagMismatch {
                expected: self.domain.as_str(),
                got: other.domain.as_str(),
            });
        }
        Ok(())
    }

    pub(crate) fn require(&self, domain: Domain) -> Result<()> {
        if self.domain == domain {
            Ok(())
        } else {
            Err(Error::DomainTagMismatch {
                expected: domain.as_str(),
                got: self.domain.as_str(),
            })
        }
    }

    /// `s(· + t)` for a lattice vector `t` given in index units.
    pub fn shifted(&self, shift: &[i64]) -> Result<Field> {
        if shift.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                got: shift.len(),
            });
        }
        let g = &self.grid;
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let idx = g.unflatten(i);
            let mut src = [0usize; 3];
            for a in 0..g.dim() {
                let n = g.shape[a] as i64;
                src[a] = (idx[a] as i64 + shift[a]).rem_euclid(n) as usize;
            }
            *slot = self.values[g.flatten(&src[..g.dim()])];
        }
        Ok(Field {
            grid: g.clone(),
            values: out,
            domain: self.domain,
        })
    }

    /// `Σ_i f_i g_i h^d` for physical fields (no conjugation).
    pub fn pairing(&self, other: &Field) -> Result<Complex64> {
        self.check_compatible(other)?;
        self.require(Domain::Physical)?;
        let h = self.grid.cell_volume();
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<Complex64>() * h)
    }

    /// Discrete `L²` norm: physical `(Σ|f|² h^d)^{1/2}`, spectral
    /// `((2π)^{-d} Σ|F|² Δξ^d)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sq: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let w = match self.domain {
            Domain::Physical => self.grid.cell_volume(),
            Domain::Spectral => {
                self.grid.frequency_cell() / (2.0 * std::f64::consts::PI).powi(self.grid.dim() as i32)
            }
        };
        (sq * w).sqrt()
    }
}

fn fft_nd(values: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let d = shape.len();
    for axis in 0..d {
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * n * stride + inner;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + t * stride];
                }
                fft.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    values[base + t * stride] = *v;
                }
            }
        }
    }
}

/// `(-1)^{Σ j_a}`: the phase `e^{i ξ·L/2}` from centring the lattice.
fn centring_sign(grid: &Grid, i: usize) -> f64 {
    let idx = grid.unflatten(i);
    if idx[..grid.dim()].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform with the continuum normalization.
pub fn dft(f: &Field) -> Result<Field> {
    f.require(Domain::Physical)?;
    let grid = &f.grid;
    let mut values = f.values.clone();
    fft_nd(&mut values, grid.shape(), FftDirection::Forward);
    let h = grid.cell_volume();
    for (i, v) in values.iter_mut().enumerate() {
        *v *= h * centring_sign(grid, i);
    }
    Ok(Field {
        grid: grid.clone(),
        values,
        domain: Domain::Spectral,
    })
}

/// Inverse of [`dft`].
pub fn idft(spec: &Field) -> Result<Field> {
    spec.require(Domain::Spectral)?;
    let grid = &spec.grid;
    let inv_vol = 1.0 / grid.volume();
    let mut values: Vec<Complex64> = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v * centring_sign(grid, i))
        .collect();
    fft_nd(&mut values, grid.shape(), FftDirection::Inverse);
    for v in values.iter_mut() {
        *v *= inv_vol;
    }
    Ok(Field {
        grid: grid.clone(),
        values,
        domain: Domain::Physical,
    })
}

/// `⟨x⟩ = (1 + ‖x‖²)^{1/2}` at every lattice point.
pub fn japanese_brackets(grid: &Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|i| (1.0 + grid.coordinate(i).iter().map(|x| x * x).sum::<f64>()).sqrt())
        .collect()
}

/// `‖⟨·⟩^ρ f‖_{L^r}` for any `r > 0` (quasi-norm below 1).
pub(crate) fn weighted_lr(f: &Field, brackets: &[f64], r: f64, rho: f64) -> f64 {
    let h = f.grid.cell_volume();
    if r.is_infinite() {
        f.values
            .iter()
            .zip(brackets)
            .map(|(v, b)| b.powf(rho) * v.norm())
            .fold(0.0, f64::max)
    } else {
        let sum: f64 = f
            .values
            .iter()
            .zip(brackets)
            .map(|(v, b)| {
                let m = v.norm();
                if m == 0.0 {
                    0.0
                } else {
                    b.powf(r * rho) * m.powf(r)
                }
            })
            .sum();
        (sum * h).powf(1.0 / r)
    }
}

/// Weighted norm `(Σ ⟨x_i⟩^{rρ} |f_i|^r h^d)^{1/r}`, `max ⟨x_i⟩^ρ |f_i|` for `r = ∞`.
pub fn weighted_lr_norm(f: &Field, r: f64, rho: f64) -> Result<f64> {
    f.require(Domain::Physical)?;
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidR(r));
    }
    Ok(weighted_lr(f, &japanese_brackets(&f.grid), r, rho))
}

pub const FIELD_MAGIC: &str = "LSPDE-FIELD 1";

/// Serialize a field to the v1 byte format with optional `x-` header lines.
pub fn field_to_bytes(f: &Field, meta: &[(String, String)]) -> Vec<u8> {
    let g = &f.grid;
    let join = |xs: Vec<String>| xs.join(" ");
    let mut header = format!(
        "{FIELD_MAGIC}\ndim {}\nshape {}\nbox {}\ndomain {}\ndtype c128-le\n",
        g.dim(),
        join(g.shape.iter().map(|n| n.to_string()).collect()),
        join(g.box_length.iter().map(|l| format!("{l:?}")).collect()),
        f.domain.as_str()
    );
    for (k, v) in meta {
        debug_assert!(!v.contains('\n'));
        header.push_str(&format!("x-{k} {v}\n"));
    }
    header.push('\n');
    let mut out = header.into_bytes();
    out.reserve(16 * f.values.len());
    for v in &f.values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

/// Parse the v1 byte format; returns the field and its `x-` header lines.
///
/// `dtype c128-be` is accepted and normalized to native values.
pub fn field_from_bytes(bytes: &[u8]) -> Result<(Field, Vec<(String, String)>)> {
    let mut pos = 0;
    let mut lines: Vec<String> = Vec::new();
    loop {
        let rest = &bytes[pos..];
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::MalformedHeader("header not terminated by a blank line".into()))?;
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?
            .to_string();
        pos += nl + 1;
        if line.is_empty() {
            break;
        }
        lines.push(line);
    }
    if lines.first().map(String::as_str) != Some(FIELD_MAGIC) {
        return Err(Error::MalformedHeader(format!("missing magic line {FIELD_MAGIC:?}")));
    }
    let mut dim = None;
    let mut shape = None;
    let mut box_length = None;
    let mut domain = None;
    let mut big_endian = None;
    let mut meta = Vec::new();
    for line in &lines[1..] {
        let (key, value) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        let bad = |what: &str| Error::MalformedHeader(format!("bad {what} line {line:?}"));
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("dim"))?),
            "shape" => {
                shape = Some(
                    value
                        .split_whitespace()
                        .map(|t| t.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad("shape"))?,
                )
            }
            "box" => {
                box_length = Some(
                    value
                        .split_whitespace()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad("box"))?,
                )
            }
            "domain" => {
                domain = Some(match value {
                    "physical" => Domain::Physical,
                    "spectral" => Domain::Spectral,
                    _ => return Err(bad("domain")),
                })
            }
            "dtype" => {
                big_endian = Some(match value {
                    "c128-le" => false,
                    "c128-be" => true,
                    _ => return Err(bad("dtype")),
                })
            }
            k if k.starts_with("x-") => meta.push((k[2..].to_string(), value.to_string())),
            _ => return Err(Error::MalformedHeader(format!("unknown header line {line:?}"))),
        }
    }
    let missing = |what: &str| Error::MalformedHeader(format!("missing {what} line"));
    let dim = dim.ok_or_else(|| missing("dim"))?;
    let shape = shape.ok_or_else(|| missing("shape"))?;
    let box_length = box_length.ok_or_else(|| missing("box"))?;
    let domain = domain.ok_or_else(|| missing("domain"))?;
    let big_endian = big_endian.ok_or_else(|| missing("dtype"))?;
    if shape.len() != dim || box_length.len() != dim {
        return Err(Error::MalformedHeader(format!("dim {dim} disagrees with shape/box")));
    }
    let grid = Grid::new(shape, box_length).map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let data = &bytes[pos..];
    if data.len() != 16 * grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} data bytes, found {}",
            16 * grid.len(),
            data.len()
        )));
    }
    let read = |chunk: &[u8]| {
        let arr: [u8; 8] = chunk.try_into().expect("8-byte chunk");
        if big_endian {
            f64::from_be_bytes(arr)
        } else {
            f64::from_le_bytes(arr)
        }
    };
    let values = data
        .chunks_exact(16)
        .map(|c| Complex64::new(read(&c[..8]), read(&c[8..])))
        .collect();
    Ok((Field::new(grid, values, domain)?, meta))
}

pub fn write_field(f: &Field, path: impl AsRef<Path>) -> Result<()> {
    write_field_with_meta(f, &[], path)
}

pub fn write_field_with_meta(f: &Field, meta: &[(String, String)], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, field_to_bytes(f, meta))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    Ok(read_field_with_meta(path)?.0)
}

pub fn read_field_with_meta(path: impl AsRef<Path>) -> Result<(Field, Vec<(String, String)>)> {
    field_from_bytes(&fs::read(path)?)
}

/// CSV export: one row per cell, columns `x1..xd,re,im` (`xi1..` for spectral fields).
pub fn write_csv(f: &Field, mut out: impl Write) -> Result<()> {
    let g = &f.grid;
    let prefix = match f.domain {
        Domain::Physical => "x",
        Domain::Spectral => "xi",
    };
    let mut cols: Vec<String> = (1..=g.dim()).map(|a| format!("{prefix}{a}")).collect();
    cols.push("re".into());
    cols.push("im".into());
    writeln!(out, "{}", cols.join(","))?;
    for (i, v) in f.values.iter().enumerate() {
        let pos = match f.domain {
            Domain::Physical => g.coordinate(i),
            Domain::Spectral => g.frequency(i),
        };
        let mut row: Vec<String> = pos.iter().map(|x| format!("{x:?}")).collect();
        row.push(format!("{:?}", v.re));
        row.push(format!("{:?}", v.im));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
