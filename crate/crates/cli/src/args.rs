use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lspde_core::defaults;
use lspde_core::grid_field::Grid;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "lspde", version, about = "Lévy-driven random fields on periodic grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Every subcommand except `rerun` is recorded verbatim in its run manifest.
#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Sample white-noise cell integrals on a grid.
    SampleNoise(SampleNoiseArgs),
    /// Solve p(D)s = q(D)L̇ for one noise realization.
    SolveLinear(SolveLinearArgs),
    /// Solve p(D)s = g(s) + L̇ by certified Picard iteration.
    SolveSemilinear(SolveSemilinearArgs),
    /// Weighted Besov norm of a field file.
    BesovNorm(BesovNormArgs),
    /// Decide whether one Besov space embeds into another.
    EmbeddingCheck(EmbeddingCheckArgs),
    /// Moment and admissibility integrals of a jump measure.
    CheckConditions(CheckConditionsArgs),
    /// Empirical and theoretical variance per Fourier mode.
    VarianceSpectrum(VarianceSpectrumArgs),
    /// Two-sample tests of shift invariance of the solution law.
    StationarityTest(StationarityTestArgs),
    /// Re-execute a run from its manifest and compare outputs bytewise.
    #[serde(skip)]
    Rerun(RerunArgs),
}

fn grid_spec(s: &str) -> Result<String, String> {
    s.parse::<Grid>().map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1]"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not a positive number"))
    }
}

fn exponent(s: &str) -> Result<f64, String> {
    if matches!(s, "inf" | "infinity" | "Inf") {
        return Ok(f64::INFINITY);
    }
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in [1, inf]"))
    }
}

fn summability(s: &str) -> Result<f64, String> {
    if matches!(s, "inf" | "infinity" | "Inf") {
        return Ok(f64::INFINITY);
    }
    positive(s)
}

/// `tau,p,rho` with `p` possibly `inf`.
fn space_index(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("{s:?}: expected tau,p,rho"));
    }
    let num = |t: &str| -> Result<f64, String> {
        if matches!(t, "inf" | "infinity" | "Inf") {
            Ok(f64::INFINITY)
        } else {
            t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"))
        }
    };
    Ok([num(parts[0])?, num(parts[1])?, num(parts[2])?])
}

fn shift(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

/// Where the noise comes from: a stored realization or a fresh sample.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSource {
    /// Noise file written by `sample-noise`.
    #[arg(long, conflicts_with_all = ["triplet", "grid"])]
    pub noise: Option<PathBuf>,
    /// Triplet JSON: {"a": .., "gamma": .., "nu": [..]}.
    #[arg(long, required_unless_present = "noise", requires = "grid")]
    pub triplet: Option<PathBuf>,
    /// Grid `n1xn2@L1xL2`.
    #[arg(long, value_parser = grid_spec)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = defaults::DELTA, value_parser = unit_interval)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleNoiseArgs {
    #[arg(long)]
    pub triplet: PathBuf,
    #[arg(long, value_parser = grid_spec)]
    pub grid: String,
    #[arg(long, default_value_t = defaults::DELTA, value_parser = unit_interval)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the cell integrals as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveLinearArgs {
    /// Polynomial JSON: [{"alpha": [..], "coeff": ..}, ..].
    #[arg(long)]
    pub p: PathBuf,
    /// Defaults to the constant 1.
    #[arg(long)]
    pub q: Option<PathBuf>,
    #[command(flatten)]
    pub source: NoiseSource,
    /// Set the zero mode to 0 when p vanishes only there.
    #[arg(long)]
    pub zero_mean_gauge: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the solution as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    /// g(y) = −c·sin(y)
    #[value(name = "builtin:sin")]
    Sin,
    /// g(y) = −c·tanh(y)
    #[value(name = "builtin:tanh")]
    Tanh,
    /// g(y) = c
    #[value(name = "builtin:constant")]
    Constant,
    /// g(y) = 0
    #[value(name = "builtin:zero")]
    Zero,
    /// g(y) = c·T(y) for the piecewise-linear table T given by --table.
    #[value(name = "tabulated")]
    Tabulated,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSemilinearArgs {
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long, value_enum)]
    pub g: NonlinearityKind,
    /// JSON list of [y, value] nodes for `--g tabulated`.
    #[arg(long, required_if_eq("g", "tabulated"))]
    pub table: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 2.0, value_parser = exponent)]
    #[serde(with = "extended")]
    pub r: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = defaults::TOL, value_parser = positive)]
    pub tol: f64,
    #[arg(long, default_value_t = defaults::MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, default_value_t = defaults::N_PROBES)]
    pub n_probes: usize,
    #[arg(long, default_value_t = 0)]
    pub probe_seed: u64,
    #[command(flatten)]
    pub source: NoiseSource,
    #[arg(long)]
    pub out: PathBuf,
    /// Iteration log CSV; defaults to `<out>.iterations.csv`.
    #[arg(long)]
    pub iterations_csv: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovNormArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// Smoothness.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub l: f64,
    #[arg(long, default_value_t = 2.0, value_parser = exponent)]
    #[serde(with = "extended")]
    pub r: f64,
    #[arg(long, default_value_t = 2.0, value_parser = summability)]
    #[serde(with = "extended")]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = defaults::PARTITION_SHARPNESS, value_parser = positive)]
    pub sharpness: f64,
    /// Per-block terms 2^{lk}·‖Δ_k f‖ as CSV.
    #[arg(long)]
    pub blocks_csv: Option<PathBuf>,
    /// JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingCheckArgs {
    /// Source space `tau,p,rho`.
    #[arg(long, value_parser = space_index, allow_hyphen_values = true)]
    #[serde(with = "extended_triple")]
    pub src: [f64; 3],
    /// Target space `tau,p,rho`.
    #[arg(long, value_parser = space_index, allow_hyphen_values = true)]
    #[serde(with = "extended_triple")]
    pub dst: [f64; 3],
    #[arg(long, short = 'd', default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConditionsArgs {
    /// Jump measure JSON list; use --triplet to take it from a triplet instead.
    #[arg(long, required_unless_present = "triplet", conflicts_with = "triplet")]
    pub measure: Option<PathBuf>,
    #[arg(long)]
    pub triplet: Option<PathBuf>,
    /// Moment exponents.
    #[arg(long = "eps", value_parser = positive, value_delimiter = ',', default_value = "1.0")]
    pub eps: Vec<f64>,
    /// Spatial dimension used by the log moment and admissibility integral.
    #[arg(long, short = 'd', default_value_t = 1)]
    pub dim: u32,
    /// Weight functions `log_power:<m>` or `power_beta:<beta>`.
    #[arg(long = "weight", value_delimiter = ',')]
    pub weights: Vec<String>,
    /// Constants tried in the admissibility integral.
    #[arg(long = "c", value_parser = positive, value_delimiter = ',')]
    pub c_scan: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceSpectrumArgs {
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long)]
    pub q: Option<PathBuf>,
    #[arg(long)]
    pub triplet: PathBuf,
    #[arg(long, value_parser = grid_spec)]
    pub grid: String,
    #[arg(long, default_value_t = defaults::DELTA, value_parser = unit_interval)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityTestArgs {
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long)]
    pub q: Option<PathBuf>,
    #[arg(long)]
    pub triplet: PathBuf,
    #[arg(long, value_parser = grid_spec)]
    pub grid: String,
    #[arg(long, default_value_t = defaults::DELTA, value_parser = unit_interval)]
    pub delta: f64,
    /// Lattice shift `k1,k2,..`; repeat for several shifts.
    #[arg(long = "shift", value_parser = shift, required = true, allow_hyphen_values = true)]
    pub shifts: Vec<Vec<i64>>,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write outputs here (by file name) instead of their recorded paths.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Command {
    /// Input files, tagged by role, that a manifest must embed.
    pub fn inputs_mut(&mut self) -> Vec<(&'static str, &mut PathBuf)> {
        let mut v: Vec<(&'static str, &mut PathBuf)> = Vec::new();
        fn source<'a>(s: &'a mut NoiseSource, v: &mut Vec<(&'static str, &'a mut PathBuf)>) {
            if let Some(p) = s.noise.as_mut() {
                v.push(("noise", p));
            }
            if let Some(p) = s.triplet.as_mut() {
                v.push(("triplet", p));
            }
        }
        match self {
            Command::SampleNoise(a) => v.push(("triplet", &mut a.triplet)),
            Command::SolveLinear(a) => {
                v.push(("p", &mut a.p));
                if let Some(q) = a.q.as_mut() {
                    v.push(("q", q));
                }
                source(&mut a.source, &mut v);
            }
            Command::SolveSemilinear(a) => {
                v.push(("p", &mut a.p));
                if let Some(t) = a.table.as_mut() {
                    v.push(("table", t));
                }
                source(&mut a.source, &mut v);
            }
            Command::BesovNorm(a) => v.push(("field", &mut a.field)),
            Command::EmbeddingCheck(_) => {}
            Command::CheckConditions(a) => {
                if let Some(m) = a.measure.as_mut() {
                    v.push(("measure", m));
                }
                if let Some(t) = a.triplet.as_mut() {
                    v.push(("triplet", t));
                }
            }
            Command::VarianceSpectrum(a) => {
                v.push(("p", &mut a.p));
                if let Some(q) = a.q.as_mut() {
                    v.push(("q", q));
                }
                v.push(("triplet", &mut a.triplet));
            }
            Command::StationarityTest(a) => {
                v.push(("p", &mut a.p));
                if let Some(q) = a.q.as_mut() {
                    v.push(("q", q));
                }
                v.push(("triplet", &mut a.triplet));
            }
            Command::Rerun(_) => {}
        }
        v
    }

    /// Output paths other than the manifest.
    pub fn outputs_mut(&mut self) -> Vec<&mut PathBuf> {
        match self {
            Command::SampleNoise(a) => [Some(&mut a.out), a.csv.as_mut()].into_iter().flatten().collect(),
            Command::SolveLinear(a) => [Some(&mut a.out), a.csv.as_mut()].into_iter().flatten().collect(),
            Command::SolveSemilinear(a) => [Some(&mut a.out), a.iterations_csv.as_mut()].into_iter().flatten().collect(),
            Command::BesovNorm(a) => [a.out.as_mut(), a.blocks_csv.as_mut()].into_iter().flatten().collect(),
            Command::EmbeddingCheck(a) => a.out.as_mut().into_iter().collect(),
            Command::CheckConditions(a) => a.out.as_mut().into_iter().collect(),
            Command::VarianceSpectrum(a) => vec![&mut a.out],
            Command::StationarityTest(a) => vec![&mut a.out],
            Command::Rerun(_) => Vec::new(),
        }
    }

    pub fn manifest_mut(&mut self) -> Option<&mut Option<PathBuf>> {
        match self {
            Command::SampleNoise(a) => Some(&mut a.manifest),
            Command::SolveLinear(a) => Some(&mut a.manifest),
            Command::SolveSemilinear(a) => Some(&mut a.manifest),
            Command::BesovNorm(a) => Some(&mut a.manifest),
            Command::EmbeddingCheck(a) => Some(&mut a.manifest),
            Command::CheckConditions(a) => Some(&mut a.manifest),
            Command::VarianceSpectrum(a) => Some(&mut a.manifest),
            Command::StationarityTest(a) => Some(&mut a.manifest),
            Command::Rerun(_) => None,
        }
    }

    /// Fill defaulted output paths so the manifest records every file written.
    pub fn resolve_defaults(&mut self) {
        if let Command::SolveSemilinear(a) = self {
            if a.iterations_csv.is_none() {
                a.iterations_csv = Some(with_suffix(&a.out, ".iterations.csv"));
            }
        }
        let primary = self.outputs_mut().first().map(|p| p.to_path_buf());
        if let (Some(m), Some(out)) = (self.manifest_mut(), primary) {
            if m.is_none() {
                *m = Some(with_suffix(&out, ".manifest.json"));
            }
        }
    }
}

pub fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// JSON has no infinity; exponents may be `inf`, stored as that string.
mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            Err(serde::ser::Error::custom(format!("{v} cannot be stored")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

mod extended_triple {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::extended")] f64);

    pub fn serialize<S: Serializer>(v: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
        [Wrap(v[0]), Wrap(v[1]), Wrap(v[2])].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 3], D::Error> {
        let [a, b, c] = <[Wrap; 3]>::deserialize(d)?;
        Ok([a.0, b.0, c.0])
    }
}
