use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use lspde_core::defaults;
use lspde_core::grid_field::{read_field, write_csv, write_field_with_meta, Grid};
use lspde_core::levy_measure::LevyMeasure;
use lspde_core::levy_noise::{sample_noise, ultra_admissibility, LevyTriplet, NoiseRealization, WeightFunction};
use lspde_core::linear_solver::{stationarity_test, variance_spectrum, LinearSolver};
use lspde_core::lp_besov::{embedding_check, make_partition, write_block_csv, BesovEvaluator, BesovParams, SpaceIndex};
use lspde_core::poly_multiplier::MultiPoly;
use lspde_core::semilinear_solver::{picard_solve, Nonlinearity, PicardOptions};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{what} file {}: {e}", path.display())))
}

fn grid(spec: &str) -> CliResult<Grid> {
    spec.parse::<Grid>().map_err(|e| CliError::Usage(format!("--grid {spec}: {e}")))
}

fn q_or_one(q: Option<&Path>, p: &MultiPoly) -> CliResult<MultiPoly> {
    match q {
        Some(path) => read_json(path, "polynomial q"),
        None => Ok(MultiPoly::constant(p.dim(), 1.0)?),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> CliResult<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
    finish(w, path)
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string(value).expect("serializable value")
}

fn load_noise(src: &NoiseSource) -> CliResult<NoiseRealization> {
    if let Some(path) = &src.noise {
        return Ok(NoiseRealization::read(path)?);
    }
    let (Some(triplet), Some(spec)) = (&src.triplet, &src.grid) else {
        return Err(CliError::Usage("either --noise or both --triplet and --grid are required".into()));
    };
    let triplet: LevyTriplet = read_json(triplet, "triplet")?;
    Ok(sample_noise(&triplet, &grid(spec)?, src.delta, src.seed)?)
}

/// Run one subcommand; returns the text printed to stdout.
pub fn execute(cmd: &Command) -> CliResult<String> {
    match cmd {
        Command::SampleNoise(a) => sample(a),
        Command::SolveLinear(a) => solve_linear(a),
        Command::SolveSemilinear(a) => solve_semilinear(a),
        Command::BesovNorm(a) => besov(a),
        Command::EmbeddingCheck(a) => embedding(a),
        Command::CheckConditions(a) => conditions(a),
        Command::VarianceSpectrum(a) => variance(a),
        Command::StationarityTest(a) => stationarity(a),
        Command::Rerun(_) => Err(CliError::Usage("rerun cannot be nested".into())),
    }
}

fn sample(a: &SampleNoiseArgs) -> CliResult<String> {
    let triplet: LevyTriplet = read_json(&a.triplet, "triplet")?;
    let g = grid(&a.grid)?;
    let noise = sample_noise(&triplet, &g, a.delta, a.seed)?;
    noise.write(&a.out)?;
    if let Some(csv) = &a.csv {
        let mut w = create(csv)?;
        write_csv(&noise.to_field(), &mut w)?;
        finish(w, csv)?;
    }
    let n = noise.cell_integrals.len() as f64;
    let mean = noise.cell_integrals.iter().sum::<f64>() / n;
    Ok(format!(
        "grid = {}\ncells = {}\nseed = {}\ndelta = {:?}\nmean_cell_integral = {mean:?}\n",
        g,
        noise.cell_integrals.len(),
        a.seed,
        a.delta
    ))
}

fn solve_linear(a: &SolveLinearArgs) -> CliResult<String> {
    let p: MultiPoly = read_json(&a.p, "polynomial p")?;
    let q = q_or_one(a.q.as_deref(), &p)?;
    let noise = load_noise(&a.source)?;
    let solver = LinearSolver::new(&p, &q, &noise.grid, a.zero_mean_gauge)?;
    let sol = solver.solve(&noise)?;
    let residual = solver.residual(&sol);
    let meta = vec![
        ("kind".to_string(), "linear-solution".to_string()),
        ("seed".to_string(), noise.seed.to_string()),
        ("p".to_string(), to_json(&p)),
        ("q".to_string(), to_json(&q)),
        ("gauged".to_string(), sol.gauged.to_string()),
    ];
    write_field_with_meta(&sol.field, &meta, &a.out)?;
    if let Some(csv) = &a.csv {
        let mut w = create(csv)?;
        write_csv(&sol.field, &mut w)?;
        finish(w, csv)?;
    }
    Ok(format!(
        "grid = {}\nseed = {}\nzero_mode_gauged = {}\nmax_relative_residual = {residual:e}\n",
        noise.grid, noise.seed, sol.gauged
    ))
}

fn nonlinearity(a: &SolveSemilinearArgs) -> CliResult<Nonlinearity> {
    Ok(match a.g {
        NonlinearityKind::Sin => Nonlinearity::sin(a.c)?,
        NonlinearityKind::Tanh => Nonlinearity::tanh(a.c)?,
        NonlinearityKind::Constant => Nonlinearity::constant(a.c)?,
        NonlinearityKind::Zero => Nonlinearity::zero(),
        NonlinearityKind::Tabulated => {
            let path = a
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage("--g tabulated requires --table".into()))?;
            let nodes: Vec<[f64; 2]> = read_json(path, "nonlinearity table")?;
            Nonlinearity::tabulated(nodes.into_iter().map(|[y, v]| [y, a.c * v]).collect())?
        }
    })
}

fn solve_semilinear(a: &SolveSemilinearArgs) -> CliResult<String> {
    let p: MultiPoly = read_json(&a.p, "polynomial p")?;
    let g = nonlinearity(a)?;
    let noise = load_noise(&a.source)?;
    let opts = PicardOptions {
        beta: a.beta,
        r: a.r,
        rho: a.rho,
        tol: a.tol,
        max_iter: a.max_iter,
        n_probes: a.n_probes,
        probe_seed: a.probe_seed,
    };
    let sol = picard_solve(&p, &g, &noise, &opts)?;
    let meta = vec![
        ("kind".to_string(), "semilinear-solution".to_string()),
        ("seed".to_string(), noise.seed.to_string()),
        ("p".to_string(), to_json(&p)),
        ("nonlinearity".to_string(), g.label().to_string()),
        ("iterations".to_string(), sol.iterations.to_string()),
    ];
    write_field_with_meta(&sol.s, &meta, &a.out)?;
    if let Some(csv) = &a.iterations_csv {
        let mut w = create(csv)?;
        sol.write_iterations_csv(&mut w)?;
        finish(w, csv)?;
    }
    let c = &sol.certificate;
    let cont = &sol.continuum;
    let opt = |x: Option<f64>| x.map_or("unavailable".to_string(), |v| format!("{v:?}"));
    Ok(format!(
        "nonlinearity = {}\nop_norm_est = {:?}\nembed_norm_est = {:?}\nlipschitz = {:?}\ncontraction_ratio = {:?}\n\
         iterations = {}\nfinal_increment = {:e}\nrelative_residual = {:e}\nfixed_point_residual = {:e}\n\
         kappa = {}\ncontinuum_exponent = {}\ncontinuum_condition = {}\n",
        g.label(),
        c.op_norm_est,
        c.embed_norm_est,
        c.lip,
        c.ratio,
        sol.iterations,
        sol.history.last().map_or(0.0, |r| r.increment),
        sol.residual,
        sol.fixed_point_residual,
        opt(cont.kappa),
        opt(cont.exponent),
        cont.satisfied.map_or("unknown", |s| if s { "satisfied" } else { "not satisfied" }),
    ))
}

#[derive(Serialize)]
struct BesovReport {
    params: BesovParams,
    sharpness: f64,
    value: f64,
    terms: Vec<f64>,
    truncated: Vec<bool>,
}

fn besov(a: &BesovNormArgs) -> CliResult<String> {
    let f = read_field(&a.field)?;
    let params = BesovParams::new(a.l, a.r, a.t, a.rho)?;
    let part = make_partition(a.sharpness)?;
    let norm = BesovEvaluator::new(f.grid(), params, part).detailed(&f)?;
    if let Some(csv) = &a.blocks_csv {
        let mut w = create(csv)?;
        write_block_csv(&norm, &mut w)?;
        finish(w, csv)?;
    }
    if let Some(out) = &a.out {
        write_json(
            out,
            &BesovReport {
                params,
                sharpness: a.sharpness,
                value: norm.value,
                terms: norm.terms.clone(),
                truncated: norm.truncated.clone(),
            },
        )?;
    }
    let truncated: Vec<String> = norm
        .truncated
        .iter()
        .enumerate()
        .filter(|(_, t)| **t)
        .map(|(k, _)| k.to_string())
        .collect();
    Ok(format!(
        "besov_norm(l={:?}, r={:?}, t={:?}, rho={:?}) = {:?}\nblocks = {}\ntruncated_blocks = [{}]\n",
        a.l,
        a.r,
        a.t,
        a.rho,
        norm.value,
        norm.terms.len(),
        truncated.join(", ")
    ))
}

fn fmt_index(s: &[f64; 3]) -> String {
    let f = |v: f64| if v.is_infinite() { "inf".to_string() } else { format!("{v:?}") };
    format!("({}, {}, {})", f(s[0]), f(s[1]), f(s[2]))
}

fn embedding(a: &EmbeddingCheckArgs) -> CliResult<String> {
    let idx = |s: &[f64; 3]| SpaceIndex {
        tau: s[0],
        p: s[1],
        rho: s[2],
    };
    let verdict = embedding_check(idx(&a.src), idx(&a.dst), a.dim)?;
    let text = format!(
        "embedding_check({} -> {}, d={}) = {verdict}\n",
        fmt_index(&a.src),
        fmt_index(&a.dst),
        a.dim
    );
    if let Some(out) = &a.out {
        write_text(out, &text)?;
    }
    Ok(text)
}

fn conditions(a: &CheckConditionsArgs) -> CliResult<String> {
    let nu: LevyMeasure = match (&a.measure, &a.triplet) {
        (Some(m), _) => read_json(m, "Lévy measure")?,
        (None, Some(t)) => read_json::<LevyTriplet>(t, "triplet")?.nu().clone(),
        (None, None) => return Err(CliError::Usage("--measure or --triplet is required".into())),
    };
    if a.dim == 0 {
        return Err(CliError::Usage("-d/--dim must be >= 1".into()));
    }
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("min_one_x2_mass = {:?}", nu.min_one_x2_mass()?));
    let mut tempered = false;
    for &eps in &a.eps {
        let m = nu.epsilon_moment(eps)?;
        tempered |= m.is_finite();
        line(format!("epsilon_moment({eps:?}) = {m}"));
    }
    line(format!("log_moment({}) = {}", a.dim, nu.log_moment(a.dim)?));
    line(format!("tempered_noise_exists = {tempered}"));

    let c_scan: Vec<f64> = if a.c_scan.is_empty() {
        defaults::ADMISSIBILITY_C_SCAN.to_vec()
    } else {
        a.c_scan.clone()
    };
    for spec in &a.weights {
        let w: WeightFunction = spec
            .parse()
            .map_err(|e: lspde_core::Error| CliError::Usage(format!("--weight {spec}: {e}")))?;
        let report = w.admissibility_report();
        line(format!("weight({w}).admissible = {}", report.is_admissible()));
        let mut first_finite = None;
        for &c in &c_scan {
            let v = ultra_admissibility(&nu, &w, c, a.dim)?;
            if v.is_finite() && first_finite.is_none() {
                first_finite = Some(c);
            }
            line(format!("ultra_admissibility({w}, c={c:?}, d={}) = {v}", a.dim));
        }
        match first_finite {
            Some(c) => line(format!("ultra_noise_exists({w}) = true (c = {c:?})")),
            None => line(format!("ultra_noise_exists({w}) = not shown for scanned c")),
        }
    }
    if let Some(path) = &a.out {
        write_text(path, &out)?;
    }
    Ok(out)
}

fn variance(a: &VarianceSpectrumArgs) -> CliResult<String> {
    let p: MultiPoly = read_json(&a.p, "polynomial p")?;
    let q = q_or_one(a.q.as_deref(), &p)?;
    let triplet: LevyTriplet = read_json(&a.triplet, "triplet")?;
    let g = grid(&a.grid)?;
    let spec = variance_spectrum(&p, &q, &triplet, &g, a.delta, a.reps, a.seed)?;
    let mut w = create(&a.out)?;
    spec.write_csv(&mut w)?;
    finish(w, &a.out)?;
    let worst = spec.theoretical.as_ref().map(|th| {
        spec.empirical
            .iter()
            .zip(th)
            .filter(|(_, t)| **t > 0.0)
            .map(|(e, t)| (e - t).abs() / t)
            .fold(0.0, f64::max)
    });
    Ok(format!(
        "replicates = {}\nmodes = {}\nmax_relative_deviation = {}\n",
        a.reps,
        spec.empirical.len(),
        worst.map_or("unavailable (infinite variance)".to_string(), |v| format!("{v:?}"))
    ))
}

fn stationarity(a: &StationarityTestArgs) -> CliResult<String> {
    let p: MultiPoly = read_json(&a.p, "polynomial p")?;
    let q = q_or_one(a.q.as_deref(), &p)?;
    let triplet: LevyTriplet = read_json(&a.triplet, "triplet")?;
    let g = grid(&a.grid)?;
    let report = stationarity_test(&p, &q, &triplet, &g, a.delta, &a.shifts, a.reps, a.seed)?;
    let mut w = create(&a.out)?;
    report.write_csv(&mut w)?;
    finish(w, &a.out)?;
    let mut text = String::new();
    for s in &report.shifts {
        let accepted = s
            .p_values
            .iter()
            .filter(|&&p| p >= lspde_core::linear_solver::STATIONARITY_LEVEL)
            .count();
        text.push_str(&format!(
            "shift {:?}: {accepted}/{} test functions consistent, passed = {}\n",
            s.shift,
            s.p_values.len(),
            s.passed
        ));
    }
    text.push_str(&format!("stationary = {}\n", report.passed));
    Ok(text)
}
