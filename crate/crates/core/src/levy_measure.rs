//! The Lévy (jump) measure ν and the moment integrals used by the noise
//! existence conditions and by the sampler.
//!
//! A measure is a finite list of atoms plus density pieces. Densities are
//! either power laws `c·|x|^{-p}` on an interval or piecewise-linear tables.
//! Moment integrals over densities go through [`crate::quadrature`]; a
//! divergent moment is an ordinary answer ([`Integral::Divergent`]), not an
//! error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Integral, QuadConfig};

/// A point mass `weight · δ_location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// A density piece of ν. Supports never straddle the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Density {
    /// `coeff · |x|^{-exponent}` on `[lower, upper]`; either end may be infinite.
    Power {
        coeff: f64,
        exponent: f64,
        #[serde(with = "bound")]
        lower: f64,
        #[serde(with = "bound")]
        upper: f64,
    },
    /// Piecewise-linear interpolation of `(x, value)` nodes, zero outside.
    Tabulated { points: Vec<[f64; 2]> },
}

impl Density {
    pub fn power(coeff: f64, exponent: f64, lower: f64, upper: f64) -> Density {
        Density::Power {
            coeff,
            exponent,
            lower,
            upper,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Density::Power { lower, upper, .. } => (*lower, *upper),
            Density::Tabulated { points } => (points[0][0], points[points.len() - 1][0]),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Density::Power {
                coeff,
                exponent,
                lower,
                upper,
            } => {
                if x < *lower || x > *upper || x == 0.0 {
                    0.0
                } else {
                    coeff * x.abs().powf(-exponent)
                }
            }
            Density::Tabulated { points } => {
                let (lo, hi) = self.support();
                if x < lo || x > hi {
                    return 0.0;
                }
                let i = points.partition_point(|p| p[0] <= x).clamp(1, points.len() - 1);
                let [x0, y0] = points[i - 1];
                let [x1, y1] = points[i];
                if x1 == x0 {
                    return y0;
                }
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Interior points where the density is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::Power { .. } => Vec::new(),
            Density::Tabulated { points } => points.iter().map(|p| p[0]).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Density::Power {
                coeff,
                exponent,
                lower,
                upper,
            } => {
                if !(coeff.is_finite() && *coeff >= 0.0) {
                    return Err(Error::InvalidMeasure(format!("power coefficient {coeff} must be finite and >= 0")));
                }
                if !exponent.is_finite() {
                    return Err(Error::InvalidMeasure("power exponent must be finite".into()));
                }
                if lower.is_nan() || upper.is_nan() || !(lower < upper) {
                    return Err(Error::InvalidMeasure(format!("empty support [{lower}, {upper}]")));
                }
                if *lower < 0.0 && *upper > 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "support [{lower}, {upper}] straddles the origin; split it into two pieces"
                    )));
                }
            }
            Density::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidMeasure("tabulated density needs at least two nodes".into()));
                }
                for w in points.windows(2) {
                    if !(w[0][0] < w[1][0]) {
                        return Err(Error::InvalidMeasure("tabulated nodes must be strictly increasing".into()));
                    }
                }
                let (lo, hi) = self.support();
                if !(lo.is_finite() && hi.is_finite()) || (lo <= 0.0 && hi >= 0.0) {
                    return Err(Error::InvalidMeasure(
                        "tabulated support must be finite and exclude the origin".into(),
                    ));
                }
                if points.iter().any(|p| !(p[1].is_finite() && p[1] >= 0.0)) {
                    return Err(Error::InvalidMeasure("tabulated values must be finite and >= 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Serde helper: bounds are numbers or the strings `"inf"` / `"-inf"`.
mod bound {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.trim() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("invalid bound {other:?}"))),
            },
        }
    }
}

/// One entry of the serialized measure: `{"atom": [x, w]}` or `{"density": {...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureComponent {
    Atom([f64; 2]),
    Density(Density),
}

/// The Lévy measure ν: atoms plus density pieces, with `ν({0}) = 0` and
/// `∫ min(1, x²) ν(dx) < ∞` checked at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MeasureComponent>", into = "Vec<MeasureComponent>")]
pub struct LevyMeasure {
    atoms: Vec<Atom>,
    densities: Vec<Density>,
}

impl TryFrom<Vec<MeasureComponent>> for LevyMeasure {
    type Error = Error;

    fn try_from(components: Vec<MeasureComponent>) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut densities = Vec::new();
        for c in components {
            match c {
                MeasureComponent::Atom([location, weight]) => atoms.push(Atom { location, weight }),
                MeasureComponent::Density(d) => densities.push(d),
            }
        }
        LevyMeasure::new(atoms, densities)
    }
}

impl From<LevyMeasure> for Vec<MeasureComponent> {
    fn from(m: LevyMeasure) -> Self {
        m.atoms
            .iter()
            .map(|a| MeasureComponent::Atom([a.location, a.weight]))
            .chain(m.densities.into_iter().map(MeasureComponent::Density))
            .collect()
    }
}

/// Intervals (for densities) and a membership test (for atoms) describing
/// a symmetric region of the jump axis.
struct Region<'a> {
    intervals: Vec<(f64, f64)>,
    contains: &'a dyn Fn(f64) -> bool,
}

impl LevyMeasure {
    pub fn new(atoms: Vec<Atom>, densities: Vec<Density>) -> Result<Self> {
        for a in &atoms {
            if !a.location.is_finite() || a.location == 0.0 {
                return Err(Error::InvalidMeasure(format!("atom location {} must be finite and nonzero", a.location)));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom weight {} must be finite and > 0", a.weight)));
            }
        }
        for d in &densities {
            d.validate()?;
        }
        let nu = LevyMeasure { atoms, densities };
        nu.min_one_x2_mass()?;
        Ok(nu)
    }

    /// The zero measure.
    pub fn zero() -> Self {
        LevyMeasure {
            atoms: Vec::new(),
            densities: Vec::new(),
        }
    }

    pub fn atom(location: f64, weight: f64) -> Result<Self> {
        LevyMeasure::new(vec![Atom { location, weight }], Vec::new())
    }

    pub fn density(d: Density) -> Result<Self> {
        LevyMeasure::new(Vec::new(), vec![d])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn densities(&self) -> &[Density] {
        &self.densities
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.densities.iter().all(|d| matches!(d, Density::Power { coeff, .. } if *coeff == 0.0))
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &LevyMeasure) -> LevyMeasure {
        let mut out = self.clone();
        out.atoms.extend_from_slice(&other.atoms);
        out.densities.extend(other.densities.iter().cloned());
        out
    }

    /// `∫ w dν` over a region, atoms by summation, densities by quadrature.
    ///
    /// Each density is integrated piecewise between its breakpoints and ±1.
    pub fn integrate_with(
        &self,
        w: &dyn Fn(f64) -> f64,
        intervals: &[(f64, f64)],
        atom_in_region: &dyn Fn(f64) -> bool,
    ) -> Integral {
        self.integrate_region(
            w,
            &Region {
                intervals: intervals.to_vec(),
                contains: atom_in_region,
            },
        )
    }

    fn integrate_region(&self, w: &dyn Fn(f64) -> f64, region: &Region<'_>) -> Integral {
        let cfg = QuadConfig::default();
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| (region.contains)(a.location))
            .map(|a| a.weight * w(a.location))
            .sum();
        let mut total = Integral::Finite(atoms);
        for d in &self.densities {
            let (s_lo, s_hi) = d.support();
            for &(r_lo, r_hi) in &region.intervals {
                let lo = s_lo.max(r_lo);
                let hi = s_hi.min(r_hi);
                if !(lo < hi) {
                    continue;
                }
                let mut cuts: Vec<f64> = vec![lo];
                cuts.extend(
                    d.breakpoints()
                        .into_iter()
                        .chain([-1.0, 1.0])
                        .filter(|&c| c > lo && c < hi),
                );
                cuts.push(hi);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                for seg in cuts.windows(2) {
                    let integrand = |x: f64| {
                        let dv = d.value(x);
                        if dv == 0.0 {
                            0.0
                        } else {
                            w(x) * dv
                        }
                    };
                    total = total + quadrature::integrate(integrand, seg[0], seg[1], &cfg);
                    if !total.is_finite() {
                        return Integral::Divergent;
                    }
                }
            }
        }
        total
    }

    fn outside(&self, w: &dyn Fn(f64) -> f64, t: f64) -> Integral {
        let contains = move |x: f64| x.abs() > t;
        self.integrate_region(
            w,
            &Region {
                intervals: vec![(f64::NEG_INFINITY, -t), (t, f64::INFINITY)],
                contains: &contains,
            },
        )
    }

    fn inside(&self, w: &dyn Fn(f64) -> f64, t: f64) -> Integral {
        let contains = move |x: f64| x.abs() <= t;
        self.integrate_region(
            w,
            &Region {
                intervals: vec![(-t, 0.0), (0.0, t)],
                contains: &contains,
            },
        )
    }

    /// `∫ min(1, x²) ν(dx)`.
    pub fn min_one_x2_mass(&self) -> Result<f64> {
        let contains = |_: f64| true;
        let total = self.integrate_region(
            &|x: f64| (x * x).min(1.0),
            &Region {
                intervals: vec![(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)],
                contains: &contains,
            },
        );
        total
            .value()
            .ok_or_else(|| Error::DivergentIntegral("∫ min(1, x²) ν(dx)".into()))
    }

    /// `∫_{|r|>1} |r|^eps ν(dr)`.
    pub fn epsilon_moment(&self, eps: f64) -> Result<Integral> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} must be > 0")));
        }
        Ok(self.outside(&|x: f64| x.abs().powf(eps), 1.0))
    }

    /// `∫_{|r|>1} log(|r|)^d ν(dr)`.
    pub fn log_moment(&self, d: u32) -> Result<Integral> {
        if d == 0 {
            return Err(Error::InvalidParameter("log moment order must be >= 1".into()));
        }
        Ok(self.outside(&|x: f64| x.abs().ln().powi(d as i32), 1.0))
    }

    /// `∫_{|x|<=delta} x² ν(dx)`.
    pub fn small_jump_variance(&self, delta: f64) -> Result<f64> {
        check_delta(delta)?;
        self.inside(&|x: f64| x * x, delta)
            .value()
            .ok_or_else(|| Error::DivergentIntegral(format!("∫_{{|x|<={delta}}} x² ν(dx)")))
    }

    /// `(ν({|x| > delta}), ∫_{delta<|x|<=1} x ν(dx))`.
    pub fn tail_mass_and_compensator(&self, delta: f64) -> Result<(f64, f64)> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidDelta(delta));
        }
        let mass = self
            .outside(&|_| 1.0, delta)
            .value()
            .ok_or_else(|| Error::DivergentIntegral(format!("ν(|x| > {delta})")))?;
        let mean = if delta < 1.0 {
            let contains = move |x: f64| x.abs() > delta && x.abs() <= 1.0;
            self.integrate_region(
                &|x| x,
                &Region {
                    intervals: vec![(-1.0, -delta), (delta, 1.0)],
                    contains: &contains,
                },
            )
            .value()
            .ok_or_else(|| Error::DivergentIntegral(format!("∫_{{{delta}<|x|<=1}} x ν(dx)")))?
        } else {
            0.0
        };
        Ok((mass, mean))
    }

    /// `∫_{|x|>1} x ν(dx)`, the large-jump first moment.
    pub fn tail_first_moment(&self) -> Integral {
        self.outside(&|x| x, 1.0)
    }

    /// `∫_{|x|>1} |x| ν(dx)`, the absolute large-jump moment.
    pub fn tail_abs_moment(&self) -> Integral {
        self.outside(&|x: f64| x.abs(), 1.0)
    }

    /// `∫ x² ν(dx)`.
    pub fn second_moment(&self) -> Integral {
        let contains = |_: f64| true;
        self.integrate_region(
            &|x| x * x,
            &Region {
                intervals: vec![(f64::NEG_INFINITY, 0.0), (0.0, f64::INFINITY)],
                contains: &contains,
            },
        )
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn min_one_x2_examples() {
        assert_eq!(LevyMeasure::atom(2.0, 1.0).unwrap().min_one_x2_mass().unwrap(), 1.0);
        assert_eq!(LevyMeasure::atom(0.5, 3.0).unwrap().min_one_x2_mass().unwrap(), 0.75);
        let nu = LevyMeasure::density(Density::power(1.0, 2.0, 1.0, INF)).unwrap();
        assert!(close(nu.min_one_x2_mass().unwrap(), 1.0, 1e-8));
    }

    #[test]
    fn epsilon_moment_examples() {
        let nu = LevyMeasure::atom(2.0, 1.0).unwrap();
        assert_eq!(nu.epsilon_moment(1.0).unwrap(), Integral::Finite(2.0));
        let nu = LevyMeasure::atom(0.5, 1.0).unwrap();
        assert_eq!(nu.epsilon_moment(3.0).unwrap(), Integral::Finite(0.0));
        let nu = LevyMeasure::density(Density::power(1.0, 2.0, 1.0, INF)).unwrap();
        let v = nu.epsilon_moment(0.5).unwrap().value().unwrap();
        assert!(close(v, 2.0, 1e-8), "{v}");
        assert_eq!(nu.epsilon_moment(1.0).unwrap(), Integral::Divergent);
    }

    #[test]
    fn log_moment_examples() {
        let nu = LevyMeasure::atom(std::f64::consts::E, 1.0).unwrap();
        assert!(close(nu.log_moment(2).unwrap().value().unwrap(), 1.0, 1e-15));
        let nu = LevyMeasure::atom(0.9, 1.0).unwrap();
        assert_eq!(nu.log_moment(1).unwrap(), Integral::Finite(0.0));
        let nu = LevyMeasure::density(Density::power(1.0, 2.0, 1.0, INF)).unwrap();
        assert!(close(nu.log_moment(1).unwrap().value().unwrap(), 1.0, 1e-8));
    }

    #[test]
    fn small_jump_variance_examples() {
        assert_eq!(LevyMeasure::atom(2.0, 1.0).unwrap().small_jump_variance(0.5).unwrap(), 0.0);
        assert_eq!(LevyMeasure::atom(0.25, 4.0).unwrap().small_jump_variance(0.5).unwrap(), 0.25);
        // ∫_0^1 x² · x^{-2} dx = 1 (closed form; quadrature must agree).
        let nu = LevyMeasure::density(Density::power(1.0, 2.0, 0.0, 1.0)).unwrap();
        assert!(close(nu.small_jump_variance(1.0).unwrap(), 1.0, 1e-8));
    }

    #[test]
    fn tail_mass_examples() {
        let nu = LevyMeasure::atom(2.0, 1.0).unwrap();
        assert_eq!(nu.tail_mass_and_compensator(1.0).unwrap(), (1.0, 0.0));
        let nu = LevyMeasure::atom(0.5, 1.0).unwrap();
        assert_eq!(nu.tail_mass_and_compensator(0.25).unwrap(), (1.0, 0.5));
        let nu = LevyMeasure::density(Density::power(1.0, 2.0, 0.1, 10.0)).unwrap();
        let (mass, mean) = nu.tail_mass_and_compensator(1.0).unwrap();
        assert!(close(mass, 0.9, 1e-10));
        assert_eq!(mean, 0.0);
        // delta = 0.5: mass ∫_{0.5}^{10} x^{-2} = 1.9, mean ∫_{0.5}^{1} x^{-1} = ln 2
        let (mass, mean) = nu.tail_mass_and_compensator(0.5).unwrap();
        assert!(close(mass, 1.9, 1e-10));
        assert!(close(mean, std::f64::consts::LN_2, 1e-10));
    }

    #[test]
    fn invalid_measures_rejected() {
        assert!(LevyMeasure::atom(0.0, 1.0).is_err());
        assert!(LevyMeasure::atom(1.0, -1.0).is_err());
        // x^{-3} at the origin: ∫ x² x^{-3} diverges.
        assert!(matches!(
            LevyMeasure::density(Density::power(1.0, 3.0, 0.0, 1.0)),
            Err(Error::DivergentIntegral(_))
        ));
        assert!(LevyMeasure::density(Density::power(1.0, 1.0, -1.0, 1.0)).is_err());
        assert!(LevyMeasure::density(Density::Tabulated {
            points: vec![[0.0, 1.0], [1.0, 1.0]]
        })
        .is_err());
    }

    #[test]
    fn tabulated_density_integrates_exactly() {
        // triangle on [1, 3] peaking at 2 with height 1: mass 1, |x|^1 moment 2
        let d = Density::Tabulated {
            points: vec![[1.0, 0.0], [2.0, 1.0], [3.0, 0.0]],
        };
        let nu = LevyMeasure::density(d).unwrap();
        assert!(close(nu.tail_mass_and_compensator(1.0).unwrap().0, 1.0, 1e-12));
        assert!(close(nu.epsilon_moment(1.0).unwrap().value().unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn negative_side_and_serde() {
        let json = r#"[{"atom": [-2.0, 0.5]}, {"density": {"kind": "power", "coeff": 1.0, "exponent": 2.0, "lower": "-inf", "upper": -1.0}}]"#;
        let nu: LevyMeasure = serde_json::from_str(json).unwrap();
        let m = nu.epsilon_moment(0.5).unwrap().value().unwrap();
        assert!(close(m, 0.5 * 2f64.sqrt() + 2.0, 1e-8));
        let back = serde_json::to_string(&nu).unwrap();
        let again: LevyMeasure = serde_json::from_str(&back).unwrap();
        assert_eq!(nu, again);
    }

    #[test]
    fn malformed_config_rejected() {
        let json = r#"[{"atom": [0.0, 1.0]}]"#;
        assert!(serde_json::from_str::<LevyMeasure>(json).is_err());
        let json = r#"[{"density": {"kind": "gamma"}}]"#;
        assert!(serde_json::from_str::<LevyMeasure>(json).is_err());
    }
}
