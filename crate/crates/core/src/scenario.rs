//! TOML scenario files: system parameters plus initial data.
//!
//! ```toml
//! label = "four bodies"
//! n = 4
//! mass = 1
//! omega = 1
//! convention = "listed-once"   # or "double-sum"
//! couplings = ["1", "-1/2"]
//!
//! [[particle]]
//! id = 1
//! r = [1, 0]
//! p = [0, "3/2"]
//! ```
//!
//! Numbers may be TOML integers, floats, or strings holding a decimal or an
//! exact fraction `p/q`. Couplings written without any TOML float are kept as
//! exact rationals. Double-sum couplings are converted to the listed-once
//! convention on load.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::model::{exact_to_f64, Convention, Couplings, Exact, SystemSpec};
use crate::state::{PhaseState, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: Option<String>,
    /// System in the listed-once convention.
    pub spec: SystemSpec,
    pub initial: PhaseState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    label: Option<String>,
    n: usize,
    mass: Spanned<Number>,
    omega: Spanned<Number>,
    #[serde(default = "default_convention")]
    convention: Convention,
    couplings: Vec<Spanned<Number>>,
    #[serde(default)]
    particle: Vec<RawParticle>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParticle {
    id: usize,
    r: [Spanned<Number>; 2],
    p: [Spanned<Number>; 2],
}

#[derive(Serialize)]
struct OutScenario<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    n: usize,
    mass: f64,
    omega: f64,
    convention: Convention,
    couplings: Vec<Number>,
    particle: Vec<OutParticle>,
}

#[derive(Serialize)]
struct OutParticle {
    id: usize,
    r: [f64; 2],
    p: [f64; 2],
}

fn default_convention() -> Convention {
    Convention::ListedOnce
}

/// Parses `p/q` or a plain decimal (optionally with exponent) exactly.
pub fn parse_exact(text: &str) -> Option<Exact> {
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| Exact::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let ten = BigInt::from(10);
    let scale = exp - frac.len() as i32;
    let mut value = Exact::from_integer(digits);
    if scale >= 0 {
        value *= Exact::from_integer(Pow::pow(&ten, scale as u32));
    } else {
        value /= Exact::from_integer(Pow::pow(&ten, (-scale) as u32));
    }
    Some(if negative { -value } else { value })
}

fn line_column(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Reader<'a> {
    source: &'a str,
}

impl Reader<'_> {
    fn error(&self, span: std::ops::Range<usize>, message: String) -> ScenarioError {
        let (line, column) = line_column(self.source, span.start);
        ScenarioError::Parse { line, column, message }
    }

    fn real(&self, v: &Spanned<Number>) -> Result<f64, ScenarioError> {
        let x = match v.get_ref() {
            Number::Int(i) => *i as f64,
            Number::Float(f) => *f,
            Number::Text(s) => match s.contains('/') {
                true => parse_exact(s).map(|e| exact_to_f64(&e)),
                false => s.trim().parse::<f64>().ok(),
            }
            .ok_or_else(|| self.error(v.span(), format!("`{s}` is not a number")))?,
        };
        if !x.is_finite() {
            return Err(self.error(v.span(), "number is not finite".into()));
        }
        Ok(x)
    }

    fn exact(&self, v: &Spanned<Number>) -> Result<Option<Exact>, ScenarioError> {
        match v.get_ref() {
            Number::Int(i) => Ok(Some(Exact::from_integer(BigInt::from(*i)))),
            Number::Float(_) => Ok(None),
            Number::Text(s) => parse_exact(s)
                .map(Some)
                .ok_or_else(|| self.error(v.span(), format!("`{s}` is not a number or fraction"))),
        }
    }
}

impl Scenario {
    pub fn parse(source: &str) -> Result<Scenario, ScenarioError> {
        let raw: RawScenario = toml::from_str(source).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(source, s.start));
            ScenarioError::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let rd = Reader { source };
        let mass = rd.real(&raw.mass)?;
        let omega = rd.real(&raw.omega)?;
        let exact: Vec<Option<Exact>> = raw.couplings.iter().map(|c| rd.exact(c)).collect::<Result<_, _>>()?;
        let couplings = match exact.into_iter().collect::<Option<Vec<Exact>>>() {
            Some(v) => Couplings::Exact(v),
            None => Couplings::Float(raw.couplings.iter().map(|c| rd.real(c)).collect::<Result<_, _>>()?),
        };
        let spec = SystemSpec::new(raw.n, mass, omega, couplings, raw.convention)
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?
            .to_convention(Convention::ListedOnce);

        let n = raw.n;
        if raw.particle.len() != n {
            return Err(ScenarioError::Invalid(format!("expected {n} particles, found {}", raw.particle.len())));
        }
        let mut positions = vec![None; n];
        let mut momenta = vec![Vec2::zeros(); n];
        for p in &raw.particle {
            if p.id == 0 || p.id > n {
                return Err(ScenarioError::Invalid(format!("particle id {} outside 1..={n}", p.id)));
            }
            if positions[p.id - 1].is_some() {
                return Err(ScenarioError::Invalid(format!("particle id {} listed twice", p.id)));
            }
            positions[p.id - 1] = Some(Vec2::new(rd.real(&p.r[0])?, rd.real(&p.r[1])?));
            momenta[p.id - 1] = Vec2::new(rd.real(&p.p[0])?, rd.real(&p.p[1])?);
        }
        let positions = positions.into_iter().map(|p| p.expect("all ids present")).collect();
        let initial = PhaseState::new(0.0, positions, momenta).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok(Scenario {
            label: raw.label,
            spec,
            initial,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scenario::parse(&source)
    }

    /// TOML text that parses back to an equal scenario.
    pub fn to_toml(&self) -> String {
        let couplings = match &self.spec.couplings {
            Couplings::Exact(v) => v
                .iter()
                .map(|x| {
                    if x.denom().is_one() {
                        Number::Text(x.numer().to_string())
                    } else {
                        Number::Text(x.to_string())
                    }
                })
                .collect(),
            Couplings::Float(v) => v.iter().map(|&x| Number::Float(x)).collect(),
        };
        let out = OutScenario {
            label: self.label.as_deref(),
            n: self.spec.n,
            mass: self.spec.mass,
            omega: self.spec.omega,
            convention: self.spec.convention,
            couplings,
            particle: (0..self.spec.n)
                .map(|i| OutParticle {
                    id: i + 1,
                    r: [self.initial.positions[i].x, self.initial.positions[i].y],
                    p: [self.initial.momenta[i].x, self.initial.momenta[i].y],
                })
                .collect(),
        };
        toml::to_string(&out).expect("scenario serializes")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l} (n = {}, κ = {})", self.spec.n, self.spec.couplings),
            None => write!(f, "n = {}, κ = {}", self.spec.n, self.spec.couplings),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIMACON: &str = r#"
label = "four bodies"
n = 4
mass = 1
omega = 1
convention = "double-sum"
couplings = ["1", "-1/4"]

[[particle]]
id = 1
r = [1, 0]
p = [0, "3/2"]

[[particle]]
id = 2
r = [-0.5, 0.5]
p = [-0.5, -1]

[[particle]]
id = 3
r = [0, 0]
p = [0, 0.5]

[[particle]]
id = 4
r = [-0.5, -0.5]
p = [0.5, -1]
"#;

    #[test]
    fn parses_and_converts() {
        let s = Scenario::parse(LIMACON).unwrap();
        assert_eq!(s.spec.convention, Convention::ListedOnce);
        assert_eq!(s.spec.couplings, Couplings::exact_from_ratios(&[(1, 1), (-1, 2)]));
        assert_eq!(s.initial.momenta[0], Vec2::new(0.0, 1.5));
        assert_eq!(s.initial.positions[3], Vec2::new(-0.5, -0.5));
    }

    #[test]
    fn round_trip() {
        let s = Scenario::parse(LIMACON).unwrap();
        let again = Scenario::parse(&s.to_toml()).unwrap();
        assert_eq!(s, again);
        let float = Scenario {
            spec: s.spec.with_couplings(Couplings::Float(vec![0.1 + 0.2, -1.0 / 3.0])),
            ..s
        };
        assert_eq!(Scenario::parse(&float.to_toml()).unwrap(), float);
    }

    #[test]
    fn exact_numbers() {
        assert_eq!(parse_exact("-2/3"), Some(Exact::new(BigInt::from(-2), BigInt::from(3))));
        assert_eq!(parse_exact("0.125"), Some(Exact::new(BigInt::from(1), BigInt::from(8))));
        assert_eq!(parse_exact("1.5e2"), Some(Exact::from_integer(BigInt::from(150))));
        assert_eq!(parse_exact("-.5"), Some(Exact::new(BigInt::from(-1), BigInt::from(2))));
        assert_eq!(parse_exact("1/0"), None);
        assert_eq!(parse_exact("abc"), None);
        assert_eq!(parse_exact("."), None);
    }

    #[test]
    fn float_coupling_makes_all_float() {
        let src = LIMACON.replace(r#"["1", "-1/4"]"#, r#"[1.0, "-1/4"]"#);
        let s = Scenario::parse(&src).unwrap();
        assert_eq!(s.spec.couplings, Couplings::Float(vec![1.0, -0.5]));
    }

    #[test]
    fn reports_locations() {
        let src = LIMACON.replace(r#"p = [0, "3/2"]"#, r#"p = [0, "x/2"]"#);
        match Scenario::parse(&src) {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 12),
            other => panic!("unexpected {other:?}"),
        }
        match Scenario::parse("n = 4\nmass = \n") {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let src = LIMACON.replace(r#"["1", "-1/4"]"#, r#"["1"]"#);
        assert!(matches!(Scenario::parse(&src), Err(ScenarioError::Invalid(_))));
        let src = LIMACON.replace("id = 4", "id = 1");
        assert!(matches!(Scenario::parse(&src), Err(ScenarioError::Invalid(_))));
        let src = LIMACON.replace("mass = 1", "mass = -1");
        assert!(matches!(Scenario::parse(&src), Err(ScenarioError::Invalid(_))));
    }
}
