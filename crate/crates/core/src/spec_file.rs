//! JSON measure specifications.
//!
//! ```json
//! {
//!   "support": [0.0, 2.0],
//!   "atoms": [{"location": 0.0, "weight": 0.5}],
//!   "diffuse": {"kind": "uniform", "mass": 0.5, "params": {"lo": 1.0, "hi": 2.0}},
//!   "atom_family": {"name": "example42", "tol": 1e-10}
//! }
//! ```
//!
//! Only `support` is required. `diffuse.params` depends on `kind`:
//!
//! | kind                   | params                              |
//! |------------------------|-------------------------------------|
//! | `empty`                | `{}` (mass must be 0 or omitted)    |
//! | `uniform`, `arcsine`   | `{"lo": x, "hi": y}`                |
//! | `semicircle`           | `{"center": x, "radius": r}`        |
//! | `piecewise_linear_cdf` | `{"knots": [[x, F], ...]}`          |
//!
//! For `piecewise_linear_cdf` the mass is the last knot's `F`; a `mass` key,
//! if present, must agree with it. Unknown keys are rejected, and every parse
//! error names the offending key path such as `diffuse.params.lo`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measure::{
    Atom, AtomFamily, DiffuseKind, DiffusePart, FamilyKind, SpectralMeasure, DEFAULT_FAMILY_TOL, MASS_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub support: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffuse: Option<DiffuseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_family: Option<FamilySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub location: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffuseSpec {
    pub kind: DiffuseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalParams {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SemicircleParams {
    center: f64,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KnotParams {
    knots: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn spec_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec { path: path.into(), message: message.into() }
}

fn join(prefix: &str, path: &serde_path_to_error::Path) -> String {
    let p = path.to_string();
    if p == "." || p.is_empty() {
        prefix.to_string()
    } else if prefix.is_empty() {
        p
    } else if p.starts_with('[') {
        format!("{prefix}{p}")
    } else {
        format!("{prefix}.{p}")
    }
}

fn params<T: DeserializeOwned>(value: &Value) -> Result<T> {
    let value = if value.is_null() { Value::Object(Default::default()) } else { value.clone() };
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = join("diffuse.params", e.path());
        spec_error(path, e.into_inner().to_string())
    })
}

impl DiffuseSpec {
    fn to_part(&self) -> Result<DiffusePart> {
        let require_mass =
            || self.mass.ok_or_else(|| spec_error("diffuse.mass", format!("required for kind {}", self.kind.name())));
        Ok(match self.kind {
            DiffuseKind::Empty => {
                params::<NoParams>(&self.params)?;
                if let Some(m) = self.mass {
                    if m != 0.0 {
                        return Err(spec_error("diffuse.mass", format!("kind empty needs mass 0, got {m}")));
                    }
                }
                DiffusePart::Empty
            }
            DiffuseKind::Uniform => {
                let p: IntervalParams = params(&self.params)?;
                DiffusePart::Uniform { lo: p.lo, hi: p.hi, mass: require_mass()? }
            }
            DiffuseKind::Arcsine => {
                let p: IntervalParams = params(&self.params)?;
                DiffusePart::Arcsine { lo: p.lo, hi: p.hi, mass: require_mass()? }
            }
            DiffuseKind::Semicircle => {
                let p: SemicircleParams = params(&self.params)?;
                DiffusePart::Semicircle { center: p.center, radius: p.radius, mass: require_mass()? }
            }
            DiffuseKind::PiecewiseLinearCdf => {
                let p: KnotParams = params(&self.params)?;
                if let (Some(m), Some(last)) = (self.mass, p.knots.last()) {
                    if (m - last.1).abs() > MASS_TOL {
                        return Err(spec_error(
                            "diffuse.mass",
                            format!("{m} disagrees with the last knot's cumulative mass {}", last.1),
                        ));
                    }
                }
                DiffusePart::PiecewiseLinearCdf { knots: p.knots }
            }
        })
    }

    fn from_part(part: &DiffusePart) -> Option<Self> {
        let (mass, params) = match part {
            DiffusePart::Empty => return None,
            DiffusePart::Uniform { lo, hi, mass } | DiffusePart::Arcsine { lo, hi, mass } => {
                (Some(*mass), serde_json::json!({"lo": lo, "hi": hi}))
            }
            DiffusePart::Semicircle { center, radius, mass } => {
                (Some(*mass), serde_json::json!({"center": center, "radius": radius}))
            }
            DiffusePart::PiecewiseLinearCdf { knots } => (None, serde_json::json!({"knots": knots})),
        };
        Some(DiffuseSpec { kind: part.kind(), mass, params })
    }
}

impl MeasureSpec {
    /// Builds the measure without validating it.
    pub fn to_measure(&self) -> Result<SpectralMeasure> {
        let diffuse = match &self.diffuse {
            None => DiffusePart::Empty,
            Some(d) => d.to_part()?,
        };
        let atoms = self.atoms.iter().map(|a| Atom::new(a.location, a.weight)).collect();
        let mut m = SpectralMeasure::new((self.support[0], self.support[1]), atoms, diffuse);
        if let Some(f) = &self.atom_family {
            let kind = FamilyKind::from_name(&f.name)
                .ok_or_else(|| spec_error("atom_family.name", format!("unknown family {:?}", f.name)))?;
            let tol = f.tol.unwrap_or(DEFAULT_FAMILY_TOL);
            if !(tol > 0.0) {
                return Err(spec_error("atom_family.tol", format!("must be positive, got {tol}")));
            }
            m = m.with_family(AtomFamily { kind, tol });
        }
        Ok(m)
    }

    /// The specification that reproduces `measure`. A previously truncated
    /// family comes back as its explicit atoms.
    pub fn from_measure(measure: &SpectralMeasure) -> Self {
        let (a, b) = measure.support();
        MeasureSpec {
            support: [a, b],
            atoms: measure.atoms().iter().map(|x| AtomSpec { location: x.location, weight: x.weight }).collect(),
            diffuse: DiffuseSpec::from_part(measure.diffuse()),
            atom_family: measure.family().map(|f| FamilySpec { name: f.kind.name().into(), tol: Some(f.tol) }),
        }
    }
}

/// Parses a specification without building the measure.
pub fn parse_spec(text: &str) -> Result<MeasureSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = join("", e.path());
        let path = if path.is_empty() { "(root)".to_string() } else { path };
        spec_error(path, e.into_inner().to_string())
    })
}

/// Parses and validates a measure.
pub fn parse_measure(text: &str) -> Result<SpectralMeasure> {
    parse_spec(text)?.to_measure()?.checked()
}

/// Pretty JSON for a measure, readable by [`parse_measure`].
pub fn to_json(measure: &SpectralMeasure) -> String {
    serde_json::to_string_pretty(&MeasureSpec::from_measure(measure)).expect("specs always serialize")
}
