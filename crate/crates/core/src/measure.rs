//! Spectral measures `μ = σ + ν` on an interval `[a, b]`: finitely many
//! explicit atoms, an optional infinite atom family, and a diffuse part drawn
//! from a closed family with analytic or piecewise-linear CDFs.

use std::borrow::Cow;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation tolerance for infinite atom families.
pub const DEFAULT_FAMILY_TOL: f64 = 1e-10;

/// Tolerance on the total mass `Σc_i + c + tail = 1`.
pub const MASS_TOL: f64 = 1e-12;

/// Bisection stops once the bracket is narrower than this.
pub const QUANTILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(location: f64, weight: f64) -> Self {
        Self { location, weight }
    }
}

/// `⌊c k⌋`, snapping products that land within rounding noise of an integer.
///
/// `0.29 * 100` evaluates to `28.999999999999996`; the intended count is 29.
pub fn mass_count(c: f64, k: usize) -> usize {
    let x = c * k as f64;
    if !(x > 0.0) {
        return 0;
    }
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffuseKind {
    Empty,
    Uniform,
    Semicircle,
    Arcsine,
    PiecewiseLinearCdf,
}

impl DiffuseKind {
    pub fn name(self) -> &'static str {
        match self {
            DiffuseKind::Empty => "empty",
            DiffuseKind::Uniform => "uniform",
            DiffuseKind::Semicircle => "semicircle",
            DiffuseKind::Arcsine => "arcsine",
            DiffuseKind::PiecewiseLinearCdf => "piecewise_linear_cdf",
        }
    }
}

/// The diffuse component `ν`. `mass` is `ν([a, b])`; the piecewise-linear
/// variant carries its mass as the last knot's cumulative value.
#[derive(Debug, Clone, PartialEq)]
pub enum DiffusePart {
    Empty,
    Uniform {
        lo: f64,
        hi: f64,
        mass: f64,
    },
    /// Wigner semicircle of the given radius (variance `radius^2 / 4`).
    Semicircle {
        center: f64,
        radius: f64,
        mass: f64,
    },
    /// Equilibrium measure of `[lo, hi]`, density `1 / (π sqrt((x-lo)(hi-x)))`.
    Arcsine {
        lo: f64,
        hi: f64,
        mass: f64,
    },
    /// Knots `(x, ν((-inf, x]))`, strictly increasing in both coordinates,
    /// the first with cumulative mass 0.
    PiecewiseLinearCdf {
        knots: Vec<(f64, f64)>,
    },
}

/// Smooth parametrization `s ∈ [0, 1] -> x(s)` of one piece of a diffuse part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SegmentMap {
    /// `x(s) = x0 + s (x1 - x0)`.
    Linear { x0: f64, x1: f64 },
    /// `x(s) = center - radius cos(πs)`.
    Cosine { center: f64, radius: f64 },
}

/// Density of the pushforward onto the parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SegmentWeight {
    Constant(f64),
    /// `coeff * sin^2(πs)`.
    SinSquared(f64),
}

/// One piece of a diffuse part: `∫ f dν = Σ ∫_0^1 f(x(s)) w(s) ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment {
    pub map: SegmentMap,
    pub weight: SegmentWeight,
}

impl Segment {
    pub fn start(&self) -> f64 {
        match self.map {
            SegmentMap::Linear { x0, .. } => x0,
            SegmentMap::Cosine { center, radius } => center - radius,
        }
    }

    pub fn end(&self) -> f64 {
        match self.map {
            SegmentMap::Linear { x1, .. } => x1,
            SegmentMap::Cosine { center, radius } => center + radius,
        }
    }

    /// `x(s) - x(0)`, given `s`.
    pub fn offset_from_start(&self, s: f64) -> f64 {
        match self.map {
            SegmentMap::Linear { x0, x1 } => s * (x1 - x0),
            SegmentMap::Cosine { radius, .. } => {
                let h = (0.5 * PI * s).sin();
                2.0 * radius * h * h
            }
        }
    }

    /// `x(1) - x(s)`, given `u = 1 - s`. Both maps are symmetric under
    /// `s -> 1 - s`, so this is the start offset evaluated at `u`.
    pub fn offset_to_end(&self, u: f64) -> f64 {
        self.offset_from_start(u)
    }

    /// `x(t) - x(s)` for `s <= t`, with `delta = t - s` supplied exactly.
    pub fn gap(&self, s: f64, t: f64, delta: f64) -> f64 {
        match self.map {
            SegmentMap::Linear { x0, x1 } => delta * (x1 - x0),
            SegmentMap::Cosine { radius, .. } => 2.0 * radius * (0.5 * PI * (s + t)).sin() * (0.5 * PI * delta).sin(),
        }
    }

    pub fn point(&self, s: f64) -> f64 {
        match self.map {
            SegmentMap::Linear { x0, x1 } => {
                if s <= 0.5 {
                    x0 + s * (x1 - x0)
                } else {
                    x1 - (1.0 - s) * (x1 - x0)
                }
            }
            SegmentMap::Cosine { center, radius } => center - radius * (PI * s).cos(),
        }
    }

    /// Parameter of the point `x`, if it lies in the closed segment.
    pub fn parameter_of(&self, x: f64) -> Option<f64> {
        let (lo, hi) = (self.start(), self.end());
        if x < lo || x > hi {
            return None;
        }
        Some(match self.map {
            SegmentMap::Linear { x0, x1 } => ((x - x0) / (x1 - x0)).clamp(0.0, 1.0),
            SegmentMap::Cosine { center, radius } => {
                (((center - x) / radius).clamp(-1.0, 1.0).acos() / PI).clamp(0.0, 1.0)
            }
        })
    }

    /// Parameter density at `s`, given both `s` and `u = 1 - s`.
    pub fn weight(&self, s: f64, u: f64) -> f64 {
        match self.weight {
            SegmentWeight::Constant(w) => w,
            SegmentWeight::SinSquared(c) => {
                let v = (PI * s.min(u)).sin();
                c * v * v
            }
        }
    }

    #[cfg(test)]
    pub fn mass(&self) -> f64 {
        match self.weight {
            SegmentWeight::Constant(w) => w,
            SegmentWeight::SinSquared(c) => 0.5 * c,
        }
    }
}

impl DiffusePart {
    pub fn kind(&self) -> DiffuseKind {
        match self {
            DiffusePart::Empty => DiffuseKind::Empty,
            DiffusePart::Uniform { .. } => DiffuseKind::Uniform,
            DiffusePart::Semicircle { .. } => DiffuseKind::Semicircle,
            DiffusePart::Arcsine { .. } => DiffuseKind::Arcsine,
            DiffusePart::PiecewiseLinearCdf { .. } => DiffuseKind::PiecewiseLinearCdf,
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            DiffusePart::Empty => 0.0,
            DiffusePart::Uniform { mass, .. }
            | DiffusePart::Semicircle { mass, .. }
            | DiffusePart::Arcsine { mass, .. } => *mass,
            DiffusePart::PiecewiseLinearCdf { knots } => knots.last().map_or(0.0, |k| k.1),
        }
    }

    /// Smallest closed interval carrying `ν`.
    pub fn interval(&self) -> Option<(f64, f64)> {
        match self {
            DiffusePart::Empty => None,
            DiffusePart::Uniform { lo, hi, .. } | DiffusePart::Arcsine { lo, hi, .. } => Some((*lo, *hi)),
            DiffusePart::Semicircle { center, radius, .. } => Some((center - radius, center + radius)),
            DiffusePart::PiecewiseLinearCdf { knots } => Some((knots.first()?.0, knots.last()?.0)),
        }
    }

    /// `ν((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DiffusePart::Empty => 0.0,
            DiffusePart::Uniform { lo, hi, mass } => mass * ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            DiffusePart::Arcsine { lo, hi, mass } => {
                if x <= *lo {
                    0.0
                } else if x >= *hi {
                    *mass
                } else {
                    let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                    mass * ((c - x) / r).clamp(-1.0, 1.0).acos() / PI
                }
            }
            DiffusePart::Semicircle { center, radius, mass } => {
                if x <= center - radius {
                    0.0
                } else if x >= center + radius {
                    *mass
                } else {
                    let theta = ((center - x) / radius).clamp(-1.0, 1.0).acos();
                    mass * (theta - theta.sin() * theta.cos()) / PI
                }
            }
            DiffusePart::PiecewiseLinearCdf { knots } => piecewise_cdf(knots, x),
        }
    }

    pub(crate) fn segments(&self) -> Vec<Segment> {
        match self {
            DiffusePart::Empty => Vec::new(),
            DiffusePart::Uniform { lo, hi, mass } => {
                vec![Segment { map: SegmentMap::Linear { x0: *lo, x1: *hi }, weight: SegmentWeight::Constant(*mass) }]
            }
            DiffusePart::Arcsine { lo, hi, mass } => vec![Segment {
                map: SegmentMap::Cosine { center: 0.5 * (lo + hi), radius: 0.5 * (hi - lo) },
                weight: SegmentWeight::Constant(*mass),
            }],
            DiffusePart::Semicircle { center, radius, mass } => vec![Segment {
                map: SegmentMap::Cosine { center: *center, radius: *radius },
                weight: SegmentWeight::SinSquared(2.0 * mass),
            }],
            DiffusePart::PiecewiseLinearCdf { knots } => knots
                .windows(2)
                .map(|w| Segment {
                    map: SegmentMap::Linear { x0: w[0].0, x1: w[1].0 },
                    weight: SegmentWeight::Constant(w[1].1 - w[0].1),
                })
                .collect(),
        }
    }

    /// The unique `x` inside the carrying interval with `ν((-inf, x]) = target`,
    /// for `0 < target < mass`.
    fn interior_quantile(&self, target: f64) -> f64 {
        match self {
            DiffusePart::Empty => unreachable!("empty diffuse part has no quantiles"),
            DiffusePart::Uniform { lo, hi, mass } => lo + (hi - lo) * (target / mass),
            DiffusePart::Arcsine { lo, hi, mass } => {
                let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                c - r * (PI * target / mass).cos()
            }
            DiffusePart::Semicircle { center, radius, .. } => {
                rightmost_preimage(|x| self.cdf(x), target, center - radius, center + radius)
            }
            DiffusePart::PiecewiseLinearCdf { knots } => {
                let i = knots.partition_point(|k| k.1 <= target).clamp(1, knots.len() - 1);
                let (x0, f0) = knots[i - 1];
                let (x1, f1) = knots[i];
                x0 + (x1 - x0) * ((target - f0) / (f1 - f0))
            }
        }
    }
}

fn piecewise_cdf(knots: &[(f64, f64)], x: f64) -> f64 {
    let Some(&(first, _)) = knots.first() else {
        return 0.0;
    };
    let (last, mass) = *knots.last().unwrap();
    if x <= first {
        return 0.0;
    }
    if x >= last {
        return mass;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, f0) = knots[i - 1];
    let (x1, f1) = knots[i];
    f0 + (f1 - f0) * (x - x0) / (x1 - x0)
}

/// Largest `x ∈ [lo, hi]` with `cdf(x) <= target`, by bisection. For a
/// continuous nondecreasing CDF this is the right end of the (possibly flat)
/// preimage of `target`.
pub fn rightmost_preimage<F: Fn(f64) -> f64>(cdf: F, target: f64, lo: f64, hi: f64) -> f64 {
    if cdf(hi) <= target {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        if hi - lo <= 0.5 * QUANTILE_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Named infinite atom families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Weights `2^{-j}` at locations `1/j`, `j >= 1`.
    Example42,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomFamily {
    pub kind: FamilyKind,
    pub tol: f64,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Example42 => "example42",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "example42" => Some(FamilyKind::Example42),
            _ => None,
        }
    }

    /// The j-th atom (1-based) in decreasing weight order.
    pub fn atom(self, j: usize) -> Atom {
        match self {
            FamilyKind::Example42 => Atom::new(1.0 / j as f64, 0.5f64.powi(j as i32)),
        }
    }

    pub fn total_mass(self) -> f64 {
        match self {
            FamilyKind::Example42 => 1.0,
        }
    }

    /// Mass of the atoms after the first `n`.
    pub fn tail_mass(self, n: usize) -> f64 {
        match self {
            FamilyKind::Example42 => 0.5f64.powi(n as i32),
        }
    }

    /// `Σ_{j > n} c_j^2`.
    pub fn tail_sum_of_squares(self, n: usize) -> f64 {
        match self {
            FamilyKind::Example42 => 0.25f64.powi(n as i32) / 3.0,
        }
    }

    /// Smallest `n` with `tail_mass(n) < tol`.
    pub fn atoms_needed(self, tol: f64) -> usize {
        let mut n = 0;
        while self.tail_mass(n) >= tol {
            n += 1;
        }
        n
    }

    /// Total family mass at locations `<= x`, in closed form.
    pub fn mass_at_or_below(self, x: f64) -> f64 {
        match self {
            FamilyKind::Example42 => {
                if x <= 0.0 {
                    return 0.0;
                }
                if x >= 1.0 {
                    return 1.0;
                }
                // smallest j with 1/j <= x
                let mut j = ((1.0 / x).ceil() as usize).max(1);
                while j > 1 && 1.0 / (j - 1) as f64 <= x {
                    j -= 1;
                }
                while 1.0 / j as f64 > x {
                    j += 1;
                }
                self.tail_mass(j - 1)
            }
        }
    }

    /// Closed interval containing every atom of the family.
    pub fn hull(self) -> (f64, f64) {
        match self {
            FamilyKind::Example42 => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    support: (f64, f64),
    atoms: Vec<Atom>,
    diffuse: DiffusePart,
    family: Option<AtomFamily>,
    truncated_tail: f64,
}

/// Result of [`SpectralMeasure::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// `Σc_i + c + tail - 1`.
    pub mass_defect: f64,
    /// Atomic mass not represented by explicit atoms (truncated family tail).
    pub tail_mass: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SpectralMeasure {
    /// Builds a measure; atoms are sorted by location. No validation happens
    /// here, see [`validate`](Self::validate) and [`checked`](Self::checked).
    pub fn new(support: (f64, f64), mut atoms: Vec<Atom>, diffuse: DiffusePart) -> Self {
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        Self { support, atoms, diffuse, family: None, truncated_tail: 0.0 }
    }

    pub fn with_family(mut self, family: AtomFamily) -> Self {
        self.family = Some(family);
        self
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Self::new((lo, hi), Vec::new(), DiffusePart::Uniform { lo, hi, mass: 1.0 })
    }

    pub fn semicircle(center: f64, radius: f64) -> Self {
        Self::new((center - radius, center + radius), Vec::new(), DiffusePart::Semicircle { center, radius, mass: 1.0 })
    }

    pub fn arcsine(lo: f64, hi: f64) -> Self {
        Self::new((lo, hi), Vec::new(), DiffusePart::Arcsine { lo, hi, mass: 1.0 })
    }

    pub fn atomic(support: (f64, f64), atoms: Vec<Atom>) -> Self {
        Self::new(support, atoms, DiffusePart::Empty)
    }

    /// `Σ 2^{-j} δ_{1/j}` on `[0, 1]`, truncated lazily at `tol`.
    pub fn example42(tol: f64) -> Self {
        Self::new((0.0, 1.0), Vec::new(), DiffusePart::Empty)
            .with_family(AtomFamily { kind: FamilyKind::Example42, tol })
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Explicit atoms, sorted by location. Family atoms appear only after
    /// [`truncate_atoms`](Self::truncate_atoms) or [`resolved`](Self::resolved).
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn diffuse(&self) -> &DiffusePart {
        &self.diffuse
    }

    pub fn family(&self) -> Option<AtomFamily> {
        self.family
    }

    /// Atomic mass dropped by a previous truncation.
    pub fn truncated_tail(&self) -> f64 {
        self.truncated_tail
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty() || self.family.is_some()
    }

    /// Atoms sorted by decreasing weight, ties broken by location.
    pub fn atoms_by_weight(&self) -> Vec<Atom> {
        let mut v = self.atoms.clone();
        v.sort_by(|a, b| b.weight.total_cmp(&a.weight).then(a.location.total_cmp(&b.location)));
        v
    }

    /// Materializes the atom family, keeping atoms in decreasing weight order
    /// until the remaining tail is below `tol`. The tail is recorded, not
    /// redistributed. Measures without a family are returned unchanged.
    pub fn truncate_atoms(&self, tol: f64) -> Result<SpectralMeasure> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("truncation tolerance must be positive, got {tol}")));
        }
        let Some(family) = self.family else {
            return Ok(self.clone());
        };
        let n = family.kind.atoms_needed(tol);
        let mut atoms = self.atoms.clone();
        atoms.extend((1..=n).map(|j| family.kind.atom(j)));
        let mut out = SpectralMeasure::new(self.support, atoms, self.diffuse.clone());
        out.truncated_tail = self.truncated_tail + family.kind.tail_mass(n);
        Ok(out)
    }

    /// This measure with any atom family materialized at the family's own
    /// tolerance.
    pub fn resolved(&self) -> Cow<'_, SpectralMeasure> {
        match self.family {
            None => Cow::Borrowed(self),
            Some(f) => {
                let tol = if f.tol > 0.0 { f.tol } else { DEFAULT_FAMILY_TOL };
                Cow::Owned(self.truncate_atoms(tol).expect("positive tolerance"))
            }
        }
    }

    /// `μ((-inf, x])`, family atoms included in closed form.
    pub fn cdf(&self, x: f64) -> f64 {
        let atomic: f64 = self.atoms.iter().filter(|a| a.location <= x).map(|a| a.weight).sum();
        let family = self.family.map_or(0.0, |f| f.kind.mass_at_or_below(x));
        atomic + family + self.diffuse.cdf(x)
    }

    /// `λ_{jk}`: the largest `λ ∈ [a, b]` with `ν([a, λ]) = j / k`, defined for
    /// `1 <= j <= ⌊c k⌋`.
    pub fn diffuse_quantile(&self, j: usize, k: usize) -> Result<f64> {
        let mass = self.diffuse.mass();
        let max = mass_count(mass, k);
        if j == 0 || k == 0 || j > max {
            return Err(Error::QuantileUndefined { j, k, max });
        }
        let target = j as f64 / k as f64;
        if target >= mass - MASS_TOL {
            // ν is flat from the top of its carrier to b.
            return Ok(self.support.1);
        }
        Ok(self.diffuse.interior_quantile(target))
    }

    /// `λ_{1k}, ..., λ_{⌊ck⌋k}`.
    pub fn diffuse_quantiles(&self, k: usize) -> Vec<f64> {
        let n = mass_count(self.diffuse.mass(), k);
        (1..=n).map(|j| self.diffuse_quantile(j, k).expect("j within range")).collect()
    }

    /// Lists every violated invariant together with the total-mass defect.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let (a, b) = self.support;
        if !(a.is_finite() && b.is_finite()) || !(a < b) {
            v.push(format!("support [{a}, {b}] must be a finite interval with a < b"));
        }
        let mut atoms = self.atoms.clone();
        let mut tail = self.truncated_tail;
        let mut family_mass = 0.0;
        if let Some(f) = self.family {
            if !(f.tol > 0.0) {
                v.push(format!("atom_family.tol must be positive, got {}", f.tol));
            } else {
                let n = f.kind.atoms_needed(f.tol);
                let fam: Vec<Atom> = (1..=n).map(|j| f.kind.atom(j)).collect();
                family_mass = fam.iter().map(|a| a.weight).sum::<f64>();
                tail += f.kind.tail_mass(n);
                let (lo, hi) = f.kind.hull();
                if lo < a || hi > b {
                    v.push(format!("atom family {} spans [{lo}, {hi}], outside support [{a}, {b}]", f.kind.name()));
                }
                atoms.extend(fam);
            }
        }
        for at in &self.atoms {
            if !(at.weight > 0.0 && at.weight <= 1.0) {
                v.push(format!("atom at {} has weight {} outside (0, 1]", at.location, at.weight));
            }
            if !(at.location >= a && at.location <= b) {
                v.push(format!("atom at {} lies outside support [{a}, {b}]", at.location));
            }
        }
        atoms.sort_by(|x, y| x.location.total_cmp(&y.location));
        for w in atoms.windows(2) {
            if w[0].location == w[1].location {
                v.push(format!("duplicate atom location {}", w[0].location));
            }
        }
        self.validate_diffuse(&mut v);
        let explicit: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let mass_defect = explicit + family_mass + tail + self.diffuse.mass() - 1.0;
        if !(mass_defect.abs() <= MASS_TOL) {
            v.push(format!("total mass differs from 1 by {mass_defect:e}"));
        }
        ValidationReport { violations: v, mass_defect, tail_mass: tail }
    }

    fn validate_diffuse(&self, v: &mut Vec<String>) {
        let (a, b) = self.support;
        let d = &self.diffuse;
        let mass = d.mass();
        match d {
            DiffusePart::Empty => {}
            DiffusePart::Uniform { lo, hi, .. } | DiffusePart::Arcsine { lo, hi, .. } => {
                if !(lo < hi) {
                    v.push(format!("{} interval [{lo}, {hi}] is empty", d.kind().name()));
                }
            }
            DiffusePart::Semicircle { radius, .. } => {
                if !(*radius > 0.0) {
                    v.push(format!("semicircle radius must be positive, got {radius}"));
                }
            }
            DiffusePart::PiecewiseLinearCdf { knots } => {
                if knots.len() < 2 {
                    v.push("piecewise_linear_cdf needs at least two knots".into());
                } else {
                    if knots[0].1 != 0.0 {
                        v.push(format!("first knot must have cumulative mass 0, got {}", knots[0].1));
                    }
                    for w in knots.windows(2) {
                        if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                            v.push(format!(
                                "knots ({}, {}) and ({}, {}) are not strictly increasing",
                                w[0].0, w[0].1, w[1].0, w[1].1
                            ));
                        }
                    }
                }
            }
        }
        if d.kind() != DiffuseKind::Empty {
            if !(mass > 0.0 && mass <= 1.0) {
                v.push(format!("diffuse mass {mass} must lie in (0, 1] for a non-empty kind"));
            }
            if let Some((lo, hi)) = d.interval() {
                // parameters like center ± radius may miss the endpoints by an ulp
                let slack = 1e-12 * (1.0 + a.abs().max(b.abs()));
                if !(lo.is_finite() && hi.is_finite()) || lo < a - slack || hi > b + slack {
                    v.push(format!("diffuse part carried by [{lo}, {hi}], outside support [{a}, {b}]"));
                }
            }
        }
    }

    /// Fails with the first violation when the measure is invalid.
    pub fn checked(self) -> Result<Self> {
        let report = self.validate();
        match report.violations.into_iter().next() {
            None => Ok(self),
            Some(first) => Err(Error::InvalidMeasure(first)),
        }
    }
}
