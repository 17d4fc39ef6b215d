//! Logarithmic energies of spectral measures.
//!
//! The off-diagonal energy `∫∫_{R²-D} log|y-z| dμ(y) dμ(z)` splits into three
//! parts for `μ = σ + ν`:
//!
//! * atomic × atomic, off the diagonal: `Σ_{i≠j} c_i c_j log|r_i - r_j|`;
//! * atomic × diffuse: `2 Σ_i c_i U(r_i)` with `U(r) = ∫ log|r - z| dν(z)`;
//! * diffuse × diffuse: `∫ U dν`.
//!
//! `U` is evaluated on each smooth piece of `ν` by tanh-sinh quadrature split
//! at the singular point, so the log singularity always sits at an endpoint
//! of an integration interval where its distance is known exactly. The outer
//! integral of `U` against `ν` is a second tanh-sinh pass over the same
//! pieces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Segment, SpectralMeasure};
use crate::quadrature::{tanh_sinh, Quad};
use crate::sum::NeumaierSum;

/// Default absolute tolerance for energies.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Energies below this are reported as `-inf`.
pub const DEFAULT_DIVERGENCE_FLOOR: f64 = -1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions {
    pub tol: f64,
    pub divergence_floor: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, divergence_floor: DEFAULT_DIVERGENCE_FLOOR }
    }
}

impl EnergyOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyComponents {
    #[serde(with = "crate::ext_real")]
    pub diffuse_diffuse: f64,
    #[serde(with = "crate::ext_real")]
    pub atomic_diffuse: f64,
    #[serde(with = "crate::ext_real")]
    pub atomic_atomic: f64,
}

/// Off-diagonal logarithmic energy with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    /// The energy, or `-inf` when it fell below the divergence floor.
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    pub abs_error_estimate: f64,
    pub components: EnergyComponents,
    /// Additive bound on the error from a truncated atom family.
    pub truncation_bound: Option<f64>,
}

impl EnergyResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// `log|d|`
    Log,
    /// `log(d² + ε)`
    Regularized(f64),
}

impl Kernel {
    /// `K(d) * w`. Nodes whose distance underflowed to zero carry quadrature
    /// weights far below double precision and are dropped.
    #[inline]
    fn weighted(self, d: f64, w: f64) -> f64 {
        if d == 0.0 {
            return 0.0;
        }
        self.eval(d) * w
    }

    #[inline]
    fn eval(self, d: f64) -> f64 {
        match self {
            Kernel::Log => d.abs().ln(),
            Kernel::Regularized(eps) => (d * d + eps).ln(),
        }
    }
}

/// `∫ K(r - x(s)) w(s) ds` over one segment.
fn segment_potential(seg: &Segment, r: f64, kernel: Kernel, tol: f64) -> Quad {
    let (start, end) = (seg.start(), seg.end());
    if r <= start {
        let lead = start - r;
        return tanh_sinh(1.0, tol, false, |s, u| {
            let d = lead + seg.offset_from_start(s);
            (kernel.weighted(d, seg.weight(s, u)), 0.0)
        });
    }
    if r >= end {
        let lead = r - end;
        return tanh_sinh(1.0, tol, false, |s, u| {
            let d = lead + seg.offset_to_end(u);
            (kernel.weighted(d, seg.weight(s, u)), 0.0)
        });
    }
    let split = seg.parameter_of(r).expect("r inside segment");
    let residual = r - seg.point(split);
    split_potential(seg, split, 1.0 - split, residual, kernel, tol)
}

/// Potential at the point with parameter `split` (and `1 - split = rest`),
/// offset by `residual` from the exact point `x(split)`.
fn split_potential(seg: &Segment, split: f64, rest: f64, residual: f64, kernel: Kernel, tol: f64) -> Quad {
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    let mut evaluations = 0;
    if split > 0.0 {
        // t ∈ [0, split]: l = t, r = split - t.
        let q = tanh_sinh(split, 0.5 * tol, false, |l, r| {
            let d = seg.gap(l, split, r) + residual;
            (kernel.weighted(d, seg.weight(l, rest + r)), 0.0)
        });
        value += q.value;
        error += q.error;
        converged &= q.converged;
        evaluations += q.evaluations;
    }
    if rest > 0.0 {
        // t ∈ [split, 1]: l = t - split, r = 1 - t.
        let q = tanh_sinh(rest, 0.5 * tol, false, |l, r| {
            let d = seg.gap(split, split + l, l) - residual;
            (kernel.weighted(d, seg.weight(split + l, r)), 0.0)
        });
        value += q.value;
        error += q.error;
        converged &= q.converged;
        evaluations += q.evaluations;
    }
    Quad { value, error, converged, evaluations }
}

fn potential_at(segments: &[Segment], r: f64, kernel: Kernel, tol: f64) -> Quad {
    let per = tol / segments.len().max(1) as f64;
    let mut acc = Quad { value: 0.0, error: 0.0, converged: true, evaluations: 0 };
    for seg in segments {
        let q = segment_potential(seg, r, kernel, per);
        acc.value += q.value;
        acc.error += q.error;
        acc.converged &= q.converged;
        acc.evaluations += q.evaluations;
    }
    acc
}

/// `∫∫ K(y - z) dν(y) dν(z)`.
fn diffuse_self_energy(segments: &[Segment], kernel: Kernel, tol: f64) -> Quad {
    let inner_tol = 1e-2 * tol;
    let outer_tol = 0.5 * tol / segments.len().max(1) as f64;
    let mut acc = Quad { value: 0.0, error: 0.0, converged: true, evaluations: 0 };
    for (i, seg) in segments.iter().enumerate() {
        let q = tanh_sinh(1.0, outer_tol, true, |s, u| {
            let w = seg.weight(s, u);
            if w == 0.0 {
                return (0.0, 0.0);
            }
            let own = split_potential(seg, s, u, 0.0, kernel, inner_tol);
            let x = if s <= u { seg.start() + seg.offset_from_start(s) } else { seg.end() - seg.offset_to_end(u) };
            let mut value = own.value;
            let mut error = own.error;
            for (j, other) in segments.iter().enumerate() {
                if j != i {
                    let q = segment_potential(other, x, kernel, inner_tol);
                    value += q.value;
                    error += q.error;
                }
            }
            (value * w, error * w.abs())
        });
        acc.value += q.value;
        acc.error += q.error;
        acc.converged &= q.converged;
        acc.evaluations += q.evaluations;
    }
    acc
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// Bound on the energy change caused by the atomic mass dropped in a
/// truncation: `(2τ(1-τ) + τ²) max(|log gap|, |log diam|)`.
fn truncation_bound(measure: &SpectralMeasure) -> Option<f64> {
    let tail = measure.truncated_tail();
    if tail <= 0.0 {
        return None;
    }
    let (a, b) = measure.support();
    let mut scale = (b - a).ln().abs();
    let atoms = measure.atoms();
    if let Some(gap) = atoms.windows(2).map(|w| w[1].location - w[0].location).min_by(f64::total_cmp) {
        scale = scale.max(gap.ln().abs());
    }
    Some((2.0 * tail * (1.0 - tail) + tail * tail) * scale)
}

/// Off-diagonal logarithmic energy `∫∫_{R²-D} log|y - z| dμ(y) dμ(z)`.
pub fn offdiag_energy(measure: &SpectralMeasure, options: EnergyOptions) -> Result<EnergyResult> {
    check_tol(options.tol)?;
    let measure = measure.resolved();
    let atoms = measure.atoms();
    let segments = measure.diffuse().segments();

    let mut aa = NeumaierSum::new();
    for (i, p) in atoms.iter().enumerate() {
        for q in &atoms[i + 1..] {
            aa.add(2.0 * p.weight * q.weight * (q.location - p.location).abs().ln());
        }
    }
    let atomic_atomic = aa.value();

    let share = if segments.is_empty() { 0.0 } else { options.tol / 4.0 };
    let mut ad = NeumaierSum::new();
    let mut ad_error = 0.0;
    let mut converged = true;
    if !segments.is_empty() {
        for atom in atoms {
            let q =
                potential_at(&segments, atom.location, Kernel::Log, share / (2.0 * atom.weight * atoms.len() as f64));
            ad.add(2.0 * atom.weight * q.value);
            ad_error += 2.0 * atom.weight * q.error;
            converged &= q.converged;
        }
    }
    let atomic_diffuse = ad.value();

    let (diffuse_diffuse, dd_error) = if segments.is_empty() {
        (0.0, 0.0)
    } else {
        let q = diffuse_self_energy(&segments, Kernel::Log, options.tol / 2.0);
        converged &= q.converged;
        (q.value, q.error)
    };

    let mut total = NeumaierSum::new();
    total.extend([diffuse_diffuse, atomic_diffuse, atomic_atomic]);
    let mut value = total.value();
    let abs_error_estimate = dd_error + ad_error;
    let components = EnergyComponents { diffuse_diffuse, atomic_diffuse, atomic_atomic };

    if !(value >= options.divergence_floor) {
        value = f64::NEG_INFINITY;
    } else if !converged || abs_error_estimate > options.tol {
        return Err(Error::NotConverged { estimate: abs_error_estimate, tol: options.tol });
    }
    Ok(EnergyResult { value, abs_error_estimate, components, truncation_bound: truncation_bound(&measure) })
}

/// `∫∫ log(|y - z|² + ε) dμ(y) dμ(z)` over the whole plane, diagonal included.
pub fn regularized_energy(measure: &SpectralMeasure, eps: f64, tol: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    check_tol(tol)?;
    let measure = measure.resolved();
    let atoms = measure.atoms();
    let segments = measure.diffuse().segments();
    let kernel = Kernel::Regularized(eps);

    let mut acc = NeumaierSum::new();
    for (i, p) in atoms.iter().enumerate() {
        acc.add(p.weight * p.weight * eps.ln());
        for q in &atoms[i + 1..] {
            acc.add(2.0 * p.weight * q.weight * kernel.eval(q.location - p.location));
        }
    }
    let mut error = 0.0;
    let mut converged = true;
    if !segments.is_empty() {
        for atom in atoms {
            let q = potential_at(&segments, atom.location, kernel, tol / (8.0 * atom.weight * atoms.len() as f64));
            acc.add(2.0 * atom.weight * q.value);
            error += 2.0 * atom.weight * q.error;
            converged &= q.converged;
        }
        let q = diffuse_self_energy(&segments, kernel, tol / 2.0);
        acc.add(q.value);
        error += q.error;
        converged &= q.converged;
    }
    if !converged || error > tol {
        return Err(Error::NotConverged { estimate: error, tol });
    }
    Ok(acc.value())
}

/// `U(r) = ∫ log|r - z| dν(z)` for the diffuse part alone.
pub fn log_potential(measure: &SpectralMeasure, r: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let segments = measure.diffuse().segments();
    let q = potential_at(&segments, r, Kernel::Log, tol);
    if !q.converged {
        return Err(Error::NotConverged { estimate: q.error, tol });
    }
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, DiffusePart};

    fn half_atom_half_uniform() -> SpectralMeasure {
        SpectralMeasure::new(
            (0.0, 2.0),
            vec![Atom::new(0.0, 0.5)],
            DiffusePart::Uniform { lo: 1.0, hi: 2.0, mass: 0.5 },
        )
    }

    #[test]
    fn two_atoms_zero_energy() {
        let m = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 0.5), Atom::new(1.0, 0.5)]);
        let e = offdiag_energy(&m, EnergyOptions::default()).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.abs_error_estimate, 0.0);
    }

    #[test]
    fn uniform_potential_closed_form() {
        let m = SpectralMeasure::uniform(0.0, 1.0);
        for &y in &[0.0, 0.1, 0.5, 0.77, 1.0, 1.5, -2.0] {
            let want: f64 = {
                let f = |t: f64| if t == 0.0 { 0.0 } else { t * t.abs().ln() - t };
                f(1.0 - y) - f(0.0 - y)
            };
            let got = log_potential(&m, y, 1e-12).unwrap();
            assert!((got - want).abs() < 1e-11, "y = {y}: {got} vs {want}");
        }
    }

    #[test]
    fn arcsine_potential_is_constant() {
        // equilibrium measure of [-2, 2] has potential log(capacity) = 0 on the interval
        let m = SpectralMeasure::arcsine(-2.0, 2.0);
        for &y in &[-2.0, -1.3, 0.0, 0.4, 1.999] {
            assert!(log_potential(&m, y, 1e-12).unwrap().abs() < 1e-10, "y = {y}");
        }
    }

    #[test]
    fn mixed_components() {
        let e = offdiag_energy(&half_atom_half_uniform(), EnergyOptions::with_tol(1e-9)).unwrap();
        let ln2 = 2f64.ln();
        assert!((e.components.atomic_diffuse - 0.5 * (2.0 * ln2 - 1.0)).abs() < 1e-9);
        assert!((e.components.diffuse_diffuse + 0.375).abs() < 1e-9);
        assert_eq!(e.components.atomic_atomic, 0.0);
        assert!((e.value - (ln2 - 0.875)).abs() < 1e-9);
    }

    #[test]
    fn regularized_atoms() {
        let single = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 1.0)]);
        assert_eq!(regularized_energy(&single, 1.0, 1e-8).unwrap(), 0.0);
        let two = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 0.5), Atom::new(1.0, 0.5)]);
        let v = regularized_energy(&two, 1.0, 1e-8).unwrap();
        assert!((v - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn floor_reports_minus_infinity() {
        let m = SpectralMeasure::uniform(0.0, 1.0);
        let opts = EnergyOptions { tol: 1e-6, divergence_floor: -1.0 };
        let e = offdiag_energy(&m, opts).unwrap();
        assert_eq!(e.value, f64::NEG_INFINITY);
    }

    #[test]
    fn rejects_bad_tolerances() {
        let m = SpectralMeasure::uniform(0.0, 1.0);
        assert!(offdiag_energy(&m, EnergyOptions::with_tol(0.0)).is_err());
        assert!(regularized_energy(&m, 0.0, 1e-6).is_err());
    }
}
