//! Free entropy `χ`, the free Hausdorff dimension `δ₀ = 1 - Σc_i²`, and the
//! two-sided bounds on the free Hausdorff `δ₀`-entropy of one variable and of
//! a free family.
//!
//! With `E = ∫∫_{R²-D} log|s-t| dμ(s) dμ(t)` and `α = δ₀(x)`:
//!
//! ```text
//! E - α log 2 - ½ log 288e + ¾  <=  H^α(x)  <=  E + log 16 + ¼
//! ```
//!
//! and for a free family with `β = Σα_i`,
//! `ΣE_i + K₁ <= H^β(x_1, ..., x_n) <= ΣE_i + K₂` where
//! `K₁ = -(n/2) log 288e + 3n/4 - β log 2` and `K₂ = n log(16 √n) + n/4`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::energy::{offdiag_energy, EnergyOptions, EnergyResult};
use crate::error::{Error, Result};
use crate::measure::SpectralMeasure;
use crate::par;
use crate::sum::NeumaierSum;

/// `log(288 e) = 5 log 2 + 2 log 3 + 1`.
pub fn ln_288e() -> f64 {
    5.0 * LN_2 + 2.0 * 3f64.ln() + 1.0
}

/// Additive constant of the upper bound, `log 16 + 1/4`.
pub fn upper_constant() -> f64 {
    4.0 * LN_2 + 0.25
}

/// Additive constant of the lower bound, `-α log 2 - ½ log 288e + 3/4`.
pub fn lower_constant(alpha: f64) -> f64 {
    -alpha * LN_2 - 0.5 * ln_288e() + 0.75
}

/// `upper - lower` for any finite-energy measure of dimension `alpha`.
pub fn sandwich_width(alpha: f64) -> f64 {
    4.0 * LN_2 + 0.25 + alpha * LN_2 + 0.5 * ln_288e() - 0.75
}

/// `K₁ = -(n/2) log 288e + 3n/4 - β log 2`.
pub fn family_k1(n: usize, beta: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * ln_288e() + 0.75 * n - beta * LN_2
}

/// `K₂ = n log(16 √n) + n/4`.
pub fn family_k2(n: usize) -> f64 {
    let nf = n as f64;
    nf * (4.0 * LN_2 + 0.5 * nf.ln()) + 0.25 * nf
}

/// Additive constant of `χ` over the logarithmic energy, `3/4 + ½ log 2π`.
pub fn chi_constant() -> f64 {
    0.75 + 0.5 * (2.0 * PI).ln()
}

/// `½ log(2 / (πe))`, the shift from `χ` to `H¹` for one variable.
pub fn h1_shift() -> f64 {
    0.5 * (LN_2 - PI.ln() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeDimension {
    pub alpha: f64,
    /// Bound on the omitted `Σc_i²` of a truncated atom family, `(tail mass)²`.
    pub tail_bound: Option<f64>,
}

/// `δ₀ = 1 - Σc_i²` together with the truncation bound, if any.
pub fn free_dimension(measure: &SpectralMeasure) -> FreeDimension {
    let mut squares = NeumaierSum::new();
    squares.extend(measure.atoms().iter().map(|a| a.weight * a.weight));
    let tail = measure.truncated_tail();
    if let Some(f) = measure.family() {
        let n = f.kind.atoms_needed(if f.tol > 0.0 { f.tol } else { crate::measure::DEFAULT_FAMILY_TOL });
        squares.extend((1..=n).map(|j| {
            let w = f.kind.atom(j).weight;
            w * w
        }));
        // the family's own tail of squares is known in closed form
        squares.add(f.kind.tail_sum_of_squares(n));
    }
    FreeDimension { alpha: 1.0 - squares.value(), tail_bound: (tail > 0.0).then_some(tail * tail) }
}

/// `δ₀(x) = 1 - Σc_i²`.
pub fn free_hausdorff_dimension(measure: &SpectralMeasure) -> f64 {
    free_dimension(measure).alpha
}

/// Free entropy `χ(x) = ∫∫ log|y-z| dμ dμ + 3/4 + ½ log 2π`. Any atom puts
/// mass `c_i²` on the diagonal, so measures with atoms give `-inf` without
/// any quadrature.
pub fn chi(measure: &SpectralMeasure, options: EnergyOptions) -> Result<f64> {
    if measure.has_atoms() {
        return Ok(f64::NEG_INFINITY);
    }
    let e = offdiag_energy(measure, options)?;
    Ok(e.value + chi_constant())
}

/// `χ(x) + ½ log(2/(πe))`, the value of `H¹(x)` for atomless measures.
pub fn h1_identity(measure: &SpectralMeasure, options: EnergyOptions) -> Result<f64> {
    Ok(chi(measure, options)? + h1_shift())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBounds {
    pub alpha: f64,
    pub energy: EnergyResult,
    #[serde(with = "crate::ext_real")]
    pub lower: f64,
    #[serde(with = "crate::ext_real")]
    pub upper: f64,
}

pub fn bounds_from_energy(alpha: f64, energy: EnergyResult) -> EntropyBounds {
    let e = energy.value;
    EntropyBounds { alpha, energy, lower: e + lower_constant(alpha), upper: e + upper_constant() }
}

/// Lower and upper bounds on `H^α(x)` at `α = δ₀(x)`.
pub fn hausdorff_entropy_bounds(measure: &SpectralMeasure, options: EnergyOptions) -> Result<EntropyBounds> {
    let alpha = free_hausdorff_dimension(measure);
    let energy = offdiag_energy(measure, options)?;
    Ok(bounds_from_energy(alpha, energy))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyBounds {
    pub n: usize,
    pub betas: Vec<f64>,
    pub beta: f64,
    pub energies: Vec<EnergyResult>,
    pub k1: f64,
    pub k2: f64,
    #[serde(with = "crate::ext_real")]
    pub lower: f64,
    #[serde(with = "crate::ext_real")]
    pub upper: f64,
}

/// Bounds on `H^β(x_1, ..., x_n)` for a free family. Freeness is the
/// caller's assertion; it does not enter the computation.
pub fn free_family_bounds(measures: &[SpectralMeasure], options: EnergyOptions) -> Result<FamilyBounds> {
    if measures.is_empty() {
        return Err(Error::Domain("free_family_bounds needs at least one measure".into()));
    }
    let n = measures.len();
    let betas: Vec<f64> = measures.iter().map(free_hausdorff_dimension).collect();
    let energies =
        par::map_range(n, |i| offdiag_energy(&measures[i], options)).into_iter().collect::<Result<Vec<_>>>()?;
    let mut beta = NeumaierSum::new();
    beta.extend(betas.iter().copied());
    let beta = beta.value();
    let mut total = NeumaierSum::new();
    total.extend(energies.iter().map(|e| e.value));
    let total = if energies.iter().all(EnergyResult::is_finite) { total.value() } else { f64::NEG_INFINITY };
    let k1 = family_k1(n, beta);
    let k2 = family_k2(n);
    Ok(FamilyBounds { n, betas, beta, energies, k1, k2, lower: total + k1, upper: total + k2 })
}
