//! Diagonal microstates `A_k` and `B_k` and the quantities built on them.
//!
//! `A_k` packs the diffuse quantiles, the atoms with multiplicity `⌊c_i k⌋`
//! and zeros into a `k × k` diagonal; its regularized pair product
//! approximates `∫∫ log(|y-z|² + ε) dμ dμ`. `B_k` removes `⌊√k⌋` copies of
//! the heaviest atom and the quantiles next to every atom, then pads with
//! distinct values above `b + 3`; its off-diagonal pair sum approximates the
//! logarithmic energy without the diagonal. Both are represented by their
//! sorted eigenvalues only.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{log_factorial, log_gamma, selberg_log};
use crate::energy::{offdiag_energy, regularized_energy, EnergyOptions};
use crate::entropy::free_hausdorff_dimension;
use crate::error::{Error, Result};
use crate::measure::{mass_count, SpectralMeasure};
use crate::par;
use crate::sum::NeumaierSum;

/// Largest matrix size accepted by the series and bound evaluators.
pub const K_CAP: usize = 5000;

/// Default allowance for "eventually at least" series checks.
pub const LIMINF_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MicrostateKind {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomMultiplicity {
    pub location: f64,
    pub weight: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMicrostate {
    pub kind: MicrostateKind,
    pub k: usize,
    /// Diagonal entries sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Atoms in decreasing weight order with the number of copies placed.
    pub atom_multiplicities: Vec<AtomMultiplicity>,
    /// Number of entries taken from the diffuse quantiles.
    pub quantile_count: usize,
    /// Zeros appended to `A_k`.
    pub zero_count: usize,
    /// `F_k`, the synthetic entries `b + 3 + j/F_k` of `B_k`.
    pub filler_count: usize,
    pub filler_range: Option<(f64, f64)>,
    /// `N_k`, the number of atoms with `⌊c_j k⌋ > 0` (kind B only).
    pub n_k: Option<usize>,
    /// 1-based quantile indices removed for lying next to an atom (kind B only).
    pub excluded_quantiles: Vec<usize>,
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    Ok(())
}

fn sort(v: &mut [f64]) {
    v.sort_by(f64::total_cmp);
}

/// `A_k`: quantiles `λ_{1k}, ..., λ_{⌊ck⌋k}`, then each atom `r_i` repeated
/// `⌊c_i k⌋` times, then zeros.
pub fn build_a(measure: &SpectralMeasure, k: usize) -> Result<DiagonalMicrostate> {
    check_k(k)?;
    let m = measure.resolved();
    let mut eigenvalues = m.diffuse_quantiles(k);
    let quantile_count = eigenvalues.len();
    let mut atom_multiplicities = Vec::new();
    for atom in m.atoms_by_weight() {
        let multiplicity = mass_count(atom.weight, k);
        eigenvalues.extend(std::iter::repeat_n(atom.location, multiplicity));
        atom_multiplicities.push(AtomMultiplicity { location: atom.location, weight: atom.weight, multiplicity });
    }
    debug_assert!(eigenvalues.len() <= k, "counts exceed k");
    let zero_count = k.saturating_sub(eigenvalues.len());
    eigenvalues.extend(std::iter::repeat_n(0.0, zero_count));
    eigenvalues.truncate(k);
    sort(&mut eigenvalues);
    Ok(DiagonalMicrostate {
        kind: MicrostateKind::A,
        k,
        eigenvalues,
        atom_multiplicities,
        quantile_count,
        zero_count,
        filler_count: 0,
        filler_range: None,
        n_k: None,
        excluded_quantiles: Vec::new(),
    })
}

/// `⌊√k⌋` without going through floating point.
fn isqrt(k: usize) -> usize {
    let mut r = (k as f64).sqrt() as usize;
    while r * r > k {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= k {
        r += 1;
    }
    r
}

/// `B_k`. The heaviest atom `r_1` enters `⌊c_1 k⌋ - ⌊√k⌋` times and every
/// other atom `r_j` with `⌊c_j k⌋ > 0` enters `⌊c_j k⌋` times. The quantiles
/// `λ_{2k}, ..., λ_{(⌊ck⌋-1)k}` follow, minus those adjacent to an atom (the
/// largest quantile `<= r_j` and the smallest `>= r_j`). The remaining `F_k`
/// slots hold `b + 3 + j/F_k`.
pub fn build_b(measure: &SpectralMeasure, k: usize) -> Result<DiagonalMicrostate> {
    check_k(k)?;
    let m = measure.resolved();
    let atoms = m.atoms_by_weight();
    let Some(first) = atoms.first() else {
        return Err(Error::Precondition("B_k needs at least one atom".into()));
    };
    let root = isqrt(k);
    let c1k = mass_count(first.weight, k);
    if c1k < root {
        return Err(Error::Precondition(format!(
            "k = {k} too small: heaviest atom count {c1k} is below floor(sqrt(k)) = {root}"
        )));
    }

    let mut eigenvalues = Vec::with_capacity(k);
    let mut atom_multiplicities = Vec::new();
    for (j, atom) in atoms.iter().enumerate() {
        let count = mass_count(atom.weight, k);
        if count == 0 {
            break;
        }
        let multiplicity = if j == 0 { count - root } else { count };
        eigenvalues.extend(std::iter::repeat_n(atom.location, multiplicity));
        atom_multiplicities.push(AtomMultiplicity { location: atom.location, weight: atom.weight, multiplicity });
    }
    let n_k = atom_multiplicities.len();

    let lambdas = m.diffuse_quantiles(k);
    let mut excluded = Vec::new();
    for a in &atom_multiplicities {
        let r = a.location;
        // number of quantiles <= r; the last of them is the largest one <= r
        let below = lambdas.partition_point(|&l| l <= r);
        if below > 0 {
            excluded.push(below);
        }
        let first_ge = lambdas.partition_point(|&l| l < r);
        if first_ge < lambdas.len() {
            excluded.push(first_ge + 1);
        }
    }
    excluded.sort_unstable();
    excluded.dedup();
    let mut quantile_count = 0;
    if lambdas.len() >= 3 {
        for j in 2..lambdas.len() {
            if excluded.binary_search(&j).is_err() {
                eigenvalues.push(lambdas[j - 1]);
                quantile_count += 1;
            }
        }
    }

    debug_assert!(eigenvalues.len() <= k, "counts exceed k");
    let filler_count = k - eigenvalues.len();
    let b = m.support().1;
    let f = filler_count as f64;
    eigenvalues.extend((1..=filler_count).map(|j| b + 3.0 + j as f64 / f));
    sort(&mut eigenvalues);
    Ok(DiagonalMicrostate {
        kind: MicrostateKind::B,
        k,
        eigenvalues,
        atom_multiplicities,
        quantile_count,
        zero_count: 0,
        filler_count,
        filler_range: (filler_count > 0).then(|| (b + 3.0 + 1.0 / f, b + 4.0)),
        n_k: Some(n_k),
        excluded_quantiles: excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartition {
    pub k: usize,
    /// `#S_k`, pairs `i < j` with equal eigenvalues.
    pub s_count: u64,
    /// `#W_k = C(k, 2) - #S_k`.
    pub w_count: u64,
}

fn choose2(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

pub fn pair_partition(microstate: &DiagonalMicrostate) -> PairPartition {
    let eig = &microstate.eigenvalues;
    let mut s_count = 0;
    for run in eig.chunk_by(|x, y| x == y) {
        debug_assert!(
            microstate.kind == MicrostateKind::A
                || run.len() == 1
                || microstate.atom_multiplicities.iter().any(|a| a.location == run[0]),
            "repeated B_k eigenvalue {} is not an atom",
            run[0]
        );
        s_count += choose2(run.len());
    }
    PairPartition { k: microstate.k, s_count, w_count: choose2(eig.len()) - s_count }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingCheck {
    /// `2 #S_k + k`
    pub lhs: f64,
    /// `(1 - α) k²`
    pub rhs: f64,
    pub holds: bool,
    /// `rhs - lhs`; negative when the inequality fails.
    pub margin: f64,
}

/// Evaluates `2 #S_k + k <= (1 - α) k²`, which is only claimed for large k.
pub fn sk_counting_check(measure: &SpectralMeasure, microstate: &DiagonalMicrostate) -> CountingCheck {
    let p = pair_partition(microstate);
    let k = microstate.k as f64;
    let alpha = free_hausdorff_dimension(measure);
    let lhs = 2.0 * p.s_count as f64 + k;
    let rhs = (1.0 - alpha) * k * k;
    CountingCheck { lhs, rhs, holds: lhs <= rhs, margin: rhs - lhs }
}

/// `Σ_{i<j} f(x_j - x_i)` over a sorted list. Rows are summed in parallel and
/// combined in row order, each with compensated summation.
fn pair_sum<F>(x: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let n = x.len();
    let rows = par::map_range(n, |i| {
        let mut s = NeumaierSum::new();
        s.extend(x[i + 1..].iter().map(|&y| f(y - x[i])));
        s.value()
    });
    let mut total = NeumaierSum::new();
    total.extend(rows);
    total.value()
}

/// `Σ_{i<j} log((x_i - x_j)² + ε)`
pub fn regularized_pair_sum(eigenvalues: &[f64], eps: f64) -> f64 {
    pair_sum(eigenvalues, |d| (d * d + eps).ln())
}

/// `Σ_{(i,j) ∈ W_k} log(x_i - x_j)²`, skipping equal pairs.
pub fn offdiag_pair_sum(eigenvalues: &[f64]) -> f64 {
    pair_sum(eigenvalues, |d| if d == 0.0 { 0.0 } else { 2.0 * d.abs().ln() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    ConvergesTo,
    EventuallyAtLeast,
}

/// The same sequence measured against a different normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternateNormalization {
    pub description: String,
    pub values: Vec<f64>,
    pub target: f64,
    pub gaps: Vec<f64>,
    pub achieved_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub quantity: String,
    pub ks: Vec<usize>,
    pub values: Vec<f64>,
    pub target: f64,
    pub relation: Relation,
    /// `value - target` per k.
    pub gaps: Vec<f64>,
    /// The gap at the largest k for limits; the smallest gap over the top
    /// quartile of ks for lower bounds.
    pub achieved_gap: f64,
    pub alternate: Option<AlternateNormalization>,
}

fn check_ks(ks: &[usize]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::Domain("at least one k is required".into()));
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("ks must be strictly increasing".into()));
    }
    if ks[0] == 0 || *ks.last().unwrap() > K_CAP {
        return Err(Error::Domain(format!("ks must lie in [1, {K_CAP}]")));
    }
    Ok(())
}

fn achieved(gaps: &[f64], relation: Relation) -> f64 {
    match relation {
        Relation::ConvergesTo => *gaps.last().expect("non-empty"),
        Relation::EventuallyAtLeast => {
            let top = gaps.len().div_ceil(4);
            gaps[gaps.len() - top..].iter().copied().fold(f64::INFINITY, f64::min)
        }
    }
}

fn gaps_of(values: &[f64], target: f64) -> Vec<f64> {
    values.iter().map(|v| v - target).collect()
}

fn report(
    quantity: &str,
    ks: &[usize],
    values: Vec<f64>,
    target: f64,
    relation: Relation,
    alternate: Option<AlternateNormalization>,
) -> SeriesReport {
    let gaps = gaps_of(&values, target);
    SeriesReport {
        quantity: quantity.into(),
        ks: ks.to_vec(),
        achieved_gap: achieved(&gaps, relation),
        values,
        target,
        relation,
        gaps,
        alternate,
    }
}

fn alternate(description: &str, values: Vec<f64>, target: f64, relation: Relation) -> AlternateNormalization {
    let gaps = gaps_of(&values, target);
    AlternateNormalization {
        description: description.into(),
        achieved_gap: achieved(&gaps, relation),
        values,
        target,
        gaps,
    }
}

/// The empirical regularized energy of `A_k`,
/// `k^{-2} Σ_{i,j} log((a_i - a_j)² + ε)` over all ordered pairs including
/// the diagonal, against `∫∫ log(|y-z|² + ε) dμ dμ`.
///
/// The half sum `k^{-2} Σ_{i<j}` tends to half that integral; it is reported
/// as the alternate normalization.
pub fn regularized_product_series(measure: &SpectralMeasure, eps: f64, ks: &[usize], tol: f64) -> Result<SeriesReport> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    check_ks(ks)?;
    let target = regularized_energy(measure, eps, tol)?;
    let mut full = Vec::with_capacity(ks.len());
    let mut half = Vec::with_capacity(ks.len());
    for &k in ks {
        let a = build_a(measure, k)?;
        let kf = k as f64;
        let pairs = regularized_pair_sum(&a.eigenvalues, eps);
        full.push((2.0 * pairs + kf * eps.ln()) / (kf * kf));
        half.push(pairs / (kf * kf));
    }
    let alt = alternate("k^-2 sum_{i<j}, target half the integral", half, 0.5 * target, Relation::ConvergesTo);
    Ok(report("regularized_product", ks, full, target, Relation::ConvergesTo, Some(alt)))
}

/// `k^{-2} Σ_{W_k} log(b_i - b_j)²` for `B_k`. The primary target is `2E`
/// (the square carried into the limit); the alternate is `E` itself, which
/// is where the sequence actually tends because each unordered pair is
/// counted once.
pub fn offdiag_sum_series(measure: &SpectralMeasure, ks: &[usize], options: EnergyOptions) -> Result<SeriesReport> {
    check_ks(ks)?;
    let energy = offdiag_energy(measure, options)?;
    if !energy.is_finite() {
        return Err(Error::Precondition("logarithmic energy is infinite".into()));
    }
    let mut values = Vec::with_capacity(ks.len());
    for &k in ks {
        let b = build_b(measure, k)?;
        let kf = k as f64;
        values.push(offdiag_pair_sum(&b.eigenvalues) / (kf * kf));
    }
    let e = energy.value;
    let alt = alternate("plain energy E", values.clone(), e, Relation::EventuallyAtLeast);
    Ok(report("offdiag_sum", ks, values, 2.0 * e, Relation::EventuallyAtLeast, Some(alt)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeBound {
    pub log_bound: f64,
    /// Root of `((α + 2α²)/(α + 2))^{1/2} = t/ε + 1/4` in `(0, 1/2)`.
    pub alpha: f64,
}

/// Upper end of the inner equation's range, reached at `α = 1/2`.
pub fn inner_alpha_limit() -> f64 {
    0.4f64.sqrt()
}

/// Solves `((α + 2α²)/(α + 2))^{1/2} = y` for `α ∈ (0, 1/2)` by bisection.
pub fn inner_alpha(y: f64) -> Result<f64> {
    let limit = inner_alpha_limit();
    if !(y > 0.0 && y < limit) {
        return Err(Error::NoSolution { value: y, limit });
    }
    let g = |a: f64| ((a + 2.0 * a * a) / (a + 2.0)).sqrt();
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Log of the volume bound for the `ε`-neighbourhood of the unitary orbit of
/// `A_k`:
///
/// ```text
/// k^{k/2} ε^k Γ(k/2+1)^{-1} (1+2α)^{k(k-1)/2} e^{2k²ε} π^{k²/2} 2^{k(k-1)/2}
///     (Π_j j!)^{-1} Π_{i<j} ((a_i - a_j)² + ε)
/// ```
pub fn volume_upper_bound_log(microstate: &DiagonalMicrostate, eps: f64, t: f64) -> Result<VolumeBound> {
    if microstate.kind != MicrostateKind::A {
        return Err(Error::Precondition("the volume bound applies to A_k".into()));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    let alpha = inner_alpha(t / eps + 0.25)?;
    let k = microstate.k;
    let kf = k as f64;
    let pairs = kf * (kf - 1.0) / 2.0;
    let mut s = NeumaierSum::new();
    s.add(0.5 * kf * kf.ln());
    s.add(kf * eps.ln());
    s.add(-log_gamma(0.5 * kf + 1.0)?);
    s.add(pairs * (2.0 * alpha).ln_1p());
    s.add(2.0 * kf * kf * eps);
    s.add(0.5 * kf * kf * PI.ln());
    s.add(pairs * LN_2);
    s.extend((1..=k).map(|j| -log_factorial(j)));
    s.add(regularized_pair_sum(&microstate.eigenvalues, eps));
    Ok(VolumeBound { log_bound: s.value(), alpha })
}

/// The five summands of `log C_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingConstant {
    pub k: usize,
    pub log_c: f64,
    /// `log D_k = (k(k-1)/2) log π - Σ_j log j!`
    pub log_d: f64,
    /// `Σ_{W_k} log(b_i - b_j)²`
    pub pair_term: f64,
    /// `-log k!`
    pub factorial_term: f64,
    /// `(2 #S_k + k - k²) log 2`
    pub power_of_two_term: f64,
    /// `log Π_j Γ(j+1)Γ(j)²/Γ(k+j)`
    pub selberg_term: f64,
    pub partition: PairPartition,
}

pub fn packing_constant_log(measure: &SpectralMeasure, k: usize) -> Result<PackingConstant> {
    if k > K_CAP {
        return Err(Error::Domain(format!("k must not exceed {K_CAP}")));
    }
    let b = build_b(measure, k)?;
    let partition = pair_partition(&b);
    let kf = k as f64;
    let mut d = NeumaierSum::new();
    d.add(kf * (kf - 1.0) / 2.0 * PI.ln());
    d.extend((1..=k).map(|j| -log_factorial(j)));
    let log_d = d.value();
    let pair_term = offdiag_pair_sum(&b.eigenvalues);
    let factorial_term = -log_factorial(k);
    let exponent = 2.0 * partition.s_count as f64 + kf - kf * kf;
    let power_of_two_term = exponent * LN_2;
    let selberg_term = selberg_log(k);
    let mut total = NeumaierSum::new();
    total.extend([log_d, pair_term, factorial_term, power_of_two_term, selberg_term]);
    Ok(PackingConstant {
        k,
        log_c: total.value(),
        log_d,
        pair_term,
        factorial_term,
        power_of_two_term,
        selberg_term,
        partition,
    })
}

/// Limit of `k^{-2} log C_k + ½ log k`:
/// `½ log π + 3/4 - log 4 - α log 2 + E`.
pub fn packing_limit(alpha: f64, energy: f64) -> f64 {
    0.5 * PI.ln() + 0.75 - 2.0 * LN_2 - alpha * LN_2 + energy
}

/// `k^{-2} log C_k + ½ log k` against [`packing_limit`]. The alternate
/// normalization carries `2E` in place of `E`.
pub fn packing_constant_series(
    measure: &SpectralMeasure,
    ks: &[usize],
    options: EnergyOptions,
) -> Result<SeriesReport> {
    check_ks(ks)?;
    let energy = offdiag_energy(measure, options)?;
    if !energy.is_finite() {
        return Err(Error::Precondition("logarithmic energy is infinite".into()));
    }
    let alpha = free_hausdorff_dimension(measure);
    let mut values = Vec::with_capacity(ks.len());
    for &k in ks {
        let c = packing_constant_log(measure, k)?;
        let kf = k as f64;
        values.push(c.log_c / (kf * kf) + 0.5 * kf.ln());
    }
    let target = packing_limit(alpha, energy.value);
    let alt = alternate("energy counted twice", values.clone(), target + energy.value, Relation::ConvergesTo);
    Ok(report("packing_constant", ks, values, target, Relation::ConvergesTo, Some(alt)))
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
    fn a_uniform_k4() {
        let a = build_a(&SpectralMeasure::uniform(0.0, 1.0), 4).unwrap();
        assert_eq!(a.eigenvalues, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(a.zero_count, 0);
    }

    #[test]
    fn a_mixed_k4() {
        let a = build_a(&half_atom_half_uniform(), 4).unwrap();
        assert_eq!(a.eigenvalues, vec![0.0, 0.0, 1.5, 2.0]);
        assert_eq!(a.quantile_count, 2);
        assert_eq!(a.atom_multiplicities[0].multiplicity, 2);
    }

    #[test]
    fn a_point_mass() {
        let m = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 1.0)]);
        assert_eq!(build_a(&m, 3).unwrap().eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn b_mixed_k16() {
        let b = build_b(&half_atom_half_uniform(), 16).unwrap();
        assert_eq!(b.atom_multiplicities[0].multiplicity, 4);
        assert_eq!(b.quantile_count, 6);
        assert_eq!(b.filler_count, 6);
        assert_eq!(&b.eigenvalues[4..10], &[1.25, 1.375, 1.5, 1.625, 1.75, 1.875]);
        assert!(b.eigenvalues[10..].iter().all(|&x| x > 5.0 && x <= 6.0));
        let p = pair_partition(&b);
        assert_eq!(p.s_count, 6);
        assert_eq!(p.s_count + p.w_count, 120);
    }

    #[test]
    fn b_example42() {
        let b = build_b(&SpectralMeasure::example42(1e-10), 100).unwrap();
        let first = b.atom_multiplicities[0];
        assert_eq!((first.location, first.multiplicity), (1.0, 40));
    }

    #[test]
    fn b_preconditions() {
        assert!(matches!(build_b(&SpectralMeasure::uniform(0.0, 1.0), 10), Err(Error::Precondition(_))));
        let m = SpectralMeasure::new(
            (0.0, 1.0),
            vec![Atom::new(0.5, 0.1)],
            DiffusePart::Uniform { lo: 0.0, hi: 1.0, mass: 0.9 },
        );
        assert!(matches!(build_b(&m, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn exclusion_uses_neighbouring_quantiles() {
        // atom at 0.5 inside uniform mass: quantile 0.5 itself is both neighbours
        let m = SpectralMeasure::new(
            (0.0, 1.0),
            vec![Atom::new(0.5, 0.5)],
            DiffusePart::Uniform { lo: 0.0, hi: 1.0, mass: 0.5 },
        );
        let b = build_b(&m, 16).unwrap();
        // λ_{j,16} = j/8, so 0.5 is λ_4
        assert_eq!(b.excluded_quantiles, vec![4]);
        assert_eq!(b.quantile_count, 5);
        assert_eq!(b.atom_multiplicities[0].multiplicity + b.quantile_count + b.filler_count, 16);
    }

    #[test]
    fn partitions() {
        let m = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 1.0)]);
        assert_eq!(pair_partition(&build_a(&m, 3).unwrap()).s_count, 3);
        let u = build_a(&SpectralMeasure::uniform(0.0, 1.0), 4).unwrap();
        let p = pair_partition(&u);
        assert_eq!((p.s_count, p.w_count), (0, 6));
    }

    #[test]
    fn counting_point_mass_k25() {
        let m = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 1.0)]);
        let b = build_b(&m, 25).unwrap();
        assert_eq!(pair_partition(&b).s_count, 190);
        let c = sk_counting_check(&m, &b);
        assert!(c.holds);
        assert_eq!((c.lhs, c.rhs), (405.0, 625.0));
    }

    #[test]
    fn inner_alpha_closed_form() {
        for &y in &[0.25, 0.3, 0.5, 0.6, 0.63] {
            let y2: f64 = y * y;
            let exact = (-(1.0 - y2) + ((1.0 - y2).powi(2) + 16.0 * y2).sqrt()) / 4.0;
            assert!((inner_alpha(y).unwrap() - exact).abs() < 1e-12);
        }
        assert!(matches!(inner_alpha(0.64), Err(Error::NoSolution { .. })));
    }

    #[test]
    fn regularized_series_point_mass() {
        let m = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 1.0)]);
        let r = regularized_product_series(&m, 1.0, &[2, 5, 9], 1e-10).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
        assert_eq!(r.target, 0.0);
        let r = regularized_product_series(&m, 0.25, &[3, 7], 1e-10).unwrap();
        for v in r.values {
            assert!((v - 0.25f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn packing_k2_by_hand() {
        let m = SpectralMeasure::atomic((0.0, 1.0), vec![Atom::new(0.0, 0.5), Atom::new(1.0, 0.5)]);
        let c = packing_constant_log(&m, 2).unwrap();
        // B_2 = diag(1, 5): r_1 = 0 drops out, one copy of 1, one filler at 1 + 3 + 1
        let expected = (PI / 2.0).ln() + 2.0 * 4f64.ln() - LN_2 - 2.0 * LN_2 + (1.0f64 / 6.0).ln();
        assert!((c.log_c - expected).abs() < 1e-14, "{} {}", c.log_c, expected);
    }

    #[test]
    fn series_rejects_bad_ks() {
        let m = SpectralMeasure::uniform(0.0, 1.0);
        assert!(regularized_product_series(&m, 0.1, &[], 1e-8).is_err());
        assert!(regularized_product_series(&m, 0.1, &[10, 5], 1e-8).is_err());
        assert!(regularized_product_series(&m, 0.1, &[K_CAP + 1], 1e-8).is_err());
        assert!(regularized_product_series(&m, 0.0, &[10], 1e-8).is_err());
    }
}
