//! Special functions and the Gamma-laden constants used by the entropy
//! bounds: log-Gamma, the Selberg product at unit exponents, the normalized
//! Gamma-ratio sequence, the ball volume `L_k` and the joint eigenvalue
//! density of Lebesgue measure on Hermitian matrices.
//!
//! Everything is evaluated in the log domain; `prod_j j!` overflows `f64`
//! already at `k = 20`.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::sum::{compensated_sum, NeumaierSum};

const ONE_MINUS_EULER_GAMMA: f64 = 0.422_784_335_098_467_14;

/// Taylor coefficients of `ln Γ(2 + z)` beyond the linear term:
/// `(-1)^n (ζ(n) - 1) / n` for `n = 2, 3, ...`.
#[allow(clippy::excessive_precision)]
const LGAMMA_AT_TWO: [f64; 40] = [
    3.224_670_334_241_132e-1,
    -6.735_230_105_319_81e-2,
    2.058_080_842_778_454_6e-2,
    -7.385_551_028_673_986e-3,
    2.890_510_330_741_523_4e-3,
    -1.192_753_911_703_261e-3,
    5.096_695_247_430_425e-4,
    -2.231_547_584_535_793_8e-4,
    9.945_751_278_180_853e-5,
    -4.492_623_673_813_314e-5,
    2.050_721_277_567_069e-5,
    -9.439_488_275_268_397e-6,
    4.374_866_789_907_488e-6,
    -2.039_215_753_801_366e-6,
    9.551_412_130_407_419e-7,
    -4.492_469_198_764_566e-7,
    2.120_718_480_555_466_5e-7,
    -1.004_322_482_396_81e-7,
    4.769_810_169_363_98e-8,
    -2.271_109_460_894_316_4e-8,
    1.083_865_921_489_695_5e-8,
    -5.183_475_041_970_047e-9,
    2.483_674_543_802_478_5e-9,
    -1.192_140_140_586_091_2e-9,
    5.731_367_241_678_862e-10,
    -2.759_522_885_124_233_4e-10,
    1.330_476_437_424_448_9e-10,
    -6.422_964_563_838_1e-11,
    3.104_424_774_732_227_6e-11,
    -1.502_138_408_075_414_2e-11,
    7.275_974_480_239_079e-12,
    -3.527_742_476_575_915e-12,
    1.711_991_790_559_618e-12,
    -8.315_385_841_420_285e-13,
    4.042_200_525_289_44e-13,
    -1.966_475_631_096_616_5e-13,
    9.573_630_387_838_556e-14,
    -4.664_076_026_428_374_4e-14,
    2.273_736_960_065_972_4e-14,
    -1.109_139_947_083_452_2e-14,
];

/// Bernoulli-number coefficients `B_{2m} / (2m (2m - 1))` of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_CUTOFF: f64 = 15.0;

/// `ln Γ(2 + z)` for `|z| <= 1/2`.
fn lgamma_near_two(z: f64) -> f64 {
    let mut acc = 0.0;
    for &c in LGAMMA_AT_TWO.iter().rev() {
        acc = acc * z + c;
    }
    z * (ONE_MINUS_EULER_GAMMA + z * acc)
}

fn lgamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for &c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series * inv
}

/// Natural logarithm of the Gamma function for `x > 0`.
///
/// The argument is shifted into `[1.5, 2.5)` by the recurrence `Γ(x+1) = xΓ(x)`
/// and evaluated from the Taylor series about 2 there, so the zeros at 1 and 2
/// keep full relative accuracy. Arguments at or above 15 use the Stirling
/// series directly.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x >= STIRLING_CUTOFF {
        return lgamma_stirling(x);
    }
    if x < 1.5 {
        if x >= 0.5 {
            // z = x - 1 is exact here; ln x = ln1p(z).
            let z = x - 1.0;
            return lgamma_near_two(z) - z.ln_1p();
        }
        let mut y = x;
        let mut prod = 1.0;
        while y < 1.5 {
            prod *= y;
            y += 1.0;
        }
        return lgamma_near_two(y - 2.0) - prod.ln();
    }
    if x < 2.5 {
        return lgamma_near_two(x - 2.0);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y >= 2.5 {
        y -= 1.0;
        prod *= y;
    }
    lgamma_near_two(y - 2.0) + prod.ln()
}

/// `ln(n!)` for integer `n`.
pub fn log_factorial(n: usize) -> f64 {
    log_gamma_unchecked(n as f64 + 1.0)
}

/// `log prod_{j=1}^k Γ(j+1) Γ(j)^2 / Γ(k+j)`: the Selberg integral
/// `∫_{[0,1]^k} prod_{i<j} (t_i - t_j)^2 dt`.
///
/// Each factor is assembled as `ln j + 3 ln Γ(j) - ln Γ(k+j)` and the k
/// factors are added with compensated summation, so no two large partial
/// sums are ever subtracted.
pub fn selberg_log(k: usize) -> f64 {
    assert!(k >= 1, "selberg_log requires k >= 1");
    compensated_sum((1..=k).map(|j| {
        let jf = j as f64;
        jf.ln() + 3.0 * log_gamma_unchecked(jf) - log_gamma_unchecked((k + j) as f64)
    }))
}

/// `log D_k` with `D_k = π^{k(k-1)/2} / prod_{j=1}^k j!`.
pub fn log_mehta_constant(k: usize) -> f64 {
    let kf = k as f64;
    let factorials = compensated_sum((1..=k).map(log_factorial));
    0.5 * kf * (kf - 1.0) * PI.ln() - factorials
}

/// Log of the joint eigenvalue density `D_k prod_{i<j} (t_i - t_j)^2` on the
/// ordered chamber. Repeated eigenvalues give `-inf`.
pub fn mehta_log_density(eigenvalues: &[f64]) -> f64 {
    let k = eigenvalues.len();
    let mut pairs = NeumaierSum::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let d = eigenvalues[j] - eigenvalues[i];
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            pairs.add(2.0 * d.abs().ln());
        }
    }
    log_mehta_constant(k) + pairs.value()
}

/// `log L_k`, the Lebesgue measure of the ball of radius `sqrt(k)` in `R^{k^2}`.
pub fn log_ball_volume(k: usize) -> f64 {
    assert!(k >= 1, "log_ball_volume requires k >= 1");
    let kf = k as f64;
    let half_dim = 0.5 * kf * kf;
    half_dim * (PI * kf).ln() - log_gamma_unchecked(half_dim + 1.0)
}

/// `k^{-2} log L_k + (1/2) log k`, which tends to `(1/2) log(2πe)`.
pub fn normalized_log_ball_volume(k: usize) -> f64 {
    let kf = k as f64;
    log_ball_volume(k) / (kf * kf) + 0.5 * kf.ln()
}

/// The normalized sequence `k^{-2} selberg_log(k)` and its limit `-log 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSeries {
    pub ks: Vec<usize>,
    pub normalized_values: Vec<f64>,
    pub limit: f64,
    /// `value - limit` per k.
    pub gaps: Vec<f64>,
    /// True when `|gap|` strictly decreases along `ks`.
    pub gaps_shrinking: bool,
}

pub fn gamma_ratio_limit_series(ks: &[usize]) -> Result<GammaSeries> {
    if ks.is_empty() {
        return Err(Error::Domain("gamma_ratio_limit_series needs at least one k".into()));
    }
    if ks.contains(&0) {
        return Err(Error::Domain("k must be positive".into()));
    }
    let limit = -(4.0f64).ln();
    let normalized_values: Vec<f64> = par::map_range(ks.len(), |i| {
        let k = ks[i] as f64;
        selberg_log(ks[i]) / (k * k)
    });
    let gaps: Vec<f64> = normalized_values.iter().map(|v| v - limit).collect();
    let gaps_shrinking = gaps.windows(2).all(|w| w[1].abs() < w[0].abs());
    Ok(GammaSeries { ks: ks.to_vec(), normalized_values, limit, gaps, gaps_shrinking })
}

/// Outcome of a Monte Carlo check of the Selberg integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelbergMcCheck {
    pub k: usize,
    pub eps: f64,
    pub samples: u64,
    pub seed: u64,
    pub mc_estimate: f64,
    pub std_error: f64,
    pub closed_form: f64,
    pub z_score: f64,
}

/// Number of independent sub-streams a Monte Carlo run is split into. Fixed,
/// so the estimate does not depend on how many threads consume them.
pub const MC_STREAMS: usize = 64;

#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments { n, mean: self.mean + d * other.n / n, m2: self.m2 + other.m2 + d * d * self.n * other.n / n }
    }
}

#[inline]
fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Monte Carlo estimate of `∫_{[-eps,eps]^k} prod_{i<j} (t_i - t_j)^2 dt`
/// compared against `(2 eps)^{k^2} exp(selberg_log(k))`.
///
/// Points are drawn uniformly on the cube with ChaCha8, one stream per
/// `(k, sub-stream)` pair, so a given `(k, eps, samples, seed)` always
/// reproduces the same estimate.
pub fn selberg_mc_check(k: usize, eps: f64, samples: u64, seed: u64) -> Result<SelbergMcCheck> {
    if k == 0 || k > 6 {
        return Err(Error::Domain(format!("selberg_mc_check supports 1 <= k <= 6, got {k}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let streams = MC_STREAMS as u64;
    let chunks: Vec<Moments> = par::map_range(MC_STREAMS, |s| {
        let s = s as u64;
        let count = samples / streams + u64::from(s < samples % streams);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((k as u64) << 32) | s);
        let mut t = [0.0f64; 6];
        let mut m = Moments::default();
        for _ in 0..count {
            for ti in t.iter_mut().take(k) {
                *ti = -eps + 2.0 * eps * unit_uniform(&mut rng);
            }
            let mut prod = 1.0;
            for i in 0..k {
                for j in (i + 1)..k {
                    let d = t[i] - t[j];
                    prod *= d * d;
                }
            }
            m.push(prod);
        }
        m
    });
    let total = chunks.into_iter().fold(Moments::default(), Moments::merge);
    let volume = (2.0 * eps).powi(k as i32);
    let mc_estimate = volume * total.mean;
    let variance = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    let std_error = volume * (variance / total.n).sqrt();
    let kf = k as f64;
    let closed_form = ((kf * kf) * (2.0 * eps).ln() + selberg_log(k)).exp();
    let diff = mc_estimate - closed_form;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 * closed_form.abs() {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    Ok(SelbergMcCheck { k, eps, samples, seed, mc_estimate, std_error, closed_form, z_score })
}
