use free_entropy::asymptotics::mehta_log_density;
use free_entropy::entropy::{free_family_bounds, free_hausdorff_dimension, hausdorff_entropy_bounds, sandwich_width};
use free_entropy::measure::mass_count;
use free_entropy::microstates::{build_a, build_b, pair_partition, regularized_product_series};
use free_entropy::spec_file::{parse_measure, to_json};
use free_entropy::{offdiag_energy, Atom, DiffusePart, EnergyOptions, SpectralMeasure};
use proptest::prelude::*;

/// Shape of a random measure on `[lo, lo + width]`, kept separate from the
/// measure so the same shape can be moved around.
#[derive(Debug, Clone)]
struct Shape {
    kind: usize,
    mass: f64,
    lo: f64,
    width: f64,
    /// atom positions in `[0, 1]` relative to the support, with raw weights
    atoms: Vec<(f64, f64)>,
    /// raw increments of the piecewise-linear CDF
    pl: Vec<f64>,
}

impl Shape {
    fn build(&self, shift: f64, scale: f64, reflect: bool) -> SpectralMeasure {
        let map = |x: f64| {
            let y = shift + scale * x;
            if reflect {
                -y
            } else {
                y
            }
        };
        let (mut a, mut b) = (map(self.lo), map(self.lo + self.width));
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let mass = if self.atoms.is_empty() {
            1.0
        } else if self.kind == 0 {
            0.0
        } else {
            self.mass
        };
        let total: f64 = self.atoms.iter().map(|x| x.1).sum();
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|&(u, w)| Atom::new(map(self.lo + u * self.width), (1.0 - mass) * w / total))
            .collect();
        let (lo, hi) = (self.lo, self.lo + self.width);
        let diffuse = match self.kind {
            0 => DiffusePart::Empty,
            1 => DiffusePart::Uniform { lo: a, hi: b, mass },
            2 => DiffusePart::Semicircle { center: 0.5 * (a + b), radius: 0.5 * (b - a), mass },
            3 => DiffusePart::Arcsine { lo: a, hi: b, mass },
            _ => {
                let steps = self.pl.len();
                let sum: f64 = self.pl.iter().sum();
                let mut knots = vec![(lo, 0.0)];
                let mut acc = 0.0;
                for (i, p) in self.pl.iter().enumerate() {
                    acc += p;
                    let x = lo + (hi - lo) * (i + 1) as f64 / steps as f64;
                    knots.push((x, if i + 1 == steps { mass } else { mass * acc / sum }));
                }
                let mut knots: Vec<(f64, f64)> = knots.into_iter().map(|(x, f)| (map(x), f)).collect();
                if reflect {
                    knots = knots.into_iter().rev().map(|(x, f)| (x, mass - f)).collect();
                    knots[0].1 = 0.0;
                }
                DiffusePart::PiecewiseLinearCdf { knots }
            }
        };
        SpectralMeasure::new((a, b), atoms, diffuse)
    }

    fn measure(&self) -> SpectralMeasure {
        self.build(0.0, 1.0, false)
    }
}

fn shape() -> impl Strategy<Value = Shape> {
    (
        0usize..5,
        0.1f64..0.95,
        -5.0f64..5.0,
        0.25f64..4.0,
        prop::collection::vec((0.0f64..=1.0, 0.05f64..1.0), 0..4),
        prop::collection::vec(0.05f64..1.0, 1..5),
    )
        .prop_map(|(kind, mass, lo, width, mut atoms, pl)| {
            atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
            atoms.dedup_by(|x, y| x.0 == y.0);
            if kind == 0 && atoms.is_empty() {
                atoms.push((0.5, 1.0));
            }
            Shape { kind, mass, lo, width, atoms, pl }
        })
}

fn choose2(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

fn isqrt(k: usize) -> usize {
    (0..=k).take_while(|r| r * r <= k).last().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_measures_are_valid(s in shape()) {
        let m = s.measure();
        let report = m.validate();
        prop_assert!(report.is_valid(), "{:?}", report);
        let (_, b) = m.support();
        prop_assert!((m.cdf(b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantiles_hit_their_levels(s in shape(), k in 4usize..=400) {
        let m = s.measure();
        let lambdas = m.diffuse_quantiles(k);
        prop_assert_eq!(lambdas.len(), mass_count(m.diffuse().mass(), k));
        for w in lambdas.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for (j, &l) in lambdas.iter().enumerate() {
            let level = (j + 1) as f64 / k as f64;
            prop_assert!((m.diffuse().cdf(l) - level).abs() < 1e-10, "j {} λ {} level {}", j + 1, l, level);
        }
    }

    #[test]
    fn a_counts(s in shape(), k in 4usize..=400) {
        let m = s.measure();
        let a = build_a(&m, k).unwrap();
        prop_assert_eq!(a.eigenvalues.len(), k);
        prop_assert_eq!(a.quantile_count, mass_count(m.diffuse().mass(), k));
        let mut placed = a.quantile_count;
        for am in &a.atom_multiplicities {
            prop_assert_eq!(am.multiplicity, mass_count(am.weight, k));
            placed += am.multiplicity;
        }
        prop_assert_eq!(a.zero_count, k - placed);
        let (lo, hi) = m.support();
        prop_assert!(a.eigenvalues.iter().all(|&x| x >= lo.min(0.0) && x <= hi.max(0.0)));
        prop_assert!(a.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let p = pair_partition(&a);
        prop_assert_eq!(p.s_count + p.w_count, choose2(k));
    }

    #[test]
    fn b_counts(s in shape(), k in 4usize..=400) {
        let m = s.measure();
        let Ok(b) = build_b(&m, k) else {
            // only legitimate failures: no atoms or the heaviest atom is too light for k
            let heaviest = m.atoms_by_weight().first().map(|a| mass_count(a.weight, k));
            prop_assert!(heaviest.is_none_or(|c| c < isqrt(k)));
            return Ok(());
        };
        prop_assert_eq!(b.eigenvalues.len(), k);
        let mults: usize = b.atom_multiplicities.iter().map(|a| a.multiplicity).sum();
        prop_assert_eq!(mults + b.quantile_count + b.filler_count, k);
        let n_k = b.n_k.unwrap();
        prop_assert!(b.excluded_quantiles.len() <= 2 * n_k);
        let first = b.atom_multiplicities[0];
        prop_assert_eq!(first.multiplicity, mass_count(first.weight, k) - isqrt(k));
        let (lo, hi) = m.support();
        prop_assert!(b.eigenvalues.iter().all(|&x| x >= lo && x <= hi + 4.0));
        let fillers = b.eigenvalues.iter().filter(|&&x| x > hi + 3.0).count();
        prop_assert_eq!(fillers, b.filler_count);
        let p = pair_partition(&b);
        prop_assert_eq!(p.s_count + p.w_count, choose2(k));
        let expected: u64 = b.atom_multiplicities.iter().map(|a| choose2(a.multiplicity)).sum();
        prop_assert_eq!(p.s_count, expected);
    }

    #[test]
    fn spec_json_round_trip(s in shape()) {
        let m = s.measure();
        let text = to_json(&m);
        let back = parse_measure(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn mehta_translation_invariant(raw in prop::collection::vec(-200i32..200, 2..8), shift in -50i32..50) {
        let mut t: Vec<f64> = raw.iter().map(|&x| x as f64 / 64.0).collect();
        t.sort_by(f64::total_cmp);
        let moved: Vec<f64> = t.iter().map(|x| x + shift as f64).collect();
        prop_assert_eq!(mehta_log_density(&t).to_bits(), mehta_log_density(&moved).to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_affine_invariance(s in shape(), shift in -10.0f64..10.0, scale in 0.1f64..10.0) {
        let opts = EnergyOptions::with_tol(1e-9);
        let m = s.measure();
        let e = offdiag_energy(&m, opts).unwrap().value;
        // only the off-diagonal mass 1 - Σc² feels the dilation
        let alpha = free_hausdorff_dimension(&m);
        let moved = offdiag_energy(&s.build(shift, scale, false), opts).unwrap().value;
        prop_assert!((moved - e - alpha * scale.ln()).abs() < 1e-7, "{} vs {}", moved, e + alpha * scale.ln());
        let reflected = offdiag_energy(&s.build(0.0, 1.0, true), opts).unwrap().value;
        prop_assert!((reflected - e).abs() < 1e-7);
    }

    #[test]
    fn sandwich_identities(s in shape()) {
        let m = s.measure();
        let opts = EnergyOptions::default();
        let b = hausdorff_entropy_bounds(&m, opts).unwrap();
        prop_assert!((b.upper - b.lower - sandwich_width(b.alpha)).abs() < 1e-12);
        prop_assert!(b.lower <= b.upper);
        prop_assert!((0.0..=1.0).contains(&b.alpha));
        let f = free_family_bounds(std::slice::from_ref(&m), opts).unwrap();
        prop_assert!((f.lower - b.lower).abs() < 1e-12);
        prop_assert!((f.upper - b.upper).abs() < 1e-12);
        let max_c = m.atoms().iter().map(|a| a.weight).fold(0.0, f64::max);
        prop_assert!(b.alpha <= 1.0 - max_c * max_c + 1e-12);
        // translating one member leaves the family bounds unchanged
        let two = free_family_bounds(&[m.clone(), s.measure()], opts).unwrap();
        let moved = free_family_bounds(&[m, s.build(7.25, 1.0, false)], opts).unwrap();
        prop_assert!((two.lower - moved.lower).abs() < 1e-9);
        prop_assert!((two.upper - moved.upper).abs() < 1e-9);
    }

    #[test]
    fn regularized_series_monotone_in_eps(s in shape(), factor in 0.01f64..0.9) {
        let m = s.measure();
        let (a, b) = m.support();
        let big = (b - a) * (b - a);
        let ks = [8, 40, 120];
        let hi = regularized_product_series(&m, big, &ks, 1e-8).unwrap();
        let lo = regularized_product_series(&m, big * factor, &ks, 1e-8).unwrap();
        for (x, y) in hi.values.iter().zip(&lo.values) {
            prop_assert!(x >= y);
        }
        prop_assert!(hi.target >= lo.target);
    }
}
