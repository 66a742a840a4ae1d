use orbit_census::census::{periodic_sum_real, scan_periodic};
use orbit_census::potential::{Potential, Provenance};
use orbit_census::symbolic::{self, d_theta, Point, Symbol, TransitionMatrix, Word};
use orbit_census::transfer::{build_real_operator, pressure};
use proptest::prelude::*;

fn nr3() -> TransitionMatrix {
    TransitionMatrix::no_repeat(3)
}

/// Depth-2 potential on the no-repeat 3-shift with the given six values.
fn depth_two(values: &[f64]) -> Potential {
    let a = nr3();
    let cyl = symbolic::Cylinders::new(&a, 2).unwrap();
    let entries: Vec<(Word, f64)> = cyl.words().iter().cloned().zip(values.iter().copied()).collect();
    Potential::from_table(&a, 2, entries).unwrap()
}

/// Turn step choices into a word in which neighbours differ.
fn no_repeat_word(start: Symbol, steps: &[bool]) -> Vec<Symbol> {
    let mut w = vec![start];
    for &b in steps {
        let last = *w.last().unwrap();
        w.push((last + 1 + b as Symbol) % 3);
    }
    w
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..2.0, 6)
}

fn cyclic_word() -> impl Strategy<Value = Vec<Symbol>> {
    (0u8..3, prop::collection::vec(any::<bool>(), 1..12))
        .prop_map(|(s, steps)| no_repeat_word(s, &steps))
        .prop_filter("wraps around", |w| w.first() != w.last())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_matches_periodic_sum(v in values(), s in -1.5f64..0.5, n in 1usize..8) {
        let f = depth_two(&v);
        let m = build_real_operator(&f, s).unwrap();
        let tr = m.trace_power(n).re;
        let direct = periodic_sum_real(&f, n, s, symbolic::DEFAULT_BUDGET).unwrap();
        prop_assert!((tr - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn birkhoff_sum_is_rotation_invariant(v in values(), w in cyclic_word(), r in 0usize..12) {
        let f = depth_two(&v);
        let word = Word::new(w);
        let base = f.birkhoff_sum(word.symbols()).unwrap();
        let rot = f.birkhoff_sum(word.rotated(r % word.len()).symbols()).unwrap();
        prop_assert!((base - rot).abs() <= 1e-12 * base.abs());
    }

    #[test]
    fn birkhoff_sum_scales_under_repetition(v in values(), w in cyclic_word(), m in 1usize..5) {
        let f = depth_two(&v);
        let word = Word::new(w);
        let once = f.birkhoff_sum(word.symbols()).unwrap();
        let many = f.birkhoff_sum(word.repeated(m).symbols()).unwrap();
        prop_assert!((many - m as f64 * once).abs() <= 1e-12 * many.abs());
    }

    #[test]
    fn deepening_preserves_sums_and_pressure(v in values(), w in cyclic_word(), s in -1.0f64..0.5) {
        let f = depth_two(&v);
        let g = f.resample(4).unwrap();
        let word = Word::new(w).repeated(4);
        prop_assert_eq!(f.birkhoff_sum(word.symbols()).unwrap(), g.birkhoff_sum(word.symbols()).unwrap());
        let (pf, pg) = (pressure(&f, s).unwrap(), pressure(&g, s).unwrap());
        prop_assert!((pf - pg).abs() <= 1e-10);
    }

    #[test]
    fn distance_is_an_ultrametric(
        x in prop::collection::vec(0u8..3, 1..10),
        y in prop::collection::vec(0u8..3, 1..10),
        z in prop::collection::vec(0u8..3, 1..10),
        theta in 0.1f64..0.9,
    ) {
        let (px, py, pz) = (Point::Periodic(&x), Point::Periodic(&y), Point::Periodic(&z));
        let dxz = d_theta(px, pz, theta);
        prop_assert!(dxz <= d_theta(px, py, theta).max(d_theta(py, pz, theta)) + 1e-15);
        prop_assert_eq!(d_theta(px, py, theta), d_theta(py, px, theta));
    }

    #[test]
    fn wider_window_never_counts_less(v in values(), n in 2usize..9, a in 0.0f64..1.0, b in 0.0f64..1.0, grow in 0.0f64..0.5) {
        let f = depth_two(&v);
        let centre = n as f64 * 1.25;
        let (lo, hi) = (centre - a, centre + b);
        let count = |lo: f64, hi: f64| -> u64 {
            scan_periodic(&f, n, lo, hi, symbolic::DEFAULT_BUDGET, || 0u64, |c, _, _| *c += 1)
                .unwrap()
                .into_iter()
                .sum()
        };
        prop_assert!(count(lo - grow, hi + grow) >= count(lo, hi));
    }

    #[test]
    fn canonical_rotation_is_a_least_rotation(w in prop::collection::vec(0u8..4, 1..16)) {
        let word = Word::new(w);
        let c = word.canonical_rotation();
        prop_assert!(symbolic::is_least_rotation(c.symbols()));
        prop_assert_eq!(c.canonical_rotation(), c.clone());
        prop_assert_eq!(word.len() % word.minimal_period(), 0);
        for r in 0..word.len() {
            prop_assert!(c <= word.rotated(r));
        }
    }
}

#[test]
fn provenance_survives_resampling() {
    let f = Potential::from_fn(&nr3(), 2, Provenance::SinaiReduced, |w| 1.0 + w[0] as f64).unwrap();
    assert_eq!(f.resample(3).unwrap().provenance(), Provenance::SinaiReduced);
}
