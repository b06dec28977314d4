use num_traits::Signed;
use proptest::prelude::*;
use taf_core::autgroup::{
    alpha_on_point, cone_violation, exponent_compose, inner_witness, zigzag_image, ExponentVector,
};
use taf_core::cantor::{Point, Space, Tail};
use taf_core::matrixalg::{
    compose_chain, Coefficient, DirectSystem, EmbeddingStep, MatrixUnit, TriElement,
};
use taf_core::rational::{frac, int};
use taf_core::supernat::{SequenceProfile, Supernatural};
use taf_core::Q;

fn profile() -> impl Strategy<Value = SequenceProfile> {
    (
        prop::collection::vec(1u64..=6, 0..3),
        prop::collection::vec(1u64..=6, 1..4),
    )
        .prop_filter_map("cycle product 1", |(pre, cyc)| {
            SequenceProfile::new(pre, cyc).ok()
        })
}

fn small_profile() -> impl Strategy<Value = SequenceProfile> {
    (
        prop::collection::vec(1u64..=3, 0..2),
        prop::collection::vec(1u64..=3, 1..3),
    )
        .prop_filter_map("cycle product 1", |(pre, cyc)| {
            SequenceProfile::new(pre, cyc).ok()
        })
}

#[derive(Debug, Clone)]
struct Seeds {
    left: Vec<u64>,
    right: Vec<u64>,
    max: bool,
}

fn seeds(len: usize) -> impl Strategy<Value = Seeds> {
    (
        prop::collection::vec(any::<u64>(), 0..=len),
        prop::collection::vec(any::<u64>(), 0..=len),
        any::<bool>(),
    )
        .prop_map(|(left, right, max)| Seeds { left, right, max })
}

fn realize(space: &Space, seeds: &Seeds, tail: Option<Tail>) -> Point {
    let left = seeds
        .left
        .iter()
        .enumerate()
        .map(|(i, v)| v % space.s().term(i + 1) + 1)
        .collect();
    let right = seeds
        .right
        .iter()
        .enumerate()
        .map(|(i, v)| v % space.r().term(i + 1) + 1)
        .collect();
    let tail = tail.unwrap_or(if seeds.max { Tail::Max } else { Tail::Ones });
    space.point(left, right, tail).unwrap()
}

fn rotate(p: &SequenceProfile, by: usize) -> SequenceProfile {
    let mut cycle = p.cycle().to_vec();
    let by = by % cycle.len();
    cycle.rotate_left(by);
    SequenceProfile::new(p.preamble().to_vec(), cycle).unwrap()
}

fn unroll(p: &SequenceProfile) -> SequenceProfile {
    let mut pre = p.preamble().to_vec();
    pre.extend_from_slice(p.cycle());
    SequenceProfile::new(pre, p.cycle().to_vec()).unwrap()
}

fn sup(p: &SequenceProfile) -> Supernatural {
    Supernatural::from_profile(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn supernatural_ignores_rotation_and_unrolling(p in profile(), by in 0usize..5) {
        prop_assert_eq!(sup(&rotate(&p, by)), sup(&p));
        prop_assert_eq!(sup(&unroll(&p)), sup(&p));
    }

    #[test]
    fn divides_is_a_partial_order(a in profile(), b in profile(), c in profile()) {
        let (a, b, c) = (sup(&a), sup(&b), sup(&c));
        prop_assert!(a.divides(&a));
        if a.divides(&b) && b.divides(&c) {
            prop_assert!(a.divides(&c));
        }
        if a.divides(&b) && b.divides(&a) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn finite_equivalence_is_an_equivalence(a in profile(), b in profile(), c in profile()) {
        let (a, b, c) = (sup(&a), sup(&b), sup(&c));
        prop_assert!(a.finitely_equivalent(&a));
        prop_assert_eq!(a.finitely_equivalent(&b), b.finitely_equivalent(&a));
        if a.finitely_equivalent(&b) && b.finitely_equivalent(&c) {
            prop_assert!(a.finitely_equivalent(&c));
        }
    }

    #[test]
    fn infinite_primes_divide_the_cycle(p in profile()) {
        let s = sup(&p);
        let product = p.cycle_product().unwrap();
        for q in [2u64, 3, 5, 7, 11] {
            prop_assert_eq!(s.infinite_primes().contains(&q), product % q == 0);
            let late = (1..=40).filter(|&k| p.term(k) % q == 0).count();
            let later = (41..=80).filter(|&k| p.term(k) % q == 0).count();
            prop_assert_eq!(s.infinite_primes().contains(&q), late > 0 && later > 0);
        }
    }

    #[test]
    fn nu_is_injective_on_ones_tails(r in profile(), s in profile(), a in seeds(4), b in seeds(4)) {
        let sp = Space::new(r, s);
        let x = realize(&sp, &a, Some(Tail::Ones));
        let y = realize(&sp, &b, Some(Tail::Ones));
        if sp.nu(&x) == sp.nu(&y) {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn value_to_points_recovers_points(r in profile(), s in profile(), a in seeds(4)) {
        let sp = Space::new(r, s);
        let x = realize(&sp, &a, None);
        let found = sp.value_to_points(&sp.nu(&x)).unwrap();
        prop_assert!(found.contains(&x));
    }

    #[test]
    fn gap_successor_keeps_value(r in profile(), s in profile(), a in seeds(4)) {
        let sp = Space::new(r, s);
        let x = realize(&sp, &a, Some(Tail::Max));
        prop_assert!(sp.is_gap_point(&x));
        let succ = sp.gap_successor(&x).unwrap();
        prop_assert_eq!(sp.nu(&succ), sp.nu(&x));
        prop_assert_ne!(succ, x);
    }

    #[test]
    fn cocycle_sign_decides_relation(r in profile(), s in profile(), a in seeds(4), b in seeds(4), c in seeds(4), max in any::<bool>()) {
        let sp = Space::new(r, s);
        let tail = Some(if max { Tail::Max } else { Tail::Ones });
        let (x, y, z) = (realize(&sp, &a, tail), realize(&sp, &b, tail), realize(&sp, &c, tail));
        let dxy = sp.cocycle(&x, &y).unwrap();
        prop_assert_eq!(sp.in_r(&x, &y), !dxy.is_negative());
        prop_assert_eq!(dxy, sp.cocycle(&x, &z).unwrap() + sp.cocycle(&z, &y).unwrap());
    }

    #[test]
    fn gap_law_on_samples(r in profile(), s in profile(), a in seeds(4), zs in prop::collection::vec(seeds(5), 1..12)) {
        let sp = Space::new(r, s);
        let x = realize(&sp, &a, Some(Tail::Max));
        let succ = sp.gap_successor(&x).unwrap();
        prop_assert!(!sp.closure_member(&succ, &x));
        prop_assert!(sp.closure_member(&x, &succ));
        let mut probes: Vec<Point> = zs.iter().map(|z| realize(&sp, z, None)).collect();
        probes.push(x.clone());
        probes.push(succ.clone());
        for z in probes {
            prop_assert_eq!(sp.closure_member(&z, &succ), sp.closure_member(&z, &x) || z == succ);
        }
    }

    #[test]
    fn cylinder_measures_sum_to_one(r in small_profile(), s in small_profile(), level in 0usize..3) {
        let sp = Space::new(r, s);
        let total: Q = sp
            .window_words(level)
            .into_iter()
            .map(|w| sp.cylinder_measure(&sp.cylinder(level, w).unwrap()))
            .sum();
        prop_assert_eq!(total, int(1));
    }

    #[test]
    fn embeddings_are_homomorphisms(n in 1usize..5, t in 1usize..4, standard in any::<bool>()) {
        let step = if standard { EmbeddingStep::standard(t, n) } else { EmbeddingStep::refinement(t, n) };
        let image = |i, j| step.apply_unit(MatrixUnit::new(i, j, n).unwrap()).unwrap();
        for i in 1..=n {
            for j in i..=n {
                for k in j..=n {
                    prop_assert_eq!(image(i, j).mul(&image(j, k)).unwrap(), image(i, k));
                }
            }
        }
        prop_assert_eq!(step.apply(&TriElement::identity(n)).unwrap(), TriElement::identity(n * t));
    }

    #[test]
    fn matrix_oracle_matches_coordinates(r in small_profile(), s in small_profile(), a in seeds(2), b in seeds(2), max in any::<bool>()) {
        let sys = DirectSystem::new(r, s);
        let sp = sys.space().clone();
        let tail = Some(if max { Tail::Max } else { Tail::Ones });
        let (x, y) = (realize(&sp, &a, tail), realize(&sp, &b, tail));
        let start = x.support().max(y.support()) + 1;
        for level in start..start + 2 {
            prop_assert_eq!(sys.mu_in_r(&x, &y, level).unwrap(), sp.in_r(&x, &y));
        }
    }

    #[test]
    fn lex_position_is_monotone_bijection(r in small_profile(), s in small_profile(), level in 0usize..3) {
        let sys = DirectSystem::new(r, s);
        let sp = sys.space().clone();
        let d = sys.stage_size(level).unwrap();
        let words = sp.window_words(level);
        prop_assert_eq!(words.len(), d);
        let mut prev = 0;
        for w in words {
            let x = sp.point_from_window(level, &w, Tail::Ones).unwrap();
            let (a, size) = sys.lex_position(&x, level).unwrap();
            prop_assert_eq!(size, d);
            prop_assert_eq!(a, prev + 1);
            prop_assert_eq!(sys.word_at(a, level).unwrap(), w);
            prev = a;
        }
    }

    #[test]
    fn alpha_scales_and_composes(a2 in -3i64..=3, a3 in -3i64..=3, b2 in -3i64..=3, b3 in -3i64..=3, x in seeds(4)) {
        let sp = Space::new(
            SequenceProfile::new(vec![], vec![2, 3]).unwrap(),
            SequenceProfile::new(vec![], vec![6]).unwrap(),
        );
        let x = realize(&sp, &x, None);
        let a = ExponentVector::new([(2, a2), (3, a3)]);
        let b = ExponentVector::new([(2, b2), (3, b3)]);
        let ax = alpha_on_point(&sp, &a, &x).unwrap();
        prop_assert_eq!(sp.nu(&ax), a.scaling() * sp.nu(&x));
        prop_assert_eq!(ax.tail(), x.tail());
        let composed = alpha_on_point(&sp, &exponent_compose(&a, &b), &x).unwrap();
        let stepwise = alpha_on_point(&sp, &a, &alpha_on_point(&sp, &b, &x).unwrap()).unwrap();
        prop_assert_eq!(composed, stepwise);
    }

    #[test]
    fn zigzag_agrees_with_alpha(s in small_profile().prop_filter("2 must be infinite in s", |s| s.cycle_product().unwrap() % 2 == 0), x in seeds(3), wide in any::<bool>()) {
        let level = if wide { 4 } else { 2 };
        let sys = DirectSystem::new(SequenceProfile::constant(2).unwrap(), s);
        let sp = sys.space().clone();
        let mut x = x;
        x.left.truncate(level - 1);
        x.right.truncate(level - 1);
        let x = realize(&sp, &x, Some(Tail::Ones));
        let half = ExponentVector::new([(2, -1)]);
        prop_assert_eq!(zigzag_image(2, &sys, &x, level).unwrap(), alpha_on_point(&sp, &half, &x).unwrap());
    }

    #[test]
    fn inner_witness_conjugates(size in 1usize..=5, fiber in 1usize..=3, entries in prop::collection::vec((-4i64..=4, -4i64..=4), 12)) {
        let mut it = entries.into_iter().map(|(a, b)| {
            let c = Coefficient::new(int(a), int(b));
            if c.is_zero() { Coefficient::one() } else { c }
        }).cycle();
        let offdiag = (1..size).map(|_| (0..fiber).map(|_| it.next().unwrap()).collect()).collect();
        let w = inner_witness(size, fiber, offdiag).unwrap();
        prop_assert!(w.verify().unwrap());
    }
}

#[test]
fn commutation_is_exhaustive() {
    let mut mismatches = 0;
    for n in 1..=64usize {
        for r in 1..=64 / n {
            for s in 1..=64 / (n * r) {
                let rs = [
                    EmbeddingStep::refinement(r, n),
                    EmbeddingStep::standard(s, n * r),
                ];
                let sr = [
                    EmbeddingStep::standard(s, n),
                    EmbeddingStep::refinement(r, n * s),
                ];
                for e in MatrixUnit::all(n) {
                    if compose_chain(&rs, e).unwrap() != compose_chain(&sr, e).unwrap() {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn invariant_measure_is_product_measure() {
    for (r, s) in [
        (vec![2], vec![2]),
        (vec![2], vec![3]),
        (vec![3, 1], vec![2]),
    ] {
        let sp = Space::new(
            SequenceProfile::new(vec![], r).unwrap(),
            SequenceProfile::new(vec![], s).unwrap(),
        );
        for level in 1..=2 {
            let m = sp.unique_invariant_measure(level).unwrap();
            assert_eq!(m.solution_dimension, 1);
            for (cyl, w) in &m.weights {
                assert_eq!(w, &sp.cylinder_measure(cyl));
            }
        }
    }
}

#[test]
fn distinct_exponents_move_the_probe_apart() {
    let sp = Space::new(
        SequenceProfile::new(vec![], vec![2, 3]).unwrap(),
        SequenceProfile::new(vec![], vec![6]).unwrap(),
    );
    let probe = sp.point(vec![], vec![2], Tail::Ones).unwrap();
    assert_eq!(sp.nu(&probe), frac(1, 2));
    let mut images = std::collections::HashSet::new();
    for a in -3..=3 {
        for b in -3..=3 {
            let c = ExponentVector::new([(2, a), (3, b)]);
            assert!(images.insert(alpha_on_point(&sp, &c, &probe).unwrap()));
        }
    }
    assert_eq!(images.len(), 49);
}

#[test]
fn foreign_primes_break_the_cone() {
    let sp = Space::new(
        SequenceProfile::new(vec![], vec![2]).unwrap(),
        SequenceProfile::new(vec![], vec![3]).unwrap(),
    );
    for c in [frac(1, 3), int(3), frac(2, 3), int(6)] {
        let (v, f) = cone_violation(&sp, &c, 1000).expect("a value leaves the cone");
        assert!(sp.value_to_points(&(f * v)).is_err());
    }
    let sp = Space::new(
        SequenceProfile::constant(6).unwrap(),
        SequenceProfile::constant(6).unwrap(),
    );
    for c in [int(2), frac(1, 3), frac(3, 2)] {
        assert_eq!(cone_violation(&sp, &c, 1000), None);
    }
}
