use arbor::axes::{classify_pair, AxisRelation};
use arbor::descent::{apply_replacement, big_l, decide, find_improving_move, is_minimal, ReplacementSpec, TrackedTuple};
use arbor::harness::{random_tuple, GenConfig};
use arbor::isometry::length_from_trace;
use arbor::tree::{Tree, Vertex};
use arbor::verify::{brute_force_improvement, objective};
use arbor::{Isometry, Mat2, Prime, Rational, Valuation};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Prime::new(p).unwrap())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-2000i64..2000, 1i64..2000).prop_map(|(n, d)| Rational::new(n, d))
}

/// `[[a pᵉ, b pᶠ], [c pᵍ, d]]` with determinant 1; may be elliptic.
fn sl2(p: Prime, bound: i64) -> impl Strategy<Value = Mat2> {
    let r = -bound..=bound;
    (r.clone(), r.clone(), r.clone(), r.clone(), r.clone(), r)
        .prop_filter("a = 0", |t| t.0 != 0)
        .prop_map(move |(a, b, c, e, f, g)| {
            let tl = Rational::from_integer(a) * p.power(e);
            let tr = Rational::from_integer(b) * p.power(f);
            let bl = Rational::from_integer(c) * p.power(g);
            let d = &(Rational::one() + &tr * &bl) / &tl;
            Mat2::new(tl, tr, bl, d)
        })
}

/// Products of two generated elements, which fill out more of the group.
fn element(p: Prime) -> impl Strategy<Value = Mat2> {
    (sl2(p, 4), sl2(p, 4)).prop_map(|(x, y)| x.mul(&y))
}

fn prime_and<S: Strategy + 'static, F: Fn(Prime) -> S + Clone + 'static>(f: F) -> impl Strategy<Value = (Prime, S::Value)> {
    prime().prop_flat_map(move |p| (Just(p), f(p)))
}

fn length(m: &Mat2, p: Prime) -> u64 {
    length_from_trace(&m.trace(), p)
}

fn vertex(t: &Tree, m: &Mat2) -> Vertex {
    t.apply(m, &t.base())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn valuation_is_multiplicative_and_ultrametric(p in prime(), x in rational(), y in rational()) {
        prop_assert_eq!((&x * &y).vp(p), x.vp(p) + y.vp(p));
        let sum = (&x + &y).vp(p);
        let lower = x.vp(p).min(y.vp(p));
        prop_assert!(sum >= lower);
        if x.vp(p) != y.vp(p) {
            prop_assert_eq!(sum, lower);
        }
    }

    #[test]
    fn residues_are_canonical(p in prime(), x in rational(), k in -4i64..6) {
        let r = x.reduce_mod_power(p, k);
        let gap = (&x - &r).vp(p);
        prop_assert!(gap >= Valuation::Finite(k));
        prop_assert_eq!(r.reduce_mod_power(p, k), r.clone());
        let shifted = &x + &p.power(k);
        prop_assert_eq!(shifted.reduce_mod_power(p, k), r);
    }

    #[test]
    fn rational_text_round_trips(x in rational()) {
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn determinant_is_multiplicative((p, (x, y)) in prime_and(|p| (sl2(p, 5), sl2(p, 5)))) {
        let _ = p;
        prop_assert!(x.det().is_one());
        prop_assert!(x.mul(&y).det().is_one());
        let skew = x.scale(&Rational::new(3, 7));
        prop_assert_eq!(skew.mul(&y).det(), &skew.det() * &y.det());
    }

    #[test]
    fn length_is_a_class_function((p, (g, h)) in prime_and(|p| (element(p), element(p)))) {
        let l = length(&g, p);
        prop_assert_eq!(length(&g.adjugate(), p), l);
        prop_assert_eq!(length(&h.mul(&g).mul(&h.adjugate()), p), l);
    }

    #[test]
    fn trace_formula_matches_tree((p, g) in prime_and(element)) {
        let tree = Tree::new(p);
        prop_assert_eq!(tree.oracle_translation_length(&g), length(&g, p));
    }

    #[test]
    fn tree_metric_axioms((p, (a, b, c, g)) in prime_and(|p| (element(p), element(p), element(p), element(p)))) {
        let t = Tree::new(p);
        let (u, v, w) = (vertex(&t, &a), vertex(&t, &b), vertex(&t, &c));
        prop_assert_eq!(t.distance(&u, &v), t.distance(&v, &u));
        prop_assert!(t.distance(&u, &w) <= t.distance(&u, &v) + t.distance(&v, &w));
        prop_assert_eq!(t.distance(&u, &u), 0);
        prop_assert_eq!(t.distance(&t.apply(&g, &u), &t.apply(&g, &v)), t.distance(&u, &v));
        let path = t.geodesic(&u, &v);
        prop_assert_eq!(path.len() as u64, t.distance(&u, &v));
        for (k, x) in path.vertices.iter().enumerate() {
            prop_assert_eq!(t.distance(&u, x) + t.distance(x, &v), path.len() as u64);
            prop_assert_eq!(t.distance(&u, x), k as u64);
        }
    }

    #[test]
    fn axis_coordinates_shift_by_length((p, (g, h)) in prime_and(|p| (element(p), element(p)))) {
        let t = Tree::new(p);
        prop_assume!(length(&g, p) > 0);
        let frame = t.axis_frame(&g).unwrap();
        let l = frame.length() as i64;
        for s in -l..=2 * l {
            let v = frame.vertex_at(s);
            prop_assert_eq!(frame.coordinate(&v), Some(s));
            prop_assert_eq!(t.apply(&g, &v), frame.vertex_at(s + l));
        }
        // displacement grows by twice the distance to the axis
        let x = vertex(&t, &h);
        let c = frame.coordinate(&frame.project(&x)).unwrap();
        let nearest = (c - 2 * l..=c + 2 * l)
            .map(|s| t.distance(&x, &frame.vertex_at(s)))
            .min()
            .unwrap();
        prop_assert_eq!(t.distance(&x, &t.apply(&g, &x)), frame.length() + 2 * nearest);
    }

    #[test]
    fn classification_symmetries((p, (g, h)) in prime_and(|p| (element(p), element(p)))) {
        prop_assume!(length(&g, p) > 0 && length(&h, p) > 0);
        let a = Isometry::new(g, p).unwrap();
        let b = Isometry::new(h, p).unwrap();
        let ab = classify_pair(&a, &b).unwrap();
        prop_assert_eq!(classify_pair(&b, &a).unwrap(), ab);
        let flipped = classify_pair(&a, &b.inverse()).unwrap();
        match ab {
            AxisRelation::Overlap { delta, same_orientation } => prop_assert_eq!(
                flipped,
                AxisRelation::Overlap { delta, same_orientation: !same_orientation }
            ),
            other => prop_assert_eq!(flipped, other),
        }
    }
}

fn random_tuples(n: usize, bound: i64, count: u64) -> Vec<(Prime, Vec<Mat2>)> {
    let mut out = Vec::new();
    for p in [2, 3, 5] {
        let cfg = GenConfig::new(Prime::new(p).unwrap(), bound, n, 11).unwrap();
        out.extend((0..count).map(|t| (cfg.p, random_tuple(&cfg, t).0)));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn replacements_keep_words_and_scores_consistent(
        seed in 0u64..10_000,
        pivot in 0usize..4,
        left in 0u32..16,
        right in 0u32..16,
    ) {
        let cfg = GenConfig::new(Prime::new(3).unwrap(), 4, 4, seed).unwrap();
        let x = TrackedTuple::from_generators(random_tuple(&cfg, 0).0, cfg.p).unwrap();
        let others: Vec<usize> = (0..4).filter(|&i| i != pivot).collect();
        let pick = |mask: u32| others.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect::<Vec<_>>();
        let spec = ReplacementSpec::new(pivot, &pick(left), &pick(right)).unwrap();
        let y = apply_replacement(&x, &spec).unwrap();
        prop_assert!(y.words_consistent());
        let matrices: Vec<Mat2> = y.isometries().map(|g| g.matrix().clone()).collect();
        prop_assert_eq!(big_l(&y), objective(&matrices, cfg.p));
    }
}

#[test]
fn table_search_agrees_with_brute_force() {
    for (p, gens) in random_tuples(3, 4, 40).into_iter().chain(random_tuples(4, 3, 10)) {
        let x = TrackedTuple::from_generators(gens.clone(), p).unwrap();
        let fast = find_improving_move(&x);
        let slow = brute_force_improvement(&gens, p);
        assert_eq!(fast.is_none(), slow.is_none(), "{gens:?}");
        assert_eq!(is_minimal(&x), slow.is_none());
        if let Some((spec, l)) = fast {
            let y = apply_replacement(&x, &spec).unwrap();
            assert_eq!(big_l(&y), l);
            assert!(l < big_l(&x));
        }
    }
}

#[test]
fn decisions_are_deterministic() {
    for (p, gens) in random_tuples(3, 10, 10) {
        assert_eq!(decide(&gens, p).unwrap(), decide(&gens, p).unwrap());
    }
}
