use proptest::prelude::*;

use lattice_homology::classify::is_rational;
use lattice_homology::format::{parse_dsl, parse_json, to_dsl, to_json};
use lattice_homology::homology::{compute_homology_with, type2_target};
use lattice_homology::lattice::BoxShape;
use lattice_homology::seifert::{cont_frac_expand, cont_frac_value};
use lattice_homology::{
    compute_homology, EdgeSign, Limits, Parallelism, PlumbingForest, SignRule,
};
use num_rational::BigRational;

/// Forests with up to `max` vertices; vertex `i > 0` hangs off an earlier
/// vertex or stays isolated.
fn forest(max: usize, framings: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = PlumbingForest> {
    (1..=max)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(framings.clone(), n),
                prop::collection::vec(prop::option::weighted(0.85, any::<prop::sample::Index>()), n),
                any::<bool>(),
            )
        })
        .prop_map(|(m, parents, plus)| {
            let edges: Vec<(usize, usize)> = parents
                .iter()
                .enumerate()
                .skip(1)
                .filter_map(|(i, p)| p.map(|p| (p.index(i), i)))
                .collect();
            let sign = if plus { EdgeSign::PlusOne } else { EdgeSign::MinusOne };
            PlumbingForest::from_parts(&m, &edges, sign).unwrap()
        })
}

fn negdef(max: usize) -> impl Strategy<Value = PlumbingForest> {
    forest(max, -5..=-1).prop_filter("negative-definite", |f| f.intersection_form().is_negative_definite())
}

fn sorted_dims(f: &PlumbingForest) -> (u64, Vec<u64>) {
    let h = compute_homology(f, &Limits::default()).unwrap();
    let mut d: Vec<u64> = h.per_orbit().iter().map(|o| o.dim).collect();
    d.sort_unstable();
    (h.total_dim(), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimension_at_least_det(f in negdef(5)) {
        let h = compute_homology(&f, &Limits::default()).unwrap();
        prop_assert!(h.total_dim() >= h.det());
        prop_assert_eq!(h.per_orbit().len() as u64, h.det());
        prop_assert!(h.per_orbit().iter().all(|o| o.dim >= 1));
    }

    #[test]
    fn relabelling_is_invisible(f in negdef(5), seed in any::<u64>()) {
        let n = f.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(sorted_dims(&f), sorted_dims(&f.permuted(&perm)));
    }

    #[test]
    fn disjoint_union_multiplies(a in negdef(3), b in negdef(3)) {
        let (ta, _) = sorted_dims(&a);
        let (tb, _) = sorted_dims(&b);
        let (tu, _) = sorted_dims(&a.disjoint_union(&b));
        prop_assert_eq!(tu, ta * tb);
    }

    #[test]
    fn sequential_matches_parallel(f in negdef(5)) {
        let seq = compute_homology(&f, &Limits::sequential()).unwrap();
        let par = compute_homology(&f, &Limits { parallelism: Parallelism::Parallel, ..Limits::default() }).unwrap();
        prop_assert_eq!(seq.total_dim(), par.total_dim());
        for (x, y) in seq.per_orbit().iter().zip(par.per_orbit()) {
            prop_assert_eq!(x.dim, y.dim);
            prop_assert_eq!(&x.representatives, &y.representatives);
        }
    }

    #[test]
    fn sign_rule_does_not_change_dimensions(f in negdef(4)) {
        let t = compute_homology_with(&f, SignRule::Twisted, &Limits::default()).unwrap();
        let u = compute_homology_with(&f, SignRule::Untwisted, &Limits::default()).unwrap();
        prop_assert_eq!(t.total_dim(), u.total_dim());
    }

    #[test]
    fn type2_is_an_involution(f in negdef(4), pick in any::<prop::sample::Index>()) {
        let form = f.intersection_form();
        let shape = BoxShape::checked(&form, 1 << 20).unwrap();
        let idx = pick.index(shape.size() as usize) as u64;
        let k = shape.vector_at(idx);
        for v in 0..f.len() {
            if let Some(t) = type2_target(&k.evals, v, &form) {
                prop_assert_eq!(type2_target(&t, v, &form), Some(k.evals.clone()));
            }
        }
    }

    #[test]
    fn rationality_survives_lowering_a_framing(f in negdef(5), pick in any::<prop::sample::Index>()) {
        let limits = Limits::default();
        prop_assume!(is_rational(&f, &limits).unwrap().rational);
        let v = pick.index(f.len());
        let g = f.with_framing(v, f.framing(v) - 1);
        prop_assert!(is_rational(&g, &limits).unwrap().rational);
    }

    #[test]
    fn rational_means_minimal(f in negdef(5)) {
        let limits = Limits::default();
        if is_rational(&f, &limits).unwrap().rational {
            let h = compute_homology(&f, &limits).unwrap();
            prop_assert_eq!(h.total_dim(), h.det());
        }
    }

    #[test]
    fn file_formats_round_trip(f in forest(6, -6..=3)) {
        prop_assert_eq!(&parse_dsl(&to_dsl(&f)).unwrap(), &f);
        prop_assert_eq!(&parse_json(&to_json(&f)).unwrap(), &f);
    }

    #[test]
    fn continued_fractions_round_trip(a in 2i64..500, pick in any::<prop::sample::Index>()) {
        let b = 1 + pick.index(a as usize - 1) as i64;
        let g = num_integer::gcd(a, b);
        let (a, b) = (a / g, b / g);
        let t = cont_frac_expand(a, b).unwrap();
        prop_assert!(t.iter().all(|&x| x >= 2));
        prop_assert_eq!(cont_frac_value(&t), BigRational::new(a.into(), b.into()));
    }
}
