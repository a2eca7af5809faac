//! Seeded random suites and worked examples through the public API.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lattice_homology::classify::{full_report, is_almost_rational, is_rational, AlmostRational};
use lattice_homology::format::parse_dsl;
use lattice_homology::hplus::{kernel_u_cross_check, rational_via_hplus};
use lattice_homology::moves::{
    blow_down, check_convention_invariance, check_exactness, convert_convention, SurgeryTriple,
};
use lattice_homology::random::{blowdownable_forest, negdef_forest, surgery_triple_data, ForestSpec};
use lattice_homology::{
    compute_homology, seifert_to_plumbing, EdgeSign, Error, Limits, PlumbingForest, SeifertData,
};

fn small() -> ForestSpec {
    ForestSpec {
        max_vertices: 4,
        ..ForestSpec::default()
    }
}

#[test]
fn homology_matches_kernel_u_on_random_forests() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let f = negdef_forest(&mut rng, &small());
        let c = kernel_u_cross_check(&f, &Limits::default()).unwrap();
        assert!(c.agrees, "{f:?}: {:?}", c.orbits);
    }
}

#[test]
fn rationality_tests_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let limits = Limits::default();
    for _ in 0..40 {
        let f = negdef_forest(&mut rng, &small());
        let r = is_rational(&f, &limits).unwrap();
        assert_eq!(r.rational, rational_via_hplus(&f, &limits).unwrap(), "{f:?}");
        if let (Some(x), Some(c)) = (&r.witness, r.witness_chi) {
            assert!(c <= 0 && x.is_positive());
        }
    }
}

#[test]
fn random_triples_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let (f, v) = surgery_triple_data(&mut rng, &small());
        let t = SurgeryTriple::new(&f, v).unwrap();
        let r = check_exactness(&t, &Limits::default()).unwrap();
        assert!(r.is_exact(), "{f:?} at {v}: {r:?}");
        assert_eq!(r.dim_base as usize, r.rank_a + r.rank_b);
    }
}

#[test]
fn random_blow_downs_are_isomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let (f, x) = blowdownable_forest(&mut rng, &small());
        let r = blow_down(&f, x, &Limits::default()).unwrap();
        assert!(r.is_isomorphism(), "{f:?}: {r:?}");
        assert_eq!(r.result.len(), f.len() - 1);
    }
}

#[test]
fn convention_changes_are_invisible() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..30 {
        let f = negdef_forest(&mut rng, &small());
        let r = check_convention_invariance(&f, &Limits::default()).unwrap();
        assert!(r.is_invariant(), "{f:?}: {r:?}");
        let back = convert_convention(convert_convention(&f, f.edge_sign().flipped()).forest(), f.edge_sign());
        assert_eq!(back.forest(), &f);
    }
}

#[test]
fn random_seifert_plumbings_present_h1() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut tested = 0;
    while tested < 40 {
        let legs: Vec<(i64, i64)> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let a = rng.gen_range(2..=7i64);
                loop {
                    let b = rng.gen_range(-a..=a);
                    if num_integer::gcd(a, b) == 1 {
                        break (a, b);
                    }
                }
            })
            .collect();
        let s = SeifertData::new(rng.gen_range(-3..=1), legs).unwrap();
        let Some(order) = s.h1_order() else { continue };
        let p = seifert_to_plumbing(&s).unwrap();
        let det = p.forest.intersection_form().abs_det().unwrap();
        assert_eq!(BigRational::from_integer(det.into()), order, "{s:?}");
        assert!(p.forest.intersection_form().is_negative_definite());
        assert!(p.forest.bad_vertices().len() <= 1);
        tested += 1;
    }
}

const TWIN_STAR: &str = "
vertex a -2
vertex b -2
vertex c -2
vertex d -2
vertex e -2
vertex f -3
edge a b
edge a c
edge a d
edge b e
edge b f
";

#[test]
fn twin_star_examples() {
    let limits = Limits::default();
    let f = parse_dsl(TWIN_STAR).unwrap();
    let r = full_report(&f, &limits).unwrap();
    assert_eq!(r.abs_det, 4);
    assert_eq!(r.rational, Some(false));
    assert_eq!(r.dim_h, Some(5));
    assert!(!r.dims.unwrap().is_instanton_lspace);
    let g = f.with_framing(f.index_of("c").unwrap(), -3);
    let h = compute_homology(&g, &limits).unwrap();
    assert_eq!((h.det(), h.total_dim()), (13, 14));
    assert_eq!(
        is_almost_rational(&g, &limits).unwrap(),
        AlmostRational::Yes { vertex: Some("a".into()), decrement: 1 }
    );
    assert_eq!(h.derived_dimensions(true).unwrap().dim_isharp, 15);
}

#[test]
fn seifert_examples() {
    for (text, det, hfhat) in [
        ("SFS [S2: (2,1) (5,1) (5,-4)]", 5, 7),
        ("0; 2/1 5/1 5/-4", 5, 7),
        ("SFS [S2: (3,1) (4,1) (4,-3)]", 8, 10),
    ] {
        let p = seifert_to_plumbing(&SeifertData::parse(text).unwrap()).unwrap();
        let h = compute_homology(&p.forest, &Limits::default()).unwrap();
        assert_eq!(h.det(), det);
        assert_eq!(h.derived_dimensions(false).unwrap().dim_hfhat, hfhat);
    }
    // Read literally, e0 = -1 on top of the unnormalized legs is a different manifold.
    let p = seifert_to_plumbing(&SeifertData::parse("-1; 2/1 5/1 5/-4").unwrap()).unwrap();
    assert_eq!(p.forest.intersection_form().abs_det().unwrap(), 55);
}

#[test]
fn plus_one_convention_files() {
    let f = parse_dsl("convention plus_one\nvertex a -2\nvertex b -2\nedge a b\n").unwrap();
    assert_eq!(f.edge_sign(), EdgeSign::PlusOne);
    let h = compute_homology(&f, &Limits::default()).unwrap();
    assert_eq!((h.det(), h.total_dim()), (3, 3));
}

#[test]
fn budgets_surface_as_errors() {
    let f: PlumbingForest = parse_dsl(TWIN_STAR).unwrap();
    let tight = Limits {
        box_cap: 10,
        ..Limits::default()
    };
    assert!(matches!(compute_homology(&f, &tight), Err(Error::BoxTooLarge { .. })));
    let tight = Limits {
        point_cap: 1,
        ..Limits::default()
    };
    assert!(matches!(
        is_rational(&f, &tight),
        Err(Error::EnumerationBudgetExceeded { cap: 1 })
    ));
}
