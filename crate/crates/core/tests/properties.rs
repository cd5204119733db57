mod common;

use common::*;
use lamina_core::group::{
    ball_size, enumerate_ball, free_reduce, FreeAutomorphism, FuchsianGroup, Letter, Word,
};
use lamina_core::hyperbolic::{
    apply_isometry, axis, boundary_action, geodesic_relation, hyperbolic_distance,
    translation_length, Geodesic, HPoint, Isometry, EPS_THETA,
};
use proptest::prelude::*;

fn isometry() -> impl Strategy<Value = Isometry> {
    (0.0..std::f64::consts::TAU, 0.5f64..2.0, -2.0f64..2.0).prop_map(|(phi, lam, t)| {
        let r = Isometry::disk_rotation(phi);
        let d = Isometry::dilation(lam).unwrap();
        let n = Isometry::new([[1.0, t], [0.0, 1.0]]).unwrap();
        r * d * n
    })
}

fn point() -> impl Strategy<Value = HPoint> {
    (-3.0f64..3.0, 0.2f64..5.0).prop_map(|(x, y)| HPoint::new(x, y).unwrap())
}

fn hyperbolic() -> impl Strategy<Value = Isometry> {
    (isometry(), 1.05f64..4.0).prop_map(|(g, lam)| g.conjugate(&Isometry::dilation(lam).unwrap()))
}

fn letters(max: usize, rank: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max).prop_map(|v| {
        v.into_iter()
            .map(|(g, i)| if i { Letter::inv(g) } else { Letter::gen(g) })
            .collect()
    })
}

fn reduced(max: usize) -> impl Strategy<Value = Word> {
    letters(max, 2).prop_map(|l| free_reduce(&l, 2).unwrap())
}

fn automorphisms() -> Vec<FreeAutomorphism> {
    vec![
        transvection(),
        automorphism(["a b", "b a b"], ["a a b^-1", "b a^-1"]),
        FreeAutomorphism::inner(2, &word("a b^-1")),
        automorphism(["b", "a"], ["b", "a"]),
    ]
}

fn separated(g: &Geodesic, h: &Geodesic) -> bool {
    let (a, b) = g.to_disk();
    let (c, d) = h.to_disk();
    [c, d]
        .iter()
        .all(|x| angle_gap(a, *x) > 1e-6 && angle_gap(b, *x) > 1e-6)
}

proptest! {
    #[test]
    fn distance_is_invariant(m in isometry(), p in point(), q in point()) {
        let d0 = hyperbolic_distance(&p, &q);
        let d1 = hyperbolic_distance(&apply_isometry(&m, &p).unwrap(), &apply_isometry(&m, &q).unwrap());
        prop_assert!((d0 - d1).abs() <= 1e-9, "{d0} vs {d1}");
    }

    #[test]
    fn axis_endpoints_are_fixed(m in hyperbolic()) {
        let ax = axis(&m).unwrap();
        prop_assert!(boundary_action(&m, &ax.start()).approx_eq(&ax.start(), EPS_THETA));
        prop_assert!(boundary_action(&m, &ax.end()).approx_eq(&ax.end(), EPS_THETA));
    }

    #[test]
    fn composition_is_consistent(m1 in isometry(), m2 in isometry(), p in point()) {
        let lhs = apply_isometry(&(m1 * m2), &p).unwrap();
        let rhs = apply_isometry(&m1, &apply_isometry(&m2, &p).unwrap()).unwrap();
        prop_assert!((lhs.x() - rhs.x()).abs() <= 1e-9 && (lhs.y() - rhs.y()).abs() <= 1e-9);
    }

    #[test]
    fn crossing_is_conjugation_invariant(
        g in isometry(),
        t in prop::array::uniform4(0.0..std::f64::consts::TAU),
    ) {
        let g1 = Geodesic::from_angles(t[0], t[1]);
        let g2 = Geodesic::from_angles(t[2], t[3]);
        prop_assume!(g1.is_ok() && g2.is_ok());
        let (g1, g2) = (g1.unwrap(), g2.unwrap());
        prop_assume!(separated(&g1, &g2) && angle_gap(t[0], t[1]) > 1e-6 && angle_gap(t[2], t[3]) > 1e-6);
        let (h1, h2) = (g1.transform(&g), g2.transform(&g));
        prop_assume!(separated(&h1, &h2));
        prop_assert_eq!(geodesic_relation(&g1, &g2, EPS_THETA), geodesic_relation(&h1, &h2, EPS_THETA));
    }

    #[test]
    fn translation_length_is_additive(m in hyperbolic(), n in 1u32..=8) {
        let l1 = translation_length(&m).unwrap();
        let ln = translation_length(&m.pow(n)).unwrap();
        prop_assert!((ln - f64::from(n) * l1).abs() <= 1e-6, "{ln} vs {}", f64::from(n) * l1);
    }

    #[test]
    fn axis_is_equivariant(m in hyperbolic(), g in isometry()) {
        let moved = axis(&g.conjugate(&m)).unwrap();
        let expected = axis(&m).unwrap().transform(&g);
        prop_assert!(moved.endpoint_gap(&expected) < EPS_THETA);
    }

    #[test]
    fn reduction_is_idempotent(l in letters(30, 3)) {
        let w = free_reduce(&l, 3).unwrap();
        prop_assert!(w.len() <= l.len());
        prop_assert_eq!(free_reduce(w.letters(), 3).unwrap(), w.clone());
        prop_assert!(w.letters().windows(2).all(|p| p[1] != p[0].inverted()));
    }

    #[test]
    fn automorphism_powers_add(w in reduced(8), which in 0usize..4, m in -3i64..=3, n in -3i64..=3) {
        let phi = &automorphisms()[which];
        let budget = 1_000_000;
        let lhs = phi.apply(&phi.apply(&w, m, budget).unwrap(), n, budget).unwrap();
        prop_assert_eq!(lhs, phi.apply(&w, m + n, budget).unwrap());
    }

    #[test]
    fn evaluation_is_a_homomorphism(u in reduced(20), v in reduced(20)) {
        let g = schottky();
        let lhs = g.evaluate(&u.concat(&v)).unwrap();
        let rhs = g.evaluate(&u).unwrap() * g.evaluate(&v).unwrap();
        // Entries of long words are large; compare relative to their size.
        let scale = lhs.matrix().iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()));
        prop_assert!(lhs.distance_to(&rhs) <= 1e-9 * scale);
    }
}

#[test]
fn ball_counts_match_closed_form() {
    for rank in 1..=3usize {
        let gens: Vec<(String, Isometry)> = (0..rank)
            .map(|i| {
                let r = Isometry::disk_rotation(i as f64 * 0.9);
                (
                    format!("g{i}"),
                    r.conjugate(&Isometry::dilation(3.0).unwrap()),
                )
            })
            .collect();
        let group = FuchsianGroup::new(gens).unwrap();
        for k in 0..=4usize {
            let closed: u128 = 1
                + (1..=k as u32)
                    .map(|l| 2 * rank as u128 * (2 * rank as u128 - 1).pow(l - 1))
                    .sum::<u128>();
            assert_eq!(ball_size(rank, k), closed);
            assert_eq!(enumerate_ball(&group, k).unwrap().len() as u128, closed);
        }
    }
}
