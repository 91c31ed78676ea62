use latembed::lattice::{
    embed, generate_box_lattice, grid_distance, is_adjacent, join, meet, LatticePoint,
};
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = LatticePoint> {
    prop::collection::vec(-50i64..50, dim).prop_map(|c| LatticePoint::new(c).unwrap())
}

fn triple() -> impl Strategy<Value = (LatticePoint, LatticePoint, LatticePoint)> {
    (1usize..=5).prop_flat_map(|n| (point(n), point(n), point(n)))
}

fn m(a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
    meet(a, b).unwrap()
}

fn j(a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
    join(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lattice_axioms((a, b, c) in triple()) {
        prop_assert_eq!(m(&a, &b), m(&b, &a));
        prop_assert_eq!(j(&a, &b), j(&b, &a));
        prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        prop_assert_eq!(j(&j(&a, &b), &c), j(&a, &j(&b, &c)));
        prop_assert_eq!(m(&a, &a), a.clone());
        prop_assert_eq!(j(&a, &a), a.clone());
        prop_assert_eq!(m(&a, &j(&a, &b)), a.clone());
        prop_assert_eq!(j(&a, &m(&a, &b)), a.clone());
    }

    #[test]
    fn distributive_modular_monotone((a, b, c) in triple()) {
        prop_assert_eq!(m(&a, &j(&b, &c)), j(&m(&a, &b), &m(&a, &c)));
        prop_assert_eq!(j(&a, &m(&b, &c)), m(&j(&a, &b), &j(&a, &c)));

        // Force a <= c to exercise modularity on every case.
        let a_le_c = m(&a, &c);
        prop_assert_eq!(j(&a_le_c, &m(&b, &c)), m(&j(&a_le_c, &b), &c));

        let lo = m(&a, &b);
        let hi = j(&a, &b);
        prop_assert!(lo.le_componentwise(&hi).unwrap());
        prop_assert!(m(&lo, &c).le_componentwise(&m(&hi, &c)).unwrap());
        prop_assert!(j(&lo, &c).le_componentwise(&j(&hi, &c)).unwrap());
    }

    #[test]
    fn embedding_commutes_and_is_injective((a, b, _c) in triple()) {
        prop_assert_eq!(embed(&m(&a, &b)), embed(&a).meet(&embed(&b)).unwrap());
        prop_assert_eq!(embed(&j(&a, &b)), embed(&a).join(&embed(&b)).unwrap());
        prop_assert_eq!(a == b, embed(&a) == embed(&b));
    }

    #[test]
    fn unit_distance_iff_adjacent((a, b, _c) in (1usize..=4).prop_flat_map(|n| {
        let near = prop::collection::vec(-2i64..=2, n);
        (point(n), near, Just(()))
    }).prop_map(|(a, delta, u)| {
        let b = LatticePoint::new(a.coords().iter().zip(&delta).map(|(x, d)| x + d).collect()).unwrap();
        (a, b, u)
    })) {
        prop_assert_eq!(grid_distance(&a, &b).unwrap() == 1.0, is_adjacent(&a, &b).unwrap());
    }

    #[test]
    fn boxes_are_sorted_and_discrete(lower in prop::collection::vec(-3i64..3, 1..4), span in prop::collection::vec(0i64..3, 4)) {
        let upper: Vec<i64> = lower.iter().zip(&span).map(|(l, s)| l + s).collect();
        let l = generate_box_lattice(&LatticePoint::new(lower.clone()).unwrap(), &LatticePoint::new(upper.clone()).unwrap()).unwrap();
        let expected: usize = lower.iter().zip(&upper).map(|(a, b)| (b - a + 1) as usize).product();
        prop_assert_eq!(l.len(), expected);
        for w in l.points().windows(2) {
            prop_assert!(w[0] < w[1]);
            prop_assert!(w[0].coords().iter().zip(w[1].coords()).any(|(x, y)| x != y));
        }
    }
}

#[test]
fn uniformity_on_box() {
    let l = generate_box_lattice(
        &LatticePoint::new(vec![0, 0, 0]).unwrap(),
        &LatticePoint::new(vec![9, 9, 9]).unwrap(),
    )
    .unwrap();
    let pairs = l.adjacent_pairs();
    assert_eq!(pairs.len(), 3 * 9 * 10 * 10);
    for (i, k) in pairs {
        let (a, b) = (&l.points()[i], &l.points()[k]);
        assert!(is_adjacent(a, b).unwrap());
        assert_eq!(grid_distance(a, b).unwrap(), 1.0);
    }
}
