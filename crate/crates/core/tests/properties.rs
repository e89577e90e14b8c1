//! Randomized structural properties: transport is a metric on every space,
//! measures survive serialization byte-for-byte, resolution counts move the
//! right way as the scale or budget moves, and curve serialization stays
//! parseable.

use emergence_core::{
    emergence_curve, measure_space_covering_bounds, quantization_number, w1_distance,
    DiscreteMeasure, Point, PointSpace,
};
use proptest::prelude::*;

const SPACES: [PointSpace; 4] = [
    PointSpace::UnitInterval,
    PointSpace::Circle,
    PointSpace::Square,
    PointSpace::Torus2,
];

/// Strategy: a measure with 1..=5 atoms at arbitrary positions, weights
/// bounded away from zero so normalization stays well conditioned.
fn measure_on(space: PointSpace) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec(((0.0..1.0f64), (0.0..1.0f64), (0.1..1.0f64)), 1..=5).prop_map(
        move |atoms| {
            let total: f64 = atoms.iter().map(|&(_, _, w)| w).sum();
            DiscreteMeasure::new(
                space,
                atoms
                    .into_iter()
                    .map(|(x, y, w)| {
                        let p = if space.dim() == 1 {
                            Point::one_d(x)
                        } else {
                            Point::two_d(x, y)
                        };
                        (p, w / total)
                    })
                    .collect(),
            )
            .expect("generated atoms are valid")
        },
    )
}

fn space_and_three() -> impl Strategy<Value = (PointSpace, [DiscreteMeasure; 3])> {
    (0usize..4).prop_flat_map(|i| {
        let space = SPACES[i];
        (
            Just(space),
            [measure_on(space), measure_on(space), measure_on(space)],
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_is_a_metric((space, [a, b, c]) in space_and_three()) {
        let ab = w1_distance(&a, &b).unwrap();
        let ba = w1_distance(&b, &a).unwrap();
        let ac = w1_distance(&a, &c).unwrap();
        let bc = w1_distance(&b, &c).unwrap();
        let aa = w1_distance(&a, &a).unwrap();
        prop_assert!(aa <= 1e-12, "self-distance {aa}");
        prop_assert!((ab - ba).abs() <= 1e-12, "asymmetry {ab} vs {ba}");
        prop_assert!(ac <= ab + bc + 1e-9, "triangle broken: {ac} > {ab} + {bc}");
        prop_assert!(ab <= space.diameter() + 1e-12, "beyond diameter");
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn measures_round_trip_through_json((_, [a, _, _]) in space_and_three()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: DiscreteMeasure = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&a, &back);
    }

    #[test]
    fn quantization_number_moves_against_the_scale(
        (_, [a, _, _]) in space_and_three(),
        eps in 0.02..0.2f64,
    ) {
        let fine = quantization_number(&a, eps).unwrap();
        let coarse = quantization_number(&a, eps * 2.0).unwrap();
        prop_assert!(coarse <= fine, "{coarse} atoms at {} but {fine} at {eps}", eps * 2.0);
        prop_assert!(fine <= a.atoms().len());
        prop_assert!(coarse >= 1);
    }
}

proptest! {
    // Covering bounds enumerate candidate pools, so keep the case count low.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn covering_bounds_nest_and_shrink(
        idx in 0usize..2,
        eps in 0.08..0.3f64,
    ) {
        let space = [PointSpace::UnitInterval, PointSpace::Circle][idx];
        let fine = measure_space_covering_bounds(space, eps, 64).unwrap();
        let coarse = measure_space_covering_bounds(space, eps * 1.5, 64).unwrap();
        for b in [&fine, &coarse] {
            prop_assert!(
                (b.lower_count as f64).ln() <= b.upper_ln + 1e-12,
                "bounds crossed: {b:?}"
            );
        }
        prop_assert!(
            coarse.upper_ln <= fine.upper_ln + 1e-12,
            "coarser scale should need no more measures: {coarse:?} vs {fine:?}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn emergence_curves_serialize_and_stay_ordered(
        xs in prop::collection::vec(0.0..1.0f64, 3..=6),
    ) {
        let members: Vec<DiscreteMeasure> = xs
            .iter()
            .map(|&x| {
                DiscreteMeasure::new(
                    PointSpace::UnitInterval,
                    vec![(Point::one_d(x), 1.0)],
                )
                .unwrap()
            })
            .collect();
        let grid = [0.3, 0.15, 0.075];
        let curve = emergence_curve(&members, &grid).unwrap();
        let csv = curve.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        prop_assert_eq!(lines.len(), grid.len() + 1);
        prop_assert_eq!(lines[0], "eps,n_lower,n_upper,mean_residual,flags");
        for (row, line) in curve.records.iter().zip(&lines[1..]) {
            let fields: Vec<&str> = line.split(',').collect();
            prop_assert_eq!(fields.len(), 5);
            let eps: f64 = fields[0].parse().unwrap();
            let lo: usize = fields[1].parse().unwrap();
            let hi: usize = fields[2].parse().unwrap();
            prop_assert_eq!(eps, row.eps);
            prop_assert!(lo <= hi, "certified bounds crossed in CSV: {line}");
            prop_assert!(hi <= members.len());
        }
    }
}
