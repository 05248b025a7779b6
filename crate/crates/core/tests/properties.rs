use neurogrid::gridworld::ObstacleLayout;
use neurogrid::guidance::compensate;
use neurogrid::kinematics::{containing_cell, simulate, Outcome, SimParams, Variant};
use neurogrid::neuroplanner::{step_limit, NeuralField};
use neurogrid::{plan_bnnp, plan_cbnnp, Cell, CurrentSpec, GridMap, GuidanceParams, Vector};
use proptest::prelude::*;

fn vector(dims: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-2.0f64..=2.0, dims).prop_map(|v| Vector::from_slice(&v).unwrap())
}

/// A seeded 2D map together with two distinct protected endpoints.
fn seeded_map() -> impl Strategy<Value = (GridMap, Cell, Cell)> {
    (4usize..=12, 4usize..=12, 0.0f64..=0.4, any::<u64>())
        .prop_flat_map(|(w, h, ratio, seed)| {
            let cell = (0..w as i64, 0..h as i64).prop_map(|(x, y)| Cell::new2(x, y));
            (Just((w, h, ratio, seed)), cell.clone(), cell)
        })
        .prop_filter("distinct endpoints", |(_, a, b)| a != b)
        // small maps cannot always fit the obstacles around protected cells
        .prop_filter_map("room for obstacles", |((w, h, ratio, seed), a, b)| {
            let map = GridMap::random(&[w, h], ratio, seed, &[a, b], ObstacleLayout::Cells).ok()?;
            Some((map, a, b))
        })
}

proptest! {
    #[test]
    fn compensation_cancels_current_2d(v_d in vector(2), v_cur in vector(2)) {
        let p = compensate(&v_d, &v_cur).unwrap();
        prop_assert!((p + v_cur - v_d).norm() <= 1e-12);
    }

    #[test]
    fn compensation_cancels_current_3d(v_d in vector(3), v_cur in vector(3)) {
        let p = compensate(&v_d, &v_cur).unwrap();
        prop_assert!((p + v_cur - v_d).norm() <= 1e-12);
    }

    #[test]
    fn plans_avoid_obstacles_and_are_deterministic((map, a, b) in seeded_map(), k_g in 0.05f64..=1.0) {
        let plan = plan_bnnp(&map, a, b, k_g).unwrap();
        prop_assert_eq!(plan.waypoints[0], a);
        prop_assert!(plan.waypoints.iter().all(|c| map.is_free(c)));
        prop_assert!(plan.waypoints.windows(2).all(|w| w[0].chebyshev(&w[1]) == 1));
        prop_assert!(plan.waypoints.len() <= step_limit(&map) + 1);
        if plan.is_reached() {
            prop_assert_eq!(*plan.waypoints.last().unwrap(), b);
        }
        prop_assert_eq!(plan, plan_bnnp(&map, a, b, k_g).unwrap());
    }

    #[test]
    fn neighbours_are_in_bounds_and_adjacent(
        extent in prop::collection::vec(1usize..=6, 2..=3),
        seed in any::<u64>(),
    ) {
        let map = GridMap::empty(&extent).unwrap();
        let cells: Vec<Cell> = map.cells().collect();
        let c = cells[(seed % cells.len() as u64) as usize];
        let ns = map.neighbors(&c);
        prop_assert!(ns.iter().all(|n| map.contains(n) && n.chebyshev(&c) == 1));
        let mut sorted = ns.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), ns.len());
        let full = if extent.len() == 2 { 8 } else { 26 };
        prop_assert!(ns.len() <= full);
        let brute = cells.iter().filter(|n| n.chebyshev(&c) == 1).count();
        prop_assert_eq!(brute, ns.len());
    }

    #[test]
    fn activities_stay_in_range((map, a, b) in seeded_map(), k_g in 0.05f64..=1.0) {
        let mut field = NeuralField::new(&map, b, k_g).unwrap();
        let mut cur = a;
        let mut a_max = 0.0f64;
        for _ in 0..step_limit(&map) {
            if cur == b {
                break;
            }
            field.cover(&cur);
            let Ok((next, _)) = field.select_next(&cur) else { break };
            for &x in field.activities() {
                prop_assert!(x.is_finite());
                prop_assert!(x == -1.0 || (x >= 0.0 && x <= k_g * (a_max + 2.0) + 1e-12), "{x}");
            }
            a_max = field.activities().iter().cloned().fold(a_max, f64::max);
            cur = next;
        }
    }

    #[test]
    fn random_maps_have_requested_ratio(
        w in 3usize..=15, h in 3usize..=15, ratio in 0.0f64..=0.5, seed in any::<u64>(),
    ) {
        let protected = [Cell::new2(0, 0)];
        let map = GridMap::random(&[w, h], ratio, seed, &protected, ObstacleLayout::Cells).unwrap();
        prop_assert_eq!(map.obstacle_count(), (ratio * (w * h) as f64).round() as usize);
        prop_assert!(map.is_free(&protected[0]));
        prop_assert_eq!(&map, &GridMap::random(&[w, h], ratio, seed, &protected, ObstacleLayout::Cells).unwrap());
    }

    #[test]
    fn cell_centres_map_to_their_cell(x in -3i64..30, y in -3i64..30, dx in -0.4999f64..0.4999, dy in -0.4999f64..0.4999) {
        let p = Vector::new2(x as f64 + dx, y as f64 + dy);
        prop_assert_eq!(containing_cell(&p), Cell::new2(x, y));
    }

    #[test]
    fn compensated_vehicle_never_deviates(speed in 0.0f64..0.99, direction in 0.0f64..360.0) {
        let map = GridMap::empty(&[10, 10]).unwrap();
        let current = CurrentSpec::Static2d { speed, direction };
        let plan = plan_bnnp(&map, Cell::new2(2, 1), Cell::new2(9, 9), 0.5).unwrap();
        let t = simulate(&map, &plan, Cell::new2(9, 9), Variant::Cbnnp, &current, &SimParams::default());
        prop_assert_eq!(t.outcome, Outcome::Reached);
        prop_assert!(t.deviation_max <= 1e-9);
        prop_assert!((t.traveled_length - plan.length()).abs() <= 1e-9);
    }

    #[test]
    fn compensated_waypoints_ignore_the_current(speed in 0.0f64..0.9, direction in 0.0f64..360.0) {
        let map = GridMap::empty(&[10, 10]).unwrap();
        let params = GuidanceParams::default();
        let with = plan_cbnnp(&map, Cell::new2(2, 1), Cell::new2(9, 9), &CurrentSpec::Static2d { speed, direction }, &params).unwrap();
        let still = plan_cbnnp(&map, Cell::new2(2, 1), Cell::new2(9, 9), &CurrentSpec::still(2), &params).unwrap();
        prop_assert_eq!(with.path, still.path);
    }
}
