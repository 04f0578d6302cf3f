mod common;

use common::{convex_polygon, disk};
use platelab::geometry::{ConvexDomain, Point2};
use platelab::plate::{assemble, discretize, solve_membrane, solve_plate, LoadSpec};
use platelab::spectral::buckling_load;
use platelab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_symmetric_and_coercive(d in convex_polygon(1.0), seed in any::<u64>()) {
        let grid = match discretize(&d, 1.0 / 16.0) {
            Ok(g) => g,
            Err(Error::EmptyGrid { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let ops = assemble(grid);
        prop_assert_eq!(ops.a().asymmetry(), 0.0);
        prop_assert_eq!(ops.b().asymmetry(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ops.grid().active_count();
        for _ in 0..5 {
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            prop_assert!(ops.a().bilinear(&u, &u) > 0.0);
            prop_assert!(ops.b().bilinear(&u, &u) > 0.0);
        }
    }

    #[test]
    fn zero_extension_restricts_the_stencil(d in convex_polygon(1.0), t in 0.5..0.95f64) {
        // The stencil of a subdomain is the principal submatrix of the
        // larger one, so buckling loads can only go up when shrinking.
        let outer = d.translated(-1.0 * d.centroid()).unwrap();
        let inner = outer.scaled(t).unwrap();
        let h = 1.0 / 16.0;
        let (go, gi) = match (discretize(&outer, h), discretize(&inner, h)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Ok(()),
        };
        if gi.active_count() < 4 {
            return Ok(());
        }
        let (ao, ai) = (assemble(go), assemble(gi));
        let map: Vec<usize> = ai
            .grid()
            .coords()
            .iter()
            .map(|&(i, j)| ao.grid().index_of(i, j).expect("inner node active in outer"))
            .collect();
        for (r, &ro) in map.iter().enumerate() {
            for (c, &co) in map.iter().enumerate() {
                prop_assert_eq!(ai.a().get(r, c), ao.a().get(ro, co));
                prop_assert_eq!(ai.b().get(r, c), ao.b().get(ro, co));
            }
        }
        let (mo, mi) = (buckling_load(&ao).unwrap().mu1, buckling_load(&ai).unwrap().mu1);
        prop_assert!(mo <= mi * (1.0 + 1e-9), "outer {} inner {}", mo, mi);
    }
}

#[test]
fn discrete_scaling_of_the_solution() {
    // (t⁻⁴ A + γ t⁻² B) u' = f on (tΩ, th) is solved by u' = t⁴ u at γ' = t⁻² γ.
    let d = ConvexDomain::regular(7, 0.8, Point2::new(0.05, -0.02), 2.0).unwrap();
    let h = 1.0 / 16.0;
    let gamma = 7.5;
    let base = solve_plate(&assemble(discretize(&d, h).unwrap()), gamma, &LoadSpec::constant(1.0)).unwrap();
    for t in [0.5, 2.0] {
        let ops = assemble(discretize(&d.scaled_about_origin(t), t * h).unwrap());
        let r = solve_plate(&ops, gamma / (t * t), &LoadSpec::constant(1.0)).unwrap();
        assert_eq!(r.active_count, base.active_count);
        for (a, b) in r.u.iter().zip(&base.u) {
            assert!((a - t.powi(4) * b).abs() <= 1e-10 * t.powi(4) * base.max_abs_u);
        }
    }
}

#[test]
fn disk_center_converges_to_radial_solution() {
    let d = disk(64, 1.0, 1.0);
    let errs: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]
        .iter()
        .map(|&h| {
            let r = solve_plate(&assemble(discretize(&d, h).unwrap()), 0.0, &LoadSpec::constant(1.0)).unwrap();
            assert!(r.min_u >= 0.0);
            (r.center_value - 1.0 / 64.0).abs() * 64.0
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 0.05);
}

#[test]
fn large_tension_approaches_membrane() {
    let d = disk(64, 1.0, 1.0);
    let ops = assemble(discretize(&d, 1.0 / 32.0).unwrap());
    let v = solve_membrane(&ops, &LoadSpec::constant(1.0)).unwrap();
    let vc = v[ops.grid().center_node()];
    // −Δv = 1 on the unit disk: v(0) = 1/4.
    assert!((vc - 0.25).abs() < 0.02, "{vc}");
    let mut prev = f64::INFINITY;
    for gamma in [1e2, 1e4, 1e6] {
        let r = solve_plate(&ops, gamma, &LoadSpec::constant(1.0)).unwrap();
        let gap = (gamma * r.center_value / vc - 1.0).abs();
        assert!(gap < prev, "gamma {gamma}: {gap}");
        prev = gap;
    }
    assert!(prev < 1e-2);
}

#[test]
fn indefinite_below_buckling_load() {
    let d = disk(32, 1.0, 1.0);
    let ops = assemble(discretize(&d, 1.0 / 16.0).unwrap());
    let mu = buckling_load(&ops).unwrap().mu1;
    assert!(solve_plate(&ops, -0.99 * mu, &LoadSpec::constant(1.0)).is_ok());
    assert!(matches!(
        solve_plate(&ops, -1.01 * mu, &LoadSpec::constant(1.0)),
        Err(Error::IndefiniteSystem { .. })
    ));
}

trait ScaleAboutOrigin {
    fn scaled_about_origin(&self, t: f64) -> ConvexDomain;
}

impl ScaleAboutOrigin for ConvexDomain {
    fn scaled_about_origin(&self, t: f64) -> ConvexDomain {
        self.with_ball_radius(self.ball_radius() * t)
            .unwrap()
            .scale_about(Point2::default(), t)
            .unwrap()
    }
}
