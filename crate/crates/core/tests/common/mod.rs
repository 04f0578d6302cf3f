#![allow(dead_code)]

use platelab::geometry::{convex_hull, ConvexDomain, Point2};
use platelab::plate::LoadSpec;
use proptest::prelude::*;

/// Regular `n`-gon of circumradius `r` centred at the origin.
pub fn disk(n: usize, r: f64, ball: f64) -> ConvexDomain {
    ConvexDomain::regular(n, r, Point2::default(), ball).unwrap()
}

/// Elongated hexagon (length 3, width 0.5) with a narrow bump load near one
/// end; at zero tension the clamped plate deflection changes sign.
pub fn strip_fixture() -> (ConvexDomain, LoadSpec, f64) {
    let (a, b, tip) = (1.5, 0.25, 1.525);
    let d = ConvexDomain::new(
        vec![
            Point2::new(-a, -b),
            Point2::new(a, -b),
            Point2::new(tip, 0.0),
            Point2::new(a, b),
            Point2::new(-a, b),
            Point2::new(-tip, 0.0),
        ],
        1.625,
    )
    .unwrap();
    let f = LoadSpec::GaussianBump {
        center: Point2::new(-1.25, 0.0),
        width: 0.05,
        amplitude: 1.0,
    };
    (d, f, 1.0 / 32.0)
}

/// Random convex polygon: hull of 3..12 points in the disk of radius `0.9 ball`.
pub fn convex_polygon(ball: f64) -> impl Strategy<Value = ConvexDomain> {
    prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU), 3..12).prop_filter_map(
        "degenerate hull",
        move |pts| {
            let pts: Vec<Point2> = pts
                .into_iter()
                .map(|(s, t)| {
                    let r = 0.9 * ball * s.sqrt();
                    Point2::new(r * t.cos(), r * t.sin())
                })
                .collect();
            convex_hull(&pts, ball).ok().filter(|d| d.area() > 1e-3 * ball * ball)
        },
    )
}
