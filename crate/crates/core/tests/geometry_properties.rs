use std::f64::consts::PI;

use proptest::prelude::*;
use vorinv::forward::{build_voronoi, parse_generators, serialize_generators, GeneratorSet};
use vorinv::geom::{
    circumcircle, distance, perpendicular_bisector, ray_intersection, Point2, Ray, Rect, Segment,
};
use vorinv::invert::{invert, InvertOptions, Method};
use vorinv::tess::{parse_tessellation, serialize_tessellation};

fn point() -> impl Strategy<Value = Point2> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn generators(max: usize) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((0.02..0.98f64, 0.02..0.98f64), 3..max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect())
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn well_separated(pts: &[Point2], min: f64) -> bool {
    pts.iter()
        .enumerate()
        .all(|(i, p)| pts[i + 1..].iter().all(|q| distance(*p, *q) > min))
}

proptest! {
    #[test]
    fn triangle_inequality(a in point(), b in point(), c in point()) {
        let lhs = distance(a, c);
        let rhs = distance(a, b) + distance(b, c);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn bisector_points_are_equidistant(a in point(), b in point(), ts in prop::collection::vec(-1e3..1e3f64, 100)) {
        prop_assume!(distance(a, b) > 1e-6);
        let s = Segment::new(a, b).unwrap();
        let (m, d) = perpendicular_bisector(&s).unwrap();
        for t in ts {
            let p = m + d * t;
            prop_assert!((distance(p, a) - distance(p, b)).abs() < 1e-9 * distance(a, b).max(1.0) * (1.0 + t.abs()));
        }
    }

    #[test]
    fn circumcircle_is_permutation_invariant(a in point(), b in point(), c in point()) {
        let area = (b - a).cross(c - a).abs();
        prop_assume!(area > 1e-2 * (b - a).norm().max((c - a).norm()).powi(2));
        let perms = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
        let ref_center = circumcircle(a, b, c).unwrap().center;
        let scale = ref_center.norm().max(1.0);
        for (p, q, r) in perms {
            let c2 = circumcircle(p, q, r).unwrap();
            prop_assert!(distance(c2.center, ref_center) < 1e-12 * scale);
            prop_assert!((c2.radius - distance(c2.center, p)).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn ray_intersection_is_symmetric(o1 in point(), o2 in point(), a1 in 0.0..(2.0 * PI), a2 in 0.0..(2.0 * PI)) {
        let r1 = Ray::new(o1, Point2::new(a1.cos(), a1.sin())).unwrap();
        let r2 = Ray::new(o2, Point2::new(a2.cos(), a2.sin())).unwrap();
        prop_assert_eq!(ray_intersection(&r1, &r2), ray_intersection(&r2, &r1));
    }

    #[test]
    fn generator_file_round_trip(pts in generators(30)) {
        prop_assume!(well_separated(&pts, 1e-6));
        let g = GeneratorSet::new(pts, Rect::new(0.0, 0.0, 1.0, 1.0)).unwrap();
        let text = serialize_generators(&g);
        let back = parse_generators(&text).unwrap();
        prop_assert_eq!(back.points(), g.points());
        prop_assert_eq!(serialize_generators(&back), text);
    }

    #[test]
    fn tessellation_file_round_trip(pts in generators(40)) {
        prop_assume!(well_separated(&pts, 1e-4));
        let g = GeneratorSet::new(pts, Rect::new(0.0, 0.0, 1.0, 1.0)).unwrap();
        let d = build_voronoi(&g).unwrap();
        let text = serialize_tessellation(d.tessellation());
        let back = parse_tessellation(&text).unwrap();
        prop_assert_eq!(&back, d.tessellation());
        prop_assert_eq!(serialize_tessellation(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Rigid motions of the input move every estimate the same way.
    #[test]
    fn inversion_is_equivariant(
        pts in generators(25),
        angle in 0.0..(2.0 * PI),
        shift in (-50.0..50.0f64, -50.0..50.0f64),
    ) {
        prop_assume!(well_separated(&pts, 0.02));
        let g = GeneratorSet::new(pts, Rect::new(0.0, 0.0, 1.0, 1.0)).unwrap();
        let d = build_voronoi(&g).unwrap();
        let t = d.tessellation();
        let motion = |p: Point2| p.rotated(angle) + Point2::new(shift.0, shift.1);
        let moved = t.map_vertices(motion);
        let opts = InvertOptions::default();
        for m in Method::ALL {
            let (Ok(a), Ok(b)) = (invert(t, m, &opts), invert(&moved, m, &opts)) else {
                continue;
            };
            prop_assert_eq!(a.positions.len(), b.positions.len());
            for (i, p) in a.positions.iter().enumerate() {
                let key = sorted(&a.polygons[i].vertex_indices);
                let j = b.polygons.iter().position(|q| sorted(&q.vertex_indices) == key).unwrap();
                if a.per_polygon[i].error.is_some() || b.per_polygon[j].error.is_some() {
                    continue;
                }
                let q = b.positions[j];
                prop_assert!(distance(motion(*p), q) < 1e-9, "{m} polygon {i}: {} vs {}", motion(*p), q);
            }
        }
    }
}
