#![allow(dead_code)]

use vorinv::forward::{GeneratorSet, VoronoiDiagram};
use vorinv::geom::{Point2, Rect};
use vorinv::harness::sample_invertible;

pub const SIZES: [usize; 4] = [5, 10, 50, 200];

pub fn unit() -> Rect {
    Rect::new(0.0, 0.0, 1.0, 1.0)
}

/// Twenty invertible random configurations on the unit square, five per size.
pub fn corpus() -> Vec<(GeneratorSet, VoronoiDiagram)> {
    let mut out = Vec::new();
    for (si, &n) in SIZES.iter().enumerate() {
        for k in 0..5u64 {
            let seed = 1000 * (si as u64 + 1) + 37 * k;
            let (g, d, _) = sample_invertible(n, unit(), seed, 1000).expect("invertible sample");
            out.push((g, d));
        }
    }
    out
}

/// Largest distance between paired points, skipping none.
pub fn max_error(est: &[Point2], truth: &[Point2]) -> f64 {
    assert_eq!(est.len(), truth.len());
    est.iter()
        .zip(truth)
        .map(|(a, b)| (*a - *b).norm())
        .fold(
            0.0,
            |m, e| if e.is_nan() { f64::INFINITY } else { m.max(e) },
        )
}
