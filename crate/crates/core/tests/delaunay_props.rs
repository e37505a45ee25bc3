use std::collections::HashMap;

use combx::delaunay::{complex_from_triangulation, sample_points, triangulate, PointSet};
use combx::operators::{chain_condition_check, signed_boundary};
use proptest::prelude::*;

fn circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> ([f64; 2], f64) {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    let sq = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
    let ux = (sq(a) * (b[1] - c[1]) + sq(b) * (c[1] - a[1]) + sq(c) * (a[1] - b[1])) / d;
    let uy = (sq(a) * (c[0] - b[0]) + sq(b) * (a[0] - c[0]) + sq(c) * (b[0] - a[0])) / d;
    let r = ((a[0] - ux).powi(2) + (a[1] - uy).powi(2)).sqrt();
    ([ux, uy], r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circumcircles_are_empty(n in 3usize..60, seed in any::<u64>()) {
        let ps = sample_points(n, seed).unwrap();
        let tri = triangulate(&ps).unwrap();
        let pts = ps.points();
        for t in tri.triangles() {
            let (c, r) = circumcircle(pts[t[0]], pts[t[1]], pts[t[2]]);
            for (i, p) in pts.iter().enumerate() {
                if t.contains(&i) {
                    continue;
                }
                let d = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt();
                prop_assert!(d >= r - 1e-10, "point {i} inside circumcircle of {t:?}");
            }
        }
    }

    #[test]
    fn euler_relations_hold(n in 3usize..200, seed in any::<u64>()) {
        let tri = triangulate(&sample_points(n, seed).unwrap()).unwrap();
        let h = tri.hull_size();
        prop_assert_eq!(tri.triangles().len(), 2 * n - 2 - h);
        prop_assert_eq!(tri.edges().len(), 3 * n - 3 - h);
    }

    #[test]
    fn edges_are_manifold(n in 3usize..120, seed in any::<u64>()) {
        let tri = triangulate(&sample_points(n, seed).unwrap()).unwrap();
        let mut uses: HashMap<[usize; 2], usize> = HashMap::new();
        for t in tri.triangles() {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                *uses.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        prop_assert!(uses.values().all(|&u| u == 1 || u == 2));
        let boundary = uses.values().filter(|&&u| u == 1).count();
        prop_assert_eq!(boundary, tri.hull_size());
    }

    #[test]
    fn triangles_are_sorted_and_nondegenerate(n in 3usize..80, seed in any::<u64>()) {
        let tri = triangulate(&sample_points(n, seed).unwrap()).unwrap();
        let pts = tri.points().points();
        for t in tri.triangles() {
            prop_assert!(t[0] < t[1] && t[1] < t[2]);
            let area = (pts[t[1]][0] - pts[t[0]][0]) * (pts[t[2]][1] - pts[t[0]][1])
                - (pts[t[2]][0] - pts[t[0]][0]) * (pts[t[1]][1] - pts[t[0]][1]);
            prop_assert!(area.abs() > 0.0);
        }
    }

    #[test]
    fn chain_condition_on_delaunay_complexes(n in 10usize..200, seed in any::<u64>()) {
        let tri = triangulate(&sample_points(n, seed).unwrap()).unwrap();
        let cc = complex_from_triangulation(&tri).unwrap();
        let b1 = signed_boundary(&cc, 1).unwrap();
        let b2 = signed_boundary(&cc, 2).unwrap();
        prop_assert!(chain_condition_check(&b1, &b2).unwrap());
    }
}

#[test]
fn triangle_area_sums_to_hull_area() {
    let ps = sample_points(150, 11).unwrap();
    let tri = triangulate(&ps).unwrap();
    let pts = ps.points();
    let area = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs() / 2.0
    };
    let total: f64 = tri.triangles().iter().map(|t| area(pts[t[0]], pts[t[1]], pts[t[2]])).sum();

    // monotone chain hull
    let mut sorted: Vec<[f64; 2]> = pts.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(sorted.iter()) } else { Box::new(sorted.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let hull_area: f64 = (0..hull.len())
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0;
    assert_eq!(hull.len(), tri.hull_size());
    assert!((total - hull_area).abs() < 1e-12);
}

#[test]
fn point_set_json_round_trip() {
    let ps = sample_points(30, 5).unwrap();
    let back: PointSet = serde_json::from_str(&ps.to_json()).unwrap();
    assert_eq!(back, ps);
    assert!(serde_json::from_str::<PointSet>(r#"{"seed":0,"points":[[0.1,0.2],[1.5,0.0]]}"#).is_err());
}
