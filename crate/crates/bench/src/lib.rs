//! Shared fixtures for the benchmarks.

use combx::delaunay::{self, PointSet, Triangulation};
use combx::experiment::{self, Dataset};

pub fn points(n: usize) -> PointSet {
    delaunay::sample_points(n, 0).expect("n >= 3")
}

pub fn triangulation(n: usize) -> Triangulation {
    delaunay::triangulate(&points(n)).expect("random points are not collinear")
}

pub fn dataset(n: usize) -> Dataset {
    experiment::generate_dataset(n, 0).expect("valid dataset")
}
