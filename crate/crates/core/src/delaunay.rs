//! Random planar point sets and their Delaunay triangulation.
//!
//! Triangulation is incremental Bowyer-Watson. Instead of a finite
//! super-triangle the mesh carries one symbolic vertex at infinity: every
//! convex-hull edge has a "ghost" triangle joining it to that vertex, and
//! ghosts are dropped at the end. A point conflicts with a ghost when it lies
//! strictly outside the hull edge (or on the open edge itself).
//!
//! Predicates use plain `f64` determinants. Values with magnitude below
//! [`PREDICATE_EPS`] are ties: cocircular points do not conflict, and
//! orientation ties count as "on the line".

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{CombinatorialComplex, ComplexError};

pub const PREDICATE_EPS: f64 = 1e-12;

/// RNG stream used for point coordinates.
const POINT_STREAM: u64 = 0;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelaunayError {
    #[error("too few points: need at least 3, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("point {index} ({x}, {y}) is outside the unit square")]
    PointOutOfRange { index: usize, x: f64, y: f64 },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Points in the unit square together with the seed that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetFile")]
pub struct PointSet {
    seed: u64,
    points: Vec<Point>,
}

#[derive(Deserialize)]
struct PointSetFile {
    seed: u64,
    points: Vec<Point>,
}

impl TryFrom<PointSetFile> for PointSet {
    type Error = DelaunayError;

    fn try_from(file: PointSetFile) -> Result<Self, Self::Error> {
        PointSet::new(file.points, file.seed)
    }
}

impl PointSet {
    /// Validates that coordinates lie in `[0, 1]` and that points are distinct.
    pub fn new(points: Vec<Point>, seed: u64) -> Result<Self, DelaunayError> {
        for (index, &[x, y]) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
                return Err(DelaunayError::PointOutOfRange { index, x, y });
            }
        }
        let mut seen = HashSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert((p[0].to_bits(), p[1].to_bits())) {
                return Err(DelaunayError::DegenerateInput(format!("point {i} repeats an earlier point")));
            }
        }
        Ok(Self { seed, points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("point set serialisation is infallible")
    }
}

/// `n` points drawn i.i.d. uniform on the unit square.
pub fn sample_points(n: usize, seed: u64) -> Result<PointSet, DelaunayError> {
    if n < 3 {
        return Err(DelaunayError::TooFewPoints(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(POINT_STREAM);
    let mut seen = HashSet::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p: Point = [rng.random(), rng.random()];
        if seen.insert((p[0].to_bits(), p[1].to_bits())) {
            points.push(p);
        }
    }
    PointSet::new(points, seed)
}

/// Twice the signed area of `abc`; positive when counter-clockwise.
pub fn orient2d(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Positive when `d` lies inside the circumcircle of the counter-clockwise
/// triangle `abc`.
pub fn in_circle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    alift * (bdx * cdy - cdx * bdy) - blift * (adx * cdy - cdx * ady) + clift * (adx * bdy - bdx * ady)
}

/// A Delaunay triangulation of a [`PointSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    points: PointSet,
    triangles: Vec<[usize; 3]>,
    hull_size: usize,
}

impl Triangulation {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    /// Triangles as ascending vertex triples, sorted.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Number of points on the convex hull boundary (collinear ones included).
    pub fn hull_size(&self) -> usize {
        self.hull_size
    }

    /// Distinct edges of all triangles, sorted.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut edges: Vec<[usize; 2]> =
            self.triangles.iter().flat_map(|&[a, b, c]| [[a, b], [a, c], [b, c]]).collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// `|T| = 2n - 2 - h` and `|E| = 3n - 3 - h`.
    pub fn satisfies_euler(&self) -> bool {
        let (n, h) = (self.points.len(), self.hull_size);
        self.triangles.len() + h + 2 == 2 * n && self.edges().len() + h + 3 == 3 * n
    }
}

const GHOST: usize = usize::MAX;

/// Triangles are `[a, b, c]` counter-clockwise; ghosts are `[u, v, GHOST]`
/// where `u -> v` is a hull edge traversed with the exterior on its left.
struct Mesh<'a> {
    pts: &'a [Point],
    tris: Vec<[usize; 3]>,
    alive: Vec<bool>,
    /// Directed edge -> owning triangle.
    edges: HashMap<(usize, usize), usize>,
}

impl<'a> Mesh<'a> {
    fn new(pts: &'a [Point], a: usize, b: usize, c: usize) -> Self {
        let mut mesh = Self { pts, tris: Vec::new(), alive: Vec::new(), edges: HashMap::new() };
        for t in [[a, b, c], [b, a, GHOST], [c, b, GHOST], [a, c, GHOST]] {
            mesh.add(t);
        }
        mesh
    }

    fn add(&mut self, t: [usize; 3]) {
        let id = self.tris.len();
        for e in directed_edges(t) {
            let prev = self.edges.insert(e, id);
            debug_assert!(prev.is_none(), "directed edge {e:?} already owned");
        }
        self.tris.push(t);
        self.alive.push(true);
    }

    fn remove(&mut self, id: usize) {
        for e in directed_edges(self.tris[id]) {
            self.edges.remove(&e);
        }
        self.alive[id] = false;
    }

    fn is_ghost(&self, id: usize) -> bool {
        self.tris[id][2] == GHOST
    }

    fn conflicts(&self, id: usize, p: Point) -> bool {
        let [a, b, c] = self.tris[id];
        if c == GHOST {
            let (u, v) = (self.pts[a], self.pts[b]);
            let o = orient2d(u, v, p);
            if o > PREDICATE_EPS {
                return true;
            }
            // on the open hull edge
            o.abs() <= PREDICATE_EPS && strictly_between(u, v, p)
        } else {
            in_circle(self.pts[a], self.pts[b], self.pts[c], p) > PREDICATE_EPS
        }
    }

    /// Triangle whose closure contains `p`, or a ghost that sees it.
    fn locate(&self, p: Point) -> Option<usize> {
        let mut best_solid: Option<(f64, usize)> = None;
        let mut best_ghost: Option<(f64, usize)> = None;
        for (id, t) in self.tris.iter().enumerate().filter(|&(id, _)| self.alive[id]) {
            if t[2] == GHOST {
                let o = orient2d(self.pts[t[0]], self.pts[t[1]], p);
                if o > PREDICATE_EPS && best_ghost.is_none_or(|(bo, _)| o > bo) {
                    best_ghost = Some((o, id));
                }
            } else {
                let [a, b, c] = t.map(|i| self.pts[i]);
                let score = orient2d(a, b, p).min(orient2d(b, c, p)).min(orient2d(c, a, p));
                if best_solid.is_none_or(|(bs, _)| score > bs) {
                    best_solid = Some((score, id));
                }
            }
        }
        match (best_solid, best_ghost) {
            (Some((s, id)), _) if s > PREDICATE_EPS => Some(id),
            (_, Some((_, id))) => Some(id),
            (Some((s, id)), None) if s >= -PREDICATE_EPS => Some(id),
            _ => None,
        }
    }

    /// Connected conflict region around `seed`, excluding `banned`.
    fn cavity(&self, seed: usize, p: Point, banned: &HashSet<usize>) -> Vec<usize> {
        let mut inside = HashSet::from([seed]);
        let mut queue = VecDeque::from([seed]);
        let mut order = Vec::new();
        while let Some(id) = queue.pop_front() {
            order.push(id);
            for (a, b) in directed_edges(self.tris[id]) {
                let Some(&nb) = self.edges.get(&(b, a)) else { continue };
                if !inside.contains(&nb) && !banned.contains(&nb) && self.conflicts(nb, p) {
                    inside.insert(nb);
                    queue.push_back(nb);
                }
            }
        }
        order.sort_unstable();
        order
    }

    fn insert(&mut self, i: usize) -> Result<(), DelaunayError> {
        let p = self.pts[i];
        let seed =
            self.locate(p).ok_or_else(|| DelaunayError::DegenerateInput(format!("point {i} could not be located")))?;
        let mut banned = HashSet::new();
        let (cavity, boundary) = loop {
            let cavity = self.cavity(seed, p, &banned);
            let members: HashSet<usize> = cavity.iter().copied().collect();
            let mut boundary = Vec::new();
            let mut bad = None;
            for &id in &cavity {
                for (a, b) in directed_edges(self.tris[id]) {
                    let outer = self.edges.get(&(b, a)).copied();
                    if outer.is_some_and(|o| members.contains(&o)) {
                        continue;
                    }
                    if a != GHOST && b != GHOST && orient2d(self.pts[a], self.pts[b], p) <= PREDICATE_EPS {
                        bad = Some(id);
                    }
                    boundary.push((a, b));
                }
            }
            match bad {
                None => break (cavity, boundary),
                Some(id) if id == seed => {
                    return Err(DelaunayError::DegenerateInput(format!("point {i} produces a degenerate cavity")))
                }
                Some(id) => {
                    banned.insert(id);
                }
            }
        };
        for id in cavity {
            self.remove(id);
        }
        for (a, b) in boundary {
            let t = if a == GHOST {
                [b, i, GHOST]
            } else if b == GHOST {
                [i, a, GHOST]
            } else {
                [a, b, i]
            };
            self.add(t);
        }
        Ok(())
    }
}

fn directed_edges([a, b, c]: [usize; 3]) -> [(usize, usize); 3] {
    [(a, b), (b, c), (c, a)]
}

fn strictly_between(u: Point, v: Point, p: Point) -> bool {
    let d = [v[0] - u[0], v[1] - u[1]];
    let t = (p[0] - u[0]) * d[0] + (p[1] - u[1]) * d[1];
    t > 0.0 && t < d[0] * d[0] + d[1] * d[1]
}

/// Delaunay triangulation by incremental insertion in generation order.
pub fn triangulate(ps: &PointSet) -> Result<Triangulation, DelaunayError> {
    let pts = ps.points();
    if pts.len() < 3 {
        return Err(DelaunayError::TooFewPoints(pts.len()));
    }
    let (a, b) = (0, 1);
    let c = (2..pts.len())
        .find(|&k| orient2d(pts[a], pts[b], pts[k]).abs() > PREDICATE_EPS)
        .ok_or_else(|| DelaunayError::DegenerateInput("all points are collinear".into()))?;
    let (a, b) = if orient2d(pts[a], pts[b], pts[c]) > 0.0 { (a, b) } else { (b, a) };

    let mut mesh = Mesh::new(pts, a, b, c);
    for i in (0..pts.len()).filter(|&i| i != a && i != b && i != c) {
        mesh.insert(i)?;
    }

    let mut triangles = Vec::new();
    let mut hull_size = 0;
    for id in (0..mesh.tris.len()).filter(|&id| mesh.alive[id]) {
        if mesh.is_ghost(id) {
            hull_size += 1;
        } else {
            let mut t = mesh.tris[id];
            t.sort_unstable();
            triangles.push(t);
        }
    }
    triangles.sort_unstable();
    Ok(Triangulation { points: ps.clone(), triangles, hull_size })
}

/// The 2-dimensional simplicial complex spanned by the triangles.
pub fn complex_from_triangulation(t: &Triangulation) -> Result<CombinatorialComplex, DelaunayError> {
    Ok(CombinatorialComplex::from_simplicial(t.points.len(), t.triangles.iter().map(|t| t.to_vec()))?)
}
