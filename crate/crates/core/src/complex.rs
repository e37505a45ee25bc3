//! Ranked cell complexes over a finite vertex set.
//!
//! A [`CombinatorialComplex`] is a family of non-empty vertex subsets (cells)
//! together with a rank function that is order preserving under inclusion and
//! places every singleton at rank 0. Graphs, hypergraphs and simplicial
//! complexes are all built through the same validated constructor.
//!
//! Cells of each rank are kept in lexicographic order of their sorted vertex
//! lists. The position of a cell in [`CombinatorialComplex::cells_of_rank`] is
//! its row/column index in every matrix built from the complex.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex identifier; vertices of a complex are `0..num_vertices`.
pub type Vertex = usize;
/// Rank of a cell.
pub type Rank = usize;

/// Largest simplex accepted by [`CombinatorialComplex::from_simplicial`]; its
/// closure has `2^size - 1` cells.
pub const MAX_SIMPLEX_SIZE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("rank is not order preserving: {subset:?} (rank {subset_rank}) is contained in {superset:?} (rank {superset_rank})")]
    RankOrderViolation { subset: Vec<Vertex>, subset_rank: Rank, superset: Vec<Vertex>, superset_rank: Rank },
    #[error("cells must contain at least one vertex")]
    EmptyCell,
    #[error("vertex {vertex} is out of range for a complex on {num_vertices} vertices")]
    VertexOutOfRange { vertex: Vertex, num_vertices: usize },
    #[error("duplicate cell {vertices:?}")]
    DuplicateCell { vertices: Vec<Vertex> },
    #[error("singleton {{{vertex}}} must have rank 0, got {rank}")]
    SingletonRank { vertex: Vertex, rank: Rank },
    #[error("invalid rank pair ({r}, {s}): the first rank must be strictly smaller")]
    InvalidRankPair { r: Rank, s: Rank },
    #[error("simplex with {size} vertices exceeds the closure limit of {MAX_SIMPLEX_SIZE}")]
    SimplexTooLarge { size: usize },
}

/// A cell: a non-empty set of vertices with a rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    vertices: Vec<Vertex>,
    rank: Rank,
}

impl Cell {
    /// Builds a cell; duplicate vertices are merged.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>, rank: Rank) -> Result<Self, ComplexError> {
        let mut vertices: Vec<Vertex> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(ComplexError::EmptyCell);
        }
        Ok(Self { vertices, rank })
    }

    /// Sorted vertex list.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Number of vertices (never zero).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Set inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Cell) -> bool {
        is_sorted_subset(&self.vertices, &other.vertices)
    }
}

/// Inclusion test for two sorted, duplicate-free slices.
pub(crate) fn is_sorted_subset(small: &[Vertex], large: &[Vertex]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    'outer: for v in small {
        for w in it.by_ref() {
            match w.cmp(v) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// A validated combinatorial complex. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexFile", into = "ComplexFile")]
pub struct CombinatorialComplex {
    num_vertices: usize,
    /// `by_rank[k]` holds the rank-k cells in canonical order.
    by_rank: Vec<Vec<Cell>>,
    index: HashMap<Vec<Vertex>, (Rank, usize)>,
}

impl CombinatorialComplex {
    /// Builds and validates a complex from `(vertex set, rank)` pairs.
    ///
    /// Missing rank-0 singletons are inserted. Fails on empty cells,
    /// out-of-range vertices, repeated vertex sets (at any rank), singletons
    /// with non-zero rank, and pairs `x ⊆ y` with `rk(x) > rk(y)`.
    pub fn new<I, C>(num_vertices: usize, ranked_cells: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = (C, Rank)>,
        C: IntoIterator<Item = Vertex>,
    {
        let mut seen: HashMap<Vec<Vertex>, Rank> = HashMap::new();
        let mut cells = Vec::new();
        for (vertices, rank) in ranked_cells {
            let cell = Cell::new(vertices, rank)?;
            if let Some(&v) = cell.vertices.iter().find(|&&v| v >= num_vertices) {
                return Err(ComplexError::VertexOutOfRange { vertex: v, num_vertices });
            }
            if cell.len() == 1 && rank != 0 {
                return Err(ComplexError::SingletonRank { vertex: cell.vertices[0], rank });
            }
            if seen.insert(cell.vertices.clone(), rank).is_some() {
                return Err(ComplexError::DuplicateCell { vertices: cell.vertices });
            }
            cells.push(cell);
        }
        for v in 0..num_vertices {
            if !seen.contains_key([v].as_slice()) {
                cells.push(Cell { vertices: vec![v], rank: 0 });
            }
        }

        let max_rank = cells.iter().map(Cell::rank).max().unwrap_or(0);
        let mut by_rank = vec![Vec::new(); max_rank + 1];
        for cell in cells {
            by_rank[cell.rank].push(cell);
        }
        for bucket in &mut by_rank {
            bucket.sort_unstable_by(|a, b| a.vertices.cmp(&b.vertices));
        }
        check_rank_order(&by_rank)?;

        let index = by_rank
            .iter()
            .enumerate()
            .flat_map(|(k, bucket)| bucket.iter().enumerate().map(move |(i, c)| (c.vertices.clone(), (k, i))))
            .collect();
        Ok(Self { num_vertices, by_rank, index })
    }

    /// Downward closure of a list of simplices with `rk(x) = |x| - 1`.
    pub fn from_simplicial<I, C>(num_vertices: usize, maximal_simplices: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Vertex>,
    {
        let mut faces: BTreeSet<Vec<Vertex>> = BTreeSet::new();
        for simplex in maximal_simplices {
            let cell = Cell::new(simplex, 0)?;
            if let Some(&v) = cell.vertices.iter().find(|&&v| v >= num_vertices) {
                return Err(ComplexError::VertexOutOfRange { vertex: v, num_vertices });
            }
            let size = cell.len();
            if size > MAX_SIMPLEX_SIZE {
                return Err(ComplexError::SimplexTooLarge { size });
            }
            if faces.contains(&cell.vertices) {
                continue;
            }
            for mask in 1u32..(1u32 << size) {
                let face: Vec<Vertex> =
                    (0..size).filter(|bit| mask & (1 << bit) != 0).map(|bit| cell.vertices[bit]).collect();
                faces.insert(face);
            }
        }
        Self::new(
            num_vertices,
            faces.into_iter().map(|f| {
                let rank = f.len() - 1;
                (f, rank)
            }),
        )
    }

    /// Hypergraph with the trivial rank function: vertices at rank 0 and
    /// every hyperedge at rank 1. Singleton hyperedges are the vertex cells.
    pub fn from_hypergraph<I, C>(num_vertices: usize, hyperedges: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Vertex>,
    {
        let cells = hyperedges
            .into_iter()
            .map(|e| {
                let cell = Cell::new(e, 0)?;
                let rank = if cell.len() == 1 { 0 } else { 1 };
                Ok((cell.vertices, rank))
            })
            .collect::<Result<Vec<_>, ComplexError>>()?;
        Self::new(num_vertices, cells)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Highest rank present (0 for a bare vertex set).
    pub fn max_rank(&self) -> Rank {
        self.by_rank.len() - 1
    }

    /// Rank-k cells in canonical order; empty if the rank is absent.
    pub fn cells_of_rank(&self, k: Rank) -> &[Cell] {
        self.by_rank.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of cells per rank, `0..=max_rank`.
    pub fn rank_counts(&self) -> Vec<usize> {
        self.by_rank.iter().map(Vec::len).collect()
    }

    /// Total number of cells.
    pub fn num_cells(&self) -> usize {
        self.by_rank.iter().map(Vec::len).sum()
    }

    /// Iterates all cells, rank by rank, in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.by_rank.iter().flatten()
    }

    /// Rank and position of the cell with exactly this (sorted) vertex set.
    pub fn find(&self, vertices: &[Vertex]) -> Option<(Rank, usize)> {
        self.index.get(vertices).copied()
    }

    /// True when every rank-k cell has `k + 1` vertices.
    pub fn is_simplicial_at(&self, k: Rank) -> bool {
        self.cells_of_rank(k).iter().all(|c| c.len() == k + 1)
    }

    /// All `(i, j)` with the i-th rank-r cell contained in the j-th rank-s
    /// cell, sorted.
    pub fn incidence_pairs(&self, r: Rank, s: Rank) -> Result<Vec<(usize, usize)>, ComplexError> {
        if r >= s {
            return Err(ComplexError::InvalidRankPair { r, s });
        }
        let lower = self.cells_of_rank(r);
        let upper = self.cells_of_rank(s);
        // A subset's smallest vertex lies in the superset, so bucket the
        // lower cells by their first vertex.
        let mut by_first: HashMap<Vertex, Vec<usize>> = HashMap::new();
        for (i, c) in lower.iter().enumerate() {
            by_first.entry(c.vertices[0]).or_default().push(i);
        }
        let mut pairs = Vec::new();
        for (j, y) in upper.iter().enumerate() {
            for v in &y.vertices {
                if let Some(candidates) = by_first.get(v) {
                    pairs.extend(candidates.iter().filter(|&&i| lower[i].is_subset_of(y)).map(|&i| (i, j)));
                }
            }
        }
        pairs.sort_unstable();
        Ok(pairs)
    }

    /// Serialises to the canonical JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complex serialisation is infallible")
    }
}

/// Only pairs whose ranks would break monotonicity when nested are tested:
/// a higher-rank cell inside a strictly larger lower-rank cell.
fn check_rank_order(by_rank: &[Vec<Cell>]) -> Result<(), ComplexError> {
    for (hi, high_cells) in by_rank.iter().enumerate() {
        for lo_cells in &by_rank[..hi] {
            for x in high_cells {
                for y in lo_cells.iter().filter(|y| y.len() > x.len()) {
                    if x.is_subset_of(y) {
                        return Err(ComplexError::RankOrderViolation {
                            subset: x.vertices.clone(),
                            subset_rank: x.rank,
                            superset: y.vertices.clone(),
                            superset_rank: y.rank,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// On-disk layout: `{"num_vertices": n, "cells": [{"vertices": [...], "rank": k}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexFile {
    pub num_vertices: usize,
    pub cells: Vec<Cell>,
}

impl From<CombinatorialComplex> for ComplexFile {
    fn from(cc: CombinatorialComplex) -> Self {
        Self { num_vertices: cc.num_vertices, cells: cc.by_rank.into_iter().flatten().collect() }
    }
}

impl TryFrom<ComplexFile> for CombinatorialComplex {
    type Error = ComplexError;

    fn try_from(file: ComplexFile) -> Result<Self, Self::Error> {
        Self::new(file.num_vertices, file.cells.into_iter().map(|c| (c.vertices, c.rank)))
    }
}
