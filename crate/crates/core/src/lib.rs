//! Combinatorial complexes and learning on them.
//!
//! The crate is organised bottom-up:
//!
//! - [`complex`]: ranked cell families (graphs, hypergraphs, simplicial and
//!   combinatorial complexes) with validation of the rank function.
//! - [`sparse`]: a coordinate-list sparse matrix with labelled index spaces.
//! - [`operators`]: signed boundary matrices, containment incidences, the
//!   block Dirac operators and shift operators built from them.
//! - [`delaunay`]: random planar point sets and their Delaunay triangulation.
//! - [`tnn`]: a two-layer topological network `sigmoid(P relu(P s W1) W2)`
//!   trained with Adam.
//! - [`experiment`]: the synthetic vertex-labelling task and the comparison of
//!   simplicial and combinatorial shift operators.

pub mod complex;
pub mod delaunay;
pub mod experiment;
pub mod operators;
pub mod sparse;
pub mod tnn;

pub use complex::{Cell, CombinatorialComplex, ComplexError, Rank, Vertex};
pub use delaunay::{DelaunayError, PointSet, Triangulation};
pub use experiment::{ComparisonReport, Dataset, ExperimentError, ModelKind};
pub use operators::OperatorError;
pub use sparse::{MatrixError, Space, SparseMatrix};
pub use tnn::{AdamConfig, ModelState, SignalBundle, TnnError, TrainConfig};
