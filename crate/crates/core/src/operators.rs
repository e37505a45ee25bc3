//! Boundary, incidence and Dirac operators of a complex.
//!
//! Every simplex is oriented by the increasing order of its vertices. The face
//! omitting the i-th vertex of `[v0 < v1 < ... < vk]` gets sign `(-1)^i`, so
//! consecutive signed boundaries compose to zero.
//!
//! Dirac operators are symmetric block matrices over the stacked cell spaces
//! `X0 + X1 (+ X2)`, with zero diagonal blocks. Constructors are limited to
//! complexes of rank at most two.

use thiserror::Error;

use crate::complex::{CombinatorialComplex, ComplexError, Rank, Vertex};
use crate::sparse::{MatrixError, Scalar, Space, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("cell {cell:?} is not a simplex of rank {rank}")]
    NotSimplicialAtRank { rank: Rank, cell: Vec<Vertex> },
    #[error("rank {rank} is absent (max rank {max_rank})")]
    RankAbsent { rank: Rank, max_rank: Rank },
    #[error("rank-0 cells have no boundary")]
    RankZeroBoundary,
    #[error("complex has max rank {max_rank}, this operator supports at most {limit}")]
    RankTooHigh { max_rank: Rank, limit: Rank },
}

/// Signed boundary matrix `B_k` of shape `|X_{k-1}| x |X_k|`.
///
/// Both ranks must consist of simplices (`k + 1` and `k` vertices) and every
/// face of a rank-k cell must be present at rank `k - 1`.
pub fn signed_boundary(cc: &CombinatorialComplex, k: Rank) -> Result<SparseMatrix, OperatorError> {
    if k == 0 {
        return Err(OperatorError::RankZeroBoundary);
    }
    if k > cc.max_rank() {
        return Err(OperatorError::RankAbsent { rank: k, max_rank: cc.max_rank() });
    }
    for r in [k - 1, k] {
        if let Some(bad) = cc.cells_of_rank(r).iter().find(|c| c.len() != r + 1) {
            return Err(OperatorError::NotSimplicialAtRank { rank: r, cell: bad.vertices().to_vec() });
        }
    }
    let faces = cc.cells_of_rank(k - 1);
    let mut triplets = Vec::new();
    for (j, simplex) in cc.cells_of_rank(k).iter().enumerate() {
        let verts = simplex.vertices();
        for omit in 0..verts.len() {
            let face: Vec<Vertex> = verts.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &v)| v).collect();
            let row = match cc.find(&face) {
                Some((rank, row)) if rank == k - 1 => row,
                _ => return Err(OperatorError::NotSimplicialAtRank { rank: k, cell: verts.to_vec() }),
            };
            let sign = if omit % 2 == 0 { 1 } else { -1 };
            triplets.push((row, j, sign));
        }
    }
    Ok(SparseMatrix::from_triplets(faces.len(), cc.cells_of_rank(k).len(), triplets)?
        .with_spaces(Space::Cells(k - 1), Space::Cells(k)))
}

/// Containment incidence `|X_r| x |X_s|`: entry 1 where the rank-r cell lies
/// inside the rank-s cell.
pub fn unsigned_incidence(cc: &CombinatorialComplex, r: Rank, s: Rank) -> Result<SparseMatrix, OperatorError> {
    let pairs = cc.incidence_pairs(r, s)?;
    Ok(SparseMatrix::from_triplets(
        cc.cells_of_rank(r).len(),
        cc.cells_of_rank(s).len(),
        pairs.into_iter().map(|(i, j)| (i, j, 1)),
    )?
    .with_spaces(Space::Cells(r), Space::Cells(s)))
}

fn check_max_rank(cc: &CombinatorialComplex, limit: Rank) -> Result<(), OperatorError> {
    if cc.max_rank() > limit {
        return Err(OperatorError::RankTooHigh { max_rank: cc.max_rank(), limit });
    }
    Ok(())
}

/// Symmetric `[[0, B], [Bᵀ, 0]]` with `B` spanning `X0 x X1`.
fn two_block(cc: &CombinatorialComplex, b01: &SparseMatrix) -> Result<SparseMatrix, OperatorError> {
    let sizes = [cc.cells_of_rank(0).len(), cc.cells_of_rank(1).len()];
    let bt = b01.transpose();
    Ok(SparseMatrix::from_blocks(&sizes, &[(0, 1, b01), (1, 0, &bt)])?
        .with_spaces(Space::Stacked(vec![0, 1]), Space::Stacked(vec![0, 1])))
}

/// `B` between two ranks that may both be empty: rank `s` absent gives a
/// zero-column matrix rather than an error.
fn boundary_or_empty(cc: &CombinatorialComplex, k: Rank) -> Result<SparseMatrix, OperatorError> {
    if k > cc.max_rank() {
        return Ok(
            SparseMatrix::zeros(cc.cells_of_rank(k - 1).len(), 0).with_spaces(Space::Cells(k - 1), Space::Cells(k))
        );
    }
    signed_boundary(cc, k)
}

fn incidence_or_empty(cc: &CombinatorialComplex, r: Rank, s: Rank) -> Result<SparseMatrix, OperatorError> {
    if s > cc.max_rank() {
        return Ok(SparseMatrix::zeros(cc.cells_of_rank(r).len(), 0).with_spaces(Space::Cells(r), Space::Cells(s)));
    }
    unsigned_incidence(cc, r, s)
}

/// Graph Dirac operator built from the signed node-to-edge matrix.
pub fn dirac_graph(cc: &CombinatorialComplex) -> Result<SparseMatrix, OperatorError> {
    check_max_rank(cc, 1)?;
    two_block(cc, &boundary_or_empty(cc, 1)?)
}

/// Hypergraph Dirac operator built from the vertex-to-hyperedge incidence.
pub fn dirac_hypergraph(cc: &CombinatorialComplex) -> Result<SparseMatrix, OperatorError> {
    check_max_rank(cc, 1)?;
    two_block(cc, &incidence_or_empty(cc, 0, 1)?)
}

fn three_block(
    cc: &CombinatorialComplex,
    b01: &SparseMatrix,
    b12: &SparseMatrix,
    b02: Option<&SparseMatrix>,
) -> Result<SparseMatrix, OperatorError> {
    let sizes = [cc.cells_of_rank(0).len(), cc.cells_of_rank(1).len(), cc.cells_of_rank(2).len()];
    let (b01t, b12t) = (b01.transpose(), b12.transpose());
    let mut blocks = vec![(0, 1, b01), (1, 0, &b01t), (1, 2, b12), (2, 1, &b12t)];
    let b02t = b02.map(SparseMatrix::transpose);
    if let (Some(b02), Some(b02t)) = (b02, b02t.as_ref()) {
        blocks.push((0, 2, b02));
        blocks.push((2, 0, b02t));
    }
    let stack = Space::Stacked(vec![0, 1, 2]);
    Ok(SparseMatrix::from_blocks(&sizes, &blocks)?.with_spaces(stack.clone(), stack))
}

/// Simplicial Dirac operator: signed `B1`, `B2` on the off-diagonal and no
/// direct coupling between vertices and triangles.
pub fn dirac_simplicial(cc: &CombinatorialComplex) -> Result<SparseMatrix, OperatorError> {
    check_max_rank(cc, 2)?;
    three_block(cc, &boundary_or_empty(cc, 1)?, &boundary_or_empty(cc, 2)?, None)
}

/// Combinatorial-complex Dirac operator with blocks `B01`, `B12` and `B02`.
///
/// `B01` and `B12` are signed boundaries when the cells involved are
/// simplices (so `B01 B12 = 0`) and unsigned containment otherwise. `B02` is
/// always unsigned containment.
pub fn dirac_cc(cc: &CombinatorialComplex) -> Result<SparseMatrix, OperatorError> {
    check_max_rank(cc, 2)?;
    let b01 = signed_boundary_or_incidence(cc, 1)?;
    if cc.max_rank() < 2 {
        return two_block(cc, &b01);
    }
    let b12 = signed_boundary_or_incidence(cc, 2)?;
    let b02 = unsigned_incidence(cc, 0, 2)?;
    three_block(cc, &b01, &b12, Some(&b02))
}

fn signed_boundary_or_incidence(cc: &CombinatorialComplex, k: Rank) -> Result<SparseMatrix, OperatorError> {
    match boundary_or_empty(cc, k) {
        Err(OperatorError::NotSimplicialAtRank { .. }) => incidence_or_empty(cc, k - 1, k),
        other => other,
    }
}

/// Shift operator `P = I + D`.
pub fn shift_operator<T: Scalar>(d: &SparseMatrix<T>) -> Result<SparseMatrix<T>, OperatorError> {
    if !d.is_square() {
        return Err(MatrixError::NotSquare { rows: d.rows(), cols: d.cols() }.into());
    }
    let eye = SparseMatrix::identity(d.rows()).with_spaces(d.row_space().clone(), d.col_space().clone());
    Ok(eye.add(d)?)
}

/// Symmetric degree normalisation `Δ^{-1/2} P Δ^{-1/2}` with
/// `Δ_ii = Σ_j |P_ij|`. Rows with zero degree are left at zero.
pub fn normalized_shift(p: &SparseMatrix) -> Result<SparseMatrix<f64>, OperatorError> {
    if !p.is_square() {
        return Err(MatrixError::NotSquare { rows: p.rows(), cols: p.cols() }.into());
    }
    let mut degree = vec![0.0f64; p.rows()];
    for &(r, _, v) in p.entries() {
        degree[r] += (v as f64).abs();
    }
    let scale: Vec<f64> = degree.iter().map(|&d| if d > 0.0 { d.sqrt().recip() } else { 0.0 }).collect();
    Ok(SparseMatrix::from_triplets(
        p.rows(),
        p.cols(),
        p.entries().iter().map(|&(r, c, v)| (r, c, scale[r] * v as f64 * scale[c])),
    )?
    .with_spaces(p.row_space().clone(), p.col_space().clone()))
}

/// Exact test of `B1 B2 = 0` in integer arithmetic.
pub fn chain_condition_check(b1: &SparseMatrix, b2: &SparseMatrix) -> Result<bool, OperatorError> {
    Ok(b1.matmul(b2)?.is_zero())
}
