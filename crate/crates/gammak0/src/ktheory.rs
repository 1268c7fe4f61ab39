//! The boundary map of a graph, K0 of its graph algebra as the cokernel of
//! that map, tail elimination and truncation cross-checks, and the
//! automorphisms induced on K0 by graph automorphisms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{FgAbelianGroup, GroupAut, GroupElement, GroupHom};
use crate::graph::{Graph, GraphAut, GraphBuilder, VertexTag};
use crate::intlin::{self, Cokernel, IntMatrix};

#[derive(Debug, Error)]
pub enum KtheoryError {
    #[error("graph is invalid: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("declared tail anchors are not allowed in finite mode; truncate them first")]
    TailAnchorsInFiniteMode,
    #[error("tail anchor {0} is not a relation vertex and cannot grow a tail chain")]
    UntruncatableAnchor(String),
    #[error("K0 data was computed from a different graph")]
    GraphMismatch,
    #[error("commuting diagram failed: {0}")]
    CommutingDiagram(String),
    #[error("internal error, this must not happen: {0}")]
    Internal(String),
}

/// How declared tail anchors enter the boundary map.
///
/// `TailEliminated` encodes the infinite killing chains by one extra unit
/// column per anchor: in the full graph each chain relation forces its
/// predecessor to vanish, so every chain vertex and the anchor itself are
/// zero in K0, and appending the relation `anchor = 0` presents the same
/// cokernel on the finite core. `Finite` takes the graph literally and
/// rejects declared anchors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum K0Mode {
    Finite,
    TailEliminated,
}

/// Boundary map `B` of a graph, with the orderings that index it.
///
/// Rows are indexed by all vertices and columns by the receiving vertices
/// (those with at least one incoming edge), both in canonical vertex order;
/// in tail-eliminated mode one unit column per tail anchor is appended.
/// The column of a receiving vertex `v` is `e_v - sum of in-edge sources`,
/// loops counting with multiplicity.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    pub matrix: IntMatrix,
    pub vertex_order: Vec<VertexTag>,
    pub regular_vertices: Vec<VertexTag>,
    pub tail_columns: Vec<VertexTag>,
}

impl BoundaryMatrix {
    /// The vertex owning column `j`.
    pub fn column_vertex(&self, j: usize) -> &VertexTag {
        if j < self.regular_vertices.len() {
            &self.regular_vertices[j]
        } else {
            &self.tail_columns[j - self.regular_vertices.len()]
        }
    }
}

pub fn boundary_matrix(g: &Graph, mode: K0Mode) -> Result<BoundaryMatrix, KtheoryError> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(KtheoryError::InvalidGraph(violations));
    }
    if mode == K0Mode::Finite && !g.tail_anchors().is_empty() {
        return Err(KtheoryError::TailAnchorsInFiniteMode);
    }
    let vertex_order: Vec<VertexTag> = g.vertices().iter().cloned().collect();
    let index: BTreeMap<&VertexTag, usize> = vertex_order
        .iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let regular_vertices: Vec<VertexTag> = vertex_order
        .iter()
        .filter(|v| g.has_incoming(v))
        .cloned()
        .collect();
    let tail_columns: Vec<VertexTag> = match mode {
        K0Mode::Finite => Vec::new(),
        K0Mode::TailEliminated => g.tail_anchors().iter().cloned().collect(),
    };

    let rows = vertex_order.len();
    let cols = regular_vertices.len() + tail_columns.len();
    let mut matrix = IntMatrix::zeros(rows, cols);
    for (j, v) in regular_vertices.iter().enumerate() {
        matrix[(index[v], j)] += BigInt::one();
        for source in g.in_edges(v) {
            matrix[(index[&source], j)] -= BigInt::one();
        }
    }
    for (t, anchor) in tail_columns.iter().enumerate() {
        matrix[(index[anchor], regular_vertices.len() + t)] = BigInt::one();
    }
    Ok(BoundaryMatrix {
        matrix,
        vertex_order,
        regular_vertices,
        tail_columns,
    })
}

/// K0 of the graph algebra: the cokernel of the boundary map in canonical
/// invariant-factor form, together with the class of every vertex projection
/// in canonical coordinates.
#[derive(Clone, Debug)]
pub struct K0Result {
    group: FgAbelianGroup,
    class_of: BTreeMap<VertexTag, GroupElement>,
    boundary: BoundaryMatrix,
    cokernel: Cokernel,
}

impl K0Result {
    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    /// The class of the vertex projection in canonical coordinates.
    /// Panics on a vertex the graph does not have.
    pub fn class_of(&self, v: &VertexTag) -> &GroupElement {
        self.class_of
            .get(v)
            .unwrap_or_else(|| panic!("vertex {v} is not in the graph"))
    }

    pub fn classes(&self) -> &BTreeMap<VertexTag, GroupElement> {
        &self.class_of
    }

    /// The receiving vertices, in the order indexing boundary columns.
    pub fn regular_vertices(&self) -> &[VertexTag] {
        &self.boundary.regular_vertices
    }

    pub fn boundary(&self) -> &BoundaryMatrix {
        &self.boundary
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.cokernel.projection
    }

    /// Kernel rank of the boundary map, read off the computed cokernel:
    /// `columns - rank(B)` with `rank(B) = rows - free_rank`.
    pub fn k1_rank(&self) -> usize {
        let rank = self.boundary.matrix.rows() - self.group.free_rank();
        self.boundary.matrix.cols() - rank
    }
}

pub fn k0(g: &Graph, mode: K0Mode) -> Result<K0Result, KtheoryError> {
    let boundary = boundary_matrix(g, mode)?;
    let cok = intlin::cokernel(&boundary.matrix);
    let class_of: BTreeMap<VertexTag, GroupElement> = boundary
        .vertex_order
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), cok.group.element(cok.projection.column(i))))
        .collect();
    Ok(K0Result {
        group: cok.group.clone(),
        class_of,
        boundary,
        cokernel: cok,
    })
}

/// Rank of the kernel of the boundary map (the free rank exposed as K1).
pub fn k1_rank(g: &Graph, mode: K0Mode) -> Result<usize, KtheoryError> {
    let boundary = boundary_matrix(g, mode)?;
    Ok(intlin::kernel_rank(&boundary.matrix))
}

/// Materializes `depth >= 1` chain vertices behind every declared tail
/// anchor (each with a single loop, fed by its predecessor) and clears the
/// anchor declarations. Anchors must be relation vertices, which carry the
/// pair key the chain is named after.
pub fn truncate_tails(g: &Graph, depth: u32) -> Result<Graph, KtheoryError> {
    assert!(depth >= 1, "truncation depth must be at least 1");
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(KtheoryError::InvalidGraph(violations));
    }
    let mut builder = GraphBuilder::new();
    for v in g.vertices() {
        builder.add_vertex(v.clone());
    }
    for (s, d) in g.edges() {
        builder.add_edge(s.clone(), d.clone());
    }
    for (v, count) in g.loops() {
        builder.set_loops(v.clone(), *count);
    }
    for anchor in g.tail_anchors() {
        let VertexTag::RelU(pair) = anchor else {
            return Err(KtheoryError::UntruncatableAnchor(anchor.to_string()));
        };
        let mut previous = anchor.clone();
        for level in 1..=depth {
            let chain = VertexTag::Tail {
                pair: pair.clone(),
                level,
            };
            builder.add_vertex(chain.clone());
            builder.set_loops(chain.clone(), 1);
            builder.add_edge(previous, chain.clone());
            previous = chain;
        }
    }
    Ok(builder.build())
}

/// The automorphism of `K0Result::group` induced by a graph automorphism.
///
/// Constructed only after the commuting square of the boundary map against
/// the vertex permutation has been verified exactly, so it really is a map
/// on the cokernel; invertibility is certified by carrying the inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedAut {
    aut: GroupAut,
}

impl InducedAut {
    pub fn aut(&self) -> &GroupAut {
        &self.aut
    }

    pub fn hom(&self) -> &GroupHom {
        self.aut.hom()
    }

    /// Matrix form in canonical coordinates, torsion rows reduced.
    pub fn matrix(&self) -> IntMatrix {
        self.aut.hom().canonical_matrix()
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        self.aut.apply(x)
    }
}

/// Descends a graph automorphism to K0.
///
/// First verifies the exact matrix identity `P_V B = B P_E` for the
/// permutation matrices of the automorphism on vertices and on boundary
/// columns, then expresses `[x] -> [P_V x]` in canonical coordinates via the
/// cokernel projection and its section.
pub fn induced_automorphism(
    g: &Graph,
    aut: &GraphAut,
    k: &K0Result,
) -> Result<InducedAut, KtheoryError> {
    if aut.graph() != g || k.boundary.vertex_order.len() != g.vertex_count() {
        return Err(KtheoryError::GraphMismatch);
    }
    let boundary = &k.boundary;
    let rows = boundary.matrix.rows();
    let cols = boundary.matrix.cols();

    let row_index: BTreeMap<&VertexTag, usize> = boundary
        .vertex_order
        .iter()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let col_index: BTreeMap<&VertexTag, usize> = boundary
        .regular_vertices
        .iter()
        .enumerate()
        .map(|(j, v)| (v, j))
        .collect();
    // tail columns form their own permuted block
    let regular_count = boundary.regular_vertices.len();
    let tail_index: BTreeMap<&VertexTag, usize> = boundary
        .tail_columns
        .iter()
        .enumerate()
        .map(|(t, v)| (v, regular_count + t))
        .collect();

    // row permutation: image row of each vertex row
    let row_perm: Vec<usize> = boundary
        .vertex_order
        .iter()
        .map(|v| row_index[aut.apply(v)])
        .collect();
    // column permutation: image column of each column vertex
    let mut col_perm = Vec::with_capacity(cols);
    for v in &boundary.regular_vertices {
        let image = aut.apply(v);
        let Some(&j2) = col_index.get(image) else {
            return Err(KtheoryError::CommutingDiagram(format!(
                "image {image} of receiving vertex {v} receives no edge"
            )));
        };
        col_perm.push(j2);
    }
    for v in &boundary.tail_columns {
        let image = aut.apply(v);
        let Some(&t2) = tail_index.get(image) else {
            return Err(KtheoryError::CommutingDiagram(format!(
                "image {image} of tail anchor {v} is not a tail anchor"
            )));
        };
        col_perm.push(t2);
    }

    // exact check of P_V B = B P_E, column by column:
    // column j permuted by P_V must equal column col_perm[j] of B
    for (j, &j2) in col_perm.iter().enumerate() {
        for (i, &i2) in row_perm.iter().enumerate() {
            if boundary.matrix[(i, j)] != boundary.matrix[(i2, j2)] {
                return Err(KtheoryError::CommutingDiagram(format!(
                    "entry mismatch at row {}, column {}",
                    boundary.vertex_order[i],
                    boundary.column_vertex(j)
                )));
            }
        }
    }

    // induced matrix = projection . P_V . section, one canonical generator
    // (= section column) at a time
    let generators = k.group.num_generators();
    let mut columns: Vec<Vec<BigInt>> = Vec::with_capacity(generators);
    for t in 0..generators {
        let section_col = k.cokernel.section.column(t);
        let mut permuted = vec![BigInt::zero(); rows];
        for (i, value) in section_col.into_iter().enumerate() {
            permuted[row_perm[i]] = value;
        }
        columns.push(k.cokernel.projection.mul_vec(&permuted));
    }
    let matrix = IntMatrix::from_fn(generators, generators, |i, j| columns[j][i].clone());
    let hom = GroupHom::new(k.group.clone(), k.group.clone(), matrix)
        .map_err(|e| KtheoryError::Internal(format!("induced map is not well defined: {e}")))?;
    let aut = GroupAut::new(hom)
        .map_err(|e| KtheoryError::Internal(format!("induced map is not invertible: {e}")))?;
    Ok(InducedAut { aut })
}

/// CSV table of vertex classes, quoted because tags and tuples contain commas.
pub fn class_table_csv(k: &K0Result) -> String {
    let mut out = String::from("vertex,class\n");
    for (v, class) in k.classes() {
        out.push_str(&format!("\"{v}\",\"{class}\"\n"));
    }
    out
}
