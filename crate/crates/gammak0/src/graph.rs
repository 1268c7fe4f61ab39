//! Row-finite directed graphs in the shape this crate works with: no
//! parallel non-loop edges, finitely many loops per vertex (held as counts),
//! semantically tagged vertices, and declared tail gadgets. Includes
//! validation, JSON serialization, and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{parse_group_spec, FgAbelianGroup, GroupElement};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph document at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("vertex map is not a graph homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("vertex map is not a graph automorphism: {0}")]
    NotAutomorphism(String),
    #[error("homomorphisms do not compose: middle graphs differ")]
    CompositionMismatch,
}

/// Unordered pair of group elements, stored with `first <= second` in the
/// canonical element order. `first == second` is allowed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PairKey {
    first: GroupElement,
    second: GroupElement,
}

impl PairKey {
    pub fn new(a: GroupElement, b: GroupElement) -> Self {
        if b < a {
            PairKey {
                first: b,
                second: a,
            }
        } else {
            PairKey {
                first: a,
                second: b,
            }
        }
    }

    pub fn first(&self) -> &GroupElement {
        &self.first
    }

    pub fn second(&self) -> &GroupElement {
        &self.second
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.first, self.second)
    }
}

/// Semantic vertex identity; a vertex IS its tag, so equality is structural
/// and independent of insertion order. The derived `Ord` is the canonical
/// vertex order used everywhere matrices need stable indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VertexTag {
    /// `v_a`: one vertex per group element.
    Element(GroupElement),
    /// `w`: intermediate vertex splitting one leg of a relation gadget;
    /// slot 0 is anchored at the pair's first element, slot 1 at the second.
    Splitter { pair: PairKey, slot: u8 },
    /// `u_{ab}`: the relation vertex of an unordered pair.
    RelU(PairKey),
    /// `u_c`: the shared sum vertex of a group element (carries two loops).
    SumU(GroupElement),
    /// Materialized tail-chain vertex at depth `level >= 1`.
    Tail { pair: PairKey, level: u32 },
    /// Generic vertex for hand-built graphs.
    Plain(String),
}

impl fmt::Display for VertexTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexTag::Element(a) => write!(f, "v{a}"),
            VertexTag::Splitter { pair, slot } => write!(f, "w{slot}{pair}"),
            VertexTag::RelU(pair) => write!(f, "u{pair}"),
            VertexTag::SumU(c) => write!(f, "u[{c}]"),
            VertexTag::Tail { pair, level } => write!(f, "u^{level}{pair}"),
            VertexTag::Plain(id) => write!(f, "{id}"),
        }
    }
}

/// Immutable directed graph. Non-loop edges form a set of ordered
/// `(source, range)` pairs with distinct endpoints; loops are per-vertex
/// counts; `tail_anchors` marks vertices declared to carry an infinite
/// killing tail. Finite by construction, hence row-finite.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    vertices: BTreeSet<VertexTag>,
    edges: BTreeSet<(VertexTag, VertexTag)>,
    loops: BTreeMap<VertexTag, usize>,
    tail_anchors: BTreeSet<VertexTag>,
    incoming: BTreeMap<VertexTag, Vec<VertexTag>>,
}

impl Graph {
    pub fn vertices(&self) -> &BTreeSet<VertexTag> {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &BTreeSet<(VertexTag, VertexTag)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loops(&self) -> &BTreeMap<VertexTag, usize> {
        &self.loops
    }

    pub fn loop_count(&self, v: &VertexTag) -> usize {
        self.loops.get(v).copied().unwrap_or(0)
    }

    pub fn total_loops(&self) -> usize {
        self.loops.values().sum()
    }

    pub fn tail_anchors(&self) -> &BTreeSet<VertexTag> {
        &self.tail_anchors
    }

    pub fn contains_vertex(&self, v: &VertexTag) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, src: &VertexTag, dst: &VertexTag) -> bool {
        self.edges.contains(&(src.clone(), dst.clone()))
    }

    /// Non-loop in-edge sources of `v`, sorted.
    pub fn in_sources(&self, v: &VertexTag) -> &[VertexTag] {
        self.incoming.get(v).map_or(&[], Vec::as_slice)
    }

    /// In-edge sources of `v` with multiplicity: each non-loop in-edge
    /// contributes its source once and `v` itself appears `loop_count(v)`
    /// times. Sorted in canonical vertex order. Panics on an unknown vertex.
    pub fn in_edges(&self, v: &VertexTag) -> Vec<VertexTag> {
        assert!(self.contains_vertex(v), "unknown vertex {v}");
        let mut sources: Vec<VertexTag> = self.in_sources(v).to_vec();
        sources.extend(std::iter::repeat_n(v.clone(), self.loop_count(v)));
        sources.sort();
        sources
    }

    /// True iff `v` receives at least one edge (loops count).
    pub fn has_incoming(&self, v: &VertexTag) -> bool {
        self.loop_count(v) > 0 || !self.in_sources(v).is_empty()
    }

    /// Checks every structural invariant; returns one message per violation,
    /// each naming the offending vertex or edge. An empty list means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (src, dst) in &self.edges {
            if src == dst {
                violations.push(format!(
                    "edge ({src}, {dst}): loop must use loop_count, not the edge set"
                ));
                continue;
            }
            if !self.contains_vertex(src) {
                violations.push(format!("edge ({src}, {dst}): unknown source vertex"));
            }
            if !self.contains_vertex(dst) {
                violations.push(format!("edge ({src}, {dst}): unknown range vertex"));
            }
        }
        for v in self.loops.keys() {
            if !self.contains_vertex(v) {
                violations.push(format!("loop count on unknown vertex {v}"));
            }
        }
        for v in &self.tail_anchors {
            if !self.contains_vertex(v) {
                violations.push(format!("tail anchor {v} is not a vertex"));
            }
        }
        violations
    }
}

/// Builder for [`Graph`]; the result is immutable. Nothing is validated at
/// build time, so invalid data can be constructed and then reported by
/// [`Graph::validate`].
#[derive(Default, Clone)]
pub struct GraphBuilder {
    vertices: BTreeSet<VertexTag>,
    edges: BTreeSet<(VertexTag, VertexTag)>,
    loops: BTreeMap<VertexTag, usize>,
    tail_anchors: BTreeSet<VertexTag>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, tag: VertexTag) -> &mut Self {
        self.vertices.insert(tag);
        self
    }

    pub fn add_edge(&mut self, src: VertexTag, dst: VertexTag) -> &mut Self {
        self.edges.insert((src, dst));
        self
    }

    pub fn set_loops(&mut self, v: VertexTag, count: usize) -> &mut Self {
        if count == 0 {
            self.loops.remove(&v);
        } else {
            self.loops.insert(v, count);
        }
        self
    }

    pub fn mark_tail_anchor(&mut self, v: VertexTag) -> &mut Self {
        self.tail_anchors.insert(v);
        self
    }

    pub fn build(self) -> Graph {
        let mut incoming: BTreeMap<VertexTag, Vec<VertexTag>> = BTreeMap::new();
        for (src, dst) in &self.edges {
            incoming.entry(dst.clone()).or_default().push(src.clone());
        }
        // BTreeSet iteration sorts by (src, dst), so each list is sorted
        Graph {
            vertices: self.vertices,
            edges: self.edges,
            loops: self.loops,
            tail_anchors: self.tail_anchors,
            incoming,
        }
    }
}

/// Diagnoses whether `map` is an automorphism of `g`; `Ok` means it is.
pub fn check_automorphism(g: &Graph, map: &BTreeMap<VertexTag, VertexTag>) -> Result<(), String> {
    if map.len() != g.vertex_count() {
        return Err(format!(
            "map covers {} of {} vertices",
            map.len(),
            g.vertex_count()
        ));
    }
    let mut image = BTreeSet::new();
    for (v, w) in map {
        if !g.contains_vertex(v) {
            return Err(format!("map defined on unknown vertex {v}"));
        }
        if !g.contains_vertex(w) {
            return Err(format!("image {w} of {v} is not a vertex"));
        }
        if !image.insert(w.clone()) {
            return Err(format!("image {w} is hit twice (not a bijection)"));
        }
    }
    // bijectivity + forward edge preservation imply the reverse direction,
    // because the induced map on the finite edge set is injective
    for (src, dst) in g.edges() {
        let (a, b) = (&map[src], &map[dst]);
        if a == b {
            return Err(format!(
                "edge ({src}, {dst}) collapses to the single vertex {a}"
            ));
        }
        if !g.has_edge(a, b) {
            return Err(format!("edge ({src}, {dst}) has no image edge ({a}, {b})"));
        }
    }
    for v in g.vertices() {
        let w = &map[v];
        if g.loop_count(v) != g.loop_count(w) {
            return Err(format!(
                "loop count {} at {v} but {} at image {w}",
                g.loop_count(v),
                g.loop_count(w)
            ));
        }
        if g.tail_anchors().contains(v) != g.tail_anchors().contains(w) {
            return Err(format!("tail anchor flag differs between {v} and {w}"));
        }
    }
    Ok(())
}

/// True iff `map` is a bijective, edge-reflecting, loop- and tail-preserving
/// self-map of `g`.
pub fn is_automorphism(g: &Graph, map: &BTreeMap<VertexTag, VertexTag>) -> bool {
    check_automorphism(g, map).is_ok()
}

/// A graph homomorphism: a total vertex map carrying every edge of the
/// source onto an edge (or loop, when the endpoints collide) of the target,
/// and tail anchors onto tail anchors.
#[derive(Clone, Debug)]
pub struct GraphHom {
    source: Graph,
    target: Graph,
    vertex_map: BTreeMap<VertexTag, VertexTag>,
}

impl GraphHom {
    pub fn new(
        source: &Graph,
        target: &Graph,
        vertex_map: BTreeMap<VertexTag, VertexTag>,
    ) -> Result<Self, GraphError> {
        for v in source.vertices() {
            let Some(w) = vertex_map.get(v) else {
                return Err(GraphError::NotHomomorphism(format!(
                    "vertex {v} is unmapped"
                )));
            };
            if !target.contains_vertex(w) {
                return Err(GraphError::NotHomomorphism(format!(
                    "image {w} of {v} is not a target vertex"
                )));
            }
        }
        for (src, dst) in source.edges() {
            let (a, b) = (&vertex_map[src], &vertex_map[dst]);
            let ok = if a == b {
                target.loop_count(a) > 0
            } else {
                target.has_edge(a, b)
            };
            if !ok {
                return Err(GraphError::NotHomomorphism(format!(
                    "edge ({src}, {dst}) has no image edge ({a}, {b})"
                )));
            }
        }
        for v in source.vertices() {
            if source.loop_count(v) > 0 && target.loop_count(&vertex_map[v]) == 0 {
                return Err(GraphError::NotHomomorphism(format!(
                    "loop at {v} has no image loop at {}",
                    vertex_map[v]
                )));
            }
        }
        for v in source.tail_anchors() {
            if !target.tail_anchors().contains(&vertex_map[v]) {
                return Err(GraphError::NotHomomorphism(format!(
                    "tail anchor {v} must map to a tail anchor, got {}",
                    vertex_map[v]
                )));
            }
        }
        Ok(GraphHom {
            source: source.clone(),
            target: target.clone(),
            vertex_map,
        })
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexTag, VertexTag> {
        &self.vertex_map
    }

    pub fn apply(&self, v: &VertexTag) -> &VertexTag {
        &self.vertex_map[v]
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &GraphHom) -> Result<GraphHom, GraphError> {
        if other.target != self.source {
            return Err(GraphError::CompositionMismatch);
        }
        let map = other
            .vertex_map
            .iter()
            .map(|(v, w)| (v.clone(), self.vertex_map[w].clone()))
            .collect();
        GraphHom::new(&other.source, &self.target, map)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.vertex_map.iter().all(|(v, w)| v == w)
    }
}

/// A graph automorphism together with its inverse vertex map.
#[derive(Clone, Debug)]
pub struct GraphAut {
    hom: GraphHom,
    inverse_map: BTreeMap<VertexTag, VertexTag>,
}

impl GraphAut {
    pub fn new(graph: &Graph, map: BTreeMap<VertexTag, VertexTag>) -> Result<Self, GraphError> {
        check_automorphism(graph, &map).map_err(GraphError::NotAutomorphism)?;
        let inverse_map = map.iter().map(|(v, w)| (w.clone(), v.clone())).collect();
        let hom = GraphHom::new(graph, graph, map)?;
        Ok(GraphAut { hom, inverse_map })
    }

    pub fn identity(graph: &Graph) -> Self {
        let map: BTreeMap<_, _> = graph
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        Self::new(graph, map).expect("identity is always an automorphism")
    }

    pub fn graph(&self) -> &Graph {
        self.hom.source()
    }

    pub fn hom(&self) -> &GraphHom {
        &self.hom
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexTag, VertexTag> {
        self.hom.vertex_map()
    }

    pub fn inverse_map(&self) -> &BTreeMap<VertexTag, VertexTag> {
        &self.inverse_map
    }

    pub fn apply(&self, v: &VertexTag) -> &VertexTag {
        self.hom.apply(v)
    }

    pub fn apply_inverse(&self, v: &VertexTag) -> &VertexTag {
        &self.inverse_map[v]
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &GraphAut) -> Result<GraphAut, GraphError> {
        let hom = self.hom.compose(&other.hom)?;
        Ok(GraphAut {
            inverse_map: hom
                .vertex_map()
                .iter()
                .map(|(v, w)| (w.clone(), v.clone()))
                .collect(),
            hom,
        })
    }
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    group_spec: Option<String>,
    vertices: Vec<VertexDoc>,
    edges: Vec<[usize; 2]>,
    loops: BTreeMap<String, usize>,
    tails: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
enum VertexDoc {
    Element { coords: Vec<i64> },
    Splitter { pair: [Vec<i64>; 2], slot: u8 },
    RelU { pair: [Vec<i64>; 2] },
    SumU { coords: Vec<i64> },
    Tail { pair: [Vec<i64>; 2], level: u32 },
    Plain { id: String },
}

fn schema_err(path: impl Into<String>, msg: impl Into<String>) -> GraphError {
    GraphError::Schema {
        path: path.into(),
        msg: msg.into(),
    }
}

fn coords_to_doc(e: &GroupElement, path: &str) -> Result<Vec<i64>, GraphError> {
    e.coords()
        .iter()
        .map(|c| {
            c.to_i64().ok_or_else(|| {
                schema_err(path, format!("coordinate {c} exceeds the document range"))
            })
        })
        .collect()
}

fn pair_to_doc(p: &PairKey, path: &str) -> Result<[Vec<i64>; 2], GraphError> {
    Ok([
        coords_to_doc(p.first(), path)?,
        coords_to_doc(p.second(), path)?,
    ])
}

/// The group whose elements tag this graph's vertices, if any.
pub fn generating_group(g: &Graph) -> Option<FgAbelianGroup> {
    g.vertices().iter().find_map(|v| match v {
        VertexTag::Element(a) | VertexTag::SumU(a) => Some(a.group().clone()),
        VertexTag::Splitter { pair, .. } | VertexTag::RelU(pair) | VertexTag::Tail { pair, .. } => {
            Some(pair.first().group().clone())
        }
        VertexTag::Plain(_) => None,
    })
}

/// Serializes a graph to its JSON document. Vertices appear in canonical
/// order; edges, loops and tails refer to them by index.
pub fn to_json(g: &Graph) -> Result<serde_json::Value, GraphError> {
    let order: Vec<&VertexTag> = g.vertices().iter().collect();
    let index: BTreeMap<&VertexTag, usize> =
        order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut vertices = Vec::with_capacity(order.len());
    for (i, v) in order.iter().enumerate() {
        let path = format!("vertices[{i}]");
        vertices.push(match v {
            VertexTag::Element(a) => VertexDoc::Element {
                coords: coords_to_doc(a, &path)?,
            },
            VertexTag::Splitter { pair, slot } => VertexDoc::Splitter {
                pair: pair_to_doc(pair, &path)?,
                slot: *slot,
            },
            VertexTag::RelU(pair) => VertexDoc::RelU {
                pair: pair_to_doc(pair, &path)?,
            },
            VertexTag::SumU(c) => VertexDoc::SumU {
                coords: coords_to_doc(c, &path)?,
            },
            VertexTag::Tail { pair, level } => VertexDoc::Tail {
                pair: pair_to_doc(pair, &path)?,
                level: *level,
            },
            VertexTag::Plain(id) => VertexDoc::Plain { id: id.clone() },
        });
    }
    let doc = GraphDoc {
        group_spec: generating_group(g).map(|grp| grp.to_string()),
        vertices,
        edges: g
            .edges()
            .iter()
            .map(|(s, d)| [index[s], index[d]])
            .collect(),
        loops: g
            .loops()
            .iter()
            .map(|(v, c)| (index[v].to_string(), *c))
            .collect(),
        tails: g.tail_anchors().iter().map(|v| index[v]).collect(),
    };
    serde_json::to_value(&doc).map_err(|e| schema_err("$", e.to_string()))
}

pub fn to_json_string(g: &Graph) -> Result<String, GraphError> {
    Ok(to_json(g)?.to_string())
}

/// Reads a graph back from its JSON document, reporting violations with the
/// JSON path that caused them.
pub fn from_json(value: &serde_json::Value) -> Result<Graph, GraphError> {
    let deserializer = value.clone();
    let doc: GraphDoc = serde_path_to_error::deserialize(deserializer)
        .map_err(|e| schema_err(e.path().to_string(), e.inner().to_string()))?;
    from_doc(doc)
}

pub fn from_json_str(text: &str) -> Result<Graph, GraphError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: GraphDoc = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| schema_err(e.path().to_string(), e.inner().to_string()))?;
    from_doc(doc)
}

fn from_doc(doc: GraphDoc) -> Result<Graph, GraphError> {
    let group = match &doc.group_spec {
        Some(spec) => {
            Some(parse_group_spec(spec).map_err(|e| schema_err("group_spec", e.to_string()))?)
        }
        None => None,
    };
    let element = |coords: &[i64], path: &str| -> Result<GroupElement, GraphError> {
        let group = group.as_ref().ok_or_else(|| {
            schema_err(path, "group-tagged vertex requires a top-level group_spec")
        })?;
        if coords.len() != group.num_generators() {
            return Err(schema_err(
                path,
                format!(
                    "expected {} coordinates for {group}, got {}",
                    group.num_generators(),
                    coords.len()
                ),
            ));
        }
        Ok(group.element(coords.iter().map(|&c| BigInt::from(c)).collect()))
    };
    let pair = |p: &[Vec<i64>; 2], path: &str| -> Result<PairKey, GraphError> {
        Ok(PairKey::new(element(&p[0], path)?, element(&p[1], path)?))
    };

    let mut tags: Vec<VertexTag> = Vec::with_capacity(doc.vertices.len());
    for (i, v) in doc.vertices.iter().enumerate() {
        let path = format!("vertices[{i}]");
        let tag = match v {
            VertexDoc::Element { coords } => VertexTag::Element(element(coords, &path)?),
            VertexDoc::Splitter { pair: p, slot } => {
                if *slot > 1 {
                    return Err(schema_err(path, format!("slot must be 0 or 1, got {slot}")));
                }
                VertexTag::Splitter {
                    pair: pair(p, &path)?,
                    slot: *slot,
                }
            }
            VertexDoc::RelU { pair: p } => VertexTag::RelU(pair(p, &path)?),
            VertexDoc::SumU { coords } => VertexTag::SumU(element(coords, &path)?),
            VertexDoc::Tail { pair: p, level } => {
                if *level == 0 {
                    return Err(schema_err(path, "tail level must be at least 1"));
                }
                VertexTag::Tail {
                    pair: pair(p, &path)?,
                    level: *level,
                }
            }
            VertexDoc::Plain { id } => VertexTag::Plain(id.clone()),
        };
        if tags.contains(&tag) {
            return Err(schema_err(path, format!("duplicate vertex tag {tag}")));
        }
        tags.push(tag);
    }

    let vertex_at = |idx: usize, path: String| -> Result<VertexTag, GraphError> {
        tags.get(idx)
            .cloned()
            .ok_or_else(|| schema_err(path, format!("vertex index {idx} out of range")))
    };

    let mut builder = GraphBuilder::new();
    for tag in &tags {
        builder.add_vertex(tag.clone());
    }
    for (i, [s, d]) in doc.edges.iter().enumerate() {
        let src = vertex_at(*s, format!("edges[{i}]"))?;
        let dst = vertex_at(*d, format!("edges[{i}]"))?;
        builder.add_edge(src, dst);
    }
    for (key, count) in &doc.loops {
        let path = format!("loops.{key}");
        let idx: usize = key
            .parse()
            .map_err(|_| schema_err(path.clone(), "key must be a vertex index"))?;
        builder.set_loops(vertex_at(idx, path)?, *count);
    }
    for (i, t) in doc.tails.iter().enumerate() {
        builder.mark_tail_anchor(vertex_at(*t, format!("tails[{i}]"))?);
    }
    Ok(builder.build())
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

/// Renders the graph in DOT: one node per vertex labeled by its tag, one
/// arrow per edge, loops repeated `loop_count` times, tail anchors drawn
/// with doubled borders.
pub fn to_dot(g: &Graph) -> String {
    let order: Vec<&VertexTag> = g.vertices().iter().collect();
    let index: BTreeMap<&VertexTag, usize> =
        order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut out = String::from("digraph g {\n");
    for (i, v) in order.iter().enumerate() {
        let label = v.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        if g.tail_anchors().contains(v) {
            out.push_str(&format!("  n{i} [label=\"{label}\", peripheries=2];\n"));
        } else {
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
    }
    for (src, dst) in g.edges() {
        out.push_str(&format!("  n{} -> n{};\n", index[src], index[dst]));
    }
    for (v, count) in g.loops() {
        for _ in 0..*count {
            out.push_str(&format!("  n{0} -> n{0};\n", index[v]));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(id: &str) -> VertexTag {
        VertexTag::Plain(id.into())
    }

    fn loop_vertex_graph() -> Graph {
        let mut b = GraphBuilder::new();
        b.add_vertex(plain("s"));
        b.set_loops(plain("s"), 1);
        b.build()
    }

    #[test]
    fn validate_accepts_loops_as_counts() {
        assert!(loop_vertex_graph().validate().is_empty());
    }

    #[test]
    fn validate_rejects_self_edge_in_edge_set() {
        let mut b = GraphBuilder::new();
        b.add_vertex(plain("v"));
        b.add_edge(plain("v"), plain("v"));
        let violations = b.build().validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("loop must use loop_count"));
    }

    #[test]
    fn validate_names_unknown_endpoints() {
        let mut b = GraphBuilder::new();
        b.add_vertex(plain("a"));
        b.add_edge(plain("a"), plain("ghost"));
        b.mark_tail_anchor(plain("phantom"));
        let violations = b.build().validate();
        assert_eq!(violations.len(), 2);
        assert!(violations.iter().any(|v| v.contains("ghost")));
        assert!(violations.iter().any(|v| v.contains("phantom")));
    }

    #[test]
    fn in_edges_mixes_sources_and_loops() {
        // one edge a -> u plus two loops at u, as in the shared sum gadget
        let mut b = GraphBuilder::new();
        b.add_vertex(plain("a"));
        b.add_vertex(plain("u"));
        b.add_edge(plain("a"), plain("u"));
        b.set_loops(plain("u"), 2);
        let g = b.build();
        assert_eq!(
            g.in_edges(&plain("u")),
            vec![plain("a"), plain("u"), plain("u")]
        );
        assert_eq!(g.in_edges(&plain("a")), Vec::<VertexTag>::new());
        assert!(g.has_incoming(&plain("u")));
        assert!(!g.has_incoming(&plain("a")));
    }

    #[test]
    fn automorphism_checks() {
        let mut b = GraphBuilder::new();
        b.add_vertex(plain("a"));
        b.add_vertex(plain("b"));
        b.add_vertex(plain("c"));
        b.set_loops(plain("c"), 1);
        let g = b.build();

        let id: BTreeMap<_, _> = g
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        assert!(is_automorphism(&g, &id));

        // swapping the two isolated loopless vertices is fine
        let mut swap = id.clone();
        swap.insert(plain("a"), plain("b"));
        swap.insert(plain("b"), plain("a"));
        assert!(is_automorphism(&g, &swap));

        // sending the looped vertex to a loopless one is not
        let mut bad = id.clone();
        bad.insert(plain("c"), plain("a"));
        bad.insert(plain("a"), plain("c"));
        assert!(!is_automorphism(&g, &bad));
    }

    #[test]
    fn empty_graph_document() {
        let g = GraphBuilder::new().build();
        let value = to_json(&g).unwrap();
        assert_eq!(
            value,
            serde_json::json!({"vertices": [], "edges": [], "loops": {}, "tails": []})
        );
        assert_eq!(from_json(&value).unwrap(), g);
    }

    #[test]
    fn deserialize_rejects_out_of_range_edge() {
        let doc = serde_json::json!({
            "vertices": [{"tag": "plain", "id": "a"}],
            "edges": [[0, 5]],
            "loops": {},
            "tails": []
        });
        match from_json(&doc) {
            Err(GraphError::Schema { path, msg }) => {
                assert_eq!(path, "edges[0]");
                assert!(msg.contains("out of range"));
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn deserialize_requires_group_for_element_tags() {
        let doc = serde_json::json!({
            "vertices": [{"tag": "element", "coords": [0]}],
            "edges": [],
            "loops": {},
            "tails": []
        });
        assert!(matches!(from_json(&doc), Err(GraphError::Schema { .. })));
    }

    #[test]
    fn dot_renders_loops_repeatedly() {
        let mut b = GraphBuilder::new();
        b.add_vertex(plain("a"));
        b.add_vertex(plain("u"));
        b.add_edge(plain("a"), plain("u"));
        b.set_loops(plain("u"), 2);
        let dot = to_dot(&b.build());
        assert_eq!(dot.matches("n1 -> n1;").count(), 2);
        assert_eq!(dot.matches("->").count(), 3);
    }

    #[test]
    fn dot_single_loop_vertex() {
        let dot = to_dot(&loop_vertex_graph());
        assert!(dot.contains("label=\"s\""));
        assert_eq!(dot.matches("n0 -> n0;").count(), 1);
    }
}
