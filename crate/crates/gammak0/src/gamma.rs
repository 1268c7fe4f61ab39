//! The group-to-graph construction: one vertex per group element, a relation
//! gadget per unordered pair of elements, shared sum vertices with two loops,
//! and a declared killing tail on every relation vertex. The assignment is
//! functorial, homomorphisms of groups become homomorphisms of graphs, and
//! group automorphisms lift to graph automorphisms inducing themselves on K0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::abelian::{FgAbelianGroup, GroupAut, GroupElement, GroupHom};
use crate::graph::{generating_group, Graph, GraphAut, GraphBuilder, GraphHom, PairKey, VertexTag};
use crate::ktheory::{self, K0Mode, K0Result};

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("the group {0} is infinite; pass a window to build an experimental cutout")]
    InfiniteGroup(FgAbelianGroup),
    #[error("graph was not produced by this construction: {0}")]
    NotGammaGraph(String),
    #[error("homomorphism does not match the graphs' groups: {0}")]
    GroupMismatch(String),
    #[error(transparent)]
    Group(#[from] crate::abelian::GroupError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Ktheory(#[from] crate::ktheory::KtheoryError),
}

/// Builds the element graph of a finite group.
///
/// Vertices: an element vertex and a doubly-looped sum vertex per group
/// element, plus two splitters and one tail-anchored relation vertex per
/// unordered pair `{a, b}` (the `a = b` case included). Edges feed each
/// element into its sum vertex, each pair through its splitters into its
/// relation vertex, and the sum vertex of `a + b` into the same relation
/// vertex. The core has `2n + 3n(n + 1)/2` vertices for a group of order `n`.
pub fn build(group: &FgAbelianGroup) -> Result<Graph, GammaError> {
    if !group.is_finite() {
        return Err(GammaError::InfiniteGroup(group.clone()));
    }
    let elements = group.enumerate_elements()?;
    Ok(build_from_elements(&elements, false))
}

/// Experimental cutout for groups with free part: element vertices for the
/// window (free coordinates in `[-window, window]`) and relation gadgets
/// only for pairs whose sum stays inside. Its K0 is whatever it is; callers
/// are expected to verify it rather than assume it.
pub fn build_windowed(group: &FgAbelianGroup, window: u64) -> Result<Graph, GammaError> {
    let elements = group.enumerate_elements_windowed(window)?;
    Ok(build_from_elements(&elements, true))
}

fn build_from_elements(elements: &[GroupElement], windowed: bool) -> Graph {
    let inside: BTreeSet<&GroupElement> = elements.iter().collect();
    let mut builder = GraphBuilder::new();
    for c in elements {
        builder.add_vertex(VertexTag::Element(c.clone()));
        let sum = VertexTag::SumU(c.clone());
        builder.add_vertex(sum.clone());
        builder.add_edge(VertexTag::Element(c.clone()), sum.clone());
        builder.set_loops(sum, 2);
    }
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i..] {
            let c = a.add(b);
            if windowed && !inside.contains(&c) {
                continue;
            }
            let pair = PairKey::new(a.clone(), b.clone());
            let w0 = VertexTag::Splitter {
                pair: pair.clone(),
                slot: 0,
            };
            let w1 = VertexTag::Splitter {
                pair: pair.clone(),
                slot: 1,
            };
            let rel = VertexTag::RelU(pair);
            builder.add_vertex(w0.clone());
            builder.add_vertex(w1.clone());
            builder.add_vertex(rel.clone());
            builder.add_edge(VertexTag::Element(a.clone()), w0.clone());
            builder.add_edge(VertexTag::Element(b.clone()), w1.clone());
            builder.add_edge(w0, rel.clone());
            builder.add_edge(w1, rel.clone());
            builder.add_edge(VertexTag::SumU(c), rel.clone());
            builder.mark_tail_anchor(rel);
        }
    }
    builder.build()
}

/// Maps a group homomorphism to a graph homomorphism between built graphs.
///
/// Element and sum vertices follow the homomorphism, relation and tail
/// vertices follow the image pair, and a splitter follows its anchor: the
/// splitter anchored at `v_a` goes to the target splitter anchored at the
/// image of `a`. When the image pair collapses, slots are kept as they are
/// (slot 0 of the canonically smaller source element to slot 0).
pub fn apply_hom(
    phi: &GroupHom,
    source_graph: &Graph,
    target_graph: &Graph,
) -> Result<GraphHom, GammaError> {
    let source_group = generating_group(source_graph)
        .ok_or_else(|| GammaError::NotGammaGraph("source graph has no group data".into()))?;
    let target_group = generating_group(target_graph)
        .ok_or_else(|| GammaError::NotGammaGraph("target graph has no group data".into()))?;
    if *phi.source() != source_group {
        return Err(GammaError::GroupMismatch(format!(
            "homomorphism starts at {}, graph was built from {}",
            phi.source(),
            source_group
        )));
    }
    if *phi.target() != target_group {
        return Err(GammaError::GroupMismatch(format!(
            "homomorphism ends at {}, graph was built from {}",
            phi.target(),
            target_group
        )));
    }

    let map_pair = |pair: &PairKey| PairKey::new(phi.apply(pair.first()), phi.apply(pair.second()));
    let mut vertex_map: BTreeMap<VertexTag, VertexTag> = BTreeMap::new();
    for v in source_graph.vertices() {
        let image = match v {
            VertexTag::Element(a) => VertexTag::Element(phi.apply(a)),
            VertexTag::SumU(c) => VertexTag::SumU(phi.apply(c)),
            VertexTag::RelU(pair) => VertexTag::RelU(map_pair(pair)),
            VertexTag::Splitter { pair, slot } => {
                let first = phi.apply(pair.first());
                let second = phi.apply(pair.second());
                let image_pair = PairKey::new(first.clone(), second.clone());
                let slot = if first == second {
                    *slot
                } else {
                    let anchor = if *slot == 0 { &first } else { &second };
                    u8::from(anchor != image_pair.first())
                };
                VertexTag::Splitter {
                    pair: image_pair,
                    slot,
                }
            }
            VertexTag::Tail { pair, level } => VertexTag::Tail {
                pair: map_pair(pair),
                level: *level,
            },
            VertexTag::Plain(id) => {
                return Err(GammaError::NotGammaGraph(format!(
                    "plain vertex {id} cannot be mapped"
                )))
            }
        };
        vertex_map.insert(v.clone(), image);
    }
    Ok(GraphHom::new(source_graph, target_graph, vertex_map)?)
}

/// Lifts a group automorphism to a graph automorphism of the built graph.
pub fn apply_aut(phi: &GroupAut, graph: &Graph) -> Result<GraphAut, GammaError> {
    let hom = apply_hom(phi.hom(), graph, graph)?;
    Ok(GraphAut::new(graph, hom.vertex_map().clone())?)
}

/// One verification check: a name, what was expected, what was seen.
#[derive(Clone, Debug)]
pub struct ReportEntry {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

/// A deterministic list of checks; renders one line per check.
#[derive(Clone, Debug, Default)]
pub struct Report {
    entries: Vec<ReportEntry>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
        passed: bool,
    ) {
        self.entries.push(ReportEntry {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            passed,
        });
    }

    pub fn check_eq<T: PartialEq + fmt::Display>(
        &mut self,
        name: impl Into<String>,
        expected: T,
        actual: T,
    ) {
        let passed = expected == actual;
        self.push(name, expected, actual, passed);
    }

    pub fn entries(&self) -> &[ReportEntry] {
        &self.entries
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn merge(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.passed { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{status} {} expected={} actual={}",
                e.name, e.expected, e.actual
            )?;
        }
        Ok(())
    }
}

/// Checks that K0 of the built graph realizes the group exactly and that the
/// assignment element-vertex-class to element extends to an isomorphism:
/// invariant factors equal, the vertex classes additive over all pairs,
/// generating, and matching the group order.
pub fn verify_realization(group: &FgAbelianGroup) -> Result<Report, GammaError> {
    let graph = build(group)?;
    let k = ktheory::k0(&graph, K0Mode::TailEliminated)?;
    Ok(realization_report(group, &graph, &k))
}

/// The realization checks against a precomputed K0 of the built graph.
pub fn realization_report(group: &FgAbelianGroup, graph: &Graph, k: &K0Result) -> Report {
    let mut report = Report::new();
    report.check_eq("gamma.valid", 0, graph.validate().len());
    report.check_eq(
        "k0.invariant_factors",
        group.to_string(),
        k.group().to_string(),
    );

    let elements = group
        .enumerate_elements()
        .expect("built graphs come from finite groups");
    let class = |a: &GroupElement| k.class_of(&VertexTag::Element(a.clone())).clone();

    let total = elements.len() * (elements.len() + 1) / 2;
    let mut additive = 0usize;
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i..] {
            if class(a).add(&class(b)) == class(&a.add(b)) {
                additive += 1;
            }
        }
    }
    report.check_eq(
        "iso.additive_on_pairs",
        format!("{total}/{total}"),
        format!("{additive}/{total}"),
    );

    // classes generate: close the vertex classes under addition
    let generated = match k.group().order() {
        Some(order) => {
            let mut closure: BTreeSet<GroupElement> = BTreeSet::new();
            closure.insert(k.group().zero());
            let generators: Vec<GroupElement> = elements.iter().map(&class).collect();
            loop {
                let mut grew = false;
                let snapshot: Vec<GroupElement> = closure.iter().cloned().collect();
                for x in &snapshot {
                    for g in &generators {
                        if closure.insert(x.add(g)) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            report.check_eq(
                "iso.classes_generate",
                order.to_string(),
                closure.len().to_string(),
            );
            true
        }
        None => {
            report.push("iso.classes_generate", "finite K0", "infinite K0", false);
            false
        }
    };

    let actual_order = if generated {
        k.group()
            .order()
            .map_or("infinite".to_string(), |o| o.to_string())
    } else {
        "infinite".to_string()
    };
    let expected_order = group
        .order()
        .map_or("infinite".to_string(), |o| o.to_string());
    report.check_eq("iso.orders_match", expected_order, actual_order);
    report
}

/// Checks the in-K0 identities the relation gadgets are built for: every
/// relation vertex class vanishes, every sum vertex class is the negative of
/// its element class, the two gadget equations hold verbatim, splitter
/// classes equal their anchors, and the element classes add.
pub fn verify_k0_relations(group: &FgAbelianGroup) -> Result<Report, GammaError> {
    let graph = build(group)?;
    let k = ktheory::k0(&graph, K0Mode::TailEliminated)?;
    Ok(relations_report(&graph, &k))
}

/// The relation checks against a precomputed K0 of the built graph.
pub fn relations_report(graph: &Graph, k: &K0Result) -> Report {
    let mut report = Report::new();
    let mut rel_vanishes = (0usize, 0usize);
    let mut gadget_sum = (0usize, 0usize);
    let mut splitters_match = (0usize, 0usize);
    let mut sum_negates = (0usize, 0usize);
    let mut sum_equation = (0usize, 0usize);
    let mut additive = (0usize, 0usize);

    for v in graph.vertices() {
        match v {
            VertexTag::RelU(pair) => {
                rel_vanishes.1 += 1;
                if k.class_of(v).is_zero() {
                    rel_vanishes.0 += 1;
                }

                let a = k.class_of(&VertexTag::Element(pair.first().clone()));
                let b = k.class_of(&VertexTag::Element(pair.second().clone()));
                let c = pair.first().add(pair.second());
                let sum_u = k.class_of(&VertexTag::SumU(c.clone()));
                gadget_sum.1 += 1;
                if *k.class_of(v) == a.add(b).add(sum_u) {
                    gadget_sum.0 += 1;
                }

                additive.1 += 1;
                if a.add(b) == *k.class_of(&VertexTag::Element(c)) {
                    additive.0 += 1;
                }
            }
            VertexTag::Splitter { pair, slot } => {
                let anchor = if *slot == 0 {
                    pair.first()
                } else {
                    pair.second()
                };
                splitters_match.1 += 1;
                if k.class_of(v) == k.class_of(&VertexTag::Element(anchor.clone())) {
                    splitters_match.0 += 1;
                }
            }
            VertexTag::SumU(c) => {
                let vc = k.class_of(&VertexTag::Element(c.clone()));
                sum_negates.1 += 1;
                if *k.class_of(v) == vc.neg() {
                    sum_negates.0 += 1;
                }
                sum_equation.1 += 1;
                let two = num_bigint::BigInt::from(2);
                if *k.class_of(v) == vc.add(&k.class_of(v).scalar_mul(&two)) {
                    sum_equation.0 += 1;
                }
            }
            _ => {}
        }
    }

    let mut entry = |name: &str, (ok, total): (usize, usize)| {
        report.check_eq(name, format!("{total}/{total}"), format!("{ok}/{total}"));
    };
    entry("relations.rel_u_vanishes", rel_vanishes);
    entry("relations.gadget_equation", gadget_sum);
    entry("relations.sum_equation", sum_equation);
    entry("relations.sum_u_negates_element", sum_negates);
    entry("relations.splitters_match_anchors", splitters_match);
    entry("relations.element_classes_add", additive);
    report
}

/// Lifts `phi` to the built graph, verifies the lift, descends it back to K0
/// and checks it equals `phi` on every element-vertex class.
pub fn verify_lifting(group: &FgAbelianGroup, phi: &GroupAut) -> Result<Report, GammaError> {
    let graph = build(group)?;
    let k = ktheory::k0(&graph, K0Mode::TailEliminated)?;
    Ok(lifting_report(&graph, &k, phi))
}

/// The lifting checks against a precomputed K0 of the built graph.
pub fn lifting_report(graph: &Graph, k: &K0Result, phi: &GroupAut) -> Report {
    let label = phi.hom().brief();
    let mut report = Report::new();
    let lift = match apply_aut(phi, graph) {
        Ok(lift) => {
            report.push(
                format!("aut({label}).lift.graph_automorphism"),
                "automorphism",
                "automorphism",
                true,
            );
            lift
        }
        Err(e) => {
            report.push(
                format!("aut({label}).lift.graph_automorphism"),
                "automorphism",
                e,
                false,
            );
            return report;
        }
    };
    let induced = match ktheory::induced_automorphism(graph, &lift, k) {
        Ok(induced) => {
            report.push(
                format!("aut({label}).induced.commuting_square"),
                "exact",
                "exact",
                true,
            );
            induced
        }
        Err(e) => {
            report.push(
                format!("aut({label}).induced.commuting_square"),
                "exact",
                e,
                false,
            );
            return report;
        }
    };

    let elements = phi
        .group()
        .enumerate_elements()
        .expect("built graphs come from finite groups");
    let total = elements.len();
    let mut matched = 0usize;
    for a in &elements {
        let lhs = k.class_of(&VertexTag::Element(phi.apply(a)));
        let rhs = induced.apply(k.class_of(&VertexTag::Element(a.clone())));
        if *lhs == rhs {
            matched += 1;
        }
    }
    report.check_eq(
        format!("aut({label}).induced.equals_phi"),
        format!("{total}/{total}"),
        format!("{matched}/{total}"),
    );
    report
}

/// Checks the functor laws on the built graph: the identity maps to the
/// identity, and composites map to composites, tag by tag, over the sample.
pub fn verify_functor_laws(
    group: &FgAbelianGroup,
    pairs: &[(GroupAut, GroupAut)],
) -> Result<Report, GammaError> {
    let graph = build(group)?;
    let mut report = Report::new();

    let id_lift = apply_aut(&GroupAut::identity(group), &graph)?;
    report.check_eq(
        "functor.identity_law",
        "identity".to_string(),
        if id_lift.hom().is_identity() {
            "identity".to_string()
        } else {
            "differs".to_string()
        },
    );

    for (phi, psi) in pairs {
        let name = format!(
            "functor.composition_law({} after {})",
            phi.hom().brief(),
            psi.hom().brief()
        );
        let composite = match phi.compose(psi) {
            Ok(c) => c,
            Err(e) => {
                report.push(name, "composable", e, false);
                continue;
            }
        };
        let lhs = apply_aut(&composite, &graph)?;
        let rhs = apply_aut(phi, &graph)?.compose(&apply_aut(psi, &graph)?)?;
        let differences = lhs
            .vertex_map()
            .iter()
            .filter(|(v, w)| rhs.apply(v) != *w)
            .count();
        report.check_eq(
            name,
            "0 differences".to_string(),
            format!("{differences} differences"),
        );
    }
    Ok(report)
}
