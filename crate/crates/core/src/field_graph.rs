//! Field graphs of primitive vector fields and their sink/source skeletons.
//!
//! A [`FieldGraph`] has one vertex per zero of the field (source, sink or
//! saddle) and one directed edge per class of connecting trajectories. The
//! sink skeleton keeps only the sinks and turns every saddle into an edge
//! between its two downstream sinks; the source skeleton does the same
//! upstream.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface_map::{alpha, all_isomorphisms, CombinatorialMap, Dart, MapError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Source,
    Sink,
    Saddle,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Source => "source",
            NodeKind::Sink => "sink",
            NodeKind::Saddle => "saddle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldGraphError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("expected {expected} vertex kinds, got {got}")]
    KindCount { expected: usize, got: usize },
    #[error("expected {expected} tail darts, got {got}")]
    TailCount { expected: usize, got: usize },
    #[error("tail dart {dart} does not belong to edge {edge}")]
    TailNotOnEdge { edge: usize, dart: Dart },
    #[error("induced skeleton embedding is degenerate: {0}")]
    InducedEmbeddingDegenerate(String),
    #[error("skeleton is not connected")]
    NotConnected,
    #[error("field graph is not a saddled triangulation (face {0})")]
    NotSaddledTriangulation(usize),
    #[error("marked {what} {index} out of range")]
    MarkOutOfRange { what: &'static str, index: usize },
}

/// Directed graph of zeros embedded on the surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldGraph {
    map: CombinatorialMap,
    kinds: Vec<NodeKind>,
    tail: Vec<Dart>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZeroCounts {
    #[serde(rename = "U")]
    pub sources: usize,
    #[serde(rename = "I")]
    pub sinks: usize,
    #[serde(rename = "A")]
    pub saddles: usize,
}

impl FieldGraph {
    pub fn new(map: CombinatorialMap, kinds: Vec<NodeKind>, tail: Vec<Dart>) -> Result<Self, FieldGraphError> {
        if kinds.len() != map.num_vertices() {
            return Err(FieldGraphError::KindCount { expected: map.num_vertices(), got: kinds.len() });
        }
        if tail.len() != map.num_edges() {
            return Err(FieldGraphError::TailCount { expected: map.num_edges(), got: tail.len() });
        }
        for (e, &t) in tail.iter().enumerate() {
            if t / 2 != e {
                return Err(FieldGraphError::TailNotOnEdge { edge: e, dart: t });
            }
        }
        Ok(FieldGraph { map, kinds, tail })
    }

    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn kind(&self, v: usize) -> NodeKind {
        self.kinds[v]
    }

    pub fn tails(&self) -> &[Dart] {
        &self.tail
    }

    pub fn is_tail(&self, d: Dart) -> bool {
        self.tail[d / 2] == d
    }

    pub fn tail_vertex(&self, edge: usize) -> usize {
        self.map.vertex_of(self.tail[edge])
    }

    pub fn head_vertex(&self, edge: usize) -> usize {
        self.map.vertex_of(alpha(self.tail[edge]))
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.map.vertex_darts(v).iter().filter(|&&d| self.is_tail(d)).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.map.vertex_darts(v).len() - self.out_degree(v)
    }

    pub fn counts(&self) -> ZeroCounts {
        let mut c = ZeroCounts::default();
        for k in &self.kinds {
            match k {
                NodeKind::Source => c.sources += 1,
                NodeKind::Sink => c.sinks += 1,
                NodeKind::Saddle => c.saddles += 1,
            }
        }
        c
    }

    pub fn genus(&self) -> usize {
        self.map.genus()
    }

    /// Vertices of the given kind, in vertex order.
    pub fn vertices_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = usize> + '_ {
        (0..self.kinds.len()).filter(move |&v| self.kinds[v] == kind)
    }
}

/// One failed condition of a field graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    SameKindEdge { edge: usize, kind: NodeKind },
    SourceWithIncoming { vertex: usize, in_degree: usize },
    SinkWithOutgoing { vertex: usize, out_degree: usize },
    SaddleDegree { vertex: usize, in_degree: usize, out_degree: usize },
    NoSource,
    NoSink,
    PoincareHopf { residual: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SameKindEdge { edge, kind } => write!(f, "edge {edge} joins two {kind} vertices"),
            Violation::SourceWithIncoming { vertex, in_degree } => {
                write!(f, "source {vertex} has in-degree {in_degree}")
            }
            Violation::SinkWithOutgoing { vertex, out_degree } => {
                write!(f, "sink {vertex} has out-degree {out_degree}")
            }
            Violation::SaddleDegree { vertex, in_degree, out_degree } => {
                write!(f, "saddle {vertex} has in/out degree {in_degree}/{out_degree}, expected 2/2")
            }
            Violation::NoSource => f.write_str("no source"),
            Violation::NoSink => f.write_str("no sink"),
            Violation::PoincareHopf { residual } => write!(f, "U + I - A - (2 - 2g) = {residual}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    #[serde(flatten)]
    pub counts: ZeroCounts,
    pub genus: usize,
    pub violations: Vec<Violation>,
}

/// `U + I - A - (2 - 2g)`.
pub fn poincare_hopf_residual(fg: &FieldGraph) -> i64 {
    residual_from_counts(fg.counts(), fg.genus())
}

pub fn residual_from_counts(c: ZeroCounts, genus: usize) -> i64 {
    c.sources as i64 + c.sinks as i64 - c.saddles as i64 - (2 - 2 * genus as i64)
}

/// Checks every saddled-graph condition and reports all failures.
pub fn validate_field_graph(fg: &FieldGraph) -> ValidationReport {
    let mut violations = Vec::new();
    for e in 0..fg.map.num_edges() {
        let (t, h) = (fg.kind(fg.tail_vertex(e)), fg.kind(fg.head_vertex(e)));
        if t == h {
            violations.push(Violation::SameKindEdge { edge: e, kind: t });
        }
    }
    for (v, &kind) in fg.kinds.iter().enumerate() {
        let (i, o) = (fg.in_degree(v), fg.out_degree(v));
        match kind {
            NodeKind::Source if i != 0 => violations.push(Violation::SourceWithIncoming { vertex: v, in_degree: i }),
            NodeKind::Sink if o != 0 => violations.push(Violation::SinkWithOutgoing { vertex: v, out_degree: o }),
            NodeKind::Saddle if i != 2 || o != 2 => {
                violations.push(Violation::SaddleDegree { vertex: v, in_degree: i, out_degree: o })
            }
            _ => {}
        }
    }
    let counts = fg.counts();
    if counts.sources == 0 {
        violations.push(Violation::NoSource);
    }
    if counts.sinks == 0 {
        violations.push(Violation::NoSink);
    }
    let residual = poincare_hopf_residual(fg);
    if residual != 0 {
        violations.push(Violation::PoincareHopf { residual });
    }
    ValidationReport { valid: violations.is_empty(), counts, genus: fg.genus(), violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkeletonRole {
    SinkSkeleton,
    SourceSkeleton,
}

/// Undirected skeleton map (sinks joined through saddles, or sources).
///
/// Marks record zeros that stand in for closed-off periodic orbits: a marked
/// vertex is an orbit acting as a sink, a marked face an orbit acting as a
/// source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonMap {
    pub map: CombinatorialMap,
    pub role: SkeletonRole,
    pub marked_vertices: BTreeSet<usize>,
    pub marked_faces: BTreeSet<usize>,
}

impl SkeletonMap {
    pub fn new(map: CombinatorialMap, role: SkeletonRole) -> Self {
        SkeletonMap { map, role, marked_vertices: BTreeSet::new(), marked_faces: BTreeSet::new() }
    }

    pub fn sink(map: CombinatorialMap) -> Self {
        Self::new(map, SkeletonRole::SinkSkeleton)
    }

    pub fn with_marks(
        map: CombinatorialMap,
        role: SkeletonRole,
        marked_vertices: BTreeSet<usize>,
        marked_faces: BTreeSet<usize>,
    ) -> Result<Self, FieldGraphError> {
        if let Some(&v) = marked_vertices.iter().find(|&&v| v >= map.num_vertices()) {
            return Err(FieldGraphError::MarkOutOfRange { what: "vertex", index: v });
        }
        if let Some(&f) = marked_faces.iter().find(|&&f| f >= map.num_faces()) {
            return Err(FieldGraphError::MarkOutOfRange { what: "face", index: f });
        }
        Ok(SkeletonMap { map, role, marked_vertices, marked_faces })
    }

    pub fn is_marked(&self) -> bool {
        !self.marked_vertices.is_empty() || !self.marked_faces.is_empty()
    }

    /// Per-dart mark colors: bit 0 = vertex marked, bit 1 = face marked.
    pub fn dart_colors(&self) -> Vec<u8> {
        let m = &self.map;
        (0..m.num_darts())
            .map(|d| {
                u8::from(self.marked_vertices.contains(&m.vertex_of(d)))
                    | (u8::from(self.marked_faces.contains(&m.face_of(d))) << 1)
            })
            .collect()
    }

    /// Canonical form including marks. The dartless map encodes its two
    /// possible marks in a trailing byte.
    pub fn canonical_form(&self) -> Vec<u8> {
        let colors = self.dart_colors();
        let mut form = crate::surface_map::canonical_form_colored(&self.map, Some(&colors));
        if self.map.num_darts() == 0 {
            form.push(u8::from(!self.marked_vertices.is_empty()) | (u8::from(!self.marked_faces.is_empty()) << 1));
        }
        form
    }
}

/// Skeleton plus, for each skeleton dart, the field-graph dart it came from
/// (the dart at the sink, or at the source, of the corresponding saddle edge).
#[derive(Debug, Clone)]
pub struct DerivedSkeleton {
    pub skeleton: SkeletonMap,
    pub origin: Vec<Dart>,
    /// Field-graph vertex of each skeleton vertex.
    pub vertex_origin: Vec<usize>,
}

fn derive_skeleton(fg: &FieldGraph, role: SkeletonRole) -> Result<DerivedSkeleton, FieldGraphError> {
    let m = &fg.map;
    let (keep_kind, want_out) = match role {
        SkeletonRole::SinkSkeleton => (NodeKind::Sink, true),
        SkeletonRole::SourceSkeleton => (NodeKind::Source, false),
    };
    let mut origin = Vec::new();
    for x in fg.vertices_of_kind(NodeKind::Saddle) {
        let chosen: Vec<Dart> =
            m.vertex_darts(x).iter().copied().filter(|&d| fg.is_tail(d) == want_out).collect();
        if chosen.len() != 2 {
            return Err(FieldGraphError::InducedEmbeddingDegenerate(format!(
                "saddle {x} has {} {} edges",
                chosen.len(),
                if want_out { "outgoing" } else { "incoming" }
            )));
        }
        for d in chosen {
            let far = alpha(d);
            if fg.kind(m.vertex_of(far)) != keep_kind {
                return Err(FieldGraphError::InducedEmbeddingDegenerate(format!(
                    "saddle {x} connects to a {} where a {keep_kind} was expected",
                    fg.kind(m.vertex_of(far))
                )));
            }
            origin.push(far);
        }
    }
    let keep: Vec<usize> = fg.vertices_of_kind(keep_kind).collect();
    if origin.is_empty() {
        if keep.len() != 1 {
            return Err(FieldGraphError::InducedEmbeddingDegenerate(format!(
                "no saddles but {} {keep_kind} vertices",
                keep.len()
            )));
        }
        return Ok(DerivedSkeleton {
            skeleton: SkeletonMap::new(CombinatorialMap::point(), role),
            origin,
            vertex_origin: keep,
        });
    }
    let mut index_of = vec![usize::MAX; m.num_darts()];
    for (i, &g) in origin.iter().enumerate() {
        index_of[g] = i;
    }
    let mut sigma = vec![0; origin.len()];
    for (i, &g) in origin.iter().enumerate() {
        let mut d = m.sigma(g);
        while index_of[d] == usize::MAX {
            d = m.sigma(d);
        }
        sigma[i] = index_of[d];
    }
    let map = CombinatorialMap::from_sigma(sigma).map_err(|e| match e {
        MapError::Disconnected => {
            FieldGraphError::InducedEmbeddingDegenerate("induced skeleton is disconnected".into())
        }
        other => other.into(),
    })?;
    if map.num_vertices() != keep.len() {
        return Err(FieldGraphError::InducedEmbeddingDegenerate(format!(
            "{} of {} {keep_kind} vertices carry saddle edges",
            map.num_vertices(),
            keep.len()
        )));
    }
    let vertex_origin = (0..map.num_vertices()).map(|v| m.vertex_of(origin[map.vertex_darts(v)[0]])).collect();
    Ok(DerivedSkeleton { skeleton: SkeletonMap::new(map, role), origin, vertex_origin })
}

/// Sink skeleton with saddle-to-sink provenance.
pub fn derive_sink_skeleton(fg: &FieldGraph) -> Result<DerivedSkeleton, FieldGraphError> {
    derive_skeleton(fg, SkeletonRole::SinkSkeleton)
}

pub fn derive_source_skeleton(fg: &FieldGraph) -> Result<DerivedSkeleton, FieldGraphError> {
    derive_skeleton(fg, SkeletonRole::SourceSkeleton)
}

pub fn sink_skeleton(fg: &FieldGraph) -> Result<SkeletonMap, FieldGraphError> {
    Ok(derive_sink_skeleton(fg)?.skeleton)
}

pub fn source_skeleton(fg: &FieldGraph) -> Result<SkeletonMap, FieldGraphError> {
    Ok(derive_source_skeleton(fg)?.skeleton)
}

/// Rebuilds the field graph of a skeleton: each skeleton edge gets a saddle,
/// each face one source joined to every edge side and every corner.
///
/// Dart layout for a sink skeleton with `n` darts, per skeleton dart `c`:
/// edge `c` is saddle -> sink (`2c` at the saddle, `2c+1` at the sink of
/// `c`); edge `n+c` is source -> saddle on the side of `c`; edge `2n+c` is
/// source -> sink in the corner following `c` counterclockwise.
pub fn reconstruct_field_graph(s: &SkeletonMap) -> Result<FieldGraph, FieldGraphError> {
    if s.role == SkeletonRole::SourceSkeleton {
        let flipped = SkeletonMap::new(s.map.dual(), SkeletonRole::SinkSkeleton);
        return reconstruct_field_graph(&flipped);
    }
    let sk = &s.map;
    let n = sk.num_darts();
    if n == 0 {
        let map = CombinatorialMap::from_sigma(vec![0, 1])?;
        let kinds = (0..map.num_vertices())
            .map(|v| if map.vertex_darts(v)[0] == 0 { NodeKind::Source } else { NodeKind::Sink })
            .collect();
        return FieldGraph::new(map, kinds, vec![0]);
    }
    let t = |c: Dart| 2 * c;
    let h = |c: Dart| 2 * c + 1;
    let u = |c: Dart| 2 * (n + c);
    let m = |c: Dart| 2 * (n + c) + 1;
    let q = |c: Dart| 2 * (2 * n + c);
    let k = |c: Dart| 2 * (2 * n + c) + 1;

    let mut sigma = vec![usize::MAX; 6 * n];
    for c in 0..n {
        // sink: h(c) -> k(c) -> h(sigma(c))
        sigma[h(c)] = k(c);
        sigma[k(c)] = h(sk.sigma(c));
    }
    for e in 0..n / 2 {
        let (a, b) = (2 * e, 2 * e + 1);
        // saddle: forward, left, backward, right
        sigma[t(b)] = m(b);
        sigma[m(b)] = t(a);
        sigma[t(a)] = m(a);
        sigma[m(a)] = t(b);
    }
    for d in 0..n {
        // faces are walked clockwise by phi, so the source turns the other way
        let next = sk.phi(d);
        sigma[u(next)] = q(alpha(d));
        sigma[q(alpha(d))] = u(d);
    }
    debug_assert!(sigma.iter().all(|&x| x != usize::MAX));
    let map = CombinatorialMap::from_sigma(sigma).map_err(|e| match e {
        MapError::Disconnected => FieldGraphError::NotConnected,
        other => other.into(),
    })?;
    let kind_of_dart = |d: Dart| -> NodeKind {
        let even = d % 2 == 0;
        if d < 2 * n {
            if even {
                NodeKind::Saddle
            } else {
                NodeKind::Sink
            }
        } else if d < 4 * n {
            if even {
                NodeKind::Source
            } else {
                NodeKind::Saddle
            }
        } else if even {
            NodeKind::Source
        } else {
            NodeKind::Sink
        }
    };
    let kinds = (0..map.num_vertices()).map(|v| kind_of_dart(map.vertex_darts(v)[0])).collect();
    let tail = (0..3 * n).map(|e| 2 * e).collect();
    FieldGraph::new(map, kinds, tail)
}

/// Outcome of the saddled-triangulation test; `witness` names the first
/// offending face when the test fails on a face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationCheck {
    pub is_saddled_triangulation: bool,
    pub witness: Option<TriangulationWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum TriangulationWitness {
    NotSaddled { violations: Vec<Violation> },
    FaceDegree { face: usize, degree: usize },
    FaceCorners { face: usize, corners: Vec<NodeKind> },
}

pub fn is_saddled_triangulation(fg: &FieldGraph) -> TriangulationCheck {
    let report = validate_field_graph(fg);
    let fail = |w| TriangulationCheck { is_saddled_triangulation: false, witness: Some(w) };
    if !report.valid {
        return fail(TriangulationWitness::NotSaddled { violations: report.violations });
    }
    let m = fg.map();
    for (f, walk) in m.faces().iter().enumerate() {
        if walk.len() != 3 {
            return fail(TriangulationWitness::FaceDegree { face: f, degree: walk.len() });
        }
        let mut corners: Vec<NodeKind> = walk.iter().map(|&d| fg.kind(m.vertex_of(d))).collect();
        corners.sort();
        if corners != [NodeKind::Source, NodeKind::Sink, NodeKind::Saddle] {
            return fail(TriangulationWitness::FaceCorners { face: f, corners });
        }
    }
    TriangulationCheck { is_saddled_triangulation: true, witness: None }
}

/// Combinatorial model of the flow inside one triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowTriangle {
    pub face: usize,
    pub source: usize,
    pub saddle: usize,
    pub sink: usize,
    pub source_to_saddle: usize,
    pub saddle_to_sink: usize,
    pub source_to_sink: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowCertificate {
    pub triangles: Vec<FlowTriangle>,
}

pub fn flow_certificate(fg: &FieldGraph) -> Result<FlowCertificate, FieldGraphError> {
    let check = is_saddled_triangulation(fg);
    if !check.is_saddled_triangulation {
        let face = match check.witness {
            Some(TriangulationWitness::FaceDegree { face, .. } | TriangulationWitness::FaceCorners { face, .. }) => {
                face
            }
            _ => 0,
        };
        return Err(FieldGraphError::NotSaddledTriangulation(face));
    }
    let m = fg.map();
    let mut triangles = Vec::with_capacity(m.num_faces());
    for (f, walk) in m.faces().iter().enumerate() {
        let mut tri =
            FlowTriangle { face: f, source: 0, saddle: 0, sink: 0, source_to_saddle: 0, saddle_to_sink: 0, source_to_sink: 0 };
        for &d in walk {
            let v = m.vertex_of(d);
            match fg.kind(v) {
                NodeKind::Source => tri.source = v,
                NodeKind::Saddle => tri.saddle = v,
                NodeKind::Sink => tri.sink = v,
            }
        }
        for &d in walk {
            let e = d / 2;
            let ends = (fg.kind(fg.tail_vertex(e)), fg.kind(fg.head_vertex(e)));
            match ends {
                (NodeKind::Source, NodeKind::Saddle) => tri.source_to_saddle = e,
                (NodeKind::Saddle, NodeKind::Sink) => tri.saddle_to_sink = e,
                (NodeKind::Source, NodeKind::Sink) => tri.source_to_sink = e,
                _ => return Err(FieldGraphError::NotSaddledTriangulation(f)),
            }
        }
        triangles.push(tri);
    }
    Ok(FlowCertificate { triangles })
}

/// For each face of the sink skeleton, the field-graph source sitting in it,
/// read off from the source-to-sink edges in the skeleton's corners.
fn sources_in_sink_faces(fg: &FieldGraph, sink: &DerivedSkeleton) -> Option<Vec<usize>> {
    let sk = &sink.skeleton.map;
    let m = fg.map();
    if sk.num_darts() == 0 {
        let sources: Vec<usize> = fg.vertices_of_kind(NodeKind::Source).collect();
        return (sources.len() == 1).then_some(sources);
    }
    let mut in_face = vec![usize::MAX; sk.num_faces()];
    for (c, &g) in sink.origin.iter().enumerate() {
        let face = sk.face_of(sk.sigma(c));
        let next = sink.origin[sk.sigma(c)];
        let mut d = m.sigma(g);
        let mut seen_any = false;
        while d != next {
            let v = m.vertex_of(alpha(d));
            if fg.kind(v) != NodeKind::Source {
                return None;
            }
            if in_face[face] == usize::MAX {
                in_face[face] = v;
            } else if in_face[face] != v {
                return None;
            }
            seen_any = true;
            d = m.sigma(d);
        }
        if !seen_any {
            return None;
        }
    }
    in_face.iter().all(|&v| v != usize::MAX).then_some(in_face)
}

/// The dual of the sink skeleton is the source skeleton, with each sink-skeleton
/// face corresponding to the source it contains.
pub fn duality_check(fg: &FieldGraph) -> bool {
    let (Ok(sink), Ok(source)) = (derive_sink_skeleton(fg), derive_source_skeleton(fg)) else {
        return false;
    };
    let Some(face_source) = sources_in_sink_faces(fg, &sink) else {
        return false;
    };
    let dual = sink.skeleton.map.dual();
    let src = &source.skeleton.map;
    if dual.num_darts() == 0 {
        return src.num_darts() == 0 && source.vertex_origin == face_source;
    }
    let matched = all_isomorphisms(&dual, src, None).any(|iso| {
        (0..dual.num_darts()).all(|d| face_source[dual.vertex_of(d)] == source.vertex_origin[src.vertex_of(iso.apply(d))])
    });
    matched
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two sources, one saddle, one sink on the sphere. Saddle darts
    /// {0,2,5,9}, sink {1,3,7,11}, sources {4,6} and {8,10}.
    pub fn four_vertex_sphere() -> FieldGraph {
        let sigma = vec![5, 11, 9, 7, 6, 2, 4, 1, 10, 0, 8, 3];
        let map = CombinatorialMap::from_sigma(sigma).unwrap();
        use NodeKind::*;
        FieldGraph::new(map, vec![Saddle, Sink, Source, Source], vec![0, 2, 4, 6, 8, 10]).unwrap()
    }

    pub fn reduced_sphere() -> FieldGraph {
        let map = CombinatorialMap::from_sigma(vec![0, 1]).unwrap();
        FieldGraph::new(map, vec![NodeKind::Source, NodeKind::Sink], vec![0]).unwrap()
    }

    pub fn loop_on_sphere() -> SkeletonMap {
        SkeletonMap::sink(CombinatorialMap::from_sigma(vec![1, 0]).unwrap())
    }

    pub fn single_edge() -> SkeletonMap {
        SkeletonMap::sink(CombinatorialMap::from_sigma(vec![0, 1]).unwrap())
    }

    pub fn torus_two_loops() -> SkeletonMap {
        SkeletonMap::sink(CombinatorialMap::from_sigma(vec![2, 3, 1, 0]).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::surface_map::map_isomorphic;

    #[test]
    fn four_vertex_fixture_shape() {
        let fg = four_vertex_sphere();
        let m = fg.map();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces(), m.genus()), (4, 6, 4, 0));
        assert!(m.faces().iter().all(|f| f.len() == 3));
    }

    #[test]
    fn validate_examples() {
        let r = validate_field_graph(&reduced_sphere());
        assert!(r.valid, "{:?}", r.violations);

        let map = CombinatorialMap::from_sigma(vec![0, 1]).unwrap();
        let bad = FieldGraph::new(map, vec![NodeKind::Source, NodeKind::Source], vec![0]).unwrap();
        let r = validate_field_graph(&bad);
        assert!(!r.valid);
        assert!(r.violations.contains(&Violation::NoSink));
        assert!(r.violations.contains(&Violation::SameKindEdge { edge: 0, kind: NodeKind::Source }));

        let r = validate_field_graph(&four_vertex_sphere());
        assert!(r.valid, "{:?}", r.violations);
        assert_eq!(r.counts, ZeroCounts { sources: 2, sinks: 1, saddles: 1 });
        assert_eq!(r.genus, 0);
    }

    #[test]
    fn saddle_degree_violation_is_reported() {
        // saddle with one in and one out edge
        let map = CombinatorialMap::from_sigma(vec![0, 2, 1, 3]).unwrap();
        let kinds: Vec<NodeKind> = (0..map.num_vertices())
            .map(|v| match map.vertex_darts(v)[0] {
                0 => NodeKind::Source,
                1 => NodeKind::Saddle,
                _ => NodeKind::Sink,
            })
            .collect();
        let fg = FieldGraph::new(map, kinds, vec![0, 2]).unwrap();
        let r = validate_field_graph(&fg);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::SaddleDegree { in_degree: 1, out_degree: 1, .. })));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(poincare_hopf_residual(&reduced_sphere()), 0);
        assert_eq!(residual_from_counts(ZeroCounts { sources: 1, sinks: 1, saddles: 2 }, 1), 0);
        assert_eq!(residual_from_counts(ZeroCounts { sources: 2, sinks: 1, saddles: 0 }, 0), 1);
    }

    #[test]
    fn sink_skeleton_examples() {
        let s = sink_skeleton(&reduced_sphere()).unwrap();
        assert_eq!((s.map.num_vertices(), s.map.num_edges(), s.map.num_faces()), (1, 0, 1));

        let s = sink_skeleton(&four_vertex_sphere()).unwrap();
        assert_eq!((s.map.num_vertices(), s.map.num_edges(), s.map.num_faces()), (1, 1, 2));
        assert!(map_isomorphic(&s.map, &loop_on_sphere().map).is_some());

        let t = torus_two_loops();
        let back = sink_skeleton(&reconstruct_field_graph(&t).unwrap()).unwrap();
        assert!(map_isomorphic(&back.map, &t.map).is_some());
    }

    #[test]
    fn reconstruct_examples() {
        let fg = reconstruct_field_graph(&SkeletonMap::sink(CombinatorialMap::point())).unwrap();
        assert_eq!((fg.map().num_vertices(), fg.map().num_edges()), (2, 1));
        assert!(validate_field_graph(&fg).valid);
        assert_eq!(fg.kind(fg.tail_vertex(0)), NodeKind::Source);

        let fg = reconstruct_field_graph(&loop_on_sphere()).unwrap();
        assert_eq!(fg.counts(), ZeroCounts { sources: 2, sinks: 1, saddles: 1 });
        assert_eq!((fg.map().num_edges(), fg.map().num_faces()), (6, 4));
        assert!(map_isomorphic(fg.map(), four_vertex_sphere().map()).is_some());

        let fg = reconstruct_field_graph(&torus_two_loops()).unwrap();
        let m = fg.map();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces(), m.genus()), (4, 12, 8, 1));
        let source_sink = (0..m.num_edges())
            .filter(|&e| fg.kind(fg.tail_vertex(e)) == NodeKind::Source && fg.kind(fg.head_vertex(e)) == NodeKind::Sink)
            .count();
        assert_eq!(source_sink, 4);
    }

    #[test]
    fn reconstruct_source_role_goes_through_dual() {
        let fg = four_vertex_sphere();
        let src = source_skeleton(&fg).unwrap();
        assert_eq!(src.map.num_vertices(), 2);
        let rebuilt = reconstruct_field_graph(&src).unwrap();
        assert!(map_isomorphic(rebuilt.map(), fg.map()).is_some());
    }

    #[test]
    fn triangulation_examples() {
        assert!(is_saddled_triangulation(&reconstruct_field_graph(&loop_on_sphere()).unwrap()).is_saddled_triangulation);
        let c = is_saddled_triangulation(&reduced_sphere());
        assert!(!c.is_saddled_triangulation);
        assert_eq!(c.witness, Some(TriangulationWitness::FaceDegree { face: 0, degree: 2 }));
        assert!(is_saddled_triangulation(&four_vertex_sphere()).is_saddled_triangulation);
    }

    #[test]
    fn duality_examples() {
        assert!(duality_check(&four_vertex_sphere()));
        assert!(duality_check(&reconstruct_field_graph(&torus_two_loops()).unwrap()));
        assert!(duality_check(&reduced_sphere()));
    }

    #[test]
    fn certificate_examples() {
        assert_eq!(flow_certificate(&four_vertex_sphere()).unwrap().triangles.len(), 4);
        assert_eq!(flow_certificate(&reconstruct_field_graph(&torus_two_loops()).unwrap()).unwrap().triangles.len(), 8);
        assert!(matches!(flow_certificate(&reduced_sphere()), Err(FieldGraphError::NotSaddledTriangulation(_))));
    }

    #[test]
    fn structural_errors() {
        let map = CombinatorialMap::from_sigma(vec![0, 1]).unwrap();
        assert!(matches!(FieldGraph::new(map.clone(), vec![NodeKind::Source], vec![0]), Err(FieldGraphError::KindCount { .. })));
        assert!(matches!(
            FieldGraph::new(map, vec![NodeKind::Source, NodeKind::Sink], vec![2]),
            Err(FieldGraphError::TailNotOnEdge { .. })
        ));
    }
}
