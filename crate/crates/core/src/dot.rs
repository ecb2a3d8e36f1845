//! Graphviz DOT export.

use std::fmt::Write;

use crate::field_graph::{FieldGraph, NodeKind, SkeletonMap, SkeletonRole};
use crate::surface_map::CombinatorialMap;

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Source => "triangle",
        NodeKind::Sink => "invtriangle",
        NodeKind::Saddle => "diamond",
    }
}

/// Directed field graph; node shapes encode the zero type.
pub fn field_graph_dot(fg: &FieldGraph) -> String {
    let mut out = String::from("digraph field_graph {\n");
    for v in 0..fg.map().num_vertices() {
        let k = fg.kind(v);
        writeln!(out, "  v{v} [shape={}, label=\"{k} {v}\"];", shape(k)).unwrap();
    }
    for e in 0..fg.map().num_edges() {
        writeln!(out, "  v{} -> v{} [label=\"e{e}\"];", fg.tail_vertex(e), fg.head_vertex(e)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Skeleton: vertices with the role's zero shape, faces as dashed nodes of
/// the opposite type joined by dotted lines to their corners. Marked
/// vertices and faces get a double border.
pub fn skeleton_dot(s: &SkeletonMap) -> String {
    let m = &s.map;
    let (vkind, fkind) = match s.role {
        SkeletonRole::SinkSkeleton => (NodeKind::Sink, NodeKind::Source),
        SkeletonRole::SourceSkeleton => (NodeKind::Source, NodeKind::Sink),
    };
    let border = |marked: bool| if marked { 2 } else { 1 };
    let mut out = String::from("digraph skeleton {\n");
    for v in 0..m.num_vertices() {
        writeln!(
            out,
            "  v{v} [shape={}, peripheries={}, label=\"{vkind} {v}\"];",
            shape(vkind),
            border(s.marked_vertices.contains(&v))
        )
        .unwrap();
    }
    for f in 0..m.num_faces() {
        writeln!(
            out,
            "  f{f} [shape={}, style=dashed, peripheries={}, label=\"{fkind} f{f}\"];",
            shape(fkind),
            border(s.marked_faces.contains(&f))
        )
        .unwrap();
    }
    for e in 0..m.num_edges() {
        writeln!(out, "  v{} -> v{} [dir=none, label=\"saddle {e}\"];", m.vertex_of(2 * e), m.vertex_of(2 * e + 1))
            .unwrap();
    }
    for d in 0..m.num_darts() {
        writeln!(out, "  f{} -> v{} [style=dotted, arrowhead=none];", m.face_of(m.sigma(d)), m.vertex_of(d)).unwrap();
    }
    if m.num_darts() == 0 {
        out.push_str("  f0 -> v0 [style=dotted, arrowhead=none];\n");
    }
    out.push_str("}\n");
    out
}

/// Plain map: one node per vertex, one undirected edge per edge.
pub fn map_dot(m: &CombinatorialMap) -> String {
    let mut out = String::from("digraph map {\n");
    for v in 0..m.num_vertices() {
        writeln!(out, "  v{v} [shape=circle];").unwrap();
    }
    for e in 0..m.num_edges() {
        writeln!(out, "  v{} -> v{} [dir=none, label=\"e{e}\"];", m.vertex_of(2 * e), m.vertex_of(2 * e + 1)).unwrap();
    }
    out.push_str("}\n");
    out
}
