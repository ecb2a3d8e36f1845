//! Cobordism moves on sink skeletons and the reduction to one sink and one
//! source.
//!
//! On the sink skeleton a sink merge contracts an edge between two distinct
//! vertices (two sinks and the saddle between them become one sink) and a
//! source merge deletes an edge between two distinct faces (two sources and a
//! saddle become one source). Both are reversible; the reverse moves split a
//! vertex or a face and carry enough data to undo the merge exactly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field_graph::{SkeletonMap, SkeletonRole};
use crate::surface_map::{colored_isomorphism, CombinatorialMap, Dart, DartBijection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobordismError {
    #[error("move {0:?} is not applicable")]
    MoveNotApplicable(Move),
    #[error("moves act on sink skeletons")]
    WrongRole,
    #[error("reduction got stuck with {vertices} vertices and {faces} faces")]
    StuckBeforeReduced { vertices: usize, faces: usize },
    #[error("skeleton carries periodic-orbit marks")]
    Marked,
    #[error("skeletons have genus {0} and {1}")]
    GenusMismatch(usize, usize),
    #[error("skeleton has genus {0}, expected the sphere")]
    NotSphere(usize),
    #[error("trace step {step}: state hash mismatch")]
    HashMismatch { step: usize },
    #[error("trace step {step}: genus changed from {before} to {after}")]
    GenusChanged { step: usize, before: usize, after: usize },
}

/// Which of the two darts of a newly inserted edge a mark follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// Where a new dart goes in a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// Immediately after this dart, counterclockwise.
    After(Dart),
    /// Immediately after the first inserted dart.
    AfterNew,
    /// On the single dartless vertex.
    Isolated,
}

/// One cobordism step. `SinkMerge`/`SourceMerge` act on the sink skeleton;
/// the two `Inverse*` variants undo them and carry the splitting data;
/// `Swallow` and `TwistMacro` act on periodic structures and torus markings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    SinkMerge {
        edge: usize,
    },
    SourceMerge {
        edge: usize,
    },
    /// Splits `vertex`: reading its rotation from `start`, the first `count`
    /// darts move to a new vertex joined to the old one by a new edge.
    InverseSinkMerge {
        vertex: usize,
        start: Option<Dart>,
        count: usize,
        mark: Option<Side>,
    },
    /// Inserts an edge across one face, new dart `a` after `a_after` and
    /// then `b` after `b_after`.
    InverseSourceMerge {
        a_after: Anchor,
        b_after: Anchor,
        mark: Option<Side>,
    },
    Swallow {
        orbit: usize,
        region: usize,
    },
    TwistMacro {
        loop_edge: usize,
        direction: i8,
    },
}

impl Move {
    pub fn is_inverse(&self) -> bool {
        matches!(self, Move::InverseSinkMerge { .. } | Move::InverseSourceMerge { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(rename = "move")]
    pub mv: Move,
    pub pre: String,
    pub post: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Hashes chain: every step starts where the previous one ended.
    pub fn is_chained(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].post == w[1].pre)
    }

    /// JSON lines, one step per line.
    pub fn to_jsonl(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut v = serde_json::to_value(s).expect("trace step serializes");
                v.as_object_mut().expect("object").insert("step".into(), i.into());
                format!("{v}\n")
            })
            .collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let steps = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str::<TraceStep>)
            .collect::<Result<_, _>>()?;
        Ok(Trace { steps })
    }
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a skeleton's canonical form, marks included.
pub fn state_hash(s: &SkeletonMap) -> String {
    hash_bytes(&s.canonical_form())
}

/// Result of a move: the new skeleton, the move undoing it, and where each
/// old vertex and face went (a merged entity maps to the merged result; a
/// split entity maps to the part that keeps its mark).
#[derive(Debug, Clone)]
pub struct MoveOutcome {
    pub skeleton: SkeletonMap,
    pub inverse: Move,
    pub vertex_map: Vec<usize>,
    pub face_map: Vec<usize>,
}

pub fn sink_moves(s: &SkeletonMap) -> Vec<Move> {
    let m = &s.map;
    (0..m.num_edges())
        .filter(|&e| {
            let (u, v) = (m.vertex_of(2 * e), m.vertex_of(2 * e + 1));
            u != v && !(s.marked_vertices.contains(&u) && s.marked_vertices.contains(&v))
        })
        .map(|edge| Move::SinkMerge { edge })
        .collect()
}

pub fn source_moves(s: &SkeletonMap) -> Vec<Move> {
    let m = &s.map;
    (0..m.num_edges())
        .filter(|&e| {
            let (f, g) = (m.face_of(2 * e), m.face_of(2 * e + 1));
            f != g && !(s.marked_faces.contains(&f) && s.marked_faces.contains(&g))
        })
        .map(|edge| Move::SourceMerge { edge })
        .collect()
}

fn rotation_from(sigma: &[Dart], start: Dart) -> Vec<Dart> {
    let mut out = vec![start];
    let mut d = sigma[start];
    while d != start {
        out.push(d);
        d = sigma[d];
    }
    out
}

fn close_cycle(sigma: &mut [Dart], cycle: &[Dart]) {
    for (i, &d) in cycle.iter().enumerate() {
        sigma[d] = cycle[(i + 1) % cycle.len()];
    }
}

fn inverse_perm(sigma: &[Dart]) -> Vec<Dart> {
    let mut inv = vec![0; sigma.len()];
    for (d, &s) in sigma.iter().enumerate() {
        inv[s] = d;
    }
    inv
}

/// Drops edge `e` and renumbers the remaining darts downwards.
fn drop_edge(sigma: &[Dart], e: usize) -> (Vec<Dart>, impl Fn(Dart) -> Dart) {
    let renum = move |d: Dart| if d > 2 * e + 1 { d - 2 } else { d };
    let out = sigma
        .iter()
        .enumerate()
        .filter(|&(d, _)| d / 2 != e)
        .map(|(_, &img)| renum(img))
        .collect();
    (out, renum)
}

/// Index in `new` of the entity that owns any surviving dart of `darts`.
fn locate(darts: &[Dart], alive: impl Fn(Dart) -> Option<Dart>, owner: impl Fn(Dart) -> usize) -> Option<usize> {
    darts.iter().find_map(|&d| alive(d)).map(owner)
}

fn finish(
    old: &SkeletonMap,
    map: CombinatorialMap,
    inverse: Move,
    vertex_map: Vec<usize>,
    face_map: Vec<usize>,
) -> MoveOutcome {
    let marked_vertices = old.marked_vertices.iter().map(|&v| vertex_map[v]).collect();
    let marked_faces = old.marked_faces.iter().map(|&f| face_map[f]).collect();
    MoveOutcome {
        skeleton: SkeletonMap { map, role: old.role, marked_vertices, marked_faces },
        inverse,
        vertex_map,
        face_map,
    }
}

fn contract(s: &SkeletonMap, e: usize) -> MoveOutcome {
    let m = &s.map;
    let (a, b) = (2 * e, 2 * e + 1);
    let (u, v) = (m.vertex_of(a), m.vertex_of(b));
    let mut sigma = m.sigma_slice().to_vec();
    let u_rest = rotation_from(&sigma, a)[1..].to_vec();
    let v_rest = rotation_from(&sigma, b)[1..].to_vec();
    let merged: Vec<Dart> = u_rest.iter().chain(&v_rest).copied().collect();
    if !merged.is_empty() {
        close_cycle(&mut sigma, &merged);
    }
    let (new_sigma, renum) = drop_edge(&sigma, e);
    let isolated = usize::from(new_sigma.is_empty());
    let map = CombinatorialMap::from_canonical(new_sigma, isolated).expect("contraction keeps the map connected");
    let alive = |d: Dart| (d / 2 != e).then(|| renum(d));
    let vertex_map = (0..m.num_vertices())
        .map(|w| locate(m.vertex_darts(w), alive, |d| map.vertex_of(d)).unwrap_or(map.num_vertices() - 1))
        .collect::<Vec<_>>();
    let merged_vertex = locate(&merged, alive, |d| map.vertex_of(d)).unwrap_or(0);
    let vertex_map =
        vertex_map.into_iter().enumerate().map(|(w, x)| if w == u || w == v { merged_vertex } else { x }).collect();
    let face_map = (0..m.num_faces())
        .map(|f| locate(m.face_darts(f), alive, |d| map.face_of(d)).unwrap_or(0))
        .collect();
    let start = v_rest.first().or(u_rest.first()).map(|&d| renum(d));
    let mark = match (s.marked_vertices.contains(&u), s.marked_vertices.contains(&v)) {
        (true, _) => Some(Side::A),
        (_, true) => Some(Side::B),
        _ => None,
    };
    let inverse = Move::InverseSinkMerge { vertex: merged_vertex, start, count: v_rest.len(), mark };
    finish(s, map, inverse, vertex_map, face_map)
}

fn delete(s: &SkeletonMap, e: usize) -> MoveOutcome {
    let m = &s.map;
    let (a, b) = (2 * e, 2 * e + 1);
    let (fa, fb) = (m.face_of(a), m.face_of(b));
    let mut sigma = m.sigma_slice().to_vec();
    let pred = inverse_perm(&sigma);
    let a_after = if pred[a] == b {
        if pred[b] == a {
            Anchor::Isolated
        } else {
            Anchor::After(pred[b])
        }
    } else {
        Anchor::After(pred[a])
    };
    let b_after = if pred[b] == a { Anchor::AfterNew } else { Anchor::After(pred[b]) };
    let mut touched: Vec<Vec<Dart>> = vec![rotation_from(&sigma, a)];
    if m.vertex_of(a) != m.vertex_of(b) {
        touched.push(rotation_from(&sigma, b));
    }
    for cycle in touched {
        let rest: Vec<Dart> = cycle.into_iter().filter(|&d| d / 2 != e).collect();
        if !rest.is_empty() {
            close_cycle(&mut sigma, &rest);
        }
    }
    let (new_sigma, renum) = drop_edge(&sigma, e);
    let isolated = usize::from(new_sigma.is_empty());
    let map = CombinatorialMap::from_canonical(new_sigma, isolated).expect("deleting a non-bridge keeps the map connected");
    let alive = |d: Dart| (d / 2 != e).then(|| renum(d));
    let vertex_map = (0..m.num_vertices())
        .map(|w| locate(m.vertex_darts(w), alive, |d| map.vertex_of(d)).unwrap_or(map.num_vertices() - 1))
        .collect();
    let both: Vec<Dart> = m.face_darts(fa).iter().chain(m.face_darts(fb)).copied().collect();
    let merged_face = locate(&both, alive, |d| map.face_of(d)).unwrap_or(0);
    let face_map = (0..m.num_faces())
        .map(|f| {
            if f == fa || f == fb {
                merged_face
            } else {
                locate(m.face_darts(f), alive, |d| map.face_of(d)).expect("other faces keep their darts")
            }
        })
        .collect();
    let mark = match (s.marked_faces.contains(&fa), s.marked_faces.contains(&fb)) {
        (true, _) => Some(Side::A),
        (_, true) => Some(Side::B),
        _ => None,
    };
    let fix = |x: Anchor| match x {
        Anchor::After(d) => Anchor::After(renum(d)),
        other => other,
    };
    let inverse = Move::InverseSourceMerge { a_after: fix(a_after), b_after: fix(b_after), mark };
    finish(s, map, inverse, vertex_map, face_map)
}

fn split_vertex(
    s: &SkeletonMap,
    mv: &Move,
    vertex: usize,
    start: Option<Dart>,
    count: usize,
    mark: Option<Side>,
) -> Result<MoveOutcome, CobordismError> {
    let m = &s.map;
    let n = m.num_darts();
    let bad = || CobordismError::MoveNotApplicable(mv.clone());
    if vertex >= m.num_vertices() {
        return Err(bad());
    }
    let (a, b) = (n, n + 1);
    let mut sigma = m.sigma_slice().to_vec();
    sigma.extend([a, b]);
    match start {
        None => {
            if !m.vertex_darts(vertex).is_empty() || count != 0 {
                return Err(bad());
            }
        }
        Some(st) => {
            if st >= n || m.vertex_of(st) != vertex {
                return Err(bad());
            }
            let rot = rotation_from(m.sigma_slice(), st);
            if count > rot.len() {
                return Err(bad());
            }
            let (moved, kept) = rot.split_at(count);
            let mut u_cycle = vec![a];
            u_cycle.extend_from_slice(kept);
            let mut v_cycle = vec![b];
            v_cycle.extend_from_slice(moved);
            close_cycle(&mut sigma, &u_cycle);
            close_cycle(&mut sigma, &v_cycle);
        }
    }
    let map = CombinatorialMap::from_canonical(sigma, 0).map_err(|_| bad())?;
    let marked_here = s.marked_vertices.contains(&vertex);
    let keeper = if marked_here && mark == Some(Side::B) { b } else { a };
    let vertex_map = (0..m.num_vertices())
        .map(|w| if w == vertex { map.vertex_of(keeper) } else { map.vertex_of(m.vertex_darts(w)[0]) })
        .collect();
    let face_map = (0..m.num_faces())
        .map(|f| m.face_darts(f).first().map_or(map.face_of(a), |&d| map.face_of(d)))
        .collect();
    Ok(finish(s, map, Move::SinkMerge { edge: n / 2 }, vertex_map, face_map))
}

fn split_face(
    s: &SkeletonMap,
    mv: &Move,
    a_after: Anchor,
    b_after: Anchor,
    mark: Option<Side>,
) -> Result<MoveOutcome, CobordismError> {
    let m = &s.map;
    let n = m.num_darts();
    let bad = || CobordismError::MoveNotApplicable(mv.clone());
    let (a, b) = (n, n + 1);
    let corner_face = |x: Anchor| match x {
        Anchor::After(d) if d < n => Some(m.face_of(m.sigma(d))),
        Anchor::Isolated if n == 0 => Some(0),
        _ => None,
    };
    let face = corner_face(a_after).ok_or_else(bad)?;
    match b_after {
        Anchor::AfterNew => {}
        other => {
            if corner_face(other) != Some(face) {
                return Err(bad());
            }
        }
    }
    let mut sigma = m.sigma_slice().to_vec();
    sigma.extend([a, b]);
    let insert_after = |sigma: &mut Vec<Dart>, at: Dart, new: Dart| {
        sigma[new] = sigma[at];
        sigma[at] = new;
    };
    match a_after {
        Anchor::After(d) => insert_after(&mut sigma, d, a),
        _ => sigma[a] = a,
    }
    match b_after {
        Anchor::After(d) => insert_after(&mut sigma, d, b),
        Anchor::AfterNew => insert_after(&mut sigma, a, b),
        Anchor::Isolated => return Err(bad()),
    }
    let map = CombinatorialMap::from_canonical(sigma, 0).map_err(|_| bad())?;
    if map.genus() != m.genus() {
        return Err(bad());
    }
    let keeper = if s.marked_faces.contains(&face) && mark == Some(Side::B) { b } else { a };
    let vertex_map = (0..m.num_vertices())
        .map(|w| m.vertex_darts(w).first().map_or(map.vertex_of(a), |&d| map.vertex_of(d)))
        .collect();
    let face_map = (0..m.num_faces())
        .map(|f| if f == face { map.face_of(keeper) } else { map.face_of(m.face_darts(f)[0]) })
        .collect();
    Ok(finish(s, map, Move::SourceMerge { edge: n / 2 }, vertex_map, face_map))
}

/// Applies a skeleton move and returns the full outcome.
pub fn apply_move_full(s: &SkeletonMap, mv: &Move) -> Result<MoveOutcome, CobordismError> {
    if s.role != SkeletonRole::SinkSkeleton {
        return Err(CobordismError::WrongRole);
    }
    let bad = || CobordismError::MoveNotApplicable(mv.clone());
    match *mv {
        Move::SinkMerge { edge } => {
            if !sink_moves(s).contains(mv) {
                return Err(bad());
            }
            Ok(contract(s, edge))
        }
        Move::SourceMerge { edge } => {
            if !source_moves(s).contains(mv) {
                return Err(bad());
            }
            Ok(delete(s, edge))
        }
        Move::InverseSinkMerge { vertex, start, count, mark } => split_vertex(s, mv, vertex, start, count, mark),
        Move::InverseSourceMerge { a_after, b_after, mark } => split_face(s, mv, a_after, b_after, mark),
        Move::Swallow { .. } | Move::TwistMacro { .. } => Err(bad()),
    }
}

pub fn apply_move(s: &SkeletonMap, mv: &Move) -> Result<SkeletonMap, CobordismError> {
    apply_move_full(s, mv).map(|o| o.skeleton)
}

/// Move selection order for [`reduce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// All sink merges first, then all source merges.
    #[default]
    Phased,
    /// Alternate between the two kinds whenever both are available.
    Interleaved,
}

/// Next reducing move, lowest edge index first.
pub fn next_move(s: &SkeletonMap, strategy: Strategy, step: usize) -> Option<Move> {
    let sink = || sink_moves(s).into_iter().next();
    let source = || source_moves(s).into_iter().next();
    match strategy {
        Strategy::Phased => sink().or_else(source),
        Strategy::Interleaved if step % 2 == 0 => sink().or_else(source),
        Strategy::Interleaved => source().or_else(sink),
    }
}

pub fn is_reduced(s: &SkeletonMap) -> bool {
    s.map.num_vertices() == 1 && s.map.num_faces() == 1
}

/// Greedy reduction to one vertex and one face. Each move lowers `V + F` by
/// one, so the trace has exactly `(V - 1) + (F - 1)` steps.
pub fn reduce(s: &SkeletonMap, strategy: Strategy) -> Result<Trace, CobordismError> {
    if s.is_marked() {
        return Err(CobordismError::Marked);
    }
    Ok(reduce_until_stuck(s, strategy)?.0)
}

/// Runs reducing moves until none apply. Returns the trace and the final
/// state; fails if the final state is not reduced.
pub fn reduce_until_stuck(s: &SkeletonMap, strategy: Strategy) -> Result<(Trace, SkeletonMap), CobordismError> {
    if s.role != SkeletonRole::SinkSkeleton {
        return Err(CobordismError::WrongRole);
    }
    let mut state = s.clone();
    let mut trace = Trace::default();
    let mut pre = state_hash(&state);
    while let Some(mv) = next_move(&state, strategy, trace.len()) {
        state = apply_move(&state, &mv)?;
        let post = state_hash(&state);
        trace.steps.push(TraceStep { mv, pre, post: post.clone(), region: None });
        pre = post;
    }
    if !is_reduced(&state) {
        return Err(CobordismError::StuckBeforeReduced {
            vertices: state.map.num_vertices(),
            faces: state.map.num_faces(),
        });
    }
    Ok((trace, state))
}

/// Every state along a trace, starting with `initial`. Checks the hash chain
/// and that the genus never changes.
pub fn replay_states(initial: &SkeletonMap, trace: &Trace) -> Result<Vec<SkeletonMap>, CobordismError> {
    let mut states = vec![initial.clone()];
    let genus = initial.map.genus();
    for (i, step) in trace.steps.iter().enumerate() {
        let cur = states.last().expect("non-empty");
        if state_hash(cur) != step.pre {
            return Err(CobordismError::HashMismatch { step: i });
        }
        let next = apply_move(cur, &step.mv)?;
        if next.map.genus() != genus {
            return Err(CobordismError::GenusChanged { step: i, before: genus, after: next.map.genus() });
        }
        if state_hash(&next) != step.post {
            return Err(CobordismError::HashMismatch { step: i });
        }
        states.push(next);
    }
    Ok(states)
}

pub fn replay(initial: &SkeletonMap, trace: &Trace) -> Result<SkeletonMap, CobordismError> {
    Ok(replay_states(initial, trace)?.pop().expect("non-empty"))
}

/// The reduced skeleton of genus `g`: one vertex, `2g` loops in the standard
/// one-face pattern (handle `j` uses darts `4j..4j+3` in rotation order
/// `4j, 4j+2, 4j+1, 4j+3`).
pub fn canonical_reduced(genus: usize) -> SkeletonMap {
    if genus == 0 {
        return SkeletonMap::sink(CombinatorialMap::point());
    }
    let order: Vec<Dart> = (0..genus).flat_map(|j| [4 * j, 4 * j + 2, 4 * j + 1, 4 * j + 3]).collect();
    let mut sigma = vec![0; 4 * genus];
    close_cycle(&mut sigma, &order);
    SkeletonMap::sink(CombinatorialMap::from_sigma(sigma).expect("handle pattern is connected"))
}

/// Rewrites a move recorded against one state so it applies to an
/// isomorphic state, `iso` mapping the recorded state's darts to the
/// target's.
pub fn translate_move(mv: &Move, iso: &DartBijection, target: &CombinatorialMap) -> Move {
    let anchor = |x: Anchor| match x {
        Anchor::After(d) => Anchor::After(iso.apply(d)),
        other => other,
    };
    match *mv {
        Move::SinkMerge { edge } => Move::SinkMerge { edge: iso.apply(2 * edge) / 2 },
        Move::SourceMerge { edge } => Move::SourceMerge { edge: iso.apply(2 * edge) / 2 },
        Move::InverseSinkMerge { vertex, start, count, mark } => {
            let start = start.map(|d| iso.apply(d));
            let vertex = start.map_or(vertex.min(target.num_vertices().saturating_sub(1)), |d| target.vertex_of(d));
            Move::InverseSinkMerge { vertex, start, count, mark }
        }
        Move::InverseSourceMerge { a_after, b_after, mark } => {
            Move::InverseSourceMerge { a_after: anchor(a_after), b_after: anchor(b_after), mark }
        }
        ref other => other.clone(),
    }
}

fn marked_isomorphism(a: &SkeletonMap, b: &SkeletonMap) -> Option<DartBijection> {
    let (ca, cb) = (a.dart_colors(), b.dart_colors());
    if a.map.num_darts() == 0 {
        return (a.canonical_form() == b.canonical_form()).then(|| DartBijection { mapping: Vec::new() });
    }
    colored_isomorphism(&a.map, &b.map, Some((&ca, &cb)))
}

/// Cobordism between two sphere skeletons: reduce `a`, then run the
/// reduction of `b` backwards with inverted moves.
pub fn cobordant_sphere(a: &SkeletonMap, b: &SkeletonMap) -> Result<Trace, CobordismError> {
    let (ga, gb) = (a.map.genus(), b.map.genus());
    if ga != gb {
        return Err(CobordismError::GenusMismatch(ga, gb));
    }
    if ga != 0 {
        return Err(CobordismError::NotSphere(ga));
    }
    let mut trace = reduce(a, Strategy::Phased)?;
    let mut current = replay(a, &trace)?;

    // Forward reduction of b, remembering each inverse.
    let mut b_states = vec![b.clone()];
    let mut b_inverses = Vec::new();
    let mut state = b.clone();
    while let Some(mv) = next_move(&state, Strategy::Phased, b_inverses.len()) {
        let out = apply_move_full(&state, &mv)?;
        b_inverses.push(out.inverse);
        state = out.skeleton;
        b_states.push(state.clone());
    }
    for (i, inv) in b_inverses.iter().enumerate().rev() {
        let recorded = &b_states[i + 1];
        let iso = marked_isomorphism(recorded, &current).ok_or(CobordismError::MoveNotApplicable(inv.clone()))?;
        let mv = translate_move(inv, &iso, &current.map);
        let next = apply_move(&current, &mv)?;
        trace.steps.push(TraceStep { mv, pre: state_hash(&current), post: state_hash(&next), region: None });
        current = next;
    }
    Ok(trace)
}
