//! Fields with attracting or repelling periodic orbits.
//!
//! The orbits cut the surface into regions. Each region is stored already
//! closed off: every orbit side becomes a marked sink vertex (attracting) or
//! a marked source face (repelling) in the region's sink skeleton, so the
//! primitive machinery applies region by region.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cobordism::{apply_move_full, hash_bytes, next_move, CobordismError, Move, Strategy, Trace, TraceStep};
use crate::field_graph::{reconstruct_field_graph, validate_field_graph, SkeletonMap, SkeletonRole};
use crate::io::{IoError, SkeletonFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Attracting,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orbit {
    pub id: usize,
    pub polarity: Polarity,
}

/// Entity of a region's skeleton standing in for one side of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OrbitMark {
    Vertex(usize),
    Face(usize),
}

impl fmt::Display for OrbitMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitMark::Vertex(k) => write!(f, "vertex {k}"),
            OrbitMark::Face(k) => write!(f, "face {k}"),
        }
    }
}

impl FromStr for OrbitMark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut it = s.split_whitespace();
        let (kind, index, rest) = (it.next(), it.next(), it.next());
        let index: Option<usize> = index.and_then(|k| k.parse().ok());
        match (kind, index, rest) {
            (Some("vertex"), Some(k), None) => Ok(OrbitMark::Vertex(k)),
            (Some("face"), Some(k), None) => Ok(OrbitMark::Face(k)),
            _ => Err(format!("orbit mark {s:?} is not \"vertex k\" or \"face k\"")),
        }
    }
}

impl TryFrom<String> for OrbitMark {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<OrbitMark> for String {
    fn from(m: OrbitMark) -> String {
        m.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: usize,
    pub genus: usize,
    pub closed_field: SkeletonMap,
    /// Orbit id to the side(s) of that orbit facing this region. Two sides
    /// only when the orbit bounds the region from both sides.
    pub orbit_marks: BTreeMap<usize, Vec<OrbitMark>>,
}

impl Region {
    pub fn side_count(&self) -> usize {
        self.orbit_marks.values().map(Vec::len).sum()
    }

    /// Region whose closed field is `closed_field` with marks taken from
    /// `orbit_marks`.
    pub fn new(id: usize, closed_field: SkeletonMap, orbit_marks: BTreeMap<usize, Vec<OrbitMark>>) -> Self {
        let mut closed_field = closed_field;
        closed_field.marked_vertices.clear();
        closed_field.marked_faces.clear();
        for m in orbit_marks.values().flatten() {
            match *m {
                OrbitMark::Vertex(k) => closed_field.marked_vertices.insert(k),
                OrbitMark::Face(k) => closed_field.marked_faces.insert(k),
            };
        }
        Region { id, genus: closed_field.map.genus(), closed_field, orbit_marks }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicStructure {
    pub surface_genus: usize,
    pub orbits: Vec<Orbit>,
    pub regions: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum PeriodicViolation {
    DuplicateOrbitId { orbit: usize },
    DuplicateRegionId { region: usize },
    UnknownOrbit { region: usize, orbit: usize },
    SideCount { orbit: usize, sides: usize },
    PolarityMismatch { region: usize, orbit: usize, mark: String },
    MarkOutOfRange { region: usize, mark: String },
    SharedMark { region: usize, mark: String },
    MarkMismatch { region: usize },
    WrongRole { region: usize },
    RegionGenus { region: usize, declared: usize, actual: usize },
    RegionField { region: usize, detail: String },
    IncidenceDisconnected,
    SphereNotTree,
    SphereRegionGenus { region: usize },
    GenusConsistency { region_genera: usize, cycle_rank: usize, surface_genus: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub valid: bool,
    pub orbits: usize,
    pub regions: usize,
    pub violations: Vec<PeriodicViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicError {
    #[error("surface genus is {0}, expected the sphere")]
    NotSphere(usize),
    #[error("invalid periodic structure: {} violation(s)", .0.violations.len())]
    Invalid(StructureReport),
    #[error("orbit {orbit} with region {region} is not a swallow candidate")]
    NotACandidate { orbit: usize, region: usize },
    #[error("region {region} did not reduce to a single sink and source")]
    Stuck { region: usize },
    #[error("no leaf region among the remaining regions")]
    NoLeaf,
    #[error("trace step {step}: state hash mismatch")]
    HashMismatch { step: usize },
    #[error("trace step {step}: surface genus changed")]
    GenusChanged { step: usize },
    #[error("trace step {step}: move {mv:?} has no region")]
    MissingRegion { step: usize, mv: Move },
    #[error(transparent)]
    Cobordism(#[from] CobordismError),
}

fn mark_in_range(s: &SkeletonMap, m: OrbitMark) -> bool {
    match m {
        OrbitMark::Vertex(k) => k < s.map.num_vertices(),
        OrbitMark::Face(k) => k < s.map.num_faces(),
    }
}

impl PeriodicStructure {
    pub fn region_index(&self, id: usize) -> Option<usize> {
        self.regions.iter().position(|r| r.id == id)
    }

    pub fn orbit(&self, id: usize) -> Option<&Orbit> {
        self.orbits.iter().find(|o| o.id == id)
    }

    /// Regions on each orbit's sides, one entry per side.
    pub fn sides(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut sides: BTreeMap<usize, Vec<usize>> = self.orbits.iter().map(|o| (o.id, Vec::new())).collect();
        for r in &self.regions {
            for (&o, marks) in &r.orbit_marks {
                sides.entry(o).or_default().extend(std::iter::repeat_n(r.id, marks.len()));
            }
        }
        sides
    }

    /// Number of connected components of the region-orbit incidence graph
    /// and its cycle rank (orbits with two sides only).
    fn incidence_shape(&self) -> (usize, usize) {
        let ids: Vec<usize> = self.regions.iter().map(|r| r.id).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut edges = 0;
        let mut components = ids.len();
        for side in self.sides().values() {
            if side.len() != 2 {
                continue;
            }
            let (Some(a), Some(b)) = (ids.iter().position(|&i| i == side[0]), ids.iter().position(|&i| i == side[1]))
            else {
                continue;
            };
            edges += 1;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        (components, edges + components - ids.len())
    }

    /// Genus of the closed surface: region genera plus incidence cycle rank.
    pub fn computed_genus(&self) -> usize {
        self.regions.iter().map(|r| r.closed_field.map.genus()).sum::<usize>() + self.incidence_shape().1
    }

    /// Deterministic hash of the whole structure.
    pub fn state_hash(&self) -> String {
        hash_bytes(&serde_json::to_vec(&StructureFile::from(self)).expect("structure serializes"))
    }
}

pub fn validate_structure(p: &PeriodicStructure) -> StructureReport {
    let mut v = Vec::new();
    let mut seen = BTreeSet::new();
    for o in &p.orbits {
        if !seen.insert(o.id) {
            v.push(PeriodicViolation::DuplicateOrbitId { orbit: o.id });
        }
    }
    let mut seen = BTreeSet::new();
    for r in &p.regions {
        if !seen.insert(r.id) {
            v.push(PeriodicViolation::DuplicateRegionId { region: r.id });
        }
    }
    for r in &p.regions {
        let s = &r.closed_field;
        if s.role != SkeletonRole::SinkSkeleton {
            v.push(PeriodicViolation::WrongRole { region: r.id });
        }
        let actual = s.map.genus();
        if actual != r.genus {
            v.push(PeriodicViolation::RegionGenus { region: r.id, declared: r.genus, actual });
        }
        let mut used = BTreeSet::new();
        for (&o, marks) in &r.orbit_marks {
            let Some(orbit) = p.orbit(o) else {
                v.push(PeriodicViolation::UnknownOrbit { region: r.id, orbit: o });
                continue;
            };
            for &m in marks {
                let label = m.to_string();
                if !mark_in_range(s, m) {
                    v.push(PeriodicViolation::MarkOutOfRange { region: r.id, mark: label });
                    continue;
                }
                let wanted = matches!(
                    (orbit.polarity, m),
                    (Polarity::Attracting, OrbitMark::Vertex(_)) | (Polarity::Repelling, OrbitMark::Face(_))
                );
                if !wanted {
                    v.push(PeriodicViolation::PolarityMismatch { region: r.id, orbit: o, mark: label.clone() });
                }
                if !used.insert(m) {
                    v.push(PeriodicViolation::SharedMark { region: r.id, mark: label });
                }
            }
        }
        let vertices: BTreeSet<usize> =
            used.iter().filter_map(|m| if let OrbitMark::Vertex(k) = m { Some(*k) } else { None }).collect();
        let faces: BTreeSet<usize> =
            used.iter().filter_map(|m| if let OrbitMark::Face(k) = m { Some(*k) } else { None }).collect();
        if vertices != s.marked_vertices || faces != s.marked_faces {
            v.push(PeriodicViolation::MarkMismatch { region: r.id });
        }
        match reconstruct_field_graph(s) {
            Ok(fg) => {
                let report = validate_field_graph(&fg);
                if !report.valid {
                    v.push(PeriodicViolation::RegionField {
                        region: r.id,
                        detail: format!("{} field-graph violation(s)", report.violations.len()),
                    });
                }
            }
            Err(e) => v.push(PeriodicViolation::RegionField { region: r.id, detail: e.to_string() }),
        }
    }
    for (&orbit, side) in &p.sides() {
        if side.len() != 2 {
            v.push(PeriodicViolation::SideCount { orbit, sides: side.len() });
        }
    }
    let (components, cycle_rank) = p.incidence_shape();
    if components > 1 {
        v.push(PeriodicViolation::IncidenceDisconnected);
    }
    let region_genera: usize = p.regions.iter().map(|r| r.closed_field.map.genus()).sum();
    if p.surface_genus == 0 {
        if cycle_rank != 0 || components != 1 {
            v.push(PeriodicViolation::SphereNotTree);
        }
        for r in p.regions.iter().filter(|r| r.closed_field.map.genus() != 0) {
            v.push(PeriodicViolation::SphereRegionGenus { region: r.id });
        }
    }
    if region_genera + cycle_rank != p.surface_genus {
        v.push(PeriodicViolation::GenusConsistency { region_genera, cycle_rank, surface_genus: p.surface_genus });
    }
    StructureReport { valid: v.is_empty(), orbits: p.orbits.len(), regions: p.regions.len(), violations: v }
}

/// Merges available inside a region; marked entities never merge with each
/// other, and a merge of a marked with an unmarked entity is the orbit
/// absorbing a zero.
pub fn periodic_moves(r: &Region) -> Vec<Move> {
    let mut moves = crate::cobordism::sink_moves(&r.closed_field);
    moves.extend(crate::cobordism::source_moves(&r.closed_field));
    moves
}

/// Applies a merge inside region `region`, carrying the orbit marks along.
pub fn apply_region_move(p: &PeriodicStructure, region: usize, mv: &Move) -> Result<PeriodicStructure, PeriodicError> {
    let i = p.region_index(region).ok_or(CobordismError::MoveNotApplicable(mv.clone()))?;
    let r = &p.regions[i];
    let out = apply_move_full(&r.closed_field, mv)?;
    let orbit_marks = r
        .orbit_marks
        .iter()
        .map(|(&o, marks)| {
            let moved = marks
                .iter()
                .map(|m| match *m {
                    OrbitMark::Vertex(k) => OrbitMark::Vertex(out.vertex_map[k]),
                    OrbitMark::Face(k) => OrbitMark::Face(out.face_map[k]),
                })
                .collect();
            (o, moved)
        })
        .collect();
    let mut next = p.clone();
    next.regions[i] = Region { id: r.id, genus: r.genus, closed_field: out.skeleton, orbit_marks };
    Ok(next)
}

/// A leaf region with nothing left but the orbit and one zero.
fn is_candidate(p: &PeriodicStructure, orbit: usize, r: &Region) -> bool {
    let other_side_elsewhere = p.regions.iter().any(|o| o.id != r.id && o.orbit_marks.contains_key(&orbit));
    r.closed_field.map.genus() == 0
        && r.side_count() == 1
        && r.orbit_marks.contains_key(&orbit)
        && r.closed_field.map.num_edges() == 0
        && other_side_elsewhere
}

pub fn swallow_candidates(p: &PeriodicStructure) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in &p.regions {
        for &o in r.orbit_marks.keys() {
            if is_candidate(p, o, r) {
                out.push((o, r.id));
            }
        }
    }
    out
}

/// Deletes a minimal disc region; the orbit collapses to the point zero
/// inside it, which on the far side is simply an unmarked sink or source.
pub fn apply_swallow(p: &PeriodicStructure, orbit: usize, region: usize) -> Result<PeriodicStructure, PeriodicError> {
    let not = || PeriodicError::NotACandidate { orbit, region };
    let i = p.region_index(region).ok_or_else(not)?;
    if !is_candidate(p, orbit, &p.regions[i]) {
        return Err(not());
    }
    let mut next = p.clone();
    next.regions.remove(i);
    next.orbits.retain(|o| o.id != orbit);
    for r in &mut next.regions {
        if let Some(marks) = r.orbit_marks.remove(&orbit) {
            for m in marks {
                match m {
                    OrbitMark::Vertex(k) => r.closed_field.marked_vertices.remove(&k),
                    OrbitMark::Face(k) => r.closed_field.marked_faces.remove(&k),
                };
            }
        }
    }
    Ok(next)
}

/// Summary of a full sphere reduction.
#[derive(Debug, Clone)]
pub struct PeriodicReduction {
    pub trace: Trace,
    pub terminal: PeriodicStructure,
    pub swallows: usize,
}

fn push_step(trace: &mut Trace, mv: Move, region: usize, pre: &PeriodicStructure, post: &PeriodicStructure) {
    trace.steps.push(TraceStep { mv, pre: pre.state_hash(), post: post.state_hash(), region: Some(region) });
}

fn reduce_region(
    mut p: PeriodicStructure,
    region: usize,
    strategy: Strategy,
    trace: &mut Trace,
) -> Result<PeriodicStructure, PeriodicError> {
    loop {
        let i = p.region_index(region).expect("region exists");
        let Some(mv) = next_move(&p.regions[i].closed_field, strategy, trace.len()) else {
            break;
        };
        let next = apply_region_move(&p, region, &mv)?;
        push_step(trace, mv, region, &p, &next);
        p = next;
    }
    let i = p.region_index(region).expect("region exists");
    let m = &p.regions[i].closed_field.map;
    if m.num_vertices() != 1 || m.num_faces() != 1 {
        return Err(PeriodicError::Stuck { region });
    }
    Ok(p)
}

/// Reduces a sphere structure to the primitive reduced field: repeatedly
/// reduce the lowest-id leaf region and swallow its orbit, then reduce the
/// last region.
pub fn reduce_sphere_full(p: &PeriodicStructure) -> Result<PeriodicReduction, PeriodicError> {
    if p.surface_genus != 0 {
        return Err(PeriodicError::NotSphere(p.surface_genus));
    }
    let report = validate_structure(p);
    if !report.valid {
        return Err(PeriodicError::Invalid(report));
    }
    let mut trace = Trace::default();
    let mut state = p.clone();
    let mut swallows = 0;
    while !state.orbits.is_empty() {
        let leaf = state
            .regions
            .iter()
            .filter(|r| r.side_count() == 1)
            .map(|r| r.id)
            .min()
            .ok_or(PeriodicError::NoLeaf)?;
        state = reduce_region(state, leaf, Strategy::Phased, &mut trace)?;
        let i = state.region_index(leaf).expect("leaf exists");
        let orbit = *state.regions[i].orbit_marks.keys().next().expect("leaf has one orbit");
        let next = apply_swallow(&state, orbit, leaf)?;
        push_step(&mut trace, Move::Swallow { orbit, region: leaf }, leaf, &state, &next);
        state = next;
        swallows += 1;
    }
    let last = state.regions.first().map(|r| r.id).ok_or(PeriodicError::NoLeaf)?;
    state = reduce_region(state, last, Strategy::Phased, &mut trace)?;
    Ok(PeriodicReduction { trace, terminal: state, swallows })
}

/// Replays a periodic trace, checking hashes and that the surface genus
/// never changes. Returns every intermediate structure.
pub fn replay_periodic(p: &PeriodicStructure, trace: &Trace) -> Result<Vec<PeriodicStructure>, PeriodicError> {
    let genus = p.computed_genus();
    let mut states = vec![p.clone()];
    for (step, s) in trace.steps.iter().enumerate() {
        let cur = states.last().expect("non-empty");
        if cur.state_hash() != s.pre {
            return Err(PeriodicError::HashMismatch { step });
        }
        let next = match s.mv {
            Move::Swallow { orbit, region } => apply_swallow(cur, orbit, region)?,
            ref mv => {
                let region = s.region.ok_or_else(|| PeriodicError::MissingRegion { step, mv: mv.clone() })?;
                apply_region_move(cur, region, mv)?
            }
        };
        if next.state_hash() != s.post {
            return Err(PeriodicError::HashMismatch { step });
        }
        if next.computed_genus() != genus {
            return Err(PeriodicError::GenusChanged { step });
        }
        states.push(next);
    }
    Ok(states)
}

// ---- file format ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MarkEntry {
    One(OrbitMark),
    Many(Vec<OrbitMark>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionFile {
    pub id: usize,
    pub genus: usize,
    pub closed_field: SkeletonFile,
    #[serde(default)]
    pub orbit_marks: BTreeMap<usize, MarkEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub surface_genus: usize,
    pub orbits: Vec<Orbit>,
    pub regions: Vec<RegionFile>,
}

impl From<&PeriodicStructure> for StructureFile {
    fn from(p: &PeriodicStructure) -> Self {
        StructureFile {
            surface_genus: p.surface_genus,
            orbits: p.orbits.clone(),
            regions: p
                .regions
                .iter()
                .map(|r| RegionFile {
                    id: r.id,
                    genus: r.genus,
                    closed_field: SkeletonFile::from(&r.closed_field),
                    orbit_marks: r
                        .orbit_marks
                        .iter()
                        .map(|(&o, m)| (o, if m.len() == 1 { MarkEntry::One(m[0]) } else { MarkEntry::Many(m.clone()) }))
                        .collect(),
                })
                .collect(),
        }
    }
}

impl StructureFile {
    /// Loads the structure, translating mark indices through any dart
    /// renumbering of the closed fields. Out-of-range marks are kept as
    /// given so that validation reports them.
    pub fn to_structure(&self) -> Result<PeriodicStructure, IoError> {
        let mut regions = Vec::with_capacity(self.regions.len());
        for r in &self.regions {
            let loaded = r.closed_field.load()?;
            let orbit_marks = r
                .orbit_marks
                .iter()
                .map(|(&o, entry)| {
                    let marks = match entry {
                        MarkEntry::One(m) => vec![*m],
                        MarkEntry::Many(ms) => ms.clone(),
                    };
                    let marks = marks
                        .into_iter()
                        .map(|m| match m {
                            OrbitMark::Vertex(k) => OrbitMark::Vertex(*loaded.vertex_index.get(k).unwrap_or(&k)),
                            OrbitMark::Face(k) => OrbitMark::Face(*loaded.face_index.get(k).unwrap_or(&k)),
                        })
                        .collect();
                    (o, marks)
                })
                .collect();
            regions.push(Region { id: r.id, genus: r.genus, closed_field: loaded.skeleton, orbit_marks });
        }
        Ok(PeriodicStructure { surface_genus: self.surface_genus, orbits: self.orbits.clone(), regions })
    }
}
