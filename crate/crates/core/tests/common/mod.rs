#![allow(dead_code)]

use std::collections::BTreeMap;

use flowcob::cobordism::{apply_move, Anchor, Move};
use flowcob::field_graph::SkeletonMap;
use flowcob::periodic::{OrbitMark, Orbit, PeriodicStructure, Polarity, Region};
use flowcob::surface_map::CombinatorialMap;
use rand::seq::SliceRandom;
use rand::Rng;

/// Connected map with a uniformly random rotation on `2 * edges` darts,
/// retried until connected.
pub fn random_map<R: Rng>(rng: &mut R, edges: usize) -> CombinatorialMap {
    if edges == 0 {
        return CombinatorialMap::point();
    }
    loop {
        let mut sigma: Vec<usize> = (0..2 * edges).collect();
        sigma.shuffle(rng);
        if let Ok(m) = CombinatorialMap::from_sigma(sigma) {
            return m;
        }
    }
}

/// Random vertex split: the inverse of a sink merge.
pub fn random_vertex_split<R: Rng>(rng: &mut R, s: &SkeletonMap) -> Move {
    let m = &s.map;
    if m.num_darts() == 0 {
        return Move::InverseSinkMerge { vertex: 0, start: None, count: 0, mark: None };
    }
    let vertex = rng.gen_range(0..m.num_vertices());
    let darts = m.vertex_darts(vertex);
    let start = darts[rng.gen_range(0..darts.len())];
    Move::InverseSinkMerge { vertex, start: Some(start), count: rng.gen_range(0..=darts.len()), mark: None }
}

/// Random face split: the inverse of a source merge.
pub fn random_face_split<R: Rng>(rng: &mut R, s: &SkeletonMap) -> Move {
    let m = &s.map;
    if m.num_darts() == 0 {
        return Move::InverseSourceMerge { a_after: Anchor::Isolated, b_after: Anchor::AfterNew, mark: None };
    }
    let a = rng.gen_range(0..m.num_darts());
    let face = m.face_of(m.sigma(a));
    let same: Vec<usize> = (0..m.num_darts()).filter(|&d| m.face_of(m.sigma(d)) == face).collect();
    let b_after = if rng.gen_bool(0.25) { Anchor::AfterNew } else { Anchor::After(*same.choose(rng).unwrap()) };
    Move::InverseSourceMerge { a_after: Anchor::After(a), b_after, mark: None }
}

/// Grows `s` by random inverse merges until it has at least `v` vertices
/// and `f` faces.
pub fn grow<R: Rng>(rng: &mut R, mut s: SkeletonMap, v: usize, f: usize) -> SkeletonMap {
    while s.map.num_vertices() < v || s.map.num_faces() < f {
        let mv = if s.map.num_vertices() < v && (s.map.num_faces() >= f || rng.gen_bool(0.5)) {
            random_vertex_split(rng, &s)
        } else {
            random_face_split(rng, &s)
        };
        s = apply_move(&s, &mv).expect("random inverse merge applies");
    }
    s
}

/// Random sphere structure with `orbits` orbits on a random region tree.
/// Region contents are drawn from `pool` (genus-0 skeletons), grown when a
/// region needs more vertices or faces than the drawn skeleton has.
pub fn random_sphere_structure<R: Rng>(rng: &mut R, orbits: usize, pool: &[SkeletonMap]) -> PeriodicStructure {
    let regions = orbits + 1;
    let mut ids: Vec<usize> = (0..regions).map(|i| 10 * i + 3).collect();
    ids.shuffle(rng);
    let polarity: Vec<Polarity> =
        (0..orbits).map(|_| if rng.gen_bool(0.5) { Polarity::Attracting } else { Polarity::Repelling }).collect();
    // orbit k joins region k + 1 to an earlier region
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); regions];
    for k in 0..orbits {
        let parent = rng.gen_range(0..=k);
        incident[parent].push(k);
        incident[k + 1].push(k);
    }
    let mut out = Vec::with_capacity(regions);
    for (i, orbit_list) in incident.iter().enumerate() {
        let need_v = orbit_list.iter().filter(|&&o| polarity[o] == Polarity::Attracting).count();
        let need_f = orbit_list.len() - need_v;
        let base = pool[rng.gen_range(0..pool.len())].clone();
        let s = grow(rng, base, need_v, need_f);
        let mut vs: Vec<usize> = (0..s.map.num_vertices()).collect();
        let mut fs: Vec<usize> = (0..s.map.num_faces()).collect();
        vs.shuffle(rng);
        fs.shuffle(rng);
        let mut marks: BTreeMap<usize, Vec<OrbitMark>> = BTreeMap::new();
        for &o in orbit_list {
            let m = match polarity[o] {
                Polarity::Attracting => OrbitMark::Vertex(vs.pop().unwrap()),
                Polarity::Repelling => OrbitMark::Face(fs.pop().unwrap()),
            };
            marks.insert(o, vec![m]);
        }
        out.push(Region::new(ids[i], s, marks));
    }
    out.shuffle(rng);
    PeriodicStructure {
        surface_genus: 0,
        orbits: (0..orbits).map(|id| Orbit { id, polarity: polarity[id] }).collect(),
        regions: out,
    }
}
