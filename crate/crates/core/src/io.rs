//! JSON file formats for maps, field graphs and skeletons.
//!
//! All three share the map fields `n_darts`, `isolated_vertices`, `alpha`
//! and `sigma`. Loaders accept any fixed-point-free `alpha` and renumber
//! darts so that `alpha(d) = d ^ 1`; per-vertex and per-dart data is carried
//! through the renumbering. Writers always emit the canonical form.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field_graph::{FieldGraph, FieldGraphError, NodeKind, SkeletonMap, SkeletonRole};
use crate::surface_map::{alpha, CombinatorialMap, Dart, MapError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("n_darts is {declared} but alpha has {actual} entries")]
    DartCount { declared: usize, actual: usize },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    FieldGraph(#[from] FieldGraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub n_darts: usize,
    #[serde(default)]
    pub isolated_vertices: usize,
    pub alpha: Vec<usize>,
    pub sigma: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldGraphFile {
    #[serde(flatten)]
    pub map: MapFile,
    pub kinds: Vec<NodeKind>,
    pub tail: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonFile {
    #[serde(flatten)]
    pub map: MapFile,
    #[serde(default = "default_role")]
    pub role: SkeletonRole,
    #[serde(default)]
    pub marked_vertices: BTreeSet<usize>,
    #[serde(default)]
    pub marked_faces: BTreeSet<usize>,
}

fn default_role() -> SkeletonRole {
    SkeletonRole::SinkSkeleton
}

impl From<&CombinatorialMap> for MapFile {
    fn from(m: &CombinatorialMap) -> Self {
        MapFile {
            n_darts: m.num_darts(),
            isolated_vertices: m.isolated_vertices(),
            alpha: m.alpha_vec(),
            sigma: m.sigma_slice().to_vec(),
        }
    }
}

impl From<&FieldGraph> for FieldGraphFile {
    fn from(fg: &FieldGraph) -> Self {
        FieldGraphFile { map: MapFile::from(fg.map()), kinds: fg.kinds().to_vec(), tail: fg.tails().to_vec() }
    }
}

impl From<&SkeletonMap> for SkeletonFile {
    fn from(s: &SkeletonMap) -> Self {
        SkeletonFile {
            map: MapFile::from(&s.map),
            role: s.role,
            marked_vertices: s.marked_vertices.clone(),
            marked_faces: s.marked_faces.clone(),
        }
    }
}

/// A loaded map plus the renumbering applied to its darts (`relabel[old]`)
/// and the old vertex each new vertex came from.
struct Loaded {
    map: CombinatorialMap,
    relabel: Vec<Dart>,
    old_vertex: Vec<usize>,
}

fn vertex_order(sigma: &[usize]) -> Vec<usize> {
    // owner[d] = index of d's orbit, orbits numbered by minimal dart
    let mut owner = vec![usize::MAX; sigma.len()];
    let mut next = 0;
    for start in 0..sigma.len() {
        if owner[start] != usize::MAX {
            continue;
        }
        let mut d = start;
        while owner[d] == usize::MAX {
            owner[d] = next;
            d = sigma[d];
        }
        next += 1;
    }
    owner
}

impl MapFile {
    fn load(&self) -> Result<Loaded, IoError> {
        if self.n_darts != self.alpha.len() {
            return Err(IoError::DartCount { declared: self.n_darts, actual: self.alpha.len() });
        }
        let n = self.n_darts;
        let canonical = self.alpha.iter().enumerate().all(|(d, &a)| a == alpha(d));
        let map = if n == 0 {
            CombinatorialMap::from_canonical(self.sigma.clone(), self.isolated_vertices.max(1))?
        } else if canonical {
            CombinatorialMap::from_canonical(self.sigma.clone(), self.isolated_vertices)?
        } else {
            if self.isolated_vertices != 0 {
                return Err(MapError::Disconnected.into());
            }
            CombinatorialMap::build(&self.alpha, &self.sigma)?
        };
        let relabel = if canonical {
            (0..n).collect()
        } else {
            let mut relabel = vec![usize::MAX; n];
            let mut next = 0;
            for d in 0..n {
                if relabel[d] == usize::MAX {
                    relabel[d] = next;
                    relabel[self.alpha[d]] = next + 1;
                    next += 2;
                }
            }
            relabel
        };
        let owner = vertex_order(&self.sigma);
        let mut old_vertex = vec![0; map.num_vertices()];
        for (old, &new) in relabel.iter().enumerate() {
            old_vertex[map.vertex_of(new)] = owner[old];
        }
        Ok(Loaded { map, relabel, old_vertex })
    }

    pub fn to_map(&self) -> Result<CombinatorialMap, IoError> {
        Ok(self.load()?.map)
    }
}

impl FieldGraphFile {
    pub fn to_field_graph(&self) -> Result<FieldGraph, IoError> {
        let l = self.map.load()?;
        let n = l.map.num_vertices();
        if self.kinds.len() != n {
            return Err(FieldGraphError::KindCount { expected: n, got: self.kinds.len() }.into());
        }
        let kinds = l.old_vertex.iter().map(|&v| self.kinds[v]).collect();
        let edges = l.map.num_edges();
        if self.tail.len() != edges {
            return Err(FieldGraphError::TailCount { expected: edges, got: self.tail.len() }.into());
        }
        // With non-canonical alpha, tails are read as one dart per edge in
        // any order.
        let mut tail = vec![None; edges];
        for (e, &t) in self.tail.iter().enumerate() {
            let nt = *l.relabel.get(t).ok_or(FieldGraphError::TailNotOnEdge { edge: e, dart: t })?;
            if tail[nt / 2].replace(nt).is_some() {
                return Err(FieldGraphError::TailNotOnEdge { edge: e, dart: t }.into());
            }
        }
        let tail = tail.into_iter().map(|t| t.expect("each edge has a tail")).collect();
        Ok(FieldGraph::new(l.map, kinds, tail)?)
    }
}

/// Skeleton loaded from a file, with the file's vertex and face indices
/// translated to the loaded map's (`vertex_index[file_vertex]`).
pub struct LoadedSkeleton {
    pub skeleton: SkeletonMap,
    pub vertex_index: Vec<usize>,
    pub face_index: Vec<usize>,
}

impl SkeletonFile {
    pub fn to_skeleton(&self) -> Result<SkeletonMap, IoError> {
        Ok(self.load()?.skeleton)
    }

    pub fn load(&self) -> Result<LoadedSkeleton, IoError> {
        let l = self.map.load()?;
        let mut vertex_index = vec![0; l.old_vertex.len()];
        for (new, &old) in l.old_vertex.iter().enumerate() {
            vertex_index[old] = new;
        }
        // File faces are numbered by minimal dart in the file's numbering.
        let n = self.map.n_darts;
        let face_index = if n == 0 {
            vec![0]
        } else {
            let old_phi: Vec<usize> = (0..n).map(|d| self.map.sigma[self.map.alpha[d]]).collect();
            let old_face = vertex_order(&old_phi);
            let mut face_index = vec![usize::MAX; l.map.num_faces()];
            for d in 0..n {
                let f = old_face[d];
                if face_index[f] == usize::MAX {
                    face_index[f] = l.map.face_of(l.relabel[d]);
                }
            }
            face_index
        };
        let translate = |set: &BTreeSet<usize>, index: &[usize], what| {
            set.iter()
                .map(|&i| index.get(i).copied().ok_or(FieldGraphError::MarkOutOfRange { what, index: i }))
                .collect::<Result<BTreeSet<_>, _>>()
        };
        let marked_vertices = translate(&self.marked_vertices, &vertex_index, "vertex")?;
        let marked_faces = translate(&self.marked_faces, &face_index, "face")?;
        let skeleton = SkeletonMap::with_marks(l.map, self.role, marked_vertices, marked_faces)?;
        Ok(LoadedSkeleton { skeleton, vertex_index, face_index })
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

pub fn load_map(path: &Path) -> Result<CombinatorialMap, IoError> {
    serde_json::from_str::<MapFile>(&read_text(path)?)?.to_map()
}

pub fn load_field_graph(path: &Path) -> Result<FieldGraph, IoError> {
    serde_json::from_str::<FieldGraphFile>(&read_text(path)?)?.to_field_graph()
}

pub fn load_skeleton(path: &Path) -> Result<SkeletonMap, IoError> {
    serde_json::from_str::<SkeletonFile>(&read_text(path)?)?.to_skeleton()
}

/// Writes through a temporary file in the target directory, then renames,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    use std::io::Write;
    let err = |source| IoError::Write { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}
