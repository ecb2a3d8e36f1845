//! Rotation-system combinatorial maps on closed oriented surfaces.
//!
//! A map on `n` darts is a pair of permutations: the edge involution `alpha`
//! and the counterclockwise vertex rotation `sigma`. Vertices are orbits of
//! `sigma`, edges are orbits of `alpha` and faces are orbits of
//! `phi = sigma ∘ alpha`, i.e. `phi(d) = sigma(alpha(d))`.
//!
//! Internally darts are always numbered so that `alpha(2i) = 2i + 1`; the
//! constructor renumbers any fixed-point-free involution into that form.
//! Vertex and face indices are assigned by increasing minimal dart.

use std::collections::VecDeque;

use thiserror::Error;

/// Index of a dart (half-edge).
pub type Dart = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("alpha has {alpha} entries but sigma has {sigma}")]
    SizeMismatch { alpha: usize, sigma: usize },
    #[error("dart image {image} at position {dart} is out of range for {n} darts")]
    OutOfRange { dart: Dart, image: usize, n: usize },
    #[error("alpha is not an involution at dart {0}")]
    NotInvolution(Dart),
    #[error("alpha fixes dart {0}")]
    FixedPointInAlpha(Dart),
    #[error("sigma is not a permutation (dart {0} has two preimages)")]
    NotPermutation(Dart),
    #[error("map is not connected")]
    Disconnected,
}

/// A connected graph cellularly embedded on a closed oriented surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialMap {
    sigma: Vec<Dart>,
    isolated_vertices: usize,
    vertex_of: Vec<usize>,
    face_of: Vec<usize>,
    vertices: Vec<Vec<Dart>>,
    faces: Vec<Vec<Dart>>,
}

/// Dart bijection witnessing an isomorphism `a -> b`: `mapping[d]` is the
/// image in `b` of dart `d` of `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DartBijection {
    pub mapping: Vec<Dart>,
}

impl DartBijection {
    pub fn apply(&self, d: Dart) -> Dart {
        self.mapping[d]
    }

    pub fn inverse(&self) -> DartBijection {
        let mut inv = vec![0; self.mapping.len()];
        for (d, &img) in self.mapping.iter().enumerate() {
            inv[img] = d;
        }
        DartBijection { mapping: inv }
    }
}

#[inline]
pub fn alpha(d: Dart) -> Dart {
    d ^ 1
}

fn orbits(perm: &[Dart]) -> (Vec<Vec<Dart>>, Vec<usize>) {
    let n = perm.len();
    let mut owner = vec![usize::MAX; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if owner[start] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut cycle = Vec::new();
        let mut d = start;
        while owner[d] == usize::MAX {
            owner[d] = id;
            cycle.push(d);
            d = perm[d];
        }
        cycles.push(cycle);
    }
    (cycles, owner)
}

fn check_permutation(perm: &[usize], n: usize) -> Result<(), MapError> {
    let mut seen = vec![false; n];
    for (d, &img) in perm.iter().enumerate() {
        if img >= n {
            return Err(MapError::OutOfRange { dart: d, image: img, n });
        }
        if seen[img] {
            return Err(MapError::NotPermutation(img));
        }
        seen[img] = true;
    }
    Ok(())
}

impl CombinatorialMap {
    /// Builds a map from arbitrary `alpha` and `sigma`, renumbering darts so
    /// that `alpha` becomes canonical. Darts are renumbered in order of first
    /// appearance: the smallest unseen dart `d` becomes `2k`, `alpha(d)`
    /// becomes `2k + 1`.
    pub fn build(alpha_in: &[usize], sigma_in: &[usize]) -> Result<Self, MapError> {
        let n = alpha_in.len();
        if sigma_in.len() != n {
            return Err(MapError::SizeMismatch { alpha: n, sigma: sigma_in.len() });
        }
        for (d, &img) in alpha_in.iter().enumerate() {
            if img >= n {
                return Err(MapError::OutOfRange { dart: d, image: img, n });
            }
        }
        for (d, &img) in alpha_in.iter().enumerate() {
            if img == d {
                return Err(MapError::FixedPointInAlpha(d));
            }
            if alpha_in[img] != d {
                return Err(MapError::NotInvolution(d));
            }
        }
        check_permutation(sigma_in, n)?;
        if n == 0 {
            return Self::from_canonical(Vec::new(), 1);
        }
        let mut relabel = vec![usize::MAX; n];
        let mut next = 0;
        for d in 0..n {
            if relabel[d] == usize::MAX {
                relabel[d] = next;
                relabel[alpha_in[d]] = next + 1;
                next += 2;
            }
        }
        let mut sigma = vec![0; n];
        for d in 0..n {
            sigma[relabel[d]] = relabel[sigma_in[d]];
        }
        Self::from_canonical(sigma, 0)
    }

    /// Builds a map whose `alpha` is the canonical `d ^ 1`.
    pub fn from_sigma(sigma: Vec<Dart>) -> Result<Self, MapError> {
        let isolated = usize::from(sigma.is_empty());
        Self::from_canonical(sigma, isolated)
    }

    /// The map with one vertex and no edges.
    pub fn point() -> Self {
        Self::from_canonical(Vec::new(), 1).expect("single vertex map is valid")
    }

    /// Low-level constructor: `sigma` over darts with canonical `alpha`, plus
    /// a count of isolated (dartless) vertices. Connectivity forces either
    /// `isolated == 0` with darts present, or a single isolated vertex.
    pub fn from_canonical(sigma: Vec<Dart>, isolated: usize) -> Result<Self, MapError> {
        let n = sigma.len();
        if n % 2 == 1 {
            return Err(MapError::FixedPointInAlpha(n - 1));
        }
        check_permutation(&sigma, n)?;
        match (n, isolated) {
            (0, 1) => {}
            (0, _) => return Err(MapError::Disconnected),
            (_, 0) => {}
            _ => return Err(MapError::Disconnected),
        }
        if n > 0 && !connected(&sigma) {
            return Err(MapError::Disconnected);
        }
        let (vertices, vertex_of) = orbits(&sigma);
        let phi: Vec<Dart> = (0..n).map(|d| sigma[alpha(d)]).collect();
        let (mut faces, mut face_of) = orbits(&phi);
        if n == 0 {
            faces = vec![Vec::new()];
            face_of = Vec::new();
        }
        let mut vertices = vertices;
        if isolated == 1 {
            vertices.push(Vec::new());
        }
        let m = CombinatorialMap { sigma, isolated_vertices: isolated, vertex_of, face_of, vertices, faces };
        debug_assert!((2 + m.num_edges() as i64 - m.num_vertices() as i64 - m.num_faces() as i64) % 2 == 0);
        Ok(m)
    }

    pub fn num_darts(&self) -> usize {
        self.sigma.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn isolated_vertices(&self) -> usize {
        self.isolated_vertices
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }

    pub fn sigma_slice(&self) -> &[Dart] {
        &self.sigma
    }

    pub fn alpha_vec(&self) -> Vec<Dart> {
        (0..self.num_darts()).map(alpha).collect()
    }

    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma[alpha(d)]
    }

    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }

    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d]
    }

    /// Rotation cycle of vertex `v`, starting from its minimal dart.
    pub fn vertex_darts(&self, v: usize) -> &[Dart] {
        &self.vertices[v]
    }

    /// Boundary walk of face `f` under `phi`, starting from its minimal dart.
    pub fn face_darts(&self, f: usize) -> &[Dart] {
        &self.faces[f]
    }

    /// All face orbits. The dartless map has one empty face.
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }

    pub fn vertices(&self) -> &[Vec<Dart>] {
        &self.vertices
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    /// Genus from `V - E + F = 2 - 2g`.
    pub fn genus(&self) -> usize {
        let twice = 2 - self.euler_characteristic();
        debug_assert!(twice >= 0 && twice % 2 == 0);
        (twice / 2) as usize
    }

    /// Edge index of a dart.
    pub fn edge_of(d: Dart) -> usize {
        d / 2
    }

    pub fn is_loop(&self, edge: usize) -> bool {
        self.vertex_of[2 * edge] == self.vertex_of[2 * edge + 1]
    }

    /// Dual map: same darts and `alpha`. Its vertices are the faces; the
    /// rotation around a face vertex is `phi` reversed, so the dual lives on
    /// the same oriented surface (`phi` itself walks faces clockwise).
    pub fn dual(&self) -> CombinatorialMap {
        let n = self.num_darts();
        let mut rot = vec![0; n];
        for d in 0..n {
            rot[self.phi(d)] = d;
        }
        CombinatorialMap::from_canonical(rot, self.isolated_vertices).expect("dual of a connected map is connected")
    }

    /// Mirror image: rotation reversed.
    pub fn mirror(&self) -> CombinatorialMap {
        let mut inv = vec![0; self.num_darts()];
        for (d, &s) in self.sigma.iter().enumerate() {
            inv[s] = d;
        }
        CombinatorialMap::from_canonical(inv, self.isolated_vertices).expect("mirror of a connected map is connected")
    }

    /// Applies a dart relabeling `perm` (old -> new) that preserves edge pairing.
    pub fn relabel(&self, perm: &[Dart]) -> Result<CombinatorialMap, MapError> {
        let n = self.num_darts();
        check_permutation(perm, n)?;
        for d in 0..n {
            if perm[alpha(d)] != alpha(perm[d]) {
                return Err(MapError::NotInvolution(d));
            }
        }
        let mut sigma = vec![0; n];
        for d in 0..n {
            sigma[perm[d]] = perm[self.sigma[d]];
        }
        CombinatorialMap::from_canonical(sigma, self.isolated_vertices)
    }
}

fn connected(sigma: &[Dart]) -> bool {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(d) = stack.pop() {
        for next in [alpha(d), sigma[d]] {
            if !seen[next] {
                seen[next] = true;
                count += 1;
                stack.push(next);
            }
        }
    }
    count == n
}

/// Free-function form of [`CombinatorialMap::build`].
pub fn build_map(alpha: &[usize], sigma: &[usize]) -> Result<CombinatorialMap, MapError> {
    CombinatorialMap::build(alpha, sigma)
}

pub fn euler_genus(m: &CombinatorialMap) -> usize {
    m.genus()
}

pub fn faces(m: &CombinatorialMap) -> Vec<Vec<Dart>> {
    m.faces().to_vec()
}

pub fn dual_map(m: &CombinatorialMap) -> CombinatorialMap {
    m.dual()
}

/// Tries to extend `root_a -> root_b` to an isomorphism. Colors, when given,
/// must agree dart by dart.
fn extend_from(
    a: &CombinatorialMap,
    b: &CombinatorialMap,
    root_b: Dart,
    colors: Option<(&[u8], &[u8])>,
) -> Option<DartBijection> {
    let n = a.num_darts();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut queue = VecDeque::new();
    map[0] = root_b;
    used[root_b] = true;
    queue.push_back(0);
    while let Some(d) = queue.pop_front() {
        let img = map[d];
        if let Some((ca, cb)) = colors {
            if ca[d] != cb[img] {
                return None;
            }
        }
        for (next_a, next_b) in [(alpha(d), alpha(img)), (a.sigma(d), b.sigma(img))] {
            if map[next_a] == usize::MAX {
                if used[next_b] {
                    return None;
                }
                map[next_a] = next_b;
                used[next_b] = true;
                queue.push_back(next_a);
            } else if map[next_a] != next_b {
                return None;
            }
        }
    }
    Some(DartBijection { mapping: map })
}

fn same_shape(a: &CombinatorialMap, b: &CombinatorialMap) -> bool {
    a.num_darts() == b.num_darts()
        && a.num_vertices() == b.num_vertices()
        && a.num_faces() == b.num_faces()
        && a.isolated_vertices == b.isolated_vertices
}

/// Searches for an orientation-preserving isomorphism by anchoring dart 0 of
/// `a` at every dart of `b` and propagating.
pub fn map_isomorphic(a: &CombinatorialMap, b: &CombinatorialMap) -> Option<DartBijection> {
    colored_isomorphism(a, b, None)
}

/// Isomorphism that also respects a per-dart coloring.
pub fn colored_isomorphism(
    a: &CombinatorialMap,
    b: &CombinatorialMap,
    colors: Option<(&[u8], &[u8])>,
) -> Option<DartBijection> {
    all_isomorphisms(a, b, colors).next()
}

/// Every isomorphism `a -> b` (respecting colors when given), one per anchor.
pub fn all_isomorphisms<'a>(
    a: &'a CombinatorialMap,
    b: &'a CombinatorialMap,
    colors: Option<(&'a [u8], &'a [u8])>,
) -> impl Iterator<Item = DartBijection> + 'a {
    let shape_ok = same_shape(a, b);
    let n = a.num_darts();
    let empty = shape_ok && n == 0;
    let anchors = if shape_ok && n > 0 { 0..n } else { 0..0 };
    std::iter::once(empty)
        .filter(|&e| e)
        .map(|_| DartBijection { mapping: Vec::new() })
        .chain(anchors.filter_map(move |root| extend_from(a, b, root, colors)))
}

/// Labeling of darts reached by a breadth-first walk from `root`, assigning
/// each newly reached dart and its `alpha` partner consecutive labels.
fn canonical_labeling(m: &CombinatorialMap, root: Dart) -> Vec<Dart> {
    let n = m.num_darts();
    let mut label = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    label[root] = 0;
    label[alpha(root)] = 1;
    order.push(root);
    order.push(alpha(root));
    let mut i = 0;
    while i < order.len() {
        let s = m.sigma(order[i]);
        if label[s] == usize::MAX {
            let next = order.len();
            label[s] = next;
            label[alpha(s)] = next + 1;
            order.push(s);
            order.push(alpha(s));
        }
        i += 1;
    }
    label
}

fn encode(m: &CombinatorialMap, label: &[Dart], colors: Option<&[u8]>) -> Vec<u8> {
    let n = m.num_darts();
    let mut relabeled = vec![0u32; n];
    let mut col = vec![0u8; n];
    for d in 0..n {
        relabeled[label[d]] = label[m.sigma(d)] as u32;
        if let Some(c) = colors {
            col[label[d]] = c[d];
        }
    }
    let mut out = Vec::with_capacity(8 + 5 * n);
    out.extend_from_slice(&(n as u32).to_be_bytes());
    out.extend_from_slice(&(m.isolated_vertices as u32).to_be_bytes());
    for d in 0..n {
        out.extend_from_slice(&relabeled[d].to_be_bytes());
        if colors.is_some() {
            out.push(col[d]);
        }
    }
    out
}

/// Lexicographically minimal serialization over all rooted labelings.
/// Two maps have equal forms exactly when they are isomorphic.
pub fn canonical_form(m: &CombinatorialMap) -> Vec<u8> {
    canonical_form_colored(m, None)
}

pub fn canonical_form_colored(m: &CombinatorialMap, colors: Option<&[u8]>) -> Vec<u8> {
    if m.num_darts() == 0 {
        return encode(m, &[], colors);
    }
    (0..m.num_darts())
        .map(|root| encode(m, &canonical_labeling(m, root), colors))
        .min()
        .expect("at least one dart")
}

/// Rebuilds the canonical representative encoded by an uncolored
/// [`canonical_form`].
pub fn map_from_canonical_form(form: &[u8]) -> Option<CombinatorialMap> {
    if form.len() < 8 {
        return None;
    }
    let n = u32::from_be_bytes(form[0..4].try_into().ok()?) as usize;
    let isolated = u32::from_be_bytes(form[4..8].try_into().ok()?) as usize;
    if form.len() != 8 + 4 * n {
        return None;
    }
    let sigma = (0..n)
        .map(|d| u32::from_be_bytes(form[8 + 4 * d..12 + 4 * d].try_into().unwrap()) as usize)
        .collect();
    CombinatorialMap::from_canonical(sigma, isolated).ok()
}
