//! Orientable 2-cell embeddings as rotation systems.
//!
//! Face tracing convention: the dart after `(u, v)` is `(v, w)` where `w`
//! immediately follows `u` in the rotation at `v`. Reversing every rotation
//! ([`Embedding::mirror`]) reverses every face.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_bipartite, Graph, VertexId};

/// An oriented side of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dart {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Dart {
    pub fn new(tail: VertexId, head: VertexId) -> Self {
        Dart { tail, head }
    }

    pub fn reversed(self) -> Self {
        Dart::new(self.head, self.tail)
    }
}

/// A graph together with a cyclic order of the neighbours of every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    graph: Graph,
    rotation: Vec<Vec<VertexId>>,
}

impl Embedding {
    /// Builds an embedding, rejecting rotations that are not permutations of
    /// the neighbour sets.
    pub fn new(graph: Graph, rotation: Vec<Vec<VertexId>>) -> Result<Self> {
        let e = Embedding { graph, rotation };
        match rotation_violations(&e).first() {
            None => Ok(e),
            Some(v) => Err(Error::InvalidEmbedding(v.to_string())),
        }
    }

    /// No checks; use [`validate`] to inspect the result.
    pub fn from_parts_unchecked(graph: Graph, rotation: Vec<Vec<VertexId>>) -> Self {
        Embedding { graph, rotation }
    }

    /// Rotation at every vertex equal to its sorted neighbour list.
    pub fn with_sorted_rotation(graph: Graph) -> Self {
        let rotation = graph
            .vertices()
            .map(|v| graph.neighbors(v).to_vec())
            .collect();
        Embedding { graph, rotation }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rotation(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[v.index()]
    }

    pub fn rotations(&self) -> &[Vec<VertexId>] {
        &self.rotation
    }

    pub fn into_parts(self) -> (Graph, Vec<Vec<VertexId>>) {
        (self.graph, self.rotation)
    }

    /// Neighbour following `u` in the rotation at `v`.
    pub fn successor_at(&self, v: VertexId, u: VertexId) -> Option<VertexId> {
        let rot = &self.rotation[v.index()];
        let p = rot.iter().position(|&x| x == u)?;
        Some(rot[(p + 1) % rot.len()])
    }

    pub fn face_successor(&self, d: Dart) -> Option<Dart> {
        self.successor_at(d.head, d.tail)
            .map(|w| Dart::new(d.head, w))
    }

    /// Vertex walk of the face containing `d`, starting at `d.tail`.
    pub fn face_walk(&self, d: Dart) -> Option<Vec<VertexId>> {
        let mut walk = vec![d.tail];
        let mut cur = self.face_successor(d)?;
        let limit = 2 * self.graph.m() + 1;
        while cur != d {
            walk.push(cur.tail);
            if walk.len() > limit {
                return None;
            }
            cur = self.face_successor(cur)?;
        }
        Some(walk)
    }

    /// Whether the closed walk `walk` is exactly one traced face.
    pub fn is_face(&self, walk: &[VertexId]) -> bool {
        let k = walk.len();
        if k < 3 {
            return false;
        }
        (0..k).all(|i| {
            let (a, b, c) = (walk[i], walk[(i + 1) % k], walk[(i + 2) % k]);
            self.graph.has_edge(a, b) && self.successor_at(b, a) == Some(c)
        })
    }

    /// Every rotation reversed; traces every face backwards.
    pub fn mirror(&self) -> Embedding {
        let rotation = self
            .rotation
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        Embedding {
            graph: self.graph.clone(),
            rotation,
        }
    }

    pub(crate) fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    /// Inserts `new` right after `after` in the rotation at `v`.
    pub(crate) fn insert_after(
        &mut self,
        v: VertexId,
        after: VertexId,
        new: VertexId,
    ) -> Result<()> {
        let rot = &mut self.rotation[v.index()];
        let p = rot
            .iter()
            .position(|&x| x == after)
            .ok_or_else(|| Error::InvalidSurgery(format!("{after} not in rotation at {v}")))?;
        rot.insert(p + 1, new);
        Ok(())
    }

    pub(crate) fn remove_from_rotation(&mut self, v: VertexId, u: VertexId) -> Result<()> {
        let rot = &mut self.rotation[v.index()];
        let p = rot
            .iter()
            .position(|&x| x == u)
            .ok_or_else(|| Error::InvalidSurgery(format!("{u} not in rotation at {v}")))?;
        rot.remove(p);
        Ok(())
    }

    /// Moves vertex `v` to `new_index[v]`. Labels travel with their vertices.
    pub fn relabel(&self, new_index: &[VertexId]) -> Result<Embedding> {
        let n = self.graph.n();
        if new_index.len() != n {
            return Err(Error::InvalidParameter(
                "relabel map has wrong length".into(),
            ));
        }
        let mut seen = vec![false; n];
        for &v in new_index {
            if v.index() >= n || std::mem::replace(&mut seen[v.index()], true) {
                return Err(Error::InvalidParameter(
                    "relabel map is not a permutation".into(),
                ));
            }
        }
        let mut graph = Graph::from_edges(
            n,
            self.graph
                .edges()
                .map(|(u, v)| (new_index[u.index()].index(), new_index[v.index()].index())),
        )?;
        if let Some(labels) = self.graph.labels() {
            let mut moved = vec![Vec::new(); n];
            for (v, l) in labels.iter().enumerate() {
                moved[new_index[v].index()] = l.clone();
            }
            graph = graph.with_labels(moved)?;
        }
        let mut rotation = vec![Vec::new(); n];
        for (v, rot) in self.rotation.iter().enumerate() {
            rotation[new_index[v].index()] = rot.iter().map(|u| new_index[u.index()]).collect();
        }
        Ok(Embedding { graph, rotation })
    }

    /// Sub-embedding induced on a vertex set closed under adjacency.
    fn restrict(&self, component: &[VertexId]) -> Embedding {
        let graph = self.graph.induced(component);
        let mut index = vec![u32::MAX; self.graph.n()];
        for (i, v) in component.iter().enumerate() {
            index[v.index()] = i as u32;
        }
        let rotation = component
            .iter()
            .map(|v| {
                self.rotation[v.index()]
                    .iter()
                    .map(|u| VertexId(index[u.index()]))
                    .collect()
            })
            .collect();
        Embedding { graph, rotation }
    }
}

/// One face as the vertex walk of its darts, started at its least dart.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Face {
    pub walk: Vec<VertexId>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.walk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walk.is_empty()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        let k = self.walk.len();
        (0..k).map(move |i| Dart::new(self.walk[i], self.walk[(i + 1) % k]))
    }

    pub fn least_dart(&self) -> Dart {
        self.darts().min().expect("non-empty face")
    }
}

/// The faces of an embedding, ordered by least dart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSet {
    faces: Vec<Face>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Face> {
        self.faces.iter()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.faces.iter().map(Face::len).collect()
    }

    pub fn total_length(&self) -> usize {
        self.faces.iter().map(Face::len).sum()
    }

    /// Index of the face containing `d`.
    pub fn face_of(&self, d: Dart) -> Option<usize> {
        self.faces.iter().position(|f| f.darts().any(|x| x == d))
    }
}

/// Dense dart numbering: dart `(v, adj[v][s])` has id `offset[v] + s`.
struct DartIndex<'a> {
    graph: &'a Graph,
    offset: Vec<usize>,
}

impl<'a> DartIndex<'a> {
    fn new(graph: &'a Graph) -> Self {
        let mut offset = Vec::with_capacity(graph.n() + 1);
        let mut acc = 0;
        for v in graph.vertices() {
            offset.push(acc);
            acc += graph.degree(v);
        }
        offset.push(acc);
        DartIndex { graph, offset }
    }

    fn id(&self, tail: VertexId, head: VertexId) -> usize {
        let slot = self
            .graph
            .neighbors(tail)
            .binary_search(&head)
            .expect("dart along an edge");
        self.offset[tail.index()] + slot
    }

    fn len(&self) -> usize {
        self.offset[self.graph.n()]
    }
}

/// Orbits of the face permutation.
pub fn trace_faces(e: &Embedding) -> Result<FaceSet> {
    if let Some(v) = rotation_violations(e).first() {
        return Err(Error::InvalidEmbedding(v.to_string()));
    }
    let g = &e.graph;
    let index = DartIndex::new(g);
    let mut next = vec![0usize; index.len()];
    let mut dart_of = Vec::with_capacity(index.len());
    for v in g.vertices() {
        for &u in g.neighbors(v) {
            dart_of.push(Dart::new(v, u));
        }
    }
    for (id, d) in dart_of.iter().enumerate() {
        let w = e.successor_at(d.head, d.tail).expect("validated rotation");
        next[id] = index.id(d.head, w);
    }
    let mut seen = vec![false; index.len()];
    let mut faces = Vec::new();
    for start in 0..index.len() {
        if seen[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            walk.push(dart_of[cur].tail);
            cur = next[cur];
        }
        debug_assert_eq!(cur, start);
        faces.push(Face { walk });
    }
    Ok(FaceSet { faces })
}

pub fn is_quadrilateral(fs: &FaceSet) -> bool {
    fs.faces.iter().all(|f| f.len() == 4)
}

/// Counts, genus and minimality verdict for an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub n: usize,
    pub m: usize,
    pub f: usize,
    pub genus: u64,
    pub quadrilateral: bool,
    pub bipartite: bool,
    pub lower_bound: u64,
    pub minimal: bool,
    pub construction_tag: String,
}

/// Genus from `n - m + f = 2 - 2g` for a connected embedding.
pub fn euler_genus(e: &Embedding) -> Result<EmbeddingCertificate> {
    let comps = e.graph.components();
    if comps.len() > 1 {
        return Err(Error::Disconnected {
            components: comps.len(),
        });
    }
    let fs = trace_faces(e)?;
    certificate_from_faces(e.graph(), &fs)
}

pub(crate) fn certificate_from_faces(g: &Graph, fs: &FaceSet) -> Result<EmbeddingCertificate> {
    let (n, m, f) = (g.n() as i64, g.m() as i64, fs.len() as i64);
    let twice = 2 - n + m - f;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::InvalidEmbedding(format!(
            "Euler characteristic gives non-integral or negative genus: n={n} m={m} f={f}"
        )));
    }
    let genus = (twice / 2) as u64;
    let bipartite = is_bipartite(g).is_some();
    let lower_bound = euler_lower_bound(g, bipartite);
    Ok(EmbeddingCertificate {
        n: g.n(),
        m: g.m(),
        f: fs.len(),
        genus,
        quadrilateral: is_quadrilateral(fs),
        bipartite,
        lower_bound,
        minimal: genus == lower_bound,
        construction_tag: String::new(),
    })
}

/// One certificate per connected component, in order of least vertex.
pub fn components_certificate(e: &Embedding) -> Result<Vec<EmbeddingCertificate>> {
    let comps = e.graph.components();
    if comps.len() == 1 {
        return Ok(vec![euler_genus(e)?]);
    }
    comps.iter().map(|c| euler_genus(&e.restrict(c))).collect()
}

fn is_forest(g: &Graph) -> bool {
    g.m() + g.components().len() == g.n()
}

/// `⌈1 + m/4 - n/2⌉`, floored at 0, for a connected bipartite graph.
pub fn genus_lower_bound(g: &Graph) -> Result<u64> {
    if is_bipartite(g).is_none() {
        return Err(Error::NotApplicable(
            "quadrilateral lower bound needs a bipartite graph".into(),
        ));
    }
    let comps = g.components().len();
    if comps > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    Ok(euler_lower_bound(g, true))
}

/// Euler bound with face length at least 4 (bipartite) or 3 (otherwise).
fn euler_lower_bound(g: &Graph, bipartite: bool) -> u64 {
    if is_forest(g) {
        return 0;
    }
    let (n, m) = (g.n() as i64, g.m() as i64);
    // g >= 1 + m/girth' - n/2 with girth' = 4 or 3, as one fraction.
    let bound = if bipartite {
        Integer::div_ceil(&(4 + m - 2 * n), &4)
    } else {
        Integer::div_ceil(&(6 + m - 3 * n), &6)
    };
    bound.max(0) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RotationCount {
        expected: usize,
        found: usize,
    },
    MissingNeighbor {
        vertex: VertexId,
        neighbor: VertexId,
    },
    NotANeighbor {
        vertex: VertexId,
        neighbor: VertexId,
    },
    DuplicateNeighbor {
        vertex: VertexId,
        neighbor: VertexId,
    },
    DartCoverage {
        dart: Dart,
        times: usize,
    },
    FaceLengthSum {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RotationCount { expected, found } => {
                write!(f, "expected {expected} rotations, found {found}")
            }
            Violation::MissingNeighbor { vertex, neighbor } => {
                write!(f, "rotation at {vertex} is missing neighbour {neighbor}")
            }
            Violation::NotANeighbor { vertex, neighbor } => {
                write!(f, "rotation at {vertex} lists non-neighbour {neighbor}")
            }
            Violation::DuplicateNeighbor { vertex, neighbor } => {
                write!(f, "rotation at {vertex} lists {neighbor} twice")
            }
            Violation::DartCoverage { dart, times } => write!(
                f,
                "dart {}->{} appears in {times} faces",
                dart.tail, dart.head
            ),
            Violation::FaceLengthSum { expected, found } => {
                write!(f, "face lengths sum to {found}, expected {expected}")
            }
        }
    }
}

fn rotation_violations(e: &Embedding) -> Vec<Violation> {
    let g = &e.graph;
    if e.rotation.len() != g.n() {
        return vec![Violation::RotationCount {
            expected: g.n(),
            found: e.rotation.len(),
        }];
    }
    let mut out = Vec::new();
    for v in g.vertices() {
        let nbrs = g.neighbors(v);
        let mut hit = vec![0usize; nbrs.len()];
        for &u in &e.rotation[v.index()] {
            match nbrs.binary_search(&u) {
                Ok(s) => {
                    hit[s] += 1;
                    if hit[s] == 2 {
                        out.push(Violation::DuplicateNeighbor {
                            vertex: v,
                            neighbor: u,
                        });
                    }
                }
                Err(_) => out.push(Violation::NotANeighbor {
                    vertex: v,
                    neighbor: u,
                }),
            }
        }
        for (s, &h) in hit.iter().enumerate() {
            if h == 0 {
                out.push(Violation::MissingNeighbor {
                    vertex: v,
                    neighbor: nbrs[s],
                });
            }
        }
    }
    out
}

/// All consistency problems of `e`; empty means valid.
pub fn validate(e: &Embedding) -> Vec<Violation> {
    let mut out = rotation_violations(e);
    if !out.is_empty() {
        return out;
    }
    let fs = trace_faces(e).expect("rotations validated");
    let index = DartIndex::new(&e.graph);
    let mut count = vec![0usize; index.len()];
    for face in fs.iter() {
        for d in face.darts() {
            count[index.id(d.tail, d.head)] += 1;
        }
    }
    for v in e.graph.vertices() {
        for &u in e.graph.neighbors(v) {
            let times = count[index.id(v, u)];
            if times != 1 {
                out.push(Violation::DartCoverage {
                    dart: Dart::new(v, u),
                    times,
                });
            }
        }
    }
    if fs.total_length() != 2 * e.graph.m() {
        out.push(Violation::FaceLengthSum {
            expected: 2 * e.graph.m(),
            found: fs.total_length(),
        });
    }
    out
}
