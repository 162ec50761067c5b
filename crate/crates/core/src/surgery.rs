//! Handle surgery on quadrilateral faces.
//!
//! A handle between two vertex-disjoint quadrilateral faces `F1 = (v0,v1,v2,v3)`
//! and `F2` adds the edges `v_k - w_k`, each spliced into the corner of the
//! consumed face at its endpoints. When `F2` runs opposite to `F1` under the
//! pairing (`F2` traced as `w0, w3, w2, w1`), the two faces are replaced by the
//! four quadrilaterals `(v_k, v_{k+1}, w_{k+1}, w_k)`, numbered by `k`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::embedding::{trace_faces, Dart, Embedding};
use crate::error::{Error, Result};
use crate::graph::VertexId;

/// A traced quadrilateral face.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadFace {
    pub vertices: [VertexId; 4],
    /// Index in the face set this face was read from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_id: Option<usize>,
}

impl QuadFace {
    pub fn new(vertices: [VertexId; 4]) -> Self {
        QuadFace {
            vertices,
            face_id: None,
        }
    }

    /// The same face as traced in the mirrored embedding.
    pub fn reversed(&self) -> Self {
        let [a, b, c, d] = self.vertices;
        QuadFace {
            vertices: [a, d, c, b],
            face_id: self.face_id,
        }
    }

    pub fn map(&self, f: impl Fn(VertexId) -> VertexId) -> Self {
        QuadFace {
            vertices: self.vertices.map(f),
            face_id: None,
        }
    }

    pub fn vertex_set(&self) -> [VertexId; 4] {
        let mut s = self.vertices;
        s.sort_unstable();
        s
    }

    /// Walk rotated to start at its least dart; equal keys mean the same face.
    pub fn key(&self) -> [VertexId; 4] {
        let w = self.vertices;
        let start = (0..4)
            .min_by_key(|&k| (w[k], w[(k + 1) % 4]))
            .expect("four corners");
        [0, 1, 2, 3].map(|k| w[(start + k) % 4])
    }

    fn has_distinct_vertices(&self) -> bool {
        let s = self.vertex_set();
        s.windows(2).all(|p| p[0] != p[1])
    }
}

/// Pairwise vertex-disjoint quadrilateral faces of one embedding.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceFamily {
    pub faces: Vec<QuadFace>,
}

impl FaceFamily {
    pub fn new(faces: Vec<QuadFace>) -> Self {
        FaceFamily { faces }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Covered vertices, sorted, with repeats kept.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.faces.iter().flat_map(|f| f.vertices).collect();
        vs.sort_unstable();
        vs
    }

    pub fn is_vertex_disjoint(&self) -> bool {
        self.vertices().windows(2).all(|p| p[0] != p[1])
    }

    /// Vertex-disjoint and covering exactly `0..n`.
    pub fn covers_all(&self, n: usize) -> bool {
        let vs = self.vertices();
        vs.len() == n && vs.iter().enumerate().all(|(i, v)| v.index() == i)
    }

    pub fn map(&self, f: impl Fn(&QuadFace) -> QuadFace) -> Self {
        FaceFamily {
            faces: self.faces.iter().map(f).collect(),
        }
    }
}

/// Face families available for future links.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceReservoir {
    pub families: Vec<FaceFamily>,
    pub copy_tag: String,
}

impl FaceReservoir {
    /// Checks that every face exists in `e`, families are face-disjoint,
    /// and every family is vertex-disjoint and covers all vertices of `e`.
    pub fn check_full_cover(&self, e: &Embedding) -> Result<()> {
        let n = e.graph().n();
        let mut seen = HashSet::new();
        for (i, fam) in self.families.iter().enumerate() {
            if !fam.covers_all(n) {
                return Err(Error::ConstructionInvariant(format!(
                    "family {i} of '{}' is not a vertex-disjoint cover of {n} vertices",
                    self.copy_tag
                )));
            }
            for face in &fam.faces {
                if !e.is_face(&face.vertices) {
                    return Err(Error::ConstructionInvariant(format!(
                        "family {i} of '{}' holds {:?}, which is not a face",
                        self.copy_tag, face.vertices
                    )));
                }
                if !seen.insert(face.key()) {
                    return Err(Error::ConstructionInvariant(format!(
                        "face {:?} appears in two families of '{}'",
                        face.vertices, self.copy_tag
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How the second face is matched against the first: `w_k` is
/// `f2[(offset - k) mod 4]` for an opposite pairing, `f2[(offset + k) mod 4]`
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pairing {
    pub offset: u8,
    pub opposite: bool,
}

impl Pairing {
    pub fn opposite(offset: u8) -> Self {
        Pairing {
            offset: offset % 4,
            opposite: true,
        }
    }

    pub fn parallel(offset: u8) -> Self {
        Pairing {
            offset: offset % 4,
            opposite: false,
        }
    }

    fn partner_index(self, k: usize) -> usize {
        let o = self.offset as usize;
        if self.opposite {
            (o + 4 - k) % 4
        } else {
            (o + k) % 4
        }
    }

    /// The pairing that sends `f1[k]` to `image(f1[k])` in `f2`, if any.
    pub fn realizing(
        f1: &QuadFace,
        f2: &QuadFace,
        image: impl Fn(VertexId) -> VertexId,
    ) -> Option<Self> {
        let target = f1.vertices.map(&image);
        (0..4u8)
            .flat_map(|o| [Pairing::opposite(o), Pairing::parallel(o)])
            .find(|p| (0..4).all(|k| f2.vertices[p.partner_index(k)] == target[k]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HandleKind {
    Add,
    Remove,
}

/// One handle operation, as written to the construction log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleRecord {
    pub kind: HandleKind,
    /// Faces destroyed by the operation.
    pub consumed: Vec<Vec<VertexId>>,
    /// Edges added (or removed), `[v_k, w_k]` in pairing order.
    pub edges: [[VertexId; 2]; 4],
    /// Faces created. For an added quadrilateral handle, face `k` is
    /// `(v_k, v_{k+1}, w_{k+1}, w_k)`.
    pub created: Vec<Vec<VertexId>>,
    pub delta_chi: i64,
    pub delta_quad_faces: i64,
    pub all_quadrilateral: bool,
}

impl HandleRecord {
    /// Created face `k` of a quadrilateral handle.
    pub fn handle_face(&self, k: usize) -> Option<QuadFace> {
        let w = self.created.get(k)?;
        let vertices: [VertexId; 4] = w.as_slice().try_into().ok()?;
        Some(QuadFace::new(vertices))
    }
}

/// Distinct face walks through the given darts of `e`.
fn orbits_through(e: &Embedding, darts: &[Dart]) -> Result<Vec<Vec<VertexId>>> {
    let mut seen: HashSet<Dart> = HashSet::new();
    let mut out = Vec::new();
    for &d in darts {
        if seen.contains(&d) {
            continue;
        }
        let walk = e
            .face_walk(d)
            .ok_or_else(|| Error::InvalidSurgery("face walk failed to close".into()))?;
        let k = walk.len();
        for i in 0..k {
            seen.insert(Dart::new(walk[i], walk[(i + 1) % k]));
        }
        out.push(walk);
    }
    Ok(out)
}

fn quad_darts(w: &[VertexId; 4]) -> impl Iterator<Item = Dart> + '_ {
    (0..4).map(move |i| Dart::new(w[i], w[(i + 1) % 4]))
}

/// Adds a handle in place; see [`add_handle`].
pub fn apply_handle(
    e: &mut Embedding,
    f1: &QuadFace,
    f2: &QuadFace,
    pairing: Pairing,
) -> Result<HandleRecord> {
    let v = f1.vertices;
    let u = f2.vertices;
    for f in [f1, f2] {
        if !f.has_distinct_vertices() {
            return Err(Error::InvalidSurgery(format!(
                "{:?} repeats a vertex",
                f.vertices
            )));
        }
        if !e.is_face(&f.vertices) {
            return Err(Error::InvalidSurgery(format!(
                "{:?} is not a face",
                f.vertices
            )));
        }
    }
    if v.iter().any(|x| u.contains(x)) {
        return Err(Error::InvalidSurgery(format!(
            "faces {v:?} and {u:?} share a vertex"
        )));
    }
    let w: [VertexId; 4] = [0, 1, 2, 3].map(|k| u[pairing.partner_index(k)]);
    for k in 0..4 {
        if e.graph().has_edge(v[k], w[k]) {
            return Err(Error::InvalidSurgery(format!(
                "edge {}-{} already present",
                v[k], w[k]
            )));
        }
    }

    // Each new edge goes into the corner of the consumed face: right after
    // the face's predecessor in the rotation.
    let partner_of_u = |x: VertexId| v[(0..4).find(|&k| w[k] == x).expect("paired")];
    for k in 0..4 {
        e.insert_after(v[k], v[(k + 3) % 4], w[k])?;
    }
    for j in 0..4 {
        e.insert_after(u[j], u[(j + 3) % 4], partner_of_u(u[j]))?;
    }
    for k in 0..4 {
        e.graph_mut().add_edge(v[k], w[k])?;
    }

    let mut darts: Vec<Dart> = quad_darts(&v).chain(quad_darts(&u)).collect();
    for k in 0..4 {
        darts.push(Dart::new(v[k], w[k]));
        darts.push(Dart::new(w[k], v[k]));
    }
    let orbits = orbits_through(e, &darts)?;
    let quads = orbits.iter().filter(|o| o.len() == 4).count() as i64;
    let delta_f = orbits.len() as i64 - 2;
    let all_quadrilateral = orbits.len() == 4 && quads == 4;

    let created = if all_quadrilateral {
        let faces: Vec<Vec<VertexId>> = (0..4)
            .map(|k| vec![v[k], v[(k + 1) % 4], w[(k + 1) % 4], w[k]])
            .collect();
        if !faces.iter().all(|f| e.is_face(f)) {
            return Err(Error::ConstructionInvariant(
                "quadrilateral handle faces not in pairing order".into(),
            ));
        }
        faces
    } else {
        orbits
    };
    Ok(HandleRecord {
        kind: HandleKind::Add,
        consumed: vec![v.to_vec(), u.to_vec()],
        edges: [0, 1, 2, 3].map(|k| [v[k], w[k]]),
        created,
        delta_chi: delta_f - 4,
        delta_quad_faces: quads - 2,
        all_quadrilateral,
    })
}

/// Attaches a handle between the faces `f1` and `f2` carrying four edges.
///
/// Fails if either is not a face of `e`, if they share a vertex, or if a new
/// edge already exists. A parallel pairing is carried out but leaves
/// non-quadrilateral faces, reported through `all_quadrilateral`.
pub fn add_handle(
    e: &Embedding,
    f1: &QuadFace,
    f2: &QuadFace,
    pairing: Pairing,
) -> Result<(Embedding, HandleRecord)> {
    let mut out = e.clone();
    let rec = apply_handle(&mut out, f1, f2, pairing)?;
    Ok((out, rec))
}

/// Undoes a recorded quadrilateral handle in place, restoring its two faces.
pub fn remove_handle_in_place(e: &mut Embedding, record: &HandleRecord) -> Result<HandleRecord> {
    if record.kind != HandleKind::Add || !record.all_quadrilateral {
        return Err(Error::InvalidSurgery(
            "only quadrilateral handles can be removed".into(),
        ));
    }
    if !record.created.iter().all(|f| e.is_face(f)) {
        return Err(Error::InvalidSurgery(
            "handle faces are no longer faces of the embedding".into(),
        ));
    }
    for [a, b] in record.edges {
        e.graph_mut().remove_edge(a, b)?;
        e.remove_from_rotation(a, b)?;
        e.remove_from_rotation(b, a)?;
    }
    if !record.consumed.iter().all(|f| e.is_face(f)) {
        return Err(Error::ConstructionInvariant(
            "removing a handle did not restore its faces".into(),
        ));
    }
    Ok(HandleRecord {
        kind: HandleKind::Remove,
        consumed: record.created.clone(),
        edges: record.edges,
        created: record.consumed.clone(),
        delta_chi: 2,
        delta_quad_faces: -2,
        all_quadrilateral: true,
    })
}

pub fn remove_handle(e: &Embedding, record: &HandleRecord) -> Result<(Embedding, HandleRecord)> {
    let mut out = e.clone();
    let rec = remove_handle_in_place(&mut out, record)?;
    Ok((out, rec))
}

/// Links two copies in place; see [`link_copies`].
pub fn link_copies_in_place(
    e: &mut Embedding,
    fam_a: &FaceFamily,
    fam_b: &FaceFamily,
    correspondence: impl Fn(VertexId) -> VertexId,
) -> Result<Vec<HandleRecord>> {
    if fam_a.len() != fam_b.len() {
        return Err(Error::InvalidLink(format!(
            "family sizes differ: {} vs {}",
            fam_a.len(),
            fam_b.len()
        )));
    }
    let mut by_set: BTreeMap<[VertexId; 4], usize> = BTreeMap::new();
    for (i, f) in fam_b.faces.iter().enumerate() {
        if by_set.insert(f.vertex_set(), i).is_some() {
            return Err(Error::InvalidLink(format!(
                "two faces of the target family on {:?}",
                f.vertex_set()
            )));
        }
    }
    let mut pairs = Vec::with_capacity(fam_a.len());
    for f in &fam_a.faces {
        let image = f.map(&correspondence);
        let j = by_set.remove(&image.vertex_set()).ok_or_else(|| {
            Error::InvalidLink(format!(
                "image of face {:?} is not a face of the target family",
                f.vertices
            ))
        })?;
        let g = &fam_b.faces[j];
        let pairing = Pairing::realizing(f, g, &correspondence).ok_or_else(|| {
            Error::InvalidLink(format!(
                "face {:?} does not map onto {:?}",
                f.vertices, g.vertices
            ))
        })?;
        pairs.push((f, g, pairing));
    }
    let mut records = Vec::with_capacity(pairs.len());
    for (f, g, pairing) in pairs {
        let rec = apply_handle(e, f, g, pairing)?;
        if !rec.all_quadrilateral {
            return Err(Error::InvalidLink(format!(
                "handle between {:?} and {:?} leaves non-quadrilateral faces (copies not oppositely oriented)",
                f.vertices, g.vertices
            )));
        }
        records.push(rec);
    }
    Ok(records)
}

/// Joins two oppositely oriented copies with one handle per face of `fam_a`,
/// each carrying the four edges `v - correspondence(v)`.
pub fn link_copies(
    e: &Embedding,
    fam_a: &FaceFamily,
    fam_b: &FaceFamily,
    correspondence: impl Fn(VertexId) -> VertexId,
) -> Result<(Embedding, Vec<HandleRecord>)> {
    let mut out = e.clone();
    let recs = link_copies_in_place(&mut out, fam_a, fam_b, correspondence)?;
    Ok((out, recs))
}

/// Splits all faces of a quadrilateral embedding of `K_{2r,2r}` into `2r`
/// families of `r` faces, each covering all `4r` vertices.
pub fn partition_faces_k2r2r(e: &Embedding) -> Result<FaceReservoir> {
    let n = e.graph().n();
    if !n.is_multiple_of(4) || n == 0 {
        return Err(Error::NoPartition(format!("{n} vertices is not 4r")));
    }
    let r = n / 4;
    let fs = trace_faces(e)?;
    if fs.len() != 2 * r * r || fs.iter().any(|f| f.len() != 4) {
        return Err(Error::NoPartition(format!(
            "expected {} quadrilateral faces, found {} faces",
            2 * r * r,
            fs.len()
        )));
    }
    let faces: Vec<QuadFace> = fs
        .iter()
        .enumerate()
        .map(|(id, f)| QuadFace {
            vertices: f.walk.as_slice().try_into().expect("length 4"),
            face_id: Some(id),
        })
        .collect();
    let classes = partition_into_covers(&faces, n)
        .ok_or_else(|| Error::NoPartition("no partition into vertex-covering families".into()))?;
    Ok(FaceReservoir {
        families: classes
            .into_iter()
            .map(|c| FaceFamily::new(c.into_iter().map(|i| faces[i].clone()).collect()))
            .collect(),
        copy_tag: format!("K({},{})", 2 * r, 2 * r),
    })
}

/// Exact-cover backtracking: partitions `faces` into classes that each cover
/// `0..n` exactly once. Each new class starts with the lowest unused face.
fn partition_into_covers(faces: &[QuadFace], n: usize) -> Option<Vec<Vec<usize>>> {
    struct State<'a> {
        faces: &'a [QuadFace],
        by_vertex: Vec<Vec<usize>>,
        used: Vec<bool>,
        covered: Vec<bool>,
        n_covered: usize,
        classes: Vec<Vec<usize>>,
    }

    impl State<'_> {
        fn fits(&self, f: usize) -> bool {
            !self.used[f]
                && self.faces[f]
                    .vertices
                    .iter()
                    .all(|v| !self.covered[v.index()])
        }

        fn take(&mut self, f: usize) {
            self.used[f] = true;
            for v in self.faces[f].vertices {
                self.covered[v.index()] = true;
            }
            self.n_covered += 4;
            self.classes.last_mut().unwrap().push(f);
        }

        fn give_back(&mut self, f: usize) {
            self.used[f] = false;
            for v in self.faces[f].vertices {
                self.covered[v.index()] = false;
            }
            self.n_covered -= 4;
            self.classes.last_mut().unwrap().pop();
        }

        fn solve(&mut self) -> bool {
            let n = self.covered.len();
            if self.n_covered == n {
                // Current class complete.
                if self.used.iter().all(|&u| u) {
                    return true;
                }
                let saved = std::mem::replace(&mut self.covered, vec![false; n]);
                self.n_covered = 0;
                self.classes.push(Vec::new());
                let first = self.used.iter().position(|&u| !u).unwrap();
                self.take(first);
                if self.solve() {
                    return true;
                }
                self.give_back(first);
                self.classes.pop();
                self.covered = saved;
                self.n_covered = n;
                return false;
            }
            let v = self.covered.iter().position(|&c| !c).unwrap();
            for k in 0..self.by_vertex[v].len() {
                let f = self.by_vertex[v][k];
                if self.fits(f) {
                    self.take(f);
                    if self.solve() {
                        return true;
                    }
                    self.give_back(f);
                }
            }
            false
        }
    }

    if faces.is_empty() || n == 0 {
        return None;
    }
    let mut by_vertex = vec![Vec::new(); n];
    for (i, f) in faces.iter().enumerate() {
        for v in f.vertex_set() {
            by_vertex.get_mut(v.index())?.push(i);
        }
        if !f.has_distinct_vertices() {
            return None;
        }
    }
    let mut st = State {
        faces,
        by_vertex,
        used: vec![false; faces.len()],
        covered: vec![false; n],
        n_covered: 0,
        classes: vec![Vec::new()],
    };
    st.take(0);
    st.solve().then_some(st.classes)
}

/// Which links of a construction step feed the next reservoir.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkSelection {
    /// Links `0, 2, 4, ...`.
    Alternate,
    Indices(Vec<usize>),
}

/// Two families from the handles of the selected links: faces `{0, 2}` of every
/// handle, and faces `{1, 3}` of the same handles. Both must be vertex-disjoint
/// covers of `e`.
pub fn reservoir_from_links(
    e: &Embedding,
    links: &[Vec<HandleRecord>],
    selection: &LinkSelection,
    copy_tag: impl Into<String>,
) -> Result<FaceReservoir> {
    let chosen: Vec<usize> = match selection {
        LinkSelection::Alternate => (0..links.len()).step_by(2).collect(),
        LinkSelection::Indices(ix) => ix.clone(),
    };
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for &l in &chosen {
        let link = links
            .get(l)
            .ok_or_else(|| Error::ConstructionInvariant(format!("no link {l}")))?;
        for rec in link {
            let faces: Option<Vec<QuadFace>> = (0..4).map(|k| rec.handle_face(k)).collect();
            let faces = faces
                .filter(|_| rec.kind == HandleKind::Add && rec.all_quadrilateral)
                .ok_or_else(|| {
                    Error::ConstructionInvariant("link handle is not quadrilateral".into())
                })?;
            even.push(faces[0].clone());
            even.push(faces[2].clone());
            odd.push(faces[1].clone());
            odd.push(faces[3].clone());
        }
    }
    let reservoir = FaceReservoir {
        families: vec![FaceFamily::new(even), FaceFamily::new(odd)],
        copy_tag: copy_tag.into(),
    };
    reservoir.check_full_cover(e)?;
    Ok(reservoir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{euler_genus, is_quadrilateral, trace_faces};
    use crate::graph::{make_cycle, Graph};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn q(a: u32, b: u32, c: u32, d: u32) -> QuadFace {
        QuadFace::new([v(a), v(b), v(c), v(d)])
    }

    /// Two disjoint squares 0..4 and 4..8, each on its own sphere.
    fn two_squares() -> Embedding {
        let c4 = make_cycle(4).unwrap();
        let g = Graph::from_edges(
            8,
            c4.edges()
                .flat_map(|(a, b)| [(a.index(), b.index()), (a.index() + 4, b.index() + 4)]),
        )
        .unwrap();
        Embedding::with_sorted_rotation(g)
    }

    #[test]
    fn two_spheres_make_a_cube() {
        let e = two_squares();
        let fs = trace_faces(&e).unwrap();
        assert!(fs.iter().any(|f| f.walk == vec![v(0), v(1), v(2), v(3)]));
        assert!(e.is_face(&[v(4), v(7), v(6), v(5)]));
        let (cube, rec) =
            add_handle(&e, &q(0, 1, 2, 3), &q(4, 7, 6, 5), Pairing::opposite(0)).unwrap();
        assert_eq!(
            rec.edges,
            [[v(0), v(4)], [v(1), v(5)], [v(2), v(6)], [v(3), v(7)]]
        );
        assert!(rec.all_quadrilateral);
        assert_eq!((rec.delta_chi, rec.delta_quad_faces), (-2, 2));
        assert_eq!(rec.created[0], vec![v(0), v(1), v(5), v(4)]);
        let cert = euler_genus(&cube).unwrap();
        assert_eq!((cert.n, cert.m, cert.f, cert.genus), (8, 12, 6, 0));
        assert!(cert.quadrilateral);

        let (back, undo) = remove_handle(&cube, &rec).unwrap();
        assert_eq!(back.graph(), e.graph());
        assert_eq!(trace_faces(&back).unwrap(), trace_faces(&e).unwrap());
        assert_eq!(undo.kind, HandleKind::Remove);
    }

    #[test]
    fn parallel_pairing_is_reported() {
        let e = two_squares();
        let (out, rec) =
            add_handle(&e, &q(0, 1, 2, 3), &q(4, 7, 6, 5), Pairing::parallel(0)).unwrap();
        assert!(!rec.all_quadrilateral);
        assert!(!is_quadrilateral(&trace_faces(&out).unwrap()));
    }

    #[test]
    fn shared_vertex_is_rejected() {
        let e = two_squares();
        let err = add_handle(&e, &q(0, 1, 2, 3), &q(0, 3, 2, 1), Pairing::opposite(0)).unwrap_err();
        assert!(matches!(err, Error::InvalidSurgery(_)));
        let err = add_handle(&e, &q(0, 2, 1, 3), &q(4, 7, 6, 5), Pairing::opposite(0)).unwrap_err();
        assert!(matches!(err, Error::InvalidSurgery(_)));
    }

    #[test]
    fn link_two_squares() {
        let e = two_squares();
        let fam_a = FaceFamily::new(vec![q(0, 1, 2, 3)]);
        let fam_b = FaceFamily::new(vec![q(4, 7, 6, 5)]);
        let (out, recs) = link_copies(&e, &fam_a, &fam_b, |x| VertexId(x.0 + 4)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(euler_genus(&out).unwrap().genus, 0);

        let wrong = FaceFamily::new(vec![q(4, 5, 6, 7)]);
        assert!(matches!(
            link_copies(&e, &fam_a, &wrong, |x| VertexId(x.0 + 4)),
            Err(Error::InvalidSurgery(_)) | Err(Error::InvalidLink(_))
        ));
        let empty = FaceFamily::default();
        assert!(matches!(
            link_copies(&e, &fam_a, &empty, |x| x),
            Err(Error::InvalidLink(_))
        ));
    }

    #[test]
    fn quad_keys() {
        assert_eq!(q(5, 2, 7, 1).key(), [v(1), v(5), v(2), v(7)]);
        assert_eq!(q(0, 1, 2, 3).reversed().vertices, [v(0), v(3), v(2), v(1)]);
        assert_ne!(q(0, 1, 2, 3).key(), q(0, 1, 2, 3).reversed().key());
    }
}
