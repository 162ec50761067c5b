//! Quadrilateral embeddings of `Q_i^{(2r)}` and its products with even cycles
//! and even paths.
//!
//! Every step takes a quadrilateral embedding `E` of `G` that carries face
//! families covering all of `V(G)`, lays out one copy of `E` per vertex `y` of
//! the new factor `H` (mirrored on one side of `H`'s bipartition), and then
//! realizes every edge `y - y'` of `H` as a link: one handle per face of a
//! family, each carrying the four edges `(x, y) - (x, y')`. Faces created by
//! a set of links that forms a perfect matching of `H` become the families of
//! the next step.

use serde::{Deserialize, Serialize};

use crate::embedding::{
    euler_genus, is_quadrilateral, trace_faces, Embedding, EmbeddingCertificate,
};
use crate::error::{Error, Result};
use crate::family::{Atom, ConstructionShape, FamilyExpr, LinearFactor};
use crate::graph::{cartesian_product, Graph, VertexId};
use crate::surgery::{
    link_copies_in_place, partition_faces_k2r2r, remove_handle_in_place, reservoir_from_links,
    FaceFamily, FaceReservoir, HandleRecord, LinkSelection,
};

/// Summary of one product step, for checking the face ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSummary {
    pub factor: String,
    pub copies: usize,
    pub links: usize,
    pub handles_per_link: usize,
    pub faces_before: usize,
    pub faces_after: usize,
    pub family_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub embedding: Embedding,
    pub reservoir: FaceReservoir,
    pub certificate: EmbeddingCertificate,
    pub trace: Vec<HandleRecord>,
    /// Expression whose [`build_family`](crate::family::build_family) graph
    /// equals `embedding.graph()`, labels included.
    pub expr: FamilyExpr,
    pub steps: Vec<StepSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Factor {
    Cube(u32),
    Cycle(u32),
    Path(u32),
}

impl Factor {
    fn atom(self) -> Atom {
        match self {
            Factor::Cube(r) => Atom::K(2 * r, 2 * r),
            Factor::Cycle(m) => Atom::C(2 * m),
            Factor::Path(m) => Atom::P(2 * m),
        }
    }

    fn order(self) -> usize {
        match self {
            Factor::Cube(r) => 4 * r as usize,
            Factor::Cycle(m) | Factor::Path(m) => 2 * m as usize,
        }
    }

    /// Side of `y` in the bipartition of the factor.
    fn side(self, y: usize) -> bool {
        match self {
            Factor::Cube(r) => y >= 2 * r as usize,
            Factor::Cycle(_) | Factor::Path(_) => y % 2 == 1,
        }
    }

    /// `(y_a, y_b, family)` for every link, in link order.
    fn links(self) -> Vec<(usize, usize, usize)> {
        match self {
            Factor::Cube(r) => {
                let t = 2 * r as usize;
                (0..t)
                    .flat_map(|k| (0..t).map(move |j| (j, t + (j + k) % t, k)))
                    .collect()
            }
            Factor::Cycle(m) => {
                let n = 2 * m as usize;
                (0..n).map(|y| (y, (y + 1) % n, y % 2)).collect()
            }
            Factor::Path(m) => {
                let n = 2 * m as usize;
                (0..n - 1).map(|y| (y, y + 1, y % 2)).collect()
            }
        }
    }

    fn families_needed(self) -> usize {
        match self {
            Factor::Cube(r) => 2 * r as usize,
            Factor::Cycle(_) | Factor::Path(_) => 2,
        }
    }
}

impl From<LinearFactor> for Factor {
    fn from(f: LinearFactor) -> Self {
        match f {
            LinearFactor::Cycle(m) => Factor::Cycle(m),
            LinearFactor::Path(m) => Factor::Path(m),
        }
    }
}

#[derive(Debug, Clone)]
struct Level {
    embedding: Embedding,
    families: Vec<FaceFamily>,
    trace: Vec<HandleRecord>,
    last_links: Vec<Vec<HandleRecord>>,
    atoms: Vec<Atom>,
    steps: Vec<StepSummary>,
}

/// Builds the embeddings. [`Constructor::default`] is the standard builder;
/// turning off `mirror_copies` lays out every copy with the same orientation,
/// which makes every link fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constructor {
    pub mirror_copies: bool,
}

impl Default for Constructor {
    fn default() -> Self {
        Constructor {
            mirror_copies: true,
        }
    }
}

/// Rotation proposal for `K_{2r,2r}`: `a_i` sees `b_0, ..., b_{2r-1}` in order
/// for even `i` and in reverse for odd `i`; likewise for `b_j`.
fn k2r2r_scheme(r: u32) -> Vec<Vec<VertexId>> {
    let t = 2 * r as usize;
    (0..2 * t)
        .map(|v| {
            let (others, parity): (Vec<VertexId>, usize) = if v < t {
                ((t..2 * t).map(VertexId::from).collect(), v)
            } else {
                ((0..t).map(VertexId::from).collect(), v - t)
            };
            if parity % 2 == 0 {
                others
            } else {
                others.into_iter().rev().collect()
            }
        })
        .collect()
}

/// Backtracking over rotation systems with every face forced to length 4.
pub fn search_quadrilateral_rotation(g: &Graph) -> Option<Vec<Vec<VertexId>>> {
    fn cyclic_orders(nbrs: &[VertexId]) -> Vec<Vec<VertexId>> {
        fn permute(
            rest: &mut Vec<VertexId>,
            cur: &mut Vec<VertexId>,
            out: &mut Vec<Vec<VertexId>>,
        ) {
            if rest.is_empty() {
                out.push(cur.clone());
                return;
            }
            for i in 0..rest.len() {
                let x = rest.remove(i);
                cur.push(x);
                permute(rest, cur, out);
                cur.pop();
                rest.insert(i, x);
            }
        }
        let Some((&first, tail)) = nbrs.split_first() else {
            return vec![Vec::new()];
        };
        let mut out = Vec::new();
        permute(&mut tail.to_vec(), &mut vec![first], &mut out);
        out
    }

    fn succ(rot: &[Option<Vec<VertexId>>], v: VertexId, u: VertexId) -> Option<VertexId> {
        let r = rot[v.index()].as_ref()?;
        let p = r.iter().position(|&x| x == u)?;
        Some(r[(p + 1) % r.len()])
    }

    // A dart's face is known once enough rotations are fixed; reject any
    // walk that provably does not close after four steps.
    fn consistent(g: &Graph, rot: &[Option<Vec<VertexId>>]) -> bool {
        for a in g.vertices() {
            for &b in g.neighbors(a) {
                let mut walk = vec![a, b];
                while walk.len() < 6 {
                    let k = walk.len();
                    match succ(rot, walk[k - 1], walk[k - 2]) {
                        Some(c) => walk.push(c),
                        None => break,
                    }
                }
                let k = walk.len();
                if k >= 5 && walk[4] != a {
                    return false;
                }
                if k >= 4 && walk[3] == a {
                    return false;
                }
                if k >= 6 && walk[5] != b {
                    return false;
                }
            }
        }
        true
    }

    fn go(
        g: &Graph,
        options: &[Vec<Vec<VertexId>>],
        rot: &mut Vec<Option<Vec<VertexId>>>,
        v: usize,
    ) -> bool {
        if v == g.n() {
            return true;
        }
        for o in &options[v] {
            rot[v] = Some(o.clone());
            if consistent(g, rot) && go(g, options, rot, v + 1) {
                return true;
            }
        }
        rot[v] = None;
        false
    }

    let options: Vec<Vec<Vec<VertexId>>> = g
        .vertices()
        .map(|v| cyclic_orders(g.neighbors(v)))
        .collect();
    let mut rot = vec![None; g.n()];
    go(g, &options, &mut rot, 0).then(|| rot.into_iter().map(Option::unwrap).collect())
}

fn check_result(level: Level, tag: String) -> Result<ConstructionResult> {
    let mut certificate = euler_genus(&level.embedding)?;
    certificate.construction_tag = tag.clone();
    if !certificate.quadrilateral {
        return Err(Error::ConstructionInvariant(format!(
            "{tag}: not quadrilateral"
        )));
    }
    if !certificate.minimal {
        return Err(Error::ConstructionInvariant(format!(
            "{tag}: genus {} above lower bound {}",
            certificate.genus, certificate.lower_bound
        )));
    }
    let reservoir = FaceReservoir {
        families: level.families,
        copy_tag: tag,
    };
    reservoir.check_full_cover(&level.embedding)?;
    Ok(ConstructionResult {
        embedding: level.embedding,
        reservoir,
        certificate,
        trace: level.trace,
        expr: FamilyExpr::from_atoms(level.atoms).expect("at least one atom"),
        steps: level.steps,
    })
}

impl Constructor {
    fn base(&self, r: u32) -> Result<Level> {
        if r < 1 {
            return Err(Error::InvalidParameter("r must be >= 1".into()));
        }
        let t = 2 * r as usize;
        let graph = crate::graph::make_complete_bipartite(t, t)?;
        let proposal = Embedding::new(graph.clone(), k2r2r_scheme(r))?;
        let embedding = if is_quadrilateral(&trace_faces(&proposal)?) {
            proposal
        } else {
            let rot = search_quadrilateral_rotation(&graph).ok_or_else(|| {
                Error::ConstructionFailure(format!(
                    "no quadrilateral embedding of K({t},{t}) found"
                ))
            })?;
            Embedding::new(graph, rot)?
        };
        let reservoir = partition_faces_k2r2r(&embedding)?;
        Ok(Level {
            embedding,
            families: reservoir.families,
            trace: Vec::new(),
            last_links: Vec::new(),
            atoms: vec![Atom::K(2 * r, 2 * r)],
            steps: Vec::new(),
        })
    }

    fn step(&self, prev: &Level, factor: Factor) -> Result<Level> {
        let need = factor.families_needed();
        if prev.families.len() < need {
            return Err(Error::UnsupportedFamily(format!(
                "{} needs {need} face families, only {} available",
                factor.atom(),
                prev.families.len()
            )));
        }
        let h = factor.atom().build()?;
        let g = prev.embedding.graph();
        let (ng, nh) = (g.n(), h.n());
        debug_assert_eq!(nh, factor.order());
        let at = |x: VertexId, y: usize| VertexId::from(x.index() * nh + y);
        let mirrored = |y: usize| self.mirror_copies && factor.side(y);

        // Disjoint copies, copy y at vertices (x, y).
        let mut union = Graph::from_edges(
            ng * nh,
            g.edges()
                .flat_map(|(a, b)| (0..nh).map(move |y| (a.index() * nh + y, b.index() * nh + y))),
        )?;
        if let (Some(lg), Some(lh)) = (g.labels(), h.labels()) {
            let labels = lg
                .iter()
                .flat_map(|a| {
                    lh.iter().map(move |b| {
                        let mut l = a.clone();
                        l.extend_from_slice(b);
                        l
                    })
                })
                .collect();
            union = union.with_labels(labels)?;
        }
        let mut rotation = vec![Vec::new(); ng * nh];
        for x in g.vertices() {
            let rot = prev.embedding.rotation(x);
            for y in 0..nh {
                let mapped = rot.iter().map(|&u| at(u, y));
                rotation[at(x, y).index()] = if mirrored(y) {
                    mapped.rev().collect()
                } else {
                    mapped.collect()
                };
            }
        }
        let mut e = Embedding::new(union, rotation)?;

        let place = |fam: &FaceFamily, y: usize| {
            fam.map(|f| {
                let f = f.map(|x| at(x, y));
                if mirrored(y) {
                    f.reversed()
                } else {
                    f
                }
            })
        };
        let faces_before = prev.embedding.graph().m() / 2;
        let mut links = Vec::new();
        let mut trace = prev.trace.clone();
        let mut handles_per_link = None;
        for (ya, yb, fam) in factor.links() {
            let family = &prev.families[fam];
            if 4 * family.len() != ng {
                return Err(Error::ConstructionInvariant(format!(
                    "family of {} faces cannot carry {ng} edges",
                    family.len()
                )));
            }
            let m_before = e.graph().m();
            let recs = link_copies_in_place(&mut e, &place(family, ya), &place(family, yb), |v| {
                VertexId::from(v.index() - ya + yb)
            })?;
            if e.graph().m() - m_before != ng {
                return Err(Error::ConstructionInvariant(
                    "link added wrong edge count".into(),
                ));
            }
            handles_per_link.get_or_insert(recs.len());
            trace.extend(recs.iter().cloned());
            links.push(recs);
        }
        let handles_per_link = handles_per_link.unwrap_or(0);

        let expected = cartesian_product(g, &h)?;
        if e.graph() != &expected {
            return Err(Error::ConstructionInvariant(format!(
                "linked graph differs from the product with {}",
                factor.atom()
            )));
        }
        let faces_after = trace_faces(&e)?.len();
        let total_handles: usize = links.iter().map(Vec::len).sum();
        if faces_after != nh * faces_before + 2 * total_handles {
            return Err(Error::ConstructionInvariant(format!(
                "face ledger: {faces_after} != {nh} * {faces_before} + 2 * {total_handles}"
            )));
        }

        let tag = format!("{}", factor.atom());
        let families = match factor {
            Factor::Cube(r) => {
                let t = 2 * r as usize;
                let mut fams = Vec::with_capacity(t);
                for color in 0..r as usize {
                    let sel = LinkSelection::Indices((color * t..(color + 1) * t).collect());
                    fams.extend(reservoir_from_links(&e, &links, &sel, tag.clone())?.families);
                }
                fams
            }
            Factor::Cycle(_) | Factor::Path(_) => {
                reservoir_from_links(&e, &links, &LinkSelection::Alternate, tag)?.families
            }
        };
        let mut atoms = prev.atoms.clone();
        atoms.push(factor.atom());
        let mut steps = prev.steps.clone();
        steps.push(StepSummary {
            factor: factor.atom().to_string(),
            copies: nh,
            links: links.len(),
            handles_per_link,
            faces_before,
            faces_after,
            family_sizes: families.iter().map(FaceFamily::len).collect(),
        });
        Ok(Level {
            embedding: e,
            families,
            trace,
            last_links: links,
            atoms,
            steps,
        })
    }

    fn cube_level(&self, i: u32, r: u32) -> Result<Level> {
        if i < 1 {
            return Err(Error::InvalidParameter("i must be >= 1".into()));
        }
        let mut level = self.base(r)?;
        for _ in 1..i {
            level = self.step(&level, Factor::Cube(r))?;
        }
        Ok(level)
    }

    /// Quadrilateral embedding of `K_{2r,2r}` of genus `(r-1)^2`.
    pub fn embed_k2r2r(&self, r: u32) -> Result<ConstructionResult> {
        check_result(self.base(r)?, format!("embed_k2r2r(r={r})"))
    }

    /// Quadrilateral embedding of `Q_i^{(2r)}` with `2r` families.
    pub fn embed_cube(&self, i: u32, r: u32) -> Result<ConstructionResult> {
        check_result(self.cube_level(i, r)?, format!("embed_cube(i={i},r={r})"))
    }

    /// `Q_i^{(2r)} □ C_{2s}`.
    pub fn embed_cube_cycle(&self, i: u32, r: u32, s: u32) -> Result<ConstructionResult> {
        if s < 2 {
            return Err(Error::InvalidParameter(format!("s must be >= 2, got {s}")));
        }
        let level = self.step(&self.cube_level(i, r)?, Factor::Cycle(s))?;
        check_result(level, format!("embed_cube_cycle(i={i},r={r},s={s})"))
    }

    /// `Q_i^{(2r)} □ C_{2m_1} □ ... □ C_{2m_j}`.
    pub fn embed_cube_cycles(&self, i: u32, r: u32, m_list: &[u32]) -> Result<ConstructionResult> {
        if m_list.is_empty() || m_list.iter().any(|&m| m < 2) {
            return Err(Error::InvalidParameter(format!(
                "cycle parameters must be non-empty and >= 2, got {m_list:?}"
            )));
        }
        let mut level = self.cube_level(i, r)?;
        for &m in m_list {
            level = self.step(&level, Factor::Cycle(m))?;
        }
        check_result(
            level,
            format!("embed_cube_cycles(i={i},r={r},m={m_list:?})"),
        )
    }

    /// `Q_i^{(2r)} □ P_{2s}`. For `s >= 2` this embeds `Q_i^{(2r)} □ C_{2s}` and
    /// removes the handles of the link closing the cycle; `s = 1` links two
    /// copies directly.
    pub fn embed_cube_path(&self, i: u32, r: u32, s: u32) -> Result<ConstructionResult> {
        if s < 1 {
            return Err(Error::InvalidParameter("s must be >= 1".into()));
        }
        let tag = format!("embed_cube_path(i={i},r={r},s={s})");
        let cube = self.cube_level(i, r)?;
        if s == 1 {
            return check_result(self.step(&cube, Factor::Path(1))?, tag);
        }
        let mut level = self.step(&cube, Factor::Cycle(s))?;
        let closing = level.last_links.pop().expect("cycle step has 2s links");
        let faces_cycle = level.steps.last().map(|st| st.faces_after).unwrap_or(0);
        for rec in &closing {
            let undo = remove_handle_in_place(&mut level.embedding, rec)?;
            level.trace.push(undo);
        }
        let path = Factor::Path(s);
        let expected = cartesian_product(cube.embedding.graph(), &path.atom().build()?)?;
        if level.embedding.graph() != &expected {
            return Err(Error::ConstructionInvariant(
                "handle removal did not leave the path product".into(),
            ));
        }
        let faces_after = trace_faces(&level.embedding)?.len();
        if faces_after + 2 * closing.len() != faces_cycle {
            return Err(Error::ConstructionInvariant(
                "face ledger after handle removal".into(),
            ));
        }
        level.atoms.pop();
        level.atoms.push(path.atom());
        if let Some(st) = level.steps.last_mut() {
            st.factor = format!("{} minus one link", st.factor);
            st.links -= 1;
            st.faces_after = faces_after;
        }
        check_result(level, tag)
    }

    /// `Q_i^{(2r)} □ P_{2m_1} □ ... □ P_{2m_j}`, built directly with `2m - 1`
    /// links per step.
    pub fn embed_cube_paths(&self, i: u32, r: u32, m_list: &[u32]) -> Result<ConstructionResult> {
        if m_list.is_empty() || m_list.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "path parameters must be non-empty and >= 1, got {m_list:?}"
            )));
        }
        let mut level = self.cube_level(i, r)?;
        for &m in m_list {
            level = self.step(&level, Factor::Path(m))?;
        }
        check_result(level, format!("embed_cube_paths(i={i},r={r},m={m_list:?})"))
    }

    /// Any normalized shape, cycles and paths in the given order.
    pub fn embed_shape(&self, shape: &ConstructionShape) -> Result<ConstructionResult> {
        let mut level = self.cube_level(shape.i, shape.r)?;
        for &f in &shape.factors {
            level = self.step(&level, f.into())?;
        }
        check_result(level, format!("embed({})", shape.expr()))
    }
}

pub fn embed_k2r2r(r: u32) -> Result<ConstructionResult> {
    Constructor::default().embed_k2r2r(r)
}

pub fn embed_cube(i: u32, r: u32) -> Result<ConstructionResult> {
    Constructor::default().embed_cube(i, r)
}

pub fn embed_cube_cycle(i: u32, r: u32, s: u32) -> Result<ConstructionResult> {
    Constructor::default().embed_cube_cycle(i, r, s)
}

pub fn embed_cube_cycles(i: u32, r: u32, m_list: &[u32]) -> Result<ConstructionResult> {
    Constructor::default().embed_cube_cycles(i, r, m_list)
}

pub fn embed_cube_path(i: u32, r: u32, s: u32) -> Result<ConstructionResult> {
    Constructor::default().embed_cube_path(i, r, s)
}

pub fn embed_cube_paths(i: u32, r: u32, m_list: &[u32]) -> Result<ConstructionResult> {
    Constructor::default().embed_cube_paths(i, r, m_list)
}

pub fn embed_shape(shape: &ConstructionShape) -> Result<ConstructionResult> {
    Constructor::default().embed_shape(shape)
}
