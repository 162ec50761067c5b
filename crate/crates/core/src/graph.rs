//! Simple undirected graphs with dense vertex ids, the factor families used
//! throughout the crate, and the Cartesian product.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    #[inline]
    fn from(i: usize) -> Self {
        VertexId(u32::try_from(i).expect("vertex index exceeds u32"))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-vertex factor coordinates. Atoms label vertex `v` with `[v]`; products
/// concatenate the coordinates of their factors.
pub type Label = Vec<u32>;

/// A simple undirected graph. Adjacency lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphFile", try_from = "GraphFile")]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    labels: Option<Vec<Label>>,
    edge_count: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            labels: None,
            edge_count: 0,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(VertexId::from(u), VertexId::from(v))?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n()).map(VertexId::from)
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u.index() < self.n() && self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = VertexId::from(u);
            nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: VertexId) -> Option<&Label> {
        self.labels.as_ref().map(|l| &l[v.index()])
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        let n = self.n();
        for x in [u, v] {
            if x.index() >= n {
                return Err(Error::VertexOutOfRange(x));
            }
        }
        if u == v {
            return Err(Error::InvalidParameter(format!("loop at vertex {u}")));
        }
        match self.adjacency[u.index()].binary_search(&v) {
            Ok(_) => Err(Error::InvalidParameter(format!("parallel edge {u}-{v}"))),
            Err(pos) => {
                self.adjacency[u.index()].insert(pos, v);
                let pos = self.adjacency[v.index()].binary_search(&u).unwrap_err();
                self.adjacency[v.index()].insert(pos, u);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        if !self.has_edge(u, v) {
            return Err(Error::InvalidParameter(format!("no edge {u}-{v}")));
        }
        let pos = self.adjacency[u.index()].binary_search(&v).unwrap();
        self.adjacency[u.index()].remove(pos);
        let pos = self.adjacency[v.index()].binary_search(&u).unwrap();
        self.adjacency[v.index()].remove(pos);
        self.edge_count -= 1;
        Ok(())
    }

    /// Connected components, each a sorted vertex list, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![VertexId::from(start)];
            let mut queue = VecDeque::from([VertexId::from(start)]);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Subgraph induced by `vertices` (sorted), renumbered densely in that order.
    pub fn induced(&self, vertices: &[VertexId]) -> Graph {
        let mut index = vec![u32::MAX; self.n()];
        for (i, v) in vertices.iter().enumerate() {
            index[v.index()] = i as u32;
        }
        let adjacency: Vec<Vec<VertexId>> = vertices
            .iter()
            .map(|&v| {
                let mut nbrs: Vec<VertexId> = self
                    .neighbors(v)
                    .iter()
                    .filter(|w| index[w.index()] != u32::MAX)
                    .map(|w| VertexId(index[w.index()]))
                    .collect();
                nbrs.sort_unstable();
                nbrs
            })
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        let labels = self
            .labels
            .as_ref()
            .map(|l| vertices.iter().map(|v| l[v.index()].clone()).collect());
        Graph {
            adjacency,
            labels,
            edge_count,
        }
    }
}

fn atom_labels(n: usize) -> Vec<Label> {
    (0..n as u32).map(|v| vec![v]).collect()
}

/// Path on `n` vertices `0 - 1 - ... - (n-1)`.
pub fn make_path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "path needs n >= 2, got {n}"
        )));
    }
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))?.with_labels(atom_labels(n))
}

/// Even cycle on `n >= 4` vertices.
pub fn make_cycle(n: usize) -> Result<Graph> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "cycle needs even n >= 4, got {n}"
        )));
    }
    make_any_cycle(n)
}

/// Cycle on `n >= 3` vertices, odd lengths included. Used for non-bipartite
/// controls; the embedding constructions only accept [`make_cycle`] output.
pub fn make_any_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))?.with_labels(atom_labels(n))
}

/// `K_{s,t}`: vertices `0..s` form the first part, `s..s+t` the second.
pub fn make_complete_bipartite(s: usize, t: usize) -> Result<Graph> {
    if s == 0 || t == 0 {
        return Err(Error::InvalidParameter(format!(
            "complete bipartite needs non-empty parts, got K({s},{t})"
        )));
    }
    let edges = (0..s).flat_map(|a| (0..t).map(move |b| (a, s + b)));
    Graph::from_edges(s + t, edges)?.with_labels(atom_labels(s + t))
}

/// Complete graph `K_n`, for oracle controls.
pub fn make_complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "complete graph needs n >= 1".into(),
        ));
    }
    let edges = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b)));
    Graph::from_edges(n, edges)?.with_labels(atom_labels(n))
}

/// `g □ h`. Vertex `(x, y)` gets index `x * |V(h)| + y`.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Graph> {
    if g.n() == 0 || h.n() == 0 {
        return Err(Error::InvalidParameter(
            "cartesian product of an empty graph".into(),
        ));
    }
    let nh = h.n();
    let mut adjacency = Vec::with_capacity(g.n() * nh);
    for x in 0..g.n() {
        for y in 0..nh {
            let mut nbrs: Vec<VertexId> = g
                .neighbors(VertexId::from(x))
                .iter()
                .map(|xp| VertexId::from(xp.index() * nh + y))
                .chain(
                    h.neighbors(VertexId::from(y))
                        .iter()
                        .map(|yp| VertexId::from(x * nh + yp.index())),
                )
                .collect();
            nbrs.sort_unstable();
            adjacency.push(nbrs);
        }
    }
    let labels = match (g.labels(), h.labels()) {
        (Some(lg), Some(lh)) => Some(
            lg.iter()
                .flat_map(|a| {
                    lh.iter().map(move |b| {
                        let mut l = a.clone();
                        l.extend_from_slice(b);
                        l
                    })
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(Graph {
        adjacency,
        labels,
        edge_count: g.n() * h.m() + h.n() * g.m(),
    })
}

/// Two-colouring by breadth-first layering, or `None` if an odd cycle exists.
pub fn is_bipartite(g: &Graph) -> Option<Vec<u8>> {
    let mut color = vec![u8::MAX; g.n()];
    for start in 0..g.n() {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(VertexId::from(u)) {
                let w = w.index();
                if color[w] == u8::MAX {
                    color[w] = 1 - color[u];
                    queue.push_back(w);
                } else if color[w] == color[u] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// On-disk graph shape: `{"n", "edges", "labels"?}` with sorted edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        GraphFile {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u.0, v.0]).collect(),
            labels: g.labels,
        }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let g = Graph::from_edges(
            file.n,
            file.edges.iter().map(|e| (e[0] as usize, e[1] as usize)),
        )?;
        match file.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}
