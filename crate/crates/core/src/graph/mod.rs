//! Simple d-regular graphs and their local geometry: balls, distances,
//! cycle excess and the tree-likeness diagnostic.

mod rrg1;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use rrg1::{read_rrg1, write_rrg1};

/// A simple d-regular graph on vertices `0..n`.
///
/// Neighbors are stored in one flat array, `d` per vertex, sorted
/// ascending. Membership queries scan a single row, which is O(d) and
/// therefore constant for a fixed degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegularGraph {
    d: usize,
    n: usize,
    adj: Vec<usize>,
}

impl std::fmt::Debug for RegularGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RegularGraph")
            .field("d", &self.d)
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl RegularGraph {
    /// Validates an edge list and builds the graph.
    pub fn from_edges(d: usize, n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if !(n * d).is_multiple_of(2) {
            return Err(Error::BadParams(format!("n*d must be even (n={n}, d={d})")));
        }
        let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::BadIndex { index: x, size: n });
                }
            }
            if u == v {
                return Err(Error::NotSimple { u, v });
            }
            rows[u].push(v);
            rows[v].push(u);
        }
        let mut adj = Vec::with_capacity(n * d);
        for (v, row) in rows.iter_mut().enumerate() {
            if row.len() != d {
                return Err(Error::NotRegular {
                    vertex: v,
                    degree: row.len(),
                    expected: d,
                });
            }
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::NotSimple { u: v, v: w[0] });
            }
            adj.extend_from_slice(row);
        }
        Ok(Self { d, n, adj })
    }

    /// Builds a graph from per-vertex neighbor lists that are already known
    /// to be a valid simple d-regular structure (rows need not be sorted).
    pub(crate) fn from_rows_unchecked(d: usize, rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut adj = Vec::with_capacity(n * d);
        for mut row in rows {
            row.sort_unstable();
            adj.extend_from_slice(&row);
        }
        Self { d, n, adj }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v * self.d..(v + 1) * self.d]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).contains(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.d / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::BadIndex { index: v, size: self.n })
        } else {
            Ok(())
        }
    }

    /// Replaces `old` by `new` in the neighbor row of `u`, keeping it sorted.
    pub(crate) fn replace_neighbor(&mut self, u: usize, old: usize, new: usize) {
        let d = self.d;
        let row = &mut self.adj[u * d..(u + 1) * d];
        let pos = row
            .iter()
            .position(|&x| x == old)
            .expect("replace_neighbor: old neighbor present");
        row[pos] = new;
        row.sort_unstable();
    }

    /// Full invariant check: regular, simple, symmetric.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = Self::from_edges(self.d, self.n, &self.edges())?;
        if rebuilt.adj != self.adj {
            return Err(Error::InternalInconsistency("neighbor lists are not symmetric".into()));
        }
        Ok(())
    }
}

/// Validates and builds a graph.
pub fn build_graph(d: usize, n: usize, edges: &[(usize, usize)]) -> Result<RegularGraph> {
    RegularGraph::from_edges(d, n, edges)
}

/// Graph distance; `Infinite` for vertices in different components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(k) => Some(k),
            Distance::Infinite => None,
        }
    }
}

pub fn graph_distance(g: &RegularGraph, u: usize, v: usize) -> Result<Distance> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Ok(Distance::Finite(0));
    }
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    dist[u] = 0;
    queue.push_back(u);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                if y == v {
                    return Ok(Distance::Finite(dist[y]));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(Distance::Infinite)
}

/// Multi-source BFS truncated at `radius`, skipping vertices for which
/// `blocked` returns true. Returns the distance of every reached vertex.
pub(crate) fn bfs_within<F>(g: &RegularGraph, sources: &[usize], radius: usize, blocked: F) -> HashMap<usize, usize>
where
    F: Fn(usize) -> bool,
{
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        if !blocked(s) && !dist.contains_key(&s) {
            dist.insert(s, 0);
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        if dx == radius {
            continue;
        }
        for &y in g.neighbors(x) {
            if !blocked(y) && !dist.contains_key(&y) {
                dist.insert(y, dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// The radius-r neighborhood of a vertex set together with its induced edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub centers: Vec<usize>,
    pub radius: usize,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// Induced edges `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Ball {
    /// A ball given directly by its vertex and edge lists; used for
    /// fixtures that are not neighborhoods of a regular graph.
    pub fn from_parts(vertices: Vec<usize>, edges: Vec<(usize, usize)>) -> Self {
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        let mut edges: Vec<_> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        Self {
            centers: Vec::new(),
            radius: 0,
            vertices,
            edges,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Degree of every ball vertex inside the induced subgraph, in the
    /// order of `vertices`.
    pub fn inner_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(u, v) in &self.edges {
            deg[self.index_of(u).unwrap()] += 1;
            deg[self.index_of(v).unwrap()] += 1;
        }
        deg
    }

    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

pub fn ball(g: &RegularGraph, centers: &[usize], r: usize) -> Result<Ball> {
    if centers.is_empty() {
        return Err(Error::BadParams("ball needs at least one center".into()));
    }
    for &c in centers {
        g.check_vertex(c)?;
    }
    let dist = bfs_within(g, centers, r, |_| false);
    Ok(induced_ball(g, centers, r, dist.into_keys().collect()))
}

/// Ball of the induced subgraph on `vertices` (edges of `g` with both ends inside).
pub(crate) fn induced_ball(g: &RegularGraph, centers: &[usize], r: usize, mut vertices: Vec<usize>) -> Ball {
    vertices.sort_unstable();
    let mut edges = Vec::new();
    for &u in &vertices {
        for &v in g.neighbors(u) {
            if u < v && vertices.binary_search(&v).is_ok() {
                edges.push((u, v));
            }
        }
    }
    edges.sort_unstable();
    let mut centers = centers.to_vec();
    centers.sort_unstable();
    centers.dedup();
    Ball {
        centers,
        radius: r,
        vertices,
        edges,
    }
}

/// Edge, vertex and component counts of a subgraph; `excess` is the
/// number of independent cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcessReport {
    pub edges: usize,
    pub vertices: usize,
    pub components: usize,
    pub excess: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Excess of an arbitrary multigraph given by vertex count and edge list
/// over local indices `0..vertices`.
pub(crate) fn excess_of(vertices: usize, edges: &[(usize, usize)]) -> ExcessReport {
    let mut uf = UnionFind::new(vertices);
    let mut components = vertices;
    for &(u, v) in edges {
        if uf.union(u, v) {
            components -= 1;
        }
    }
    ExcessReport {
        edges: edges.len(),
        vertices,
        components,
        excess: edges.len() + components - vertices,
    }
}

pub fn excess(b: &Ball) -> ExcessReport {
    let local: Vec<(usize, usize)> = b
        .edges
        .iter()
        .map(|&(u, v)| (b.index_of(u).unwrap(), b.index_of(v).unwrap()))
        .collect();
    excess_of(b.vertices.len(), &local)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaBarReport {
    /// Vertices whose radius-R ball contains a cycle.
    pub non_tree_vertex_count: usize,
    pub max_excess: usize,
    /// `max_excess <= omega_d`.
    pub pass: bool,
}

pub fn omega_bar_report(g: &RegularGraph, radius: usize, omega_d: usize) -> Result<OmegaBarReport> {
    if radius == 0 || omega_d == 0 {
        return Err(Error::BadParams("radius and omega_d must be >= 1".into()));
    }
    let mut non_tree = 0;
    let mut max_excess = 0;
    for v in 0..g.n() {
        let report = excess(&ball(g, &[v], radius)?);
        if report.excess > 0 {
            non_tree += 1;
        }
        max_excess = max_excess.max(report.excess);
    }
    Ok(OmegaBarReport {
        non_tree_vertex_count: non_tree,
        max_excess,
        pass: max_excess <= omega_d,
    })
}

/// Small named graphs used throughout the tests and examples.
pub mod fixtures {
    use super::RegularGraph;

    pub fn k4() -> RegularGraph {
        RegularGraph::from_edges(3, 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5.
    pub fn petersen() -> RegularGraph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        RegularGraph::from_edges(3, 10, &edges).unwrap()
    }

    /// The 3-cube Q3: vertices are 3-bit words, edges flip one bit.
    pub fn cube() -> RegularGraph {
        let mut edges = Vec::new();
        for v in 0..8usize {
            for b in 0..3 {
                let w = v ^ (1 << b);
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        RegularGraph::from_edges(3, 8, &edges).unwrap()
    }

    /// Two disjoint copies of K4.
    pub fn two_k4() -> RegularGraph {
        let mut edges = Vec::new();
        for off in [0, 4] {
            for u in 0..4 {
                for v in u + 1..4 {
                    edges.push((off + u, off + v));
                }
            }
        }
        RegularGraph::from_edges(3, 8, &edges).unwrap()
    }

    /// Circulant graph on `n` vertices joining i to i +- 1, ..., i +- d/2
    /// (plus the antipode when d is odd; requires n even then).
    pub fn circulant(d: usize, n: usize) -> RegularGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for k in 1..=d / 2 {
                let j = (i + k) % n;
                edges.push((i.min(j), i.max(j)));
            }
            if d % 2 == 1 && i < n / 2 {
                edges.push((i, i + n / 2));
            }
        }
        RegularGraph::from_edges(d, n, &edges).unwrap()
    }
}
