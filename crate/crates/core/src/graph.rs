//! Finite simple undirected graphs with precomputed all-pairs shortest
//! path distances, plus the connected-subset machinery that the move
//! universe and the bounds are built on.
//!
//! Vertex names are opaque strings; the declaration order is the fixed
//! total order used for every tie-break downstream, so all output is
//! deterministic. Graphs are immutable after construction.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("vertex index {0} out of range for graph with {1} vertices")]
    IndexOutOfRange(usize, usize),
    #[error("vertices `{0}` and `{1}` are not connected")]
    Unreachable(String, String),
}

/// Finite simple undirected graph. Distances are hop counts; `None`
/// means the pair lies in different components.
#[derive(Debug, Clone)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    dist: Vec<Vec<Option<u32>>>,
}

impl Graph {
    /// Builds a graph from named vertices and unordered name pairs.
    /// All-pairs distances are computed by breadth-first traversal from
    /// each vertex.
    pub fn build<S: AsRef<str>, T: AsRef<str>>(
        vertices: &[S],
        edges: &[(T, T)],
    ) -> Result<Self, GraphError> {
        let mut names = Vec::with_capacity(vertices.len());
        let mut index = HashMap::with_capacity(vertices.len());
        for v in vertices {
            let name = v.as_ref().to_string();
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(GraphError::DuplicateVertex(name));
            }
            names.push(name);
        }
        let n = names.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_set = Vec::new();
        for (a, b) in edges {
            let a = *index
                .get(a.as_ref())
                .ok_or_else(|| GraphError::UnknownVertex(a.as_ref().to_string()))?;
            let b = *index
                .get(b.as_ref())
                .ok_or_else(|| GraphError::UnknownVertex(b.as_ref().to_string()))?;
            if a == b {
                return Err(GraphError::SelfLoop(names[a].clone()));
            }
            let pair = (a.min(b), a.max(b));
            if edge_set.contains(&pair) {
                continue; // duplicate edges collapse
            }
            edge_set.push(pair);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        edge_set.sort_unstable();
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let dist = (0..n)
            .map(|src| bfs_distances(&adjacency, src))
            .collect();
        Ok(Graph {
            names,
            index,
            adjacency,
            edges: edge_set,
            dist,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Edges as canonically ordered index pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Shortest-path hop count, or `None` if unreachable.
    pub fn dist(&self, a: usize, b: usize) -> Option<u32> {
        self.dist[a][b]
    }

    /// Distance as a `Result`, for operations whose contract rejects
    /// unreachable pairs.
    pub fn dist_checked(&self, a: usize, b: usize) -> Result<u32, GraphError> {
        self.dist[a][b].ok_or_else(|| {
            GraphError::Unreachable(self.names[a].clone(), self.names[b].clone())
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        n <= 1 || self.dist[0].iter().all(|d| d.is_some())
    }

    /// Vertex set of a shortest path from `r` to `v`, choosing the
    /// least-index predecessor at every step.
    pub fn shortest_path(&self, r: usize, v: usize) -> Result<Vec<usize>, GraphError> {
        self.dist_checked(r, v)?;
        let mut path = vec![v];
        let mut cur = v;
        while cur != r {
            let d = self.dist[r][cur].unwrap();
            let prev = self.adjacency[cur]
                .iter()
                .copied()
                .find(|&p| self.dist[r][p] == Some(d - 1))
                .expect("BFS predecessor exists");
            path.push(prev);
            cur = prev;
        }
        path.reverse();
        Ok(path)
    }
}

fn bfs_distances(adjacency: &[Vec<usize>], src: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adjacency.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x].unwrap();
        for &y in &adjacency[x] {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Canonically ordered subset of a graph's vertices, stored as sorted
/// indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        VertexSet(indices)
    }

    pub fn from_names<S: AsRef<str>>(g: &Graph, names: &[S]) -> Result<Self, GraphError> {
        let indices = names
            .iter()
            .map(|n| g.vertex_index(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(indices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn names<'g>(&self, g: &'g Graph) -> Vec<&'g str> {
        self.0.iter().map(|&i| g.vertex_name(i)).collect()
    }
}

fn check_members(g: &Graph, s: &VertexSet) -> Result<(), GraphError> {
    let n = g.vertex_count();
    for v in s.iter() {
        if v >= n {
            return Err(GraphError::IndexOutOfRange(v, n));
        }
    }
    Ok(())
}

/// True iff `s` is nonempty and the subgraph induced by `s` is
/// connected.
pub fn is_connected_subset(g: &Graph, s: &VertexSet) -> Result<bool, GraphError> {
    check_members(g, s)?;
    if s.is_empty() {
        return Ok(false);
    }
    let start = s.as_slice()[0];
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if !seen[y] && s.contains(y) {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    Ok(count == s.len())
}

/// Enumerates every connected subset of size at most `max_size`, each
/// exactly once, sorted by size then lexicographically.
///
/// Internally this is a grow-by-neighbor enumeration rooted at each
/// vertex in turn: a set rooted at `v` contains only vertices `>= v`
/// and is extended through the classic exclusive-neighbor rule, so no
/// subset is ever produced twice.
pub fn enumerate_connected_subsets(g: &Graph, max_size: usize) -> Vec<VertexSet> {
    let mut out = Vec::new();
    if max_size == 0 {
        return out;
    }
    let n = g.vertex_count();
    for root in 0..n {
        let mut current = vec![root];
        let extension: Vec<usize> = g
            .neighbors(root)
            .iter()
            .copied()
            .filter(|&u| u > root)
            .collect();
        grow(g, root, &mut current, extension, max_size, &mut out);
    }
    out.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    out
}

fn grow(
    g: &Graph,
    root: usize,
    current: &mut Vec<usize>,
    extension: Vec<usize>,
    max_size: usize,
    out: &mut Vec<VertexSet>,
) {
    out.push(VertexSet::new(current.clone()));
    if current.len() == max_size {
        return;
    }
    // Closed neighborhood of the current set; extending only through
    // neighbors exclusive to the newly added vertex is what keeps the
    // enumeration duplicate-free.
    let mut closed = vec![false; g.vertex_count()];
    for &c in current.iter() {
        closed[c] = true;
        for &nb in g.neighbors(c) {
            closed[nb] = true;
        }
    }
    for (i, &u) in extension.iter().enumerate() {
        let mut next_ext: Vec<usize> = extension[i + 1..].to_vec();
        for &nb in g.neighbors(u) {
            if nb > root && !closed[nb] {
                next_ext.push(nb);
            }
        }
        current.push(u);
        grow(g, root, current, next_ext, max_size, out);
        current.pop();
    }
}
