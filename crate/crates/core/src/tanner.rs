//! Bipartite (Tanner) graph view of a parity-check matrix.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

/// Sparse adjacency of a parity-check matrix. Variables are columns, checks
/// are rows; both adjacency lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    pub n: usize,
    pub m: usize,
    pub var_adj: Vec<Vec<usize>>,
    pub check_adj: Vec<Vec<usize>>,
}

/// Girth of a graph; `None` stands for an acyclic graph.
pub type Girth = Option<usize>;

/// A simple cycle as an alternating vertex sequence starting at a variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    /// `Vertex::Var` / `Vertex::Check` alternating; closes back to the first.
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Var(usize),
    Check(usize),
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Variables in cycle order, starting from the first vertex.
    pub fn variables_in_order(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .filter_map(|x| match x {
                Vertex::Var(i) => Some(*i),
                Vertex::Check(_) => None,
            })
            .collect()
    }

    /// Variables, sorted.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .vertices
            .iter()
            .filter_map(|x| match x {
                Vertex::Var(i) => Some(*i),
                Vertex::Check(_) => None,
            })
            .collect();
        v.sort_unstable();
        v
    }

    pub fn checks(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self
            .vertices
            .iter()
            .filter_map(|x| match x {
                Vertex::Check(i) => Some(*i),
                Vertex::Var(_) => None,
            })
            .collect();
        c.sort_unstable();
        c
    }

    /// `length v0 c0 v1 c1 ...`, as written by the `cycles` command.
    pub fn to_line(&self) -> String {
        let mut parts = vec![self.len().to_string()];
        for v in &self.vertices {
            parts.push(match v {
                Vertex::Var(i) => format!("v{i}"),
                Vertex::Check(i) => format!("c{i}"),
            });
        }
        parts.join(" ")
    }
}

/// Subgraph induced by a variable set: degree of each touched check within
/// the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub var_set: Vec<usize>,
    pub check_degrees: BTreeMap<usize, usize>,
}

impl InducedSubgraph {
    pub fn odd_checks(&self) -> impl Iterator<Item = usize> + '_ {
        self.check_degrees.iter().filter(|(_, d)| *d % 2 == 1).map(|(c, _)| *c)
    }

    pub fn checks_of_degree(&self, degree: usize) -> impl Iterator<Item = usize> + '_ {
        self.check_degrees
            .iter()
            .filter(move |(_, d)| **d == degree)
            .map(|(c, _)| *c)
    }
}

impl TannerGraph {
    pub fn from_matrix(h: &BinaryMatrix) -> Self {
        let mut var_adj = vec![Vec::new(); h.cols()];
        let mut check_adj = vec![Vec::new(); h.rows()];
        for (r, c) in h.nonzeros() {
            var_adj[c].push(r);
            check_adj[r].push(c);
        }
        Self {
            n: h.cols(),
            m: h.rows(),
            var_adj,
            check_adj,
        }
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_adj[v].len()
    }

    pub fn max_var_degree(&self) -> usize {
        self.var_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Same indexing, but only the edges of variables in `keep`.
    pub fn column_restricted(&self, keep: std::ops::Range<usize>) -> Self {
        let var_adj = (0..self.n)
            .map(|v| if keep.contains(&v) { self.var_adj[v].clone() } else { Vec::new() })
            .collect();
        let check_adj = self
            .check_adj
            .iter()
            .map(|vars| vars.iter().copied().filter(|v| keep.contains(v)).collect())
            .collect();
        Self {
            n: self.n,
            m: self.m,
            var_adj,
            check_adj,
        }
    }

    #[inline]
    fn vertex_of(&self, u: usize) -> Vertex {
        if u < self.n {
            Vertex::Var(u)
        } else {
            Vertex::Check(u - self.n)
        }
    }

    #[inline]
    fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let (list, offset): (&[usize], usize) = if u < self.n {
            (&self.var_adj[u], self.n)
        } else {
            (&self.check_adj[u - self.n], 0)
        };
        list.iter().map(move |&x| x + offset)
    }
}

pub fn build_graph(h: &BinaryMatrix) -> TannerGraph {
    TannerGraph::from_matrix(h)
}

/// Length of the shortest cycle, by truncated BFS from every vertex.
pub fn girth(g: &TannerGraph) -> Girth {
    let total = g.n + g.m;
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut touched = Vec::new();
    for root in 0..total {
        for &t in &touched {
            dist[t] = usize::MAX;
            parent[t] = usize::MAX;
        }
        touched.clear();
        dist[root] = 0;
        touched.push(root);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            // any cycle closed beyond this depth cannot beat `best`
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for w in g.neighbors(u) {
                if w == parent[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Every simple cycle of exactly `length` edges, each reported once.
///
/// Cycles are found by depth-limited DFS rooted at their smallest vertex id
/// and canonicalised by traversal direction (second vertex smaller than the
/// last), so each cycle appears exactly once. Output is sorted.
pub fn enumerate_cycles(g: &TannerGraph, length: usize) -> Vec<Cycle> {
    if length < 4 || length % 2 == 1 {
        return Vec::new();
    }
    let total = g.n + g.m;
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut on_path = vec![false; total];
    let mut path = Vec::with_capacity(length);
    for root in 0..total {
        path.clear();
        path.push(root);
        on_path[root] = true;
        dfs_cycles(g, root, length, &mut path, &mut on_path, &mut found);
        on_path[root] = false;
    }
    let mut cycles: Vec<Cycle> = found
        .into_iter()
        .map(|ids| {
            // rotate so the cycle starts at its first variable vertex
            let start = ids.iter().position(|&u| u < g.n).unwrap_or(0);
            let mut vertices: Vec<Vertex> =
                ids[start..].iter().chain(&ids[..start]).map(|&u| g.vertex_of(u)).collect();
            vertices.shrink_to_fit();
            Cycle { vertices }
        })
        .collect();
    cycles.sort();
    cycles
}

fn dfs_cycles(
    g: &TannerGraph,
    root: usize,
    length: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    found: &mut BTreeSet<Vec<usize>>,
) {
    let u = *path.last().expect("non-empty path");
    if path.len() == length {
        if g.neighbors(u).any(|w| w == root) && path[1] < path[length - 1] {
            found.insert(path.clone());
        }
        return;
    }
    for w in g.neighbors(u) {
        if w <= root || on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        dfs_cycles(g, root, length, path, on_path, found);
        path.pop();
        on_path[w] = false;
    }
}

/// Counts, for every variable, the cycles of the list passing through it.
pub fn cycles_per_variable(g: &TannerGraph, cycles: &[Cycle]) -> Vec<usize> {
    let mut counts = vec![0; g.n];
    for c in cycles {
        for v in c.variables() {
            counts[v] += 1;
        }
    }
    counts
}

/// Subgraph induced by `var_set`. Duplicate indices are ignored.
pub fn induced(g: &TannerGraph, var_set: &[usize]) -> Result<InducedSubgraph> {
    let mut vars: Vec<usize> = var_set.to_vec();
    vars.sort_unstable();
    vars.dedup();
    let mut check_degrees = BTreeMap::new();
    for &v in &vars {
        if v >= g.n {
            return Err(Error::OutOfRange { index: v, limit: g.n });
        }
        for &c in &g.var_adj[v] {
            *check_degrees.entry(c).or_insert(0) += 1;
        }
    }
    Ok(InducedSubgraph {
        var_set: vars,
        check_degrees,
    })
}
