//! Finite simple graphs with dense 1-based vertex labels, plus the three
//! structural combinators (coning, 0-extension, clique gluing) and the
//! biconnected-component decomposition.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::GraphError;

/// A finite simple graph on vertices `1..=n`.
///
/// Edges are stored as ordered pairs `(u, v)` with `u < v`, sorted
/// lexicographically. The struct is immutable after construction; all
/// combinators return fresh graphs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph, normalising edge order and rejecting loops,
    /// duplicates and out-of-range endpoints.
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::InvalidEdge { u: a, v: b, n });
            }
            let e = (a.min(b), a.max(b));
            if e.0 < 1 || e.1 > n {
                return Err(GraphError::InvalidEdge { u: a, v: b, n });
            }
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge { u: e.0, v: e.1 });
            }
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: u32) -> Self {
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in (u + 1)..=n {
                edges.push((u, v));
            }
        }
        Graph { n, edges }
    }

    /// Path `1 - 2 - ... - n`.
    pub fn path(n: u32) -> Self {
        Graph {
            n,
            edges: (1..n).map(|u| (u, u + 1)).collect(),
        }
    }

    /// Cycle `1 - 2 - ... - n - 1` (requires `n >= 3`).
    pub fn cycle(n: u32) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|u| (u, u + 1)).collect();
        edges.push((1, n));
        edges.sort_unstable();
        Graph { n, edges }
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn min_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == (self.n as usize * (self.n as usize - 1)) / 2
    }

    /// Neighbour lists indexed by vertex (index 0 unused).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n as usize + 1];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    /// True when all `n` vertices lie in one connected component.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n as usize + 1];
        let mut stack = vec![1u32];
        seen[1] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Cone over the graph: a new vertex `n + 1` adjacent to all of `1..=n`.
    pub fn cone(&self) -> Graph {
        let apex = self.n + 1;
        let mut edges = self.edges.clone();
        edges.extend((1..=self.n).map(|v| (v, apex)));
        edges.sort_unstable();
        Graph { n: apex, edges }
    }

    /// 0-extension: a new vertex `n + 1` adjacent to exactly `d` existing
    /// vertices. `neighbours` must contain `d` distinct vertices.
    pub fn zero_extension(&self, neighbours: &[u32], d: u32) -> Result<Graph, GraphError> {
        let distinct: BTreeSet<u32> = neighbours.iter().copied().collect();
        if neighbours.len() != d as usize || distinct.len() != d as usize {
            return Err(GraphError::ArityMismatch {
                expected: d as usize,
                got: neighbours.len(),
            });
        }
        if let Some(&v) = distinct.iter().find(|&&v| v < 1 || v > self.n) {
            return Err(GraphError::InvalidEdge { u: v, v, n: self.n });
        }
        let new = self.n + 1;
        let mut edges = self.edges.clone();
        edges.extend(distinct.into_iter().map(|v| (v, new)));
        edges.sort_unstable();
        Ok(Graph { n: new, edges })
    }

    /// Glues `k` copies of the graph along a clique. Copies share exactly the
    /// clique vertices; the non-clique vertices of copy `i >= 2` are appended
    /// as fresh labels in increasing order of their original label.
    pub fn glue_at_clique(&self, clique: &[u32], k: u32) -> Result<Graph, GraphError> {
        let cl: BTreeSet<u32> = clique.iter().copied().collect();
        if cl.len() != clique.len() {
            return Err(GraphError::InvalidClique);
        }
        for &u in &cl {
            if u < 1 || u > self.n {
                return Err(GraphError::InvalidClique);
            }
            for &v in &cl {
                if u < v && !self.has_edge(u, v) {
                    return Err(GraphError::InvalidClique);
                }
            }
        }
        if k == 0 {
            return Err(GraphError::ArityMismatch { expected: 1, got: 0 });
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let free: Vec<u32> = (1..=self.n).filter(|v| !cl.contains(v)).collect();
        let s = cl.len() as u32;
        let total = k * (self.n - s) + s;
        let mut edges: Vec<(u32, u32)> = self.edges.clone();
        for copy in 1..k {
            // Vertex map for this copy: clique fixed, others relabelled.
            let base = self.n + (copy - 1) * (self.n - s);
            let map = |v: u32| -> u32 {
                if cl.contains(&v) {
                    v
                } else {
                    let idx = free.iter().position(|&f| f == v).unwrap() as u32;
                    base + idx + 1
                }
            };
            for &(u, v) in &self.edges {
                let (a, b) = (map(u), map(v));
                if cl.contains(&u) && cl.contains(&v) {
                    continue; // shared clique edge, already present
                }
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph { n: total, edges })
    }

    /// Deletes a vertex and relabels the remaining vertices densely,
    /// preserving their relative order.
    pub fn remove_vertex(&self, v: u32) -> Result<Graph, GraphError> {
        if v < 1 || v > self.n {
            return Err(GraphError::InvalidEdge { u: v, v, n: self.n });
        }
        let map = |u: u32| if u > v { u - 1 } else { u };
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (map(a), map(b)))
            .collect();
        Ok(Graph {
            n: self.n - 1,
            edges,
        })
    }

    /// Biconnected components as a partition of the edge set, via the
    /// Hopcroft-Tarjan lowpoint DFS with an edge stack.
    pub fn biconnected_components(&self) -> Vec<Vec<(u32, u32)>> {
        let n = self.n as usize;
        let adj = self.adjacency();
        let mut disc = vec![0usize; n + 1];
        let mut low = vec![0usize; n + 1];
        let mut comps: Vec<Vec<(u32, u32)>> = Vec::new();
        let mut edge_stack: Vec<(u32, u32)> = Vec::new();
        let mut timer = 1usize;

        // Iterative DFS; frames hold (vertex, parent, neighbour cursor).
        let mut frames: Vec<(u32, u32, usize)> = Vec::new();
        for root in 1..=self.n {
            if disc[root as usize] != 0 {
                continue;
            }
            disc[root as usize] = timer;
            low[root as usize] = timer;
            timer += 1;
            frames.push((root, 0, 0));
            while let Some(&(u, parent, cursor)) = frames.last() {
                let ui = u as usize;
                if cursor < adj[ui].len() {
                    frames.last_mut().unwrap().2 += 1;
                    let v = adj[ui][cursor];
                    let vi = v as usize;
                    if disc[vi] == 0 {
                        edge_stack.push((u.min(v), u.max(v)));
                        disc[vi] = timer;
                        low[vi] = timer;
                        timer += 1;
                        frames.push((v, u, 0));
                    } else if v != parent && disc[vi] < disc[ui] {
                        edge_stack.push((u.min(v), u.max(v)));
                        low[ui] = low[ui].min(disc[vi]);
                    }
                } else {
                    frames.pop();
                    if let Some(&(p, _, _)) = frames.last() {
                        let pi = p as usize;
                        low[pi] = low[pi].min(low[ui]);
                        if low[ui] >= disc[pi] {
                            // p is a cut vertex (or the root): pop one component.
                            let mut comp = Vec::new();
                            let marker = (p.min(u), p.max(u));
                            while let Some(e) = edge_stack.pop() {
                                comp.push(e);
                                if e == marker {
                                    break;
                                }
                            }
                            comp.sort_unstable();
                            comps.push(comp);
                        }
                    }
                }
            }
        }
        comps.sort();
        comps
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

/// Parses the text format: first line `n`, then one `u v` pair per line.
/// Blank lines and `#` comments are skipped.
pub fn parse_graph_text(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: u32 = lines
        .next()
        .ok_or_else(|| GraphError::Parse("empty graph file".into()))?
        .parse()
        .map_err(|_| GraphError::Parse("first line must be the vertex count".into()))?;
    let mut edges = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .ok_or_else(|| GraphError::Parse(format!("bad edge line: {line}")))?
            .parse()
            .map_err(|_| GraphError::Parse(format!("bad edge line: {line}")))?;
        let v: u32 = it
            .next()
            .ok_or_else(|| GraphError::Parse(format!("bad edge line: {line}")))?
            .parse()
            .map_err(|_| GraphError::Parse(format!("bad edge line: {line}")))?;
        if it.next().is_some() {
            return Err(GraphError::Parse(format!("bad edge line: {line}")));
        }
        edges.push((u, v));
    }
    Graph::new(n, edges)
}

/// Formats a graph in the text format accepted by [`parse_graph_text`].
pub fn graph_to_text(g: &Graph) -> String {
    let mut out = format!("{}\n", g.vertex_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// The 3-prism (two triangles joined by a perfect matching), labelled so
/// that it encodes to 7916.
pub fn three_prism() -> Graph {
    Graph::new(
        6,
        [
            (1, 4),
            (1, 5),
            (1, 6),
            (2, 3),
            (2, 5),
            (2, 6),
            (3, 4),
            (3, 6),
            (4, 5),
        ],
    )
    .unwrap()
}

/// Complete bipartite graph K_{3,3} on parts {1,2,3} and {4,5,6}.
pub fn k33() -> Graph {
    Graph::new(
        6,
        [
            (1, 4),
            (1, 5),
            (1, 6),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 4),
            (3, 5),
            (3, 6),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(1, 2), (2, 1)]).is_err());
        assert!(Graph::new(3, [(1, 4)]).is_err());
        assert!(Graph::new(3, [(0, 2)]).is_err());
    }

    #[test]
    fn cone_edge_counts() {
        let k3 = Graph::complete(3);
        assert_eq!(k3.cone(), Graph::complete(4));
        let prism = three_prism();
        let coned = prism.cone();
        assert_eq!(coned.vertex_count(), 7);
        assert_eq!(coned.edge_count(), 15);
        let single = Graph::new(1, []).unwrap();
        assert_eq!(single.cone(), Graph::complete(2));
    }

    #[test]
    fn zero_extension_examples() {
        let k3 = Graph::complete(3);
        let g = k3.zero_extension(&[1, 2], 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 5));
        // Appending a degree-1 vertex to K_2 gives a path on 3 vertices
        // (centred at vertex 1, so only isomorphic to the standard path).
        let p3 = Graph::complete(2).zero_extension(&[1], 1).unwrap();
        assert_eq!(p3.edges(), &[(1, 2), (1, 3)]);
        assert_eq!(
            crate::codec::canonical_form(&p3).unwrap(),
            crate::codec::canonical_form(&Graph::path(3)).unwrap()
        );
        assert!(k3.zero_extension(&[1], 2).is_err());
        assert!(k3.zero_extension(&[1, 1], 2).is_err());
        let prism = three_prism();
        let ext = prism.zero_extension(&[1, 4], 2).unwrap();
        assert_eq!((ext.vertex_count(), ext.edge_count()), (7, 11));
    }

    #[test]
    fn glue_examples() {
        let prism = three_prism();
        let fan = prism.glue_at_clique(&[1, 4, 5], 4).unwrap();
        assert_eq!(fan.vertex_count(), 15);
        assert_eq!(fan.edge_count(), 27);

        let k3 = Graph::complete(3);
        let bowtie = k3.glue_at_clique(&[1, 2], 2).unwrap();
        assert_eq!((bowtie.vertex_count(), bowtie.edge_count()), (4, 5));

        assert_eq!(prism.glue_at_clique(&[1, 4, 5], 1).unwrap(), prism);
        // {1,2} is not an edge of the prism.
        assert!(prism.glue_at_clique(&[1, 2], 2).is_err());
    }

    #[test]
    fn glue_edge_count_formula() {
        // k(e - C(s,2)) + C(s,2) for a few (graph, clique, k) combinations.
        let cases = [
            (Graph::complete(4), vec![1u32, 2, 3], 3u32),
            (three_prism(), vec![2u32, 3], 5u32),
        ];
        for (g, clique, k) in cases {
            let s = clique.len() as u32;
            let glued = g.glue_at_clique(&clique, k).unwrap();
            let cs2 = (s * (s - 1) / 2) as usize;
            let expect = k as usize * (g.edge_count() - cs2) + cs2;
            assert_eq!(glued.edge_count(), expect);
            assert_eq!(
                glued.vertex_count(),
                k * (g.vertex_count() - s) + s
            );
        }
    }

    #[test]
    fn biconnected_path_and_prism() {
        let p3 = Graph::path(3);
        let comps = p3.biconnected_components();
        assert_eq!(comps, vec![vec![(1, 2)], vec![(2, 3)]]);

        let prism = three_prism();
        let comps = prism.biconnected_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 9);

        let k2 = Graph::complete(2);
        assert_eq!(k2.biconnected_components(), vec![vec![(1, 2)]]);
    }

    #[test]
    fn biconnected_components_partition_edges() {
        let graphs = [
            three_prism(),
            k33(),
            Graph::path(6),
            Graph::cycle(5),
            Graph::new(7, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (5, 6), (4, 6), (1, 7)])
                .unwrap(),
            Graph::new(4, [(1, 2), (3, 4)]).unwrap(),
        ];
        for g in graphs {
            let comps = g.biconnected_components();
            let mut all: Vec<(u32, u32)> = comps.into_iter().flatten().collect();
            all.sort_unstable();
            assert_eq!(all, g.edges(), "partition mismatch for {g:?}");
        }
    }

    #[test]
    fn text_format_round_trip() {
        let prism = three_prism();
        let text = graph_to_text(&prism);
        assert_eq!(parse_graph_text(&text).unwrap(), prism);
        assert!(parse_graph_text("").is_err());
        assert!(parse_graph_text("2\n1 2 3\n").is_err());
    }

    #[test]
    fn remove_vertex_relabels() {
        let g = Graph::new(4, [(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let h = g.remove_vertex(2).unwrap();
        assert_eq!(h, Graph::new(3, [(2, 3), (1, 3)]).unwrap());
    }
}
