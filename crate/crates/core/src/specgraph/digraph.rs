use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;

/// Directed graph of a matrix: edge (i, j) whenever W[i][j] is nonzero.
/// Vertices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub vertex_count: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Loop,
    String,
    Other,
}

impl Digraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        assert!(edges.iter().all(|&(i, j)| i < vertex_count && j < vertex_count), "edge out of range");
        Self { vertex_count, edges }
    }

    fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    fn to_petgraph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.vertex_count, self.edges.len());
        for _ in 0..self.vertex_count {
            g.add_node(());
        }
        for &(i, j) in &self.edges {
            g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
        }
        g
    }

    /// Weakly connected components, each sorted, ordered by smallest vertex.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertex_count);
        for &(i, j) in &self.edges {
            uf.union(i, j);
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut root_slot = vec![usize::MAX; self.vertex_count];
        for v in 0..self.vertex_count {
            let r = uf.find(v);
            if root_slot[r] == usize::MAX {
                root_slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[root_slot[r]].push(v);
        }
        comps
    }

    /// Induced subgraph on `vertices`, relabelled 0..k in the given order.
    pub fn subgraph(&self, vertices: &[usize]) -> Digraph {
        let pos = |v: usize| vertices.iter().position(|&u| u == v);
        let edges = self
            .edges
            .iter()
            .filter_map(|&(i, j)| Some((pos(i)?, pos(j)?)));
        Digraph::new(vertices.len(), edges)
    }
}

pub fn digraph_of(w: &CMatrix, threshold: f64) -> Digraph {
    assert_eq!(w.nrows(), w.ncols(), "digraph of a non-square matrix");
    let n = w.nrows();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if w[(i, j)].norm() > threshold {
                edges.insert((i, j));
            }
        }
    }
    Digraph { vertex_count: n, edges }
}

/// (vertices without incoming edges, vertices without outgoing edges).
pub fn transmitters_receivers(g: &Digraph) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut tx: BTreeSet<usize> = (0..g.vertex_count).collect();
    let mut rx = tx.clone();
    for &(i, j) in &g.edges {
        tx.remove(&j);
        rx.remove(&i);
    }
    (tx, rx)
}

pub fn strongly_connected(g: &Digraph) -> bool {
    g.vertex_count > 0 && tarjan_scc(&g.to_petgraph()).len() == 1
}

/// Kind of each weakly connected component, ordered by smallest vertex.
pub fn classify(g: &Digraph) -> Vec<ComponentKind> {
    g.weak_components()
        .iter()
        .map(|comp| {
            let k = comp.len();
            let edges = g.edges.iter().filter(|e| comp.contains(&e.0)).count();
            let ins: Vec<usize> = comp.iter().map(|&v| g.in_degree(v)).collect();
            let outs: Vec<usize> = comp.iter().map(|&v| g.out_degree(v)).collect();
            // a connected graph with all degrees at most one is a path or a cycle
            let thin = ins.iter().chain(&outs).all(|&d| d <= 1);
            if thin && edges == k {
                ComponentKind::Loop
            } else if thin && edges + 1 == k {
                ComponentKind::String
            } else {
                ComponentKind::Other
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cycle(n: usize) -> Digraph {
        Digraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn path(n: usize) -> Digraph {
        Digraph::new(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    #[test]
    fn digraph_examples() {
        let one = Complex64::new(1.0, 0.0);
        let mut loop3 = CMatrix::zeros(3, 3);
        loop3[(0, 1)] = one;
        loop3[(1, 2)] = one;
        loop3[(2, 0)] = Complex64::new(0.0, 0.5);
        assert_eq!(digraph_of(&loop3, 1e-12), cycle(3));
        assert!(digraph_of(&CMatrix::zeros(4, 4), 0.0).edges.is_empty());
        let mut s2 = CMatrix::zeros(2, 2);
        s2[(0, 1)] = one;
        assert_eq!(digraph_of(&s2, 1e-12).edges, BTreeSet::from([(0, 1)]));
        s2[(1, 0)] = Complex64::new(1e-13, 0.0);
        assert_eq!(digraph_of(&s2, 1e-12).edges.len(), 1);
    }

    #[test]
    fn transmitters_and_receivers() {
        let (t, r) = transmitters_receivers(&cycle(4));
        assert!(t.is_empty() && r.is_empty());
        let (t, r) = transmitters_receivers(&path(5));
        assert_eq!(t, BTreeSet::from([0]));
        assert_eq!(r, BTreeSet::from([4]));
        let (t, r) = transmitters_receivers(&Digraph::new(1, []));
        assert_eq!((t, r), (BTreeSet::from([0]), BTreeSet::from([0])));
    }

    #[test]
    fn strong_connectivity() {
        assert!(strongly_connected(&cycle(5)));
        assert!(strongly_connected(&cycle(1)));
        assert!(!strongly_connected(&path(2)));
        let two_loops = Digraph::new(4, [(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert!(!strongly_connected(&two_loops));
        for comp in two_loops.weak_components() {
            assert!(strongly_connected(&two_loops.subgraph(&comp)));
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&cycle(3)), vec![ComponentKind::Loop]);
        assert_eq!(classify(&cycle(1)), vec![ComponentKind::Loop]);
        assert_eq!(classify(&path(4)), vec![ComponentKind::String]);
        assert_eq!(classify(&Digraph::new(1, [])), vec![ComponentKind::String]);
        let complete = Digraph::new(3, (0..3).flat_map(|i| (0..3).map(move |j| (i, j))));
        assert_eq!(classify(&complete), vec![ComponentKind::Other]);
        let mixed = Digraph::new(5, [(0, 1), (1, 2), (2, 0), (3, 4)]);
        assert_eq!(classify(&mixed), vec![ComponentKind::Loop, ComponentKind::String]);
        // in-tree: two edges into one vertex
        assert_eq!(classify(&Digraph::new(3, [(0, 2), (1, 2)])), vec![ComponentKind::Other]);
    }

    #[test]
    fn loops_have_no_transmitters() {
        for n in 1..6 {
            let g = cycle(n);
            let (t, r) = transmitters_receivers(&g);
            assert!(strongly_connected(&g) && t.is_empty() && r.is_empty());
        }
    }
}
