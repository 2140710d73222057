//! Simple undirected graphs with an optional bipartition, plus the plain-text
//! graph format used by the command line.
//!
//! ```text
//! graph <n> <m>
//! bipartition <k> <t>      (optional; X = 0..k, Y = k..k+t)
//! edge <u> <v>             (m lines, 0-indexed)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// The two sides of a bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// A simple graph on vertices `0..vertex_count`. Edges are stored as `(u, v)`
/// with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    bipartition: Option<Bipartition>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(invalid(format!("loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(invalid(format!("edge ({a}, {b}) outside 0..{vertex_count}")));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(invalid(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            bipartition: None,
            adjacency,
        })
    }

    /// Attach a bipartition; every edge must cross it.
    pub fn with_bipartition(mut self, left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        let mut side = vec![None; self.vertex_count];
        for (s, list) in [(0u8, &left), (1u8, &right)] {
            for &v in list {
                if v >= self.vertex_count {
                    return Err(invalid(format!("bipartition vertex {v} out of range")));
                }
                if side[v].replace(s).is_some() {
                    return Err(invalid(format!("vertex {v} listed twice in bipartition")));
                }
            }
        }
        if side.iter().any(Option::is_none) {
            return Err(invalid("bipartition does not cover every vertex"));
        }
        for &(u, v) in &self.edges {
            if side[u] == side[v] {
                return Err(invalid(format!("edge ({u}, {v}) lies inside one side")));
            }
        }
        self.bipartition = Some(Bipartition { left, right });
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn bipartition(&self) -> Option<&Bipartition> {
        self.bipartition.as_ref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Position of edge `(u, v)` (either orientation) in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Indices (into [`Graph::edges`]) of the lexicographically first spanning
    /// forest: edges are scanned in sorted order and kept when they join two
    /// components.
    pub fn spanning_tree_edges(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut tree = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
                tree.push(i);
            }
        }
        tree
    }

    /// Smallest-last (degeneracy) removal order, ties broken by vertex id.
    /// Returns the order in which vertices should be *colored*, i.e. the
    /// reverse of the removal order, together with the coloring number
    /// `col(G)` = 1 + max back-degree.
    pub fn smallest_last_order(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count;
        let mut degree: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut removed = vec![false; n];
        let mut removal = Vec::with_capacity(n);
        let mut max_back = 0;
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (degree[v], v))
                .expect("vertex left");
            max_back = max_back.max(degree[v]);
            removed[v] = true;
            removal.push(v);
            for &w in &self.adjacency[v] {
                if !removed[w] {
                    degree[w] -= 1;
                }
            }
        }
        removal.reverse();
        (removal, max_back + 1)
    }

    /// Parse the plain-text graph format.
    pub fn parse_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::MalformedFile(msg);
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| bad("empty graph file".into()))?
            .split_whitespace()
            .collect();
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::MalformedFile(format!("not a non-negative integer: {s:?}")))
        };
        if header.len() != 3 || header[0] != "graph" {
            return Err(bad("expected header `graph <n> <m>`".into()));
        }
        let (n, m) = (num(header[1])?, num(header[2])?);
        let mut bip = None;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.as_slice() {
                ["bipartition", k, t] if bip.is_none() && edges.is_empty() => {
                    bip = Some((num(k)?, num(t)?));
                }
                ["edge", u, v] => edges.push((num(u)?, num(v)?)),
                _ => return Err(bad(format!("unrecognized line {line:?}"))),
            }
        }
        if edges.len() != m {
            return Err(bad(format!("header declares {m} edges, found {}", edges.len())));
        }
        let g = Graph::new(n, edges).map_err(|e| bad(e.to_string()))?;
        match bip {
            Some((k, t)) => {
                if k + t != n {
                    return Err(bad(format!("bipartition {k}+{t} does not match {n} vertices")));
                }
                g.with_bipartition((0..k).collect(), (k..n).collect())
                    .map_err(|e| bad(e.to_string()))
            }
            None => Ok(g),
        }
    }

    /// Render in the plain-text format. A bipartition is written only when it
    /// has the contiguous `0..k | k..n` shape the format can express.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph {} {}", self.vertex_count, self.edges.len())?;
        if let Some(b) = &self.bipartition {
            let k = b.left.len();
            let contiguous = b.left.iter().copied().eq(0..k)
                && b.right.iter().copied().eq(k..self.vertex_count);
            if contiguous {
                writeln!(f, "bipartition {} {}", k, b.right.len())?;
            }
        }
        for &(u, v) in &self.edges {
            writeln!(f, "edge {u} {v}")?;
        }
        Ok(())
    }
}

/// `K_{k,t}` with left side `0..k` and right side `k..k+t`.
pub fn complete_bipartite(k: usize, t: usize) -> Result<Graph> {
    if k == 0 || t == 0 {
        return Err(invalid(format!("K_{{{k},{t}}} needs k >= 1 and t >= 1")));
    }
    let edges = (0..k).flat_map(|i| (0..t).map(move |j| (i, k + j)));
    Graph::new(k + t, edges)?.with_bipartition((0..k).collect(), (k..k + t).collect())
}

/// The cycle `C_n`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(invalid(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_bipartite_shapes() {
        let g = complete_bipartite(1, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        let g = complete_bipartite(3, 6).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 18));
        assert!(complete_bipartite(0, 3).is_err());
        assert!(complete_bipartite(3, 0).is_err());
    }

    #[test]
    fn k22_is_a_four_cycle() {
        let g = complete_bipartite(2, 2).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert!((0..4).all(|v| g.degree(v) == 2));
        assert!(g.is_connected());
        // 0-2-1-3-0
        let relabeled: Vec<_> = cycle(4)
            .unwrap()
            .edges()
            .iter()
            .map(|&(u, v)| {
                let m = [0, 2, 1, 3];
                (m[u].min(m[v]), m[u].max(m[v]))
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(relabeled, g.edges());
    }

    #[test]
    fn cycles() {
        assert!(cycle(2).is_err());
        let tri = cycle(3).unwrap();
        assert_eq!(tri.edges(), &[(0, 1), (0, 2), (1, 2)]);
        let c8 = cycle(8).unwrap();
        assert_eq!(c8.edge_count(), 8);
        assert!((0..8).all(|v| c8.degree(v) == 2));
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 5)]).is_err());
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(g.clone().with_bipartition(vec![0, 1], vec![2]).is_err());
        assert!(g.with_bipartition(vec![0, 2], vec![1]).is_ok());
    }

    #[test]
    fn spanning_tree_is_lexicographic() {
        let c4 = cycle(4).unwrap();
        // edges: (0,1) (0,3) (1,2) (2,3)
        assert_eq!(c4.spanning_tree_edges(), vec![0, 1, 2]);
    }

    #[test]
    fn degeneracy_order_of_bipartite() {
        let g = complete_bipartite(2, 5).unwrap();
        let (order, col) = g.smallest_last_order();
        assert_eq!(col, 3);
        // right vertices peel off first, so the left side is colored early
        assert!(order[..4].contains(&0) && order[..4].contains(&1));
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
        let (_, col) = cycle(6).unwrap().smallest_last_order();
        assert_eq!(col, 3);
    }

    #[test]
    fn text_round_trip() {
        let g = complete_bipartite(2, 3).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("graph 5 6\nbipartition 2 3\nedge 0 2\n"));
        assert_eq!(Graph::parse_text(&text).unwrap(), g);
        let c = cycle(5).unwrap();
        assert_eq!(Graph::parse_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn text_errors() {
        assert!(Graph::parse_text("").is_err());
        assert!(Graph::parse_text("graph 3 2\nedge 0 1\n").is_err());
        assert!(Graph::parse_text("graph 3 1\nedge 0 x\n").is_err());
        assert!(Graph::parse_text("graph 3 1\nbipartition 1 1\nedge 0 1\n").is_err());
        assert!(Graph::parse_text("nodes 3\n").is_err());
    }
}
