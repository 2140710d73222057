//! k-fold covers in perfect-matching form.
//!
//! A cover of `G` assigns to every vertex `v` a fiber `{(v, 0), …, (v, k-1)}`
//! (a clique in `H`) and to every edge `uv` with `u < v` a permutation `σ`
//! such that `(u, i)` is joined to `(v, σ(i))`. Fibers partition `V(H)`, are
//! complete, only touch along edges of `G`, and touch in perfect matchings,
//! so every such value is a well-formed cover by construction.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Bipartition, Graph};
use crate::perm::Permutation;

/// One color per base vertex; `choice[v]` selects `(v, choice[v])` in `H`.
pub type CandidateColoring = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingCover {
    graph: Graph,
    fold: usize,
    /// Aligned with `graph.edges()`.
    matchings: Vec<Permutation>,
}

/// Build a cover from an edge → permutation map. Keys may use either
/// orientation; a key `(v, u)` with `u < v` stores the inverse.
pub fn build_cover(
    graph: Graph,
    fold: usize,
    perms: &BTreeMap<(usize, usize), Permutation>,
) -> Result<MatchingCover> {
    if fold == 0 {
        return Err(invalid("fold must be positive"));
    }
    let mut matchings: Vec<Option<Permutation>> = vec![None; graph.edge_count()];
    for (&(a, b), p) in perms {
        if p.len() != fold {
            return Err(invalid(format!(
                "permutation on ({a}, {b}) has size {}, expected {fold}",
                p.len()
            )));
        }
        let idx = graph
            .edge_index(a, b)
            .ok_or_else(|| Error::MalformedCover(format!("({a}, {b}) is not an edge")))?;
        let p = if a < b { p.clone() } else { p.invert() };
        if matchings[idx].replace(p).is_some() {
            return Err(Error::MalformedCover(format!("edge ({a}, {b}) given twice")));
        }
    }
    let matchings = matchings
        .into_iter()
        .zip(graph.edges())
        .map(|(m, &(u, v))| {
            m.ok_or_else(|| Error::MalformedCover(format!("no matching for edge ({u}, {v})")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchingCover {
        graph,
        fold,
        matchings,
    })
}

impl MatchingCover {
    /// Build from permutations listed in `graph.edges()` order.
    pub fn from_edge_list(graph: Graph, fold: usize, matchings: Vec<Permutation>) -> Result<Self> {
        if fold == 0 {
            return Err(invalid("fold must be positive"));
        }
        if matchings.len() != graph.edge_count() {
            return Err(Error::MalformedCover(format!(
                "{} matchings for {} edges",
                matchings.len(),
                graph.edge_count()
            )));
        }
        if let Some(p) = matchings.iter().find(|p| p.len() != fold) {
            return Err(invalid(format!("permutation {p} has size {}, expected {fold}", p.len())));
        }
        Ok(MatchingCover {
            graph,
            fold,
            matchings,
        })
    }

    /// Every edge carries the identity matching.
    pub fn identity(graph: Graph, fold: usize) -> Result<Self> {
        let m = vec![Permutation::identity(fold); graph.edge_count()];
        Self::from_edge_list(graph, fold, m)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn fold(&self) -> usize {
        self.fold
    }

    pub fn matchings(&self) -> &[Permutation] {
        &self.matchings
    }

    /// The permutation from `u`'s fiber to `v`'s fiber (either orientation).
    pub fn matching(&self, u: usize, v: usize) -> Option<Permutation> {
        let idx = self.graph.edge_index(u, v)?;
        let p = &self.matchings[idx];
        Some(if u < v { p.clone() } else { p.invert() })
    }

    /// True iff the chosen `H`-vertices are pairwise non-adjacent, i.e. no
    /// edge `uv` has `σ_uv(col(u)) = col(v)`.
    pub fn is_valid_coloring(&self, col: &[usize]) -> bool {
        col.len() == self.graph.vertex_count()
            && col.iter().all(|&c| c < self.fold)
            && self
                .graph
                .edges()
                .iter()
                .zip(&self.matchings)
                .all(|(&(u, v), p)| p.apply(col[u]) != col[v])
    }

    /// Rename the colors of `v`'s fiber by `tau`: old color `x` becomes `tau(x)`.
    pub fn relabel_fiber(&self, v: usize, tau: &Permutation) -> Result<MatchingCover> {
        if tau.len() != self.fold {
            return Err(invalid(format!("relabeling of size {} on fold {}", tau.len(), self.fold)));
        }
        let tau_inv = tau.invert();
        let mut out = self.clone();
        for (i, &(a, b)) in self.graph.edges().iter().enumerate() {
            if b == v {
                out.matchings[i] = tau.compose(&self.matchings[i])?;
            } else if a == v {
                out.matchings[i] = self.matchings[i].compose(&tau_inv)?;
            }
        }
        Ok(out)
    }

    /// Relabel fibers along the lexicographic spanning tree (rooted at 0,
    /// breadth first) so that every tree edge carries the identity.
    pub fn normalize(&self) -> Result<MatchingCover> {
        if !self.graph.is_connected() {
            return Err(Error::UnsupportedInput("normalize needs a connected base graph".into()));
        }
        let n = self.graph.vertex_count();
        if n == 0 {
            return Ok(self.clone());
        }
        let tree = self.graph.spanning_tree_edges();
        let mut tree_adj = vec![Vec::new(); n];
        for &ei in &tree {
            let (u, v) = self.graph.edges()[ei];
            tree_adj[u].push(v);
            tree_adj[v].push(u);
        }
        let mut out = self.clone();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(p) = queue.pop_front() {
            for &c in &tree_adj[p] {
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                let sigma = &out.matchings[out.graph.edge_index(p, c).unwrap()];
                let tau = if p < c { sigma.invert() } else { sigma.clone() };
                out = out.relabel_fiber(c, &tau)?;
                queue.push_back(c);
            }
        }
        Ok(out)
    }

    /// Expand to the literal graph `H`: vertex `(v, i)` is `v * fold + i`.
    pub fn explicit_graph(&self) -> Graph {
        let k = self.fold;
        let mut edges = Vec::new();
        for v in 0..self.graph.vertex_count() {
            for i in 0..k {
                for j in i + 1..k {
                    edges.push((v * k + i, v * k + j));
                }
            }
        }
        for (&(u, v), p) in self.graph.edges().iter().zip(&self.matchings) {
            for i in 0..k {
                edges.push((u * k + i, v * k + p.apply(i)));
            }
        }
        Graph::new(self.graph.vertex_count() * k, edges).expect("cover expansion is simple")
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            graph: GraphJson {
                bipartition: self.graph.bipartition().cloned(),
                edges: self.graph.edges().iter().map(|&(u, v)| [u, v]).collect(),
                vertex_count: self.graph.vertex_count(),
            },
            k: self.fold,
            matchings: self
                .graph
                .edges()
                .iter()
                .zip(&self.matchings)
                .map(|(&(u, v), p)| MatchingJson {
                    perm: p.image().to_vec(),
                    u,
                    v,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CoverFile = serde_json::from_str(text)?;
        file.into_cover()
    }
}

/// On-disk cover. Field order is alphabetical so output has sorted keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub graph: GraphJson,
    pub k: usize,
    pub matchings: Vec<MatchingJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub bipartition: Option<Bipartition>,
    pub edges: Vec<[usize; 2]>,
    pub vertex_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingJson {
    pub perm: Vec<usize>,
    pub u: usize,
    pub v: usize,
}

impl CoverFile {
    pub fn into_cover(self) -> Result<MatchingCover> {
        let malformed = |e: Error| Error::MalformedCover(e.to_string());
        let mut graph = Graph::new(
            self.graph.vertex_count,
            self.graph.edges.iter().map(|e| (e[0], e[1])),
        )
        .map_err(malformed)?;
        if let Some(b) = self.graph.bipartition {
            graph = graph.with_bipartition(b.left, b.right).map_err(malformed)?;
        }
        let mut perms = BTreeMap::new();
        for m in self.matchings {
            if m.u >= m.v {
                return Err(Error::MalformedCover(format!("matching ({}, {}) needs u < v", m.u, m.v)));
            }
            let p = Permutation::new(m.perm).map_err(malformed)?;
            if perms.insert((m.u, m.v), p).is_some() {
                return Err(Error::MalformedCover(format!("edge ({}, {}) given twice", m.u, m.v)));
            }
        }
        build_cover(graph, self.k, &perms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, cycle};

    fn swap() -> Permutation {
        Permutation::new(vec![1, 0]).unwrap()
    }

    /// K_{2,2} with one swapped edge: the classic uncolorable 2-fold cover.
    pub(crate) fn twisted_k22() -> MatchingCover {
        let g = complete_bipartite(2, 2).unwrap();
        let mut m = vec![Permutation::identity(2); 4];
        m[3] = swap();
        MatchingCover::from_edge_list(g, 2, m).unwrap()
    }

    #[test]
    fn build_from_map() {
        let c4 = cycle(4).unwrap();
        let perms: BTreeMap<_, _> = c4
            .edges()
            .iter()
            .map(|&e| (e, Permutation::identity(2)))
            .collect();
        assert!(build_cover(c4.clone(), 2, &perms).is_ok());

        let mut missing = perms.clone();
        missing.remove(&(0, 1));
        assert!(matches!(build_cover(c4.clone(), 2, &missing), Err(Error::MalformedCover(_))));
        let mut extra = perms.clone();
        extra.insert((0, 2), Permutation::identity(2));
        assert!(matches!(build_cover(c4.clone(), 2, &extra), Err(Error::MalformedCover(_))));
        let mut wrong = perms;
        wrong.insert((0, 1), Permutation::identity(3));
        assert!(matches!(build_cover(c4, 2, &wrong), Err(Error::InvalidParameter(_))));

        let k11 = complete_bipartite(1, 1).unwrap();
        let one = BTreeMap::from([((0, 1), swap())]);
        assert!(build_cover(k11, 2, &one).is_ok());
    }

    #[test]
    fn reversed_key_stores_inverse() {
        let g = cycle(3).unwrap();
        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let perms = BTreeMap::from([
            ((1, 0), p.clone()),
            ((1, 2), Permutation::identity(3)),
            ((0, 2), Permutation::identity(3)),
        ]);
        let c = build_cover(g, 3, &perms).unwrap();
        assert_eq!(c.matching(1, 0).unwrap(), p);
        assert_eq!(c.matching(0, 1).unwrap(), p.invert());
    }

    #[test]
    fn coloring_checks() {
        let c = MatchingCover::identity(cycle(4).unwrap(), 2).unwrap();
        assert!(c.is_valid_coloring(&[0, 1, 0, 1]));
        assert!(!c.is_valid_coloring(&[0, 0, 0, 0]));
        assert!(!c.is_valid_coloring(&[0, 1, 0]));
        assert!(!c.is_valid_coloring(&[0, 1, 0, 2]));

        let t = twisted_k22();
        for a in 0..16usize {
            let col: Vec<usize> = (0..4).map(|i| (a >> i) & 1).collect();
            assert!(!t.is_valid_coloring(&col), "{col:?}");
        }
    }

    #[test]
    fn relabel_examples() {
        let c = twisted_k22();
        assert_eq!(c.relabel_fiber(2, &Permutation::identity(2)).unwrap(), c);
        assert!(c.relabel_fiber(2, &Permutation::identity(3)).is_err());

        let k11 = MatchingCover::from_edge_list(complete_bipartite(1, 1).unwrap(), 2, vec![swap()])
            .unwrap();
        let r = k11.relabel_fiber(1, &swap()).unwrap();
        assert!(r.matchings()[0].is_identity());
        // domain side: σ ∘ τ⁻¹
        let r = k11.relabel_fiber(0, &swap()).unwrap();
        assert!(r.matchings()[0].is_identity());
    }

    #[test]
    fn relabel_transports_colorings() {
        let g = cycle(5).unwrap();
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let m = vec![p.clone(), Permutation::identity(3), p.invert(), p.clone(), p];
        let c = MatchingCover::from_edge_list(g, 3, m).unwrap();
        let tau = Permutation::new(vec![1, 2, 0]).unwrap();
        let r = c.relabel_fiber(2, &tau).unwrap();
        for idx in 0..3usize.pow(5) {
            let col: Vec<usize> = (0..5).map(|i| idx / 3usize.pow(i) % 3).collect();
            let mut moved = col.clone();
            moved[2] = tau.apply(col[2]);
            assert_eq!(c.is_valid_coloring(&col), r.is_valid_coloring(&moved));
        }
    }

    #[test]
    fn normalize_examples() {
        let id = MatchingCover::identity(cycle(4).unwrap(), 2).unwrap();
        assert_eq!(id.normalize().unwrap(), id);

        // swap on tree edge (0,1) moves to the non-tree edge (2,3)
        let mut m = vec![Permutation::identity(2); 4];
        m[0] = swap();
        let c = MatchingCover::from_edge_list(cycle(4).unwrap(), 2, m).unwrap();
        let n = c.normalize().unwrap();
        assert!(n.matchings()[..3].iter().all(Permutation::is_identity));
        assert_eq!(n.matchings()[3], swap());
        assert_eq!(n.normalize().unwrap(), n);

        let disconnected = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let d = MatchingCover::identity(disconnected, 2).unwrap();
        assert!(matches!(d.normalize(), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn k22_has_two_normal_forms() {
        let g = complete_bipartite(2, 2).unwrap();
        let mut forms = std::collections::BTreeSet::new();
        for mask in 0..16usize {
            let m = (0..4)
                .map(|i| if mask >> i & 1 == 1 { swap() } else { Permutation::identity(2) })
                .collect();
            let n = MatchingCover::from_edge_list(g.clone(), 2, m).unwrap().normalize().unwrap();
            let tree = g.spanning_tree_edges();
            assert!(tree.iter().all(|&e| n.matchings()[e].is_identity()));
            forms.insert(n.matchings().to_vec());
        }
        assert_eq!(forms.len(), 2);
    }

    #[test]
    fn explicit_graph_shape() {
        let c = twisted_k22();
        let h = c.explicit_graph();
        assert_eq!(h.vertex_count(), 8);
        // 4 fiber edges + 4 * 2 matching edges
        assert_eq!(h.edge_count(), 12);
    }

    #[test]
    fn json_is_byte_stable() {
        let c = twisted_k22();
        let text = c.to_json();
        let back = MatchingCover::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        let pos = |s: &str| text.find(s).unwrap();
        assert!(pos("\"graph\"") < pos("\"k\"") && pos("\"k\"") < pos("\"matchings\""));
    }

    #[test]
    fn json_rejects_malformed() {
        let c = twisted_k22();
        let mut f = c.to_file();
        f.matchings.pop();
        let t = serde_json::to_string(&f).unwrap();
        assert!(matches!(MatchingCover::from_json(&t), Err(Error::MalformedCover(_))));

        let mut f = c.to_file();
        f.matchings[0].perm = vec![0, 0];
        let t = serde_json::to_string(&f).unwrap();
        assert!(MatchingCover::from_json(&t).is_err());

        let mut f = c.to_file();
        let m = &mut f.matchings[0];
        std::mem::swap(&mut m.u, &mut m.v);
        let t = serde_json::to_string(&f).unwrap();
        assert!(MatchingCover::from_json(&t).is_err());
        assert!(MatchingCover::from_json("{").is_err());
    }
}
