//! Deciding colorability of a cover, and exact DP-chromatic numbers of small
//! graphs by exhausting normalized covers.

use rayon::prelude::*;

use crate::cover::{CandidateColoring, MatchingCover};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::perm::{all_permutations, factorial, Permutation};

/// Default cap on the number of normalized covers enumerated per fold.
pub const DEFAULT_COVER_BUDGET: u64 = 100_000_000;

/// Backtracking with forward checking over a smallest-last vertex order.
struct Backtracker<'a> {
    order: Vec<usize>,
    /// `links[v]` = (neighbor, forbidden color at neighbor for each color of v)
    links: Vec<Vec<(usize, &'a [usize])>>,
    domains: Vec<u64>,
    assigned: Vec<Option<usize>>,
    trail: Vec<(usize, u64)>,
    nodes: u64,
}

impl<'a> Backtracker<'a> {
    fn new(cover: &'a MatchingCover, inverses: &'a [Permutation]) -> Self {
        let g = cover.graph();
        let k = cover.fold();
        assert!(k <= 64, "fold above 64 is not supported by the solver");
        let mut links = vec![Vec::new(); g.vertex_count()];
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            links[u].push((v, cover.matchings()[i].image()));
            links[v].push((u, inverses[i].image()));
        }
        let full = if k == 64 { !0 } else { (1u64 << k) - 1 };
        Backtracker {
            order: g.smallest_last_order().0,
            links,
            domains: vec![full; g.vertex_count()],
            assigned: vec![None; g.vertex_count()],
            trail: Vec::new(),
            nodes: 0,
        }
    }

    /// Fix `v = c`, pruning neighbor domains. Returns false on a wipe-out;
    /// the trail records every change either way.
    fn assign(&mut self, v: usize, c: usize) -> bool {
        self.assigned[v] = Some(c);
        let mut ok = true;
        for &(w, map) in &self.links[v] {
            if self.assigned[w].is_some() {
                if self.assigned[w] == Some(map[c]) {
                    ok = false;
                }
                continue;
            }
            let bit = 1u64 << map[c];
            if self.domains[w] & bit != 0 {
                self.trail.push((w, self.domains[w]));
                self.domains[w] &= !bit;
                if self.domains[w] == 0 {
                    ok = false;
                }
            }
        }
        ok
    }

    fn undo(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let (w, d) = self.trail.pop().unwrap();
            self.domains[w] = d;
        }
        self.assigned[v] = None;
    }

    fn search(&mut self, pos: usize, limit: u64) -> std::result::Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > limit {
            return Err(());
        }
        let Some(&v) = self.order.get(pos) else {
            return Ok(true);
        };
        if self.assigned[v].is_some() {
            return self.search(pos + 1, limit);
        }
        let mut dom = self.domains[v];
        while dom != 0 {
            let c = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            let mark = self.trail.len();
            if self.assign(v, c) && self.search(pos + 1, limit)? {
                return Ok(true);
            }
            self.undo(v, mark);
        }
        Ok(false)
    }
}

/// Outcome of a budgeted colorability search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Colorability {
    Colorable(CandidateColoring),
    Uncolorable,
    Exhausted,
}

/// Search for an `H`-coloring, optionally with some vertices precolored.
/// `limit` caps the number of search nodes.
pub fn find_coloring_extending(
    cover: &MatchingCover,
    partial: &[Option<usize>],
    limit: u64,
) -> Colorability {
    let n = cover.graph().vertex_count();
    let inverses: Vec<Permutation> = cover.matchings().iter().map(Permutation::invert).collect();
    let mut bt = Backtracker::new(cover, &inverses);
    for (v, c) in partial.iter().enumerate().take(n) {
        if let Some(c) = *c {
            if c >= cover.fold() || bt.domains[v] >> c & 1 == 0 || !bt.assign(v, c) {
                return Colorability::Uncolorable;
            }
        }
    }
    match bt.search(0, limit) {
        Ok(true) => Colorability::Colorable(bt.assigned.iter().map(|c| c.unwrap()).collect()),
        Ok(false) => Colorability::Uncolorable,
        Err(()) => Colorability::Exhausted,
    }
}

/// An `H`-coloring of the cover, or `None` if none exists.
pub fn find_coloring(cover: &MatchingCover) -> Option<CandidateColoring> {
    match find_coloring_extending(cover, &[], u64::MAX) {
        Colorability::Colorable(c) => Some(c),
        _ => None,
    }
}

/// Enumerates the normalized `k`-fold covers of a connected graph: tree edges
/// fixed to the identity, non-tree edges ranging over all permutations with
/// the first non-tree edge most significant (lexicographic order).
pub struct NormalizedCovers {
    graph: Graph,
    fold: usize,
    non_tree: Vec<usize>,
    perms: Vec<Permutation>,
}

impl NormalizedCovers {
    pub fn new(graph: &Graph, fold: usize) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::UnsupportedInput("graph must be connected".into()));
        }
        if fold == 0 {
            return Err(invalid("fold must be positive"));
        }
        let tree = graph.spanning_tree_edges();
        let non_tree = (0..graph.edge_count()).filter(|e| !tree.contains(e)).collect();
        Ok(NormalizedCovers {
            graph: graph.clone(),
            fold,
            non_tree,
            perms: all_permutations(fold),
        })
    }

    /// `(k!)^(m - n + 1)`, or `None` on overflow.
    pub fn count(&self) -> Option<u64> {
        (factorial(self.fold) as u64).checked_pow(self.non_tree.len() as u32)
    }

    pub fn get(&self, index: u64) -> MatchingCover {
        let base = self.perms.len() as u64;
        let mut m = vec![Permutation::identity(self.fold); self.graph.edge_count()];
        let mut rest = index;
        for &e in self.non_tree.iter().rev() {
            m[e] = self.perms[(rest % base) as usize].clone();
            rest /= base;
        }
        MatchingCover::from_edge_list(self.graph.clone(), self.fold, m).expect("sizes agree")
    }
}

fn first_uncolorable(g: &Graph, k: usize, budget: u64, lo: usize) -> Result<Option<MatchingCover>> {
    let covers = NormalizedCovers::new(g, k)?;
    let total = covers
        .count()
        .filter(|&c| c <= budget)
        .ok_or_else(|| Error::ResourceLimit {
            reason: format!("too many normalized {k}-fold covers for budget {budget}"),
            lo,
            hi: Some(g.smallest_last_order().1),
        })?;
    // find_first keeps the lexicographically first witness regardless of schedule
    let hit = (0..total)
        .into_par_iter()
        .find_first(|&i| find_coloring(&covers.get(i)).is_none());
    Ok(hit.map(|i| covers.get(i)))
}

/// A normalized `k`-fold cover of `g` with no coloring (the lexicographically
/// first), or `None` when every `k`-fold cover is colorable.
pub fn hardest_cover_search(g: &Graph, k: usize, budget: u64) -> Result<Option<MatchingCover>> {
    first_uncolorable(g, k, budget, 1)
}

/// The smallest `k <= max_k` such that every `k`-fold cover of `g` is
/// colorable, or `max_k + 1` if no such `k` exists in range.
pub fn chi_dp_exact(g: &Graph, max_k: usize, budget: u64) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::UnsupportedInput("graph must be connected".into()));
    }
    for k in 1..=max_k {
        if first_uncolorable(g, k, budget, k)?.is_none() {
            return Ok(k);
        }
    }
    Ok(max_k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, cycle};

    fn twisted_k22() -> MatchingCover {
        let mut m = vec![Permutation::identity(2); 4];
        m[3] = Permutation::new(vec![1, 0]).unwrap();
        MatchingCover::from_edge_list(complete_bipartite(2, 2).unwrap(), 2, m).unwrap()
    }

    #[test]
    fn c4_identity_colorable() {
        let c = MatchingCover::identity(cycle(4).unwrap(), 2).unwrap();
        let col = find_coloring(&c).unwrap();
        assert!(c.is_valid_coloring(&col));
        assert_ne!(col[0], col[1]);
    }

    #[test]
    fn twisted_k22_uncolorable() {
        assert_eq!(find_coloring(&twisted_k22()), None);
    }

    #[test]
    fn precolored_vertices() {
        let c = MatchingCover::identity(cycle(4).unwrap(), 2).unwrap();
        let r = find_coloring_extending(&c, &[Some(1), None, None, None], u64::MAX);
        match r {
            Colorability::Colorable(col) => assert_eq!(col, vec![1, 0, 1, 0]),
            other => panic!("{other:?}"),
        }
        let r = find_coloring_extending(&c, &[Some(1), Some(1), None, None], u64::MAX);
        assert_eq!(r, Colorability::Uncolorable);
        let r = find_coloring_extending(&c, &[Some(5), None, None, None], u64::MAX);
        assert_eq!(r, Colorability::Uncolorable);
    }

    #[test]
    fn node_limit() {
        let c = MatchingCover::identity(cycle(4).unwrap(), 2).unwrap();
        assert_eq!(find_coloring_extending(&c, &[], 1), Colorability::Exhausted);
    }

    #[test]
    fn chi_dp_small() {
        for n in 3..=8 {
            assert_eq!(chi_dp_exact(&cycle(n).unwrap(), 5, DEFAULT_COVER_BUDGET).unwrap(), 3);
        }
        let k22 = complete_bipartite(2, 2).unwrap();
        assert_eq!(chi_dp_exact(&k22, 5, DEFAULT_COVER_BUDGET).unwrap(), 3);
        let k21 = complete_bipartite(2, 1).unwrap();
        assert_eq!(chi_dp_exact(&k21, 5, DEFAULT_COVER_BUDGET).unwrap(), 2);
        // sentinel
        assert_eq!(chi_dp_exact(&k22, 2, DEFAULT_COVER_BUDGET).unwrap(), 3);
        assert_eq!(chi_dp_exact(&k22, 1, DEFAULT_COVER_BUDGET).unwrap(), 2);
    }

    #[test]
    fn chi_dp_budget() {
        // K_{3,3}: 4 non-tree edges, 2^4 covers at k=2 but 6^4 at k=3
        let g = complete_bipartite(3, 3).unwrap();
        match chi_dp_exact(&g, 4, 100) {
            Err(Error::ResourceLimit { lo, hi, .. }) => {
                assert_eq!(lo, 3);
                assert_eq!(hi, Some(4));
            }
            other => panic!("{other:?}"),
        }
        let disconnected = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            chi_dp_exact(&disconnected, 3, 10),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn hardest_cover_examples() {
        let c4 = cycle(4).unwrap();
        let w = hardest_cover_search(&c4, 2, DEFAULT_COVER_BUDGET).unwrap().unwrap();
        assert!(find_coloring(&w).is_none());
        assert_eq!(w.matchings().iter().filter(|p| !p.is_identity()).count(), 1);
        assert!(hardest_cover_search(&c4, 3, DEFAULT_COVER_BUDGET).unwrap().is_none());
        let k11 = complete_bipartite(1, 1).unwrap();
        assert!(hardest_cover_search(&k11, 2, DEFAULT_COVER_BUDGET).unwrap().is_none());
    }

    #[test]
    fn normalized_cover_count() {
        let covers = NormalizedCovers::new(&complete_bipartite(2, 2).unwrap(), 2).unwrap();
        assert_eq!(covers.count(), Some(2));
        let covers = NormalizedCovers::new(&complete_bipartite(3, 3).unwrap(), 3).unwrap();
        assert_eq!(covers.count(), Some(6u64.pow(4)));
        let last = covers.get(6u64.pow(4) - 1);
        let reversed = Permutation::new(vec![2, 1, 0]).unwrap();
        assert_eq!(last.matchings().iter().filter(|p| **p == reversed).count(), 4);
    }
}
