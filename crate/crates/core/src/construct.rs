//! Explicit uncolorable covers of `K_{k,m}`: random columns, the
//! conditional-expectation choice of columns, and the extension that kills
//! every surviving left assignment with one extra right vertex.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::blocking::{blocked_set, enumerate_column_classes, ColumnClass, MAX_ENUMERATED_K};
use crate::cover::MatchingCover;
use crate::error::{invalid, Result};
use crate::graph::complete_bipartite;
use crate::mu::{columns_of_cover, cover_from_columns};
use crate::perm::{all_permutations, universe_size, Assignment, Permutation};

/// Largest `k` for which greedy column selection is offered.
pub const MAX_GREEDY_K: usize = 6;

/// RNG for edge `(i, j)` of a seeded construction: one ChaCha stream per edge.
pub fn edge_rng(seed: u64, i: usize, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((i as u64) << 32) | j as u64);
    rng
}

/// A cover of `K_{k,t}` with an independent uniform permutation (Fisher–Yates)
/// on every edge.
pub fn random_cover(k: usize, t: usize, seed: u64) -> Result<MatchingCover> {
    let g = complete_bipartite(k, t)?;
    let m = g
        .edges()
        .iter()
        .map(|&(i, r)| {
            let mut v: Vec<usize> = (0..k).collect();
            v.shuffle(&mut edge_rng(seed, i, r - k));
            Permutation::new(v)
        })
        .collect::<Result<Vec<_>>>()?;
    MatchingCover::from_edge_list(g, k, m)
}

/// Left assignments of a `K_{k,t}` cover blocked by no column. The cover is
/// colorable iff this is nonempty: such an assignment leaves a free color at
/// every right vertex.
pub fn surviving_assignments(cover: &MatchingCover) -> Result<BitSet> {
    let k = cover.fold();
    let mut survivors = BitSet::full(universe_size(k));
    for col in columns_of_cover(cover)? {
        survivors.difference_with(&blocked_set(&col));
    }
    Ok(survivors)
}

/// The column with `perms[i](c) = (c - f[i] + i) mod k`, which sends `f` to
/// the identity bijection and so blocks it.
pub fn blocking_column_for(f: &Assignment) -> ColumnClass {
    let k = f.k();
    let perms = f
        .colors()
        .iter()
        .enumerate()
        .map(|(i, &fi)| Permutation::shift(k, (k + i - fi) % k))
        .collect();
    ColumnClass::new(perms).expect("k permutations of size k")
}

/// Picks, for a set of surviving assignments, a column blocking at least the
/// expected number `|S| · k!/k^k` of them.
///
/// For `k <= 4` every canonical column is scored and the first (in
/// lexicographic order) with the largest count wins. Above that the column is
/// fixed one fiber at a time: with `perms[..j]` chosen, an assignment can still
/// be blocked only if its images so far are distinct, and `perms[j]` is the
/// lexicographically first permutation keeping the most such assignments.
/// Each step keeps the conditional expectation from dropping.
pub struct GreedyColumns {
    k: usize,
    enumerated: Option<(Vec<ColumnClass>, Vec<BitSet>)>,
    perms: Vec<Permutation>,
}

impl GreedyColumns {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_GREEDY_K {
            return Err(invalid(format!("greedy construction supports 1 <= k <= {MAX_GREEDY_K}")));
        }
        let enumerated = if k <= MAX_ENUMERATED_K {
            let classes = enumerate_column_classes(k)?;
            let sets = classes.iter().map(blocked_set).collect();
            Some((classes, sets))
        } else {
            None
        };
        Ok(GreedyColumns {
            k,
            enumerated,
            perms: all_permutations(k),
        })
    }

    /// Best column for `survivors` and its full blocked set.
    pub fn best(&mut self, survivors: &BitSet) -> (ColumnClass, BitSet) {
        if let Some((classes, sets)) = &self.enumerated {
            let mut best = 0;
            let mut best_gain = 0;
            for (i, s) in sets.iter().enumerate() {
                let g = s.intersection_count(survivors);
                if g > best_gain {
                    best_gain = g;
                    best = i;
                }
            }
            return (classes[best].clone(), sets[best].clone());
        }
        let col = self.fiber_wise(survivors);
        let set = blocked_set(&col);
        (col, set)
    }

    fn fiber_wise(&self, survivors: &BitSet) -> ColumnClass {
        let k = self.k;
        // (remaining digits, used-color mask) per alive assignment
        let mut alive: Vec<(usize, u32)> = survivors
            .iter()
            .map(|idx| (idx / k, 1u32 << (idx % k)))
            .collect();
        let mut chosen = vec![Permutation::identity(k)];
        let mut weight = vec![0usize; k * k];
        for _ in 1..k {
            weight.iter_mut().for_each(|w| *w = 0);
            for &(rest, used) in &alive {
                let a = rest % k;
                for c in 0..k {
                    if used >> c & 1 == 0 {
                        weight[a * k + c] += 1;
                    }
                }
            }
            let mut best = 0;
            let mut best_score = 0;
            for (pi, p) in self.perms.iter().enumerate() {
                let score: usize = (0..k).map(|a| weight[a * k + p.apply(a)]).sum();
                if score > best_score {
                    best_score = score;
                    best = pi;
                }
            }
            let p = &self.perms[best];
            alive.retain_mut(|(rest, used)| {
                let c = p.apply(*rest % k);
                *rest /= k;
                if *used >> c & 1 == 1 {
                    return false;
                }
                *used |= 1 << c;
                true
            });
            chosen.push(p.clone());
        }
        ColumnClass::new(chosen).expect("k permutations")
    }
}

/// A cover of `K_{k,t}` chosen column by column, each column blocking the
/// most surviving assignments; ends with at most `⌊k^k (1 - k!/k^k)^t⌋`
/// survivors.
pub fn derandomized_cover(k: usize, t: usize) -> Result<MatchingCover> {
    Ok(derandomized_trace(k, t)?.0)
}

/// [`derandomized_cover`] plus the survivor count after each column.
pub fn derandomized_trace(k: usize, t: usize) -> Result<(MatchingCover, Vec<usize>)> {
    if t == 0 {
        return Err(invalid("t must be positive"));
    }
    let mut chooser = GreedyColumns::new(k)?;
    let mut survivors = BitSet::full(universe_size(k));
    let mut cols = Vec::with_capacity(t);
    let mut trace = Vec::with_capacity(t);
    for _ in 0..t {
        let (col, set) = chooser.best(&survivors);
        survivors.difference_with(&set);
        trace.push(survivors.count());
        cols.push(col);
    }
    Ok((cover_from_columns(k, &cols)?, trace))
}

/// Add one right vertex per surviving assignment, joined by the column that
/// blocks it. Returns the extended cover and the number `r` of vertices added.
pub fn extend_to_uncolorable(cover: &MatchingCover) -> Result<(MatchingCover, usize)> {
    let k = cover.fold();
    let survivors = surviving_assignments(cover)?;
    let r = survivors.count();
    if r == 0 {
        return Ok((cover.clone(), 0));
    }
    let mut cols = columns_of_cover(cover)?;
    for idx in survivors.iter() {
        cols.push(blocking_column_for(&Assignment::decode(k, idx)?));
    }
    Ok((cover_from_columns(k, &cols)?, r))
}
