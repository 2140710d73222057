//! The threshold `μ(k)`: the least `t` such that some `k`-fold cover of
//! `K_{k,t}` has no coloring.
//!
//! A cover of `K_{k,t}` is uncolorable exactly when the blocked sets of its
//! `t` columns cover all `k^k` left assignments (a left assignment that no
//! column blocks leaves a free color at every right vertex). So `μ(k)` is a
//! minimum set cover over the blocked sets, which is what [`mu_exact`]
//! computes by branch and bound.
//!
//! Search outline, for a fixed target `t`:
//! * left-fiber relabeling acts transitively on columns, so the first column
//!   is the identity column;
//! * the root branches on the all-zero assignment; relabeling every fiber by
//!   one `ρ` with `ρ(0) = 0` and permuting left vertices fixes both, so only
//!   one root branch per orbit is searched;
//! * every other node branches on the uncovered assignment hit by the fewest
//!   viable sets, dropping earlier siblings from later branches;
//! * a node is cut when `⌈uncovered / k!⌉` or the line bound (no set holds
//!   two assignments at Hamming distance one) exceeds the sets left, or when
//!   the largest remaining gains cannot reach the uncovered count.
//!
//! The root's branches are the unit of parallel work and of resumption.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::blocking::{blocked_set, enumerate_column_classes, ColumnClass, MAX_ENUMERATED_K};
use crate::bounds::counting_lower;
use crate::construct::GreedyColumns;
use crate::cover::MatchingCover;
use crate::error::{invalid, Error, Result};
use crate::graph::complete_bipartite;
use crate::perm::{all_permutations, factorial, universe_size, Assignment};

/// Default node budget for the exact search. At `k = 4` a node costs about
/// 50 µs on one core, so a default run stays under an hour.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Root branches run together per wave; fixed so results do not depend on
/// the thread count.
const WAVE: usize = 64;

/// Distinct blocked sets over the canonical columns, with the search indexes.
pub struct SetSystem {
    k: usize,
    universe: usize,
    words: usize,
    set_words: usize,
    /// `sets[s * words ..][..words]`
    sets: Vec<u64>,
    reps: Vec<ColumnClass>,
    /// `containing[e * set_words ..][..set_words]`: which sets hold `e`.
    containing: Vec<u64>,
    /// For each direction `d`, the line id of every assignment.
    lines: Vec<Vec<u32>>,
    line_count: usize,
    lookup: HashMap<BitSet, usize>,
}

impl SetSystem {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ENUMERATED_K {
            return Err(invalid(format!("exact search supports 1 <= k <= {MAX_ENUMERATED_K}")));
        }
        let universe = universe_size(k);
        let words = universe.div_ceil(64);
        let mut seen: HashMap<BitSet, usize> = HashMap::new();
        let mut sets = Vec::new();
        let mut reps = Vec::new();
        for col in enumerate_column_classes(k)? {
            let b = blocked_set(&col);
            if seen.contains_key(&b) {
                continue;
            }
            seen.insert(b.clone(), reps.len());
            sets.extend_from_slice(b.words());
            reps.push(col);
        }
        let set_words = reps.len().div_ceil(64);
        let mut containing = vec![0u64; universe * set_words];
        for s in 0..reps.len() {
            for (wi, &w) in sets[s * words..(s + 1) * words].iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let e = wi * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    containing[e * set_words + s / 64] |= 1 << (s % 64);
                }
            }
        }
        let line_count = universe / k;
        let lines = (0..k)
            .map(|d| {
                let low = k.pow(d as u32);
                (0..universe)
                    .map(|e| ((e % low) + (e / (low * k)) * low) as u32)
                    .collect()
            })
            .collect();
        Ok(SetSystem {
            k,
            universe,
            words,
            set_words,
            sets,
            reps,
            containing,
            lines,
            line_count,
            lookup: seen,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representatives(&self) -> &[ColumnClass] {
        &self.reps
    }

    /// Element permutations fixing the identity column and the all-zero
    /// assignment: `f_i -> ρ(f_{π⁻¹(i)})` with `ρ(0) = 0`.
    fn root_symmetries(&self) -> Vec<Vec<usize>> {
        let k = self.k;
        let perms = all_permutations(k);
        let mut out = Vec::new();
        for rho in perms.iter().filter(|r| r.apply(0) == 0) {
            for pi in &perms {
                let map = (0..self.universe)
                    .map(|e| {
                        let f = Assignment::decode(k, e).expect("in range");
                        let mut g = vec![0; k];
                        for (i, &c) in f.colors().iter().enumerate() {
                            g[pi.apply(i)] = rho.apply(c);
                        }
                        Assignment::new(g).expect("colors below k").encode()
                    })
                    .collect();
                out.push(map);
            }
        }
        out
    }

    /// The set `map(s)`, if it is one of ours.
    fn image(&self, s: usize, map: &[usize]) -> Option<usize> {
        let mut b = BitSet::new(self.universe);
        for (wi, &w) in self.set(s).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                b.insert(map[wi * 64 + w.trailing_zeros() as usize]);
                w &= w - 1;
            }
        }
        self.lookup.get(&b).copied()
    }

    fn set(&self, s: usize) -> &[u64] {
        &self.sets[s * self.words..(s + 1) * self.words]
    }

    fn covering(&self, e: usize) -> &[u64] {
        &self.containing[e * self.set_words..(e + 1) * self.set_words]
    }

    fn gain(&self, covered: &[u64], s: usize) -> usize {
        self.set(s)
            .iter()
            .zip(covered)
            .map(|(a, c)| (a & !c).count_ones() as usize)
            .sum()
    }

    fn uncovered(&self, covered: &[u64]) -> usize {
        self.universe - covered.iter().map(|w| w.count_ones() as usize).sum::<usize>()
    }

    fn uncovered_elements<'a>(&'a self, covered: &'a [u64]) -> impl Iterator<Item = usize> + 'a {
        covered.iter().enumerate().flat_map(move |(wi, &c)| {
            let mut w = !c;
            if wi + 1 == covered.len() && !self.universe.is_multiple_of(64) {
                w &= (1u64 << (self.universe % 64)) - 1;
            }
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    wi * 64 + b
                })
            })
        })
    }

    /// Largest number of uncovered assignments on one line; each needs its
    /// own set.
    fn line_bound(&self, covered: &[u64], scratch: &mut [u32]) -> usize {
        let mut best = 0;
        for d in 0..self.k {
            scratch[..self.line_count].iter_mut().for_each(|c| *c = 0);
            for e in self.uncovered_elements(covered) {
                let l = self.lines[d][e] as usize;
                scratch[l] += 1;
                best = best.max(scratch[l] as usize);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Counting,
    Line,
    /// The `left` largest gains among viable sets fall short.
    Gain,
}

#[derive(Debug, Default, Clone, Copy)]
struct Stats {
    nodes: u64,
    counting_cuts: u64,
    line_cuts: u64,
    gain_cuts: u64,
}

enum Abort {
    Budget,
    Cancelled,
}

struct Dfs<'a> {
    sys: &'a SetSystem,
    limit: u64,
    stats: Stats,
    chosen: Vec<usize>,
    scratch: Vec<u32>,
    /// Gain histogram, left zeroed between nodes.
    hist: Vec<usize>,
    cancel: Option<(&'a AtomicUsize, usize)>,
}

/// What a node decided before branching.
enum Expand {
    Done,
    Dead,
    Branch(Vec<usize>, Vec<u64>),
}

impl<'a> Dfs<'a> {
    fn new(sys: &'a SetSystem, limit: u64) -> Self {
        Dfs {
            sys,
            limit,
            stats: Stats::default(),
            chosen: Vec::new(),
            scratch: vec![0; sys.line_count.max(1)],
            hist: vec![0; factorial(sys.k) + 1],
            cancel: None,
        }
    }

    /// `pivot` forces the branching element when it is uncovered.
    fn expand(
        &mut self,
        covered: &[u64],
        allowed: &[u64],
        left: usize,
        pivot: Option<usize>,
    ) -> std::result::Result<Expand, Abort> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.limit {
            return Err(Abort::Budget);
        }
        if let Some((flag, me)) = self.cancel {
            if self.stats.nodes.is_multiple_of(1024) && flag.load(Ordering::Relaxed) < me {
                return Err(Abort::Cancelled);
            }
        }
        let sys = self.sys;
        let unc = sys.uncovered(covered);
        if unc == 0 {
            return Ok(Expand::Done);
        }
        let per = factorial(sys.k);
        if unc > per * left {
            self.stats.counting_cuts += 1;
            return Ok(Expand::Dead);
        }
        if sys.line_bound(covered, &mut self.scratch) > left {
            self.stats.line_cuts += 1;
            return Ok(Expand::Dead);
        }
        // sets able to take part in a completion with `left` sets
        let need = unc.saturating_sub(per * (left - 1)).max(1);
        let mut viable = vec![0u64; sys.set_words];
        for (wi, &a) in allowed.iter().enumerate() {
            let mut w = a;
            while w != 0 {
                let s = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                let g = sys.gain(covered, s);
                if g >= need {
                    viable[wi] |= 1 << (s % 64);
                    self.hist[g] += 1;
                }
            }
        }
        let mut reach = 0;
        let mut take = left;
        for g in (need..=per).rev() {
            let n = std::mem::take(&mut self.hist[g]);
            let used = n.min(take);
            reach += used * g;
            take -= used;
        }
        if reach < unc {
            self.stats.gain_cuts += 1;
            return Ok(Expand::Dead);
        }
        let hits = |e: usize| -> usize {
            sys.covering(e)
                .iter()
                .zip(&viable)
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum()
        };
        let mut best: Option<(usize, usize)> = pivot
            .filter(|&p| covered[p / 64] >> (p % 64) & 1 == 0)
            .map(|p| (hits(p), p));
        if best.is_none() {
            for e in sys.uncovered_elements(covered) {
                let c = hits(e);
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, e));
                    if c == 0 {
                        break;
                    }
                }
            }
        }
        let (count, e) = best.expect("something is uncovered");
        if count == 0 {
            return Ok(Expand::Dead);
        }
        let branches = sys
            .covering(e)
            .iter()
            .zip(&viable)
            .enumerate()
            .flat_map(|(wi, (a, b))| {
                let mut w = a & b;
                std::iter::from_fn(move || {
                    (w != 0).then(|| {
                        let s = wi * 64 + w.trailing_zeros() as usize;
                        w &= w - 1;
                        s
                    })
                })
            })
            .collect();
        Ok(Expand::Branch(branches, viable))
    }

    fn child_state(&self, covered: &[u64], s: usize) -> Vec<u64> {
        covered.iter().zip(self.sys.set(s)).map(|(c, a)| c | a).collect()
    }

    /// `allowed` holds the sets still usable here: viable at the parent and
    /// not an earlier sibling. A set viable at a child is viable at its parent.
    fn dfs(&mut self, covered: &[u64], allowed: &[u64], left: usize) -> std::result::Result<bool, Abort> {
        let (branches, mut viable) = match self.expand(covered, allowed, left, None)? {
            Expand::Done => return Ok(true),
            Expand::Dead => return Ok(false),
            Expand::Branch(b, v) => (b, v),
        };
        for s in branches {
            viable[s / 64] &= !(1 << (s % 64));
            let child = self.child_state(covered, s);
            self.chosen.push(s);
            if self.dfs(&child, &viable, left - 1)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

/// Where an interrupted exact search stands: every `t' < t` is refuted and
/// root branches `0..next_branch` at `t` are refuted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frontier {
    pub t: usize,
    pub next_branch: usize,
}

/// Outcome of one feasibility search at a fixed `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Refuted without search by `⌈k^k / k!⌉`.
    CountingBound,
    Refuted,
    Found,
    Exhausted,
}

/// One line of the impossibility log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub t: usize,
    pub outcome: Outcome,
    pub nodes: u64,
    pub root_branches: usize,
    /// Root branches left after symmetry reduction.
    pub root_orbits: usize,
    pub counting_cuts: u64,
    pub line_cuts: u64,
    pub gain_cuts: u64,
    pub bounds: Vec<Bound>,
}

enum Decision {
    Found(Vec<ColumnClass>),
    Refuted,
    Exhausted { next_branch: usize },
}

struct BranchResult {
    stats: Stats,
    outcome: std::result::Result<Option<Vec<usize>>, Abort>,
}

/// Decide whether `t` sets cover everything, starting from root branch
/// `start`. Node counts follow sequential semantics so the outcome and the
/// log do not depend on scheduling.
fn decide_at(sys: &SetSystem, t: usize, budget: u64, start: usize) -> (Decision, SearchRecord) {
    let mut record = SearchRecord {
        t,
        outcome: Outcome::Refuted,
        nodes: 0,
        root_branches: 0,
        root_orbits: 0,
        counting_cuts: 0,
        line_cuts: 0,
        gain_cuts: 0,
        bounds: vec![Bound::Counting, Bound::Line, Bound::Gain],
    };
    let finish = |mut record: SearchRecord, d: Decision| {
        record.outcome = match d {
            Decision::Found(_) => Outcome::Found,
            Decision::Refuted => Outcome::Refuted,
            Decision::Exhausted { .. } => Outcome::Exhausted,
        };
        (d, record)
    };
    if t == 0 {
        return finish(record, Decision::Refuted);
    }
    let mut all = vec![0u64; sys.set_words];
    for s in 0..sys.len() {
        all[s / 64] |= 1 << (s % 64);
    }
    let root_cov: Vec<u64> = sys.set(0).to_vec();
    let mut root = Dfs::new(sys, budget);
    let expanded = root.expand(&root_cov, &all, t - 1, Some(0));
    record.nodes = root.stats.nodes;
    record.counting_cuts = root.stats.counting_cuts;
    record.line_cuts = root.stats.line_cuts;
    record.gain_cuts = root.stats.gain_cuts;
    let (branches, root_viable) = match expanded {
        Err(_) => return finish(record, Decision::Exhausted { next_branch: start }),
        Ok(Expand::Done) => {
            return finish(record, Decision::Found(vec![sys.reps[0].clone()]));
        }
        Ok(Expand::Dead) => return finish(record, Decision::Refuted),
        Ok(Expand::Branch(b, v)) => (b, v),
    };
    record.root_branches = branches.len();
    // A branch whose set is the image of an earlier branch's set under a
    // symmetry fixing the root needs no search: once earlier branches are
    // refuted, no cover contains either set.
    let mut position = vec![usize::MAX; sys.len()];
    for (i, &s) in branches.iter().enumerate() {
        position[s] = i;
    }
    let symmetries = sys.root_symmetries();
    let keep: Vec<bool> = branches
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            symmetries
                .iter()
                .all(|m| sys.image(s, m).is_none_or(|s2| position[s2] >= i))
        })
        .collect();
    record.root_orbits = keep.iter().filter(|&&k| k).count();
    let mut used = record.nodes;
    let mut idx = start;
    while idx < branches.len() {
        let wave_end = (idx + WAVE).min(branches.len());
        // an even share per searched branch keeps the total within budget
        let searched = keep[idx..wave_end].iter().filter(|&&k| k).count().max(1);
        let share = budget.saturating_sub(used) / searched as u64;
        let found_at = AtomicUsize::new(usize::MAX);
        let run = |b: usize, limit: u64, cancel: Option<&AtomicUsize>| {
            let s = branches[b];
            let mut allowed = root_viable.clone();
            for &prev in &branches[..=b] {
                allowed[prev / 64] &= !(1 << (prev % 64));
            }
            let mut dfs = Dfs::new(sys, limit);
            dfs.cancel = cancel.map(|c| (c, b));
            let child = dfs.child_state(&root_cov, s);
            dfs.chosen.push(s);
            let outcome = dfs.dfs(&child, &allowed, t - 2).map(|ok| {
                ok.then(|| {
                    if let Some(c) = cancel {
                        c.fetch_min(b, Ordering::Relaxed);
                    }
                    dfs.chosen.clone()
                })
            });
            BranchResult {
                stats: dfs.stats,
                outcome,
            }
        };
        let results: Vec<BranchResult> = (idx..wave_end)
            .into_par_iter()
            .map(|b| {
                if keep[b] {
                    run(b, share, Some(&found_at))
                } else {
                    BranchResult {
                        stats: Stats::default(),
                        outcome: Ok(None),
                    }
                }
            })
            .collect();
        for (offset, mut r) in results.into_iter().enumerate() {
            let b = idx + offset;
            if matches!(r.outcome, Err(Abort::Budget)) && used + r.stats.nodes < budget {
                // only this branch's share ran out: redo it alone with the rest
                used += r.stats.nodes;
                r = run(b, budget - used, None);
            }
            used = used.saturating_add(r.stats.nodes);
            record.counting_cuts += r.stats.counting_cuts;
            record.line_cuts += r.stats.line_cuts;
            record.gain_cuts += r.stats.gain_cuts;
            record.nodes = used;
            match r.outcome {
                _ if used > budget => {
                    return finish(record, Decision::Exhausted { next_branch: b });
                }
                Err(Abort::Budget) | Err(Abort::Cancelled) => {
                    return finish(record, Decision::Exhausted { next_branch: b });
                }
                Ok(Some(chosen)) => {
                    let mut cols = vec![sys.reps[0].clone()];
                    cols.extend(chosen.into_iter().map(|s| sys.reps[s].clone()));
                    return finish(record, Decision::Found(cols));
                }
                Ok(None) => {}
            }
        }
        idx = wave_end;
    }
    finish(record, Decision::Refuted)
}

/// True iff some `t` columns block every left assignment of `K_{k,t}`,
/// i.e. iff `K_{k,t}` has an uncolorable `k`-fold cover.
pub fn decide_uncoverable(k: usize, t: usize, budget: u64) -> Result<bool> {
    if t < counting_lower(k)? {
        return Ok(false);
    }
    let sys = SetSystem::new(k)?;
    match decide_at(&sys, t, budget, 0).0 {
        Decision::Found(_) => Ok(true),
        Decision::Refuted => Ok(false),
        Decision::Exhausted { .. } => Err(Error::ResourceLimit {
            reason: format!("node budget {budget} exhausted deciding t={t}"),
            lo: 0,
            hi: None,
        }),
    }
}

/// Exact value or bracket for `μ(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuValue {
    Exact(usize),
    Bracket { lo: usize, hi: usize },
}

impl MuValue {
    pub fn lo(&self) -> usize {
        match *self {
            MuValue::Exact(v) => v,
            MuValue::Bracket { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> usize {
        match *self {
            MuValue::Exact(v) => v,
            MuValue::Bracket { hi, .. } => hi,
        }
    }

    fn from_bracket(lo: usize, hi: usize) -> Self {
        if lo == hi {
            MuValue::Exact(lo)
        } else {
            MuValue::Bracket { lo, hi }
        }
    }
}

impl std::fmt::Display for MuValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MuValue::Exact(v) => write!(f, "{v}"),
            MuValue::Bracket { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuResult {
    pub k: usize,
    pub value: MuValue,
    /// Columns whose blocked sets cover every assignment; `len() == value.hi()`.
    pub witness_columns: Vec<ColumnClass>,
    pub log: Vec<SearchRecord>,
    pub frontier: Option<Frontier>,
}

/// Greedy upper bound: repeatedly add the column blocking the most surviving
/// assignments.
pub fn mu_greedy(k: usize) -> Result<MuResult> {
    let lo = counting_lower(k)?;
    let mut chooser = GreedyColumns::new(k)?;
    let mut survivors = BitSet::full(universe_size(k));
    let mut cols = Vec::new();
    while !survivors.is_empty() {
        let (col, blocked) = chooser.best(&survivors);
        survivors.difference_with(&blocked);
        cols.push(col);
    }
    Ok(MuResult {
        k,
        value: MuValue::from_bracket(lo, cols.len()),
        witness_columns: cols,
        log: Vec::new(),
        frontier: None,
    })
}

/// Exact `μ(k)` by iterative deepening over `t` from `⌈k^k/k!⌉`. If the node
/// budget runs out the result is a bracket whose upper side is the greedy
/// witness.
pub fn mu_exact(k: usize, budget: u64) -> Result<MuResult> {
    mu_exact_resume(k, budget, None)
}

/// Continue an exact search from a saved frontier.
pub fn mu_exact_resume(k: usize, budget: u64, frontier: Option<Frontier>) -> Result<MuResult> {
    let lo0 = counting_lower(k)?;
    let sys = SetSystem::new(k)?;
    let greedy = mu_greedy(k)?;
    let (mut t, mut start) = match &frontier {
        Some(f) if f.t >= lo0 => (f.t, f.next_branch),
        _ => (lo0, 0),
    };
    let mut log = Vec::new();
    if t > 1 {
        log.push(SearchRecord {
            t: t - 1,
            outcome: if frontier.is_some() { Outcome::Refuted } else { Outcome::CountingBound },
            nodes: 0,
            root_branches: 0,
            root_orbits: 0,
            counting_cuts: 0,
            line_cuts: 0,
            gain_cuts: 0,
            bounds: vec![Bound::Counting],
        });
    }
    let mut used = 0u64;
    loop {
        if t >= greedy.value.hi() {
            // greedy already realizes t, and everything below is refuted
            log.push(SearchRecord {
                t,
                outcome: Outcome::Found,
                nodes: 0,
                root_branches: 0,
                root_orbits: 0,
                counting_cuts: 0,
                line_cuts: 0,
                gain_cuts: 0,
                bounds: Vec::new(),
            });
            return Ok(MuResult {
                k,
                value: MuValue::Exact(t),
                witness_columns: greedy.witness_columns,
                log,
                frontier: None,
            });
        }
        let (decision, record) = decide_at(&sys, t, budget.saturating_sub(used), start);
        used = used.saturating_add(record.nodes);
        log.push(record);
        match decision {
            Decision::Found(cols) => {
                return Ok(MuResult {
                    k,
                    value: MuValue::Exact(t),
                    witness_columns: cols,
                    log,
                    frontier: None,
                })
            }
            Decision::Refuted => {
                t += 1;
                start = 0;
            }
            Decision::Exhausted { next_branch } => {
                return Ok(MuResult {
                    k,
                    value: MuValue::from_bracket(t, greedy.value.hi()),
                    witness_columns: greedy.witness_columns,
                    log,
                    frontier: Some(Frontier { t, next_branch }),
                })
            }
        }
    }
}

/// The cover of `K_{k,|cols|}` whose right vertex `j` is joined by `cols[j]`.
/// Fails unless the columns block every left assignment.
pub fn uncolorable_cover_from_columns(k: usize, cols: &[ColumnClass]) -> Result<MatchingCover> {
    let cover = cover_from_columns(k, cols)?;
    let mut union = BitSet::new(universe_size(k));
    for c in cols {
        union.union_with(&blocked_set(c));
    }
    let missing = universe_size(k) - union.count();
    if missing > 0 {
        return Err(Error::InvalidWitness(format!("{missing} assignments are blocked by no column")));
    }
    Ok(cover)
}

/// The cover of `K_{k,|cols|}` built from columns, with no coverage check.
pub fn cover_from_columns(k: usize, cols: &[ColumnClass]) -> Result<MatchingCover> {
    if let Some(c) = cols.iter().find(|c| c.k() != k) {
        return Err(invalid(format!("column of size {} for k={k}", c.k())));
    }
    let t = cols.len();
    let g = complete_bipartite(k, t)?;
    // edges are sorted (i, k + j): left-major
    let m = (0..k)
        .flat_map(|i| cols.iter().map(move |c| c.perms()[i].clone()))
        .collect();
    MatchingCover::from_edge_list(g, k, m)
}

/// Split a cover of `K_{k,t}` (left `0..k`, right `k..k+t`) into columns.
pub fn columns_of_cover(cover: &MatchingCover) -> Result<Vec<ColumnClass>> {
    let g = cover.graph();
    let k = cover.fold();
    let shape_ok = g.bipartition().is_some_and(|b| {
        b.left.len() == k && b.left.iter().copied().eq(0..k) && b.right.iter().copied().eq(k..g.vertex_count())
    }) && g.edge_count() == k * (g.vertex_count() - k);
    if !shape_ok {
        return Err(Error::UnsupportedInput(format!(
            "expected a cover of K_{{{k},t}} with left side 0..{k}"
        )));
    }
    (k..g.vertex_count())
        .map(|r| {
            let perms = (0..k).map(|i| cover.matching(i, r).expect("complete")).collect();
            ColumnClass::new(perms)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::find_coloring;

    #[test]
    fn root_symmetries_permute_the_sets() {
        for k in 2..=4 {
            let sys = SetSystem::new(k).unwrap();
            let syms = sys.root_symmetries();
            assert_eq!(syms.len(), factorial(k - 1) * factorial(k));
            for m in &syms {
                assert_eq!(m[0], 0);
                assert_eq!(sys.image(0, m), Some(0));
                let mut hit = vec![false; sys.len()];
                for s in 0..sys.len() {
                    hit[sys.image(s, m).expect("a blocked set")] = true;
                }
                assert!(hit.iter().all(|&h| h));
            }
        }
    }

    #[test]
    fn set_system_sizes() {
        assert_eq!(SetSystem::new(1).unwrap().len(), 1);
        assert_eq!(SetSystem::new(2).unwrap().len(), 2);
        let s3 = SetSystem::new(3).unwrap();
        assert!(s3.len() <= 36);
        assert!(s3.representatives()[0].perms().iter().all(|p| p.is_identity()));
    }

    #[test]
    fn line_ids_drop_one_digit() {
        let s = SetSystem::new(3).unwrap();
        // e = 2 + 1*3 + 0*9 (digits 2,1,0)
        assert_eq!(s.lines[0][5], 1);
        assert_eq!(s.lines[1][5], 2);
        assert_eq!(s.lines[2][5], 2 + 3);
    }

    #[test]
    fn no_set_holds_two_neighbors() {
        for k in 2..=3 {
            let s = SetSystem::new(k).unwrap();
            for set in 0..s.len() {
                let elems: Vec<usize> = BitSet::full(s.universe)
                    .iter()
                    .filter(|&e| s.set(set)[e / 64] >> (e % 64) & 1 == 1)
                    .collect();
                for &a in &elems {
                    for &b in &elems {
                        let diff = (0..k)
                            .filter(|&d| a / k.pow(d as u32) % k != b / k.pow(d as u32) % k)
                            .count();
                        assert_ne!(diff, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn decide_small() {
        assert!(!decide_uncoverable(2, 1, DEFAULT_NODE_BUDGET).unwrap());
        assert!(decide_uncoverable(2, 2, DEFAULT_NODE_BUDGET).unwrap());
        assert!(!decide_uncoverable(3, 5, DEFAULT_NODE_BUDGET).unwrap());
        assert!(decide_uncoverable(3, 6, DEFAULT_NODE_BUDGET).unwrap());
        assert!(decide_uncoverable(1, 1, DEFAULT_NODE_BUDGET).unwrap());
    }

    #[test]
    fn exact_small() {
        for (k, mu) in [(1, 1), (2, 2), (3, 6)] {
            let r = mu_exact(k, DEFAULT_NODE_BUDGET).unwrap();
            assert_eq!(r.value, MuValue::Exact(mu), "k={k}");
            assert_eq!(r.witness_columns.len(), mu);
            let cover = uncolorable_cover_from_columns(k, &r.witness_columns).unwrap();
            assert!(find_coloring(&cover).is_none());
        }
    }

    #[test]
    fn tiny_budget_gives_bracket() {
        let r = mu_exact(3, 3).unwrap();
        match r.value {
            MuValue::Bracket { lo, hi } => {
                assert_eq!(lo, 5);
                assert!(hi >= 6);
            }
            v => panic!("{v:?}"),
        }
        let f = r.frontier.clone().unwrap();
        assert_eq!(f.t, 5);
        let resumed = mu_exact_resume(3, DEFAULT_NODE_BUDGET, Some(f)).unwrap();
        assert_eq!(resumed.value, MuValue::Exact(6));
    }

    #[test]
    fn greedy_small() {
        assert_eq!(mu_greedy(1).unwrap().value, MuValue::Exact(1));
        let g2 = mu_greedy(2).unwrap();
        assert_eq!(g2.value, MuValue::Exact(2));
        let g3 = mu_greedy(3).unwrap();
        assert!((6..=13).contains(&g3.value.hi()));
    }

    #[test]
    fn witness_must_cover() {
        let only = vec![ColumnClass::identity(2)];
        assert!(matches!(
            uncolorable_cover_from_columns(2, &only),
            Err(Error::InvalidWitness(_))
        ));
        let c = cover_from_columns(2, &only).unwrap();
        assert_eq!(columns_of_cover(&c).unwrap(), only);
    }
}
