//! Blocked (bad) left assignments of `K_{k,t}`.
//!
//! A right vertex `u` is joined to the left fibers by a column of `k`
//! permutations. A left assignment `f` is *blocked* by the column when every
//! color of `u` is hit, i.e. when `i -> perms[i](f[i])` is a bijection. For a
//! perfect-matching column the blocked assignments are exactly
//! `f[i] = perms[i]⁻¹(π(i))` over the `k!` bijections `π`, so every column
//! blocks exactly `k!` of the `k^k` assignments.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{invalid, Error, Result};
use crate::perm::{all_permutations, factorial, universe_size, Assignment, Permutation};

/// Set of blocked assignment indices, as a bit vector over `0..k^k`.
pub type BlockedSet = BitSet;

/// Largest `k` whose canonical columns are listed explicitly.
pub const MAX_ENUMERATED_K: usize = 4;

/// The permutations joining each left fiber to one right fiber;
/// `perms[i]` maps colors of `v_{i+1}` to colors of the right vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Permutation>", into = "Vec<Permutation>")]
pub struct ColumnClass {
    perms: Vec<Permutation>,
}

impl ColumnClass {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        let k = perms.len();
        if k == 0 {
            return Err(invalid("a column needs at least one permutation"));
        }
        if let Some(p) = perms.iter().find(|p| p.len() != k) {
            return Err(invalid(format!("column of {k} entries holds permutation {p}")));
        }
        Ok(ColumnClass { perms })
    }

    pub fn identity(k: usize) -> Self {
        ColumnClass {
            perms: vec![Permutation::identity(k); k],
        }
    }

    pub fn k(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn is_canonical(&self) -> bool {
        self.perms[0].is_identity()
    }

    /// Relabel the right fiber so that `perms[0]` becomes the identity.
    pub fn canonicalize(&self) -> ColumnClass {
        let inv = self.perms[0].invert();
        ColumnClass {
            perms: self
                .perms
                .iter()
                .map(|p| inv.compose(p).expect("same size"))
                .collect(),
        }
    }

    /// `i -> perms[i](colors[i])`: the map from left vertices to the colors
    /// of the right vertex they dominate.
    pub fn dominated(&self, f: &Assignment) -> Vec<usize> {
        self.perms
            .iter()
            .zip(f.colors())
            .map(|(p, &c)| p.apply(c))
            .collect()
    }

    /// Uniformly random column (not canonicalized).
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let perms = (0..k)
            .map(|_| {
                let mut v: Vec<usize> = (0..k).collect();
                v.shuffle(rng);
                Permutation::new(v).expect("shuffle of 0..k")
            })
            .collect();
        ColumnClass { perms }
    }
}

impl TryFrom<Vec<Permutation>> for ColumnClass {
    type Error = Error;
    fn try_from(perms: Vec<Permutation>) -> Result<Self> {
        ColumnClass::new(perms)
    }
}

impl From<ColumnClass> for Vec<Permutation> {
    fn from(c: ColumnClass) -> Self {
        c.perms
    }
}

/// True iff the right vertex of `col` sees every one of its colors dominated
/// by `f`.
pub fn is_bad_for(f: &Assignment, col: &ColumnClass) -> bool {
    if f.k() != col.k() {
        return false;
    }
    let mut hit = vec![false; f.k()];
    col.dominated(f)
        .into_iter()
        .all(|c| !std::mem::replace(&mut hit[c], true))
}

/// Every assignment blocked by `col`, built from the `k!` bijections.
pub fn blocked_set(col: &ColumnClass) -> BlockedSet {
    let k = col.k();
    let inverses: Vec<Permutation> = col.perms.iter().map(Permutation::invert).collect();
    let weights: Vec<usize> = (0..k).map(|i| k.pow(i as u32)).collect();
    let mut set = BitSet::new(universe_size(k));
    for pi in all_permutations(k) {
        let idx = (0..k)
            .map(|i| inverses[i].apply(pi.apply(i)) * weights[i])
            .sum();
        set.insert(idx);
    }
    set
}

/// Number of canonical columns, `(k!)^(k-1)`.
pub fn column_class_count(k: usize) -> Option<u64> {
    (factorial(k) as u64).checked_pow(k.saturating_sub(1) as u32)
}

/// The canonical column with lexicographic rank `index`.
pub fn column_class_at(k: usize, index: u64, perms: &[Permutation]) -> ColumnClass {
    let base = perms.len() as u64;
    let mut out = vec![Permutation::identity(k); k];
    let mut rest = index;
    for slot in out[1..].iter_mut().rev() {
        *slot = perms[(rest % base) as usize].clone();
        rest /= base;
    }
    ColumnClass { perms: out }
}

/// All canonical columns (`perms[0]` = identity) in lexicographic order.
pub fn enumerate_column_classes(k: usize) -> Result<Vec<ColumnClass>> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    if k > MAX_ENUMERATED_K {
        return Err(Error::ResourceLimit {
            reason: format!(
                "{} canonical columns for k={k}; explicit enumeration stops at k={MAX_ENUMERATED_K}",
                column_class_count(k).map_or("too many".into(), |c| c.to_string())
            ),
            lo: 0,
            hi: None,
        });
    }
    let perms = all_permutations(k);
    let count = column_class_count(k).expect("small k");
    Ok((0..count).map(|i| column_class_at(k, i, &perms)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma1Mode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Outcome of checking the bad-set bound over a family of columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma1Report {
    pub k: usize,
    pub columns_checked: u64,
    pub min_population: usize,
    pub max_population: usize,
    pub bound: usize,
    /// No two bad assignments of one column map to the same bijection.
    pub injective: bool,
    /// `is_bad_for` agrees with the constructed blocked set on every assignment.
    pub membership_consistent: bool,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.max_population <= self.bound
            && self.min_population == self.bound
            && self.injective
            && self.membership_consistent
    }
}

fn check_column(col: &ColumnClass) -> (usize, bool, bool) {
    let k = col.k();
    let set = blocked_set(col);
    let mut images = std::collections::HashSet::new();
    let mut injective = true;
    let mut consistent = true;
    for idx in 0..universe_size(k) {
        let f = Assignment::decode(k, idx).expect("in range");
        let bad = is_bad_for(&f, col);
        consistent &= bad == set.contains(idx);
        if bad {
            injective &= images.insert(col.dominated(&f));
        }
    }
    (set.count(), injective, consistent)
}

/// Check that every column blocks at most (in fact exactly) `k!` assignments
/// and that the bad-assignment-to-bijection map is injective.
pub fn verify_lemma1(k: usize, mode: Lemma1Mode) -> Result<Lemma1Report> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let columns: Box<dyn Iterator<Item = ColumnClass>> = match mode {
        Lemma1Mode::Exhaustive => {
            if k > MAX_ENUMERATED_K {
                return Err(invalid(format!("exhaustive mode supports k <= {MAX_ENUMERATED_K}")));
            }
            Box::new(enumerate_column_classes(k)?.into_iter())
        }
        Lemma1Mode::Sampled { samples, seed } => {
            if k > 8 {
                return Err(invalid("sampled mode supports k <= 8"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Box::new((0..samples).map(move |_| ColumnClass::random(k, &mut rng)))
        }
    };
    let mut report = Lemma1Report {
        k,
        columns_checked: 0,
        min_population: usize::MAX,
        max_population: 0,
        bound: factorial(k),
        injective: true,
        membership_consistent: true,
    };
    for col in columns {
        let (pop, inj, cons) = check_column(&col);
        report.columns_checked += 1;
        report.min_population = report.min_population.min(pop);
        report.max_population = report.max_population.max(pop);
        report.injective &= inj;
        report.membership_consistent &= cons;
    }
    Ok(report)
}
