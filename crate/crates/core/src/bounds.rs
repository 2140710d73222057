//! Closed-form thresholds for `K_{k,t}` and Monte Carlo checks of the
//! random-cover probabilities.
//!
//! Real-valued quantities are generic over [`Scalar`] and evaluated in log
//! space. Integer quantities that feed inequalities (`⌈k^k/k!⌉`, `⌊E[X]⌋`)
//! use exact integer arithmetic for `k <= 8`.

use num::bigint::BigInt;
use num::{BigRational, One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::blocking::{blocked_set, is_bad_for, ColumnClass};
use crate::error::{invalid, Result};
use crate::perm::{all_permutations, factorial, universe_size, Assignment};
use crate::scalar::{ln_factorial, Scalar};

pub const MAX_FORMULA_K: usize = 20;
/// Exact integer paths are used up to this `k` (`k^k <= 16777216`).
pub const MAX_EXACT_K: usize = 8;

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_FORMULA_K {
        return Err(invalid(format!("k must be in 1..={MAX_FORMULA_K}, got {k}")));
    }
    Ok(())
}

fn pow_u128(k: usize) -> u128 {
    (k as u128).pow(k as u32)
}

fn factorial_u128(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// `k^k`: the list-coloring threshold for `K_{k,t}`.
pub fn list_threshold(k: usize) -> Result<u128> {
    check_k(k)?;
    Ok(pow_u128(k))
}

/// `⌈k^k / k!⌉`: below this many right vertices every cover is colorable.
pub fn counting_lower(k: usize) -> Result<usize> {
    check_k(k)?;
    Ok(pow_u128(k).div_ceil(factorial_u128(k)) as usize)
}

/// `k!/k^k`, the chance a uniform column blocks a fixed assignment.
pub fn bad_prob<T: Scalar>(k: usize) -> T {
    (ln_factorial::<T>(k) - T::of(k) * T::of(k).ln()).exp()
}

pub fn bad_prob_exact(k: usize) -> BigRational {
    BigRational::new(BigInt::from(factorial_u128(k)), BigInt::from(pow_u128(k)))
}

/// `E[X] = k^k (1 - k!/k^k)^t`.
pub fn expected_survivors<T: Scalar>(k: usize, t: usize) -> T {
    if t == 0 {
        return T::of_f64(pow_u128(k) as f64);
    }
    let p = bad_prob::<T>(k);
    if p >= T::one() {
        return T::zero();
    }
    let ln_kk = T::of(k) * T::of(k).ln();
    (ln_kk + T::of(t) * (-p).ln_1p()).exp()
}

pub fn expected_survivors_exact(k: usize, t: usize) -> BigRational {
    let kk = BigInt::from(pow_u128(k));
    let q = BigRational::one() - bad_prob_exact(k);
    BigRational::from_integer(kk) * num::pow(q, t)
}

/// `⌊E[X]⌋`, exact for `k <= 8`.
pub fn floor_expected_survivors(k: usize, t: usize) -> u128 {
    if k <= MAX_EXACT_K {
        let e = expected_survivors_exact(k, t);
        e.floor().to_integer().to_u128().expect("at most k^k")
    } else {
        expected_survivors::<f64>(k, t).floor() as u128
    }
}

/// `t + ⌊k^k (1 - k!/k^k)^t⌋`: some cover of `K_{k,m}` at this `m` is
/// uncolorable.
pub fn theorem3_m(k: usize, t: usize) -> Result<usize> {
    check_k(k)?;
    Ok(t + floor_expected_survivors(k, t) as usize)
}

/// `⌈k^k ln(k!) / k!⌉`.
pub fn chosen_t(k: usize) -> Result<usize> {
    check_k(k)?;
    let ratio = (k as f64 * (k as f64).ln() - ln_factorial::<f64>(k)).exp();
    Ok((ratio * ln_factorial::<f64>(k)).ceil() as usize)
}

/// `1 + (k^k/k!)(ln k! + 1)`.
pub fn analytic_upper<T: Scalar>(k: usize) -> T {
    let lf = ln_factorial::<T>(k);
    let ratio = (T::of(k) * T::of(k).ln() - lf).exp();
    T::one() + ratio * (lf + T::one())
}

/// All closed-form quantities for one `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport<T> {
    pub k: usize,
    pub list_threshold: u128,
    pub counting_lower: usize,
    pub chosen_t: usize,
    /// `theorem3_m(k, chosen_t)`
    pub theorem3_m: usize,
    /// `⌈k^k ln(k!)/k!⌉ + k^k/k!`, the middle of the closing inequality.
    pub closing_middle: T,
    pub analytic_upper: T,
    pub bad_prob: T,
}

impl<T: Scalar> BoundsReport<T> {
    /// `⌈k^k/k!⌉ <= analytic_upper` and
    /// `theorem3_m(chosen_t) <= closing_middle <= analytic_upper`.
    pub fn chain_holds(&self) -> bool {
        let m = T::of(self.theorem3_m);
        T::of(self.counting_lower) <= self.analytic_upper
            && m <= self.closing_middle
            && self.closing_middle <= self.analytic_upper
    }
}

pub fn bounds_report<T: Scalar>(k: usize) -> Result<BoundsReport<T>> {
    check_k(k)?;
    let t = chosen_t(k)?;
    let ratio = (T::of(k) * T::of(k).ln() - ln_factorial::<T>(k)).exp();
    let report = BoundsReport {
        k,
        list_threshold: list_threshold(k)?,
        counting_lower: counting_lower(k)?,
        chosen_t: t,
        theorem3_m: theorem3_m(k, t)?,
        closing_middle: T::of(t) + ratio,
        analytic_upper: analytic_upper(k),
        bad_prob: bad_prob(k),
    };
    assert!(report.chain_holds(), "bound chain failed for k={k}: {report:?}");
    Ok(report)
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub mean: T,
    pub stderr: T,
    pub samples: usize,
}

impl<T: Scalar> Estimate<T> {
    /// `|mean - target| <= z · stderr`; an exact match passes even at zero
    /// standard error.
    pub fn within(&self, target: T, z: T) -> bool {
        (self.mean - target).abs() <= z * self.stderr
    }
}

const BLOCK: usize = 1024;

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Run `sample` `samples` times in fixed-size blocks, block `b` drawing from
/// stream `b` of `seed`; the result does not depend on the thread count.
fn estimate<T, F>(samples: usize, seed: u64, sample: F) -> Result<Estimate<T>>
where
    T: Scalar,
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }
    let blocks = samples.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let n = BLOCK.min(samples - b * BLOCK);
            (0..n).fold((0.0, 0.0), |(s, s2), _| {
                let x = sample(&mut rng);
                (s + x, s2 + x * x)
            })
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = samples as f64;
    let mean = s / n;
    let var = if samples > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mean: T::of_f64(mean),
        stderr: T::of_f64((var / n).sqrt()),
        samples,
    })
}

/// Mean number of left assignments surviving `t` uniform random columns.
pub fn monte_carlo_survivors<T: Scalar>(k: usize, t: usize, samples: usize, seed: u64) -> Result<Estimate<T>> {
    if k == 0 || k > 6 {
        return Err(invalid("survivor sampling supports 1 <= k <= 6"));
    }
    let n = universe_size(k);
    estimate(samples, seed, |rng| {
        let mut union = BitSet::new(n);
        for _ in 0..t {
            union.union_with(&blocked_set(&ColumnClass::random(k, rng)));
        }
        (n - union.count()) as f64
    })
}

/// Fraction of uniform random columns that block the all-zero assignment.
pub fn monte_carlo_bad_prob<T: Scalar>(k: usize, samples: usize, seed: u64) -> Result<Estimate<T>> {
    if k == 0 || k > 8 {
        return Err(invalid("bad-probability sampling supports 1 <= k <= 8"));
    }
    let f = Assignment::new(vec![0; k])?;
    estimate(samples, seed, |rng| {
        if is_bad_for(&f, &ColumnClass::random(k, rng)) {
            1.0
        } else {
            0.0
        }
    })
}

/// Exact fraction of all `(k!)^k` columns blocking the all-zero assignment.
pub fn exact_bad_fraction(k: usize) -> Result<BigRational> {
    if k == 0 || k > 4 {
        return Err(invalid("exhaustive column enumeration supports 1 <= k <= 4"));
    }
    let perms = all_permutations(k);
    let total = factorial(k).pow(k as u32);
    let f = Assignment::new(vec![0; k])?;
    let mut bad = 0usize;
    let mut digits = vec![0usize; k];
    for _ in 0..total {
        let col = ColumnClass::new(digits.iter().map(|&d| perms[d].clone()).collect())?;
        if is_bad_for(&f, &col) {
            bad += 1;
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < perms.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(BigRational::new(BigInt::from(bad), BigInt::from(total)))
}

/// What is known about `μ(k)` for a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuKnown {
    Exact(usize),
    GreedyUpper(usize),
    Unknown,
}

impl MuKnown {
    pub fn upper(&self) -> Option<usize> {
        match *self {
            MuKnown::Exact(v) | MuKnown::GreedyUpper(v) => Some(v),
            MuKnown::Unknown => None,
        }
    }

    fn cell(&self) -> String {
        match self {
            MuKnown::Exact(v) => v.to_string(),
            MuKnown::GreedyUpper(v) => format!("<={v}"),
            MuKnown::Unknown => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub k: usize,
    pub list_threshold: u128,
    pub counting_lower: usize,
    pub mu_known: MuKnown,
    pub theorem3_m: usize,
    pub analytic_upper: f64,
}

impl TableRow {
    /// `counting_lower <= μ <= analytic_upper` and `theorem3_m <= analytic_upper`.
    pub fn consistent(&self) -> bool {
        let mu_ok = self.mu_known.upper().is_none_or(|mu| {
            self.counting_lower <= mu && mu as f64 <= self.analytic_upper
        });
        mu_ok
            && self.counting_lower as f64 <= self.analytic_upper
            && self.theorem3_m as f64 <= self.analytic_upper
    }
}

/// One row per `k`: exact `μ(k)` for `k <= 3`, the greedy upper bound up to
/// `k = 6`, nothing beyond.
pub fn bounds_table(ks: impl IntoIterator<Item = usize>) -> Result<Vec<TableRow>> {
    ks.into_iter()
        .map(|k| {
            let r = bounds_report::<f64>(k)?;
            let mu_known = match k {
                1..=3 => MuKnown::Exact(crate::mu::mu_exact(k, crate::mu::DEFAULT_NODE_BUDGET)?.value.hi()),
                4..=6 => MuKnown::GreedyUpper(crate::mu::mu_greedy(k)?.value.hi()),
                _ => MuKnown::Unknown,
            };
            Ok(TableRow {
                k,
                list_threshold: r.list_threshold,
                counting_lower: r.counting_lower,
                mu_known,
                theorem3_m: r.theorem3_m,
                analytic_upper: r.analytic_upper,
            })
        })
        .collect()
}

const HEADERS: [&str; 6] = [
    "k",
    "list_threshold",
    "counting_lower",
    "mu_known",
    "theorem3_m",
    "analytic_upper",
];

fn cells(r: &TableRow) -> [String; 6] {
    [
        r.k.to_string(),
        r.list_threshold.to_string(),
        r.counting_lower.to_string(),
        r.mu_known.cell(),
        r.theorem3_m.to_string(),
        format!("{:.6}", r.analytic_upper),
    ]
}

pub fn render_csv(rows: &[TableRow]) -> String {
    let mut out = HEADERS.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&cells(r).join(","));
        out.push('\n');
    }
    out
}

pub fn render_text(rows: &[TableRow]) -> String {
    let body: Vec<[String; 6]> = rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..6)
        .map(|c| body.iter().map(|r| r[c].len()).chain([HEADERS[c].len()]).max().unwrap())
        .collect();
    let line = |cols: Vec<&str>| {
        let padded: Vec<String> = cols
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:>w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(HEADERS.to_vec());
    for r in &body {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
