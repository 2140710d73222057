//! Permutations of `0..k` and left-side color assignments.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A bijection on `0..k`; `image[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        let mut seen = vec![false; k];
        for &x in &image {
            if x >= k || std::mem::replace(&mut seen[x], true) {
                return Err(invalid(format!("{image:?} is not a permutation of 0..{k}")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(k: usize) -> Self {
        Permutation {
            image: (0..k).collect(),
        }
    }

    /// `i -> (i + s) mod k`.
    pub fn shift(k: usize, s: usize) -> Self {
        Permutation {
            image: (0..k).map(|i| (i + s) % k).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(invalid(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        })
    }

    pub fn invert(&self) -> Permutation {
        let mut image = vec![0; self.len()];
        for (i, &x) in self.image.iter().enumerate() {
            image[x] = i;
        }
        Permutation { image }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = crate::Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Permutation::new(image)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.image
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All `k!` permutations of `0..k` in lexicographic order.
pub fn all_permutations(k: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(Permutation { image: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// `k^k`, the number of left assignments of `K_{k,t}`.
pub fn universe_size(k: usize) -> usize {
    k.pow(k as u32)
}

/// A color per left vertex: `colors[i]` is the color of `v_{i+1}`. Index
/// encoding is little-endian base `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    colors: Vec<usize>,
}

impl Assignment {
    pub fn new(colors: Vec<usize>) -> Result<Self> {
        let k = colors.len();
        if let Some(&c) = colors.iter().find(|&&c| c >= k) {
            return Err(invalid(format!("color {c} out of range 0..{k}")));
        }
        Ok(Assignment { colors })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn k(&self) -> usize {
        self.colors.len()
    }

    pub fn encode(&self) -> usize {
        let k = self.k();
        self.colors.iter().rev().fold(0, |acc, &c| acc * k + c)
    }

    pub fn decode(k: usize, index: usize) -> Result<Self> {
        if index >= universe_size(k) {
            return Err(invalid(format!("assignment index {index} out of range for k={k}")));
        }
        let mut colors = Vec::with_capacity(k);
        let mut rest = index;
        for _ in 0..k {
            colors.push(rest % k);
            rest /= k;
        }
        Ok(Assignment { colors })
    }
}
