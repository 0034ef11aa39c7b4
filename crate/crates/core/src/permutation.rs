use std::fmt;

use crate::error::{Error, Result};

/// Bijection on `{0, .., n-1}`.
///
/// As a matrix, `P[j][p(j)] = 1`: effective level `j` is fed by original level
/// `p(j)`, so `(P λ)_j = λ_{p(j)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(Error::InvalidPermutation(format!(
                    "{map:?} is not a bijection on 0..{n}"
                )));
            }
            seen[m] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// Two-level permutation exchanging `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Permutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (j, &m) in self.map.iter().enumerate() {
            inv[m] = j;
        }
        Permutation { map: inv }
    }

    /// Matrix product `self · other`, i.e. `j ↦ other(self(j))`.
    pub fn then(&self, other: &Permutation) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Permutation {
            map: self.map.iter().map(|&k| other.map[k]).collect(),
        }
    }

    /// Decomposes into at most `n - 1` swaps by selection sort.
    ///
    /// Applying the swaps in order to the array `[0, 1, .., n-1]` (exchanging
    /// the entries at the two positions) yields `[p(0), p(1), .., p(n-1)]`.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        let n = self.map.len();
        let mut arr: Vec<usize> = (0..n).collect();
        let mut pos: Vec<usize> = (0..n).collect();
        let mut swaps = Vec::new();
        for i in 0..n {
            let want = self.map[i];
            if arr[i] != want {
                let j = pos[want];
                let displaced = arr[i];
                arr.swap(i, j);
                pos[want] = i;
                pos[displaced] = j;
                swaps.push((i, j));
            }
        }
        swaps
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}
